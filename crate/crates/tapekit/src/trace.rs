//! Symbolic execution of codes into finite decision trees over tape bits.
//!
//! A trace tree is the exact cylinder decomposition of a fuel-bounded
//! computation: every root-to-leaf path constrains pairwise-distinct
//! addresses, and following a tape's bits through the tree reaches the
//! same outcome as running the evaluator on that tape.
//!
//! Trees carry the reader-monad structure. Bind grafts the continuation's
//! tree at every value leaf and collapses reads of addresses already
//! constrained on the path: the same tape is threaded through the
//! continuation, so reused randomness stays perfectly correlated. Split
//! sequencing instead routes the two stages through disjoint address
//! progressions, which is what makes their draws independent.

use std::sync::Arc;

use crate::lang::{eval_core, BottomReason, Code, Halt, Outcome};
use crate::tape::{Address, BitPattern, TapeSpace, Tape};
use crate::tapemap::TapeMapSpec;
use crate::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceNode {
    Leaf(Outcome),
    Branch { addr: Address, zero: Arc<TraceNode>, one: Arc<TraceNode> },
}

/// A finite decision tree over tape addresses, tagged with its space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceTree {
    space: TapeSpace,
    root: Arc<TraceNode>,
}

impl TraceTree {
    /// Wraps a node, checking the path-distinctness invariant.
    pub fn new(space: TapeSpace, root: Arc<TraceNode>) -> Self {
        let mut path = BitPattern::everything();
        assert_paths_valid(&root, &mut path, space);
        TraceTree { space, root }
    }

    pub fn leaf(space: TapeSpace, outcome: Outcome) -> Self {
        TraceTree { space, root: Arc::new(TraceNode::Leaf(outcome)) }
    }

    pub fn space(&self) -> TapeSpace {
        self.space
    }

    pub fn root(&self) -> &TraceNode {
        &self.root
    }

    /// All leaves with their path patterns. The patterns are pairwise
    /// disjoint and jointly cover the whole space.
    pub fn leaves(&self) -> Vec<(BitPattern, Outcome)> {
        let mut out = Vec::new();
        collect_leaves(&self.root, BitPattern::everything(), &mut out);
        out
    }

    /// The outcome reached by following the tape's bits through the tree.
    pub fn outcome_at(&self, t: &Tape) -> Result<Outcome, Error> {
        let mut node = &*self.root;
        loop {
            match node {
                TraceNode::Leaf(o) => return Ok(o.clone()),
                TraceNode::Branch { addr, zero, one } => {
                    node = if t.read(*addr)? { one } else { zero };
                }
            }
        }
    }

    /// Distinct proper values appearing at leaves.
    pub fn value_outcomes(&self) -> Vec<Code> {
        let mut out: Vec<Code> = self
            .leaves()
            .into_iter()
            .filter_map(|(_, o)| match o {
                Outcome::Value(c) => Some(c),
                Outcome::Bottom(_) => None,
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

fn assert_paths_valid(node: &TraceNode, path: &mut BitPattern, space: TapeSpace) {
    match node {
        TraceNode::Leaf(_) => {}
        TraceNode::Branch { addr, zero, one } => {
            assert!(space.contains(*addr), "branch address outside the tape space");
            assert!(
                path.get(*addr).is_none(),
                "address {addr} repeats along a trace-tree path"
            );
            let mut p0 = path.clone();
            p0.constrain(*addr, false);
            assert_paths_valid(zero, &mut p0, space);
            let mut p1 = path.clone();
            p1.constrain(*addr, true);
            assert_paths_valid(one, &mut p1, space);
        }
    }
}

fn collect_leaves(node: &TraceNode, path: BitPattern, out: &mut Vec<(BitPattern, Outcome)>) {
    match node {
        TraceNode::Leaf(o) => out.push((path, o.clone())),
        TraceNode::Branch { addr, zero, one } => {
            let mut p0 = path.clone();
            p0.constrain(*addr, false);
            collect_leaves(zero, p0, out);
            let mut p1 = path;
            p1.constrain(*addr, true);
            collect_leaves(one, p1, out);
        }
    }
}

/// Symbolically executes a closed code over the given space: concrete
/// evaluation against a partial tape assignment, forking on the first
/// unconstrained read. Each path replays the evaluator with the full fuel
/// budget, so leaf outcomes agree with `eval` tape by tape.
pub fn trace(c: &Code, space: TapeSpace, fuel: u64) -> TraceTree {
    let root = explore(c, space, fuel, &BitPattern::everything());
    TraceTree::new(space, root)
}

fn explore(c: &Code, space: TapeSpace, fuel: u64, path: &BitPattern) -> Arc<TraceNode> {
    let mut reader = |a: Address| path.get(a).ok_or(Halt::NeedBit(a));
    match eval_core(c, space.arity, &mut reader, fuel) {
        Ok((nf, _)) => Arc::new(TraceNode::Leaf(Outcome::Value(nf))),
        Err(Halt::Fuel) => Arc::new(TraceNode::Leaf(Outcome::Bottom(BottomReason::FuelExhausted))),
        Err(Halt::Stuck) => Arc::new(TraceNode::Leaf(Outcome::Bottom(BottomReason::Stuck))),
        Err(Halt::NeedBit(addr)) => {
            let mut p0 = path.clone();
            p0.constrain(addr, false);
            let mut p1 = path.clone();
            p1.constrain(addr, true);
            Arc::new(TraceNode::Branch {
                addr,
                zero: explore(c, space, fuel, &p0),
                one: explore(c, space, fuel, &p1),
            })
        }
    }
}

/// The monadic application of the underlying combinatory algebra: the
/// decision tree of `c1 . c2`.
pub fn mca_apply(c1: &Code, c2: &Code, space: TapeSpace, fuel: u64) -> TraceTree {
    trace(&Code::app(c1.clone(), c2.clone()), space, fuel)
}

/// Unit of the trace-tree monad: a computation that ignores the tape.
pub fn monad_return(space: TapeSpace, x: Code) -> TraceTree {
    TraceTree::leaf(space, Outcome::Value(x))
}

/// Kleisli bind. The continuation's tree is grafted at every value leaf;
/// reads of addresses already constrained on the path collapse to the
/// constrained side, so both stages observe the same tape.
pub fn monad_bind(t: &TraceTree, mut f: impl FnMut(&Code) -> TraceTree) -> TraceTree {
    let space = t.space;
    let root = bind_node(&t.root, &BitPattern::everything(), &mut |x| {
        let sub = f(x);
        assert_eq!(sub.space, space, "continuation tree lives in a different space");
        sub.root
    });
    TraceTree::new(space, root)
}

fn bind_node(
    node: &TraceNode,
    path: &BitPattern,
    f: &mut dyn FnMut(&Code) -> Arc<TraceNode>,
) -> Arc<TraceNode> {
    match node {
        TraceNode::Leaf(Outcome::Bottom(reason)) => {
            Arc::new(TraceNode::Leaf(Outcome::Bottom(*reason)))
        }
        TraceNode::Leaf(Outcome::Value(x)) => {
            let sub = f(x);
            collapse(&sub, path)
        }
        TraceNode::Branch { addr, zero, one } => {
            let mut p0 = path.clone();
            p0.constrain(*addr, false);
            let mut p1 = path.clone();
            p1.constrain(*addr, true);
            Arc::new(TraceNode::Branch {
                addr: *addr,
                zero: bind_node(zero, &p0, f),
                one: bind_node(one, &p1, f),
            })
        }
    }
}

/// Prunes a tree against a path constraint: branches on constrained
/// addresses keep only the consistent side.
fn collapse(node: &TraceNode, path: &BitPattern) -> Arc<TraceNode> {
    match node {
        TraceNode::Leaf(o) => Arc::new(TraceNode::Leaf(o.clone())),
        TraceNode::Branch { addr, zero, one } => match path.get(*addr) {
            Some(false) => collapse(zero, path),
            Some(true) => collapse(one, path),
            None => {
                let mut p0 = path.clone();
                p0.constrain(*addr, false);
                let mut p1 = path.clone();
                p1.constrain(*addr, true);
                Arc::new(TraceNode::Branch {
                    addr: *addr,
                    zero: collapse(zero, &p0),
                    one: collapse(one, &p1),
                })
            }
        },
    }
}

/// Reinterprets a tree over the destination space of `spec` as a tree
/// over its source space: branch addresses are rewired backwards, a
/// negating map swaps the children, and branches that land on an address
/// already constrained on the path collapse (non-injective maps can merge
/// distinct destination reads into one source bit).
pub fn reindex_tree(spec: &TapeMapSpec, t: &TraceTree) -> Result<TraceTree, Error> {
    if t.space.arity != spec.dst_arity() {
        return Err(Error::ArityMismatch { expected: spec.dst_arity(), got: t.space.arity });
    }
    let space = TapeSpace::new(spec.src_arity());
    let root = reindex_node(&t.root, spec, &BitPattern::everything())?;
    Ok(TraceTree::new(space, root))
}

fn reindex_node(
    node: &TraceNode,
    spec: &TapeMapSpec,
    path: &BitPattern,
) -> Result<Arc<TraceNode>, Error> {
    match node {
        TraceNode::Leaf(o) => Ok(Arc::new(TraceNode::Leaf(o.clone()))),
        TraceNode::Branch { addr, zero, one } => {
            let (src, neg) = spec.resolve(*addr)?;
            // Child taken when the *source* bit is b corresponds to image
            // bit b ^ neg.
            let (src_zero, src_one) = if neg { (one, zero) } else { (zero, one) };
            match path.get(src) {
                Some(false) => reindex_node(src_zero, spec, path),
                Some(true) => reindex_node(src_one, spec, path),
                None => {
                    let mut p0 = path.clone();
                    p0.constrain(src, false);
                    let mut p1 = path.clone();
                    p1.constrain(src, true);
                    Ok(Arc::new(TraceNode::Branch {
                        addr: src,
                        zero: reindex_node(src_zero, spec, &p0)?,
                        one: reindex_node(src_one, spec, &p1)?,
                    }))
                }
            }
        }
    }
}

/// Split sequencing: the first stage reads through the first progression
/// of the split map, the continuation through the second, so the two
/// stages consume disjoint parts of one tape.
pub fn bind_split(
    m: &TraceTree,
    mut f: impl FnMut(&Code) -> TraceTree,
    split: &TapeMapSpec,
) -> Result<TraceTree, Error> {
    if split.src_arity() != 1 || split.dst_arity() < 2 {
        return Err(Error::ArityMismatch { expected: 2, got: split.dst_arity() });
    }
    let k = split.dst_arity();
    let even_route = TapeMapSpec::proj(0, k).compose(split)?;
    let odd_route = TapeMapSpec::proj(1, k).compose(split)?;
    let routed_m = reindex_tree(&even_route, m)?;
    let space = routed_m.space;
    let root = bind_node(&routed_m.root, &BitPattern::everything(), &mut |x| {
        let sub = f(x);
        let routed = reindex_tree(&odd_route, &sub).expect("continuation tree arity mismatch");
        routed.root
    });
    Ok(TraceTree::new(space, root))
}
