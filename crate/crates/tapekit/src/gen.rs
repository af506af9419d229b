//! Deterministic generators used by the axiom-checking reports and the
//! exhaustive desk-scale checks. Seeded, so every report is reproducible.

use crate::lang::Code;
use crate::tape::{Component, Tail, Tape};

/// SplitMix64; tiny, deterministic, good enough for fixture generation.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `0..bound` (bound > 0).
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }

    pub fn bool(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }

    /// A rational in `[0,1]` with denominator up to `max_den`.
    pub fn unit_rational(&mut self, max_den: u64) -> crate::rat::Rational {
        let den = 1 + self.below(max_den);
        let num = self.below(den + 1);
        crate::rat::rat(num as i64, den as i64)
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len() as u64) as usize]
    }
}

/// Every tape of the given arity whose components are depth-`depth`
/// prefixes followed by constant zeros. These are the canonical finite
/// probes: any computation reading fewer than `depth` bits per component
/// is fully determined on them.
pub fn zero_tail_tapes(arity: u32, depth: u32) -> Vec<Tape> {
    let total = arity * depth;
    assert!(total <= 24, "zero-tail enumeration of 2^{total} tapes is past desk scale");
    (0u64..1 << total)
        .map(|mask| {
            let comps = (0..arity)
                .map(|c| {
                    let bits =
                        (0..depth).map(|i| mask >> (c * depth + i) & 1 == 1).collect::<Vec<_>>();
                    Component::new(bits, Tail::Const(false))
                })
                .collect();
            Tape::new(comps)
        })
        .collect()
}

/// A random closed code of the language, reading only small addresses of
/// an arity-`arity` space. Stuck and diverging shapes are intentionally
/// possible; both are ordinary outcomes.
pub fn random_code(rng: &mut Rng, arity: u32) -> Code {
    random_code_depth(rng, arity, 3)
}

fn random_code_depth(rng: &mut Rng, arity: u32, depth: u32) -> Code {
    use crate::lang::Code as C;
    let read = |rng: &mut Rng| C::read(rng.below(arity as u64), rng.below(3));
    if depth == 0 {
        return match rng.below(5) {
            0 => C::Bit(rng.bool()),
            1 => C::Nat(rng.below(3)),
            2 => C::con(if rng.bool() { "H" } else { "T" }),
            3 => C::I,
            _ => read(rng),
        };
    }
    let sub = |rng: &mut Rng| random_code_depth(rng, arity, depth - 1);
    match rng.below(10) {
        0 => C::apps(C::IfBit, [read(rng), sub(rng), sub(rng)]),
        1 => C::apps(C::IfBit, [sub(rng), sub(rng), sub(rng)]),
        2 => C::apps(C::Pair, [sub(rng), sub(rng)]),
        3 => C::app(C::Fst, C::apps(C::Pair, [sub(rng), sub(rng)])),
        4 => C::apps(C::K, [sub(rng), sub(rng)]),
        5 => C::app(C::I, sub(rng)),
        6 => C::app(C::Succ, C::Nat(rng.below(4))),
        7 => C::apps(C::IfZero, [C::Nat(rng.below(2)), sub(rng), sub(rng)]),
        8 => read(rng),
        _ => C::apps(C::S, [C::K, C::K, sub(rng)]),
    }
}

/// A random well-formed trace tree with bit and divergence leaves.
pub fn random_trace_tree(rng: &mut Rng, arity: u32, max_depth: u32) -> crate::trace::TraceTree {
    use crate::lang::{BottomReason, Outcome};
    use crate::trace::{TraceNode, TraceTree};
    use std::sync::Arc;

    fn node(
        rng: &mut Rng,
        arity: u32,
        depth: u32,
        used: &crate::tape::BitPattern,
    ) -> Arc<TraceNode> {
        let make_leaf = depth == 0 || rng.below(5) < 2;
        if !make_leaf {
            // find an address not yet constrained on this path
            for _ in 0..8 {
                let a = crate::tape::Address::new(rng.below(arity as u64) as u32, rng.below(5));
                if used.get(a).is_none() {
                    let mut u0 = used.clone();
                    u0.constrain(a, false);
                    let mut u1 = used.clone();
                    u1.constrain(a, true);
                    return Arc::new(TraceNode::Branch {
                        addr: a,
                        zero: node(rng, arity, depth - 1, &u0),
                        one: node(rng, arity, depth - 1, &u1),
                    });
                }
            }
        }
        let outcome = match rng.below(5) {
            0 => Outcome::Bottom(BottomReason::FuelExhausted),
            1 | 2 => Outcome::Value(Code::Bit(false)),
            _ => Outcome::Value(Code::Bit(true)),
        };
        Arc::new(TraceNode::Leaf(outcome))
    }

    let root = node(rng, arity, max_depth, &crate::tape::BitPattern::everything());
    TraceTree::new(crate::tape::TapeSpace::new(arity), root)
}

/// A random truth value: a decision-tree partition over small addresses
/// with rational values, sometimes carrying a null exception.
pub fn random_truth_value(rng: &mut Rng, arity: u32) -> crate::truth::TruthValue {
    use crate::rat::Rational;
    use crate::tape::{Address, BitPattern};

    fn split(
        rng: &mut Rng,
        arity: u32,
        depth: u32,
        path: &BitPattern,
        cells: &mut Vec<(BitPattern, Rational)>,
    ) {
        if depth > 0 && rng.below(3) != 0 {
            for _ in 0..8 {
                let a = Address::new(rng.below(arity as u64) as u32, rng.below(4));
                if path.get(a).is_none() {
                    let mut p0 = path.clone();
                    p0.constrain(a, false);
                    let mut p1 = path.clone();
                    p1.constrain(a, true);
                    split(rng, arity, depth - 1, &p0, cells);
                    split(rng, arity, depth - 1, &p1, cells);
                    return;
                }
            }
        }
        cells.push((path.clone(), rng.unit_rational(6)));
    }

    let mut cells = Vec::new();
    split(rng, arity, 3, &BitPattern::everything(), &mut cells);
    let mut tv = crate::truth::TruthValue::from_cells(arity, cells).expect("split partitions");
    if rng.below(3) == 0 {
        tv = tv.with_exception(random_tape(rng, arity), rng.unit_rational(4)).unwrap();
    }
    tv
}

/// The strictness fixture: constant 1 except at the all-zeros tape,
/// where the value is 0. Almost-surely equal to 1 under any
/// nondegenerate measure, but not pointwise above any positive constant.
pub fn beta_prime() -> crate::truth::TruthValue {
    crate::truth::TruthValue::top(1)
        .with_exception(Tape::constant(1, false), crate::rat::zero())
        .unwrap()
}

/// A random eventually-periodic tape of the given arity.
pub fn random_tape(rng: &mut Rng, arity: u32) -> Tape {
    let comps = (0..arity)
        .map(|_| {
            let plen = rng.below(4) as usize;
            let prefix = (0..plen).map(|_| rng.bool()).collect();
            let tail = if rng.bool() {
                Tail::Const(rng.bool())
            } else {
                let wlen = 1 + rng.below(3) as usize;
                Tail::Periodic((0..wlen).map(|_| rng.bool()).collect())
            };
            Component::new(prefix, tail)
        })
        .collect();
    Tape::new(comps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_tail_enumeration_is_exhaustive_and_distinct() {
        let tapes = zero_tail_tapes(2, 2);
        assert_eq!(tapes.len(), 16);
        let mut sorted = tapes.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 16);
    }

    #[test]
    fn rng_is_deterministic() {
        let mut a = Rng::new(7);
        let mut b = Rng::new(7);
        for _ in 0..10 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }
}
