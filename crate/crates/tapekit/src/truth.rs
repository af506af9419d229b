//! Tape-indexed truth values: finitely represented functions from tapes
//! to success levels in `[0,1]`.
//!
//! A truth value is a finite partition of the space into bit-pattern
//! cells, each carrying a rational value, plus finitely many exceptional
//! tapes whose value differs from their cell. Pointwise Heyting structure
//! (min, max, Godel implication) is computed on common refinements.
//! Exceptional points are what the almost-sure order is allowed to
//! ignore: single tapes are null under every nondegenerate product
//! measure.

use std::fmt;

use num_traits::One;

use crate::rat::{self, Rational};
use crate::tape::{BitPattern, ProductMeasure, Tape};
use crate::tapemap::TapeMapSpec;
use crate::Error;

#[derive(Debug, Clone)]
pub struct TruthValue {
    arity: u32,
    cells: Vec<(BitPattern, Rational)>,
    exceptions: Vec<(Tape, Rational)>,
    /// Provenance remarks (e.g. exceptions dropped by a pullback). Never
    /// part of equality.
    notes: Vec<String>,
}

/// Where a pointwise comparison failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Cell { pattern: BitPattern, lhs: Rational, rhs: Rational },
    Exception { tape: Tape, lhs: Rational, rhs: Rational },
}

fn godel_impl(a: &Rational, b: &Rational) -> Rational {
    if a <= b {
        Rational::one()
    } else {
        b.clone()
    }
}

impl TruthValue {
    /// The constant truth value.
    pub fn constant(arity: u32, value: Rational) -> Result<Self, Error> {
        if !rat::is_unit(&value) {
            return Err(Error::ValueOutOfRange(value.to_string()));
        }
        Ok(TruthValue {
            arity,
            cells: vec![(BitPattern::everything(), value)],
            exceptions: Vec::new(),
            notes: Vec::new(),
        })
    }

    pub fn top(arity: u32) -> Self {
        TruthValue::constant(arity, rat::one()).unwrap()
    }

    pub fn bottom_value(arity: u32) -> Self {
        TruthValue::constant(arity, rat::zero()).unwrap()
    }

    /// Builds a truth value from partition cells, validating that the
    /// patterns are pairwise disjoint and jointly exhaustive. Disjointness
    /// is pairwise incompatibility; exhaustiveness is the exact mass check
    /// `sum of 2^-depth == 1`, which characterizes partitions of the
    /// space by patterns.
    pub fn from_cells(arity: u32, cells: Vec<(BitPattern, Rational)>) -> Result<Self, Error> {
        if cells.is_empty() {
            return Err(Error::InvalidTruthValue("no cells".into()));
        }
        let mut mass = rat::zero();
        for (i, (p, v)) in cells.iter().enumerate() {
            if !rat::is_unit(v) {
                return Err(Error::ValueOutOfRange(v.to_string()));
            }
            for a in p.addresses() {
                if a.component >= arity {
                    return Err(Error::ComponentOutOfRange { component: a.component, arity });
                }
            }
            let depth = u32::try_from(p.depth())
                .map_err(|_| Error::InvalidTruthValue("pattern too deep".into()))?;
            mass += rat::half_pow(depth);
            for (q, _) in &cells[i + 1..] {
                if p.compatible(q) {
                    return Err(Error::InvalidTruthValue(format!(
                        "cells overlap: {p:?} and {q:?}"
                    )));
                }
            }
        }
        if mass != rat::one() {
            return Err(Error::InvalidTruthValue(format!(
                "cells cover mass {mass}, not the whole space"
            )));
        }
        Ok(TruthValue { arity, cells, exceptions: Vec::new(), notes: Vec::new() })
    }

    /// The crisp indicator of a pattern event: 1 on the pattern, 0 off it.
    pub fn indicator(arity: u32, pattern: &BitPattern) -> Result<Self, Error> {
        if pattern.depth() == 0 {
            return TruthValue::constant(arity, rat::one());
        }
        let mut cells: Vec<(BitPattern, Rational)> = Vec::new();
        let mut sofar = BitPattern::everything();
        for (a, b) in pattern.iter() {
            let mut off = sofar.clone();
            off.constrain(a, !b);
            cells.push((off, rat::zero()));
            sofar.constrain(a, b);
        }
        cells.push((sofar, rat::one()));
        TruthValue::from_cells(arity, cells)
    }

    /// Overrides the value at one tape. Exceptional points are invisible
    /// to every nondegenerate measure.
    pub fn with_exception(mut self, tape: Tape, value: Rational) -> Result<Self, Error> {
        if !rat::is_unit(&value) {
            return Err(Error::ValueOutOfRange(value.to_string()));
        }
        if tape.arity() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, got: tape.arity() });
        }
        self.exceptions.retain(|(t, _)| *t != tape);
        if self.cell_value_at(&tape)? != value {
            self.exceptions.push((tape, value));
            self.exceptions.sort_by(|(a, _), (b, _)| a.cmp(b));
        }
        Ok(self)
    }

    pub fn arity(&self) -> u32 {
        self.arity
    }

    pub fn cells(&self) -> &[(BitPattern, Rational)] {
        &self.cells
    }

    pub fn exceptions(&self) -> &[(Tape, Rational)] {
        &self.exceptions
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub(crate) fn push_note(&mut self, note: String) {
        self.notes.push(note);
    }

    pub fn has_exceptions(&self) -> bool {
        !self.exceptions.is_empty()
    }

    fn cell_value_at(&self, t: &Tape) -> Result<Rational, Error> {
        for (p, v) in &self.cells {
            if p.matches(t)? {
                return Ok(v.clone());
            }
        }
        unreachable!("cells partition the space; no cell matched {t}")
    }

    /// The value at one tape: the exception value when listed, else the
    /// value of the unique covering cell.
    pub fn eval_at(&self, t: &Tape) -> Result<Rational, Error> {
        if t.arity() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, got: t.arity() });
        }
        for (tape, v) in &self.exceptions {
            if tape == t {
                return Ok(v.clone());
            }
        }
        self.cell_value_at(t)
    }

    /// Common refinement of two partitions: all compatible intersections,
    /// with both values.
    fn refine(&self, other: &TruthValue) -> Vec<(BitPattern, Rational, Rational)> {
        let mut out = Vec::new();
        for (p, v) in &self.cells {
            for (q, w) in &other.cells {
                if let Some(u) = p.union(q) {
                    out.push((u, v.clone(), w.clone()));
                }
            }
        }
        out
    }

    fn binary_op(
        &self,
        other: &TruthValue,
        op: impl Fn(&Rational, &Rational) -> Rational,
    ) -> Result<TruthValue, Error> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch { expected: self.arity, got: other.arity });
        }
        let cells = self
            .refine(other)
            .into_iter()
            .map(|(p, v, w)| (p, op(&v, &w)))
            .collect();
        let mut result =
            TruthValue::from_cells(self.arity, cells).expect("refinement is a partition");
        for (t, _) in self.exceptions.iter().chain(other.exceptions.iter()) {
            let value = op(&self.eval_at(t)?, &other.eval_at(t)?);
            result = result.with_exception(t.clone(), value)?;
        }
        Ok(result)
    }

    /// Pointwise minimum.
    pub fn meet(&self, other: &TruthValue) -> Result<TruthValue, Error> {
        self.binary_op(other, |a, b| a.min(b).clone())
    }

    /// Pointwise maximum.
    pub fn join(&self, other: &TruthValue) -> Result<TruthValue, Error> {
        self.binary_op(other, |a, b| a.max(b).clone())
    }

    /// Pointwise Godel implication: 1 where the antecedent is below the
    /// consequent, the consequent elsewhere.
    pub fn implies(&self, other: &TruthValue) -> Result<TruthValue, Error> {
        self.binary_op(other, godel_impl)
    }

    /// First pointwise violation of `self <= other`, if any: a refined
    /// cell where the inequality fails, or an exceptional tape.
    pub fn leq_witness(&self, other: &TruthValue) -> Result<Option<Witness>, Error> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch { expected: self.arity, got: other.arity });
        }
        for (p, v, w) in self.refine(other) {
            if v > w {
                return Ok(Some(Witness::Cell { pattern: p, lhs: v, rhs: w }));
            }
        }
        for (t, _) in self.exceptions.iter().chain(other.exceptions.iter()) {
            let lhs = self.eval_at(t)?;
            let rhs = other.eval_at(t)?;
            if lhs > rhs {
                return Ok(Some(Witness::Exception { tape: t.clone(), lhs, rhs }));
            }
        }
        Ok(None)
    }

    /// Pointwise order: `self(r) <= other(r)` on every tape.
    pub fn leq(&self, other: &TruthValue) -> Result<bool, Error> {
        Ok(self.leq_witness(other)?.is_none())
    }

    /// First almost-sure violation under `m`: a positive-measure refined
    /// cell where the inequality fails. Exceptional tapes are null and
    /// ignored; degenerate measures are rejected because they can give
    /// single tapes positive mass.
    pub fn leq_as_witness(
        &self,
        other: &TruthValue,
        m: &ProductMeasure,
    ) -> Result<Option<Witness>, Error> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch { expected: self.arity, got: other.arity });
        }
        if !m.is_nondegenerate() {
            return Err(Error::DegenerateMeasure);
        }
        for (p, v, w) in self.refine(other) {
            if v > w && m.pattern_measure(&p) > rat::zero() {
                return Ok(Some(Witness::Cell { pattern: p, lhs: v, rhs: w }));
            }
        }
        Ok(None)
    }

    /// Almost-sure order: `self(r) <= other(r)` off a null set.
    pub fn leq_as(&self, other: &TruthValue, m: &ProductMeasure) -> Result<bool, Error> {
        Ok(self.leq_as_witness(other, m)?.is_none())
    }

    /// Almost-sure equality: equal values on every positive-measure cell.
    pub fn as_equiv(&self, other: &TruthValue, m: &ProductMeasure) -> Result<bool, Error> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch { expected: self.arity, got: other.arity });
        }
        if !m.is_nondegenerate() {
            return Err(Error::DegenerateMeasure);
        }
        Ok(self
            .refine(other)
            .into_iter()
            .all(|(p, v, w)| v == w || m.pattern_measure(&p) == rat::zero()))
    }

    /// Pullback along a tape map: the truth value `r -> self(map(r))`.
    /// Cells pull back through pattern preimages (empty preimages drop
    /// out); exceptional tapes pull back when their preimage is a finite
    /// set of eventually-periodic tapes, and are dropped with a note
    /// otherwise (the dropped set is null either way).
    pub fn pullback(&self, spec: &TapeMapSpec) -> Result<TruthValue, Error> {
        if self.arity != spec.dst_arity() {
            return Err(Error::ArityMismatch { expected: spec.dst_arity(), got: self.arity });
        }
        let mut cells = Vec::new();
        for (p, v) in &self.cells {
            if let Some(q) = spec.preimage_pattern(p)? {
                cells.push((q, v.clone()));
            }
        }
        let mut out = TruthValue::from_cells(spec.src_arity(), cells)
            .expect("preimages of a partition partition the source space");
        for (t, v) in &self.exceptions {
            match spec.tape_preimages(t)? {
                Some(pres) => {
                    for pre in pres {
                        out = out.with_exception(pre, v.clone())?;
                    }
                }
                None => out.push_note(format!(
                    "exception at {t} has no finite preimage; dropped (null set)"
                )),
            }
        }
        Ok(out)
    }

    /// Drops all exceptional points, keeping the cell structure.
    pub fn drop_exceptions(&self) -> TruthValue {
        TruthValue {
            arity: self.arity,
            cells: self.cells.clone(),
            exceptions: Vec::new(),
            notes: self.notes.clone(),
        }
    }
}

/// Essential supremum of a finite family: pointwise maximum over the
/// common refinement, exceptions dropped. The result bounds every member
/// off a null set and is below any other such bound in the almost-sure
/// order.
pub fn ess_sup(family: &[TruthValue]) -> Result<TruthValue, Error> {
    ess_bound(family, |a, b| a.max(b).clone())
}

/// Essential infimum, dually.
pub fn ess_inf(family: &[TruthValue]) -> Result<TruthValue, Error> {
    ess_bound(family, |a, b| a.min(b).clone())
}

fn ess_bound(
    family: &[TruthValue],
    op: impl Fn(&Rational, &Rational) -> Rational + Copy,
) -> Result<TruthValue, Error> {
    let Some((first, rest)) = family.split_first() else {
        return Err(Error::EmptyFamily);
    };
    let mut acc = first.drop_exceptions();
    for v in rest {
        acc = acc.binary_op(&v.drop_exceptions(), op)?;
    }
    Ok(acc.drop_exceptions())
}

/// Semantic equality: the same value at every tape. Decided on the common
/// refinement plus both exception lists; provenance notes are ignored.
impl PartialEq for TruthValue {
    fn eq(&self, other: &Self) -> bool {
        if self.arity != other.arity {
            return false;
        }
        if self.refine(other).into_iter().any(|(_, v, w)| v != w) {
            return false;
        }
        for (t, _) in self.exceptions.iter().chain(other.exceptions.iter()) {
            let lhs = self.eval_at(t).expect("exception tape has the right arity");
            let rhs = other.eval_at(t).expect("exception tape has the right arity");
            if lhs != rhs {
                return false;
            }
        }
        true
    }
}

impl Eq for TruthValue {}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (p, v)) in self.cells.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if p.depth() == 0 {
                write!(f, "* -> {v}")?;
            } else {
                let cs: Vec<String> =
                    p.iter().map(|(a, b)| format!("{a}={}", u8::from(b))).collect();
                write!(f, "[{}] -> {v}", cs.join(" "))?;
            }
        }
        for (t, v) in &self.exceptions {
            write!(f, "; {t} -> {v}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{beta_prime, random_truth_value, zero_tail_tapes, Rng};
    use crate::rat::{one, rat, zero};
    use crate::tape::Address;
    use proptest::prelude::*;

    fn addr(c: u32, i: u64) -> Address {
        Address::new(c, i)
    }

    #[test]
    fn eval_constant_and_exception() {
        let top = TruthValue::top(1);
        assert_eq!(top.eval_at(&Tape::parse("01:0").unwrap()).unwrap(), one());

        let b = beta_prime();
        assert_eq!(b.eval_at(&Tape::parse(":0").unwrap()).unwrap(), zero());
        assert_eq!(b.eval_at(&Tape::parse("1:0").unwrap()).unwrap(), one());
    }

    #[test]
    fn godel_implication_cases() {
        let half = TruthValue::constant(1, rat(1, 2)).unwrap();
        let third = TruthValue::constant(1, rat(1, 3)).unwrap();
        assert_eq!(half.implies(&half).unwrap(), TruthValue::top(1));
        assert_eq!(TruthValue::top(1).implies(&third).unwrap(), third);
    }

    #[test]
    fn pointwise_vs_almost_sure_order() {
        let fair = ProductMeasure::fair();
        let top = TruthValue::top(1);
        let b = beta_prime();
        // pointwise fails at the exceptional tape, a.s. holds
        assert!(!top.leq(&b).unwrap());
        assert!(top.leq_as(&b, &fair).unwrap());
        assert!(matches!(
            top.leq_witness(&b).unwrap(),
            Some(Witness::Exception { .. })
        ));
        // reflexivity both ways
        assert!(b.leq(&b).unwrap());
        assert!(b.leq_as(&b, &fair).unwrap());
        // a genuine positive-measure gap fails both ways
        let p = BitPattern::of(&[(addr(0, 0), true)]);
        let on_one = TruthValue::indicator(1, &p).unwrap();
        let halved = on_one.meet(&TruthValue::constant(1, rat(1, 2)).unwrap()).unwrap();
        assert!(!on_one.leq(&halved).unwrap());
        assert!(!on_one.leq_as(&halved, &fair).unwrap());
    }

    #[test]
    fn as_equiv_identifies_null_differences() {
        let fair = ProductMeasure::fair();
        assert!(TruthValue::top(1).as_equiv(&beta_prime(), &fair).unwrap());
        let b = beta_prime();
        assert!(b.as_equiv(&b, &fair).unwrap());
        // differ on a measure-1/2 event
        let p0 = TruthValue::indicator(1, &BitPattern::of(&[(addr(0, 0), false)])).unwrap();
        let p1 = TruthValue::indicator(1, &BitPattern::of(&[(addr(0, 0), true)])).unwrap();
        assert!(!p0.as_equiv(&p1, &fair).unwrap());
        // degenerate measures are rejected
        let deg = ProductMeasure::uniform(one()).unwrap();
        assert!(matches!(b.as_equiv(&b, &deg), Err(Error::DegenerateMeasure)));
        assert!(matches!(b.leq_as(&b, &deg), Err(Error::DegenerateMeasure)));
    }

    #[test]
    fn ess_bounds() {
        let fair = ProductMeasure::fair();
        let b = beta_prime();
        // singleton family: same value with exceptions dropped
        let sup = ess_sup(std::slice::from_ref(&b)).unwrap();
        assert!(!sup.has_exceptions());
        assert!(sup.as_equiv(&b, &fair).unwrap());
        // the exception is null, so the sup with top is constant 1
        let sup = ess_sup(&[TruthValue::top(1), b]).unwrap();
        assert_eq!(sup, TruthValue::top(1));
        // disjoint indicators meet at 0
        let p0 = TruthValue::indicator(1, &BitPattern::of(&[(addr(0, 0), false)])).unwrap();
        let p1 = TruthValue::indicator(1, &BitPattern::of(&[(addr(0, 0), true)])).unwrap();
        assert_eq!(ess_inf(&[p0, p1]).unwrap(), TruthValue::bottom_value(1));
        assert!(matches!(ess_sup(&[]), Err(Error::EmptyFamily)));
    }

    #[test]
    fn pullback_examples() {
        // identity: unchanged
        let b = beta_prime();
        assert_eq!(b.pullback(&TapeMapSpec::identity(1)).unwrap(), b);

        // flip moves the exceptional tape to all-ones
        let pulled = b.pullback(&TapeMapSpec::flip()).unwrap();
        assert_eq!(pulled.eval_at(&Tape::constant(1, true)).unwrap(), zero());
        assert_eq!(pulled.eval_at(&Tape::constant(1, false)).unwrap(), one());

        // split: "destination bit (1,0) = 1" becomes "source bit (0,1) = 1"
        let dst = TruthValue::indicator(2, &BitPattern::of(&[(addr(1, 0), true)])).unwrap();
        let src = dst.pullback(&TapeMapSpec::split(2)).unwrap();
        assert_eq!(src.eval_at(&Tape::parse("01:0").unwrap()).unwrap(), one());
        assert_eq!(src.eval_at(&Tape::parse("00:0").unwrap()).unwrap(), zero());
    }

    #[test]
    fn pullback_drops_unrepresentable_exceptions_with_a_note() {
        // Subsampling leaves infinitely many source bits free, so the
        // exception has no finite preimage.
        let even = TapeMapSpec::new(
            1,
            vec![crate::tapemap::ComponentMap {
                src_component: 0,
                stride: 2,
                offset: 0,
                negate: false,
            }],
        );
        let b = beta_prime();
        let pulled = b.pullback(&even).unwrap();
        assert!(!pulled.has_exceptions());
        assert_eq!(pulled.notes().len(), 1);
        // semantically the pullback is top off a null set
        assert_eq!(pulled.drop_exceptions(), TruthValue::top(1));
    }

    #[test]
    fn eval_coherence_of_binary_ops() {
        let mut rng = Rng::new(31);
        let r0 = Tape::constant(1, false);
        for _ in 0..60 {
            let a = random_truth_value(&mut rng, 1);
            let b = random_truth_value(&mut rng, 1);
            let meet = a.meet(&b).unwrap();
            let join = a.join(&b).unwrap();
            let imp = a.implies(&b).unwrap();
            let mut probes = zero_tail_tapes(1, 6);
            probes.push(r0.clone());
            for (t, _) in a.exceptions().iter().chain(b.exceptions()) {
                probes.push(t.clone());
            }
            for t in &probes {
                let va = a.eval_at(t).unwrap();
                let vb = b.eval_at(t).unwrap();
                assert_eq!(meet.eval_at(t).unwrap(), va.clone().min(vb.clone()));
                assert_eq!(join.eval_at(t).unwrap(), va.clone().max(vb.clone()));
                assert_eq!(imp.eval_at(t).unwrap(), godel_impl(&va, &vb));
            }
        }
    }

    #[test]
    fn pullback_commutes_with_heyting_ops_and_is_monotone() {
        let mut rng = Rng::new(47);
        let specs = [TapeMapSpec::flip(), TapeMapSpec::split(2), TapeMapSpec::drop_prefix(2), TapeMapSpec::block(2)];
        for spec in &specs {
            for _ in 0..25 {
                let a = random_truth_value(&mut rng, spec.dst_arity());
                let b = random_truth_value(&mut rng, spec.dst_arity());
                let pa = a.pullback(spec).unwrap();
                let pb = b.pullback(spec).unwrap();
                assert_eq!(a.meet(&b).unwrap().pullback(spec).unwrap(), pa.meet(&pb).unwrap());
                assert_eq!(a.join(&b).unwrap().pullback(spec).unwrap(), pa.join(&pb).unwrap());
                assert_eq!(
                    a.implies(&b).unwrap().pullback(spec).unwrap(),
                    pa.implies(&pb).unwrap()
                );
                if a.leq(&b).unwrap() {
                    assert!(pa.leq(&pb).unwrap());
                }
                let lower = a.meet(&b).unwrap();
                assert!(lower.pullback(spec).unwrap().leq(&pa).unwrap());
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        // Heyting adjunction in both the pointwise and almost-sure orders.
        #[test]
        fn heyting_adjunction(seed in any::<u64>()) {
            let mut rng = Rng::new(seed);
            let fair = ProductMeasure::fair();
            let a = random_truth_value(&mut rng, 1);
            let b = random_truth_value(&mut rng, 1);
            let c = random_truth_value(&mut rng, 1);
            let imp = a.implies(&b).unwrap();
            let meet = a.meet(&c).unwrap();
            prop_assert_eq!(meet.leq(&b).unwrap(), c.leq(&imp).unwrap());
            prop_assert_eq!(
                meet.leq_as(&b, &fair).unwrap(),
                c.leq_as(&imp, &fair).unwrap()
            );
        }

        // Essential bounds: the sup dominates each member almost surely
        // and sits below every other essential upper bound.
        #[test]
        fn ess_sup_is_the_least_essential_bound(seed in any::<u64>()) {
            let mut rng = Rng::new(seed);
            let fair = ProductMeasure::fair();
            let family: Vec<TruthValue> =
                (0..1 + rng.below(3)).map(|_| random_truth_value(&mut rng, 1)).collect();
            let sup = ess_sup(&family).unwrap();
            let inf = ess_inf(&family).unwrap();
            for v in &family {
                prop_assert!(v.leq_as(&sup, &fair).unwrap());
                prop_assert!(inf.leq_as(v, &fair).unwrap());
            }
            // any other essential bound dominates the sup
            let other = sup.join(&random_truth_value(&mut rng, 1)).unwrap();
            prop_assert!(sup.leq_as(&other, &fair).unwrap());
        }

        // Preorder and compatibility properties of the two orders.
        #[test]
        fn order_properties(seed in any::<u64>()) {
            let mut rng = Rng::new(seed);
            let fair = ProductMeasure::fair();
            let a = random_truth_value(&mut rng, 1);
            let b = random_truth_value(&mut rng, 1);
            let c = random_truth_value(&mut rng, 1);
            // reflexivity
            prop_assert!(a.leq(&a).unwrap());
            prop_assert!(a.leq_as(&a, &fair).unwrap());
            prop_assert!(a.as_equiv(&a, &fair).unwrap());
            // pointwise implies almost-sure
            if a.leq(&b).unwrap() {
                prop_assert!(a.leq_as(&b, &fair).unwrap());
            }
            // transitivity of the a.s. preorder
            if a.leq_as(&b, &fair).unwrap() && b.leq_as(&c, &fair).unwrap() {
                prop_assert!(a.leq_as(&c, &fair).unwrap());
            }
            // as_equiv is symmetric and transitive
            if a.as_equiv(&b, &fair).unwrap() {
                prop_assert!(b.as_equiv(&a, &fair).unwrap());
                if b.as_equiv(&c, &fair).unwrap() {
                    prop_assert!(a.as_equiv(&c, &fair).unwrap());
                }
            }
            // antisymmetry up to almost-sure equivalence
            prop_assert_eq!(
                a.leq_as(&b, &fair).unwrap() && b.leq_as(&a, &fair).unwrap(),
                a.as_equiv(&b, &fair).unwrap()
            );
        }
    }
}
