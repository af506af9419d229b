//! Numeric interpretation of truth values and trees under a tape measure:
//! exact expectations, pushforward laws, extraction soundness for
//! entailments, the probability-one collapse, and the commutation of
//! extraction with tape reindexing.
//!
//! Everything here is a finite rational sum over cell decompositions.
//! Exceptional tapes are null and contribute nothing; to keep that
//! reading honest, expectations of values with exceptions are refused
//! under degenerate measures.

use crate::dist::{FinDist, Label};
use crate::lang::Code;
use crate::modality::{diamond, EntailmentJudgment};
use crate::rat::{self, Rational};
use crate::tape::ProductMeasure;
use crate::tapemap::TapeMapSpec;
use crate::trace::{mca_apply, TraceTree};
use crate::truth::TruthValue;
use crate::Error;

/// Exact expectation: the sum over partition cells of value times cell
/// mass. Exceptions contribute 0.
pub fn expect(v: &TruthValue, m: &ProductMeasure) -> Result<Rational, Error> {
    if v.has_exceptions() && !m.is_nondegenerate() {
        return Err(Error::DegenerateMeasure);
    }
    let mut sum = rat::zero();
    for (p, value) in v.cells() {
        sum += value * m.pattern_measure(p);
    }
    Ok(sum)
}

/// The pushforward law of a traced computation: the mass of each outcome
/// label is the total mass of the leaves producing it, with divergence
/// explicit. Masses sum to exactly 1 because leaf patterns partition the
/// space.
pub fn law(t: &TraceTree, m: &ProductMeasure) -> FinDist {
    let entries = t
        .leaves()
        .into_iter()
        .map(|(path, outcome)| (Label::of(&outcome), m.pattern_measure(&path)));
    FinDist::from_masses(entries).expect("leaf patterns partition the space")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractionEntry {
    pub code: Code,
    pub lhs: Rational,
    pub rhs: Rational,
}

/// Expectations of both sides of a holding entailment, per universe code.
/// Soundness means every left side is at most the right side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractionReport {
    pub measure: ProductMeasure,
    pub entries: Vec<ExtractionEntry>,
    pub sound: bool,
}

/// Extracts numeric bounds from a holding judgment: for every universe
/// code, the expectation of `phi(c)` against the expectation of the
/// diamond of `e . c`.
pub fn extraction_soundness(
    j: &EntailmentJudgment,
    m: &ProductMeasure,
) -> Result<ExtractionReport, Error> {
    if !j.holds {
        return Err(Error::JudgmentDoesNotHold);
    }
    let mut entries = Vec::new();
    for c in &j.universe {
        let tree = mca_apply(&j.evidence, c, j.space, j.fuel);
        let rhs = expect(&diamond(&tree, &j.psi)?, m)?;
        let lhs = expect(&j.phi.at(j.space.arity, c)?, m)?;
        entries.push(ExtractionEntry { code: c.clone(), lhs, rhs });
    }
    let sound = entries.iter().all(|e| e.lhs <= e.rhs);
    Ok(ExtractionReport { measure: m.clone(), entries, sound })
}

/// The Boolean probability-one collapse: true exactly when the value is 1
/// on every positive-measure cell. Exceptional tapes are null and
/// ignored; degenerate measures are rejected.
pub fn prob_one_collapse(v: &TruthValue, m: &ProductMeasure) -> Result<bool, Error> {
    if !m.is_nondegenerate() {
        return Err(Error::DegenerateMeasure);
    }
    Ok(v.cells()
        .iter()
        .all(|(p, value)| *value == rat::one() || m.pattern_measure(p) == rat::zero()))
}

/// Extraction commutes with tape reindexing: the expectation of a pulled
/// back truth value under the source measure equals the expectation of
/// the original under the pushforward measure, exactly.
pub fn check_extract_reindex(
    spec: &TapeMapSpec,
    v: &TruthValue,
    m: &ProductMeasure,
) -> Result<bool, Error> {
    let pushed = spec.pushforward_measure(m)?;
    let lhs = expect(&v.pullback(spec)?, m)?;
    let rhs = expect(v, &pushed)?;
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{beta_prime, random_trace_tree, random_truth_value, Rng};
    use crate::lang::parse_code;
    use crate::modality::{check_entailment, Mode, Proposition};
    use crate::rat::{one, rat, zero};
    use crate::tape::{Address, BitPattern, TapeSpace};
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn space1() -> TapeSpace {
        TapeSpace::new(1)
    }

    #[test]
    fn expectation_of_constants_and_exceptions() {
        let fair = ProductMeasure::fair();
        let half = TruthValue::constant(1, rat(1, 2)).unwrap();
        assert_eq!(expect(&half, &fair).unwrap(), rat(1, 2));
        // a null exception does not move the expectation
        assert_eq!(expect(&beta_prime(), &fair).unwrap(), one());
        // but expectations of values with exceptions need nondegeneracy
        let deg = ProductMeasure::uniform(one()).unwrap();
        assert!(matches!(expect(&beta_prime(), &deg), Err(Error::DegenerateMeasure)));
        assert!(expect(&half, &deg).is_ok());
    }

    #[test]
    fn law_of_dirac_and_bernoulli() {
        let fair = ProductMeasure::fair();
        let dirac = crate::trace::monad_return(space1(), Code::con("H"));
        assert_eq!(law(&dirac, &fair), FinDist::dirac(Label::Value(Code::con("H"))));

        let p = rat(1, 3);
        let biased = ProductMeasure::uniform(p.clone()).unwrap();
        let read = crate::trace::trace(&parse_code("(read 0 0)").unwrap(), space1(), 16);
        let d = law(&read, &biased);
        assert_eq!(d.mass(&Label::Value(Code::Bit(true))), p);
        assert_eq!(d.mass(&Label::Value(Code::Bit(false))), rat(2, 3));
    }

    #[test]
    fn extraction_soundness_reports() {
        let fair = ProductMeasure::fair();
        // reflexive entailment: equality of both sides
        let e = parse_code("(lam x (read 0 0))").unwrap();
        let universe = [Code::con("H")];
        let psi = Proposition::Crisp([Code::Bit(true)].into());
        let tree = mca_apply(&e, &universe[0], space1(), 32);
        let dia = diamond(&tree, &psi).unwrap();
        let mut table = std::collections::BTreeMap::new();
        table.insert(universe[0].clone(), dia);
        let j = check_entailment(
            space1(),
            &Proposition::Table(table),
            &e,
            &psi,
            &universe,
            32,
            Mode::Pointwise,
            None,
        )
        .unwrap();
        assert!(j.holds);
        let report = extraction_soundness(&j, &fair).unwrap();
        assert!(report.sound);
        assert_eq!(report.entries.len(), 1);
        assert_eq!(report.entries[0].lhs, report.entries[0].rhs);
        assert_eq!(report.entries[0].lhs, rat(1, 2));
    }

    #[test]
    fn extraction_rejects_failing_judgments() {
        // top |- psi via a bit-reading evidence fails; extraction of a
        // failing judgment is refused rather than reported vacuously.
        let j = check_entailment(
            space1(),
            &Proposition::crisp([Code::con("H")]),
            &parse_code("(lam x (read 0 0))").unwrap(),
            &Proposition::Crisp([Code::Bit(false)].into()),
            &[Code::con("H")],
            32,
            Mode::Pointwise,
            None,
        )
        .unwrap();
        assert!(!j.holds);
        assert!(matches!(
            extraction_soundness(&j, &ProductMeasure::fair()),
            Err(Error::JudgmentDoesNotHold)
        ));
    }

    #[test]
    fn probability_one_collapse_cases() {
        let fair = ProductMeasure::fair();
        assert!(prob_one_collapse(&TruthValue::top(1), &fair).unwrap());
        assert!(prob_one_collapse(&beta_prime(), &fair).unwrap());
        let half = TruthValue::constant(1, rat(1, 2)).unwrap();
        assert!(!prob_one_collapse(&half, &fair).unwrap());
        let deg = ProductMeasure::uniform(one()).unwrap();
        assert!(matches!(prob_one_collapse(&TruthValue::top(1), &deg), Err(Error::DegenerateMeasure)));
    }

    #[test]
    fn extraction_is_sound_but_not_complete() {
        // Equal expectations, pointwise incomparable: the numeric reading
        // cannot recover the pointwise order.
        let fair = ProductMeasure::fair();
        let on0 = TruthValue::indicator(1, &BitPattern::of(&[(Address::new(0, 0), false)]))
            .unwrap()
            .meet(&TruthValue::constant(1, rat(1, 2)).unwrap())
            .unwrap();
        let on1 = TruthValue::indicator(1, &BitPattern::of(&[(Address::new(0, 0), true)]))
            .unwrap()
            .meet(&TruthValue::constant(1, rat(1, 2)).unwrap())
            .unwrap();
        assert_eq!(expect(&on0, &fair).unwrap(), expect(&on1, &fair).unwrap());
        assert!(!on0.leq(&on1).unwrap());
        assert!(!on1.leq(&on0).unwrap());
    }

    #[test]
    fn extract_reindex_commutation_on_builtins() {
        let mut rng = Rng::new(53);
        let fair = ProductMeasure::fair();
        let biased = ProductMeasure::uniform(rat(1, 3)).unwrap();
        let specs = [
            TapeMapSpec::identity(1),
            TapeMapSpec::flip(),
            TapeMapSpec::drop_prefix(3),
            TapeMapSpec::split(2),
            TapeMapSpec::split(3),
        ];
        for spec in &specs {
            for m in [&fair, &biased] {
                for _ in 0..20 {
                    let v = random_truth_value(&mut rng, spec.dst_arity()).drop_exceptions();
                    assert!(check_extract_reindex(spec, &v, m).unwrap(), "spec {spec:?}");
                }
            }
        }
        // non-injective maps have no product pushforward
        let v = TruthValue::top(2);
        assert!(matches!(
            check_extract_reindex(&TapeMapSpec::block(2), &v, &fair),
            Err(Error::NonInjectivePushforward)
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        // Monotonicity of expectation in both orders.
        #[test]
        fn expectation_is_monotone(seed in any::<u64>()) {
            let mut rng = Rng::new(seed);
            let fair = ProductMeasure::fair();
            let a = random_truth_value(&mut rng, 1);
            let b = random_truth_value(&mut rng, 1);
            let lower = a.meet(&b).unwrap();
            prop_assert!(lower.leq(&a).unwrap());
            prop_assert!(expect(&lower, &fair).unwrap() <= expect(&a, &fair).unwrap());
            // the a.s. order also extracts monotonically
            if a.leq_as(&b, &fair).unwrap() {
                prop_assert!(expect(&a, &fair).unwrap() <= expect(&b, &fair).unwrap());
            }
        }

        // For crisp postconditions, the expectation of the diamond is the
        // event probability of the accepting set under the law.
        #[test]
        fn crisp_expectation_is_event_probability(seed in any::<u64>()) {
            let mut rng = Rng::new(seed);
            let fair = ProductMeasure::fair();
            let t = random_trace_tree(&mut rng, 1, 3);
            let accept: BTreeSet<Code> = match rng.below(3) {
                0 => [Code::Bit(false)].into(),
                1 => [Code::Bit(true)].into(),
                _ => [Code::Bit(false), Code::Bit(true)].into(),
            };
            let dia = crate::dist::crisp_diamond(&t, &accept).unwrap();
            let lhs = expect(&dia, &fair).unwrap();
            let d = law(&t, &fair);
            let rhs: crate::rat::Rational = accept
                .iter()
                .map(|c| d.mass(&Label::Value(c.clone())))
                .sum();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn law_masses_sum_to_one() {
        let mut rng = Rng::new(61);
        let fair = ProductMeasure::fair();
        for _ in 0..100 {
            let t = random_trace_tree(&mut rng, 1, 4);
            let d = law(&t, &fair);
            let total: Rational = d.entries().map(|(_, m)| m.clone()).sum();
            assert_eq!(total, one());
            assert!(d.entries().all(|(_, m)| *m > zero()));
        }
    }
}
