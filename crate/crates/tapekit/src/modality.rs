//! The partial-correctness modality and evidence-tracked entailment.
//!
//! `diamond` turns a trace tree and a postcondition into the truth value
//! "run the computation, then evaluate the postcondition on the result at
//! the same tape", scoring divergence 0. An entailment `phi |-e psi`
//! holds when, for every code of the declared universe, `phi(c)` is below
//! the diamond of `e . c` against `psi` - pointwise, or almost surely
//! under a nondegenerate measure. Holding judgments transport along
//! structured tape maps by pulling predicates back and translating the
//! evidence code.

use std::collections::{BTreeMap, BTreeSet};

use crate::gen::{random_trace_tree, random_truth_value, Rng};
use crate::lang::{translate_evidence, Code, Outcome, TRANSLATE_OVERHEAD};
use crate::rat;
use crate::tape::{ProductMeasure, TapeSpace};
use crate::tapemap::TapeMapSpec;
use crate::trace::{mca_apply, TraceTree};
use crate::truth::{TruthValue, Witness};
use crate::Error;

/// A predicate on codes valued in tape-indexed truth values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Proposition {
    /// Tape-invariant crisp lift of a set of accepting values: 1 when the
    /// code is in the set, 0 otherwise. Divergence is never accepted.
    Crisp(BTreeSet<Code>),
    /// Explicit finite table over a declared code universe.
    Table(BTreeMap<Code, TruthValue>),
}

impl Proposition {
    pub fn crisp<I: IntoIterator<Item = Code>>(accepting: I) -> Self {
        Proposition::Crisp(accepting.into_iter().collect())
    }

    /// The truth value assigned to one code.
    pub fn at(&self, arity: u32, x: &Code) -> Result<TruthValue, Error> {
        match self {
            Proposition::Crisp(set) => {
                if set.contains(x) {
                    Ok(TruthValue::top(arity))
                } else {
                    Ok(TruthValue::bottom_value(arity))
                }
            }
            Proposition::Table(map) => map
                .get(x)
                .cloned()
                .ok_or_else(|| Error::UndefinedOutcome(x.to_string())),
        }
    }

    /// Pullback along a tape map. Crisp lifts are tape-invariant, so they
    /// are unchanged; tables pull back entrywise.
    pub fn pullback(&self, spec: &TapeMapSpec) -> Result<Proposition, Error> {
        match self {
            Proposition::Crisp(set) => Ok(Proposition::Crisp(set.clone())),
            Proposition::Table(map) => {
                let mut out = BTreeMap::new();
                for (c, tv) in map {
                    out.insert(c.clone(), tv.pullback(spec)?);
                }
                Ok(Proposition::Table(out))
            }
        }
    }
}

/// The modality against an arbitrary outcome-indexed family of truth
/// values: bottom leaves contribute 0 on their path pattern, value leaves
/// contribute the postcondition refined against the path.
pub fn diamond_with(
    t: &TraceTree,
    mut psi: impl FnMut(&Code) -> Result<TruthValue, Error>,
) -> Result<TruthValue, Error> {
    let arity = t.space().arity;
    let mut cells = Vec::new();
    let mut exceptions = Vec::new();
    for (path, outcome) in t.leaves() {
        match outcome {
            Outcome::Bottom(_) => cells.push((path, rat::zero())),
            Outcome::Value(x) => {
                let tv = psi(&x)?;
                if tv.arity() != arity {
                    return Err(Error::ArityMismatch { expected: arity, got: tv.arity() });
                }
                for (q, v) in tv.cells() {
                    if let Some(u) = path.union(q) {
                        cells.push((u, v.clone()));
                    }
                }
                for (tape, v) in tv.exceptions() {
                    if path.matches(tape)? {
                        exceptions.push((tape.clone(), v.clone()));
                    }
                }
            }
        }
    }
    let mut out = TruthValue::from_cells(arity, cells)
        .expect("leaf patterns refined by postcondition cells partition the space");
    for (tape, v) in exceptions {
        out = out.with_exception(tape, v)?;
    }
    Ok(out)
}

/// `<> x <- t . psi(x)`: the weakest-precondition truth value of a traced
/// computation against a postcondition.
pub fn diamond(t: &TraceTree, psi: &Proposition) -> Result<TruthValue, Error> {
    diamond_with(t, |x| psi.at(t.space().arity, x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Pointwise,
    AlmostSure,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Pointwise => "pointwise",
            Mode::AlmostSure => "almost-sure",
        }
    }
}

/// Where and how an entailment failed: the universe code plus the cell or
/// exceptional tape where the left side exceeds the right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub code: Code,
    pub witness: Witness,
}

/// A checked entailment: inputs echoed, verdict, and a counterexample
/// exactly when the verdict is `fails`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntailmentJudgment {
    pub space: TapeSpace,
    pub phi: Proposition,
    pub evidence: Code,
    pub psi: Proposition,
    pub mode: Mode,
    pub universe: Vec<Code>,
    pub fuel: u64,
    pub measure: Option<ProductMeasure>,
    pub holds: bool,
    pub counterexample: Option<Counterexample>,
}

/// Checks `phi |-e psi` over a finite code universe: for each universe
/// code, the diamond of `e . c` against `psi` must dominate `phi(c)` in
/// the requested order.
#[allow(clippy::too_many_arguments)]
pub fn check_entailment(
    space: TapeSpace,
    phi: &Proposition,
    evidence: &Code,
    psi: &Proposition,
    universe: &[Code],
    fuel: u64,
    mode: Mode,
    measure: Option<&ProductMeasure>,
) -> Result<EntailmentJudgment, Error> {
    if universe.is_empty() {
        return Err(Error::EmptyUniverse);
    }
    if fuel == 0 {
        return Err(Error::ZeroFuel);
    }
    let measure = match (mode, measure) {
        (Mode::AlmostSure, None) => return Err(Error::MissingMeasure),
        (Mode::AlmostSure, Some(m)) if !m.is_nondegenerate() => {
            return Err(Error::DegenerateMeasure)
        }
        (_, m) => m.cloned(),
    };
    let mut counterexample = None;
    for c in universe {
        let tree = mca_apply(evidence, c, space, fuel);
        let rhs = diamond(&tree, psi)?;
        let lhs = phi.at(space.arity, c)?;
        let witness = match mode {
            Mode::Pointwise => lhs.leq_witness(&rhs)?,
            Mode::AlmostSure => {
                lhs.leq_as_witness(&rhs, measure.as_ref().expect("checked above"))?
            }
        };
        if let Some(witness) = witness {
            counterexample = Some(Counterexample { code: c.clone(), witness });
            break;
        }
    }
    Ok(EntailmentJudgment {
        space,
        phi: phi.clone(),
        evidence: evidence.clone(),
        psi: psi.clone(),
        mode,
        universe: universe.to_vec(),
        fuel,
        measure,
        holds: counterexample.is_none(),
        counterexample,
    })
}

/// Transports a holding pointwise judgment over the destination space of
/// `spec` to one over its source space: predicates pull back, the
/// evidence is translated, and the result is re-verified. A re-check
/// failure is an implementation fault, never a user error. Almost-sure
/// judgments are rejected: the source measure is not determined by the
/// destination one.
pub fn transport_entailment(
    j: &EntailmentJudgment,
    spec: &TapeMapSpec,
) -> Result<EntailmentJudgment, Error> {
    if !j.holds {
        return Err(Error::JudgmentDoesNotHold);
    }
    if j.space.arity != spec.dst_arity() {
        return Err(Error::ArityMismatch { expected: spec.dst_arity(), got: j.space.arity });
    }
    if j.mode == Mode::AlmostSure {
        return Err(Error::AlmostSureTransport);
    }
    let phi = j.phi.pullback(spec)?;
    let psi = j.psi.pullback(spec)?;
    let evidence = translate_evidence(spec, &j.evidence);
    let out = check_entailment(
        TapeSpace::new(spec.src_arity()),
        &phi,
        &evidence,
        &psi,
        &j.universe,
        j.fuel + TRANSLATE_OVERHEAD,
        j.mode,
        None,
    )?;
    if !out.holds {
        let cex = out.counterexample.as_ref().map(|c| format!("{c:?}")).unwrap_or_default();
        return Err(Error::TransportFault(cex));
    }
    Ok(out)
}

/// Settings for the generated-instance axiom suites.
#[derive(Debug, Clone, Copy)]
pub struct AxiomCheckSettings {
    pub instances: u32,
    pub seed: u64,
}

impl Default for AxiomCheckSettings {
    fn default() -> Self {
        AxiomCheckSettings { instances: 200, seed: 0xD1A0 }
    }
}

/// Outcome of one axiom suite run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub instances: u32,
    pub after_return_failures: u32,
    pub after_bind_failures: u32,
    pub monotonicity_failures: u32,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.after_return_failures == 0
            && self.after_bind_failures == 0
            && self.monotonicity_failures == 0
    }
}

/// Generated-instance check of the three modality axioms for the tape
/// diamond. After-Return and After-Bind hold as exact truth-value
/// equalities in this model; monotonicity as the pointwise order.
pub fn check_modality_axioms(settings: AxiomCheckSettings) -> AxiomReport {
    let mut rng = Rng::new(settings.seed);
    let mut report = AxiomReport {
        instances: settings.instances,
        after_return_failures: 0,
        after_bind_failures: 0,
        monotonicity_failures: 0,
    };
    let space = TapeSpace::new(1);
    for _ in 0..settings.instances {
        let psi0 = random_truth_value(&mut rng, 1);
        let psi1 = random_truth_value(&mut rng, 1);
        let psi = |x: &Code| -> Result<TruthValue, Error> {
            Ok(match x {
                Code::Bit(false) => psi0.clone(),
                Code::Bit(true) => psi1.clone(),
                _ => TruthValue::bottom_value(1),
            })
        };

        // After-Return: pure values satisfy their postcondition exactly.
        let x = Code::Bit(rng.bool());
        let ret = crate::trace::monad_return(space, x.clone());
        if diamond_with(&ret, psi).unwrap() != psi(&x).unwrap() {
            report.after_return_failures += 1;
        }

        // After-Bind: sequencing commutes with the modality, as equality.
        let t = random_trace_tree(&mut rng, 1, 3);
        let f0 = random_trace_tree(&mut rng, 1, 2);
        let f1 = random_trace_tree(&mut rng, 1, 2);
        let f = |x: &Code| match x {
            Code::Bit(false) => f0.clone(),
            Code::Bit(true) => f1.clone(),
            other => crate::trace::monad_return(space, other.clone()),
        };
        let bound = crate::trace::monad_bind(&t, f);
        let lhs = diamond_with(&t, |x| diamond_with(&f(x), psi)).unwrap();
        let rhs = diamond_with(&bound, psi).unwrap();
        if lhs != rhs {
            report.after_bind_failures += 1;
        }

        // Internal monotonicity: widening the postcondition widens the
        // diamond.
        let wider0 = psi0.join(&random_truth_value(&mut rng, 1)).unwrap();
        let wider1 = psi1.join(&random_truth_value(&mut rng, 1)).unwrap();
        let psi_hi = |x: &Code| -> Result<TruthValue, Error> {
            Ok(match x {
                Code::Bit(false) => wider0.clone(),
                Code::Bit(true) => wider1.clone(),
                _ => TruthValue::bottom_value(1),
            })
        };
        let lo = diamond_with(&t, psi).unwrap();
        let hi = diamond_with(&t, psi_hi).unwrap();
        if !lo.leq(&hi).unwrap() {
            report.monotonicity_failures += 1;
        }
    }
    report
}

/// A judgment family that always holds: `phi(c)` is the diamond of the
/// evidence application itself, sometimes lowered by a random meet, so
/// the entailment is reflexive-or-lower by construction. Used by the
/// transport and extraction suites.
pub fn generated_holding_judgment(rng: &mut Rng, arity: u32, fuel: u64) -> EntailmentJudgment {
    let space = TapeSpace::new(arity);
    let evidence = random_evidence(rng, arity);
    let universe: Vec<Code> = vec![Code::con("H"), Code::Bit(rng.bool())];
    let accept: BTreeSet<Code> = match rng.below(3) {
        0 => [Code::Bit(false), Code::Bit(true)].into(),
        1 => [Code::Bit(true), Code::con("H")].into(),
        _ => [Code::con("H"), Code::con("T"), Code::Bit(false)].into(),
    };
    let psi = Proposition::Crisp(accept);
    let mut table = BTreeMap::new();
    for c in &universe {
        let tree = mca_apply(&evidence, c, space, fuel);
        let dia = diamond(&tree, &psi).expect("crisp postconditions are total");
        let lower = if rng.bool() {
            dia
        } else {
            dia.meet(&random_truth_value(rng, arity)).expect("same arity")
        };
        table.insert(c.clone(), lower);
    }
    let phi = Proposition::Table(table);
    let j = check_entailment(space, &phi, &evidence, &psi, &universe, fuel, Mode::Pointwise, None)
        .expect("well-formed judgment");
    assert!(j.holds, "generated judgment must hold by construction");
    j
}

/// Random evidence codes: a lambda that may read a few bits of the space
/// and sometimes uses its argument.
pub fn random_evidence(rng: &mut Rng, arity: u32) -> Code {
    let body = crate::gen::random_code(rng, arity);
    let body = match rng.below(3) {
        0 => Code::apps(Code::IfBit, [Code::read(rng.below(arity as u64), 0), body, Code::var("x")]),
        1 => Code::app(Code::K, body),
        _ => Code::apps(Code::IfBit, [Code::read(rng.below(arity as u64), 1), Code::var("x"), body]),
    };
    crate::lang::bracket_abstract("x", &body).expect("only x is free")
}
