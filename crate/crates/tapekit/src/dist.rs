//! Finitely supported distributions over outcomes, the Boolean `must`
//! modality, and the bridge between tape-level reasoning and laws.
//!
//! A law keeps only how likely each outcome is, with an explicit mass for
//! divergence. `must` is support-based safety: a postcondition holds iff
//! every outcome of positive probability satisfies it; excluding the
//! divergence label expresses almost-sure termination. The law of a tape
//! computation under a measure is its pushforward, computed exactly from
//! the trace tree.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::extract::law;
use crate::gen::Rng;
use crate::lang::{Code, Outcome};
use crate::modality::{diamond, AxiomCheckSettings, AxiomReport, Proposition};
use crate::rat::{self, Rational};
use crate::tape::{ProductMeasure, TapeSpace};
use crate::tapemap::TapeMapSpec;
use crate::trace::{bind_split, mca_apply, TraceTree};
use crate::Error;

/// An outcome label: a proper value, or divergence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Value(Code),
    Bottom,
}

impl Label {
    pub fn of(o: &Outcome) -> Label {
        match o {
            Outcome::Value(c) => Label::Value(c.clone()),
            Outcome::Bottom(_) => Label::Bottom,
        }
    }

    pub fn value(&self) -> Option<&Code> {
        match self {
            Label::Value(c) => Some(c),
            Label::Bottom => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Value(c) => write!(f, "{c}"),
            Label::Bottom => write!(f, "bottom"),
        }
    }
}

/// A finitely supported probability distribution over outcome labels.
/// Masses are positive rationals summing to exactly 1; zero-mass entries
/// are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinDist {
    mass: BTreeMap<Label, Rational>,
}

impl FinDist {
    pub fn from_masses(
        entries: impl IntoIterator<Item = (Label, Rational)>,
    ) -> Result<Self, Error> {
        let mut mass: BTreeMap<Label, Rational> = BTreeMap::new();
        for (label, m) in entries {
            if m < rat::zero() {
                return Err(Error::ValueOutOfRange(format!("negative mass {m}")));
            }
            if m == rat::zero() {
                continue;
            }
            *mass.entry(label).or_insert_with(rat::zero) += m;
        }
        let total: Rational = mass.values().cloned().sum();
        if total != rat::one() {
            return Err(Error::ValueOutOfRange(format!("masses sum to {total}, not 1")));
        }
        Ok(FinDist { mass })
    }

    /// The Dirac distribution.
    pub fn dirac(label: Label) -> Self {
        FinDist { mass: [(label, rat::one())].into() }
    }

    pub fn mass(&self, label: &Label) -> Rational {
        self.mass.get(label).cloned().unwrap_or_else(rat::zero)
    }

    pub fn bottom_mass(&self) -> Rational {
        self.mass(&Label::Bottom)
    }

    pub fn support(&self) -> impl Iterator<Item = &Label> {
        self.mass.keys()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Label, &Rational)> {
        self.mass.iter()
    }

    /// Kleisli bind: exact mixture. Divergence propagates, so the
    /// continuation is consulted only on proper values.
    pub fn bind(&self, mut f: impl FnMut(&Code) -> FinDist) -> FinDist {
        let mut out: BTreeMap<Label, Rational> = BTreeMap::new();
        for (label, m) in &self.mass {
            let sub = match label {
                Label::Value(c) => f(c),
                Label::Bottom => FinDist::dirac(Label::Bottom),
            };
            for (w, n) in &sub.mass {
                *out.entry(w.clone()).or_insert_with(rat::zero) += m * n;
            }
        }
        FinDist { mass: out }
    }

    /// Support-based safety: every outcome of positive probability is a
    /// proper value in the accepting set. Divergence always refutes it.
    pub fn must(&self, accept: &BTreeSet<Code>) -> bool {
        self.mass.keys().all(|label| match label {
            Label::Value(c) => accept.contains(c),
            Label::Bottom => false,
        })
    }
}

/// A must judgment: its verdict is true exactly when the support lies in
/// the accepting set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MustJudgment {
    pub dist: FinDist,
    pub accept: BTreeSet<Code>,
    pub verdict: bool,
}

impl MustJudgment {
    pub fn new(dist: FinDist, accept: BTreeSet<Code>) -> Self {
        let verdict = dist.must(&accept);
        MustJudgment { dist, accept, verdict }
    }
}

/// One universe code of a must entailment: the law of the evidence
/// application and whether its support is accepted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MustEntry {
    pub code: Code,
    pub law: FinDist,
    pub holds: bool,
}

/// Result of checking a must entailment over a universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MustEntailment {
    pub accept: BTreeSet<Code>,
    pub entries: Vec<MustEntry>,
    pub holds: bool,
    pub counterexample: Option<(Code, Label)>,
}

/// Checks the support-based entailment: for every universe code selected
/// by `phi`, the law of `evidence . c` under `measure` must be supported
/// inside `accept`.
pub fn must_entail(
    space: TapeSpace,
    phi: &BTreeSet<Code>,
    evidence: &Code,
    accept: &BTreeSet<Code>,
    measure: &ProductMeasure,
    fuel: u64,
    universe: &[Code],
) -> Result<MustEntailment, Error> {
    if universe.is_empty() {
        return Err(Error::EmptyUniverse);
    }
    if fuel == 0 {
        return Err(Error::ZeroFuel);
    }
    let mut entries = Vec::new();
    let mut counterexample = None;
    for c in universe {
        if !phi.contains(c) {
            continue;
        }
        let tree = mca_apply(evidence, c, space, fuel);
        let d = law(&tree, measure);
        let holds = d.must(accept);
        if !holds && counterexample.is_none() {
            let bad = d
                .support()
                .find(|label| match label {
                    Label::Value(v) => !accept.contains(v),
                    Label::Bottom => true,
                })
                .cloned()
                .expect("a failing must judgment has an offending label");
            counterexample = Some((c.clone(), bad));
        }
        entries.push(MustEntry { code: c.clone(), law: d, holds });
    }
    let holds = counterexample.is_none();
    Ok(MustEntailment { accept: accept.clone(), entries, holds, counterexample })
}

/// Generated-instance check of the must-modality axioms: After-Return and
/// After-Bind as Boolean identities, monotonicity in the accepting set.
pub fn check_must_modality_axioms(settings: AxiomCheckSettings) -> AxiomReport {
    let mut rng = Rng::new(settings.seed);
    let mut report = AxiomReport {
        instances: settings.instances,
        after_return_failures: 0,
        after_bind_failures: 0,
        monotonicity_failures: 0,
    };
    for _ in 0..settings.instances {
        let accept = random_accept(&mut rng);

        // After-Return: must on a Dirac is membership.
        let x = random_value(&mut rng);
        let ret = FinDist::dirac(Label::Value(x.clone()));
        if ret.must(&accept) != accept.contains(&x) {
            report.after_return_failures += 1;
        }

        // After-Bind: must on a mixture is must of the continuation at
        // every support point.
        let d = random_findist(&mut rng);
        let table: BTreeMap<Code, FinDist> =
            value_pool().into_iter().map(|c| (c, random_findist(&mut rng))).collect();
        let f = |c: &Code| table.get(c).cloned().unwrap_or_else(|| FinDist::dirac(Label::Bottom));
        let bound = d.bind(f);
        let pointwise = d.support().all(|label| match label {
            Label::Value(c) => f(c).must(&accept),
            Label::Bottom => false,
        });
        if bound.must(&accept) != pointwise {
            report.after_bind_failures += 1;
        }

        // Monotonicity: growing the accepting set preserves must.
        let mut bigger = accept.clone();
        bigger.insert(random_value(&mut rng));
        bigger.insert(Code::con("X"));
        if d.must(&accept) && !d.must(&bigger) {
            report.monotonicity_failures += 1;
        }
    }
    report
}

fn value_pool() -> Vec<Code> {
    vec![Code::Bit(false), Code::Bit(true), Code::con("H"), Code::con("T")]
}

fn random_value(rng: &mut Rng) -> Code {
    value_pool()[rng.below(4) as usize].clone()
}

fn random_accept(rng: &mut Rng) -> BTreeSet<Code> {
    value_pool().into_iter().filter(|_| rng.bool()).collect()
}

/// A random finitely supported distribution over a small label pool,
/// sometimes carrying divergence mass.
pub fn random_findist(rng: &mut Rng) -> FinDist {
    let mut labels: Vec<Label> = value_pool().into_iter().map(Label::Value).collect();
    labels.push(Label::Bottom);
    let mut weights: Vec<(Label, u64)> = Vec::new();
    for l in labels {
        if rng.bool() {
            weights.push((l, 1 + rng.below(5)));
        }
    }
    if weights.is_empty() {
        weights.push((Label::Value(Code::con("H")), 1));
    }
    let total: u64 = weights.iter().map(|(_, w)| w).sum();
    FinDist::from_masses(weights.into_iter().map(|(l, w)| (l, rat::rat(w as i64, total as i64))))
        .expect("weights sum to 1 by construction")
}

/// The law of split sequencing factors as the mixture integral:
/// `law(bind_split(m, f)) == dist_bind(law(m), law . f)`, exactly. Plain
/// bind does not satisfy this in general because the continuation rereads
/// the same tape.
pub fn check_law_split_seq(
    m: &TraceTree,
    mut f: impl FnMut(&Code) -> TraceTree,
    split: &TapeMapSpec,
    measure: &ProductMeasure,
) -> Result<bool, Error> {
    let sequenced = bind_split(m, &mut f, split)?;
    let lhs = law(&sequenced, measure);
    let rhs = law(m, measure).bind(|c| law(&f(c), measure));
    Ok(lhs == rhs)
}

/// The bridge between the probability-one collapse and the must judgment
/// on the law: for a crisp postcondition the two verdicts must agree.
/// `v` must be the diamond of `t` against the crisp lift of `accept`.
pub fn bridge_prob_one(
    v: &crate::truth::TruthValue,
    t: &TraceTree,
    measure: &ProductMeasure,
    accept: &BTreeSet<Code>,
) -> Result<bool, Error> {
    let collapse = crate::extract::prob_one_collapse(v, measure)?;
    let must = law(t, measure).must(accept);
    Ok(collapse == must)
}

/// Convenience: the crisp diamond of a tree, for bridge checks.
pub fn crisp_diamond(
    t: &TraceTree,
    accept: &BTreeSet<Code>,
) -> Result<crate::truth::TruthValue, Error> {
    diamond(t, &Proposition::Crisp(accept.clone()))
}
