//! Executable worked examples: von Neumann unbiasing from a fair stream,
//! and majority-of-k error amplification built on split transport.

use std::collections::BTreeSet;

use num_integer::binomial;
use num_traits::One;

use crate::dist::{crisp_diamond, FinDist};
use crate::extract::{expect, law};
use crate::lang::{bracket_abstract, eval, parse_code, Code, Outcome, TRANSLATE_OVERHEAD};
use crate::modality::{
    check_entailment, diamond, transport_entailment, EntailmentJudgment, Mode, Proposition,
};
use crate::rat::{self, Rational};
use crate::tape::{ProductMeasure, TapeSpace};
use crate::tapemap::TapeMapSpec;
use crate::trace::{trace, TraceTree};
use crate::truth::TruthValue;
use crate::Error;

/// Slack on top of the per-pair budget; the measured window per pair
/// budget k is [10k+2, 10k+7).
const VN_FUEL_BASE: u64 = 4;
/// Steps per scanned pair: two reads, the xor, the branch decisions, and
/// the recursion plumbing.
const VN_FUEL_PER_PAIR: u64 = 10;

/// Step budget that resolves any outcome decided within `pairs` pairs but
/// never starts reading pair `pairs + 1`. The constants are measured from
/// the concrete combinator code; `tests::vn_trace_shape_is_exact` pins the
/// resulting decision-tree shape for every budget up to 12 pairs.
pub fn vn_fuel(pairs: u32) -> u64 {
    VN_FUEL_BASE + VN_FUEL_PER_PAIR * pairs as u64
}

/// The von Neumann extractor at a pair budget: scan the stream in
/// consecutive pairs; the first `01` yields `H`, the first `10` yields
/// `T`, equal pairs recurse, and running past the budget diverges.
///
/// Each nondecisive round recurses behind a `drop:2` remap instead of
/// carrying a position counter, so every level inspects addresses 0 and 1
/// of its rewired tape and the step cost per round stays constant.
#[derive(Debug, Clone)]
pub struct VnFixture {
    pub pairs: u32,
    pub code: Code,
    pub fuel: u64,
}

pub fn build_vn(pairs: u32) -> VnFixture {
    assert!(pairs >= 1);
    // The two xor arms are shape-identical on purpose: equal pairs then
    // cost the same number of steps whether they are 00 or 11, which is
    // what makes a single linear fuel budget work for every path.
    let code = parse_code(
        "(fix (lam self \
           (ifbit (ifbit (read 0 0) (ifbit (read 0 1) #0 #1) (ifbit (read 0 1) #1 #0)) \
             (remap drop:2 self) \
             (ifbit (read 0 0) (con H) (con T)))))",
    )
    .expect("vn source is well-formed");
    VnFixture { pairs, code, fuel: vn_fuel(pairs) }
}

impl VnFixture {
    pub fn trace_tree(&self) -> TraceTree {
        trace(&self.code, TapeSpace::new(1), self.fuel)
    }

    pub fn law(&self, measure: &ProductMeasure) -> FinDist {
        law(&self.trace_tree(), measure)
    }

    /// Truth value "the run returns this constant".
    pub fn alpha(&self, name: &str) -> TruthValue {
        crisp_diamond(&self.trace_tree(), &[Code::con(name)].into())
            .expect("crisp postconditions are total")
    }
}

/// `H` and `T` swap, divergence is fixed.
pub fn swap_outcome(o: &Outcome) -> Outcome {
    match o {
        Outcome::Value(c) if *c == Code::con("H") => Outcome::Value(Code::con("T")),
        Outcome::Value(c) if *c == Code::con("T") => Outcome::Value(Code::con("H")),
        other => other.clone(),
    }
}

/// Fairness evidence for the extractor: the flip symmetry at the level of
/// truth values, outcomes, and expectations.
#[derive(Debug, Clone)]
pub struct VnFairnessReport {
    pub pairs: u32,
    pub law: FinDist,
    pub expect_h: Rational,
    pub expect_t: Rational,
    /// Pulling the `H`-test back along flip gives exactly the `T`-test.
    pub flip_pullback_matches: bool,
    /// `vn(flip(r)) == swap(vn(r))` on every zero-tail tape of the scan
    /// depth (probe depth capped at 16 bits for large pair budgets).
    pub swap_conjugation: bool,
    /// Under the fair measure both sides equal the closed form
    /// `(1 - 2^-pairs) / 2`; `None` for other measures.
    pub closed_form_matches: Option<bool>,
}

pub fn vn_fairness_report(pairs: u32, measure: &ProductMeasure) -> Result<VnFairnessReport, Error> {
    let fixture = build_vn(pairs);
    let alpha_h = fixture.alpha("H");
    let alpha_t = fixture.alpha("T");
    let flip = TapeMapSpec::flip();
    let flip_pullback_matches = alpha_h.pullback(&flip)? == alpha_t;

    let tree = fixture.trace_tree();
    let mut swap_conjugation = true;
    for t in crate::gen::zero_tail_tapes(1, 2 * pairs.min(8)) {
        let flipped = flip.apply(&t)?;
        let lhs = eval(&fixture.code, &flipped, fixture.fuel);
        let rhs = swap_outcome(&eval(&fixture.code, &t, fixture.fuel));
        if lhs != rhs {
            swap_conjugation = false;
            break;
        }
    }

    let expect_h = expect(&alpha_h, measure)?;
    let expect_t = expect(&alpha_t, measure)?;
    let closed_form_matches = if *measure == ProductMeasure::fair() {
        let target = (Rational::one() - rat::half_pow(pairs)) / rat::rat(2, 1);
        Some(expect_h == target && expect_t == target)
    } else {
        None
    };
    Ok(VnFairnessReport {
        pairs,
        law: law(&tree, measure),
        expect_h,
        expect_t,
        flip_pullback_matches,
        swap_conjugation,
        closed_form_matches,
    })
}

/// Majority-of-k verification fixture: run a base verifier once per tape
/// component and accept when at least `threshold` runs accept.
#[derive(Debug, Clone)]
pub struct MajorityFixture {
    pub repetitions: u32,
    pub threshold: u32,
    /// The base verifier: evidence reading at most `base_reads` bits.
    pub base: Code,
    pub accept: BTreeSet<Code>,
    pub base_reads: u32,
    /// The universe code the verifier is run against.
    pub input: Code,
    pub fuel: u64,
}

/// The canonical base verifier: ignore the input, read one bit, accept 1.
pub fn one_bit_verifier() -> (Code, BTreeSet<Code>, u32) {
    let code = parse_code("(lam c (read 0 0))").expect("well-formed");
    (code, [Code::Bit(true)].into(), 1)
}

pub fn build_majority(
    repetitions: u32,
    threshold: u32,
    base: Code,
    accept: BTreeSet<Code>,
    base_reads: u32,
) -> MajorityFixture {
    assert!(threshold >= 1 && threshold <= repetitions, "need 1 <= t <= k");
    MajorityFixture {
        repetitions,
        threshold,
        base,
        accept,
        base_reads,
        input: Code::con("Q"),
        fuel: 512,
    }
}

impl MajorityFixture {
    /// The k-tape evidence: runs the base verifier on each component via a
    /// projection remap and folds the accept bits through a threshold
    /// circuit.
    pub fn evidence(&self) -> Code {
        let k = self.repetitions;
        let run =
            |i: u32| Code::remap(TapeMapSpec::proj(i, k), Code::app(self.base.clone(), Code::var("c")));
        fn thr(fix: &MajorityFixture, run: &dyn Fn(u32) -> Code, i: u32, needed: u32) -> Code {
            if needed == 0 {
                return Code::Bit(true);
            }
            if needed > fix.repetitions - i {
                return Code::Bit(false);
            }
            Code::apps(
                Code::IfBit,
                [run(i), thr(fix, run, i + 1, needed), thr(fix, run, i + 1, needed - 1)],
            )
        }
        let body = thr(self, &run, 0, self.threshold);
        bracket_abstract("c", &body).expect("only c is free")
    }

    /// The run-i acceptance test as a truth value over the k-tape space.
    fn run_accepts(&self, i: u32) -> Result<TruthValue, Error> {
        let space = TapeSpace::new(self.repetitions);
        let routed = Code::remap(
            TapeMapSpec::proj(i, self.repetitions),
            Code::app(self.base.clone(), self.input.clone()),
        );
        let tree = trace(&routed, space, self.fuel);
        diamond(&tree, &Proposition::Crisp(self.accept.clone()))
    }

    /// The threshold predicate: at least `threshold` of the k runs accept.
    pub fn threshold_predicate(&self) -> Result<TruthValue, Error> {
        let k = self.repetitions;
        let alphas: Vec<TruthValue> =
            (0..k).map(|i| self.run_accepts(i)).collect::<Result<_, _>>()?;
        let mut result: Option<TruthValue> = None;
        for subset in subsets_of_size(k, self.threshold) {
            let mut conj = TruthValue::top(k);
            for i in subset {
                conj = conj.meet(&alphas[i as usize])?;
            }
            result = Some(match result {
                None => conj,
                Some(acc) => acc.join(&conj)?,
            });
        }
        Ok(result.expect("at least one subset"))
    }

    /// The k-tape entailment: the threshold predicate entails acceptance
    /// via the majority evidence.
    pub fn k_tape_judgment(&self) -> Result<EntailmentJudgment, Error> {
        let space = TapeSpace::new(self.repetitions);
        let mut table = std::collections::BTreeMap::new();
        table.insert(self.input.clone(), self.threshold_predicate()?);
        check_entailment(
            space,
            &Proposition::Table(table),
            &self.evidence(),
            &Proposition::Crisp(self.accept.clone()),
            std::slice::from_ref(&self.input),
            self.fuel,
            Mode::Pointwise,
            None,
        )
    }
}

fn subsets_of_size(n: u32, size: u32) -> Vec<Vec<u32>> {
    fn go(start: u32, n: u32, size: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == size as usize {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, size, &mut Vec::new(), &mut out);
    out
}

/// Everything the amplification argument promises, checked exactly.
#[derive(Debug, Clone)]
pub struct MajorityReport {
    pub repetitions: u32,
    pub threshold: u32,
    pub bias: Rational,
    /// One-shot acceptance probability of the base verifier.
    pub one_shot: Rational,
    /// Acceptance probability of the transported single-tape verifier.
    pub amplified: Rational,
    /// Binomial tail; `3p^2 - 2p^3` for majority of three.
    pub closed_form: Rational,
    pub k_tape_holds: bool,
    pub transported_holds: bool,
    pub strictly_improves: bool,
}

pub fn majority_report(fixture: &MajorityFixture, bias: Rational) -> Result<MajorityReport, Error> {
    let measure = ProductMeasure::uniform(bias.clone())?;
    let space1 = TapeSpace::new(1);

    // one-shot acceptance of the base verifier on a single tape
    let base_tree =
        trace(&Code::app(fixture.base.clone(), fixture.input.clone()), space1, fixture.fuel);
    let one_shot = expect(&crisp_diamond(&base_tree, &fixture.accept)?, &measure)?;

    let judgment = fixture.k_tape_judgment()?;
    let k_tape_holds = judgment.holds;

    let split = TapeMapSpec::split(fixture.repetitions);
    let transported = transport_entailment(&judgment, &split)?;
    let transported_holds = transported.holds;

    // extracted acceptance of the transported evidence on one tape
    let single_tree = trace(
        &Code::app(transported.evidence.clone(), fixture.input.clone()),
        space1,
        fixture.fuel + TRANSLATE_OVERHEAD,
    );
    let amplified = expect(&crisp_diamond(&single_tree, &fixture.accept)?, &measure)?;

    let closed_form = binomial_tail(fixture.repetitions, fixture.threshold, &bias);

    Ok(MajorityReport {
        repetitions: fixture.repetitions,
        threshold: fixture.threshold,
        bias,
        one_shot: one_shot.clone(),
        amplified: amplified.clone(),
        closed_form,
        k_tape_holds,
        transported_holds,
        strictly_improves: amplified > one_shot,
    })
}

/// `P(at least t of k independent trials succeed)` at success chance `p`.
pub fn binomial_tail(k: u32, t: u32, p: &Rational) -> Rational {
    let q = Rational::one() - p;
    let mut sum = rat::zero();
    for j in t..=k {
        let coeff = Rational::from_integer(binomial(
            num_bigint::BigInt::from(k),
            num_bigint::BigInt::from(j),
        ));
        let mut term = coeff;
        for _ in 0..j {
            term *= p;
        }
        for _ in 0..k - j {
            term *= &q;
        }
        sum += term;
    }
    sum
}
