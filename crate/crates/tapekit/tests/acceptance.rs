//! Acceptance suite: one test per promised property, each with its
//! tolerance pinned to exact rational equality and an independent oracle
//! where one is called for. Every test prints a PASS line on success.

use std::collections::BTreeSet;
use std::time::Instant;

use tapekit::casebook::{build_majority, build_vn, majority_report, one_bit_verifier};
use tapekit::dist::{check_law_split_seq, check_must_modality_axioms, crisp_diamond, FinDist, Label};
use tapekit::extract::{check_extract_reindex, expect, law, prob_one_collapse};
use tapekit::gen::{
    beta_prime, random_tape, random_trace_tree, random_truth_value, zero_tail_tapes, Rng,
};
use tapekit::lang::{eval, Code, Outcome};
use tapekit::modality::{
    check_entailment, check_modality_axioms, diamond_with, generated_holding_judgment,
    transport_entailment, AxiomCheckSettings, Mode,
};
use tapekit::rat::{self, half_pow, one, rat, Rational};
use tapekit::tape::{Address, BitPattern, ProductMeasure, TapeSpace};
use tapekit::tapemap::TapeMapSpec;
use tapekit::trace::{bind_split, monad_bind, monad_return, trace};
use tapekit::truth::TruthValue;

fn pass(name: &str) {
    println!("PASS: {name}");
}

/// Oracle: the law of a code over arity 1, by direct evaluation on every
/// zero-tail prefix of the given depth, each weighted by the measure.
fn brute_force_law(code: &Code, depth: u32, fuel: u64, m: &ProductMeasure) -> FinDist {
    let mut masses: Vec<(Label, Rational)> = Vec::new();
    for tape in zero_tail_tapes(1, depth) {
        let mut weight = one();
        for i in 0..depth {
            let a = Address::new(0, i as u64);
            let bias = m.bias(a);
            weight *= if tape.read(a).unwrap() { bias } else { one() - bias };
        }
        masses.push((Label::of(&eval(code, &tape, fuel)), weight));
    }
    FinDist::from_masses(masses).expect("prefix weights sum to 1")
}

#[test]
fn acceptance_vn_fairness_exact_law() {
    let start = Instant::now();
    let fair = ProductMeasure::fair();
    for pairs in [1u32, 2, 3, 8] {
        let vn = build_vn(pairs);
        let computed = vn.law(&fair);
        // brute-force oracle over all 2^(2k) prefixes
        let oracle = brute_force_law(&vn.code, 2 * pairs, vn.fuel, &fair);
        assert_eq!(computed, oracle, "law differs from enumeration at {pairs} pairs");
        // closed form
        let side = (one() - half_pow(pairs)) / rat(2, 1);
        assert_eq!(computed.mass(&Label::Value(Code::con("H"))), side);
        assert_eq!(computed.mass(&Label::Value(Code::con("T"))), side);
        assert_eq!(computed.bottom_mass(), half_pow(pairs));
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}, budget is 5s");
    pass("vn fairness: exact law matches brute-force oracle for k in {1,2,3,8}");
}

#[test]
fn acceptance_flip_symmetry() {
    let flip = TapeMapSpec::flip();
    for pairs in [1u32, 2, 3] {
        let vn = build_vn(pairs);
        let alpha_h = vn.alpha("H");
        let alpha_t = vn.alpha("T");
        assert_eq!(alpha_h.pullback(&flip).unwrap(), alpha_t, "at {pairs} pairs");
        assert_eq!(alpha_t.pullback(&flip).unwrap(), alpha_h, "at {pairs} pairs");
    }
    pass("flip symmetry: pullback along flip swaps the H and T tests, exactly");
}

#[test]
fn acceptance_split_lemma() {
    let fair = ProductMeasure::fair();
    let split = TapeMapSpec::split(2);
    let pushed = split.pushforward_measure(&fair).unwrap();
    let mut rectangles = 0u32;
    for total in 0..=8u32 {
        for ulen in 0..=total {
            let vlen = total - ulen;
            for umask in 0u64..1 << ulen {
                for vmask in 0u64..1 << vlen {
                    let mut p = BitPattern::everything();
                    for i in 0..ulen {
                        p.constrain(Address::new(0, i as u64), umask >> i & 1 == 1);
                    }
                    for i in 0..vlen {
                        p.constrain(Address::new(1, i as u64), vmask >> i & 1 == 1);
                    }
                    let expected = half_pow(total);
                    assert_eq!(pushed.pattern_measure(&p), expected);
                    // the preimage route gives the same mass
                    let back = split.preimage_pattern(&p).unwrap().expect("split is injective");
                    assert_eq!(fair.pattern_measure(&back), expected);
                    rectangles += 1;
                }
            }
        }
    }
    assert!(rectangles > 1000);
    pass("split lemma: pushforward of fair along split:2 is the fair product on all rectangles up to depth 8");
}

#[test]
fn acceptance_law_of_split_bind() {
    let fair = ProductMeasure::fair();
    let split = TapeMapSpec::split(2);
    let space = TapeSpace::new(1);
    let mut rng = Rng::new(0xBEEF);
    for i in 0..50 {
        let m = random_trace_tree(&mut rng, 1, 3);
        let f0 = random_trace_tree(&mut rng, 1, 3);
        let f1 = random_trace_tree(&mut rng, 1, 3);
        let f = |c: &Code| match c {
            Code::Bit(false) => f0.clone(),
            Code::Bit(true) => f1.clone(),
            other => monad_return(space, other.clone()),
        };
        assert!(check_law_split_seq(&m, f, &split, &fair).unwrap(), "instance {i}");
    }

    // Negative fixture: plain bind rereads the stage-one bit; the law of
    // the XOR collapses to a point mass while the mixture stays fair.
    let read = trace(&tapekit::lang::parse_code("(read 0 0)").unwrap(), space, 16);
    let xor_fresh = |b: &Code| {
        let src = if *b == Code::Bit(true) {
            "(ifbit (read 0 0) #1 #0)"
        } else {
            "(ifbit (read 0 0) #0 #1)"
        };
        trace(&tapekit::lang::parse_code(src).unwrap(), space, 16)
    };
    let plain = monad_bind(&read, xor_fresh);
    let lhs = law(&plain, &fair);
    let rhs = law(&read, &fair).bind(|c| law(&xor_fresh(c), &fair));
    assert_ne!(lhs, rhs, "plain bind must violate the mixture law");
    let split_seq = bind_split(&read, xor_fresh, &split).unwrap();
    assert_eq!(law(&split_seq, &fair), rhs, "split bind must satisfy it");
    pass("law of split sequencing: mixture equation on 50 generated pairs, plain-bind counterexample included");
}

#[test]
fn acceptance_majority_amplification() {
    let (base, accept, reads) = one_bit_verifier();
    let fixture = build_majority(3, 2, base, accept, reads);
    for p in [rat(1, 4), rat(1, 2), rat(2, 3), rat(3, 4)] {
        let report = majority_report(&fixture, p.clone()).unwrap();
        let closed = rat(3, 1) * &p * &p - rat(2, 1) * &p * &p * &p;
        assert!(report.k_tape_holds && report.transported_holds, "at bias {p}");
        assert_eq!(report.amplified, closed, "at bias {p}");
    }
    // the 20/27 point, confirmed by direct enumeration of all prefixes
    let p = rat(2, 3);
    let report = majority_report(&fixture, p.clone()).unwrap();
    assert_eq!(report.amplified, rat(20, 27));
    let judgment = fixture.k_tape_judgment().unwrap();
    let transported = transport_entailment(&judgment, &TapeMapSpec::split(3)).unwrap();
    let applied = Code::app(transported.evidence.clone(), fixture.input.clone());
    let mut oracle = rat::zero();
    for tape in zero_tail_tapes(1, 3) {
        let out = eval(&applied, &tape, fixture.fuel + tapekit::lang::TRANSLATE_OVERHEAD);
        if matches!(&out, Outcome::Value(v) if fixture.accept.contains(v)) {
            let mut weight = one();
            for i in 0..3u64 {
                let bit = tape.read(Address::new(0, i)).unwrap();
                weight *= if bit { p.clone() } else { one() - p.clone() };
            }
            oracle += weight;
        }
    }
    assert_eq!(oracle, rat(20, 27));
    pass("majority amplification: extracted acceptance equals 3p^2 - 2p^3 at the rational grid; 20/27 confirmed by enumeration");
}

#[test]
fn acceptance_transport_theorem() {
    let specs = [
        ("identity", TapeMapSpec::identity(1)),
        ("flip", TapeMapSpec::flip()),
        ("drop:2", TapeMapSpec::drop_prefix(2)),
        ("split:2", TapeMapSpec::split(2)),
        ("split:3", TapeMapSpec::split(3)),
        ("block:2", TapeMapSpec::block(2)),
    ];
    for (name, spec) in &specs {
        let mut rng = Rng::new(0x7A9E * (name.len() as u64 + 1));
        for i in 0..100 {
            let j = generated_holding_judgment(&mut rng, spec.dst_arity(), 64);
            let out = transport_entailment(&j, spec)
                .unwrap_or_else(|e| panic!("{name} instance {i}: {e}"));
            assert!(out.holds, "{name} instance {i} failed re-verification");
        }
    }
    pass("transport theorem: 100 holding judgments per built-in map re-verify after transport, zero failures");
}

#[test]
fn acceptance_modality_axiom_suites() {
    let tape = check_modality_axioms(AxiomCheckSettings { instances: 200, seed: 0xA1 });
    assert!(tape.passed(), "tape modality: {tape:?}");
    let must = check_must_modality_axioms(AxiomCheckSettings { instances: 200, seed: 0xA2 });
    assert!(must.passed(), "must modality: {must:?}");
    pass("modality axioms: after-return, after-bind, monotonicity pass on 200 instances for both modalities");
}

#[test]
fn acceptance_monad_law_suites() {
    let space = TapeSpace::new(1);
    let mut rng = Rng::new(0x50DA);
    for i in 0..200 {
        // trace-tree monad, structural equality
        let t = random_trace_tree(&mut rng, 1, 3);
        let f0 = random_trace_tree(&mut rng, 1, 2);
        let f1 = random_trace_tree(&mut rng, 1, 2);
        let g0 = random_trace_tree(&mut rng, 1, 2);
        let g1 = random_trace_tree(&mut rng, 1, 2);
        let f = |x: &Code| match x {
            Code::Bit(false) => f0.clone(),
            Code::Bit(true) => f1.clone(),
            other => monad_return(space, other.clone()),
        };
        let g = |x: &Code| match x {
            Code::Bit(false) => g0.clone(),
            Code::Bit(true) => g1.clone(),
            other => monad_return(space, other.clone()),
        };
        let x = Code::Bit(rng.bool());
        assert_eq!(monad_bind(&monad_return(space, x.clone()), f), f(&x), "left id {i}");
        assert_eq!(monad_bind(&t, |x| monad_return(space, x.clone())), t, "right id {i}");
        assert_eq!(
            monad_bind(&monad_bind(&t, f), g),
            monad_bind(&t, |x| monad_bind(&f(x), g)),
            "assoc {i}"
        );

        // distribution monad, exact masses
        let d = tapekit::dist::random_findist(&mut rng);
        let df0 = tapekit::dist::random_findist(&mut rng);
        let df1 = tapekit::dist::random_findist(&mut rng);
        let dfb = |c: &Code| match c {
            Code::Bit(false) => df0.clone(),
            Code::Bit(true) => df1.clone(),
            _ => FinDist::dirac(Label::Value(c.clone())),
        };
        let dg0 = tapekit::dist::random_findist(&mut rng);
        let dgb = |c: &Code| match c {
            Code::Bit(false) => dg0.clone(),
            _ => FinDist::dirac(Label::Value(c.clone())),
        };
        assert_eq!(FinDist::dirac(Label::Value(x.clone())).bind(dfb), dfb(&x), "dist left id {i}");
        assert_eq!(d.bind(|c| FinDist::dirac(Label::Value(c.clone()))), d, "dist right id {i}");
        assert_eq!(d.bind(dfb).bind(dgb), d.bind(|c| dfb(c).bind(dgb)), "dist assoc {i}");
    }
    pass("monad laws: trace-tree and distribution monads, 200 exact instances each");
}

#[test]
fn acceptance_almost_sure_quotient() {
    let fair = ProductMeasure::fair();

    // strictness fixture: constant 1 against the almost-everywhere-1 value
    let top = TruthValue::top(1);
    let b = beta_prime();
    assert!(!top.leq(&b).unwrap(), "pointwise must fail at the exceptional tape");
    assert!(top.leq_as(&b, &fair).unwrap(), "almost-sure must hold");
    assert!(top.as_equiv(&b, &fair).unwrap());

    // pointwise entailment implies almost-sure entailment
    let mut rng = Rng::new(0xA5);
    for i in 0..100 {
        let j = generated_holding_judgment(&mut rng, 1, 64);
        let again = check_entailment(
            j.space,
            &j.phi,
            &j.evidence,
            &j.psi,
            &j.universe,
            j.fuel,
            Mode::AlmostSure,
            Some(&fair),
        )
        .unwrap();
        assert!(again.holds, "instance {i}");
    }

    // Heyting adjunction in both orders
    for i in 0..200 {
        let a = random_truth_value(&mut rng, 1);
        let b = random_truth_value(&mut rng, 1);
        let c = random_truth_value(&mut rng, 1);
        let meet = a.meet(&c).unwrap();
        let imp = a.implies(&b).unwrap();
        assert_eq!(meet.leq(&b).unwrap(), c.leq(&imp).unwrap(), "pointwise adjunction {i}");
        assert_eq!(
            meet.leq_as(&b, &fair).unwrap(),
            c.leq_as(&imp, &fair).unwrap(),
            "a.s. adjunction {i}"
        );
    }
    pass("almost-sure quotient: strictness fixture separates the orders; pointwise implies a.s. on 100 judgments; adjunction on 200 triples");
}

#[test]
fn acceptance_extraction() {
    let fair = ProductMeasure::fair();
    let mut rng = Rng::new(0xE1);

    // monotonicity on 200 pairs
    for i in 0..200 {
        let a = random_truth_value(&mut rng, 1);
        let b = random_truth_value(&mut rng, 1);
        let lower = a.meet(&b).unwrap();
        assert!(
            expect(&lower, &fair).unwrap() <= expect(&a, &fair).unwrap(),
            "monotonicity {i}"
        );
    }

    // incompleteness: equal expectations, incomparable values
    let half = TruthValue::constant(1, rat(1, 2)).unwrap();
    let on0 = TruthValue::indicator(1, &BitPattern::of(&[(Address::new(0, 0), false)]))
        .unwrap()
        .meet(&half)
        .unwrap();
    let on1 = TruthValue::indicator(1, &BitPattern::of(&[(Address::new(0, 0), true)]))
        .unwrap()
        .meet(&half)
        .unwrap();
    assert!(expect(&on0, &fair).unwrap() <= expect(&on1, &fair).unwrap());
    assert!(!on0.leq(&on1).unwrap());

    // extract/reindex commutation on the built-in maps with pushforwards
    let specs = [
        TapeMapSpec::identity(1),
        TapeMapSpec::flip(),
        TapeMapSpec::drop_prefix(2),
        TapeMapSpec::split(2),
        TapeMapSpec::split(3),
    ];
    for spec in &specs {
        for _ in 0..20 {
            let v = random_truth_value(&mut rng, spec.dst_arity()).drop_exceptions();
            assert!(check_extract_reindex(spec, &v, &fair).unwrap(), "spec {spec:?}");
        }
    }

    // crisp diamonds extract to event probabilities, 50 instances
    for i in 0..50 {
        let t = random_trace_tree(&mut rng, 1, 3);
        let accept: BTreeSet<Code> = match rng.below(3) {
            0 => [Code::Bit(false)].into(),
            1 => [Code::Bit(true)].into(),
            _ => [Code::Bit(false), Code::Bit(true)].into(),
        };
        let dia = crisp_diamond(&t, &accept).unwrap();
        let d = law(&t, &fair);
        let event: Rational = accept.iter().map(|c| d.mass(&Label::Value(c.clone()))).sum();
        assert_eq!(expect(&dia, &fair).unwrap(), event, "instance {i}");
    }
    pass("extraction: monotone on 200 pairs, incompleteness fixture, reindex commutation exact, crisp diamonds are event probabilities");
}

#[test]
fn acceptance_bridge_probability_one() {
    let fair = ProductMeasure::fair();
    let mut rng = Rng::new(0xB1);
    let mut some_collapse = 0;
    for i in 0..50 {
        let t = random_trace_tree(&mut rng, 1, 3);
        let accept: BTreeSet<Code> = match rng.below(3) {
            0 => [Code::Bit(false)].into(),
            1 => [Code::Bit(true)].into(),
            _ => [Code::Bit(false), Code::Bit(true)].into(),
        };
        let dia = crisp_diamond(&t, &accept).unwrap();
        assert!(
            tapekit::dist::bridge_prob_one(&dia, &t, &fair, &accept).unwrap(),
            "instance {i}"
        );
        if prob_one_collapse(&dia, &fair).unwrap() {
            some_collapse += 1;
        }
    }
    assert!(some_collapse > 0, "the sample should include positive instances");

    // one instance with an injected null exception: the collapse is
    // robust to almost-sure perturbation of the diamond
    let t = monad_return(TapeSpace::new(1), Code::Bit(true));
    let accept: BTreeSet<Code> = [Code::Bit(true)].into();
    let noisy = diamond_with(&t, |_| {
        Ok(TruthValue::top(1).with_exception(random_tape(&mut rng, 1), rat::zero()).unwrap())
    })
    .unwrap();
    assert!(noisy.has_exceptions());
    assert!(prob_one_collapse(&noisy, &fair).unwrap());
    assert!(law(&t, &fair).must(&accept));
    assert!(tapekit::dist::bridge_prob_one(&noisy, &t, &fair, &accept).unwrap());
    pass("bridge: probability-one collapse agrees with must-on-law on 50 crisp instances, including a null-exception injection");
}
