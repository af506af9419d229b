//! Wire formats. Rationals travel as `"num/den"` strings (integers plain),
//! tapes as their literal text, codes as S-expressions, and outcome labels
//! in a short rendering: named constants bare, bits as `0`/`1`, naturals
//! decimal, anything else as an S-expression. `bottom` is the reserved
//! divergence key.

use std::collections::BTreeSet;

use serde_json::{json, Map, Value};

use crate::dist::{FinDist, Label, MustEntailment};
use crate::extract::ExtractionReport;
use crate::lang::{parse_code, BottomReason, Code, Outcome};
use crate::modality::{Counterexample, EntailmentJudgment, Mode, Proposition};
use crate::rat::{parse_unit_rational, Rational};
use crate::tape::{Address, BitPattern, ProductMeasure, Tape, TapeSpace};
use crate::trace::{TraceNode, TraceTree};
use crate::truth::{TruthValue, Witness};
use crate::Error;

fn bad(msg: impl Into<String>) -> Error {
    Error::Json(msg.into())
}

fn as_str<'a>(v: &'a Value, what: &str) -> Result<&'a str, Error> {
    v.as_str().ok_or_else(|| bad(format!("{what} must be a string")))
}

fn as_obj<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>, Error> {
    v.as_object().ok_or_else(|| bad(format!("{what} must be an object")))
}

fn as_arr<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, Error> {
    v.as_array().ok_or_else(|| bad(format!("{what} must be an array")))
}

pub fn rational_to_json(r: &Rational) -> Value {
    Value::String(r.to_string())
}

pub fn rational_from_json(v: &Value) -> Result<Rational, Error> {
    parse_unit_rational(as_str(v, "rational")?)
}

fn address_from_str(s: &str) -> Result<Address, Error> {
    let (c, i) = s.split_once(',').ok_or_else(|| bad(format!("bad address `{s}`")))?;
    let component = c.trim().parse().map_err(|_| bad(format!("bad component in `{s}`")))?;
    let index = i.trim().parse().map_err(|_| bad(format!("bad index in `{s}`")))?;
    Ok(Address::new(component, index))
}

pub fn pattern_to_json(p: &BitPattern) -> Value {
    Value::Array(
        p.iter().map(|(a, b)| json!([a.to_string(), u8::from(b)])).collect(),
    )
}

pub fn pattern_from_json(v: &Value) -> Result<BitPattern, Error> {
    let mut p = BitPattern::everything();
    for entry in as_arr(v, "pattern")? {
        let pair = as_arr(entry, "pattern entry")?;
        let [addr, bit] = pair.as_slice() else {
            return Err(bad("pattern entry must be [address, bit]"));
        };
        let a = address_from_str(as_str(addr, "address")?)?;
        let b = match bit.as_u64() {
            Some(0) => false,
            Some(1) => true,
            _ => return Err(bad("pattern bit must be 0 or 1")),
        };
        if !p.constrain(a, b) {
            return Err(bad(format!("conflicting constraints at {a}")));
        }
    }
    Ok(p)
}

pub fn measure_to_json(m: &ProductMeasure) -> Value {
    let mut obj = Map::new();
    obj.insert("default_bias".into(), rational_to_json(m.default_bias()));
    let comps: Vec<Value> = m
        .component_defaults()
        .map(|(c, r)| json!({"component": c, "bias": r.to_string()}))
        .collect();
    if !comps.is_empty() {
        obj.insert("component_defaults".into(), Value::Array(comps));
    }
    let overrides: Vec<Value> = m
        .overrides()
        .map(|(a, r)| json!({"component": a.component, "index": a.index, "bias": r.to_string()}))
        .collect();
    if !overrides.is_empty() {
        obj.insert("overrides".into(), Value::Array(overrides));
    }
    Value::Object(obj)
}

pub fn measure_from_json(v: &Value) -> Result<ProductMeasure, Error> {
    let obj = as_obj(v, "measure")?;
    let default = obj.get("default_bias").ok_or_else(|| bad("measure needs default_bias"))?;
    let mut m = ProductMeasure::uniform(rational_from_json(default)?)?;
    if let Some(comps) = obj.get("component_defaults") {
        for entry in as_arr(comps, "component_defaults")? {
            let e = as_obj(entry, "component default")?;
            let c = e
                .get("component")
                .and_then(Value::as_u64)
                .ok_or_else(|| bad("component default needs a component number"))?;
            let bias = e.get("bias").ok_or_else(|| bad("component default needs a bias"))?;
            m = m.with_component_default(c as u32, rational_from_json(bias)?)?;
        }
    }
    if let Some(overrides) = obj.get("overrides") {
        for entry in as_arr(overrides, "overrides")? {
            let e = as_obj(entry, "override")?;
            let c = e
                .get("component")
                .and_then(Value::as_u64)
                .ok_or_else(|| bad("override needs a component number"))?;
            let i = e
                .get("index")
                .and_then(Value::as_u64)
                .ok_or_else(|| bad("override needs an index"))?;
            let bias = e.get("bias").ok_or_else(|| bad("override needs a bias"))?;
            m = m.with_override(Address::new(c as u32, i), rational_from_json(bias)?)?;
        }
    }
    Ok(m)
}

pub fn truth_value_to_json(tv: &TruthValue) -> Value {
    let cells: Vec<Value> = tv
        .cells()
        .iter()
        .map(|(p, v)| json!({"pattern": pattern_to_json(p), "value": v.to_string()}))
        .collect();
    let mut obj = Map::new();
    obj.insert("cells".into(), Value::Array(cells));
    if tv.has_exceptions() {
        let exceptions: Vec<Value> = tv
            .exceptions()
            .iter()
            .map(|(t, v)| json!({"tape": t.to_string(), "value": v.to_string()}))
            .collect();
        obj.insert("exceptions".into(), Value::Array(exceptions));
    }
    if !tv.notes().is_empty() {
        obj.insert(
            "notes".into(),
            Value::Array(tv.notes().iter().map(|n| Value::String(n.clone())).collect()),
        );
    }
    Value::Object(obj)
}

pub fn truth_value_from_json(v: &Value, arity: u32) -> Result<TruthValue, Error> {
    let obj = as_obj(v, "truth value")?;
    let cells_json = obj.get("cells").ok_or_else(|| bad("truth value needs cells"))?;
    let mut cells = Vec::new();
    for cell in as_arr(cells_json, "cells")? {
        let c = as_obj(cell, "cell")?;
        let pattern = pattern_from_json(c.get("pattern").unwrap_or(&Value::Array(vec![])))?;
        let value = c.get("value").ok_or_else(|| bad("cell needs a value"))?;
        cells.push((pattern, rational_from_json(value)?));
    }
    let mut tv = TruthValue::from_cells(arity, cells)?;
    if let Some(exceptions) = obj.get("exceptions") {
        for e in as_arr(exceptions, "exceptions")? {
            let e = as_obj(e, "exception")?;
            let tape = Tape::parse(as_str(
                e.get("tape").ok_or_else(|| bad("exception needs a tape"))?,
                "tape",
            )?)?;
            let value = e.get("value").ok_or_else(|| bad("exception needs a value"))?;
            tv = tv.with_exception(tape, rational_from_json(value)?)?;
        }
    }
    Ok(tv)
}

/// Short rendering of an outcome value for law keys and reports.
pub fn render_value(c: &Code) -> String {
    match c {
        Code::Con(name) => name.clone(),
        Code::Bit(b) => u8::from(*b).to_string(),
        Code::Nat(n) => n.to_string(),
        other => other.to_string(),
    }
}

pub fn render_label(l: &Label) -> String {
    match l {
        Label::Value(c) => render_value(c),
        Label::Bottom => "bottom".into(),
    }
}

pub fn outcome_to_json(o: &Outcome) -> Value {
    match o {
        Outcome::Value(c) => json!({"value": render_value(c), "code": c.to_string()}),
        Outcome::Bottom(BottomReason::FuelExhausted) => json!({"bottom": "fuel-exhausted"}),
        Outcome::Bottom(BottomReason::Stuck) => json!({"bottom": "stuck"}),
    }
}

/// Law serialization; refuses distinct labels that render identically.
pub fn findist_to_json(d: &FinDist) -> Result<Value, Error> {
    let mut obj = Map::new();
    let mut seen: Vec<(String, Label)> = Vec::new();
    for (label, mass) in d.entries() {
        let key = render_label(label);
        if let Some((_, other)) = seen.iter().find(|(k, _)| *k == key) {
            return Err(Error::LabelCollision(other.to_string(), label.to_string()));
        }
        seen.push((key.clone(), label.clone()));
        obj.insert(key, Value::String(mass.to_string()));
    }
    Ok(Value::Object(obj))
}

pub fn trace_tree_to_json(t: &TraceTree) -> Value {
    fn node(n: &TraceNode) -> Value {
        match n {
            TraceNode::Leaf(o) => json!({"leaf": outcome_to_json(o)}),
            TraceNode::Branch { addr, zero, one } => json!({
                "branch": {
                    "addr": addr.to_string(),
                    "zero": node(zero),
                    "one": node(one),
                }
            }),
        }
    }
    json!({"arity": t.space().arity, "tree": node(t.root())})
}

pub fn mode_from_str(s: &str) -> Result<Mode, Error> {
    match s {
        "pointwise" => Ok(Mode::Pointwise),
        "as" | "almost-sure" => Ok(Mode::AlmostSure),
        other => Err(bad(format!("bad mode `{other}`; use pointwise or as"))),
    }
}

pub fn proposition_to_json(p: &Proposition) -> Value {
    match p {
        Proposition::Crisp(set) => {
            json!({"crisp": set.iter().map(|c| c.to_string()).collect::<Vec<_>>()})
        }
        Proposition::Table(map) => json!({
            "table": map
                .iter()
                .map(|(c, tv)| json!({"code": c.to_string(), "value": truth_value_to_json(tv)}))
                .collect::<Vec<_>>()
        }),
    }
}

pub fn proposition_from_json(v: &Value, arity: u32) -> Result<Proposition, Error> {
    let obj = as_obj(v, "proposition")?;
    if let Some(crisp) = obj.get("crisp") {
        let mut set = BTreeSet::new();
        for c in as_arr(crisp, "crisp set")? {
            set.insert(parse_code(as_str(c, "code")?)?);
        }
        return Ok(Proposition::Crisp(set));
    }
    if let Some(table) = obj.get("table") {
        let mut map = std::collections::BTreeMap::new();
        for entry in as_arr(table, "table")? {
            let e = as_obj(entry, "table entry")?;
            let code =
                parse_code(as_str(e.get("code").ok_or_else(|| bad("entry needs code"))?, "code")?)?;
            let tv = truth_value_from_json(
                e.get("value").ok_or_else(|| bad("entry needs value"))?,
                arity,
            )?;
            map.insert(code, tv);
        }
        return Ok(Proposition::Table(map));
    }
    Err(bad("proposition needs `crisp` or `table`"))
}

/// The inputs of an entailment check, as read from a judgment file.
#[derive(Debug, Clone)]
pub struct JudgmentSpec {
    pub space: TapeSpace,
    pub mode: Mode,
    pub fuel: Option<u64>,
    pub measure: Option<ProductMeasure>,
    pub universe: Vec<Code>,
    pub evidence: Code,
    pub phi: Proposition,
    pub psi: Proposition,
}

pub fn judgment_spec_from_json(v: &Value) -> Result<JudgmentSpec, Error> {
    let obj = as_obj(v, "judgment")?;
    let arity = obj
        .get("space")
        .and_then(|s| s.get("arity"))
        .and_then(Value::as_u64)
        .unwrap_or(1) as u32;
    if arity == 0 {
        return Err(bad("space arity must be at least 1"));
    }
    let mode = match obj.get("mode") {
        Some(m) => mode_from_str(as_str(m, "mode")?)?,
        None => Mode::Pointwise,
    };
    let fuel = obj.get("fuel").and_then(Value::as_u64);
    let measure = obj.get("measure").map(measure_from_json).transpose()?;
    let universe = as_arr(obj.get("universe").ok_or_else(|| bad("judgment needs universe"))?, "universe")?
        .iter()
        .map(|c| parse_code(as_str(c, "universe code")?))
        .collect::<Result<Vec<_>, _>>()?;
    let evidence =
        parse_code(as_str(obj.get("evidence").ok_or_else(|| bad("judgment needs evidence"))?, "evidence")?)?;
    let phi =
        proposition_from_json(obj.get("phi").ok_or_else(|| bad("judgment needs phi"))?, arity)?;
    let psi =
        proposition_from_json(obj.get("psi").ok_or_else(|| bad("judgment needs psi"))?, arity)?;
    Ok(JudgmentSpec {
        space: TapeSpace::new(arity),
        mode,
        fuel,
        measure,
        universe,
        evidence,
        phi,
        psi,
    })
}

fn witness_to_json(w: &Witness) -> Value {
    match w {
        Witness::Cell { pattern, lhs, rhs } => json!({
            "pattern": pattern_to_json(pattern),
            "lhs": lhs.to_string(),
            "rhs": rhs.to_string(),
        }),
        Witness::Exception { tape, lhs, rhs } => json!({
            "tape": tape.to_string(),
            "lhs": lhs.to_string(),
            "rhs": rhs.to_string(),
        }),
    }
}

fn counterexample_to_json(c: &Counterexample) -> Value {
    let mut obj = as_obj(&witness_to_json(&c.witness), "witness").unwrap().clone();
    obj.insert("code".into(), Value::String(c.code.to_string()));
    Value::Object(obj)
}

pub fn judgment_to_json(j: &EntailmentJudgment) -> Value {
    let mut obj = Map::new();
    obj.insert("space".into(), json!({"arity": j.space.arity}));
    obj.insert("mode".into(), Value::String(j.mode.as_str().into()));
    obj.insert("fuel".into(), json!(j.fuel));
    if let Some(m) = &j.measure {
        obj.insert("measure".into(), measure_to_json(m));
    }
    obj.insert(
        "universe".into(),
        Value::Array(j.universe.iter().map(|c| Value::String(c.to_string())).collect()),
    );
    obj.insert("evidence".into(), Value::String(j.evidence.to_string()));
    obj.insert("phi".into(), proposition_to_json(&j.phi));
    obj.insert("psi".into(), proposition_to_json(&j.psi));
    obj.insert("verdict".into(), Value::String(if j.holds { "holds" } else { "fails" }.into()));
    if let Some(cex) = &j.counterexample {
        obj.insert("counterexample".into(), counterexample_to_json(cex));
    }
    Value::Object(obj)
}

pub fn extraction_report_to_json(r: &ExtractionReport) -> Value {
    json!({
        "measure": measure_to_json(&r.measure),
        "entries": r.entries.iter().map(|e| json!({
            "code": e.code.to_string(),
            "lhs": e.lhs.to_string(),
            "rhs": e.rhs.to_string(),
        })).collect::<Vec<_>>(),
        "sound": r.sound,
    })
}

pub fn must_entailment_to_json(m: &MustEntailment) -> Result<Value, Error> {
    let entries = m
        .entries
        .iter()
        .map(|e| {
            Ok(json!({
                "code": e.code.to_string(),
                "law": findist_to_json(&e.law)?,
                "holds": e.holds,
            }))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut obj = Map::new();
    obj.insert(
        "accept".into(),
        Value::Array(m.accept.iter().map(|c| Value::String(render_value(c))).collect()),
    );
    obj.insert("entries".into(), Value::Array(entries));
    obj.insert("verdict".into(), Value::String(if m.holds { "holds" } else { "fails" }.into()));
    if let Some((code, label)) = &m.counterexample {
        obj.insert(
            "counterexample".into(),
            json!({"code": code.to_string(), "label": render_label(label)}),
        );
    }
    Ok(Value::Object(obj))
}

pub fn vn_report_to_json(r: &crate::casebook::VnFairnessReport) -> Result<Value, Error> {
    let mut obj = Map::new();
    obj.insert("pairs".into(), json!(r.pairs));
    obj.insert("law".into(), findist_to_json(&r.law)?);
    obj.insert("expect_h".into(), Value::String(r.expect_h.to_string()));
    obj.insert("expect_t".into(), Value::String(r.expect_t.to_string()));
    obj.insert("flip_pullback_matches".into(), json!(r.flip_pullback_matches));
    obj.insert("swap_conjugation".into(), json!(r.swap_conjugation));
    if let Some(ok) = r.closed_form_matches {
        obj.insert("closed_form_matches".into(), json!(ok));
    }
    Ok(Value::Object(obj))
}

pub fn majority_report_to_json(r: &crate::casebook::MajorityReport) -> Value {
    json!({
        "k": r.repetitions,
        "t": r.threshold,
        "bias": r.bias.to_string(),
        "one_shot": r.one_shot.to_string(),
        "amplified": r.amplified.to_string(),
        "closed_form": r.closed_form.to_string(),
        "k_tape_holds": r.k_tape_holds,
        "transported_holds": r.transported_holds,
        "strictly_improves": r.strictly_improves,
    })
}
