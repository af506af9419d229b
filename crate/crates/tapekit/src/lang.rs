//! The combinator language of tape-consuming codes.
//!
//! Codes are untyped S/K/I combinator terms extended with naturals, bits,
//! pairs, named constants, bounded recursion, a tape-read primitive, and a
//! remap combinator that reroutes every read inside its body through a
//! structured tape map. Lambdas exist only in the surface syntax; the
//! parser eliminates them by bracket abstraction, so runtime terms are
//! closed applicative trees.
//!
//! Evaluation is deterministic normal-order reduction to full normal form
//! under a step budget (`fuel`). Running out of fuel and getting stuck are
//! not errors: they are the divergence outcome, which the modality layer
//! scores as 0.

use std::fmt;
use std::sync::Arc;

use crate::tape::{Address, Tape};
use crate::tapemap::{ComponentMap, TapeMapSpec};
use crate::Error;

/// Extra reduction steps consumed by translated evidence: applying
/// `translate_evidence(k, e)` to an argument fires one `S`, one `K`, and
/// one remap entry before the wrapped application runs. Whenever
/// `eval(e.c)` finishes within `fuel` steps on the rewired tape,
/// `eval(translate_evidence(k,e).c)` finishes within `fuel +
/// TRANSLATE_OVERHEAD` steps on the original tape, with the same outcome.
pub const TRANSLATE_OVERHEAD: u64 = 3;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Code {
    S,
    K,
    I,
    Fix,
    Succ,
    Pred,
    IfZero,
    Pair,
    Fst,
    Snd,
    IfBit,
    /// `read c i` reads bit `i` of component `c` of the current tape.
    Read,
    Nat(u64),
    Bit(bool),
    /// Named observable constant, e.g. `H` or `T`.
    Con(String),
    /// `remapk m` applied to a body evaluates the body against the
    /// remapped tape; `(remap m body)` is surface syntax for the
    /// application.
    RemapK(TapeMapSpec),
    Var(String),
    App(Arc<Code>, Arc<Code>),
}

impl Code {
    pub fn app(f: Code, a: Code) -> Code {
        Code::App(Arc::new(f), Arc::new(a))
    }

    pub fn apps(f: Code, args: impl IntoIterator<Item = Code>) -> Code {
        args.into_iter().fold(f, Code::app)
    }

    pub fn con(name: &str) -> Code {
        Code::Con(name.to_string())
    }

    pub fn var(name: &str) -> Code {
        Code::Var(name.to_string())
    }

    pub fn read(component: u64, index: u64) -> Code {
        Code::apps(Code::Read, [Code::Nat(component), Code::Nat(index)])
    }

    pub fn remap(spec: TapeMapSpec, body: Code) -> Code {
        Code::app(Code::RemapK(spec), body)
    }

    pub fn free_vars(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Code::Var(v) => {
                if !out.contains(&v.as_str()) {
                    out.push(v);
                }
            }
            Code::App(f, a) => {
                f.collect_free(out);
                a.collect_free(out);
            }
            _ => {}
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    fn mentions(&self, var: &str) -> bool {
        match self {
            Code::Var(v) => v == var,
            Code::App(f, a) => f.mentions(var) || a.mentions(var),
            _ => false,
        }
    }
}

/// Why a computation produced no value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BottomReason {
    FuelExhausted,
    Stuck,
}

impl fmt::Display for BottomReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BottomReason::FuelExhausted => write!(f, "fuel-exhausted"),
            BottomReason::Stuck => write!(f, "stuck"),
        }
    }
}

/// Result of running a code on a tape: a normal form, or divergence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    Value(Code),
    Bottom(BottomReason),
}

impl Outcome {
    pub fn value(&self) -> Option<&Code> {
        match self {
            Outcome::Value(c) => Some(c),
            Outcome::Bottom(_) => None,
        }
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Outcome::Bottom(_))
    }
}

/// Standard S/K/I bracket abstraction with the constant and eta
/// shortcuts. The body may mention only `var`.
pub fn bracket_abstract(var: &str, body: &Code) -> Result<Code, Error> {
    for v in body.free_vars() {
        if v != var {
            return Err(Error::FreeVariable(v.to_string()));
        }
    }
    Ok(abstract_var(var, body))
}

fn abstract_var(var: &str, body: &Code) -> Code {
    if !body.mentions(var) {
        return Code::app(Code::K, body.clone());
    }
    match body {
        Code::Var(v) if v == var => Code::I,
        Code::App(f, a) => {
            // Eta shortcut: [x](f x) = f when x is not free in f.
            if let Code::Var(v) = &**a {
                if v == var && !f.mentions(var) {
                    return (**f).clone();
                }
            }
            Code::apps(Code::S, [abstract_var(var, f), abstract_var(var, a)])
        }
        // Leaves that mention the variable are exactly Var(var), handled
        // above; anything else was caught by the !mentions check.
        _ => unreachable!("non-application leaf mentioning a variable"),
    }
}

/// Evidence translation along a tape map: wraps the application of `e`
/// inside a remap frame, so the translated code run on a source tape
/// behaves exactly as `e` run on the rewired tape. See
/// [`TRANSLATE_OVERHEAD`] for the fuel cost.
pub fn translate_evidence(spec: &TapeMapSpec, e: &Code) -> Code {
    let body = Code::remap(spec.clone(), Code::app(e.clone(), Code::var("x")));
    bracket_abstract("x", &body).expect("body has exactly one free variable")
}

pub(crate) enum Halt {
    Fuel,
    Stuck,
    NeedBit(Address),
}

pub(crate) type BitReader<'a> = dyn FnMut(Address) -> Result<bool, Halt> + 'a;

struct Machine<'a> {
    fuel: u64,
    reader: &'a mut BitReader<'a>,
}

impl Machine<'_> {
    fn pay(&mut self) -> Result<(), Halt> {
        if self.fuel == 0 {
            Err(Halt::Fuel)
        } else {
            self.fuel -= 1;
            Ok(())
        }
    }

    /// Weak-head normal form: unwinds the application spine and fires
    /// rules at the head until the term is a (possibly partial)
    /// application of a constructor or combinator.
    fn whnf(
        &mut self,
        term: Arc<Code>,
        ctx: &TapeMapSpec,
    ) -> Result<(Arc<Code>, Vec<Arc<Code>>), Halt> {
        let mut head = term;
        let mut args: Vec<Arc<Code>> = Vec::new();
        loop {
            match &*head {
                Code::App(f, a) => {
                    args.push(a.clone());
                    head = f.clone();
                    continue;
                }
                Code::I if !args.is_empty() => {
                    self.pay()?;
                    head = args.pop().unwrap();
                }
                Code::K if args.len() >= 2 => {
                    self.pay()?;
                    let x = args.pop().unwrap();
                    args.pop();
                    head = x;
                }
                Code::S if args.len() >= 3 => {
                    self.pay()?;
                    let x = args.pop().unwrap();
                    let y = args.pop().unwrap();
                    let z = args.pop().unwrap();
                    head = Arc::new(Code::App(
                        Arc::new(Code::App(x, z.clone())),
                        Arc::new(Code::App(y, z)),
                    ));
                }
                Code::Fix if !args.is_empty() => {
                    self.pay()?;
                    let f = args.pop().unwrap();
                    head = Arc::new(Code::App(
                        f.clone(),
                        Arc::new(Code::App(Arc::new(Code::Fix), f)),
                    ));
                }
                Code::Succ if !args.is_empty() => {
                    self.pay()?;
                    let n = self.force_nat(args.pop().unwrap(), ctx)?;
                    head = Arc::new(Code::Nat(n + 1));
                }
                Code::Pred if !args.is_empty() => {
                    self.pay()?;
                    let n = self.force_nat(args.pop().unwrap(), ctx)?;
                    head = Arc::new(Code::Nat(n.saturating_sub(1)));
                }
                Code::IfZero if args.len() >= 3 => {
                    self.pay()?;
                    let n = self.force_nat(args.pop().unwrap(), ctx)?;
                    let zero = args.pop().unwrap();
                    let nonzero = args.pop().unwrap();
                    head = if n == 0 { zero } else { nonzero };
                }
                Code::IfBit if args.len() >= 3 => {
                    self.pay()?;
                    let b = self.force_bit(args.pop().unwrap(), ctx)?;
                    let if0 = args.pop().unwrap();
                    let if1 = args.pop().unwrap();
                    head = if b { if1 } else { if0 };
                }
                Code::Fst if !args.is_empty() => {
                    self.pay()?;
                    let (x, _) = self.force_pair(args.pop().unwrap(), ctx)?;
                    head = x;
                }
                Code::Snd if !args.is_empty() => {
                    self.pay()?;
                    let (_, y) = self.force_pair(args.pop().unwrap(), ctx)?;
                    head = y;
                }
                Code::Read if args.len() >= 2 => {
                    self.pay()?;
                    let c = self.force_nat(args.pop().unwrap(), ctx)?;
                    let i = self.force_nat(args.pop().unwrap(), ctx)?;
                    let component = u32::try_from(c).map_err(|_| Halt::Stuck)?;
                    if component >= ctx.dst_arity() {
                        return Err(Halt::Stuck);
                    }
                    let (ambient, neg) =
                        ctx.resolve(Address::new(component, i)).map_err(|_| Halt::Stuck)?;
                    let raw = (self.reader)(ambient)?;
                    head = Arc::new(Code::Bit(raw ^ neg));
                }
                Code::RemapK(spec) if !args.is_empty() => {
                    self.pay()?;
                    if spec.src_arity() != ctx.dst_arity() {
                        return Err(Halt::Stuck);
                    }
                    let inner = spec.compose(ctx).map_err(|_| Halt::Stuck)?;
                    let body = args.pop().unwrap();
                    // Fully normalize inside the frame so no suspended
                    // read can escape it.
                    head = self.nf(body, &inner)?;
                }
                // Values and stuck shapes.
                _ => {
                    let arity_ok = match &*head {
                        Code::S => args.len() <= 2,
                        Code::K | Code::Fix | Code::I => args.len() <= 1,
                        Code::Succ | Code::Pred | Code::Fst | Code::Snd => args.is_empty(),
                        Code::RemapK(_) => args.is_empty(),
                        Code::IfZero | Code::IfBit => args.len() <= 2,
                        Code::Read => args.len() <= 1,
                        Code::Pair => args.len() <= 2,
                        Code::Nat(_) | Code::Bit(_) | Code::Con(_) => args.is_empty(),
                        Code::Var(_) => false,
                        Code::App(_, _) => unreachable!(),
                    };
                    if arity_ok {
                        return Ok((head, args));
                    }
                    return Err(Halt::Stuck);
                }
            }
        }
    }

    fn force_nat(&mut self, term: Arc<Code>, ctx: &TapeMapSpec) -> Result<u64, Halt> {
        match &*self.whnf_atom(term, ctx)? {
            Code::Nat(n) => Ok(*n),
            _ => Err(Halt::Stuck),
        }
    }

    fn force_bit(&mut self, term: Arc<Code>, ctx: &TapeMapSpec) -> Result<bool, Halt> {
        match &*self.whnf_atom(term, ctx)? {
            Code::Bit(b) => Ok(*b),
            _ => Err(Halt::Stuck),
        }
    }

    fn whnf_atom(&mut self, term: Arc<Code>, ctx: &TapeMapSpec) -> Result<Arc<Code>, Halt> {
        let (head, args) = self.whnf(term, ctx)?;
        if args.is_empty() {
            Ok(head)
        } else {
            Err(Halt::Stuck)
        }
    }

    fn force_pair(
        &mut self,
        term: Arc<Code>,
        ctx: &TapeMapSpec,
    ) -> Result<(Arc<Code>, Arc<Code>), Halt> {
        let (head, mut args) = self.whnf(term, ctx)?;
        match &*head {
            Code::Pair if args.len() == 2 => {
                let x = args.pop().unwrap();
                let y = args.pop().unwrap();
                Ok((x, y))
            }
            _ => Err(Halt::Stuck),
        }
    }

    /// Full normal form: weak head first, then the surviving arguments,
    /// left to right.
    fn nf(&mut self, term: Arc<Code>, ctx: &TapeMapSpec) -> Result<Arc<Code>, Halt> {
        let (head, args) = self.whnf(term, ctx)?;
        let mut out = head;
        for a in args.into_iter().rev() {
            let a = self.nf(a, ctx)?;
            out = Arc::new(Code::App(out, a));
        }
        Ok(out)
    }
}

pub(crate) fn eval_core(
    c: &Code,
    arity: u32,
    reader: &mut BitReader<'_>,
    fuel: u64,
) -> Result<(Code, u64), Halt> {
    let mut machine = Machine { fuel, reader };
    let ctx = TapeMapSpec::identity(arity);
    let nf = machine.nf(Arc::new(c.clone()), &ctx)?;
    Ok(((*nf).clone(), machine.fuel))
}

/// Runs a code on a concrete tape with a step budget. Divergence
/// (fuel exhaustion) and ill-formed applications are outcomes, not errors.
pub fn eval(c: &Code, t: &Tape, fuel: u64) -> Outcome {
    eval_counting(c, t, fuel).0
}

/// Like [`eval`], also reporting how many steps were consumed.
pub fn eval_counting(c: &Code, t: &Tape, fuel: u64) -> (Outcome, u64) {
    let mut reader = |a: Address| t.read(a).map_err(|_| Halt::Stuck);
    match eval_core(c, t.arity(), &mut reader, fuel) {
        Ok((nf, left)) => (Outcome::Value(nf), fuel - left),
        Err(Halt::Fuel) => (Outcome::Bottom(BottomReason::FuelExhausted), fuel),
        Err(Halt::Stuck) => (Outcome::Bottom(BottomReason::Stuck), fuel),
        Err(Halt::NeedBit(_)) => unreachable!("concrete tapes always supply bits"),
    }
}

// ---------------------------------------------------------------------
// Surface syntax.
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

fn tokenize(src: &str) -> Result<Vec<String>, Error> {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for ch in src.chars() {
        match ch {
            '(' | ')' => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
                tokens.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    Ok(tokens)
}

fn parse_sexp(tokens: &[String], pos: &mut usize) -> Result<Sexp, Error> {
    let tok = tokens.get(*pos).ok_or_else(|| Error::Parse("unexpected end of input".into()))?;
    *pos += 1;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos) {
                    Some(t) if t == ")" => {
                        *pos += 1;
                        return Ok(Sexp::List(items));
                    }
                    Some(_) => items.push(parse_sexp(tokens, pos)?),
                    None => return Err(Error::Parse("unbalanced parenthesis".into())),
                }
            }
        }
        ")" => Err(Error::Parse("unexpected `)`".into())),
        atom => Ok(Sexp::Atom(atom.to_string())),
    }
}

fn atom_code(atom: &str) -> Result<Code, Error> {
    Ok(match atom {
        "S" => Code::S,
        "K" => Code::K,
        "I" => Code::I,
        "fix" => Code::Fix,
        "succ" => Code::Succ,
        "pred" => Code::Pred,
        "if0" => Code::IfZero,
        "pair" => Code::Pair,
        "fst" => Code::Fst,
        "snd" => Code::Snd,
        "ifbit" => Code::IfBit,
        "read" => Code::Read,
        "#0" => Code::Bit(false),
        "#1" => Code::Bit(true),
        a if a.chars().all(|c| c.is_ascii_digit()) => Code::Nat(
            a.parse().map_err(|_| Error::Parse(format!("numeral `{a}` out of range")))?,
        ),
        a if a
            .chars()
            .next()
            .map(|c| c.is_ascii_alphabetic() || c == '_')
            .unwrap_or(false)
            && a.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'') =>
        {
            Code::Var(a.to_string())
        }
        a => return Err(Error::Parse(format!("bad atom `{a}`"))),
    })
}

fn sexp_to_map(s: &Sexp) -> Result<TapeMapSpec, Error> {
    match s {
        Sexp::Atom(name) => TapeMapSpec::builtin(name),
        Sexp::List(items) => {
            let mut it = items.iter();
            match it.next() {
                Some(Sexp::Atom(head)) if head == "map" => {}
                _ => return Err(Error::Parse("map literal must start with `map`".into())),
            }
            let src_arity: u32 = match it.next() {
                Some(Sexp::Atom(a)) => {
                    a.parse().map_err(|_| Error::Parse(format!("bad arity `{a}`")))?
                }
                _ => return Err(Error::Parse("map literal needs a source arity".into())),
            };
            let mut comps = Vec::new();
            for item in it {
                let Sexp::List(fields) = item else {
                    return Err(Error::Parse("map component must be a list".into()));
                };
                let nums: Vec<u64> = fields
                    .iter()
                    .map(|f| match f {
                        Sexp::Atom(a) => {
                            a.parse().map_err(|_| Error::Parse(format!("bad number `{a}`")))
                        }
                        _ => Err(Error::Parse("map component fields must be numbers".into())),
                    })
                    .collect::<Result<_, _>>()?;
                let [c, s, o, n] = nums.as_slice() else {
                    return Err(Error::Parse(
                        "map component needs 4 fields: component stride offset negate".into(),
                    ));
                };
                if *s == 0 {
                    return Err(Error::Parse("map stride must be at least 1".into()));
                }
                let c32 = u32::try_from(*c).map_err(|_| Error::Parse("component too large".into()))?;
                if c32 >= src_arity {
                    return Err(Error::Parse(format!(
                        "component {c32} out of range for source arity {src_arity}"
                    )));
                }
                comps.push(ComponentMap {
                    src_component: c32,
                    stride: *s,
                    offset: *o,
                    negate: *n != 0,
                });
            }
            if comps.is_empty() {
                return Err(Error::Parse("map literal needs at least one component".into()));
            }
            Ok(TapeMapSpec::new(src_arity, comps))
        }
    }
}

fn sexp_to_code(s: &Sexp) -> Result<Code, Error> {
    match s {
        Sexp::Atom(a) => atom_code(a),
        Sexp::List(items) => {
            if items.is_empty() {
                return Err(Error::Parse("empty application".into()));
            }
            if let Sexp::Atom(head) = &items[0] {
                match head.as_str() {
                    "app" => {
                        if items.len() < 3 {
                            return Err(Error::Parse("`app` needs a function and arguments".into()));
                        }
                        let f = sexp_to_code(&items[1])?;
                        let args: Vec<Code> =
                            items[2..].iter().map(sexp_to_code).collect::<Result<_, _>>()?;
                        return Ok(Code::apps(f, args));
                    }
                    "lam" => {
                        let [_, var, body] = items.as_slice() else {
                            return Err(Error::Parse("`lam` needs a variable and a body".into()));
                        };
                        let Sexp::Atom(var) = var else {
                            return Err(Error::Parse("`lam` variable must be an atom".into()));
                        };
                        let body = sexp_to_code(body)?;
                        return abstract_checked(var, body);
                    }
                    "con" => {
                        let [_, name] = items.as_slice() else {
                            return Err(Error::Parse("`con` needs a name".into()));
                        };
                        let Sexp::Atom(name) = name else {
                            return Err(Error::Parse("`con` name must be an atom".into()));
                        };
                        return Ok(Code::Con(name.clone()));
                    }
                    "remap" => {
                        let [_, map, body] = items.as_slice() else {
                            return Err(Error::Parse("`remap` needs a map and a body".into()));
                        };
                        let spec = sexp_to_map(map)?;
                        return Ok(Code::remap(spec, sexp_to_code(body)?));
                    }
                    "remapk" => {
                        let [_, map] = items.as_slice() else {
                            return Err(Error::Parse("`remapk` needs a map".into()));
                        };
                        return Ok(Code::RemapK(sexp_to_map(map)?));
                    }
                    _ => {}
                }
            }
            let f = sexp_to_code(&items[0])?;
            let args: Vec<Code> = items[1..].iter().map(sexp_to_code).collect::<Result<_, _>>()?;
            Ok(Code::apps(f, args))
        }
    }
}

// Inner lambdas may leave outer variables free; only the binder itself is
// abstracted here.
fn abstract_checked(var: &str, body: Code) -> Result<Code, Error> {
    Ok(abstract_var(var, &body))
}

/// Parses the S-expression surface syntax into a closed code.
pub fn parse_code(src: &str) -> Result<Code, Error> {
    let tokens = tokenize(src)?;
    let mut pos = 0;
    let sexp = parse_sexp(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(Error::Parse("trailing input after code".into()));
    }
    let code = sexp_to_code(&sexp)?;
    if let Some(v) = code.free_vars().first() {
        return Err(Error::FreeVariable(v.to_string()));
    }
    Ok(code)
}

fn map_to_string(spec: &TapeMapSpec) -> String {
    if let Some(name) = spec.builtin_name() {
        return name;
    }
    let comps = spec
        .components()
        .iter()
        .map(|cm| {
            format!(
                "({} {} {} {})",
                cm.src_component,
                cm.stride,
                cm.offset,
                if cm.negate { 1 } else { 0 }
            )
        })
        .collect::<Vec<_>>()
        .join(" ");
    format!("(map {} {})", spec.src_arity(), comps)
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Code::S => write!(f, "S"),
            Code::K => write!(f, "K"),
            Code::I => write!(f, "I"),
            Code::Fix => write!(f, "fix"),
            Code::Succ => write!(f, "succ"),
            Code::Pred => write!(f, "pred"),
            Code::IfZero => write!(f, "if0"),
            Code::Pair => write!(f, "pair"),
            Code::Fst => write!(f, "fst"),
            Code::Snd => write!(f, "snd"),
            Code::IfBit => write!(f, "ifbit"),
            Code::Read => write!(f, "read"),
            Code::Nat(n) => write!(f, "{n}"),
            Code::Bit(b) => write!(f, "#{}", u8::from(*b)),
            Code::Con(name) => write!(f, "(con {name})"),
            Code::RemapK(spec) => write!(f, "(remapk {})", map_to_string(spec)),
            Code::Var(v) => write!(f, "{v}"),
            Code::App(_, _) => {
                // Flatten the spine for readability; `(remap m body)` gets
                // its surface form back.
                let mut head = self;
                let mut args = Vec::new();
                while let Code::App(g, a) = head {
                    args.push(a);
                    head = g;
                }
                args.reverse();
                if let (Code::RemapK(spec), 1) = (head, args.len()) {
                    return write!(f, "(remap {} {})", map_to_string(spec), args[0]);
                }
                write!(f, "({head}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
        }
    }
}
