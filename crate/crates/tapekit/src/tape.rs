//! Bit-stream tape spaces: addresses, eventually-periodic tapes, finite
//! bit-pattern events, and per-bit Bernoulli product measures.
//!
//! A tape space of arity `k` is a product of `k` independent infinite bit
//! streams. Tapes are restricted to eventually-periodic representatives so
//! that every operation stays decidable while still covering exceptional
//! points such as the all-zeros tape.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;

use crate::rat::{self, Rational};
use crate::Error;

/// Position of one bit: a component stream and an index within it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Address {
    pub component: u32,
    pub index: u64,
}

impl Address {
    pub fn new(component: u32, index: u64) -> Self {
        Address { component, index }
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.component, self.index)
    }
}

/// A product of `arity` independent bit streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TapeSpace {
    pub arity: u32,
}

impl TapeSpace {
    pub fn new(arity: u32) -> Self {
        assert!(arity >= 1, "tape space arity must be at least 1");
        TapeSpace { arity }
    }

    pub fn contains(&self, a: Address) -> bool {
        a.component < self.arity
    }
}

/// Tail policy of one tape component after its finite prefix.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tail {
    Const(bool),
    /// Nonempty word repeated forever.
    Periodic(Vec<bool>),
}

impl Tail {
    fn bit(&self, offset: u64) -> bool {
        match self {
            Tail::Const(b) => *b,
            Tail::Periodic(w) => w[(offset % w.len() as u64) as usize],
        }
    }
}

/// One eventually-periodic bit stream: a finite prefix followed by a tail.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Component {
    prefix: Vec<bool>,
    tail: Tail,
}

impl Component {
    /// Canonical form: primitive period, minimal prefix, constant tails
    /// preferred over one-letter periods. Two components describe the same
    /// stream iff their canonical forms are equal.
    pub fn new(prefix: Vec<bool>, tail: Tail) -> Self {
        let mut prefix = prefix;
        let mut word = match tail {
            Tail::Const(b) => vec![b],
            Tail::Periodic(w) => {
                assert!(!w.is_empty(), "periodic tail word must be nonempty");
                w
            }
        };
        // Reduce the period word to its primitive root.
        'outer: for d in 1..word.len() {
            if word.len() % d == 0 {
                for i in d..word.len() {
                    if word[i] != word[i - d] {
                        continue 'outer;
                    }
                }
                word.truncate(d);
                break;
            }
        }
        // Absorb prefix bits that already agree with the rotated tail.
        while let Some(&last) = prefix.last() {
            if last == *word.last().unwrap() {
                prefix.pop();
                let b = word.pop().unwrap();
                word.insert(0, b);
            } else {
                break;
            }
        }
        let tail = if word.iter().all(|&b| b == word[0]) {
            Tail::Const(word[0])
        } else {
            Tail::Periodic(word)
        };
        Component { prefix, tail }
    }

    pub fn bit(&self, index: u64) -> bool {
        if (index as usize) < self.prefix.len() {
            self.prefix[index as usize]
        } else {
            self.tail.bit(index - self.prefix.len() as u64)
        }
    }

    pub fn prefix(&self) -> &[bool] {
        &self.prefix
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    /// Number of positions after which the stream is in its periodic regime.
    pub fn preperiod(&self) -> u64 {
        self.prefix.len() as u64
    }

    pub fn period(&self) -> u64 {
        match &self.tail {
            Tail::Const(_) => 1,
            Tail::Periodic(w) => w.len() as u64,
        }
    }
}

/// An eventually-periodic tape: one [`Component`] per stream of the space.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tape {
    components: Vec<Component>,
}

impl Tape {
    pub fn new(components: Vec<Component>) -> Self {
        assert!(!components.is_empty(), "tape needs at least one component");
        Tape { components }
    }

    pub fn constant(arity: u32, bit: bool) -> Self {
        Tape::new(vec![Component::new(Vec::new(), Tail::Const(bit)); arity as usize])
    }

    /// Single-component tape from a prefix word and a tail.
    pub fn from_prefix(prefix: &str, tail: Tail) -> Self {
        Tape::new(vec![Component::new(parse_bits(prefix).unwrap(), tail)])
    }

    pub fn arity(&self) -> u32 {
        self.components.len() as u32
    }

    pub fn component(&self, c: u32) -> Option<&Component> {
        self.components.get(c as usize)
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// Reads one bit. The prefix wins when the index falls inside it,
    /// otherwise the tail policy supplies the bit.
    pub fn read(&self, a: Address) -> Result<bool, Error> {
        match self.components.get(a.component as usize) {
            Some(comp) => Ok(comp.bit(a.index)),
            None => Err(Error::ComponentOutOfRange {
                component: a.component,
                arity: self.arity(),
            }),
        }
    }

    /// Parses the literal format `<prefix>:<tail>` with components joined
    /// by `;`. Tails are `0`, `1`, or `(<word>)*`.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut comps = Vec::new();
        for part in text.split(';') {
            let (prefix, tail) = part
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("tape literal `{part}` lacks `:`")))?;
            let prefix = parse_bits(prefix)?;
            let tail = if tail == "0" {
                Tail::Const(false)
            } else if tail == "1" {
                Tail::Const(true)
            } else if let Some(word) = tail.strip_prefix('(').and_then(|t| t.strip_suffix(")*")) {
                let word = parse_bits(word)?;
                if word.is_empty() {
                    return Err(Error::Parse("empty periodic word".into()));
                }
                Tail::Periodic(word)
            } else {
                return Err(Error::Parse(format!("bad tape tail `{tail}`")));
            };
            comps.push(Component::new(prefix, tail));
        }
        Ok(Tape::new(comps))
    }
}

impl fmt::Display for Tape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, comp) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            for &b in comp.prefix() {
                write!(f, "{}", if b { '1' } else { '0' })?;
            }
            match comp.tail() {
                Tail::Const(b) => write!(f, ":{}", if *b { '1' } else { '0' })?,
                Tail::Periodic(w) => {
                    write!(f, ":(")?;
                    for &b in w {
                        write!(f, "{}", if b { '1' } else { '0' })?;
                    }
                    write!(f, ")*")?;
                }
            }
        }
        Ok(())
    }
}

fn parse_bits(s: &str) -> Result<Vec<bool>, Error> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::Parse(format!("bad bit `{other}`"))),
        })
        .collect()
}

/// A finite conjunction of bit constraints; the empty pattern is the whole
/// space. Generalizes cylinder sets to non-contiguous address sets, which
/// symbolic execution produces when codes skip around the tape.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct BitPattern {
    constraints: BTreeMap<Address, bool>,
}

impl BitPattern {
    pub fn everything() -> Self {
        BitPattern::default()
    }

    pub fn of(entries: &[(Address, bool)]) -> Self {
        let mut p = BitPattern::everything();
        for &(a, b) in entries {
            assert!(p.constrain(a, b), "conflicting constraints in literal pattern");
        }
        p
    }

    /// Adds one constraint; returns false when it contradicts an existing
    /// one (the pattern is left unchanged in that case).
    pub fn constrain(&mut self, a: Address, bit: bool) -> bool {
        match self.constraints.get(&a) {
            Some(&b) => b == bit,
            None => {
                self.constraints.insert(a, bit);
                true
            }
        }
    }

    pub fn get(&self, a: Address) -> Option<bool> {
        self.constraints.get(&a).copied()
    }

    pub fn depth(&self) -> usize {
        self.constraints.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Address, bool)> + '_ {
        self.constraints.iter().map(|(&a, &b)| (a, b))
    }

    pub fn addresses(&self) -> impl Iterator<Item = Address> + '_ {
        self.constraints.keys().copied()
    }

    pub fn matches(&self, tape: &Tape) -> Result<bool, Error> {
        for (a, b) in self.iter() {
            if tape.read(a)? != b {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn compatible(&self, other: &BitPattern) -> bool {
        let (small, big) = if self.depth() <= other.depth() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .iter()
            .all(|(a, b)| big.get(a).is_none_or(|b2| b2 == b))
    }

    /// Conjunction of two patterns; `None` is the empty event.
    pub fn union(&self, other: &BitPattern) -> Option<BitPattern> {
        let mut out = self.clone();
        for (a, b) in other.iter() {
            if !out.constrain(a, b) {
                return None;
            }
        }
        Some(out)
    }

    /// Cylinder `[u] x [v] x ...`: component `i` constrained to start with
    /// the `i`-th word.
    pub fn rectangle(words: &[&str]) -> Result<BitPattern, Error> {
        let mut p = BitPattern::everything();
        for (c, w) in words.iter().enumerate() {
            for (i, b) in parse_bits(w)?.into_iter().enumerate() {
                p.constrain(Address::new(c as u32, i as u64), b);
            }
        }
        Ok(p)
    }
}

/// A product measure: each address carries an independent Bernoulli bias
/// (probability that the bit is 1). Finitely described as a global default,
/// optional per-component defaults, and finitely many per-address overrides.
/// Per-component defaults keep the family closed under pushforward along
/// maps that negate some components but not others.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductMeasure {
    default: Rational,
    component_defaults: BTreeMap<u32, Rational>,
    overrides: BTreeMap<Address, Rational>,
}

impl ProductMeasure {
    pub fn uniform(bias: Rational) -> Result<Self, Error> {
        if !rat::is_unit(&bias) {
            return Err(Error::BiasOutOfRange(bias.to_string()));
        }
        Ok(ProductMeasure {
            default: bias,
            component_defaults: BTreeMap::new(),
            overrides: BTreeMap::new(),
        })
    }

    /// The fair-coin measure: every bit has bias 1/2 and every depth-`d`
    /// pattern has mass 2^-d.
    pub fn fair() -> Self {
        ProductMeasure::uniform(rat::rat(1, 2)).unwrap()
    }

    pub fn with_component_default(mut self, component: u32, bias: Rational) -> Result<Self, Error> {
        if !rat::is_unit(&bias) {
            return Err(Error::BiasOutOfRange(bias.to_string()));
        }
        if bias == self.default {
            self.component_defaults.remove(&component);
        } else {
            self.component_defaults.insert(component, bias);
        }
        Ok(self)
    }

    pub fn with_override(mut self, a: Address, bias: Rational) -> Result<Self, Error> {
        if !rat::is_unit(&bias) {
            return Err(Error::BiasOutOfRange(bias.to_string()));
        }
        if bias == self.component_bias(a.component) {
            self.overrides.remove(&a);
        } else {
            self.overrides.insert(a, bias);
        }
        Ok(self)
    }

    pub fn default_bias(&self) -> &Rational {
        &self.default
    }

    pub fn component_defaults(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.component_defaults.iter().map(|(&c, r)| (c, r))
    }

    pub fn overrides(&self) -> impl Iterator<Item = (Address, &Rational)> {
        self.overrides.iter().map(|(&a, r)| (a, r))
    }

    pub fn component_bias(&self, component: u32) -> Rational {
        self.component_defaults
            .get(&component)
            .cloned()
            .unwrap_or_else(|| self.default.clone())
    }

    pub fn bias(&self, a: Address) -> Rational {
        self.overrides
            .get(&a)
            .cloned()
            .unwrap_or_else(|| self.component_bias(a.component))
    }

    /// Every bias strictly inside (0,1). Almost-sure reasoning requires
    /// this: it is what makes single tapes null.
    pub fn is_nondegenerate(&self) -> bool {
        rat::nondegenerate(&self.default)
            && self.component_defaults.values().all(rat::nondegenerate)
            && self.overrides.values().all(rat::nondegenerate)
    }

    /// Mass of the event `[p]`: the product of per-address bit
    /// probabilities. The empty pattern is the whole space, mass 1.
    pub fn pattern_measure(&self, p: &BitPattern) -> Rational {
        let mut m = Rational::one();
        for (a, bit) in p.iter() {
            let bias = self.bias(a);
            m *= if bit { bias } else { Rational::one() - bias };
        }
        m
    }
}
