//! Structured tape maps: affine address remaps plus per-component bit
//! involutions. This family covers bit flip, prefix dropping, k-ary
//! splitting, duplication, and component projections, and is closed under
//! composition, exact preimages of bit patterns, and (when the address map
//! is injective) exact pushforward of product measures.

use num_integer::Integer;

use crate::rat::Rational;
use crate::tape::{Address, BitPattern, Component, ProductMeasure, Tail, Tape};
use crate::Error;

/// How one destination component sources its bits: destination index `n`
/// reads source address `(src_component, stride * n + offset)`, negated
/// when `negate` is set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComponentMap {
    pub src_component: u32,
    pub stride: u64,
    pub offset: u64,
    pub negate: bool,
}

/// A measurable map between tape spaces, source to destination, described
/// by the address function it induces backwards (destination address to
/// source address). Reading address `a` of the image tape equals reading
/// the remapped address of the source tape, possibly negated.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TapeMapSpec {
    src_arity: u32,
    components: Vec<ComponentMap>,
}

struct BitConflict;

impl TapeMapSpec {
    pub fn new(src_arity: u32, components: Vec<ComponentMap>) -> Self {
        assert!(src_arity >= 1 && !components.is_empty());
        for cm in &components {
            assert!(cm.stride >= 1, "affine stride must be at least 1");
            assert!(
                cm.src_component < src_arity,
                "component map targets component {} of an arity-{} space",
                cm.src_component,
                src_arity
            );
        }
        TapeMapSpec { src_arity, components }
    }

    pub fn src_arity(&self) -> u32 {
        self.src_arity
    }

    pub fn dst_arity(&self) -> u32 {
        self.components.len() as u32
    }

    pub fn components(&self) -> &[ComponentMap] {
        &self.components
    }

    /// The identity map on an arity-`k` space.
    pub fn identity(arity: u32) -> Self {
        TapeMapSpec::new(
            arity,
            (0..arity)
                .map(|c| ComponentMap { src_component: c, stride: 1, offset: 0, negate: false })
                .collect(),
        )
    }

    /// Pointwise bit negation on the single-stream space.
    pub fn flip() -> Self {
        TapeMapSpec::new(
            1,
            vec![ComponentMap { src_component: 0, stride: 1, offset: 0, negate: true }],
        )
    }

    /// Drops the first `d` bits of the single stream.
    pub fn drop_prefix(d: u64) -> Self {
        TapeMapSpec::new(
            1,
            vec![ComponentMap { src_component: 0, stride: 1, offset: d, negate: false }],
        )
    }

    /// The k-ary splitting map: component `i` of the image reads positions
    /// `k*n + i` of the source stream. `split(2)` is the even/odd split.
    pub fn split(k: u32) -> Self {
        assert!(k >= 1);
        TapeMapSpec::new(
            1,
            (0..k)
                .map(|i| ComponentMap {
                    src_component: 0,
                    stride: k as u64,
                    offset: i as u64,
                    negate: false,
                })
                .collect(),
        )
    }

    /// Duplicates the single stream across `b` components. The address map
    /// is deliberately non-injective: preimages of patterns can conflict,
    /// and measure pushforward is undefined for it.
    pub fn block(b: u32) -> Self {
        assert!(b >= 1);
        TapeMapSpec::new(
            1,
            (0..b)
                .map(|_| ComponentMap { src_component: 0, stride: 1, offset: 0, negate: false })
                .collect(),
        )
    }

    /// Projection of an arity-`k` space onto component `i`.
    pub fn proj(i: u32, k: u32) -> Self {
        assert!(i < k);
        TapeMapSpec::new(
            k,
            vec![ComponentMap { src_component: i, stride: 1, offset: 0, negate: false }],
        )
    }

    /// Looks a map up by its surface name: `identity`, `identity:<k>`,
    /// `flip`, `drop:<d>`, `split:<k>`, `block:<b>`, `proj:<i>/<k>`.
    pub fn builtin(name: &str) -> Result<Self, Error> {
        let bad = || Error::UnknownMap(name.to_string());
        if name == "identity" {
            return Ok(TapeMapSpec::identity(1));
        }
        if name == "flip" {
            return Ok(TapeMapSpec::flip());
        }
        if let Some((head, arg)) = name.split_once(':') {
            match head {
                "identity" => {
                    let k: u32 = arg.parse().map_err(|_| bad())?;
                    if k >= 1 {
                        return Ok(TapeMapSpec::identity(k));
                    }
                }
                "drop" => {
                    let d: u64 = arg.parse().map_err(|_| bad())?;
                    return Ok(TapeMapSpec::drop_prefix(d));
                }
                "split" => {
                    let k: u32 = arg.parse().map_err(|_| bad())?;
                    if k >= 1 {
                        return Ok(TapeMapSpec::split(k));
                    }
                }
                "block" => {
                    let b: u32 = arg.parse().map_err(|_| bad())?;
                    if b >= 1 {
                        return Ok(TapeMapSpec::block(b));
                    }
                }
                "proj" => {
                    if let Some((i, k)) = arg.split_once('/') {
                        let i: u32 = i.parse().map_err(|_| bad())?;
                        let k: u32 = k.parse().map_err(|_| bad())?;
                        if i < k {
                            return Ok(TapeMapSpec::proj(i, k));
                        }
                    }
                }
                _ => {}
            }
        }
        Err(bad())
    }

    /// The name this spec would be recognized under, if it is a built-in.
    pub fn builtin_name(&self) -> Option<String> {
        if *self == TapeMapSpec::flip() {
            return Some("flip".into());
        }
        if *self == TapeMapSpec::identity(self.src_arity) {
            return Some(if self.src_arity == 1 {
                "identity".into()
            } else {
                format!("identity:{}", self.src_arity)
            });
        }
        let k = self.dst_arity();
        if k == 1 {
            let cm = &self.components[0];
            if *self == TapeMapSpec::drop_prefix(cm.offset) {
                return Some(format!("drop:{}", cm.offset));
            }
            if self.src_arity > 1 && *self == TapeMapSpec::proj(cm.src_component, self.src_arity) {
                return Some(format!("proj:{}/{}", cm.src_component, self.src_arity));
            }
        }
        if *self == TapeMapSpec::split(k) {
            return Some(format!("split:{}", k));
        }
        if *self == TapeMapSpec::block(k) {
            return Some(format!("block:{}", k));
        }
        None
    }

    /// Source address (and negation flag) feeding the given destination
    /// address.
    pub fn resolve(&self, a: Address) -> Result<(Address, bool), Error> {
        let cm = self
            .components
            .get(a.component as usize)
            .ok_or(Error::ComponentOutOfRange { component: a.component, arity: self.dst_arity() })?;
        let index = cm
            .stride
            .checked_mul(a.index)
            .and_then(|x| x.checked_add(cm.offset))
            .expect("address index overflow");
        Ok((Address::new(cm.src_component, index), cm.negate))
    }

    /// Composition `self after other`: the map sending a source tape `t`
    /// to `self.apply(other.apply(t))`.
    pub fn compose(&self, other: &TapeMapSpec) -> Result<TapeMapSpec, Error> {
        if other.dst_arity() != self.src_arity {
            return Err(Error::ArityMismatch { expected: self.src_arity, got: other.dst_arity() });
        }
        let components = self
            .components
            .iter()
            .map(|outer| {
                let inner = &other.components[outer.src_component as usize];
                ComponentMap {
                    src_component: inner.src_component,
                    stride: inner.stride.checked_mul(outer.stride).expect("stride overflow"),
                    offset: inner
                        .stride
                        .checked_mul(outer.offset)
                        .and_then(|x| x.checked_add(inner.offset))
                        .expect("offset overflow"),
                    negate: inner.negate ^ outer.negate,
                }
            })
            .collect();
        Ok(TapeMapSpec::new(other.src_arity, components))
    }

    /// Whether the backwards address function is injective. Two
    /// destination progressions into the same source component intersect
    /// exactly when the gcd of their strides divides the offset difference.
    pub fn is_injective(&self) -> bool {
        for (i, a) in self.components.iter().enumerate() {
            for b in &self.components[i + 1..] {
                if a.src_component != b.src_component {
                    continue;
                }
                let g = a.stride.gcd(&b.stride);
                if a.offset.abs_diff(b.offset) % g == 0 {
                    return false;
                }
            }
        }
        true
    }

    /// Applies the map to an eventually-periodic tape, producing the image
    /// tape exactly. Subsequences of eventually-periodic streams along
    /// arithmetic progressions are again eventually periodic.
    pub fn apply(&self, t: &Tape) -> Result<Tape, Error> {
        if t.arity() != self.src_arity {
            return Err(Error::ArityMismatch { expected: self.src_arity, got: t.arity() });
        }
        let mut comps = Vec::with_capacity(self.components.len());
        for cm in &self.components {
            let src = t.component(cm.src_component).unwrap();
            // Positions below n0 may touch the source prefix; beyond it we
            // are inside the periodic tail.
            let plen = src.preperiod();
            let n0 = if plen > cm.offset { (plen - cm.offset).div_ceil(cm.stride) } else { 0 };
            let src_period = src.period();
            let period = src_period / cm.stride.gcd(&src_period);
            let bit = |n: u64| src.bit(cm.stride * n + cm.offset) ^ cm.negate;
            let prefix: Vec<bool> = (0..n0).map(bit).collect();
            let word: Vec<bool> = (n0..n0 + period).map(bit).collect();
            comps.push(Component::new(prefix, Tail::Periodic(word)));
        }
        Ok(Tape::new(comps))
    }

    /// Exact preimage of a destination pattern: each constraint is rewired
    /// through the address map (undoing the negation). `None` is the empty
    /// event, which arises when a non-injective map sends conflicting
    /// constraints to the same source bit.
    pub fn preimage_pattern(&self, p: &BitPattern) -> Result<Option<BitPattern>, Error> {
        let mut out = BitPattern::everything();
        for (a, bit) in p.iter() {
            let (src, neg) = self.resolve(a)?;
            if !out.constrain(src, bit ^ neg) {
                return Ok(None);
            }
        }
        Ok(Some(out))
    }

    /// Pushforward of a product measure along the map. Requires the
    /// address map to be injective: then the image coordinates read
    /// pairwise-distinct source bits, so the image law is again a product
    /// measure with the transported biases.
    pub fn pushforward_measure(&self, m: &ProductMeasure) -> Result<ProductMeasure, Error> {
        if !self.is_injective() {
            return Err(Error::NonInjectivePushforward);
        }
        let transfer = |bias: Rational, negate: bool| {
            if negate {
                Rational::from_integer(1.into()) - bias
            } else {
                bias
            }
        };
        let mut out = ProductMeasure::uniform(m.default_bias().clone())?;
        for (i, cm) in self.components.iter().enumerate() {
            // Overrides are finite, so a generic address of the
            // progression carries the source component default.
            let generic = m.component_bias(cm.src_component);
            out = out.with_component_default(i as u32, transfer(generic, cm.negate))?;
        }
        for (a, bias) in m.overrides() {
            for (i, cm) in self.components.iter().enumerate() {
                if a.component != cm.src_component || a.index < cm.offset {
                    continue;
                }
                let delta = a.index - cm.offset;
                if delta % cm.stride == 0 {
                    out = out.with_override(
                        Address::new(i as u32, delta / cm.stride),
                        transfer(bias.clone(), cm.negate),
                    )?;
                }
            }
        }
        Ok(out)
    }

    fn maps_into(&self, c: u32) -> Vec<(u32, &ComponentMap)> {
        self.components
            .iter()
            .enumerate()
            .filter(|(_, cm)| cm.src_component == c)
            .map(|(i, cm)| (i as u32, cm))
            .collect()
    }

    /// Preimage of a single destination tape, when it is a finite set of
    /// eventually-periodic tapes. `Ok(None)` means the preimage is not a
    /// finite set (infinitely many source bits are unconstrained);
    /// `Ok(Some(vec![]))` means it is empty.
    pub fn tape_preimages(&self, t: &Tape) -> Result<Option<Vec<Tape>>, Error> {
        if t.arity() != self.dst_arity() {
            return Err(Error::ArityMismatch { expected: self.dst_arity(), got: t.arity() });
        }
        let mut variants: Vec<Vec<Component>> = vec![Vec::new()];
        for c in 0..self.src_arity {
            let maps = self.maps_into(c);
            if maps.is_empty() {
                return Ok(None);
            }
            // If some residue class mod the lcm of strides is never hit,
            // infinitely many source positions are free.
            let lcm = maps.iter().fold(1u64, |acc, (_, cm)| acc.lcm(&cm.stride));
            for r in 0..lcm {
                if !maps.iter().any(|(_, cm)| r % cm.stride == cm.offset % cm.stride) {
                    return Ok(None);
                }
            }
            let covered = |j: u64| {
                maps.iter().any(|(_, cm)| j >= cm.offset && (j - cm.offset).is_multiple_of(cm.stride))
            };
            let max_offset = maps.iter().map(|(_, cm)| cm.offset).max().unwrap();
            let free: Vec<u64> = (0..max_offset + lcm).filter(|&j| !covered(j)).collect();

            // Beyond prefix_len every contributing destination stream is in
            // its periodic regime, so the source component repeats with
            // period `period`.
            let mut prefix_len: u64 = free.iter().map(|j| j + 1).max().unwrap_or(0);
            let mut period: u64 = 1;
            for (i, cm) in &maps {
                let dst = t.component(*i).unwrap();
                prefix_len = prefix_len.max(cm.stride * dst.preperiod() + cm.offset + 1);
                period = period.lcm(&(cm.stride * dst.period()));
            }
            let forced = |j: u64| -> Result<Option<bool>, BitConflict> {
                let mut val: Option<bool> = None;
                for (i, cm) in &maps {
                    if j >= cm.offset && (j - cm.offset).is_multiple_of(cm.stride) {
                        let n = (j - cm.offset) / cm.stride;
                        let b = t.component(*i).unwrap().bit(n) ^ cm.negate;
                        match val {
                            Some(prev) if prev != b => return Err(BitConflict),
                            _ => val = Some(b),
                        }
                    }
                }
                Ok(val)
            };
            let mut new_components = Vec::new();
            for mask in 0u64..1 << free.len() {
                let bit_at = |j: u64| -> Result<bool, BitConflict> {
                    match forced(j)? {
                        Some(b) => Ok(b),
                        None => {
                            let pos = free.iter().position(|&f| f == j).expect("free position");
                            Ok(mask >> pos & 1 == 1)
                        }
                    }
                };
                let sample = |range: std::ops::Range<u64>| -> Result<Vec<bool>, BitConflict> {
                    range.map(bit_at).collect()
                };
                match (sample(0..prefix_len), sample(prefix_len..prefix_len + period)) {
                    (Ok(prefix), Ok(word)) => {
                        new_components.push(Component::new(prefix, Tail::Periodic(word)));
                    }
                    // Overlapping progressions disagree: empty preimage.
                    _ => return Ok(Some(Vec::new())),
                }
            }
            variants = variants
                .iter()
                .flat_map(|v| {
                    new_components.iter().map(move |comp| {
                        let mut v2 = v.clone();
                        v2.push(comp.clone());
                        v2
                    })
                })
                .collect();
        }
        let mut tapes: Vec<Tape> = variants.into_iter().map(Tape::new).collect();
        tapes.sort();
        tapes.dedup();
        Ok(Some(tapes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    use crate::gen::zero_tail_tapes;

    fn addr(c: u32, i: u64) -> Address {
        Address::new(c, i)
    }

    #[test]
    fn apply_flip_and_split_and_drop() {
        let zeros = Tape::constant(1, false);
        assert_eq!(TapeMapSpec::flip().apply(&zeros).unwrap(), Tape::constant(1, true));

        let alt = Tape::parse(":(01)*").unwrap();
        let split = TapeMapSpec::split(2).apply(&alt).unwrap();
        assert_eq!(split, Tape::parse(":0;:1").unwrap());

        let t = Tape::parse("1101:0").unwrap();
        assert_eq!(TapeMapSpec::drop_prefix(2).apply(&t).unwrap(), Tape::parse("01:0").unwrap());
    }

    #[test]
    fn apply_agrees_with_pointwise_reads() {
        let specs = [
            TapeMapSpec::flip(),
            TapeMapSpec::drop_prefix(3),
            TapeMapSpec::split(3),
            TapeMapSpec::block(2),
            TapeMapSpec::proj(1, 2),
            TapeMapSpec::split(2).compose(&TapeMapSpec::drop_prefix(1)).unwrap(),
        ];
        for spec in specs {
            let tapes = if spec.src_arity() == 1 {
                vec![
                    Tape::parse("0110:(10)*").unwrap(),
                    Tape::parse("1:0").unwrap(),
                    Tape::parse(":(011)*").unwrap(),
                ]
            } else {
                vec![Tape::parse("01:(10)*;:(1)*").unwrap(), Tape::parse(":0;10:(01)*").unwrap()]
            };
            for t in tapes {
                let image = spec.apply(&t).unwrap();
                for comp in 0..spec.dst_arity() {
                    for idx in 0..24 {
                        let a = addr(comp, idx);
                        let (src, neg) = spec.resolve(a).unwrap();
                        assert_eq!(
                            image.read(a).unwrap(),
                            t.read(src).unwrap() ^ neg,
                            "spec {spec:?} tape {t} at {a}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn composition_matches_sequential_application() {
        let k1 = TapeMapSpec::drop_prefix(2);
        let k2 = TapeMapSpec::split(2);
        let composite = k2.compose(&k1).unwrap();
        for t in zero_tail_tapes(1, 6) {
            let sequential = k2.apply(&k1.apply(&t).unwrap()).unwrap();
            let direct = composite.apply(&t).unwrap();
            for comp in 0..2 {
                for idx in 0..32 {
                    assert_eq!(
                        sequential.read(addr(comp, idx)).unwrap(),
                        direct.read(addr(comp, idx)).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn preimage_flip_and_split() {
        let p = BitPattern::of(&[(addr(0, 0), true)]);
        let back = TapeMapSpec::flip().preimage_pattern(&p).unwrap().unwrap();
        assert_eq!(back, BitPattern::of(&[(addr(0, 0), false)]));

        let q = BitPattern::of(&[(addr(0, 0), true), (addr(1, 0), false)]);
        let back = TapeMapSpec::split(2).preimage_pattern(&q).unwrap().unwrap();
        assert_eq!(back, BitPattern::of(&[(addr(0, 0), true), (addr(0, 1), false)]));
    }

    #[test]
    fn preimage_conflict_is_the_empty_event() {
        // Duplication sends both destination components to the same source
        // bits, so mismatched constraints have no preimage.
        let spec = TapeMapSpec::block(2);
        let p = BitPattern::of(&[(addr(0, 0), true), (addr(1, 0), false)]);
        assert!(spec.preimage_pattern(&p).unwrap().is_none());
        // Oracle: no depth-4 zero-tail tape has an image matching p.
        for t in zero_tail_tapes(1, 4) {
            let image = spec.apply(&t).unwrap();
            assert!(!p.matches(&image).unwrap());
        }
    }

    #[test]
    fn preimage_matches_enumeration() {
        let specs =
            [TapeMapSpec::flip(), TapeMapSpec::split(2), TapeMapSpec::block(2), TapeMapSpec::drop_prefix(1)];
        for spec in specs {
            let patterns = pattern_samples(spec.dst_arity());
            for p in &patterns {
                let back = spec.preimage_pattern(p).unwrap();
                for t in zero_tail_tapes(1, 4) {
                    let image = spec.apply(&t).unwrap();
                    let in_preimage = match &back {
                        None => false,
                        Some(q) => q.matches(&t).unwrap(),
                    };
                    assert_eq!(p.matches(&image).unwrap(), in_preimage, "spec {spec:?}");
                }
            }
        }
    }

    fn pattern_samples(arity: u32) -> Vec<BitPattern> {
        let mut out = vec![BitPattern::everything()];
        for b0 in [false, true] {
            out.push(BitPattern::of(&[(addr(0, 0), b0)]));
            for b1 in [false, true] {
                out.push(BitPattern::of(&[(addr(0, 0), b0), (addr(0, 1), b1)]));
                if arity > 1 {
                    out.push(BitPattern::of(&[(addr(0, 0), b0), (addr(1, 0), b1)]));
                    out.push(BitPattern::of(&[(addr(0, 1), b0), (addr(1, 1), b1)]));
                }
            }
        }
        out
    }

    #[test]
    fn pushforward_split_of_fair_is_fair_product() {
        let fair = ProductMeasure::fair();
        let pushed = TapeMapSpec::split(2).pushforward_measure(&fair).unwrap();
        assert_eq!(pushed, fair);
        let flipped = TapeMapSpec::flip().pushforward_measure(&fair).unwrap();
        assert_eq!(flipped, fair);
    }

    #[test]
    fn pushforward_rejects_non_injective_maps() {
        assert!(matches!(
            TapeMapSpec::block(2).pushforward_measure(&ProductMeasure::fair()),
            Err(Error::NonInjectivePushforward)
        ));
        assert!(TapeMapSpec::split(3).is_injective());
        assert!(!TapeMapSpec::block(3).is_injective());
    }

    #[test]
    fn pushforward_agrees_with_preimage_measure() {
        // The defining property, checked exactly on a grid of patterns:
        // pushed(p) == m(preimage(p)).
        let m = ProductMeasure::fair()
            .with_override(addr(0, 2), rat(1, 4))
            .unwrap()
            .with_override(addr(0, 5), rat(2, 3))
            .unwrap();
        let specs = [
            TapeMapSpec::drop_prefix(3),
            TapeMapSpec::split(2),
            TapeMapSpec::split(3),
            TapeMapSpec::flip(),
            TapeMapSpec::identity(1),
        ];
        for spec in specs {
            let pushed = spec.pushforward_measure(&m).unwrap();
            for p in pattern_samples(spec.dst_arity()) {
                let back = spec.preimage_pattern(&p).unwrap().expect("injective maps cannot conflict");
                assert_eq!(
                    pushed.pattern_measure(&p),
                    m.pattern_measure(&back),
                    "spec {spec:?} pattern {p:?}"
                );
            }
        }
    }

    #[test]
    fn pushforward_adjunction_on_random_deep_patterns() {
        // Same property on random patterns up to depth 6 under random
        // dyadic measures.
        let mut rng = crate::gen::Rng::new(0xADEA);
        let specs = [
            TapeMapSpec::identity(1),
            TapeMapSpec::flip(),
            TapeMapSpec::drop_prefix(2),
            TapeMapSpec::split(2),
            TapeMapSpec::split(3),
        ];
        for _ in 0..40 {
            // dyadic biases in (0,1): odd numerators over 8
            let dyadic = |rng: &mut crate::gen::Rng| rat(1 + 2 * rng.below(4) as i64, 8);
            let mut m = ProductMeasure::uniform(dyadic(&mut rng)).unwrap();
            for _ in 0..rng.below(3) {
                m = m.with_override(addr(0, rng.below(8)), dyadic(&mut rng)).unwrap();
            }
            for spec in &specs {
                let pushed = spec.pushforward_measure(&m).unwrap();
                let mut p = BitPattern::everything();
                for _ in 0..rng.below(7) {
                    p.constrain(
                        addr(rng.below(spec.dst_arity() as u64) as u32, rng.below(5)),
                        rng.bool(),
                    );
                }
                let back =
                    spec.preimage_pattern(&p).unwrap().expect("injective maps cannot conflict");
                assert_eq!(
                    pushed.pattern_measure(&p),
                    m.pattern_measure(&back),
                    "spec {spec:?} pattern {p:?}"
                );
            }
        }
    }

    #[test]
    fn tape_preimages_of_builtins() {
        // flip: unique preimage, the flipped tape.
        let t = Tape::parse("01:0").unwrap();
        let pre = TapeMapSpec::flip().tape_preimages(&t).unwrap().unwrap();
        assert_eq!(pre, vec![Tape::parse("10:1").unwrap()]);

        // split(2): unique preimage, the interleaving.
        let pair = Tape::parse(":0;:1").unwrap();
        let pre = TapeMapSpec::split(2).tape_preimages(&pair).unwrap().unwrap();
        assert_eq!(pre, vec![Tape::parse(":(01)*").unwrap()]);

        // drop(2): four preimages (two free bits).
        let pre = TapeMapSpec::drop_prefix(2).tape_preimages(&Tape::parse(":0").unwrap()).unwrap().unwrap();
        assert_eq!(pre.len(), 4);
        for p in &pre {
            assert_eq!(TapeMapSpec::drop_prefix(2).apply(p).unwrap(), Tape::parse(":0").unwrap());
        }

        // block(2): empty when components disagree, singleton otherwise.
        let spec = TapeMapSpec::block(2);
        assert_eq!(spec.tape_preimages(&Tape::parse(":0;:1").unwrap()).unwrap().unwrap(), vec![]);
        assert_eq!(
            spec.tape_preimages(&Tape::parse("1:0;1:0").unwrap()).unwrap().unwrap(),
            vec![Tape::parse("1:0").unwrap()]
        );

        // Subsampling every second bit leaves infinitely many bits free.
        let even = TapeMapSpec::new(
            1,
            vec![ComponentMap { src_component: 0, stride: 2, offset: 0, negate: false }],
        );
        assert!(even.tape_preimages(&Tape::parse(":0").unwrap()).unwrap().is_none());
    }

    #[test]
    fn builtin_names_round_trip() {
        for name in ["identity", "identity:3", "flip", "drop:2", "split:3", "block:2", "proj:1/3"] {
            let spec = TapeMapSpec::builtin(name).unwrap();
            assert_eq!(spec.builtin_name().as_deref(), Some(name));
        }
        assert!(TapeMapSpec::builtin("nonsense").is_err());
        assert!(TapeMapSpec::builtin("proj:3/3").is_err());
    }
}
