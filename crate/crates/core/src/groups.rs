//! Exact metric abelian groups.
//!
//! Three concrete groups are supported: the integer lattice `Z^n` and the
//! dyadic lattice `Z[1/2]^n`, both with the sum-of-absolute-values norm, and
//! the group of eventually-zero binary sequences under componentwise
//! addition mod 2, with the harmonic metric `d(a, b) = sum_{a_i != b_i} 1/i`.
//! A binary sequence is stored by its support (the finite set of indices
//! where the entry is one), so addition is symmetric difference and every
//! element is its own inverse.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Longest harmonic prefix `{1..n}` that [`GroupDescriptor::unbounded_witness`]
/// will build on the binary-sequence group. `H_100000 ~ 12.09`, so norm
/// targets up to 12 are reachable.
pub const MAX_HARMONIC_PREFIX: u32 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupKind {
    IntLattice(usize),
    DyadicLattice(usize),
    BinarySeq,
}

/// A built-in group together with its capability flags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GroupDescriptor {
    kind: GroupKind,
}

impl GroupDescriptor {
    pub fn int_lattice(dim: usize) -> Self {
        assert!(dim > 0, "lattice dimension must be positive");
        GroupDescriptor { kind: GroupKind::IntLattice(dim) }
    }

    pub fn dyadic_lattice(dim: usize) -> Self {
        assert!(dim > 0, "lattice dimension must be positive");
        GroupDescriptor { kind: GroupKind::DyadicLattice(dim) }
    }

    pub fn binary_seq() -> Self {
        GroupDescriptor { kind: GroupKind::BinarySeq }
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn uniquely_2_divisible(&self) -> bool {
        matches!(self.kind, GroupKind::DyadicLattice(_))
    }

    pub fn unbounded(&self) -> bool {
        true
    }

    /// Whether `2X` is unbounded.
    pub fn doubling_unbounded(&self) -> bool {
        !matches!(self.kind, GroupKind::BinarySeq)
    }

    /// Lattice dimension, `None` for the binary-sequence group.
    pub fn dim(&self) -> Option<usize> {
        match self.kind {
            GroupKind::IntLattice(d) | GroupKind::DyadicLattice(d) => Some(d),
            GroupKind::BinarySeq => None,
        }
    }

    pub fn zero(&self) -> Element {
        match self.kind {
            GroupKind::IntLattice(d) => Element::Int(vec![BigInt::zero(); d]),
            GroupKind::DyadicLattice(d) => Element::Dyadic(vec![Dyadic::zero(); d]),
            GroupKind::BinarySeq => Element::Bits(BTreeSet::new()),
        }
    }

    pub fn contains(&self, e: &Element) -> bool {
        match (self.kind, e) {
            (GroupKind::IntLattice(d), Element::Int(v)) => v.len() == d,
            (GroupKind::DyadicLattice(d), Element::Dyadic(v)) => v.len() == d,
            (GroupKind::BinarySeq, Element::Bits(s)) => !s.contains(&0),
            _ => false,
        }
    }

    pub fn check(&self, e: &Element) -> Result<()> {
        if self.contains(e) {
            Ok(())
        } else {
            Err(Error::GroupMismatch(format!("{e} is not an element of {self}")))
        }
    }

    /// The element `k * e_1` (first basis vector) of a lattice.
    pub fn axis(&self, k: BigInt) -> Result<Element> {
        match self.kind {
            GroupKind::IntLattice(d) => {
                let mut v = vec![BigInt::zero(); d];
                v[0] = k;
                Ok(Element::Int(v))
            }
            GroupKind::DyadicLattice(d) => {
                let mut v = vec![Dyadic::zero(); d];
                v[0] = Dyadic::new(k, 0);
                Ok(Element::Dyadic(v))
            }
            GroupKind::BinarySeq => Err(Error::UnsupportedDomain("binary sequences have no axis".into())),
        }
    }

    /// Deterministic element of norm at least `bound`.
    ///
    /// Lattices return `ceil(bound) * e_1`; the binary-sequence group returns
    /// the shortest harmonic prefix `{1..n}` with `H_n >= bound`.
    pub fn unbounded_witness(&self, bound: &Rational) -> Result<Element> {
        if !self.unbounded() {
            return Err(Error::Bounded);
        }
        if bound.is_negative() {
            return Err(Error::InvalidArgument(format!("norm bound {bound} is negative")));
        }
        match self.kind {
            GroupKind::IntLattice(_) | GroupKind::DyadicLattice(_) => self.axis(bound.ceil()),
            GroupKind::BinarySeq => {
                let n = harmonic_prefix_reaching(bound)?;
                Ok(Element::Bits((1..=n).collect()))
            }
        }
    }

    /// Deterministic `u` with `norm(2u) >= bound`: `ceil(bound / 2) * e_1`.
    pub fn doubling_witness(&self, bound: &Rational) -> Result<Element> {
        if !self.doubling_unbounded() {
            return Err(Error::DoublingBounded);
        }
        if bound.is_negative() {
            return Err(Error::InvalidArgument(format!("norm bound {bound} is negative")));
        }
        let half = bound * &Rational::new(1, 2);
        self.axis(half.ceil())
    }

    /// Parses an element, accepting either the tagged text form or a bare
    /// shorthand interpreted in this group (`3`, `1,-2`, `1/2`, `{1,3}`).
    pub fn parse_element(&self, s: &str) -> Result<Element> {
        let s = s.trim();
        let e = if s.starts_with("int:") || s.starts_with("dyadic:") || s.starts_with("bits:") {
            s.parse()?
        } else {
            match self.kind {
                GroupKind::IntLattice(_) => Element::Int(parse_list(strip(s, '[', ']'), |t| {
                    t.parse::<BigInt>().map_err(|_| Error::Parse(format!("invalid integer `{t}`")))
                })?),
                GroupKind::DyadicLattice(_) => {
                    Element::Dyadic(parse_list(strip(s, '[', ']'), Dyadic::from_str)?)
                }
                GroupKind::BinarySeq => Element::Bits(parse_bits(strip(s, '{', '}'))?),
            }
        };
        self.check(&e)?;
        Ok(e)
    }

    /// Random element with coordinates in `[-radius, radius]` (lattices,
    /// dyadic denominators up to 4) or support inside `{1..radius}`.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R, radius: i64) -> Element {
        let radius = radius.max(1);
        match self.kind {
            GroupKind::IntLattice(d) => {
                Element::Int((0..d).map(|_| BigInt::from(rng.gen_range(-radius..=radius))).collect())
            }
            GroupKind::DyadicLattice(d) => Element::Dyadic(
                (0..d)
                    .map(|_| {
                        let e = rng.gen_range(0..=2u32);
                        Dyadic::new(rng.gen_range(-(radius << e)..=(radius << e)), e)
                    })
                    .collect(),
            ),
            GroupKind::BinarySeq => {
                Element::Bits((1..=radius as u32).filter(|_| rng.gen_bool(0.5)).collect())
            }
        }
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GroupKind::IntLattice(d) => write!(f, "int:{d}"),
            GroupKind::DyadicLattice(d) => write!(f, "dyadic:{d}"),
            GroupKind::BinarySeq => write!(f, "binseq"),
        }
    }
}

impl FromStr for GroupDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let dim = |d: &str| -> Result<usize> {
            match d.parse::<usize>() {
                Ok(n) if n > 0 => Ok(n),
                _ => Err(Error::Parse(format!("invalid lattice dimension `{d}`"))),
            }
        };
        match s.split_once(':') {
            Some(("int", d)) => Ok(GroupDescriptor::int_lattice(dim(d)?)),
            Some(("dyadic", d)) => Ok(GroupDescriptor::dyadic_lattice(dim(d)?)),
            None if s == "int" => Ok(GroupDescriptor::int_lattice(1)),
            None if s == "dyadic" => Ok(GroupDescriptor::dyadic_lattice(1)),
            None if s == "binseq" || s == "bits" => Ok(GroupDescriptor::binary_seq()),
            _ => Err(Error::Parse(format!("unknown group `{s}`"))),
        }
    }
}

impl Serialize for GroupDescriptor {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroupDescriptor {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

/// `mantissa / 2^exponent`, normalized so the mantissa is odd or the
/// exponent is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: u32,
}

impl Dyadic {
    pub fn new(mantissa: impl Into<BigInt>, exponent: u32) -> Self {
        let mut mantissa = mantissa.into();
        let mut exponent = exponent;
        if mantissa.is_zero() {
            exponent = 0;
        }
        while exponent > 0 && mantissa.is_even() {
            mantissa >>= 1;
            exponent -= 1;
        }
        Dyadic { mantissa, exponent }
    }

    pub fn zero() -> Self {
        Dyadic { mantissa: BigInt::zero(), exponent: 0 }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    /// `None` unless the denominator is a power of two.
    pub fn from_rational(q: &Rational) -> Option<Self> {
        let d = q.denom();
        if (d & (d - BigInt::one())).is_zero() {
            Some(Dyadic::new(q.numer().clone(), d.bits() as u32 - 1))
        } else {
            None
        }
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.mantissa.clone(), BigInt::one() << self.exponent as usize)
    }

    fn add(&self, other: &Dyadic) -> Dyadic {
        let e = self.exponent.max(other.exponent);
        let a = &self.mantissa << (e - self.exponent) as usize;
        let b = &other.mantissa << (e - other.exponent) as usize;
        Dyadic::new(a + b, e)
    }

    fn neg(&self) -> Dyadic {
        Dyadic { mantissa: -&self.mantissa, exponent: self.exponent }
    }

    fn double(&self) -> Dyadic {
        if self.exponent > 0 {
            Dyadic { mantissa: self.mantissa.clone(), exponent: self.exponent - 1 }
        } else {
            Dyadic { mantissa: &self.mantissa << 1usize, exponent: 0 }
        }
    }

    fn halve(&self) -> Dyadic {
        Dyadic::new(self.mantissa.clone(), self.exponent + 1)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.mantissa, self.exponent)
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let q: Rational = s.parse()?;
        Dyadic::from_rational(&q).ok_or_else(|| Error::Parse(format!("`{s}` is not a dyadic rational")))
    }
}

/// An element of one of the built-in groups.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Int(Vec<BigInt>),
    Dyadic(Vec<Dyadic>),
    /// Support of an eventually-zero binary sequence (indices start at 1).
    Bits(BTreeSet<u32>),
}

impl Element {
    pub fn int(coords: impl IntoIterator<Item = i64>) -> Self {
        Element::Int(coords.into_iter().map(BigInt::from).collect())
    }

    /// One-dimensional dyadic lattice element `mantissa / 2^exponent`.
    pub fn dyadic(mantissa: i64, exponent: u32) -> Self {
        Element::Dyadic(vec![Dyadic::new(mantissa, exponent)])
    }

    pub fn bits(support: impl IntoIterator<Item = u32>) -> Self {
        Element::Bits(support.into_iter().collect())
    }

    /// The built-in group this element belongs to.
    pub fn group(&self) -> GroupDescriptor {
        match self {
            Element::Int(v) => GroupDescriptor { kind: GroupKind::IntLattice(v.len()) },
            Element::Dyadic(v) => GroupDescriptor { kind: GroupKind::DyadicLattice(v.len()) },
            Element::Bits(_) => GroupDescriptor::binary_seq(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Element::Int(v) => v.iter().all(Zero::is_zero),
            Element::Dyadic(v) => v.iter().all(Dyadic::is_zero),
            Element::Bits(s) => s.is_empty(),
        }
    }

    fn mismatch(&self, other: &Element) -> Error {
        Error::GroupMismatch(format!("{self} and {other} lie in different groups"))
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        match (self, other) {
            (Element::Int(a), Element::Int(b)) if a.len() == b.len() => {
                Ok(Element::Int(a.iter().zip(b).map(|(x, y)| x + y).collect()))
            }
            (Element::Dyadic(a), Element::Dyadic(b)) if a.len() == b.len() => {
                Ok(Element::Dyadic(a.iter().zip(b).map(|(x, y)| x.add(y)).collect()))
            }
            (Element::Bits(a), Element::Bits(b)) => Ok(Element::Bits(a.symmetric_difference(b).copied().collect())),
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn negate(&self) -> Element {
        match self {
            Element::Int(a) => Element::Int(a.iter().map(|x| -x).collect()),
            Element::Dyadic(a) => Element::Dyadic(a.iter().map(Dyadic::neg).collect()),
            Element::Bits(_) => self.clone(),
        }
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.add(&other.negate())
    }

    pub fn double(&self) -> Element {
        match self {
            Element::Int(a) => Element::Int(a.iter().map(|x| x << 1usize).collect()),
            Element::Dyadic(a) => Element::Dyadic(a.iter().map(Dyadic::double).collect()),
            Element::Bits(_) => Element::Bits(BTreeSet::new()),
        }
    }

    /// The unique `h` with `h + h = self`; only the dyadic lattice qualifies.
    pub fn halve(&self) -> Result<Element> {
        match self {
            Element::Dyadic(a) => Ok(Element::Dyadic(a.iter().map(Dyadic::halve).collect())),
            _ => Err(Error::NotDivisible),
        }
    }

    /// Integer multiple `k * self`.
    pub fn times(&self, k: i64) -> Element {
        match self {
            Element::Int(a) => Element::Int(a.iter().map(|x| x * k).collect()),
            Element::Dyadic(a) => Element::Dyadic(a.iter().map(|x| Dyadic::new(&x.mantissa * k, x.exponent)).collect()),
            Element::Bits(_) if k % 2 == 0 => Element::Bits(BTreeSet::new()),
            Element::Bits(_) => self.clone(),
        }
    }

    /// The induced norm `d(self, 0)`.
    pub fn norm(&self) -> Rational {
        match self {
            Element::Int(a) => Rational::from_integer(a.iter().map(|x| x.abs()).sum::<BigInt>()),
            Element::Dyadic(a) => a.iter().map(|x| x.to_rational().abs()).sum(),
            Element::Bits(s) => harmonic_sum(s.iter().copied()),
        }
    }

    /// `d(self, other) = norm(self - other)`.
    pub fn distance(&self, other: &Element) -> Result<Rational> {
        Ok(self.sub(other)?.norm())
    }

    /// Coordinates as rationals (lattices only).
    pub fn coords(&self) -> Option<Vec<Rational>> {
        match self {
            Element::Int(a) => Some(a.iter().cloned().map(Rational::from_integer).collect()),
            Element::Dyadic(a) => Some(a.iter().map(Dyadic::to_rational).collect()),
            Element::Bits(_) => None,
        }
    }
}

fn join<T: fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Int(a) => write!(f, "int:[{}]", join(a)),
            Element::Dyadic(a) => write!(f, "dyadic:[{}]", join(a)),
            Element::Bits(s) => write!(f, "bits:{{{}}}", join(s)),
        }
    }
}

fn strip(s: &str, open: char, close: char) -> &str {
    let s = s.trim();
    s.strip_prefix(open).and_then(|t| t.strip_suffix(close)).unwrap_or(s)
}

fn parse_list<T>(body: &str, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    body.split([',', ';']).map(|t| item(t.trim())).collect()
}

fn parse_bits(body: &str) -> Result<BTreeSet<u32>> {
    if body.trim().is_empty() {
        return Ok(BTreeSet::new());
    }
    body.split([',', ';'])
        .map(|t| match t.trim().parse::<u32>() {
            Ok(i) if i > 0 => Ok(i),
            _ => Err(Error::Parse(format!("invalid sequence index `{t}`"))),
        })
        .collect()
}

impl FromStr for Element {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let fail = || Error::Parse(format!("invalid element `{s}`"));
        let (tag, body) = s.split_once(':').ok_or_else(fail)?;
        match tag {
            "int" => {
                let body = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')).ok_or_else(fail)?;
                Ok(Element::Int(parse_list(body, |t| t.parse::<BigInt>().map_err(|_| fail()))?))
            }
            "dyadic" => {
                let body = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')).ok_or_else(fail)?;
                Ok(Element::Dyadic(parse_list(body, Dyadic::from_str)?))
            }
            "bits" => {
                let body = body.strip_prefix('{').and_then(|b| b.strip_suffix('}')).ok_or_else(fail)?;
                Ok(Element::Bits(parse_bits(body)?))
            }
            _ => Err(fail()),
        }
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Running `sum 1/i` kept over the lcm of the indices seen so far, which
/// avoids a gcd reduction of the full fraction at every step.
#[derive(Clone, Debug)]
struct HarmonicAccumulator {
    numer: BigInt,
    lcm: BigInt,
}

impl HarmonicAccumulator {
    fn new() -> Self {
        HarmonicAccumulator { numer: BigInt::zero(), lcm: BigInt::one() }
    }

    fn push(&mut self, i: u32) {
        let rem = (&self.lcm % i).to_u32().unwrap_or(0);
        let m = i / num_integer::gcd(i, rem);
        if m != 1 {
            self.numer *= m;
            self.lcm *= m;
        }
        self.numer += &self.lcm / i;
    }

    fn value(self) -> Rational {
        Rational::new(self.numer, self.lcm)
    }
}

/// Exact `sum_{i in indices} 1/i`.
pub fn harmonic_sum(indices: impl IntoIterator<Item = u32>) -> Rational {
    let mut acc = HarmonicAccumulator::new();
    for i in indices {
        acc.push(i);
    }
    acc.value()
}

/// Smallest `n` with `H_n >= bound`.
///
/// A floating-point running sum screens candidates; any `n` within
/// `SLACK` of the bound is settled by an exact sum.
pub fn harmonic_prefix_reaching(bound: &Rational) -> Result<u32> {
    const SLACK: f64 = 1e-6;
    let target = bound.to_f64();
    let too_large =
        || Error::WitnessTooLarge(format!("harmonic prefix for norm {bound} exceeds {MAX_HARMONIC_PREFIX} terms"));
    if !target.is_finite() {
        return Err(too_large());
    }
    let mut approx = 0.0f64;
    for n in 0..=MAX_HARMONIC_PREFIX {
        if n > 0 {
            approx += 1.0 / f64::from(n);
        }
        if approx >= target + SLACK || (approx > target - SLACK && harmonic_sum(1..=n) >= *bound) {
            return Ok(n);
        }
    }
    Err(too_large())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    /// Harmonic partial sums by plain fraction addition, independent of the
    /// lcm accumulator.
    fn harmonic_oracle(n: u32) -> Rational {
        (1..=n).map(|i| Rational::new(1, i)).sum()
    }

    #[test]
    fn add_examples() {
        assert_eq!(Element::int([2]).add(&Element::int([3])).unwrap(), Element::int([5]));
        assert_eq!(Element::bits([1, 2]).add(&Element::bits([2, 3])).unwrap(), Element::bits([1, 3]));
        let s = Element::dyadic(3, 1).add(&Element::dyadic(1, 1)).unwrap();
        assert_eq!(s, Element::dyadic(2, 0));
        assert_eq!(s.to_string(), "dyadic:[2/2^0]");
        assert!(matches!(Element::int([1]).add(&Element::bits([1])), Err(Error::GroupMismatch(_))));
        assert!(Element::int([1]).add(&Element::int([1, 2])).is_err());
    }

    #[test]
    fn negate_examples() {
        assert_eq!(Element::int([7]).negate(), Element::int([-7]));
        assert_eq!(Element::bits([1, 5]).negate(), Element::bits([1, 5]));
        assert_eq!(Element::dyadic(3, 2).negate(), Element::dyadic(-3, 2));
    }

    #[test]
    fn norm_examples() {
        assert_eq!(Element::bits([1, 2, 3]).norm(), q("11/6"));
        assert_eq!(Element::int([-3, 4]).norm(), q("7"));
        for g in [GroupDescriptor::int_lattice(2), GroupDescriptor::dyadic_lattice(3), GroupDescriptor::binary_seq()] {
            assert!(g.zero().norm().is_zero());
        }
        assert_eq!(Element::dyadic(-3, 2).norm(), q("3/4"));
    }

    #[test]
    fn double_and_halve() {
        assert_eq!(Element::int([5]).double(), Element::int([10]));
        assert_eq!(Element::bits([2, 7]).double(), Element::bits([]));
        assert_eq!(Element::dyadic(3, 1).double(), Element::dyadic(3, 0));
        assert_eq!(Element::dyadic(3, 0).halve().unwrap(), Element::dyadic(3, 1));
        assert_eq!(Element::dyadic(0, 0).halve().unwrap(), Element::dyadic(0, 0));
        assert_eq!(Element::int([4]).halve(), Err(Error::NotDivisible));
        assert_eq!(Element::bits([4]).halve(), Err(Error::NotDivisible));
    }

    #[test]
    fn dyadic_normalization() {
        assert_eq!(Dyadic::new(4, 2), Dyadic::new(1, 0));
        assert_eq!(Dyadic::new(6, 2).to_string(), "3/2^1");
        assert_eq!(Dyadic::new(0, 5).exponent(), 0);
        assert_eq!(Dyadic::from_rational(&q("3/8")), Some(Dyadic::new(3, 3)));
        assert_eq!(Dyadic::from_rational(&q("1/3")), None);
    }

    #[test]
    fn unbounded_witness_examples() {
        let z = GroupDescriptor::int_lattice(1);
        assert_eq!(z.unbounded_witness(&q("12")).unwrap(), Element::int([12]));
        let d = GroupDescriptor::dyadic_lattice(1);
        assert_eq!(d.unbounded_witness(&q("7/2")).unwrap(), Element::dyadic(4, 0));
        let b = GroupDescriptor::binary_seq();
        assert_eq!(b.unbounded_witness(&q("3")).unwrap(), Element::bits(1..=11));
        assert!(harmonic_oracle(11) >= q("3") && harmonic_oracle(10) < q("3"));
        assert!(z.unbounded_witness(&q("-1")).is_err());
    }

    #[test]
    fn harmonic_prefix_matches_oracle() {
        for m in ["1", "3/2", "2", "5/2", "3", "7/2", "4"] {
            let bound = q(m);
            let n = harmonic_prefix_reaching(&bound).unwrap();
            assert!(harmonic_oracle(n) >= bound);
            assert!(harmonic_oracle(n - 1) < bound);
            assert_eq!(harmonic_sum(1..=n), harmonic_oracle(n));
        }
        assert_eq!(harmonic_prefix_reaching(&q("0")).unwrap(), 0);
    }

    #[test]
    fn harmonic_witness_reaches_ten() {
        let b = GroupDescriptor::binary_seq();
        let w = b.unbounded_witness(&q("10")).unwrap();
        assert!(w.norm() >= q("10"));
        assert_eq!(harmonic_prefix_reaching(&q("10")).unwrap(), 12367);
        assert!(matches!(b.unbounded_witness(&q("20")), Err(Error::WitnessTooLarge(_))));
    }

    #[test]
    fn doubling_witness_examples() {
        let z = GroupDescriptor::int_lattice(1);
        assert_eq!(z.doubling_witness(&q("9")).unwrap(), Element::int([5]));
        let d = GroupDescriptor::dyadic_lattice(1);
        assert_eq!(d.doubling_witness(&q("0")).unwrap(), Element::dyadic(0, 0));
        assert_eq!(GroupDescriptor::binary_seq().doubling_witness(&q("1")), Err(Error::DoublingBounded));
    }

    #[test]
    fn capability_flags() {
        let z = GroupDescriptor::int_lattice(3);
        assert!(!z.uniquely_2_divisible() && z.unbounded() && z.doubling_unbounded());
        let d = GroupDescriptor::dyadic_lattice(1);
        assert!(d.uniquely_2_divisible() && d.unbounded() && d.doubling_unbounded());
        let b = GroupDescriptor::binary_seq();
        assert!(!b.uniquely_2_divisible() && b.unbounded() && !b.doubling_unbounded());
    }

    #[test]
    fn text_forms() {
        for s in ["int:[1,-2]", "dyadic:[3/2^1,-1/2^0]", "bits:{1,4,9}", "bits:{}"] {
            assert_eq!(s.parse::<Element>().unwrap().to_string(), s);
        }
        let d = GroupDescriptor::dyadic_lattice(1);
        assert_eq!(d.parse_element("3/2").unwrap(), Element::dyadic(3, 1));
        assert_eq!(d.parse_element("-1").unwrap(), Element::dyadic(-1, 0));
        assert!(d.parse_element("1/3").is_err());
        let b = GroupDescriptor::binary_seq();
        assert_eq!(b.parse_element("{5}").unwrap(), Element::bits([5]));
        assert!(b.parse_element("{0}").is_err());
        let z2 = GroupDescriptor::int_lattice(2);
        assert_eq!(z2.parse_element("1,0").unwrap(), Element::int([1, 0]));
        assert!(z2.parse_element("1").is_err());
        for g in ["int:2", "dyadic:1", "binseq"] {
            assert_eq!(g.parse::<GroupDescriptor>().unwrap().to_string(), g);
        }
    }
}
