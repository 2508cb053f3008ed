//! Test functions `f : X -> Y` as a base rule plus finitely many overrides.
//!
//! Every counterexample used to probe the stability bounds has this shape:
//! the extremal functions are constant (or zero) away from one or three
//! points, and the bounded-doubling counterexample is the identity away
//! from the origin.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::groups::{Element, GroupDescriptor};
use crate::rational::Rational;

/// A value in the codomain: a rational scalar with `|.|`, or an element of
/// a built-in group with that group's norm.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CodomainValue {
    Scalar(Rational),
    Group(Element),
}

impl CodomainValue {
    pub fn scalar(q: impl Into<Rational>) -> Self {
        CodomainValue::Scalar(q.into())
    }

    fn mismatch(&self, other: &CodomainValue) -> Error {
        Error::CodomainMismatch(format!("cannot combine {self} with {other}"))
    }

    pub fn add(&self, other: &CodomainValue) -> Result<CodomainValue> {
        match (self, other) {
            (CodomainValue::Scalar(a), CodomainValue::Scalar(b)) => Ok(CodomainValue::Scalar(a + b)),
            (CodomainValue::Group(a), CodomainValue::Group(b)) => Ok(CodomainValue::Group(a.add(b)?)),
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn sub(&self, other: &CodomainValue) -> Result<CodomainValue> {
        match (self, other) {
            (CodomainValue::Scalar(a), CodomainValue::Scalar(b)) => Ok(CodomainValue::Scalar(a - b)),
            (CodomainValue::Group(a), CodomainValue::Group(b)) => Ok(CodomainValue::Group(a.sub(b)?)),
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn times(&self, k: i64) -> CodomainValue {
        match self {
            CodomainValue::Scalar(a) => CodomainValue::Scalar(a.scale(k)),
            CodomainValue::Group(a) => CodomainValue::Group(a.times(k)),
        }
    }

    pub fn norm(&self) -> Rational {
        match self {
            CodomainValue::Scalar(a) => a.abs(),
            CodomainValue::Group(a) => a.norm(),
        }
    }

    fn kind(&self) -> Codomain {
        match self {
            CodomainValue::Scalar(_) => Codomain::Scalar,
            CodomainValue::Group(e) => Codomain::Group(e.group()),
        }
    }
}

impl fmt::Display for CodomainValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodomainValue::Scalar(q) => write!(f, "{q}"),
            CodomainValue::Group(e) => write!(f, "{e}"),
        }
    }
}

impl FromStr for CodomainValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.contains(':') {
            Ok(CodomainValue::Group(s.parse()?))
        } else {
            Ok(CodomainValue::Scalar(s.parse()?))
        }
    }
}

impl Serialize for CodomainValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CodomainValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Codomain {
    Scalar,
    Group(GroupDescriptor),
}

/// Rule applied at every point without an override.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Base {
    Zero,
    Constant { value: CodomainValue },
    /// `f(x) = slope * x` on a one-dimensional lattice.
    LinearScalar { slope: Rational },
    /// `f(x) = x`, codomain equal to the domain.
    Identity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FunctionRepr", into = "FunctionRepr")]
pub struct TestFunction {
    domain: GroupDescriptor,
    base: Base,
    overrides: BTreeMap<Element, CodomainValue>,
}

#[derive(Serialize, Deserialize)]
struct FunctionRepr {
    domain: GroupDescriptor,
    base: Base,
    overrides: Vec<(Element, CodomainValue)>,
}

impl From<TestFunction> for FunctionRepr {
    fn from(f: TestFunction) -> Self {
        FunctionRepr { domain: f.domain, base: f.base, overrides: f.overrides.into_iter().collect() }
    }
}

impl TryFrom<FunctionRepr> for TestFunction {
    type Error = Error;

    fn try_from(r: FunctionRepr) -> Result<Self> {
        TestFunction::new(r.domain, r.base)?.perturb(r.overrides)
    }
}

impl TestFunction {
    pub fn new(domain: GroupDescriptor, base: Base) -> Result<Self> {
        if matches!(base, Base::LinearScalar { .. }) && domain.dim() != Some(1) {
            return Err(Error::UnsupportedDomain(format!("linear base needs a 1-dimensional lattice, got {domain}")));
        }
        Ok(TestFunction { domain, base, overrides: BTreeMap::new() })
    }

    pub fn zero(domain: GroupDescriptor) -> Self {
        TestFunction { domain, base: Base::Zero, overrides: BTreeMap::new() }
    }

    pub fn domain(&self) -> GroupDescriptor {
        self.domain
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn overrides(&self) -> &BTreeMap<Element, CodomainValue> {
        &self.overrides
    }

    fn codomain(&self) -> Codomain {
        match &self.base {
            Base::Zero | Base::LinearScalar { .. } => Codomain::Scalar,
            Base::Constant { value } => value.kind(),
            Base::Identity => Codomain::Group(self.domain),
        }
    }

    fn base_value(&self, x: &Element) -> CodomainValue {
        match &self.base {
            Base::Zero => CodomainValue::Scalar(Rational::zero()),
            Base::Constant { value } => value.clone(),
            Base::LinearScalar { slope } => {
                let c = x.coords().expect("linear base is attached to a lattice");
                CodomainValue::Scalar(slope * &c[0])
            }
            Base::Identity => CodomainValue::Group(x.clone()),
        }
    }

    pub fn eval(&self, x: &Element) -> Result<CodomainValue> {
        self.domain.check(x)?;
        Ok(self.overrides.get(x).cloned().unwrap_or_else(|| self.base_value(x)))
    }

    /// Merges `extra` into the overrides, `extra` winning on collisions.
    /// Overrides that agree with the base rule are dropped.
    pub fn perturb(&self, extra: impl IntoIterator<Item = (Element, CodomainValue)>) -> Result<TestFunction> {
        let codomain = self.codomain();
        let mut out = self.clone();
        for (x, v) in extra {
            self.domain.check(&x)?;
            if v.kind() != codomain {
                return Err(Error::CodomainMismatch(format!("override value {v} does not match the base codomain")));
            }
            if v == self.base_value(&x) {
                out.overrides.remove(&x);
            } else {
                out.overrides.insert(x, v);
            }
        }
        Ok(out)
    }

    /// Serializes to the JSON object `{"domain", "base", "overrides"}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("test functions always serialize")
    }

    /// Parses the command-line mini-grammar `name:key=val,...`.
    ///
    /// Recognized names: `zero`, `identity`, `constant:value=v`,
    /// `additive:slope=s`, `extremal-cauchy:eps=e,x0=p`,
    /// `extremal-jensen:eps=e,x0=p`, `hyper-counterexample:a=p`.
    pub fn parse_spec(domain: GroupDescriptor, spec: &str) -> Result<TestFunction> {
        let spec = spec.trim();
        let (name, args) = spec.split_once(':').unwrap_or((spec, ""));
        let mut params = BTreeMap::new();
        for item in split_top_level(args) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value in `{item}`")))?;
            params.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |key: &str| -> Result<&str> {
            params
                .get(key)
                .map(String::as_str)
                .ok_or_else(|| Error::Parse(format!("function `{name}` needs `{key}=`")))
        };
        let rational = |key: &str| -> Result<Rational> { get(key)?.parse() };
        let element = |key: &str| -> Result<Element> { domain.parse_element(get(key)?) };
        let f = match name {
            "zero" => TestFunction::zero(domain),
            "identity" => TestFunction::new(domain, Base::Identity)?,
            "constant" => {
                let value: CodomainValue = get("value")?.parse()?;
                TestFunction::new(domain, Base::Constant { value })?
            }
            "additive" => make_additive(&rational("slope")?, domain)?,
            "extremal-cauchy" => make_extremal_cauchy(&rational("eps")?, &element("x0")?)?,
            "extremal-jensen" => make_extremal_jensen(&rational("eps")?, &element("x0")?)?,
            "hyper-counterexample" => make_hyper_counterexample(&element("a")?)?,
            _ => return Err(Error::Parse(format!("unknown function `{name}`"))),
        };
        Ok(f)
    }
}

/// Splits on commas that are not nested inside `[]` or `{}`.
pub(crate) fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '[' | '{' => depth += 1,
            ']' | '}' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if !s[start..].trim().is_empty() {
        out.push(&s[start..]);
    }
    out
}

fn nonnegative(eps: &Rational) -> Result<()> {
    if eps.is_negative() {
        Err(Error::InvalidArgument(format!("epsilon {eps} is negative")))
    } else {
        Ok(())
    }
}

/// `eps` everywhere except `3 eps` at `x0`.
pub fn make_extremal_cauchy(eps: &Rational, x0: &Element) -> Result<TestFunction> {
    nonnegative(eps)?;
    if x0.is_zero() {
        return Err(Error::ZeroExcluded);
    }
    let base = Base::Constant { value: CodomainValue::Scalar(eps.clone()) };
    TestFunction::new(x0.group(), base)?.perturb([(x0.clone(), CodomainValue::Scalar(eps.scale(3)))])
}

/// Zero except `-eps/2` at `x0` and `-x0`, and `eps/2` at the origin.
pub fn make_extremal_jensen(eps: &Rational, x0: &Element) -> Result<TestFunction> {
    nonnegative(eps)?;
    let domain = x0.group();
    if !domain.uniquely_2_divisible() {
        return Err(Error::NotDivisible);
    }
    if x0.is_zero() {
        return Err(Error::ZeroExcluded);
    }
    let half = eps * &Rational::new(1, 2);
    TestFunction::zero(domain).perturb([
        (x0.clone(), CodomainValue::Scalar(-&half)),
        (x0.negate(), CodomainValue::Scalar(-&half)),
        (domain.zero(), CodomainValue::Scalar(half)),
    ])
}

/// `f(x) = x` for `x != 0` and `f(0) = a`, a map of the group into itself.
pub fn make_hyper_counterexample(a: &Element) -> Result<TestFunction> {
    if a.is_zero() {
        return Err(Error::ZeroExcluded);
    }
    let domain = a.group();
    TestFunction::new(domain, Base::Identity)?.perturb([(domain.zero(), CodomainValue::Group(a.clone()))])
}

/// The additive map `x -> slope * x` on a one-dimensional lattice.
pub fn make_additive(slope: &Rational, domain: GroupDescriptor) -> Result<TestFunction> {
    TestFunction::new(domain, Base::LinearScalar { slope: slope.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn s(v: &str) -> CodomainValue {
        CodomainValue::Scalar(q(v))
    }

    #[test]
    fn extremal_cauchy_values() {
        let f = make_extremal_cauchy(&q("1"), &Element::int([1])).unwrap();
        assert_eq!(f.eval(&Element::int([1])).unwrap(), s("3"));
        assert_eq!(f.eval(&Element::int([17])).unwrap(), s("1"));
        let f0 = make_extremal_cauchy(&q("0"), &Element::int([1])).unwrap();
        assert!(f0.overrides().is_empty());
        assert_eq!(f0.eval(&Element::int([1])).unwrap(), s("0"));
        let f2 = make_extremal_cauchy(&q("2"), &Element::int([1, 0])).unwrap();
        assert_eq!(f2.eval(&Element::int([1, 0])).unwrap(), s("6"));
        assert_eq!(f2.eval(&Element::int([0, 1])).unwrap(), s("2"));
        assert_eq!(make_extremal_cauchy(&q("1"), &Element::int([0])), Err(Error::ZeroExcluded));
    }

    #[test]
    fn extremal_jensen_values() {
        let f = make_extremal_jensen(&q("1"), &Element::dyadic(1, 0)).unwrap();
        assert_eq!(f.eval(&Element::dyadic(0, 0)).unwrap(), s("1/2"));
        assert_eq!(f.eval(&Element::dyadic(1, 0)).unwrap(), s("-1/2"));
        assert_eq!(f.eval(&Element::dyadic(-1, 0)).unwrap(), s("-1/2"));
        assert_eq!(f.eval(&Element::dyadic(3, 0)).unwrap(), s("0"));
        let f0 = make_extremal_jensen(&q("0"), &Element::dyadic(1, 0)).unwrap();
        assert_eq!(f0, TestFunction::zero(GroupDescriptor::dyadic_lattice(1)));
        assert_eq!(make_extremal_jensen(&q("1"), &Element::int([1])), Err(Error::NotDivisible));
        assert_eq!(make_extremal_jensen(&q("1"), &Element::dyadic(0, 0)), Err(Error::ZeroExcluded));
    }

    #[test]
    fn hyper_counterexample_values() {
        let f = make_hyper_counterexample(&Element::bits([1])).unwrap();
        let g = |v: &[u32]| CodomainValue::Group(Element::bits(v.iter().copied()));
        assert_eq!(f.eval(&Element::bits([2, 3])).unwrap(), g(&[2, 3]));
        assert_eq!(f.eval(&Element::bits([])).unwrap(), g(&[1]));
        assert_eq!(make_hyper_counterexample(&Element::bits([])), Err(Error::ZeroExcluded));
    }

    #[test]
    fn additive_and_perturb() {
        let z = GroupDescriptor::int_lattice(1);
        let f = make_additive(&q("2"), z).unwrap();
        assert_eq!(f.eval(&Element::int([5])).unwrap(), s("10"));
        let d = make_additive(&q("3/2"), GroupDescriptor::dyadic_lattice(1)).unwrap();
        assert_eq!(d.eval(&Element::dyadic(1, 1)).unwrap(), s("3/4"));
        assert!(matches!(make_additive(&q("1"), GroupDescriptor::int_lattice(2)), Err(Error::UnsupportedDomain(_))));
        assert!(make_additive(&q("1"), GroupDescriptor::binary_seq()).is_err());

        let p = TestFunction::zero(z).perturb([(Element::int([5]), s("7"))]).unwrap();
        assert_eq!(p.eval(&Element::int([5])).unwrap(), s("7"));
        assert_eq!(f.perturb([]).unwrap(), f);
        let p2 = p.perturb([(Element::int([5]), s("9"))]).unwrap();
        assert_eq!(p2.eval(&Element::int([5])).unwrap(), s("9"));
        assert!(p.perturb([(Element::bits([1]), s("1"))]).is_err());
        assert!(p.perturb([(Element::int([1]), CodomainValue::Group(Element::int([1])))]).is_err());
        assert!(f.eval(&Element::int([1, 2])).is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = make_extremal_jensen(&q("1"), &Element::dyadic(1, 0)).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(serde_json::from_str::<TestFunction>(&text).unwrap(), f);
        let h = make_hyper_counterexample(&Element::bits([1])).unwrap();
        let v = h.to_json();
        assert_eq!(v["base"]["kind"], "identity");
        assert_eq!(v["overrides"][0][0], "bits:{}");
        assert_eq!(v["overrides"][0][1], "bits:{1}");
        assert_eq!(serde_json::from_value::<TestFunction>(v).unwrap(), h);
    }

    #[test]
    fn mini_grammar() {
        let z = GroupDescriptor::int_lattice(1);
        let f = TestFunction::parse_spec(z, "extremal-cauchy:eps=1,x0=1").unwrap();
        assert_eq!(f, make_extremal_cauchy(&q("1"), &Element::int([1])).unwrap());
        let z2 = GroupDescriptor::int_lattice(2);
        let f2 = TestFunction::parse_spec(z2, "extremal-cauchy:eps=2,x0=[1,0]").unwrap();
        assert_eq!(f2.eval(&Element::int([1, 0])).unwrap(), s("6"));
        let b = GroupDescriptor::binary_seq();
        let h = TestFunction::parse_spec(b, "hyper-counterexample:a={1}").unwrap();
        assert_eq!(h, make_hyper_counterexample(&Element::bits([1])).unwrap());
        assert!(TestFunction::parse_spec(z, "additive:slope=1/2").is_ok());
        assert!(TestFunction::parse_spec(z, "constant:value=3").is_ok());
        assert!(TestFunction::parse_spec(z, "nope").is_err());
        assert!(TestFunction::parse_spec(z, "additive").is_err());
    }
}
