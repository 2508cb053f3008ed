//! Weighted (hyperstability) defects.
//!
//! A weight `phi` with `phi(t) -> infinity` turns a finite weighted bound
//! `phi(|x - y|) * defect(x, y) < K` on the far region into a defect below
//! `eps / n` on pairs whose difference has norm at least
//! `R = phi.threshold_inverse(n * K / eps)`. Witnesses are picked so every
//! chain term also clears `R`, which needs `2X` to be unbounded.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::certify::{all_hold, cauchy_chain, jensen_chain, Condition};
use crate::defect::{defect, scan_report, weighted_defect, Equation, ScanReport};
use crate::error::{Error, Result};
use crate::functions::TestFunction;
use crate::groups::{Element, GroupDescriptor};
use crate::rational::Rational;
use crate::window::Window;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum WeightFunction {
    /// `phi(t) = t`
    Linear,
    /// `phi(t) = t^2`
    Quadratic,
    /// `phi(t) = offset + slope * floor(t)`, `slope > 0`
    AffineFloor { offset: Rational, slope: Rational },
}

impl WeightFunction {
    pub fn affine_floor(offset: Rational, slope: Rational) -> Result<Self> {
        if !slope.is_positive() {
            return Err(Error::InvalidArgument(format!("affine-floor slope {slope} must be positive")));
        }
        Ok(WeightFunction::AffineFloor { offset, slope })
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        match self {
            WeightFunction::Linear => t.clone(),
            WeightFunction::Quadratic => t * t,
            WeightFunction::AffineFloor { offset, slope } => offset + &(slope * &Rational::from_integer(t.floor())),
        }
    }

    /// Some `R >= 0` with `phi(t) >= c` for every `t >= R`; requires `c > 0`.
    pub fn threshold_inverse(&self, c: &Rational) -> Result<Rational> {
        if !c.is_positive() {
            return Err(Error::InvalidArgument(format!("threshold {c} must be positive")));
        }
        Ok(match self {
            WeightFunction::Linear => c.clone(),
            WeightFunction::Quadratic => {
                let target = c.ceil();
                let mut n = target.sqrt();
                if &n * &n < target {
                    n += BigInt::one();
                }
                Rational::from_integer(n)
            }
            WeightFunction::AffineFloor { offset, slope } => {
                let need = (c - offset) * slope.recip();
                Rational::from_integer(need.ceil().max(BigInt::zero()))
            }
        })
    }
}

impl fmt::Display for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightFunction::Linear => f.write_str("linear"),
            WeightFunction::Quadratic => f.write_str("quadratic"),
            WeightFunction::AffineFloor { offset, slope } => write!(f, "affine-floor:offset={offset},slope={slope}"),
        }
    }
}

impl FromStr for WeightFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "linear" => return Ok(WeightFunction::Linear),
            "quadratic" => return Ok(WeightFunction::Quadratic),
            _ => {}
        }
        let args = s
            .strip_prefix("affine-floor:")
            .ok_or_else(|| Error::Parse(format!("unknown weight `{s}`")))?;
        let (mut offset, mut slope) = (None, None);
        for kv in args.split(',') {
            match kv.split_once('=') {
                Some(("offset", v)) => offset = Some(v.parse()?),
                Some(("slope", v)) => slope = Some(v.parse()?),
                _ => return Err(Error::Parse(format!("bad weight parameter `{kv}`"))),
            }
        }
        match (offset, slope) {
            (Some(o), Some(sl)) => WeightFunction::affine_floor(o, sl),
            _ => Err(Error::Parse("affine-floor needs offset= and slope=".into())),
        }
    }
}

impl Serialize for WeightFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for WeightFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperBudget {
    pub r: Rational,
    pub k: Rational,
    pub phi: WeightFunction,
}

impl HyperBudget {
    pub fn new(r: Rational, k: Rational, phi: WeightFunction) -> Result<Self> {
        if !r.is_positive() || !k.is_positive() {
            return Err(Error::InvalidArgument(format!("hyper budget needs r > 0 and K > 0, got r={r}, K={k}")));
        }
        Ok(HyperBudget { r, k, phi })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperWitnesses {
    pub u: Element,
    pub v: Option<Element>,
    pub r_conditions: Vec<Condition>,
    pub big_r_conditions: Vec<Condition>,
}

impl HyperWitnesses {
    pub fn ok(&self) -> bool {
        all_hold(&self.r_conditions) && all_hold(&self.big_r_conditions)
    }
}

fn check(items: Vec<(&str, Element)>, threshold: &Rational) -> Vec<Condition> {
    items
        .into_iter()
        .map(|(label, e)| {
            let norm = e.norm();
            Condition { label: label.to_string(), holds: norm >= *threshold, norm }
        })
        .collect()
}

fn hyper_cauchy_conditions(
    x: &Element,
    y: &Element,
    u: &Element,
    v: &Element,
    r: &Rational,
    big_r: &Rational,
) -> Result<(Vec<Condition>, Vec<Condition>)> {
    let uv = u.add(v)?;
    let small = check(
        vec![
            ("u", u.clone()),
            ("v", v.clone()),
            ("u+v", uv.clone()),
            ("x-u", x.sub(u)?),
            ("y-v", y.sub(v)?),
            ("x+y-u-v", x.add(y)?.sub(&uv)?),
        ],
        r,
    );
    let large = check(
        vec![
            ("x-2u", x.sub(&u.double())?),
            ("y-2v", y.sub(&v.double())?),
            ("x-y-u+v", x.sub(y)?.sub(u)?.add(v)?),
            ("u-v", u.sub(v)?),
            ("x+y-2(u+v)", x.add(y)?.sub(&uv.double())?),
        ],
        big_r,
    );
    Ok((small, large))
}

fn hyper_jensen_conditions(
    x: &Element,
    y: &Element,
    u: &Element,
    r: &Rational,
    big_r: &Rational,
) -> Result<(Vec<Condition>, Vec<Condition>)> {
    let small = check(vec![("x+u", x.add(u)?), ("y+u", y.add(u)?), ("x-u", x.sub(u)?), ("y-u", y.sub(u)?)], r);
    let u2 = u.double();
    let d = x.sub(y)?;
    let large = check(vec![("2u", u2.clone()), ("x-y+2u", d.add(&u2)?), ("x-y-2u", d.sub(&u2)?)], big_r);
    Ok((small, large))
}

/// `u` with `|2u| >= 2r + R + 2|x|`, then `v` with
/// `|2v| >= 2r + 2R + 2|x| + 2|y| + 2|u|`.
pub fn pick_hyper_cauchy_witnesses(
    g: &GroupDescriptor,
    x: &Element,
    y: &Element,
    r: &Rational,
    big_r: &Rational,
) -> Result<HyperWitnesses> {
    if !g.doubling_unbounded() {
        return Err(Error::DoublingBounded);
    }
    g.check(x)?;
    g.check(y)?;
    let (nx, ny) = (x.norm(), y.norm());
    let u = g.doubling_witness(&(r.scale(2) + big_r + nx.scale(2)))?;
    let v = g.doubling_witness(&(r.scale(2) + big_r.scale(2) + nx.scale(2) + ny.scale(2) + u.norm().scale(2)))?;
    let (r_conditions, big_r_conditions) = hyper_cauchy_conditions(x, y, &u, &v, r, big_r)?;
    Ok(HyperWitnesses { u, v: Some(v), r_conditions, big_r_conditions })
}

/// `u` with `|2u| >= 2r + R + 2|x| + 2|y|`.
pub fn pick_hyper_jensen_witness(
    g: &GroupDescriptor,
    x: &Element,
    y: &Element,
    r: &Rational,
    big_r: &Rational,
) -> Result<HyperWitnesses> {
    if !g.uniquely_2_divisible() {
        return Err(Error::NotDivisible);
    }
    if !g.doubling_unbounded() {
        return Err(Error::DoublingBounded);
    }
    g.check(x)?;
    g.check(y)?;
    let u = g.doubling_witness(&(r.scale(2) + big_r + x.norm().scale(2) + y.norm().scale(2)))?;
    let (r_conditions, big_r_conditions) = hyper_jensen_conditions(x, y, &u, r, big_r)?;
    Ok(HyperWitnesses { u, v: None, r_conditions, big_r_conditions })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperTerm {
    pub label: String,
    pub left: Element,
    pub right: Element,
    pub value: Rational,
    /// `|left - right|`
    pub diff_norm: Rational,
    /// `phi(diff_norm) * value`
    pub weighted: Rational,
    pub min_norm_ok: bool,
    pub diff_norm_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperCertificate {
    /// `cauchy` or `jensen-quad`.
    pub equation: Equation,
    pub function: TestFunction,
    pub budget: HyperBudget,
    pub epsilon: Rational,
    #[serde(rename = "R")]
    pub big_r: Rational,
    pub x: Element,
    pub y: Element,
    pub u: Element,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub v: Option<Element>,
    pub terms: Vec<HyperTerm>,
    pub bound: Rational,
    pub defect: Rational,
    pub r_conditions_ok: bool,
    pub big_r_conditions_ok: bool,
    /// Every term on the `r` region has weighted defect below `K`.
    pub budget_respected: bool,
    /// `bound < epsilon`.
    pub below_epsilon: bool,
    pub sound: bool,
}

impl HyperCertificate {
    fn build(
        equation: Equation,
        f: &TestFunction,
        hb: &HyperBudget,
        eps: &Rational,
        big_r: Rational,
        (x, y): (&Element, &Element),
        (u, v): (&Element, Option<&Element>),
    ) -> Result<HyperCertificate> {
        let g = f.domain();
        for e in [x, y, u].into_iter().chain(v) {
            g.check(e)?;
        }
        let (chain, term_eq, (small, large)) = match (equation, v) {
            (Equation::Cauchy, Some(v)) => (
                cauchy_chain(x, y, u, v)?,
                Equation::Cauchy,
                hyper_cauchy_conditions(x, y, u, v, &hb.r, &big_r)?,
            ),
            (Equation::JensenQuad, None) => (
                jensen_chain(x, y, u)?,
                Equation::JensenPlain,
                hyper_jensen_conditions(x, y, u, &hb.r, &big_r)?,
            ),
            _ => return Err(Error::InvalidArgument(format!("no hyper certificate for {equation}"))),
        };
        let mut terms = Vec::with_capacity(chain.len());
        for (label, left, right) in chain {
            let value = defect(f, term_eq, &left, &right)?;
            let diff_norm = left.distance(&right)?;
            let weighted = weighted_defect(f, &hb.phi, &left, &right, term_eq)?;
            terms.push(HyperTerm {
                label: label.to_string(),
                min_norm_ok: left.norm().min(right.norm()) >= hb.r,
                diff_norm_ok: diff_norm >= big_r,
                left,
                right,
                value,
                diff_norm,
                weighted,
            });
        }
        let bound: Rational = terms.iter().map(|t| &t.value).sum();
        let defect = defect(f, equation, x, y)?;
        Ok(HyperCertificate {
            equation,
            function: f.clone(),
            budget: hb.clone(),
            epsilon: eps.clone(),
            big_r,
            x: x.clone(),
            y: y.clone(),
            u: u.clone(),
            v: v.cloned(),
            budget_respected: terms.iter().filter(|t| t.min_norm_ok).all(|t| t.weighted < hb.k),
            below_epsilon: bound < *eps,
            sound: bound >= defect,
            r_conditions_ok: all_hold(&small),
            big_r_conditions_ok: all_hold(&large),
            terms,
            bound,
            defect,
        })
    }

    pub(crate) fn recompute(&self) -> Result<HyperCertificate> {
        let n = self.terms.len() as i64;
        let big_r = big_r_for(&self.budget, n, &self.epsilon)?;
        HyperCertificate::build(
            self.equation,
            &self.function,
            &self.budget,
            &self.epsilon,
            big_r,
            (&self.x, &self.y),
            (&self.u, self.v.as_ref()),
        )
    }
}

fn big_r_for(hb: &HyperBudget, terms: i64, eps: &Rational) -> Result<Rational> {
    if !eps.is_positive() {
        return Err(Error::InvalidArgument(format!("target epsilon {eps} must be positive")));
    }
    hb.phi.threshold_inverse(&(hb.k.scale(terms) * eps.recip()))
}

/// Five-term chain with `R = phi.threshold_inverse(5K / eps)`.
pub fn certify_hyper_cauchy(
    f: &TestFunction,
    hb: &HyperBudget,
    x: &Element,
    y: &Element,
    eps: &Rational,
) -> Result<HyperCertificate> {
    let big_r = big_r_for(hb, 5, eps)?;
    let w = pick_hyper_cauchy_witnesses(&f.domain(), x, y, &hb.r, &big_r)?;
    HyperCertificate::build(Equation::Cauchy, f, hb, eps, big_r, (x, y), (&w.u, w.v.as_ref()))
}

/// Four-term chain with `R = phi.threshold_inverse(4K / eps)`.
pub fn certify_hyper_jensen(
    f: &TestFunction,
    hb: &HyperBudget,
    x: &Element,
    y: &Element,
    eps: &Rational,
) -> Result<HyperCertificate> {
    let big_r = big_r_for(hb, 4, eps)?;
    let w = pick_hyper_jensen_witness(&f.domain(), x, y, &hb.r, &big_r)?;
    HyperCertificate::build(Equation::JensenQuad, f, hb, eps, big_r, (x, y), (&w.u, None))
}

/// Shell profile of the weighted defect `phi(|x - y|) * defect(x, y)`.
pub fn weighted_profile(
    f: &TestFunction,
    phi: &WeightFunction,
    equation: Equation,
    window: &Window,
    r_grid: &[Rational],
) -> Result<ScanReport> {
    scan_report(f, equation, Some(phi.clone()), window, r_grid, |x, y| weighted_defect(f, phi, x, y, equation))
}
