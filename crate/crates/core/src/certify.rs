//! Witness selection and triangle-inequality certificate chains.
//!
//! For a pair `(x, y)` the Cauchy defect telescopes into five defects taken
//! at pairs built from two auxiliary points `u, v`:
//!
//! ```text
//! f(x+y) - f(x) - f(y) =  [f(x+y) - f(x+y-u-v) - f(u+v)]
//!                       + [f(x+y-u-v) - f(x-u) - f(y-v)]
//!                       + [f(u+v) - f(u) - f(v)]
//!                       - [f(x) - f(x-u) - f(u)]
//!                       - [f(y) - f(y-v) - f(v)]
//! ```
//!
//! so the sum of the five term norms bounds the defect in any metric abelian
//! codomain, whatever `u, v` are. Choosing `u, v` far out places every term
//! in the region where the asymptotic bound applies. The quadrupled Jensen
//! defect splits the same way into four plain Jensen defects around one
//! auxiliary point `u`.

use serde::{Deserialize, Serialize};

use crate::defect::{defect, sup_defect_scan, Equation};
use crate::error::{Error, Result};
use crate::functions::TestFunction;
use crate::groups::{Element, GroupDescriptor};
use crate::hyper::HyperCertificate;
use crate::rational::Rational;
use crate::window::Window;

/// Radius `r` beyond which the defect is at most `eta`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityBudget {
    pub r: Rational,
    pub eta: Rational,
}

impl StabilityBudget {
    pub fn new(r: Rational, eta: Rational) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::InvalidArgument(format!("budget radius {r} must be positive")));
        }
        if eta.is_negative() {
            return Err(Error::InvalidArgument(format!("budget bound {eta} must be nonnegative")));
        }
        Ok(StabilityBudget { r, eta })
    }
}

/// A named norm and whether it clears its threshold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub label: String,
    pub norm: Rational,
    pub holds: bool,
}

fn conditions(items: Vec<(&str, Element)>, threshold: &Rational) -> Vec<Condition> {
    items
        .into_iter()
        .map(|(label, e)| {
            let norm = e.norm();
            Condition { label: label.to_string(), holds: norm >= *threshold, norm }
        })
        .collect()
}

pub(crate) fn all_hold(c: &[Condition]) -> bool {
    c.iter().all(|c| c.holds)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainTerm {
    pub label: String,
    pub left: Element,
    pub right: Element,
    pub value: Rational,
    pub min_norm_ok: bool,
}

/// The five pairs of the Cauchy chain.
pub(crate) fn cauchy_chain(
    x: &Element,
    y: &Element,
    u: &Element,
    v: &Element,
) -> Result<Vec<(&'static str, Element, Element)>> {
    let xu = x.sub(u)?;
    let yv = y.sub(v)?;
    let uv = u.add(v)?;
    let rest = x.add(y)?.sub(&uv)?;
    Ok(vec![
        ("f(x) split at (x-u, u)", xu.clone(), u.clone()),
        ("f(y) split at (y-v, v)", yv.clone(), v.clone()),
        ("sum (x-u) + (y-v)", xu, yv),
        ("sum u + v", u.clone(), v.clone()),
        ("f(x+y) split at (x+y-u-v, u+v)", rest, uv),
    ])
}

/// The four pairs of the Jensen chain; each is a plain Jensen defect.
pub(crate) fn jensen_chain(x: &Element, y: &Element, u: &Element) -> Result<Vec<(&'static str, Element, Element)>> {
    let (xp, xm) = (x.add(u)?, x.sub(u)?);
    let (yp, ym) = (y.add(u)?, y.sub(u)?);
    Ok(vec![
        ("midpoint against (x+u, y-u)", xp.clone(), ym.clone()),
        ("midpoint against (x-u, y+u)", xm.clone(), yp.clone()),
        ("2f(x) split at (x+u, x-u)", xp, xm),
        ("2f(y) split at (y+u, y-u)", yp, ym),
    ])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CauchyWitnesses {
    pub u: Element,
    pub v: Element,
    pub conditions: Vec<Condition>,
    pub ok: bool,
}

fn cauchy_conditions(x: &Element, y: &Element, u: &Element, v: &Element, r: &Rational) -> Result<Vec<Condition>> {
    Ok(conditions(
        vec![
            ("u", u.clone()),
            ("v", v.clone()),
            ("u+v", u.add(v)?),
            ("x-u", x.sub(u)?),
            ("y-v", y.sub(v)?),
            ("x+y-u-v", x.add(y)?.sub(u)?.sub(v)?),
        ],
        r,
    ))
}

/// `u` with `|u| >= r + |x|`, then `v` with `|v| >= r + |x| + |y| + |u|`.
pub fn pick_cauchy_witnesses(g: &GroupDescriptor, x: &Element, y: &Element, r: &Rational) -> Result<CauchyWitnesses> {
    if !g.unbounded() {
        return Err(Error::Bounded);
    }
    g.check(x)?;
    g.check(y)?;
    let (nx, ny) = (x.norm(), y.norm());
    let u = g.unbounded_witness(&(r + &nx))?;
    let v = g.unbounded_witness(&(r + &nx + &ny + u.norm()))?;
    let conditions = cauchy_conditions(x, y, &u, &v, r)?;
    Ok(CauchyWitnesses { ok: all_hold(&conditions), u, v, conditions })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JensenWitness {
    pub u: Element,
    pub conditions: Vec<Condition>,
    pub ok: bool,
}

fn jensen_conditions(x: &Element, y: &Element, u: &Element, r: &Rational) -> Result<Vec<Condition>> {
    Ok(conditions(
        vec![("x+u", x.add(u)?), ("y+u", y.add(u)?), ("x-u", x.sub(u)?), ("y-u", y.sub(u)?)],
        r,
    ))
}

/// `u` with `|u| >= r + |x| + |y|`.
pub fn pick_jensen_witness(g: &GroupDescriptor, x: &Element, y: &Element, r: &Rational) -> Result<JensenWitness> {
    if !g.unbounded() {
        return Err(Error::Bounded);
    }
    if !g.uniquely_2_divisible() {
        return Err(Error::NotDivisible);
    }
    g.check(x)?;
    g.check(y)?;
    let u = g.unbounded_witness(&(r + &x.norm() + &y.norm()))?;
    let conditions = jensen_conditions(x, y, &u, r)?;
    Ok(JensenWitness { ok: all_hold(&conditions), u, conditions })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CauchyCertificate {
    pub function: TestFunction,
    pub budget: StabilityBudget,
    pub x: Element,
    pub y: Element,
    pub u: Element,
    pub v: Element,
    pub terms: Vec<ChainTerm>,
    pub bound: Rational,
    /// The Cauchy defect at `(x, y)`, evaluated directly.
    pub defect: Rational,
    pub side_conditions_ok: bool,
    /// Every term is at most `eta`.
    pub within_budget: bool,
    /// `5 * eta`.
    pub claim: Rational,
    pub claim_holds: bool,
    /// `bound >= defect`.
    pub sound: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JensenCertificate {
    pub function: TestFunction,
    pub budget: StabilityBudget,
    pub x: Element,
    pub y: Element,
    pub u: Element,
    pub terms: Vec<ChainTerm>,
    pub bound: Rational,
    /// The quadrupled Jensen defect at `(x, y)`, evaluated directly.
    pub defect: Rational,
    pub side_conditions_ok: bool,
    pub within_budget: bool,
    /// `4 * eta`.
    pub claim: Rational,
    pub claim_holds: bool,
    pub sound: bool,
}

fn evaluate_terms(
    f: &TestFunction,
    equation: Equation,
    chain: Vec<(&'static str, Element, Element)>,
    r: &Rational,
) -> Result<Vec<ChainTerm>> {
    chain
        .into_iter()
        .map(|(label, left, right)| {
            let value = defect(f, equation, &left, &right)?;
            let min_norm_ok = left.norm().min(right.norm()) >= *r;
            Ok(ChainTerm { label: label.to_string(), left, right, value, min_norm_ok })
        })
        .collect()
}

/// Builds the five-term certificate at `(x, y)` with explicit witnesses.
pub fn certify_cauchy_with(
    f: &TestFunction,
    budget: &StabilityBudget,
    x: &Element,
    y: &Element,
    u: &Element,
    v: &Element,
) -> Result<CauchyCertificate> {
    let g = f.domain();
    for e in [x, y, u, v] {
        g.check(e)?;
    }
    let terms = evaluate_terms(f, Equation::Cauchy, cauchy_chain(x, y, u, v)?, &budget.r)?;
    let bound: Rational = terms.iter().map(|t| &t.value).sum();
    let defect = defect(f, Equation::Cauchy, x, y)?;
    let side_conditions_ok = all_hold(&cauchy_conditions(x, y, u, v, &budget.r)?);
    let claim = budget.eta.scale(5);
    Ok(CauchyCertificate {
        function: f.clone(),
        budget: budget.clone(),
        x: x.clone(),
        y: y.clone(),
        u: u.clone(),
        v: v.clone(),
        within_budget: terms.iter().all(|t| t.value <= budget.eta),
        claim_holds: bound <= claim,
        sound: bound >= defect,
        terms,
        bound,
        defect,
        side_conditions_ok,
        claim,
    })
}

pub fn certify_cauchy(f: &TestFunction, budget: &StabilityBudget, x: &Element, y: &Element) -> Result<CauchyCertificate> {
    let w = pick_cauchy_witnesses(&f.domain(), x, y, &budget.r)?;
    certify_cauchy_with(f, budget, x, y, &w.u, &w.v)
}

/// Builds the four-term certificate at `(x, y)` with an explicit witness.
pub fn certify_jensen_with(
    f: &TestFunction,
    budget: &StabilityBudget,
    x: &Element,
    y: &Element,
    u: &Element,
) -> Result<JensenCertificate> {
    let g = f.domain();
    if !g.uniquely_2_divisible() {
        return Err(Error::NotDivisible);
    }
    for e in [x, y, u] {
        g.check(e)?;
    }
    let terms = evaluate_terms(f, Equation::JensenPlain, jensen_chain(x, y, u)?, &budget.r)?;
    let bound: Rational = terms.iter().map(|t| &t.value).sum();
    let defect = defect(f, Equation::JensenQuad, x, y)?;
    let side_conditions_ok = all_hold(&jensen_conditions(x, y, u, &budget.r)?);
    let claim = budget.eta.scale(4);
    Ok(JensenCertificate {
        function: f.clone(),
        budget: budget.clone(),
        x: x.clone(),
        y: y.clone(),
        u: u.clone(),
        within_budget: terms.iter().all(|t| t.value <= budget.eta),
        claim_holds: bound <= claim,
        sound: bound >= defect,
        terms,
        bound,
        defect,
        side_conditions_ok,
        claim,
    })
}

pub fn certify_jensen(f: &TestFunction, budget: &StabilityBudget, x: &Element, y: &Element) -> Result<JensenCertificate> {
    let w = pick_jensen_witness(&f.domain(), x, y, &budget.r)?;
    certify_jensen_with(f, budget, x, y, &w.u)
}

/// Any certificate, tagged by kind for serialization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    Cauchy(CauchyCertificate),
    Jensen(JensenCertificate),
    Hyper(HyperCertificate),
}

impl Certificate {
    pub fn sound(&self) -> bool {
        match self {
            Certificate::Cauchy(c) => c.sound,
            Certificate::Jensen(c) => c.sound,
            Certificate::Hyper(c) => c.sound,
        }
    }

    /// Recomputes every derived field from the embedded function, budget
    /// and points; `Ok(true)` iff the result matches exactly and is sound.
    pub fn verify(&self) -> Result<bool> {
        let fresh = match self {
            Certificate::Cauchy(c) => Certificate::Cauchy(certify_cauchy_with(&c.function, &c.budget, &c.x, &c.y, &c.u, &c.v)?),
            Certificate::Jensen(c) => Certificate::Jensen(certify_jensen_with(&c.function, &c.budget, &c.x, &c.y, &c.u)?),
            Certificate::Hyper(c) => Certificate::Hyper(c.recompute()?),
        };
        Ok(&fresh == self && fresh.sound())
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates always serialize")
    }

    pub fn from_json(text: &str) -> Result<Certificate> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// A scan-derived budget. Only a genuine budget when `f` follows its base
/// rule outside the window, which `overrides_in_window` checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmpiricalBudget {
    pub budget: StabilityBudget,
    pub overrides_in_window: bool,
}

/// Picks the smallest `r` on the grid whose shell supremum is minimal.
pub fn budget_from_scan(
    f: &TestFunction,
    equation: Equation,
    window: &Window,
    r_grid: &[Rational],
) -> Result<EmpiricalBudget> {
    if r_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let report = sup_defect_scan(f, equation.hypothesis(), window, r_grid)?;
    let best = report
        .shell_profile
        .iter()
        .filter_map(|e| e.sup.as_ref().map(|s| (s, &e.r)))
        .min_by(|a, b| a.0.cmp(b.0).then(a.1.cmp(b.1)))
        .ok_or_else(|| Error::InvalidArgument("no window pair reaches any shell".into()))?;
    let elements = window.elements(&f.domain())?;
    let overrides_in_window = f.overrides().keys().all(|k| elements.contains(k));
    Ok(EmpiricalBudget { budget: StabilityBudget::new(best.1.clone(), best.0.clone())?, overrides_in_window })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{make_additive, make_extremal_cauchy, make_extremal_jensen, CodomainValue};

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn norms(c: &[Condition]) -> Vec<Rational> {
        c.iter().map(|c| c.norm.clone()).collect()
    }

    #[test]
    fn cauchy_witness_examples() {
        let z = GroupDescriptor::int_lattice(1);
        let w = pick_cauchy_witnesses(&z, &Element::int([2]), &Element::int([3]), &q("10")).unwrap();
        assert_eq!((w.u.clone(), w.v.clone()), (Element::int([12]), Element::int([27])));
        assert_eq!(norms(&w.conditions), ["12", "27", "39", "10", "24", "34"].map(q).to_vec());
        assert!(w.ok);

        let w = pick_cauchy_witnesses(&z, &Element::int([0]), &Element::int([0]), &q("1")).unwrap();
        assert_eq!((w.u, w.v), (Element::int([1]), Element::int([2])));
        assert!(w.ok);

        let d = GroupDescriptor::dyadic_lattice(1);
        let w = pick_cauchy_witnesses(&d, &Element::dyadic(1, 1), &Element::dyadic(0, 0), &q("2")).unwrap();
        assert_eq!((w.u, w.v), (Element::dyadic(3, 0), Element::dyadic(6, 0)));
        assert!(w.ok);
    }

    #[test]
    fn jensen_witness_examples() {
        let d = GroupDescriptor::dyadic_lattice(1);
        let e = |n: i64| Element::dyadic(n, 0);
        let w = pick_jensen_witness(&d, &e(1), &e(-1), &q("4")).unwrap();
        assert_eq!(w.u, e(6));
        assert_eq!(norms(&w.conditions), ["7", "5", "5", "7"].map(q).to_vec());
        assert_eq!(pick_jensen_witness(&d, &e(0), &e(0), &q("1")).unwrap().u, e(1));
        let w = pick_jensen_witness(&d, &e(3), &e(5), &q("2")).unwrap();
        assert_eq!(w.u, e(10));
        assert_eq!(w.conditions.iter().map(|c| c.norm.clone()).min().unwrap(), q("5"));
        let z = GroupDescriptor::int_lattice(1);
        assert_eq!(pick_jensen_witness(&z, &Element::int([1]), &Element::int([1]), &q("1")), Err(Error::NotDivisible));
    }

    #[test]
    fn extremal_cauchy_attains_five() {
        let f = make_extremal_cauchy(&q("1"), &Element::int([1])).unwrap();
        let b = StabilityBudget::new(q("5"), q("1")).unwrap();
        let c = certify_cauchy(&f, &b, &Element::int([1]), &Element::int([1])).unwrap();
        assert_eq!(c.terms.iter().map(|t| t.value.clone()).collect::<Vec<_>>(), vec![q("1"); 5]);
        assert_eq!(c.bound, q("5"));
        assert_eq!(c.defect, q("5"));
        assert!(c.sound && c.side_conditions_ok && c.within_budget && c.claim_holds);
    }

    #[test]
    fn additive_certificates_vanish() {
        let z = GroupDescriptor::int_lattice(1);
        let f = make_additive(&q("3"), z).unwrap();
        let b = StabilityBudget::new(q("2"), q("0")).unwrap();
        let c = certify_cauchy(&f, &b, &Element::int([-4]), &Element::int([9])).unwrap();
        assert!(c.bound.is_zero() && c.terms.iter().all(|t| t.value.is_zero()));
        let d = GroupDescriptor::dyadic_lattice(1);
        let f = make_additive(&q("1"), d).unwrap();
        let c = certify_jensen(&f, &b, &Element::dyadic(3, 1), &Element::dyadic(-5, 0)).unwrap();
        assert!(c.bound.is_zero() && c.sound);
        let z0 = TestFunction::zero(d);
        assert!(certify_jensen(&z0, &b, &Element::dyadic(1, 0), &Element::dyadic(2, 0)).unwrap().bound.is_zero());
    }

    #[test]
    fn perturbed_zero_is_still_sound() {
        let z = GroupDescriptor::int_lattice(1);
        let f = TestFunction::zero(z).perturb([(Element::int([0]), CodomainValue::scalar(1))]).unwrap();
        let b = StabilityBudget::new(q("1"), q("0")).unwrap();
        for n in [1, 3, -7] {
            let c = certify_cauchy(&f, &b, &Element::int([n]), &Element::int([-n])).unwrap();
            assert_eq!(c.defect, q("1"));
            assert!(c.bound >= q("1") && c.sound);
            assert!(c.terms[4].value >= q("1"));
            assert!(!c.within_budget);
        }
    }

    #[test]
    fn extremal_jensen_attains_four() {
        let f = make_extremal_jensen(&q("1"), &Element::dyadic(1, 0)).unwrap();
        let b = StabilityBudget::new(q("5"), q("1")).unwrap();
        let c = certify_jensen(&f, &b, &Element::dyadic(1, 0), &Element::dyadic(-1, 0)).unwrap();
        assert_eq!(c.bound, q("4"));
        assert_eq!(c.defect, q("4"));
        assert!(c.sound && c.claim_holds && c.side_conditions_ok);
    }

    #[test]
    fn verify_and_tamper() {
        let f = make_extremal_cauchy(&q("1"), &Element::int([1])).unwrap();
        let b = StabilityBudget::new(q("5"), q("1")).unwrap();
        let cert = Certificate::Cauchy(certify_cauchy(&f, &b, &Element::int([1]), &Element::int([1])).unwrap());
        let text = cert.to_json_pretty();
        let back = Certificate::from_json(&text).unwrap();
        assert!(back.verify().unwrap());
        let tampered = text.replacen("\"bound\": \"5\"", "\"bound\": \"4\"", 1);
        assert_ne!(tampered, text);
        assert!(!Certificate::from_json(&tampered).unwrap().verify().unwrap());
    }

    #[test]
    fn budget_from_scan_examples() {
        let f = make_extremal_cauchy(&q("1"), &Element::int([1])).unwrap();
        let w = Window::int_range(-16, 16);
        let eb = budget_from_scan(&f, Equation::Cauchy, &w, &["2", "4", "8"].map(q)).unwrap();
        assert_eq!(eb.budget, StabilityBudget::new(q("2"), q("1")).unwrap());
        assert!(eb.overrides_in_window);

        let z = TestFunction::zero(GroupDescriptor::int_lattice(1));
        let eb = budget_from_scan(&z, Equation::Cauchy, &w, &["3", "5"].map(q)).unwrap();
        assert_eq!(eb.budget, StabilityBudget::new(q("3"), q("0")).unwrap());

        let p = make_additive(&q("1"), GroupDescriptor::int_lattice(1))
            .unwrap()
            .perturb([(Element::int([0]), CodomainValue::scalar(1))])
            .unwrap();
        let eb = budget_from_scan(&p, Equation::Cauchy, &w, &["1", "2"].map(q)).unwrap();
        assert_eq!(eb.budget, StabilityBudget::new(q("1"), q("1")).unwrap());

        assert_eq!(budget_from_scan(&z, Equation::Cauchy, &w, &[]), Err(Error::EmptyGrid));
        let far = f.perturb([(Element::int([100]), CodomainValue::scalar(0))]).unwrap();
        assert!(!budget_from_scan(&far, Equation::Cauchy, &w, &[q("2")]).unwrap().overrides_in_window);
    }
}
