//! Defect functionals of the Cauchy and Jensen equations and exhaustive
//! window scans.
//!
//! A scan evaluates a defect on every ordered pair of a finite window and
//! tabulates, for each shell bound `r`, the supremum over pairs with
//! `min(|x|, |y|) >= r`. Restricted to a window this is a lower bound for
//! the true shell supremum; it is exact whenever every pair class that
//! occurs in the group is represented inside the window, which is the case
//! for functions that follow their base rule outside it.

mod search;

pub use search::{adversarial_sharpness_search, SearchConfig, SearchMethod, SearchResult};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::{CodomainValue, TestFunction};
use crate::groups::Element;
use crate::hyper::WeightFunction;
use crate::rational::Rational;
use crate::window::Window;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Equation {
    /// `|f(x+y) - f(x) - f(y)|`
    Cauchy,
    /// `|2 f((x+y)/2) - f(x) - f(y)|`
    #[serde(rename = "jensen")]
    JensenPlain,
    /// `|4 f((x+y)/2) - 2 f(x) - 2 f(y)|`
    JensenQuad,
}

impl Equation {
    /// The equation whose asymptotic defect bounds this one: the plain
    /// Jensen defect controls the quadrupled form.
    pub fn hypothesis(self) -> Equation {
        match self {
            Equation::Cauchy => Equation::Cauchy,
            Equation::JensenPlain | Equation::JensenQuad => Equation::JensenPlain,
        }
    }

    /// Multiple of the asymptotic bound that caps the global defect.
    pub fn ceiling_factor(self) -> i64 {
        match self {
            Equation::Cauchy => 5,
            Equation::JensenQuad => 4,
            Equation::JensenPlain => 2,
        }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Equation::Cauchy => "cauchy",
            Equation::JensenPlain => "jensen",
            Equation::JensenQuad => "jensen-quad",
        })
    }
}

impl FromStr for Equation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "cauchy" => Ok(Equation::Cauchy),
            "jensen" | "jensen-plain" => Ok(Equation::JensenPlain),
            "jensen-quad" => Ok(Equation::JensenQuad),
            other => Err(Error::Parse(format!("unknown equation `{other}`"))),
        }
    }
}

pub fn cauchy_defect(f: &TestFunction, x: &Element, y: &Element) -> Result<Rational> {
    let s = f.eval(&x.add(y)?)?;
    Ok(s.sub(&f.eval(x)?)?.sub(&f.eval(y)?)?.norm())
}

fn midpoint_value(f: &TestFunction, x: &Element, y: &Element) -> Result<CodomainValue> {
    if !f.domain().uniquely_2_divisible() {
        return Err(Error::NotDivisible);
    }
    f.domain().check(x)?;
    f.domain().check(y)?;
    f.eval(&x.add(y)?.halve()?)
}

pub fn jensen_defect(f: &TestFunction, x: &Element, y: &Element) -> Result<Rational> {
    let m = midpoint_value(f, x, y)?;
    Ok(m.times(2).sub(&f.eval(x)?)?.sub(&f.eval(y)?)?.norm())
}

pub fn jensen_quad_defect(f: &TestFunction, x: &Element, y: &Element) -> Result<Rational> {
    let m = midpoint_value(f, x, y)?;
    Ok(m.times(4).sub(&f.eval(x)?.times(2))?.sub(&f.eval(y)?.times(2))?.norm())
}

pub fn defect(f: &TestFunction, equation: Equation, x: &Element, y: &Element) -> Result<Rational> {
    match equation {
        Equation::Cauchy => cauchy_defect(f, x, y),
        Equation::JensenPlain => jensen_defect(f, x, y),
        Equation::JensenQuad => jensen_quad_defect(f, x, y),
    }
}

/// `phi(|x - y|) * defect(x, y)`.
pub fn weighted_defect(
    f: &TestFunction,
    phi: &WeightFunction,
    x: &Element,
    y: &Element,
    equation: Equation,
) -> Result<Rational> {
    let d = defect(f, equation, x, y)?;
    if d.is_zero() {
        return Ok(d);
    }
    Ok(phi.eval(&x.distance(y)?) * d)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSample {
    pub x: Element,
    pub y: Element,
    pub defect: Rational,
    pub min_norm: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShellEntry {
    pub r: Rational,
    /// `None` when no window pair reaches the shell.
    pub sup: Option<Rational>,
    pub pairs: usize,
    pub argmax: Option<(Element, Element)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub equation: Equation,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub weight: Option<WeightFunction>,
    pub window: String,
    pub pairs: usize,
    pub max_defect: Rational,
    pub argmax: (Element, Element),
    pub shell_profile: Vec<ShellEntry>,
}

impl ScanReport {
    /// Shell supremum at bound `r`, if `r` is on the grid and the shell is
    /// nonempty.
    pub fn shell_sup(&self, r: &Rational) -> Option<&Rational> {
        self.shell_profile.iter().find(|e| &e.r == r).and_then(|e| e.sup.as_ref())
    }
}

/// Best value seen so far with its pair; ties go to the lexicographically
/// smaller serialized pair.
#[derive(Clone, Debug)]
struct Best {
    value: Rational,
    key: (usize, usize),
}

struct Candidate<'a> {
    labels: &'a [String],
}

impl Candidate<'_> {
    fn better(&self, value: &Rational, key: (usize, usize), current: &Option<Best>) -> bool {
        match current {
            None => true,
            Some(b) => {
                value > &b.value
                    || (value == &b.value
                        && (&self.labels[key.0], &self.labels[key.1]) < (&self.labels[b.key.0], &self.labels[b.key.1]))
            }
        }
    }

    fn merge(&self, a: Option<Best>, b: Option<Best>) -> Option<Best> {
        match (a, b) {
            (None, x) | (x, None) => x,
            (Some(a), Some(b)) => {
                if self.better(&b.value, b.key, &Some(a.clone())) {
                    Some(b)
                } else {
                    Some(a)
                }
            }
        }
    }
}

#[derive(Clone)]
struct RowSummary {
    overall: Option<Best>,
    shells: Vec<(Option<Best>, usize)>,
}

/// Scans every ordered pair of `elements` with `value(x, y)`, returning the
/// overall maximum and the per-shell maxima for `shells` (sorted, deduped).
fn scan_pairs<F>(elements: &[Element], shells: &[Rational], value: F) -> Result<(Best, Vec<ShellEntry>, usize)>
where
    F: Fn(&Element, &Element) -> Result<Rational> + Sync,
{
    if elements.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let norms: Vec<Rational> = elements.iter().map(Element::norm).collect();
    let labels: Vec<String> = elements.iter().map(ToString::to_string).collect();
    let cand = Candidate { labels: &labels };
    let empty = RowSummary { overall: None, shells: vec![(None, 0); shells.len()] };

    let row = |i: usize| -> Result<RowSummary> {
        let mut acc = empty.clone();
        for j in 0..elements.len() {
            let v = value(&elements[i], &elements[j])?;
            let min_norm = if norms[i] < norms[j] { &norms[i] } else { &norms[j] };
            let key = (i, j);
            if cand.better(&v, key, &acc.overall) {
                acc.overall = Some(Best { value: v.clone(), key });
            }
            for (k, r) in shells.iter().enumerate() {
                if min_norm >= r {
                    let slot = &mut acc.shells[k];
                    slot.1 += 1;
                    if cand.better(&v, key, &slot.0) {
                        slot.0 = Some(Best { value: v.clone(), key });
                    }
                }
            }
        }
        Ok(acc)
    };
    let merge = |a: RowSummary, b: RowSummary| RowSummary {
        overall: cand.merge(a.overall, b.overall),
        shells: a
            .shells
            .into_iter()
            .zip(b.shells)
            .map(|((ba, na), (bb, nb))| (cand.merge(ba, bb), na + nb))
            .collect(),
    };

    #[cfg(feature = "parallel")]
    let rows: Vec<Result<RowSummary>> = {
        use rayon::prelude::*;
        (0..elements.len()).into_par_iter().map(row).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Result<RowSummary>> = (0..elements.len()).map(row).collect();

    let mut total = empty.clone();
    for r in rows {
        total = merge(total, r?);
    }
    let pair = |key: (usize, usize)| (elements[key.0].clone(), elements[key.1].clone());
    let profile = shells
        .iter()
        .zip(total.shells)
        .map(|(r, (best, n))| ShellEntry {
            r: r.clone(),
            sup: best.as_ref().map(|b| b.value.clone()),
            pairs: n,
            argmax: best.map(|b| pair(b.key)),
        })
        .collect();
    let n = elements.len() * elements.len();
    Ok((total.overall.expect("nonempty window"), profile, n))
}

fn sorted_shells(shells: &[Rational]) -> Vec<Rational> {
    let mut v = shells.to_vec();
    v.sort();
    v.dedup();
    v
}

pub(crate) fn scan_report<F>(
    f: &TestFunction,
    equation: Equation,
    weight: Option<WeightFunction>,
    window: &Window,
    shells: &[Rational],
    value: F,
) -> Result<ScanReport>
where
    F: Fn(&Element, &Element) -> Result<Rational> + Sync,
{
    let elements = window.elements(&f.domain())?;
    let shells = sorted_shells(shells);
    let (best, shell_profile, pairs) = scan_pairs(&elements, &shells, value)?;
    Ok(ScanReport {
        equation,
        weight,
        window: window.to_string(),
        pairs,
        max_defect: best.value,
        argmax: (elements[best.key.0].clone(), elements[best.key.1].clone()),
        shell_profile,
    })
}

/// Exact maximum of the defect over all ordered window pairs, with the
/// shell profile over `shells`.
pub fn sup_defect_scan(f: &TestFunction, equation: Equation, window: &Window, shells: &[Rational]) -> Result<ScanReport> {
    scan_report(f, equation, None, window, shells, |x, y| defect(f, equation, x, y))
}

/// All pair samples of a window, in enumeration order.
pub fn pair_samples(f: &TestFunction, equation: Equation, window: &Window) -> Result<Vec<PairSample>> {
    let elements = window.elements(&f.domain())?;
    let mut out = Vec::with_capacity(elements.len() * elements.len());
    for x in &elements {
        for y in &elements {
            let (nx, ny) = (x.norm(), y.norm());
            out.push(PairSample {
                x: x.clone(),
                y: y.clone(),
                defect: defect(f, equation, x, y)?,
                min_norm: nx.min(ny),
            });
        }
    }
    Ok(out)
}
