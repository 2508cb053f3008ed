//! Adversarial search for functions whose global defect is as large as
//! possible while their defect on the far shell stays within `eps`.
//!
//! Candidates are a constant base value `c` plus overrides on the window,
//! all values taken from the grid `{k * step : |k * step| <= max_abs}`.
//! Every defect of such a function is an integer multiple of `step`, so the
//! search itself runs on integer grid indices, and the winner is re-checked
//! with an exact rational scan.
//!
//! A candidate only differs from `c` on the window `W`, so the defect at a
//! pair depends only on which window points (or "outside") the pair and its
//! sum or midpoint hit. Enumerating pairs of the grid `[-L, L]` with
//! `L = 3 * radius(W) + ceil(r) + 1` realizes every such pattern that occurs
//! anywhere in the group, so both the shell constraint and the objective
//! are evaluated over the whole group, not just the window.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{defect, sup_defect_scan, Equation};
use crate::error::{Error, Result};
use crate::functions::{Base, CodomainValue, TestFunction};
use crate::groups::{Element, GroupDescriptor};
use crate::rational::Rational;
use crate::window::Window;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Grid step; defaults to `eps / 2`.
    pub step: Option<Rational>,
    /// Largest absolute grid value; defaults to `3 * eps`.
    pub max_abs: Option<Rational>,
    /// Windows with at most this many points are searched exhaustively.
    pub max_exhaustive_points: usize,
    /// Node budget for the exhaustive search before falling back to
    /// hill climbing.
    pub node_limit: u64,
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            step: None,
            max_abs: None,
            max_exhaustive_points: 13,
            node_limit: 50_000_000,
            restarts: 8,
            iterations: 20_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMethod {
    Exhaustive,
    HillClimb,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub equation: Equation,
    pub eps: Rational,
    pub shell_bound: Rational,
    pub window: String,
    /// The enumerated region standing in for the whole group.
    pub region: String,
    pub method: SearchMethod,
    pub nodes: u64,
    pub best_function: TestFunction,
    pub best_sup: Rational,
    pub argmax: (Element, Element),
    /// Largest hypothesis defect of the winner on the `r` shell.
    pub shell_sup: Rational,
    pub ceiling: Rational,
    pub within_ceiling: bool,
}

/// Triple of variable ids: (first, second, third) where third is the sum
/// (Cauchy) or midpoint (Jensen). Id 0 is the base value.
type Triple = [usize; 3];

#[derive(Clone, Copy)]
struct Coeffs {
    first: i64,
    second: i64,
    third: i64,
}

impl Coeffs {
    fn of(equation: Equation) -> Coeffs {
        match equation {
            Equation::Cauchy => Coeffs { first: -1, second: -1, third: 1 },
            Equation::JensenPlain => Coeffs { first: -1, second: -1, third: 2 },
            Equation::JensenQuad => Coeffs { first: -2, second: -2, third: 4 },
        }
    }

    fn eval(&self, t: &Triple, v: &[i64]) -> i64 {
        (self.first * v[t[0]] + self.second * v[t[1]] + self.third * v[t[2]]).abs()
    }

    /// Upper bound of `eval` when unassigned ids range over their domains.
    fn upper(&self, t: &Triple, v: &[i64], assigned: &[bool], lo: &[i64], hi: &[i64]) -> i64 {
        let mut terms: Vec<(usize, i64)> = Vec::with_capacity(3);
        for (id, c) in [(t[0], self.first), (t[1], self.second), (t[2], self.third)] {
            match terms.iter_mut().find(|(i, _)| *i == id) {
                Some(e) => e.1 += c,
                None => terms.push((id, c)),
            }
        }
        let (mut min, mut max) = (0i64, 0i64);
        for (id, c) in terms {
            if assigned[id] {
                min += c * v[id];
                max += c * v[id];
            } else {
                let (a, b) = (c * lo[id], c * hi[id]);
                min += a.min(b);
                max += a.max(b);
            }
        }
        min.abs().max(max.abs())
    }
}

struct Problem {
    /// Variable count (window points + 1 for the base).
    vars: usize,
    constraint: Vec<Triple>,
    objective: Vec<Triple>,
    cons: Coeffs,
    obj: Coeffs,
    /// Constraint threshold in grid units.
    limit: i64,
    /// Grid values are `-k_max..=k_max`.
    k_max: i64,
}

impl Problem {
    fn feasible(&self, v: &[i64]) -> bool {
        self.constraint.iter().all(|t| self.cons.eval(t, v) <= self.limit)
    }

    fn objective(&self, v: &[i64]) -> i64 {
        self.objective.iter().map(|t| self.obj.eval(t, v)).max().unwrap_or(0)
    }
}

fn radius(window: &Window) -> Result<BigInt> {
    match window {
        Window::Grid { lo, hi, .. } => Ok(lo.abs().max(hi.abs()).ceil()),
        _ => Err(Error::UnsupportedDomain("adversarial search needs a lattice grid window".into())),
    }
}

/// Searches base-plus-override functions on a one-dimensional lattice for
/// the largest global defect subject to `defect <= eps` on every pair with
/// `min(|x|, |y|) >= r`.
pub fn adversarial_sharpness_search(
    g: &GroupDescriptor,
    equation: Equation,
    eps: &Rational,
    window: &Window,
    r: &Rational,
    config: &SearchConfig,
) -> Result<SearchResult> {
    if g.dim() != Some(1) {
        return Err(Error::UnsupportedDomain(format!("adversarial search runs on 1-dimensional lattices, not {g}")));
    }
    if equation != Equation::Cauchy && !g.uniquely_2_divisible() {
        return Err(Error::NotDivisible);
    }
    if eps.is_negative() {
        return Err(Error::InvalidArgument(format!("epsilon {eps} is negative")));
    }
    if !r.is_positive() {
        return Err(Error::InvalidArgument(format!("shell bound {r} must be positive")));
    }
    let w = radius(window)?;
    let Window::Grid { exponent, .. } = window else {
        unreachable!("radius() rejects other windows")
    };
    let points = window.elements(g)?;
    if Rational::from_integer(w.clone()) <= *r {
        return Err(Error::InvalidArgument(format!("shell bound {r} must lie below the window radius {w}")));
    }

    let step = config.step.clone().unwrap_or_else(|| eps * &Rational::new(1, 2));
    let max_abs = config.max_abs.clone().unwrap_or_else(|| eps.scale(3));
    if step.is_negative() || max_abs.is_negative() {
        return Err(Error::InvalidArgument("grid step and range must be nonnegative".into()));
    }
    let (unit, k_max, limit) = if step.is_zero() {
        (Rational::one(), 0, 0)
    } else {
        let k = (&max_abs * &step.recip()).floor().to_i64().unwrap_or(0);
        let l = (eps * &step.recip()).floor().to_i64().unwrap_or(i64::MAX / 8);
        (step.clone(), k, l)
    };
    if k_max > 1 << 20 {
        return Err(Error::InvalidArgument("value grid is too fine".into()));
    }

    let l: BigInt = BigInt::from(3) * &w + r.ceil() + 1;
    let region = Window::Grid {
        lo: Rational::from_integer(-&l),
        hi: Rational::from_integer(l.clone()),
        exponent: *exponent,
    };
    let region_points = region.elements(g)?;
    let var_of: HashMap<&Element, usize> = points.iter().enumerate().map(|(i, p)| (p, i + 1)).collect();
    let id = |e: &Element| var_of.get(e).copied().unwrap_or(0);

    let mut constraint = BTreeSet::new();
    let mut objective = BTreeSet::new();
    let norms: Vec<Rational> = region_points.iter().map(Element::norm).collect();
    for (i, x) in region_points.iter().enumerate() {
        for (j, y) in region_points.iter().enumerate() {
            let s = x.add(y)?;
            let third = match equation {
                Equation::Cauchy => id(&s),
                _ => id(&s.halve()?),
            };
            let t = [id(x), id(y), third];
            objective.insert(t);
            if norms[i] >= *r && norms[j] >= *r {
                constraint.insert(t);
            }
        }
    }
    let problem = Problem {
        vars: points.len() + 1,
        constraint: constraint.into_iter().collect(),
        objective: objective.into_iter().collect(),
        cons: Coeffs::of(equation.hypothesis()),
        obj: Coeffs::of(equation),
        limit,
        k_max,
    };

    // Base first, then window points from the outside in.
    let mut order: Vec<usize> = vec![0];
    let mut by_norm: Vec<usize> = (1..problem.vars).collect();
    by_norm.sort_by(|a, b| points[b - 1].norm().cmp(&points[a - 1].norm()).then(a.cmp(b)));
    order.extend(by_norm);

    let exhaustive = if points.len() <= config.max_exhaustive_points {
        exhaustive_search(&problem, &order, config.node_limit)
    } else {
        None
    };
    let (values, method, nodes) = match exhaustive {
        Some((v, nodes)) => (v, SearchMethod::Exhaustive, nodes),
        None => {
            let (v, nodes) = hill_climb(&problem, config);
            (v, SearchMethod::HillClimb, nodes)
        }
    };

    let to_value = |k: i64| CodomainValue::Scalar(unit.scale(k));
    let base = if values[0] == 0 { Base::Zero } else { Base::Constant { value: to_value(values[0]) } };
    let best_function =
        TestFunction::new(*g, base)?.perturb(points.iter().enumerate().map(|(i, p)| (p.clone(), to_value(values[i + 1]))))?;

    // Independent exact re-check over the same region.
    let report = sup_defect_scan(&best_function, equation, &region, &[])?;
    let expected = unit.scale(problem.objective(&values));
    if report.max_defect != expected {
        return Err(Error::InvalidArgument(format!(
            "search objective {expected} disagrees with exact scan {}",
            report.max_defect
        )));
    }
    let mut shell_sup = Rational::zero();
    for (i, x) in region_points.iter().enumerate() {
        for (j, y) in region_points.iter().enumerate() {
            if norms[i] >= *r && norms[j] >= *r {
                shell_sup = shell_sup.max(defect(&best_function, equation.hypothesis(), x, y)?);
            }
        }
    }
    if shell_sup > *eps {
        return Err(Error::InvalidArgument(format!("search returned an infeasible function (shell sup {shell_sup})")));
    }
    let ceiling = eps.scale(equation.ceiling_factor());
    Ok(SearchResult {
        equation,
        eps: eps.clone(),
        shell_bound: r.clone(),
        window: window.to_string(),
        region: region.to_string(),
        method,
        nodes,
        within_ceiling: report.max_defect <= ceiling,
        best_sup: report.max_defect,
        argmax: report.argmax,
        best_function,
        shell_sup,
        ceiling,
    })
}

/// Depth-first branch and bound. Returns `None` when the node budget runs
/// out.
fn exhaustive_search(p: &Problem, order: &[usize], node_limit: u64) -> Option<(Vec<i64>, u64)> {
    let n = p.vars;
    let mut position = vec![0usize; n];
    for (pos, &v) in order.iter().enumerate() {
        position[v] = pos;
    }
    let level = |t: &Triple| t.iter().map(|&v| position[v]).max().unwrap();
    let mut cons_at: Vec<Vec<Triple>> = vec![Vec::new(); n];
    let mut obj_at: Vec<Vec<Triple>> = vec![Vec::new(); n];
    for t in &p.constraint {
        cons_at[level(t)].push(*t);
    }
    for t in &p.objective {
        obj_at[level(t)].push(*t);
    }
    // Constraints touching only the base and one point narrow that point's
    // domain once the base is fixed.
    let mut unary: Vec<Vec<Triple>> = vec![Vec::new(); n];
    for t in &p.constraint {
        let ids: BTreeSet<usize> = t.iter().copied().filter(|&v| v != 0).collect();
        if ids.len() == 1 {
            unary[*ids.iter().next().unwrap()].push(*t);
        }
    }

    // Extremes first so strong candidates appear early.
    let mut grid: Vec<i64> = (-p.k_max..=p.k_max).collect();
    grid.sort_by_key(|k| (-k.abs(), *k));

    struct State<'a> {
        p: &'a Problem,
        order: &'a [usize],
        cons_at: Vec<Vec<Triple>>,
        obj_at: Vec<Vec<Triple>>,
        unary: Vec<Vec<Triple>>,
        domains: Vec<Vec<i64>>,
        lo: Vec<i64>,
        hi: Vec<i64>,
        values: Vec<i64>,
        assigned: Vec<bool>,
        best: i64,
        best_values: Vec<i64>,
        nodes: u64,
        node_limit: u64,
        pending: Vec<Vec<Triple>>,
    }

    impl State<'_> {
        fn dfs(&mut self, depth: usize, current: i64) -> bool {
            if depth == self.order.len() {
                if current > self.best {
                    self.best = current;
                    self.best_values = self.values.clone();
                }
                return true;
            }
            // Bound: nothing below can beat the incumbent.
            let mut bound = current;
            for t in &self.pending[depth] {
                bound = bound.max(self.p.obj.upper(t, &self.values, &self.assigned, &self.lo, &self.hi));
                if bound > self.best {
                    break;
                }
            }
            if bound <= self.best {
                return true;
            }
            let var = self.order[depth];
            let domain = self.domains[var].clone();
            for k in domain {
                self.nodes += 1;
                if self.nodes > self.node_limit {
                    return false;
                }
                self.values[var] = k;
                self.assigned[var] = true;
                let ok = self.cons_at[depth].iter().all(|t| self.p.cons.eval(t, &self.values) <= self.p.limit);
                if ok {
                    let here = self.obj_at[depth].iter().map(|t| self.p.obj.eval(t, &self.values)).fold(current, i64::max);
                    let keep_going = if depth == 0 { self.with_base(here) } else { self.dfs(depth + 1, here) };
                    if !keep_going {
                        return false;
                    }
                }
                self.assigned[var] = false;
            }
            true
        }

        /// Narrows point domains for the chosen base, then recurses.
        fn with_base(&mut self, current: i64) -> bool {
            let saved = (self.domains.clone(), self.lo.clone(), self.hi.clone());
            for var in 1..self.p.vars {
                let mut allowed = Vec::new();
                for &k in &saved.0[var] {
                    self.values[var] = k;
                    if self.unary[var].iter().all(|t| self.p.cons.eval(t, &self.values) <= self.p.limit) {
                        allowed.push(k);
                    }
                }
                self.values[var] = 0;
                if allowed.is_empty() {
                    (self.domains, self.lo, self.hi) = saved;
                    return true;
                }
                self.lo[var] = *allowed.iter().min().unwrap();
                self.hi[var] = *allowed.iter().max().unwrap();
                self.domains[var] = allowed;
            }
            let out = self.dfs(1, current);
            (self.domains, self.lo, self.hi) = saved;
            out
        }
    }

    // Objective triples not yet fully assigned before each depth.
    let pending: Vec<Vec<Triple>> = (0..=n)
        .map(|d| p.objective.iter().copied().filter(|t| level(t) >= d).collect())
        .collect();

    let mut state = State {
        p,
        order,
        cons_at,
        obj_at,
        unary,
        domains: vec![grid.clone(); n],
        lo: vec![-p.k_max; n],
        hi: vec![p.k_max; n],
        values: vec![0; n],
        assigned: vec![false; n],
        best: -1,
        best_values: vec![0; n],
        nodes: 0,
        node_limit,
        pending,
    };
    let complete = state.dfs(0, 0);
    if complete && state.best >= 0 {
        Some((state.best_values, state.nodes))
    } else {
        None
    }
}

/// Seeded random-restart hill climbing from the zero function, which is
/// always feasible.
fn hill_climb(p: &Problem, config: &SearchConfig) -> (Vec<i64>, u64) {
    let mut touching: Vec<Vec<usize>> = vec![Vec::new(); p.vars];
    for (i, t) in p.constraint.iter().enumerate() {
        let ids: BTreeSet<usize> = t.iter().copied().collect();
        for v in ids {
            touching[v].push(i);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut best = vec![0i64; p.vars];
    let mut best_obj = p.objective(&best);
    let mut steps = 0u64;
    for _ in 0..config.restarts.max(1) {
        let mut cur = vec![0i64; p.vars];
        let mut cur_obj = p.objective(&cur);
        for _ in 0..config.iterations {
            steps += 1;
            let var = rng.gen_range(0..p.vars);
            let old = cur[var];
            cur[var] = rng.gen_range(-p.k_max..=p.k_max);
            let ok = if var == 0 {
                p.feasible(&cur)
            } else {
                touching[var].iter().all(|&i| p.cons.eval(&p.constraint[i], &cur) <= p.limit)
            };
            let obj = if ok { p.objective(&cur) } else { -1 };
            if ok && obj >= cur_obj {
                cur_obj = obj;
                if obj > best_obj {
                    best_obj = obj;
                    best = cur.clone();
                }
            } else {
                cur[var] = old;
            }
        }
    }
    (best, steps)
}
