//! End-to-end acceptance run. Prints one line per criterion and exits
//! nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stabkit_core::groups::harmonic_sum;
use stabkit_core::*;

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

fn scalar(v: CodomainValue) -> Rational {
    match v {
        CodomainValue::Scalar(s) => s,
        CodomainValue::Group(_) => panic!("expected a scalar value"),
    }
}

/// Brute-force Cauchy defect straight from function values.
fn oracle_cauchy(f: &TestFunction, x: &Element, y: &Element) -> Rational {
    let s = x.add(y).unwrap();
    (scalar(f.eval(&s).unwrap()) - scalar(f.eval(x).unwrap()) - scalar(f.eval(y).unwrap())).abs()
}

/// Brute-force plain Jensen defect on a dyadic line.
fn oracle_jensen(f: &TestFunction, x: &Element, y: &Element) -> Rational {
    let m = x.add(y).unwrap().halve().unwrap();
    (scalar(f.eval(&m).unwrap()).scale(2) - scalar(f.eval(x).unwrap()) - scalar(f.eval(y).unwrap())).abs()
}

/// Oracle shell sups: `(max over all pairs, sup over pairs with min norm >= r)`.
fn oracle_profile(
    pts: &[Element],
    shells: &[Rational],
    d: impl Fn(&Element, &Element) -> Rational,
) -> (Rational, Vec<Option<Rational>>) {
    let mut max = Rational::zero();
    let mut sups: Vec<Option<Rational>> = vec![None; shells.len()];
    for x in pts {
        for y in pts {
            let v = d(x, y);
            let m = x.norm().min(y.norm());
            for (r, s) in shells.iter().zip(sups.iter_mut()) {
                if m >= *r && s.as_ref().is_none_or(|s| v > *s) {
                    *s = Some(v.clone());
                }
            }
            max = max.max(v);
        }
    }
    (max, sups)
}

fn sharpness_five() {
    let f = make_extremal_cauchy(&q("1"), &Element::int([1])).unwrap();
    let w = Window::int_range(-32, 32);
    let shells = ["2", "4", "8", "16"].map(q);
    let rep = sup_defect_scan(&f, Equation::Cauchy, &w, &shells).unwrap();
    assert_eq!(rep.max_defect, q("5"));
    assert_eq!(rep.argmax, (Element::int([1]), Element::int([1])));
    for r in &shells {
        assert_eq!(rep.shell_sup(r), Some(&q("1")), "shell r = {r}");
    }
    let pts = w.elements(&f.domain()).unwrap();
    let (max, sups) = oracle_profile(&pts, &shells, |x, y| oracle_cauchy(&f, x, y));
    assert_eq!(max, rep.max_defect);
    assert!(sups.iter().all(|s| s == &Some(q("1"))));
}

fn sharpness_four() {
    let f = make_extremal_jensen(&q("1"), &Element::dyadic(1, 0)).unwrap();
    let w = Window::dyadic_range(-16, 16, 1);
    let rep = sup_defect_scan(&f, Equation::JensenQuad, &w, &[]).unwrap();
    assert_eq!(rep.max_defect, q("4"));
    // (1, -1) and (-1, 1) tie; the lexicographic tie-break keeps (-1, 1).
    let (one, minus) = (Element::dyadic(1, 0), Element::dyadic(-1, 0));
    assert_eq!(rep.argmax, (minus.clone(), one.clone()));
    assert_eq!(jensen_quad_defect(&f, &one, &minus).unwrap(), q("4"));

    let shells = ["5/2", "4", "8"].map(q);
    let plain = sup_defect_scan(&f, Equation::JensenPlain, &w, &shells).unwrap();
    for r in &shells {
        assert_eq!(plain.shell_sup(r), Some(&q("1")), "shell r = {r}");
    }
    let (zero, one) = (q("0"), q("1"));
    for s in stabkit_core::defect::pair_samples(&f, Equation::JensenPlain, &w).unwrap() {
        if s.min_norm > q("2") {
            assert!(s.defect == zero || s.defect == one, "{} at ({}, {})", s.defect, s.x, s.y);
        }
    }
    let pts = w.elements(&f.domain()).unwrap();
    let (max, sups) = oracle_profile(&pts, &shells, |x, y| oracle_jensen(&f, x, y));
    assert_eq!(max.scale(2), rep.max_defect);
    assert!(sups.iter().all(|s| s == &Some(one.clone())));
}

fn random_function(rng: &mut ChaCha8Rng, g: GroupDescriptor) -> TestFunction {
    let grid = |rng: &mut ChaCha8Rng| Rational::new(rng.gen_range(-12..=12), 4);
    let base = match (rng.gen_range(0..3), g.kind()) {
        (0, _) => Base::Zero,
        (1, GroupKind::IntLattice(1) | GroupKind::DyadicLattice(1)) => Base::LinearScalar { slope: grid(rng) },
        _ => Base::Constant { value: CodomainValue::Scalar(grid(rng)) },
    };
    let overrides: Vec<_> = (0..rng.gen_range(0..6))
        .map(|_| (g.random_element(rng, 3), CodomainValue::Scalar(grid(rng))))
        .collect();
    TestFunction::new(g, base).unwrap().perturb(overrides).unwrap()
}

fn certificate_fuzz() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cauchy_groups = [
        GroupDescriptor::int_lattice(1),
        GroupDescriptor::int_lattice(2),
        GroupDescriptor::dyadic_lattice(1),
        GroupDescriptor::binary_seq(),
    ];
    let jensen_groups = [GroupDescriptor::dyadic_lattice(1), GroupDescriptor::dyadic_lattice(2)];
    for i in 0..1000 {
        let g = cauchy_groups[i % cauchy_groups.len()];
        let f = random_function(&mut rng, g);
        let radius = if g.kind() == GroupKind::BinarySeq { 3 } else { 6 };
        let (x, y) = (g.random_element(&mut rng, radius), g.random_element(&mut rng, radius));
        let r = Rational::new(rng.gen_range(1..=4), 2);
        let budget = StabilityBudget::new(r, q("0")).unwrap();
        let c = certify_cauchy(&f, &budget, &x, &y).unwrap();
        assert!(c.bound >= oracle_cauchy(&f, &x, &y), "cauchy #{i}: {} at ({x}, {y})", c.bound);
        assert!(c.side_conditions_ok && c.terms.iter().all(|t| t.min_norm_ok), "cauchy #{i} witnesses");

        let g = jensen_groups[i % jensen_groups.len()];
        let f = random_function(&mut rng, g);
        let (x, y) = (g.random_element(&mut rng, 6), g.random_element(&mut rng, 6));
        let r = Rational::new(rng.gen_range(1..=8), 2);
        let budget = StabilityBudget::new(r, q("0")).unwrap();
        let c = certify_jensen(&f, &budget, &x, &y).unwrap();
        assert!(c.bound >= jensen_quad_defect(&f, &x, &y).unwrap(), "jensen #{i}");
        assert!(c.side_conditions_ok && c.terms.iter().all(|t| t.min_norm_ok), "jensen #{i} witnesses");
    }
}

fn bound_mechanism() {
    let f = make_extremal_cauchy(&q("1"), &Element::int([1])).unwrap();
    let budget = StabilityBudget::new(q("5"), q("1")).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let (x, y) = (Element::int([rng.gen_range(-50..=50)]), Element::int([rng.gen_range(-50..=50)]));
        let c = certify_cauchy(&f, &budget, &x, &y).unwrap();
        assert!(c.bound <= q("5") && c.sound && c.within_budget, "({x}, {y})");
    }
    let c = certify_cauchy(&f, &budget, &Element::int([1]), &Element::int([1])).unwrap();
    assert_eq!(c.bound, q("5"));
    assert_eq!(c.defect, q("5"));
}

fn corollaries() {
    let zero = Rational::zero();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for slope in ["0", "1", "3/2", "-2"].map(q) {
        for g in [GroupDescriptor::int_lattice(1), GroupDescriptor::dyadic_lattice(1)] {
            let f = make_additive(&slope, g).unwrap();
            let w = if g.uniquely_2_divisible() { Window::dyadic_range(-6, 6, 1) } else { Window::int_range(-12, 12) };
            let shells = ["1", "2", "4"].map(q);
            let eqs: &[Equation] = if g.uniquely_2_divisible() {
                &[Equation::Cauchy, Equation::JensenPlain, Equation::JensenQuad]
            } else {
                &[Equation::Cauchy]
            };
            for &eq in eqs {
                let rep = sup_defect_scan(&f, eq, &w, &shells).unwrap();
                assert_eq!(rep.max_defect, zero);
                assert!(rep.shell_profile.iter().all(|e| e.sup.as_ref() == Some(&zero)));
            }
            let budget = StabilityBudget::new(q("1"), q("0")).unwrap();
            for _ in 0..25 {
                let (x, y) = (g.random_element(&mut rng, 20), g.random_element(&mut rng, 20));
                assert_eq!(oracle_cauchy(&f, &x, &y), zero);
                assert_eq!(certify_cauchy(&f, &budget, &x, &y).unwrap().bound, zero);
                if g.uniquely_2_divisible() {
                    assert_eq!(oracle_jensen(&f, &x, &y), zero);
                    assert_eq!(certify_jensen(&f, &budget, &x, &y).unwrap().bound, zero);
                }
            }
        }
    }
}

fn hyper_counterexample() {
    let b = GroupDescriptor::binary_seq();
    let f = make_hyper_counterexample(&Element::bits([1])).unwrap();
    let rep = weighted_profile(&f, &WeightFunction::Linear, Equation::Cauchy, &Window::subsets(8), &["1/2", "1", "3/2", "2"].map(q))
        .unwrap();
    assert!(rep.shell_profile.iter().all(|e| e.sup.as_ref().is_some_and(Rational::is_zero)));
    assert_eq!(cauchy_defect(&f, &Element::bits([3]), &Element::bits([3])).unwrap(), q("1"));
    assert_eq!(
        pick_hyper_cauchy_witnesses(&b, &Element::bits([3]), &Element::bits([3]), &q("1"), &q("1")),
        Err(Error::DoublingBounded)
    );
}

fn hyper_dual_conditions() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let groups = [GroupDescriptor::int_lattice(1), GroupDescriptor::int_lattice(3), GroupDescriptor::dyadic_lattice(1), GroupDescriptor::dyadic_lattice(2)];
    for i in 0..200 {
        let g = groups[i % groups.len()];
        let (x, y) = (g.random_element(&mut rng, 20), g.random_element(&mut rng, 20));
        let r = Rational::new(rng.gen_range(1..=20), rng.gen_range(1..=4));
        let big_r = Rational::new(rng.gen_range(1..=40), rng.gen_range(1..=4));
        let w = pick_hyper_cauchy_witnesses(&g, &x, &y, &r, &big_r).unwrap();
        assert!(w.r_conditions.iter().all(|c| c.holds) && w.big_r_conditions.iter().all(|c| c.holds), "cauchy #{i}");
        // Independent check of the R-set for the chosen witnesses.
        let (u, v) = (&w.u, w.v.as_ref().unwrap());
        for e in [
            x.sub(&u.double()).unwrap(),
            y.sub(&v.double()).unwrap(),
            x.sub(&y).unwrap().sub(u).unwrap().add(v).unwrap(),
            u.sub(v).unwrap(),
            x.add(&y).unwrap().sub(&u.add(v).unwrap().times(2)).unwrap(),
        ] {
            assert!(e.norm() >= big_r);
        }
        if g.uniquely_2_divisible() {
            let w = pick_hyper_jensen_witness(&g, &x, &y, &r, &big_r).unwrap();
            assert!(w.ok(), "jensen #{i}");
        }
    }
    let hb = HyperBudget::new(q("1"), q("1"), WeightFunction::Linear).unwrap();
    for g in [GroupDescriptor::int_lattice(1), GroupDescriptor::dyadic_lattice(1)] {
        let f = make_additive(&q("3/2"), g).unwrap();
        for eps in ["1", "1/2", "1/4", "1/8"].map(q) {
            let (x, y) = (g.random_element(&mut rng, 10), g.random_element(&mut rng, 10));
            let c = certify_hyper_cauchy(&f, &hb, &x, &y, &eps).unwrap();
            assert!(c.bound.is_zero() && c.below_epsilon && c.budget_respected);
        }
    }
}

fn group_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for g in [GroupDescriptor::int_lattice(2), GroupDescriptor::dyadic_lattice(2), GroupDescriptor::binary_seq()] {
        for _ in 0..300 {
            let [x, y, z] = [0; 3].map(|_| g.random_element(&mut rng, 9));
            let d = |a: &Element, b: &Element| a.distance(b).unwrap();
            assert!(!d(&x, &y).is_negative());
            assert_eq!(d(&x, &y).is_zero(), x == y);
            assert_eq!(d(&x, &y), d(&y, &x));
            assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z));
            assert_eq!(d(&x.add(&z).unwrap(), &y.add(&z).unwrap()), d(&x, &y));
            assert_eq!(x.negate().norm(), x.norm());
            assert!(x.add(&y).unwrap().norm() <= x.norm() + y.norm());
            assert!(x.double().norm() <= x.norm().scale(2));
            if g.kind() == GroupKind::BinarySeq {
                assert!(x.double().is_zero());
            }
        }
    }
    let w = GroupDescriptor::binary_seq().unbounded_witness(&q("3")).unwrap();
    assert_eq!(w, Element::bits(1..=11));
    let h = |n: u32| (1..=n).map(|i| Rational::new(1, i)).sum::<Rational>();
    assert!(h(11) >= q("3") && h(10) < q("3"));
    assert_eq!(harmonic_sum(1..=11), h(11));
}

fn adversarial_ceiling() {
    let cfg = SearchConfig { step: Some(q("1/2")), ..SearchConfig::default() };
    let w = Window::int_range(-4, 4);
    let cauchy = adversarial_sharpness_search(&GroupDescriptor::int_lattice(1), Equation::Cauchy, &q("1"), &w, &q("2"), &cfg).unwrap();
    assert_eq!(cauchy.method, SearchMethod::Exhaustive);
    assert!(cauchy.within_ceiling && cauchy.best_sup <= q("5") && cauchy.best_sup >= q("5"), "cauchy {}", cauchy.best_sup);
    let jensen =
        adversarial_sharpness_search(&GroupDescriptor::dyadic_lattice(1), Equation::JensenQuad, &q("1"), &w, &q("2"), &cfg)
            .unwrap();
    assert_eq!(jensen.method, SearchMethod::Exhaustive);
    assert!(jensen.within_ceiling && jensen.best_sup <= q("4") && jensen.best_sup >= q("4"), "jensen {}", jensen.best_sup);

    // The extremal functions are feasible: their shell sups stay at eps.
    let ext = make_extremal_cauchy(&q("1"), &Element::int([1])).unwrap();
    assert_eq!(sup_defect_scan(&ext, Equation::Cauchy, &Window::int_range(-16, 16), &[q("2")]).unwrap().shell_sup(&q("2")), Some(&q("1")));
    let ext = make_extremal_jensen(&q("1"), &Element::dyadic(1, 0)).unwrap();
    let rep = sup_defect_scan(&ext, Equation::JensenPlain, &Window::dyadic_range(-16, 16, 0), &[q("2")]).unwrap();
    assert_eq!(rep.shell_sup(&q("2")), Some(&q("1")));
}

/// Name, check, and optional time limit.
type Criterion = (&'static str, fn(), Option<Duration>);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("sharpness 5 eps on [-32, 32]", sharpness_five, Some(Duration::from_secs(2))),
        ("sharpness 4 eps on the half-integer window", sharpness_four, Some(Duration::from_secs(2))),
        ("certificate soundness fuzz", certificate_fuzz, Some(Duration::from_secs(30))),
        ("stability bound mechanism", bound_mechanism, None),
        ("additive controls vanish", corollaries, None),
        ("hyperstability counterexample on binary sequences", hyper_counterexample, None),
        ("hyper witness dual conditions", hyper_dual_conditions, None),
        ("group laws", group_laws, None),
        ("adversarial sharpness ceiling", adversarial_ceiling, Some(Duration::from_secs(300))),
    ];
    std::panic::set_hook(Box::new(|info| eprintln!("    {info}")));
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run));
        let elapsed = start.elapsed();
        let on_time = limit.is_none_or(|l| elapsed < l);
        let pass = outcome.is_ok() && on_time;
        if !pass {
            failed += 1;
        }
        let note = if outcome.is_ok() && !on_time { " (too slow)" } else { "" };
        println!(
            "criterion {}: {} - {name} [{:.2}s]{note}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
