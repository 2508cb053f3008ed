use std::fs;
use std::io::Write;

use stabkit_core::defect::pair_samples;
use stabkit_core::*;

use crate::args::*;
use crate::render;
use crate::CliError;

type CmdResult = Result<bool, CliError>;

/// Runs one subcommand; `Ok(false)` means a reported invariant failed.
/// Output is buffered and written only once the command finishes.
pub fn run(cli: Cli, out: &mut dyn Write) -> CmdResult {
    let mut buf = Vec::new();
    let result = match cli.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(CliError::failed)?
            .install(|| dispatch(cli.command, &mut buf)),
        None => dispatch(cli.command, &mut buf),
    };
    out.write_all(&buf).map_err(CliError::failed)?;
    result
}

fn dispatch(command: Command, out: &mut dyn Write) -> CmdResult {
    match command {
        Command::Scan(a) => scan(a, out),
        Command::Certify(a) => certify(a, out),
        Command::Hyper(a) => hyper(a, out),
        Command::Sharpness(a) => sharpness(a, out),
        Command::Verify { file } => {
            let text = fs::read_to_string(&file).map_err(|e| CliError::usage(format!("{}: {e}", file.display())))?;
            verify(&text, out)
        }
        Command::Demo { name } => demo(name, out),
    }
}

fn parse<T: std::str::FromStr<Err = Error>>(what: &str, s: &str) -> Result<T, CliError> {
    s.parse().map_err(|e| CliError::usage(format!("--{what}: {e}")))
}

fn element(g: &GroupDescriptor, what: &str, s: &str) -> Result<Element, CliError> {
    g.parse_element(s).map_err(|e| CliError::usage(format!("--{what}: {e}")))
}

fn function(a: &FunctionArgs) -> Result<TestFunction, CliError> {
    let g: GroupDescriptor = parse("group", &a.group)?;
    let f = match a.function.strip_prefix('@') {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("{path}: {e}")))?;
            let f: TestFunction = serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{path}: {e}")))?;
            if f.domain() != g {
                return Err(CliError::usage(format!("{path} is defined on {}, not {g}", f.domain())));
            }
            f
        }
        None => TestFunction::parse_spec(g, &a.function).map_err(|e| CliError::usage(format!("--function: {e}")))?,
    };
    let extra = a
        .perturb
        .iter()
        .map(|p| {
            let (point, value) =
                p.split_once('=').ok_or_else(|| CliError::usage(format!("--perturb expects point=value, got `{p}`")))?;
            Ok((element(&g, "perturb", point)?, parse::<CodomainValue>("perturb", value)?))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    f.perturb(extra).map_err(|e| CliError::usage(format!("--perturb: {e}")))
}

fn scan(a: ScanArgs, out: &mut dyn Write) -> CmdResult {
    let f = function(&a.function)?;
    let equation: Equation = parse("equation", &a.equation)?;
    let window: Window = parse("window", &a.window)?;
    let shells = a.shells.iter().map(|s| parse("shells", s)).collect::<Result<Vec<Rational>, _>>()?;
    let report = match &a.weight {
        Some(w) => weighted_profile(&f, &parse("weight", w)?, equation, &window, &shells),
        None => sup_defect_scan(&f, equation, &window, &shells),
    }
    .map_err(CliError::failed)?;
    match a.format {
        Format::Csv => render::scan_csv(&report, out)?,
        Format::Json => render::json(&report, out)?,
    }
    Ok(true)
}

fn certify(a: CertifyArgs, out: &mut dyn Write) -> CmdResult {
    let f = function(&a.function)?;
    let g = f.domain();
    let budget = StabilityBudget::new(parse("r", &a.r)?, parse("eta", &a.eta)?).map_err(CliError::usage)?;
    let (x, y) = (element(&g, "x", &a.pair.x)?, element(&g, "y", &a.pair.y)?);
    let cert = match parse::<Equation>("equation", &a.equation)? {
        Equation::Cauchy => certify_cauchy(&f, &budget, &x, &y).map(Certificate::Cauchy),
        Equation::JensenPlain | Equation::JensenQuad => certify_jensen(&f, &budget, &x, &y).map(Certificate::Jensen),
    }
    .map_err(CliError::failed)?;
    emit_certificate(&cert, a.format, out)
}

fn hyper(a: HyperArgs, out: &mut dyn Write) -> CmdResult {
    let f = function(&a.function)?;
    let g = f.domain();
    let hb = HyperBudget::new(parse("r", &a.r)?, parse("k", &a.k)?, parse("phi", &a.phi)?).map_err(CliError::usage)?;
    let eps: Rational = parse("eps", &a.eps)?;
    let (x, y) = (element(&g, "x", &a.pair.x)?, element(&g, "y", &a.pair.y)?);
    let cert = match parse::<Equation>("equation", &a.equation)? {
        Equation::Cauchy => certify_hyper_cauchy(&f, &hb, &x, &y, &eps),
        Equation::JensenPlain | Equation::JensenQuad => certify_hyper_jensen(&f, &hb, &x, &y, &eps),
    }
    .map_err(CliError::failed)?;
    emit_certificate(&Certificate::Hyper(cert), a.format, out)
}

fn emit_certificate(cert: &Certificate, format: Format, out: &mut dyn Write) -> CmdResult {
    match format {
        Format::Csv => render::certificate_csv(cert, out)?,
        Format::Json => render::json(cert, out)?,
    }
    Ok(cert.sound())
}

fn sharpness(a: SharpnessArgs, out: &mut dyn Write) -> CmdResult {
    let g: GroupDescriptor = parse("group", &a.group)?;
    let mut config = SearchConfig { seed: a.seed, ..SearchConfig::default() };
    if let Some(s) = &a.step {
        config.step = Some(parse("step", s)?);
    }
    if let Some(m) = &a.max_abs {
        config.max_abs = Some(parse("max-abs", m)?);
    }
    if let Some(n) = a.max_exhaustive {
        config.max_exhaustive_points = n;
    }
    let result = adversarial_sharpness_search(
        &g,
        parse("equation", &a.equation)?,
        &parse("eps", &a.eps)?,
        &parse("window", &a.window)?,
        &parse("r", &a.r)?,
        &config,
    )
    .map_err(CliError::failed)?;
    match a.format {
        Format::Csv => render::search_csv(&result, out)?,
        Format::Json => render::json(&result, out)?,
    }
    Ok(result.within_ceiling)
}

fn verify(text: &str, out: &mut dyn Write) -> CmdResult {
    let cert = Certificate::from_json(text).map_err(CliError::failed)?;
    let ok = cert.verify().map_err(CliError::failed)?;
    let (bound, defect) = match &cert {
        Certificate::Cauchy(c) => (&c.bound, &c.defect),
        Certificate::Jensen(c) => (&c.bound, &c.defect),
        Certificate::Hyper(c) => (&c.bound, &c.defect),
    };
    let status = if ok { "verified" } else { "MISMATCH" };
    writeln!(out, "{status}: bound {bound} >= defect {defect} is {}", cert.sound()).map_err(CliError::failed)?;
    Ok(ok)
}

fn line(out: &mut dyn Write, text: impl std::fmt::Display) -> Result<(), CliError> {
    writeln!(out, "{text}").map_err(CliError::failed)
}

fn demo(name: DemoName, out: &mut dyn Write) -> CmdResult {
    let q = |s: &str| s.parse::<Rational>().expect("demo constant");
    match name {
        DemoName::BinseqCounterexample => {
            let g = GroupDescriptor::binary_seq();
            let a = Element::bits([1]);
            let f = make_hyper_counterexample(&a).map_err(CliError::failed)?;
            line(out, format!("group {g}: 2x = 0 for every x, so 2X = {{0}} is bounded"))?;
            line(out, format!("f(x) = x for x != 0, f(0) = {a}"))?;
            let shells = ["1/2", "1", "3/2", "2"].map(q);
            let rep = weighted_profile(&f, &WeightFunction::Linear, Equation::Cauchy, &Window::subsets(8), &shells)
                .map_err(CliError::failed)?;
            line(out, "weighted defect |x - y| * |f(x+y) - f(x) - f(y)| over supports in {1..8}:")?;
            let mut weighted_zero = true;
            for e in &rep.shell_profile {
                let sup = e.sup.clone().unwrap_or_else(Rational::zero);
                weighted_zero &= sup.is_zero();
                line(out, format!("  shell min norm >= {}: sup {} over {} pairs", e.r, sup, e.pairs))?;
            }
            let x = Element::bits([3]);
            let d = cauchy_defect(&f, &x, &x).map_err(CliError::failed)?;
            line(out, format!("plain defect at ({x}, {x}): {d}, so f is not additive"))?;
            let witnesses = pick_hyper_cauchy_witnesses(&g, &x, &x, &q("1"), &q("1"));
            match &witnesses {
                Err(e) => line(out, format!("hyper witnesses: {e}"))?,
                Ok(_) => line(out, "hyper witnesses: unexpectedly found")?,
            }
            Ok(weighted_zero && d == q("1") && witnesses == Err(Error::DoublingBounded))
        }
        DemoName::ExtremalCauchy => {
            let f = make_extremal_cauchy(&q("1"), &Element::int([1])).map_err(CliError::failed)?;
            line(out, "f = 1 everywhere except f(1) = 3 on int:1")?;
            let shells = ["2", "4", "8", "16"].map(q);
            let rep = sup_defect_scan(&f, Equation::Cauchy, &Window::int_range(-32, 32), &shells).map_err(CliError::failed)?;
            line(out, format!("max defect on -32..32: {} at ({}, {})", rep.max_defect, rep.argmax.0, rep.argmax.1))?;
            for e in &rep.shell_profile {
                line(out, format!("  shell min norm >= {}: sup {}", e.r, render::opt(&e.sup)))?;
            }
            Ok(rep.max_defect == q("5") && rep.shell_profile.iter().all(|e| e.sup == Some(q("1"))))
        }
        DemoName::ExtremalJensen => {
            let f = make_extremal_jensen(&q("1"), &Element::dyadic(1, 0)).map_err(CliError::failed)?;
            line(out, "f = 0 except f(1) = f(-1) = -1/2 and f(0) = 1/2 on dyadic:1")?;
            let w = Window::dyadic_range(-16, 16, 1);
            let rep = sup_defect_scan(&f, Equation::JensenQuad, &w, &[]).map_err(CliError::failed)?;
            line(out, format!("max quadrupled defect: {} at ({}, {})", rep.max_defect, rep.argmax.0, rep.argmax.1))?;
            let far = pair_samples(&f, Equation::JensenPlain, &w)
                .map_err(CliError::failed)?
                .into_iter()
                .filter(|s| s.min_norm > q("2"))
                .map(|s| s.defect)
                .max()
                .unwrap_or_else(Rational::zero);
            line(out, format!("largest plain defect with min norm > 2: {far}"))?;
            Ok(rep.max_defect == q("4") && far == q("1"))
        }
    }
}
