//! geokit: construct convex bodies, evaluate Lp-theory functionals, run the
//! geominimal estimators, and fuzz the inequality harness.
//!
//! Every command prints a single-line JSON summary as its final output line.
//! Exit codes: 0 success, 2 usage/schema/arity errors, 3 when a verify run
//! found violations.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use geokit_core::bodies;
use geokit_core::functionals::{self};
use geokit_core::{FunctionalValue, PExponent};
use geokit_core::geominimal::{self, CompetitorFamily, GeoEstimate, SearchConfig, Witness};
use geokit_core::harness::{self, HarnessConfig, RuleId, SuiteReport, Verdict};
use geokit_core::schema::BodySpec;
use geokit_core::sphere::SphereGrid;
use geokit_core::{SmoothBody, StarBody};

/// CSV columns (stable order):
/// functional values: `id,p,i,resolution,value,kind,err,condition`;
/// verdict reports:
/// `rule,verdict,slack,lhs_value,lhs_err,rhs_value,rhs_err,p,i,alpha,equality,escalated`.
#[derive(Parser)]
#[command(name = "geokit", version, about = "Numerical convex geometry: bodies, Lp functionals, geominimal estimates, inequality suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct and inspect bodies.
    Body {
        #[command(subcommand)]
        action: BodyAction,
    },
    /// Evaluate a functional or estimator.
    Compute(ComputeArgs),
    /// Run inequality suites and write a report.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum BodyAction {
    /// Build a body and emit its JSON record.
    Make(MakeArgs),
    /// Summarize a body: volumes, centroid, class memberships.
    Show(ShowArgs),
}

#[derive(Args)]
struct MakeArgs {
    /// ball | ellipsoid | fourier | sampled
    #[arg(long)]
    kind: String,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Ball radius.
    #[arg(long)]
    r: Option<f64>,
    /// Row-major matrix entries, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    matrix: Option<String>,
    /// Fourier coefficients, e.g. "c0=1,a2=0.1,b3=-0.05".
    #[arg(long, allow_hyphen_values = true)]
    coeffs: Option<String>,
    /// Verification resolution (planar: power of two, >= 64).
    #[arg(long, default_value_t = 256)]
    resolution: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ShowArgs {
    /// Body JSON file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 256)]
    resolution: usize,
    /// Exponent for the class-membership test.
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ComputeArgs {
    /// Functional id (mirrors the library operation names).
    functional: String,
    /// Body JSON files, repeatable; arity depends on the functional.
    #[arg(long = "body", required = true)]
    bodies: Vec<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    p: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    i: Option<f64>,
    #[arg(long)]
    alpha: Option<u8>,
    #[arg(long, default_value_t = 256)]
    resolution: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Competitor family for estimators: fourier | ellipsoid | radial.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated rule ids, or "all".
    rules: String,
    #[arg(long, default_value_t = 20)]
    count: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 256)]
    resolution: usize,
    /// Ambient dimensions to fuzz.
    #[arg(long = "dim", default_values_t = [2usize])]
    dims: Vec<usize>,
    /// Exponent list override, repeatable.
    #[arg(long = "p", allow_negative_numbers = true)]
    ps: Vec<f64>,
    /// Weight-index list override, repeatable.
    #[arg(long = "i", allow_negative_numbers = true)]
    is: Vec<f64>,
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn main() -> ExitCode {
    // GEOKIT_THREADS caps internal parallelism.
    if let Ok(threads) = std::env::var("GEOKIT_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            println!("{}", json!({"status": "error", "message": format!("{e:#}")}));
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Body { action } => match action {
            BodyAction::Make(args) => body_make(args),
            BodyAction::Show(args) => body_show(args),
        },
        Command::Compute(args) => compute(args),
        Command::Verify(args) => verify(args),
    }
}

fn parse_csv_floats(text: &str) -> anyhow::Result<Vec<f64>> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| anyhow!("bad number '{t}': {e}")))
        .collect()
}

fn parse_coeffs(text: &str) -> anyhow::Result<(f64, Vec<f64>, Vec<f64>)> {
    let mut c0 = 1.0;
    let mut a: Vec<(usize, f64)> = vec![];
    let mut b: Vec<(usize, f64)> = vec![];
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("coefficient '{part}' is not of the form name=value"))?;
        let value: f64 = value.trim().parse().context("coefficient value")?;
        let key = key.trim();
        if key == "c0" {
            c0 = value;
        } else if let Some(k) = key.strip_prefix('a') {
            a.push((k.parse().context("cosine index")?, value));
        } else if let Some(k) = key.strip_prefix('b') {
            b.push((k.parse().context("sine index")?, value));
        } else {
            bail!("unknown coefficient '{key}' (expected c0, aK, or bK)");
        }
    }
    let k_max = a.iter().chain(b.iter()).map(|(k, _)| *k).max().unwrap_or(0);
    let mut av = vec![0.0; k_max];
    let mut bv = vec![0.0; k_max];
    for (k, v) in a {
        if k == 0 {
            bail!("use c0 for the constant term");
        }
        av[k - 1] = v;
    }
    for (k, v) in b {
        if k == 0 {
            bail!("use c0 for the constant term");
        }
        bv[k - 1] = v;
    }
    Ok((c0, av, bv))
}

fn grid_for(dim: usize, resolution: usize, seed: u64) -> anyhow::Result<Arc<SphereGrid<f64>>> {
    let seed_opt = if dim >= 4 { Some(seed) } else { None };
    Ok(SphereGrid::for_dim(dim, resolution, seed_opt)?)
}

fn write_or_print(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn body_make(args: MakeArgs) -> anyhow::Result<ExitCode> {
    let spec = match args.kind.as_str() {
        "ball" => BodySpec::ball(args.dim, args.r.ok_or_else(|| anyhow!("--r required for a ball"))?),
        "ellipsoid" => {
            let matrix =
                parse_csv_floats(&args.matrix.ok_or_else(|| anyhow!("--matrix required"))?)?;
            BodySpec::ellipsoid(args.dim, matrix)
        }
        "fourier" | "fourier_support" => {
            let (c0, a, b) = parse_coeffs(&args.coeffs.ok_or_else(|| anyhow!("--coeffs required"))?)?;
            BodySpec::fourier(c0, a, b)
        }
        other => bail!("unknown body kind '{other}'"),
    };
    // Realize once to validate (convexity margin, positivity).
    let grid = grid_for(spec.dim, args.resolution, 0)?;
    let body = spec.realize(&grid)?;
    let text = serde_json::to_string_pretty(&spec)?;
    write_or_print(&args.out, &text)?;
    println!(
        "{}",
        json!({"status": "ok", "kind": args.kind, "dim": spec.dim, "volume": body.volume()})
    );
    Ok(ExitCode::SUCCESS)
}

fn load_body(path: &PathBuf, grid: &Arc<SphereGrid<f64>>) -> anyhow::Result<SmoothBody> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec: BodySpec = serde_json::from_str(&text).context("parsing body JSON")?;
    Ok(spec.realize(grid)?)
}

fn body_show(args: ShowArgs) -> anyhow::Result<ExitCode> {
    let text = fs::read_to_string(&args.input)?;
    let spec: BodySpec = serde_json::from_str(&text).context("parsing body JSON")?;
    let grid = grid_for(spec.dim, args.resolution, args.seed)?;
    let body = spec.realize(&grid)?;
    let volume = body.volume();
    let polar = functionals::polar_volume(body.support())?;
    let centroid = bodies::centroid(&body)?;
    let centroid_norm = centroid.iter().map(|x| x * x).sum::<f64>().sqrt();
    let h_range = minmax(body.h());
    let f_range = minmax(body.f());
    let rho = bodies::polar_radial(body.support());
    let rho_polar_range = minmax(rho.rho());
    let pe = PExponent::new(args.p, spec.dim)?;
    let refs: Vec<&SmoothBody> = vec![&body; spec.dim];
    let class_candidate = geominimal::vpn_test(&refs, &pe)?.is_some();

    println!("kind: {:?}, dim {}", spec.kind, spec.dim);
    println!("support range: [{:.6}, {:.6}]", h_range.0, h_range.1);
    println!("curvature range: [{:.6}, {:.6}]", f_range.0, f_range.1);
    println!("polar radial range: [{:.6}, {:.6}]", rho_polar_range.0, rho_polar_range.1);
    println!("volume: {volume:.12}");
    println!("polar volume: {:.12} (err {:.3e})", polar.value, polar.err);
    println!("centroid norm: {centroid_norm:.3e} (centered: {})", centroid_norm < 1e-8);
    println!("smooth positive curvature: true");
    println!("class candidate at p = {}: {class_candidate}", args.p);
    println!(
        "{}",
        json!({
            "status": "ok",
            "volume": volume,
            "polar_volume": polar.value,
            "centroid_norm": centroid_norm,
            "centered": centroid_norm < 1e-8,
            "class_candidate": class_candidate,
            "p": args.p,
        })
    );
    Ok(ExitCode::SUCCESS)
}

fn minmax(values: &[f64]) -> (f64, f64) {
    values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)))
}

fn search_config(args: &ComputeArgs) -> anyhow::Result<SearchConfig> {
    let mut cfg = SearchConfig::default();
    if let Some(family) = &args.family {
        cfg.family = match family.as_str() {
            "fourier" | "fourier-support" => CompetitorFamily::FourierSupport { k_max: 6 },
            "ellipsoid" => CompetitorFamily::Ellipsoid,
            "radial" | "radial-grid" => CompetitorFamily::RadialGrid,
            other => bail!("unknown family '{other}'"),
        };
    }
    if let Some(starts) = args.starts {
        cfg.starts = starts;
    }
    cfg.seed = args.seed;
    Ok(cfg)
}

fn functional_csv(fv: &FunctionalValue) -> String {
    let mut out = String::from("id,p,i,resolution,value,kind,err,condition\n");
    out.push_str(&format!(
        "{},{},{},{},{},{},{},{}\n",
        fv.meta.id,
        fv.meta.p.map(|v| v.to_string()).unwrap_or_default(),
        fv.meta.i.map(|v| v.to_string()).unwrap_or_default(),
        fv.meta.resolution,
        fv.value,
        serde_json::to_value(fv.kind).unwrap().as_str().unwrap_or(""),
        fv.err,
        fv.meta.condition.map(|v| v.to_string()).unwrap_or_default(),
    ));
    out
}

fn estimate_json(est: &GeoEstimate<f64>) -> serde_json::Value {
    let witness: Vec<BodySpec> = match &est.witness {
        Witness::Convex(ws) => ws.iter().map(BodySpec::from_support).collect(),
        Witness::Star(ws) => ws.iter().map(BodySpec::from_star).collect(),
    };
    json!({
        "value": est.value,
        "alpha": est.alpha,
        "witness": witness,
        "trace": est.trace,
    })
}

fn compute(args: ComputeArgs) -> anyhow::Result<ExitCode> {
    // Ids mirror the library operation names, case-insensitively.
    let id = args.functional.to_lowercase();
    // All bodies share one grid; its dimension comes from the first body.
    let first_text = fs::read_to_string(&args.bodies[0])?;
    let first_spec: BodySpec = serde_json::from_str(&first_text).context("parsing body JSON")?;
    let grid = grid_for(first_spec.dim, args.resolution, args.seed)?;
    let bodies: Vec<SmoothBody> =
        args.bodies.iter().map(|p| load_body(p, &grid)).collect::<anyhow::Result<_>>()?;
    let refs: Vec<&SmoothBody> = bodies.iter().collect();
    let n = grid.dim();
    let pe = |p: Option<f64>| -> anyhow::Result<PExponent> {
        Ok(PExponent::new(p.ok_or_else(|| anyhow!("--p required for {id}"))?, n)?)
    };
    let ival = || args.i.ok_or_else(|| anyhow!("--i required for {id}"));
    let needs = |count: usize| -> anyhow::Result<()> {
        if bodies.len() != count {
            bail!("{id} takes {count} bodies, got {}", bodies.len());
        }
        Ok(())
    };
    // Radial functions of the input bodies themselves (not their polars).
    let stars = || -> anyhow::Result<Vec<StarBody>> {
        bodies.iter().map(|b| Ok(bodies::radial_from_support(b.support())?)).collect()
    };

    enum Output {
        Value(FunctionalValue),
        Estimate(Box<GeoEstimate<f64>>),
        Body(BodySpec),
        Option(Option<BodySpec>),
    }

    let output = match id.as_str() {
        "volume_radial" => {
            needs(1)?;
            let star = bodies::radial_from_support(bodies[0].support())?;
            Output::Value(functionals::volume_radial(&star)?)
        }
        "polar_volume" => {
            needs(1)?;
            Output::Value(functionals::polar_volume(bodies[0].support())?)
        }
        "dual_mixed_volume" => {
            needs(n)?;
            let ss = stars()?;
            let refs: Vec<&StarBody> = ss.iter().collect();
            Output::Value(functionals::dual_mixed_volume(&refs)?)
        }
        "dual_mixed_volume_i" => {
            needs(2)?;
            let ss = stars()?;
            Output::Value(functionals::dual_mixed_volume_i(&ss[0], &ss[1], ival()?)?)
        }
        "lp_curvature" => {
            needs(1)?;
            let samples = functionals::lp_curvature(&bodies[0], &pe(args.p)?);
            let text = serde_json::to_string_pretty(&samples)?;
            write_or_print(&args.out, &text)?;
            println!("{}", json!({"status": "ok", "functional": id, "samples": samples.len()}));
            return Ok(ExitCode::SUCCESS);
        }
        "p_mixed_volume_multi_polar" => {
            needs(2 * n)?;
            let (ks, ls) = refs.split_at(n);
            let ls_stars: Vec<StarBody> = ls
                .iter()
                .map(|b| Ok(bodies::radial_from_support(b.support())?))
                .collect::<anyhow::Result<_>>()?;
            let l_refs: Vec<&StarBody> = ls_stars.iter().collect();
            Output::Value(functionals::p_mixed_volume_multi_polar(ks, &l_refs, &pe(args.p)?)?)
        }
        "p_mixed_volume" => {
            needs(2)?;
            Output::Value(functionals::p_mixed_volume(&bodies[0], bodies[1].support(), &pe(args.p)?)?)
        }
        "p_mixed_volume_multi" => {
            needs(2 * n)?;
            let (ks, qs) = refs.split_at(n);
            let q_refs: Vec<&geokit_core::ConvexSupportBody> =
                qs.iter().map(|b| b.support()).collect();
            Output::Value(functionals::p_mixed_volume_multi(ks, &q_refs, &pe(args.p)?)?)
        }
        "vpi_mixed" => {
            needs(4)?;
            Output::Value(functionals::vpi_mixed(
                &bodies[0],
                &bodies[1],
                bodies[2].support(),
                bodies[3].support(),
                &pe(args.p)?,
                ival()?,
            )?)
        }
        "mixed_p_affine" => {
            needs(n)?;
            Output::Value(functionals::mixed_p_affine(&refs, &pe(args.p)?)?)
        }
        "asp_i" => {
            needs(2)?;
            Output::Value(functionals::asp_i(&bodies[0], &bodies[1], &pe(args.p)?, ival()?)?)
        }
        "p_curvature_image" => {
            needs(1)?;
            let image = functionals::p_curvature_image(&bodies[0], &pe(args.p)?)?;
            Output::Body(BodySpec::from_star(&image))
        }
        "classical_mixed_volume_2d" => {
            needs(2)?;
            Output::Value(functionals::classical_mixed_volume_2d(&bodies[0], &bodies[1])?)
        }
        "classical_mixed_volume_nd" => {
            needs(n)?;
            Output::Value(functionals::classical_mixed_volume_nd(&refs)?)
        }
        "p_surface_area" => {
            needs(1)?;
            Output::Value(functionals::p_surface_area(&bodies[0], &pe(args.p)?)?)
        }
        "estimate_g" => {
            needs(n)?;
            let alpha = args.alpha.ok_or_else(|| anyhow!("--alpha required"))?;
            Output::Estimate(Box::new(geominimal::estimate_g(
                alpha,
                &refs,
                &pe(args.p)?,
                &search_config(&args)?,
            )?))
        }
        "estimate_gtilde" => {
            needs(1)?;
            Output::Estimate(Box::new(geominimal::estimate_gtilde(
                &bodies[0],
                &pe(args.p)?,
                &search_config(&args)?,
            )?))
        }
        "estimate_g_i" => {
            needs(2)?;
            let alpha = args.alpha.ok_or_else(|| anyhow!("--alpha required"))?;
            Output::Estimate(Box::new(geominimal::estimate_g_i(
                alpha,
                &bodies[0],
                &bodies[1],
                &pe(args.p)?,
                ival()?,
                &search_config(&args)?,
            )?))
        }
        "estimate_asp1" => {
            needs(n)?;
            let mut cfg = search_config(&args)?;
            cfg.family = CompetitorFamily::RadialGrid;
            Output::Estimate(Box::new(geominimal::estimate_asp1(&refs, &pe(args.p)?, &cfg)?))
        }
        "vpn_test" => {
            needs(n)?;
            let candidate = geominimal::vpn_test(&refs, &pe(args.p)?)?;
            Output::Option(candidate.map(|c| BodySpec::from_support(&c)))
        }
        other => bail!("unknown functional '{other}'"),
    };

    let summary = match output {
        Output::Value(fv) => {
            let text = match args.format {
                Format::Json => serde_json::to_string_pretty(&fv)?,
                Format::Csv => functional_csv(&fv),
            };
            write_or_print(&args.out, &text)?;
            json!({"status": "ok", "functional": id, "value": fv.value, "err": fv.err,
                   "kind": fv.kind})
        }
        Output::Estimate(est) => {
            let value = estimate_json(&est);
            let text = serde_json::to_string_pretty(&value)?;
            write_or_print(&args.out, &text)?;
            json!({"status": "ok", "functional": id, "value": est.value.value,
                   "err": est.value.err, "kind": est.value.kind,
                   "budget_exhausted": est.trace.budget_exhausted})
        }
        Output::Body(spec) => {
            let text = serde_json::to_string_pretty(&spec)?;
            write_or_print(&args.out, &text)?;
            json!({"status": "ok", "functional": id, "body": "written"})
        }
        Output::Option(spec) => {
            let text = serde_json::to_string_pretty(&spec)?;
            write_or_print(&args.out, &text)?;
            json!({"status": "ok", "functional": id, "present": spec.is_some()})
        }
    };
    println!("{summary}");
    Ok(ExitCode::SUCCESS)
}

fn report_csv(report: &SuiteReport) -> String {
    let mut out = String::from(
        "rule,verdict,slack,lhs_value,lhs_err,rhs_value,rhs_err,p,i,alpha,equality,escalated\n",
    );
    for case in &report.cases {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            case.rule,
            serde_json::to_value(case.verdict).unwrap().as_str().unwrap_or(""),
            case.slack,
            case.lhs.value,
            case.lhs.err,
            case.rhs.value,
            case.rhs.err,
            case.recipe.p.map(|v| v.to_string()).unwrap_or_default(),
            case.recipe.i.map(|v| v.to_string()).unwrap_or_default(),
            case.recipe.alpha.map(|v| v.to_string()).unwrap_or_default(),
            case.recipe.equality,
            case.escalated,
        ));
    }
    out
}

fn verify(args: VerifyArgs) -> anyhow::Result<ExitCode> {
    let rules: Vec<RuleId> = if args.rules.eq_ignore_ascii_case("all") {
        RuleId::ALL.to_vec()
    } else {
        args.rules
            .split(',')
            .map(|r| RuleId::from_str(r.trim()).map_err(|e| anyhow!("{e}")))
            .collect::<anyhow::Result<_>>()?
    };
    let mut cfg = HarnessConfig {
        resolution: args.resolution,
        ps: args.ps.clone(),
        is: args.is.clone(),
        ..HarnessConfig::default()
    };
    cfg.search.seed = args.seed;
    if let Some(starts) = args.starts {
        cfg.search.starts = starts;
    }
    if args.dims.iter().any(|d| *d == 2)
        && (!args.resolution.is_power_of_two() || args.resolution < 64)
    {
        bail!("planar runs need a power-of-two resolution >= 64, got {}", args.resolution);
    }
    let report = harness::fuzz_suite(&rules, args.count, args.seed, &args.dims, &cfg)?;

    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&report)?,
        Format::Csv => report_csv(&report),
    };
    if let Some(out) = &args.out {
        fs::write(out, &text).with_context(|| format!("writing {}", out.display()))?;
    } else if args.format == Format::Csv {
        println!("{text}");
    }

    for (rule, tallies) in &report.per_rule {
        println!(
            "{rule}: verified {} inconclusive {} violated {} logged {} skipped {}",
            tallies.verified, tallies.inconclusive, tallies.violated, tallies.logged, tallies.skipped
        );
    }
    let worst = report
        .cases
        .iter()
        .filter(|c| c.verdict == Verdict::Violated || c.verdict == Verdict::Inconclusive)
        .min_by(|a, b| a.slack.partial_cmp(&b.slack).unwrap_or(std::cmp::Ordering::Equal));
    if let Some(case) = worst {
        println!("tightest failing case: {} slack {:.3e}", case.rule, case.slack);
    }
    println!(
        "{}",
        json!({
            "status": "ok",
            "suite": report.suite,
            "seed": report.seed,
            "resolution": report.resolution,
            "verified": report.tallies.verified,
            "inconclusive": report.tallies.inconclusive,
            "violated": report.tallies.violated,
            "logged": report.tallies.logged,
            "skipped": report.tallies.skipped,
        })
    );
    if report.tallies.violated > 0 {
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}
