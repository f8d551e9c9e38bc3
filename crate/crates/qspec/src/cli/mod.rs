//! Command-line front end: one subcommand per solver or experiment, JSON
//! configuration, CSV/JSON artifacts, and static SVG plots.
//!
//! Exit codes: 0 success, 1 verification failure, 2 bad configuration,
//! 3 solver failure.

mod plot;

pub use plot::{profile_svg, spectrum_svg, sweep_svg};

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::compose::{
    accumulation_points, enumerate_spectrum, partial_spin_tail, Cap, SpectrumSample, SpinVector,
};
use crate::core::{DomainSpec, ProblemParams, RadiiRule};
use crate::error::Error;
use crate::grid2d::{dumbbell_experiment, minimize_rayleigh, rasterize, richardson, SolveOpts};
use crate::radial::{ball_eigenvalue, ball_spectrum, interval_eigenvalue, ShootTol};
use crate::verify::{
    eigenpair_sanity_radial, linf_bound_ratio, picone_check, pohozaev_check_grid,
    pohozaev_check_radial, CheckReport, PiconeVariant, RectField,
};

#[derive(Parser)]
#[command(
    name = "qspec",
    version,
    about = "Eigenvalues of the Dirichlet Laplacian normalized in L^q: radial shooting, grid solves, union composition, and verification oracles"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct OutputOpts {
    /// Output file for the primary artifact (CSV or JSON per --format).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write a static SVG plot of the result.
    #[arg(long, global = true)]
    plot: Option<PathBuf>,
    /// Artifact format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Printed digits; never affects internal arithmetic.
    #[arg(long, default_value_t = 10, global = true)]
    precision: usize,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// First or k-th radial eigenvalue of a ball via shooting.
    SolveBall {
        #[arg(long)]
        q: f64,
        #[arg(long = "N", default_value_t = 2)]
        n: u32,
        /// Ball radius.
        #[arg(long = "R", default_value_t = 1.0)]
        r: f64,
        /// Index in the radial family (k-1 interior zeros).
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// k-th eigenvalue of the interval (0, L).
    SolveInterval {
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 1.0)]
        length: f64,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// First eigenvalue on a rasterized planar domain by inverse iteration.
    SolveGrid {
        #[arg(long)]
        q: f64,
        /// Mesh width.
        #[arg(long, default_value_t = 1.0 / 64.0)]
        h: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 100_000)]
        max_iter: usize,
        #[arg(long, default_value_t = 0x5EED)]
        seed: u64,
        /// Domain description as a JSON file; default is the unit square.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Also solve at h/2 and report the Richardson extrapolation.
        #[arg(long, default_value_t = false)]
        refine: bool,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Compose the spectrum of a disjoint union from component data.
    Compose {
        /// JSON config: {"q":…,"N":…,"components":[[…]…]} or
        /// {"q":…,"N":…,"rule":"geometric","r0":…,"gamma":…,"lambda1_unit":…}.
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Symmetry-breaking experiment on the two-cube dumbbell.
    Dumbbell {
        #[arg(long, default_value_t = 3.0)]
        q: f64,
        /// Neck half-width.
        #[arg(long, default_value_t = 1.0 / 16.0)]
        eps: f64,
        #[arg(long, default_value_t = 1.0 / 64.0)]
        h: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 0x5EED)]
        seed: u64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Run the verification battery; exit 1 if any check fails.
    Verify {
        #[arg(long)]
        q: f64,
        #[arg(long = "N", default_value_t = 2)]
        n: u32,
        #[arg(long = "R", default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = 1.0 / 32.0)]
        h: f64,
        #[arg(long, default_value_t = 0x5EED)]
        seed: u64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Radial eigenvalue sweep over a radius range (QSPEC_THREADS workers).
    Sweep {
        #[arg(long)]
        q: f64,
        #[arg(long = "N", default_value_t = 2)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0.5)]
        r_min: f64,
        #[arg(long, default_value_t = 4.0)]
        r_max: f64,
        #[arg(long, default_value_t = 8)]
        steps: usize,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Canned experiment reproductions.
    Repro {
        #[arg(value_enum)]
        case: ReproCase,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long, default_value_t = 0x5EED)]
        seed: u64,
        #[command(flatten)]
        output: OutputOpts,
    },
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ReproCase {
    /// Two unit balls: composite values accumulate at the radial eigenvalues.
    #[value(name = "example-3.4")]
    TwoBalls,
    /// Geometric ball union: the first eigenvalue is not isolated.
    #[value(name = "example-3.5")]
    GeometricUnion,
    /// Dumbbell symmetry breaking over a range of neck widths.
    #[value(name = "example-4.4")]
    Dumbbell,
}

type CliResult = Result<i32, (i32, String)>;

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Convergence { .. } | Error::Solver(_) | Error::Stiffness { .. } | Error::NotFound(_) => 3,
        _ => 2,
    }
}

fn fail(e: Error) -> (i32, String) {
    (exit_code(&e), e.to_string())
}

fn params_for(n: u32, q: f64) -> Result<ProblemParams, (i32, String)> {
    if q == 2.0 {
        ProblemParams::classical(n).map_err(fail)
    } else {
        ProblemParams::new(n, q).map_err(fail)
    }
}

fn write_file(path: &Path, content: &str) -> Result<(), (i32, String)> {
    std::fs::write(path, content).map_err(|e| (2, format!("cannot write {}: {e}", path.display())))
}

fn spin_string(s: &SpinVector) -> String {
    s.delta.iter().map(|&d| if d { '1' } else { '0' }).collect()
}

/// Entry point; returns the process exit code.
pub fn run() -> i32 {
    run_args(std::env::args())
}

fn run_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.cmd) {
        Ok(code) => code,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            code
        }
    }
}

fn dispatch(cmd: Cmd) -> CliResult {
    match cmd {
        Cmd::SolveBall { q, n, r, k, output } => solve_ball(q, n, r, k, &output),
        Cmd::SolveInterval { q, length, k, output } => solve_interval(q, length, k, &output),
        Cmd::SolveGrid { q, h, tol, max_iter, seed, config, refine, output } => {
            solve_grid(q, h, tol, max_iter, seed, config.as_deref(), refine, &output)
        }
        Cmd::Compose { config, output } => compose_cmd(&config, &output),
        Cmd::Dumbbell { q, eps, h, tol, seed, output } => dumbbell_cmd(q, eps, h, tol, seed, &output),
        Cmd::Verify { q, n, r, h, seed, output } => verify_cmd(q, n, r, h, seed, &output),
        Cmd::Sweep { q, n, k, r_min, r_max, steps, output } => {
            sweep_cmd(q, n, k, r_min, r_max, steps, &output)
        }
        Cmd::Repro { case, q, eps, h, seed, output } => repro_cmd(case, q, eps, h, seed, &output),
    }
}

fn solve_ball(q: f64, n: u32, r: f64, k: usize, output: &OutputOpts) -> CliResult {
    let params = params_for(n, q)?;
    let pair = ball_eigenvalue(&params, r, k, &ShootTol::default()).map_err(fail)?;
    let p = output.precision;
    println!("lambda_{k}(B_{r}; q={q}, N={n}) = {:.p$}", pair.lambda);
    // The profile's zero list includes the boundary zero at R.
    println!("interior zeros: {}", pair.eigenfunction.zeros.len().saturating_sub(1));
    println!("boundary slope: {:.p$}", pair.eigenfunction.boundary_slope());
    if let Some(path) = &output.out {
        let content = match output.format {
            Format::Csv => pair.eigenfunction.to_csv(),
            Format::Json => serde_json::to_string_pretty(&serde_json::json!({
                "lambda": pair.lambda,
                "q": q, "N": n, "R": r, "k": k,
                "lq_norm": pair.lq_norm,
                "zeros": pair.eigenfunction.zeros,
                "boundary_slope": pair.eigenfunction.boundary_slope(),
            }))
            .map_err(|e| (2, e.to_string()))?
                + "\n",
        };
        write_file(path, &content)?;
    }
    if let Some(path) = &output.plot {
        let prof = &pair.eigenfunction;
        let svg = profile_svg(&prof.rho, &prof.u, &prof.zeros, &format!("u(rho), q={q}, N={n}, k={k}"));
        write_file(path, &svg)?;
    }
    Ok(0)
}

fn solve_interval(q: f64, length: f64, k: usize, output: &OutputOpts) -> CliResult {
    let params = params_for(1, q)?;
    let pair = interval_eigenvalue(&params, length, k, &ShootTol::default()).map_err(fail)?;
    let p = output.precision;
    println!("lambda_{k}((0,{length}); q={q}) = {:.p$}", pair.lambda);
    if let Some(path) = &output.out {
        let content = match output.format {
            Format::Csv => pair.eigenfunction.to_csv(),
            Format::Json => serde_json::to_string_pretty(&serde_json::json!({
                "lambda": pair.lambda, "q": q, "length": length, "k": k,
                "zeros": pair.eigenfunction.zeros,
            }))
            .map_err(|e| (2, e.to_string()))?
                + "\n",
        };
        write_file(path, &content)?;
    }
    if let Some(path) = &output.plot {
        let prof = &pair.eigenfunction;
        let svg = profile_svg(&prof.rho, &prof.u, &prof.zeros, &format!("u(x), q={q}, k={k}"));
        write_file(path, &svg)?;
    }
    Ok(0)
}

fn solve_grid(
    q: f64,
    h: f64,
    tol: f64,
    max_iter: usize,
    seed: u64,
    config: Option<&Path>,
    refine: bool,
    output: &OutputOpts,
) -> CliResult {
    let params = params_for(2, q)?;
    let domain: DomainSpec = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| (2, format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| (2, format!("bad domain config: {e}")))?
        }
        None => DomainSpec::Rectangle { a: 1.0, b: 1.0 },
    };
    let opts = SolveOpts { tol, max_iter, seed, ..SolveOpts::default() };
    let mask = rasterize(&domain, h).map_err(fail)?;
    let pair = minimize_rayleigh(&params, &mask, &opts).map_err(fail)?;
    let p = output.precision;
    println!("lambda_1 (h={h}, {} interior points) = {:.p$}", mask.len(), pair.lambda);
    let mut extrapolated = None;
    if refine {
        let fine_mask = rasterize(&domain, h / 2.0).map_err(fail)?;
        let fine = minimize_rayleigh(&params, &fine_mask, &opts).map_err(fail)?;
        let rich = richardson(pair.lambda, fine.lambda);
        println!("lambda_1 (h={}) = {:.p$}", h / 2.0, fine.lambda);
        println!("richardson      = {rich:.p$}");
        extrapolated = Some((fine.lambda, rich));
    }
    if let Some(path) = &output.out {
        let content = match output.format {
            Format::Csv => pair.eigenfunction.to_csv(),
            Format::Json => serde_json::to_string_pretty(&serde_json::json!({
                "lambda": pair.lambda,
                "lambda_fine": extrapolated.map(|e| e.0),
                "lambda_richardson": extrapolated.map(|e| e.1),
                "q": q, "h": h, "interior_points": mask.len(),
                "header": pair.eigenfunction.header_json(),
            }))
            .map_err(|e| (2, e.to_string()))?
                + "\n",
        };
        write_file(path, &content)?;
    }
    Ok(0)
}

#[derive(Deserialize)]
struct ComposeConfig {
    q: f64,
    #[serde(rename = "N", alias = "n")]
    n: u32,
    components: Option<Vec<Vec<f64>>>,
    rule: Option<String>,
    r0: Option<f64>,
    gamma: Option<f64>,
    lambda1_unit: Option<f64>,
    ceiling: Option<f64>,
    count: Option<usize>,
    k_max: Option<usize>,
}

fn compose_cmd(config: &Path, output: &OutputOpts) -> CliResult {
    let text = std::fs::read_to_string(config)
        .map_err(|e| (2, format!("cannot read {}: {e}", config.display())))?;
    let cfg: ComposeConfig =
        serde_json::from_str(&text).map_err(|e| (2, format!("bad compose config: {e}")))?;
    let params = params_for(cfg.n, cfg.q)?;
    let p = output.precision;

    if let Some(components) = &cfg.components {
        let cap = match (cfg.count, cfg.ceiling) {
            (Some(c), _) => Cap::Count(c),
            (None, Some(v)) => Cap::Ceiling(v),
            (None, None) => Cap::Auto,
        };
        let enumeration = enumerate_spectrum(components, &params, cap).map_err(fail)?;
        println!("{:<18} {:<6} spins", "value", "mult");
        for s in &enumeration.samples {
            println!("{:<18.p$} {:<6} {}", s.value, s.multiplicity(), spin_string(&s.spins));
        }
        if enumeration.truncated {
            println!("(truncated)");
        }
        if let Some(path) = &output.out {
            let content = match output.format {
                Format::Csv => {
                    let mut s = String::from("value,multiplicity,spins\n");
                    for sample in &enumeration.samples {
                        s.push_str(&format!(
                            "{:.p$e},{},{}\n",
                            sample.value,
                            sample.multiplicity(),
                            spin_string(&sample.spins)
                        ));
                    }
                    s
                }
                Format::Json => serde_json::to_string_pretty(&enumeration).map_err(|e| (2, e.to_string()))? + "\n",
            };
            write_file(path, &content)?;
        }
        if let Some(path) = &output.plot {
            let values: Vec<f64> = enumeration.samples.iter().map(|s| s.value).collect();
            let clusters = accumulation_points(&enumeration.samples, 1e-3, 10);
            let highlights: Vec<f64> = clusters.iter().map(|c| c.point).collect();
            write_file(path, &spectrum_svg(&values, &highlights, "composite spectrum"))?;
        }
        return Ok(0);
    }

    match cfg.rule.as_deref() {
        Some("geometric") => {
            let (r0, gamma) = (cfg.r0.unwrap_or(1.0), cfg.gamma.unwrap_or(0.5));
            let rule = RadiiRule::Geometric { r0, gamma };
            let lambda1_unit = match cfg.lambda1_unit {
                Some(v) => v,
                None => ball_eigenvalue(&params, 1.0, 1, &ShootTol::default()).map_err(fail)?.lambda,
            };
            let k_max = cfg.k_max.unwrap_or(50);
            let tail = partial_spin_tail(&rule, lambda1_unit, &params, k_max).map_err(fail)?;
            println!("k    Lambda_k");
            for (i, v) in tail.lambda_k.iter().enumerate() {
                println!("{:<4} {:.p$}", i + 1, v);
            }
            println!("limit {:.p$}", tail.limit);
            if let Some(path) = &output.out {
                let content = tail_artifact(&tail.lambda_k, tail.limit, output)?;
                write_file(path, &content)?;
            }
            if let Some(path) = &output.plot {
                write_file(path, &spectrum_svg(&tail.lambda_k, &[tail.limit], "truncation sequence"))?;
            }
            Ok(0)
        }
        Some(other) => Err((2, format!("unknown rule '{other}' (expected \"geometric\")"))),
        None => Err((2, "compose config needs either components or a rule".into())),
    }
}

fn tail_artifact(lambda_k: &[f64], limit: f64, output: &OutputOpts) -> Result<String, (i32, String)> {
    let p = output.precision;
    Ok(match output.format {
        Format::Csv => {
            let mut s = String::from("k,Lambda_k\n");
            for (i, v) in lambda_k.iter().enumerate() {
                s.push_str(&format!("{},{v:.p$e}\n", i + 1));
            }
            s.push_str(&format!("limit,{limit:.p$e}\n"));
            s
        }
        Format::Json => {
            serde_json::to_string_pretty(&serde_json::json!({"lambda_k": lambda_k, "limit": limit}))
                .map_err(|e| (2, e.to_string()))?
                + "\n"
        }
    })
}

fn dumbbell_cmd(q: f64, eps: f64, h: f64, tol: f64, seed: u64, output: &OutputOpts) -> CliResult {
    let params = params_for(2, q)?;
    let opts = SolveOpts { tol, seed, ..SolveOpts::default() };
    let report = dumbbell_experiment(eps, &params, h, &opts).map_err(fail)?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| (2, e.to_string()))? + "\n";
    print!("{json}");
    if let Some(path) = &output.out {
        write_file(path, &json)?;
    }
    Ok(0)
}

fn verify_cmd(q: f64, n: u32, r: f64, h: f64, seed: u64, output: &OutputOpts) -> CliResult {
    let params = params_for(n, q)?;
    let tol = ShootTol::default();
    let mut reports: Vec<CheckReport> = Vec::new();

    let pair = ball_eigenvalue(&params, r, 1, &tol).map_err(fail)?;
    reports.push(pohozaev_check_radial(&pair, &params, 1e-4));
    reports.push(eigenpair_sanity_radial(&pair, pair.lambda, &params, 1e-6));

    if n == 2 {
        let grid_params = params_for(2, q)?;
        let mask = rasterize(&DomainSpec::Rectangle { a: 1.0, b: 1.0 }, h).map_err(fail)?;
        let gpair = minimize_rayleigh(&grid_params, &mask, &SolveOpts { seed, ..SolveOpts::default() })
            .map_err(fail)?;
        reports.push(pohozaev_check_grid(&gpair, &grid_params, 0.1).map_err(fail)?);
    }

    if n >= 3 {
        let pairs: Vec<_> = [0.5, 1.0, 2.0, 4.0]
            .iter()
            .map(|&rr| ball_eigenvalue(&params, rr, 1, &tol))
            .collect::<Result<_, _>>()
            .map_err(fail)?;
        reports.push(linf_bound_ratio(&pairs, &params, 1.01).map_err(fail)?);
    }

    // Picone inequalities on seeded trigonometric fields.
    {
        use rand::{Rng, SeedableRng};
        use std::f64::consts::PI;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let nodes = (1.0 / h).round() as usize + 1;
        let c: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let d: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let trig = |c: &[f64], x: f64, y: f64| {
            c[0] * (PI * x).sin() * (PI * y).sin() + c[1] * (2.0 * PI * x).cos() * (PI * y).sin()
                + c[2] * (PI * x).sin() * (2.0 * PI * y).cos()
                + c[3] * (2.0 * PI * x).cos() * (2.0 * PI * y).cos()
        };
        let psi = RectField::sample(h, nodes, nodes, |x, y| 4.1 + trig(&c, x, y));
        let phi = RectField::sample(h, nodes, nodes, |x, y| 4.1 + trig(&d, x, y));
        reports.push(picone_check(&psi, &phi, PiconeVariant::Classical, &params).map_err(fail)?);
        if params.sub_homogeneous() {
            reports.push(picone_check(&psi, &phi, PiconeVariant::Generalized, &params).map_err(fail)?);
        }
    }

    let p = output.precision;
    println!("{:<22} {:<6} {:<24} {:<24}", "check", "pass", "measured", "bound/target");
    let mut all = true;
    for rep in &reports {
        all &= rep.passed;
        println!(
            "{:<22} {:<6} {:<24.p$e} {:<24.p$e}",
            rep.name,
            if rep.passed { "ok" } else { "FAIL" },
            rep.measured,
            rep.bound_or_target
        );
    }
    if let Some(path) = &output.out {
        let mut lines = String::new();
        for rep in &reports {
            lines.push_str(&serde_json::to_string(rep).map_err(|e| (2, e.to_string()))?);
            lines.push('\n');
        }
        write_file(path, &lines)?;
    }
    Ok(if all { 0 } else { 1 })
}

fn worker_count() -> usize {
    std::env::var("QSPEC_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

fn sweep_cmd(q: f64, n: u32, k: usize, r_min: f64, r_max: f64, steps: usize, output: &OutputOpts) -> CliResult {
    if !(r_min > 0.0) || !(r_max > r_min) || steps < 2 {
        return Err((2, format!("bad sweep range [{r_min}, {r_max}] with {steps} steps")));
    }
    let params = params_for(n, q)?;
    let radii: Vec<f64> = (0..steps)
        .map(|i| r_min + (r_max - r_min) * i as f64 / (steps - 1) as f64)
        .collect();
    let tol = ShootTol::default();
    let threads = worker_count().min(radii.len());
    // Independent solves fanned out over a fixed-size pool; results merged in
    // parameter order so the artifact is deterministic.
    let results: Vec<Result<f64, Error>> = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for chunk_start in 0..threads {
            let radii = &radii;
            let params = &params;
            let tol = &tol;
            handles.push(scope.spawn(move || {
                let mut out = Vec::new();
                let mut i = chunk_start;
                while i < radii.len() {
                    out.push((i, ball_eigenvalue(params, radii[i], k, tol).map(|p| p.lambda)));
                    i += threads;
                }
                out
            }));
        }
        let mut merged: Vec<Option<Result<f64, Error>>> = (0..radii.len()).map(|_| None).collect();
        for handle in handles {
            for (i, res) in handle.join().expect("sweep worker panicked") {
                merged[i] = Some(res);
            }
        }
        merged.into_iter().map(|r| r.expect("all indices covered")).collect()
    });
    let p = output.precision;
    let mut lambdas = Vec::with_capacity(radii.len());
    println!("R          lambda_{k}");
    for (r, res) in radii.iter().zip(results) {
        let lambda = res.map_err(fail)?;
        println!("{r:<10.4} {lambda:.p$}");
        lambdas.push(lambda);
    }
    if let Some(path) = &output.out {
        let content = match output.format {
            Format::Csv => {
                let mut s = String::from("R,lambda\n");
                for (r, l) in radii.iter().zip(&lambdas) {
                    s.push_str(&format!("{r:.p$e},{l:.p$e}\n"));
                }
                s
            }
            Format::Json => serde_json::to_string_pretty(&serde_json::json!({
                "q": q, "N": n, "k": k, "R": radii, "lambda": lambdas,
            }))
            .map_err(|e| (2, e.to_string()))?
                + "\n",
        };
        write_file(path, &content)?;
    }
    if let Some(path) = &output.plot {
        write_file(path, &sweep_svg(&radii, &lambdas, &format!("lambda_{k}(B_R; q={q}, N={n})")))?;
    }
    Ok(0)
}

fn repro_cmd(
    case: ReproCase,
    q: Option<f64>,
    eps: Option<f64>,
    h: Option<f64>,
    seed: u64,
    output: &OutputOpts,
) -> CliResult {
    match case {
        ReproCase::GeometricUnion => {
            let q = q.unwrap_or(1.5);
            let params = params_for(2, q)?;
            if !params.sub_homogeneous() {
                return Err((2, format!("the geometric-union reproduction needs 1 < q < 2, got {q}")));
            }
            let lambda1 = ball_eigenvalue(&params, 1.0, 1, &ShootTol::default()).map_err(fail)?.lambda;
            let rule = RadiiRule::Geometric { r0: 1.0, gamma: 0.5 };
            let tail = partial_spin_tail(&rule, lambda1, &params, 50).map_err(fail)?;
            let samples = tail_samples(&tail.lambda_k);
            let clusters = accumulation_points(&samples, 1e-6, 10);
            let p = output.precision;
            println!("lambda_1(B_1; q={q}) = {lambda1:.p$}");
            println!("Lambda_50 = {:.p$}", tail.lambda_k[49]);
            println!("limit     = {:.p$}", tail.limit);
            for c in &clusters {
                println!("accumulation at {:.p$} ({} witnesses)", c.point, c.count);
            }
            if let Some(path) = &output.out {
                write_file(path, &tail_artifact(&tail.lambda_k, tail.limit, output)?)?;
            }
            if let Some(path) = &output.plot {
                write_file(path, &spectrum_svg(&tail.lambda_k, &[tail.limit], "truncation sequence"))?;
            }
            Ok(0)
        }
        ReproCase::TwoBalls => {
            let q = q.unwrap_or(1.5);
            let params = params_for(2, q)?;
            if !params.sub_homogeneous() {
                return Err((2, format!("the two-ball reproduction needs 1 < q < 2, got {q}")));
            }
            let spectrum = ball_spectrum(&params, 1.0, 20, &ShootTol::default()).map_err(fail)?;
            let enumeration =
                enumerate_spectrum(&[spectrum.clone(), spectrum.clone()], &params, Cap::Ceiling(spectrum[2]))
                    .map_err(fail)?;
            let clusters = accumulation_points(&enumeration.samples, 1e-3, 10);
            let p = output.precision;
            println!("two unit balls, q={q}: {} composite values", enumeration.samples.len());
            for c in &clusters {
                println!("accumulation at {:.p$} ({} witnesses)", c.point, c.count);
            }
            if let Some(path) = &output.out {
                let content = match output.format {
                    Format::Csv => {
                        let mut s = String::from("value,multiplicity,spins\n");
                        for sample in &enumeration.samples {
                            s.push_str(&format!(
                                "{:.p$e},{},{}\n",
                                sample.value,
                                sample.multiplicity(),
                                spin_string(&sample.spins)
                            ));
                        }
                        s
                    }
                    Format::Json => {
                        serde_json::to_string_pretty(&serde_json::json!({
                            "samples": enumeration.samples.iter().map(|s| s.value).collect::<Vec<_>>(),
                            "clusters": clusters.iter().map(|c| c.point).collect::<Vec<_>>(),
                        }))
                        .map_err(|e| (2, e.to_string()))?
                            + "\n"
                    }
                };
                write_file(path, &content)?;
            }
            if let Some(path) = &output.plot {
                let values: Vec<f64> = enumeration.samples.iter().map(|s| s.value).collect();
                let highlights: Vec<f64> = clusters.iter().map(|c| c.point).collect();
                write_file(path, &spectrum_svg(&values, &highlights, "two-ball composite spectrum"))?;
            }
            Ok(0)
        }
        ReproCase::Dumbbell => {
            let q = q.unwrap_or(3.0);
            let params = params_for(2, q)?;
            let h = h.unwrap_or(1.0 / 64.0);
            let eps_list = match eps {
                Some(e) => vec![e],
                None => vec![0.25, 0.125, 0.0625],
            };
            let opts = SolveOpts { seed, ..SolveOpts::default() };
            let mut reports = Vec::new();
            for &e in &eps_list {
                let rep = dumbbell_experiment(e, &params, h, &opts).map_err(fail)?;
                let p = output.precision;
                println!(
                    "eps={e:<8} ratio={:.p$} localization={:.p$}",
                    rep.ratio, rep.localization
                );
                reports.push(serde_json::json!({"eps": e, "report": rep}));
            }
            let json = serde_json::to_string_pretty(&reports).map_err(|e| (2, e.to_string()))? + "\n";
            if let Some(path) = &output.out {
                write_file(path, &json)?;
            }
            Ok(0)
        }
    }
}

/// Wraps plain truncation values as spectrum samples for the detector.
fn tail_samples(lambda_k: &[f64]) -> Vec<SpectrumSample> {
    let mut samples: Vec<SpectrumSample> = lambda_k
        .iter()
        .enumerate()
        .map(|(k, &v)| SpectrumSample {
            value: v,
            spins: SpinVector { delta: vec![true; k + 1] },
            component_eigenvalues: Vec::new(),
            alpha: Vec::new(),
            extra_spins: Vec::new(),
        })
        .collect();
    samples.sort_by(|a, b| a.value.total_cmp(&b.value));
    samples
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_solve_ball() {
        let cli = Cli::try_parse_from(["qspec", "solve-ball", "--q", "3", "--N", "2", "--R", "1"]).unwrap();
        match cli.cmd {
            Cmd::SolveBall { q, n, r, k, .. } => {
                assert_eq!((q, n, r, k), (3.0, 2, 1.0, 1));
            }
            _ => panic!("wrong subcommand"),
        }
    }

    #[test]
    fn bad_flags_exit_2() {
        assert_eq!(run_args(["qspec", "solve-ball"]), 2); // missing --q
        assert_eq!(run_args(["qspec", "no-such-command"]), 2);
    }

    #[test]
    fn repro_case_names() {
        let cli = Cli::try_parse_from(["qspec", "repro", "example-3.5"]).unwrap();
        match cli.cmd {
            Cmd::Repro { case, .. } => assert_eq!(case, ReproCase::GeometricUnion),
            _ => panic!("wrong subcommand"),
        }
    }
}
