//! Batch CLI for the krein toolbox. Every command reads JSON inputs, writes
//! JSON results (and CSV series where a run produces them), and exits with
//! 0 on success, 1 on a failed verification, 2 on validation errors, and 3 on
//! numerical failures. All runs are deterministic; the seed is echoed into
//! the outputs so a descriptor reproduces its artifacts byte for byte.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use krein::approx::{approximate_reflectionless, PipelineInput, SubdivisionPlan};
use krein::config::Config;
use krein::krein::{check_in_xk, constant_a, extract_measure_with};
use krein::measures::{split_nu, SplitSpec};
use krein::sets::{delta_metric, hausdorff, lebesgue_symmdiff, FiniteGapSet};
use krein::spectral::{
    forward_data, is_reflectionless, jacobi_from_torus, reconstruct_from_halfline, JacobiMatrix,
    TorusPoint,
};
use krein::toda::{spectrum, toda_flow, PeriodicJacobi};
use krein::{KreinFunction, SpectralMeasure};

#[derive(Parser)]
#[command(name = "krein", about = "Spectral data for reflectionless Jacobi matrices", version)]
struct Cli {
    /// Seed recorded in outputs for reproducibility.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Tolerance profile: default | strict (or set KREIN_PROFILE).
    #[arg(long, global = true)]
    profile: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Forward map: J -> (torus data, xi, rho, nu+).
    Forward(ForwardArgs),
    /// Inverse map: (xi, sigma) or (nu+, nu-, A) -> coefficient window.
    Reconstruct(ReconstructArgs),
    /// Reconstruct from per-gap torus coordinates.
    Torus(TorusArgs),
    /// Finite-gap approximation pipeline over a subdivision schedule.
    Approximate(ApproximateArgs),
    /// Integrate a polynomial Toda flow on a periodic operator.
    Toda(TodaArgs),
    /// Set metrics: Hausdorff, symmetric difference, delta.
    Metric(MetricArgs),
    /// Reflectionless verification of a coefficient window.
    Verify(VerifyArgs),
    /// Execute a JSON run descriptor.
    Run(RunArgs),
}

#[derive(Args, Serialize, Deserialize)]
struct ForwardArgs {
    /// Jacobi window JSON.
    #[arg(long)]
    jacobi: PathBuf,
    /// Finite gap set JSON.
    #[arg(long)]
    set: PathBuf,
    /// Output directory for xi/torus/rho/nu_plus JSON files.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize)]
struct ReconstructArgs {
    /// Finite gap set JSON (xi route).
    #[arg(long)]
    set: Option<PathBuf>,
    /// Krein function JSON (xi route).
    #[arg(long)]
    xi: Option<PathBuf>,
    /// Comma-separated sigma flags, one per interior gap atom (xi route).
    #[arg(long)]
    sigma: Option<String>,
    /// nu+ measure JSON (direct route).
    #[arg(long)]
    nu_plus: Option<PathBuf>,
    /// nu- measure JSON (direct route).
    #[arg(long)]
    nu_minus: Option<PathBuf>,
    /// Herglotz constant A (direct route).
    #[arg(long)]
    a_const: Option<f64>,
    #[arg(long, default_value_t = 20)]
    depth: usize,
    /// Output path for the coefficient window JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize)]
struct TorusArgs {
    #[arg(long)]
    set: PathBuf,
    /// Comma-separated per-gap atom positions.
    #[arg(long, allow_hyphen_values = true)]
    mu: String,
    /// Comma-separated per-gap sigma flags.
    #[arg(long)]
    sigma: String,
    #[arg(long, default_value_t = 30)]
    depth: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize)]
struct ApproximateArgs {
    /// Pipeline descriptor JSON: set, xi, g_targets, schedule, depth.
    #[arg(long)]
    input: PathBuf,
    /// Output directory for per-stage JSON and the diagnostics CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize, Deserialize)]
struct TodaArgs {
    /// Periodic operator JSON {"a": [...], "b": [...]}.
    #[arg(long)]
    periodic: PathBuf,
    /// Comma-separated polynomial coefficients, constant term first.
    #[arg(long, default_value = "0,1")]
    poly: String,
    #[arg(long, default_value_t = 1.0)]
    t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Ambient radius for reported band structures.
    #[arg(long, default_value_t = 0.0)]
    radius: f64,
    /// Trajectory CSV path.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Final-state JSON path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize)]
struct MetricArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
}

#[derive(Args, Serialize, Deserialize)]
struct VerifyArgs {
    #[arg(long)]
    jacobi: PathBuf,
    #[arg(long)]
    set: PathBuf,
    #[arg(long, default_value_t = 1e-3)]
    y: f64,
    #[arg(long, default_value_t = 1e-2)]
    tol: f64,
    /// Check g_n for |n| up to this bound.
    #[arg(long, default_value_t = 2)]
    n_range: i64,
    #[arg(long, default_value_t = 40)]
    samples: usize,
}

#[derive(Args)]
struct RunArgs {
    /// Run descriptor JSON: {"command": ..., "seed": ..., ...args}.
    #[arg(long)]
    descriptor: PathBuf,
}

/// On-disk run descriptor; `command` selects the variant, remaining fields
/// are that command's arguments.
#[derive(Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
enum Descriptor {
    Forward {
        #[serde(flatten)]
        args: ForwardArgs,
        #[serde(default)]
        seed: u64,
    },
    Reconstruct {
        #[serde(flatten)]
        args: ReconstructArgs,
        #[serde(default)]
        seed: u64,
    },
    Torus {
        #[serde(flatten)]
        args: TorusArgs,
        #[serde(default)]
        seed: u64,
    },
    Approximate {
        #[serde(flatten)]
        args: ApproximateArgs,
        #[serde(default)]
        seed: u64,
    },
    Toda {
        #[serde(flatten)]
        args: TodaArgs,
        #[serde(default)]
        seed: u64,
    },
    Metric {
        #[serde(flatten)]
        args: MetricArgs,
        #[serde(default)]
        seed: u64,
    },
    Verify {
        #[serde(flatten)]
        args: VerifyArgs,
        #[serde(default)]
        seed: u64,
    },
}

/// Exit discipline: 2 for anything wrong with inputs, 3 for numerical
/// failures, 1 for a verification that ran but did not pass.
enum Outcome {
    Ok,
    VerifyFailed,
}

fn classify(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<krein::Error>() {
        Some(krein::Error::Numerical(_)) | Some(krein::Error::FlowBlowUp { .. }) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = cli
        .profile
        .as_deref()
        .and_then(Config::from_profile)
        .unwrap_or_else(Config::from_env);
    let seed = cli.seed;
    let result = match cli.command {
        Command::Forward(a) => cmd_forward(&a, seed, &cfg),
        Command::Reconstruct(a) => cmd_reconstruct(&a, seed, &cfg),
        Command::Torus(a) => cmd_torus(&a, seed, &cfg),
        Command::Approximate(a) => cmd_approximate(&a, seed, &cfg),
        Command::Toda(a) => cmd_toda(&a, seed, &cfg),
        Command::Metric(a) => cmd_metric(&a, seed),
        Command::Verify(a) => cmd_verify(&a, seed, &cfg),
        Command::Run(r) => cmd_run(&r, &cfg),
    };
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::VerifyFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(classify(&e))
        }
    }
}

fn load<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> anyhow::Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read {what} from {}: {e}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(|e| anyhow::anyhow!("invalid {what} in {}: {e}", path.display()))
}

fn save_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn emit<T: Serialize>(value: &T) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> anyhow::Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<T>()
                .map_err(|e| anyhow::anyhow!("invalid {what} entry {tok:?}: {e}"))
        })
        .collect()
}

fn cmd_forward(args: &ForwardArgs, seed: u64, cfg: &Config) -> anyhow::Result<Outcome> {
    let j: JacobiMatrix = load(&args.jacobi, "jacobi window")?;
    let k: FiniteGapSet = load(&args.set, "finite gap set")?;
    let fd = forward_data(&j, &k, cfg)?;
    let summary = serde_json::json!({
        "seed": seed,
        "torus": fd.torus,
        "a_const": fd.a_const,
        "rho_mass": fd.rho.mass(),
        "nu_plus_mass": fd.nu_plus.mass(),
        "nu_minus_mass": fd.nu_minus.mass(),
        "atoms": fd.rho.atoms(),
    });
    if let Some(dir) = &args.out {
        save_json(&dir.join("xi.json"), &fd.xi)?;
        save_json(&dir.join("torus.json"), &fd.torus)?;
        save_json(&dir.join("rho.json"), &fd.rho)?;
        save_json(&dir.join("nu_plus.json"), &fd.nu_plus)?;
        save_json(&dir.join("summary.json"), &summary)?;
    }
    emit(&summary)?;
    Ok(Outcome::Ok)
}

fn cmd_reconstruct(args: &ReconstructArgs, seed: u64, cfg: &Config) -> anyhow::Result<Outcome> {
    let (nu_plus, nu_minus, a_const) = match (&args.nu_plus, &args.nu_minus, args.a_const) {
        (Some(p), Some(m), Some(a)) => {
            let np: SpectralMeasure = load(p, "nu+ measure")?;
            let nm: SpectralMeasure = load(m, "nu- measure")?;
            (np, nm, a)
        }
        (None, None, None) => {
            let set = args
                .set
                .as_ref()
                .ok_or_else(|| anyhow::anyhow!("xi route needs --set and --xi"))?;
            let xi_path = args
                .xi
                .as_ref()
                .ok_or_else(|| anyhow::anyhow!("xi route needs --set and --xi"))?;
            let k: FiniteGapSet = load(set, "finite gap set")?;
            let xi: KreinFunction = load(xi_path, "krein function")?;
            check_in_xk(&xi, &k)?;
            let rho = extract_measure_with(&xi, &k, cfg.nodes_per_band)?;
            let sigma: Vec<u8> = match &args.sigma {
                Some(s) => parse_list(s, "sigma")?,
                None => vec![1; rho.atoms().len()],
            };
            let (np, nm) = split_nu(&rho, &k, &SplitSpec { sigma, g: None })?;
            (np, nm, constant_a(&xi))
        }
        _ => anyhow::bail!("give either --nu-plus/--nu-minus/--a-const or --set/--xi"),
    };
    let rec = reconstruct_from_halfline(&nu_plus, &nu_minus, a_const, args.depth)?;
    let out = serde_json::json!({
        "seed": seed,
        "jacobi": rec.jacobi,
        "determined_plus": rec.determined_plus,
        "determined_minus": rec.determined_minus,
        "degenerate": rec.degenerate,
    });
    if let Some(path) = &args.out {
        save_json(path, &rec.jacobi)?;
    }
    emit(&out)?;
    Ok(Outcome::Ok)
}

fn cmd_torus(args: &TorusArgs, seed: u64, cfg: &Config) -> anyhow::Result<Outcome> {
    let k: FiniteGapSet = load(&args.set, "finite gap set")?;
    let p = TorusPoint {
        mus: parse_list(&args.mu, "mu")?,
        sigmas: parse_list(&args.sigma, "sigma")?,
    };
    let (rec, xi, nu_plus, _) = jacobi_from_torus(&k, &p, args.depth, cfg)?;
    let out = serde_json::json!({
        "seed": seed,
        "jacobi": rec.jacobi,
        "a_const": constant_a(&xi),
        "nu_plus_mass": nu_plus.mass(),
        "determined_plus": rec.determined_plus,
        "determined_minus": rec.determined_minus,
    });
    if let Some(path) = &args.out {
        save_json(path, &rec.jacobi)?;
    }
    emit(&out)?;
    Ok(Outcome::Ok)
}

/// JSON shape of the pipeline descriptor consumed by `approximate`.
#[derive(Deserialize)]
struct PipelineDescriptor {
    set: FiniteGapSet,
    xi: KreinFunction,
    g_targets: Vec<f64>,
    schedule: Vec<PlanRepr>,
    #[serde(default = "default_depth")]
    depth: usize,
}

fn default_depth() -> usize {
    14
}

#[derive(Deserialize)]
struct PlanRepr {
    n: usize,
    delta: f64,
}

fn cmd_approximate(args: &ApproximateArgs, seed: u64, cfg: &Config) -> anyhow::Result<Outcome> {
    let desc: PipelineDescriptor = load(&args.input, "pipeline descriptor")?;
    let schedule = desc
        .schedule
        .iter()
        .map(|p| SubdivisionPlan::new(p.n, p.delta))
        .collect::<krein::Result<Vec<_>>>()?;
    let input = PipelineInput {
        set: desc.set,
        xi: desc.xi,
        g_targets: desc.g_targets,
    };
    let stages = approximate_reflectionless(&input, &schedule, desc.depth, cfg)?;
    fs::create_dir_all(&args.out)?;
    let mut csv = String::from(
        "stage,n,delta,coefficient_distance,symmdiff,nu_plus_distance,reflectionless_max,reflectionless_pass\n",
    );
    for (i, stage) in stages.iter().enumerate() {
        let d = &stage.diagnostics;
        csv.push_str(&format!(
            "{i},{},{},{},{},{},{},{}\n",
            d.n,
            d.delta,
            d.coefficient_distance,
            d.symmdiff,
            d.nu_plus_distance,
            d.reflectionless.max_abs_re,
            d.reflectionless.pass
        ));
        save_json(&args.out.join(format!("stage_{i}_set.json")), &stage.set)?;
        save_json(&args.out.join(format!("stage_{i}_xi.json")), &stage.xi)?;
        save_json(
            &args.out.join(format!("stage_{i}_jacobi.json")),
            &stage.reconstruction.jacobi,
        )?;
        save_json(
            &args.out.join(format!("stage_{i}_diagnostics.json")),
            &serde_json::json!({
                "seed": seed,
                "n": d.n,
                "delta": d.delta,
                "coefficient_distance": d.coefficient_distance,
                "symmdiff": d.symmdiff,
                "nu_plus_distance": d.nu_plus_distance,
                "reflectionless": d.reflectionless,
            }),
        )?;
    }
    fs::write(args.out.join("diagnostics.csv"), &csv)?;
    println!("{csv}");
    Ok(Outcome::Ok)
}

fn cmd_toda(args: &TodaArgs, seed: u64, _cfg: &Config) -> anyhow::Result<Outcome> {
    let j0: PeriodicJacobi = load(&args.periodic, "periodic operator")?;
    let poly: Vec<f64> = parse_list(&args.poly, "polynomial coefficient")?;
    let radius = if args.radius > 0.0 {
        args.radius
    } else {
        j0.norm_bound() + 1.0
    };
    let bands0 = spectrum(&j0, radius)?;
    let traj = toda_flow(&j0, &poly, args.t_end, args.dt)?;
    let last = traj.last().expect("non-empty trajectory");
    let j1 = PeriodicJacobi::new(last.a.clone(), last.b.clone())?;
    let bands1 = spectrum(&j1, radius)?;
    let drift = bands0
        .bands()
        .iter()
        .zip(bands1.bands())
        .map(|(x, y)| (x.lo - y.lo).abs().max((x.hi - y.hi).abs()))
        .fold(0.0f64, f64::max);

    if let Some(path) = &args.csv {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        let mut f = fs::File::create(path)?;
        let p = j0.period();
        let mut header = String::from("t");
        for i in 0..p {
            header.push_str(&format!(",a{i}"));
        }
        for i in 0..p {
            header.push_str(&format!(",b{i}"));
        }
        for i in 0..bands0.bands().len() {
            header.push_str(&format!(",band{i}_lo,band{i}_hi"));
        }
        writeln!(f, "{header}")?;
        // band endpoints are recomputed at a coarse stride to keep runs fast
        let stride = (traj.len() / 50).max(1);
        for (i, pt) in traj.iter().enumerate() {
            if i % stride != 0 && i + 1 != traj.len() {
                continue;
            }
            let jt = PeriodicJacobi::new(pt.a.clone(), pt.b.clone())?;
            let kt = spectrum(&jt, radius)?;
            let mut line = format!("{}", pt.t);
            for x in &pt.a {
                line.push_str(&format!(",{x}"));
            }
            for x in &pt.b {
                line.push_str(&format!(",{x}"));
            }
            for band in kt.bands() {
                line.push_str(&format!(",{},{}", band.lo, band.hi));
            }
            writeln!(f, "{line}")?;
        }
    }

    let out = serde_json::json!({
        "seed": seed,
        "final": { "a": last.a, "b": last.b, "t": last.t },
        "band_endpoint_drift": drift,
        "bands_initial": bands0,
        "bands_final": bands1,
    });
    if let Some(path) = &args.out {
        save_json(path, &out)?;
    }
    emit(&out)?;
    Ok(Outcome::Ok)
}

fn cmd_metric(args: &MetricArgs, seed: u64) -> anyhow::Result<Outcome> {
    let k1: FiniteGapSet = load(&args.a, "finite gap set")?;
    let k2: FiniteGapSet = load(&args.b, "finite gap set")?;
    emit(&serde_json::json!({
        "seed": seed,
        "hausdorff": hausdorff(&k1, &k2),
        "symmdiff": lebesgue_symmdiff(&k1, &k2),
        "delta": delta_metric(&k1, &k2),
    }))?;
    Ok(Outcome::Ok)
}

fn cmd_verify(args: &VerifyArgs, seed: u64, cfg: &Config) -> anyhow::Result<Outcome> {
    let j: JacobiMatrix = load(&args.jacobi, "jacobi window")?;
    let k: FiniteGapSet = load(&args.set, "finite gap set")?;
    let rep = is_reflectionless(
        &j,
        &k,
        args.y,
        -args.n_range..=args.n_range,
        args.tol,
        args.samples,
        cfg,
    )?;
    emit(&serde_json::json!({ "seed": seed, "report": rep }))?;
    Ok(if rep.pass {
        Outcome::Ok
    } else {
        Outcome::VerifyFailed
    })
}

fn cmd_run(args: &RunArgs, cfg: &Config) -> anyhow::Result<Outcome> {
    let desc: Descriptor = load(&args.descriptor, "run descriptor")?;
    match desc {
        Descriptor::Forward { args, seed } => cmd_forward(&args, seed, cfg),
        Descriptor::Reconstruct { args, seed } => cmd_reconstruct(&args, seed, cfg),
        Descriptor::Torus { args, seed } => cmd_torus(&args, seed, cfg),
        Descriptor::Approximate { args, seed } => cmd_approximate(&args, seed, cfg),
        Descriptor::Toda { args, seed } => cmd_toda(&args, seed, cfg),
        Descriptor::Metric { args, seed } => cmd_metric(&args, seed),
        Descriptor::Verify { args, seed } => cmd_verify(&args, seed, cfg),
    }
}
