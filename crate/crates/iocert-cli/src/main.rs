//! Batch command-line front end: loads operators and models from JSON,
//! runs certification, decoding, norm evaluation, witness construction,
//! and demos, and emits byte-deterministic JSON/CSV reports.
//!
//! stdout carries data only; diagnostics (including runtimes) go to
//! stderr. Exit codes: 2 parse error, 3 dimension mismatch, 4 component
//! overflow, 5 onto-assumption failure, 1 anything else.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use iocert::certify::{certify, nsp_constant_l2};
use iocert::decode::{
    decode_noise_aware, decode_noiseless, decode_robust, io_harness, DecodeResult,
    HarnessConfig, SampleKind,
};
use iocert::jsonio::{
    complex_matrix_json, fmt_f64, json_array, json_real, matrix_from_str, matrix_json,
    model_from_str, norm_spec_from_str, vector_from_str, vector_json, JsonObject,
};
use iocert::model::Model;
use iocert::norms::{
    atomic_norm, eval_norm, m_distance_to_model, NormSpec, DEFAULT_ATOMIC_TOL,
};
use iocert::witness::{
    adversarial_pair, decoder_worst_ratio, fourier_rank1_onb, hyperbola_demo,
    spd_sparse_inverse_onb,
};
use iocert::{Error, Result};

const DEFAULT_RANK_TOL: f64 = 1e-10;

#[derive(Parser)]
#[command(
    name = "iocert",
    version,
    about = "Certify instance-optimality limits of linear measurement operators \
             over low-dimensional models, run the matching ideal decoders, and \
             generate witness constructions."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify optimal null-space and restricted isometry constants.
    Certify(CertifyArgs),
    /// Decode a measurement vector with an ideal decoder.
    Decode(DecodeArgs),
    /// Evaluate a norm (or a distance to the model) at a vector.
    Norms(NormsArgs),
    /// Sample the instance-optimality inequality over random signals.
    Harness(HarnessArgs),
    /// Generate witness constructions.
    #[command(subcommand)]
    Witness(WitnessCommand),
    /// Run illustrative demos.
    #[command(subcommand)]
    Demo(DemoCommand),
}

#[derive(Args)]
struct CertifyArgs {
    /// Measurement matrix JSON (nested arrays, row-major). Optional with
    /// --sweep, which generates its own Gaussian operators.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Model JSON.
    #[arg(long)]
    model: PathBuf,
    /// Rank tolerance for kernel and span decisions.
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    tol: f64,
    /// Seed for randomized estimates (low-rank models).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sweep measurement counts, e.g. "m=1..6": per m, certify a Gaussian
    /// m×n operator and emit CSV (m, sqrt(n/m), d_star).
    #[arg(long)]
    sweep: Option<String>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum DecodeMode {
    Noiseless,
    Robust,
    Aware,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    model: PathBuf,
    /// Measurement vector JSON (flat array).
    #[arg(long)]
    y: PathBuf,
    #[arg(long, value_enum, default_value_t = DecodeMode::Noiseless)]
    mode: DecodeMode,
    /// Lower restricted isometry constant (required for robust/aware).
    #[arg(long, required_if_eq_any([("mode", "robust"), ("mode", "aware")]))]
    alpha: Option<f64>,
    /// Declared noise level (required for aware).
    #[arg(long, required_if_eq("mode", "aware"))]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    tol: f64,
    /// Ground-truth x JSON: appends the instance-optimality check.
    #[arg(long)]
    check: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NormsArgs {
    /// Norm specification JSON.
    #[arg(long)]
    spec: PathBuf,
    /// Point JSON (flat array).
    #[arg(long)]
    x: PathBuf,
    /// Model JSON (context for atomic norms and distances).
    #[arg(long)]
    model: Option<PathBuf>,
    /// Atomic-norm duality gap tolerance.
    #[arg(long, default_value_t = DEFAULT_ATOMIC_TOL)]
    tol: f64,
    /// Evaluate the distance from x to the model in the spec's geometry
    /// (l2 or mnorm) instead of the norm of x.
    #[arg(long, default_value_t = false)]
    distance: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HarnessArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_enum, default_value_t = DecodeMode::Noiseless)]
    mode: DecodeMode,
    #[arg(long, required_if_eq_any([("mode", "robust"), ("mode", "aware")]))]
    alpha: Option<f64>,
    #[arg(long, required_if_eq("mode", "aware"))]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exact ℓ² norm of each random noise vector.
    #[arg(long, default_value_t = 0.0)]
    noise_scale: f64,
    /// Bound constant multiplying the model distance.
    #[arg(long)]
    c1: f64,
    /// Bound constant multiplying the noise norm.
    #[arg(long)]
    c2: f64,
    /// Draw ground truths on the model instead of ambient Gaussians.
    #[arg(long, default_value_t = false)]
    on_model: bool,
    /// Also evaluate the per-anchor bound min_z ‖x−z‖ + (2/α)‖M(x−z)+e‖
    /// (needs --alpha).
    #[arg(long, default_value_t = false)]
    anchor: bool,
    /// Error norm spec JSON (default l2).
    #[arg(long)]
    error_norm: Option<PathBuf>,
    /// Model distance spec JSON (default l2).
    #[arg(long)]
    distance: Option<PathBuf>,
    /// Per-trial CSV output path.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum WitnessCommand {
    /// Orthonormal basis of symmetric matrices from positive-definite
    /// sparse-inverse pairs.
    Spd {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Complex orthonormal basis of rank-one DFT outer products.
    Fourier {
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fiber-mate pair forcing any decoder above √(D²−1).
    Adversarial {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Requested constant D (1 < D < the certified optimal constant).
        #[arg(long)]
        d: f64,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DemoCommand {
    /// Fiber distances to the hyperbola branch: strictly decreasing,
    /// infimum never attained.
    Hyperbola {
        /// Height of the measured point (the demo's argument needs x2 < 0).
        #[arg(long, allow_hyphen_values = true)]
        x2: f64,
        /// Comma-separated strictly increasing positive abscissas.
        #[arg(long, default_value = "1,10,100,1000,10000,100000,1000000")]
        t_grid: String,
        /// Optional SVG line plot path.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    init_threads();
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(exit_code(&err));
    }
}

/// IOCERT_THREADS caps internal parallelism.
fn init_threads() {
    if let Ok(value) = std::env::var("IOCERT_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse(_) => 2,
        Error::DimensionMismatch { .. } => 3,
        Error::ComponentOverflow { .. } => 4,
        Error::NotOnto { .. } => 5,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Certify(args) => cmd_certify(args),
        Command::Decode(args) => cmd_decode(args),
        Command::Norms(args) => cmd_norms(args),
        Command::Harness(args) => cmd_harness(args),
        Command::Witness(args) => cmd_witness(args),
        Command::Demo(args) => cmd_demo(args),
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    matrix_from_str(&read_file(path)?)
}

fn read_vector(path: &Path) -> Result<DVector<f64>> {
    vector_from_str(&read_file(path)?)
}

fn read_model(path: &Path) -> Result<Model> {
    model_from_str(&read_file(path)?)
}

/// Data goes to the file when --out is given, to stdout otherwise.
fn emit(out: &Option<PathBuf>, data: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, data)
            .map_err(|e| Error::InvalidParameter(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{data}");
            Ok(())
        }
    }
}

fn write_side_file(path: &Path, data: &str) -> Result<()> {
    std::fs::write(path, data)
        .map_err(|e| Error::InvalidParameter(format!("cannot write {}: {e}", path.display())))
}

fn check_shapes(m: &DMatrix<f64>, model: &Model) -> Result<()> {
    if m.ncols() != model.ambient_dim() {
        return Err(Error::DimensionMismatch {
            context: "operator vs model",
            expected: model.ambient_dim(),
            found: m.ncols(),
        });
    }
    Ok(())
}

/// CSV cell for a real value; infinities print as +inf/-inf.
fn csv_real(x: f64) -> String {
    if x == f64::INFINITY {
        "+inf".to_owned()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_owned()
    } else {
        fmt_f64(x)
    }
}

fn json_option_real(x: Option<f64>) -> String {
    match x {
        Some(v) => json_real(v),
        None => "null".to_owned(),
    }
}

fn cmd_certify(args: CertifyArgs) -> Result<()> {
    let model = read_model(&args.model)?;
    if let Some(spec) = &args.sweep {
        return certify_sweep(&model, spec, args.seed, args.tol, &args.out);
    }
    let matrix_path = args.matrix.as_ref().ok_or_else(|| {
        Error::Parse("certify needs --matrix (or --sweep to generate operators)".into())
    })?;
    let m = read_matrix(matrix_path)?;
    check_shapes(&m, &model)?;
    let start = Instant::now();
    let report = certify(&m, &model, args.tol, args.seed)?;
    eprintln!(
        "certify: {} rows x {} cols in {:.3}s",
        m.nrows(),
        m.ncols(),
        start.elapsed().as_secs_f64()
    );
    let worst_pair = match report.worst_pair {
        Some((i, j)) => json_array([i.to_string(), j.to_string()]),
        None => "null".to_owned(),
    };
    let m_lower = match report.m_lower_bound {
        Some(v) => v.to_string(),
        None => "null".to_owned(),
    };
    let json = JsonObject::new()
        .string("tool", "iocert")
        .string("version", env!("CARGO_PKG_VERSION"))
        .string("generator", "chacha8")
        .count("seed", args.seed as usize)
        .real("rank_tol", report.rank_tol)
        .real("d_star", report.d_star)
        .real("correlation", report.correlation)
        .real("alpha", report.alpha)
        .real("beta", report.beta)
        .raw("frame_k", json_option_real(report.frame_k))
        .raw("m_lower_bound", m_lower)
        .raw("worst_pair", worst_pair)
        .boolean("estimate", report.estimate)
        .finish();
    emit(&args.out, &format!("{json}\n"))
}

/// Parses "m=LO..HI" (or "LO..HI"), certifies a fresh Gaussian operator
/// per row count, and emits CSV rows (m, sqrt(n/m), d_star).
fn certify_sweep(
    model: &Model,
    spec: &str,
    seed: u64,
    tol: f64,
    out: &Option<PathBuf>,
) -> Result<()> {
    let body = spec.strip_prefix("m=").unwrap_or(spec);
    let (lo, hi) = body
        .split_once("..")
        .ok_or_else(|| Error::Parse(format!("sweep spec \"{spec}\" is not m=LO..HI")))?;
    let lo: usize = lo
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("sweep lower bound: {e}")))?;
    let hi: usize = hi
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("sweep upper bound: {e}")))?;
    let n = model.ambient_dim();
    if lo == 0 || hi < lo || hi > n {
        return Err(Error::Parse(format!(
            "sweep range {lo}..{hi} must satisfy 1 <= lo <= hi <= n = {n}"
        )));
    }
    let mut csv = String::from("m,sqrt_n_over_m,d_star\n");
    for rows in lo..=hi {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(rows as u64);
        let m = DMatrix::from_fn(rows, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let nsp = nsp_constant_l2(&m, model, tol, seed)?;
        let lower = (n as f64 / rows as f64).sqrt();
        let _ = writeln!(
            csv,
            "{},{},{}",
            rows,
            fmt_f64(lower),
            csv_real(nsp.d_star)
        );
    }
    emit(out, &csv)
}

fn decode_result_json(result: &DecodeResult, mode: DecodeMode) -> JsonObject {
    let mode_name = match mode {
        DecodeMode::Noiseless => "noiseless",
        DecodeMode::Robust => "robust",
        DecodeMode::Aware => "aware",
    };
    let component = match result.component {
        Some(i) => i.to_string(),
        None => "null".to_owned(),
    };
    JsonObject::new()
        .string("mode", mode_name)
        .raw("x_hat", vector_json(&result.x_hat))
        .raw("component", component)
        .real("objective", result.objective)
        .real("residual", result.residual)
        .real("delta_slack", result.delta_slack)
        .raw("epsilon", json_option_real(result.epsilon))
}

fn cmd_decode(args: DecodeArgs) -> Result<()> {
    let m = read_matrix(&args.matrix)?;
    let model = read_model(&args.model)?;
    check_shapes(&m, &model)?;
    let y = read_vector(&args.y)?;
    if y.len() != m.nrows() {
        return Err(Error::DimensionMismatch {
            context: "measurement vs operator rows",
            expected: m.nrows(),
            found: y.len(),
        });
    }
    let result = match args.mode {
        DecodeMode::Noiseless => decode_noiseless(&y, &m, &model, args.tol)?,
        DecodeMode::Robust => decode_robust(&y, &m, &model, args.alpha.unwrap())?,
        DecodeMode::Aware => {
            decode_noise_aware(&y, args.epsilon.unwrap(), &m, &model, args.alpha.unwrap())?
        }
    };
    let mut json = decode_result_json(&result, args.mode);
    if let Some(check_path) = &args.check {
        let x = read_vector(check_path)?;
        if x.len() != m.ncols() {
            return Err(Error::DimensionMismatch {
                context: "ground truth vs operator columns",
                expected: m.ncols(),
                found: x.len(),
            });
        }
        let lhs = (&x - &result.x_hat).norm();
        let noise = (&m * &x - &y).norm();
        let (c1, c2, dist) = match args.mode {
            DecodeMode::Noiseless => {
                let nsp = nsp_constant_l2(&m, &model, args.tol, 0)?;
                (2.0 * nsp.d_star, 0.0, model.project(&x)?.distance)
            }
            DecodeMode::Robust | DecodeMode::Aware => {
                let alpha = args.alpha.unwrap();
                let dist = m_distance_to_model(&x, &model, &m, alpha, 1e-8)?.value;
                (2.0, 2.0 / alpha, dist)
            }
        };
        let rhs = c1 * dist + c2 * noise;
        let check = JsonObject::new()
            .raw("x", vector_json(&x))
            .real("lhs", lhs)
            .real("distance", dist)
            .real("noise", noise)
            .real("c1", c1)
            .real("c2", c2)
            .real("rhs", rhs)
            .boolean("satisfied", !(lhs > rhs + 1e-9))
            .finish();
        json = json.raw("check", check);
    }
    emit(&args.out, &format!("{}\n", json.finish()))
}

fn cmd_norms(args: NormsArgs) -> Result<()> {
    let model = match &args.model {
        Some(path) => Some(read_model(path)?),
        None => None,
    };
    let x = read_vector(&args.x)?;
    let spec = norm_spec_from_str(&read_file(&args.spec)?, model.as_ref(), args.tol)?;
    let json = if args.distance {
        let model = model.as_ref().ok_or_else(|| {
            Error::Parse("distance evaluation needs --model".into())
        })?;
        match &spec {
            NormSpec::L2 => {
                let proj = model.project(&x)?;
                let component = match proj.component {
                    Some(i) => i.to_string(),
                    None => "null".to_owned(),
                };
                JsonObject::new()
                    .string("kind", "l2")
                    .real("distance", proj.distance)
                    .raw("component", component)
                    .raw("nearest", vector_json(&proj.point))
                    .finish()
            }
            NormSpec::MNorm { m, alpha } => {
                let dist = m_distance_to_model(&x, model, m, *alpha, 1e-10)?;
                JsonObject::new()
                    .string("kind", "mnorm")
                    .real("distance", dist.value)
                    .real("cheap_upper", dist.cheap_upper)
                    .count("component", dist.component)
                    .finish()
            }
            other => {
                return Err(Error::UnsupportedKind {
                    op: "distance evaluation",
                    kind: other.kind_name(),
                })
            }
        }
    } else if let NormSpec::Atomic { model, tol } = &spec {
        let result = atomic_norm(&x, model, *tol)?;
        JsonObject::new()
            .string("kind", "atomic")
            .real("value", result.value)
            .real("gap", result.gap)
            .count("iterations", result.iterations)
            .raw("dual", vector_json(&result.dual))
            .finish()
    } else {
        JsonObject::new()
            .string("kind", spec.kind_name())
            .real("value", eval_norm(&x, &spec)?)
            .finish()
    };
    emit(&args.out, &format!("{json}\n"))
}

fn cmd_harness(args: HarnessArgs) -> Result<()> {
    let m = read_matrix(&args.matrix)?;
    let model = read_model(&args.model)?;
    check_shapes(&m, &model)?;
    let error_norm = match &args.error_norm {
        Some(path) => norm_spec_from_str(&read_file(path)?, Some(&model), DEFAULT_ATOMIC_TOL)?,
        None => NormSpec::L2,
    };
    let distance = match &args.distance {
        Some(path) => norm_spec_from_str(&read_file(path)?, Some(&model), DEFAULT_ATOMIC_TOL)?,
        None => NormSpec::L2,
    };
    if args.anchor && args.alpha.is_none() {
        return Err(Error::Parse("--anchor needs --alpha".into()));
    }
    let config = HarnessConfig {
        c1: args.c1,
        c2: args.c2,
        trials: args.trials,
        noise_scale: args.noise_scale,
        seed: args.seed,
        sample: if args.on_model {
            SampleKind::OnModel
        } else {
            SampleKind::Ambient
        },
        anchor_alpha: if args.anchor { args.alpha } else { None },
        planted: vec![],
    };
    let start = Instant::now();
    let report = match args.mode {
        DecodeMode::Noiseless => io_harness(
            &|y| decode_noiseless(y, &m, &model, DEFAULT_RANK_TOL),
            &m,
            &model,
            &error_norm,
            &distance,
            &config,
        )?,
        DecodeMode::Robust => {
            let alpha = args.alpha.unwrap();
            io_harness(
                &|y| decode_robust(y, &m, &model, alpha),
                &m,
                &model,
                &error_norm,
                &distance,
                &config,
            )?
        }
        DecodeMode::Aware => {
            let alpha = args.alpha.unwrap();
            let epsilon = args.epsilon.unwrap();
            io_harness(
                &|y| decode_noise_aware(y, epsilon, &m, &model, alpha),
                &m,
                &model,
                &error_norm,
                &distance,
                &config,
            )?
        }
    };
    eprintln!(
        "harness: {} trials in {:.3}s",
        report.trials,
        start.elapsed().as_secs_f64()
    );
    let violations = json_array(report.violations.iter().map(|v| {
        JsonObject::new()
            .count("trial", v.trial)
            .real("lhs", v.lhs)
            .real("rhs", v.rhs)
            .raw("x", vector_json(&v.x))
            .raw("e", vector_json(&v.e))
            .finish()
    }));
    let json = JsonObject::new()
        .string("tool", "iocert")
        .string("version", env!("CARGO_PKG_VERSION"))
        .string("generator", "chacha8")
        .count("seed", report.seed as usize)
        .count("trials", report.trials)
        .real("c1", report.c1)
        .real("c2", report.c2)
        .real("noise_scale", args.noise_scale)
        .real("max_ratio", report.max_ratio)
        .count("violation_count", report.violations.len())
        .raw("violations", violations)
        .raw("anchor_max_ratio", json_option_real(report.anchor_max_ratio))
        .count("anchor_violations", report.anchor_violations)
        .finish();
    if let Some(csv_path) = &args.csv {
        let mut csv = String::from("trial,lhs,rhs,ratio,anchor_rhs,anchor_ratio\n");
        for (trial, row) in report.rows.iter().enumerate() {
            let anchor_rhs = row.anchor_rhs.map(csv_real).unwrap_or_default();
            let anchor_ratio = row.anchor_ratio.map(csv_real).unwrap_or_default();
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                trial,
                csv_real(row.lhs),
                csv_real(row.rhs),
                csv_real(row.ratio),
                anchor_rhs,
                anchor_ratio
            );
        }
        write_side_file(csv_path, &csv)?;
    }
    emit(&args.out, &format!("{json}\n"))
}

fn cmd_witness(command: WitnessCommand) -> Result<()> {
    match command {
        WitnessCommand::Spd { n, out } => {
            let onb = spd_sparse_inverse_onb(n)?;
            let pairs = json_array(onb.pairs.iter().map(|(z1, z2)| {
                JsonObject::new()
                    .raw("z1", matrix_json(z1))
                    .raw("z2", matrix_json(z2))
                    .finish()
            }));
            let json = JsonObject::new()
                .string("kind", "spd_sparse_inverse")
                .count("n", onb.n)
                .count("count", onb.elements.len())
                .raw(
                    "elements",
                    json_array(onb.elements.iter().map(matrix_json)),
                )
                .raw("pairs", pairs)
                .raw(
                    "inverses",
                    json_array(onb.inverses.iter().map(matrix_json)),
                )
                .raw(
                    "inverse_nonzeros",
                    json_array(onb.inverse_nonzeros.iter().map(|c| c.to_string())),
                )
                .raw(
                    "min_eigenvalues",
                    json_array(onb.min_eigenvalues.iter().map(|x| fmt_f64(*x))),
                )
                .real("gram_error", onb.gram_error)
                .real("max_inverse_residual", onb.max_inverse_residual)
                .finish();
            emit(&out, &format!("{json}\n"))
        }
        WitnessCommand::Fourier { n1, n2, out } => {
            let onb = fourier_rank1_onb(n1, n2)?;
            let json = JsonObject::new()
                .string("kind", "fourier_rank1")
                .count("n1", onb.n1)
                .count("n2", onb.n2)
                .count("count", onb.elements.len())
                .raw(
                    "elements",
                    json_array(onb.elements.iter().map(complex_matrix_json)),
                )
                .real("gram_error", onb.gram_error)
                .real("modulus_error", onb.modulus_error)
                .real("u_inf", onb.u_inf)
                .real("v_inf", onb.v_inf)
                .real("uv_inf", onb.uv_inf)
                .finish();
            emit(&out, &format!("{json}\n"))
        }
        WitnessCommand::Adversarial {
            matrix,
            model,
            d,
            tol,
            out,
        } => {
            let m = read_matrix(&matrix)?;
            let model = read_model(&model)?;
            check_shapes(&m, &model)?;
            let pair = adversarial_pair(&m, &model, d, tol)?;
            let noiseless_ratio = decoder_worst_ratio(&pair, &m, &model, &|y| {
                decode_noiseless(y, &m, &model, tol)
            })
            .map(Some)
            .unwrap_or(None);
            let json = JsonObject::new()
                .string("kind", "adversarial_pair")
                .real("d", d)
                .real("ratio_bound", pair.ratio_bound)
                .real("correlation", pair.correlation)
                .raw(
                    "components",
                    json_array([
                        pair.components.0.to_string(),
                        pair.components.1.to_string(),
                    ]),
                )
                .real("fiber_gap", pair.fiber_gap)
                .raw("p1", vector_json(&pair.p1))
                .raw("p2", vector_json(&pair.p2))
                .raw("z1", vector_json(&pair.z1))
                .raw("z2", vector_json(&pair.z2))
                .raw("h", vector_json(&pair.h))
                .raw("z", vector_json(&pair.z))
                .raw(
                    "noiseless_worst_ratio",
                    json_option_real(noiseless_ratio),
                )
                .finish();
            emit(&out, &format!("{json}\n"))
        }
    }
}

fn cmd_demo(command: DemoCommand) -> Result<()> {
    match command {
        DemoCommand::Hyperbola {
            x2,
            t_grid,
            svg,
            out,
        } => {
            let grid = t_grid
                .split(',')
                .map(|item| {
                    item.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("t-grid entry \"{item}\": {e}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            let table = hyperbola_demo(x2, &grid)?;
            let mut csv = String::from("t,distance\n");
            for (t, dist) in &table {
                let _ = writeln!(csv, "{},{}", fmt_f64(*t), fmt_f64(*dist));
            }
            if let Some(svg_path) = &svg {
                write_side_file(svg_path, &hyperbola_svg(&table, x2))?;
            }
            emit(&out, &csv)
        }
    }
}

/// Minimal self-contained SVG line plot: distance against log10(t), with
/// the |x2| infimum as a dashed reference line.
fn hyperbola_svg(table: &[(f64, f64)], x2: f64) -> String {
    let (width, height, margin) = (640.0, 480.0, 50.0);
    let xs: Vec<f64> = table.iter().map(|(t, _)| t.log10()).collect();
    let ys: Vec<f64> = table.iter().map(|(_, d)| *d).collect();
    let limit = x2.abs();
    let (x_min, x_max) = (
        xs.iter().cloned().fold(f64::INFINITY, f64::min),
        xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
    let y_min = ys
        .iter()
        .cloned()
        .fold(limit, f64::min);
    let y_max = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let x_span = (x_max - x_min).max(1e-9);
    let y_span = (y_max - y_min).max(1e-9);
    let sx = |x: f64| margin + (x - x_min) / x_span * (width - 2.0 * margin);
    let sy = |y: f64| height - margin - (y - y_min) / y_span * (height - 2.0 * margin);
    let mut points = String::new();
    for (x, y) in xs.iter().zip(&ys) {
        let _ = write!(points, "{:.2},{:.2} ", sx(*x), sy(*y));
    }
    let limit_y = sy(limit);
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" ",
            "viewBox=\"0 0 {w} {h}\">\n",
            "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
            "<line x1=\"{m}\" y1=\"{ybase}\" x2=\"{xend}\" y2=\"{ybase}\" ",
            "stroke=\"black\"/>\n",
            "<line x1=\"{m}\" y1=\"{m}\" x2=\"{m}\" y2=\"{ybase}\" stroke=\"black\"/>\n",
            "<line x1=\"{m}\" y1=\"{ly:.2}\" x2=\"{xend}\" y2=\"{ly:.2}\" ",
            "stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n",
            "<polyline fill=\"none\" stroke=\"crimson\" stroke-width=\"2\" ",
            "points=\"{points}\"/>\n",
            "<text x=\"{m}\" y=\"30\" font-family=\"monospace\" font-size=\"14\">",
            "fiber distance vs log10(t); dashed: infimum |x2| = {limit}</text>\n",
            "</svg>\n"
        ),
        w = width,
        h = height,
        m = margin,
        xend = width - margin,
        ybase = height - margin,
        ly = limit_y,
        points = points.trim_end(),
        limit = limit
    )
}
