//! Command-line drivers for SR1 tracking, ULI scoring, the experiment tables
//! and constrained geodesic shooting.
//!
//! [`run`] is the whole program minus process plumbing, so it can be driven
//! in-process. Exit codes: 0 success, 1 bad configuration or I/O, 2 numerical
//! failure, 3 bound violation under `--assert-bounds`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use sr1::experiments::{
    fmt_f64, random_symmetric_gaussian, table1, table2, write_table, OutputFormat, PerturbedProvider, SeededRng,
    Table1Config, Table2Config, SEQUENCE_START,
};
use sr1::geodesic::{GeodesicConfig, OuterResult};
use sr1::linalg::{SymMatrix, Vector};
use sr1::sr1::SkipPolicy;
use sr1::tracker::{
    inverse_oracle, random_direction_oracle, track, DirectOracle, SecantOracle, SequenceOracle, Shifted, TrackConfig,
    TrackReport,
};
use sr1::uli::{sequence_uli_profile, UliProfile};

#[derive(Parser, Debug)]
#[command(
    name = "sr1",
    version,
    about = "Symmetric rank-one tracking of convergent matrix sequences"
)]
struct Cli {
    /// Output format; single runs print a one-line summary when omitted
    #[arg(long, value_enum, global = true)]
    output: Option<Format>,

    /// Write output to this file (or, for tables, into this directory as
    /// <table>_<seed>.<ext>; a trailing separator creates it) instead of standard output
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Track a randomly perturbed sequence A_k → A_* with cyclic directions
    Track(SequenceArgs),
    /// Track A_*⁻¹ from pairs s_k = A_k y_k, y_k canonical or Gaussian
    Invert {
        #[command(flatten)]
        seq: SequenceArgs,
        /// Draw y_k with standard normal entries instead of e_{k mod d}
        #[arg(long)]
        random_directions: bool,
    },
    /// Score every window of vectors read from a headerless CSV file
    UliCheck {
        /// One vector per row, comma-separated
        #[arg(long)]
        file: PathBuf,
        /// Window parameter m: windows hold m + 1 consecutive vectors
        #[arg(long)]
        window: usize,
        /// Vector dimension d
        #[arg(long)]
        dim: usize,
    },
    /// Distance to A_* for several λ and step counts, over seeded trials
    Table1 {
        #[arg(long, default_value_t = 10)]
        dim: usize,
        /// Comma-separated decay rates in (0, 1)
        #[arg(long, value_delimiter = ',', default_values_t = [0.9, 0.5, 0.1])]
        lambdas: Vec<f64>,
        /// Comma-separated step counts
        #[arg(long, value_delimiter = ',', default_values_t = [10, 20, 50, 100])]
        steps: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Distance to A_*⁻¹ for canonical and Gaussian y_k, over seeded trials
    Table2 {
        #[arg(long, default_value_t = 10)]
        dim: usize,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        /// Comma-separated step counts
        #[arg(long, value_delimiter = ',', default_values_t = [10, 20, 50, 100])]
        steps: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Keep ill-conditioned draws of A_* instead of redrawing them
        #[arg(long)]
        no_resample: bool,
    },
    /// Secant pairs from coordinate steps on f(x) = ½xᵀQx, Q = diag(1, …, d)
    QnDemo {
        #[arg(long, default_value_t = 6)]
        dim: usize,
        /// Number of secant pairs; defaults to the dimension
        #[arg(long)]
        steps: Option<usize>,
        #[command(flatten)]
        checks: CheckArgs,
    },
    /// Minimise the landmark shooting problem described by a JSON config
    Geodesic {
        /// JSON file; missing fields take their defaults
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct SequenceArgs {
    #[arg(long, default_value_t = 10)]
    dim: usize,
    /// Decay rate of the perturbation, in (0, 1)
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, default_value_t = 50)]
    steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    checks: CheckArgs,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// ULI window parameter m for the bound checks; defaults to the dimension
    #[arg(long)]
    window: Option<usize>,
    /// Skip updates whose curvature cosine falls below this value
    #[arg(long, default_value_t = 1e-8)]
    c_min: f64,
    /// Exit with status 3 if a bound check with satisfied hypotheses fails
    #[arg(long)]
    assert_bounds: bool,
}

enum Failure {
    Config(String),
    Library(sr1::Error),
    Bounds(usize),
}

impl From<sr1::Error> for Failure {
    fn from(e: sr1::Error) -> Self {
        Failure::Library(e)
    }
}

type CliResult<T> = Result<T, Failure>;

/// Parses `args` (program name first) and runs the subcommand, writing
/// results to `stdout` and diagnostics to `stderr`. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                1
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    let (code, msg) = match dispatch(cli, stdout) {
        Ok(()) => (0, None),
        Err(Failure::Config(msg)) => (1, Some(msg)),
        Err(Failure::Library(e)) => (if e.is_numerical() { 2 } else { 1 }, Some(e.to_string())),
        Err(Failure::Bounds(n)) => (3, Some(format!("{n} bound check(s) violated"))),
    };
    if let Some(msg) = msg {
        let _ = writeln!(stderr, "error: {msg}");
    }
    code
}

fn threads() -> CliResult<usize> {
    match std::env::var("SR1_THREADS") {
        Err(_) => Ok(0),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Config(format!("SR1_THREADS must be a nonnegative integer, got {v:?}"))),
    }
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> CliResult<()> {
    let out = Sink {
        path: cli.out.as_deref(),
        stdout,
    };
    match cli.command {
        Command::Track(args) => {
            let (a_star, seed, _) = draw(&args)?;
            let p = PerturbedProvider::new(a_star, args.lambda, seed)?;
            let mut oracle = DirectOracle::cyclic(Shifted::new(p, SEQUENCE_START));
            run_tracker(&mut oracle, args.steps, &args.checks, cli.output, out)
        }
        Command::Invert { seq, random_directions } => {
            let (a_star, seed, direction_seed) = draw(&seq)?;
            let p = Shifted::new(PerturbedProvider::new(a_star, seq.lambda, seed)?, SEQUENCE_START);
            if random_directions {
                let mut oracle = random_direction_oracle(p, SeededRng::new(direction_seed))?;
                run_tracker(&mut oracle, seq.steps, &seq.checks, cli.output, out)
            } else {
                let mut oracle = inverse_oracle(p)?;
                run_tracker(&mut oracle, seq.steps, &seq.checks, cli.output, out)
            }
        }
        Command::UliCheck { file, window, dim } => uli_check(&file, window, dim, cli.output, out),
        Command::Table1 {
            dim,
            lambdas,
            steps,
            trials,
            seed,
        } => {
            let t = table1(&Table1Config {
                dim,
                lambdas,
                steps,
                trials,
                base_seed: seed,
                threads: threads()?,
            })?;
            emit(&t, cli.output, out, seed)
        }
        Command::Table2 {
            dim,
            lambda,
            steps,
            trials,
            seed,
            no_resample,
        } => {
            let t = table2(&Table2Config {
                dim,
                lambda,
                steps,
                trials,
                base_seed: seed,
                threads: threads()?,
                resample: !no_resample,
                ..Table2Config::default()
            })?;
            emit(&t, cli.output, out, seed)
        }
        Command::QnDemo { dim, steps, checks } => {
            if dim == 0 {
                return Err(Failure::Config("--dim must be at least 1".into()));
            }
            let steps = steps.unwrap_or(dim);
            let q = SymMatrix::from_diagonal(&(1..=dim).map(|i| i as f64).collect::<Vec<_>>());
            let mut iterates = vec![Vector::zeros(dim)];
            for k in 0..steps {
                let mut x = iterates[k].clone();
                x[k % dim] += 1.0;
                iterates.push(x);
            }
            let grad = {
                let q = q.clone();
                move |x: &Vector| q.mul_vec(x)
            };
            let mut oracle = SecantOracle::new(grad, iterates)?.with_constant_hessian(q)?;
            run_tracker(&mut oracle, steps, &checks, cli.output, out)
        }
        Command::Geodesic { config } => {
            let cfg: GeodesicConfig = match &config {
                None => GeodesicConfig::default(),
                Some(path) => {
                    let text = fs::read_to_string(path).map_err(|source| sr1::Error::Io {
                        path: path.clone(),
                        source,
                    })?;
                    serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
                }
            };
            let (_, result) = cfg.run(threads()?)?;
            geodesic_output(&result, cli.output, out)
        }
    }
}

/// `A_*`, the perturbation seed and a direction seed, all from `--seed`.
fn draw(args: &SequenceArgs) -> CliResult<(SymMatrix, u64, u64)> {
    if args.dim == 0 {
        return Err(Failure::Config("--dim must be at least 1".into()));
    }
    if !(args.lambda > 0.0 && args.lambda < 1.0) {
        return Err(Failure::Config(format!(
            "--lambda must lie in (0, 1), got {}",
            args.lambda
        )));
    }
    if args.steps == 0 {
        return Err(Failure::Config("--steps must be at least 1".into()));
    }
    let mut rng = SeededRng::new(args.seed);
    let a_star = random_symmetric_gaussian(args.dim, &mut rng);
    let seed = rng.next_u64();
    let direction_seed = rng.next_u64();
    Ok((a_star, seed, direction_seed))
}

/// Destination of the main output: a file when `--out` was given.
struct Sink<'a> {
    path: Option<&'a Path>,
    stdout: &'a mut dyn Write,
}

impl Sink<'_> {
    fn write(self, bytes: &[u8]) -> CliResult<()> {
        let path = self.path;
        self.write_to(path, bytes)
    }

    fn write_to(self, path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
        match path {
            None => self.stdout.write_all(bytes).map_err(|e| Failure::Config(e.to_string())),
            Some(path) => fs::write(path, bytes).map_err(|source| {
                sr1::Error::Io {
                    path: path.to_path_buf(),
                    source,
                }
                .into()
            }),
        }
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(sr1::Error::from)?;
    for row in rows {
        w.write_record(&row).map_err(sr1::Error::from)?;
    }
    w.into_inner().map_err(|e| Failure::Config(e.to_string()))
}

fn json_bytes<T: serde::Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value).map_err(sr1::Error::from)?;
    v.push(b'\n');
    Ok(v)
}

fn summary_line(r: &TrackReport) -> String {
    format!(
        "steps={} applied={} skipped={} noop={} min_cosine={} distance_frob={} distance_op={} beta_hat={} theorem_checks={} proposition_pairs={} violations={}\n",
        r.steps.len(),
        r.updates_applied,
        r.updates_skipped,
        r.updates_noop,
        fmt_f64(r.min_cosine),
        opt(r.final_distance_frob()),
        opt(r.final_distance_op()),
        opt(r.beta_hat),
        r.theorem_checks.len(),
        r.proposition.as_ref().map_or(0, |p| p.pairs_checked),
        r.bound_violations(),
    )
}

fn run_tracker<O: SequenceOracle>(
    oracle: &mut O,
    steps: usize,
    checks: &CheckArgs,
    format: Option<Format>,
    out: Sink<'_>,
) -> CliResult<()> {
    let policy = SkipPolicy::new(checks.c_min, SkipPolicy::default().r_floor)?;
    let cfg = TrackConfig {
        steps,
        policy,
        window: checks.window.unwrap_or(oracle.dim()),
        check_bounds: true,
    };
    let report = track(oracle, &cfg).map_err(|f| Failure::Library(f.error))?;
    let bytes = match format {
        None => summary_line(&report).into_bytes(),
        Some(Format::Json) => json_bytes(&report)?,
        Some(Format::Csv) => csv_bytes(
            &[
                "k",
                "status",
                "cosine",
                "residual_norm",
                "secant_residual",
                "distance_op",
                "distance_frob",
            ],
            report.steps.iter().map(|s| {
                vec![
                    s.k.to_string(),
                    serde_json::to_value(s.status)
                        .ok()
                        .and_then(|v| v.as_str().map(str::to_owned))
                        .unwrap_or_default(),
                    fmt_f64(s.cosine),
                    fmt_f64(s.residual_norm),
                    fmt_f64(s.secant_residual),
                    opt(s.distance_op),
                    opt(s.distance_frob),
                ]
            }),
        )?,
    };
    out.write(&bytes)?;
    match report.bound_violations() {
        n if n > 0 && checks.assert_bounds => Err(Failure::Bounds(n)),
        _ => Ok(()),
    }
}

fn read_vectors(path: &Path, dim: usize) -> CliResult<Vec<Vector>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let mut vectors = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        let values = record
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Failure::Config(format!("{}: row {}: {e}", path.display(), i + 1)))?;
        if values.len() != dim {
            return Err(Failure::Config(format!(
                "{}: row {} has {} entries, expected {dim}",
                path.display(),
                i + 1,
                values.len()
            )));
        }
        vectors.push(Vector::from(values));
    }
    Ok(vectors)
}

fn uli_check(file: &Path, window: usize, dim: usize, format: Option<Format>, out: Sink<'_>) -> CliResult<()> {
    if dim == 0 {
        return Err(Failure::Config("--dim must be at least 1".into()));
    }
    let vectors = read_vectors(file, dim)?;
    let horizon = vectors.len();
    let profile: UliProfile = sequence_uli_profile(vectors, window, dim, horizon)?;
    let bytes = match format {
        Some(Format::Json) => json_bytes(&profile)?,
        _ => csv_bytes(
            &["start", "alpha", "beta", "gamma", "subset"],
            profile.reports.iter().map(|r| {
                vec![
                    r.start.to_string(),
                    fmt_f64(r.alpha_det),
                    fmt_f64(r.beta_eig),
                    fmt_f64(r.gamma_bound),
                    r.chosen_subset
                        .iter()
                        .map(|i| i.to_string())
                        .collect::<Vec<_>>()
                        .join(" "),
                ]
            }),
        )?,
    };
    out.write(&bytes)
}

fn emit(t: &sr1::experiments::TableResult, format: Option<Format>, out: Sink<'_>, seed: u64) -> CliResult<()> {
    let format = format.unwrap_or(Format::Csv);
    let mut buf = Vec::new();
    write_table(t, format.into(), &mut buf)?;
    let mut path = out.path.map(Path::to_path_buf);
    if let Some(p) = out.path {
        let trailing = p.as_os_str().to_string_lossy().ends_with(std::path::is_separator);
        if trailing || p.is_dir() {
            fs::create_dir_all(p).map_err(|source| sr1::Error::Io {
                path: p.to_path_buf(),
                source,
            })?;
            let ext = match format {
                Format::Csv => "csv",
                Format::Json => "json",
            };
            path = Some(p.join(format!("{}_{seed}.{ext}", t.name)));
        }
    }
    out.write_to(path.as_deref(), &buf)
}

fn geodesic_output(r: &OuterResult, format: Option<Format>, out: Sink<'_>) -> CliResult<()> {
    let bytes = match format {
        Some(Format::Json) => json_bytes(&serde_json::json!({
            "termination": r.termination,
            "p0": r.p0,
            "final_cost": r.final_shot.cost,
            "history": r.history,
        }))?,
        _ => csv_bytes(
            &["iter", "cost", "grad_norm", "max_binv_residual", "step"],
            r.history.iter().map(|h| {
                vec![
                    h.iter.to_string(),
                    fmt_f64(h.cost),
                    fmt_f64(h.grad_norm),
                    fmt_f64(h.max_binv_residual),
                    fmt_f64(h.step),
                ]
            }),
        )?,
    };
    out.write(&bytes)
}
