//! Command-line front end: single evaluations, verification sweeps, bilinear
//! scaling scans, kernel queries, and the main-term volume sweep, with
//! reproducible seeds and machine-readable output.
//!
//! Output is JSON-lines (one record per line, keys in sorted order) behind a
//! `{"schema":1}` header record; the bilinear scan can emit its fixed-column
//! CSV table instead.  All output is buffered and written once, so malformed
//! arguments never leave partial files.  Exit codes: 0 on success, 1 when a
//! verification sweep finds mismatches or a quadrature fails to converge,
//! 2 on invalid input.

use clap::{Parser, Subcommand, ValueEnum};
use gl3k::arith::lcm;
use gl3k::bilinear::{
    grid_extents, hybrid_envelope, hybrid_form, scan, uniform_t_nodes, write_csv, Generator,
    HybridNode, SeqPair,
};
use gl3k::cyclo::CycloValue;
use gl3k::decomp::{s_long_decomposed, verify_decomposition, EvalMode};
use gl3k::gl3::{s_long_bruteforce_vector, s_tilde};
use gl3k::kernels::{
    assembled_kernel, j_double, least_squares_log2_slope, main_term_volume, mellin_barnes_pp,
    DoubleBesselKind, KernelError, KernelQuery, Sign, SpectralPoint, TestFunctionParams,
};
use num::Zero;
use num_complex::Complex64;
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Computational workbench for rank-three Kloosterman sums and their
/// archimedean kernels.
#[derive(Parser)]
#[command(name = "gl3k", version, arg_required_else_help = true)]
struct Cli {
    /// Worker threads for the parallel sweeps (verify, bilinear); falls back
    /// to the GL3K_THREADS environment variable, then to one thread per core.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Seed for randomized experiment inputs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Output format; csv is available only for the bilinear scan table.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Exact root-of-unity arithmetic; records carry the exact value.
    Exact,
    /// Double-precision evaluation; records carry only the embedding.
    Float,
}

impl Mode {
    fn eval_mode(self) -> EvalMode {
        match self {
            Mode::Exact => EvalMode::Exact,
            Mode::Float => EvalMode::Float,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenArg {
    /// All-ones sequences.
    Unit,
    /// Independent uniform ±1 entries.
    Pm1,
    /// Independent entries uniform on the unit circle.
    Complex,
    /// The resonant pair peaked at --theta.
    Resonant,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    /// Kind-1 double integral, plus sign.
    J1p,
    /// Kind-1 double integral, minus sign.
    J1m,
    /// Kind-2 double integral.
    J2,
    /// Kind-3 double integral.
    J3,
    /// Kind-4 double integral.
    J4,
    /// Kind-5 double integral.
    J5,
    /// Contour (Mellin-Barnes) route for the all-plus kernel.
    Mb,
    /// Sign-assembled kernel; the branch follows the signs of y1, y2.
    Assembled,
}

impl Which {
    fn name(self) -> &'static str {
        match self {
            Which::J1p => "j1p",
            Which::J1m => "j1m",
            Which::J2 => "j2",
            Which::J3 => "j3",
            Which::J4 => "j4",
            Which::J5 => "j5",
            Which::Mb => "mb",
            Which::Assembled => "assembled",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one long-element sum S(1, m, n, 1; D1, D2) by its defining sum.
    Sum {
        #[arg(long, allow_negative_numbers = true)]
        m: i64,
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        #[arg(long)]
        d1: u64,
        #[arg(long)]
        d2: u64,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
    },
    /// Evaluate the divided-modulus auxiliary sum (requires d1 | d2).
    Tilde {
        #[arg(long, allow_negative_numbers = true)]
        n1: i64,
        #[arg(long, allow_negative_numbers = true)]
        n2: i64,
        #[arg(long, allow_negative_numbers = true)]
        m1: i64,
        #[arg(long)]
        d1: u64,
        #[arg(long)]
        d2: u64,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
    },
    /// Evaluate S(1, m, n, 1; D1, D2) through the divisor-sum decomposition.
    Decompose {
        #[arg(long)]
        m: i64,
        #[arg(long)]
        n: i64,
        #[arg(long)]
        d1: u64,
        #[arg(long)]
        d2: u64,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
    },
    /// Sweep the decomposition against the defining sum over a modulus grid.
    Verify {
        /// Both moduli range over 1..=dmax.
        #[arg(long)]
        dmax: u64,
        /// Twist values; the sweep covers their full (m, n) grid.
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        mn: Vec<i64>,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
    },
    /// Scaling sweep of the bilinear form over X = N grids.
    Bilinear {
        /// Modulus ranges (X1 = X2 = X).
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<u64>,
        /// Sequence lengths.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
        /// Seeded draws per (X, N) cell.
        #[arg(long, default_value_t = 5)]
        trials: u32,
        #[arg(long, value_enum, default_value_t = GenArg::Pm1)]
        generator: GenArg,
        /// Resonance frequency for the resonant generator.
        #[arg(long, default_value_t = 0.25)]
        theta: f64,
    },
    /// Twisted form against a uniform two-axis twist grid.
    Hybrid {
        /// Modulus range (X1 = X2 = X).
        #[arg(long)]
        x: u64,
        /// Sequence length.
        #[arg(long)]
        n: u64,
        /// Twist half-height: nodes cover [-t, t] on both axes.
        #[arg(long, default_value_t = 4.0)]
        t: f64,
        /// Trapezoid nodes per axis.
        #[arg(long, default_value_t = 9)]
        nodes: usize,
        #[arg(long, value_enum, default_value_t = GenArg::Pm1)]
        generator: GenArg,
        /// Resonance frequency for the resonant generator.
        #[arg(long, default_value_t = 0.25)]
        theta: f64,
    },
    /// Evaluate one double-Bessel integral or two-variable kernel.
    Kernel {
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long, allow_negative_numbers = true)]
        y1: f64,
        #[arg(long, allow_negative_numbers = true)]
        y2: f64,
        /// Spectral parameter as three comma-separated axis coordinates
        /// (imaginary parts summing to zero).
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        mu: Vec<f64>,
    },
    /// Main-term volume sweep with its least-squares log2 slope.
    Volume {
        /// Localization heights.
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
        t: Vec<f64>,
        /// Vanishing levels of the localization polynomial.
        #[arg(long, default_value_t = 0)]
        a: u32,
        /// Window-shrinking exponent.
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        /// Localization center as three comma-separated axis coordinates.
        #[arg(long, value_delimiter = ',', default_value = "4,0,-4", allow_negative_numbers = true)]
        mu0: Vec<f64>,
    },
}

/// A failure with its contracted exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn failed(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    fn from_kernel(err: KernelError) -> Self {
        match err {
            KernelError::InvalidInput(_) => Failure::invalid(err.to_string()),
            _ => Failure::failed(err.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    configure_workers(cli.workers)?;
    if cli.format == Format::Csv && !matches!(cli.command, Command::Bilinear { .. }) {
        return Err(Failure::invalid(
            "csv format is available only for the bilinear scan table",
        ));
    }

    let mut lines: Vec<String> = vec![emit(json!({ "schema": 1 }))];
    let mut exit_failure: Option<Failure> = None;

    match &cli.command {
        Command::Sum { m, n, d1, d2, mode } => {
            if *d1 < 1 || *d2 < 1 {
                return Err(Failure::invalid("moduli must be positive"));
            }
            let order = lcm(*d1, *d2);
            let counts = s_long_bruteforce_vector(1, *m, *n, 1, *d1, *d2);
            let exact = CycloValue::from_counts(&counts, order)
                .map_err(|e| Failure::invalid(e.to_string()))?;
            let value = exact.to_complex();
            let mut record = json!({
                "kind": "sum",
                "m": m,
                "n": n,
                "d1": d1,
                "d2": d2,
                "mode": mode.name(),
                "value_re": value.re,
                "value_im": value.im,
            });
            if let Mode::Exact = mode {
                insert(&mut record, "exact", exact_string(&exact));
            }
            lines.push(emit(record));
        }
        Command::Tilde {
            n1,
            n2,
            m1,
            d1,
            d2,
            mode,
        } => {
            let exact = s_tilde(*n1, *n2, *m1, *d1, *d2)
                .map_err(|e| Failure::invalid(e.to_string()))?;
            let value = exact.to_complex();
            let mut record = json!({
                "kind": "tilde",
                "n1": n1,
                "n2": n2,
                "m1": m1,
                "d1": d1,
                "d2": d2,
                "mode": mode.name(),
                "value_re": value.re,
                "value_im": value.im,
            });
            if let Mode::Exact = mode {
                insert(&mut record, "exact", exact_string(&exact));
            }
            lines.push(emit(record));
        }
        Command::Decompose { m, n, d1, d2, mode } => {
            if *m < 1 || *n < 1 {
                return Err(Failure::invalid("twists must be positive for the decomposition"));
            }
            if *d1 < 1 || *d2 < 1 {
                return Err(Failure::invalid("moduli must be positive"));
            }
            let eval = s_long_decomposed(*m, *n, *d1, *d2, mode.eval_mode());
            let mut record = json!({
                "kind": "decompose",
                "m": m,
                "n": n,
                "d1": d1,
                "d2": d2,
                "mode": mode.name(),
                "value_re": eval.value.re,
                "value_im": eval.value.im,
                "n_tuples": eval.stats.n_tuples,
                "n_contributing": eval.stats.n_contributing,
                "classical_work": eval.stats.classical_work,
            });
            if let Some(exact) = &eval.exact {
                insert(&mut record, "exact", exact_string(exact));
            }
            lines.push(emit(record));
        }
        Command::Verify { dmax, mn, mode } => {
            if *dmax < 1 {
                return Err(Failure::invalid("dmax must be positive"));
            }
            if mn.is_empty() {
                return Err(Failure::invalid("the twist list must be nonempty"));
            }
            let pairs: Vec<(u64, u64)> = (1..=*dmax)
                .flat_map(|d1| (1..=*dmax).map(move |d2| (d1, d2)))
                .collect();
            let mns: Vec<(i64, i64)> = mn
                .iter()
                .flat_map(|&m| mn.iter().map(move |&n| (m, n)))
                .collect();
            let report = verify_decomposition(&pairs, &mns, mode.eval_mode());
            eprintln!(
                "verified {} cells in {} ms",
                report.records.len(),
                report.elapsed_ms
            );
            for r in &report.records {
                let mut record = serde_json::to_value(r).expect("serializable record");
                insert(&mut record, "kind", "verify");
                lines.push(emit(record));
            }
            lines.push(emit(json!({
                "kind": "verify_summary",
                "cells": report.records.len(),
                "pairs": pairs.len(),
                "mismatches": report.mismatches,
                "total_tuples": report.total_tuples,
            })));
            if report.mismatches > 0 {
                exit_failure = Some(Failure::failed(format!(
                    "{} verification mismatches",
                    report.mismatches
                )));
            }
        }
        Command::Bilinear {
            x,
            n,
            trials,
            generator,
            theta,
        } => {
            if *trials < 1 {
                return Err(Failure::invalid("trials must be at least 1"));
            }
            if x.iter().any(|&v| v < 1) || n.iter().any(|&v| v < 1) {
                return Err(Failure::invalid("ranges and lengths must be positive"));
            }
            let records = scan(x, n, resolve_generator(*generator, *theta), cli.seed, *trials);
            if cli.format == Format::Csv {
                let mut buf = Vec::new();
                write_csv(&records, &mut buf).map_err(|e| Failure::invalid(e.to_string()))?;
                return write_output(cli, buf);
            }
            for r in &records {
                let mut record = serde_json::to_value(r).expect("serializable record");
                insert(&mut record, "kind", "bilinear");
                lines.push(emit(record));
            }
        }
        Command::Hybrid {
            x,
            n,
            t,
            nodes,
            generator,
            theta,
        } => {
            if *x < 1 || *n < 1 {
                return Err(Failure::invalid("ranges and lengths must be positive"));
            }
            if *nodes < 2 {
                return Err(Failure::invalid("need at least two nodes per axis"));
            }
            if *t < 1.0 {
                return Err(Failure::invalid("the twist half-height must be at least 1"));
            }
            let axis = uniform_t_nodes(*t, *nodes);
            let grid: Vec<HybridNode> = axis
                .iter()
                .flat_map(|&(t1, w1)| {
                    axis.iter().map(move |&(t2, w2)| {
                        (Complex64::new(0.0, t1), Complex64::new(0.0, t2), w1 * w2)
                    })
                })
                .collect();
            let seqs = SeqPair::generate(
                resolve_generator(*generator, *theta),
                *n as usize,
                cli.seed,
            );
            let value = hybrid_form(&seqs, *x, *x, &grid);
            let (t1, t2, s1w, s2w) = grid_extents(&grid);
            let (na, nb) = seqs.norms();
            let envelope = hybrid_envelope(*x, *x, *n, t1, t2, s1w, s2w, na, nb);
            lines.push(emit(json!({
                "kind": "hybrid",
                "x": x,
                "n": n,
                "t": t,
                "nodes": nodes,
                "seed": cli.seed,
                "value": value,
                "t1": t1,
                "t2": t2,
                "s1w": s1w,
                "s2w": s2w,
                "envelope": envelope,
                "ratio": value / envelope,
            })));
        }
        Command::Kernel { which, y1, y2, mu } => {
            let point = parse_axis(mu)?;
            let query =
                KernelQuery::new(*y1, *y2, point).map_err(Failure::from_kernel)?;
            let eval = match which {
                Which::J1p => j_double(DoubleBesselKind::J1(Sign::Plus), &query),
                Which::J1m => j_double(DoubleBesselKind::J1(Sign::Minus), &query),
                Which::J2 => j_double(DoubleBesselKind::J2, &query),
                Which::J3 => j_double(DoubleBesselKind::J3, &query),
                Which::J4 => j_double(DoubleBesselKind::J4, &query),
                Which::J5 => j_double(DoubleBesselKind::J5, &query),
                Which::Mb => mellin_barnes_pp(&query),
                Which::Assembled => assembled_kernel(&query),
            }
            .map_err(Failure::from_kernel)?;
            lines.push(emit(json!({
                "which": which.name(),
                "y1": y1,
                "y2": y2,
                "mu": mu,
                "value_re": eval.value.re,
                "value_im": eval.value.im,
                "est_error": eval.est_error,
                "converged": eval.converged,
            })));
        }
        Command::Volume { t, a, eps, mu0 } => {
            if t.is_empty() {
                return Err(Failure::invalid("the height list must be nonempty"));
            }
            let center = parse_axis(mu0)?;
            let mut samples = Vec::new();
            for &height in t {
                let params = TestFunctionParams::new(height, center, *a, *eps)
                    .map_err(Failure::from_kernel)?;
                let volume = main_term_volume(&params).map_err(Failure::from_kernel)?;
                samples.push((height, volume));
                lines.push(emit(json!({
                    "kind": "volume",
                    "t": height,
                    "value": volume,
                })));
            }
            let mut summary = json!({
                "kind": "volume_summary",
                "a": a,
                "eps": eps,
                "mu0": mu0,
            });
            if samples.len() >= 2 && samples.iter().all(|&(_, v)| v > 0.0) {
                insert(&mut summary, "slope", least_squares_log2_slope(&samples));
            }
            lines.push(emit(summary));
        }
    }

    let mut buf = Vec::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
    for line in &lines {
        buf.extend_from_slice(line.as_bytes());
        buf.push(b'\n');
    }
    write_output(cli, buf)?;
    match exit_failure {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

/// Configure the global worker pool from --workers or GL3K_THREADS.
fn configure_workers(flag: Option<usize>) -> Result<(), Failure> {
    let workers = match flag {
        Some(w) => Some(w),
        None => match std::env::var("GL3K_THREADS") {
            Ok(raw) => Some(
                raw.parse::<usize>()
                    .map_err(|_| Failure::invalid(format!("GL3K_THREADS must be a positive integer, got {raw:?}")))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(w) = workers {
        if w < 1 {
            return Err(Failure::invalid("workers must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| Failure::invalid(e.to_string()))?;
    }
    Ok(())
}

fn resolve_generator(arg: GenArg, theta: f64) -> Generator {
    match arg {
        GenArg::Unit => Generator::Unit,
        GenArg::Pm1 => Generator::RandomPm1,
        GenArg::Complex => Generator::RandomComplex,
        GenArg::Resonant => Generator::Resonant { theta },
    }
}

fn parse_axis(coords: &[f64]) -> Result<SpectralPoint, Failure> {
    let arr: [f64; 3] = coords
        .try_into()
        .map_err(|_| Failure::invalid("expected exactly three comma-separated coordinates"))?;
    SpectralPoint::from_axis(arr).map_err(Failure::from_kernel)
}

/// Serialize a record; `serde_json` maps iterate in sorted key order, which
/// keeps every emitted line byte-stable.
fn emit(record: Value) -> String {
    serde_json::to_string(&record).expect("serializable record")
}

fn insert(record: &mut Value, key: &str, value: impl Into<Value>) {
    record
        .as_object_mut()
        .expect("record is an object")
        .insert(key.to_string(), value.into());
}

/// Exact value as a deterministic term list `c*e(k/q)` over the stored
/// root-of-unity basis, in ascending `k`.
fn exact_string(value: &CycloValue) -> String {
    let q = value.order();
    let mut out = String::new();
    for (k, c) in value.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if !out.is_empty() {
            out.push_str(" + ");
        }
        out.push_str(&format!("{c}*e({k}/{q})"));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn write_output(cli: &Cli, buf: Vec<u8>) -> Result<(), Failure> {
    match &cli.output {
        Some(path) => std::fs::write(path, buf)
            .map_err(|e| Failure::invalid(format!("cannot write {}: {e}", path.display()))),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(&buf)
                .and_then(|_| lock.flush())
                .map_err(|e| Failure::invalid(format!("cannot write to stdout: {e}")))
        }
    }
}
