//! `cohlab` — coherence detection and quantification from the command line.
//!
//! One binary, six subcommands:
//!
//! - `measure STATE`: both off-diagonal coherence quantifiers, the
//!   robustness value with solver gaps, the inequality-chain flags, and the
//!   rescaling residual when the state is coherent.
//! - `witness make|check|finer`: construct the dephasing witness of a
//!   coherent state, classify a candidate matrix (validity and optimality),
//!   or decide whether the second of two witnesses is finer than the first.
//! - `tomo stokes|qudit STATE`: simulate a tomography run against the given
//!   state, reconstruct, and report the trace distance back to the input
//!   together with the statistical coherence verdict. `stokes` is the
//!   four-intensity qubit protocol; `qudit` measures every generator.
//! - `detect STATE`: walk the off-diagonal observables in seeded random
//!   order until one reads significantly nonzero.
//! - `expected N I`: expected number of measurements until the first
//!   nonzero observable, by term sum, closed form, and Monte Carlo.
//! - `verify [SUITE]`: run the self-verification suites and exit nonzero
//!   if any check fails.
//!
//! Reports are deterministic given the inputs and `--seed`: JSON fields are
//! emitted in a fixed order and floats with 17 significant digits, so
//! identical invocations produce byte-identical output. `--format csv`
//! selects a flat table per command (matrices are never rendered to CSV);
//! `--out PATH` writes the report to a file instead of stdout. Non-finite
//! values (infinite z-scores) render as `null` in both formats.
//!
//! Exit codes: 0 success, 1 verification failure, 2 unreadable or
//! unparseable input files, 3 solver non-convergence (best bounds are in
//! the message), 4 domain rejections (for example an incoherent state where
//! a coherent one is needed, or a semantically invalid flag value), 5
//! command-line usage errors, including a tomography mode that does not fit
//! the state's dimension.

use std::fs;
use std::path::{Path, PathBuf};
use std::process;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cohlab::error::Error;
use cohlab::io::{self, fmt_float};
use cohlab::linalg::{trace_distance, DensityMatrix};
use cohlab::measures::{ratio_check, roc, scaling_check};
use cohlab::report::{csv_pairs, csv_table, json_array, json_uints, JsonObject};
use cohlab::scheduler::{
    detect, expectation_report, DetectionResult, OrderPolicy, Verdict, QUOTED_MEAN_56_28,
};
use cohlab::tomo::{
    coherence_decision, expectation_record, measure_generator, reconstruct, stokes_expectation,
    stokes_reconstruct, stokes_simulate, su_basis, CoherenceDecision, CountRecord, GeneratorBasis,
    GeneratorLabel, Reconstruction, BASIS_MAX_DIM,
};
use cohlab::verify::{self, Suite, VerifyConfig};
use cohlab::witness::{construct_witness, is_finer, is_witness, GeneratorPart, Witness};

#[derive(Parser)]
#[command(
    name = "cohlab",
    version,
    about = "Detect and quantify quantum coherence in a fixed reference basis",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    run: RunConfig,
}

/// Settings shared by every subcommand. Flags override the `COHLAB_*`
/// environment variables, which override the defaults.
#[derive(Args)]
struct RunConfig {
    /// Seed for every pseudo-random draw.
    #[arg(long, global = true, env = "COHLAB_SEED", default_value_t = 0)]
    seed: u64,

    /// Numerical tolerance for input validation and classification.
    #[arg(long, global = true, env = "COHLAB_TOL", default_value_t = 1e-9)]
    tol: f64,

    /// Shots per measurement; 0 selects the exact expectation mode.
    #[arg(long, global = true, default_value_t = 10_000)]
    shots: u64,

    /// Significance level for statistical coherence verdicts.
    #[arg(long, global = true, default_value_t = 1e-3)]
    alpha: f64,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the report to PATH instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Coherence measures and robustness of a state.
    Measure {
        /// State file (JSON matrix object).
        state: PathBuf,
    },
    /// Build, classify, and compare coherence witnesses.
    Witness {
        #[command(subcommand)]
        sub: WitnessCmd,
    },
    /// Simulated tomography: reconstruct the state and test for coherence.
    Tomo {
        /// Protocol: four-intensity qubit counts or per-generator sampling.
        #[arg(value_enum)]
        mode: TomoMode,
        /// State file to simulate measurements on.
        state: PathBuf,
    },
    /// Adaptive detection walk over the off-diagonal observables.
    Detect {
        /// State file the measurement oracle draws from.
        state: PathBuf,
    },
    /// Expected measurements until the first nonzero observable.
    Expected {
        /// Total number of off-diagonal observables.
        n: usize,
        /// How many of them are nonzero.
        i: usize,
        /// Monte Carlo sample size.
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Run the self-verification suites; nonzero exit on any failure.
    Verify {
        /// Suite to run.
        #[arg(value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        /// Randomized trials per suite.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
}

#[derive(Subcommand)]
enum WitnessCmd {
    /// Construct the zero-diagonal witness that detects the given state.
    ///
    /// The report is the witness file itself (always JSON), ready to feed
    /// back into `check` or `finer`.
    Make {
        /// Coherent state file.
        state: PathBuf,
    },
    /// Validity and optimality of a candidate witness matrix.
    Check {
        /// Witness file, or a bare matrix object.
        witness: PathBuf,
    },
    /// Decide whether the second witness is finer than the first.
    ///
    /// Finer means every state the first detects, the second detects with
    /// an expectation at least as negative.
    Finer {
        /// The witness being decomposed.
        coarse: PathBuf,
        /// The candidate finer witness.
        fine: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TomoMode {
    /// Four-intensity polarization protocol; requires a qubit state.
    Stokes,
    /// One sampled record per generator; any supported dimension.
    Qudit,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    All,
    Norm,
    Theorem1,
    Theorem2,
    Lemma1,
    Theorem3,
    Theorem4,
    #[value(name = "e_n")]
    ExpectedMeasurements,
}

impl SuiteArg {
    fn token(self) -> &'static str {
        match self {
            SuiteArg::All => "all",
            SuiteArg::Norm => Suite::Norm.token(),
            SuiteArg::Theorem1 => Suite::Theorem1.token(),
            SuiteArg::Theorem2 => Suite::Theorem2.token(),
            SuiteArg::Lemma1 => Suite::Lemma1.token(),
            SuiteArg::Theorem3 => Suite::Theorem3.token(),
            SuiteArg::Theorem4 => Suite::Theorem4.token(),
            SuiteArg::ExpectedMeasurements => Suite::ExpectedMeasurements.token(),
        }
    }
}

/// A finished report: the rendered payload and the process exit code
/// (0 everywhere except a failed verification run, which reports 1).
struct Output {
    payload: String,
    code: i32,
}

impl Output {
    fn ok(payload: String) -> Self {
        Self { payload, code: 0 }
    }
}

/// A failed run: exit code plus the message for stderr.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 5,
            message: message.into(),
        }
    }

    fn parse(path: &Path, err: impl std::fmt::Display) -> Self {
        Self {
            code: 2,
            message: format!("{}: {err}", path.display()),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match &err {
            Error::Parse(_) | Error::Json(_) | Error::Io(_) => 2,
            Error::NonConvergence { .. } | Error::LinearProgram(_) | Error::InvalidBoundWitness(_) => 3,
            _ => 4,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 5,
            };
            let _ = err.print();
            process::exit(code);
        }
    };
    let out_path = cli.run.out.clone();
    match dispatch(cli.command, &cli.run) {
        Ok(output) => {
            if let Err(err) = deliver(&output.payload, out_path.as_deref()) {
                eprintln!("error: {err}");
                process::exit(2);
            }
            process::exit(output.code);
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            process::exit(failure.code);
        }
    }
}

/// Print the payload to stdout or write it to the requested file, with a
/// single trailing newline either way.
fn deliver(payload: &str, out: Option<&Path>) -> std::io::Result<()> {
    let mut text = payload.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dispatch(command: Command, run: &RunConfig) -> Result<Output, Failure> {
    match command {
        Command::Measure { state } => cmd_measure(&state, run),
        Command::Witness { sub } => match sub {
            WitnessCmd::Make { state } => cmd_witness_make(&state, run),
            WitnessCmd::Check { witness } => cmd_witness_check(&witness, run),
            WitnessCmd::Finer { coarse, fine } => cmd_witness_finer(&coarse, &fine, run),
        },
        Command::Tomo { mode, state } => cmd_tomo(mode, &state, run),
        Command::Detect { state } => cmd_detect(&state, run),
        Command::Expected { n, i, trials } => cmd_expected(n, i, trials, run),
        Command::Verify { suite, trials } => cmd_verify(suite, trials, run),
    }
}

/// Read a file and parse it as a validated density matrix. Any failure to
/// produce a state from the file is an input problem (exit code 2).
fn load_state(path: &Path, tol: f64) -> Result<DensityMatrix, Failure> {
    let text = fs::read_to_string(path).map_err(|err| Failure::parse(path, err))?;
    io::parse_state(&text, tol).map_err(|err| Failure::parse(path, err))
}

/// Read a file and parse it as a validated witness (bare matrices are
/// accepted as candidates). Failures are input problems (exit code 2).
fn load_witness(path: &Path) -> Result<Witness, Failure> {
    let text = fs::read_to_string(path).map_err(|err| Failure::parse(path, err))?;
    io::parse_witness(&text).map_err(|err| Failure::parse(path, err))
}

/// Per-generator seed, decorrelated from the run seed by the flat index.
fn record_seed(seed: u64, j: usize) -> u64 {
    seed ^ (j as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

// ---- measure ---------------------------------------------------------

fn cmd_measure(state: &Path, run: &RunConfig) -> Result<Output, Failure> {
    let rho = load_state(state, run.tol)?;
    let ratio = ratio_check(&rho, run.tol);
    let sol = roc(&rho, run.tol)?;
    // The rescaled state exists only when the robustness is nonzero, which
    // for a valid state means it carries coherence at all.
    let rescale = if sol.value > run.tol {
        Some(scaling_check(&rho, run.tol)?)
    } else {
        None
    };

    let residual = rescale.as_ref().map(|sc| sc.residual);
    let tau_coherence = rescale.as_ref().map(|sc| sc.tau_coherence);
    let unit_bound_ok = rescale.as_ref().map(|sc| sc.unit_bound_ok);

    let payload = match run.format {
        Format::Json => JsonObject::new()
            .string("kind", "measure")
            .uint("dim", rho.dim() as u64)
            .float("c_h", ratio.c_h)
            .float("c_l1", ratio.c_l1)
            .float("roc", sol.value)
            .boolean("chain_upper_ok", ratio.upper_ok)
            .boolean("chain_lower_ok", ratio.lower_ok)
            .boolean("chain_upper_tight", ratio.upper_tight)
            .boolean("chain_lower_tight", ratio.lower_tight)
            .uint("iterations", sol.iterations as u64)
            .float("primal_gap", sol.primal_gap)
            .float("dual_gap", sol.dual_gap)
            .opt_float("rescaling_residual", residual)
            .opt_float("residual_coherence", tau_coherence)
            .raw(
                "unit_bound_ok",
                match unit_bound_ok {
                    Some(true) => "true",
                    Some(false) => "false",
                    None => "null",
                },
            )
            .finish(),
        Format::Csv => csv_pairs(&[
            ("dim", rho.dim().to_string()),
            ("c_h", fmt_float(ratio.c_h)),
            ("c_l1", fmt_float(ratio.c_l1)),
            ("roc", fmt_float(sol.value)),
            ("chain_upper_ok", ratio.upper_ok.to_string()),
            ("chain_lower_ok", ratio.lower_ok.to_string()),
            ("chain_upper_tight", ratio.upper_tight.to_string()),
            ("chain_lower_tight", ratio.lower_tight.to_string()),
            ("iterations", sol.iterations.to_string()),
            ("primal_gap", fmt_float(sol.primal_gap)),
            ("dual_gap", fmt_float(sol.dual_gap)),
            (
                "rescaling_residual",
                residual.map(fmt_float).unwrap_or_default(),
            ),
            (
                "residual_coherence",
                tau_coherence.map(fmt_float).unwrap_or_default(),
            ),
            (
                "unit_bound_ok",
                unit_bound_ok.map(|b| b.to_string()).unwrap_or_default(),
            ),
        ]),
    };
    Ok(Output::ok(payload))
}

// ---- witness ---------------------------------------------------------

fn cmd_witness_make(state: &Path, run: &RunConfig) -> Result<Output, Failure> {
    let rho = load_state(state, run.tol)?;
    let w = construct_witness(&rho, run.tol)?;
    // The product of `make` is a witness file, not a report; it is emitted
    // in the witness JSON format regardless of --format so it can be fed
    // straight back into `check` and `finer`.
    Ok(Output::ok(io::witness_json(&w)))
}

fn cmd_witness_check(path: &Path, run: &RunConfig) -> Result<Output, Failure> {
    let text = fs::read_to_string(path).map_err(|err| Failure::parse(path, err))?;
    let (matrix, tol) = match io::parse_any(&text, run.tol).map_err(|err| Failure::parse(path, err))? {
        io::ParsedInput::Matrix(m) => (m, run.tol),
        io::ParsedInput::Witness { matrix, tol } => (matrix, tol.unwrap_or(run.tol)),
        io::ParsedInput::Channel(_) => {
            return Err(Failure::parse(
                path,
                "expected a matrix or witness object, found a channel",
            ))
        }
    };
    let check = is_witness(&matrix, tol);
    // Optimality is a property of valid witnesses: a zero diagonal.
    let optimal = check.valid
        && Witness::new(matrix, tol)
            .map(|w| w.is_optimal())
            .unwrap_or(false);

    let payload = match run.format {
        Format::Json => JsonObject::new()
            .string("kind", "witness_check")
            .boolean("witness", check.valid)
            .boolean("optimal", optimal)
            .opt_string("failure", check.failure.as_deref())
            .float("min_diag", check.min_diag)
            .float("lambda_min", check.lambda_min)
            .float("trace", check.trace)
            .finish(),
        Format::Csv => csv_pairs(&[
            ("witness", check.valid.to_string()),
            ("optimal", optimal.to_string()),
            ("failure", check.failure.clone().unwrap_or_default()),
            ("min_diag", fmt_float(check.min_diag)),
            ("lambda_min", fmt_float(check.lambda_min)),
            ("trace", fmt_float(check.trace)),
        ]),
    };
    Ok(Output::ok(payload))
}

fn cmd_witness_finer(coarse: &Path, fine: &Path, run: &RunConfig) -> Result<Output, Failure> {
    let w1 = load_witness(coarse)?;
    let w2 = load_witness(fine)?;
    let report = is_finer(&w1, &w2)?;

    let payload = match run.format {
        Format::Json => {
            let positive = report
                .positive_part
                .as_ref()
                .map(io::matrix_json)
                .unwrap_or_else(|| "null".into());
            JsonObject::new()
                .string("kind", "finer")
                .boolean("finer", report.finer)
                .opt_float("epsilon", report.epsilon)
                .opt_float("xi_lower", report.xi_lower)
                .opt_float("witness_margin", report.witness_margin)
                .raw("positive_part", &positive)
                .finish()
        }
        Format::Csv => csv_pairs(&[
            ("finer", report.finer.to_string()),
            ("epsilon", report.epsilon.map(fmt_float).unwrap_or_default()),
            (
                "xi_lower",
                report.xi_lower.map(fmt_float).unwrap_or_default(),
            ),
            (
                "witness_margin",
                report.witness_margin.map(fmt_float).unwrap_or_default(),
            ),
        ]),
    };
    Ok(Output::ok(payload))
}

// ---- tomography ------------------------------------------------------

fn cmd_tomo(mode: TomoMode, state: &Path, run: &RunConfig) -> Result<Output, Failure> {
    let rho = load_state(state, run.tol)?;
    let d = rho.dim();
    match mode {
        TomoMode::Stokes => {
            if d != 2 {
                return Err(Failure::usage(format!(
                    "stokes mode measures a qubit; the state has dimension {d} \
                     (use the qudit mode instead)"
                )));
            }
        }
        TomoMode::Qudit => {
            if !(2..=BASIS_MAX_DIM).contains(&d) {
                return Err(Failure::usage(format!(
                    "qudit mode supports 2 <= d <= {BASIS_MAX_DIM}, got {d}"
                )));
            }
        }
    }

    let basis = su_basis(d).map_err(Failure::from)?;
    let (recon, records, intensities) = match mode {
        TomoMode::Stokes => {
            let rec = if run.shots == 0 {
                stokes_expectation(&rho, 1.0)?
            } else {
                stokes_simulate(&rho, run.shots as f64, run.seed)?
            };
            let recon = stokes_reconstruct(&rec)?;
            let records = stokes_offdiag_records(&rec, &recon, &basis, run.shots)?;
            (recon, records, Some(rec.n))
        }
        TomoMode::Qudit => {
            let mut records = Vec::with_capacity(basis.len());
            for j in 0..basis.len() {
                let rec = if run.shots == 0 {
                    expectation_record(&rho, &basis, j)?
                } else {
                    measure_generator(&rho, &basis, j, run.shots, record_seed(run.seed, j))?
                };
                records.push(rec);
            }
            let recon = reconstruct(d, &records, &basis)?;
            let offdiag: Vec<CountRecord> = records
                .iter()
                .filter(|r| basis.is_offdiag(r.index))
                .cloned()
                .collect();
            (recon, offdiag, None)
        }
    };
    let distance = trace_distance(rho.matrix(), recon.projected.matrix(), run.tol)?;
    let decision = coherence_decision(&records, &basis, run.alpha)?;

    let mode_name = match mode {
        TomoMode::Stokes => "stokes",
        TomoMode::Qudit => "qudit",
    };
    let payload = match run.format {
        Format::Json => tomo_json(
            mode_name, d, run, &recon, distance, &decision, &records, intensities,
        ),
        Format::Csv => {
            let rows: Vec<Vec<String>> = records
                .iter()
                .map(|r| {
                    vec![
                        r.index.to_string(),
                        fmt_float(r.estimate),
                        fmt_float(r.stderr),
                    ]
                })
                .collect();
            csv_table(&["index", "estimate", "stderr"], &rows)
        }
    };
    Ok(Output::ok(payload))
}

#[allow(clippy::too_many_arguments)]
fn tomo_json(
    mode: &str,
    d: usize,
    run: &RunConfig,
    recon: &Reconstruction,
    distance: f64,
    decision: &CoherenceDecision,
    records: &[CountRecord],
    intensities: Option<[f64; 4]>,
) -> String {
    let record_objs = records.iter().map(|r| {
        JsonObject::new()
            .uint("index", r.index as u64)
            .uint("shots", r.shots)
            .float("estimate", r.estimate)
            .float("stderr", r.stderr)
            .finish()
    });
    let z_pairs = decision
        .z_scores
        .iter()
        .map(|&(j, z)| format!("[{j},{}]", fmt_float(z)));
    let intensity_json = match intensities {
        Some(n) => format!("[{}]", io::fmt_floats(&n)),
        None => "null".into(),
    };
    JsonObject::new()
        .string("kind", "tomography")
        .string("mode", mode)
        .uint("dim", d as u64)
        .uint("shots", run.shots)
        .uint("seed", run.seed)
        .float("trace_distance", distance)
        .boolean("coherent", decision.coherent)
        .opt_uint("witness_index", decision.witness_index.map(|j| j as u64))
        .float("threshold", decision.threshold)
        .raw("z_scores", &json_array(z_pairs))
        .raw("records", &json_array(record_objs))
        .raw("intensities", &intensity_json)
        .raw("raw", &io::matrix_json(&recon.raw))
        .raw("projected", &io::matrix_json(recon.projected.matrix()))
        .finish()
}

/// Off-diagonal measurement records derived from a four-intensity run, so
/// the qubit protocol feeds the same coherence decision as the generator
/// one. In expectation mode the records are exact; in sampled mode the
/// standard errors come from first-order propagation of independent
/// Poisson counts through the contrast ratios, with each count's variance
/// estimated by the count itself (floored at one).
fn stokes_offdiag_records(
    rec: &cohlab::tomo::StokesRecord,
    recon: &Reconstruction,
    basis: &GeneratorBasis,
    shots: u64,
) -> Result<Vec<CountRecord>, Failure> {
    let re_index = basis.index_of(GeneratorLabel::Offdiag {
        l: 0,
        m: 1,
        part: GeneratorPart::Real,
    })?;
    let im_index = basis.index_of(GeneratorLabel::Offdiag {
        l: 0,
        m: 1,
        part: GeneratorPart::Imag,
    })?;
    let entry = recon.raw[(0, 1)];
    let exact = shots == 0;
    let n0 = rec.n[0];
    // estimate = (n0 - nk) / (2 n0) up to sign, so the gradient is
    // (nk / (2 n0^2), -1 / (2 n0)) and the Poisson variances add in
    // quadrature.
    let stderr_for = |nk: f64| -> f64 {
        let v0 = n0.max(1.0);
        let vk = nk.max(1.0);
        ((nk / (2.0 * n0 * n0)).powi(2) * v0 + vk / (4.0 * n0 * n0)).sqrt()
    };
    let record = |index: usize, estimate: f64, nk: f64| CountRecord {
        index,
        shots: if exact { 0 } else { shots },
        values: Vec::new(),
        counts: Vec::new(),
        estimate,
        stderr: if exact { 0.0 } else { stderr_for(nk) },
    };
    Ok(vec![
        record(re_index, entry.re, rec.n[2]),
        record(im_index, entry.im, rec.n[3]),
    ])
}

// ---- detection walk ----------------------------------------------------

fn cmd_detect(state: &Path, run: &RunConfig) -> Result<Output, Failure> {
    let rho = load_state(state, run.tol)?;
    let d = rho.dim();
    let basis = su_basis(d)?;
    let seed = run.seed;
    let shots = run.shots;
    let oracle = |j: usize, s: u64| {
        if s == 0 {
            expectation_record(&rho, &basis, j)
        } else {
            measure_generator(&rho, &basis, j, s, record_seed(seed, j))
        }
    };
    let result = detect(oracle, d, OrderPolicy::Random, shots, run.alpha, seed)?;

    let payload = match run.format {
        Format::Json => detect_json(d, run, &result),
        Format::Csv => {
            let rows: Vec<Vec<String>> = result
                .z_scores
                .iter()
                .enumerate()
                .map(|(step, &z)| {
                    vec![
                        step.to_string(),
                        result.ordering[step].to_string(),
                        fmt_float(z),
                    ]
                })
                .collect();
            csv_table(&["step", "generator", "z"], &rows)
        }
    };
    Ok(Output::ok(payload))
}

fn detect_json(d: usize, run: &RunConfig, result: &DetectionResult) -> String {
    let verdict = match result.verdict {
        Verdict::Coherent => "coherent",
        Verdict::Incoherent => "incoherent",
        Verdict::Inconclusive => "inconclusive",
    };
    let z_json = json_array(result.z_scores.iter().map(|&z| fmt_float(z)));
    JsonObject::new()
        .string("kind", "detect")
        .uint("dim", d as u64)
        .uint("shots", run.shots)
        .float("alpha", run.alpha)
        .uint("seed", run.seed)
        .string("verdict", verdict)
        .uint("measurements_used", result.measurements_used as u64)
        .opt_uint("witness_index", result.witness_index.map(|j| j as u64))
        .raw("ordering", &json_uints(&result.ordering))
        .raw("z_scores", &z_json)
        .finish()
}

// ---- expected measurements ----------------------------------------------

fn cmd_expected(n: usize, i: usize, trials: u64, run: &RunConfig) -> Result<Output, Failure> {
    let report = expectation_report(n, i, trials, run.seed)?;
    // The published reference value exists for one configuration only; its
    // gap to the term-sum formula is reported, never asserted.
    let quoted = (n == 56 && i == 28).then_some(QUOTED_MEAN_56_28);
    let discrepancy = quoted.map(|q| (q - report.e_formula).abs());

    let payload = match run.format {
        Format::Json => JsonObject::new()
            .string("kind", "expected_measurements")
            .uint("n", n as u64)
            .uint("i", i as u64)
            .uint("trials", trials)
            .uint("seed", run.seed)
            .float("e_formula", report.e_formula)
            .float("e_closed", report.e_closed)
            .float("e_mc", report.e_mc)
            .float("mc_stderr", report.mc_stderr)
            .opt_float("quoted_reference", quoted)
            .opt_float("quoted_discrepancy", discrepancy)
            .finish(),
        Format::Csv => csv_table(
            &["n", "i", "e_formula", "e_closed", "e_mc", "mc_stderr"],
            &[vec![
                n.to_string(),
                i.to_string(),
                fmt_float(report.e_formula),
                fmt_float(report.e_closed),
                fmt_float(report.e_mc),
                fmt_float(report.mc_stderr),
            ]],
        ),
    };
    Ok(Output::ok(payload))
}

// ---- verification --------------------------------------------------------

fn cmd_verify(suite: SuiteArg, trials: usize, run: &RunConfig) -> Result<Output, Failure> {
    let cfg = VerifyConfig {
        trials,
        seed: run.seed,
        tol: run.tol,
    };
    let reports = match suite {
        SuiteArg::All => verify::run_all(&cfg)?,
        SuiteArg::Norm => vec![verify::run(Suite::Norm, &cfg)?],
        SuiteArg::Theorem1 => vec![verify::run(Suite::Theorem1, &cfg)?],
        SuiteArg::Theorem2 => vec![verify::run(Suite::Theorem2, &cfg)?],
        SuiteArg::Lemma1 => vec![verify::run(Suite::Lemma1, &cfg)?],
        SuiteArg::Theorem3 => vec![verify::run(Suite::Theorem3, &cfg)?],
        SuiteArg::Theorem4 => vec![verify::run(Suite::Theorem4, &cfg)?],
        SuiteArg::ExpectedMeasurements => {
            vec![verify::run(Suite::ExpectedMeasurements, &cfg)?]
        }
    };
    let passed = reports.iter().all(|r| r.passed());

    let payload = match run.format {
        Format::Json => {
            let suite_objs = reports.iter().map(|r| {
                let checks = r.checks.iter().map(|c| {
                    JsonObject::new()
                        .string("name", c.name)
                        .boolean("passed", c.passed)
                        .string("detail", &c.detail)
                        .finish()
                });
                JsonObject::new()
                    .string("suite", r.suite)
                    .boolean("passed", r.passed())
                    .raw("checks", &json_array(checks))
                    .finish()
            });
            JsonObject::new()
                .string("kind", "verify")
                .string("suite", suite.token())
                .uint("trials", trials as u64)
                .uint("seed", run.seed)
                .boolean("passed", passed)
                .raw("suites", &json_array(suite_objs))
                .finish()
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = reports
                .iter()
                .flat_map(|r| {
                    r.checks.iter().map(|c| {
                        vec![
                            r.suite.to_string(),
                            c.name.to_string(),
                            c.passed.to_string(),
                            c.detail.clone(),
                        ]
                    })
                })
                .collect();
            csv_table(&["suite", "check", "passed", "detail"], &rows)
        }
    };
    Ok(Output {
        payload,
        code: if passed { 0 } else { 1 },
    })
}
