//! `dh-lab` command-line driver.
//!
//! Exit codes: 0 success (or log-concave), 1 operational or verification
//! failure, 2 usage or input error, 3 non-log-concavity found.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};

use crate::construction::{
    analytic_dh_density, build_connection, build_omega, canonical_chart, verify_construction,
    CutWindow, GaugePotential, OmegaParams, VerificationReport, DIM,
};
use crate::dh_measure::{self, Provenance, SamplerConfig};
use crate::exterior::{Poly, Rational};
use crate::logconcavity::{analytic_logconcavity, discrete_logconcavity, ViolationReport};
use crate::toric::{self, HPolytope, SliceMethod, ToricError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_LOG_CONCAVE: i32 = 3;

/// Relative error bound on the MC density for `density` to succeed.
pub const DENSITY_TOLERANCE: f64 = 0.03;

/// Environment variable capping sampler threads.
pub const THREADS_ENV: &str = "DH_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "dh-lab",
    version,
    about = "Duistermaat-Heckman densities of a non-log-concave circle action"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: RunOpts,
}

#[derive(Debug, Subcommand, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Check closedness, the moment map, nondegeneracy and Chern integrals.
    Verify,
    /// Monte-Carlo DH density compared with the analytic one.
    Density,
    /// Log-concavity of the analytic density or of sampled values.
    Logconcavity,
    /// Slice-volume profile of a polytope and its log-concavity.
    Toric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact2d,
    Mc,
}

#[derive(Debug, clap::Args, Clone)]
pub struct RunOpts {
    /// Cut window A B.
    #[arg(long, num_args = 2, value_names = ["A", "B"], global = true, allow_negative_numbers = true)]
    pub window: Option<Vec<f64>>,
    /// Monte-Carlo samples (total for density, per bin for toric).
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 40, global = true)]
    pub bins: usize,
    #[arg(long, default_value_t = 42, global = true)]
    pub seed: u64,
    /// Constants c1 c2 of the symplectic form (integers, decimals or p/q).
    #[arg(long, num_args = 2, value_names = ["C1", "C2"], global = true, allow_negative_numbers = true)]
    pub params: Option<Vec<String>>,
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Use the analytic density (logconcavity).
    #[arg(long, global = true)]
    pub analytic: bool,
    /// Constant Liouville density instead of the constructed one (density).
    #[arg(long, global = true)]
    pub flat: bool,
    #[arg(long, default_value_t = 0, global = true)]
    pub axis: usize,
    #[arg(long, value_enum, global = true)]
    pub method: Option<MethodArg>,
    /// Relative slack for discrete log-concavity tests.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

/// Fully resolved configuration of one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub window: CutWindow,
    pub samples: Option<u64>,
    pub bins: usize,
    pub seed: u64,
    pub params: OmegaParams,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub analytic: bool,
    pub flat: bool,
    pub axis: usize,
    pub method: Option<MethodArg>,
    pub tol: Option<f64>,
    pub threads: Option<usize>,
}

pub const DEFAULT_DENSITY_SAMPLES: u64 = 2_000_000;
pub const DEFAULT_TORIC_SAMPLES: u64 = 100_000;

/// Usage errors carry exit code 2; everything else is reported in-command.
#[derive(Debug)]
pub struct UsageError(pub String);

fn parse_rational(s: &str) -> Result<Rational, UsageError> {
    if s.contains('/') {
        return Rational::from_str(s.trim()).map_err(|_| UsageError(format!("bad rational '{s}'")));
    }
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| UsageError(format!("bad number '{s}'")))?;
    Rational::from_float(v).ok_or_else(|| UsageError(format!("bad number '{s}'")))
}

impl RunConfig {
    pub fn from_cli(cli: Cli, threads_env: Option<String>) -> Result<Self, UsageError> {
        let o = cli.opts;
        let window = match o.window.as_deref() {
            None => CutWindow::default(),
            Some([a, b]) => CutWindow::new(*a, *b).map_err(|e| UsageError(e.to_string()))?,
            Some(_) => return Err(UsageError("--window takes two values".into())),
        };
        let params = match o.params.as_deref() {
            None => OmegaParams::standard(),
            Some([c1, c2]) => OmegaParams::unchecked(parse_rational(c1)?, parse_rational(c2)?),
            Some(_) => return Err(UsageError("--params takes two values".into())),
        };
        if o.bins < 2 {
            return Err(UsageError(format!(
                "--bins must be at least 2, got {}",
                o.bins
            )));
        }
        if let Some(t) = o.tol {
            if !(t.is_finite() && t >= 0.0) {
                return Err(UsageError(format!("--tol must be nonnegative, got {t}")));
            }
        }
        let threads = match threads_env {
            None => None,
            Some(v) => match v.trim().parse::<usize>() {
                Ok(n) if n > 0 => Some(n),
                _ => {
                    return Err(UsageError(format!(
                        "{THREADS_ENV} must be a positive integer, got '{v}'"
                    )))
                }
            },
        };
        Ok(RunConfig {
            command: cli.command,
            window,
            samples: o.samples,
            bins: o.bins,
            seed: o.seed,
            params,
            input: o.input,
            output: o.output,
            analytic: o.analytic,
            flat: o.flat,
            axis: o.axis,
            method: o.method,
            tol: o.tol,
            threads,
        })
    }

    fn params_label(&self) -> String {
        format!("c1={} c2={}", self.params.c1(), self.params.c2())
    }
}

/// Outcome of a command: exit code plus primary output destined for
/// `--output` or stdout.
struct Outcome {
    code: i32,
    primary: Vec<u8>,
}

fn emit(cfg: &RunConfig, primary: &[u8], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match &cfg.output {
        Some(path) => match fs::write(path, primary) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
                EXIT_FAILURE
            }
        },
        None => match stdout.write_all(primary) {
            Ok(()) => EXIT_OK,
            Err(_) => EXIT_FAILURE,
        },
    }
}

fn verified(cfg: &RunConfig) -> VerificationReport {
    let chart = canonical_chart(&cfg.window);
    let theta = build_connection(&GaugePotential::canonical(&chart))
        .expect("canonical gauge has the right curvature");
    verify_construction(&build_omega(&theta, &cfg.params), &cfg.window)
}

pub fn cmd_verify(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let report = verified(cfg);
    let _ = write!(stdout, "{}", report.to_table());
    let json = serde_json::to_string_pretty(&report.to_json()).expect("report serializes") + "\n";
    let status = if cfg.output.is_some() {
        emit(cfg, json.as_bytes(), stdout, stderr)
    } else {
        let _ = stdout.write_all(json.as_bytes());
        EXIT_OK
    };
    if !report.all_passed() {
        for f in &report.failures {
            let _ = writeln!(stderr, "verification failed: {f}");
        }
        return EXIT_FAILURE;
    }
    status
}

pub fn cmd_density(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let out = match density(cfg, stderr) {
        Ok(o) => o,
        Err(code) => return code,
    };
    let status = emit(cfg, &out.primary, stdout, stderr);
    if status != EXIT_OK {
        status
    } else {
        out.code
    }
}

fn density(cfg: &RunConfig, stderr: &mut dyn Write) -> Result<Outcome, i32> {
    let report = verified(cfg);
    if !report.all_passed() {
        for f in &report.failures {
            let _ = writeln!(stderr, "verification failed: {f}");
        }
        return Err(EXIT_FAILURE);
    }
    let (top, analytic, mode) = if cfg.flat {
        (Poly::from_int(DIM, 6), Poly::one(DIM), "flat")
    } else {
        let f = analytic_dh_density(&report, &cfg.window).map_err(|e| {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_FAILURE
        })?;
        (report.top_power_poly.clone(), f, "liouville")
    };
    let samples = cfg.samples.unwrap_or(DEFAULT_DENSITY_SAMPLES);
    let sc = SamplerConfig::new(samples, cfg.bins, cfg.window, cfg.seed).map_err(|e| {
        let _ = writeln!(stderr, "error: {e}");
        EXIT_USAGE
    })?;
    let fail = |e: dh_measure::DhError, stderr: &mut dyn Write| {
        let _ = writeln!(stderr, "error: {e}");
        EXIT_FAILURE
    };
    let hist = match cfg.threads {
        Some(n) => dh_measure::sample_pushforward_threads(&top, &sc, n),
        None => dh_measure::sample_pushforward(&top, &sc),
    }
    .map_err(|e| fail(e, stderr))?;
    let est = dh_measure::normalize(&hist).map_err(|e| fail(e, stderr))?;
    let cmp = dh_measure::compare(&est, &analytic, &cfg.window).map_err(|e| fail(e, stderr))?;
    let mut csv = Vec::new();
    dh_measure::write_density_csv(
        &mut csv,
        &est,
        &cmp,
        &Provenance::new(&sc, cfg.params_label(), mode),
    )
    .map_err(|e| {
        let _ = writeln!(stderr, "error: {e}");
        EXIT_FAILURE
    })?;

    let _ = writeln!(
        stderr,
        "max relative error {:.4} (tolerance {DENSITY_TOLERANCE}); bins with |z| > 3: {}; worst bin {} at s = {:.4} (z = {:.2})",
        cmp.max_rel_error,
        cmp.bins_beyond(3.0),
        cmp.worst_bin,
        est.bin_centers[cmp.worst_bin],
        cmp.per_bin_z[cmp.worst_bin],
    );
    if let Some(b) =
        dh_measure::bin_index(2.5, &cfg.window, cfg.bins).filter(|_| cfg.window.straddles(2.5))
    {
        let _ = writeln!(
            stderr,
            "bin containing s = 2.5: center {:.4}, mc density {:.5} ± {:.5}, analytic {:.5}",
            est.bin_centers[b], est.density[b], est.stderr[b], cmp.analytic[b]
        );
    }
    let code = if cmp.max_rel_error <= DENSITY_TOLERANCE {
        EXIT_OK
    } else {
        let _ = writeln!(
            stderr,
            "relative error exceeds {DENSITY_TOLERANCE}: statistical tolerance not met at {samples} samples; increase --samples"
        );
        EXIT_FAILURE
    };
    Ok(Outcome { code, primary: csv })
}

fn report_json(rep: &ViolationReport) -> Vec<u8> {
    (serde_json::to_string_pretty(rep).expect("report serializes") + "\n").into_bytes()
}

fn verdict(rep: &ViolationReport) -> i32 {
    if rep.log_concave {
        EXIT_OK
    } else {
        EXIT_NOT_LOG_CONCAVE
    }
}

pub fn cmd_logconcavity(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let rep = match (cfg.analytic, &cfg.input) {
        (true, Some(_)) | (false, None) => {
            let _ = writeln!(
                stderr,
                "error: logconcavity needs exactly one of --analytic or --input PATH"
            );
            return EXIT_USAGE;
        }
        (true, None) => {
            let report = verified(cfg);
            let f = match analytic_dh_density(&report, &cfg.window) {
                Ok(f) => f,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    return EXIT_FAILURE;
                }
            };
            match analytic_logconcavity(&f, (cfg.window.a, cfg.window.b)) {
                Ok(r) => r,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    return EXIT_FAILURE;
                }
            }
        }
        (false, Some(path)) => {
            let samples = match read_samples(path) {
                Ok(s) => s,
                Err(msg) => {
                    let _ = writeln!(stderr, "error: {msg}");
                    return EXIT_USAGE;
                }
            };
            match discrete_logconcavity(&samples, cfg.tol.unwrap_or(1e-9)) {
                Ok(r) => r,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    return EXIT_FAILURE;
                }
            }
        }
    };
    if rep.log_concave {
        let _ = writeln!(stderr, "log-concave");
    } else {
        for (lo, hi) in &rep.violation_intervals {
            let _ = writeln!(stderr, "log-concavity fails on ({lo:.9}, {hi:.9})");
        }
    }
    match emit(cfg, &report_json(&rep), stdout, stderr) {
        EXIT_OK => verdict(&rep),
        code => code,
    }
}

/// Reads `s,f` rows; `#` lines and a non-numeric header row are skipped.
pub fn read_samples(path: &Path) -> Result<Vec<(f64, f64)>, String> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| format!("{}: {e}", path.display()))?;
        if rec.len() < 2 {
            return Err(format!(
                "{}: row {} needs two columns",
                path.display(),
                i + 1
            ));
        }
        match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
            (Ok(s), Ok(f)) => out.push((s, f)),
            _ if i == 0 && out.is_empty() => continue,
            _ => return Err(format!("{}: row {} is not numeric", path.display(), i + 1)),
        }
    }
    if out.is_empty() {
        return Err(format!("{}: no samples", path.display()));
    }
    Ok(out)
}

pub fn cmd_toric(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let Some(path) = &cfg.input else {
        let _ = writeln!(stderr, "error: toric needs --input POLYTOPE.json");
        return EXIT_USAGE;
    };
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot read {}: {e}", path.display());
            return EXIT_USAGE;
        }
    };
    let poly = match HPolytope::from_json(&text) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let method = match cfg.method {
        Some(MethodArg::Exact2d) => SliceMethod::Exact2d,
        Some(MethodArg::Mc) => SliceMethod::Mc,
        None if poly.dim == 2 => SliceMethod::Exact2d,
        None => SliceMethod::Mc,
    };
    let mc_n = cfg.samples.unwrap_or(DEFAULT_TORIC_SAMPLES);
    let profile = match toric::slice_profile(&poly, cfg.axis, cfg.bins, method, mc_n, cfg.seed) {
        Ok(p) => p,
        Err(e @ (ToricError::Axis { .. } | ToricError::NotPlanar(_))) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_FAILURE;
        }
    };
    let tol = cfg.tol.unwrap_or(match method {
        SliceMethod::Exact2d => 1e-9,
        SliceMethod::Mc => profile.noise_tolerance(4.0),
    });
    let rep = match toric::prekopa_check(&profile, tol) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_FAILURE;
        }
    };
    let mut csv = Vec::new();
    let _ = writeln!(
        csv,
        "# axis: {}\n# bins: {}\n# method: {:?}\n# mc_samples_per_bin: {}\n# seed: {}\n# generator: {}",
        cfg.axis,
        cfg.bins,
        method,
        mc_n,
        cfg.seed,
        dh_measure::GENERATOR
    );
    if let Err(e) = profile.write_csv(&mut csv) {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_FAILURE;
    }
    let _ = writeln!(
        stderr,
        "{} (tolerance {tol:.3e}, trimmed {:?})",
        if rep.log_concave {
            "log-concave"
        } else {
            "NOT log-concave"
        },
        rep.trimmed.unwrap_or((0, 0))
    );
    let _ = stderr.write_all(&report_json(&rep));
    match emit(cfg, &csv, stdout, stderr) {
        EXIT_OK => verdict(&rep),
        code => code,
    }
}

/// Parses `args` and runs the command, writing to the given streams.
pub fn run<I, S>(
    args: I,
    threads_env: Option<String>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let cfg = match RunConfig::from_cli(cli, threads_env) {
        Ok(c) => c,
        Err(UsageError(msg)) => {
            let _ = writeln!(stderr, "usage error: {msg}");
            return EXIT_USAGE;
        }
    };
    match cfg.command {
        Command::Verify => cmd_verify(&cfg, stdout, stderr),
        Command::Density => cmd_density(&cfg, stdout, stderr),
        Command::Logconcavity => cmd_logconcavity(&cfg, stdout, stderr),
        Command::Toric => cmd_toric(&cfg, stdout, stderr),
    }
}

pub fn main() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(
        std::env::args_os(),
        std::env::var(THREADS_ENV).ok(),
        &mut stdout.lock(),
        &mut stderr.lock(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("dh-lab").chain(args.iter().copied()),
            None,
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn verify_default() {
        let (code, out, _) = run_args(&["verify"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("6*(t^2 - 5*t + 7)"));
    }

    #[test]
    fn verify_narrow_window() {
        assert_eq!(run_args(&["verify", "--window", "2.0", "3.0"]).0, EXIT_OK);
    }

    #[test]
    fn verify_bad_window_is_usage_error() {
        assert_eq!(run_args(&["verify", "--window", "3", "2"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["verify", "--window", "3"]).0, EXIT_USAGE);
    }

    #[test]
    fn verify_degenerate_params_fails() {
        let (code, _, err) = run_args(&["verify", "--params", "0", "5"]);
        assert_eq!(code, EXIT_FAILURE);
        assert!(err.contains("nondegeneracy"));
    }

    #[test]
    fn params_accept_fractions() {
        assert_eq!(run_args(&["verify", "--params", "5/2", "7/2"]).0, EXIT_OK);
        assert_eq!(run_args(&["verify", "--params", "x", "1"]).0, EXIT_USAGE);
    }

    #[test]
    fn unknown_command_is_usage_error() {
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn analytic_logconcavity_exit_three() {
        let (code, out, _) = run_args(&["logconcavity", "--analytic"]);
        assert_eq!(code, EXIT_NOT_LOG_CONCAVE);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let lo = v["intervals"][0][0].as_f64().unwrap();
        assert!((lo - (2.5 - 3f64.sqrt() / 2.0)).abs() <= 1e-9);
    }

    #[test]
    fn logconcavity_needs_a_source() {
        assert_eq!(run_args(&["logconcavity"]).0, EXIT_USAGE);
    }

    #[test]
    fn threads_env_is_validated() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            ["dh-lab", "verify"],
            Some("zero".into()),
            &mut out,
            &mut err,
        );
        assert_eq!(code, EXIT_USAGE);
    }
}
