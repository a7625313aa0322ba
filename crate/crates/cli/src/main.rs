//! `pzeta`: batch front end for periodic-graph zeta computations.
//!
//! Data goes to stdout (CSV or JSON), the run header and diagnostics go to
//! stderr. Exit codes: 0 pass, 1 violation, 2 inconclusive or quadrature did
//! not converge, 3 input error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use periodic_zeta::lab::{self, ComparisonReport, MonomialMatrix, Verdict};
use periodic_zeta::oracle::{census_with, describe_walk, LengthSpectrum};
use periodic_zeta::quadrature::QuadratureOptions;
use periodic_zeta::zeta::{self, XiOptions};
use periodic_zeta::{Error, Execution, VoltageGraph, VERSION};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

const EXIT_PASS: u8 = 0;
const EXIT_VIOLATION: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "pzeta",
    version,
    about = "Zeta functions and length spectra of periodic graphs"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Common {
    /// Output format for the data written to stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Disable the data-parallel loops.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Oracle,
    Zeta,
    Both,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
enum Command {
    /// Check the structural hypotheses on a graph file.
    Validate { path: PathBuf },
    /// Primitive length spectrum PL(n) and L(n).
    Spectrum {
        path: PathBuf,
        #[arg(long, default_value_t = 15)]
        max_length: usize,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
    },
    /// Exact series: log Z, Z, N_m and PL.
    Zeta {
        path: PathBuf,
        #[arg(long, default_value_t = zeta::DEFAULT_ORDER)]
        order: usize,
    },
    /// Functional-equation residuals at real |u| > 1.
    XiCheck {
        path: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [2.0, 3.0, 5.0, -2.0])]
        u: Vec<f64>,
        /// Pass threshold on the relative residual.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Quadrature stops when successive doublings agree to this.
        #[arg(long, default_value_t = 1e-10)]
        quad_tol: f64,
        /// Maximum quadrature nodes per torus axis.
        #[arg(long, default_value_t = 1 << 14)]
        quad_cap: usize,
    },
    /// Tabulate and compare the spectra of two graphs with the same q.
    Compare {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, default_value_t = 15)]
        max_length: usize,
        /// Minimum agreement window for the orbit-count check.
        #[arg(long, default_value_t = lab::DEFAULT_CONFIDENCE_WINDOW)]
        window: usize,
    },
    /// Random monomial conjugations must not change the series or spectrum.
    Conjugate {
        path: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 10)]
        max_length: usize,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidGroup(_)
            | Error::ElementShape { .. }
            | Error::Parse(_)
            | Error::Validation(_)
            | Error::Domain { .. }
            | Error::QMismatch { .. }
            | Error::SpecMismatch { .. } => EXIT_INPUT,
            Error::Convergence { .. } => EXIT_INCONCLUSIVE,
            Error::StabilizerViolation { .. } | Error::Integrality { .. } | Error::Internal(_) => {
                EXIT_VIOLATION
            }
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<(String, u8), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    eprintln!("{}", header(&cli));
    let exec = if cli.common.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let result = match &cli.command {
        Command::Validate { path } => cmd_validate(path, cli.common.format),
        Command::Spectrum {
            path,
            max_length,
            method,
        } => cmd_spectrum(path, *max_length, *method, cli.common.format, exec),
        Command::Zeta { path, order } => cmd_zeta(path, *order, cli.common.format),
        Command::XiCheck {
            path,
            u,
            tol,
            quad_tol,
            quad_cap,
        } => {
            let opts = XiOptions {
                quadrature: QuadratureOptions {
                    tol: *quad_tol,
                    max_nodes_per_axis: *quad_cap,
                    exec,
                },
                ..XiOptions::default()
            };
            cmd_xi_check(path, u, *tol, &opts, cli.common.format)
        }
        Command::Compare {
            left,
            right,
            max_length,
            window,
        } => cmd_compare(left, right, *max_length, *window, cli.common.format, exec),
        Command::Conjugate {
            path,
            seed,
            trials,
            max_length,
        } => cmd_conjugate(path, *seed, *trials, *max_length, cli.common.format, exec),
    };
    match result {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// One line naming the version and the full effective configuration.
fn header(cli: &Cli) -> String {
    let config = json!({ "version": VERSION, "common": cli.common, "run": cli.command });
    format!("# pzeta {VERSION} config={config}")
}

fn config_json(cmd: &str, extra: serde_json::Value) -> serde_json::Value {
    json!({ "version": VERSION, "command": cmd, "config": extra })
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

fn load(path: &Path) -> Result<VoltageGraph, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_INPUT,
        message: format!("{}: {e}", path.display()),
    })?;
    VoltageGraph::from_json(&text).map_err(|e| Failure {
        code: EXIT_INPUT,
        message: format!("{}: {e}", path.display()),
    })
}

/// Loads a graph and rejects it unless every structural check passes.
fn load_valid(path: &Path) -> Result<VoltageGraph, Failure> {
    let g = load(path)?;
    let report = g.validate();
    if !report.is_valid() {
        return Err(Failure {
            code: EXIT_INPUT,
            message: format!("{}: {}", path.display(), report.failures().join("; ")),
        });
    }
    Ok(g)
}

fn cmd_validate(path: &Path, format: Format) -> Outcome {
    let g = load(path)?;
    let report = g.validate();
    let code = if report.is_valid() {
        EXIT_PASS
    } else {
        EXIT_VIOLATION
    };
    let out = match format {
        Format::Csv => {
            let mut s = String::from("check,result,witness\n");
            for c in &report.checks {
                let result = if c.passed { "pass" } else { "fail" };
                let witness = c.witness.as_deref().unwrap_or("").replace(',', ";");
                writeln!(s, "{},{result},{witness}", c.name).unwrap();
            }
            s
        }
        Format::Json => pretty(&json!({
            "header": config_json("validate", json!({ "path": path })),
            "valid": report.is_valid(),
            "checks": report.checks,
        })),
    };
    Ok((out, code))
}

fn cmd_spectrum(path: &Path, max_length: usize, method: Method, format: Format, exec: Execution) -> Outcome {
    let g = load_valid(path)?;
    let oracle: Option<LengthSpectrum> = match method {
        Method::Zeta => None,
        _ => match census_with(&g, max_length, exec) {
            Ok(s) => Some(s),
            Err(Error::StabilizerViolation {
                walk,
                length,
                power,
                voltage,
            }) => {
                return Err(Failure {
                    code: EXIT_VIOLATION,
                    message: format!(
                        "stabilizer violation at length {length}: witness {} is a {power}-fold power \
                         of a sub-walk with voltage {voltage}",
                        describe_walk(&g, &walk)
                    ),
                });
            }
            Err(e) => return Err(e.into()),
        },
    };
    let series_pl: Option<Vec<u64>> = match method {
        Method::Oracle => None,
        _ => {
            let series = zeta::log_zeta_series(&g, max_length)?;
            let pl = zeta::pl_from_series(&series)?;
            Some(
                pl.iter()
                    .map(|x| u64::try_from(x).expect("PL fits in u64"))
                    .collect(),
            )
        }
    };
    let l_of =
        |pl: &[u64], n: usize| -> u64 { (1..=n).filter(|d| n.is_multiple_of(*d)).map(|d| pl[n / d]).sum() };
    let mut rows = Vec::new();
    let mut mismatch = None;
    for n in 1..=max_length {
        let po = oracle.as_ref().map(|s| s.pl(n));
        let pz = series_pl.as_ref().map(|p| p[n]);
        let l = match (&oracle, &series_pl) {
            (Some(s), _) => s.l(n),
            (None, Some(p)) => l_of(p, n),
            (None, None) => unreachable!("at least one method runs"),
        };
        if let (Some(a), Some(b)) = (po, pz) {
            if a != b && mismatch.is_none() {
                mismatch = Some((n, a, b));
            }
        }
        rows.push((n, po, pz, l));
    }
    let out = match format {
        Format::Csv => {
            let mut s = match method {
                Method::Oracle => String::from("n,PL_oracle,L\n"),
                Method::Zeta => String::from("n,PL_zeta,L\n"),
                Method::Both => String::from("n,PL_oracle,PL_zeta,L\n"),
            };
            for (n, po, pz, l) in &rows {
                let cells: Vec<String> = [po, pz].iter().filter_map(|x| x.map(|v| v.to_string())).collect();
                writeln!(s, "{n},{},{l}", cells.join(",")).unwrap();
            }
            s
        }
        Format::Json => pretty(&json!({
            "header": config_json("spectrum", json!({ "path": path, "max_length": max_length, "method": method })),
            "rows": rows.iter().map(|(n, po, pz, l)| json!({ "n": n, "pl_oracle": po, "pl_zeta": pz, "l": l })).collect::<Vec<_>>(),
            "agree": mismatch.is_none(),
        })),
    };
    if let Some((n, a, b)) = mismatch {
        eprintln!("MISMATCH: PL({n}) oracle = {a}, series = {b}");
        return Ok((out, EXIT_VIOLATION));
    }
    Ok((out, EXIT_PASS))
}

fn cmd_zeta(path: &Path, order: usize, format: Format) -> Outcome {
    let g = load_valid(path)?;
    let series = zeta::log_zeta_series(&g, order)?;
    let z = series.zeta_coeffs();
    let rooted = series.rooted_counts()?;
    let pl = zeta::pl_from_series(&series)?;
    let out = match format {
        Format::Csv => {
            let mut s = String::from("m,log_Z,Z,N_m,PL\n");
            for m in 0..=order {
                writeln!(
                    s,
                    "{m},{},{},{},{}",
                    series.log_coeffs()[m],
                    z.coeff(m),
                    rooted[m],
                    pl[m]
                )
                .unwrap();
            }
            s
        }
        Format::Json => pretty(&json!({
            "header": config_json("zeta", json!({ "path": path, "order": order })),
            "chi": g.euler_characteristic_from_counts(),
            "rows": (0..=order).map(|m| json!({
                "m": m,
                "log_z": series.log_coeffs()[m].to_string(),
                "z": z.coeff(m).to_string(),
                "n_m": rooted[m].to_string(),
                "pl": pl[m].to_string(),
            })).collect::<Vec<_>>(),
        })),
    };
    Ok((out, EXIT_PASS))
}

fn cmd_xi_check(path: &Path, us: &[f64], tol: f64, opts: &XiOptions, format: Format) -> Outcome {
    let g = load_valid(path)?;
    for &u in us {
        if !(u.abs() > 1.0) || !zeta::omega_q_contains(Complex64::new(u, 0.0), g.q()) {
            return Err(Failure {
                code: EXIT_INPUT,
                message: format!("u = {u} rejected: need real |u| > 1 inside Ω_{}", g.q()),
            });
        }
    }
    let mut checks = Vec::new();
    for &u in us {
        checks.push(zeta::functional_equation_check(&g, u, opts)?);
    }
    let pass = checks.iter().all(|c| c.residual < tol);
    let out = match format {
        Format::Csv => {
            let mut s = String::from("u,dual,xi_u,xi_dual,residual,tol,pass\n");
            for c in &checks {
                writeln!(
                    s,
                    "{},{:e},{:e},{:e},{:e},{:e},{}",
                    c.u,
                    c.dual,
                    c.xi_u,
                    c.xi_dual,
                    c.residual,
                    tol,
                    c.residual < tol
                )
                .unwrap();
            }
            s
        }
        Format::Json => pretty(&json!({
            "header": config_json("xi-check", json!({
                "path": path,
                "u": us,
                "tol": tol,
                "quad_tol": opts.quadrature.tol,
                "quad_cap": opts.quadrature.max_nodes_per_axis,
                "series_tol": opts.series_tol,
            })),
            "checks": checks,
            "pass": pass,
        })),
    };
    Ok((out, if pass { EXIT_PASS } else { EXIT_VIOLATION }))
}

fn report_out(report: &ComparisonReport, format: Format, header: serde_json::Value) -> String {
    match format {
        Format::Csv => report.to_csv(),
        Format::Json => pretty(&json!({ "header": header, "report": report, "overall": report.overall() })),
    }
}

fn cmd_compare(
    left: &Path,
    right: &Path,
    max_length: usize,
    window: usize,
    format: Format,
    exec: Execution,
) -> Outcome {
    let a = load_valid(left)?;
    let b = load_valid(right)?;
    let report = lab::compare_spectra(&a, &b, max_length, window, exec)?;
    if let Some(r) = report.first_disagreement() {
        eprintln!(
            "first disagreement at n = {}: PL {} vs {}",
            r.n, r.pl_left, r.pl_right
        );
    }
    let header = config_json(
        "compare",
        json!({ "left": left, "right": right, "max_length": max_length, "window": window }),
    );
    Ok((report_out(&report, format, header), report.exit_code() as u8))
}

fn cmd_conjugate(
    path: &Path,
    seed: u64,
    trials: usize,
    max_length: usize,
    format: Format,
    exec: Execution,
) -> Outcome {
    let g = load_valid(path)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut overall = Verdict::Consistent;
    for trial in 0..trials {
        let p = MonomialMatrix::random(g.group().clone(), g.vertex_count(), &mut rng);
        let report = lab::check_conjugation_invariance(&g, &p, max_length, exec)?;
        overall = overall.max(report.overall());
        rows.push((trial, p.render(), report));
    }
    let out = match format {
        Format::Csv => {
            let mut s = String::from("trial,monomial,log_zeta_series,oracle_spectrum\n");
            for (trial, p, report) in &rows {
                let v = |name| report.verdict(name).map(|v| v.to_string()).unwrap_or_default();
                writeln!(s, "{trial},{p},{},{}", v("log-zeta-series"), v("oracle-spectrum")).unwrap();
            }
            writeln!(s, "# overall,{overall}").unwrap();
            s
        }
        Format::Json => pretty(&json!({
            "header": config_json("conjugate", json!({
                "path": path, "seed": seed, "trials": trials, "max_length": max_length,
            })),
            "trials": rows.iter().map(|(trial, p, report)| json!({
                "trial": trial,
                "monomial": p,
                "verdicts": report.verdicts,
            })).collect::<Vec<_>>(),
            "overall": overall,
        })),
    };
    Ok((out, overall.exit_code() as u8))
}
