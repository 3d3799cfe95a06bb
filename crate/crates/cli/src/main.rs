//! `vfnorm` command-line driver.
//!
//! Exit codes: 0 success, 1 a violated inequality was found, 2 bad input,
//! 3 a solver did not converge.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use vfnorm::algebra::AlgebraKind;
use vfnorm::funcnorm::{functional_norm_with, DEFAULT_MAX_ITER};
use vfnorm::halmos::{check_split_bounds, violation_scan};
use vfnorm::lattice::{join, meet};
use vfnorm::linalg::{identity, op_norm};
use vfnorm::problem::{parse_problem, Problem};
use vfnorm::report;
use vfnorm::verify::{lattice_minimax, vgap_with, vprime_estimate, Verdict};
use vfnorm::witness::{build_witness_with, verify_split_inequalities};
use vfnorm::{Error, Tolerances};

#[derive(Parser)]
#[command(name = "vfnorm", version, about = "Lattice distances versus vector-functional norms on operator algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Solver tolerance (relative bracket width).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for sampled quantities; overrides the problem file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Newton step budget per solve.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Bracket the norm of the vector functional restricted to the algebra.
    Norm { problem: PathBuf },
    /// Lattice minimax for the problem's algebra.
    Latdist { problem: PathBuf },
    /// Compare the lattice minimax with the functional norm.
    Vgap { problem: PathBuf },
    /// Build and check a witness operator (commutative lattices).
    Witness { problem: PathBuf },
    /// Summarize the invariant subspace lattice.
    Closure { problem: PathBuf },
    /// Two-subspace model summary, structure checks and sampled split bounds.
    Halmos {
        problem: PathBuf,
        #[arg(long, default_value_t = 200)]
        pairs: usize,
    },
    /// Ratio scan on structured pairs for `B = diag(spectrum)`.
    Scan {
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        spectrum: Vec<f64>,
        /// Index pairs `j:k`, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        pairs: Vec<String>,
    },
    /// Estimate the best constant c in `lattice ≤ c · norm` by sampling.
    Vprime {
        problem: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

enum Failure {
    Input(String),
    NoConvergence(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoConvergence { .. } => Failure::NoConvergence(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

/// Rendered report plus whether it records a violated inequality or an unconverged bracket.
struct Output {
    text: String,
    finding: bool,
    unconverged: bool,
}

impl Output {
    fn plain(text: String) -> Self {
        Output { text, finding: false, unconverged: false }
    }
}

fn key_values(format: Format, rows: &[(&str, String)]) -> String {
    match format {
        Format::Text => rows.iter().map(|(k, v)| format!("{k}: {v}\n")).collect(),
        Format::Csv => {
            let header: Vec<&str> = rows.iter().map(|(k, _)| *k).collect();
            let values: Vec<&str> = rows.iter().map(|(_, v)| v.as_str()).collect();
            format!("{}\n{}\n", header.join(","), values.join(","))
        }
    }
}

fn load(path: &Path, common: &Common) -> Result<Problem, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let mut p = parse_problem(&text)?;
    if let Some(t) = common.tol {
        p.tolerances.solver_tol = t;
        p.tolerances.validate()?;
    }
    Ok(p)
}

fn seed(common: &Common, p: Option<&Problem>) -> u64 {
    common.seed.or(p.and_then(|p| p.file.seed)).unwrap_or(0)
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let c = &cli.common;
    match &cli.command {
        Command::Norm { problem } => {
            let p = load(problem, c)?;
            let r = functional_norm_with(&p.model, &p.x, &p.y, &p.tolerances, c.max_iter)?;
            let text = match c.format {
                Format::Text => report::norm_text(&r),
                Format::Csv => report::norm_csv(&r),
            };
            Ok(Output { text, finding: false, unconverged: !r.converged })
        }
        Command::Latdist { problem } => {
            let p = load(problem, c)?;
            let m = lattice_minimax(&p.model, &p.x, &p.y, &p.tolerances)?;
            Ok(Output::plain(key_values(
                c.format,
                &[("value", m.value.to_string()), ("argmin_rank", m.argmin.rank().to_string())],
            )))
        }
        Command::Vgap { problem } => {
            let p = load(problem, c)?;
            let r = vgap_with(&p.model, &p.x, &p.y, &p.tolerances, c.max_iter, Some(seed(c, Some(&p))))?;
            let text = match c.format {
                Format::Text => report::vgap_text(&r),
                Format::Csv => report::vgap_csv(std::slice::from_ref(&r)),
            };
            Ok(Output { text, finding: r.verdict == Verdict::Violated, unconverged: !r.converged && !r.satisfied })
        }
        Command::Witness { problem } => {
            let p = load(problem, c)?;
            let lattice = match p.model.kind() {
                AlgebraKind::Csl(l) => l.clone(),
                _ => p
                    .model
                    .lattice(&p.tolerances)?
                    .filter(|l| l.is_commutative())
                    .ok_or_else(|| Failure::Input("witness needs a commutative lattice".into()))?,
            };
            let w = build_witness_with(&lattice, &p.x, &p.y, &p.tolerances, c.max_iter)?;
            let split_ok = verify_split_inequalities(&w.split, &p.tolerances);
            let member = p.model.membership(&w.t, 1e-8)?;
            let norm = op_norm(&w.t);
            let tol = p.tolerances.solver_tol.max(1e-6);
            let finding = !split_ok || !member || norm > 1.0 + tol || w.value < w.lat_distance - tol;
            let text = match c.format {
                Format::Text => report::witness_text(&w, member, norm, split_ok),
                Format::Csv => key_values(
                    c.format,
                    &[
                        ("split_rank", w.split.p.rank().to_string()),
                        ("split_ok", split_ok.to_string()),
                        ("lat_distance", w.lat_distance.to_string()),
                        ("value", w.value.to_string()),
                        ("norm", norm.to_string()),
                        ("member", member.to_string()),
                    ],
                ),
            };
            Ok(Output { text, finding, unconverged: false })
        }
        Command::Closure { problem } => {
            let p = load(problem, c)?;
            let l = p
                .model
                .lattice(&p.tolerances)?
                .ok_or_else(|| Failure::Input("the lattice of this algebra is not finite".into()))?;
            let mut ranks: Vec<usize> = l.elements().iter().map(|e| e.rank()).collect();
            ranks.sort_unstable();
            let ranks: Vec<String> = ranks.iter().map(usize::to_string).collect();
            Ok(Output::plain(key_values(
                c.format,
                &[
                    ("elements", l.len().to_string()),
                    ("commutative", l.is_commutative().to_string()),
                    ("closed", l.is_closed(&p.tolerances).to_string()),
                    ("ranks", ranks.join(" ")),
                ],
            )))
        }
        Command::Halmos { problem, pairs } => {
            let p = load(problem, c)?;
            let AlgebraKind::TwoSubspace(h) = p.model.kind() else {
                return Err(Failure::Input("halmos needs a two_subspace algebra".into()));
            };
            let t = &p.tolerances;
            let generic = meet(h.p(), h.q(), t)?.rank() == 0
                && op_norm(&(join(h.p(), h.q(), t)?.matrix() - identity::<f64>(h.dim()))) <= t.eq_scaled(h.dim());
            let bounds = if h.angle_positive() { Some(check_split_bounds(h, *pairs, seed(c, Some(&p)), t)?) } else { None };
            let finding = !generic || bounds.as_ref().is_some_and(|l| !l.split_bound_ok || !l.paired_bound_ok);
            let text = match c.format {
                Format::Text => format!("{}generic position: {generic}\n", report::halmos_text(h, bounds.as_ref())),
                Format::Csv => {
                    let mut rows = vec![
                        ("h0_dim", h.h0_dim().to_string()),
                        ("angle_positive", h.angle_positive().to_string()),
                        ("generic", generic.to_string()),
                    ];
                    if let Some(l) = &bounds {
                        rows.push(("c_max", l.constants.max.to_string()));
                        rows.push(("condition", l.condition.to_string()));
                        rows.push(("split_bound_ok", l.split_bound_ok.to_string()));
                        rows.push(("paired_bound_ok", l.paired_bound_ok.to_string()));
                        rows.push(("worst_ratio", l.worst_ratio.to_string()));
                    }
                    key_values(c.format, &rows)
                }
            };
            Ok(Output { text, finding, unconverged: false })
        }
        Command::Scan { spectrum, pairs } => {
            let mut t = Tolerances::default();
            if let Some(v) = c.tol {
                t.solver_tol = v;
                t.validate()?;
            }
            let pairs = pairs.iter().map(|s| parse_pair(s)).collect::<Result<Vec<_>, _>>()?;
            let rows = violation_scan(spectrum, &pairs, &t)?;
            let finding = rows.iter().any(|r| r.lhs > r.norm + t.solver_tol * r.norm.max(1.0));
            let text = match c.format {
                Format::Text => report::scan_text(&rows),
                Format::Csv => report::scan_csv(&rows),
            };
            Ok(Output { text, finding, unconverged: false })
        }
        Command::Vprime { problem, trials } => {
            let p = load(problem, c)?;
            let e = vprime_estimate(&p.model, *trials, seed(c, Some(&p)), &p.tolerances)?;
            let text = match c.format {
                Format::Text => report::vprime_text(&e),
                Format::Csv => report::vprime_csv(&e),
            };
            Ok(Output::plain(text))
        }
    }
}

fn parse_pair(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::Input(format!("pair `{s}` is not of the form j:k"));
    let (j, k) = s.split_once(':').ok_or_else(bad)?;
    Ok((j.trim().parse().map_err(|_| bad())?, k.trim().parse().map_err(|_| bad())?))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(out) => {
            if let Some(path) = &cli.common.out {
                if let Err(e) = fs::write(path, &out.text) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{}", out.text);
            }
            if out.finding {
                ExitCode::from(1)
            } else if out.unconverged {
                eprintln!("warning: bracket did not converge within the iteration budget");
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::NoConvergence(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
