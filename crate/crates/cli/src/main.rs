//! `voi`: value-of-information curves from JSON problem files.
//!
//! Exit codes: 0 success, 1 failed verification or solver error, 2 malformed
//! input, 3 budget above the admissible cap, 4 infeasible budget for the
//! inefficient curve.

mod etas;
mod svg;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use voi_core::efficient::{check_concavity, efficient_curve, DEFAULT_CONCAVITY_SLACK};
use voi_core::geometry::{decision_regions, value_function};
use voi_core::grid::default_resolution;
use voi_core::inefficient::inefficient_curve;
use voi_core::maxmin::{maxmin_curve, SearchConfig};
use voi_core::problem_file::{parse_problem, ProblemSpec};
use voi_core::verify::{verify, VerifyConfig};
use voi_core::{CurvePoint, Error, PosteriorGrid};

#[derive(Parser)]
#[command(name = "voi", version, about = "Value-of-information curves for finite decision problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the decision-region partition of the belief simplex.
    Regions { file: PathBuf },
    /// Efficient or inefficient value curve as CSV.
    Curve {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Efficient)]
        mode: Mode,
        /// Budgets as start:stop:count (inclusive; zero is always added).
        #[arg(long)]
        etas: String,
        /// Lattice resolution (defaults to the file's `grid`, then per state count).
        #[arg(long)]
        grid: Option<usize>,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Midpoint-concavity slack for the summary line.
        #[arg(long, default_value_t = DEFAULT_CONCAVITY_SLACK)]
        slack: f64,
    },
    /// Max-min value curve over channels as CSV.
    MaxminCurve {
        file: PathBuf,
        #[arg(long)]
        etas: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = voi_core::maxmin::MAXMIN_CONCAVITY_SLACK)]
        slack: f64,
    },
    /// Run the property suite and print a pass/fail report.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_CONCAVITY_SLACK)]
        slack: f64,
        #[arg(long)]
        grid: Option<usize>,
        /// Report destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Efficient,
    Inefficient,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Malformed { .. } => 2,
            Error::BudgetCap { .. } | Error::MaxminCap { .. } => 3,
            Error::Infeasible { .. } => 4,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn malformed(message: String) -> Failure {
    Failure { code: 2, message }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Regions { file } => {
            let spec = load(&file)?;
            print!("{}", render_regions(&spec)?);
            Ok(0)
        }
        Command::Curve {
            file,
            mode,
            etas,
            grid,
            out,
            svg,
            slack,
        } => {
            let spec = load(&file)?;
            let etas = etas::parse_etas(&etas).map_err(malformed)?;
            let problem = &spec.problem;
            let n = problem.n_states();
            let k = grid.or(spec.grid).unwrap_or_else(|| default_resolution(n));
            let grid = PosteriorGrid::new(n, k, problem.prior())?;
            let (curve, label) = match mode {
                Mode::Efficient => (efficient_curve(problem, &spec.measure, &etas, &grid)?, "W(eta)"),
                Mode::Inefficient => (inefficient_curve(problem, &spec.measure, &etas, &grid)?, "U(eta)"),
            };
            write_output(out.as_deref(), &curve_csv(&curve, None))?;
            if let Some(path) = svg {
                write_svg(&path, label, &curve)?;
            }
            let c = check_concavity(&curve, slack);
            eprintln!(
                "{} points on a {}-point grid; worst midpoint concavity violation {:.3e} (slack {:.1e})",
                curve.len(),
                grid.len(),
                c.worst_violation,
                slack
            );
            Ok(0)
        }
        Command::MaxminCurve {
            file,
            etas,
            out,
            svg,
            seed,
            slack,
        } => {
            let spec = load(&file)?;
            let etas = etas::parse_etas(&etas).map_err(malformed)?;
            let priors = spec.prior_set.as_ref().ok_or_else(|| {
                malformed(format!("{}: `prior_set` is required for maxmin-curve", file.display()))
            })?;
            let measure = spec.maxmin_measure().expect("prior set present");
            let config = SearchConfig {
                signal_count: spec.signal_count,
                seed,
                ..SearchConfig::default()
            };
            let result = maxmin_curve(&spec.problem, priors, &measure, &etas, &config)?;
            let curve = result.curve();
            let certified: Vec<bool> = result.binding.iter().map(|b| b.passed()).collect();
            write_output(out.as_deref(), &curve_csv(&curve, Some(&certified)))?;
            if let Some(path) = svg {
                write_svg(&path, "max-min W(eta)", &curve)?;
            }
            let c = check_concavity(&curve, slack);
            eprintln!(
                "{} points; {} certified binding; worst midpoint concavity violation {:.3e} (slack {:.1e})",
                curve.len(),
                certified.iter().filter(|&&b| b).count(),
                c.worst_violation,
                slack
            );
            Ok(0)
        }
        Command::Verify {
            file,
            seed,
            slack,
            grid,
            out,
        } => {
            let spec = load(&file)?;
            let config = VerifyConfig {
                seed,
                concavity_slack: slack,
                grid,
                ..VerifyConfig::default()
            };
            let report = verify(&spec, &config)?;
            write_output(out.as_deref(), &report.render())?;
            Ok(if report.passed() { 0 } else { 1 })
        }
    }
}

fn load(path: &Path) -> Result<ProblemSpec, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| malformed(format!("{}: cannot read: {e}", path.display())))?;
    parse_problem(&text).map_err(|e| match e {
        Error::Malformed { .. } => malformed(format!("{}: {e}", path.display())),
        other => other.into(),
    })
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure {
            code: 1,
            message: format!("{}: cannot write: {e}", p.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_svg(path: &Path, label: &str, curve: &[CurvePoint]) -> Result<(), Failure> {
    let series = svg::Series {
        label,
        points: curve.iter().map(|p| (p.eta, p.value)).collect(),
    };
    let chart = svg::line_chart("Value of information", "amount of information eta", "value", &[series]);
    write_output(Some(path), &chart)
}

fn curve_csv(curve: &[CurvePoint], certified: Option<&[bool]>) -> String {
    let mut out = String::from("eta,value,realized_amount,support_size");
    if certified.is_some() {
        out.push_str(",certified");
    }
    out.push('\n');
    for (i, p) in curve.iter().enumerate() {
        let _ = write!(out, "{},{},{},{}", p.eta, p.value, p.realized_amount, p.support_size);
        if let Some(c) = certified {
            let _ = write!(out, ",{}", c[i]);
        }
        out.push('\n');
    }
    out
}

fn render_regions(spec: &ProblemSpec) -> Result<String, Failure> {
    let problem = &spec.problem;
    let states = problem.state_labels();
    let actions = problem.action_labels();
    let mut out = String::new();
    let _ = writeln!(out, "states: {}", states.join(", "));
    let regions = match decision_regions(problem) {
        Ok(r) => r,
        Err(Error::AffineValue) => {
            let best = value_function(problem, problem.prior())?.argmax[0];
            let _ = writeln!(
                out,
                "value function is affine: action {} is optimal on the whole simplex",
                actions[best]
            );
            return Ok(out);
        }
        Err(e) => return Err(e.into()),
    };
    for r in &regions {
        let _ = writeln!(out, "region {}:", actions[r.action]);
        for h in &r.halfspaces {
            let terms: Vec<String> = h.normal.iter().map(|&c| format!("{}", clean(c))).collect();
            let _ = writeln!(out, "  [{}] . x >= {}", terms.join(", "), clean(h.offset));
        }
        match &r.vertices {
            Some(vs) => {
                for v in vs {
                    let coords: Vec<String> = v.as_slice().iter().map(|&c| format!("{}", clean(c))).collect();
                    let _ = writeln!(out, "  vertex ({})", coords.join(", "));
                }
            }
            None => {
                let _ = writeln!(out, "  vertices not enumerated for {} states", states.len());
            }
        }
    }
    Ok(out)
}

/// Rounds away last-bit noise so printed coordinates read cleanly.
fn clean(c: f64) -> f64 {
    let r = (c * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}
