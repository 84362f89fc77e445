use clap::{Parser, Subcommand, ValueEnum};
use kspare::oracle::{simulate, Query};
use kspare::orders::system_st_compare;
use kspare::reproduce::{compute_figure, compute_table, table_parameter_names};
use kspare::residual::{mrl_curve, CurveKind};
use kspare::spec_file::parse_system;
use kspare::{expected_T, Error, SystemSpec};
use serde_json::json;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Reliability of k-out-of-n systems with a cold standby unit.
#[derive(Parser)]
#[command(name = "kspare", version)]
struct Cli {
    /// write results here instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certified expected lifetime E T.
    Et {
        #[arg(long)]
        spec: PathBuf,
        /// error budget
        #[arg(long)]
        d: f64,
        #[arg(long)]
        json: bool,
    },
    /// P(T > t) for t = 0..=t-max, as CSV.
    Reliability {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        t_max: i64,
    },
    /// Mean residual life curve over t = 0..=t-max, as CSV.
    Mrl {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum)]
        kind: MrlKind,
        #[arg(long)]
        t_max: i64,
        #[arg(long)]
        d: f64,
    },
    /// Recompute a published table or figure.
    Reproduce {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4), conflicts_with = "figure", required_unless_present = "figure")]
        table: Option<u8>,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        figure: Option<u8>,
    },
    /// Monte Carlo estimate of a query such as `et`, `reliability:5` or `system-mrl:3`.
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        query: Query,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Check T_A ≤_st T_B; exits 1 when a counterexample is found.
    Compare {
        #[arg(long)]
        spec_a: PathBuf,
        #[arg(long)]
        spec_b: PathBuf,
        /// tail mass left unchecked
        #[arg(long, default_value_t = 1e-10)]
        eps: f64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MrlKind {
    Usual,
    System,
    Working,
}

impl From<MrlKind> for CurveKind {
    fn from(k: MrlKind) -> Self {
        match k {
            MrlKind::Usual => CurveKind::UsualMrl,
            MrlKind::System => CurveKind::SystemLevelMrl,
            MrlKind::Working => CurveKind::WorkingMrl,
        }
    }
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::UnboundedTail(_) => 3,
            _ => 4,
        };
        Failure { code, message: e.to_string() }
    }
}

fn load(path: &Path) -> Result<SystemSpec, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure { code: 2, message: format!("{}: {e}", path.display()) })?;
    parse_system(&text).map_err(|e| Failure { code: 2, message: format!("{}: {e}", path.display()) })
}

/// At most 10 significant digits, '.' decimal, no exponent for ordinary
/// magnitudes.
fn sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.9e}").parse().unwrap();
    format!("{rounded}")
}

fn run(cli: Cli) -> Result<(String, u8), Failure> {
    let mut out = String::new();
    let mut code = 0;
    match cli.command {
        Command::Et { spec, d, json } => {
            let sys = load(&spec)?;
            let (value, budget) = expected_T(&sys, d)?;
            if json {
                let v = json!({ "E_T": value, "budget": budget });
                writeln!(out, "{}", serde_json::to_string_pretty(&v).unwrap()).unwrap();
            } else {
                writeln!(out, "E_T={value:.4}").unwrap();
                writeln!(out, "value={}", sig(value)).unwrap();
                writeln!(out, "certified_error={}", sig(budget.certified_error)).unwrap();
                writeln!(out, "d={}", sig(d)).unwrap();
                writeln!(out, "t0={}", budget.t0).unwrap();
                writeln!(out, "rule={budget}").unwrap();
            }
        }
        Command::Reliability { spec, t_max } => {
            let sys = load(&spec)?;
            out.push_str("t,P_T_gt_t\n");
            for (t, r) in kspare::lifetime::reliability_curve(&sys, t_max).into_iter().enumerate() {
                writeln!(out, "{t},{}", sig(r)).unwrap();
            }
        }
        Command::Mrl { spec, kind, t_max, d } => {
            let sys = load(&spec)?;
            let ts: Vec<i64> = (0..=t_max).collect();
            let curve = mrl_curve(&sys, kind.into(), &ts, d)?;
            out.push_str("t,mrl,err\n");
            for p in curve.points {
                match (p.value, p.certified_error) {
                    (Some(v), Some(e)) => writeln!(out, "{},{},{}", p.t, sig(v), sig(e)).unwrap(),
                    _ => writeln!(out, "{},,gap", p.t).unwrap(),
                }
            }
        }
        Command::Reproduce { table: Some(table), .. } => {
            let (a, b) = table_parameter_names(table);
            writeln!(out, "{a},{b},n,k,E_T,E_X,E_T_full,E_X_full").unwrap();
            for row in compute_table(table)? {
                let p = row.printed;
                writeln!(
                    out,
                    "{},{},{},{},{:.4},{:.4},{},{}",
                    p.component,
                    p.standby,
                    p.n,
                    p.k,
                    row.expected_t,
                    row.expected_x,
                    sig(row.expected_t),
                    sig(row.expected_x)
                )
                .unwrap();
            }
        }
        Command::Reproduce { figure, .. } => {
            let [usual, system, working] = compute_figure(figure.expect("clap requires one of the two"))?;
            out.push_str("t,usual,usual_err,system,system_err,working,working_err\n");
            let cell = |p: &kspare::residual::CurvePoint| match (p.value, p.certified_error) {
                (Some(v), Some(e)) => format!("{},{}", sig(v), sig(e)),
                _ => ",gap".to_string(),
            };
            for ((u, s), w) in usual.points.iter().zip(&system.points).zip(&working.points) {
                writeln!(out, "{},{},{},{}", u.t, cell(u), cell(s), cell(w)).unwrap();
            }
        }
        Command::Simulate { spec, query, samples, seed, json } => {
            let sys = load(&spec)?;
            let r = simulate(&sys, query, samples, seed)?;
            if json {
                let v = json!({ "query": query.to_string(), "result": r });
                writeln!(out, "{}", serde_json::to_string_pretty(&v).unwrap()).unwrap();
            } else {
                writeln!(out, "query={query}").unwrap();
                writeln!(out, "estimate={}", sig(r.estimate)).unwrap();
                writeln!(out, "std_error={}", sig(r.std_error)).unwrap();
                writeln!(out, "samples={}", r.n_samples).unwrap();
                writeln!(out, "seed={}", r.seed).unwrap();
            }
        }
        Command::Compare { spec_a, spec_b, eps, json } => {
            let a = load(&spec_a)?;
            let b = load(&spec_b)?;
            let v = system_st_compare(&a, &b, eps)?;
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&v).unwrap()).unwrap();
            } else {
                writeln!(out, "ordered={}", v.holds).unwrap();
                writeln!(out, "horizon={}", v.horizon).unwrap();
                writeln!(out, "residual_mass={}", sig(v.residual_mass)).unwrap();
                if let Some(t) = v.counterexample {
                    writeln!(out, "counterexample_t={t}").unwrap();
                }
            }
            if !v.holds {
                code = 1;
            }
        }
    }
    Ok((out, code))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let target = cli.out.clone();
    match run(cli) {
        Ok((text, code)) => {
            match target {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, text) {
                        eprintln!("kspare: {}: {e}", path.display());
                        return ExitCode::from(4);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("kspare: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
