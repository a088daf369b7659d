//! Command-line front end. Every subcommand emits either a small JSON object
//! or a CSV table; all numbers carry 17 significant digits so parsed values
//! are bit-exact across languages. Exit codes: 0 success (certified, gap
//! within tolerance), 2 well-formed negative result, 1 usage or internal
//! error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use crate::certify::{self, CertifyError};
use crate::model::{GainSpec, Model};
use crate::numfmt::sig17;
use crate::riccati::solve_riccati;
use crate::verify::{self, DisturbancePlan, PlanKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "gaincert",
    about = "Certified minimax adaptive control for scalar uncertain systems",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DisturbanceArg {
    Zero,
    Impulse,
    White,
    Sine,
    Adversarial,
}

impl From<DisturbanceArg> for PlanKind {
    fn from(value: DisturbanceArg) -> Self {
        match value {
            DisturbanceArg::Zero => PlanKind::Zero,
            DisturbanceArg::Impulse => PlanKind::Impulse,
            DisturbanceArg::White => PlanKind::White,
            DisturbanceArg::Sine => PlanKind::Sine,
            DisturbanceArg::Adversarial => PlanKind::Adversarial,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FigureKind {
    Quadfuns,
    Gammascaling,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the stationary Riccati equation and report the observer gains.
    Riccati {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
    /// Evaluate the certification conditions for (a, gamma).
    Certify {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long)]
        gamma: f64,
    },
    /// Find the least certified gamma for a pole.
    GammaStar {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Sweep gamma-star over a pole grid; CSV output.
    Sweep {
        #[arg(long, allow_hyphen_values = true)]
        a_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        a_max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the closed loop against a disturbance plan; trace CSV output.
    Simulate {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b_true: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        horizon: usize,
        #[arg(long, value_enum, default_value_t = DisturbanceArg::Zero)]
        disturbance: DisturbanceArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        x0: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Batch-compare the past-cost recursion against the constrained
    /// quadratic oracle; JSON report.
    VerifyLemma {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 6)]
        horizon: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Emit plot-ready figure data; CSV output.
    Figure {
        #[arg(long, value_enum)]
        which: FigureKind,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, default_value_t = 4.0)]
        gamma: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parse and dispatch, writing to the process streams.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    run_with_output(argv, &mut std::io::stdout(), &mut std::io::stderr())
}

/// Parse and dispatch with explicit output streams (tests capture these).
pub fn run_with_output<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders --help/--version as "errors" with success status.
            return if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                EXIT_USAGE
            } else {
                let _ = write!(out, "{}", e.render());
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn emit(out: &mut dyn Write, path: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => out.write_all(text.as_bytes()).context("writing output")?,
    }
    Ok(())
}

fn json_bool(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> anyhow::Result<i32> {
    match command {
        Command::Riccati { a, gamma, c } => {
            let gamma = GainSpec::new(gamma)?.gamma();
            let model = Model::new(a, 1.0, c)?;
            match solve_riccati(&model, gamma) {
                Ok(sm) => {
                    writeln!(
                        out,
                        "{{\"P\":{},\"X\":{},\"a_hat\":{},\"g_hat\":{},\"feasible_gain\":{}}}",
                        sig17(sm.p),
                        sig17(sm.x),
                        sig17(sm.a_hat),
                        sig17(sm.g_hat),
                        json_bool(sm.feasible_gain)
                    )?;
                    Ok(EXIT_OK)
                }
                Err(_) => {
                    writeln!(out, "{{\"infeasible\":true}}")?;
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Certify { a, gamma } => {
            let gamma = GainSpec::new(gamma)?.gamma();
            let rep = certify::certify(a, gamma);
            writeln!(
                out,
                "{{\"a\":{},\"gamma\":{},\"P\":{},\"p_feasible\":{},\"curvature_ok\":{},\
                 \"negativity_ok\":{},\"certified\":{}}}",
                sig17(rep.a),
                sig17(rep.gamma),
                rep.p.map_or_else(|| "null".to_string(), sig17),
                json_bool(rep.p_feasible),
                json_bool(rep.curvature_ok),
                json_bool(rep.negativity_ok),
                json_bool(rep.certified)
            )?;
            Ok(if rep.certified { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::GammaStar { a, tol } => {
            anyhow::ensure!(tol > 0.0, "--tol must be positive");
            let lower = certify::gamma_lower_bound(a);
            let upper = certify::gamma_upper_bound(a);
            match certify::gamma_star(a, tol) {
                Ok(g) => {
                    writeln!(
                        out,
                        "{{\"a\":{},\"gamma_star\":{},\"lower_bound\":{},\"upper_bound\":{},\"tol\":{}}}",
                        sig17(a),
                        sig17(g),
                        sig17(lower),
                        sig17(upper),
                        sig17(tol)
                    )?;
                    Ok(EXIT_OK)
                }
                Err(CertifyError::NotFound(limit)) => {
                    writeln!(
                        out,
                        "{{\"a\":{},\"not_found\":true,\"search_limit\":{}}}",
                        sig17(a),
                        sig17(limit)
                    )?;
                    Ok(EXIT_NEGATIVE)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Sweep {
            a_min,
            a_max,
            steps,
            tol,
            out: path,
        } => {
            anyhow::ensure!(steps >= 2, "--steps must be at least 2");
            anyhow::ensure!(tol > 0.0, "--tol must be positive");
            let rows = certify::sweep(a_min, a_max, steps, tol);
            let (text, all_sandwiched) = sweep_csv(&rows);
            emit(out, &path, &text)?;
            Ok(if all_sandwiched { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Simulate {
            a,
            b_true,
            gamma,
            horizon,
            disturbance,
            seed,
            x0,
            out: path,
        } => {
            let gamma = GainSpec::new(gamma)?.gamma();
            let kind: PlanKind = disturbance.into();
            // One flag drives both channels; the v channel gets an offset
            // seed so the two white streams differ.
            let plan_w = DisturbancePlan::new(kind, seed, 1.0, horizon);
            let plan_v = DisturbancePlan::new(kind, seed.wrapping_add(1), 1.0, horizon);
            let trace = verify::simulate_closed_loop(a, b_true, gamma, x0, &plan_w, &plan_v, horizon)?;
            emit(out, &path, &trace.to_csv())?;
            Ok(EXIT_OK)
        }
        Command::VerifyLemma {
            trials,
            horizon,
            seed,
        } => {
            anyhow::ensure!(trials >= 1, "--trials must be at least 1");
            anyhow::ensure!(
                (1..=verify::ORACLE_MAX_HORIZON).contains(&horizon),
                "--horizon must be in 1..={}",
                verify::ORACLE_MAX_HORIZON
            );
            let report = verify::lemma_oracle_batch(trials, horizon, seed)?;
            let failures = report
                .failures
                .iter()
                .map(|f| {
                    format!(
                        "{{\"trial\":{},\"a\":{},\"b\":{},\"horizon\":{},\"gap\":{}}}",
                        f.trial,
                        sig17(f.a),
                        sig17(f.b),
                        f.horizon,
                        sig17(f.gap)
                    )
                })
                .collect::<Vec<_>>()
                .join(",");
            writeln!(
                out,
                "{{\"trials\":{},\"max_gap\":{},\"failures\":[{}]}}",
                report.trials,
                sig17(report.max_gap),
                failures
            )?;
            Ok(if report.failures.is_empty() {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            })
        }
        Command::Figure {
            which,
            a,
            gamma,
            out: path,
        } => match which {
            FigureKind::Quadfuns => {
                let gamma = GainSpec::new(gamma)?.gamma();
                let rep = certify::certify(a, gamma);
                let p = rep
                    .p
                    .filter(|p| *p > 1.0)
                    .ok_or_else(|| anyhow::anyhow!("no P > 1 at (a, gamma) = ({a}, {gamma})"))?;
                // Defaults: x_hat = 1, l1 = 0, lm1 on the induction
                // threshold, y over [0.3, 0.9].
                let x_hat = 1.0;
                let lm1 = -(p / (p - 1.0)) * x_hat * x_hat;
                let grid: Vec<f64> = (0..=120).map(|i| 0.3 + 0.6 * i as f64 / 120.0).collect();
                let rows = certify::figure_quadfuns(a, gamma, x_hat, 0.0, lm1, &grid)
                    .map_err(|e| anyhow::anyhow!("{e}"))?;
                let mut text = String::from("y,l1_next,lm1_next,threshold\n");
                for r in rows {
                    text.push_str(&format!(
                        "{},{},{},{}\n",
                        sig17(r.y),
                        sig17(r.l1_next),
                        sig17(r.lm1_next),
                        sig17(r.threshold)
                    ));
                }
                emit(out, &path, &text)?;
                Ok(EXIT_OK)
            }
            FigureKind::Gammascaling => {
                // 121 poles over [-6, 6].
                let rows = certify::sweep(-6.0, 6.0, 121, 1e-6);
                let (text, all_sandwiched) = sweep_csv(&rows);
                emit(out, &path, &text)?;
                Ok(if all_sandwiched { EXIT_OK } else { EXIT_NEGATIVE })
            }
        },
    }
}

/// Render sweep rows and report whether every row satisfied the analytic
/// bound sandwich within 1e-4.
fn sweep_csv(rows: &[certify::SweepRow]) -> (String, bool) {
    let mut text =
        String::from("a,gamma_star,lower_bound,upper_bound,P,p_feasible,curvature_ok,negativity_ok\n");
    let mut all_sandwiched = true;
    for r in rows {
        let g = r.gamma_star.unwrap_or(f64::NAN);
        if !(r.lower_bound - 1e-4 <= g && g <= r.upper_bound + 1e-4) {
            all_sandwiched = false;
        }
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            sig17(r.a),
            sig17(g),
            sig17(r.lower_bound),
            sig17(r.upper_bound),
            sig17(r.p.unwrap_or(f64::NAN)),
            json_bool(r.p_feasible),
            json_bool(r.curvature_ok),
            json_bool(r.negativity_ok)
        ));
    }
    (text, all_sandwiched)
}
