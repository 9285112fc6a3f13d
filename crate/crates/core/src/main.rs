use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use gaussflow::diagnostics::rate_from_series;
use gaussflow::io::{read_series, write_series, write_snapshot};
use gaussflow::speed::PowerTerm;
use gaussflow::{
    compute_geometry, validate_assumption, Error, RunConfig, RunStatus,
    SpeedFamily, SpeedFunction,
};

#[derive(Parser)]
#[command(name = "gaussflow", version, about = "Nonhomogeneous Gauss curvature flow in hyperbolic space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the configured shape; writes series.csv, snapshots and config.toml.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `out_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the admissibility conditions for a speed function.
    ValidateF {
        #[arg(long)]
        family: String,
        #[arg(long)]
        alpha: Option<f64>,
        /// Comma-separated `a:k` pairs for `power_sum`.
        #[arg(long, value_delimiter = ',')]
        terms: Vec<String>,
        #[arg(long, default_value_t = 1e-3)]
        x_lo: f64,
        #[arg(long, default_value_t = 1e3)]
        x_hi: f64,
        #[arg(long, default_value_t = 4000)]
        samples: usize,
    },
    /// Fit the decay rate of a run and compare with the linearized prediction.
    Analyze {
        #[arg(long)]
        series: PathBuf,
        /// Defaults to `config.toml` next to the series file.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Print the geometry of the configured initial shape, one row per node.
    Geometry {
        #[arg(long)]
        config: PathBuf,
    },
}

enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidArgument(_) | Error::NonConvexShape { .. } => {
                Failure::Config(e.into())
            }
            _ => Failure::Runtime(e.into()),
        }
    }
}

fn parse_family(
    family: &str,
    alpha: Option<f64>,
    terms: &[String],
) -> Result<SpeedFamily, Failure> {
    let need_alpha = || {
        alpha.ok_or_else(|| Failure::Config(anyhow::anyhow!("--alpha is required for family {family}")))
    };
    Ok(match family {
        "power" => SpeedFamily::Power { alpha: need_alpha()? },
        "power_log" => SpeedFamily::PowerLog { alpha: need_alpha()? },
        "exp_minus_one" => SpeedFamily::ExpMinusOne,
        "log1p" => SpeedFamily::Log1p,
        "power_sum" => {
            let terms = terms
                .iter()
                .map(|t| {
                    let (a, k) = t
                        .split_once(':')
                        .ok_or_else(|| anyhow::anyhow!("term {t:?} is not of the form a:k"))?;
                    Ok(PowerTerm {
                        a: a.trim().parse()?,
                        k: k.trim().parse()?,
                    })
                })
                .collect::<anyhow::Result<Vec<_>>>()
                .map_err(Failure::Config)?;
            SpeedFamily::PowerSum { terms }
        }
        other => {
            return Err(Failure::Config(anyhow::anyhow!(
                "unknown family {other:?} (power, power_sum, exp_minus_one, power_log, log1p)"
            )))
        }
    })
}

fn run(config: &Path, out: Option<PathBuf>) -> Result<(), Failure> {
    let cfg = RunConfig::load(config)?;
    let out_dir = out.unwrap_or_else(|| cfg.out_dir.clone());
    let engine = cfg.engine()?;
    let graph = cfg.initial_graph()?;

    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))
        .map_err(Failure::Runtime)?;
    std::fs::write(out_dir.join("config.toml"), cfg.to_toml_string()?)
        .context("writing config.toml")
        .map_err(Failure::Runtime)?;

    let mut snapshots = 0usize;
    let mut write_error = None;
    let every = cfg.snapshot_every;
    let mut seen = 0usize;
    let outcome = engine.run_with(graph, |_, state| {
        if seen == 0 || (every > 0 && seen % every == 0) {
            let path = out_dir.join(format!("snapshot_{snapshots:04}.txt"));
            if let Err(e) = write_snapshot(&path, &state.graph, state.t) {
                write_error.get_or_insert(e);
            }
            snapshots += 1;
        }
        seen += 1;
    })?;
    if let Some(e) = write_error {
        return Err(e.into());
    }
    let last = &outcome.final_state;
    write_snapshot(&out_dir.join(format!("snapshot_{snapshots:04}.txt")), &last.graph, last.t)?;
    write_series(&out_dir.join("series.csv"), cfg.n, &outcome.records)?;

    let rec = outcome.records.last().expect("run always records");
    println!(
        "t = {:.6}  steps = {}  osc_rho = {:.3e}  r_fit = {:.12}  volume drift = {:.3e}",
        last.t,
        last.step_count,
        rec.osc_rho,
        rec.r_fit,
        (rec.volume - last.v0).abs() / last.v0
    );
    match outcome.status {
        RunStatus::Converged => println!("converged"),
        RunStatus::TMaxReached => println!("reached t_max"),
        RunStatus::Aborted(e) => {
            eprintln!("aborted: {e}");
            return Err(Failure::Runtime(e.into()));
        }
    }
    Ok(())
}

fn analyze(series: &Path, config: Option<PathBuf>) -> Result<(), Failure> {
    let config = config.unwrap_or_else(|| {
        series
            .parent()
            .unwrap_or_else(|| Path::new("."))
            .join("config.toml")
    });
    let cfg = RunConfig::load(&config)?;
    let speed = cfg.speed_function()?;
    let (n, rows) = read_series(series)?;
    if n != cfg.n {
        return Err(Failure::Config(anyhow::anyhow!(
            "series is for n = {n} but the config says n = {}",
            cfg.n
        )));
    }
    let rho_inf = rows
        .last()
        .ok_or_else(|| Failure::Config(anyhow::anyhow!("{} has no rows", series.display())))?
        .r_fit;
    let samples: Vec<(f64, f64)> = rows.iter().map(|r| (r.t, r.osc_rho)).collect();
    let pred = rate_from_series(&samples, rho_inf, &speed, n)?;
    println!("rho_inf    = {:.12}", pred.rho_inf);
    println!("lambda_fit = {:.6}", pred.lambda_fit);
    println!("lambda*    = {:.6}", pred.lambda_star);
    println!("window     = [{:.4}, {:.4}]", pred.window.0, pred.window.1);
    println!("residual   = {:.3e}", pred.residual);
    println!("rel. gap   = {:.4}", pred.relative_gap());
    Ok(())
}

fn geometry(config: &Path) -> Result<(), Failure> {
    let cfg = RunConfig::load(config)?;
    let graph = cfg.initial_graph()?;
    let fields = compute_geometry(&graph)?;
    println!("theta\trho\tkappa_1\tkappa_2\tK\tH\tsupport\tarea_weight");
    for (j, theta) in graph.grid().theta().iter().enumerate() {
        let k = fields.kappa[j];
        println!(
            "{:.10}\t{:.12}\t{:.12}\t{:.12}\t{:.12}\t{:.12}\t{:.12}\t{:.6e}",
            theta,
            graph.rho()[j],
            k[0],
            if cfg.n == 2 { k[1] } else { f64::NAN },
            fields.gauss[j],
            fields.mean[j],
            fields.support[j],
            fields.area_weight[j]
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out } => run(&config, out),
        Command::ValidateF {
            family,
            alpha,
            terms,
            x_lo,
            x_hi,
            samples,
        } => parse_family(&family, alpha, &terms).and_then(|fam| {
            let speed = SpeedFunction::new(fam)?;
            let report = validate_assumption(&speed, x_lo, x_hi, samples)?;
            println!("{report}");
            Ok(())
        }),
        Command::Analyze { series, config } => analyze(&series, config),
        Command::Geometry { config } => geometry(&config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
