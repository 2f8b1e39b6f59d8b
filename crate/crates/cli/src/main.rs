use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cavity_entangle_cli::{
    append_record, run_scenario, sweep, write_text, CliError, Result, Settings, SweepGrid, INITIAL_STATES,
};

#[derive(Parser)]
#[command(name = "cavity-sim", version, about = "Dissipative entanglement in coupled cavities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one scenario and write its trajectory CSV.
    Simulate {
        #[arg(long)]
        scenario: Option<String>,
        /// `key = value` file applied before `--set`.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override, e.g. `--set kappa=0.02`. Repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// full | effective | closed-form
        #[arg(long)]
        model: Option<String>,
        /// none | sigma-x1 | sigma-x2
        #[arg(long)]
        feedback: Option<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Run each of the five reference ground states in turn.
        #[arg(long)]
        all_initial: bool,
    },
    /// Run a parameter grid and write the aggregate CSV.
    Sweep {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Worker threads; all cores by default.
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn settings(scenario: Option<&str>, config: Option<&PathBuf>, set: &[String]) -> Result<Settings> {
    let mut s = match config {
        Some(path) => Settings::parse(&std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?)?,
        None => Settings::new(cavity_entangle_cli::Scenario::Custom),
    };
    if let Some(name) = scenario {
        s.set("scenario", name)?;
    }
    for pair in set {
        s.set_pair(pair)?;
    }
    Ok(s)
}

fn main_inner(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            scenario,
            config,
            set,
            model,
            feedback,
            out,
            all_initial,
        } => {
            let mut s = settings(scenario.as_deref(), config.as_ref(), &set)?;
            if let Some(m) = model {
                s.set("model", &m)?;
            }
            if let Some(f) = feedback {
                s.set("feedback", &f)?;
            }
            s.set("out", &out.to_string_lossy())?;
            let initials: Vec<Option<&str>> = if all_initial {
                INITIAL_STATES.iter().map(|l| Some(*l)).collect()
            } else {
                vec![None]
            };
            for init in initials {
                let mut s = s.clone();
                if let Some(l) = init {
                    s.set("initial", l)?;
                }
                let spec = s.resolve()?;
                let (rec, _) = run_scenario(&spec)?;
                let steady = rec.steady_fidelity.map_or("n/a".into(), |f| format!("{f:.6}"));
                println!(
                    "{} F(t={})={:.6} steady={} -> {}",
                    spec.tag(),
                    rec.t_final,
                    rec.final_fidelity,
                    steady,
                    rec.output.as_ref().map_or(String::new(), |p| p.display().to_string())
                );
            }
        }
        Command::Sweep {
            scenario,
            config,
            set,
            out,
            jobs,
        } => {
            let s = settings(Some(&scenario), config.as_ref(), &set)?;
            let template = s.resolve()?;
            let grid = SweepGrid::named_from(template)
                .ok_or_else(|| CliError::Config(format!("scenario '{scenario}' has no sweep grid")))?;
            eprintln!("{scenario}: {} points", grid.cardinality());
            let outcome = sweep(&grid, jobs)?;
            std::fs::create_dir_all(&out).map_err(|source| CliError::Io {
                path: out.clone(),
                source,
            })?;
            let path = out.join(format!("{scenario}_sweep.csv"));
            let digest = write_text(&outcome.aggregate_csv(), &path)?;
            let log = out.join("runs.jsonl");
            for row in &outcome.rows {
                append_record(&log, &row.record)?;
            }
            for f in &outcome.failures {
                eprintln!("failed at {:?}: {}", f.point, f.error);
            }
            if let Some(best) = outcome.max_fidelity() {
                println!("max F={:.6} at {:?}", best.fidelity, best.point);
            }
            println!(
                "{} ok, {} failed -> {} (sha256 {digest})",
                outcome.rows.len(),
                outcome.failures.len(),
                path.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
