use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use railcap::scenario::load_scenario_file;
use railcap::{run, CapacityMode, RunOptions, ScenarioError, SolveStatus};

#[derive(Parser)]
#[command(
    name = "railcap",
    version,
    about = "Railway capacity allocation under temporary capacity restrictions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and solve a scenario, writing CSV reports.
    Solve {
        #[arg(long)]
        scenario: PathBuf,
        /// basic, single_track_alt1, single_track_alt2 or heterogeneous.
        #[arg(long)]
        capacity_mode: Option<CapacityMode>,
        #[arg(long)]
        relax_integrality: bool,
        /// Write the model in MPS format to this path.
        #[arg(long)]
        export_lp: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Load and validate a scenario without solving it.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
}

fn status_code(status: SolveStatus) -> u8 {
    match status {
        SolveStatus::Optimal => 0,
        SolveStatus::Infeasible => 2,
        SolveStatus::IterationLimit => 3,
        SolveStatus::Unbounded => 4,
    }
}

fn fail(err: &ScenarioError) -> ExitCode {
    eprintln!("error: {err}");
    for e in err.errors() {
        eprintln!("  {e}");
    }
    match err {
        ScenarioError::Solve { status, .. } => ExitCode::from(status_code(*status)),
        _ => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            // usage errors share the input-error code; 2 means infeasible
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Validate { scenario } => match load_scenario_file(&scenario) {
            Ok(s) => {
                println!(
                    "{}: ok ({} nodes, {} links, {} routes, {} demands, {} periods)",
                    s.name(),
                    s.network.nodes().len(),
                    s.network.links().len(),
                    s.catalog.routes().len(),
                    s.catalog.demands().len(),
                    s.network.horizon().t_max()
                );
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Command::Solve {
            scenario,
            capacity_mode,
            relax_integrality,
            export_lp,
            out_dir,
        } => {
            let s = match load_scenario_file(&scenario) {
                Ok(s) => s,
                Err(e) => return fail(&e),
            };
            if let Err(e) = std::fs::create_dir_all(&out_dir) {
                eprintln!("error: cannot create {}: {e}", out_dir.display());
                return ExitCode::from(1);
            }
            if let Some(dir) = export_lp.as_ref().and_then(|p| p.parent()) {
                if !dir.as_os_str().is_empty() {
                    if let Err(e) = std::fs::create_dir_all(dir) {
                        eprintln!("error: cannot create {}: {e}", dir.display());
                        return ExitCode::from(1);
                    }
                }
            }
            let options = RunOptions {
                capacity_mode,
                relax_integrality: relax_integrality.then_some(true),
                export_lp,
                diagnostics_dir: Some(out_dir.clone()),
                ..RunOptions::default()
            };
            let outcome = match run(&s, &options) {
                Ok(o) => o,
                Err(e) => return fail(&e),
            };
            let files = [
                ("capacity_usage.csv", outcome.capacity.to_csv()),
                ("capacity_by_type.csv", outcome.capacity.by_type_csv()),
                ("demand_outcome.csv", outcome.demand.to_csv()),
            ];
            for (name, text) in files {
                let path = out_dir.join(name);
                if let Err(e) = std::fs::write(&path, text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
            let r = &outcome.result;
            println!("scenario:   {}", s.name());
            println!("mode:       {}", outcome.config.capacity_mode);
            println!("status:     {}", r.status);
            println!("objective:  {:.6}", r.objective);
            println!("iterations: {}", r.stats.iterations);
            println!("nodes:      {}", r.stats.nodes);
            println!("time:       {:.3} s", outcome.elapsed.as_secs_f64());
            println!("reports:    {}", out_dir.display());
            ExitCode::from(status_code(r.status))
        }
    }
}
