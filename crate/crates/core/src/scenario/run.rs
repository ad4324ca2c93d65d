use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use super::{Scenario, ScenarioError};
use crate::formulation::{build_model, CapacityMode, ModelConfig, TimeExpandedModel};
use crate::report::{CapacityUsageReport, DemandOutcomeReport};
use crate::solver::{export_model_text, solve_mip, SolveResult, SolveStatus, Tolerances};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub tolerances: Tolerances,
    /// Overrides the scenario's capacity mode.
    pub capacity_mode: Option<CapacityMode>,
    /// Overrides the scenario's relax_integrality flag.
    pub relax_integrality: Option<bool>,
    /// Write the model here before solving.
    pub export_lp: Option<PathBuf>,
    /// Where to write the model when the solve does not reach an optimum and
    /// no `export_lp` path is set. Defaults to the system temp directory.
    pub diagnostics_dir: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub config: ModelConfig,
    pub model: TimeExpandedModel,
    pub result: SolveResult,
    pub capacity: CapacityUsageReport,
    pub demand: DemandOutcomeReport,
    pub elapsed: Duration,
}

fn write(path: &Path, text: &str) -> Result<(), ScenarioError> {
    std::fs::write(path, text).map_err(|source| ScenarioError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Builds and solves the scenario's model and derives both reports. Any
/// status other than optimal is an error that names the exported model.
pub fn run(scenario: &Scenario, options: &RunOptions) -> Result<RunOutcome, ScenarioError> {
    let start = Instant::now();
    let mut config = scenario.config.clone();
    if let Some(mode) = options.capacity_mode {
        config.capacity_mode = mode;
    }
    if let Some(relax) = options.relax_integrality {
        config.relax_integrality = relax;
    }
    let model = build_model(&scenario.network, &scenario.catalog, &config)?;
    let mut exported = None;
    if let Some(path) = &options.export_lp {
        write(path, &export_model_text(&model))?;
        exported = Some(path.clone());
    }

    let result = solve_mip(&model, &options.tolerances);
    if result.status != SolveStatus::Optimal {
        let model_path = match exported {
            Some(p) => Some(p),
            None => {
                let dir = options
                    .diagnostics_dir
                    .clone()
                    .unwrap_or_else(std::env::temp_dir);
                let stem: String = scenario
                    .name()
                    .chars()
                    .map(|c| {
                        if c.is_ascii_alphanumeric() || c == '-' {
                            c
                        } else {
                            '_'
                        }
                    })
                    .collect();
                let path = dir.join(format!("railcap-{stem}.mps"));
                // best effort: a failed diagnostic write must not hide the solver status
                std::fs::write(&path, export_model_text(&model))
                    .ok()
                    .map(|_| path)
            }
        };
        return Err(ScenarioError::Solve {
            status: result.status,
            model_path,
        });
    }

    let capacity = CapacityUsageReport::from_solution(
        &model,
        &scenario.network,
        &scenario.catalog,
        &config,
        &result.values,
    );
    let demand = DemandOutcomeReport::from_solution(
        &model,
        &scenario.network,
        &scenario.catalog,
        &result.values,
    );
    Ok(RunOutcome {
        config,
        model,
        result,
        capacity,
        demand,
        elapsed: start.elapsed(),
    })
}
