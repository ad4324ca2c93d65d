//! Temporary capacity restrictions.

use super::{LoadError, Scenario, ScenarioError, TcrOverride};
use crate::network::Network;

/// Applies overrides in order; entry `k` is reported as `{prefix}[k]`.
pub(super) fn apply_overrides(
    network: &Network,
    overrides: &[TcrOverride],
    prefix: &str,
) -> Result<Network, ScenarioError> {
    let mut errors = Vec::new();
    let mut edits = Vec::new();
    let mut current = network.clone();
    for (k, o) in overrides.iter().enumerate() {
        let path = format!("{prefix}[{k}]");
        let mut err = |field: &str, message: String| {
            errors.push(LoadError {
                path: if field.is_empty() {
                    path.clone()
                } else {
                    format!("{path}.{field}")
                },
                message,
            })
        };
        let Some(l) = current.link_by_name(&o.link) else {
            err("link", format!("unknown link {:?}", o.link));
            continue;
        };
        let t_max = current.horizon().t_max();
        let periods: Vec<usize> = match o.period {
            Some(t) if !current.horizon().contains(t) => {
                err(
                    "period",
                    format!("period {t} outside the horizon 1..={t_max}"),
                );
                continue;
            }
            Some(t) => vec![t],
            None => current.horizon().periods().collect(),
        };
        edits.clear();
        match (o.capacity, o.scale) {
            (Some(c), None) if c.is_finite() && c >= 0.0 => {
                edits.extend(periods.iter().map(|&t| (l, t, c)));
            }
            (None, Some(s)) if s.is_finite() && s >= 0.0 => {
                edits.extend(
                    periods
                        .iter()
                        .map(|&t| (l, t, current.nominal_capacity(l, t) * s)),
                );
            }
            (Some(_), None) | (None, Some(_)) => {
                err("", "capacity and scale must be finite and >= 0".to_owned());
                continue;
            }
            _ => {
                err("", "give exactly one of capacity or scale".to_owned());
                continue;
            }
        }
        current = current.with_capacities(&edits).expect("override checked");
    }
    if errors.is_empty() {
        Ok(current)
    } else {
        Err(ScenarioError::Invalid(errors))
    }
}

/// Returns `scenario` with the listed capacity cells replaced; every other
/// cell is unchanged. The overrides are appended to the scenario document so
/// that it still reproduces the returned network.
pub fn apply_tcr(
    scenario: &Scenario,
    overrides: &[TcrOverride],
) -> Result<Scenario, ScenarioError> {
    let network = apply_overrides(&scenario.network, overrides, "overrides")?;
    let mut next = scenario.clone();
    next.network = network;
    next.document
        .tcr_overrides
        .extend(overrides.iter().cloned());
    Ok(next)
}
