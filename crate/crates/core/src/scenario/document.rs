//! Serialized scenario layout.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::formulation::{CapacityMode, ModelConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub name: String,
    /// Free text, e.g. where the data came from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
    pub period_length_minutes: u32,
    /// Number of periods.
    pub horizon: usize,
    pub train_types: Vec<String>,
    pub nodes: Vec<String>,
    pub links: Vec<LinkSpec>,
    /// Links that are the two directions of one single track.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub single_track_pairs: Vec<[String; 2]>,
    pub nominal_capacities: CapacitySpec,
    #[serde(default)]
    pub durations: Vec<DurationSpec>,
    #[serde(default)]
    pub routes: Vec<RouteSpec>,
    #[serde(default)]
    pub demands: Vec<DemandSpec>,
    /// Explicit demand/route pairs; derived from endpoints and type if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub implements: Option<Vec<ImplementsSpec>>,
    #[serde(default)]
    pub config: ConfigSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tcr_overrides: Vec<TcrOverride>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSpec {
    /// Defaults to `"{tail}-{head}"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub tail: String,
    pub head: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacitySpec {
    pub default: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub per_link: BTreeMap<String, CapacityValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CapacityValue {
    Uniform(f64),
    PerPeriod(Vec<f64>),
}

/// Traversal time of a link, in minutes or in periods. Without a train type
/// it applies to every type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DurationSpec {
    pub link: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train_type: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minutes: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periods: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RouteSpec {
    pub name: String,
    pub train_type: String,
    pub links: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub destination: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandSpec {
    pub name: String,
    pub origin: String,
    pub destination: String,
    pub train_type: String,
    /// Trains requested per period.
    pub volumes: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub via: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImplementsSpec {
    pub demand: String,
    pub route: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigSpec {
    pub capacity_mode: CapacityMode,
    pub k_het: f64,
    pub k_setup: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub k_setup_overrides: Vec<SetupOverride>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub big_m: Option<f64>,
    pub arrival_slack: f64,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub arrival_slack_overrides: BTreeMap<String, f64>,
    pub cost_cancel: f64,
    pub cost_post: f64,
    pub relax_integrality: bool,
    pub emit_cancel3: bool,
    pub earliest_flow_tiebreak: bool,
}

impl Default for ConfigSpec {
    fn default() -> Self {
        let d = ModelConfig::default();
        Self {
            capacity_mode: d.capacity_mode,
            k_het: d.k_het,
            k_setup: d.k_setup,
            k_setup_overrides: Vec::new(),
            big_m: d.big_m,
            arrival_slack: d.arrival_slack,
            arrival_slack_overrides: BTreeMap::new(),
            cost_cancel: d.cost_cancel,
            cost_post: d.cost_post,
            relax_integrality: d.relax_integrality,
            emit_cancel3: d.emit_cancel3,
            earliest_flow_tiebreak: d.earliest_flow_tiebreak,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetupOverride {
    pub link: String,
    pub period: usize,
    pub value: f64,
}

/// A temporary capacity restriction on one link: either a new capacity or a
/// factor on the current one, for one period or (without `period`) all.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TcrOverride {
    pub link: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

impl TcrOverride {
    pub fn set(link: impl Into<String>, period: usize, capacity: f64) -> Self {
        Self {
            link: link.into(),
            period: Some(period),
            capacity: Some(capacity),
            scale: None,
        }
    }

    pub fn scale_all(link: impl Into<String>, factor: f64) -> Self {
        Self {
            link: link.into(),
            period: None,
            capacity: None,
            scale: Some(factor),
        }
    }
}
