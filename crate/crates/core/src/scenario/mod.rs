//! Scenario documents: loading and validation, capacity restrictions, and the
//! build-solve-report pipeline.

mod document;
mod run;
mod tcr;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::catalog::{CatalogBuilder, CatalogError, ServiceCatalog};
use crate::formulation::{ModelConfig, ModelError};
use crate::network::validate_network;
use crate::network::{Horizon, LinkId, Network, NetworkBuilder, NodeId, TrainTypeId};
use crate::solver::SolveStatus;

pub use document::{
    CapacitySpec, CapacityValue, ConfigSpec, DemandSpec, DurationSpec, ImplementsSpec, LinkSpec,
    RouteSpec, ScenarioDocument, SetupOverride, TcrOverride,
};
pub use run::{run, RunOptions, RunOutcome};
pub use tcr::apply_tcr;

/// One problem found while loading, located by a JSON path such as
/// `routes[2].links[1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

fn list(errors: &[LoadError]) -> String {
    errors
        .iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("malformed scenario at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid scenario: {}", list(.0))]
    Invalid(Vec<LoadError>),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("solver finished with status {status}{}", .model_path.as_ref().map(|p| format!("; model written to {}", p.display())).unwrap_or_default())]
    Solve {
        status: SolveStatus,
        model_path: Option<PathBuf>,
    },
}

impl ScenarioError {
    pub fn errors(&self) -> &[LoadError] {
        match self {
            ScenarioError::Invalid(e) => e,
            _ => &[],
        }
    }
}

/// A validated scenario: the document it came from plus the network, catalog
/// and model configuration built from it.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub document: ScenarioDocument,
    pub network: Network,
    pub catalog: ServiceCatalog,
    pub config: ModelConfig,
}

impl Scenario {
    pub fn name(&self) -> &str {
        &self.document.name
    }

    pub fn from_document(document: ScenarioDocument) -> Result<Self, ScenarioError> {
        Builder::default().build(document)
    }

    /// Pretty-printed document; loading it again yields an equivalent scenario.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.document).expect("document serializes");
        s.push('\n');
        s
    }
}

/// Parses and validates a scenario document.
pub fn load_scenario(bytes: &[u8]) -> Result<Scenario, ScenarioError> {
    let document: ScenarioDocument =
        serde_json::from_slice(bytes).map_err(|e| ScenarioError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
    Scenario::from_document(document)
}

pub fn load_scenario_file(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| ScenarioError::Io {
        path: path.to_owned(),
        source,
    })?;
    load_scenario(&bytes)
}

#[derive(Default)]
struct Builder {
    errors: Vec<LoadError>,
    types: HashMap<String, TrainTypeId>,
    nodes: HashMap<String, NodeId>,
    links: HashMap<String, LinkId>,
}

impl Builder {
    fn err(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.errors.push(LoadError {
            path: path.into(),
            message: message.into(),
        });
    }

    fn node(&mut self, path: String, name: &str) -> Option<NodeId> {
        let n = self.nodes.get(name).copied();
        if n.is_none() {
            self.err(path, format!("unknown node {name:?}"));
        }
        n
    }

    fn link(&mut self, path: String, name: &str) -> Option<LinkId> {
        let l = self.links.get(name).copied();
        if l.is_none() {
            self.err(path, format!("unknown link {name:?}"));
        }
        l
    }

    fn train_type(&mut self, path: String, label: &str) -> Option<TrainTypeId> {
        let h = self.types.get(label).copied();
        if h.is_none() {
            self.err(path, format!("unknown train type {label:?}"));
        }
        h
    }

    fn fail(self) -> ScenarioError {
        ScenarioError::Invalid(self.errors)
    }

    fn build(mut self, doc: ScenarioDocument) -> Result<Scenario, ScenarioError> {
        let network = self.network(&doc)?;
        let catalog = self.catalog(&doc, &network)?;
        let config = self.config(&doc, &network, &catalog)?;
        let network = tcr::apply_overrides(&network, &doc.tcr_overrides, "tcr_overrides")?;
        Ok(Scenario {
            document: doc,
            network,
            catalog,
            config,
        })
    }

    fn network(&mut self, doc: &ScenarioDocument) -> Result<Network, ScenarioError> {
        if doc.period_length_minutes == 0 {
            self.err("period_length_minutes", "must be positive");
        }
        let Ok(horizon) = Horizon::new(doc.horizon) else {
            self.err("horizon", "must be at least one period");
            return Err(std::mem::take(self).fail());
        };
        let mut nb = NetworkBuilder::new(horizon);
        nb.default_capacity(doc.nominal_capacities.default);

        for (i, label) in doc.train_types.iter().enumerate() {
            if self.types.contains_key(label) {
                self.err(
                    format!("train_types[{i}]"),
                    format!("duplicate train type {label:?}"),
                );
                continue;
            }
            let id = nb.add_train_type(label.clone());
            self.types.insert(label.clone(), id);
        }
        for (i, name) in doc.nodes.iter().enumerate() {
            if self.nodes.contains_key(name) {
                self.err(format!("nodes[{i}]"), format!("duplicate node {name:?}"));
                continue;
            }
            let id = nb.add_node(name.clone());
            self.nodes.insert(name.clone(), id);
        }
        for (i, spec) in doc.links.iter().enumerate() {
            let tail = self.node(format!("links[{i}].tail"), &spec.tail);
            let head = self.node(format!("links[{i}].head"), &spec.head);
            let (Some(tail), Some(head)) = (tail, head) else {
                continue;
            };
            let name = spec
                .name
                .clone()
                .unwrap_or_else(|| format!("{}-{}", spec.tail, spec.head));
            if self.links.contains_key(&name) {
                self.err(format!("links[{i}]"), format!("duplicate link {name:?}"));
                continue;
            }
            let id = nb
                .add_named_link(name.clone(), tail, head)
                .expect("endpoints resolved");
            self.links.insert(name, id);
        }

        let mut paired: BTreeMap<LinkId, usize> = BTreeMap::new();
        for (i, [a, b]) in doc.single_track_pairs.iter().enumerate() {
            let la = self.link(format!("single_track_pairs[{i}][0]"), a);
            let lb = self.link(format!("single_track_pairs[{i}][1]"), b);
            let (Some(la), Some(lb)) = (la, lb) else {
                continue;
            };
            for l in [la, lb] {
                if let Some(prev) = paired.insert(l, i) {
                    self.err(
                        format!("single_track_pairs[{i}]"),
                        format!("link already coupled in single_track_pairs[{prev}]"),
                    );
                }
            }
            nb.couple(la, lb).expect("links resolved");
        }

        let t_max = doc.horizon;
        let check_cap = |v: f64| v.is_finite() && v >= 0.0;
        if !check_cap(doc.nominal_capacities.default) {
            self.err(
                "nominal_capacities.default",
                "capacity must be finite and >= 0",
            );
        }
        for (name, value) in &doc.nominal_capacities.per_link {
            let path = format!("nominal_capacities.per_link.{name}");
            let Some(l) = self.link(path.clone(), name) else {
                continue;
            };
            let row = match value {
                CapacityValue::Uniform(v) => vec![*v; t_max],
                CapacityValue::PerPeriod(vs) => {
                    if vs.len() != t_max {
                        self.err(
                            path,
                            format!("{} values given for a horizon of {t_max} periods", vs.len()),
                        );
                        continue;
                    }
                    vs.clone()
                }
            };
            for (t, v) in row.into_iter().enumerate() {
                if !check_cap(v) {
                    self.err(
                        path.clone(),
                        format!("capacity {v} in period {} must be finite and >= 0", t + 1),
                    );
                }
                nb.set_capacity(l, t + 1, v).expect("period in range");
            }
        }

        for (i, spec) in doc.durations.iter().enumerate() {
            let path = format!("durations[{i}]");
            let link = self.link(format!("{path}.link"), &spec.link);
            let types: Vec<TrainTypeId> = match &spec.train_type {
                Some(label) => self
                    .train_type(format!("{path}.train_type"), label)
                    .into_iter()
                    .collect(),
                None => self.types.values().copied().collect(),
            };
            let periods = match (spec.minutes, spec.periods) {
                (Some(m), None) => m / f64::from(doc.period_length_minutes.max(1)),
                (None, Some(p)) => p,
                _ => {
                    self.err(path, "give exactly one of minutes or periods");
                    continue;
                }
            };
            if !(periods.is_finite() && periods >= 0.0) {
                self.err(path, format!("duration {periods} must be finite and >= 0"));
                continue;
            }
            if periods > 1.0 {
                self.err(
                    path,
                    format!("duration of {periods} periods exceeds one period"),
                );
                continue;
            }
            if let Some(l) = link {
                for h in types {
                    nb.set_duration(l, h, periods).expect("resolved");
                }
            }
        }

        if !self.errors.is_empty() {
            return Err(std::mem::take(self).fail());
        }
        let network = nb.build();
        let report = validate_network(&network);
        for v in report.violations() {
            self.err(
                format!("network.{}", v.subject),
                format!("{}: {}", v.code.as_str(), v.detail),
            );
        }
        if !self.errors.is_empty() {
            return Err(std::mem::take(self).fail());
        }
        Ok(network)
    }

    fn catalog(
        &mut self,
        doc: &ScenarioDocument,
        network: &Network,
    ) -> Result<ServiceCatalog, ScenarioError> {
        let mut cb = CatalogBuilder::new();
        let mut demand_ids = HashMap::new();
        let mut route_ids = HashMap::new();

        for (i, spec) in doc.demands.iter().enumerate() {
            let path = format!("demands[{i}]");
            let o = self.node(format!("{path}.origin"), &spec.origin);
            let d = self.node(format!("{path}.destination"), &spec.destination);
            let h = self.train_type(format!("{path}.train_type"), &spec.train_type);
            if spec.volumes.len() != doc.horizon {
                self.err(
                    format!("{path}.volumes"),
                    format!(
                        "{} values given for a horizon of {} periods",
                        spec.volumes.len(),
                        doc.horizon
                    ),
                );
            }
            let via: Vec<_> = spec
                .via
                .iter()
                .enumerate()
                .filter_map(|(k, n)| self.node(format!("{path}.via[{k}]"), n))
                .collect();
            if let (Some(o), Some(d), Some(h)) = (o, d, h) {
                let id = cb.add_demand(spec.name.clone(), o, d, h, spec.volumes.clone());
                cb.set_via(id, via).expect("fresh id");
                demand_ids.insert(spec.name.clone(), id);
            }
        }

        for (i, spec) in doc.routes.iter().enumerate() {
            let path = format!("routes[{i}]");
            let h = self.train_type(format!("{path}.train_type"), &spec.train_type);
            let mut links = Vec::new();
            let mut ok = true;
            for (k, name) in spec.links.iter().enumerate() {
                match self.links.get(name) {
                    Some(&l) => links.push(l),
                    None => {
                        ok = false;
                        self.err(
                            format!("{path}.links[{k}]"),
                            format!("route {:?} references unknown link {name:?}", spec.name),
                        );
                    }
                }
            }
            let origin = spec
                .origin
                .as_ref()
                .map(|n| self.node(format!("{path}.origin"), n));
            let destination = spec
                .destination
                .as_ref()
                .map(|n| self.node(format!("{path}.destination"), n));
            let (Some(h), true) = (h, ok) else {
                continue;
            };
            let id = match (origin, destination) {
                (None, None) => cb
                    .add_route(network, spec.name.clone(), h, links)
                    .expect("links resolved"),
                (o, d) => {
                    let first = links.first().map(|&l| network.links()[l.index()].tail);
                    let last = links.last().map(|&l| network.links()[l.index()].head);
                    let (Some(o), Some(d)) = (o.flatten().or(first), d.flatten().or(last)) else {
                        continue;
                    };
                    cb.add_route_with_endpoints(spec.name.clone(), o, d, h, links)
                }
            };
            if !spec.metadata.is_empty() {
                cb.set_route_metadata(id, spec.metadata.clone())
                    .expect("fresh id");
            }
            route_ids.insert(spec.name.clone(), id);
        }

        if let Some(pairs) = &doc.implements {
            cb.explicit_relation();
            for (i, p) in pairs.iter().enumerate() {
                let d = demand_ids.get(&p.demand).copied();
                let r = route_ids.get(&p.route).copied();
                if d.is_none() {
                    self.err(
                        format!("implements[{i}].demand"),
                        format!("unknown demand {:?}", p.demand),
                    );
                }
                if r.is_none() {
                    self.err(
                        format!("implements[{i}].route"),
                        format!("unknown route {:?}", p.route),
                    );
                }
                if let (Some(d), Some(r)) = (d, r) {
                    cb.implements(d, r);
                }
            }
        }

        if !self.errors.is_empty() {
            return Err(std::mem::take(self).fail());
        }
        cb.build(network).map_err(|e| {
            let path = catalog_error_path(&e, doc);
            self.err(path, e.to_string());
            std::mem::take(self).fail()
        })
    }

    fn config(
        &mut self,
        doc: &ScenarioDocument,
        network: &Network,
        catalog: &ServiceCatalog,
    ) -> Result<ModelConfig, ScenarioError> {
        let spec = &doc.config;
        let mut config = ModelConfig {
            capacity_mode: spec.capacity_mode,
            k_het: spec.k_het,
            k_setup: spec.k_setup,
            k_setup_overrides: BTreeMap::new(),
            big_m: spec.big_m,
            arrival_slack: spec.arrival_slack,
            arrival_slack_overrides: BTreeMap::new(),
            cost_cancel: spec.cost_cancel,
            cost_post: spec.cost_post,
            relax_integrality: spec.relax_integrality,
            emit_cancel3: spec.emit_cancel3,
            earliest_flow_tiebreak: spec.earliest_flow_tiebreak,
        };
        for (i, o) in spec.k_setup_overrides.iter().enumerate() {
            let path = format!("config.k_setup_overrides[{i}]");
            if !network.horizon().contains(o.period) {
                self.err(
                    format!("{path}.period"),
                    format!("period {} outside the horizon", o.period),
                );
            }
            if let Some(l) = self.link(format!("{path}.link"), &o.link) {
                config.k_setup_overrides.insert((l, o.period), o.value);
            }
        }
        for (name, &s) in &spec.arrival_slack_overrides {
            match catalog.route_by_name(name) {
                Some(r) => {
                    config.arrival_slack_overrides.insert(r, s);
                }
                None => self.err(
                    format!("config.arrival_slack_overrides.{name}"),
                    format!("unknown route {name:?}"),
                ),
            }
        }
        if let Err(e) = config.validate(network) {
            self.err("config", e.to_string());
        }
        if !self.errors.is_empty() {
            return Err(std::mem::take(self).fail());
        }
        Ok(config)
    }
}

fn catalog_error_path(e: &CatalogError, doc: &ScenarioDocument) -> String {
    let route = |name: &str| {
        doc.routes
            .iter()
            .position(|r| r.name == name)
            .map_or("routes".to_owned(), |i| format!("routes[{i}]"))
    };
    let demand = |name: &str| {
        doc.demands
            .iter()
            .position(|d| d.name == name)
            .map_or("demands".to_owned(), |i| format!("demands[{i}]"))
    };
    match e {
        CatalogError::DuplicateName {
            what: "route",
            name,
        } => route(name),
        CatalogError::DuplicateName { name, .. } => demand(name),
        CatalogError::DemandLoop { demand: d } => demand(d),
        CatalogError::VolumeLength { demand: d, .. } => format!("{}.volumes", demand(d)),
        CatalogError::InvalidRoute { route: r, .. }
        | CatalogError::MissingDuration { route: r, .. } => route(r),
        CatalogError::PropertyMismatch { .. } | CatalogError::MissingImplementation { .. } => {
            "implements".to_owned()
        }
        _ => "catalog".to_owned(),
    }
}
