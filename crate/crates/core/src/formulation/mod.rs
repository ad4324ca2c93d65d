//! The time-expanded linear model: variable families of the demand, route and
//! flow layers, every constraint family, and the objective, kept as
//! solver-independent sparse rows.
//!
//! Names follow `family[key=value,...]`, e.g. `Capacity4[l=E-F,t=4,h=p]` or
//! `direct[l=A-C,t=1,r=A-H-f1]`, and are stable across runs.

mod emit;
mod vars;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{CatalogError, RouteId, ServiceCatalog};
use crate::network::{LinkId, Network, NetworkError};

pub use emit::{
    build_objective, emit_aggregates, emit_arrival, emit_capacity, emit_demand_layer,
    emit_flow_layer, tiebreak_terms,
};
pub use vars::{build_variables, Var, VarKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),
    #[error("route {route}: link {link} takes {duration} periods, more than one period")]
    DurationExceedsPeriod {
        route: String,
        link: String,
        duration: f64,
    },
}

/// Column position of a variable in the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarIndex(pub usize);

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub var: Var,
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub integer: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    pub fn holds(self, lhs: f64, rhs: f64, tol: f64) -> bool {
        match self {
            Relation::Le => lhs <= rhs + tol,
            Relation::Eq => (lhs - rhs).abs() <= tol,
            Relation::Ge => lhs >= rhs - tol,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

/// Constraint family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Capacity1,
    Capacity2Alt1,
    Capacity2Alt2,
    SetupAlt2,
    Capacity3,
    Capacity4,
    Demand1,
    Demand2,
    Departure3,
    Unserved,
    Cancel1,
    Cancel2,
    Cancel3,
    Bound1,
    Bound2,
    Bound3,
    Bound4,
    Bound5,
    Bound6,
    Flow1,
    Flow2,
    Flow3,
    Aggregate1,
    Aggregate2_1,
    Aggregate2_2,
    Aggregate3,
    Aggregate4,
    Arrival1,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Capacity1 => "Capacity1",
            Family::Capacity2Alt1 => "Capacity2_alt1",
            Family::Capacity2Alt2 => "Capacity2_alt2",
            Family::SetupAlt2 => "Setup_alt2",
            Family::Capacity3 => "Capacity3",
            Family::Capacity4 => "Capacity4",
            Family::Demand1 => "Demand1",
            Family::Demand2 => "Demand2",
            Family::Departure3 => "Departure3",
            Family::Unserved => "Unserved",
            Family::Cancel1 => "Cancel1",
            Family::Cancel2 => "Cancel2",
            Family::Cancel3 => "Cancel3",
            Family::Bound1 => "Bound1",
            Family::Bound2 => "Bound2",
            Family::Bound3 => "Bound3",
            Family::Bound4 => "Bound4",
            Family::Bound5 => "Bound5",
            Family::Bound6 => "Bound6",
            Family::Flow1 => "Flow1",
            Family::Flow2 => "Flow2",
            Family::Flow3 => "Flow3",
            Family::Aggregate1 => "Aggregate1",
            Family::Aggregate2_1 => "Aggregate2_1",
            Family::Aggregate2_2 => "Aggregate2_2",
            Family::Aggregate3 => "Aggregate3",
            Family::Aggregate4 => "Aggregate4",
            Family::Arrival1 => "Arrival1",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub name: String,
    pub family: Family,
    /// Canonical terms: sorted by column, no duplicates, no zero coefficients.
    pub terms: Vec<(VarIndex, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl LinearConstraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, a)| a * values[v.0]).sum()
    }

    pub fn is_satisfied(&self, values: &[f64], tol: f64) -> bool {
        self.relation.holds(self.activity(values), self.rhs, tol)
    }
}

/// Which single-track / heterogeneity family accompanies the basic capacity
/// rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapacityMode {
    #[default]
    Basic,
    /// Coupled directions share the mean of their nominal capacities.
    SingleTrackAlt1,
    /// Coupled directions share capacity and pay a setup time for changing
    /// direction, selected by a binary flag.
    SingleTrackAlt2,
    /// Other train types on a link consume extra capacity.
    Heterogeneous,
}

impl CapacityMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CapacityMode::Basic => "basic",
            CapacityMode::SingleTrackAlt1 => "single_track_alt1",
            CapacityMode::SingleTrackAlt2 => "single_track_alt2",
            CapacityMode::Heterogeneous => "heterogeneous",
        }
    }
}

impl std::str::FromStr for CapacityMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "basic" => Ok(CapacityMode::Basic),
            "single_track_alt1" | "alt1" => Ok(CapacityMode::SingleTrackAlt1),
            "single_track_alt2" | "alt2" => Ok(CapacityMode::SingleTrackAlt2),
            "heterogeneous" => Ok(CapacityMode::Heterogeneous),
            other => Err(format!("unknown capacity mode {other:?}")),
        }
    }
}

impl fmt::Display for CapacityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Tunables of the model. `K_setup` follows the convention of values in
/// `(0, 1]` where smaller means a direction change costs more; the
/// meeting-coefficient form `x_c = C_max - K y` with `K >= 1` corresponds to
/// the reciprocal.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub capacity_mode: CapacityMode,
    pub k_het: f64,
    pub k_setup: f64,
    pub k_setup_overrides: BTreeMap<(LinkId, usize), f64>,
    /// `None` selects ten times the largest nominal capacity.
    pub big_m: Option<f64>,
    pub arrival_slack: f64,
    pub arrival_slack_overrides: BTreeMap<RouteId, f64>,
    pub cost_cancel: f64,
    pub cost_post: f64,
    pub relax_integrality: bool,
    /// Emit the arrival-side cancellation balance as well.
    pub emit_cancel3: bool,
    /// After the optimum is found, pick among equally good solutions the one
    /// whose volumes reach every node earliest.
    pub earliest_flow_tiebreak: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            capacity_mode: CapacityMode::Basic,
            k_het: 0.25,
            k_setup: 1.0,
            k_setup_overrides: BTreeMap::new(),
            big_m: None,
            arrival_slack: 0.0,
            arrival_slack_overrides: BTreeMap::new(),
            cost_cancel: 1000.0,
            cost_post: 20.0,
            relax_integrality: false,
            emit_cancel3: false,
            earliest_flow_tiebreak: true,
        }
    }
}

impl ModelConfig {
    pub fn k_setup_at(&self, l: LinkId, t: usize) -> f64 {
        self.k_setup_overrides
            .get(&(l, t))
            .copied()
            .unwrap_or(self.k_setup)
    }

    pub fn slack_of(&self, r: RouteId) -> f64 {
        self.arrival_slack_overrides
            .get(&r)
            .copied()
            .unwrap_or(self.arrival_slack)
    }

    pub fn effective_big_m(&self, network: &Network) -> f64 {
        self.big_m
            .unwrap_or_else(|| (10.0 * network.max_nominal_capacity()).max(1.0))
    }

    pub fn validate(&self, network: &Network) -> Result<(), ModelError> {
        let bad = |msg: String| Err(ModelError::InvalidConfig(msg));
        if !(self.k_het >= 0.0 && self.k_het.is_finite()) {
            return bad(format!("K_het must be >= 0, got {}", self.k_het));
        }
        let setups = std::iter::once(self.k_setup).chain(self.k_setup_overrides.values().copied());
        for k in setups {
            if !(k > 0.0 && k <= 1.0) {
                return bad(format!("K_setup must lie in (0, 1], got {k}"));
            }
        }
        let m = self.effective_big_m(network);
        if !(m > network.max_nominal_capacity() && m.is_finite()) {
            return bad(format!(
                "big-M {m} must exceed the largest nominal capacity {}",
                network.max_nominal_capacity()
            ));
        }
        let slacks = std::iter::once(self.arrival_slack)
            .chain(self.arrival_slack_overrides.values().copied());
        for s in slacks {
            if !(s >= 0.0 && s.is_finite()) {
                return bad(format!("arrival slack must be >= 0, got {s}"));
            }
        }
        for (what, c) in [("cancel", self.cost_cancel), ("postpone", self.cost_post)] {
            if !c.is_finite() {
                return bad(format!("{what} cost must be finite"));
            }
        }
        Ok(())
    }
}

/// Variables, constraints and objective of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeExpandedModel {
    variables: Vec<Variable>,
    index: HashMap<Var, VarIndex>,
    constraints: Vec<LinearConstraint>,
    objective: Vec<(VarIndex, f64)>,
    tiebreak: Vec<(VarIndex, f64)>,
    warnings: Vec<String>,
}

impl TimeExpandedModel {
    pub(crate) fn empty() -> Self {
        Self {
            variables: Vec::new(),
            index: HashMap::new(),
            constraints: Vec::new(),
            objective: Vec::new(),
            tiebreak: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    /// Minimization objective as sparse coefficients.
    pub fn objective(&self) -> &[(VarIndex, f64)] {
        &self.objective
    }

    /// Secondary objective used to pick among alternative optima.
    pub fn tiebreak(&self) -> &[(VarIndex, f64)] {
        &self.tiebreak
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn var(&self, v: Var) -> Option<VarIndex> {
        self.index.get(&v).copied()
    }

    pub fn variable(&self, i: VarIndex) -> &Variable {
        &self.variables[i.0]
    }

    pub fn variable_by_name(&self, name: &str) -> Option<VarIndex> {
        self.variables
            .iter()
            .position(|v| v.name == name)
            .map(VarIndex)
    }

    pub fn constraint_by_name(&self, name: &str) -> Option<&LinearConstraint> {
        self.constraints.iter().find(|c| c.name == name)
    }

    pub fn constraints_of(&self, family: Family) -> impl Iterator<Item = &LinearConstraint> {
        self.constraints.iter().filter(move |c| c.family == family)
    }

    pub fn count_kind(&self, kind: VarKind) -> usize {
        self.variables
            .iter()
            .filter(|v| v.var.kind() == kind)
            .count()
    }

    pub fn integer_columns(&self) -> impl Iterator<Item = VarIndex> + '_ {
        self.variables
            .iter()
            .enumerate()
            .filter(|(_, v)| v.integer)
            .map(|(i, _)| VarIndex(i))
    }

    /// Objective value of an assignment.
    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().map(|&(v, c)| c * values[v.0]).sum()
    }

    /// Value of `v` in `values`, 0 when the variable is not declared.
    pub fn value(&self, values: &[f64], v: Var) -> f64 {
        self.var(v).map_or(0.0, |i| values[i.0])
    }

    pub(crate) fn declare(
        &mut self,
        var: Var,
        name: String,
        lower: f64,
        upper: f64,
        integer: bool,
    ) {
        debug_assert!(!self.index.contains_key(&var), "duplicate variable {name}");
        let idx = VarIndex(self.variables.len());
        self.index.insert(var, idx);
        self.variables.push(Variable {
            var,
            name,
            lower,
            upper,
            integer,
        });
    }

    pub(crate) fn push_constraint(
        &mut self,
        name: String,
        family: Family,
        terms: Vec<(VarIndex, f64)>,
        relation: Relation,
        rhs: f64,
    ) {
        let terms = canonical(terms);
        debug_assert!(terms.iter().all(|t| t.1.is_finite()) && rhs.is_finite());
        self.constraints.push(LinearConstraint {
            name,
            family,
            terms,
            relation,
            rhs,
        });
    }

    pub(crate) fn set_objective(&mut self, terms: Vec<(VarIndex, f64)>) {
        self.objective = canonical(terms);
    }

    pub(crate) fn set_tiebreak(&mut self, terms: Vec<(VarIndex, f64)>) {
        self.tiebreak = canonical(terms);
    }

    pub(crate) fn warn(&mut self, msg: String) {
        self.warnings.push(msg);
    }
}

/// Sorts by column, merges duplicates and drops zero coefficients.
pub(crate) fn canonical(mut terms: Vec<(VarIndex, f64)>) -> Vec<(VarIndex, f64)> {
    terms.sort_by_key(|t| t.0);
    let mut out: Vec<(VarIndex, f64)> = Vec::with_capacity(terms.len());
    for (v, a) in terms {
        match out.last_mut() {
            Some(last) if last.0 == v => last.1 += a,
            _ => out.push((v, a)),
        }
    }
    out.retain(|t| t.1 != 0.0);
    out
}

/// Builds the complete model: variables, all constraint families for the
/// configured capacity mode, objective and tie-break terms.
pub fn build_model(
    network: &Network,
    catalog: &ServiceCatalog,
    config: &ModelConfig,
) -> Result<TimeExpandedModel, ModelError> {
    config.validate(network)?;
    let mut model = build_variables(network, catalog, config)?;
    emit_capacity(&mut model, network, catalog, config);
    emit_demand_layer(&mut model, network, catalog, config);
    emit_flow_layer(&mut model, network, catalog);
    emit_aggregates(&mut model, network, catalog);
    emit_arrival(&mut model, network, catalog, config);
    build_objective(&mut model, network, catalog, config);
    if config.earliest_flow_tiebreak {
        let tb = tiebreak_terms(&model, network, catalog);
        model.set_tiebreak(tb);
    }
    Ok(model)
}

#[cfg(test)]
mod tests;
