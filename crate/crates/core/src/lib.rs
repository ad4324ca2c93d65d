//! Capacity allocation for railway networks as a three-layer multi-commodity
//! flow over a time-expanded graph.
//!
//! Demands for train traffic (per time period) are split over named routes,
//! and each route's volume is moved through the network on direct, next and
//! node-inventory arcs subject to link capacities, single-track direction
//! changes and train-speed pacing. The crate builds that model as a linear
//! mixed-integer program, solves it with a bundled simplex and
//! branch-and-bound, and wraps the whole pipeline as a scenario engine for
//! temporary capacity restrictions.

macro_rules! id_type {
    ($(#[$m:meta])* $name:ident) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(usize);

        impl $name {
            pub fn new(index: usize) -> Self {
                Self(index)
            }

            /// Zero-based position in the enumeration.
            pub fn index(self) -> usize {
                self.0
            }
        }

        impl std::fmt::Display for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                write!(f, "{}", self.0 + 1)
            }
        }
    };
}

pub mod catalog;
pub mod formulation;
pub mod network;
pub mod report;
pub mod scenario;
pub mod solver;
pub mod validation;

pub use catalog::{
    aggregate_durations, validate_route, AggregateDuration, CatalogBuilder, CatalogError, Demand,
    DemandId, Route, RouteId, ServiceCatalog,
};
pub use formulation::{
    build_model, CapacityMode, Family, LinearConstraint, ModelConfig, ModelError, Relation,
    TimeExpandedModel, Var, VarIndex,
};
pub use network::{
    validate_network, Horizon, LinkId, Network, NetworkBuilder, NetworkError, NodeId, TrainTypeId,
};
pub use report::{CapacityUsageReport, DemandOutcomeReport};
pub use scenario::{
    apply_tcr, load_scenario, load_scenario_file, run, RunOptions, RunOutcome, Scenario,
    ScenarioDocument, ScenarioError, TcrOverride,
};
pub use solver::{
    export_model_text, solve_lp, solve_mip, SolveResult, SolveStatus, StandardFormLP, Tolerances,
};
pub use validation::{ValidationReport, Violation, ViolationCode};
