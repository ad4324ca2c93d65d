use std::fmt;

use crate::catalog::{DemandId, RouteId, ServiceCatalog};
use crate::network::{LinkId, Network, NodeId, TrainTypeId};

use super::{CapacityMode, ModelConfig, ModelError, TimeExpandedModel};

/// Variable family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    Dep,
    Arr,
    Ext,
    Direct,
    Next,
    Ni,
    In,
    Aggr,
    Post,
    CancelT,
    CancelTotal,
    LinkCap,
    SetupW,
    DirFlagBeta,
}

impl VarKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VarKind::Dep => "dep",
            VarKind::Arr => "arr",
            VarKind::Ext => "ext",
            VarKind::Direct => "direct",
            VarKind::Next => "next",
            VarKind::Ni => "ni",
            VarKind::In => "in",
            VarKind::Aggr => "aggr",
            VarKind::Post => "post",
            VarKind::CancelT => "cancel_t",
            VarKind::CancelTotal => "cancel_total",
            VarKind::LinkCap => "linkcap",
            VarKind::SetupW => "setup_w",
            VarKind::DirFlagBeta => "dirflag_beta",
        }
    }
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A decision variable identified by family and indices. Periods are 1-based;
/// families indexed over the extended horizon also accept period 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    /// Volume departing on route `r` in period `t`.
    Dep {
        r: RouteId,
        t: usize,
    },
    /// Volume arriving at the end of route `r` in period `t`.
    Arr {
        r: RouteId,
        t: usize,
    },
    /// Source (+) or sink (-) of route `r` at node `n`.
    Ext {
        n: NodeId,
        t: usize,
        r: RouteId,
    },
    /// Traversal of `l` starting and ending within period `t`.
    Direct {
        l: LinkId,
        t: usize,
        r: RouteId,
    },
    /// Traversal of `l` starting in `t` and ending in `t + 1`.
    Next {
        l: LinkId,
        t: usize,
        r: RouteId,
    },
    /// Volume waiting at `n` from `t` to `t + 1`.
    Ni {
        n: NodeId,
        t: usize,
        r: RouteId,
    },
    /// Volume reaching `n` in `t`.
    In {
        n: NodeId,
        t: usize,
        r: RouteId,
    },
    /// Upper bound on the cumulative volume that can have reached `n` by `t`.
    Aggr {
        n: NodeId,
        t: usize,
        r: RouteId,
    },
    Post {
        d: DemandId,
        t: usize,
    },
    CancelT {
        d: DemandId,
        t: usize,
    },
    CancelTotal {
        d: DemandId,
    },
    LinkCap {
        l: LinkId,
        t: usize,
        h: TrainTypeId,
    },
    SetupW {
        l: LinkId,
        t: usize,
    },
    DirFlagBeta {
        l: LinkId,
        t: usize,
    },
}

impl Var {
    pub fn kind(&self) -> VarKind {
        match self {
            Var::Dep { .. } => VarKind::Dep,
            Var::Arr { .. } => VarKind::Arr,
            Var::Ext { .. } => VarKind::Ext,
            Var::Direct { .. } => VarKind::Direct,
            Var::Next { .. } => VarKind::Next,
            Var::Ni { .. } => VarKind::Ni,
            Var::In { .. } => VarKind::In,
            Var::Aggr { .. } => VarKind::Aggr,
            Var::Post { .. } => VarKind::Post,
            Var::CancelT { .. } => VarKind::CancelT,
            Var::CancelTotal { .. } => VarKind::CancelTotal,
            Var::LinkCap { .. } => VarKind::LinkCap,
            Var::SetupW { .. } => VarKind::SetupW,
            Var::DirFlagBeta { .. } => VarKind::DirFlagBeta,
        }
    }

    /// Stable display name, e.g. `direct[l=A-C,t=1,r=A-H-f1]`.
    pub fn name(&self, network: &Network, catalog: &ServiceCatalog) -> String {
        let route = |r: &RouteId| catalog.routes()[r.index()].name.as_str();
        let demand = |d: &DemandId| catalog.demands()[d.index()].name.as_str();
        let kind = self.kind();
        match self {
            Var::Dep { r, t } | Var::Arr { r, t } => format!("{kind}[r={},t={t}]", route(r)),
            Var::Ext { n, t, r }
            | Var::Ni { n, t, r }
            | Var::In { n, t, r }
            | Var::Aggr { n, t, r } => {
                format!("{kind}[n={},t={t},r={}]", network.node_name(*n), route(r))
            }
            Var::Direct { l, t, r } | Var::Next { l, t, r } => {
                format!("{kind}[l={},t={t},r={}]", network.link_name(*l), route(r))
            }
            Var::Post { d, t } | Var::CancelT { d, t } => format!("{kind}[d={},t={t}]", demand(d)),
            Var::CancelTotal { d } => format!("{kind}[d={}]", demand(d)),
            Var::LinkCap { l, t, h } => format!(
                "{kind}[l={},t={t},h={}]",
                network.link_name(*l),
                network.train_type_label(*h)
            ),
            Var::SetupW { l, t } | Var::DirFlagBeta { l, t } => {
                format!("{kind}[l={},t={t}]", network.link_name(*l))
            }
        }
    }
}

/// Declares every variable family over its full index domain. Continuous
/// variables are non-negative except the free source/sink `ext`; the
/// direction flag is binary and cancel totals are integer unless relaxed.
pub fn build_variables(
    network: &Network,
    catalog: &ServiceCatalog,
    config: &ModelConfig,
) -> Result<TimeExpandedModel, ModelError> {
    for route in catalog.routes() {
        for &l in &route.links {
            if let Some(d) = network.duration(l, route.train_type) {
                if d > 1.0 {
                    return Err(ModelError::DurationExceedsPeriod {
                        route: route.name.clone(),
                        link: network.link_name(l).to_owned(),
                        duration: d,
                    });
                }
            }
        }
    }

    let horizon = network.horizon();
    let routes: Vec<RouteId> = catalog.routes().iter().map(|r| r.id).collect();
    let demands: Vec<DemandId> = catalog.demands().iter().map(|d| d.id).collect();
    let nodes: Vec<NodeId> = network.nodes().iter().map(|n| n.id).collect();
    let links: Vec<LinkId> = network.links().iter().map(|l| l.id).collect();
    let types: Vec<TrainTypeId> = network.train_types().iter().map(|h| h.id).collect();
    let inf = f64::INFINITY;

    let mut model = TimeExpandedModel::empty();
    let add = |model: &mut TimeExpandedModel, v: Var, lo: f64, hi: f64, int: bool| {
        let name = v.name(network, catalog);
        model.declare(v, name, lo, hi, int);
    };

    for &r in &routes {
        for t in horizon.periods() {
            add(&mut model, Var::Dep { r, t }, 0.0, inf, false);
        }
    }
    for &r in &routes {
        for t in horizon.periods() {
            add(&mut model, Var::Arr { r, t }, 0.0, inf, false);
        }
    }
    for &n in &nodes {
        for t in horizon.periods() {
            for &r in &routes {
                add(&mut model, Var::Ext { n, t, r }, -inf, inf, false);
            }
        }
    }
    for &l in &links {
        for t in horizon.periods() {
            for &r in &routes {
                add(&mut model, Var::Direct { l, t, r }, 0.0, inf, false);
            }
        }
    }
    for &l in &links {
        for t in horizon.extended_periods() {
            for &r in &routes {
                add(&mut model, Var::Next { l, t, r }, 0.0, inf, false);
            }
        }
    }
    type NodeVar = fn(NodeId, usize, RouteId) -> Var;
    let node_families: [NodeVar; 3] = [
        |n, t, r| Var::Ni { n, t, r },
        |n, t, r| Var::In { n, t, r },
        |n, t, r| Var::Aggr { n, t, r },
    ];
    for make in node_families {
        for &n in &nodes {
            for t in horizon.extended_periods() {
                for &r in &routes {
                    add(&mut model, make(n, t, r), 0.0, inf, false);
                }
            }
        }
    }
    for &d in &demands {
        for t in horizon.extended_periods() {
            add(&mut model, Var::Post { d, t }, 0.0, inf, false);
        }
    }
    for &d in &demands {
        for t in horizon.periods() {
            add(&mut model, Var::CancelT { d, t }, 0.0, inf, false);
        }
    }
    for &d in &demands {
        add(
            &mut model,
            Var::CancelTotal { d },
            0.0,
            inf,
            !config.relax_integrality,
        );
    }
    for &l in &links {
        for t in horizon.periods() {
            for &h in &types {
                add(&mut model, Var::LinkCap { l, t, h }, 0.0, inf, false);
            }
        }
    }
    if config.capacity_mode == CapacityMode::SingleTrackAlt2 {
        let pairs = network.coupled_pairs();
        for &(l, _) in &pairs {
            for t in horizon.periods() {
                add(&mut model, Var::SetupW { l, t }, 0.0, inf, false);
            }
        }
        for &(l, _) in &pairs {
            for t in horizon.periods() {
                add(&mut model, Var::DirFlagBeta { l, t }, 0.0, 1.0, true);
            }
        }
    }
    Ok(model)
}
