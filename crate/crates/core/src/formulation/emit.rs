//! Constraint emitters, one per layer of the model, plus the objective.

use crate::catalog::{RouteId, ServiceCatalog};
use crate::network::{LinkId, Network, TrainTypeId};

use super::{CapacityMode, Family, ModelConfig, Relation, TimeExpandedModel, Var, VarIndex};

fn col(model: &TimeExpandedModel, v: Var) -> VarIndex {
    model
        .var(v)
        .unwrap_or_else(|| panic!("variable {v:?} was not declared"))
}

fn fix_zero(model: &mut TimeExpandedModel, name: String, family: Family, v: Var) {
    let c = col(model, v);
    model.push_constraint(name, family, vec![(c, 1.0)], Relation::Eq, 0.0);
}

/// Share of a volume departing uniformly within one period that reaches a
/// point `duration` periods down the route, per period of lag. Returns
/// `(lag, share)` pairs; shares are non-negative and sum to one.
pub(crate) fn arrival_shares(duration: f64) -> [(usize, f64); 2] {
    let whole = duration.floor();
    let frac = duration - whole;
    let lag = whole as usize;
    [(lag, 1.0 - frac), (lag + 1, frac)]
}

fn linkcap_sum(
    model: &TimeExpandedModel,
    network: &Network,
    l: LinkId,
    t: usize,
) -> Vec<(VarIndex, f64)> {
    network
        .train_types()
        .iter()
        .map(|h| (col(model, Var::LinkCap { l, t, h: h.id }), 1.0))
        .collect()
}

/// Capacity rows: the per-link nominal bound, the per-type consumption of
/// direct arcs plus half of the adjacent next arcs, and the one family that
/// the capacity mode selects.
pub fn emit_capacity(
    model: &mut TimeExpandedModel,
    network: &Network,
    catalog: &ServiceCatalog,
    config: &ModelConfig,
) {
    let horizon = network.horizon();
    for link in network.links() {
        let l = link.id;
        for t in horizon.periods() {
            let terms = linkcap_sum(model, network, l, t);
            model.push_constraint(
                format!("Capacity1[l={},t={t}]", link.name),
                Family::Capacity1,
                terms,
                Relation::Le,
                network.nominal_capacity(l, t),
            );
        }
    }

    for link in network.links() {
        let l = link.id;
        for t in horizon.periods() {
            for h in network.train_types() {
                let mut terms = Vec::new();
                for route in catalog.routes() {
                    if route.train_type != h.id || !route.links.contains(&l) {
                        continue;
                    }
                    let r = route.id;
                    terms.push((col(model, Var::Direct { l, t, r }), 1.0));
                    terms.push((col(model, Var::Next { l, t: t - 1, r }), 0.5));
                    terms.push((col(model, Var::Next { l, t, r }), 0.5));
                }
                terms.push((col(model, Var::LinkCap { l, t, h: h.id }), -1.0));
                model.push_constraint(
                    format!("Capacity4[l={},t={t},h={}]", link.name, h.label),
                    Family::Capacity4,
                    terms,
                    Relation::Le,
                    0.0,
                );
            }
        }
    }

    match config.capacity_mode {
        CapacityMode::Basic => {}
        CapacityMode::SingleTrackAlt1 => {
            let pairs = network.coupled_pairs();
            if pairs.is_empty() {
                model.warn(
                    "capacity mode single_track_alt1 requested but no links are coupled".into(),
                );
            }
            for (l, s) in pairs {
                for t in horizon.periods() {
                    let mut terms = linkcap_sum(model, network, l, t);
                    terms.extend(linkcap_sum(model, network, s, t));
                    let rhs =
                        0.5 * (network.nominal_capacity(l, t) + network.nominal_capacity(s, t));
                    model.push_constraint(
                        format!("Capacity2_alt1[l={},t={t}]", network.link_name(l)),
                        Family::Capacity2Alt1,
                        terms,
                        Relation::Le,
                        rhs,
                    );
                }
            }
        }
        CapacityMode::SingleTrackAlt2 => {
            let pairs = network.coupled_pairs();
            if pairs.is_empty() {
                model.warn(
                    "capacity mode single_track_alt2 requested but no links are coupled".into(),
                );
            }
            let big_m = config.effective_big_m(network);
            for (l, s) in pairs {
                for t in horizon.periods() {
                    let w = col(model, Var::SetupW { l, t });
                    let beta = col(model, Var::DirFlagBeta { l, t });
                    let fwd = linkcap_sum(model, network, l, t);
                    let rev = linkcap_sum(model, network, s, t);

                    for side in [l, s] {
                        let mut terms = fwd.clone();
                        terms.extend(rev.iter().copied());
                        terms.push((w, 1.0));
                        model.push_constraint(
                            format!("Capacity2_alt2[l={},t={t}]", network.link_name(side)),
                            Family::Capacity2Alt2,
                            terms,
                            Relation::Le,
                            network.nominal_capacity(side, t),
                        );
                    }

                    // sum L_l <= K_l w + M (1 - beta)
                    let mut terms = fwd;
                    terms.push((w, -config.k_setup_at(l, t)));
                    terms.push((beta, big_m));
                    model.push_constraint(
                        format!("Setup_alt2[l={},t={t}]", network.link_name(l)),
                        Family::SetupAlt2,
                        terms,
                        Relation::Le,
                        big_m,
                    );
                    // sum L_sigma(l) <= K_sigma(l) w + M beta
                    let mut terms = rev;
                    terms.push((w, -config.k_setup_at(s, t)));
                    terms.push((beta, -big_m));
                    model.push_constraint(
                        format!("Setup_alt2[l={},t={t}]", network.link_name(s)),
                        Family::SetupAlt2,
                        terms,
                        Relation::Le,
                        0.0,
                    );
                }
            }
        }
        CapacityMode::Heterogeneous => {
            for link in network.links() {
                let l = link.id;
                let present: Vec<TrainTypeId> = network
                    .train_types()
                    .iter()
                    .map(|h| h.id)
                    .filter(|&h| {
                        catalog
                            .routes()
                            .iter()
                            .any(|r| r.train_type == h && r.links.contains(&l))
                    })
                    .collect();
                if present.is_empty() {
                    continue;
                }
                let coef = 1.0 + config.k_het * (present.len() as f64 - 1.0);
                for t in horizon.periods() {
                    let terms = present
                        .iter()
                        .map(|&h| (col(model, Var::LinkCap { l, t, h }), coef))
                        .collect();
                    model.push_constraint(
                        format!("Capacity3[l={},t={t}]", link.name),
                        Family::Capacity3,
                        terms,
                        Relation::Le,
                        network.nominal_capacity(l, t),
                    );
                }
            }
        }
    }
}

/// Demand layer: postponement boundary values, per-period balance of
/// departures, postponements and cancellations, and the cancellation totals.
pub fn emit_demand_layer(
    model: &mut TimeExpandedModel,
    network: &Network,
    catalog: &ServiceCatalog,
    config: &ModelConfig,
) {
    let t_max = network.horizon().t_max();
    for d in catalog.demands() {
        fix_zero(
            model,
            format!("Demand1[d={}]", d.name),
            Family::Demand1,
            Var::Post { d: d.id, t: 0 },
        );
    }
    for d in catalog.demands() {
        fix_zero(
            model,
            format!("Demand2[d={}]", d.name),
            Family::Demand2,
            Var::Post { d: d.id, t: t_max },
        );
    }
    for d in catalog.demands() {
        let routes = catalog.implementing_routes(d.id).unwrap_or_default();
        for t in 1..=t_max {
            let mut terms: Vec<_> = routes
                .iter()
                .map(|&r| (col(model, Var::Dep { r, t }), 1.0))
                .collect();
            terms.push((col(model, Var::Post { d: d.id, t }), 1.0));
            terms.push((col(model, Var::Post { d: d.id, t: t - 1 }), -1.0));
            terms.push((col(model, Var::CancelT { d: d.id, t }), 1.0));
            model.push_constraint(
                format!("Departure3[d={},t={t}]", d.name),
                Family::Departure3,
                terms,
                Relation::Eq,
                f64::from(d.volume(t)),
            );
        }
    }
    for d in catalog.demands() {
        let mut terms: Vec<_> = (1..=t_max)
            .map(|t| (col(model, Var::CancelT { d: d.id, t }), 1.0))
            .collect();
        terms.push((col(model, Var::CancelTotal { d: d.id }), -1.0));
        model.push_constraint(
            format!("Cancel1[d={}]", d.name),
            Family::Cancel1,
            terms,
            Relation::Eq,
            0.0,
        );
    }
    let balance = |model: &mut TimeExpandedModel, family: Family, arrivals: bool| {
        for d in catalog.demands() {
            let routes = catalog.implementing_routes(d.id).unwrap_or_default();
            let mut terms = Vec::new();
            for &r in routes {
                for t in 1..=t_max {
                    let v = if arrivals {
                        Var::Arr { r, t }
                    } else {
                        Var::Dep { r, t }
                    };
                    terms.push((col(model, v), 1.0));
                }
            }
            terms.push((col(model, Var::CancelTotal { d: d.id }), 1.0));
            model.push_constraint(
                format!("{}[d={}]", family.as_str(), d.name),
                family,
                terms,
                Relation::Eq,
                d.total() as f64,
            );
        }
    };
    balance(model, Family::Cancel2, false);
    if config.emit_cancel3 {
        balance(model, Family::Cancel3, true);
    }
    // A route no demand can use must stay empty.
    for route in catalog.routes() {
        if !catalog.served_demands(route.id).is_empty() {
            continue;
        }
        for t in 1..=t_max {
            fix_zero(
                model,
                format!("Unserved[r={},t={t}]", route.name),
                Family::Unserved,
                Var::Dep { r: route.id, t },
            );
        }
    }
}

/// Flow layer: sources and sinks, node balance, arrivals into each node, and
/// the fixings of arcs a route cannot use.
pub fn emit_flow_layer(model: &mut TimeExpandedModel, network: &Network, catalog: &ServiceCatalog) {
    let horizon = network.horizon();
    let t_max = horizon.t_max();

    for route in catalog.routes() {
        let r = route.id;
        for t in horizon.periods() {
            for node in network.nodes() {
                let n = node.id;
                let ext = col(model, Var::Ext { n, t, r });
                let tag = format!("[n={},t={t},r={}]", node.name, route.name);
                if n == route.origin {
                    let dep = col(model, Var::Dep { r, t });
                    model.push_constraint(
                        format!("Flow1{tag}"),
                        Family::Flow1,
                        vec![(ext, 1.0), (dep, -1.0)],
                        Relation::Eq,
                        0.0,
                    );
                } else if n == route.destination {
                    let arr = col(model, Var::Arr { r, t });
                    model.push_constraint(
                        format!("Flow1{tag}"),
                        Family::Flow1,
                        vec![(ext, 1.0), (arr, 1.0)],
                        Relation::Eq,
                        0.0,
                    );
                } else {
                    model.push_constraint(
                        format!("Bound3{tag}"),
                        Family::Bound3,
                        vec![(ext, 1.0)],
                        Relation::Eq,
                        0.0,
                    );
                }
            }
        }
    }

    for route in catalog.routes() {
        let r = route.id;
        for &n in catalog.route_nodes(r) {
            for t in horizon.periods() {
                let mut terms = vec![
                    (col(model, Var::Ext { n, t, r }), 1.0),
                    (col(model, Var::Ni { n, t: t - 1, r }), 1.0),
                    (col(model, Var::Ni { n, t, r }), -1.0),
                ];
                for &l in network.incoming(n) {
                    terms.push((col(model, Var::Direct { l, t, r }), 1.0));
                    terms.push((col(model, Var::Next { l, t: t - 1, r }), 1.0));
                }
                for &l in network.outgoing(n) {
                    terms.push((col(model, Var::Direct { l, t, r }), -1.0));
                    terms.push((col(model, Var::Next { l, t, r }), -1.0));
                }
                model.push_constraint(
                    format!("Flow2[n={},t={t},r={}]", network.node_name(n), route.name),
                    Family::Flow2,
                    terms,
                    Relation::Eq,
                    0.0,
                );
            }
        }
    }

    for route in catalog.routes() {
        let r = route.id;
        for node in network.nodes() {
            let n = node.id;
            for t in horizon.periods() {
                let mut terms = vec![(col(model, Var::In { n, t, r }), 1.0)];
                if n == route.origin {
                    terms.push((col(model, Var::Dep { r, t }), -1.0));
                }
                for &l in network.incoming(n) {
                    if route.links.contains(&l) {
                        terms.push((col(model, Var::Next { l, t: t - 1, r }), -1.0));
                        terms.push((col(model, Var::Direct { l, t, r }), -1.0));
                    }
                }
                model.push_constraint(
                    format!("Flow3[n={},t={t},r={}]", node.name, route.name),
                    Family::Flow3,
                    terms,
                    Relation::Eq,
                    0.0,
                );
            }
        }
    }

    for route in catalog.routes() {
        let r = route.id;
        for link in network.links() {
            let l = link.id;
            if route.links.contains(&l) {
                continue;
            }
            for t in horizon.periods() {
                let tag = format!("l={},t={t},r={}]", link.name, route.name);
                fix_zero(
                    model,
                    format!("Bound1[var=direct,{tag}"),
                    Family::Bound1,
                    Var::Direct { l, t, r },
                );
                fix_zero(
                    model,
                    format!("Bound1[var=next,{tag}"),
                    Family::Bound1,
                    Var::Next { l, t, r },
                );
            }
        }
    }

    for route in catalog.routes() {
        let r = route.id;
        for node in network.nodes() {
            let n = node.id;
            if catalog.route_uses_node(r, n) {
                continue;
            }
            for t in horizon.periods() {
                fix_zero(
                    model,
                    format!("Bound2[n={},t={t},r={}]", node.name, route.name),
                    Family::Bound2,
                    Var::Ni { n, t, r },
                );
            }
        }
    }

    for link in network.links() {
        let l = link.id;
        for route in catalog.routes() {
            let r = route.id;
            for t in [0, t_max] {
                fix_zero(
                    model,
                    format!("Bound4[l={},t={t},r={}]", link.name, route.name),
                    Family::Bound4,
                    Var::Next { l, t, r },
                );
            }
        }
    }

    // Nothing waits before the first period, and nothing may remain in the
    // network after the last one.
    for (family, t) in [(Family::Bound5, 0), (Family::Bound6, t_max)] {
        for node in network.nodes() {
            let n = node.id;
            for route in catalog.routes() {
                fix_zero(
                    model,
                    format!("{}[n={},r={}]", family.as_str(), node.name, route.name),
                    family,
                    Var::Ni { n, t, r: route.id },
                );
            }
        }
    }
}

/// Maximum aggregated sums: how much of a route's departed volume can have
/// reached each node by each period at full speed, and the pacing rows that
/// keep cumulative arrivals below it.
pub fn emit_aggregates(model: &mut TimeExpandedModel, network: &Network, catalog: &ServiceCatalog) {
    let horizon = network.horizon();
    for node in network.nodes() {
        for route in catalog.routes() {
            fix_zero(
                model,
                format!("Aggregate1[n={},r={}]", node.name, route.name),
                Family::Aggregate1,
                Var::Aggr {
                    n: node.id,
                    t: 0,
                    r: route.id,
                },
            );
        }
    }

    for route in catalog.routes() {
        let r = route.id;
        for node in network.nodes() {
            let n = node.id;
            if catalog.route_uses_node(r, n) {
                continue;
            }
            for t in horizon.periods() {
                fix_zero(
                    model,
                    format!("Aggregate2_1[n={},t={t},r={}]", node.name, route.name),
                    Family::Aggregate2_1,
                    Var::Aggr { n, t, r },
                );
            }
        }
    }

    for route in catalog.routes() {
        let r = route.id;
        for &(n, duration) in catalog.aggregate(r).entries() {
            let shares = arrival_shares(duration);
            for t in horizon.periods() {
                let mut terms = vec![
                    (col(model, Var::Aggr { n, t, r }), 1.0),
                    (col(model, Var::Aggr { n, t: t - 1, r }), -1.0),
                ];
                for (lag, share) in shares {
                    if lag < t && share > 0.0 {
                        terms.push((col(model, Var::Dep { r, t: t - lag }), -share));
                    }
                }
                model.push_constraint(
                    format!(
                        "Aggregate2_2[n={},t={t},r={}]",
                        network.node_name(n),
                        route.name
                    ),
                    Family::Aggregate2_2,
                    terms,
                    Relation::Eq,
                    0.0,
                );
            }
        }
    }

    for route in catalog.routes() {
        let r = route.id;
        for &n in catalog.route_nodes(r) {
            for t in horizon.periods() {
                let mut terms: Vec<_> = (1..=t)
                    .map(|tp| (col(model, Var::In { n, t: tp, r }), 1.0))
                    .collect();
                terms.push((col(model, Var::Aggr { n, t, r }), -1.0));
                let (family, name) = if t == 1 {
                    (
                        Family::Aggregate3,
                        format!("Aggregate3[n={},r={}]", network.node_name(n), route.name),
                    )
                } else {
                    (
                        Family::Aggregate4,
                        format!(
                            "Aggregate4[n={},t={t},r={}]",
                            network.node_name(n),
                            route.name
                        ),
                    )
                };
                model.push_constraint(name, family, terms, Relation::Le, 0.0);
            }
        }
    }
}

/// Arrivals at a route's destination must keep up with the volume reaching it,
/// up to the route's slack.
pub fn emit_arrival(
    model: &mut TimeExpandedModel,
    network: &Network,
    catalog: &ServiceCatalog,
    config: &ModelConfig,
) {
    for route in catalog.routes() {
        let r = route.id;
        if catalog.served_demands(r).is_empty() {
            continue;
        }
        let n = route.destination;
        let slack = config.slack_of(r);
        for t in network.horizon().periods() {
            let terms = vec![
                (col(model, Var::Arr { r, t }), 1.0),
                (col(model, Var::In { n, t, r }), -1.0),
            ];
            model.push_constraint(
                format!("Arrival1[r={},t={t}]", route.name),
                Family::Arrival1,
                terms,
                Relation::Ge,
                0.0 - slack,
            );
        }
    }
}

/// Cancellation and postponement penalties plus the volume-averaged travel
/// time of all implemented routes.
pub fn build_objective(
    model: &mut TimeExpandedModel,
    network: &Network,
    catalog: &ServiceCatalog,
    config: &ModelConfig,
) {
    let horizon = network.horizon();
    let mut terms = Vec::new();
    for d in catalog.demands() {
        terms.push((col(model, Var::CancelTotal { d: d.id }), config.cost_cancel));
        for t in horizon.extended_periods() {
            terms.push((col(model, Var::Post { d: d.id, t }), config.cost_post));
        }
    }
    let total: u64 = catalog.demands().iter().map(|d| d.total()).sum();
    if total > 0 {
        let scale = 1.0 / total as f64;
        for d in catalog.demands() {
            for &r in catalog.implementing_routes(d.id).unwrap_or_default() {
                for t in horizon.periods() {
                    let w = t as f64 * scale;
                    terms.push((col(model, Var::Arr { r, t }), w));
                    terms.push((col(model, Var::Dep { r, t }), -w));
                }
            }
        }
    }
    model.set_objective(terms);
}

/// Secondary objective: reach every node as early as possible, avoid waiting
/// and keep direction-change time at its minimum. Only used to choose among
/// solutions with the same objective.
pub fn tiebreak_terms(
    model: &TimeExpandedModel,
    network: &Network,
    catalog: &ServiceCatalog,
) -> Vec<(VarIndex, f64)> {
    let horizon = network.horizon();
    let mut terms = Vec::new();
    for route in catalog.routes() {
        let r: RouteId = route.id;
        for &n in catalog.route_nodes(r) {
            for t in horizon.periods() {
                if n != route.origin {
                    terms.push((col(model, Var::In { n, t, r }), t as f64));
                }
                terms.push((col(model, Var::Ni { n, t, r }), 1.0));
            }
        }
    }
    for (l, _) in network.coupled_pairs() {
        for t in horizon.periods() {
            if let Some(w) = model.var(Var::SetupW { l, t }) {
                terms.push((w, 1.0));
            }
        }
    }
    terms
}
