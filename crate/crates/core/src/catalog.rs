//! Demands for traffic, the named routes (commodities) that can realize them,
//! and the duration profile of each route.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use crate::network::{LinkId, Network, NetworkError, NodeId, TrainTypeId};
use crate::validation::{ValidationReport, ViolationCode};

id_type!(
    /// Demand identifier.
    DemandId
);
id_type!(
    /// Route identifier.
    RouteId
);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("unknown demand id {0}")]
    UnknownDemand(DemandId),
    #[error("unknown route id {0}")]
    UnknownRoute(RouteId),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("duplicate {what} name {name:?}")]
    DuplicateName { what: &'static str, name: String },
    #[error("demand {demand}: origin equals destination")]
    DemandLoop { demand: String },
    #[error("demand {demand}: {given} volumes given for a horizon of {t_max} periods")]
    VolumeLength {
        demand: String,
        given: usize,
        t_max: usize,
    },
    #[error("route {route} is invalid: {report}")]
    InvalidRoute {
        route: String,
        report: ValidationReport,
    },
    #[error("route {route} has no duration on link {link} for train type {train_type}")]
    MissingDuration {
        route: String,
        link: String,
        train_type: String,
    },
    #[error("demand {demand} and route {route} differ in origin, destination or train type")]
    PropertyMismatch { demand: String, route: String },
    #[error("route {route} matches demand {demand} but the implementation relation omits it")]
    MissingImplementation { demand: String, route: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Demand {
    pub id: DemandId,
    pub name: String,
    pub origin: NodeId,
    pub destination: NodeId,
    pub train_type: TrainTypeId,
    /// Requested volume per period, index `t - 1`.
    pub volumes: Vec<u32>,
    /// Intermediate stations requested by the operator. Not constrained.
    pub via: Vec<NodeId>,
}

impl Demand {
    /// Requested volume in period `t` (1-based).
    pub fn volume(&self, t: usize) -> u32 {
        self.volumes[t - 1]
    }

    pub fn total(&self) -> u64 {
        self.volumes.iter().map(|&v| u64::from(v)).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub id: RouteId,
    pub name: String,
    pub origin: NodeId,
    pub destination: NodeId,
    pub train_type: TrainTypeId,
    /// Links in travel order.
    pub links: Vec<LinkId>,
    /// Opaque service-class attributes (axle load, gauge, ...).
    pub metadata: BTreeMap<String, String>,
}

impl Route {
    /// Nodes in travel order: every link tail followed by the last head.
    pub fn node_sequence(&self, network: &Network) -> Vec<NodeId> {
        let mut nodes: Vec<NodeId> = self
            .links
            .iter()
            .filter_map(|&l| network.link(l).ok().map(|l| l.tail))
            .collect();
        if let Some(last) = self.links.last().and_then(|&l| network.link(l).ok()) {
            nodes.push(last.head);
        }
        nodes
    }
}

/// Cumulative minimum travel time from the route origin to each node of the
/// route, in periods.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateDuration {
    entries: Vec<(NodeId, f64)>,
}

impl AggregateDuration {
    pub fn get(&self, node: NodeId) -> Option<f64> {
        self.entries
            .iter()
            .find(|(n, _)| *n == node)
            .map(|&(_, d)| d)
    }

    /// `(node, duration)` in travel order.
    pub fn entries(&self) -> &[(NodeId, f64)] {
        &self.entries
    }
}

/// Computes the duration profile of `route`: zero at the origin and, at the
/// head of the k-th link, the sum of the first k link durations.
pub fn aggregate_durations(
    route: &Route,
    network: &Network,
) -> Result<AggregateDuration, CatalogError> {
    let mut entries = Vec::with_capacity(route.links.len() + 1);
    entries.push((route.origin, 0.0));
    let mut acc = 0.0;
    for &l in &route.links {
        let link = network.link(l)?;
        let d =
            network
                .duration(l, route.train_type)
                .ok_or_else(|| CatalogError::MissingDuration {
                    route: route.name.clone(),
                    link: link.name.clone(),
                    train_type: network.train_type_label(route.train_type).to_owned(),
                })?;
        acc += d;
        entries.push((link.head, acc));
    }
    Ok(AggregateDuration { entries })
}

/// Reports everything that keeps `route` from being a simple, contiguous,
/// traversable path between its declared endpoints.
pub fn validate_route(route: &Route, network: &Network) -> ValidationReport {
    let mut report = ValidationReport::new();
    let name = route.name.as_str();
    if route.links.is_empty() {
        report.push(ViolationCode::EmptyRoute, name, "route has no links");
        return report;
    }

    let mut links = Vec::with_capacity(route.links.len());
    for &l in &route.links {
        match network.link(l) {
            Ok(link) => links.push(link),
            Err(_) => {
                report.push(
                    ViolationCode::NotContiguous,
                    name,
                    format!("unknown link id {l}"),
                );
                return report;
            }
        }
    }

    for pair in links.windows(2) {
        if pair[0].head != pair[1].tail {
            report.push(
                ViolationCode::NotContiguous,
                name,
                format!("{} does not continue {}", pair[1].name, pair[0].name),
            );
        }
    }

    let mut seen_links = HashSet::new();
    for link in &links {
        if !seen_links.insert(link.id) {
            report.push(
                ViolationCode::Cycle,
                name,
                format!("link {} used twice", link.name),
            );
        }
    }
    let mut seen_nodes = HashSet::new();
    for n in route.node_sequence(network) {
        if !seen_nodes.insert(n) {
            report.push(
                ViolationCode::Cycle,
                name,
                format!("node {} visited twice", network.node_name(n)),
            );
        }
    }

    let first = links[0];
    let last = links[links.len() - 1];
    if first.tail != route.origin {
        report.push(
            ViolationCode::EndpointMismatch,
            name,
            format!("first link starts at {}", network.node_name(first.tail)),
        );
    }
    if last.head != route.destination {
        report.push(
            ViolationCode::EndpointMismatch,
            name,
            format!("last link ends at {}", network.node_name(last.head)),
        );
    }

    let label = network
        .train_type(route.train_type)
        .map(|h| h.label.clone())
        .unwrap_or_else(|_| route.train_type.to_string());
    for link in &links {
        match network.duration(link.id, route.train_type) {
            None => report.push(
                ViolationCode::MissingDuration,
                name,
                format!("no duration on {} for train type {label}", link.name),
            ),
            Some(d) if d > 1.0 => report.push(
                ViolationCode::DurationExceedsPeriod,
                name,
                format!("{} takes {d} periods for train type {label}", link.name),
            ),
            Some(_) => {}
        }
    }
    report
}

/// Validated set of demands and routes together with the demand→route
/// implementation relation.
#[derive(Debug, Clone, PartialEq)]
pub struct ServiceCatalog {
    demands: Vec<Demand>,
    routes: Vec<Route>,
    implements: Vec<Vec<RouteId>>,
    route_demands: Vec<Vec<DemandId>>,
    route_nodes: Vec<Vec<NodeId>>,
    aggregates: Vec<AggregateDuration>,
}

impl ServiceCatalog {
    pub fn demands(&self) -> &[Demand] {
        &self.demands
    }

    pub fn routes(&self) -> &[Route] {
        &self.routes
    }

    pub fn demand(&self, d: DemandId) -> Result<&Demand, CatalogError> {
        self.demands.get(d.0).ok_or(CatalogError::UnknownDemand(d))
    }

    pub fn route(&self, r: RouteId) -> Result<&Route, CatalogError> {
        self.routes.get(r.0).ok_or(CatalogError::UnknownRoute(r))
    }

    pub fn demand_by_name(&self, name: &str) -> Option<DemandId> {
        self.demands.iter().find(|d| d.name == name).map(|d| d.id)
    }

    pub fn route_by_name(&self, name: &str) -> Option<RouteId> {
        self.routes.iter().find(|r| r.name == name).map(|r| r.id)
    }

    /// Routes implementing `d`. An empty slice means the demand can only be
    /// canceled.
    pub fn implementing_routes(&self, d: DemandId) -> Result<&[RouteId], CatalogError> {
        self.implements
            .get(d.0)
            .map(Vec::as_slice)
            .ok_or(CatalogError::UnknownDemand(d))
    }

    /// Demands a route serves.
    pub fn served_demands(&self, r: RouteId) -> &[DemandId] {
        &self.route_demands[r.0]
    }

    /// Sum of requested volumes over all periods.
    pub fn demand_total(&self, d: DemandId) -> Result<f64, CatalogError> {
        Ok(self.demand(d)?.total() as f64)
    }

    pub fn route_nodes(&self, r: RouteId) -> &[NodeId] {
        &self.route_nodes[r.0]
    }

    pub fn route_uses_node(&self, r: RouteId, n: NodeId) -> bool {
        self.route_nodes[r.0].contains(&n)
    }

    pub fn route_uses_link(&self, r: RouteId, l: LinkId) -> bool {
        self.routes[r.0].links.contains(&l)
    }

    pub fn aggregate(&self, r: RouteId) -> &AggregateDuration {
        &self.aggregates[r.0]
    }
}

/// Collects demands and routes before validation against a network.
#[derive(Debug, Clone, Default)]
pub struct CatalogBuilder {
    demands: Vec<Demand>,
    routes: Vec<Route>,
    implements: Option<Vec<(DemandId, RouteId)>>,
}

impl CatalogBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_demand(
        &mut self,
        name: impl Into<String>,
        origin: NodeId,
        destination: NodeId,
        train_type: TrainTypeId,
        volumes: Vec<u32>,
    ) -> DemandId {
        let id = DemandId(self.demands.len());
        self.demands.push(Demand {
            id,
            name: name.into(),
            origin,
            destination,
            train_type,
            volumes,
            via: Vec::new(),
        });
        id
    }

    pub fn set_via(&mut self, d: DemandId, via: Vec<NodeId>) -> Result<&mut Self, CatalogError> {
        self.demands
            .get_mut(d.0)
            .ok_or(CatalogError::UnknownDemand(d))?
            .via = via;
        Ok(self)
    }

    /// Adds a route whose endpoints are taken from its first and last link.
    pub fn add_route(
        &mut self,
        network: &Network,
        name: impl Into<String>,
        train_type: TrainTypeId,
        links: Vec<LinkId>,
    ) -> Result<RouteId, CatalogError> {
        let first = links.first().copied();
        let last = links.last().copied();
        let (origin, destination) = match (first, last) {
            (Some(f), Some(l)) => (network.link(f)?.tail, network.link(l)?.head),
            _ => (NodeId::new(0), NodeId::new(0)),
        };
        Ok(self.add_route_with_endpoints(name, origin, destination, train_type, links))
    }

    pub fn add_route_with_endpoints(
        &mut self,
        name: impl Into<String>,
        origin: NodeId,
        destination: NodeId,
        train_type: TrainTypeId,
        links: Vec<LinkId>,
    ) -> RouteId {
        let id = RouteId(self.routes.len());
        self.routes.push(Route {
            id,
            name: name.into(),
            origin,
            destination,
            train_type,
            links,
            metadata: BTreeMap::new(),
        });
        id
    }

    pub fn set_route_metadata(
        &mut self,
        r: RouteId,
        metadata: BTreeMap<String, String>,
    ) -> Result<&mut Self, CatalogError> {
        self.routes
            .get_mut(r.0)
            .ok_or(CatalogError::UnknownRoute(r))?
            .metadata = metadata;
        Ok(self)
    }

    /// Declares `r` as an implementation of `d`. Once any pair is declared the
    /// relation is taken as explicit and must equal the property match.
    pub fn implements(&mut self, d: DemandId, r: RouteId) -> &mut Self {
        self.implements.get_or_insert_with(Vec::new).push((d, r));
        self
    }

    /// Marks the relation as explicit even when it has no pairs.
    pub fn explicit_relation(&mut self) -> &mut Self {
        self.implements.get_or_insert_with(Vec::new);
        self
    }

    pub fn build(self, network: &Network) -> Result<ServiceCatalog, CatalogError> {
        let t_max = network.horizon().t_max();
        unique("demand", self.demands.iter().map(|d| d.name.as_str()))?;
        unique("route", self.routes.iter().map(|r| r.name.as_str()))?;

        for d in &self.demands {
            network.node(d.origin)?;
            network.node(d.destination)?;
            network.train_type(d.train_type)?;
            for &v in &d.via {
                network.node(v)?;
            }
            if d.origin == d.destination {
                return Err(CatalogError::DemandLoop {
                    demand: d.name.clone(),
                });
            }
            if d.volumes.len() != t_max {
                return Err(CatalogError::VolumeLength {
                    demand: d.name.clone(),
                    given: d.volumes.len(),
                    t_max,
                });
            }
        }

        let mut route_nodes = Vec::with_capacity(self.routes.len());
        let mut aggregates = Vec::with_capacity(self.routes.len());
        for r in &self.routes {
            network.node(r.origin)?;
            network.node(r.destination)?;
            network.train_type(r.train_type)?;
            for &l in &r.links {
                network.link(l)?;
            }
            let report = validate_route(r, network);
            if !report.is_ok() {
                return Err(CatalogError::InvalidRoute {
                    route: r.name.clone(),
                    report,
                });
            }
            route_nodes.push(r.node_sequence(network));
            aggregates.push(aggregate_durations(r, network)?);
        }

        let matches = |d: &Demand, r: &Route| {
            d.origin == r.origin && d.destination == r.destination && d.train_type == r.train_type
        };
        let mut implements = vec![Vec::new(); self.demands.len()];
        match self.implements {
            Some(pairs) => {
                let mut declared = BTreeSet::new();
                for (d, r) in pairs {
                    let demand = self
                        .demands
                        .get(d.0)
                        .ok_or(CatalogError::UnknownDemand(d))?;
                    let route = self.routes.get(r.0).ok_or(CatalogError::UnknownRoute(r))?;
                    if !matches(demand, route) {
                        return Err(CatalogError::PropertyMismatch {
                            demand: demand.name.clone(),
                            route: route.name.clone(),
                        });
                    }
                    declared.insert((d, r));
                }
                for d in &self.demands {
                    for r in &self.routes {
                        if matches(d, r) && !declared.contains(&(d.id, r.id)) {
                            return Err(CatalogError::MissingImplementation {
                                demand: d.name.clone(),
                                route: r.name.clone(),
                            });
                        }
                    }
                }
                for (d, r) in declared {
                    implements[d.0].push(r);
                }
            }
            None => {
                for d in &self.demands {
                    for r in &self.routes {
                        if matches(d, r) {
                            implements[d.id.0].push(r.id);
                        }
                    }
                }
            }
        }

        let mut route_demands = vec![Vec::new(); self.routes.len()];
        for (d, routes) in implements.iter().enumerate() {
            for r in routes {
                route_demands[r.0].push(DemandId(d));
            }
        }

        Ok(ServiceCatalog {
            demands: self.demands,
            routes: self.routes,
            implements,
            route_demands,
            route_nodes,
            aggregates,
        })
    }
}

fn unique<'a>(
    what: &'static str,
    names: impl Iterator<Item = &'a str>,
) -> Result<(), CatalogError> {
    let mut seen = HashSet::new();
    for name in names {
        if !seen.insert(name) {
            return Err(CatalogError::DuplicateName {
                what,
                name: name.to_owned(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Horizon, NetworkBuilder};

    /// A -> B -> C with durations 0.15 and 0.20 for one train type.
    fn abc() -> (Network, [LinkId; 2], TrainTypeId) {
        let mut b = NetworkBuilder::new(Horizon::new(3).unwrap());
        let h = b.add_train_type("reg");
        let a = b.add_node("A");
        let bb = b.add_node("B");
        let c = b.add_node("C");
        let ab = b.add_link(a, bb).unwrap();
        let bc = b.add_link(bb, c).unwrap();
        b.set_duration(ab, h, 0.15).unwrap();
        b.set_duration(bc, h, 0.20).unwrap();
        (b.build(), [ab, bc], h)
    }

    #[test]
    fn aggregate_profile_along_route() {
        let (net, [ab, bc], h) = abc();
        let mut cb = CatalogBuilder::new();
        let r = cb.add_route(&net, "A-C-1", h, vec![ab, bc]).unwrap();
        let cat = cb.build(&net).unwrap();
        let aggr = cat.aggregate(r);
        let got: Vec<f64> = aggr.entries().iter().map(|e| e.1).collect();
        assert_eq!(got[0], 0.0);
        assert!((got[1] - 0.15).abs() < 1e-12);
        assert!((got[2] - 0.35).abs() < 1e-12);
        assert_eq!(aggr.get(net.node_by_name("B").unwrap()), Some(got[1]));
    }

    #[test]
    fn zero_duration_single_link() {
        let mut b = NetworkBuilder::new(Horizon::new(1).unwrap());
        let h = b.add_train_type("reg");
        let a = b.add_node("A");
        let c = b.add_node("C");
        let ac = b.add_link(a, c).unwrap();
        b.set_duration(ac, h, 0.0).unwrap();
        let net = b.build();
        let mut cb = CatalogBuilder::new();
        let r = cb.add_route(&net, "r", h, vec![ac]).unwrap();
        let cat = cb.build(&net).unwrap();
        assert_eq!(cat.aggregate(r).get(c), Some(0.0));
    }

    #[test]
    fn gap_and_repeat_are_reported() {
        let (net, [ab, bc], h) = abc();
        let route = |links: Vec<LinkId>| Route {
            id: RouteId::new(0),
            name: "r".into(),
            origin: NodeId::new(0),
            destination: NodeId::new(2),
            train_type: h,
            links,
            metadata: BTreeMap::new(),
        };
        assert!(validate_route(&route(vec![ab, bc]), &net).is_ok());
        let gap = validate_route(&route(vec![bc, ab]), &net);
        assert!(gap.has(ViolationCode::NotContiguous));
        assert!(gap.has(ViolationCode::EndpointMismatch));
        let repeated = validate_route(&route(vec![ab, ab]), &net);
        assert!(repeated.has(ViolationCode::Cycle));
        assert_eq!(
            validate_route(&route(vec![]), &net).codes(),
            vec!["empty-route"]
        );
    }

    #[test]
    fn missing_duration_is_an_error() {
        let mut b = NetworkBuilder::new(Horizon::new(1).unwrap());
        let h = b.add_train_type("reg");
        let a = b.add_node("A");
        let c = b.add_node("C");
        let ac = b.add_link(a, c).unwrap();
        let net = b.build();
        let route = Route {
            id: RouteId::new(0),
            name: "r".into(),
            origin: a,
            destination: c,
            train_type: h,
            links: vec![ac],
            metadata: BTreeMap::new(),
        };
        assert!(matches!(
            aggregate_durations(&route, &net),
            Err(CatalogError::MissingDuration { .. })
        ));
    }

    #[test]
    fn implementing_routes_follow_properties() {
        let (net, [ab, bc], h) = abc();
        let (a, c) = (NodeId::new(0), NodeId::new(2));
        let mut cb = CatalogBuilder::new();
        let d = cb.add_demand("A-C", a, c, h, vec![1, 0, 0]);
        let lonely = cb.add_demand("B-C", NodeId::new(1), c, h, vec![0, 0, 0]);
        let r = cb.add_route(&net, "A-C-1", h, vec![ab, bc]).unwrap();
        let cat = cb.build(&net).unwrap();
        assert_eq!(cat.implementing_routes(d).unwrap(), &[r]);
        assert!(cat.implementing_routes(lonely).unwrap().is_empty());
        assert_eq!(
            cat.implementing_routes(DemandId::new(7)),
            Err(CatalogError::UnknownDemand(DemandId::new(7)))
        );
        assert_eq!(cat.demand_total(d).unwrap(), 1.0);
        assert_eq!(cat.demand_total(lonely).unwrap(), 0.0);
    }

    #[test]
    fn explicit_relation_must_agree_with_properties() {
        let (net, [ab, bc], h) = abc();
        let (a, c) = (NodeId::new(0), NodeId::new(2));
        let mut cb = CatalogBuilder::new();
        cb.add_demand("A-C", a, c, h, vec![1, 0, 0]);
        cb.add_route(&net, "A-C-1", h, vec![ab, bc]).unwrap();
        cb.explicit_relation();
        assert!(matches!(
            cb.build(&net),
            Err(CatalogError::MissingImplementation { .. })
        ));

        let mut cb = CatalogBuilder::new();
        let d = cb.add_demand("A-B", a, NodeId::new(1), h, vec![1, 0, 0]);
        let r = cb.add_route(&net, "A-C-1", h, vec![ab, bc]).unwrap();
        cb.implements(d, r);
        assert!(matches!(
            cb.build(&net),
            Err(CatalogError::PropertyMismatch { .. })
        ));
    }

    #[test]
    fn volume_vector_must_cover_horizon() {
        let (net, _, h) = abc();
        let mut cb = CatalogBuilder::new();
        cb.add_demand("A-C", NodeId::new(0), NodeId::new(2), h, vec![1]);
        assert!(matches!(
            cb.build(&net),
            Err(CatalogError::VolumeLength { .. })
        ));
    }
}
