//! Geographical railway network: stations, directed track links, coupled
//! single-track pairs, nominal capacities per period and traversal durations
//! per train type.
//!
//! Durations are stored as fractions of one time period. Capacities are
//! stored per (link, period) so that temporary restrictions are plain data
//! edits.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::validation::{ValidationReport, ViolationCode};

id_type!(
    /// Station node identifier.
    NodeId
);
id_type!(
    /// Directed track link identifier.
    LinkId
);
id_type!(
    /// Train type identifier.
    TrainTypeId
);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("unknown node id {0}")]
    UnknownNode(NodeId),
    #[error("unknown link id {0}")]
    UnknownLink(LinkId),
    #[error("unknown train type id {0}")]
    UnknownTrainType(TrainTypeId),
    #[error("period {period} outside horizon 1..={t_max}")]
    PeriodOutOfRange { period: usize, t_max: usize },
    #[error("horizon must contain at least one period")]
    EmptyHorizon,
    #[error("non-finite value {value} for {what}")]
    NonFinite { what: String, value: f64 },
}

/// Number of time periods under study. Periods are numbered `1..=t_max`;
/// period 0 holds initial values only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Horizon {
    t_max: usize,
}

impl Horizon {
    pub fn new(t_max: usize) -> Result<Self, NetworkError> {
        if t_max == 0 {
            return Err(NetworkError::EmptyHorizon);
        }
        Ok(Self { t_max })
    }

    pub fn t_max(self) -> usize {
        self.t_max
    }

    /// `1..=t_max`
    pub fn periods(self) -> std::ops::RangeInclusive<usize> {
        1..=self.t_max
    }

    /// `0..=t_max`
    pub fn extended_periods(self) -> std::ops::RangeInclusive<usize> {
        0..=self.t_max
    }

    pub fn contains(self, t: usize) -> bool {
        (1..=self.t_max).contains(&t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainType {
    pub id: TrainTypeId,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationNode {
    pub id: NodeId,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackLink {
    pub id: LinkId,
    pub name: String,
    pub tail: NodeId,
    pub head: NodeId,
}

/// Immutable railway network.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    horizon: Horizon,
    train_types: Vec<TrainType>,
    nodes: Vec<StationNode>,
    links: Vec<TrackLink>,
    sigma: Vec<LinkId>,
    // [link][t - 1]
    capacity: Vec<Vec<f64>>,
    // [link][train type], in fractions of a period
    durations: Vec<Vec<Option<f64>>>,
    outgoing: Vec<Vec<LinkId>>,
    incoming: Vec<Vec<LinkId>>,
}

impl Network {
    pub fn horizon(&self) -> Horizon {
        self.horizon
    }

    pub fn train_types(&self) -> &[TrainType] {
        &self.train_types
    }

    pub fn nodes(&self) -> &[StationNode] {
        &self.nodes
    }

    pub fn links(&self) -> &[TrackLink] {
        &self.links
    }

    pub fn node(&self, id: NodeId) -> Result<&StationNode, NetworkError> {
        self.nodes.get(id.0).ok_or(NetworkError::UnknownNode(id))
    }

    pub fn link(&self, id: LinkId) -> Result<&TrackLink, NetworkError> {
        self.links.get(id.0).ok_or(NetworkError::UnknownLink(id))
    }

    pub fn train_type(&self, id: TrainTypeId) -> Result<&TrainType, NetworkError> {
        self.train_types
            .get(id.0)
            .ok_or(NetworkError::UnknownTrainType(id))
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.nodes.iter().find(|n| n.name == name).map(|n| n.id)
    }

    pub fn link_by_name(&self, name: &str) -> Option<LinkId> {
        self.links.iter().find(|l| l.name == name).map(|l| l.id)
    }

    pub fn train_type_by_label(&self, label: &str) -> Option<TrainTypeId> {
        self.train_types
            .iter()
            .find(|h| h.label == label)
            .map(|h| h.id)
    }

    pub fn node_name(&self, id: NodeId) -> &str {
        &self.nodes[id.0].name
    }

    pub fn link_name(&self, id: LinkId) -> &str {
        &self.links[id.0].name
    }

    pub fn train_type_label(&self, id: TrainTypeId) -> &str {
        &self.train_types[id.0].label
    }

    /// Coupled link of `l` (itself for double track).
    pub fn sigma(&self, l: LinkId) -> Result<LinkId, NetworkError> {
        self.sigma
            .get(l.0)
            .copied()
            .ok_or(NetworkError::UnknownLink(l))
    }

    /// True iff `l` shares one physical track with its reverse link.
    pub fn is_single_track(&self, l: LinkId) -> Result<bool, NetworkError> {
        Ok(self.sigma(l)? != l)
    }

    /// Coupled single-track pairs `(l, sigma(l))`, each listed once with the
    /// lexicographically smaller link name first, sorted by that name. The
    /// result does not depend on the order links were added in.
    pub fn coupled_pairs(&self) -> Vec<(LinkId, LinkId)> {
        let mut pairs: Vec<(LinkId, LinkId)> = self
            .sigma
            .iter()
            .enumerate()
            .map(|(l, &s)| (LinkId(l), s))
            .filter(|&(l, s)| l != s && (self.link_name(l), l) < (self.link_name(s), s))
            .collect();
        pairs.sort_by(|a, b| self.link_name(a.0).cmp(self.link_name(b.0)));
        pairs
    }

    /// The link running from `tail` to `head`, if any. When the network holds
    /// duplicates (a validation failure) the lowest id wins.
    pub fn link_between(&self, tail: NodeId, head: NodeId) -> Option<LinkId> {
        self.outgoing
            .get(tail.0)?
            .iter()
            .copied()
            .find(|&l| self.links[l.0].head == head)
    }

    pub fn outgoing(&self, n: NodeId) -> &[LinkId] {
        &self.outgoing[n.0]
    }

    pub fn incoming(&self, n: NodeId) -> &[LinkId] {
        &self.incoming[n.0]
    }

    /// Nominal capacity of `l` in period `t` (1-based).
    pub fn nominal_capacity(&self, l: LinkId, t: usize) -> f64 {
        self.capacity[l.0][t - 1]
    }

    pub fn capacity_row(&self, l: LinkId) -> &[f64] {
        &self.capacity[l.0]
    }

    pub fn max_nominal_capacity(&self) -> f64 {
        self.capacity.iter().flatten().copied().fold(0.0, f64::max)
    }

    /// Traversal duration of `l` by train type `h`, in periods.
    pub fn duration(&self, l: LinkId, h: TrainTypeId) -> Option<f64> {
        self.durations.get(l.0)?.get(h.0).copied().flatten()
    }

    /// Copy of this network with the listed capacity cells replaced.
    pub fn with_capacities(&self, edits: &[(LinkId, usize, f64)]) -> Result<Network, NetworkError> {
        let mut next = self.clone();
        for &(l, t, value) in edits {
            self.link(l)?;
            if !self.horizon.contains(t) {
                return Err(NetworkError::PeriodOutOfRange {
                    period: t,
                    t_max: self.horizon.t_max,
                });
            }
            if !value.is_finite() {
                return Err(NetworkError::NonFinite {
                    what: format!("capacity of {} in period {t}", self.link_name(l)),
                    value,
                });
            }
            next.capacity[l.0][t - 1] = value;
        }
        Ok(next)
    }
}

/// Incremental construction of a [`Network`]. Ids handed out by the builder
/// are dense in insertion order.
#[derive(Debug, Clone)]
pub struct NetworkBuilder {
    horizon: Horizon,
    train_types: Vec<TrainType>,
    nodes: Vec<StationNode>,
    links: Vec<TrackLink>,
    sigma: BTreeMap<usize, LinkId>,
    capacity: Vec<Vec<f64>>,
    durations: Vec<Vec<Option<f64>>>,
    default_capacity: f64,
}

impl NetworkBuilder {
    pub fn new(horizon: Horizon) -> Self {
        Self {
            horizon,
            train_types: Vec::new(),
            nodes: Vec::new(),
            links: Vec::new(),
            sigma: BTreeMap::new(),
            capacity: Vec::new(),
            durations: Vec::new(),
            default_capacity: 0.0,
        }
    }

    /// Capacity given to every period of links added from now on.
    pub fn default_capacity(&mut self, value: f64) -> &mut Self {
        self.default_capacity = value;
        self
    }

    pub fn add_train_type(&mut self, label: impl Into<String>) -> TrainTypeId {
        let id = TrainTypeId(self.train_types.len());
        self.train_types.push(TrainType {
            id,
            label: label.into(),
        });
        for row in &mut self.durations {
            row.push(None);
        }
        id
    }

    pub fn add_node(&mut self, name: impl Into<String>) -> NodeId {
        let id = NodeId(self.nodes.len());
        self.nodes.push(StationNode {
            id,
            name: name.into(),
        });
        id
    }

    /// Adds a link named `"{tail}-{head}"`.
    pub fn add_link(&mut self, tail: NodeId, head: NodeId) -> Result<LinkId, NetworkError> {
        let t = self
            .nodes
            .get(tail.0)
            .ok_or(NetworkError::UnknownNode(tail))?;
        let h = self
            .nodes
            .get(head.0)
            .ok_or(NetworkError::UnknownNode(head))?;
        let name = format!("{}-{}", t.name, h.name);
        self.add_named_link(name, tail, head)
    }

    pub fn add_named_link(
        &mut self,
        name: impl Into<String>,
        tail: NodeId,
        head: NodeId,
    ) -> Result<LinkId, NetworkError> {
        for n in [tail, head] {
            if n.0 >= self.nodes.len() {
                return Err(NetworkError::UnknownNode(n));
            }
        }
        let id = LinkId(self.links.len());
        self.links.push(TrackLink {
            id,
            name: name.into(),
            tail,
            head,
        });
        self.capacity
            .push(vec![self.default_capacity; self.horizon.t_max]);
        self.durations.push(vec![None; self.train_types.len()]);
        Ok(id)
    }

    fn check_link(&self, l: LinkId) -> Result<(), NetworkError> {
        if l.0 < self.links.len() {
            Ok(())
        } else {
            Err(NetworkError::UnknownLink(l))
        }
    }

    /// Declares `a` and `b` as the two directions of one single track.
    pub fn couple(&mut self, a: LinkId, b: LinkId) -> Result<&mut Self, NetworkError> {
        self.check_link(a)?;
        self.check_link(b)?;
        self.sigma.insert(a.0, b);
        self.sigma.insert(b.0, a);
        Ok(self)
    }

    /// Sets one entry of the coupling map without touching its partner.
    pub fn set_sigma(&mut self, l: LinkId, target: LinkId) -> Result<&mut Self, NetworkError> {
        self.check_link(l)?;
        self.check_link(target)?;
        self.sigma.insert(l.0, target);
        Ok(self)
    }

    pub fn set_capacity(
        &mut self,
        l: LinkId,
        t: usize,
        value: f64,
    ) -> Result<&mut Self, NetworkError> {
        self.check_link(l)?;
        if !self.horizon.contains(t) {
            return Err(NetworkError::PeriodOutOfRange {
                period: t,
                t_max: self.horizon.t_max,
            });
        }
        self.capacity[l.0][t - 1] = value;
        Ok(self)
    }

    pub fn fill_capacity(&mut self, l: LinkId, value: f64) -> Result<&mut Self, NetworkError> {
        self.check_link(l)?;
        self.capacity[l.0].fill(value);
        Ok(self)
    }

    /// Duration in fractions of one period.
    pub fn set_duration(
        &mut self,
        l: LinkId,
        h: TrainTypeId,
        periods: f64,
    ) -> Result<&mut Self, NetworkError> {
        self.check_link(l)?;
        if h.0 >= self.train_types.len() {
            return Err(NetworkError::UnknownTrainType(h));
        }
        self.durations[l.0][h.0] = Some(periods);
        Ok(self)
    }

    pub fn build(self) -> Network {
        let n_links = self.links.len();
        let sigma = (0..n_links)
            .map(|l| self.sigma.get(&l).copied().unwrap_or(LinkId(l)))
            .collect();
        let mut outgoing = vec![Vec::new(); self.nodes.len()];
        let mut incoming = vec![Vec::new(); self.nodes.len()];
        for link in &self.links {
            outgoing[link.tail.0].push(link.id);
            incoming[link.head.0].push(link.id);
        }
        Network {
            horizon: self.horizon,
            train_types: self.train_types,
            nodes: self.nodes,
            links: self.links,
            sigma,
            capacity: self.capacity,
            durations: self.durations,
            outgoing,
            incoming,
        }
    }
}

/// Checks every structural invariant of `network`; an empty report means the
/// network is well-formed.
pub fn validate_network(network: &Network) -> ValidationReport {
    let mut report = ValidationReport::new();

    duplicate_names(
        &mut report,
        "train type",
        network.train_types.iter().map(|h| h.label.as_str()),
    );
    duplicate_names(
        &mut report,
        "node",
        network.nodes.iter().map(|n| n.name.as_str()),
    );
    duplicate_names(
        &mut report,
        "link",
        network.links.iter().map(|l| l.name.as_str()),
    );

    let mut pairs: HashMap<(NodeId, NodeId), Vec<&str>> = HashMap::new();
    for link in &network.links {
        if link.tail == link.head {
            report.push(
                ViolationCode::SelfLoop,
                &link.name,
                format!("tail and head are both {}", network.node_name(link.tail)),
            );
        }
        pairs
            .entry((link.tail, link.head))
            .or_default()
            .push(&link.name);
    }
    for names in pairs.values().filter(|v| v.len() > 1) {
        let mut names = names.clone();
        names.sort_unstable();
        report.push(
            ViolationCode::DuplicateLink,
            names[0],
            format!("links {} share tail and head", names.join(", ")),
        );
    }

    for link in &network.links {
        let s = network.sigma[link.id.0];
        if network.sigma[s.0] != link.id {
            report.push(
                ViolationCode::SigmaInvolution,
                &link.name,
                format!(
                    "sigma({}) = {} but sigma({}) = {}",
                    link.name,
                    network.link_name(s),
                    network.link_name(s),
                    network.link_name(network.sigma[s.0])
                ),
            );
        }
        if s != link.id {
            let other = &network.links[s.0];
            if other.tail != link.head || other.head != link.tail {
                report.push(
                    ViolationCode::SigmaEndpoints,
                    &link.name,
                    format!("coupled link {} is not its reverse", other.name),
                );
            }
        }
    }

    for link in &network.links {
        for (t0, &c) in network.capacity[link.id.0].iter().enumerate() {
            if !(c >= 0.0 && c.is_finite()) {
                report.push(
                    ViolationCode::NegativeCapacity,
                    &link.name,
                    format!("capacity {c} in period {}", t0 + 1),
                );
            }
        }
        for (h, d) in network.durations[link.id.0].iter().enumerate() {
            let Some(d) = *d else { continue };
            let label = &network.train_types[h].label;
            if !(d >= 0.0 && d.is_finite()) {
                report.push(
                    ViolationCode::InvalidDuration,
                    &link.name,
                    format!("duration {d} for train type {label}"),
                );
            } else if d > 1.0 {
                report.push(
                    ViolationCode::DurationExceedsPeriod,
                    &link.name,
                    format!("duration {d} periods for train type {label}"),
                );
            }
        }
    }

    report
}

fn duplicate_names<'a>(
    report: &mut ValidationReport,
    what: &str,
    names: impl Iterator<Item = &'a str>,
) {
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    for name in names {
        *seen.entry(name).or_default() += 1;
    }
    for (name, count) in seen.into_iter().filter(|&(_, c)| c > 1) {
        report.push(
            ViolationCode::DuplicateName,
            name,
            format!("{what} name used {count} times"),
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_nodes() -> (NetworkBuilder, NodeId, NodeId) {
        let mut b = NetworkBuilder::new(Horizon::new(2).unwrap());
        b.add_train_type("reg");
        let a = b.add_node("A");
        let c = b.add_node("C");
        (b, a, c)
    }

    #[test]
    fn self_loop_is_reported() {
        let (mut b, a, _) = two_nodes();
        b.add_link(a, a).unwrap();
        let report = validate_network(&b.build());
        assert_eq!(report.codes(), vec!["self-loop"]);
    }

    #[test]
    fn broken_involution_is_reported() {
        let (mut b, a, c) = two_nodes();
        let ac = b.add_link(a, c).unwrap();
        let ca = b.add_link(c, a).unwrap();
        let c2 = b.add_node("D");
        let cd = b.add_link(c, c2).unwrap();
        b.set_sigma(ac, ca).unwrap();
        b.set_sigma(ca, cd).unwrap();
        let report = validate_network(&b.build());
        assert!(report.has(ViolationCode::SigmaInvolution));
    }

    #[test]
    fn over_long_duration_is_reported() {
        let (mut b, a, c) = two_nodes();
        let ac = b.add_link(a, c).unwrap();
        b.set_duration(ac, TrainTypeId::new(0), 1.2).unwrap();
        let report = validate_network(&b.build());
        assert_eq!(report.codes(), vec!["duration-exceeds-period"]);
    }

    #[test]
    fn single_track_queries() {
        let (mut b, a, c) = two_nodes();
        let ac = b.add_link(a, c).unwrap();
        let ca = b.add_link(c, a).unwrap();
        let d = b.add_node("D");
        let cd = b.add_link(c, d).unwrap();
        b.couple(ac, ca).unwrap();
        let net = b.build();
        assert!(net.is_single_track(ac).unwrap());
        assert!(net.is_single_track(ca).unwrap());
        assert!(!net.is_single_track(cd).unwrap());
        assert_eq!(
            net.is_single_track(LinkId::new(9)),
            Err(NetworkError::UnknownLink(LinkId::new(9)))
        );
        assert_eq!(net.coupled_pairs(), vec![(ac, ca)]);
        assert!(validate_network(&net).is_ok());
    }

    #[test]
    fn link_lookup_is_directional() {
        let (mut b, a, c) = two_nodes();
        let ac = b.add_link(a, c).unwrap();
        let ca = b.add_link(c, a).unwrap();
        let d = b.add_node("D");
        let net = b.build();
        assert_eq!(net.link_between(a, c), Some(ac));
        assert_eq!(net.link_between(c, a), Some(ca));
        assert_eq!(net.link_between(a, d), None);
        assert_eq!(net.link_name(ca), "C-A");
    }

    #[test]
    fn capacity_edits_touch_only_listed_cells() {
        let (mut b, a, c) = two_nodes();
        b.default_capacity(5.0);
        let ac = b.add_link(a, c).unwrap();
        let net = b.build();
        let edited = net.with_capacities(&[(ac, 2, 0.0)]).unwrap();
        assert_eq!(edited.capacity_row(ac), &[5.0, 0.0]);
        assert!(net.with_capacities(&[(ac, 3, 0.0)]).is_err());
    }

    #[test]
    fn empty_horizon_rejected() {
        assert_eq!(Horizon::new(0), Err(NetworkError::EmptyHorizon));
    }
}
