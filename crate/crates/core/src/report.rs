//! Capacity-usage and demand-outcome reports derived from a solution.
//!
//! Reports hold unrounded values; only the CSV rendering rounds, to two
//! decimals with halves rounded up.

use crate::catalog::ServiceCatalog;
use crate::formulation::{CapacityMode, ModelConfig, TimeExpandedModel, Var};
use crate::network::{LinkId, Network};

/// Two decimals, halves rounded away from zero on the decimal value the
/// number was written as (0.075 gives 0.08).
pub fn format_cell(x: f64) -> String {
    let nudge = if x >= 0.0 { 1e-9 } else { -1e-9 };
    let r = (x * 100.0 + nudge).round() / 100.0;
    format!("{:.2}", r + 0.0)
}

fn to_csv(header: Vec<String>, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(&header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

fn period_header(first: &[&str], periods: usize, total: bool) -> Vec<String> {
    let mut h: Vec<String> = first.iter().map(|s| s.to_string()).collect();
    h.extend((1..=periods).map(|t| t.to_string()));
    if total {
        h.push("total".into());
    }
    h
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkUsage {
    pub link: LinkId,
    pub name: String,
    /// Used capacity per period, summed over train types.
    pub used: Vec<f64>,
    /// `(train type, used per period)` for every train type.
    pub by_type: Vec<(String, Vec<f64>)>,
    pub nominal: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetupUsage {
    /// `setup {link}/{coupled link}`.
    pub label: String,
    pub links: (LinkId, LinkId),
    pub values: Vec<f64>,
}

/// Used capacity per link and period: direct traversals count fully, those
/// spanning a period boundary count half in each period.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityUsageReport {
    pub periods: usize,
    pub links: Vec<LinkUsage>,
    /// Direction-change time of coupled links; only with single_track_alt2.
    pub setup: Vec<SetupUsage>,
}

impl CapacityUsageReport {
    pub fn from_solution(
        model: &TimeExpandedModel,
        network: &Network,
        catalog: &ServiceCatalog,
        config: &ModelConfig,
        values: &[f64],
    ) -> Self {
        let periods = network.horizon().t_max();
        let val = |v: Var| model.value(values, v);
        let links = network
            .links()
            .iter()
            .map(|link| {
                let l = link.id;
                let by_type: Vec<(String, Vec<f64>)> = network
                    .train_types()
                    .iter()
                    .map(|h| {
                        let used = (1..=periods)
                            .map(|t| {
                                catalog
                                    .routes()
                                    .iter()
                                    .filter(|r| r.train_type == h.id && r.links.contains(&l))
                                    .map(|r| {
                                        val(Var::Direct { l, t, r: r.id })
                                            + 0.5
                                                * val(Var::Next {
                                                    l,
                                                    t: t - 1,
                                                    r: r.id,
                                                })
                                            + 0.5 * val(Var::Next { l, t, r: r.id })
                                    })
                                    .sum()
                            })
                            .collect();
                        (h.label.clone(), used)
                    })
                    .collect();
                let used = (0..periods)
                    .map(|k| by_type.iter().map(|(_, u)| u[k]).sum())
                    .collect();
                LinkUsage {
                    link: l,
                    name: link.name.clone(),
                    used,
                    by_type,
                    nominal: network.capacity_row(l).to_vec(),
                }
            })
            .collect();
        let setup = if config.capacity_mode == CapacityMode::SingleTrackAlt2 {
            network
                .coupled_pairs()
                .into_iter()
                .map(|(l, s)| SetupUsage {
                    label: format!("setup {}/{}", network.link_name(l), network.link_name(s)),
                    links: (l, s),
                    values: (1..=periods).map(|t| val(Var::SetupW { l, t })).collect(),
                })
                .collect()
        } else {
            Vec::new()
        };
        Self {
            periods,
            links,
            setup,
        }
    }

    pub fn link(&self, name: &str) -> Option<&LinkUsage> {
        self.links.iter().find(|u| u.name == name)
    }

    /// Used capacity of `name` in period `t` (1-based).
    pub fn usage(&self, name: &str, t: usize) -> Option<f64> {
        self.link(name)
            .and_then(|u| u.used.get(t.checked_sub(1)?).copied())
    }

    /// One row per link in network order, then the setup rows.
    pub fn to_csv(&self) -> String {
        let rows = self
            .links
            .iter()
            .map(|u| (u.name.as_str(), &u.used))
            .chain(self.setup.iter().map(|s| (s.label.as_str(), &s.values)))
            .map(|(label, vals)| {
                std::iter::once(label.to_owned())
                    .chain(vals.iter().map(|&v| format_cell(v)))
                    .collect()
            });
        to_csv(period_header(&["link"], self.periods, false), rows)
    }

    /// One row per link and train type.
    pub fn by_type_csv(&self) -> String {
        let rows = self.links.iter().flat_map(|u| {
            u.by_type.iter().map(move |(h, vals)| {
                [u.name.clone(), h.clone()]
                    .into_iter()
                    .chain(vals.iter().map(|&v| format_cell(v)))
                    .collect()
            })
        });
        to_csv(
            period_header(&["link", "train_type"], self.periods, false),
            rows,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemandOutcome {
    pub demand: String,
    /// Total requested volume.
    pub volume: u64,
    pub requested: Vec<f64>,
    /// `(route, departures per period)` for every implementing route.
    pub departures: Vec<(String, Vec<f64>)>,
    /// Volume carried over from each period to the next.
    pub postponed: Vec<f64>,
    pub canceled: Vec<f64>,
    pub cancel_total: f64,
}

impl DemandOutcome {
    pub fn departed(&self) -> f64 {
        self.departures.iter().flat_map(|(_, v)| v).sum()
    }
}

/// Per demand: departures by route and period, postponements and
/// cancellations.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandOutcomeReport {
    pub periods: usize,
    pub demands: Vec<DemandOutcome>,
}

impl DemandOutcomeReport {
    pub fn from_solution(
        model: &TimeExpandedModel,
        network: &Network,
        catalog: &ServiceCatalog,
        values: &[f64],
    ) -> Self {
        let periods = network.horizon().t_max();
        let val = |v: Var| model.value(values, v);
        let demands = catalog
            .demands()
            .iter()
            .map(|d| {
                let routes = catalog.implementing_routes(d.id).unwrap_or_default();
                DemandOutcome {
                    demand: d.name.clone(),
                    volume: d.total(),
                    requested: (1..=periods).map(|t| f64::from(d.volume(t))).collect(),
                    departures: routes
                        .iter()
                        .map(|&r| {
                            (
                                catalog.routes()[r.index()].name.clone(),
                                (1..=periods).map(|t| val(Var::Dep { r, t })).collect(),
                            )
                        })
                        .collect(),
                    postponed: (1..=periods)
                        .map(|t| val(Var::Post { d: d.id, t }))
                        .collect(),
                    canceled: (1..=periods)
                        .map(|t| val(Var::CancelT { d: d.id, t }))
                        .collect(),
                    cancel_total: val(Var::CancelTotal { d: d.id }),
                }
            })
            .collect();
        Self { periods, demands }
    }

    pub fn demand(&self, name: &str) -> Option<&DemandOutcome> {
        self.demands.iter().find(|d| d.demand == name)
    }

    /// Columns `demand,route,kind,1..T,total`; kinds are requested,
    /// departure (one row per route), postponed and canceled.
    pub fn to_csv(&self) -> String {
        let mut rows = Vec::new();
        let line = |d: &str, r: &str, kind: &str, vals: &[f64], total: f64| -> Vec<String> {
            [d.to_owned(), r.to_owned(), kind.to_owned()]
                .into_iter()
                .chain(vals.iter().map(|&v| format_cell(v)))
                .chain(std::iter::once(format_cell(total)))
                .collect()
        };
        for d in &self.demands {
            rows.push(line(
                &d.demand,
                "",
                "requested",
                &d.requested,
                d.volume as f64,
            ));
            for (r, vals) in &d.departures {
                rows.push(line(&d.demand, r, "departure", vals, vals.iter().sum()));
            }
            rows.push(line(
                &d.demand,
                "",
                "postponed",
                &d.postponed,
                d.postponed.iter().sum(),
            ));
            rows.push(line(&d.demand, "", "canceled", &d.canceled, d.cancel_total));
        }
        to_csv(
            period_header(&["demand", "route", "kind"], self.periods, true),
            rows,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_round_half_up() {
        assert_eq!(format_cell(0.925), "0.93");
        assert_eq!(format_cell(0.075), "0.08");
        assert_eq!(format_cell(0.0), "0.00");
        assert_eq!(format_cell(-1e-12), "0.00");
        assert_eq!(format_cell(2.5), "2.50");
        assert_eq!(format_cell(1.0 / 3.0), "0.33");
    }

    #[test]
    fn csv_layout() {
        let text = to_csv(
            period_header(&["link"], 2, false),
            vec![vec!["A-B".into(), "1.00".into(), "0.50".into()]],
        );
        assert_eq!(text, "link,1,2\nA-B,1.00,0.50\n");
    }
}
