use std::collections::HashSet;

use super::emit::arrival_shares;
use super::*;
use crate::catalog::CatalogBuilder;
use crate::network::{Horizon, NetworkBuilder};

/// One link A-B, one route, one demand.
fn single_link(t_max: usize, volumes: Vec<u32>) -> (Network, ServiceCatalog) {
    let mut nb = NetworkBuilder::new(Horizon::new(t_max).unwrap());
    nb.default_capacity(3.0);
    let p = nb.add_train_type("p");
    let a = nb.add_node("A");
    let b = nb.add_node("B");
    let ab = nb.add_link(a, b).unwrap();
    nb.set_duration(ab, p, 0.5).unwrap();
    let net = nb.build();
    let mut cb = CatalogBuilder::new();
    cb.add_demand("A-B", a, b, p, volumes);
    cb.add_route(&net, "A-B-1", p, vec![ab]).unwrap();
    let cat = cb.build(&net).unwrap();
    (net, cat)
}

/// A-B and B-A coupled as one single track, with two types on A-B.
fn coupled() -> (Network, ServiceCatalog) {
    let mut nb = NetworkBuilder::new(Horizon::new(2).unwrap());
    nb.default_capacity(4.0);
    let p = nb.add_train_type("p");
    let f = nb.add_train_type("f");
    let a = nb.add_node("A");
    let b = nb.add_node("B");
    let ab = nb.add_link(a, b).unwrap();
    let ba = nb.add_link(b, a).unwrap();
    nb.couple(ab, ba).unwrap();
    nb.set_capacity(ba, 2, 2.0).unwrap();
    for l in [ab, ba] {
        for h in [p, f] {
            nb.set_duration(l, h, 0.5).unwrap();
        }
    }
    let net = nb.build();
    let mut cb = CatalogBuilder::new();
    cb.add_demand("AB-p", a, b, p, vec![1, 0]);
    cb.add_demand("AB-f", a, b, f, vec![0, 1]);
    cb.add_demand("BA-p", b, a, p, vec![1, 1]);
    cb.add_route(&net, "AB-p1", p, vec![ab]).unwrap();
    cb.add_route(&net, "AB-f1", f, vec![ab]).unwrap();
    cb.add_route(&net, "BA-p1", p, vec![ba]).unwrap();
    let cat = cb.build(&net).unwrap();
    (net, cat)
}

fn with_mode(mode: CapacityMode) -> ModelConfig {
    ModelConfig {
        capacity_mode: mode,
        ..ModelConfig::default()
    }
}

#[test]
fn variable_counts_follow_index_domains() {
    let (net, cat) = single_link(2, vec![1, 0]);
    let m = build_model(&net, &cat, &ModelConfig::default()).unwrap();
    assert_eq!(m.count_kind(VarKind::Direct), 2);
    assert_eq!(m.count_kind(VarKind::Next), 3);
    assert_eq!(m.count_kind(VarKind::Dep), 2);
    assert_eq!(m.count_kind(VarKind::Ext), 4);
    assert_eq!(m.count_kind(VarKind::Ni), 6);
    assert_eq!(m.count_kind(VarKind::Post), 3);
    assert_eq!(m.count_kind(VarKind::CancelTotal), 1);
    assert_eq!(m.count_kind(VarKind::LinkCap), 2);
    assert_eq!(m.count_kind(VarKind::SetupW), 0);
    assert_eq!(m.count_kind(VarKind::DirFlagBeta), 0);
}

#[test]
fn only_ext_is_free() {
    let (net, cat) = single_link(2, vec![1, 0]);
    let m = build_model(&net, &cat, &ModelConfig::default()).unwrap();
    for v in m.variables() {
        if v.var.kind() == VarKind::Ext {
            assert_eq!(v.lower, f64::NEG_INFINITY);
        } else {
            assert_eq!(v.lower, 0.0, "{}", v.name);
        }
    }
}

#[test]
fn integrality_marks() {
    let (net, cat) = coupled();
    let m = build_model(&net, &cat, &with_mode(CapacityMode::SingleTrackAlt2)).unwrap();
    let ints: Vec<_> = m
        .integer_columns()
        .map(|i| m.variable(i).var.kind())
        .collect();
    assert_eq!(
        ints.iter().filter(|k| **k == VarKind::CancelTotal).count(),
        3
    );
    assert_eq!(
        ints.iter().filter(|k| **k == VarKind::DirFlagBeta).count(),
        2
    );

    let relaxed = ModelConfig {
        relax_integrality: true,
        ..with_mode(CapacityMode::SingleTrackAlt2)
    };
    let m = build_model(&net, &cat, &relaxed).unwrap();
    assert!(m
        .integer_columns()
        .all(|i| m.variable(i).var.kind() == VarKind::DirFlagBeta));
}

#[test]
fn capacity4_counts_half_of_adjacent_next_arcs() {
    let (net, cat) = single_link(2, vec![1, 0]);
    let m = build_model(&net, &cat, &ModelConfig::default()).unwrap();
    let row = m.constraint_by_name("Capacity4[l=A-B,t=2,h=p]").unwrap();
    let coef = |name: &str| {
        let i = m.variable_by_name(name).unwrap();
        row.terms.iter().find(|t| t.0 == i).map(|t| t.1)
    };
    assert_eq!(coef("direct[l=A-B,t=2,r=A-B-1]"), Some(1.0));
    assert_eq!(coef("next[l=A-B,t=1,r=A-B-1]"), Some(0.5));
    assert_eq!(coef("next[l=A-B,t=2,r=A-B-1]"), Some(0.5));
    assert_eq!(coef("linkcap[l=A-B,t=2,h=p]"), Some(-1.0));
    assert_eq!(row.relation, Relation::Le);

    let cap = m.constraint_by_name("Capacity1[l=A-B,t=1]").unwrap();
    assert_eq!(cap.rhs, 3.0);
}

#[test]
fn alt1_averages_coupled_capacities() {
    let (net, cat) = coupled();
    let m = build_model(&net, &cat, &with_mode(CapacityMode::SingleTrackAlt1)).unwrap();
    let rows: Vec<_> = m.constraints_of(Family::Capacity2Alt1).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].rhs, 4.0);
    assert_eq!(rows[1].rhs, 3.0);
    assert_eq!(rows[0].terms.len(), 4);
}

#[test]
fn alt2_rows_and_setup_coefficients() {
    let (net, cat) = coupled();
    let cfg = ModelConfig {
        k_setup: 0.5,
        big_m: Some(100.0),
        ..with_mode(CapacityMode::SingleTrackAlt2)
    };
    let m = build_model(&net, &cat, &cfg).unwrap();
    assert_eq!(m.constraints_of(Family::Capacity2Alt2).count(), 4);
    assert_eq!(m.constraints_of(Family::SetupAlt2).count(), 4);

    let w = m.variable_by_name("setup_w[l=A-B,t=1]").unwrap();
    let beta = m.variable_by_name("dirflag_beta[l=A-B,t=1]").unwrap();
    let fwd = m.constraint_by_name("Setup_alt2[l=A-B,t=1]").unwrap();
    let rev = m.constraint_by_name("Setup_alt2[l=B-A,t=1]").unwrap();
    let coef = |c: &LinearConstraint, i: VarIndex| c.terms.iter().find(|t| t.0 == i).unwrap().1;
    assert_eq!(coef(fwd, w), -0.5);
    assert_eq!(coef(fwd, beta), 100.0);
    assert_eq!(fwd.rhs, 100.0);
    assert_eq!(coef(rev, beta), -100.0);
    assert_eq!(rev.rhs, 0.0);

    let shared = m.constraint_by_name("Capacity2_alt2[l=B-A,t=2]").unwrap();
    assert_eq!(shared.rhs, 2.0);
    assert_eq!(
        coef(shared, m.variable_by_name("setup_w[l=A-B,t=2]").unwrap()),
        1.0
    );
}

#[test]
fn alt2_without_pairs_warns() {
    let (net, cat) = single_link(2, vec![1, 0]);
    let m = build_model(&net, &cat, &with_mode(CapacityMode::SingleTrackAlt2)).unwrap();
    assert_eq!(m.warnings().len(), 1);
    assert_eq!(m.count_kind(VarKind::SetupW), 0);
}

#[test]
fn heterogeneous_penalises_mixed_links_only() {
    let (net, cat) = coupled();
    let cfg = ModelConfig {
        k_het: 0.25,
        ..with_mode(CapacityMode::Heterogeneous)
    };
    let m = build_model(&net, &cat, &cfg).unwrap();
    let mixed = m.constraint_by_name("Capacity3[l=A-B,t=1]").unwrap();
    assert_eq!(mixed.terms.len(), 2);
    assert!(mixed.terms.iter().all(|t| t.1 == 1.25));
    let single = m.constraint_by_name("Capacity3[l=B-A,t=1]").unwrap();
    assert_eq!(single.terms.len(), 1);
    assert_eq!(single.terms[0].1, 1.0);
}

#[test]
fn demand_balance_accepts_postponement() {
    let (net, cat) = single_link(3, vec![2, 0, 0]);
    let m = build_model(&net, &cat, &ModelConfig::default()).unwrap();
    let mut x = vec![0.0; m.variables().len()];
    let set = |x: &mut Vec<f64>, name: &str, v: f64| x[m.variable_by_name(name).unwrap().0] = v;
    set(&mut x, "dep[r=A-B-1,t=1]", 1.0);
    set(&mut x, "post[d=A-B,t=1]", 1.0);
    set(&mut x, "dep[r=A-B-1,t=2]", 1.0);
    for c in m.constraints().iter().filter(|c| {
        matches!(
            c.family,
            Family::Departure3
                | Family::Demand1
                | Family::Demand2
                | Family::Cancel1
                | Family::Cancel2
        )
    }) {
        assert!(c.is_satisfied(&x, 1e-9), "{}", c.name);
    }
    let d2 = m.constraint_by_name("Departure3[d=A-B,t=2]").unwrap();
    assert_eq!(d2.rhs, 0.0);
    assert_eq!(d2.terms.len(), 4);
}

#[test]
fn cancel3_is_optional() {
    let (net, cat) = single_link(2, vec![1, 0]);
    let m = build_model(&net, &cat, &ModelConfig::default()).unwrap();
    assert_eq!(m.constraints_of(Family::Cancel3).count(), 0);
    let cfg = ModelConfig {
        emit_cancel3: true,
        ..ModelConfig::default()
    };
    let m = build_model(&net, &cat, &cfg).unwrap();
    assert_eq!(m.constraints_of(Family::Cancel3).count(), 1);
}

#[test]
fn objective_terms() {
    let (net, cat) = single_link(2, vec![1, 0]);
    let m = build_model(&net, &cat, &ModelConfig::default()).unwrap();
    let n = m.variables().len();
    let at = |pairs: &[(&str, f64)]| {
        let mut x = vec![0.0; n];
        for (name, v) in pairs {
            x[m.variable_by_name(name).unwrap().0] = *v;
        }
        m.objective_value(&x)
    };
    // one unit departing in period 1 and arriving in period 2
    assert_eq!(
        at(&[("dep[r=A-B-1,t=1]", 1.0), ("arr[r=A-B-1,t=2]", 1.0)]),
        1.0
    );
    assert_eq!(at(&[("cancel_total[d=A-B]", 1.0)]), 1000.0);
    assert_eq!(at(&[("post[d=A-B,t=1]", 1.0)]), 20.0);
}

#[test]
fn zero_volume_drops_travel_term() {
    let (net, cat) = single_link(2, vec![0, 0]);
    let m = build_model(&net, &cat, &ModelConfig::default()).unwrap();
    assert!(m
        .objective()
        .iter()
        .all(|(i, _)| !matches!(m.variable(*i).var.kind(), VarKind::Dep | VarKind::Arr)));
}

#[test]
fn aggregate_shares() {
    assert_eq!(arrival_shares(0.0), [(0, 1.0), (1, 0.0)]);
    let [(a, x), (b, y)] = arrival_shares(0.25);
    assert_eq!((a, b), (0, 1));
    assert!((x - 0.75).abs() < 1e-12 && (y - 0.25).abs() < 1e-12);
    // an integral duration moves the whole volume by that many periods
    assert_eq!(arrival_shares(1.0), [(1, 1.0), (2, 0.0)]);
}

#[test]
fn aggregate_rows_use_fractional_lag() {
    let (net, cat) = single_link(3, vec![1, 0, 0]);
    let m = build_model(&net, &cat, &ModelConfig::default()).unwrap();
    let row = m
        .constraint_by_name("Aggregate2_2[n=B,t=2,r=A-B-1]")
        .unwrap();
    let coef = |name: &str| {
        let i = m.variable_by_name(name).unwrap();
        row.terms.iter().find(|t| t.0 == i).map(|t| t.1)
    };
    assert_eq!(coef("dep[r=A-B-1,t=2]"), Some(-0.5));
    assert_eq!(coef("dep[r=A-B-1,t=1]"), Some(-0.5));
    let first = m
        .constraint_by_name("Aggregate2_2[n=B,t=1,r=A-B-1]")
        .unwrap();
    assert_eq!(first.terms.len(), 3);
}

#[test]
fn long_link_is_rejected() {
    let mut nb = NetworkBuilder::new(Horizon::new(2).unwrap());
    let p = nb.add_train_type("p");
    let a = nb.add_node("A");
    let b = nb.add_node("B");
    let ab = nb.add_link(a, b).unwrap();
    nb.set_duration(ab, p, 1.5).unwrap();
    let net = nb.build();
    let mut cb = CatalogBuilder::new();
    cb.add_route(&net, "r", p, vec![ab]).unwrap();
    let cat = cb.build(&net);
    // either the catalog or the model refuses it
    if let Ok(cat) = cat {
        assert!(matches!(
            build_model(&net, &cat, &ModelConfig::default()),
            Err(ModelError::DurationExceedsPeriod { .. })
        ));
    }
}

#[test]
fn names_are_unique_and_stable() {
    let (net, cat) = coupled();
    for mode in [
        CapacityMode::Basic,
        CapacityMode::SingleTrackAlt1,
        CapacityMode::SingleTrackAlt2,
        CapacityMode::Heterogeneous,
    ] {
        let cfg = with_mode(mode);
        let m = build_model(&net, &cat, &cfg).unwrap();
        let mut seen = HashSet::new();
        for v in m.variables() {
            assert!(seen.insert(v.name.clone()), "duplicate variable {}", v.name);
        }
        let mut seen = HashSet::new();
        for c in m.constraints() {
            assert!(seen.insert(c.name.clone()), "duplicate row {}", c.name);
        }
        assert_eq!(m, build_model(&net, &cat, &cfg).unwrap());
    }
}

#[test]
fn invalid_config_is_rejected() {
    let (net, cat) = single_link(2, vec![1, 0]);
    for cfg in [
        ModelConfig {
            k_setup: 0.0,
            ..ModelConfig::default()
        },
        ModelConfig {
            k_het: -1.0,
            ..ModelConfig::default()
        },
        ModelConfig {
            big_m: Some(2.0),
            ..ModelConfig::default()
        },
    ] {
        assert!(matches!(
            build_model(&net, &cat, &cfg),
            Err(ModelError::InvalidConfig(_))
        ));
    }
}
