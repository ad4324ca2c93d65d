use super::mps::format_number;
use super::*;
use crate::formulation::Relation::{Eq, Ge, Le};

fn tol() -> Tolerances {
    Tolerances::default()
}

#[test]
fn single_lower_bound_row() {
    let mut lp = StandardFormLP::new(vec![1.0]);
    lp.add_row(vec![(0, 1.0)], Ge, 3.0);
    let r = solve_lp(&lp, &tol());
    assert_eq!(r.status, SolveStatus::Optimal);
    assert_eq!(r.values, vec![3.0]);
    assert_eq!(r.objective, 3.0);
}

#[test]
fn simplex_vertex() {
    let mut lp = StandardFormLP::new(vec![-1.0, -1.0]);
    lp.add_row(vec![(0, 1.0), (1, 1.0)], Le, 1.0);
    let r = solve_lp(&lp, &tol());
    assert_eq!(r.status, SolveStatus::Optimal);
    assert!((r.objective + 1.0).abs() < 1e-12);
    assert!(r.values.iter().all(|v| *v == 0.0 || *v == 1.0));
}

#[test]
fn contradictory_bounds() {
    let mut lp = StandardFormLP::new(vec![0.0]);
    lp.add_row(vec![(0, 1.0)], Le, -1.0);
    assert_eq!(solve_lp(&lp, &tol()).status, SolveStatus::Infeasible);
}

#[test]
fn infeasible_system() {
    let mut lp = StandardFormLP::new(vec![1.0, 1.0]);
    lp.add_row(vec![(0, 1.0), (1, 1.0)], Ge, 3.0);
    lp.add_row(vec![(0, 1.0), (1, 2.0)], Le, 2.0);
    assert_eq!(solve_lp(&lp, &tol()).status, SolveStatus::Infeasible);
}

#[test]
fn unbounded_direction() {
    let mut lp = StandardFormLP::new(vec![-1.0, 0.0]);
    lp.add_row(vec![(0, 1.0), (1, -1.0)], Le, 1.0);
    assert_eq!(solve_lp(&lp, &tol()).status, SolveStatus::Unbounded);
}

#[test]
fn free_and_shifted_columns() {
    // min x + 2y, x free, y in [-2, 5], x + y = 1, x - y >= -4
    let mut lp = StandardFormLP::new(vec![1.0, 2.0]);
    lp.set_bounds(0, f64::NEG_INFINITY, f64::INFINITY);
    lp.set_bounds(1, -2.0, 5.0);
    lp.add_row(vec![(0, 1.0), (1, 1.0)], Eq, 1.0);
    lp.add_row(vec![(0, 1.0), (1, -1.0)], Ge, -4.0);
    let r = solve_lp(&lp, &tol());
    assert_eq!(r.status, SolveStatus::Optimal);
    assert!((r.values[0] - 3.0).abs() < 1e-9);
    assert!((r.values[1] + 2.0).abs() < 1e-9);
    assert!((r.objective + 1.0).abs() < 1e-9);
}

#[test]
fn dual_bound_matches_primal() {
    let mut lp = StandardFormLP::new(vec![2.0, 3.0, 1.0]);
    lp.add_row(vec![(0, 1.0), (1, 1.0), (2, 1.0)], Ge, 4.0);
    lp.add_row(vec![(0, 1.0), (2, -1.0)], Eq, 1.0);
    lp.add_row(vec![(1, 1.0), (2, 2.0)], Le, 5.0);
    let r = solve_lp(&lp, &tol());
    assert_eq!(r.status, SolveStatus::Optimal);
    assert!((r.objective - r.stats.dual_bound).abs() <= 1e-7);
    assert!(lp.max_violation(&r.values) <= 1e-9);
}

#[test]
fn secondary_objective_breaks_ties() {
    // x + y = 1 at cost 1 each; the secondary objective prefers y.
    let mut lp = StandardFormLP::new(vec![1.0, 1.0]);
    lp.add_row(vec![(0, 1.0), (1, 1.0)], Eq, 1.0);
    lp.secondary = Some(vec![1.0, 0.0]);
    let r = solve_lp(&lp, &tol());
    assert_eq!(r.values, vec![0.0, 1.0]);
    lp.secondary = Some(vec![0.0, 1.0]);
    let r = solve_lp(&lp, &tol());
    assert_eq!(r.values, vec![1.0, 0.0]);
}

#[test]
fn no_integer_marks_is_lp() {
    let mut lp = StandardFormLP::new(vec![-1.0, -2.0]);
    lp.add_row(vec![(0, 1.0), (1, 3.0)], Le, 4.5);
    lp.add_row(vec![(0, 1.0)], Le, 2.0);
    let a = solve_lp(&lp, &tol());
    let b = solve_integer_program(&lp, &tol());
    assert_eq!(a.values, b.values);
    assert_eq!(a.objective, b.objective);
}

#[test]
fn binary_branching() {
    // min -x - y with 2x + 2y <= 3, x binary: LP gives x = 1, y = 0.5 or
    // x = 0.5 ...; the MIP optimum is -1.5 with x = 1.
    let mut lp = StandardFormLP::new(vec![-1.0, -1.0]);
    lp.set_bounds(0, 0.0, 1.0).set_integer(0, true);
    lp.set_bounds(1, 0.0, 1.0).set_integer(1, true);
    lp.add_row(vec![(0, 2.0), (1, 2.0)], Le, 3.0);
    let r = solve_integer_program(&lp, &tol());
    assert_eq!(r.status, SolveStatus::Optimal);
    assert_eq!(r.objective, -1.0);
    assert!(r.stats.nodes >= 3);
    assert!(r.stats.gap <= 1e-6);
}

#[test]
fn incumbents_improve() {
    let mut lp = StandardFormLP::new(vec![-5.0, -4.0, -3.0]);
    for j in 0..3 {
        lp.set_bounds(j, 0.0, 3.0).set_integer(j, true);
    }
    lp.add_row(vec![(0, 2.0), (1, 3.0), (2, 1.0)], Le, 5.5);
    lp.add_row(vec![(0, 4.0), (1, 1.0), (2, 2.0)], Le, 11.3);
    lp.add_row(vec![(0, 3.0), (1, 4.0), (2, 2.0)], Le, 8.7);
    let r = solve_integer_program(&lp, &tol());
    assert_eq!(r.status, SolveStatus::Optimal);
    for w in r.stats.incumbents.windows(2) {
        assert!(w[1].1 <= w[0].1);
    }
    assert!(r.values.iter().all(|v| v.fract() == 0.0));
}

#[test]
fn node_limit_reports_gap() {
    let mut lp = StandardFormLP::new(vec![-1.0; 4]);
    for j in 0..4 {
        lp.set_bounds(j, 0.0, 1.0).set_integer(j, true);
    }
    lp.add_row((0..4).map(|j| (j, 2.0)).collect(), Le, 3.0);
    let limited = Tolerances {
        max_nodes: 1,
        ..tol()
    };
    let r = solve_integer_program(&lp, &limited);
    assert_eq!(r.status, SolveStatus::IterationLimit);
    assert!(!r.has_solution() || r.stats.gap > 0.0);
}

#[test]
fn iteration_limit() {
    let mut lp = StandardFormLP::new(vec![-1.0, -1.0]);
    lp.add_row(vec![(0, 1.0), (1, 2.0)], Le, 4.0);
    lp.add_row(vec![(0, 3.0), (1, 1.0)], Le, 6.0);
    let limited = Tolerances {
        max_iterations: 0,
        ..tol()
    };
    assert_eq!(solve_lp(&lp, &limited).status, SolveStatus::IterationLimit);
}

#[test]
fn number_format() {
    assert_eq!(format_number(0.0), "0");
    assert_eq!(format_number(0.5), "0.5");
    assert_eq!(format_number(-1000.0), "-1000");
    assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
    assert_eq!(format_number(2.5e-9), "2.5e-9");
}

#[test]
fn export_empty_and_stable() {
    let lp = StandardFormLP::new(Vec::new());
    assert_eq!(
        export_lp_text(&lp),
        "NAME railcap\nROWS\n N  obj\nCOLUMNS\nRHS\nBOUNDS\nENDATA\n"
    );
    let mut lp = StandardFormLP::new(vec![1.0, 0.0, 2.0]);
    lp.set_bounds(1, 0.0, 1.0).set_integer(1, true);
    lp.set_bounds(2, f64::NEG_INFINITY, f64::INFINITY);
    lp.add_row(vec![(0, 1.0), (1, -0.25)], Ge, 2.0);
    lp.column_names[0] = "a b".into();
    let text = export_lp_text(&lp);
    assert_eq!(text, export_lp_text(&lp.clone()));
    assert!(text.contains(" G  c1\n"));
    assert!(text.contains("    MARKER  'MARKER'  'INTORG'\n"));
    assert!(text.contains(" BV BND  x2\n"));
    assert!(text.contains(" FR BND  x3\n"));
    assert!(text.contains("    a_b  c1"));
}
