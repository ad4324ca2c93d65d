//! Best-first branch-and-bound on the integer columns of a [`StandardFormLP`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::simplex::{self, LpOutcome};
use super::{SolveResult, SolveStats, SolveStatus, StandardFormLP, Tolerances};

struct Node {
    id: usize,
    bound: f64,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // BinaryHeap is a max-heap: the smallest bound, then the oldest node, wins.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// Most fractional integer column, lowest index on ties.
fn branching_column(lp: &StandardFormLP, x: &[f64], tol: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (j, &v) in x.iter().enumerate() {
        if !lp.integer[j] {
            continue;
        }
        let frac = v - v.floor();
        let dist = frac.min(1.0 - frac);
        if dist <= tol {
            continue;
        }
        if best.is_none_or(|(_, d)| dist > d + 1e-12) {
            best = Some((j, dist));
        }
    }
    best.map(|b| b.0)
}

fn gap(incumbent: f64, bound: f64) -> f64 {
    ((incumbent - bound) / incumbent.abs().max(1.0)).max(0.0)
}

struct Search {
    incumbent: Option<(f64, Vec<f64>)>,
    open_bound: f64,
    limit_hit: bool,
    /// Status of the root relaxation when it is not optimal.
    root_failure: Option<SolveStatus>,
}

fn branch_and_bound(lp: &StandardFormLP, tol: &Tolerances, stats: &mut SolveStats) -> Search {
    let mut search = Search {
        incumbent: None,
        open_bound: f64::INFINITY,
        limit_hit: false,
        root_failure: None,
    };
    let root = simplex::solve(lp, &lp.lower, &lp.upper, None, tol);
    stats.iterations += root.iterations;
    stats.nodes += 1;
    if root.status != SolveStatus::Optimal {
        search.root_failure = Some(root.status);
        return search;
    }

    let mut heap = BinaryHeap::new();
    let mut next_id = 1usize;
    let mut pending: Option<LpOutcome> = Some(root);
    heap.push(Node {
        id: 0,
        bound: f64::NEG_INFINITY,
        lower: lp.lower.clone(),
        upper: lp.upper.clone(),
    });
    let mut nodes = 1usize;

    while let Some(node) = heap.pop() {
        if let Some((best, _)) = &search.incumbent {
            if node.bound >= best - tol.mip_gap * best.abs().max(1.0) {
                // best-first: every remaining node is at least as bad
                heap.clear();
                break;
            }
        }
        let out = match pending.take() {
            Some(out) => out,
            None => {
                if nodes >= tol.max_nodes {
                    heap.push(node);
                    search.limit_hit = true;
                    break;
                }
                nodes += 1;
                stats.nodes += 1;
                let out = simplex::solve(lp, &node.lower, &node.upper, None, tol);
                stats.iterations += out.iterations;
                out
            }
        };
        match out.status {
            SolveStatus::Optimal => {}
            SolveStatus::Infeasible => continue,
            SolveStatus::Unbounded | SolveStatus::IterationLimit => {
                heap.push(node);
                search.limit_hit = true;
                break;
            }
        }
        if let Some((best, _)) = &search.incumbent {
            if out.objective >= best - tol.mip_gap * best.abs().max(1.0) {
                continue;
            }
        }
        match branching_column(lp, &out.values, tol.integrality) {
            None => {
                stats.incumbents.push((stats.nodes, out.objective));
                search.incumbent = Some((out.objective, out.values));
            }
            Some(j) => {
                let v = out.values[j];
                let mut down = Node {
                    id: next_id,
                    bound: out.objective,
                    lower: node.lower.clone(),
                    upper: node.upper.clone(),
                };
                down.upper[j] = v.floor();
                let mut up = Node {
                    id: next_id + 1,
                    bound: out.objective,
                    lower: node.lower,
                    upper: node.upper,
                };
                up.lower[j] = v.ceil();
                next_id += 2;
                heap.push(down);
                heap.push(up);
            }
        }
    }
    search.open_bound = heap.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
    search
}

/// Relative slack on the primary objective while the secondary one picks the
/// integer part of the solution.
const FACE_SLACK: f64 = 1e-7;

/// Solves `lp` honouring its integer marks. The returned solution has every
/// integer column at an exact integer.
///
/// With a secondary objective, a second search minimizes it over integer
/// solutions whose primary objective is within a relative `1e-7` of the
/// optimum; the continuous part is then re-solved lexicographically with the
/// chosen integers fixed.
pub fn solve_integer_program(lp: &StandardFormLP, tol: &Tolerances) -> SolveResult {
    if !lp.integer.iter().any(|&b| b) {
        return super::solve_lp(lp, tol);
    }
    let mut stats = SolveStats::default();
    let mut plain = lp.clone();
    plain.secondary = None;
    let search = branch_and_bound(&plain, tol, &mut stats);
    if let Some(status) = search.root_failure {
        stats.dual_bound = f64::NAN;
        return SolveResult::without_solution(status, stats);
    }
    let Some((best, mut x)) = search.incumbent else {
        stats.dual_bound = search.open_bound;
        let status = if search.limit_hit {
            SolveStatus::IterationLimit
        } else {
            SolveStatus::Infeasible
        };
        return SolveResult::without_solution(status, stats);
    };
    stats.dual_bound = search.open_bound.min(best);
    stats.gap = gap(best, stats.dual_bound);

    if let (Some(sec), false) = (&lp.secondary, search.limit_hit) {
        let mut face = plain.clone();
        face.objective = sec.clone();
        face.objective_offset = 0.0;
        let terms = lp
            .objective
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(j, &c)| (j, c))
            .collect();
        face.add_row(
            terms,
            crate::formulation::Relation::Le,
            best - lp.objective_offset + FACE_SLACK * best.abs().max(1.0),
        );
        let mut inner = SolveStats::default();
        let second = branch_and_bound(&face, tol, &mut inner);
        stats.iterations += inner.iterations;
        stats.nodes += inner.nodes;
        if let (Some((_, y)), false) = (second.incumbent, second.limit_hit) {
            x = y;
        }
    }

    // Integer columns pinned to their rounded values, continuous part
    // re-solved (with the secondary objective when present).
    let mut lower = lp.lower.clone();
    let mut upper = lp.upper.clone();
    for j in 0..lp.num_columns() {
        if lp.integer[j] {
            lower[j] = x[j].round();
            upper[j] = x[j].round();
        }
    }
    let polished = simplex::solve(lp, &lower, &upper, lp.secondary.as_deref(), tol);
    stats.iterations += polished.iterations;
    let values = if polished.status == SolveStatus::Optimal {
        polished.values
    } else {
        for (v, &int) in x.iter_mut().zip(&lp.integer) {
            if int {
                *v = v.round();
            }
        }
        x
    };
    let status = if search.limit_hit {
        SolveStatus::IterationLimit
    } else {
        SolveStatus::Optimal
    };
    SolveResult {
        status,
        objective: lp.objective_value(&values),
        activities: lp.activities(&values),
        values,
        stats,
    }
}
