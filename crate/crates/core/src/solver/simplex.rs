//! Two-phase primal simplex on a dense tableau.
//!
//! Before the tableau is built, singleton rows become bounds, rows whose
//! extreme activity meets the right-hand side fix their columns, and fixed or
//! unused columns are removed. The remaining columns are shifted to `x >= 0`
//! (free columns are split), finite upper bounds become rows, and every row
//! gets a unit column: its slack for `<=` rows, an artificial otherwise.
//! Artificial columns stay in the tableau after phase one so that the basis
//! inverse and the row duals can be read off it.

use super::{SolveResult, SolveStats, SolveStatus, StandardFormLP, Tolerances};
use crate::formulation::Relation;

const PIVOT_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const DROP_TOL: f64 = 1e-14;
const DEGENERATE_RUN: usize = 50;

#[derive(Debug, Clone)]
pub(crate) struct LpOutcome {
    pub status: SolveStatus,
    pub values: Vec<f64>,
    pub objective: f64,
    pub dual_bound: f64,
    pub iterations: usize,
}

impl LpOutcome {
    fn failed(status: SolveStatus, iterations: usize) -> Self {
        Self {
            status,
            values: Vec::new(),
            objective: f64::NAN,
            dual_bound: f64::NAN,
            iterations,
        }
    }

    pub fn into_result(self, lp: &StandardFormLP) -> SolveResult {
        let stats = SolveStats {
            iterations: self.iterations,
            nodes: 0,
            gap: 0.0,
            dual_bound: self.dual_bound,
            incumbents: Vec::new(),
        };
        if self.values.is_empty() {
            return SolveResult::without_solution(self.status, stats);
        }
        SolveResult {
            status: self.status,
            objective: lp.objective_value(&self.values),
            activities: lp.activities(&self.values),
            values: self.values,
            stats,
        }
    }
}

/// Column bounds after presolve, or the reason the LP is infeasible.
struct Presolved {
    lower: Vec<f64>,
    upper: Vec<f64>,
    live_rows: Vec<usize>,
}

fn is_fixed(lo: f64, hi: f64) -> bool {
    lo == hi
}

fn presolve(lp: &StandardFormLP, lower: &[f64], upper: &[f64], feas: f64) -> Option<Presolved> {
    let mut lo = lower.to_vec();
    let mut hi = upper.to_vec();
    for j in 0..lo.len() {
        if lo[j] > hi[j] + feas {
            return None;
        }
        if lo[j] > hi[j] {
            hi[j] = lo[j];
        }
    }
    let mut alive = vec![true; lp.rows.len()];
    let mut live: Vec<(usize, f64)> = Vec::new();
    loop {
        let mut changed = false;
        for (i, row) in lp.rows.iter().enumerate() {
            if !alive[i] {
                continue;
            }
            live.clear();
            let mut rhs = row.rhs;
            for &(j, a) in &row.terms {
                if a == 0.0 {
                    continue;
                }
                if is_fixed(lo[j], hi[j]) {
                    rhs -= a * lo[j];
                } else {
                    live.push((j, a));
                }
            }
            let scale = 1.0 + rhs.abs();
            match live.len() {
                0 => {
                    let ok = match row.relation {
                        Relation::Le => rhs >= -feas * scale,
                        Relation::Ge => rhs <= feas * scale,
                        Relation::Eq => rhs.abs() <= feas * scale,
                    };
                    if !ok {
                        return None;
                    }
                    alive[i] = false;
                    changed = true;
                }
                1 => {
                    let (j, a) = live[0];
                    let b = rhs / a;
                    let rel = if a > 0.0 {
                        row.relation
                    } else {
                        flip(row.relation)
                    };
                    if matches!(rel, Relation::Le | Relation::Eq) && b < hi[j] {
                        hi[j] = b;
                    }
                    if matches!(rel, Relation::Ge | Relation::Eq) && b > lo[j] {
                        lo[j] = b;
                    }
                    if lo[j] > hi[j] + feas * (1.0 + b.abs()) {
                        return None;
                    }
                    if hi[j] - lo[j] <= 1e-9 * (1.0 + lo[j].abs()) {
                        // snap to whichever end the row pins, keeping integers clean
                        let v = if rel == Relation::Eq {
                            b
                        } else {
                            lo[j].max(hi[j].min(b))
                        };
                        let v = if (v - v.round()).abs() < 1e-12 {
                            v.round()
                        } else {
                            v
                        };
                        lo[j] = v;
                        hi[j] = v;
                    }
                    alive[i] = false;
                    changed = true;
                }
                _ => {
                    let (mut min_act, mut max_act) = (0.0, 0.0);
                    for &(j, a) in &live {
                        if a > 0.0 {
                            min_act += a * lo[j];
                            max_act += a * hi[j];
                        } else {
                            min_act += a * hi[j];
                            max_act += a * lo[j];
                        }
                    }
                    let le = matches!(row.relation, Relation::Le | Relation::Eq);
                    let ge = matches!(row.relation, Relation::Ge | Relation::Eq);
                    if (le && min_act > rhs + feas * scale) || (ge && max_act < rhs - feas * scale)
                    {
                        return None;
                    }
                    let force_min = le && min_act.is_finite() && min_act >= rhs - 1e-12 * scale;
                    let force_max = ge && max_act.is_finite() && max_act <= rhs + 1e-12 * scale;
                    if force_min || force_max {
                        for &(j, a) in &live {
                            let v = if (a > 0.0) == force_min { lo[j] } else { hi[j] };
                            lo[j] = v;
                            hi[j] = v;
                        }
                        alive[i] = false;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    Some(Presolved {
        lower: lo,
        upper: hi,
        live_rows: (0..lp.rows.len()).filter(|&i| alive[i]).collect(),
    })
}

fn flip(r: Relation) -> Relation {
    match r {
        Relation::Le => Relation::Ge,
        Relation::Ge => Relation::Le,
        Relation::Eq => Relation::Eq,
    }
}

type InternalRow = (Vec<(usize, f64)>, Relation, f64);

/// One tableau column in terms of an original column: `x_j = offset + sign * x'`.
#[derive(Debug, Clone, Copy)]
struct ColMap {
    source: usize,
    sign: f64,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    /// Phase-one, primary and (optionally) secondary reduced-cost rows; the
    /// last entry holds minus the objective value.
    objs: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
    /// Columns that may never enter the basis.
    barred: Vec<bool>,
}

enum Phase {
    Optimal,
    Unbounded,
    Limit,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.width]
    }

    fn pivot(&mut self, p: usize, q: usize) {
        let inv = 1.0 / self.rows[p][q];
        let mut nz: Vec<(usize, f64)> = Vec::new();
        {
            let row = &mut self.rows[p];
            for (j, v) in row.iter_mut().enumerate() {
                if *v != 0.0 {
                    *v *= inv;
                    if v.abs() < DROP_TOL {
                        *v = 0.0;
                    } else {
                        nz.push((j, *v));
                    }
                }
            }
            row[q] = 1.0;
        }
        let update = |row: &mut Vec<f64>| {
            let f = row[q];
            if f == 0.0 {
                return;
            }
            for &(j, a) in &nz {
                let v = row[j] - f * a;
                row[j] = if v.abs() < DROP_TOL { 0.0 } else { v };
            }
            row[q] = 0.0;
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != p {
                update(row);
            }
        }
        for row in &mut self.objs {
            update(row);
        }
        self.basis[p] = q;
    }

    /// Primal simplex on objective row `obj`. When `face` is set, columns with
    /// a positive reduced cost in that row are kept out of the basis.
    fn optimize(
        &mut self,
        obj: usize,
        face: Option<usize>,
        iters: &mut usize,
        limit: usize,
    ) -> Phase {
        let mut degenerate = 0usize;
        let mut bland = false;
        loop {
            let d = &self.objs[obj];
            let mut enter = None;
            let mut best = -DUAL_TOL;
            for j in 0..self.width {
                if self.barred[j] || d[j] >= -DUAL_TOL {
                    continue;
                }
                if let Some(f) = face {
                    if self.objs[f][j] > DUAL_TOL {
                        continue;
                    }
                }
                if bland {
                    enter = Some(j);
                    break;
                }
                if d[j] < best {
                    best = d[j];
                    enter = Some(j);
                }
            }
            let Some(q) = enter else {
                return Phase::Optimal;
            };
            if *iters >= limit {
                return Phase::Limit;
            }

            let mut leave: Option<(usize, f64, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = row[q];
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = row[self.width].max(0.0) / a;
                leave = match leave {
                    None => Some((i, ratio, a)),
                    Some((pi, pr, pa)) => {
                        let tie = (ratio - pr).abs() <= 1e-12 * (1.0 + pr.abs());
                        let better = if tie {
                            if bland {
                                self.basis[i] < self.basis[pi]
                            } else {
                                a > pa
                            }
                        } else {
                            ratio < pr
                        };
                        if better {
                            Some((i, ratio, a))
                        } else {
                            Some((pi, pr, pa))
                        }
                    }
                };
            }
            let Some((p, ratio, _)) = leave else {
                return Phase::Unbounded;
            };
            if ratio <= 1e-12 {
                degenerate += 1;
                if degenerate > DEGENERATE_RUN {
                    bland = true;
                }
            } else {
                degenerate = 0;
                bland = false;
            }
            self.pivot(p, q);
            *iters += 1;
        }
    }
}

/// Solves `lp` with the given column bounds. With `secondary`, the result is
/// the optimum of that objective over the optimal face of the primary one.
pub(crate) fn solve(
    lp: &StandardFormLP,
    lower: &[f64],
    upper: &[f64],
    secondary: Option<&[f64]>,
    tol: &Tolerances,
) -> LpOutcome {
    let n = lp.num_columns();
    let feas = tol.feasibility;
    let Some(pre) = presolve(lp, lower, upper, feas) else {
        return LpOutcome::failed(SolveStatus::Infeasible, 0);
    };
    let (lo, hi) = (&pre.lower, &pre.upper);

    let mut in_rows = vec![false; n];
    for &i in &pre.live_rows {
        for &(j, a) in &lp.rows[i].terms {
            if a != 0.0 && !is_fixed(lo[j], hi[j]) {
                in_rows[j] = true;
            }
        }
    }

    // Columns outside every live row go to their cheapest bound.
    let mut value = vec![0.0; n];
    let mut offset = vec![0.0; n];
    let mut maps: Vec<ColMap> = Vec::new();
    let mut upper_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        if is_fixed(lo[j], hi[j]) {
            value[j] = lo[j];
            continue;
        }
        if !in_rows[j] {
            let c = lp.objective[j];
            let c2 = secondary.map_or(0.0, |s| s[j]);
            let dir = if c != 0.0 { c } else { c2 };
            let v = if dir > 0.0 {
                lo[j]
            } else if dir < 0.0 {
                hi[j]
            } else if lo[j].is_finite() {
                lo[j]
            } else if hi[j].is_finite() {
                hi[j]
            } else {
                0.0
            };
            if !v.is_finite() {
                if c != 0.0 {
                    return LpOutcome::failed(SolveStatus::Unbounded, 0);
                }
                // only the secondary objective is unbounded; stay at zero
                value[j] = lo[j].max(hi[j].min(0.0));
                continue;
            }
            value[j] = v;
            continue;
        }
        if lo[j].is_finite() {
            offset[j] = lo[j];
            if hi[j].is_finite() {
                upper_rows.push((maps.len(), hi[j] - lo[j]));
            }
            maps.push(ColMap {
                source: j,
                sign: 1.0,
            });
        } else if hi[j].is_finite() {
            offset[j] = hi[j];
            maps.push(ColMap {
                source: j,
                sign: -1.0,
            });
        } else {
            maps.push(ColMap {
                source: j,
                sign: 1.0,
            });
            maps.push(ColMap {
                source: j,
                sign: -1.0,
            });
        }
    }
    let mut first_map = vec![usize::MAX; n];
    for (k, m) in maps.iter().enumerate().rev() {
        first_map[m.source] = k;
    }

    // Internal rows over the mapped columns, right-hand sides made non-negative.
    let nstruct = maps.len();
    let mut int_rows: Vec<InternalRow> = Vec::new();
    for &i in &pre.live_rows {
        let row = &lp.rows[i];
        let mut rhs = row.rhs;
        let mut terms = Vec::new();
        for &(j, a) in &row.terms {
            if a == 0.0 {
                continue;
            }
            if !in_rows[j] || is_fixed(lo[j], hi[j]) {
                rhs -= a * value[j];
                continue;
            }
            rhs -= a * offset[j];
            let k = first_map[j];
            terms.push((k, a * maps[k].sign));
            if k + 1 < nstruct && maps[k + 1].source == j {
                terms.push((k + 1, -a * maps[k].sign));
            }
        }
        int_rows.push((terms, row.relation, rhs));
    }
    for &(k, u) in &upper_rows {
        int_rows.push((vec![(k, 1.0)], Relation::Le, u));
    }
    for (terms, rel, rhs) in &mut int_rows {
        if *rhs < 0.0 {
            *rhs = -*rhs;
            *rel = flip(*rel);
            for t in terms.iter_mut() {
                t.1 = -t.1;
            }
        }
    }

    let m = int_rows.len();
    let n_slack = int_rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let n_art = int_rows.iter().filter(|r| r.1 != Relation::Le).count();
    let width = nstruct + n_slack + n_art;
    let mut rows = vec![vec![0.0; width + 1]; m];
    let mut basis = vec![0; m];
    let mut unit = vec![0; m];
    let mut barred = vec![false; width];
    let (mut s, mut a) = (nstruct, nstruct + n_slack);
    let mut sparse_rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(m);
    for (i, (terms, rel, rhs)) in int_rows.iter().enumerate() {
        let mut sp = terms.clone();
        for &(k, v) in terms {
            rows[i][k] += v;
        }
        match rel {
            Relation::Le => {
                rows[i][s] = 1.0;
                sp.push((s, 1.0));
                unit[i] = s;
                s += 1;
            }
            Relation::Ge => {
                rows[i][s] = -1.0;
                sp.push((s, -1.0));
                s += 1;
            }
            Relation::Eq => {}
        }
        if *rel != Relation::Le {
            rows[i][a] = 1.0;
            sp.push((a, 1.0));
            unit[i] = a;
            barred[a] = true;
            a += 1;
        }
        basis[i] = unit[i];
        rows[i][width] = *rhs;
        sparse_rows.push(sp);
    }

    // Objective rows: phase one, primary, secondary.
    let mut const_primary = lp.objective_offset;
    for j in 0..n {
        let base = if !in_rows[j] || is_fixed(lo[j], hi[j]) {
            value[j]
        } else {
            offset[j]
        };
        const_primary += lp.objective[j] * base;
    }
    let mut phase1 = vec![0.0; width + 1];
    for i in 0..m {
        if barred[unit[i]] {
            for (p, v) in phase1.iter_mut().zip(&rows[i]) {
                *p -= v;
            }
            phase1[unit[i]] = 0.0;
        }
    }
    let mut primary = vec![0.0; width + 1];
    let mut second = vec![0.0; width + 1];
    for (k, map) in maps.iter().enumerate() {
        primary[k] = lp.objective[map.source] * map.sign;
        if let Some(sec) = secondary {
            second[k] = sec[map.source] * map.sign;
        }
    }
    let mut objs = vec![phase1, primary];
    if secondary.is_some() {
        objs.push(second);
    }

    let mut tab = Tableau {
        rows,
        objs,
        basis,
        width,
        barred,
    };
    let mut iters = 0usize;
    let limit = tol.max_iterations;

    if n_art > 0 {
        match tab.optimize(0, None, &mut iters, limit) {
            Phase::Optimal => {}
            Phase::Limit => return LpOutcome::failed(SolveStatus::IterationLimit, iters),
            Phase::Unbounded => unreachable!("phase one is bounded below by zero"),
        }
        let bnorm = int_rows.iter().fold(1.0f64, |acc, r| acc.max(r.2));
        if -tab.objs[0][width] > feas * bnorm {
            return LpOutcome::failed(SolveStatus::Infeasible, iters);
        }
        // Pivot remaining zero-level artificials out where possible.
        for i in 0..m {
            if !tab.barred[tab.basis[i]] {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for j in 0..nstruct + n_slack {
                let v = tab.rows[i][j].abs();
                if v > PIVOT_TOL && best.is_none_or(|(_, bv)| v > bv) {
                    best = Some((j, v));
                }
            }
            if let Some((j, _)) = best {
                tab.pivot(i, j);
            }
        }
    }

    match tab.optimize(1, None, &mut iters, limit) {
        Phase::Optimal => {}
        Phase::Unbounded => return LpOutcome::failed(SolveStatus::Unbounded, iters),
        Phase::Limit => return LpOutcome::failed(SolveStatus::IterationLimit, iters),
    }
    if secondary.is_some() {
        match tab.optimize(2, Some(1), &mut iters, limit) {
            Phase::Optimal => {}
            // The secondary objective is a tie-break only; keep the primary
            // optimum if it cannot be completed.
            Phase::Unbounded | Phase::Limit => {}
        }
    }

    // Basic values from the tableau, refined against the original rows with
    // the basis inverse held in the unit columns.
    let mut x = vec![0.0; width];
    for i in 0..m {
        x[tab.basis[i]] = tab.rhs(i);
    }
    for _ in 0..2 {
        let r: Vec<f64> = int_rows
            .iter()
            .zip(&sparse_rows)
            .map(|(row, sp)| row.2 - sp.iter().map(|&(k, v)| v * x[k]).sum::<f64>())
            .collect();
        if r.iter().all(|v| v.abs() < 1e-15) {
            break;
        }
        for i in 0..m {
            let row = &tab.rows[i];
            let delta: f64 = (0..m)
                .filter(|&k| r[k] != 0.0)
                .map(|k| row[unit[k]] * r[k])
                .sum();
            x[tab.basis[i]] += delta;
        }
    }
    for v in &mut x {
        if v.abs() < 1e-11 {
            *v = 0.0;
        }
    }

    for (k, map) in maps.iter().enumerate() {
        let j = map.source;
        if first_map[j] == k {
            value[j] = offset[j];
        }
        value[j] += map.sign * x[k];
    }
    for v in value.iter_mut() {
        let r = v.round();
        if (*v - r).abs() < 1e-11 {
            *v = r;
        }
    }

    let dual_bound = const_primary
        + (0..m)
            .map(|i| -tab.objs[1][unit[i]] * int_rows[i].2)
            .sum::<f64>();
    LpOutcome {
        status: SolveStatus::Optimal,
        objective: lp.objective_value(&value),
        values: value,
        dual_bound,
        iterations: iters,
    }
}
