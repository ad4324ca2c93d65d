//! LP and MILP solving for [`TimeExpandedModel`]s: a two-phase primal simplex
//! on a dense tableau, best-first branch-and-bound on the integer columns, and
//! a free-format MPS export for checking results with other solvers.

mod bnb;
mod mps;
mod simplex;

use std::fmt;

use crate::formulation::{Relation, TimeExpandedModel, VarIndex};

pub use bnb::solve_integer_program;
pub use mps::{export_lp_text, export_model_text};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Allowed violation of a row or bound.
    pub feasibility: f64,
    /// Distance from the nearest integer still treated as integral.
    pub integrality: f64,
    /// Relative gap at which branch-and-bound stops.
    pub mip_gap: f64,
    /// Simplex pivots per LP solve.
    pub max_iterations: usize,
    /// Branch-and-bound nodes.
    pub max_nodes: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            feasibility: 1e-7,
            integrality: 1e-6,
            mip_gap: 1e-6,
            max_iterations: 500_000,
            max_nodes: 100_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::IterationLimit => "iteration_limit",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub nodes: usize,
    /// Relative gap between incumbent and best bound; zero for a plain LP.
    pub gap: f64,
    /// Objective bound from the final basis (LP) or the open nodes (MILP).
    pub dual_bound: f64,
    /// `(node, objective)` each time branch-and-bound found a better solution.
    pub incumbents: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Primary objective of `values`; NaN when no solution is known.
    pub objective: f64,
    /// One value per column; empty when no solution is known.
    pub values: Vec<f64>,
    /// One left-hand side per row.
    pub activities: Vec<f64>,
    pub stats: SolveStats,
}

impl SolveResult {
    pub fn has_solution(&self) -> bool {
        !self.values.is_empty()
    }

    pub(crate) fn without_solution(status: SolveStatus, stats: SolveStats) -> Self {
        Self {
            status,
            objective: f64::NAN,
            values: Vec::new(),
            activities: Vec::new(),
            stats,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpRow {
    pub terms: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// Minimize `objective . x + objective_offset` subject to rows and column
/// bounds. Column `j` stands for model variable `columns[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardFormLP {
    pub objective: Vec<f64>,
    pub objective_offset: f64,
    pub rows: Vec<LpRow>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub integer: Vec<bool>,
    /// Optional second objective, minimized over the optimal face of the first.
    pub secondary: Option<Vec<f64>>,
    pub columns: Vec<VarIndex>,
    pub column_names: Vec<String>,
    pub row_names: Vec<String>,
}

impl StandardFormLP {
    /// `n` non-negative continuous columns with the given costs and no rows.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            objective_offset: 0.0,
            rows: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
            integer: vec![false; n],
            secondary: None,
            columns: (0..n).map(VarIndex).collect(),
            column_names: (0..n).map(|j| format!("x{}", j + 1)).collect(),
            row_names: Vec::new(),
        }
    }

    pub fn add_row(&mut self, terms: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> &mut Self {
        self.row_names.push(format!("c{}", self.rows.len() + 1));
        self.rows.push(LpRow {
            terms,
            relation,
            rhs,
        });
        self
    }

    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) -> &mut Self {
        self.lower[j] = lower;
        self.upper[j] = upper;
        self
    }

    pub fn set_integer(&mut self, j: usize, integer: bool) -> &mut Self {
        self.integer[j] = integer;
        self
    }

    pub fn from_model(model: &TimeExpandedModel) -> Self {
        let vars = model.variables();
        let n = vars.len();
        let mut objective = vec![0.0; n];
        for &(v, c) in model.objective() {
            objective[v.0] += c;
        }
        let secondary = (!model.tiebreak().is_empty()).then(|| {
            let mut s = vec![0.0; n];
            for &(v, c) in model.tiebreak() {
                s[v.0] += c;
            }
            s
        });
        Self {
            objective,
            objective_offset: 0.0,
            rows: model
                .constraints()
                .iter()
                .map(|c| LpRow {
                    terms: c.terms.iter().map(|&(v, a)| (v.0, a)).collect(),
                    relation: c.relation,
                    rhs: c.rhs,
                })
                .collect(),
            lower: vars.iter().map(|v| v.lower).collect(),
            upper: vars.iter().map(|v| v.upper).collect(),
            integer: vars.iter().map(|v| v.integer).collect(),
            secondary,
            columns: (0..n).map(VarIndex).collect(),
            column_names: vars.iter().map(|v| v.name.clone()).collect(),
            row_names: model.constraints().iter().map(|c| c.name.clone()).collect(),
        }
    }

    pub fn num_columns(&self) -> usize {
        self.objective.len()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective_offset
            + self
                .objective
                .iter()
                .zip(x)
                .map(|(c, v)| c * v)
                .sum::<f64>()
    }

    pub fn activities(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.terms.iter().map(|&(j, a)| a * x[j]).sum())
            .collect()
    }

    /// Largest violation of any row or bound by `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, &v) in x.iter().enumerate() {
            worst = worst.max(self.lower[j] - v).max(v - self.upper[j]);
        }
        for (row, act) in self.rows.iter().zip(self.activities(x)) {
            let viol = match row.relation {
                Relation::Le => act - row.rhs,
                Relation::Ge => row.rhs - act,
                Relation::Eq => (act - row.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }
}

/// Solves the continuous relaxation of `lp`, then the secondary objective (if
/// any) over its optimal face.
pub fn solve_lp(lp: &StandardFormLP, tolerances: &Tolerances) -> SolveResult {
    let out = simplex::solve(
        lp,
        &lp.lower,
        &lp.upper,
        lp.secondary.as_deref(),
        tolerances,
    );
    out.into_result(lp)
}

/// Solves the model as a mixed-integer program. Without integer columns this
/// is a single LP solve.
pub fn solve_mip(model: &TimeExpandedModel, tolerances: &Tolerances) -> SolveResult {
    let lp = StandardFormLP::from_model(model);
    solve_integer_program(&lp, tolerances)
}

#[cfg(test)]
mod tests;
