//! Python bindings: load scenarios, apply capacity restrictions, solve, and
//! read the reports back as plain Python values.

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use railcap::solver::solve_integer_program;
use railcap::{
    export_model_text, CapacityMode, Relation, RunOptions, ScenarioError, StandardFormLP,
    TcrOverride, Tolerances,
};

fn scenario_err(e: ScenarioError) -> PyErr {
    match e {
        ScenarioError::Solve { .. } => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// A validated scenario.
#[pyclass(module = "railcap", frozen)]
struct Scenario {
    inner: railcap::Scenario,
}

#[pymethods]
impl Scenario {
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        railcap::load_scenario_file(path)
            .map(|inner| Self { inner })
            .map_err(scenario_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        railcap::load_scenario(text.as_bytes())
            .map(|inner| Self { inner })
            .map_err(scenario_err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_owned()
    }

    #[getter]
    fn periods(&self) -> usize {
        self.inner.network.horizon().t_max()
    }

    #[getter]
    fn nodes(&self) -> Vec<String> {
        self.inner
            .network
            .nodes()
            .iter()
            .map(|n| n.name.clone())
            .collect()
    }

    #[getter]
    fn links(&self) -> Vec<String> {
        self.inner
            .network
            .links()
            .iter()
            .map(|l| l.name.clone())
            .collect()
    }

    #[getter]
    fn routes(&self) -> Vec<String> {
        self.inner
            .catalog
            .routes()
            .iter()
            .map(|r| r.name.clone())
            .collect()
    }

    #[getter]
    fn demands(&self) -> Vec<String> {
        self.inner
            .catalog
            .demands()
            .iter()
            .map(|d| d.name.clone())
            .collect()
    }

    /// Nominal capacity of `link` in period `t` (1-based).
    fn capacity(&self, link: &str, t: usize) -> PyResult<f64> {
        let l = self
            .inner
            .network
            .link_by_name(link)
            .ok_or_else(|| PyValueError::new_err(format!("unknown link {link:?}")))?;
        if !self.inner.network.horizon().contains(t) {
            return Err(PyValueError::new_err(format!(
                "period {t} outside the horizon"
            )));
        }
        Ok(self.inner.network.nominal_capacity(l, t))
    }

    /// Returns a copy with a restriction on `link`: a new `capacity`, or the
    /// current one times `scale`, in `period` or in every period.
    #[pyo3(signature = (link, period=None, capacity=None, scale=None))]
    fn restrict(
        &self,
        link: &str,
        period: Option<usize>,
        capacity: Option<f64>,
        scale: Option<f64>,
    ) -> PyResult<Self> {
        let o = TcrOverride {
            link: link.to_owned(),
            period,
            capacity,
            scale,
        };
        railcap::apply_tcr(&self.inner, &[o])
            .map(|inner| Self { inner })
            .map_err(scenario_err)
    }

    /// Builds and solves the model. Raises RuntimeError unless optimal.
    #[pyo3(signature = (capacity_mode=None, relax_integrality=None, export_lp=None))]
    fn solve(
        &self,
        py: Python<'_>,
        capacity_mode: Option<&str>,
        relax_integrality: Option<bool>,
        export_lp: Option<PathBuf>,
    ) -> PyResult<Solution> {
        let capacity_mode = capacity_mode
            .map(|m| m.parse::<CapacityMode>().map_err(PyValueError::new_err))
            .transpose()?;
        let options = RunOptions {
            capacity_mode,
            relax_integrality,
            export_lp,
            ..RunOptions::default()
        };
        let scenario = &self.inner;
        let outcome = py
            .detach(|| railcap::run(scenario, &options))
            .map_err(scenario_err)?;
        Ok(Solution {
            scenario: scenario.clone(),
            outcome,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario({:?}, {} links, {} routes, {} demands, {} periods)",
            self.inner.name(),
            self.inner.network.links().len(),
            self.inner.catalog.routes().len(),
            self.inner.catalog.demands().len(),
            self.periods()
        )
    }
}

/// An optimal solution with its reports.
#[pyclass(module = "railcap", frozen)]
struct Solution {
    scenario: railcap::Scenario,
    outcome: railcap::RunOutcome,
}

#[pymethods]
impl Solution {
    #[getter]
    fn status(&self) -> &'static str {
        self.outcome.result.status.as_str()
    }

    #[getter]
    fn objective(&self) -> f64 {
        self.outcome.result.objective
    }

    #[getter]
    fn capacity_mode(&self) -> &'static str {
        self.outcome.config.capacity_mode.as_str()
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.outcome.result.stats.iterations
    }

    #[getter]
    fn nodes(&self) -> usize {
        self.outcome.result.stats.nodes
    }

    #[getter]
    fn seconds(&self) -> f64 {
        self.outcome.elapsed.as_secs_f64()
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.outcome.model.warnings().to_vec()
    }

    /// Value of the variable with this display name, e.g. `dep[r=E-F-p2,t=4]`.
    fn value(&self, name: &str) -> PyResult<f64> {
        let i = self
            .outcome
            .model
            .variable_by_name(name)
            .ok_or_else(|| PyValueError::new_err(format!("unknown variable {name:?}")))?;
        Ok(self.outcome.result.values[i.0])
    }

    /// Used capacity per link, one value per period.
    fn capacity_usage<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        for link in &self.outcome.capacity.links {
            d.set_item(&link.name, link.used.clone())?;
        }
        Ok(d)
    }

    /// Per demand: volume, departures per route, postponed, canceled and the
    /// cancellation total.
    fn demand_outcome<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let out = PyDict::new(py);
        for o in &self.outcome.demand.demands {
            let d = PyDict::new(py);
            d.set_item("volume", o.volume)?;
            let deps = PyDict::new(py);
            for (route, values) in &o.departures {
                deps.set_item(route, values.clone())?;
            }
            d.set_item("departures", deps)?;
            d.set_item("postponed", o.postponed.clone())?;
            d.set_item("canceled", o.canceled.clone())?;
            d.set_item("cancel_total", o.cancel_total)?;
            out.set_item(&o.demand, d)?;
        }
        Ok(out)
    }

    fn capacity_csv(&self) -> String {
        self.outcome.capacity.to_csv()
    }

    fn demand_csv(&self) -> String {
        self.outcome.demand.to_csv()
    }

    /// The solved model in MPS format.
    fn model_mps(&self) -> String {
        export_model_text(&self.outcome.model)
    }

    fn __repr__(&self) -> String {
        format!(
            "Solution({:?}, status={}, objective={:.6})",
            self.scenario.name(),
            self.status(),
            self.objective()
        )
    }
}

fn relation(s: &str) -> PyResult<Relation> {
    match s {
        "<=" => Ok(Relation::Le),
        ">=" => Ok(Relation::Ge),
        "=" | "==" => Ok(Relation::Eq),
        other => Err(PyValueError::new_err(format!("unknown relation {other:?}"))),
    }
}

/// Minimizes `c @ x` subject to `rows`, each `(coefficients, relation, rhs)`
/// with relation one of `<=`, `>=`, `=`. Columns default to `x >= 0`;
/// `bounds` may give `(lower, upper)` per column (None for infinite) and
/// `integer` the columns that must be integral.
///
/// Returns a dict with `status`, `objective` and `x`.
#[pyfunction]
#[pyo3(signature = (c, rows, bounds=None, integer=None))]
fn solve_lp<'py>(
    py: Python<'py>,
    c: Vec<f64>,
    rows: Vec<(Vec<f64>, String, f64)>,
    bounds: Option<Vec<(Option<f64>, Option<f64>)>>,
    integer: Option<Vec<usize>>,
) -> PyResult<Bound<'py, PyDict>> {
    let n = c.len();
    let mut lp = StandardFormLP::new(c);
    for (k, (a, rel, b)) in rows.into_iter().enumerate() {
        if a.len() != n {
            return Err(PyValueError::new_err(format!(
                "row {k} has {} coefficients, expected {n}",
                a.len()
            )));
        }
        let terms = a
            .into_iter()
            .enumerate()
            .filter(|(_, v)| *v != 0.0)
            .collect();
        lp.add_row(terms, relation(&rel)?, b);
    }
    if let Some(bounds) = bounds {
        if bounds.len() != n {
            return Err(PyValueError::new_err("one (lower, upper) pair per column"));
        }
        for (j, (lo, hi)) in bounds.into_iter().enumerate() {
            lp.set_bounds(
                j,
                lo.unwrap_or(f64::NEG_INFINITY),
                hi.unwrap_or(f64::INFINITY),
            );
        }
    }
    for j in integer.unwrap_or_default() {
        if j >= n {
            return Err(PyValueError::new_err(format!(
                "integer column {j} out of range"
            )));
        }
        lp.set_integer(j, true);
    }
    let result = py.detach(|| solve_integer_program(&lp, &Tolerances::default()));
    let d = PyDict::new(py);
    d.set_item("status", result.status.as_str())?;
    d.set_item("objective", result.objective)?;
    d.set_item("x", result.values)?;
    Ok(d)
}

#[pymodule]
#[pyo3(name = "railcap")]
fn railcap_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Scenario>()?;
    m.add_class::<Solution>()?;
    m.add_function(wrap_pyfunction!(solve_lp, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
