//! Free-format MPS export.

use std::fmt::Write;

use super::StandardFormLP;
use crate::formulation::{Relation, TimeExpandedModel};

const NUM_WIDTH: usize = 20;

/// Twelve significant digits, shortest form, no exponent for ordinary
/// magnitudes.
pub(crate) fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    let mag = rounded.abs();
    if (1e-6..1e15).contains(&mag) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

fn clean(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_whitespace() { '_' } else { c })
        .collect()
}

fn num(x: f64) -> String {
    format!("{:>NUM_WIDTH$}", format_number(x))
}

/// The model as a free-format MPS document. Output depends only on the model,
/// so exporting the same model twice gives identical bytes.
pub fn export_model_text(model: &TimeExpandedModel) -> String {
    export_lp_text(&StandardFormLP::from_model(model))
}

pub fn export_lp_text(lp: &StandardFormLP) -> String {
    let n = lp.num_columns();
    let cols: Vec<String> = lp.column_names.iter().map(|s| clean(s)).collect();
    let rows: Vec<String> = lp.row_names.iter().map(|s| clean(s)).collect();

    let mut by_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (i, row) in lp.rows.iter().enumerate() {
        for &(j, a) in &row.terms {
            if a != 0.0 {
                by_col[j].push((i, a));
            }
        }
    }

    let mut out = String::new();
    out.push_str("NAME railcap\nROWS\n N  obj\n");
    for (row, name) in lp.rows.iter().zip(&rows) {
        let tag = match row.relation {
            Relation::Le => 'L',
            Relation::Ge => 'G',
            Relation::Eq => 'E',
        };
        let _ = writeln!(out, " {tag}  {name}");
    }

    out.push_str("COLUMNS\n");
    let mut in_int = false;
    for j in 0..n {
        if lp.integer[j] != in_int {
            let tag = if lp.integer[j] { "INTORG" } else { "INTEND" };
            let _ = writeln!(out, "    MARKER  'MARKER'  '{tag}'");
            in_int = lp.integer[j];
        }
        let c = lp.objective[j];
        if c != 0.0 || by_col[j].is_empty() {
            let _ = writeln!(out, "    {}  obj  {}", cols[j], num(c));
        }
        for &(i, a) in &by_col[j] {
            let _ = writeln!(out, "    {}  {}  {}", cols[j], rows[i], num(a));
        }
    }
    if in_int {
        out.push_str("    MARKER  'MARKER'  'INTEND'\n");
    }

    out.push_str("RHS\n");
    if lp.objective_offset != 0.0 {
        let _ = writeln!(out, "    RHS  obj  {}", num(-lp.objective_offset));
    }
    for (row, name) in lp.rows.iter().zip(&rows) {
        if row.rhs != 0.0 {
            let _ = writeln!(out, "    RHS  {name}  {}", num(row.rhs));
        }
    }

    out.push_str("BOUNDS\n");
    for j in 0..n {
        let (lo, hi) = (lp.lower[j], lp.upper[j]);
        let name = &cols[j];
        let mut line = |tag: &str, v: Option<f64>| match v {
            Some(v) => {
                let _ = writeln!(out, " {tag} BND  {name}  {}", num(v));
            }
            None => {
                let _ = writeln!(out, " {tag} BND  {name}");
            }
        };
        if lp.integer[j] && lo == 0.0 && hi == 1.0 {
            line("BV", None);
        } else if lo == hi {
            line("FX", Some(lo));
        } else if lo == f64::NEG_INFINITY && hi == f64::INFINITY {
            line("FR", None);
        } else {
            if lo == f64::NEG_INFINITY {
                line("MI", None);
            } else if lo != 0.0 {
                line("LO", Some(lo));
            }
            if hi.is_finite() {
                line("UP", Some(hi));
            } else if lp.integer[j] {
                // some readers give unbounded integer columns an upper bound of 1
                line("PL", None);
            }
        }
    }
    out.push_str("ENDATA\n");
    out
}
