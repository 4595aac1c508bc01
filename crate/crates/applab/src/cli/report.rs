//! CSV report assembly and the per-experiment schema documentation.

use std::fs;
use std::path::Path;

use super::CliError;

/// One typed CSV field.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Flag(bool),
}

/// 17 significant digits, round-trippable.
pub fn fmt_sig(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_sig(*v),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => if *b { "true".into() } else { "false".into() },
        }
    }
}

/// A named CSV file: fixed header, one row per record.
#[derive(Debug, Clone)]
pub struct Report {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(name: impl Into<String>, header: Vec<&'static str>) -> Self {
        Report {
            name: name.into(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, dir: &Path) -> Result<std::path::PathBuf, CliError> {
        let path = dir.join(&self.name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)
                .map_err(|e| CliError::Io(format!("creating {}: {e}", parent.display())))?;
        }
        let mut w = csv::Writer::from_path(&path)
            .map_err(|e| CliError::Io(format!("opening {}: {e}", path.display())))?;
        w.write_record(&self.header)
            .map_err(|e| CliError::Io(e.to_string()))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))
                .map_err(|e| CliError::Io(e.to_string()))?;
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))?;
        Ok(path)
    }
}

/// Derived file name: `stem.csv` -> `stem_suffix.csv`.
pub fn derived_name(primary: &str, suffix: &str) -> String {
    match primary.strip_suffix(".csv") {
        Some(stem) => format!("{stem}_{suffix}.csv"),
        None => format!("{primary}_{suffix}.csv"),
    }
}

pub fn describe(name: &str) -> Option<&'static str> {
    let text = match name {
        "validate" => {
            "experiment: validate\n\
             Checks the operator coefficients: class constraints, polynomial\n\
             positivity over the grid arguments, and weight-mass probes.\n\
             config: operator{preset | a[], b[], rho, c}, grids{x, n},\n\
             tolerances{weight_eps}, output_path\n\
             columns: quantity, value, ok\n\
             exit 3 when any check fails, with the reason on stderr."
        }
        "eval" => {
            "experiment: eval\n\
             Applies the operator to the configured function on the grid.\n\
             config: operator, grids, function{preset | poly | pieces},\n\
             tolerances{weight_eps}, output_path\n\
             columns: n, x, value, target, abs_err\n\
             target is f(x); abs_err = |value - target|."
        }
        "moments" => {
            "experiment: moments\n\
             Raw moments r = 0..4 by every available route.\n\
             config: operator, grids, output_path\n\
             columns: n, x, r, route, value\n\
             routes: oracle (closed form), numeric (series summation),\n\
             quadrature (full integration), paper (published formula);\n\
             discrete operators report oracle and paper only. Orders whose\n\
             kernel moment diverges (n*rho <= r*c) are skipped."
        }
        "limits" => {
            "experiment: limits\n\
             Extrapolated n-scaled central moment limits vs the published\n\
             expressions, orders 1, 2, 4.\n\
             config: operator, grids{x}, tolerances{limit_rel, limit_abs},\n\
             output_path\n\
             columns: order, x, estimate, slope, residual, paper_value, verdict\n\
             verdict: agree | paper_typo_suspected."
        }
        "verify-paper" => {
            "experiment: verify-paper\n\
             Diffs every published moment formula against the oracle on the\n\
             grid; limit rows leave the n column empty.\n\
             config: operator, grids, tolerances{rel, abs, limit_rel,\n\
             limit_abs}, output_path\n\
             columns: quantity, n, x, oracle, paper, abs_diff, rel_diff, verdict\n\
             also writes <stem>_summary.csv: quantity, points, disagreements,\n\
             verdict (paper_typo_suspected only when every point disagrees)."
        }
        "rates" => {
            "experiment: rates\n\
             Empirical error-bound checks selected by rates.checks, a subset\n\
             of: korovkin, lipschitz, voronovskaja, local_bound, steklov_3_5,\n\
             dt_3_5, weighted_4_1.\n\
             config: operator, grids, function (all but korovkin),\n\
             rates{checks, interval, m, alpha, b, a, tau, weighted_alpha,\n\
             x_max, voronovskaja{df, d2f, x, exp_lo, exp_hi, rel_tol}},\n\
             output_path\n\
             columns: theorem, n, x, lhs, rhs, holds, margin\n\
             margin = rhs - lhs per row; rows with rhs = inf are informational\n\
             (korovkin leading rows, dt rows before the last, weighted first\n\
             row). Fitted constants go to <stem>_constants.csv: theorem, name,\n\
             value. exit 2 when any row has holds = false."
        }
        "dbv" => {
            "experiment: dbv\n\
             Pointwise bound for piecewise-polynomial functions whose\n\
             derivative has bounded variation; needs function.poly or\n\
             function.pieces (or a preset with a polynomial form) plus the\n\
             envelope constant function.m_f where it cannot be derived.\n\
             config: operator, grids (x > 0), function, output_path\n\
             columns: theorem, n, x, lhs, rhs, holds, margin\n\
             constants (c1_fitted, m_f) go to <stem>_constants.csv.\n\
             exit 2 when any row has holds = false."
        }
        _ => return None,
    };
    Some(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_is_fixed_width_17_digits() {
        assert_eq!(fmt_sig(1.2), "1.2000000000000000e0");
        assert_eq!(fmt_sig(-0.25), "-2.5000000000000000e-1");
        assert_eq!(fmt_sig(f64::INFINITY), "inf");
        assert_eq!(fmt_sig(f64::NAN), "nan");
        let v = 0.1 + 0.2;
        assert_eq!(fmt_sig(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn every_experiment_has_a_schema() {
        for name in ["validate", "eval", "moments", "limits", "verify-paper", "rates", "dbv"] {
            assert!(describe(name).is_some(), "{name}");
        }
        assert!(describe("plot").is_none());
    }

    #[test]
    fn derived_names_share_the_stem() {
        assert_eq!(derived_name("ledger.csv", "summary"), "ledger_summary.csv");
        assert_eq!(derived_name("out/r.csv", "constants"), "out/r_constants.csv");
        assert_eq!(derived_name("weird", "summary"), "weird_summary.csv");
    }
}
