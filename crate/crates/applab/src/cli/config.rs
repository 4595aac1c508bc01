//! JSON experiment configuration: one object per run, round-trippable.

use serde::{Deserialize, Serialize};

use crate::appell::AppellPair;
use crate::functions::{FunctionHandle, PiecewisePoly};

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Validate,
    Eval,
    Moments,
    Limits,
    VerifyPaper,
    Rates,
    Dbv,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Validate,
        Experiment::Eval,
        Experiment::Moments,
        Experiment::Limits,
        Experiment::VerifyPaper,
        Experiment::Rates,
        Experiment::Dbv,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Experiment::Validate => "validate",
            Experiment::Eval => "eval",
            Experiment::Moments => "moments",
            Experiment::Limits => "limits",
            Experiment::VerifyPaper => "verify-paper",
            Experiment::Rates => "rates",
            Experiment::Dbv => "dbv",
        }
    }

    pub fn parse(s: &str) -> Option<Experiment> {
        Experiment::ALL.into_iter().find(|e| e.as_str() == s)
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorConfig {
    /// `phillips` (a=(1), rho=1, c=0) or `szasz` (a=(1), rho/c from fields).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub a: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub b: Vec<f64>,
    #[serde(default = "one")]
    pub rho: f64,
    #[serde(default)]
    pub c: u32,
    /// Skip the kernel smoothing and sample f on the lattice i/n instead.
    #[serde(default)]
    pub discrete: bool,
}

impl OperatorConfig {
    /// Pair construction; class violations surface as validation failures.
    pub fn build_pair(&self) -> Result<AppellPair, CliError> {
        let (a, b) = match self.preset.as_deref() {
            Some("phillips") | Some("szasz") => {
                if !self.a.is_empty() || !self.b.is_empty() {
                    return Err(CliError::Config(
                        "operator.preset excludes explicit operator.a / operator.b".into(),
                    ));
                }
                (vec![1.0], Vec::new())
            }
            Some(other) => {
                return Err(CliError::Config(format!(
                    "unknown operator preset '{other}' (expected phillips or szasz)"
                )))
            }
            None => (self.a.clone(), self.b.clone()),
        };
        AppellPair::new(a, b).map_err(|e| CliError::Validation(e.to_string()))
    }

    pub fn rho(&self) -> f64 {
        if self.preset.as_deref() == Some("phillips") {
            1.0
        } else {
            self.rho
        }
    }

    pub fn c(&self) -> u32 {
        if self.preset.as_deref() == Some("phillips") {
            0
        } else {
            self.c
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Piece {
    pub start: f64,
    pub coeffs: Vec<f64>,
}

/// Exactly one of `preset`, `poly`, `pieces` selects the function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    /// one | identity | exp_neg | sqrt | sin | bounded_ratio |
    /// monomial:<r> | abs_dev:<center>
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// Global polynomial, coefficients lowest power first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pieces: Option<Vec<Piece>>,
    /// Envelope constant with |f(z)| <= m_f (1 + z^2), used by dbv.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_f: Option<f64>,
}

fn parse_suffix(name: &str, prefix: &str) -> Option<f64> {
    name.strip_prefix(prefix).and_then(|s| s.parse().ok())
}

impl FunctionSpec {
    fn selected(&self) -> Result<(), CliError> {
        let n = usize::from(self.preset.is_some())
            + usize::from(self.poly.is_some())
            + usize::from(self.pieces.is_some());
        if n != 1 {
            return Err(CliError::Config(
                "function needs exactly one of preset, poly, pieces".into(),
            ));
        }
        Ok(())
    }

    fn preset_handle(name: &str) -> Result<FunctionHandle, CliError> {
        let f = match name {
            "one" => FunctionHandle::one(),
            "identity" => FunctionHandle::identity(),
            "exp_neg" => FunctionHandle::exp_neg(),
            "sqrt" => FunctionHandle::sqrt(),
            "sin" => FunctionHandle::sin(),
            "bounded_ratio" => FunctionHandle::bounded_ratio(),
            _ => {
                if let Some(r) = parse_suffix(name, "monomial:") {
                    if r < 0.0 || r > 4.0 || r.fract() != 0.0 {
                        return Err(CliError::Config(format!(
                            "monomial exponent must be an integer in 0..=4, got {r}"
                        )));
                    }
                    FunctionHandle::monomial(r as u32)
                } else if let Some(c) = parse_suffix(name, "abs_dev:") {
                    if !c.is_finite() || c < 0.0 {
                        return Err(CliError::Config(format!(
                            "abs_dev center must be finite and nonnegative, got {c}"
                        )));
                    }
                    FunctionHandle::abs_dev(c)
                } else {
                    return Err(CliError::Config(format!("unknown function preset '{name}'")));
                }
            }
        };
        Ok(f)
    }

    pub fn build_handle(&self) -> Result<FunctionHandle, CliError> {
        self.selected()?;
        if let Some(name) = &self.preset {
            return Self::preset_handle(name);
        }
        Ok(FunctionHandle::piecewise(self.build_poly()?))
    }

    /// Piecewise-polynomial form, needed where exact one-sided derivatives
    /// and variation matter.
    pub fn build_poly(&self) -> Result<PiecewisePoly, CliError> {
        self.selected()?;
        let poly = if let Some(coeffs) = &self.poly {
            PiecewisePoly::global(coeffs.clone())
        } else if let Some(pieces) = &self.pieces {
            PiecewisePoly::new(pieces.iter().map(|p| (p.start, p.coeffs.clone())).collect())
        } else {
            let name = self.preset.as_deref().unwrap();
            match name {
                "one" => PiecewisePoly::global(vec![1.0]),
                "identity" => PiecewisePoly::global(vec![0.0, 1.0]),
                _ => {
                    if let Some(r) = parse_suffix(name, "monomial:") {
                        let mut coeffs = vec![0.0; r as usize + 1];
                        coeffs[r as usize] = 1.0;
                        PiecewisePoly::global(coeffs)
                    } else if let Some(c) = parse_suffix(name, "abs_dev:") {
                        if c > 0.0 {
                            PiecewisePoly::new(vec![
                                (0.0, vec![c, -1.0]),
                                (c, vec![-c, 1.0]),
                            ])
                        } else {
                            PiecewisePoly::global(vec![0.0, 1.0])
                        }
                    } else {
                        return Err(CliError::Config(format!(
                            "preset '{name}' has no piecewise-polynomial form"
                        )));
                    }
                }
            }
        };
        poly.map_err(|e| CliError::Config(e.to_string()))
    }

    /// m_f with |f(z)| <= m_f (1 + z^2): explicit, or derived for the
    /// presets that admit one; checked on a sample grid either way.
    pub fn envelope(&self, poly: &PiecewisePoly) -> Result<f64, CliError> {
        let m_f = match self.m_f {
            Some(m) => m,
            None => match self.preset.as_deref() {
                Some("one") | Some("identity") => 1.0,
                Some(name) => {
                    if let Some(r) = parse_suffix(name, "monomial:") {
                        if r <= 2.0 {
                            1.0
                        } else {
                            return Err(CliError::Config(format!(
                                "preset '{name}' grows past the quadratic envelope; dbv needs degree <= 2"
                            )));
                        }
                    } else if let Some(c) = parse_suffix(name, "abs_dev:") {
                        1.0 + c
                    } else {
                        return Err(CliError::Config(format!(
                            "function.m_f is required for preset '{name}'"
                        )));
                    }
                }
                None => {
                    return Err(CliError::Config(
                        "function.m_f is required for poly / pieces input".into(),
                    ))
                }
            },
        };
        if !(m_f > 0.0) || !m_f.is_finite() {
            return Err(CliError::Config(format!(
                "function.m_f must be positive and finite, got {m_f}"
            )));
        }
        if poly.degree() > 2 {
            return Err(CliError::Config(format!(
                "degree {} exceeds the quadratic envelope dbv assumes",
                poly.degree()
            )));
        }
        let far = poly
            .interior_breakpoints()
            .last()
            .copied()
            .unwrap_or(1.0)
            .max(1.0);
        for k in 0..=1000 {
            let z = 4.0 * far * k as f64 / 1000.0;
            if poly.eval(z).abs() > m_f * (1.0 + z * z) * (1.0 + 1e-12) {
                return Err(CliError::Config(format!(
                    "envelope m_f = {m_f} fails at z = {z}: |f| = {}",
                    poly.eval(z).abs()
                )));
            }
        }
        Ok(m_f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Grids {
    pub x: Vec<f64>,
    pub n: Vec<u32>,
}

impl Default for Grids {
    fn default() -> Self {
        Grids {
            x: vec![0.25, 0.5, 1.0, 2.0, 4.0],
            n: vec![10, 100, 1000],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Weight-tail truncation target.
    pub weight_eps: f64,
    /// Relative agreement threshold for finite-n printed-formula rows.
    pub rel: f64,
    /// Absolute slack for near-zero comparisons.
    pub abs: f64,
    /// Looser thresholds for extrapolated limit rows.
    pub limit_rel: f64,
    pub limit_abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            weight_eps: 1e-12,
            rel: 1e-6,
            abs: 1e-12,
            limit_rel: 1e-3,
            limit_abs: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VoronovskajaConfig {
    /// f'(x) and f''(x) at the probe point.
    pub df: f64,
    pub d2f: f64,
    #[serde(default = "one")]
    pub x: f64,
    /// n ladder runs over 2^exp_lo ..= 2^exp_hi.
    #[serde(default = "default_exp_lo")]
    pub exp_lo: u32,
    #[serde(default = "default_exp_hi")]
    pub exp_hi: u32,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
}

fn default_exp_lo() -> u32 {
    4
}

fn default_exp_hi() -> u32 {
    10
}

fn default_rel_tol() -> f64 {
    0.01
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RatesConfig {
    /// Subset of: korovkin, lipschitz, voronovskaja, local_bound,
    /// steklov_3_5, dt_3_5, weighted_4_1.
    pub checks: Vec<String>,
    /// Korovkin sup-error interval.
    pub interval: (f64, f64),
    /// Lipschitz class constant and exponent.
    pub m: f64,
    pub alpha: f64,
    /// Right end of the local-bound x range.
    pub b: f64,
    /// Right end of the Steklov-bound x range.
    pub a: f64,
    /// Design-density exponent in [0, 1].
    pub tau: f64,
    /// Weight exponent and scan limit for the weighted check.
    pub weighted_alpha: f64,
    pub x_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub voronovskaja: Option<VoronovskajaConfig>,
}

impl Default for RatesConfig {
    fn default() -> Self {
        RatesConfig {
            checks: vec!["korovkin".into()],
            interval: (0.0, 2.0),
            m: 1.0,
            alpha: 1.0,
            b: 2.0,
            a: 2.0,
            tau: 0.5,
            weighted_alpha: 0.5,
            x_max: 10.0,
            voronovskaja: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub operator: OperatorConfig,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<FunctionSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<RatesConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| {
            CliError::Config(format!(
                "config parse error at line {}, column {}: {e}",
                e.line(),
                e.column()
            ))
        })?;
        cfg.check_invariants()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    fn check_invariants(&self) -> Result<(), CliError> {
        if self.grids.x.is_empty() || self.grids.n.is_empty() {
            return Err(CliError::Config("grids.x and grids.n must be nonempty".into()));
        }
        if self.grids.n.contains(&0) {
            return Err(CliError::Config("grids.n entries must be >= 1".into()));
        }
        if self.grids.x.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(CliError::Config(
                "grids.x entries must be finite and >= 0".into(),
            ));
        }
        if !(self.operator.rho() > 0.0) || !self.operator.rho().is_finite() {
            return Err(CliError::Config(format!(
                "operator.rho must be positive and finite, got {}",
                self.operator.rho
            )));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("weight_eps", t.weight_eps),
            ("rel", t.rel),
            ("abs", t.abs),
            ("limit_rel", t.limit_rel),
            ("limit_abs", t.limit_abs),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(CliError::Config(format!(
                    "tolerances.{name} must be positive and finite, got {v}"
                )));
            }
        }
        if let Some(r) = &self.rates {
            if !(r.interval.1 > r.interval.0) {
                return Err(CliError::Config(
                    "rates.interval must have a positive length".into(),
                ));
            }
            if r.checks.is_empty() {
                return Err(CliError::Config("rates.checks must be nonempty".into()));
            }
        }
        Ok(())
    }

    pub fn output_name(&self) -> String {
        self.output_path
            .clone()
            .unwrap_or_else(|| format!("{}.csv", self.experiment.as_str()))
    }
}
