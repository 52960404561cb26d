use serde::Serialize;

use crate::error::{domain, Result};
use crate::grid::log_space;

/// Deterministic positive nondecreasing divisor `v(n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormingSequence {
    /// `v_r(n) = (ln ln(n + 3))^{1/r}`.
    IteratedLog { r: f64 },
    Constant { c: f64 },
    /// `values[n − 1] = v(n)`, held constant past the end.
    Table { values: Vec<f64> },
}

impl NormingSequence {
    pub fn iterated_log(r: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(domain(format!("iterated-log norming needs r > 0, got {r}")));
        }
        Ok(NormingSequence::IteratedLog { r })
    }

    pub fn constant(c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(domain(format!("constant norming needs c > 0, got {c}")));
        }
        Ok(NormingSequence::Constant { c })
    }

    pub fn table(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(domain("norming table must hold positive finite values"));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(domain("norming table must be nondecreasing"));
        }
        Ok(NormingSequence::Table { values })
    }

    pub fn eval(&self, n: f64) -> f64 {
        match self {
            NormingSequence::IteratedLog { r } => {
                let ll = (n + 3.0).ln().ln();
                if *r == 2.0 {
                    ll.sqrt()
                } else if *r == 1.0 {
                    ll
                } else {
                    ll.powf(1.0 / r)
                }
            }
            NormingSequence::Constant { c } => *c,
            NormingSequence::Table { values } => {
                let i = (n.max(1.0) as usize).min(values.len());
                values[i - 1]
            }
        }
    }

    pub fn id(&self) -> String {
        match self {
            NormingSequence::IteratedLog { r } => format!("lil:r={r}"),
            NormingSequence::Constant { c } => format!("const:c={c}"),
            NormingSequence::Table { values } => format!("table:len={}", values.len()),
        }
    }
}

/// Slowly varying factor `M(n)` of a power-law profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SlowlyVarying {
    One,
    /// `ln(n + e)`.
    Log,
    /// `1 / ln(n + e)`.
    InvLog,
}

impl SlowlyVarying {
    fn ln_eval(self, n: f64) -> f64 {
        match self {
            SlowlyVarying::One => 0.0,
            SlowlyVarying::Log => (n + std::f64::consts::E).ln().ln(),
            SlowlyVarying::InvLog => -(n + std::f64::consts::E).ln().ln(),
        }
    }
}

/// Standard deviation profile `σ(n)`, evaluated in log space so that block
/// ratios stay finite for astronomically large `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SigmaProfile {
    /// `σ(n)² = C(n, d)` (Rademacher chaos of degree `d`); zero for `n < d`.
    Chaos { d: u32 },
    /// `σ(n)² = β² (1 − 4^{−n}) / 3`.
    WeightedIid { beta: f64 },
    /// `σ(n) = n^γ M(n)`.
    PowerLaw { gamma: f64, slow: SlowlyVarying },
    /// `values[n − 1] = σ(n)`; undefined past the end.
    Table { values: Vec<f64> },
}

impl SigmaProfile {
    pub fn power_law(gamma: f64, slow: SlowlyVarying) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(domain(format!("power-law sigma needs gamma > 0, got {gamma}")));
        }
        let profile = SigmaProfile::PowerLaw { gamma, slow };
        let grid = log_space(1.0, 1e12, 400);
        if grid.windows(2).any(|w| profile.ln_sigma(w[1]) < profile.ln_sigma(w[0])) {
            return Err(domain(format!(
                "sigma(n) = n^{gamma} M(n) with M = {slow:?} is not monotone; the bound needs nondecreasing sigma"
            )));
        }
        Ok(profile)
    }

    pub fn table(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(domain("sigma table must hold positive finite values"));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(domain("sigma table must be nondecreasing"));
        }
        Ok(SigmaProfile::Table { values })
    }

    /// `ln σ(n)`; `−∞` where `σ` vanishes.
    pub fn ln_sigma(&self, n: f64) -> f64 {
        match self {
            SigmaProfile::Chaos { d } => {
                let d = *d as usize;
                if n < d as f64 {
                    return f64::NEG_INFINITY;
                }
                let mut s = 0.0;
                for i in 0..d {
                    s += (n - i as f64).ln() - ((i + 1) as f64).ln();
                }
                0.5 * s
            }
            SigmaProfile::WeightedIid { beta } => {
                beta.ln() + 0.5 * ((-(4f64.powf(-n))).ln_1p() - 3f64.ln())
            }
            SigmaProfile::PowerLaw { gamma, slow } => gamma * n.ln() + slow.ln_eval(n),
            SigmaProfile::Table { values } => {
                let i = n as usize;
                if i == 0 || i > values.len() {
                    f64::NAN
                } else {
                    values[i - 1].ln()
                }
            }
        }
    }

    /// `σ(n)`, evaluated directly where that is exact enough and through
    /// `ln σ` otherwise.
    pub fn sigma(&self, n: f64) -> f64 {
        match self {
            SigmaProfile::Chaos { d } if n < 1e15 => {
                if n < *d as f64 {
                    return 0.0;
                }
                let mut c = 1.0f64;
                for i in 0..*d {
                    c = c * (n - i as f64) / (i + 1) as f64;
                }
                if c.is_finite() {
                    c.sqrt()
                } else {
                    self.ln_sigma(n).exp()
                }
            }
            SigmaProfile::WeightedIid { beta } => beta * ((1.0 - 4f64.powf(-n)) / 3.0).sqrt(),
            SigmaProfile::PowerLaw {
                gamma,
                slow: SlowlyVarying::One,
            } => n.powf(*gamma),
            SigmaProfile::Table { values } => {
                let i = n as usize;
                if i >= 1 && i <= values.len() {
                    values[i - 1]
                } else {
                    f64::NAN
                }
            }
            _ => self.ln_sigma(n).exp(),
        }
    }

    /// First index with `σ(n) > 0`.
    pub fn n_min(&self) -> f64 {
        match self {
            SigmaProfile::Chaos { d } => *d as f64,
            _ => 1.0,
        }
    }

    /// Last index where the profile is defined.
    pub fn n_max(&self) -> f64 {
        match self {
            SigmaProfile::Table { values } => values.len() as f64,
            _ => f64::INFINITY,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            SigmaProfile::Chaos { .. } | SigmaProfile::WeightedIid { .. } => "model_exact",
            SigmaProfile::PowerLaw { .. } => "power_law",
            SigmaProfile::Table { .. } => "table",
        }
    }
}
