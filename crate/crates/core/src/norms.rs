//! Empirical `B(φ)` and `G(ψ)` norms, tail functions and the moment-norm
//! tail bound.

use std::io::Read;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::grid::log_space;
use crate::phi::{phi_inverse, psi, PhiFunction};
use crate::serde_inf;

/// Minimum sample size accepted by the norm estimators.
pub const MIN_NORM_SAMPLE: usize = 100;
/// Number of `λ` points in the `B(φ)` search.
pub const LAMBDA_POINTS: usize = 200;
/// Largest tolerated relative standard error of the empirical MGF.
pub const MGF_REL_SE_CAP: f64 = 0.5;

/// Draws of a real random variable.
#[derive(Debug, Clone)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(domain("sample is empty"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(domain(format!("sample value #{i} is not finite")));
        }
        Ok(Sample { values })
    }

    /// Reads the first column of a CSV file with a header row.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let mut values = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let field = rec.get(0).unwrap_or("");
            values.push(
                field
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("sample row {}: bad number {field:?}", i + 1)))?,
            );
        }
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// Sample standard deviation (divisor `M − 1`; zero for `M = 1`).
    pub fn stdev(&self) -> f64 {
        let m = self.len();
        if m < 2 {
            return 0.0;
        }
        let mean = self.mean();
        let ss: f64 = self.values.iter().map(|v| (v - mean) * (v - mean)).sum();
        (ss / (m - 1) as f64).sqrt()
    }

    pub fn scaled(&self, c: f64) -> Sample {
        Sample {
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    fn rms(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() / self.len() as f64).sqrt()
    }

    /// Errors when `|mean| > 3·stdev/√M`.
    pub fn require_centered(&self) -> Result<()> {
        let mean_abs = self.mean().abs();
        let limit = 3.0 * self.stdev() / (self.len() as f64).sqrt();
        if mean_abs > limit {
            return Err(Error::NotCentered { mean_abs, limit });
        }
        Ok(())
    }
}

/// `U(ξ, x) = max(P(ξ > x), P(ξ < −x))` of the empirical law.
pub fn tail_u(sample: &Sample, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(domain(format!("tail function needs x >= 0, got {x}")));
    }
    let (mut above, mut below) = (0usize, 0usize);
    for &v in sample.values() {
        if v > x {
            above += 1;
        } else if v < -x {
            below += 1;
        }
    }
    Ok(above.max(below) as f64 / sample.len() as f64)
}

/// `2·exp(−u / (C₃·‖ξ‖_G))`.
pub fn tail_bound_from_gnorm(g_norm: f64, u: f64, c3: f64) -> Result<f64> {
    if !(g_norm > 0.0 && u > 0.0 && c3 > 0.0) {
        return Err(domain(format!(
            "tail bound needs positive g_norm, u, C3 (got {g_norm}, {u}, {c3})"
        )));
    }
    Ok(2.0 * (-u / (c3 * g_norm)).exp())
}

/// `ln( (1/M) Σ exp(λ xᵢ) )` and the relative standard error of the
/// empirical MGF. Small exponents go through `expm1`/`ln_1p`, large ones
/// through a shifted exponent.
fn log_mgf(values: &[f64], lambda: f64) -> (f64, f64) {
    let m = values.len() as f64;
    let shift = values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(lambda * v));
    if shift <= 1.0 {
        let (mut d1, mut d2) = (0.0f64, 0.0f64);
        for &v in values {
            let w = (lambda * v).exp_m1();
            d1 += w;
            d2 += w * w;
        }
        let mean_d = d1 / m;
        // Var(e^{λx}) = Var(e^{λx} − 1).
        let var = (d2 / m - mean_d * mean_d).max(0.0);
        let mgf = 1.0 + mean_d;
        return (mean_d.ln_1p(), (var / m).sqrt() / mgf);
    }
    let (mut s1, mut s2) = (0.0f64, 0.0f64);
    for &v in values {
        let w = (lambda * v - shift).exp();
        s1 += w;
        s2 += w * w;
    }
    let log_m = shift + (s1 / m).ln();
    let rel_var = (m * s2 / (s1 * s1) - 1.0).max(0.0);
    (log_m, (rel_var / m).sqrt())
}

#[derive(Debug, Clone, Serialize)]
pub struct BNormEstimate {
    #[serde(with = "serde_inf")]
    pub value: f64,
    pub lambda_grid_min: f64,
    pub lambda_grid_max: f64,
    pub lambda_points: usize,
    /// Set when the estimate is `+∞`.
    pub diagnostic: Option<String>,
}

/// Empirical `B(φ)` norm: the smallest `τ` with
/// `ln m̂(±λ) ≤ φ(λτ)` on the `λ` grid, i.e.
/// `sup_λ φ⁻¹(ln m̂(±λ)) / λ`, computed on the mean-subtracted sample.
///
/// The grid is log-spaced from `10⁻³/s` (with `s` the sample RMS) up to the
/// largest `λ` whose empirical MGF still has relative standard error at most
/// 50%, capped at `50/s`.
pub fn bphi_norm(sample: &Sample, phi: &PhiFunction) -> Result<BNormEstimate> {
    if sample.len() < MIN_NORM_SAMPLE {
        return Err(Error::SampleTooSmall {
            size: sample.len(),
            required: MIN_NORM_SAMPLE,
        });
    }
    sample.require_centered()?;
    let scale = sample.rms();
    if scale == 0.0 {
        return Ok(BNormEstimate {
            value: 0.0,
            lambda_grid_min: 0.0,
            lambda_grid_max: 0.0,
            lambda_points: 0,
            diagnostic: None,
        });
    }
    // The centering check tolerates a residual mean; left in, it would
    // dominate ln m̂(λ) ≈ λ·mean as λ → 0.
    let mean = sample.values().iter().sum::<f64>() / sample.len() as f64;
    let centered: Vec<f64> = sample.values().iter().map(|v| v - mean).collect();
    let values = centered.as_slice();

    // Largest reliable λ, searched in the scale-free variable t = λ·s.
    let mut t_max = 1e-3;
    for t in log_space(1e-3, 50.0, 400) {
        let lambda = t / scale;
        let ok = [lambda, -lambda]
            .iter()
            .all(|&l| log_mgf(values, l).1 <= MGF_REL_SE_CAP);
        if !ok {
            break;
        }
        t_max = t;
    }
    let grid = log_space(1e-3, t_max, LAMBDA_POINTS);

    let mut tau: f64 = 0.0;
    for &t in &grid {
        let lambda = t / scale;
        for signed in [lambda, -lambda] {
            let (lm, _) = log_mgf(values, signed);
            if lm <= 0.0 {
                continue;
            }
            match phi_inverse(phi, lm) {
                Ok(inv) => tau = tau.max(inv / lambda),
                Err(Error::Unreachable { sup, .. }) => {
                    return Ok(BNormEstimate {
                        value: f64::INFINITY,
                        lambda_grid_min: grid[0] / scale,
                        lambda_grid_max: t_max / scale,
                        lambda_points: grid.len(),
                        diagnostic: Some(format!(
                            "log MGF {lm:.6e} at lambda {signed:.6e} exceeds sup phi = {sup:.6e}"
                        )),
                    })
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(BNormEstimate {
        value: tau,
        lambda_grid_min: grid[0] / scale,
        lambda_grid_max: t_max / scale,
        lambda_points: grid.len(),
        diagnostic: None,
    })
}

/// The `p` grid of [`gpsi_norm`]: integers and half-integers in
/// `[2, log₂ M]`.
pub fn p_grid(sample_size: usize) -> Vec<f64> {
    let p_max = (sample_size as f64).log2();
    let mut grid = Vec::new();
    let mut p = 2.0;
    while p <= p_max + 1e-12 {
        grid.push(p);
        p += 0.5;
    }
    grid
}

/// `|ξ|_p = (E|ξ|^p)^{1/p}` of the empirical law.
pub fn abs_moment_norm(sample: &Sample, p: f64) -> f64 {
    let top = sample.max_abs();
    if top == 0.0 {
        return 0.0;
    }
    let s: f64 = sample.values().iter().map(|v| (v.abs() / top).powf(p)).sum();
    top * (s / sample.len() as f64).powf(1.0 / p)
}

#[derive(Debug, Clone, Serialize)]
pub struct GNormEstimate {
    pub value: f64,
    pub p_max: f64,
    pub p_points: usize,
    /// `p` attaining the supremum.
    pub argmax_p: f64,
}

/// Empirical `G(ψ)` norm `sup_{2 ≤ p ≤ log₂ M} |ξ|_p / ψ(p)`.
pub fn gpsi_norm(sample: &Sample, phi: &PhiFunction) -> Result<GNormEstimate> {
    if sample.len() < MIN_NORM_SAMPLE {
        return Err(Error::SampleTooSmall {
            size: sample.len(),
            required: MIN_NORM_SAMPLE,
        });
    }
    let grid = p_grid(sample.len());
    let (mut best, mut argmax) = (0.0f64, 2.0);
    for &p in &grid {
        let r = abs_moment_norm(sample, p) / psi(phi, p)?;
        if r > best {
            best = r;
            argmax = p;
        }
    }
    Ok(GNormEstimate {
        value: best,
        p_max: *grid.last().unwrap(),
        p_points: grid.len(),
        argmax_p: argmax,
    })
}

/// Both norms of one sample.
#[derive(Debug, Clone, Serialize)]
pub struct NormEstimate {
    pub phi: String,
    pub sample_size: usize,
    #[serde(with = "serde_inf")]
    pub b_norm: f64,
    pub g_norm: f64,
    pub lambda_grid_min: f64,
    pub lambda_grid_max: f64,
    pub lambda_points: usize,
    pub p_max: f64,
    pub p_points: usize,
    pub mean_abs: f64,
    pub diagnostic: Option<String>,
}

pub fn estimate_norms(sample: &Sample, phi: &PhiFunction) -> Result<NormEstimate> {
    let b = bphi_norm(sample, phi)?;
    let g = gpsi_norm(sample, phi)?;
    Ok(NormEstimate {
        phi: phi.label().to_string(),
        sample_size: sample.len(),
        b_norm: b.value,
        g_norm: g.value,
        lambda_grid_min: b.lambda_grid_min,
        lambda_grid_max: b.lambda_grid_max,
        lambda_points: b.lambda_points,
        p_max: g.p_max,
        p_points: g.p_points,
        mean_abs: sample.mean().abs(),
        diagnostic: b.diagnostic,
    })
}
