use serde::Serialize;

use super::partition::{BlockFamily, Partition};
use super::sequences::{NormingSequence, SigmaProfile};
use crate::error::{domain, Result};
use crate::phi::{conjugate, PhiFunction};
use crate::serde_inf;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QSumOptions {
    /// Target for both the last term and the tail residual.
    pub tol: f64,
    /// Hard cap on the number of blocks.
    pub k_max: usize,
    /// Blocks starting beyond this index are not generated.
    pub a_max: f64,
}

impl Default for QSumOptions {
    fn default() -> Self {
        QSumOptions {
            tol: 1e-9,
            k_max: 20_000,
            a_max: 1e300,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QSumStatus {
    /// Residual certified below tolerance.
    Converged,
    /// Stopped early; the residual is an extrapolated tail estimate.
    Truncated,
    /// Terms do not decay fast enough to be summable.
    Divergent,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct QSum {
    /// Partial sum over the evaluated blocks.
    pub value: f64,
    pub k_used: usize,
    #[serde(with = "serde_inf")]
    pub residual_bound: f64,
    pub status: QSumStatus,
}

impl QSum {
    /// Partial sum plus residual; `+∞` when divergent.
    pub fn bound(&self) -> f64 {
        match self.status {
            QSumStatus::Divergent => f64::INFINITY,
            _ => self.value + self.residual_bound,
        }
    }
}

/// Term for the block `[a, b]`:
/// `exp(−φ*(u · σ(a) v(a) / σ(b)))`.
pub fn block_term(
    a: f64,
    b: f64,
    v: &NormingSequence,
    sigma: &SigmaProfile,
    phi: &PhiFunction,
    u: f64,
) -> Result<f64> {
    if !(u > 0.0) {
        return Err(domain(format!("q_term needs u > 0, got {u}")));
    }
    let ln_ratio = sigma.ln_sigma(a) - sigma.ln_sigma(b);
    if ln_ratio.is_nan() {
        return Err(domain(format!("sigma undefined on block [{a}, {b}]")));
    }
    let x = u * ln_ratio.exp() * v.eval(a);
    Ok((-conjugate(phi, x)?).exp())
}

/// `Q(k; R, v, u)` for block `k` (1-based) of an explicit partition.
pub fn q_term(
    k: usize,
    partition: &Partition,
    v: &NormingSequence,
    sigma: &SigmaProfile,
    phi: &PhiFunction,
    u: f64,
) -> Result<f64> {
    let (a, b) = partition
        .block(k)
        .ok_or_else(|| domain(format!("block {k} outside partition depth {}", partition.depth())))?;
    block_term(a as f64, b as f64, v, sigma, phi, u)
}

const MIN_TERMS_FOR_STOP: usize = 32;
const MIN_TERMS_FOR_TAIL: usize = 8;

/// `Q(R, v, u) = Σ_k Q(k; R, v, u)` over the blocks of `family`.
///
/// Blocks are clipped to `n ≥ σ.n_min()`; blocks entirely below it are
/// skipped.
pub fn q_sum(
    family: &dyn BlockFamily,
    v: &NormingSequence,
    sigma: &SigmaProfile,
    phi: &PhiFunction,
    u: f64,
    opts: &QSumOptions,
) -> Result<QSum> {
    if !(opts.tol > 0.0) {
        return Err(domain(format!("q_sum tolerance must be positive, got {}", opts.tol)));
    }
    if !(u > 0.0) {
        return Err(domain(format!("q_sum needs u > 0, got {u}")));
    }
    let n_min = sigma.n_min();
    let n_max = sigma.n_max();
    let mut terms: Vec<f64> = Vec::new();
    let mut value = 0.0;
    for (a, b) in family.blocks() {
        if terms.len() >= opts.k_max || a > opts.a_max || b > n_max {
            break;
        }
        if b < n_min {
            continue;
        }
        let t = block_term(a.max(n_min), b, v, sigma, phi, u)?;
        terms.push(t);
        value += t;
        if terms.len() >= MIN_TERMS_FOR_STOP && t < opts.tol {
            if let Some(res) = tail_estimate(&terms) {
                if res < opts.tol {
                    return Ok(QSum {
                        value,
                        k_used: terms.len(),
                        residual_bound: res,
                        status: QSumStatus::Converged,
                    });
                }
            }
        }
    }
    let k_used = terms.len();
    Ok(match tail_estimate(&terms) {
        Some(res) => QSum {
            value,
            k_used,
            residual_bound: res,
            status: QSumStatus::Truncated,
        },
        None => QSum {
            value,
            k_used,
            residual_bound: f64::INFINITY,
            status: QSumStatus::Divergent,
        },
    })
}

/// Bound on `Σ_{j > K} t_j` extrapolated from the last terms, or `None`
/// when the observed decay is not summable.
///
/// The terms are treated as `t_j ~ (j − 1)^{−a}` with `a` measured over the
/// last octave `[K/2, K]` and lowered by its drift from `[K/4, K/2]`. Faster
/// than polynomial decay shows up as a large `a` and a residual of order `t_K`.
pub fn tail_estimate(terms: &[f64]) -> Option<f64> {
    let k = terms.len();
    if k < MIN_TERMS_FOR_TAIL {
        return None;
    }
    let t = terms[k - 1];
    if t == 0.0 {
        return Some(0.0);
    }
    // Slope of ln t against ln(j − 1) between positions i < j (1-based).
    let slope = |i: usize, j: usize| {
        let (ti, tj) = (terms[i - 1], terms[j - 1]);
        if ti <= 0.0 {
            return f64::NEG_INFINITY;
        }
        if tj <= 0.0 {
            return f64::INFINITY;
        }
        -(tj / ti).ln() / ((j - 1) as f64 / (i - 1) as f64).ln()
    };
    let a2 = slope(k / 2 + 1, k);
    let a1 = slope(k / 4 + 1, k / 2 + 1);
    let a = if a1 > a2 { 2.0 * a2 - a1 } else { a2 };
    if a > 1.0 && a.is_finite() {
        Some(t * (1.0 + (k - 1) as f64 / (a - 1.0)))
    } else {
        None
    }
}
