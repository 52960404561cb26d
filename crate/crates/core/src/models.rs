//! Martingales with exact variance profiles: Rademacher chaos, a weighted
//! i.i.d. sum and a power-law-variance Rademacher sum.

use rand_core::RngCore;
use serde::Serialize;

use crate::bound::{SigmaProfile, SlowlyVarying};
use crate::error::{domain, Error, Result};
use crate::phi::PhiFunction;

/// Symmetric unit-variance driving noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Noise {
    Rademacher,
    /// `|η| ∝ (−ln U)^{1/shape}`, so `P(|η| > x)` decays like `exp(−c x^shape)`.
    Weibull { shape: f64 },
}

impl Noise {
    fn id_suffix(&self) -> String {
        match self {
            Noise::Rademacher => String::new(),
            Noise::Weibull { shape } => format!(":weibull={shape}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    /// `S_d(n) = Σ_{i₁<…<i_d≤n} ε(i₁)⋯ε(i_d)`.
    Chaos { d: u32 },
    /// `S(n) = Σ_{k≤n} 2^{−k} ξ(k)` with `sd(ξ) = β`.
    WeightedIid { beta: f64, noise: Noise },
    /// `S(n) = Σ_{k≤n} c_k ε(k)` with `c_k² = k^{2γ} − (k−1)^{2γ}`, so `σ(n) = n^γ`.
    PowerLaw { gamma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MartingaleModel {
    pub kind: ModelKind,
}

impl MartingaleModel {
    pub fn chaos(d: u32) -> Result<Self> {
        if d < 1 {
            return Err(domain("chaos degree must be at least 1"));
        }
        Ok(MartingaleModel {
            kind: ModelKind::Chaos { d },
        })
    }

    pub fn weighted_iid(beta: f64, noise: Noise) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(domain(format!("beta must be positive, got {beta}")));
        }
        if let Noise::Weibull { shape } = noise {
            if !(shape > 0.0) || !shape.is_finite() {
                return Err(domain(format!("Weibull shape must be positive, got {shape}")));
            }
        }
        Ok(MartingaleModel {
            kind: ModelKind::WeightedIid { beta, noise },
        })
    }

    pub fn power_law(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(domain(format!("gamma must be positive, got {gamma}")));
        }
        Ok(MartingaleModel {
            kind: ModelKind::PowerLaw { gamma },
        })
    }

    pub fn id(&self) -> String {
        match self.kind {
            ModelKind::Chaos { d } => format!("chaos:d={d}"),
            ModelKind::WeightedIid { beta, noise } => format!("weightedA:beta={beta}{}", noise.id_suffix()),
            ModelKind::PowerLaw { gamma } => format!("powerlaw:gamma={gamma}"),
        }
    }

    pub fn noise(&self) -> Noise {
        match self.kind {
            ModelKind::WeightedIid { noise, .. } => noise,
            _ => Noise::Rademacher,
        }
    }

    /// All paths can be listed (Rademacher noise).
    pub fn is_enumerable(&self) -> bool {
        self.noise() == Noise::Rademacher
    }

    pub fn sigma_profile(&self) -> SigmaProfile {
        match self.kind {
            ModelKind::Chaos { d } => SigmaProfile::Chaos { d },
            ModelKind::WeightedIid { beta, .. } => SigmaProfile::WeightedIid { beta },
            ModelKind::PowerLaw { gamma } => SigmaProfile::PowerLaw {
                gamma,
                slow: SlowlyVarying::One,
            },
        }
    }

    pub fn sigma(&self, n: u64) -> f64 {
        self.sigma_profile().sigma(n as f64)
    }

    /// First index with nonzero variance.
    pub fn n_min(&self) -> u64 {
        match self.kind {
            ModelKind::Chaos { d } => d as u64,
            _ => 1,
        }
    }

    /// Associated generator: `φ₂` for subgaussian models, the log barrier for
    /// the degree-2 chaos, `|λ|^q/q` with `1/q + 1/shape = 1` for Weibull
    /// noise with `shape > 1`. `None` when no Φ-class generator fits.
    pub fn phi(&self) -> Option<PhiFunction> {
        match self.kind {
            ModelKind::Chaos { d: 1 } | ModelKind::PowerLaw { .. } => Some(PhiFunction::quadratic()),
            ModelKind::Chaos { d: 2 } => Some(PhiFunction::log_barrier()),
            ModelKind::Chaos { .. } => None,
            ModelKind::WeightedIid { noise, .. } => match noise {
                Noise::Rademacher => Some(PhiFunction::quadratic()),
                Noise::Weibull { shape } if shape > 1.0 => PhiFunction::power(shape / (shape - 1.0)).ok(),
                Noise::Weibull { .. } => None,
            },
        }
    }

    pub fn initial_state(&self) -> ModelState {
        match self.kind {
            ModelKind::Chaos { d } => ModelState::Chaos(ChaosState::new(d)),
            _ => ModelState::Sum { n: 0, s: 0.0 },
        }
    }

    /// Advances by one step with unit-variance noise draw `noise` (`±1` for
    /// Rademacher models) and returns the new `S(n)`.
    pub fn step(&self, state: &mut ModelState, noise: f64) -> Result<f64> {
        match (self.kind, state) {
            (ModelKind::Chaos { .. }, ModelState::Chaos(c)) => {
                let eps = if noise > 0.0 { 1 } else { -1 };
                c.push(eps)?;
                Ok(c.value() as f64)
            }
            (ModelKind::WeightedIid { beta, .. }, ModelState::Sum { n, s }) => {
                *n += 1;
                *s += beta * (-(*n as f64)).exp2() * noise;
                Ok(*s)
            }
            (ModelKind::PowerLaw { gamma }, ModelState::Sum { n, s }) => {
                *n += 1;
                *s += power_law_weight(gamma, *n) * noise;
                Ok(*s)
            }
            _ => Err(Error::Precondition("state does not belong to this model".into())),
        }
    }

    /// One unit-variance noise draw.
    pub fn draw_noise<R: RngCore>(&self, source: &mut NoiseSource<R>) -> f64 {
        match self.noise() {
            Noise::Rademacher => source.sign(),
            Noise::Weibull { shape } => {
                let scale = 1.0 / libm::tgamma(1.0 + 2.0 / shape).sqrt();
                let magnitude = (-source.open_unit().ln()).powf(1.0 / shape);
                source.sign() * scale * magnitude
            }
        }
    }
}

/// `c_k = √(k^{2γ} − (k−1)^{2γ})`.
pub fn power_law_weight(gamma: f64, k: u64) -> f64 {
    let k = k as f64;
    (k.powf(2.0 * gamma) - (k - 1.0).powf(2.0 * gamma)).sqrt()
}

/// `σ(n) = n^γ M(n)` for bound experiments detached from a model.
pub fn power_law_surrogate(gamma: f64, slow: SlowlyVarying) -> Result<SigmaProfile> {
    SigmaProfile::power_law(gamma, slow)
}

/// Per-path state of a [`MartingaleModel`].
#[derive(Debug, Clone, PartialEq)]
pub enum ModelState {
    Chaos(ChaosState),
    Sum { n: u64, s: f64 },
}

/// Elementary symmetric polynomials `e[j]` of `ε(1), …, ε(n)`, `j ≤ d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChaosState {
    e: Vec<i128>,
    n: u64,
}

impl ChaosState {
    pub fn new(d: u32) -> Self {
        let mut e = vec![0i128; d as usize + 1];
        e[0] = 1;
        ChaosState { e, n: 0 }
    }

    pub fn degree(&self) -> u32 {
        (self.e.len() - 1) as u32
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn e(&self) -> &[i128] {
        &self.e
    }

    /// `S_d(n) = e[d]`.
    pub fn value(&self) -> i128 {
        self.e[self.e.len() - 1]
    }

    /// `e_j(n) = e_j(n−1) + ε(n) e_{j−1}(n−1)`.
    pub fn push(&mut self, eps: i8) -> Result<()> {
        let eps = eps as i128;
        for j in (1..self.e.len()).rev() {
            self.e[j] = self.e[j]
                .checked_add(eps * self.e[j - 1])
                .ok_or_else(|| Error::SizeLimit(format!("chaos state overflow at n = {}", self.n + 1)))?;
        }
        self.n += 1;
        Ok(())
    }
}

/// Checks `2 S₂(n) = (Σ ε)² − Σ ε²` in integers over the first `n` signs.
pub fn chaos_identity_check(path: &[i8], n: usize) -> bool {
    let path = &path[..n.min(path.len())];
    let mut state = ChaosState::new(2);
    let (mut sum1, mut sum2) = (0i128, 0i128);
    for &eps in path {
        if state.push(eps).is_err() {
            return false;
        }
        sum1 += eps as i128;
        sum2 += (eps as i128) * (eps as i128);
    }
    2 * state.value() == sum1 * sum1 - sum2
}

/// Random signs and uniforms from a 64-bit generator, one bit per sign.
pub struct NoiseSource<R> {
    rng: R,
    bits: u64,
    left: u32,
}

impl<R: RngCore> NoiseSource<R> {
    pub fn new(rng: R) -> Self {
        NoiseSource { rng, bits: 0, left: 0 }
    }

    pub fn sign(&mut self) -> f64 {
        if self.left == 0 {
            self.bits = self.rng.next_u64();
            self.left = 64;
        }
        let bit = self.bits & 1;
        self.bits >>= 1;
        self.left -= 1;
        if bit == 1 {
            1.0
        } else {
            -1.0
        }
    }

    /// Uniform on `(0, 1]`.
    pub fn open_unit(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
