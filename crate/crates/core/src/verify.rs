//! Monte Carlo and exhaustive estimates of
//! `W(v; u) = P(sup_{n ≤ N} S(n)/(σ(n) v(n)) > u)` and of its two-sided
//! variant `W₊`, calibration of the constant `C`, the Doob moment check and
//! iterated-logarithm trajectory statistics.
//!
//! Path `i` of a run with master seed `s` draws from
//! `ChaCha8Rng::seed_from_u64(mix_seed(s, i))`, so results do not depend on
//! how paths are scheduled across threads.

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use serde::Serialize;

use crate::bound::{lower_bound_single_n, theorem_bound, BoundOptions, BoundProblem, NormingSequence};
use crate::error::{domain, Error, Result};
use crate::exec::par_map;
use crate::models::{MartingaleModel, ModelKind, ModelState, NoiseSource};
use crate::search::bisect_sign_change;
use crate::serde_inf;

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.575_829_303_548_901;
/// Tail counts below this are reported as censored.
pub const CENSOR_COUNT: u64 = 10;
/// Largest horizon for exhaustive enumeration.
pub const MAX_ENUM_HORIZON: u64 = 20;

const CHUNK: usize = 512;

/// SplitMix64 finalizer applied to `seed + (index + 1)·γ`,
/// `γ = 0x9E3779B97F4A7C15`.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix_seed(seed, index))
}

/// Wilson score interval for `k` successes in `m` trials.
pub fn wilson_interval(k: u64, m: u64, z: f64) -> (f64, f64) {
    if m == 0 {
        return (0.0, 1.0);
    }
    let n = m as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k == m { 1.0 } else { (centre + half).min(1.0) };
    (lo.min(p), hi.max(p))
}

/// Empirical or exact sup-tail probabilities on a `u` grid.
#[derive(Debug, Clone, Serialize)]
pub struct TailEstimate {
    pub model: String,
    pub norming: String,
    /// Sup over `n ∈ [n_min, horizon]`.
    pub horizon: u64,
    pub n_min: u64,
    /// Number of paths (`2^horizon` when exact).
    pub paths: u64,
    pub seed: u64,
    /// Full enumeration: `w_hat = counts / paths` exactly.
    pub exact: bool,
    pub u_grid: Vec<f64>,
    pub counts: Vec<u64>,
    pub counts_plus: Vec<u64>,
    pub w_hat: Vec<f64>,
    pub w_plus_hat: Vec<f64>,
    pub ci_low: Vec<f64>,
    pub ci_high: Vec<f64>,
    pub ci_plus_low: Vec<f64>,
    pub ci_plus_high: Vec<f64>,
    /// `counts < 10` (Monte Carlo only).
    pub censored: Vec<bool>,
}

impl TailEstimate {
    fn from_maxima(
        header: (&MartingaleModel, &NormingSequence, u64, u64, bool),
        u_grid: &[f64],
        mut maxima: Vec<f64>,
        mut maxima_abs: Vec<f64>,
    ) -> Self {
        let (model, v, horizon, seed, exact) = header;
        maxima.sort_by(f64::total_cmp);
        maxima_abs.sort_by(f64::total_cmp);
        let m = maxima.len() as u64;
        let above = |sorted: &[f64], u: f64| (sorted.len() - sorted.partition_point(|x| *x <= u)) as u64;
        let counts: Vec<u64> = u_grid.iter().map(|&u| above(&maxima, u)).collect();
        let counts_plus: Vec<u64> = u_grid.iter().map(|&u| above(&maxima_abs, u)).collect();
        let ci = |k: u64| {
            if exact {
                let p = k as f64 / m as f64;
                (p, p)
            } else {
                wilson_interval(k, m, Z99)
            }
        };
        let (ci_low, ci_high): (Vec<f64>, Vec<f64>) = counts.iter().map(|&k| ci(k)).unzip();
        let (ci_plus_low, ci_plus_high): (Vec<f64>, Vec<f64>) = counts_plus.iter().map(|&k| ci(k)).unzip();
        TailEstimate {
            model: model.id(),
            norming: v.id(),
            horizon,
            n_min: model.n_min(),
            paths: m,
            seed,
            exact,
            u_grid: u_grid.to_vec(),
            w_hat: counts.iter().map(|&k| k as f64 / m as f64).collect(),
            w_plus_hat: counts_plus.iter().map(|&k| k as f64 / m as f64).collect(),
            censored: counts.iter().map(|&k| !exact && k < CENSOR_COUNT).collect(),
            counts,
            counts_plus,
            ci_low,
            ci_high,
            ci_plus_low,
            ci_plus_high,
        }
    }

    /// Every grid point is censored.
    pub fn all_censored(&self) -> bool {
        self.censored.iter().all(|c| *c)
    }
}

/// `1/(σ(n) v(n))` for `n ∈ [n_min, horizon]`.
fn inverse_denominators(model: &MartingaleModel, v: &NormingSequence, horizon: u64) -> Result<Vec<f64>> {
    let n_min = model.n_min();
    if horizon < n_min {
        return Err(domain(format!(
            "horizon {horizon} is below the first non-degenerate index {n_min} of {}",
            model.id()
        )));
    }
    (n_min..=horizon)
        .map(|n| {
            let den = model.sigma(n) * v.eval(n as f64);
            if den > 0.0 && den.is_finite() {
                Ok(1.0 / den)
            } else {
                Err(Error::DegenerateSigma { n })
            }
        })
        .collect()
}

/// Running maxima of `S(n)/(σ v)` and `|S(n)|/(σ v)` along one path.
struct Extremes {
    max: f64,
    max_abs: f64,
}

impl Extremes {
    fn new() -> Self {
        Extremes {
            max: f64::NEG_INFINITY,
            max_abs: f64::NEG_INFINITY,
        }
    }

    fn record(&mut self, z: f64) {
        self.max = self.max.max(z);
        self.max_abs = self.max_abs.max(z.abs());
    }
}

fn simulate_path(model: &MartingaleModel, inv_den: &[f64], seed: u64, index: u64) -> Result<Extremes> {
    let n_min = model.n_min();
    let horizon = n_min + inv_den.len() as u64 - 1;
    let mut src = NoiseSource::new(path_rng(seed, index));
    let mut ext = Extremes::new();
    if let ModelKind::Chaos { d: 1 } = model.kind {
        // Simple random walk fast path.
        let mut s = 0i64;
        for w in inv_den {
            s += src.sign() as i64;
            ext.record(s as f64 * w);
        }
        return Ok(ext);
    }
    let mut state = model.initial_state();
    for n in 1..=horizon {
        let noise = model.draw_noise(&mut src);
        let s = model.step(&mut state, noise)?;
        if n >= n_min {
            ext.record(s * inv_den[(n - n_min) as usize]);
        }
    }
    Ok(ext)
}

/// Monte Carlo estimate of `W(v; u)` and `W₊(v; u)` with the sup truncated
/// at `horizon`; Wilson 99% intervals.
pub fn empirical_sup_tail(
    model: &MartingaleModel,
    v: &NormingSequence,
    horizon: u64,
    paths: u64,
    u_grid: &[f64],
    seed: u64,
) -> Result<TailEstimate> {
    if paths == 0 {
        return Err(domain("number of paths must be positive"));
    }
    let inv_den = inverse_denominators(model, v, horizon)?;
    let starts: Vec<u64> = (0..paths).step_by(CHUNK).collect();
    let chunks = par_map(&starts, |&start| {
        let end = (start + CHUNK as u64).min(paths);
        (start..end)
            .map(|i| simulate_path(model, &inv_den, seed, i))
            .collect::<Result<Vec<_>>>()
    });
    let mut maxima = Vec::with_capacity(paths as usize);
    let mut maxima_abs = Vec::with_capacity(paths as usize);
    for chunk in chunks {
        for e in chunk? {
            maxima.push(e.max);
            maxima_abs.push(e.max_abs);
        }
    }
    Ok(TailEstimate::from_maxima(
        (model, v, horizon, seed, false),
        u_grid,
        maxima,
        maxima_abs,
    ))
}

fn require_enumerable(model: &MartingaleModel, horizon: u64) -> Result<()> {
    if !model.is_enumerable() {
        return Err(Error::Precondition(format!(
            "{} has continuous noise and cannot be enumerated",
            model.id()
        )));
    }
    if horizon > MAX_ENUM_HORIZON {
        return Err(Error::SizeLimit(format!(
            "enumeration horizon {horizon} exceeds {MAX_ENUM_HORIZON}"
        )));
    }
    Ok(())
}

/// Visits all `2^horizon` sign paths; `leaf` receives the sequence
/// `S(1), …, S(horizon)` of each.
fn for_each_path<F: FnMut(&[f64])>(model: &MartingaleModel, horizon: u64, mut leaf: F) -> Result<()> {
    fn walk<F: FnMut(&[f64])>(
        model: &MartingaleModel,
        state: &ModelState,
        values: &mut Vec<f64>,
        remaining: u64,
        leaf: &mut F,
    ) -> Result<()> {
        if remaining == 0 {
            leaf(values);
            return Ok(());
        }
        for eps in [1.0, -1.0] {
            let mut next = state.clone();
            values.push(model.step(&mut next, eps)?);
            walk(model, &next, values, remaining - 1, leaf)?;
            values.pop();
        }
        Ok(())
    }
    let mut values = Vec::with_capacity(horizon as usize);
    walk(model, &model.initial_state(), &mut values, horizon, &mut leaf)
}

/// Exact `W(v; u)` and `W₊(v; u)` by enumerating all `2^horizon` sign paths
/// (`horizon ≤ 20`).
pub fn exact_sup_tail_small(
    model: &MartingaleModel,
    v: &NormingSequence,
    horizon: u64,
    u_grid: &[f64],
) -> Result<TailEstimate> {
    require_enumerable(model, horizon)?;
    let inv_den = inverse_denominators(model, v, horizon)?;
    let n_min = model.n_min() as usize;
    let mut maxima = Vec::with_capacity(1 << horizon);
    let mut maxima_abs = Vec::with_capacity(1 << horizon);
    for_each_path(model, horizon, |s| {
        let mut ext = Extremes::new();
        for (s, w) in s[n_min - 1..].iter().zip(&inv_den) {
            ext.record(s * w);
        }
        maxima.push(ext.max);
        maxima_abs.push(ext.max_abs);
    })?;
    Ok(TailEstimate::from_maxima((model, v, horizon, 0, true), u_grid, maxima, maxima_abs))
}

/// Exact law of `S(n₀)/σ(n₀)` as atoms `(z, probability)` sorted by `z`.
#[derive(Debug, Clone, Serialize)]
pub struct SingleNTail {
    pub n0: u64,
    atoms: Vec<(f64, f64)>,
}

impl SingleNTail {
    /// Degree-1 chaos: `S(n₀) = 2B − n₀` with `B ~ Binomial(n₀, 1/2)`.
    pub fn simple_walk(n0: u64) -> Result<Self> {
        if n0 == 0 {
            return Err(domain("n0 must be positive"));
        }
        let n = n0 as f64;
        let ln_norm = libm::lgamma(n + 1.0) - n * std::f64::consts::LN_2;
        let atoms = (0..=n0)
            .map(|k| {
                let k = k as f64;
                let ln_p = ln_norm - libm::lgamma(k + 1.0) - libm::lgamma(n - k + 1.0);
                ((2.0 * k - n) / n.sqrt(), ln_p.exp())
            })
            .collect();
        Ok(SingleNTail { n0, atoms })
    }

    /// Any enumerable model, `n₀ ≤ 20`.
    pub fn enumerate(model: &MartingaleModel, n0: u64) -> Result<Self> {
        require_enumerable(model, n0)?;
        let sigma = model.sigma(n0);
        if !(sigma > 0.0) {
            return Err(Error::DegenerateSigma { n: n0 });
        }
        let mut zs = Vec::with_capacity(1 << n0);
        for_each_path(model, n0, |s| zs.push(s[s.len() - 1] / sigma))?;
        zs.sort_by(f64::total_cmp);
        let p = 1.0 / zs.len() as f64;
        let mut atoms: Vec<(f64, f64)> = Vec::new();
        for z in zs {
            match atoms.last_mut() {
                Some(last) if last.0 == z => last.1 += p,
                _ => atoms.push((z, p)),
            }
        }
        Ok(SingleNTail { n0, atoms })
    }

    /// `P(S(n₀)/σ(n₀) > x)`.
    pub fn tail(&self, x: f64) -> f64 {
        let i = self.atoms.partition_point(|(z, _)| *z <= x);
        self.atoms[i..].iter().map(|(_, p)| p).sum::<f64>().min(1.0)
    }
}

/// Exact single-index lower bounds `max_{n₀} P(S(n₀)/σ(n₀) > u v(n₀)) ≤ W(v; u)`
/// over a set of candidate indices `n₀ ≤ horizon`.
#[derive(Debug, Clone)]
pub struct SingleNLowerBound {
    tails: Vec<SingleNTail>,
}

impl SingleNLowerBound {
    /// Degree-1 chaos uses binomial laws at 64 log-spaced indices; other
    /// enumerable models use every index up to `min(horizon, 16)`. Models
    /// with continuous noise get the trivial bound 0.
    pub fn new(model: &MartingaleModel, horizon: u64) -> Result<Self> {
        let n_min = model.n_min();
        let mut tails = Vec::new();
        if horizon >= n_min {
            if let ModelKind::Chaos { d: 1 } = model.kind {
                let mut idx: Vec<u64> = crate::grid::log_space(1.0, horizon as f64, 64)
                    .into_iter()
                    .map(|x| (x.round() as u64).clamp(1, horizon))
                    .collect();
                idx.dedup();
                for n0 in idx {
                    tails.push(SingleNTail::simple_walk(n0)?);
                }
            } else if model.is_enumerable() {
                for n0 in n_min..=horizon.min(16) {
                    tails.push(SingleNTail::enumerate(model, n0)?);
                }
            }
        }
        Ok(SingleNLowerBound { tails })
    }

    /// Best lower bound at `u` and the index attaining it.
    pub fn at(&self, v: &NormingSequence, u: f64) -> (f64, u64) {
        self.tails
            .iter()
            .map(|t| (lower_bound_single_n(|x| t.tail(x), t.n0, v, u), t.n0))
            .fold((0.0, 0), |best, c| if c.0 > best.0 { c } else { best })
    }
}

/// Largest `C` with `inf_R Q(R, v, C u) ≥ ci_high(u)` on the whole grid.
#[derive(Debug, Clone, Serialize)]
pub struct CalibrationResult {
    pub c_hat: f64,
    pub u_grid: Vec<f64>,
    /// `min_u bound(C_hat u) / ci_high(u)`.
    #[serde(with = "serde_inf")]
    pub margin: f64,
    #[serde(with = "serde_inf::vec")]
    pub bounds: Vec<f64>,
    pub ci_high: Vec<f64>,
    pub c_min: f64,
    pub c_max: f64,
    pub iterations: usize,
}

pub const CALIBRATION_RANGE: (f64, f64) = (0.01, 100.0);

/// Theorem bound at `C·u`, with an all-divergent sum read as `+∞`.
pub fn bounds_at(problem: &BoundProblem, u_grid: &[f64], c: f64, opts: &BoundOptions) -> Result<Vec<f64>> {
    match theorem_bound(problem, u_grid, c, opts) {
        Ok(r) => Ok(r.bounds),
        Err(Error::AllDivergent) => Ok(vec![f64::INFINITY; u_grid.len()]),
        Err(e) => Err(e),
    }
}

/// Bisection on `ln C` over `[0.01, 100]` to 1% relative precision.
pub fn calibrate_c(estimate: &TailEstimate, problem: &BoundProblem, opts: &BoundOptions) -> Result<CalibrationResult> {
    let u_grid = &estimate.u_grid;
    let (c_min, c_max) = CALIBRATION_RANGE;
    let mut failure = None;
    let mut dominates = |c: f64| match bounds_at(problem, u_grid, c, opts) {
        Ok(b) => b.iter().zip(&estimate.ci_high).all(|(b, h)| b >= h),
        Err(e) => {
            failure.get_or_insert(e);
            false
        }
    };
    if !dominates(c_min) {
        return Err(failure.unwrap_or_else(|| {
            Error::Calibration(format!("the bound at C = {c_min} does not dominate the upper confidence limits"))
        }));
    }
    if dominates(c_max) {
        return Err(Error::Calibration(format!(
            "the bound still dominates at C = {c_max}; widen the range"
        )));
    }
    let b = bisect_sign_change(|ln_c| dominates(ln_c.exp()), c_min.ln(), c_max.ln(), 0.0, 1.01f64.ln(), 64);
    if let Some(e) = failure {
        return Err(e);
    }
    let c_hat = b.lo.exp();
    let bounds = bounds_at(problem, u_grid, c_hat, opts)?;
    let margin = bounds
        .iter()
        .zip(&estimate.ci_high)
        .map(|(b, h)| b / h)
        .fold(f64::INFINITY, f64::min);
    Ok(CalibrationResult {
        c_hat,
        u_grid: u_grid.clone(),
        margin,
        bounds,
        ci_high: estimate.ci_high.clone(),
        c_min,
        c_max,
        iterations: b.iterations,
    })
}

/// `E max_{n ≤ N} S(n)²` against `E S(N)²` by enumeration.
#[derive(Debug, Clone, Serialize)]
pub struct DoobReport {
    pub model: String,
    pub horizon: u64,
    pub e_max_sq: f64,
    pub e_final_sq: f64,
    pub ratio: f64,
    /// `(p/(p − 1))² = 4` at `p = 2`.
    pub limit: f64,
    pub passed: bool,
}

pub fn doob_moment_check(model: &MartingaleModel, horizon: u64) -> Result<DoobReport> {
    require_enumerable(model, horizon)?;
    if horizon < model.n_min() {
        return Err(Error::Precondition(format!(
            "S vanishes identically up to n = {horizon}; the check needs a non-trivial martingale"
        )));
    }
    let (mut sum_max, mut sum_final, mut count) = (0.0, 0.0, 0u64);
    for_each_path(model, horizon, |s| {
        sum_max += s.iter().fold(0.0f64, |m, x| m.max(x * x));
        sum_final += s[s.len() - 1].powi(2);
        count += 1;
    })?;
    let e_max_sq = sum_max / count as f64;
    let e_final_sq = sum_final / count as f64;
    let ratio = e_max_sq / e_final_sq;
    let limit = 4.0;
    Ok(DoobReport {
        model: model.id(),
        horizon,
        e_max_sq,
        e_final_sq,
        ratio,
        limit,
        passed: ratio <= limit,
    })
}

/// Linear-interpolated quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Quartiles {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

impl Quartiles {
    fn of(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        Quartiles {
            q1: quantile(&values, 0.25),
            median: quantile(&values, 0.5),
            q3: quantile(&values, 0.75),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LilHorizon {
    pub horizon: u64,
    pub quartiles: Quartiles,
    pub fraction_positive: f64,
}

/// `R(N) = max_{n ≤ N} S_d(n) / (n ln ln(n + 3))^{d/2}` across paths.
#[derive(Debug, Clone, Serialize)]
pub struct LilStats {
    pub d: u32,
    pub paths: u64,
    pub seed: u64,
    /// `2^{d/2}/d!`.
    pub reference: f64,
    pub horizons: Vec<LilHorizon>,
}

fn lil_scale(n: u64, d: u32) -> f64 {
    let n = n as f64;
    (n * (n + 3.0).ln().ln()).powf(d as f64 / 2.0)
}

/// Trajectory statistics for the degree-`d` chaos at each of `horizons`,
/// all read off the same paths.
pub fn lil_trajectory_stats(d: u32, horizons: &[u64], paths: u64, seed: u64) -> Result<LilStats> {
    if !(1..=3).contains(&d) {
        return Err(domain(format!("trajectory statistics need d in 1..=3, got {d}")));
    }
    if horizons.is_empty() || horizons.windows(2).any(|w| w[1] <= w[0]) || horizons[0] == 0 {
        return Err(domain("horizons must be positive and strictly increasing"));
    }
    if paths == 0 {
        return Err(domain("number of paths must be positive"));
    }
    let model = MartingaleModel::chaos(d)?;
    let n_last = *horizons.last().expect("nonempty");
    let inv_scale: Vec<f64> = (1..=n_last).map(|n| 1.0 / lil_scale(n, d)).collect();
    let idx: Vec<u64> = (0..paths).collect();
    let per_path = par_map(&idx, |&i| -> Result<Vec<f64>> {
        let mut src = NoiseSource::new(path_rng(seed, i));
        let mut state = model.initial_state();
        let mut best = f64::NEG_INFINITY;
        let mut out = Vec::with_capacity(horizons.len());
        let mut next = 0;
        for n in 1..=n_last {
            let s = model.step(&mut state, src.sign())?;
            best = best.max(s * inv_scale[(n - 1) as usize]);
            if n == horizons[next] {
                out.push(best);
                next += 1;
            }
        }
        Ok(out)
    });
    let per_path = per_path.into_iter().collect::<Result<Vec<_>>>()?;
    let factorial: f64 = (1..=d).map(|k| k as f64).product();
    let horizons = horizons
        .iter()
        .enumerate()
        .map(|(j, &horizon)| {
            let values: Vec<f64> = per_path.iter().map(|p| p[j]).collect();
            let positive = values.iter().filter(|x| **x > 0.0).count();
            LilHorizon {
                horizon,
                fraction_positive: positive as f64 / paths as f64,
                quartiles: Quartiles::of(values),
            }
        })
        .collect();
    Ok(LilStats {
        d,
        paths,
        seed,
        reference: 2f64.powf(d as f64 / 2.0) / factorial,
        horizons,
    })
}

/// Per-path `Σ₂(n) = Σ ε²` check and `θ₁ = max_n (Σ ε)² / (n ln ln(n + 3))`.
#[derive(Debug, Clone, Serialize)]
pub struct HartmanWintnerProbe {
    pub horizon: u64,
    pub paths: u64,
    pub seed: u64,
    /// `Σ₂(n) = n` on every path and step.
    pub sigma2_exact: bool,
    pub theta1: Quartiles,
    pub theta1_min: f64,
}

pub fn hartman_wintner_probe(horizon: u64, paths: u64, seed: u64) -> Result<HartmanWintnerProbe> {
    if horizon == 0 || paths == 0 {
        return Err(domain("horizon and paths must be positive"));
    }
    let inv_scale: Vec<f64> = (1..=horizon).map(|n| 1.0 / lil_scale(n, 2)).collect();
    let idx: Vec<u64> = (0..paths).collect();
    let per_path = par_map(&idx, |&i| {
        let mut src = NoiseSource::new(path_rng(seed, i));
        let (mut s1, mut s2) = (0i64, 0i64);
        let mut exact = true;
        let mut theta = 0.0f64;
        for (n, w) in (1..=horizon as i64).zip(&inv_scale) {
            let eps = src.sign() as i64;
            s1 += eps;
            s2 += eps * eps;
            exact &= s2 == n;
            theta = theta.max((s1 * s1) as f64 * w);
        }
        (exact, theta)
    });
    let sigma2_exact = per_path.iter().all(|p| p.0);
    let thetas: Vec<f64> = per_path.iter().map(|p| p.1).collect();
    let theta1_min = thetas.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(HartmanWintnerProbe {
        horizon,
        paths,
        seed,
        sigma2_exact,
        theta1: Quartiles::of(thetas),
        theta1_min,
    })
}
