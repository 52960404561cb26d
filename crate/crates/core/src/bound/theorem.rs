use serde::Serialize;

use super::partition::GeometricFamily;
use super::qsum::{q_sum, QSum, QSumOptions, QSumStatus};
use super::sequences::{NormingSequence, SigmaProfile};
use crate::error::{domain, Error, Result};
use crate::exec::par_map;
use crate::grid::{log_space, require_increasing};
use crate::phi::PhiFunction;
use crate::search::golden_section_max;
use crate::serde_inf;

/// Norming sequence, variance profile and generator of one bound problem.
#[derive(Debug, Clone)]
pub struct BoundProblem {
    pub v: NormingSequence,
    pub sigma: SigmaProfile,
    pub phi: PhiFunction,
}

impl BoundProblem {
    pub fn new(v: NormingSequence, sigma: SigmaProfile, phi: PhiFunction) -> Self {
        BoundProblem { v, sigma, phi }
    }

    /// `Q(R_ratio, v, x)` for the geometric family with the given ratio.
    pub fn q_sum_geometric(&self, ratio: f64, x: f64, opts: &QSumOptions) -> Result<QSum> {
        let family = GeometricFamily::new(ratio)?;
        q_sum(&family, &self.v, &self.sigma, &self.phi, x, opts)
    }
}

/// 12 log-spaced ratios on `[1.05, 16]`.
pub fn default_ratio_grid() -> Vec<f64> {
    log_space(1.05, 16.0, 12)
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundOptions {
    pub ratio_grid: Vec<f64>,
    /// Golden-section steps around the best grid ratio.
    pub refine_iterations: usize,
    pub qsum: QSumOptions,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions {
            ratio_grid: default_ratio_grid(),
            refine_iterations: 3,
            qsum: QSumOptions::default(),
        }
    }
}

/// Best geometric ratio for argument `x` and its block sum.
///
/// Scans `opts.ratio_grid`, then refines in `ln ratio` between the grid
/// neighbours of the best point. A divergent sum everywhere yields a
/// `Divergent` result at the first grid ratio.
pub fn best_geometric(problem: &BoundProblem, x: f64, opts: &BoundOptions) -> Result<(f64, QSum)> {
    let grid = &opts.ratio_grid;
    if grid.is_empty() {
        return Err(domain("ratio grid is empty"));
    }
    if let Some(r) = grid.iter().find(|r| !(**r > 1.0) || !r.is_finite()) {
        return Err(domain(format!("geometric ratios must be > 1, got {r}")));
    }
    let mut sorted = grid.clone();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();

    let mut scan = Vec::with_capacity(sorted.len());
    for &ratio in &sorted {
        scan.push(problem.q_sum_geometric(ratio, x, &opts.qsum)?);
    }
    let (i, _) = scan
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.bound().total_cmp(&b.1.bound()))
        .expect("nonempty grid");
    let (mut best_ratio, mut best) = (sorted[i], scan[i]);
    if best.status == QSumStatus::Divergent || opts.refine_iterations == 0 {
        return Ok((best_ratio, best));
    }

    let lo = sorted[i.saturating_sub(1)];
    let hi = sorted[(i + 1).min(sorted.len() - 1)];
    if hi > lo {
        let mut failure = None;
        let mut evaluated: Vec<(f64, QSum)> = Vec::new();
        golden_section_max(
            |ln_r| {
                let ratio = ln_r.exp();
                match problem.q_sum_geometric(ratio, x, &opts.qsum) {
                    Ok(s) => {
                        let b = s.bound();
                        evaluated.push((ratio, s));
                        -b
                    }
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::NEG_INFINITY
                    }
                }
            },
            lo.ln(),
            hi.ln(),
            opts.refine_iterations,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        for (ratio, s) in evaluated {
            if s.bound() < best.bound() {
                best_ratio = ratio;
                best = s;
            }
        }
    }
    Ok((best_ratio, best))
}

/// `inf_R Q(R, v, C·u)` over the geometric family, per `u`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub phi: String,
    pub norming: String,
    pub sigma: String,
    pub c_used: f64,
    pub u_grid: Vec<f64>,
    /// Running minimum of `raw_bounds` along increasing `u`.
    #[serde(with = "serde_inf::vec")]
    pub bounds: Vec<f64>,
    #[serde(with = "serde_inf::vec")]
    pub raw_bounds: Vec<f64>,
    /// Ratio attaining `bounds[i]`.
    pub chosen_ratio: Vec<f64>,
    pub k_used: Vec<usize>,
    #[serde(with = "serde_inf::vec")]
    pub residual_bound: Vec<f64>,
    pub status: Vec<QSumStatus>,
    pub tolerance: f64,
    /// Every point converged with residual below tolerance.
    pub converged: bool,
}

impl BoundReport {
    /// Index of the smallest bound.
    pub fn argmin(&self) -> usize {
        self.bounds
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }
}

pub fn theorem_bound(problem: &BoundProblem, u_grid: &[f64], c: f64, opts: &BoundOptions) -> Result<BoundReport> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(domain(format!("constant C must be positive, got {c}")));
    }
    if u_grid.is_empty() {
        return Err(domain("u grid is empty"));
    }
    if let Some(u) = u_grid.iter().find(|u| !(**u > 0.0)) {
        return Err(domain(format!("u grid must be positive, got {u}")));
    }
    require_increasing(u_grid, "u grid")?;

    let points = par_map(u_grid, |&u| best_geometric(problem, c * u, opts));
    let points = points.into_iter().collect::<Result<Vec<_>>>()?;
    if points.iter().all(|(_, s)| s.status == QSumStatus::Divergent) {
        return Err(Error::AllDivergent);
    }

    let n = u_grid.len();
    let mut report = BoundReport {
        phi: problem.phi.label().to_string(),
        norming: problem.v.id(),
        sigma: sigma_id(&problem.sigma),
        c_used: c,
        u_grid: u_grid.to_vec(),
        bounds: Vec::with_capacity(n),
        raw_bounds: Vec::with_capacity(n),
        chosen_ratio: Vec::with_capacity(n),
        k_used: Vec::with_capacity(n),
        residual_bound: Vec::with_capacity(n),
        status: Vec::with_capacity(n),
        tolerance: opts.qsum.tol,
        converged: true,
    };
    let mut carried: Option<(f64, QSum)> = None;
    for (ratio, s) in points {
        report.raw_bounds.push(s.bound());
        // Q(R, v, ·) is nonincreasing for fixed R, so an earlier optimum
        // still bounds the current point.
        let (ratio, s) = match carried {
            Some((cr, cs)) if cs.bound() < s.bound() => (cr, cs),
            _ => (ratio, s),
        };
        carried = Some((ratio, s));
        report.bounds.push(s.bound());
        report.chosen_ratio.push(ratio);
        report.k_used.push(s.k_used);
        report.residual_bound.push(s.residual_bound);
        report.status.push(s.status);
        report.converged &= s.status == QSumStatus::Converged;
    }
    Ok(report)
}

fn sigma_id(sigma: &SigmaProfile) -> String {
    match sigma {
        SigmaProfile::Chaos { d } => format!("chaos:d={d}"),
        SigmaProfile::WeightedIid { beta } => format!("weightedA:beta={beta}"),
        SigmaProfile::PowerLaw { gamma, slow } => format!("powerlaw:gamma={gamma}:{slow:?}").to_lowercase(),
        SigmaProfile::Table { values } => format!("table:len={}", values.len()),
    }
}

/// Largest relative residual accepted by [`rate_check`].
pub const RATE_FIT_TOLERANCE: f64 = 0.10;

/// Fit of `ln bound(u) ≈ −Ĉ u^r` through the origin.
#[derive(Debug, Clone, Serialize)]
pub struct RateFit {
    pub r: f64,
    pub c_hat: f64,
    pub max_rel_residual: f64,
    pub passed: bool,
    pub u_grid: Vec<f64>,
    #[serde(with = "serde_inf::vec")]
    pub bounds: Vec<f64>,
}

/// Checks that the optimized bound with `v = v_r` decays like
/// `exp(−Ĉ u^r)`. Requires a generator whose conjugate grows like `x^r`
/// and a regularly varying `σ` (power law or chaos).
pub fn rate_check(
    phi: &PhiFunction,
    sigma: &SigmaProfile,
    r: f64,
    u_grid: &[f64],
    c: f64,
    opts: &BoundOptions,
) -> Result<RateFit> {
    if !(r > 0.0) {
        return Err(Error::Precondition(format!("rate exponent r must be positive, got {r}")));
    }
    match phi.tail_exponent() {
        Some(e) if (e - r).abs() <= 1e-9 * r.max(1.0) => {}
        Some(e) => {
            return Err(Error::Precondition(format!(
                "phi* of {} grows like x^{e}, not x^{r}",
                phi.label()
            )))
        }
        None => {
            return Err(Error::Precondition(format!(
                "tail exponent of {} is unknown",
                phi.label()
            )))
        }
    }
    if !matches!(sigma, SigmaProfile::PowerLaw { .. } | SigmaProfile::Chaos { .. }) {
        return Err(Error::Precondition(
            "rate check needs a power-law or chaos sigma profile".into(),
        ));
    }
    let problem = BoundProblem::new(NormingSequence::iterated_log(r)?, sigma.clone(), phi.clone());
    let report = theorem_bound(&problem, u_grid, c, opts)?;
    if let Some(i) = report.bounds.iter().position(|b| *b == 0.0 || !b.is_finite()) {
        return Err(Error::Precondition(format!(
            "bound at u = {} is {} and has no usable logarithm; move the u grid or C",
            u_grid[i], report.bounds[i]
        )));
    }

    let xs: Vec<f64> = u_grid.iter().map(|u| u.powf(r)).collect();
    let ys: Vec<f64> = report.bounds.iter().map(|b| b.ln()).collect();
    let (sxy, sxx) = xs
        .iter()
        .zip(&ys)
        .fold((0.0, 0.0), |(sxy, sxx), (x, y)| (sxy + x * y, sxx + x * x));
    let c_hat = -sxy / sxx;
    let max_rel_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y + c_hat * x).abs() / y.abs())
        .fold(0.0, f64::max);
    Ok(RateFit {
        r,
        c_hat,
        max_rel_residual,
        passed: max_rel_residual < RATE_FIT_TOLERANCE,
        u_grid: u_grid.to_vec(),
        bounds: report.bounds,
    })
}

/// `P(S(n₀)/σ(n₀) > u v(n₀))`, a lower bound for `W(v; u)`.
pub fn lower_bound_single_n<F: Fn(f64) -> f64>(tail_at_n0: F, n0: u64, v: &NormingSequence, u: f64) -> f64 {
    tail_at_n0(u * v.eval(n0 as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bound::sequences::SlowlyVarying;

    fn d1_problem() -> BoundProblem {
        BoundProblem::new(
            NormingSequence::iterated_log(2.0).unwrap(),
            SigmaProfile::power_law(0.5, SlowlyVarying::One).unwrap(),
            PhiFunction::quadratic(),
        )
    }

    #[test]
    fn singleton_grid_equals_q_sum() {
        let p = d1_problem();
        let opts = BoundOptions {
            ratio_grid: vec![3.0],
            ..BoundOptions::default()
        };
        let rep = theorem_bound(&p, &[2.0, 3.0], 1.0, &opts).unwrap();
        for (i, u) in [2.0, 3.0].iter().enumerate() {
            let direct = p.q_sum_geometric(3.0, *u, &opts.qsum).unwrap().bound();
            assert_eq!(rep.raw_bounds[i], direct);
        }
    }

    #[test]
    fn bounds_decrease_in_u() {
        let p = d1_problem();
        let rep = theorem_bound(&p, &[2.0, 3.0, 4.0], 1.0, &BoundOptions::default()).unwrap();
        assert!(rep.bounds.iter().all(|b| b.is_finite()));
        assert!(rep.bounds.windows(2).all(|w| w[1] <= w[0]));
        assert!(rep.bounds[2] < rep.bounds[0]);
    }

    #[test]
    fn all_divergent_is_an_error() {
        let p = BoundProblem::new(
            NormingSequence::constant(1.0).unwrap(),
            SigmaProfile::power_law(0.5, SlowlyVarying::One).unwrap(),
            PhiFunction::quadratic(),
        );
        let err = theorem_bound(&p, &[1.0, 2.0], 1.0, &BoundOptions::default()).unwrap_err();
        assert!(matches!(err, Error::AllDivergent));
    }

    #[test]
    fn rate_check_preconditions() {
        let sigma = SigmaProfile::power_law(0.5, SlowlyVarying::One).unwrap();
        let phi3 = PhiFunction::power(3.0).unwrap();
        let opts = BoundOptions::default();
        let err = rate_check(&phi3, &sigma, 1.0, &[3.0, 4.0], 1.0, &opts).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
        let err = rate_check(&PhiFunction::quadratic(), &sigma, 0.0, &[3.0], 1.0, &opts).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
        // The bound, about exp(−0.08 u²), underflows before u = 200.
        let err = rate_check(&PhiFunction::quadratic(), &sigma, 2.0, &[10.0, 200.0], 1.0, &opts).unwrap_err();
        assert!(matches!(err, Error::Precondition(ref m) if m.contains("u = 200")));
    }

    #[test]
    fn single_n_lower_bound() {
        let one = NormingSequence::constant(1.0).unwrap();
        let two_point = |x: f64| if x < 1.0 { 0.5 } else { 0.0 };
        assert_eq!(lower_bound_single_n(two_point, 5, &one, 0.5), 0.5);
    }
}
