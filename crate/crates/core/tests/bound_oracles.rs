use lilbound::bound::{
    best_geometric, block_term, geometric_partition, q_sum, q_term, rate_check, theorem_bound, BlockFamily,
    BoundOptions, BoundProblem, NormingSequence, Partition, QSumOptions, SigmaProfile, SlowlyVarying,
};
use lilbound::grid::log_space;
use lilbound::phi::PhiFunction;
use proptest::prelude::*;

fn lil_problem() -> BoundProblem {
    BoundProblem::new(
        NormingSequence::iterated_log(2.0).unwrap(),
        SigmaProfile::power_law(0.5, SlowlyVarying::One).unwrap(),
        PhiFunction::quadratic(),
    )
}

/// Independent term for φ₂, σ = √n, v = v₂: `exp(−u²/2 · (a/b) · ln ln(a+3))`.
fn lil_term(a: f64, b: f64, u: f64) -> f64 {
    (-0.5 * u * u * (a / b) * (a + 3.0).ln().ln()).exp()
}

#[test]
fn q_term_matches_hand_evaluation() {
    let p = lil_problem();
    let partition = geometric_partition(3.0, 3).unwrap();
    let t = q_term(2, &partition, &p.v, &p.sigma, &p.phi, 2.0).unwrap();
    let oracle = (-2.0 * 3.0 * 6f64.ln().ln() / 8.0).exp();
    assert!((t - oracle).abs() < 1e-14, "{t} vs {oracle}");
    assert!(q_term(4, &partition, &p.v, &p.sigma, &p.phi, 2.0).is_err());
    assert!(q_term(1, &partition, &p.v, &p.sigma, &p.phi, 0.0).is_err());
}

/// Kahan-compensated running sum.
#[derive(Default)]
struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

#[test]
fn truncated_sum_brackets_the_deep_sum() {
    let (u, ratio, deep_k) = (3.0, 3.0, 10_000usize);
    let p = lil_problem();
    let opts = QSumOptions { tol: 1e-12, ..QSumOptions::default() };
    let s = p.q_sum_geometric(ratio, u, &opts).unwrap();

    // Integer block ends while exact, log space afterwards where
    // a/b = 1/Q to double precision.
    let mut a_exact: Vec<u64> = vec![1];
    while a_exact.len() < 30 {
        let prev = *a_exact.last().unwrap();
        a_exact.push((prev + 2).max(3u64.pow(a_exact.len() as u32)));
    }
    let mut deep = Kahan::default();
    let mut head = Kahan::default();
    for k in 1..=deep_k {
        let t = if k < a_exact.len() {
            lil_term(a_exact[k - 1] as f64, (a_exact[k] - 1) as f64, u)
        } else {
            let ln_a = (k - 1) as f64 * ratio.ln();
            (-0.5 * u * u / ratio * ln_a.ln()).exp()
        };
        deep.add(t);
        if k == s.k_used {
            head = Kahan { sum: deep.sum, c: deep.c };
        }
    }
    // Σ_{k > K} ((k−1) ln Q)^{−u²/(2Q)} ≥ ∫_K^∞ (x ln Q)^{−e} dx.
    let e = 0.5 * u * u / ratio;
    let tail_lower = ratio.ln().powf(-e) * (deep_k as f64).powf(1.0 - e) / (e - 1.0);
    let full = deep.sum + tail_lower;

    assert!((s.value - head.sum).abs() <= 1e-12 * head.sum, "{} vs {}", s.value, head.sum);
    assert!(s.value <= full);
    assert!(s.bound() >= full, "bound {} < oracle {full}", s.bound());
    assert!(s.bound().is_finite());
}

#[test]
fn refined_optimum_matches_exhaustive_ratio_scan() {
    let p = lil_problem();
    let opts = BoundOptions::default();
    let scan_grid = log_space(1.05, 16.0, 200);
    let mut previous = f64::INFINITY;
    for u in [2.0, 3.0, 4.0] {
        let scan = scan_grid
            .iter()
            .map(|&r| p.q_sum_geometric(r, u, &opts.qsum).unwrap().bound())
            .fold(f64::INFINITY, f64::min);
        let (_, best) = best_geometric(&p, u, &opts).unwrap();
        let refined = best.bound();
        assert!(refined.is_finite() && refined < previous);
        assert!((refined - scan).abs() <= 0.02 * scan, "u = {u}: refined {refined}, scan {scan}");
        previous = refined;
    }
}

/// Geometric blocks started at `start`: `A₁ = start`,
/// `A_{j+1} = max(A_j + 2, round(start · Q^j))`.
struct Continued {
    start: f64,
    ratio: f64,
}

impl BlockFamily for Continued {
    fn blocks(&self) -> Box<dyn Iterator<Item = (f64, f64)> + '_> {
        let mut a = self.start;
        let mut j = 0i32;
        Box::new(std::iter::from_fn(move || {
            j += 1;
            let next = (a + 2.0).max((self.start * self.ratio.powi(j)).round());
            let block = (a, next - 1.0);
            a = next;
            Some(block)
        }))
    }

    fn describe(&self) -> String {
        format!("geometric ratio {} from {}", self.ratio, self.start)
    }
}

/// Optimal prefix partition of `[1, N]` by dynamic programming, closed
/// by the best geometric continuation.
fn dp_partition_bound(u: f64, n: usize) -> f64 {
    let mut f = vec![f64::INFINITY; n + 2];
    f[1] = 0.0;
    for a in 1..=n {
        if !f[a].is_finite() {
            continue;
        }
        for b in a + 1..=n {
            let c = f[a] + lil_term(a as f64, b as f64, u);
            if c < f[b + 1] {
                f[b + 1] = c;
            }
        }
    }
    let p = lil_problem();
    let opts = QSumOptions::default();
    let ratios = log_space(1.05, 16.0, 24);
    let starts: Vec<usize> = log_space((n / 8) as f64, (n + 1) as f64, 64)
        .into_iter()
        .map(|x| x.round() as usize)
        .collect();
    starts
        .into_iter()
        .map(|start| {
            let tail = ratios
                .iter()
                .map(|&ratio| {
                    let fam = Continued { start: start as f64, ratio };
                    q_sum(&fam, &p.v, &p.sigma, &p.phi, u, &opts).unwrap().bound()
                })
                .fold(f64::INFINITY, f64::min);
            f[start] + tail
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn geometric_family_is_near_the_dp_optimum() {
    let p = lil_problem();
    for u in [3.0, 4.0] {
        let dp = dp_partition_bound(u, 10_000);
        let (_, geo) = best_geometric(&p, u, &BoundOptions::default()).unwrap();
        assert!(geo.bound() <= 1.05 * dp, "u = {u}: geometric {} vs dp {dp}", geo.bound());
    }
}

#[test]
fn bound_is_nonincreasing_in_u() {
    let p = lil_problem();
    let u_grid = log_space(1.5, 10.0, 24);
    let r = theorem_bound(&p, &u_grid, 1.0, &BoundOptions::default()).unwrap();
    assert!(r.bounds.windows(2).all(|w| w[1] <= w[0]));
    assert!(r.bounds.iter().zip(&r.raw_bounds).all(|(b, raw)| b <= raw));
    let at = |u: f64| theorem_bound(&p, &[u], 1.0, &BoundOptions::default()).unwrap().bounds[0];
    assert!(at(4.0) <= at(2.0));
}

#[test]
fn singleton_grid_equals_q_sum() {
    let p = lil_problem();
    let opts = BoundOptions { ratio_grid: vec![3.0], ..BoundOptions::default() };
    let r = theorem_bound(&p, &[2.5], 1.0, &opts).unwrap();
    let direct = p.q_sum_geometric(3.0, 2.5, &opts.qsum).unwrap();
    assert_eq!(r.bounds[0], direct.bound());
    assert_eq!(r.chosen_ratio[0], 3.0);
}

#[test]
fn superset_ratio_grid_never_increases_the_bound() {
    let p = lil_problem();
    let coarse = log_space(2.0, 8.0, 4);
    let mut fine = coarse.clone();
    fine.extend(log_space(1.05, 16.0, 12));
    let u_grid = [2.0, 3.0, 5.0];
    let run = |grid: &[f64]| {
        let opts = BoundOptions { ratio_grid: grid.to_vec(), refine_iterations: 0, ..BoundOptions::default() };
        theorem_bound(&p, &u_grid, 1.0, &opts).unwrap().bounds
    };
    for (f, c) in run(&fine).iter().zip(run(&coarse)) {
        assert!(*f <= c);
    }
}

#[test]
fn constant_sigma_reduces_to_the_union_bound_term() {
    let sigma = SigmaProfile::table(vec![1.0; 64]).unwrap();
    let v = NormingSequence::constant(1.0).unwrap();
    let partition = Partition::new(vec![1, 3, 7, 20]).unwrap();
    for phi in [PhiFunction::quadratic(), PhiFunction::cosh(), PhiFunction::power(3.0).unwrap()] {
        for u in [0.5, 1.0, 2.0, 4.0] {
            let star = phi.analytic_conjugate(u).unwrap();
            for k in 1..=3 {
                let t = q_term(k, &partition, &v, &sigma, &phi, u).unwrap();
                assert!((t - (-star).exp()).abs() <= 1e-12, "{} k={k} u={u}", phi.label());
            }
        }
    }
}

#[test]
fn rate_fit_guards_and_stability() {
    let sigma = SigmaProfile::power_law(0.5, SlowlyVarying::One).unwrap();
    let phi = PhiFunction::quadratic();
    let opts = BoundOptions::default();
    assert!(rate_check(&phi, &sigma, 1.0, &log_space(3.0, 8.0, 8), 1.0, &opts).is_err());
    assert!(rate_check(&phi, &sigma, 0.0, &log_space(3.0, 8.0, 8), 1.0, &opts).is_err());
    let base = rate_check(&phi, &sigma, 2.0, &log_space(3.0, 8.0, 8), 1.0, &opts).unwrap();
    let doubled = rate_check(&phi, &sigma, 2.0, &log_space(6.0, 16.0, 8), 1.0, &opts).unwrap();
    assert!(base.c_hat > 0.0 && doubled.c_hat > 0.0);
    assert!((doubled.c_hat - base.c_hat).abs() <= 0.15 * base.c_hat, "{} vs {}", base.c_hat, doubled.c_hat);
    assert!(doubled.passed, "residual {}", doubled.max_rel_residual);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn block_terms_are_probabilities_decreasing_in_u(
        a in 1u64..1_000_000,
        len in 1u64..1_000_000,
        u in 0.01f64..20.0,
        du in 0.01f64..5.0,
    ) {
        let p = lil_problem();
        let b = (a + len) as f64;
        let t1 = block_term(a as f64, b, &p.v, &p.sigma, &p.phi, u).unwrap();
        let t2 = block_term(a as f64, b, &p.v, &p.sigma, &p.phi, u + du).unwrap();
        prop_assert!(t1 > 0.0 || u > 10.0);
        prop_assert!(t1 <= 1.0);
        prop_assert!(t2 < t1 || t1 == 0.0);
        prop_assert!((t1 - lil_term(a as f64, b, u)).abs() <= 1e-12);
    }
}
