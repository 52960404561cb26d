use lilbound::bound::{BoundOptions, BoundProblem, NormingSequence};
use lilbound::grid::{lin_space, log_space};
use lilbound::models::MartingaleModel;
use lilbound::verify::{
    bounds_at, calibrate_c, empirical_sup_tail, exact_sup_tail_small, hartman_wintner_probe, lil_trajectory_stats,
    wilson_interval, SingleNLowerBound, SingleNTail, TailEstimate, Z99,
};

fn one() -> NormingSequence {
    NormingSequence::constant(1.0).unwrap()
}

fn v2() -> NormingSequence {
    NormingSequence::iterated_log(2.0).unwrap()
}

/// Hand enumeration of `W(1; u)` for the simple walk over `n ≤ 3`.
fn walk_sup_tail_n3(u: f64) -> f64 {
    let mut hits = 0;
    for path in 0..8u32 {
        let mut s = 0.0f64;
        let mut best = f64::NEG_INFINITY;
        for i in 0..3 {
            s += if path >> i & 1 == 1 { 1.0 } else { -1.0 };
            best = best.max(s / ((i + 1) as f64).sqrt());
        }
        if best > u {
            hits += 1;
        }
    }
    hits as f64 / 8.0
}

#[test]
fn monte_carlo_lands_on_the_enumerated_walk() {
    let model = MartingaleModel::chaos(1).unwrap();
    let u_grid = [-5.0, 0.2, 0.6, 1.0, 1.2, 1.5, 1.8];
    let exact = exact_sup_tail_small(&model, &one(), 3, &u_grid).unwrap();
    let mc = empirical_sup_tail(&model, &one(), 3, 100_000, &u_grid, 17).unwrap();
    for (i, &u) in u_grid.iter().enumerate() {
        let hand = walk_sup_tail_n3(u);
        assert_eq!(exact.w_hat[i], hand, "u = {u}");
        assert!(mc.ci_low[i] <= hand && hand <= mc.ci_high[i], "u = {u}: {hand} not in [{}, {}]", mc.ci_low[i], mc.ci_high[i]);
    }
    assert_eq!(mc.w_hat[0], 1.0);
}

fn check_estimate_invariants(t: &TailEstimate) {
    for i in 0..t.u_grid.len() {
        assert!(t.w_hat[i] <= t.w_plus_hat[i]);
        assert!((0.0..=1.0).contains(&t.w_hat[i]) && (0.0..=1.0).contains(&t.w_plus_hat[i]));
        assert!(t.ci_low[i] <= t.w_hat[i] && t.w_hat[i] <= t.ci_high[i]);
        assert!(t.ci_plus_low[i] <= t.w_plus_hat[i] && t.w_plus_hat[i] <= t.ci_plus_high[i]);
        if i > 0 {
            assert!(t.w_hat[i] <= t.w_hat[i - 1]);
        }
        assert_eq!(t.censored[i], !t.exact && t.counts[i] < 10);
    }
}

#[test]
fn oracle_agreement_over_seeds() {
    let u_grid = lin_space(0.5, 2.5, 6);
    let cases = [(1, 8, one()), (1, 10, v2()), (2, 8, v2()), (2, 10, one())];
    for (d, n, v) in cases {
        let model = MartingaleModel::chaos(d).unwrap();
        let exact = exact_sup_tail_small(&model, &v, n, &u_grid).unwrap();
        check_estimate_invariants(&exact);
        let (mut inside, mut total) = (0, 0);
        for seed in 0..10 {
            let mc = empirical_sup_tail(&model, &v, n, 20_000, &u_grid, seed).unwrap();
            check_estimate_invariants(&mc);
            for i in 0..u_grid.len() {
                total += 1;
                inside += (mc.ci_low[i] <= exact.w_hat[i] && exact.w_hat[i] <= mc.ci_high[i]) as usize;
            }
        }
        assert!(inside as f64 >= 0.95 * total as f64, "d = {d}, N = {n}: {inside}/{total}");
    }
}

#[test]
fn exact_two_sided_dominates_one_sided() {
    for model in [MartingaleModel::chaos(1).unwrap(), MartingaleModel::chaos(3).unwrap(),
                  MartingaleModel::weighted_iid(1.0, lilbound::models::Noise::Rademacher).unwrap(),
                  MartingaleModel::power_law(0.5).unwrap()] {
        let t = exact_sup_tail_small(&model, &v2(), 12, &lin_space(0.1, 3.0, 12)).unwrap();
        check_estimate_invariants(&t);
        assert!(t.exact);
        // Symmetric noise: W₊ ≤ 2W exactly.
        assert!(t.w_plus_hat.iter().zip(&t.w_hat).all(|(p, w)| *p <= 2.0 * w + 1e-15));
    }
}

#[test]
fn two_sided_tail_within_twice_one_sided() {
    let model = MartingaleModel::chaos(1).unwrap();
    let m = 20_000u64;
    let t = empirical_sup_tail(&model, &v2(), 1024, m, &log_space(1.0, 4.0, 10), 5).unwrap();
    check_estimate_invariants(&t);
    for i in 0..t.u_grid.len() {
        let wp = t.w_plus_hat[i];
        let se = (wp * (1.0 - wp) / m as f64).sqrt();
        assert!(wp <= 2.0 * t.w_hat[i] + 3.0 * se);
    }
}

fn run_in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn estimates_are_identical_across_worker_counts() {
    for d in [1, 2] {
        let model = MartingaleModel::chaos(d).unwrap();
        let run = || empirical_sup_tail(&model, &v2(), 300, 5000, &log_space(0.5, 4.0, 9), 42).unwrap();
        let reference = serde_json::to_string(&run_in_pool(1, run)).unwrap();
        for threads in [2, 4, 8] {
            assert_eq!(serde_json::to_string(&run_in_pool(threads, run)).unwrap(), reference);
        }
    }
}

#[test]
fn single_index_law_matches_enumeration_at_ten_steps() {
    // P(S(10)/(√10 v₂(10)) > 1) by direct enumeration of 2¹⁰ paths.
    let level = 10f64.sqrt() * v2().eval(10.0);
    let hits = (0..1u32 << 10).filter(|p| 2.0 * p.count_ones() as f64 - 10.0 > level).count();
    let oracle = hits as f64 / 1024.0;
    let law = SingleNTail::simple_walk(10).unwrap();
    let value = lilbound::bound::lower_bound_single_n(|x| law.tail(x), 10, &v2(), 1.0);
    assert!((value - oracle).abs() < 1e-12, "{value} vs {oracle}");
    // Two-point law ±1 with v ≡ 1.
    assert_eq!(lilbound::bound::lower_bound_single_n(|x| if x < 1.0 { 0.5 } else { 0.0 }, 1, &one(), 0.5), 0.5);
}

#[test]
fn single_index_lower_bound_sits_below_the_sup_tail() {
    let u_grid = lin_space(0.5, 3.0, 11);
    for d in [1, 2] {
        let model = MartingaleModel::chaos(d).unwrap();
        let exact = exact_sup_tail_small(&model, &v2(), 14, &u_grid).unwrap();
        let lower = SingleNLowerBound::new(&model, 14).unwrap();
        for (i, &u) in u_grid.iter().enumerate() {
            assert!(lower.at(&v2(), u).0 <= exact.w_hat[i] + 1e-15, "d = {d}, u = {u}");
        }
    }
    let model = MartingaleModel::chaos(1).unwrap();
    let m = 20_000;
    let mc = empirical_sup_tail(&model, &v2(), 4096, m, &u_grid, 3).unwrap();
    let lower = SingleNLowerBound::new(&model, 4096).unwrap();
    for (i, &u) in u_grid.iter().enumerate() {
        let w = mc.w_hat[i];
        let se = (w * (1.0 - w) / m as f64).sqrt();
        assert!(lower.at(&v2(), u).0 <= w + 3.0 * se, "u = {u}");
    }
}

fn walk_problem() -> BoundProblem {
    let model = MartingaleModel::chaos(1).unwrap();
    BoundProblem::new(v2(), model.sigma_profile(), model.phi().unwrap())
}

#[test]
fn calibration_exists_and_is_stable_in_the_path_count() {
    let model = MartingaleModel::chaos(1).unwrap();
    let u_grid = lin_space(2.0, 4.0, 8);
    let opts = BoundOptions::default();
    let problem = walk_problem();
    let small = empirical_sup_tail(&model, &v2(), 4096, 20_000, &u_grid, 1).unwrap();
    let large = empirical_sup_tail(&model, &v2(), 4096, 40_000, &u_grid, 2).unwrap();
    let a = calibrate_c(&small, &problem, &opts).unwrap();
    let b = calibrate_c(&large, &problem, &opts).unwrap();
    for cal in [&a, &b] {
        assert!((0.01..=100.0).contains(&cal.c_hat));
        assert!(cal.margin >= 1.0);
        assert!(cal.bounds.iter().zip(&cal.ci_high).all(|(bd, ci)| bd >= ci));
        // 1% past the calibrated constant dominance breaks somewhere.
        let past = bounds_at(&problem, &u_grid, cal.c_hat * 1.011, &opts).unwrap();
        assert!(past.iter().zip(&cal.ci_high).any(|(bd, ci)| bd < ci));
    }
    assert!((a.c_hat - b.c_hat).abs() <= 0.10 * a.c_hat, "{} vs {}", a.c_hat, b.c_hat);
}

#[test]
fn vanishing_constant_gives_vacuous_dominance() {
    let problem = walk_problem();
    let u_grid = [2.0, 3.0];
    let b = bounds_at(&problem, &u_grid, 0.01, &BoundOptions::default()).unwrap();
    assert!(b.iter().all(|x| *x >= 1.0));
}

#[test]
fn wilson_interval_covers_at_the_nominal_rate() {
    // Exact coverage of the 99% interval for Binomial(200, 0.1).
    let (m, p) = (200u64, 0.1f64);
    let mut coverage = 0.0;
    let mut ln_pmf = m as f64 * (1.0 - p).ln();
    for k in 0..=m {
        if k > 0 {
            ln_pmf += ((m - k + 1) as f64 / k as f64).ln() + (p / (1.0 - p)).ln();
        }
        let (lo, hi) = wilson_interval(k, m, Z99);
        if lo <= p && p <= hi {
            coverage += ln_pmf.exp();
        }
    }
    assert!(coverage > 0.98, "{coverage}");
}

#[test]
fn lil_median_grows_with_the_horizon() {
    for d in [1, 2] {
        let s = lil_trajectory_stats(d, &[1 << 8, 1 << 10, 1 << 12], 400, 8).unwrap();
        let medians: Vec<f64> = s.horizons.iter().map(|h| h.quartiles.median).collect();
        assert!(medians.windows(2).all(|w| w[1] >= w[0]), "d = {d}: {medians:?}");
        if d == 1 {
            assert!(s.horizons.last().unwrap().fraction_positive > 0.97);
        }
    }
}

#[test]
fn hartman_wintner_probe_examples() {
    let h = hartman_wintner_probe(1 << 12, 300, 6).unwrap();
    assert!(h.sigma2_exact);
    assert!(h.theta1_min > 0.0);
    assert!(h.theta1.q1 <= h.theta1.median && h.theta1.median <= h.theta1.q3);
}
