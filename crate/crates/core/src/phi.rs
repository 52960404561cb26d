//! Φ-class generators and the objects derived from them.
//!
//! A generator `φ` is even, strictly convex on `(0, λ₀)`, vanishes at the
//! origin and grows superlinearly towards `λ₀ ∈ (0, ∞]`. From it we build the
//! Young–Fenchel conjugate `φ*(u) = sup_λ (λu − φ(λ))`, the inverse `φ⁻¹` of
//! the positive branch and `ψ(p) = p / φ⁻¹(p)`.
//!
//! Conjugates of built-in families have closed forms; everything else goes
//! through [`conjugate_numeric`], which bisects on the sign of the numerically
//! differenced derivative `u − φ′(λ)`.

use std::fmt;
use std::io::Read;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::grid::log_space;
use crate::search::{bisect_sign_change, golden_section_max};

/// Absolute tolerance targeted by the conjugate solver.
pub const CONJUGATE_TOL: f64 = 1e-10;
/// Iteration cap of every bisection in this module.
pub const MAX_ITER: usize = 200;
/// Relative shrink applied to a finite `λ₀` before searching.
const EDGE_CLAMP: f64 = 1e-12;

#[derive(Clone)]
enum Kind {
    /// `|λ|^q / q`, `q > 1`.
    Power { q: f64 },
    /// `cosh λ − 1`.
    Cosh,
    /// `−½ ln(1 − λ²)` on `(−1, 1)`.
    LogBarrier,
    Table(Arc<ConvexTable>),
    Custom {
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        lambda0: f64,
    },
}

/// A member of the class Φ.
#[derive(Clone)]
pub struct PhiFunction {
    label: String,
    kind: Kind,
}

impl fmt::Debug for PhiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhiFunction")
            .field("label", &self.label)
            .field("lambda0", &self.lambda0())
            .finish()
    }
}

impl PhiFunction {
    /// The subgaussian generator `λ²/2`.
    pub fn quadratic() -> Self {
        PhiFunction {
            label: "phi2".into(),
            kind: Kind::Power { q: 2.0 },
        }
    }

    /// `|λ|^q / q`; its conjugate is `|u|^{q'} / q'` with `1/q + 1/q' = 1`.
    pub fn power(q: f64) -> Result<Self> {
        if !(q > 1.0) || !q.is_finite() {
            return Err(domain(format!("power family needs finite q > 1, got {q}")));
        }
        let label = if q == 2.0 {
            "phi2".to_string()
        } else {
            format!("power:q={q}")
        };
        Ok(PhiFunction {
            label,
            kind: Kind::Power { q },
        })
    }

    pub fn cosh() -> Self {
        PhiFunction {
            label: "cosh".into(),
            kind: Kind::Cosh,
        }
    }

    /// `−½ ln(1 − λ²)`, finite domain `λ₀ = 1`, exponential-type conjugate.
    pub fn log_barrier() -> Self {
        PhiFunction {
            label: "logbar".into(),
            kind: Kind::LogBarrier,
        }
    }

    /// Wraps an arbitrary even function; no shape checks are made here, see
    /// [`validate_phi`].
    pub fn custom<F>(label: impl Into<String>, lambda0: f64, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        PhiFunction {
            label: label.into(),
            kind: Kind::Custom {
                f: Arc::new(f),
                lambda0,
            },
        }
    }

    /// Table-backed generator from nodes `(λᵢ, φᵢ)` with `λ₀ = 0 = φ₀`.
    pub fn from_table(label: impl Into<String>, lambdas: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Ok(PhiFunction {
            label: label.into(),
            kind: Kind::Table(Arc::new(ConvexTable::new(lambdas, values)?)),
        })
    }

    /// Reads a two-column CSV `(λ, φ(λ))` with a header row.
    pub fn from_csv<R: Read>(label: impl Into<String>, reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let mut lambdas = Vec::new();
        let mut values = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() < 2 {
                return Err(Error::Parse(format!("phi table row {} has fewer than 2 columns", i + 1)));
            }
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("phi table row {}: bad number {s:?}", i + 1)))
            };
            lambdas.push(parse(&rec[0])?);
            values.push(parse(&rec[1])?);
        }
        Self::from_table(label, lambdas, values)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Half-width of the domain; `f64::INFINITY` for entire generators.
    pub fn lambda0(&self) -> f64 {
        match &self.kind {
            Kind::Power { .. } | Kind::Cosh => f64::INFINITY,
            Kind::LogBarrier => 1.0,
            Kind::Table(t) => t.lambda0(),
            Kind::Custom { lambda0, .. } => *lambda0,
        }
    }

    /// `φ(λ)`; `+∞` outside `(−λ₀, λ₀)`.
    pub fn eval(&self, lambda: f64) -> f64 {
        let a = lambda.abs();
        match &self.kind {
            Kind::Power { q } => {
                if *q == 2.0 {
                    0.5 * a * a
                } else {
                    a.powf(*q) / q
                }
            }
            Kind::Cosh => {
                // cosh λ − 1 without cancellation near 0.
                let s = (0.5 * a).sinh();
                2.0 * s * s
            }
            Kind::LogBarrier => {
                if a >= 1.0 {
                    f64::INFINITY
                } else {
                    -0.5 * (-a * a).ln_1p()
                }
            }
            Kind::Table(t) => t.eval(a),
            Kind::Custom { f, lambda0 } => {
                if a >= *lambda0 {
                    f64::INFINITY
                } else {
                    f(lambda)
                }
            }
        }
    }

    /// Closed-form conjugate where one is known.
    pub fn analytic_conjugate(&self, u: f64) -> Option<f64> {
        let u = u.abs();
        match &self.kind {
            Kind::Power { q } => {
                if *q == 2.0 {
                    Some(0.5 * u * u)
                } else {
                    let qp = q / (q - 1.0);
                    Some(u.powf(qp) / qp)
                }
            }
            Kind::Cosh => {
                // u·asinh(u) − √(1+u²) + 1, rearranged for small u.
                let root = u.hypot(1.0);
                Some(u * u.asinh() - u * u / (root + 1.0))
            }
            Kind::LogBarrier => {
                if u == 0.0 {
                    return Some(0.0);
                }
                // Maximizer solves λ/(1−λ²) = u.
                let lambda = 2.0 * u / (1.0 + (2.0 * u).hypot(1.0));
                Some(u * lambda + 0.5 * (-lambda * lambda).ln_1p())
            }
            Kind::Table(_) | Kind::Custom { .. } => None,
        }
    }

    /// Exponent `r` of the conjugate's growth `φ*(x) = x^r L(x)` with `L`
    /// slowly varying, when known.
    pub fn tail_exponent(&self) -> Option<f64> {
        match &self.kind {
            Kind::Power { q } => Some(q / (q - 1.0)),
            Kind::Cosh | Kind::LogBarrier => Some(1.0),
            Kind::Table(_) | Kind::Custom { .. } => None,
        }
    }

    /// Central (or one-sided near `λ₀`) difference of `φ`.
    pub fn derivative(&self, lambda: f64) -> f64 {
        numeric_derivative(|x| self.eval(x), lambda, self.lambda0())
    }
}

fn numeric_derivative<F: Fn(f64) -> f64>(f: F, x: f64, x_max: f64) -> f64 {
    let h = 1e-6 * x.abs().max(1e-8);
    if x + h < x_max {
        if x - h > -x_max {
            (f(x + h) - f(x - h)) / (2.0 * h)
        } else {
            (f(x + h) - f(x)) / h
        }
    } else {
        (f(x) - f(x - h)) / h
    }
}

/// Result of a numeric Legendre transform at a single point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConjugatePoint {
    pub value: f64,
    /// Maximizing `λ`.
    pub argmax: f64,
    /// `|u − φ′(argmax)|`, or the bracket width when the supremum sits at the
    /// domain edge.
    pub residual: f64,
    pub at_edge: bool,
}

/// `sup_{0 ≤ λ < x_max} (λu − f(λ))` for a convex `f` with `f(0) = 0`,
/// `f ≥ 0`, by bisection on the sign of `u − f′(λ)`.
pub fn legendre_numeric<F: Fn(f64) -> f64>(f: F, x_max: f64, u: f64) -> Result<ConjugatePoint> {
    if !(u >= 0.0) {
        return Err(domain(format!("conjugate needs u >= 0, got {u}")));
    }
    if u == 0.0 {
        return Ok(ConjugatePoint {
            value: 0.0,
            argmax: 0.0,
            residual: 0.0,
            at_edge: false,
        });
    }
    let cap = if x_max.is_finite() {
        x_max * (1.0 - EDGE_CLAMP)
    } else {
        f64::INFINITY
    };
    let slope_below = |x: f64| u - numeric_derivative(&f, x, x_max) > 0.0;
    let objective = |x: f64| x * u - f(x);

    // Bracket the stationary point.
    let mut hi = 1.0f64.min(cap);
    let mut doublings = 0;
    while slope_below(hi) {
        if hi >= cap {
            // Supremum at the domain edge.
            let (x, v) = golden_section_max(objective, 0.0, cap, MAX_ITER);
            let (x, v) = if objective(cap) >= v { (cap, objective(cap)) } else { (x, v) };
            return Ok(ConjugatePoint {
                value: v.max(0.0),
                argmax: x,
                residual: cap - x,
                at_edge: true,
            });
        }
        hi = (hi * 2.0).min(cap);
        doublings += 1;
        if doublings > MAX_ITER {
            return Err(Error::NonConvergence {
                what: "conjugate bracketing",
                iterations: doublings,
                residual: u - numeric_derivative(&f, hi, x_max),
            });
        }
    }
    let lo = if hi > 1.0 { hi * 0.5 } else { 0.0 };
    let b = bisect_sign_change(slope_below, lo, hi, 1e-15, 1e-300, MAX_ITER);
    let residual = (u - numeric_derivative(&f, b.midpoint(), x_max)).abs();
    if !b.converged {
        return Err(Error::NonConvergence {
            what: "conjugate bisection",
            iterations: b.iterations,
            residual,
        });
    }
    let (mut argmax, mut value) = (b.midpoint(), objective(b.midpoint()));
    for x in [b.lo, b.hi] {
        let v = objective(x);
        if v > value {
            value = v;
            argmax = x;
        }
    }
    Ok(ConjugatePoint {
        value: value.max(0.0),
        argmax,
        residual,
        at_edge: false,
    })
}

/// `φ*(u)`, using the closed form when the family has one.
pub fn conjugate(phi: &PhiFunction, u: f64) -> Result<f64> {
    if !(u >= 0.0) {
        return Err(domain(format!("conjugate needs u >= 0, got {u}")));
    }
    match phi.analytic_conjugate(u) {
        Some(v) => Ok(v),
        None => conjugate_numeric(phi, u).map(|p| p.value),
    }
}

/// `φ*(u)` by the numeric solver regardless of any closed form.
pub fn conjugate_numeric(phi: &PhiFunction, u: f64) -> Result<ConjugatePoint> {
    legendre_numeric(|x| phi.eval(x), phi.lambda0(), u)
}

/// `φ**(λ)`: the conjugate of `u ↦ φ*(u)`, computed numerically.
pub fn biconjugate(phi: &PhiFunction, lambda: f64) -> Result<f64> {
    let lambda = lambda.abs();
    if lambda >= phi.lambda0() {
        return Ok(f64::INFINITY);
    }
    let star = |u: f64| conjugate(phi, u).unwrap_or(f64::INFINITY);
    legendre_numeric(star, f64::INFINITY, lambda).map(|p| p.value)
}

/// Conjugate values on a grid.
#[derive(Debug, Clone, Serialize)]
pub struct ConjugateGrid {
    pub u_values: Vec<f64>,
    pub phi_star_values: Vec<f64>,
    pub max_residual: f64,
}

pub fn conjugate_grid(phi: &PhiFunction, u_values: &[f64]) -> Result<ConjugateGrid> {
    let mut phi_star_values = Vec::with_capacity(u_values.len());
    let mut max_residual: f64 = 0.0;
    for &u in u_values {
        if let Some(v) = phi.analytic_conjugate(u).filter(|_| u >= 0.0) {
            phi_star_values.push(v);
        } else {
            let p = conjugate_numeric(phi, u)?;
            max_residual = max_residual.max(p.residual);
            phi_star_values.push(p.value);
        }
    }
    Ok(ConjugateGrid {
        u_values: u_values.to_vec(),
        phi_star_values,
        max_residual,
    })
}

/// The unique `λ ∈ [0, λ₀)` with `φ(λ) = p`.
pub fn phi_inverse(phi: &PhiFunction, p: f64) -> Result<f64> {
    if !(p >= 0.0) {
        return Err(domain(format!("phi_inverse needs p >= 0, got {p}")));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let lambda0 = phi.lambda0();
    // Open endpoint: search up to the last float below λ₀.
    let cap = if lambda0.is_finite() {
        lambda0.next_down()
    } else {
        f64::INFINITY
    };
    let mut hi = 1.0f64.min(cap);
    let mut doublings = 0;
    while phi.eval(hi) < p {
        if hi >= cap {
            return Err(Error::Unreachable {
                value: p,
                lambda0,
                sup: phi.eval(cap),
            });
        }
        hi = (hi * 2.0).min(cap);
        doublings += 1;
        if doublings > MAX_ITER {
            return Err(Error::NonConvergence {
                what: "phi_inverse bracketing",
                iterations: doublings,
                residual: p - phi.eval(hi),
            });
        }
    }
    let lo = if hi > 1.0 { hi * 0.5 } else { 0.0 };
    let b = bisect_sign_change(|x| phi.eval(x) < p, lo, hi, 1e-16, 1e-300, MAX_ITER);
    if !b.converged {
        return Err(Error::NonConvergence {
            what: "phi_inverse bisection",
            iterations: b.iterations,
            residual: b.hi - b.lo,
        });
    }
    // Pick whichever end is closer in value.
    let (el, eh) = ((phi.eval(b.lo) - p).abs(), (phi.eval(b.hi) - p).abs());
    Ok(if el <= eh { b.lo } else { b.hi })
}

/// `ψ(p) = p / φ⁻¹(p)` for `p ≥ 2`.
pub fn psi(phi: &PhiFunction, p: f64) -> Result<f64> {
    if !(p >= 2.0) {
        return Err(domain(format!("psi is defined for p >= 2, got {p}")));
    }
    Ok(p / phi_inverse(phi, p)?)
}

/// One numerically enforced shape condition.
#[derive(Debug, Clone, Serialize)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Grid point with the worst violation (or the tightest margin).
    pub worst_lambda: f64,
    pub worst_value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhiValidation {
    pub label: String,
    pub checks: Vec<InvariantCheck>,
}

impl PhiValidation {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&InvariantCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// The grid used by the shape checks: 512 log-spaced points on
/// `[1e−6, min(λ₀, 50)]`, kept strictly inside a finite domain.
pub fn standard_lambda_grid(phi: &PhiFunction) -> Vec<f64> {
    let lambda0 = phi.lambda0();
    let top = if lambda0.is_finite() {
        (lambda0 * (1.0 - 1e-9)).min(50.0)
    } else {
        50.0
    };
    log_space(1e-6, top, 512)
}

/// Checks `φ(0) = 0`, evenness, strict convexity and superlinearity on
/// [`standard_lambda_grid`].
pub fn validate_phi(phi: &PhiFunction) -> PhiValidation {
    let grid = standard_lambda_grid(phi);
    let vals: Vec<f64> = grid.iter().map(|&l| phi.eval(l)).collect();
    let mut checks = Vec::with_capacity(4);

    let f0 = phi.eval(0.0);
    checks.push(InvariantCheck {
        name: "zero_at_origin",
        passed: f0.abs() < 1e-12,
        worst_lambda: 0.0,
        worst_value: f0,
    });

    let (mut worst_l, mut worst_v) = (grid[0], 0.0f64);
    for (&l, &v) in grid.iter().zip(&vals) {
        let gap = (v - phi.eval(-l)).abs() / v.abs().max(1.0);
        if gap > worst_v || gap.is_nan() {
            worst_v = gap;
            worst_l = l;
        }
    }
    checks.push(InvariantCheck {
        name: "even",
        passed: worst_v <= 1e-12,
        worst_lambda: worst_l,
        worst_value: worst_v,
    });

    // Second divided differences on the nonuniform grid.
    let (mut worst_l, mut worst_v) = (grid[1], f64::INFINITY);
    for i in 1..grid.len() - 1 {
        let s1 = (vals[i] - vals[i - 1]) / (grid[i] - grid[i - 1]);
        let s2 = (vals[i + 1] - vals[i]) / (grid[i + 1] - grid[i]);
        let dd = 2.0 * (s2 - s1) / (grid[i + 1] - grid[i - 1]);
        if !(dd >= worst_v) {
            worst_v = dd;
            worst_l = grid[i];
        }
    }
    checks.push(InvariantCheck {
        name: "strictly_convex",
        passed: worst_v > 0.0,
        worst_lambda: worst_l,
        worst_value: worst_v,
    });

    let (mut worst_l, mut worst_v) = (grid[1], f64::INFINITY);
    for i in 1..grid.len() {
        let step = vals[i] / grid[i] - vals[i - 1] / grid[i - 1];
        if !(step >= worst_v) {
            worst_v = step;
            worst_l = grid[i];
        }
    }
    checks.push(InvariantCheck {
        name: "superlinear",
        passed: worst_v > 0.0,
        worst_lambda: worst_l,
        worst_value: worst_v,
    });

    PhiValidation {
        label: phi.label.clone(),
        checks,
    }
}

/// C¹ convex interpolant of tabulated nodes, evaluated on `|λ|`.
///
/// Node slopes are convex combinations of neighbouring secants (zero at the
/// origin); each interval carries one extra knot where the slope equals the
/// secant, so the derivative is piecewise linear and monotone.
#[derive(Debug, Clone)]
struct ConvexTable {
    x: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>,
}

impl ConvexTable {
    fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 3 {
            return Err(domain("phi table needs at least 3 rows of (lambda, phi)"));
        }
        if x[0] != 0.0 || y[0] != 0.0 {
            return Err(domain("phi table must start at (0, 0)"));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(domain("phi table contains non-finite values"));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(domain("phi table lambdas must be strictly increasing"));
        }
        let n = x.len();
        let secant: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
        if secant[0] <= 0.0 {
            return Err(domain("phi table must be increasing away from 0"));
        }
        if secant.windows(2).any(|w| w[1] < w[0]) {
            return Err(domain("phi table is not convex"));
        }
        let mut slope = vec![0.0; n];
        for i in 1..n - 1 {
            let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
            slope[i] = (h1 * secant[i - 1] + h0 * secant[i]) / (h0 + h1);
        }
        slope[n - 1] = 2.0 * secant[n - 2] - slope[n - 2];
        Ok(ConvexTable { x, y, slope })
    }

    fn lambda0(&self) -> f64 {
        *self.x.last().unwrap()
    }

    fn eval(&self, a: f64) -> f64 {
        if a >= self.lambda0() {
            return f64::INFINITY;
        }
        let i = match self.x.binary_search_by(|p| p.partial_cmp(&a).unwrap()) {
            Ok(i) => return self.y[i],
            Err(i) => i - 1,
        };
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let (s0, s1) = (self.slope[i], self.slope[i + 1]);
        let h = x1 - x0;
        let delta = (self.y[i + 1] - self.y[i]) / h;
        let d = a - x0;
        if s1 - s0 <= f64::EPSILON * s1.abs().max(1.0) {
            return self.y[i] + delta * d;
        }
        // Knot where the slope equals the secant.
        let k = h * (s1 - delta) / (s1 - s0);
        if d <= k {
            self.y[i] + s0 * d + (delta - s0) * d * d / (2.0 * k)
        } else {
            let yk = self.y[i] + 0.5 * (s0 + delta) * k;
            let e = d - k;
            yk + delta * e + (s1 - delta) * e * e / (2.0 * (h - k))
        }
    }
}
