use serde::Serialize;

use crate::error::{domain, Result};

/// Blocks `[A(k), B(k)]`, `B(k) = A(k+1) − 1`, tiling `[1, A(K+1) − 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    a_values: Vec<u64>,
}

impl Partition {
    /// `a_values = (A(1), …, A(K+1))` with `A(1) = 1` and
    /// `A(k+1) ≥ A(k) + 2` (every block holds at least two indices).
    pub fn new(a_values: Vec<u64>) -> Result<Self> {
        if a_values.len() < 2 {
            return Err(domain("a partition needs at least one block (two A values)"));
        }
        if a_values[0] != 1 {
            return Err(domain(format!("A(1) must be 1, got {}", a_values[0])));
        }
        if let Some(k) = a_values.windows(2).position(|w| w[1] < w[0].saturating_add(2)) {
            return Err(domain(format!(
                "block {} = [{}, {}] is shorter than 2",
                k + 1,
                a_values[k],
                a_values[k + 1].saturating_sub(1)
            )));
        }
        Ok(Partition { a_values })
    }

    pub fn a_values(&self) -> &[u64] {
        &self.a_values
    }

    pub fn b_values(&self) -> Vec<u64> {
        self.a_values[1..].iter().map(|a| a - 1).collect()
    }

    /// Number of blocks `K`.
    pub fn depth(&self) -> usize {
        self.a_values.len() - 1
    }

    /// Block `k` (1-based).
    pub fn block(&self, k: usize) -> Option<(u64, u64)> {
        if k == 0 || k > self.depth() {
            return None;
        }
        Some((self.a_values[k - 1], self.a_values[k] - 1))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.a_values.windows(2).map(|w| (w[0], w[1] - 1))
    }
}

/// A source of consecutive blocks, possibly unbounded. Block ends are
/// reported as `f64` so that generators can run past `u64::MAX`.
pub trait BlockFamily: Sync {
    fn blocks(&self) -> Box<dyn Iterator<Item = (f64, f64)> + '_>;
    fn describe(&self) -> String;
}

impl BlockFamily for Partition {
    fn blocks(&self) -> Box<dyn Iterator<Item = (f64, f64)> + '_> {
        Box::new(Partition::blocks(self).map(|(a, b)| (a as f64, b as f64)))
    }

    fn describe(&self) -> String {
        format!("explicit partition with {} blocks", self.depth())
    }
}

/// `A(1) = 1`, `A(k+1) = max(A(k) + 2, round(ratio^k))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometricFamily {
    pub ratio: f64,
}

impl GeometricFamily {
    pub fn new(ratio: f64) -> Result<Self> {
        if !(ratio > 1.0) || !ratio.is_finite() {
            return Err(domain(format!("geometric ratio must be > 1, got {ratio}")));
        }
        Ok(GeometricFamily { ratio })
    }

    /// The `A(k)` sequence as floats (exact integers below 2⁵³).
    pub fn a_sequence(&self) -> impl Iterator<Item = f64> {
        let ratio = self.ratio;
        let mut a = 1.0f64;
        let mut k = 0i32;
        std::iter::from_fn(move || {
            let current = a;
            k += 1;
            let target = ratio.powi(k).round();
            a = (current + 2.0).max(target);
            Some(current)
        })
    }
}

impl BlockFamily for GeometricFamily {
    fn blocks(&self) -> Box<dyn Iterator<Item = (f64, f64)> + '_> {
        let mut seq = self.a_sequence().peekable();
        Box::new(std::iter::from_fn(move || {
            let a = seq.next()?;
            let next = *seq.peek()?;
            Some((a, next - 1.0))
        }))
    }

    fn describe(&self) -> String {
        format!("geometric ratio {}", self.ratio)
    }
}

/// First `depth` blocks of the geometric family, `ratio ≥ 2`.
pub fn geometric_partition(ratio: f64, depth: usize) -> Result<Partition> {
    if !(ratio >= 2.0) {
        return Err(domain(format!("geometric partition needs ratio >= 2, got {ratio}")));
    }
    if depth == 0 {
        return Err(domain("partition depth must be positive"));
    }
    let family = GeometricFamily::new(ratio)?;
    let mut a_values = Vec::with_capacity(depth + 1);
    for a in family.a_sequence().take(depth + 1) {
        if a >= u64::MAX as f64 {
            return Err(domain(format!("A(k) exceeds u64 at depth {depth} for ratio {ratio}")));
        }
        a_values.push(a as u64);
    }
    Partition::new(a_values)
}
