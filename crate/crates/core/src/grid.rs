//! Evaluation grids and their textual specs.

use crate::error::{Error, Result};

/// `n` points log-spaced on `[lo, hi]`, endpoints included.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo, "log_space needs 0 < lo <= hi");
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        hi
                    } else {
                        (a + (b - a) * i as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// `n` points evenly spaced on `[lo, hi]`, endpoints included.
pub fn lin_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Parses a grid spec:
///
/// - `"0,1,2.5"`: explicit values;
/// - `"lin:LO:HI:N"`: evenly spaced;
/// - `"log:LO:HI:N"`: log-spaced (`LO > 0`).
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    let parse_f = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad number {s:?} in grid spec {spec:?}")))
    };
    if let Some(rest) = spec.strip_prefix("lin:").or_else(|| spec.strip_prefix("log:")) {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!(
                "grid spec {spec:?} must look like lin:LO:HI:N or log:LO:HI:N"
            )));
        }
        let lo = parse_f(parts[0])?;
        let hi = parse_f(parts[1])?;
        let n: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad point count in grid spec {spec:?}")))?;
        if n == 0 || !(hi >= lo) {
            return Err(Error::Parse(format!("empty or reversed grid {spec:?}")));
        }
        if spec.starts_with("log:") {
            if lo <= 0.0 {
                return Err(Error::Parse(format!("log grid needs LO > 0 in {spec:?}")));
            }
            Ok(log_space(lo, hi, n))
        } else {
            Ok(lin_space(lo, hi, n))
        }
    } else {
        let values = spec
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(parse_f)
            .collect::<Result<Vec<_>>>()?;
        if values.is_empty() {
            return Err(Error::Parse("empty grid".into()));
        }
        Ok(values)
    }
}

/// Errors unless `values` is strictly increasing and finite.
pub fn require_increasing(values: &[f64], what: &str) -> Result<()> {
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain(format!("{what} contains non-finite values")));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain(format!("{what} must be strictly increasing")));
    }
    Ok(())
}
