//! Exponential tail bounds for normalized martingale maxima.
//!
//! The crate evaluates the partition-optimized block sum
//!
//! ```text
//! Q(R, v, u) = Σ_k exp(-φ*(u · σ(A(k)) · v(A(k)) / σ(B(k))))
//! ```
//!
//! over partitions `R = {[A(k), B(k)]}` of the positive integers, where `φ*` is
//! the Young–Fenchel conjugate of an even convex generator `φ`, `σ(n)` is the
//! standard deviation of the martingale at time `n` and `v(n)` a norming
//! sequence such as `(log log(n + 3))^{1/r}`. The infimum over partitions of
//! `Q(R, v, C·u)` bounds
//!
//! ```text
//! W(v; u) = P( sup_n S(n) / (σ(n) v(n)) > u ).
//! ```
//!
//! Modules:
//!
//! - [`phi`]: Φ-class generators, numeric conjugates, inverses and `ψ(p)`.
//! - [`norms`]: empirical `B(φ)` / `G(ψ)` norms and tail functions.
//! - [`bound`]: partitions, block terms, the block sum and its optimization.
//! - [`models`]: simulatable martingales with exact variance profiles.
//! - [`verify`]: Monte Carlo and exhaustive estimates of `W`, calibration of
//!   the constant `C`, Doob moment checks and iterated-logarithm statistics.
//! - [`registry`]: string ids used by the CLI and the browser demo.

pub mod bound;

pub mod error;
mod exec;
pub mod grid;
pub mod models;
pub mod norms;
pub mod phi;
pub mod registry;
pub mod search;
pub mod serde_inf;
pub mod verify;

pub use error::{Error, Result};
