//! Partitions of the positive integers, the block terms
//! `Q(k; R, v, u) = exp(−φ*(u σ(A(k)) v(A(k)) / σ(B(k))))`, their sum over a
//! partition and its minimization over geometric partitions.

mod partition;
mod qsum;
mod sequences;
mod theorem;

pub use partition::{geometric_partition, BlockFamily, GeometricFamily, Partition};
pub use qsum::{block_term, q_sum, q_term, tail_estimate, QSum, QSumOptions, QSumStatus};
pub use sequences::{NormingSequence, SigmaProfile, SlowlyVarying};
pub use theorem::{
    best_geometric, default_ratio_grid, lower_bound_single_n, rate_check, theorem_bound,
    BoundOptions, BoundProblem, BoundReport, RateFit, RATE_FIT_TOLERANCE,
};
