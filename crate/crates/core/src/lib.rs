//! Generalized Farey-fraction spin chain.
//!
//! A chain of `k` spins is a word in the matrices `A0 = [[1,0],[1,1]]` (up)
//! and `A1 = [[1,1],[0,1]]` (down); a configuration with product
//! `[[a, b], [c, d]]` carries weight `((a + c) x + (b + d))^(-2 beta)`.
//!
//! The crate offers three routes to the same numbers:
//!
//! * exhaustive enumeration ([`z_brute`], [`z_constrained`]), exact up to
//!   rounding and exponential in `k`;
//! * the two-branch recursion ([`z_recursive`]);
//! * the transfer operator of the Farey map on a Chebyshev grid
//!   ([`z_grid`], [`leading_eigen`]), polynomial in `k`.
//!
//! Expectation values of fixed spins follow either by enumeration or, for a
//! chain infinite on the left at `x = 0`, from closed forms in the leading
//! eigenvalue ([`expect`]).

pub mod enumerate;
pub mod error;
pub mod expect;
#[cfg(feature = "extended")]
pub mod extended;
pub mod extrapolate;
pub mod farey;
pub mod grid;
pub mod mat2;
pub mod params;
pub mod partition;
pub mod spectral;
pub mod word;
pub mod zeta;

pub use enumerate::{pairwise_sum, MAX_PATTERN_LEN};
pub use error::{Error, Result};
pub use expect::{
    bounds_two_spin_infinite, expect_closed_form, expect_cluster, expect_enumerated,
    expect_finite, expect_one_spin_via_k, expect_right_edge_infinite, finite_sequence,
    lengths_within_cap, one_spin_bias, u_n_d_n,
    u_n_d_n_closed, ClosedForm, ClusterKind, ExpectationMode, ExpectationQuery, UnDnValues,
};
pub use extrapolate::{extrapolate_infinite_left, Extrapolation};
pub use farey::{farey_map, stern_brocot_level, Fraction};
pub use grid::{ChebyshevGrid, GridFunction};
pub use mat2::{action_weight, moebius_apply, word_to_matrix, Mat2};
pub use params::{ChainParams, Enumerator, Exec, DEFAULT_CAP, DOUBLE_PRECISION, HARD_CAP};
pub use partition::{
    z_brute, z_constrained, z_grid, z_grid_with, z_recursive, ConstraintPattern, PartitionKind,
    PartitionSpec,
};
pub use spectral::{
    correlation_lengths, eigen_identities, eigenfunction_evenness_residual, free_energy,
    leading_eigen, lewis_residual, solve, transfer_apply, transfer_eval, ConvergenceGrade,
    CorrelationLengths, SolverOptions, SpectralResult, TransferOperator,
};
pub use word::{spin_flip, Spin, SpinWord};
pub use zeta::zeta;
