//! Default numerical tolerances. Every report records the values it used.

/// Exact multilinear identities (basis Gram matrices, Bianchi residuals).
pub const EXACT: f64 = 1e-12;

/// Proof identities evaluated through several contractions.
pub const IDENTITY: f64 = 1e-10;

/// Quantities derived from a symmetric eigendecomposition.
pub const EIGEN: f64 = 1e-9;

/// Band around zero inside which a cone margin counts as "boundary".
pub const BOUNDARY: f64 = 1e-9;

/// Eigenvalue gap used to group a computed spectrum into multiplicities.
pub const CLUSTER_GAP: f64 = 1e-7;

/// Norm below which a curvature tensor is treated as algebraically flat.
pub const FLAT: f64 = 1e-7;

/// Slack for conclusions that are only checked on sampled frames.
pub const SAMPLED: f64 = 1e-6;

/// Variance threshold for constant holomorphic sectional curvature.
pub const HSC_VARIANCE: f64 = 1e-6;

/// Kähler symmetry residual above which input is rejected.
pub const KAHLER_INPUT: f64 = 1e-8;

/// Largest supported dimension unless a caller raises the cap.
pub const DEFAULT_MAX_DIM: usize = 12;
