//! Named numerical tolerances shared across the crate.

/// Hermiticity defect allowed when certifying a density operator.
pub const HERM: f64 = 1e-10;
/// Allowed `|Tr ρ - 1|` when certifying a density operator.
pub const TRACE: f64 = 1e-10;
/// Positive-function operations refuse when `λ_min <= PD_FLOOR * λ_max`.
pub const PD_FLOOR: f64 = 1e-12;
/// Jacobi stops once the off-diagonal Frobenius norm is below `EIG * ‖H‖_F`.
pub const EIG: f64 = 1e-14;
/// Maximum number of cyclic Jacobi sweeps.
pub const EIG_MAX_SWEEPS: usize = 100;
/// Conditional mutual information below this counts as conditional independence.
pub const CI: f64 = 1e-9;
/// Overlap residual allowed between members of a consistent marginal family.
pub const CONSIST: f64 = 1e-10;
/// `1 - Tr T` at or below this is reported as Markov feasible.
pub const TRACE_CRITERION: f64 = 1e-9;
/// Upper edge of the gray zone reported as a boundary verdict.
pub const TRACE_BOUNDARY: f64 = 1e-6;
/// Normality defect (relative to `‖K‖_F²`) tolerated for the sandwich operator.
pub const NORMAL: f64 = 1e-10;
/// Marginal residual at which the maximum-entropy solver declares convergence.
pub const MAXENT: f64 = 1e-8;
/// Divergence gap below which monotonicity is treated as an equality.
pub const DIVERGENCE_GAP: f64 = 1e-8;
/// Recovery residual below which the Petz map is treated as exact.
pub const RECOVERY: f64 = 1e-7;
/// Off-subspace norm below which a resolvent counts as lying in `im J_A`.
pub const OFF_SUBSPACE: f64 = 1e-8;
/// The two-word qubit completion is accepted as strictly positive only while
/// `ε² + δ² < 1 - FEASIBILITY`.
pub const FEASIBILITY: f64 = 1e-10;
/// `|εδ|` below this counts as zero for the two-word qubit family.
pub const PRODUCT_ZERO: f64 = 1e-12;
