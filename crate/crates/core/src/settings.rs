use serde::{Deserialize, Serialize};

/// Numerical tolerances and iteration budgets used throughout the crate.
///
/// Every field has a default; a JSON config may override any subset of them
/// (missing fields keep their defaults).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericSettings {
    /// Relative symmetry tolerance accepted by the eigensolver, `‖M − Mᵀ‖∞ ≤ tol·‖M‖∞`.
    pub symmetry_tol: f64,
    /// Jacobi stops once the off-diagonal Frobenius mass falls below `tol·‖M‖_F`.
    pub jacobi_tol: f64,
    pub jacobi_max_sweeps: usize,
    /// Largest accepted `λ_max/λ_min` of the controllability Gramian.
    pub gramian_max_condition: f64,
    /// Absolute tolerance of the norm integral, relative to the horizon length.
    pub norm_integral_tol: f64,
    /// Maximum number of interval halvings in adaptive Simpson quadrature.
    pub quadrature_max_depth: usize,
    /// Relative change below which successive disturbance-response estimates are accepted.
    pub response_rel_tol: f64,
    /// Panel count at which disturbance-response refinement gives up.
    pub response_max_panels: usize,
    /// Relative singular-value threshold for the controllability rank test.
    pub rank_tol: f64,
}

impl Default for NumericSettings {
    fn default() -> Self {
        Self {
            symmetry_tol: 1e-10,
            jacobi_tol: 1e-12,
            jacobi_max_sweeps: 100,
            gramian_max_condition: 1e14,
            norm_integral_tol: 1e-9,
            quadrature_max_depth: 24,
            response_rel_tol: 1e-9,
            response_max_panels: 1 << 20,
            rank_tol: 1e-10,
        }
    }
}
