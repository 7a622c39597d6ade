//! Finite-horizon controllability Gramian and the ingredients of the
//! worst-case energy bound that depend only on `(A, B, t_f)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{expm, sym_eig_with, Matrix, NormKind, SpectralDecomposition, Vector};
use crate::quadrature::adaptive_simpson;
use crate::settings::NumericSettings;
use crate::system::LtiSystem;

fn check_horizon(t_f: f64) -> Result<()> {
    if t_f > 0.0 && t_f.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("horizon t_f must be positive, got {t_f}")))
    }
}

/// `W_B = ∫₀^{t_f} e^{At} B Bᵀ e^{Aᵀt} dt` with default settings.
pub fn controllability_gramian(sys: &LtiSystem, t_f: f64) -> Result<Matrix> {
    controllability_gramian_with(sys, t_f, &NumericSettings::default())
}

pub fn controllability_gramian_with(sys: &LtiSystem, t_f: f64, settings: &NumericSettings) -> Result<Matrix> {
    gramian_and_spectrum(sys, t_f, settings).map(|(w, _)| w)
}

/// Gramian from the augmented exponential
///
/// ```text
/// exp([[A, BBᵀ], [0, −Aᵀ]]·t_f) = [[e^{At_f}, F], [0, e^{−Aᵀt_f}]],   W_B = F·e^{Aᵀt_f}
/// ```
///
/// together with its own eigendecomposition, which doubles as the
/// conditioning check.
fn gramian_and_spectrum(
    sys: &LtiSystem,
    t_f: f64,
    settings: &NumericSettings,
) -> Result<(Matrix, SpectralDecomposition)> {
    check_horizon(t_f)?;
    let n = sys.state_dim();
    let a = sys.a();
    let bbt = sys.b() * &sys.b().transpose();
    let mut aug = Matrix::zeros(2 * n, 2 * n);
    aug.set_block(0, 0, a);
    aug.set_block(0, n, &bbt);
    aug.set_block(n, n, &a.transpose().scale(-1.0));
    let e = expm(&aug.scale(t_f))?;
    let phi = e.block(0, 0, n, n);
    let f = e.block(0, n, n, n);
    let w = (&f * &phi.transpose()).symmetrized();

    let spec = sym_eig_with(&w, settings)?;
    let (hi, lo) = (spec.max_eigenvalue(), spec.min_eigenvalue());
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if condition > settings.gramian_max_condition {
        return Err(Error::IllConditioned {
            horizon: t_f,
            condition,
        });
    }
    Ok((w, spec))
}

/// `∫₀^{t_f} ‖e^{A(t_f−t)}‖∞ dt = ∫₀^{t_f} ‖e^{As}‖∞ ds` with default settings.
pub fn norm_integral(sys: &LtiSystem, t_f: f64) -> Result<f64> {
    norm_integral_with(sys, t_f, &NumericSettings::default())
}

/// Adaptive Simpson with absolute tolerance `norm_integral_tol·t_f`.
pub fn norm_integral_with(sys: &LtiSystem, t_f: f64, settings: &NumericSettings) -> Result<f64> {
    check_horizon(t_f)?;
    let a = sys.a();
    let mut failure = None;
    let integrand = |s: f64| match expm(&a.scale(s)) {
        Ok(e) => e.norm(NormKind::Inf),
        Err(err) => {
            failure.get_or_insert(err);
            0.0
        }
    };
    let q = adaptive_simpson(
        integrand,
        0.0,
        t_f,
        settings.norm_integral_tol * t_f,
        settings.quadrature_max_depth,
    )?;
    match failure {
        Some(err) => Err(err),
        None => Ok(q.value),
    }
}

/// Everything about `(A, B, t_f)` that the energy and metric formulas need.
#[derive(Debug, Clone, Serialize)]
pub struct GramianBundle {
    pub t_f: f64,
    pub w_b: Matrix,
    pub w_b_inv: Matrix,
    /// Spectral decomposition `W_B⁻¹ = U Λ Uᵀ`, eigenvalues descending.
    pub spec: SpectralDecomposition,
    /// `∫₀^{t_f} ‖e^{A(t_f−t)}‖∞ dt`, i.e. the disturbance-response bound for `w̄ = 1`.
    pub v_bar_unit: f64,
    /// `e^{At_f}`
    pub exp_a_tf: Matrix,
}

impl GramianBundle {
    pub fn dim(&self) -> usize {
        self.w_b.rows()
    }

    /// `‖W_B·W_B⁻¹ − I‖∞`
    pub fn inverse_residual(&self) -> f64 {
        (&self.w_b * &self.w_b_inv)
            .sub(&Matrix::identity(self.dim()))
            .norm(NormKind::Inf)
    }

    /// `e^{At_f} x0`
    pub fn free_response(&self, x0: &Vector) -> Vector {
        self.exp_a_tf.mul_vec(x0)
    }

    /// Fails unless the bundle was built for this system's state dimension and this horizon.
    pub fn check(&self, sys: &LtiSystem, t_f: f64) -> Result<()> {
        if self.dim() != sys.state_dim() {
            return Err(Error::dim(format!(
                "bundle has dimension {} but the system has {} states",
                self.dim(),
                sys.state_dim()
            )));
        }
        if (self.t_f - t_f).abs() > 1e-12 * t_f.abs().max(1.0) {
            return Err(Error::domain(format!(
                "bundle was built for t_f = {} but the task uses t_f = {t_f}",
                self.t_f
            )));
        }
        Ok(())
    }
}

pub fn build_bundle(sys: &LtiSystem, t_f: f64) -> Result<GramianBundle> {
    build_bundle_with(sys, t_f, &NumericSettings::default())
}

/// Builds the Gramian, inverts it through its own eigendecomposition
/// (`W_B = VMVᵀ ⇒ W_B⁻¹ = VM⁻¹Vᵀ`) and evaluates the norm integral.
pub fn build_bundle_with(sys: &LtiSystem, t_f: f64, settings: &NumericSettings) -> Result<GramianBundle> {
    let (w_b, w_spec) = gramian_and_spectrum(sys, t_f, settings)?;
    let n = w_b.rows();

    // ascending μ ⇒ descending 1/μ
    let mut u = Matrix::zeros(n, n);
    let mut lambdas = Vector::zeros(n);
    for k in 0..n {
        let src = n - 1 - k;
        lambdas[k] = 1.0 / w_spec.lambdas[src];
        for i in 0..n {
            u[(i, k)] = w_spec.u[(i, src)];
        }
    }
    let spec = SpectralDecomposition { u, lambdas };
    let w_b_inv = spec.reconstruct().symmetrized();

    let v_bar_unit = norm_integral_with(sys, t_f, settings)?;
    let exp_a_tf = expm(&sys.a().scale(t_f))?;
    Ok(GramianBundle {
        t_f,
        w_b,
        w_b_inv,
        spec,
        v_bar_unit,
        exp_a_tf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrator(n: usize) -> LtiSystem {
        LtiSystem::new("int", Matrix::zeros(n, n), Matrix::identity(n)).unwrap()
    }

    #[test]
    fn scalar_integrator_gramian() {
        let w = controllability_gramian(&integrator(1), 1.0).unwrap();
        assert!((w[(0, 0)] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn vector_integrator_gramian_is_horizon_times_identity() {
        let w = controllability_gramian(&integrator(2), 2.0).unwrap();
        assert!(w.sub(&Matrix::identity(2).scale(2.0)).max_abs() < 1e-13);
    }

    #[test]
    fn nonpositive_horizon_is_rejected() {
        assert!(matches!(
            controllability_gramian(&integrator(1), 0.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(norm_integral(&integrator(1), -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn norm_integral_closed_forms() {
        let v = norm_integral(&integrator(3), 3.0).unwrap();
        assert!((v - 3.0).abs() < 1e-12);
        let decay = LtiSystem::new("decay", Matrix::from_diag(&[-1.0]), Matrix::identity(1)).unwrap();
        let v = norm_integral(&decay, 1.0).unwrap();
        assert!((v - (1.0 - (-1f64).exp())).abs() < 1e-9);
    }

    #[test]
    fn integrator_bundle() {
        let b = build_bundle(&integrator(2), 1.0).unwrap();
        assert!(b.w_b.sub(&Matrix::identity(2)).max_abs() < 1e-14);
        assert!(b.w_b_inv.sub(&Matrix::identity(2)).max_abs() < 1e-14);
        assert_eq!(b.spec.lambdas.as_slice(), &[1.0, 1.0]);
        assert!((b.v_bar_unit - 1.0).abs() < 1e-12);
    }

    #[test]
    fn short_horizon_on_weakly_coupled_chain_is_ill_conditioned() {
        // triple integrator driven at the end of the chain: λ_min(W_B) ~ t_f⁵
        let a = Matrix::from_rows(&[[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]]).unwrap();
        let b = Matrix::from_rows(&[[0.0], [0.0], [1.0]]).unwrap();
        let sys = LtiSystem::new("chain", a, b).unwrap();
        match controllability_gramian(&sys, 1e-4) {
            Err(Error::IllConditioned { horizon, .. }) => assert_eq!(horizon, 1e-4),
            other => panic!("{other:?}"),
        }
        assert!(controllability_gramian(&sys, 1.0).is_ok());
    }
}
