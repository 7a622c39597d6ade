//! Closed-form bounds on the additive and multiplicative cost of
//! disturbance, and the task hardness `H = R/t_f`.

use serde::Serialize;

use crate::energy::q_bar;
use crate::error::{Error, Result};
use crate::gramian::GramianBundle;
use crate::linalg::{sym_eig, Matrix, NormKind};
use crate::system::LtiSystem;

/// The `(R, x0)`-independent constants shared by both metric bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricConstants {
    /// `γ = 2q̄‖ΛUᵀe^{At_f}‖₁`
    pub gamma: f64,
    /// `c = q̄²Σλᵢ`
    pub c_term: f64,
    /// `l = λ_min(e^{Aᵀt_f} W_B⁻¹ e^{At_f})`
    pub l_min: f64,
    /// State dimension.
    pub n: usize,
}

impl MetricConstants {
    pub fn new(sys: &LtiSystem, bundle: &GramianBundle, w_bar: f64) -> Result<Self> {
        if bundle.dim() != sys.state_dim() {
            return Err(Error::dim(format!(
                "bundle has dimension {} but the system has {} states",
                bundle.dim(),
                sys.state_dim()
            )));
        }
        if !(w_bar >= 0.0 && w_bar.is_finite()) {
            return Err(Error::domain(format!(
                "disturbance bound must be nonnegative, got {w_bar}"
            )));
        }
        let n = bundle.dim();
        let qb = q_bar(bundle, w_bar);

        // ΛUᵀe^{At_f}
        let mut lut = &bundle.spec.u.transpose() * &bundle.exp_a_tf;
        for i in 0..n {
            let li = bundle.spec.lambdas[i];
            for j in 0..n {
                lut[(i, j)] *= li;
            }
        }
        let gamma = 2.0 * qb * lut.norm(NormKind::One);
        let c_term = qb * qb * bundle.spec.lambdas.iter().sum::<f64>();

        let m: Matrix = &(&bundle.exp_a_tf.transpose() * &bundle.w_b_inv) * &bundle.exp_a_tf;
        let l_min = sym_eig(&m.symmetrized())?.min_eigenvalue();
        Ok(Self {
            gamma,
            c_term,
            l_min,
            n,
        })
    }

    /// `c + γR√n`
    pub fn additive_bound(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::domain(format!("radius R must be nonnegative, got {r}")));
        }
        Ok(self.c_term + self.gamma * r * (self.n as f64).sqrt())
    }

    /// `lR² / (lR² + γR√n + c)`
    pub fn multiplicative_bound(&self, r: f64) -> Result<f64> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::domain(format!("radius R must be positive, got {r}")));
        }
        let lr2 = self.l_min * r * r;
        Ok(lr2 / (lr2 + self.gamma * r * (self.n as f64).sqrt() + self.c_term))
    }
}

/// Upper bound on `sup_{‖x0‖₂≤R} E_D* − E_N*`.
pub fn additive_metric_bound(sys: &LtiSystem, bundle: &GramianBundle, w_bar: f64, r: f64) -> Result<f64> {
    MetricConstants::new(sys, bundle, w_bar)?.additive_bound(r)
}

/// Lower bound on `inf_{‖x0‖₂≥R} E_N*/E_D*`.
pub fn multiplicative_metric_bound(sys: &LtiSystem, bundle: &GramianBundle, w_bar: f64, r: f64) -> Result<f64> {
    MetricConstants::new(sys, bundle, w_bar)?.multiplicative_bound(r)
}

/// `H = R / t_f`
pub fn hardness(r: f64, t_f: f64) -> Result<f64> {
    if !(t_f > 0.0 && t_f.is_finite()) {
        return Err(Error::domain(format!("horizon t_f must be positive, got {t_f}")));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::domain(format!("radius R must be nonnegative, got {r}")));
    }
    Ok(r / t_f)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    #[serde(rename = "R")]
    pub r: f64,
    pub t_f: f64,
    pub r_a_bound: f64,
    pub r_m_bound: f64,
    pub hardness: f64,
    pub gamma: f64,
    pub c_term: f64,
    pub l_min: f64,
}

pub fn metric_report(sys: &LtiSystem, bundle: &GramianBundle, w_bar: f64, r: f64) -> Result<MetricReport> {
    let k = MetricConstants::new(sys, bundle, w_bar)?;
    Ok(MetricReport {
        r,
        t_f: bundle.t_f,
        r_a_bound: k.additive_bound(r)?,
        r_m_bound: k.multiplicative_bound(r)?,
        hardness: hardness(r, bundle.t_f)?,
        gamma: k.gamma,
        c_term: k.c_term,
        l_min: k.l_min,
    })
}
