//! Nominal energy, per-disturbance energy, and the worst-case energy bound.

use serde::Serialize;

use crate::disturbance::DisturbanceSignal;
use crate::error::{Error, Result};
use crate::gramian::GramianBundle;
use crate::linalg::{NormKind, Vector};
use crate::synthesis::disturbance_response;
use crate::system::{LtiSystem, StabilizationTask};

/// Worst-case energy bound and its pieces for one `(x0, t_f, w̄)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    /// Minimum nominal energy `E_N*`.
    #[serde(rename = "E_N")]
    pub e_n: f64,
    /// Upper bound `Ē_D = E_N + cross_term + c_term` on the disturbed energy.
    #[serde(rename = "E_D_bound")]
    pub e_d_bound: f64,
    /// `q̄ = w̄·‖U‖₁·∫₀^{t_f}‖e^{A(t_f−t)}‖∞dt`
    pub q_bar: f64,
    /// Maximiser `q* = q̄·sign(p)` of the relaxed problem, `p = ΛUᵀe^{At_f}x0`.
    pub witness_q: Vector,
    /// `q̄²·Σλᵢ`
    pub c_term: f64,
    /// `2q̄·‖p‖₁`
    pub cross_term: f64,
}

fn check(sys: &LtiSystem, task: &StabilizationTask, bundle: &GramianBundle) -> Result<()> {
    task.check_system(sys)?;
    bundle.check(sys, task.t_f())
}

/// `zᵀW_B⁻¹z` evaluated as `‖Λ^{1/2}Uᵀz‖₂²`, which cannot go negative.
pub fn weighted_energy(bundle: &GramianBundle, z: &Vector) -> Result<f64> {
    if z.dim() != bundle.dim() {
        return Err(Error::dim(format!(
            "vector of dimension {} against a bundle of dimension {}",
            z.dim(),
            bundle.dim()
        )));
    }
    let y = bundle.spec.u.tr_mul_vec(z);
    Ok(y.iter()
        .zip(bundle.spec.lambdas.iter())
        .map(|(yi, li)| (li.sqrt() * yi).powi(2))
        .sum())
}

/// `E_N* = x0ᵀe^{Aᵀt_f}W_B⁻¹e^{At_f}x0`
pub fn nominal_energy(sys: &LtiSystem, task: &StabilizationTask, bundle: &GramianBundle) -> Result<f64> {
    check(sys, task, bundle)?;
    weighted_energy(bundle, &bundle.free_response(task.x0()))
}

/// `‖u_D‖²_{L2} = [e^{At_f}x0 + R]ᵀ W_B⁻¹ [e^{At_f}x0 + R]` for a known disturbance.
pub fn disturbed_signal_energy(
    sys: &LtiSystem,
    task: &StabilizationTask,
    bundle: &GramianBundle,
    w: &DisturbanceSignal,
) -> Result<f64> {
    check(sys, task, bundle)?;
    if w.amplitude_bound() > task.w_bar() * (1.0 + 1e-12) {
        return Err(Error::domain(format!(
            "disturbance amplitude {} exceeds the task bound {}",
            w.amplitude_bound(),
            task.w_bar()
        )));
    }
    let r = disturbance_response(sys, w, task.t_f())?;
    disturbed_signal_energy_from_response(sys, task, bundle, &r)
}

/// [`disturbed_signal_energy`] with `R(w, t_f)` already computed.
pub fn disturbed_signal_energy_from_response(
    sys: &LtiSystem,
    task: &StabilizationTask,
    bundle: &GramianBundle,
    response: &Vector,
) -> Result<f64> {
    check(sys, task, bundle)?;
    if response.dim() != sys.state_dim() {
        return Err(Error::dim("disturbance response has the wrong dimension"));
    }
    weighted_energy(bundle, &bundle.free_response(task.x0()).add(response))
}

/// `q̄` for a given disturbance bound.
pub fn q_bar(bundle: &GramianBundle, w_bar: f64) -> f64 {
    w_bar * bundle.spec.u.norm(NormKind::One) * bundle.v_bar_unit
}

/// Worst-case bound `Ē_D = E_N + 2q̄‖ΛUᵀe^{At_f}x0‖₁ + q̄²Σλᵢ`.
pub fn disturbed_energy_bound(
    sys: &LtiSystem,
    task: &StabilizationTask,
    bundle: &GramianBundle,
) -> Result<EnergyReport> {
    check(sys, task, bundle)?;
    let z = bundle.free_response(task.x0());
    let e_n = weighted_energy(bundle, &z)?;
    let qb = q_bar(bundle, task.w_bar());

    let mut p = bundle.spec.u.tr_mul_vec(&z);
    for (pi, li) in p.iter_mut().zip(bundle.spec.lambdas.iter()) {
        *pi *= li;
    }
    let cross_term = 2.0 * qb * p.norm(NormKind::One);
    let c_term = qb * qb * bundle.spec.lambdas.iter().sum::<f64>();
    Ok(EnergyReport {
        e_n,
        e_d_bound: e_n + cross_term + c_term,
        q_bar: qb,
        witness_q: p.sign().scale(qb),
        c_term,
        cross_term,
    })
}
