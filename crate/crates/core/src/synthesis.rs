//! Minimum-energy open-loop controls that reach the origin exactly at `t_f`.
//!
//! Both controls share the form `u(t) = −Bᵀ e^{Aᵀ(t_f−t)} g` with a constant
//! gain `g = W_B⁻¹ z`: for the nominal plant `z = e^{At_f}x0`, and for the
//! disturbed plant `z = e^{At_f}x0 + R(w, t_f)` where
//! `R(w, t_f) = ∫₀^{t_f} e^{A(t_f−τ)} w(τ) dτ` must be known in advance.

use serde::Serialize;

use crate::disturbance::{DisturbanceSignal, Side};
use crate::error::{Error, Result};
use crate::gramian::GramianBundle;
use crate::linalg::{expm, Matrix, NormKind, Vector};
use crate::settings::NumericSettings;
use crate::system::{LtiSystem, StabilizationTask};

// fresh exponential every this many grid steps; products in between
const REANCHOR: usize = 64;

/// `e^{A(t_f − τⱼ)}` on the uniform grid `τⱼ = j·t_f/m`, `j = 0..=m`.
#[derive(Debug, Clone)]
pub struct PropagatorGrid {
    t_f: f64,
    intervals: usize,
    mats: Vec<Matrix>,
}

impl PropagatorGrid {
    pub fn new(a: &Matrix, t_f: f64, intervals: usize) -> Result<Self> {
        if intervals == 0 {
            return Err(Error::domain("propagator grid needs at least one interval"));
        }
        let h = t_f / intervals as f64;
        let step = expm(&a.scale(h))?;
        let mut mats = vec![Matrix::zeros(0, 0); intervals + 1];
        for j in (0..=intervals).rev() {
            let remaining = intervals - j;
            mats[j] = if remaining.is_multiple_of(REANCHOR) {
                expm(&a.scale(remaining as f64 * h))?
            } else {
                &step * &mats[j + 1]
            };
        }
        Ok(Self { t_f, intervals, mats })
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn step(&self) -> f64 {
        self.t_f / self.intervals as f64
    }

    pub fn time(&self, j: usize) -> f64 {
        if j == self.intervals {
            self.t_f
        } else {
            j as f64 * self.step()
        }
    }

    /// `e^{A(t_f − τⱼ)}`
    pub fn at(&self, j: usize) -> &Matrix {
        &self.mats[j]
    }
}

/// Computes `R(w, t_f)` by composite Simpson with successive halving,
/// caching the propagator grids so repeated calls for the same plant and
/// horizon are cheap.
///
/// Piecewise-constant signals are integrated on grids aligned with their
/// cells, evaluating one-sided limits at panel ends, so every Simpson panel
/// sees a smooth integrand.
#[derive(Debug, Clone)]
pub struct ResponseIntegrator {
    a: Matrix,
    t_f: f64,
    settings: NumericSettings,
    grids: Vec<PropagatorGrid>,
}

impl ResponseIntegrator {
    pub fn new(sys: &LtiSystem, t_f: f64) -> Result<Self> {
        Self::with_settings(sys, t_f, NumericSettings::default())
    }

    pub fn with_settings(sys: &LtiSystem, t_f: f64, settings: NumericSettings) -> Result<Self> {
        if !(t_f > 0.0 && t_f.is_finite()) {
            return Err(Error::domain(format!("horizon t_f must be positive, got {t_f}")));
        }
        Ok(Self {
            a: sys.a().clone(),
            t_f,
            settings,
            grids: Vec::new(),
        })
    }

    pub fn t_f(&self) -> f64 {
        self.t_f
    }

    fn grid(&mut self, intervals: usize) -> Result<&PropagatorGrid> {
        if let Some(pos) = self.grids.iter().position(|g| g.intervals == intervals) {
            return Ok(&self.grids[pos]);
        }
        self.grids.push(PropagatorGrid::new(&self.a, self.t_f, intervals)?);
        Ok(self.grids.last().expect("just pushed"))
    }

    fn simpson(&mut self, w: &DisturbanceSignal, intervals: usize) -> Result<Vector> {
        let n = w.dim();
        let grid = self.grid(intervals)?;
        let h = grid.step();
        let mut acc = Vector::zeros(n);
        let mut wv = vec![0.0; n];
        for k in 0..intervals / 2 {
            let (j0, j1, j2) = (2 * k, 2 * k + 1, 2 * k + 2);
            w.eval_into(grid.time(j0), Side::Right, &mut wv)?;
            acc.axpy(1.0, &grid.at(j0).mul_vec(&wv));
            w.eval_into(grid.time(j1), Side::Right, &mut wv)?;
            acc.axpy(4.0, &grid.at(j1).mul_vec(&wv));
            w.eval_into(grid.time(j2), Side::Left, &mut wv)?;
            acc.axpy(1.0, &grid.at(j2).mul_vec(&wv));
        }
        Ok(acc.scale(h / 3.0))
    }

    fn initial_intervals(&self, w: &DisturbanceSignal) -> usize {
        let mut m = 64usize;
        // two grid points per radian of the fastest oscillation
        let osc = (2.0 * w.max_frequency() * self.t_f).ceil() as usize;
        m = m.max(osc.next_power_of_two());
        if let Some(cells) = w.cells() {
            m = (2 * cells) * m.div_ceil(2 * cells);
        }
        m.next_multiple_of(2)
    }

    /// `R(w, t_f)`, refined until halving the step changes it by less than
    /// `response_rel_tol` relative.
    pub fn response(&mut self, w: &DisturbanceSignal) -> Result<Vector> {
        if w.dim() != self.a.rows() {
            return Err(Error::dim(format!(
                "disturbance has dimension {} but the system has {} states",
                w.dim(),
                self.a.rows()
            )));
        }
        w.check_defined_on(self.t_f)?;
        if w.is_zero() {
            return Ok(Vector::zeros(w.dim()));
        }
        let tol = self.settings.response_rel_tol;
        let floor = 1e-12 * self.t_f * w.amplitude_bound();
        let mut m = self.initial_intervals(w);
        let mut prev = self.simpson(w, m)?;
        loop {
            let next_m = 2 * m;
            let cur = self.simpson(w, next_m)?;
            let change = cur.sub(&prev).norm(NormKind::Inf);
            let scale = cur.norm(NormKind::Inf).max(floor);
            if change <= tol * scale {
                return Ok(cur);
            }
            if next_m >= self.settings.response_max_panels {
                return Err(Error::Quadrature {
                    estimate: cur.norm(NormKind::Inf),
                    error_bound: change,
                    tolerance: tol * scale,
                });
            }
            m = next_m;
            prev = cur;
        }
    }
}

/// One-shot `R(w, t_f)`.
pub fn disturbance_response(sys: &LtiSystem, w: &DisturbanceSignal, t_f: f64) -> Result<Vector> {
    ResponseIntegrator::new(sys, t_f)?.response(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlKind {
    Nominal,
    Disturbed,
}

/// `u(t) = −Bᵀ e^{Aᵀ(t_f−t)} g` on `[0, t_f]`.
#[derive(Debug, Clone)]
pub struct ControlSignal {
    a: Matrix,
    b: Matrix,
    t_f: f64,
    kind: ControlKind,
    gain: Vector,
}

impl ControlSignal {
    /// `u ≡ 0` on `[0, t_f]`.
    pub fn zero(sys: &LtiSystem, t_f: f64) -> Self {
        Self {
            a: sys.a().clone(),
            b: sys.b().clone(),
            t_f,
            kind: ControlKind::Nominal,
            gain: Vector::zeros(sys.state_dim()),
        }
    }

    pub fn kind(&self) -> ControlKind {
        self.kind
    }

    pub fn t_f(&self) -> f64 {
        self.t_f
    }

    pub fn input_dim(&self) -> usize {
        self.b.cols()
    }

    /// The constant `W_B⁻¹ z` the signal encodes.
    pub fn gain_vector(&self) -> &Vector {
        &self.gain
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if (0.0..=self.t_f).contains(&t) {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "control is defined on [0, {}], evaluated at t = {t}",
                self.t_f
            )))
        }
    }

    /// Evaluates `u(t)` with a fresh matrix exponential.
    pub fn eval(&self, t: f64) -> Result<Vector> {
        self.check_time(t)?;
        let e = expm(&self.a.scale(self.t_f - t))?;
        Ok(self.from_propagator(&e))
    }

    /// `u` from a precomputed `e^{A(t_f−t)}` (note: not transposed).
    pub fn from_propagator(&self, e: &Matrix) -> Vector {
        let y = e.tr_mul_vec(&self.gain);
        self.b.tr_mul_vec(&y).scale(-1.0)
    }

    /// Values at `τⱼ = j·t_f/m`, `j = 0..=m`, from a single propagator grid.
    pub fn sample_uniform(&self, intervals: usize) -> Result<Vec<Vector>> {
        let grid = PropagatorGrid::new(&self.a, self.t_f, intervals)?;
        Ok(self.sample_on(&grid))
    }

    pub fn sample_on(&self, grid: &PropagatorGrid) -> Vec<Vector> {
        (0..=grid.intervals())
            .map(|j| self.from_propagator(grid.at(j)))
            .collect()
    }
}

fn check_inputs(sys: &LtiSystem, task: &StabilizationTask, bundle: &GramianBundle) -> Result<()> {
    task.check_system(sys)?;
    bundle.check(sys, task.t_f())
}

fn check_admissible(sys: &LtiSystem, task: &StabilizationTask, w: &DisturbanceSignal) -> Result<()> {
    if w.dim() != sys.state_dim() {
        return Err(Error::dim(format!(
            "disturbance has dimension {} but the system has {} states",
            w.dim(),
            sys.state_dim()
        )));
    }
    let amp = w.amplitude_bound();
    if amp > task.w_bar() * (1.0 + 1e-12) {
        return Err(Error::domain(format!(
            "disturbance amplitude {amp} exceeds the task bound {}",
            task.w_bar()
        )));
    }
    w.check_defined_on(task.t_f())
}

fn control_from(
    sys: &LtiSystem,
    task: &StabilizationTask,
    bundle: &GramianBundle,
    z: &Vector,
    kind: ControlKind,
) -> ControlSignal {
    ControlSignal {
        a: sys.a().clone(),
        b: sys.b().clone(),
        t_f: task.t_f(),
        kind,
        gain: bundle.w_b_inv.mul_vec(z),
    }
}

/// `u_N(t) = −Bᵀe^{Aᵀ(t_f−t)} W_B⁻¹ e^{At_f} x0`
pub fn nominal_control(sys: &LtiSystem, task: &StabilizationTask, bundle: &GramianBundle) -> Result<ControlSignal> {
    check_inputs(sys, task, bundle)?;
    let z = bundle.free_response(task.x0());
    Ok(control_from(sys, task, bundle, &z, ControlKind::Nominal))
}

/// `u_D(t) = −Bᵀe^{Aᵀ(t_f−t)} W_B⁻¹ [e^{At_f} x0 + R(w, t_f)]`
pub fn disturbed_control(
    sys: &LtiSystem,
    task: &StabilizationTask,
    bundle: &GramianBundle,
    w: &DisturbanceSignal,
) -> Result<ControlSignal> {
    check_inputs(sys, task, bundle)?;
    check_admissible(sys, task, w)?;
    let r = disturbance_response(sys, w, task.t_f())?;
    disturbed_control_from_response(sys, task, bundle, &r)
}

/// Same as [`disturbed_control`] with `R(w, t_f)` supplied by the caller.
pub fn disturbed_control_from_response(
    sys: &LtiSystem,
    task: &StabilizationTask,
    bundle: &GramianBundle,
    response: &Vector,
) -> Result<ControlSignal> {
    check_inputs(sys, task, bundle)?;
    if response.dim() != sys.state_dim() {
        return Err(Error::dim("disturbance response has the wrong dimension"));
    }
    let z = bundle.free_response(task.x0()).add(response);
    Ok(control_from(sys, task, bundle, &z, ControlKind::Disturbed))
}
