//! Fixed-step RK4 integration of `ẋ = Ax + Bu(t) + w(t)` under an open-loop control.

use std::io::Write;

use serde::Serialize;

use crate::disturbance::{DisturbanceSignal, Side};
use crate::error::{Error, Result};
use crate::linalg::{NormKind, Vector};
use crate::synthesis::{ControlSignal, PropagatorGrid};
use crate::system::{LtiSystem, StabilizationTask};

pub const MIN_STEPS: usize = 100;
pub const DEFAULT_STEPS: usize = 5000;

/// Sampled closed-loop run on the uniform integration grid.
#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vector>,
    pub controls: Vec<Vector>,
    pub state_norms: Vec<f64>,
    /// `∫₀^t ‖u‖₂²`, composite Simpson over each step and its midpoint.
    pub control_energy_running: Vec<f64>,
}

impl Trajectory {
    pub fn terminal_state(&self) -> &Vector {
        self.states.last().expect("trajectory is never empty")
    }

    /// `‖x(t_f)‖₂ / ‖x0‖₂`
    pub fn terminal_residual(&self) -> f64 {
        self.terminal_state().norm(NormKind::Two) / self.states[0].norm(NormKind::Two)
    }

    pub fn energy(&self) -> f64 {
        *self.control_energy_running.last().expect("trajectory is never empty")
    }

    /// CSV with header `t,x1..xn,u1..up,xnorm,energy` and shortest round-trip numbers.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let n = self.states[0].dim();
        let p = self.controls[0].dim();
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|i| format!("x{i}")));
        header.extend((1..=p).map(|i| format!("u{i}")));
        header.push("xnorm".into());
        header.push("energy".into());
        writeln!(out, "{}", header.join(","))?;
        for k in 0..self.times.len() {
            let mut fields = vec![fmt_num(self.times[k])];
            fields.extend(self.states[k].iter().map(|&v| fmt_num(v)));
            fields.extend(self.controls[k].iter().map(|&v| fmt_num(v)));
            fields.push(fmt_num(self.state_norms[k]));
            fields.push(fmt_num(self.control_energy_running[k]));
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }
}

/// Shortest decimal that round-trips to the same `f64`.
pub fn fmt_num(v: f64) -> String {
    format!("{v:?}")
}

/// Integrates the closed loop with classical RK4 on `steps` uniform steps.
///
/// The control is read from a propagator grid at the step ends and
/// midpoints (the RK4 stage times). The disturbance is evaluated as a right
/// limit at the start of a step and a left limit at its end, so a signal that
/// is constant on each step enters exactly.
pub fn simulate_closed_loop(
    sys: &LtiSystem,
    task: &StabilizationTask,
    u: &ControlSignal,
    w: &DisturbanceSignal,
    steps: usize,
) -> Result<Trajectory> {
    task.check_system(sys)?;
    if steps < MIN_STEPS {
        return Err(Error::domain(format!("need at least {MIN_STEPS} steps, got {steps}")));
    }
    let t_f = task.t_f();
    if (u.t_f() - t_f).abs() > 1e-12 * t_f {
        return Err(Error::domain(format!(
            "control is defined on [0, {}] but the task horizon is {t_f}",
            u.t_f()
        )));
    }
    if u.input_dim() != sys.input_dim() {
        return Err(Error::dim("control has the wrong input dimension"));
    }
    if w.dim() != sys.state_dim() {
        return Err(Error::dim("disturbance has the wrong dimension"));
    }
    w.check_defined_on(t_f)?;

    let n = sys.state_dim();
    let a = sys.a();
    let b = sys.b();
    let h = t_f / steps as f64;
    let grid = PropagatorGrid::new(a, t_f, 2 * steps)?;
    let stage_u = u.sample_on(&grid);
    let bu: Vec<Vector> = stage_u.iter().map(|v| b.mul_vec(v)).collect();

    let mut wv = vec![0.0; n];
    let mut field = |x: &Vector, j: usize, t: f64, side: Side| -> Result<Vector> {
        w.eval_into(t, side, &mut wv)?;
        let mut dx = a.mul_vec(x);
        dx.axpy(1.0, &bu[j]);
        for (d, wi) in dx.iter_mut().zip(&wv) {
            *d += wi;
        }
        Ok(dx)
    };

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut controls = Vec::with_capacity(steps + 1);
    let mut norms = Vec::with_capacity(steps + 1);
    let mut energy = Vec::with_capacity(steps + 1);

    let mut x = task.x0().clone();
    let mut e = 0.0;
    for k in 0..=steps {
        let t = if k == steps { t_f } else { k as f64 * h };
        times.push(t);
        norms.push(x.norm(NormKind::Two));
        controls.push(stage_u[2 * k].clone());
        states.push(x.clone());
        energy.push(e);
        if k == steps {
            break;
        }

        let t_mid = t + 0.5 * h;
        let t_end = if k + 1 == steps { t_f } else { (k + 1) as f64 * h };
        let k1 = field(&x, 2 * k, t, Side::Right)?;
        let mut x2 = x.clone();
        x2.axpy(0.5 * h, &k1);
        let k2 = field(&x2, 2 * k + 1, t_mid, Side::Right)?;
        let mut x3 = x.clone();
        x3.axpy(0.5 * h, &k2);
        let k3 = field(&x3, 2 * k + 1, t_mid, Side::Right)?;
        let mut x4 = x.clone();
        x4.axpy(h, &k3);
        let k4 = field(&x4, 2 * k + 2, t_end, Side::Left)?;
        x.axpy(h / 6.0, &k1);
        x.axpy(h / 3.0, &k2);
        x.axpy(h / 3.0, &k3);
        x.axpy(h / 6.0, &k4);

        e += h / 6.0
            * (stage_u[2 * k].norm_squared()
                + 4.0 * stage_u[2 * k + 1].norm_squared()
                + stage_u[2 * k + 2].norm_squared());
    }

    Ok(Trajectory {
        times,
        states,
        controls,
        state_norms: norms,
        control_energy_running: energy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gramian::build_bundle;
    use crate::linalg::Matrix;
    use crate::synthesis::nominal_control;

    fn integrator(n: usize) -> LtiSystem {
        LtiSystem::new("int", Matrix::zeros(n, n), Matrix::identity(n)).unwrap()
    }

    #[test]
    fn zero_field_keeps_the_state() {
        let sys = integrator(2);
        let task = StabilizationTask::new(Vector::new(vec![1.0, -2.0]).unwrap(), 1.0, 0.0).unwrap();
        let u = ControlSignal::zero(&sys, 1.0);
        let tr = simulate_closed_loop(&sys, &task, &u, &DisturbanceSignal::zero(2), 100).unwrap();
        assert!(tr.states.iter().all(|x| x == task.x0()));
        assert_eq!(tr.energy(), 0.0);
    }

    #[test]
    fn scalar_integrator_follows_straight_line() {
        let sys = integrator(1);
        let task = StabilizationTask::new(Vector::new(vec![1.0]).unwrap(), 1.0, 0.0).unwrap();
        let bundle = build_bundle(&sys, 1.0).unwrap();
        let u = nominal_control(&sys, &task, &bundle).unwrap();
        let tr = simulate_closed_loop(&sys, &task, &u, &DisturbanceSignal::zero(1), 200).unwrap();
        for (t, x) in tr.times.iter().zip(&tr.states) {
            assert!((x[0] - (1.0 - t)).abs() < 1e-13);
        }
        assert!(tr.terminal_state()[0].abs() < 1e-13);
        assert!((tr.energy() - 1.0).abs() < 1e-12);
        assert_eq!(*tr.times.last().unwrap(), 1.0);
    }

    #[test]
    fn too_few_steps_is_rejected() {
        let sys = integrator(1);
        let task = StabilizationTask::new(Vector::new(vec![1.0]).unwrap(), 1.0, 0.0).unwrap();
        let u = ControlSignal::zero(&sys, 1.0);
        assert!(simulate_closed_loop(&sys, &task, &u, &DisturbanceSignal::zero(1), 99).is_err());
    }

    #[test]
    fn horizon_mismatch_is_rejected() {
        let sys = integrator(1);
        let task = StabilizationTask::new(Vector::new(vec![1.0]).unwrap(), 1.0, 0.0).unwrap();
        let u = ControlSignal::zero(&sys, 2.0);
        assert!(matches!(
            simulate_closed_loop(&sys, &task, &u, &DisturbanceSignal::zero(1), 100),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn csv_header_and_row_count() {
        let sys = integrator(1);
        let task = StabilizationTask::new(Vector::new(vec![1.0]).unwrap(), 1.0, 0.0).unwrap();
        let u = ControlSignal::zero(&sys, 1.0);
        let tr = simulate_closed_loop(&sys, &task, &u, &DisturbanceSignal::zero(1), 100).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,x1,u1,xnorm,energy");
        assert_eq!(lines.count(), 101);
    }

    #[test]
    fn number_format_round_trips() {
        for v in [0.1, 1.0 / 3.0, 1e-20, -5.0e17, 0.0] {
            assert_eq!(fmt_num(v).parse::<f64>().unwrap(), v);
        }
    }
}
