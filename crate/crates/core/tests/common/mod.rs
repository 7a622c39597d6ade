//! Reference implementations that share no code path with the library
//! routines they check.

#![allow(dead_code)]

use disturbance_cost::{ControlSignal, DisturbanceSignal, Matrix, NormKind, Vector};

pub const ADMIRE_X0: [f64; 3] = [5.0, -1.0, 3.0];

pub fn x0() -> Vector {
    Vector::new(ADMIRE_X0.to_vec()).unwrap()
}

/// `Σ_{k<terms} M^k / k!`
pub fn taylor_expm(m: &Matrix, terms: usize) -> Matrix {
    let n = m.rows();
    let mut sum = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    for k in 1..terms {
        term = (&term * m).scale(1.0 / k as f64);
        sum = sum.add(&term);
    }
    sum
}

/// Taylor exponential with enough squarings to keep the series short-range.
pub fn taylor_expm_scaled(m: &Matrix) -> Matrix {
    let s = m.norm(NormKind::Inf).log2().ceil().max(0.0) as i32;
    let mut e = taylor_expm(&m.scale(0.5f64.powi(s)), 50);
    for _ in 0..s {
        e = &e * &e;
    }
    e
}

fn simpson_weights(panels: usize) -> impl Iterator<Item = (usize, f64)> {
    assert!(panels.is_multiple_of(2));
    (0..=panels).map(move |k| {
        let w = if k == 0 || k == panels {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        (k, w)
    })
}

/// `∫₀^{t_f} e^{At}BBᵀe^{Aᵀt}dt` by composite Simpson, exponentials from the Taylor oracle.
pub fn simpson_gramian(a: &Matrix, b: &Matrix, t_f: f64, panels: usize) -> Matrix {
    let h = t_f / panels as f64;
    let step = taylor_expm_scaled(&a.scale(h));
    let bbt = b * &b.transpose();
    let n = a.rows();
    let mut acc = Matrix::zeros(n, n);
    let mut e = Matrix::identity(n);
    for (k, w) in simpson_weights(panels) {
        if k > 0 {
            e = &e * &step;
        }
        acc = acc.add(&(&(&e * &bbt) * &e.transpose()).scale(w));
    }
    acc.scale(h / 3.0)
}

/// `∫₀^{t_f} ‖e^{As}‖∞ ds` on a fixed Simpson grid.
pub fn simpson_norm_integral(a: &Matrix, t_f: f64, panels: usize) -> f64 {
    let h = t_f / panels as f64;
    let step = taylor_expm_scaled(&a.scale(h));
    let mut e = Matrix::identity(a.rows());
    let mut acc = 0.0;
    for (k, w) in simpson_weights(panels) {
        if k > 0 {
            e = &e * &step;
        }
        acc += w * e.norm(NormKind::Inf);
    }
    acc * h / 3.0
}

/// `∫₀^{t_f} e^{A(t_f−τ)}w(τ)dτ` by the composite trapezoid rule.
pub fn trapezoid_response(a: &Matrix, w: &DisturbanceSignal, t_f: f64, panels: usize) -> Vector {
    let h = t_f / panels as f64;
    let n = a.rows();
    let mut acc = vec![0.0; n];
    for k in 0..=panels {
        let tau = k as f64 * h;
        let e = taylor_expm_scaled(&a.scale(t_f - tau));
        let v = e.mul_vec(&w.eval(tau).unwrap());
        let wt = if k == 0 || k == panels { 0.5 } else { 1.0 };
        for i in 0..n {
            acc[i] += wt * h * v[i];
        }
    }
    Vector::new(acc).unwrap()
}

/// `∫₀^{t_f} ‖u(t)‖₂² dt` by composite Simpson on point evaluations of the signal.
pub fn signal_energy(u: &ControlSignal, panels: usize) -> f64 {
    let t_f = u.t_f();
    let h = t_f / panels as f64;
    let mut acc = 0.0;
    for (k, w) in simpson_weights(panels) {
        let t = if k == panels { t_f } else { k as f64 * h };
        acc += w * u.eval(t).unwrap().norm_squared();
    }
    acc * h / 3.0
}

pub fn rel_inf(a: &Matrix, b: &Matrix) -> f64 {
    a.sub(b).norm(NormKind::Inf) / b.norm(NormKind::Inf)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
