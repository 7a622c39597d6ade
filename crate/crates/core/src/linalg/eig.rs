use serde::Serialize;

use super::{Matrix, NormKind, Vector};
use crate::error::{Error, Result};
use crate::settings::NumericSettings;

/// `M = U·diag(λ)·Uᵀ` with orthogonal `U` and eigenvalues in descending order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralDecomposition {
    /// Eigenvectors as columns.
    pub u: Matrix,
    pub lambdas: Vector,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.lambdas.dim()
    }

    pub fn reconstruct(&self) -> Matrix {
        let n = self.dim();
        let mut ul = self.u.clone();
        for i in 0..n {
            for j in 0..n {
                ul[(i, j)] *= self.lambdas[j];
            }
        }
        &ul * &self.u.transpose()
    }

    /// `‖UᵀU − I‖∞`
    pub fn orthogonality_residual(&self) -> f64 {
        (&self.u.transpose() * &self.u)
            .sub(&Matrix::identity(self.dim()))
            .norm(NormKind::Inf)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.lambdas.last().copied().unwrap_or(f64::NAN)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.lambdas.first().copied().unwrap_or(f64::NAN)
    }
}

/// Symmetric eigendecomposition with default tolerances.
pub fn sym_eig(m: &Matrix) -> Result<SpectralDecomposition> {
    sym_eig_with(m, &NumericSettings::default())
}

/// Cyclic Jacobi eigensolver for symmetric matrices.
///
/// Sweeps over all off-diagonal pairs until the off-diagonal Frobenius mass is
/// at most `jacobi_tol·‖M‖_F`. Eigenvalues come back sorted descending; equal
/// eigenvalues keep the order in which the sweeps left them.
pub fn sym_eig_with(m: &Matrix, settings: &NumericSettings) -> Result<SpectralDecomposition> {
    if !m.is_square() {
        return Err(Error::dim(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::domain("eigendecomposition of a non-finite matrix"));
    }
    let n = m.rows();
    let scale = m.norm(NormKind::Inf);
    let asym = m.sub(&m.transpose()).norm(NormKind::Inf);
    if asym > settings.symmetry_tol * scale {
        return Err(Error::domain(format!(
            "matrix is not symmetric: ‖M − Mᵀ‖∞ = {asym:e} exceeds {:e}",
            settings.symmetry_tol * scale
        )));
    }

    let mut a = m.symmetrized();
    let mut v = Matrix::identity(n);
    let target = settings.jacobi_tol * m.norm_fro();

    let off = |a: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)] * a[(i, j)];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off(&a) > target {
        if sweeps == settings.jacobi_max_sweeps {
            return Err(Error::NoConvergence {
                what: "Jacobi eigensolver",
                iterations: sweeps,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                rotate_columns(&mut a, p, q, c, s);
                rotate_rows(&mut a, p, q, c, s);
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                rotate_columns(&mut v, p, q, c, s);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let lambdas = Vector::from_vec_unchecked(order.iter().map(|&i| a[(i, i)]).collect());
    let mut u = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            u[(i, dst)] = v[(i, src)];
        }
    }
    Ok(SpectralDecomposition { u, lambdas })
}

fn rotate_columns(a: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..a.rows() {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
}

fn rotate_rows(a: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..a.cols() {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
}

/// Singular values in descending order, by one-sided (Hestenes) Jacobi.
///
/// Works on the columns directly instead of on `MᵀM`, so small singular
/// values keep their relative accuracy.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    // orthogonalise the columns of the taller orientation
    let g = if m.rows() >= m.cols() { m.clone() } else { m.transpose() };
    let cols = g.cols();
    let mut colv: Vec<Vec<f64>> = (0..cols).map(|j| g.column(j).into_vec()).collect();
    let dot = |x: &[f64], y: &[f64]| -> f64 { x.iter().zip(y).map(|(a, b)| a * b).sum() };

    for _ in 0..100 {
        let mut rotated = false;
        for i in 0..cols {
            for j in (i + 1)..cols {
                let alpha = dot(&colv[i], &colv[i]);
                let beta = dot(&colv[j], &colv[j]);
                let gamma = dot(&colv[i], &colv[j]);
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (head, tail) = colv.split_at_mut(j);
                for (xi, xj) in head[i].iter_mut().zip(tail[0].iter_mut()) {
                    (*xi, *xj) = (c * *xi - s * *xj, s * *xi + c * *xj);
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<f64> = colv.iter().map(|c| dot(c, c).sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}
