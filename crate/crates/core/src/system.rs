//! Plant and task descriptions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{singular_values, Matrix, Vector};
use crate::settings::NumericSettings;

/// A controllable continuous-time LTI plant `ẋ = Ax + Bu`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LtiSystem {
    name: String,
    a: Matrix,
    b: Matrix,
}

impl LtiSystem {
    /// Validates dimensions and controllability with the default rank tolerance.
    pub fn new(name: impl Into<String>, a: Matrix, b: Matrix) -> Result<Self> {
        Self::new_with(name, a, b, &NumericSettings::default())
    }

    pub fn new_with(name: impl Into<String>, a: Matrix, b: Matrix, settings: &NumericSettings) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::dim(format!("A must be square, got {}x{}", a.rows(), a.cols())));
        }
        if a.rows() == 0 {
            return Err(Error::dim("state dimension must be positive"));
        }
        if b.rows() != a.rows() {
            return Err(Error::dim(format!(
                "B has {} rows but A is {}x{}",
                b.rows(),
                a.rows(),
                a.cols()
            )));
        }
        if b.cols() == 0 {
            return Err(Error::dim("B must have at least one input column"));
        }
        let n = a.rows();
        let rank = controllability_rank(&a, &b, settings.rank_tol);
        if rank < n {
            return Err(Error::Uncontrollable { rank, n });
        }
        Ok(Self {
            name: name.into(),
            a,
            b,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    /// State dimension `n`.
    pub fn state_dim(&self) -> usize {
        self.a.rows()
    }

    /// Input dimension `p`.
    pub fn input_dim(&self) -> usize {
        self.b.cols()
    }
}

/// `[B, AB, …, A^{n−1}B]`
pub fn controllability_matrix(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.rows();
    let p = b.cols();
    let mut c = Matrix::zeros(n, n * p);
    let mut blk = b.clone();
    for k in 0..n {
        c.set_block(0, k * p, &blk);
        if k + 1 < n {
            blk = a * &blk;
        }
    }
    c
}

/// Numerical rank of the controllability matrix: singular values above
/// `rel_tol·σ_max` are counted.
pub fn controllability_rank(a: &Matrix, b: &Matrix, rel_tol: f64) -> usize {
    let sv = singular_values(&controllability_matrix(a, b));
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// Initial state, horizon and disturbance amplitude bound for one stabilization problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilizationTask {
    x0: Vector,
    t_f: f64,
    w_bar: f64,
}

impl StabilizationTask {
    pub fn new(x0: Vector, t_f: f64, w_bar: f64) -> Result<Self> {
        if x0.dim() == 0 || x0.iter().all(|&v| v == 0.0) {
            return Err(Error::domain("initial state must be nonzero"));
        }
        if !(t_f > 0.0 && t_f.is_finite()) {
            return Err(Error::domain(format!("horizon t_f must be positive, got {t_f}")));
        }
        if !(w_bar >= 0.0 && w_bar.is_finite()) {
            return Err(Error::domain(format!(
                "disturbance bound must be nonnegative, got {w_bar}"
            )));
        }
        Ok(Self { x0, t_f, w_bar })
    }

    pub fn x0(&self) -> &Vector {
        &self.x0
    }

    pub fn t_f(&self) -> f64 {
        self.t_f
    }

    pub fn w_bar(&self) -> f64 {
        self.w_bar
    }

    /// Same task with a different initial state.
    pub fn with_x0(&self, x0: Vector) -> Result<Self> {
        Self::new(x0, self.t_f, self.w_bar)
    }

    pub(crate) fn check_system(&self, sys: &LtiSystem) -> Result<()> {
        if self.x0.dim() != sys.state_dim() {
            return Err(Error::dim(format!(
                "x0 has dimension {} but the system has {} states",
                self.x0.dim(),
                sys.state_dim()
            )));
        }
        Ok(())
    }
}
