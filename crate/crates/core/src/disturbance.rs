//! Bounded disturbance signals `w(t)` with `‖w(t)‖∞ ≤ w̄`.
//!
//! Three families are provided besides the zero signal: constant sign
//! patterns, per-channel sinusoids, and piecewise-constant uniform noise on a
//! uniform grid of cells.
//!
//! # Random stream
//!
//! Piecewise-uniform values and every sampled quantity elsewhere in the crate
//! come from a SplitMix64 generator whose state is initialised to the seed
//! itself. Each 64-bit output `z` is turned into `u = (z >> 11)·2⁻⁵³ ∈ [0, 1)`
//! and a bounded draw is `w̄·(2u − 1)`. Cell values are drawn cell by cell,
//! channel by channel. Standard normals use one Box–Muller cosine branch per
//! pair of uniforms, `√(−2 ln(1 − u₁))·cos(2πu₂)`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Vector;

/// Per-channel frequencies (rad/s) used when a sinusoid spec leaves them out.
pub const DEFAULT_SINUSOID_FREQUENCIES: [f64; 3] = [20.0, 27.0, 35.0];

/// Deterministic SplitMix64 stream with the conversions described in the module docs.
#[derive(Debug, Clone)]
pub struct SeededStream(SplitMix64);

impl SeededStream {
    pub fn new(seed: u64) -> Self {
        Self(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[−bound, bound)`.
    pub fn symmetric(&mut self, bound: f64) -> f64 {
        bound * (2.0 * self.uniform() - 1.0)
    }

    pub fn standard_normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Uniform direction on the unit sphere in `dim` dimensions.
    pub fn unit_direction(&mut self, dim: usize) -> Vector {
        loop {
            let v: Vec<f64> = (0..dim).map(|_| self.standard_normal()).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-300 {
                return Vector::from_vec_unchecked(v.into_iter().map(|x| x / norm).collect());
            }
        }
    }

    /// Uniform point on the sphere of radius `r`.
    pub fn on_sphere(&mut self, dim: usize, r: f64) -> Vector {
        self.unit_direction(dim).scale(r)
    }

    /// Uniform point in the closed ball of radius `r`.
    pub fn in_ball(&mut self, dim: usize, r: f64) -> Vector {
        let d = self.unit_direction(dim);
        let rho = r * self.uniform().powf(1.0 / dim as f64);
        d.scale(rho)
    }
}

/// Which side of a discontinuity to evaluate at. Only piecewise-constant
/// signals distinguish the two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Limit from above, `w(t⁺)`.
    Right,
    /// Limit from below, `w(t⁻)`.
    Left,
}

/// Declarative description of a disturbance, as found in configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DisturbanceSpec {
    Zero,
    /// `w(t) ≡ w̄·s` with `s ∈ {−1, 0, 1}ⁿ`.
    ConstantSign {
        signs: Vec<f64>,
    },
    /// `wᵢ(t) = aᵢ sin(ωᵢ t + φᵢ)`. Missing amplitudes default to `w̄`, missing
    /// frequencies cycle through [`DEFAULT_SINUSOID_FREQUENCIES`], missing phases are zero.
    Sinusoid {
        #[serde(default)]
        amplitudes: Option<Vec<f64>>,
        #[serde(default)]
        frequencies: Option<Vec<f64>>,
        #[serde(default)]
        phases: Option<Vec<f64>>,
    },
    /// I.i.d. uniform values in `[−w̄, w̄]ⁿ`, constant on each of `cells`
    /// equal cells covering `[0, horizon]`.
    PiecewiseUniform {
        cells: usize,
        horizon: f64,
    },
}

impl DisturbanceSpec {
    /// Short label used in file names and CSV columns.
    pub fn label(&self) -> &'static str {
        match self {
            DisturbanceSpec::Zero => "zero",
            DisturbanceSpec::ConstantSign { .. } => "constant",
            DisturbanceSpec::Sinusoid { .. } => "sinusoid",
            DisturbanceSpec::PiecewiseUniform { .. } => "random",
        }
    }

    /// Default sinusoid: amplitude `w̄`, default frequencies, zero phase.
    pub fn default_sinusoid() -> Self {
        DisturbanceSpec::Sinusoid {
            amplitudes: None,
            frequencies: None,
            phases: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Zero,
    Constant(Vector),
    Sinusoid {
        amplitudes: Vec<f64>,
        frequencies: Vec<f64>,
        phases: Vec<f64>,
    },
    Piecewise {
        cell_width: f64,
        horizon: f64,
        values: Vec<Vector>,
    },
}

/// A concrete disturbance signal.
#[derive(Debug, Clone, PartialEq)]
pub struct DisturbanceSignal {
    kind: Kind,
    w_bar: f64,
    dim: usize,
    label: &'static str,
}

/// Builds a signal from a spec; `seed` only matters for the random family.
pub fn make_disturbance(spec: &DisturbanceSpec, w_bar: f64, dim: usize, seed: u64) -> Result<DisturbanceSignal> {
    if !(w_bar >= 0.0 && w_bar.is_finite()) {
        return Err(Error::domain(format!(
            "disturbance bound must be nonnegative, got {w_bar}"
        )));
    }
    if dim == 0 {
        return Err(Error::dim("disturbance dimension must be positive"));
    }
    let check_len = |name: &str, len: usize| -> Result<()> {
        if len == dim {
            Ok(())
        } else {
            Err(Error::dim(format!("{name} has {len} entries, expected {dim}")))
        }
    };
    let kind = match spec {
        DisturbanceSpec::Zero => Kind::Zero,
        DisturbanceSpec::ConstantSign { signs } => {
            check_len("signs", signs.len())?;
            if let Some(s) = signs.iter().find(|s| ![-1.0, 0.0, 1.0].contains(*s)) {
                return Err(Error::domain(format!("sign entries must be -1, 0 or 1, got {s}")));
            }
            Kind::Constant(Vector::from_vec_unchecked(signs.iter().map(|s| s * w_bar).collect()))
        }
        DisturbanceSpec::Sinusoid {
            amplitudes,
            frequencies,
            phases,
        } => {
            let amplitudes = amplitudes.clone().unwrap_or_else(|| vec![w_bar; dim]);
            let frequencies = frequencies.clone().unwrap_or_else(|| {
                (0..dim)
                    .map(|i| DEFAULT_SINUSOID_FREQUENCIES[i % DEFAULT_SINUSOID_FREQUENCIES.len()])
                    .collect()
            });
            let phases = phases.clone().unwrap_or_else(|| vec![0.0; dim]);
            check_len("amplitudes", amplitudes.len())?;
            check_len("frequencies", frequencies.len())?;
            check_len("phases", phases.len())?;
            for &a in &amplitudes {
                if !a.is_finite() || a.abs() > w_bar {
                    return Err(Error::domain(format!(
                        "sinusoid amplitude {a} exceeds the disturbance bound {w_bar}"
                    )));
                }
            }
            if frequencies.iter().chain(&phases).any(|v| !v.is_finite()) {
                return Err(Error::domain("sinusoid frequencies and phases must be finite"));
            }
            Kind::Sinusoid {
                amplitudes,
                frequencies,
                phases,
            }
        }
        DisturbanceSpec::PiecewiseUniform { cells, horizon } => {
            if *cells == 0 {
                return Err(Error::domain("piecewise-uniform disturbance needs at least one cell"));
            }
            if !(*horizon > 0.0 && horizon.is_finite()) {
                return Err(Error::domain(format!(
                    "piecewise-uniform horizon must be positive, got {horizon}"
                )));
            }
            let mut rng = SeededStream::new(seed);
            let values = (0..*cells)
                .map(|_| Vector::from_vec_unchecked((0..dim).map(|_| rng.symmetric(w_bar)).collect()))
                .collect();
            Kind::Piecewise {
                cell_width: horizon / *cells as f64,
                horizon: *horizon,
                values,
            }
        }
    };
    Ok(DisturbanceSignal {
        kind,
        w_bar,
        dim,
        label: spec.label(),
    })
}

impl DisturbanceSignal {
    pub fn zero(dim: usize) -> Self {
        Self {
            kind: Kind::Zero,
            w_bar: 0.0,
            dim,
            label: "zero",
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn w_bar(&self) -> f64 {
        self.w_bar
    }

    pub fn label(&self) -> &'static str {
        self.label
    }

    pub fn is_zero(&self) -> bool {
        match &self.kind {
            Kind::Zero => true,
            Kind::Constant(v) => v.iter().all(|&x| x == 0.0),
            Kind::Sinusoid { amplitudes, .. } => amplitudes.iter().all(|&a| a == 0.0),
            Kind::Piecewise { values, .. } => values.iter().all(|v| v.iter().all(|&x| x == 0.0)),
        }
    }

    /// Largest `‖w(t)‖∞` the construction allows; never exceeds `w̄`.
    pub fn amplitude_bound(&self) -> f64 {
        match &self.kind {
            Kind::Zero => 0.0,
            Kind::Constant(v) => v.norm(crate::linalg::NormKind::Inf),
            Kind::Sinusoid { amplitudes, .. } => amplitudes.iter().fold(0.0, |m, a| m.max(a.abs())),
            Kind::Piecewise { values, .. } => values
                .iter()
                .fold(0.0, |m, v| m.max(v.norm(crate::linalg::NormKind::Inf))),
        }
    }

    /// Number of equal cells for piecewise-constant signals, `None` for smooth ones.
    pub fn cells(&self) -> Option<usize> {
        match &self.kind {
            Kind::Piecewise { values, .. } => Some(values.len()),
            _ => None,
        }
    }

    /// Fastest angular frequency present (zero for non-oscillating signals).
    pub fn max_frequency(&self) -> f64 {
        match &self.kind {
            Kind::Sinusoid { frequencies, .. } => frequencies.iter().fold(0.0, |m, f| m.max(f.abs())),
            _ => 0.0,
        }
    }

    /// Fails unless the signal is defined on all of `[0, t_f]`.
    pub fn check_defined_on(&self, t_f: f64) -> Result<()> {
        if let Kind::Piecewise { horizon, .. } = &self.kind {
            if t_f > *horizon * (1.0 + 1e-12) {
                return Err(Error::domain(format!(
                    "disturbance is defined on [0, {horizon}] but [0, {t_f}] was requested"
                )));
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> Result<Vector> {
        self.eval_side(t, Side::Right)
    }

    pub fn eval_side(&self, t: f64, side: Side) -> Result<Vector> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(t, side, &mut out)?;
        Ok(Vector::from_vec_unchecked(out))
    }

    /// Writes `w(t)` (one-sided at cell boundaries) into `out`.
    pub fn eval_into(&self, t: f64, side: Side, out: &mut [f64]) -> Result<()> {
        debug_assert_eq!(out.len(), self.dim);
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::domain(format!("disturbance evaluated at t = {t}")));
        }
        match &self.kind {
            Kind::Zero => out.fill(0.0),
            Kind::Constant(v) => out.copy_from_slice(v),
            Kind::Sinusoid {
                amplitudes,
                frequencies,
                phases,
            } => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = amplitudes[i] * (frequencies[i] * t + phases[i]).sin();
                }
            }
            Kind::Piecewise {
                cell_width,
                horizon,
                values,
            } => {
                if t > horizon * (1.0 + 1e-12) {
                    return Err(Error::domain(format!(
                        "disturbance evaluated at t = {t} outside [0, {horizon}]"
                    )));
                }
                let idx = cell_index(t / cell_width, side, values.len());
                out.copy_from_slice(&values[idx]);
            }
        }
        Ok(())
    }
}

fn cell_index(x: f64, side: Side, cells: usize) -> usize {
    let k = x.round();
    let idx = if (x - k).abs() <= 1e-9 * k.max(1.0) {
        // on a cell boundary
        match side {
            Side::Right => k as i64,
            Side::Left => k as i64 - 1,
        }
    } else {
        x.floor() as i64
    };
    idx.clamp(0, cells as i64 - 1) as usize
}
