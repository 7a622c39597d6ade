//! Energy cost of stabilising a linear system under bounded disturbances.
//!
//! For `ẋ = Ax + Bu + w` with `‖w(t)‖∞ ≤ w̄`, the crate computes the
//! minimum-energy open-loop controls that drive `x0` to the origin at `t_f`,
//! their energies, a closed-form worst-case bound on the disturbed energy,
//! and bounds on how much a disturbance can cost in additive and
//! multiplicative terms as the task gets harder.
//!
//! ```
//! use disturbance_cost::{models, build_bundle, disturbed_energy_bound, StabilizationTask, Vector};
//!
//! let sys = models::admire();
//! let task = StabilizationTask::new(Vector::new(vec![5.0, -1.0, 3.0])?, 1.0, 1.0)?;
//! let bundle = build_bundle(&sys, task.t_f())?;
//! let rep = disturbed_energy_bound(&sys, &task, &bundle)?;
//! assert!(rep.e_d_bound >= rep.e_n);
//! # Ok::<(), disturbance_cost::Error>(())
//! ```

pub mod config;
pub mod disturbance;
pub mod energy;
pub mod error;
pub mod experiments;
pub mod gramian;
pub mod linalg;
pub mod metrics;
pub mod models;
pub mod quadrature;
pub mod settings;
pub mod simulate;
pub mod synthesis;
pub mod system;

pub use config::{DisturbanceClass, RunConfig};
pub use disturbance::{make_disturbance, DisturbanceSignal, DisturbanceSpec, SeededStream, Side};
pub use energy::{
    disturbed_energy_bound, disturbed_signal_energy, nominal_energy, q_bar, weighted_energy, EnergyReport,
};
pub use error::{Error, Result};
pub use gramian::{build_bundle, build_bundle_with, controllability_gramian, norm_integral, GramianBundle};
pub use linalg::{expm, sym_eig, Matrix, NormKind, SpectralDecomposition, Vector};
pub use metrics::{additive_metric_bound, hardness, metric_report, multiplicative_metric_bound, MetricConstants};
pub use settings::NumericSettings;
pub use simulate::{simulate_closed_loop, Trajectory};
pub use synthesis::{disturbance_response, disturbed_control, nominal_control, ControlSignal, ResponseIntegrator};
pub use system::{LtiSystem, StabilizationTask};
