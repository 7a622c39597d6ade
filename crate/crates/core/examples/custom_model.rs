//! Load a model from JSON and compare a constant disturbance against the bound.

use disturbance_cost::models::parse_model;
use disturbance_cost::{
    build_bundle, disturbed_energy_bound, disturbed_signal_energy, make_disturbance, DisturbanceSpec,
    StabilizationTask, Vector,
};

const MODEL: &str = r#"{
  "name": "double_integrator",
  "n": 2,
  "p": 1,
  "A": [[0, 1], [0, 0]],
  "B": [[0], [1]]
}"#;

fn main() -> disturbance_cost::Result<()> {
    let sys = parse_model(MODEL, "inline")?;
    let task = StabilizationTask::new(Vector::new(vec![1.0, 0.0])?, 2.0, 0.2)?;
    let bundle = build_bundle(&sys, task.t_f())?;
    let rep = disturbed_energy_bound(&sys, &task, &bundle)?;
    for signs in [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]] {
        let w = make_disturbance(
            &DisturbanceSpec::ConstantSign { signs: signs.to_vec() },
            task.w_bar(),
            2,
            0,
        )?;
        let e = disturbed_signal_energy(&sys, &task, &bundle, &w)?;
        println!(
            "w = {signs:?}·w̄: energy {e:.6} ({:.1}% of bound)",
            100.0 * e / rep.e_d_bound
        );
    }
    println!("E_N {:.6}, bound {:.6}", rep.e_n, rep.e_d_bound);
    Ok(())
}
