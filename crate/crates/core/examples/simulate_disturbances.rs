//! Closed-loop RK4 simulation of the disturbance-aware control, written as CSV.

use disturbance_cost::{
    build_bundle, disturbed_control, make_disturbance, models, simulate_closed_loop, DisturbanceSpec,
    StabilizationTask, Vector,
};

fn main() -> disturbance_cost::Result<()> {
    let sys = models::admire();
    let task = StabilizationTask::new(Vector::new(vec![5.0, -1.0, 3.0])?, 2.0, 1.0)?;
    let bundle = build_bundle(&sys, task.t_f())?;
    let w = make_disturbance(&DisturbanceSpec::default_sinusoid(), task.w_bar(), 3, 0)?;
    let u = disturbed_control(&sys, &task, &bundle, &w)?;
    let tr = simulate_closed_loop(&sys, &task, &u, &w, 200)?;
    tr.write_csv(std::io::stdout().lock())?;
    eprintln!(
        "terminal residual {:.2e}, energy {:.6}",
        tr.terminal_residual(),
        tr.energy()
    );
    Ok(())
}
