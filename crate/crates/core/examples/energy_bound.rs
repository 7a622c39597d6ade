//! Worst-case disturbed energy and its decomposition for a single task.

use disturbance_cost::{build_bundle, disturbed_energy_bound, models, StabilizationTask, Vector};

fn main() -> disturbance_cost::Result<()> {
    let sys = models::admire();
    let task = StabilizationTask::new(Vector::new(vec![5.0, -1.0, 3.0])?, 1.0, 1.0)?;
    let bundle = build_bundle(&sys, task.t_f())?;
    let rep = disturbed_energy_bound(&sys, &task, &bundle)?;
    println!("E_N        {:.6}", rep.e_n);
    println!("cross term {:.6}", rep.cross_term);
    println!("c term     {:.6}", rep.c_term);
    println!("bound      {:.6}", rep.e_d_bound);
    println!("q̄ = {:.6}, witness q* = {:?}", rep.q_bar, rep.witness_q.to_vec());
    Ok(())
}
