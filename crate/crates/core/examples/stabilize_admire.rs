//! Steer the ADMIRE aircraft model to the origin under each default disturbance class.

use disturbance_cost::experiments::stabilize;
use disturbance_cost::{models, RunConfig};

fn main() -> disturbance_cost::Result<()> {
    let cfg = RunConfig::default();
    let out = stabilize(&models::admire(), &cfg)?;
    println!(
        "E_N = {:.6}, worst-case bound = {:.6}",
        out.bound.e_n, out.bound.e_d_bound
    );
    for run in &out.runs {
        println!(
            "{:<9} |x(t_f)| = {:.2e}  energy {:.6} (closed form {:.6})",
            run.label, run.terminal_residual, run.simulated_energy, run.closed_form_energy
        );
    }
    Ok(())
}
