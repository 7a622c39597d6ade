//! Controllability Gramian, its inverse spectrum and the disturbance norm integral.

use disturbance_cost::{build_bundle, models};

fn main() -> disturbance_cost::Result<()> {
    let sys = models::admire();
    for t_f in [0.1, 0.5, 1.0, 5.0] {
        let b = build_bundle(&sys, t_f)?;
        println!(
            "t_f {t_f:>4}: eig(W⁻¹) = {:?}, v̄ = {:.5}, inverse residual {:.1e}",
            b.spec.lambdas.iter().map(|l| format!("{l:.4e}")).collect::<Vec<_>>(),
            b.v_bar_unit,
            b.inverse_residual()
        );
    }
    Ok(())
}
