//! Additive and multiplicative cost metrics against task hardness R/t_f.

use disturbance_cost::metrics::{hardness, MetricConstants};
use disturbance_cost::{build_bundle, models};

fn main() -> disturbance_cost::Result<()> {
    let sys = models::admire();
    println!("{:>8} {:>5} {:>10} {:>12} {:>8}", "R", "t_f", "H", "r_A", "r_M");
    for t_f in [0.5, 2.0] {
        let k = MetricConstants::new(&sys, &build_bundle(&sys, t_f)?, 1.0)?;
        for r in [0.1, 1.0, 10.0, 100.0, 1000.0] {
            println!(
                "{r:>8} {t_f:>5} {:>10.3} {:>12.4e} {:>8.5}",
                hardness(r, t_f)?,
                k.additive_bound(r)?,
                k.multiplicative_bound(r)?
            );
        }
    }
    Ok(())
}
