//! How tight the worst-case bound is across horizons, per disturbance class.

use disturbance_cost::experiments::bound_accuracy;
use disturbance_cost::{models, RunConfig};

fn main() -> disturbance_cost::Result<()> {
    let rows = bound_accuracy(&models::admire(), &RunConfig::default())?;
    for row in rows {
        let ratios: Vec<String> = row.ratios.iter().map(|(l, r)| format!("{l} {r:.4}")).collect();
        println!("t_f {:>4}: {}", row.t_f, ratios.join(", "));
    }
    Ok(())
}
