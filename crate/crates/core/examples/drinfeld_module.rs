//! The Drinfeld module `φ_T = T + g_1 τ + ... + g_r τ^r` of a lattice, with the
//! exponential coefficients computed by the product and Eisenstein routes.
//!
//! ```bash
//! cargo run --example drinfeld_module
//! ```

use drinfeld_eis::config::RunConfig;
use drinfeld_eis::drinfeld::{drinfeld_coeffs, exp_coeffs, ExpMethod};
use drinfeld_eis::lattice::Builtin;
use drinfeld_eis::verify::agreement;

fn main() -> drinfeld_eis::error::Result<()> {
    let cfg = RunConfig::new(2, 1, 1, 32, 3, 1)?;
    for b in [Builtin::Carlitz, Builtin::Rank2Sqrt, Builtin::Rank3Cbrt] {
        let tower = cfg.tower(b.min_e())?;
        let frame = b.frame(&tower)?;
        let phi = drinfeld_coeffs(&frame, cfg.precision)?;
        println!("{} (rank {}):", b.name(), phi.rank());
        for (i, g) in phi.phi_t.coeffs.iter().enumerate().skip(1) {
            println!("  g_{i} = {}", g.truncate(g.lead() + 6));
        }

        let n = b.rank().max(2);
        let prod = exp_coeffs(&frame, n, ExpMethod::Product, cfg.precision)?;
        let eis = exp_coeffs(&frame, n, ExpMethod::Eisenstein, 1)?;
        for (i, (x, y)) in prod.alphas.iter().zip(&eis.alphas).enumerate().skip(1) {
            let a = agreement(x, y);
            println!("  α_{i}: product and Eisenstein routes agree to {} digits", a.value);
        }
    }
    Ok(())
}
