//! `T`-division points `e(uω)` of a rank-two lattice are the roots of `φ_T`,
//! and `E_{1,u}` is the reciprocal of the division value.
//!
//! ```bash
//! cargo run --example division_points
//! ```

use drinfeld_eis::arithmetic::{nonzero_classes, APoly};
use drinfeld_eis::config::RunConfig;
use drinfeld_eis::drinfeld::{division_points, division_poly, drinfeld_coeffs};
use drinfeld_eis::eisenstein::eisenstein_partial;
use drinfeld_eis::lattice::Builtin;
use drinfeld_eis::verify::{agreement, cancellation};

fn main() -> drinfeld_eis::error::Result<()> {
    let cfg = RunConfig::new(2, 1, 1, 32, 3, 1)?;
    let tower = cfg.tower(2)?;
    let fq = tower.fq();
    let frame = Builtin::Rank2Sqrt.frame(&tower)?;
    let t = APoly::t();

    let phi = drinfeld_coeffs(&frame, cfg.precision)?;
    let phi_n = division_poly(&phi.phi_t, &t)?;
    let us = nonzero_classes(&t, 2, fq)?;
    for d in division_points(&frame, &us, cfg.precision)? {
        let nums: Vec<Vec<u32>> = d.class.numerators.iter().map(|a| a.to_ints(fq)).collect();
        let root = cancellation(&phi_n.terms(&d.value)?);
        let e1 = eisenstein_partial(&frame, 1, &d.class, cfg.precision)?;
        let recip = agreement(&e1.value, &d.value.inv()?);
        println!(
            "u = {nums:?}: e(uω) = {}  φ_T root to {} digits, 1/E_1 agrees to {} digits ({} terms)",
            d.value.truncate(d.value.lead() + 4),
            root.value,
            recip.value,
            d.terms
        );
    }
    Ok(())
}
