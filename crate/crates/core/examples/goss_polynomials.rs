//! Goss polynomials express every partial Eisenstein series through weight one:
//! `E_{k,u} = G_k(E_{1,u})`.
//!
//! ```bash
//! cargo run --example goss_polynomials
//! ```

use drinfeld_eis::arithmetic::{nonzero_classes, APoly};
use drinfeld_eis::config::RunConfig;
use drinfeld_eis::drinfeld::goss_poly;
use drinfeld_eis::eisenstein::Prepared;
use drinfeld_eis::lattice::Builtin;
use drinfeld_eis::verify::agreement;

fn main() -> drinfeld_eis::error::Result<()> {
    let cfg = RunConfig::new(3, 1, 1, 32, 3, 1)?;
    let tower = cfg.tower(2)?;
    let fq = tower.fq();
    let frame = Builtin::Rank2Sqrt.frame(&tower)?;
    let kmax = 7u32;

    let prep = Prepared::new(&frame)?;
    let us = nonzero_classes(&APoly::t(), 2, fq)?;
    let vals = prep.partial_values(kmax, &us)?;
    for k in 1..=kmax as usize {
        let g = goss_poly(&frame, k, cfg.precision)?;
        let nonzero: Vec<usize> = (0..g.coeffs.len()).filter(|&j| !g.coeffs[j].is_zero()).collect();
        let worst = vals
            .iter()
            .map(|row| agreement(&g.eval(&row[0].value), &row[k - 1].value).value)
            .min()
            .unwrap();
        println!("G_{k}: monomials X^{nonzero:?}, matches E_{{{k},u}} to {worst} digits over all u");
    }
    Ok(())
}
