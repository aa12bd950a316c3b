//! Full and partial Eisenstein series of a rank-two lattice.
//!
//! ```bash
//! cargo run --example eisenstein_values
//! ```

use drinfeld_eis::arithmetic::{nonzero_classes, APoly};
use drinfeld_eis::config::RunConfig;
use drinfeld_eis::eisenstein::Prepared;
use drinfeld_eis::lattice::Builtin;
use drinfeld_eis::series::Series;

fn head(x: &Series) -> String {
    if x.is_zero() {
        return x.to_string();
    }
    x.truncate(x.lead() + 6).to_string()
}

fn main() -> drinfeld_eis::error::Result<()> {
    let cfg = RunConfig::new(3, 1, 1, 32, 3, 1)?;
    let tower = cfg.tower(2)?;
    let fq = tower.fq();
    let frame = Builtin::Rank2Sqrt.frame(&tower)?;
    let prep = Prepared::new(&frame)?;

    println!("E_k on (T^(1/2), 1) over F_3");
    for v in prep.full_values(8)? {
        let v = v.certify(cfg.precision)?;
        println!("  k = {}: {}", v.k, head(&v.value));
    }

    let t = APoly::t();
    let us = nonzero_classes(&t, 2, fq)?;
    let vals = prep.partial_values(2, &us)?;
    println!("E_{{k,u}} for u in (T^-1 A / A)^2, k = 1, 2");
    for (u, row) in us.iter().zip(&vals) {
        let nums: Vec<Vec<u32>> = u.numerators.iter().map(|a| a.to_ints(fq)).collect();
        println!("  u = {nums:?}: {} | {}", head(&row[0].value), head(&row[1].value));
    }
    Ok(())
}
