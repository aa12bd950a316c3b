//! Eisenstein series restricted to primitive vectors, by Möbius inversion
//! over `(A/N)^*` and by direct enumeration.
//!
//! ```bash
//! cargo run --example restricted_moebius
//! ```

use drinfeld_eis::arithmetic::{nonzero_classes, APoly};
use drinfeld_eis::config::RunConfig;
use drinfeld_eis::eisenstein::{moebius_table, restricted_direct, restricted_moebius, Prepared};
use drinfeld_eis::lattice::Builtin;
use drinfeld_eis::verify::agreement;

fn main() -> drinfeld_eis::error::Result<()> {
    let cfg = RunConfig::new(2, 1, 1, 24, 3, 1)?;
    let tower = cfg.tower(2)?;
    let fq = tower.fq();
    let n = APoly::t().pow(2, fq);
    let k = 3;

    let table = moebius_table(&tower, &n, k)?;
    println!("weights for N = T^2, k = {k} (exact through degree {}):", table.j_max);
    for (t, w) in table.units.iter().zip(&table.weights) {
        println!("  t = {:?}: {}", t.to_ints(fq), w.truncate(8));
    }

    let frame = Builtin::Rank2Sqrt.frame(&tower)?;
    let prep = Prepared::new(&frame)?;
    let us: Vec<_> = nonzero_classes(&n, 2, fq)?.into_iter().filter(|u| u.is_primitive(fq)).take(4).collect();
    let via_table = restricted_moebius(&prep, &table, &us)?;
    for (u, m) in us.iter().zip(&via_table) {
        let d = restricted_direct(&prep, k, u, cfg.precision)?;
        let agree = agreement(&d.value, &m.value);
        let nums: Vec<Vec<u32>> = u.numerators.iter().map(|a| a.to_ints(fq)).collect();
        let kind = if agree.bound { "at least" } else { "exactly" };
        println!("  u = {nums:?}: routes agree to {kind} {} digits, direct sum up to degree {}", agree.value, d.d_used);
    }
    Ok(())
}
