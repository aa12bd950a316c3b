//! Genus, cusps and dimensions of modular forms for `Γ(N)`, rank two, and the
//! cusp count in rank three by formula and by enumeration.
//!
//! ```bash
//! cargo run --example curve_invariants
//! ```

use drinfeld_eis::arithmetic::{monic_of_degree, Fq, FqConfig};
use drinfeld_eis::modspace::{cusp_count, invariants_csv, invariants_table, CountMethod};

fn main() -> drinfeld_eis::error::Result<()> {
    let fq = Fq::new(FqConfig::new(3, 1, 1))?;
    let rows = invariants_table(2, 4, &fq)?;
    print!("{}", invariants_csv(&rows));

    println!("rank 3 cusps over F_3:");
    for n in monic_of_degree(1, &fq).into_iter().chain(monic_of_degree(2, &fq).into_iter().take(3)) {
        let f = cusp_count(&n, 3, CountMethod::Formula, &fq)?;
        let e = cusp_count(&n, 3, CountMethod::Enumerate, &fq)?;
        println!("  N = {:?}: formula {f}, enumeration {e}", n.to_ints(&fq));
    }
    Ok(())
}
