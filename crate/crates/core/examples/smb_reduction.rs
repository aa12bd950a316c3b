//! Reduce a lattice frame to a successive minimum basis and move it by `GL_r(A)`.
//!
//! ```bash
//! cargo run --example smb_reduction
//! ```

use drinfeld_eis::config::RunConfig;
use drinfeld_eis::lattice::{gamma_act, in_fundamental_domain, random_gamma, smb_reduce, Builtin, LatticeFrame};
use rand::SeedableRng;

fn main() -> drinfeld_eis::error::Result<()> {
    let cfg = RunConfig::new(2, 1, 1, 24, 3, 7)?;
    let tower = cfg.tower(3)?;
    let fq = tower.fq();
    let frame = Builtin::Rank3Cbrt.frame(&tower)?;

    // scramble the basis, then recover the minima
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
    let g = random_gamma(3, fq, &mut rng);
    let (moved, _) = gamma_act(&g, &frame)?;
    println!("scrambled leads: {:?}", moved.omegas().iter().map(|w| w.lead()).collect::<Vec<_>>());
    println!("in fundamental domain: {}", in_fundamental_domain(&moved)?);

    let smb = smb_reduce(&moved)?;
    let minima: Vec<String> = smb.minima.iter().map(|m| m.to_string()).collect();
    println!("log_q of the successive minima: {}", minima.join(", "));
    println!("change of basis: {:?}", smb.change.to_ints(fq));
    // largest vector first puts the point in the fundamental domain
    let rev = LatticeFrame::new(smb.frame.omegas().iter().rev().cloned().collect())?.normalized()?;
    println!("reversed SMB in fundamental domain: {}", in_fundamental_domain(&rev)?);
    Ok(())
}
