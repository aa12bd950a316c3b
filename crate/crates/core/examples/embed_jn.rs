//! Weight-one Eisenstein coordinates `j_N(ω) = (E_{1,u}(ω))_u` as a projective
//! point: invariant under `Γ(N)` and different at different points.
//!
//! ```bash
//! cargo run --example embed_jn
//! ```

use drinfeld_eis::arithmetic::APoly;
use drinfeld_eis::config::RunConfig;
use drinfeld_eis::eisenstein::embed_jn;
use drinfeld_eis::lattice::{gamma_act, random_fd_frame, random_gamma_level};
use rand::SeedableRng;

fn main() -> drinfeld_eis::error::Result<()> {
    let cfg = RunConfig::new(2, 1, 1, 32, 3, 11)?;
    let tower = cfg.tower(2)?;
    let fq = tower.fq();
    let n = APoly::t();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);

    let frames: Vec<_> = (0..4).map(|_| random_fd_frame(&tower, 2, 1, &mut rng)).collect::<Result<_, _>>()?;
    let points: Vec<_> = frames.iter().map(|f| embed_jn(f, &n, cfg.precision)).collect::<Result<_, _>>()?;
    println!("{} coordinates per point", points[0].entries.len());
    for (i, (f, v)) in frames.iter().zip(&points).enumerate() {
        let g = random_gamma_level(2, &n, fq, &mut rng);
        let (moved, _) = gamma_act(&g, f)?;
        let w = embed_jn(&moved, &n, cfg.precision)?;
        let same: Vec<bool> = points.iter().map(|o| v.projectively_equal(o, cfg.precision)).collect::<Result<_, _>>()?;
        println!(
            "point {i}: equal to its Γ(T)-translate: {}, equal to points: {same:?}",
            v.projectively_equal(&w, cfg.precision)?
        );
    }
    Ok(())
}
