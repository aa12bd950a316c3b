//! Along the ray `ω = (T^(c+1/2), 1)`: the boundary parameter `t(ω)`, the
//! degeneration of `E_{k,u}` to rank one and the vanishing order in `t`.
//!
//! ```bash
//! cargo run --example boundary_behavior
//! ```

use drinfeld_eis::arithmetic::{nonzero_classes, APoly};
use drinfeld_eis::config::RunConfig;
use drinfeld_eis::eisenstein::{boundary_parameter, degeneration_ray, ray_frame, vanishing_slope};

fn main() -> drinfeld_eis::error::Result<()> {
    let cfg = RunConfig::new(2, 1, 1, 48, 3, 1)?;
    let tower = cfg.tower(2)?;
    let fq = tower.fq();
    let t = APoly::t();

    for c in 1..=5 {
        let x = boundary_parameter(&ray_frame(&tower, c)?, &t, cfg.precision)?;
        println!("c = {c}: v(t) = {}", x.lead());
    }

    for u in nonzero_classes(&t, 2, fq)? {
        let rep = degeneration_ray(&tower, 1, &u, cfg.precision)?;
        let pts: Vec<String> = rep
            .points
            .iter()
            .map(|p| format!("c={} v>={}{}", p.c, p.residual_lead, if p.saturated { " (zero)" } else { "" }))
            .collect();
        let nums: Vec<Vec<u32>> = u.numerators.iter().map(|a| a.to_ints(fq)).collect();
        println!("u = {nums:?}, rank-one limit: {}, {}: {}", rep.restricts, pts.join(", "), rep.pass);
    }

    let cs = [3, 4, 5, 6];
    let (_, s1) = vanishing_slope(&tower, &t, &APoly::one(), &cs)?;
    let (_, s2) = vanishing_slope(&tower, &t.pow(2, fq), &t, &cs)?;
    println!("slope of log|E_u| against log|t|: a = 1, N = T: {s1}; a = T, N = T^2: {s2}");
    Ok(())
}
