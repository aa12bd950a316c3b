//! Run the identity checks programmatically and print one line per check.
//!
//! ```bash
//! cargo run --release --example verify_suite -- 3
//! ```

use drinfeld_eis::config::RunConfig;
use drinfeld_eis::verify::{run_suite, Ctx};

fn main() -> drinfeld_eis::error::Result<()> {
    let q = std::env::args().nth(1).map_or(Ok(2), |s| s.parse()).unwrap_or(2);
    let ctx = Ctx::new(RunConfig::new(q, 1, 1, 48, 3, 1)?);
    let rep = run_suite(&ctx, &[])?;
    for c in &rep.checks {
        let digits = c.digits.map_or(String::from("-"), |d| d.to_string());
        println!("{:<20} {:<24} {digits:>4}  {}", c.name, format!("{:?}", c.status), c.detail);
    }
    println!("{} passed, {} failed, exit code {}", rep.passed, rep.failed, rep.exit_code());
    Ok(())
}
