//! Run configuration and the versioned report envelope shared by the binary
//! and the verification suite.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{FieldSpec, Tower, TowerRef};

/// Digits carried beyond the requested precision.
pub const GUARD: i64 = 16;

pub const SCHEMA: &str = "dmf-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub q: u64,
    pub p: u32,
    pub s: u32,
    /// Ramification index `e` of the series field.
    pub ram_e: u32,
    /// Degree `m` of the residue field over `F_q`.
    pub ext_m: u32,
    /// Requested relative precision in `u`-digits.
    pub precision: i64,
    /// Largest `deg N` for enumerations and tables.
    pub deg_cap: usize,
    pub seed: u64,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            q: 2,
            p: 2,
            s: 1,
            ram_e: 1,
            ext_m: 1,
            precision: 48,
            deg_cap: 3,
            seed: 1,
            format: Format::Json,
        }
    }
}

/// `q = p^s` with `p` prime.
pub fn split_prime_power(q: u64) -> Result<(u32, u32)> {
    if q < 2 {
        return Err(Error::domain("q must be a prime power >= 2"));
    }
    let p = (2..=q).find(|d| q % d == 0).unwrap();
    let mut s = 0;
    let mut x = q;
    while x % p == 0 {
        x /= p;
        s += 1;
    }
    if x != 1 {
        return Err(Error::domain(format!("q = {q} is not a prime power")));
    }
    Ok((p as u32, s))
}

impl RunConfig {
    pub fn new(
        q: u64,
        ram_e: u32,
        ext_m: u32,
        precision: i64,
        deg_cap: usize,
        seed: u64,
    ) -> Result<Self> {
        let (p, s) = split_prime_power(q)?;
        let c = RunConfig {
            q,
            p,
            s,
            ram_e,
            ext_m,
            precision,
            deg_cap,
            seed,
            format: Format::Json,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ram_e == 0 || self.ext_m == 0 {
            return Err(Error::domain("ram-e and ext-m must be positive"));
        }
        if self.precision < 1 || self.precision > 4096 {
            return Err(Error::domain("precision must lie in 1..=4096"));
        }
        if self.deg_cap == 0 {
            return Err(Error::domain("deg-cap must be positive"));
        }
        if u64::from(self.p).pow(self.s) != self.q {
            return Err(Error::domain("q does not match p^s"));
        }
        Ok(())
    }

    /// Working tower whose ramification index is a multiple of both `ram_e` and `min_e`.
    pub fn tower(&self, min_e: u32) -> Result<TowerRef> {
        let e = lcm(self.ram_e, min_e.max(1));
        Tower::new(
            FieldSpec::new(self.p, self.s, e, self.ext_m),
            self.precision + GUARD,
        )
    }
}

fn lcm(a: u32, b: u32) -> u32 {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

#[derive(Clone, Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub schema: &'static str,
    pub command: String,
    pub config: RunConfig,
    pub result: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(command: &str, config: &RunConfig, result: T) -> Self {
        Report {
            schema: SCHEMA,
            command: command.to_string(),
            config: config.clone(),
            result,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// A polynomial written as its coefficients from the constant term up,
/// each the integer encoding of an element of `F_q`: `0,1` is `T`.
pub fn parse_poly(s: &str, fq: &crate::arithmetic::Fq) -> Result<crate::arithmetic::APoly> {
    let ints = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad coefficient {t:?} in {s:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    crate::arithmetic::APoly::from_ints(fq, &ints)
}

/// A vector of polynomials separated by `/`: `1/0` is `(1, 0)`.
pub fn parse_poly_vec(
    s: &str,
    fq: &crate::arithmetic::Fq,
) -> Result<Vec<crate::arithmetic::APoly>> {
    s.split('/').map(|p| parse_poly(p, fq)).collect()
}
