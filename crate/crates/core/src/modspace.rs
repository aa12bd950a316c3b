//! Cusp counts and the closed-form invariants of the rank-two modular curves
//! `M^2(N)`. Everything here is exact integer arithmetic.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::arithmetic::{factor, monic_of_degree, APoly, Fq, ENUMERATION_CAP};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CountMethod {
    Formula,
    Enumerate,
}

fn overflow() -> Error {
    Error::Resource("integer overflow".into())
}

fn check_level(n: &APoly) -> Result<usize> {
    match n.degree() {
        Some(d) if d >= 1 && n.is_monic() => Ok(d),
        Some(d) if d >= 1 => Err(Error::domain("level must be monic")),
        _ => Err(Error::domain("level must have positive degree")),
    }
}

/// `(q_i, s_i)` with `q_i = q^(deg p_i)` over the prime factorization of `N`.
fn prime_data(n: &APoly, fq: &Fq) -> Result<Vec<(u128, u32)>> {
    let q = fq.q() as u128;
    Ok(factor(n, fq)?
        .factors
        .iter()
        .map(|(p, s)| (q.pow(p.degree().unwrap() as u32), *s as u32))
        .collect())
}

/// Number of cusps `c_r(N) = #((A/N)^r primitive) / (q - 1)`.
pub fn cusp_count(n: &APoly, r: usize, method: CountMethod, fq: &Fq) -> Result<u128> {
    let d = check_level(n)?;
    if r < 2 {
        return Err(Error::domain("rank must be at least 2"));
    }
    let q = fq.q() as u128;
    match method {
        CountMethod::Formula => {
            let mut acc: u128 = 1;
            for (qi, s) in prime_data(n, fq)? {
                let a = qi.checked_pow(r as u32).ok_or_else(overflow)? - 1;
                let b = qi.checked_pow((s - 1) * r as u32).ok_or_else(overflow)?;
                acc = acc
                    .checked_mul(a)
                    .and_then(|x| x.checked_mul(b))
                    .ok_or_else(overflow)?;
            }
            Ok(acc / (q - 1))
        }
        CountMethod::Enumerate => {
            let per = (q as u64).checked_pow(d as u32).ok_or_else(overflow)?;
            let total = per
                .checked_pow(r as u32)
                .filter(|&t| t <= ENUMERATION_CAP)
                .ok_or_else(|| {
                    Error::Resource(format!(
                        "q^(r deg N) exceeds the enumeration cap {ENUMERATION_CAP}"
                    ))
                })?;
            let residues: Vec<APoly> = (0..per).map(|i| APoly::from_index(i, d, fq)).collect();
            let mut count: u128 = 0;
            for idx in 0..total {
                let mut rest = idx;
                let mut g = n.clone();
                for _ in 0..r {
                    g = g.gcd(&residues[(rest % per) as usize], fq);
                    rest /= per;
                    if g.is_one() {
                        break;
                    }
                }
                if g.is_one() {
                    count += 1;
                }
            }
            Ok(count / (q - 1))
        }
    }
}

/// `λ(N) = Π q_i^(2 s_i - 2) (q_i^2 - 1)`.
pub fn lambda_of(n: &APoly, fq: &Fq) -> Result<u128> {
    check_level(n)?;
    let mut acc: u128 = 1;
    for (qi, s) in prime_data(n, fq)? {
        let a = qi.checked_pow(2 * s - 2).ok_or_else(overflow)?;
        acc = acc
            .checked_mul(a)
            .and_then(|x| x.checked_mul(qi * qi - 1))
            .ok_or_else(overflow)?;
    }
    Ok(acc)
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveInvariants {
    pub n: Vec<u32>,
    pub q: u64,
    pub lambda: u128,
    pub genus: u128,
    pub cusps: u128,
    pub deg_m: u128,
    pub dim_mod: BTreeMap<u32, u128>,
}

/// Genus, cusp count, degree of the bundle of modular forms and `dim Mod_k(N)`
/// for `k = 1..=k_max`, rank two.
pub fn curve_invariants(n: &APoly, k_max: u32, fq: &Fq) -> Result<CurveInvariants> {
    let d = check_level(n)? as u32;
    let q = fq.q() as u128;
    let lam = lambda_of(n, fq)?;
    let qd = q.checked_pow(d).ok_or_else(overflow)?;
    let q21 = q * q - 1;
    let exact = |num: u128, den: u128, what: &str| -> Result<u128> {
        if num % den != 0 {
            return Err(Error::Domain(format!("{what} is not an integer")));
        }
        Ok(num / den)
    };
    let mul = |a: u128, b: u128| a.checked_mul(b).ok_or_else(overflow);
    // q^d - q - 1 is negative only for q = 2, d = 1, where λ = 3 and g = 0
    let g_num = mul(lam, qd)? as i128 - mul(lam, q + 1)? as i128;
    let genus = 1 + g_num / q21 as i128;
    if g_num % q21 as i128 != 0 || genus < 0 {
        return Err(Error::Domain("genus is not a nonnegative integer".into()));
    }
    let cusps = exact(lam, q - 1, "c(N)")?;
    let formula_cusps = cusp_count(n, 2, CountMethod::Formula, fq)?;
    if formula_cusps != cusps {
        return Err(Error::Domain(format!(
            "c(N) = {cusps} but the cusp count is {formula_cusps}"
        )));
    }
    let deg_m = exact(mul(lam, qd)?, q21, "deg M")?;
    let mut dim_mod = BTreeMap::new();
    for k in 1..=k_max {
        let num = mul(mul(k as u128 - 1, qd)? + q + 1, lam)?;
        dim_mod.insert(k, exact(num, q21, "dim Mod_k")?);
    }
    Ok(CurveInvariants {
        n: n.to_ints(fq),
        q: fq.q(),
        lambda: lam,
        genus: genus as u128,
        cusps,
        deg_m,
        dim_mod,
    })
}

/// Dimension of the Eisenstein space `Eis_k(N)` in rank `r`; equal to the cusp count.
pub fn dim_eis(n: &APoly, r: usize, fq: &Fq) -> Result<u128> {
    cusp_count(n, r, CountMethod::Formula, fq)
}

/// Invariants for every monic `N` with `1 <= deg N <= deg_max`.
pub fn invariants_table(deg_max: usize, k_max: u32, fq: &Fq) -> Result<Vec<CurveInvariants>> {
    let mut out = Vec::new();
    for d in 1..=deg_max {
        for n in monic_of_degree(d, fq) {
            out.push(curve_invariants(&n, k_max, fq)?);
        }
    }
    Ok(out)
}

/// One row per level: `N,lambda,genus,cusps,deg_m,dim_1,...`.
pub fn invariants_csv(rows: &[CurveInvariants]) -> String {
    let kmax = rows.first().map_or(0, |r| r.dim_mod.len());
    let mut s = String::from("N,lambda,genus,cusps,deg_m");
    for k in 1..=kmax {
        s.push_str(&format!(",dim_mod_{k}"));
    }
    s.push('\n');
    for r in rows {
        let n: Vec<String> = r.n.iter().map(u32::to_string).collect();
        s.push_str(&format!(
            "{},{},{},{},{}",
            n.join(" "),
            r.lambda,
            r.genus,
            r.cusps,
            r.deg_m
        ));
        for v in r.dim_mod.values() {
            s.push_str(&format!(",{v}"));
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::FqConfig;

    fn fq(q: u32) -> Fq {
        Fq::new(FqConfig::new(q, 1, 1)).unwrap()
    }

    fn poly(f: &Fq, c: &[u32]) -> APoly {
        APoly::from_ints(f, c).unwrap()
    }

    #[test]
    fn examples() {
        let f2 = fq(2);
        let f3 = fq(3);
        assert_eq!(
            cusp_count(&APoly::t(), 2, CountMethod::Enumerate, &f3).unwrap(),
            4
        );
        assert_eq!(
            cusp_count(&poly(&f2, &[0, 0, 1]), 2, CountMethod::Enumerate, &f2).unwrap(),
            12
        );
        assert_eq!(
            cusp_count(&APoly::t(), 3, CountMethod::Enumerate, &f2).unwrap(),
            7
        );
        assert_eq!(lambda_of(&poly(&f2, &[0, 0, 1]), &f2).unwrap(), 12);
        assert_eq!(lambda_of(&poly(&f2, &[1, 1, 1]), &f2).unwrap(), 15);
        assert_eq!(lambda_of(&poly(&f2, &[0, 1, 1]), &f2).unwrap(), 9);
        let g = |c: &[u32]| curve_invariants(&poly(&f2, c), 1, &f2).unwrap().genus;
        assert_eq!((g(&[0, 1, 1]), g(&[0, 0, 1]), g(&[1, 1, 1])), (4, 5, 6));
        let inv = curve_invariants(&APoly::t(), 6, &f2).unwrap();
        assert_eq!(inv.genus, 0);
        assert_eq!(inv.deg_m, 2);
        for (k, v) in &inv.dim_mod {
            assert_eq!(*v, 1 + 2 * *k as u128);
        }
        assert_eq!(dim_eis(&APoly::t(), 2, &f2).unwrap(), inv.dim_mod[&1]);
    }

    #[test]
    fn formula_matches_enumeration() {
        for q in [2, 3] {
            let f = fq(q);
            for r in [2, 3] {
                for d in 1..=3 {
                    for n in monic_of_degree(d, &f) {
                        let Ok(e) = cusp_count(&n, r, CountMethod::Enumerate, &f) else {
                            continue;
                        };
                        assert_eq!(e, cusp_count(&n, r, CountMethod::Formula, &f).unwrap());
                    }
                }
            }
        }
    }
}
