//! Table-driven finite fields `F_{p^n}`.
//!
//! Elements are stored in logarithmic form with respect to a primitive root,
//! so multiplication is an index addition and addition goes through a Zech
//! logarithm table. The defining polynomial is taken from a small table of
//! Conway polynomials when available, otherwise the lexicographically first
//! primitive polynomial is used.

use crate::error::{Error, Result};

/// A field element: `0` is zero, `k + 1` encodes `g^k` for the primitive root `g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fe(pub(crate) u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

const NO_LOG: u32 = u32::MAX;
const MAX_ORDER: u64 = 1 << 22;

/// Conway polynomials, coefficients low to high (monic).
const CONWAY: &[(u32, u32, &[u32])] = &[
    (2, 1, &[1, 1]),
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (2, 5, &[1, 0, 1, 0, 0, 1]),
    (2, 6, &[1, 1, 0, 1, 1, 0, 1]),
    (2, 7, &[1, 1, 0, 0, 0, 0, 0, 1]),
    (2, 8, &[1, 0, 1, 1, 1, 0, 0, 0, 1]),
    (3, 1, &[1, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (3, 4, &[2, 0, 0, 2, 1]),
    (3, 5, &[1, 2, 0, 0, 0, 1]),
    (5, 1, &[3, 1]),
    (5, 2, &[2, 4, 1]),
    (5, 3, &[3, 3, 0, 1]),
    (7, 1, &[4, 1]),
    (7, 2, &[3, 6, 1]),
];

#[derive(Debug)]
pub struct GaloisField {
    p: u32,
    n: u32,
    order: u32,
    modulus: Vec<u32>,
    /// `exp[k]` = polynomial encoding of `g^k`, for `0 <= k < order - 1`.
    exp: Vec<u32>,
    /// `log[enc]` = `k` with `g^k = enc`; undefined at 0.
    log: Vec<u32>,
    /// `zech[d]` = log of `1 + g^d`, or `NO_LOG` when that sum is zero.
    zech: Vec<u32>,
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

impl GaloisField {
    pub fn new(p: u32, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        if n == 0 {
            return Err(Error::domain("field degree must be at least 1"));
        }
        let order = (p as u64)
            .checked_pow(n)
            .filter(|&o| o <= MAX_ORDER)
            .ok_or_else(|| Error::Resource(format!("field of order {p}^{n} too large")))?;
        if let Some((_, _, m)) = CONWAY.iter().find(|(cp, cn, _)| *cp == p && *cn == n) {
            if let Some(f) = Self::try_build(p, n, order as u32, m.to_vec()) {
                return Ok(f);
            }
        }
        // lexicographic search over monic polynomials of degree n
        let count = order as u32;
        for code in 0..count {
            let mut modulus = digits(code, p, n as usize);
            modulus.push(1);
            if modulus[0] == 0 {
                continue;
            }
            if let Some(f) = Self::try_build(p, n, order as u32, modulus) {
                return Ok(f);
            }
        }
        Err(Error::domain(format!(
            "no primitive polynomial found for {p}^{n}"
        )))
    }

    fn try_build(p: u32, n: u32, order: u32, modulus: Vec<u32>) -> Option<Self> {
        let n_us = n as usize;
        let q1 = order - 1;
        let mut exp = Vec::with_capacity(q1 as usize);
        let mut log = vec![NO_LOG; order as usize];
        let mut cur = vec![0u32; n_us];
        cur[0] = 1;
        for k in 0..q1 {
            let enc = encode(&cur, p);
            if log[enc as usize] != NO_LOG {
                return None;
            }
            log[enc as usize] = k;
            exp.push(enc);
            // multiply by x modulo the defining polynomial
            let top = cur[n_us - 1];
            for i in (1..n_us).rev() {
                cur[i] = cur[i - 1];
            }
            cur[0] = 0;
            if top != 0 {
                for (i, c) in cur.iter_mut().enumerate() {
                    *c = (*c + (p - top) * modulus[i]) % p;
                }
            }
        }
        if encode(&cur, p) != 1 {
            return None;
        }
        let mut zech = vec![NO_LOG; q1 as usize];
        for d in 0..q1 {
            let mut dg = digits(exp[d as usize], p, n_us);
            dg[0] = (dg[0] + 1) % p;
            let enc = encode(&dg, p);
            if enc != 0 {
                zech[d as usize] = log[enc as usize];
            }
        }
        Some(GaloisField {
            p,
            n,
            order,
            modulus,
            exp,
            log,
            zech,
        })
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    fn q1(&self) -> u32 {
        self.order - 1
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let q1 = self.q1();
        let la = a.0 - 1;
        let lb = b.0 - 1;
        let d = if lb >= la { lb - la } else { lb + q1 - la };
        let z = self.zech[d as usize];
        if z == NO_LOG {
            Fe::ZERO
        } else {
            let s = la + z;
            Fe(if s >= q1 { s - q1 } else { s } + 1)
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        if a.0 == 0 || self.p == 2 {
            return a;
        }
        let q1 = self.q1();
        let s = a.0 - 1 + q1 / 2;
        Fe(if s >= q1 { s - q1 } else { s } + 1)
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        let q1 = self.q1();
        let s = a.0 - 1 + b.0 - 1;
        Fe(if s >= q1 { s - q1 } else { s } + 1)
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.0 == 0 {
            return Err(Error::domain("inverse of zero in finite field"));
        }
        let q1 = self.q1();
        Ok(Fe((q1 - (a.0 - 1)) % q1 + 1))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e` for any integer exponent (`a != 0` when `e < 0`).
    pub fn pow(&self, a: Fe, e: i64) -> Fe {
        if a.0 == 0 {
            return if e == 0 { Fe::ONE } else { Fe::ZERO };
        }
        let q1 = self.q1() as i64;
        let l = ((a.0 - 1) as i64 * e.rem_euclid(q1)).rem_euclid(q1);
        Fe(l as u32 + 1)
    }

    /// `a^(p^k)`.
    pub fn frobenius(&self, a: Fe, k: u32) -> Fe {
        if a.0 == 0 {
            return a;
        }
        let q1 = self.q1() as u64;
        let mut l = (a.0 - 1) as u64;
        for _ in 0..k {
            l = l * self.p as u64 % q1;
        }
        Fe(l as u32 + 1)
    }

    /// Primitive root `g^k`.
    pub fn gen_pow(&self, k: u64) -> Fe {
        Fe((k % self.q1() as u64) as u32 + 1)
    }

    /// Element from its polynomial-basis encoding (base-`p` digits, low first).
    pub fn from_encoding(&self, enc: u32) -> Result<Fe> {
        if enc >= self.order {
            return Err(Error::Parse(format!("field encoding {enc} out of range")));
        }
        Ok(if enc == 0 {
            Fe::ZERO
        } else {
            Fe(self.log[enc as usize] + 1)
        })
    }

    pub fn encoding(&self, a: Fe) -> u32 {
        if a.0 == 0 {
            0
        } else {
            self.exp[(a.0 - 1) as usize]
        }
    }

    pub fn from_digits(&self, d: &[u32]) -> Result<Fe> {
        if d.len() != self.n as usize || d.iter().any(|&x| x >= self.p) {
            return Err(Error::Parse(format!("bad digit tuple {d:?}")));
        }
        self.from_encoding(encode(d, self.p))
    }

    pub fn to_digits(&self, a: Fe) -> Vec<u32> {
        digits(self.encoding(a), self.p, self.n as usize)
    }

    /// Image of the integer `k` in the prime field.
    pub fn from_int(&self, k: i64) -> Fe {
        let r = k.rem_euclid(self.p as i64) as u32;
        self.from_encoding(r).expect("prime-field residue in range")
    }

    /// All elements in encoding order (0, 1, ..., order-1).
    pub fn elements(&self) -> impl Iterator<Item = Fe> + '_ {
        (0..self.order).map(move |e| self.from_encoding(e).unwrap())
    }

    /// Evaluate a polynomial with prime-field coefficients (low first) at `x`.
    pub fn eval_int_poly(&self, coeffs: &[u32], x: Fe) -> Fe {
        coeffs.iter().rev().fold(Fe::ZERO, |acc, &c| {
            self.add(self.mul(acc, x), self.from_int(c as i64))
        })
    }
}

pub(crate) fn digits(mut code: u32, p: u32, n: usize) -> Vec<u32> {
    let mut d = Vec::with_capacity(n);
    for _ in 0..n {
        d.push(code % p);
        code /= p;
    }
    d
}

pub(crate) fn encode(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conway_entries_are_primitive() {
        for &(p, n, m) in CONWAY {
            let order = (p as u32).pow(n);
            assert!(
                GaloisField::try_build(p, n, order, m.to_vec()).is_some(),
                "table entry for {p}^{n} is not primitive"
            );
        }
    }

    #[test]
    fn field_axioms_small() {
        for (p, n) in [(2, 1), (2, 3), (3, 2), (5, 1), (2, 4)] {
            let f = GaloisField::new(p, n).unwrap();
            let els: Vec<Fe> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, f.neg(a)), Fe::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), Fe::ONE);
                }
                assert_eq!(f.frobenius(a, n), a);
                for &b in els.iter().take(5) {
                    // digitwise addition oracle
                    let da = f.to_digits(a);
                    let db = f.to_digits(b);
                    let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                    assert_eq!(f.add(a, b), f.from_digits(&s).unwrap());
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                }
            }
        }
    }

    #[test]
    fn fallback_search_finds_field() {
        let f = GaloisField::new(11, 2).unwrap();
        assert_eq!(f.order(), 121);
        assert!(GaloisField::new(4, 1).is_err());
    }
}
