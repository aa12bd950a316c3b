//! Exact arithmetic in `F_q` and `A = F_q[T]`: factorization, the Möbius
//! function, divisors and residue vectors modulo a level `N`.

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fe, GaloisField};

/// Seed for the equal-degree splitting step; fixed so factorizations are reproducible.
const SPLIT_SEED: u64 = 0x5eed_f00d;

/// Enumeration cap for `(A/N)^r` walks.
pub const ENUMERATION_CAP: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FqConfig {
    pub p: u32,
    pub s: u32,
    pub m: u32,
}

impl FqConfig {
    pub fn new(p: u32, s: u32, m: u32) -> Self {
        FqConfig { p, s, m }
    }

    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.s)
    }
}

/// The constant field `F_q` together with its degree-`m` extension and the
/// embedding between them.
#[derive(Debug)]
pub struct Fq {
    config: FqConfig,
    base: GaloisField,
    ext: GaloisField,
    embed: Vec<Fe>,
}

impl Fq {
    pub fn new(config: FqConfig) -> Result<Self> {
        if config.s == 0 || config.m == 0 {
            return Err(Error::domain("s and m must be at least 1"));
        }
        let base = GaloisField::new(config.p, config.s)?;
        let ext = GaloisField::new(config.p, config.s * config.m)?;
        let q1 = base.order() as u64 - 1;
        let step = (ext.order() as u64 - 1) / q1;
        // smallest power of the extension generator that is a root of the base modulus
        let root = (1..=q1)
            .filter(|j| gcd_u64(*j, q1) == 1)
            .map(|j| ext.gen_pow(j * step))
            .find(|&x| ext.eval_int_poly(base.modulus(), x).is_zero())
            .ok_or_else(|| Error::domain("no embedding of F_q into F_{q^m}"))?;
        let mut embed = vec![Fe::ZERO; base.order() as usize];
        for k in 0..q1 {
            embed[base.gen_pow(k).0 as usize] = ext.pow(root, k as i64);
        }
        Ok(Fq {
            config,
            base,
            ext,
            embed,
        })
    }

    pub fn config(&self) -> FqConfig {
        self.config
    }

    pub fn q(&self) -> u64 {
        self.config.q()
    }

    pub fn base(&self) -> &GaloisField {
        &self.base
    }

    pub fn ext(&self) -> &GaloisField {
        &self.ext
    }

    pub fn embed(&self, a: Fe) -> Fe {
        self.embed[a.0 as usize]
    }

    /// Inverse of `embed`, if `x` lies in `F_q`.
    pub fn restrict(&self, x: Fe) -> Option<Fe> {
        self.embed
            .iter()
            .position(|&y| y == x)
            .map(|i| Fe(i as u32))
    }

    /// `F_q` in canonical order (by polynomial-basis encoding).
    pub fn elements(&self) -> Vec<Fe> {
        self.base.elements().collect()
    }

    pub fn units(&self) -> Vec<Fe> {
        self.base.elements().filter(|c| !c.is_zero()).collect()
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

/// An element of `A = F_q[T]`, coefficients low to high, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct APoly {
    coeffs: Vec<Fe>,
}

impl APoly {
    pub fn zero() -> Self {
        APoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        APoly {
            coeffs: vec![Fe::ONE],
        }
    }

    pub fn t() -> Self {
        APoly {
            coeffs: vec![Fe::ZERO, Fe::ONE],
        }
    }

    pub fn monomial(c: Fe, n: usize) -> Self {
        let mut coeffs = vec![Fe::ZERO; n + 1];
        coeffs[n] = c;
        APoly::from_coeffs(coeffs)
    }

    pub fn constant(c: Fe) -> Self {
        APoly::from_coeffs(vec![c])
    }

    pub fn from_coeffs(mut coeffs: Vec<Fe>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        APoly { coeffs }
    }

    /// Coefficients given as polynomial-basis encodings of `F_q` elements
    /// (plain residues mod `p` when `q` is prime).
    pub fn from_ints(fq: &Fq, ints: &[u32]) -> Result<Self> {
        let c = ints
            .iter()
            .map(|&i| fq.base().from_encoding(i))
            .collect::<Result<Vec<_>>>()?;
        Ok(APoly::from_coeffs(c))
    }

    pub fn to_ints(&self, fq: &Fq) -> Vec<u32> {
        self.coeffs.iter().map(|&c| fq.base().encoding(c)).collect()
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs.get(i).copied().unwrap_or(Fe::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [Fe::ONE]
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial sent to `-1`.
    pub fn deg_i(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn lead(&self) -> Fe {
        self.coeffs.last().copied().unwrap_or(Fe::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == Fe::ONE
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn add(&self, o: &APoly, fq: &Fq) -> APoly {
        let f = fq.base();
        let n = self.coeffs.len().max(o.coeffs.len());
        APoly::from_coeffs((0..n).map(|i| f.add(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn sub(&self, o: &APoly, fq: &Fq) -> APoly {
        self.add(&o.neg(fq), fq)
    }

    pub fn neg(&self, fq: &Fq) -> APoly {
        APoly {
            coeffs: self.coeffs.iter().map(|&c| fq.base().neg(c)).collect(),
        }
    }

    pub fn scale(&self, c: Fe, fq: &Fq) -> APoly {
        APoly::from_coeffs(self.coeffs.iter().map(|&a| fq.base().mul(a, c)).collect())
    }

    pub fn mul(&self, o: &APoly, fq: &Fq) -> APoly {
        if self.is_zero() || o.is_zero() {
            return APoly::zero();
        }
        let f = fq.base();
        let mut out = vec![Fe::ZERO; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        APoly::from_coeffs(out)
    }

    pub fn pow(&self, e: u32, fq: &Fq) -> APoly {
        (0..e).fold(APoly::one(), |acc, _| acc.mul(self, fq))
    }

    pub fn div_rem(&self, d: &APoly, fq: &Fq) -> Result<(APoly, APoly)> {
        if d.is_zero() {
            return Err(Error::domain("division by the zero polynomial"));
        }
        let f = fq.base();
        let dn = d.coeffs.len() - 1;
        let inv_lead = f.inv(d.lead())?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dn {
            return Ok((APoly::zero(), self.clone()));
        }
        let mut quo = vec![Fe::ZERO; rem.len() - dn];
        for i in (dn..rem.len()).rev() {
            let c = f.mul(rem[i], inv_lead);
            if c.is_zero() {
                continue;
            }
            quo[i - dn] = c;
            for (j, &b) in d.coeffs.iter().enumerate() {
                let idx = i - dn + j;
                rem[idx] = f.sub(rem[idx], f.mul(c, b));
            }
        }
        Ok((APoly::from_coeffs(quo), APoly::from_coeffs(rem)))
    }

    pub fn rem(&self, d: &APoly, fq: &Fq) -> Result<APoly> {
        Ok(self.div_rem(d, fq)?.1)
    }

    /// Monic associate (zero stays zero).
    pub fn monic(&self, fq: &Fq) -> APoly {
        if self.is_zero() {
            return APoly::zero();
        }
        let inv = fq
            .base()
            .inv(self.lead())
            .expect("nonzero leading coefficient");
        self.scale(inv, fq)
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, o: &APoly, fq: &Fq) -> APoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b, fq).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic(fq)
    }

    /// Extended Euclid: `(g, s, t)` with `s*self + t*o = g`, `g` monic.
    pub fn xgcd(&self, o: &APoly, fq: &Fq) -> (APoly, APoly, APoly) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (APoly::one(), APoly::zero());
        let (mut t0, mut t1) = (APoly::zero(), APoly::one());
        while !r1.is_zero() {
            let (qt, r) = r0.div_rem(&r1, fq).expect("nonzero divisor");
            let s = s0.sub(&qt.mul(&s1, fq), fq);
            let t = t0.sub(&qt.mul(&t1, fq), fq);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = fq.base().inv(r0.lead()).unwrap();
        (r0.scale(inv, fq), s0.scale(inv, fq), t0.scale(inv, fq))
    }

    /// Inverse modulo `n`, if it exists.
    pub fn inv_mod(&self, n: &APoly, fq: &Fq) -> Option<APoly> {
        let (g, s, _) = self.rem(n, fq).ok()?.xgcd(n, fq);
        if g.is_one() {
            s.rem(n, fq).ok()
        } else {
            None
        }
    }

    pub fn mul_mod(&self, o: &APoly, n: &APoly, fq: &Fq) -> APoly {
        self.mul(o, fq).rem(n, fq).expect("nonzero modulus")
    }

    pub fn pow_mod(&self, mut e: u128, n: &APoly, fq: &Fq) -> APoly {
        let mut base = self.rem(n, fq).expect("nonzero modulus");
        let mut acc = APoly::one().rem(n, fq).expect("nonzero modulus");
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_mod(&base, n, fq);
            }
            base = base.mul_mod(&base, n, fq);
            e >>= 1;
        }
        acc
    }

    pub fn derivative(&self, fq: &Fq) -> APoly {
        let f = fq.base();
        APoly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| f.mul(c, f.from_int(i as i64)))
                .collect(),
        )
    }

    /// Polynomial with coefficient vector given by base-`q` digits of `idx`
    /// (in encoding order), of length `len`. Enumerates `F_q[T]_{<len}`.
    pub fn from_index(idx: u64, len: usize, fq: &Fq) -> APoly {
        let q = fq.q();
        let mut v = idx;
        let mut c = Vec::with_capacity(len);
        for _ in 0..len {
            c.push(fq.base().from_encoding((v % q) as u32).unwrap());
            v /= q;
        }
        APoly::from_coeffs(c)
    }

    pub fn to_index(&self, fq: &Fq) -> u64 {
        let q = fq.q();
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| acc * q + fq.base().encoding(c) as u64)
    }

    /// Canonical order: degree first, then coefficient encodings from the top down.
    pub fn canonical_cmp(&self, o: &APoly, fq: &Fq) -> Ordering {
        self.coeffs.len().cmp(&o.coeffs.len()).then_with(|| {
            let a: Vec<u32> = self
                .coeffs
                .iter()
                .rev()
                .map(|&c| fq.base().encoding(c))
                .collect();
            let b: Vec<u32> = o
                .coeffs
                .iter()
                .rev()
                .map(|&c| fq.base().encoding(c))
                .collect();
            a.cmp(&b)
        })
    }

    pub fn display<'a>(&'a self, fq: &'a Fq) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, fq }
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a APoly,
    fq: &'a Fq,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.poly.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            let enc = self.fq.base().encoding(c);
            match (i, enc) {
                (0, _) => write!(f, "{enc}")?,
                (_, 1) => {}
                _ => write!(f, "{enc}*")?,
            }
            match i {
                0 => {}
                1 => write!(f, "T")?,
                _ => write!(f, "T^{i}")?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: Fe,
    /// Monic irreducible factors with multiplicities, in canonical order.
    pub factors: Vec<(APoly, u32)>,
}

impl Factorization {
    pub fn expand(&self, fq: &Fq) -> APoly {
        self.factors
            .iter()
            .fold(APoly::constant(self.unit), |acc, (p, e)| {
                acc.mul(&p.pow(*e, fq), fq)
            })
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|(_, e)| *e == 1)
    }
}

/// Square-free decomposition of a monic polynomial: pairs `(g_i, i)` with
/// `f = prod g_i^i` and the `g_i` square-free and pairwise coprime.
fn squarefree_decomposition(f: &APoly, fq: &Fq) -> Vec<(APoly, u32)> {
    let mut out = Vec::new();
    if f.is_constant() {
        return out;
    }
    let p = fq.config().p;
    let s = fq.config().s;
    let df = f.derivative(fq);
    let mut c = f.gcd(&df, fq);
    let mut w = f.div_rem(&c, fq).unwrap().0;
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c, fq);
        let fac = w.div_rem(&y, fq).unwrap().0;
        if !fac.is_one() {
            out.push((fac, i));
        }
        w = y;
        c = c.div_rem(&w, fq).unwrap().0;
        i += 1;
    }
    if !c.is_one() {
        // c is a p-th power: take the root coefficientwise
        let base = fq.base();
        let root = APoly::from_coeffs(
            c.coeffs
                .iter()
                .step_by(p as usize)
                .map(|&a| base.frobenius(a, s - 1))
                .collect(),
        );
        for (g, e) in squarefree_decomposition(&root, fq) {
            out.push((g, e * p));
        }
    }
    out
}

/// Distinct-degree factorization of a square-free monic polynomial.
fn distinct_degree(f: &APoly, fq: &Fq) -> Vec<(APoly, usize)> {
    let q = fq.q() as u128;
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = APoly::t();
    let mut h = x.rem(&rest, fq).unwrap();
    let mut d = 0usize;
    while rest.deg_i() >= 2 * (d as i64 + 1) {
        d += 1;
        h = h.pow_mod(q, &rest, fq);
        let g = h.sub(&x, fq).gcd(&rest, fq);
        if !g.is_one() {
            out.push((g.clone(), d));
            rest = rest.div_rem(&g, fq).unwrap().0;
            h = h.rem(&rest, fq).unwrap();
        }
    }
    if !rest.is_one() {
        let dr = rest.degree().unwrap();
        out.push((rest, dr));
    }
    out
}

/// Equal-degree splitting (Cantor–Zassenhaus) of a product of degree-`d` irreducibles.
fn equal_degree(f: &APoly, d: usize, fq: &Fq, rng: &mut ChaCha8Rng) -> Vec<APoly> {
    let n = f.degree().unwrap();
    if n == d {
        return vec![f.clone()];
    }
    let q = fq.q() as u128;
    let p = fq.config().p;
    loop {
        let a = APoly::from_index(rng.gen_range(0..q.pow(n as u32) as u64), n, fq);
        if a.is_constant() {
            continue;
        }
        let b = if p == 2 {
            // absolute trace: a + a^2 + ... + a^(2^(s*d - 1))
            let steps = fq.config().s as usize * d;
            let mut acc = APoly::zero();
            let mut cur = a.rem(f, fq).unwrap();
            for _ in 0..steps {
                acc = acc.add(&cur, fq);
                cur = cur.mul_mod(&cur, f, fq);
            }
            acc
        } else {
            let e = (q.pow(d as u32) - 1) / 2;
            a.pow_mod(e, f, fq).sub(&APoly::one(), fq)
        };
        let g = b.gcd(f, fq);
        if !g.is_one() && g.degree() != f.degree() {
            let h = f.div_rem(&g, fq).unwrap().0;
            let mut out = equal_degree(&g, d, fq, rng);
            out.extend(equal_degree(&h, d, fq, rng));
            return out;
        }
    }
}

pub fn factor(f: &APoly, fq: &Fq) -> Result<Factorization> {
    if f.is_zero() {
        return Err(Error::domain("cannot factor the zero polynomial"));
    }
    let unit = f.lead();
    let monic = f.monic(fq);
    let mut rng = ChaCha8Rng::seed_from_u64(SPLIT_SEED);
    let mut factors = Vec::new();
    for (g, e) in squarefree_decomposition(&monic, fq) {
        for (h, d) in distinct_degree(&g, fq) {
            for irr in equal_degree(&h, d, fq, &mut rng) {
                factors.push((irr.monic(fq), e));
            }
        }
    }
    factors.sort_by(|a, b| a.0.canonical_cmp(&b.0, fq));
    // merge repeats coming from different square-free layers (cannot happen, kept exact)
    let mut merged: Vec<(APoly, u32)> = Vec::new();
    for (g, e) in factors {
        match merged.last_mut() {
            Some((h, m)) if *h == g => *m += e,
            _ => merged.push((g, e)),
        }
    }
    Ok(Factorization {
        unit,
        factors: merged,
    })
}

pub fn mobius(a: &APoly, fq: &Fq) -> Result<i32> {
    let fac = factor(a, fq)?;
    if !fac.is_squarefree() {
        return Ok(0);
    }
    Ok(if fac.factors.len() % 2 == 0 { 1 } else { -1 })
}

pub fn monic_divisors(a: &APoly, fq: &Fq) -> Result<Vec<APoly>> {
    let fac = factor(a, fq)?;
    let mut divs = vec![APoly::one()];
    for (p, e) in &fac.factors {
        let mut next = Vec::with_capacity(divs.len() * (*e as usize + 1));
        for d in &divs {
            let mut cur = d.clone();
            next.push(cur.clone());
            for _ in 0..*e {
                cur = cur.mul(p, fq);
                next.push(cur.clone());
            }
        }
        divs = next;
    }
    divs.sort_by(|x, y| x.canonical_cmp(y, fq));
    Ok(divs)
}

/// All monic polynomials of exact degree `d`, in canonical order.
pub fn monic_of_degree(d: usize, fq: &Fq) -> Vec<APoly> {
    let count = fq.q().pow(d as u32);
    (0..count)
        .map(|i| {
            let mut c = APoly::from_index(i, d, fq).coeffs;
            c.resize(d, Fe::ZERO);
            c.push(Fe::ONE);
            APoly::from_coeffs(c)
        })
        .collect()
}

/// A congruence class `u = numerators / N` in `(N^{-1}A/A)^r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CongClass {
    pub level: APoly,
    pub numerators: Vec<APoly>,
}

impl CongClass {
    pub fn new(level: APoly, numerators: Vec<APoly>, fq: &Fq) -> Result<Self> {
        if level.is_constant() || !level.is_monic() {
            return Err(Error::domain("level must be monic of positive degree"));
        }
        if numerators.is_empty() {
            return Err(Error::domain("congruence class needs rank >= 1"));
        }
        let numerators = numerators
            .iter()
            .map(|n| n.rem(&level, fq))
            .collect::<Result<Vec<_>>>()?;
        Ok(CongClass { level, numerators })
    }

    pub fn rank(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_zero(&self) -> bool {
        self.numerators.iter().all(APoly::is_zero)
    }

    /// Primitive as an element of `(A/N)^r`.
    pub fn is_primitive(&self, fq: &Fq) -> bool {
        self.numerators
            .iter()
            .fold(self.level.clone(), |g, n| g.gcd(n, fq))
            .is_one()
    }

    /// `c * u` for `c` in `A` (reduced).
    pub fn scale(&self, c: &APoly, fq: &Fq) -> CongClass {
        CongClass {
            level: self.level.clone(),
            numerators: self
                .numerators
                .iter()
                .map(|n| n.mul_mod(c, &self.level, fq))
                .collect(),
        }
    }

    /// Row vector times matrix: `u * gamma`.
    pub fn act(&self, gamma: &[Vec<APoly>], fq: &Fq) -> CongClass {
        let r = self.rank();
        let numerators = (0..r)
            .map(|j| {
                (0..r)
                    .fold(APoly::zero(), |acc, i| {
                        acc.add(&self.numerators[i].mul(&gamma[i][j], fq), fq)
                    })
                    .rem(&self.level, fq)
                    .unwrap()
            })
            .collect();
        CongClass {
            level: self.level.clone(),
            numerators,
        }
    }

    /// Re-express at level `M` (a multiple of the current level).
    pub fn lift_level(&self, m: &APoly, fq: &Fq) -> Result<CongClass> {
        let (k, r) = m.div_rem(&self.level, fq)?;
        if !r.is_zero() {
            return Err(Error::domain("new level is not a multiple of the old one"));
        }
        CongClass::new(
            m.clone(),
            self.numerators.iter().map(|n| n.mul(&k, fq)).collect(),
            fq,
        )
    }
}

/// Size of `(A/N)^r`.
pub fn residue_space_size(n: &APoly, r: usize, fq: &Fq) -> u64 {
    let d = n.degree().unwrap_or(0) as u32;
    fq.q().saturating_pow(d * r as u32)
}

/// Every vector of `(A/N)^r`, in index order.
pub fn all_residue_vectors(n: &APoly, r: usize, fq: &Fq) -> Result<Vec<Vec<APoly>>> {
    let d = n.degree().ok_or_else(|| Error::domain("zero level"))?;
    let per = fq.q().pow(d as u32);
    let total = residue_space_size(n, r, fq);
    if total > ENUMERATION_CAP {
        return Err(Error::Resource(format!("(A/N)^{r} has {total} elements")));
    }
    Ok((0..total)
        .map(|mut idx| {
            let mut v = Vec::with_capacity(r);
            for _ in 0..r {
                v.push(APoly::from_index(idx % per, d, fq));
                idx /= per;
            }
            v.reverse();
            v
        })
        .collect())
}

/// Nonzero classes `T(N) = (N^{-1}A/A)^r \ {0}`.
pub fn nonzero_classes(n: &APoly, r: usize, fq: &Fq) -> Result<Vec<CongClass>> {
    all_residue_vectors(n, r, fq)?
        .into_iter()
        .filter(|v| v.iter().any(|a| !a.is_zero()))
        .map(|v| CongClass::new(n.clone(), v, fq))
        .collect()
}

/// The representative set `S`: monic primitive vectors of `(A/N)^r`, one per `F^*`-orbit.
pub fn primitive_monic_reps(n: &APoly, r: usize, fq: &Fq) -> Result<Vec<Vec<APoly>>> {
    if n.is_constant() || !n.is_monic() {
        return Err(Error::domain("level must be monic of positive degree"));
    }
    if r < 1 {
        return Err(Error::domain("rank must be positive"));
    }
    let mut out: Vec<Vec<APoly>> = all_residue_vectors(n, r, fq)?
        .into_iter()
        .filter(|v| {
            let first = v.iter().find(|a| !a.is_zero());
            first.is_some_and(|a| a.is_monic())
                && v.iter().fold(n.clone(), |g, a| g.gcd(a, fq)).is_one()
        })
        .collect();
    out.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.canonical_cmp(y, fq))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    });
    Ok(out)
}

/// Scale a primitive vector into its monic representative.
pub fn monic_normalize(v: &[APoly], fq: &Fq) -> Vec<APoly> {
    match v.iter().find(|a| !a.is_zero()) {
        None => v.to_vec(),
        Some(a) => {
            let inv = fq.base().inv(a.lead()).unwrap();
            v.iter().map(|x| x.scale(inv, fq)).collect()
        }
    }
}

/// The unit group `(A/N)^*` in canonical order.
pub fn unit_residues(n: &APoly, fq: &Fq) -> Result<Vec<APoly>> {
    let d = n.degree().ok_or_else(|| Error::domain("zero level"))?;
    let total = fq.q().pow(d as u32);
    if total > ENUMERATION_CAP {
        return Err(Error::Resource("unit group too large".into()));
    }
    Ok((0..total)
        .map(|i| APoly::from_index(i, d, fq))
        .filter(|a| !a.is_zero() && a.gcd(n, fq).is_one())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fq(p: u32) -> Fq {
        Fq::new(FqConfig::new(p, 1, 1)).unwrap()
    }

    fn poly(f: &Fq, c: &[u32]) -> APoly {
        APoly::from_ints(f, c).unwrap()
    }

    #[test]
    fn factor_examples() {
        let f2 = fq(2);
        let fac = factor(&poly(&f2, &[0, 1, 1]), &f2).unwrap();
        assert_eq!(fac.unit, Fe::ONE);
        assert_eq!(
            fac.factors,
            vec![(poly(&f2, &[0, 1]), 1), (poly(&f2, &[1, 1]), 1)]
        );

        let fac = factor(&poly(&f2, &[1, 1, 1]), &f2).unwrap();
        assert_eq!(fac.factors, vec![(poly(&f2, &[1, 1, 1]), 1)]);
        // trial division by degree-1 monics confirms irreducibility
        for m in monic_of_degree(1, &f2) {
            assert!(!poly(&f2, &[1, 1, 1]).rem(&m, &f2).unwrap().is_zero());
        }

        let f3 = fq(3);
        let fac = factor(&poly(&f3, &[0, 0, 2]), &f3).unwrap();
        assert_eq!(f3.base().encoding(fac.unit), 2);
        assert_eq!(fac.factors, vec![(poly(&f3, &[0, 1]), 2)]);

        assert!(factor(&APoly::zero(), &f3).is_err());
    }

    #[test]
    fn factor_round_trip_exhaustive() {
        for p in [2u32, 3] {
            let f = fq(p);
            let q = f.q();
            let max_deg = if p == 2 { 6 } else { 5 };
            for idx in 1..q.pow(max_deg + 1) {
                let a = APoly::from_index(idx, max_deg as usize + 1, &f);
                let fac = factor(&a, &f).unwrap();
                assert_eq!(fac.expand(&f), a);
                for (g, _) in &fac.factors {
                    assert!(g.is_monic());
                    // irreducible: no monic divisor of degree <= deg/2
                    let dg = g.degree().unwrap();
                    for d in 1..=dg / 2 {
                        for m in monic_of_degree(d, &f) {
                            assert!(!g.rem(&m, &f).unwrap().is_zero());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn factor_over_f4() {
        let f = Fq::new(FqConfig::new(2, 2, 1)).unwrap();
        for idx in 1..4u64.pow(4) {
            let a = APoly::from_index(idx, 4, &f);
            assert_eq!(factor(&a, &f).unwrap().expand(&f), a);
        }
    }

    #[test]
    fn mobius_examples_and_summation() {
        let f2 = fq(2);
        assert_eq!(mobius(&poly(&f2, &[0, 1]), &f2).unwrap(), -1);
        assert_eq!(mobius(&poly(&f2, &[0, 0, 1]), &f2).unwrap(), 0);
        let f3 = fq(3);
        assert_eq!(mobius(&poly(&f3, &[2]), &f3).unwrap(), 1);
        assert!(mobius(&APoly::zero(), &f3).is_err());
        for f in [fq(2), fq(3)] {
            let q = f.q();
            let lim = if q == 2 { 6 } else { 5 };
            for idx in 1..q.pow(lim) {
                let a = APoly::from_index(idx, lim as usize, &f);
                let s: i32 = monic_divisors(&a, &f)
                    .unwrap()
                    .iter()
                    .map(|b| mobius(b, &f).unwrap())
                    .sum();
                assert_eq!(s, if a.is_constant() { 1 } else { 0 });
            }
        }
    }

    #[test]
    fn divisor_examples() {
        let f2 = fq(2);
        let d = monic_divisors(&poly(&f2, &[0, 0, 1]), &f2).unwrap();
        assert_eq!(
            d,
            vec![poly(&f2, &[1]), poly(&f2, &[0, 1]), poly(&f2, &[0, 0, 1])]
        );
        let d = monic_divisors(&poly(&f2, &[0, 1, 1]), &f2).unwrap();
        assert_eq!(
            d,
            vec![
                poly(&f2, &[1]),
                poly(&f2, &[0, 1]),
                poly(&f2, &[1, 1]),
                poly(&f2, &[0, 1, 1])
            ]
        );
        assert_eq!(
            monic_divisors(&poly(&f2, &[1]), &f2).unwrap(),
            vec![APoly::one()]
        );
    }

    #[test]
    fn primitive_rep_examples() {
        let f3 = fq(3);
        assert_eq!(primitive_monic_reps(&APoly::t(), 2, &f3).unwrap().len(), 4);
        let f2 = fq(2);
        assert_eq!(primitive_monic_reps(&APoly::t(), 3, &f2).unwrap().len(), 7);
        let t2 = poly(&f2, &[0, 0, 1]);
        assert_eq!(primitive_monic_reps(&t2, 2, &f2).unwrap().len(), 12);
        assert!(primitive_monic_reps(&APoly::one(), 2, &f2).is_err());
    }

    #[test]
    fn every_primitive_vector_has_one_rep() {
        let f3 = fq(3);
        let n = poly(&f3, &[1, 0, 1]);
        let reps = primitive_monic_reps(&n, 2, &f3).unwrap();
        for v in all_residue_vectors(&n, 2, &f3).unwrap() {
            let c = CongClass::new(n.clone(), v.clone(), &f3).unwrap();
            if !c.is_primitive(&f3) {
                continue;
            }
            let hits = f3
                .units()
                .iter()
                .filter(|&&u| {
                    let w: Vec<APoly> = v.iter().map(|a| a.scale(u, &f3)).collect();
                    reps.contains(&w)
                })
                .count();
            assert_eq!(hits, 1);
            assert!(reps.contains(&monic_normalize(&v, &f3)));
        }
    }

    #[test]
    fn inverse_mod() {
        let f3 = fq(3);
        let n = poly(&f3, &[1, 0, 1]);
        for a in unit_residues(&n, &f3).unwrap() {
            let inv = a.inv_mod(&n, &f3).unwrap();
            assert!(a.mul_mod(&inv, &n, &f3).is_one());
        }
    }
}
