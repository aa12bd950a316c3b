//! Truncated Laurent series in `u = T^(-1/e)` over `F_{q^m}`.
//!
//! A [`Series`] is a window `sum_{lead <= n < prec} c_n u^n + O(u^prec)`:
//! everything below `prec` is correct, nothing above it is claimed.
//! The valuation is normalized by `v(T) = -1`, so `v(u) = 1/e`.

use std::fmt;
use std::sync::Arc;

use num_rational::Rational64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arithmetic::{APoly, Fq, FqConfig};
use crate::error::{Error, Result};
use crate::field::{encode, Fe, GaloisField};

/// Absolute precision of exact zero.
pub const EXACT: i64 = i64::MAX / 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub base: FqConfig,
    /// Ramification index: `u^e = 1/T`.
    pub e: u32,
}

impl FieldSpec {
    pub fn new(p: u32, s: u32, e: u32, m: u32) -> Self {
        FieldSpec {
            base: FqConfig::new(p, s, m),
            e,
        }
    }

    pub fn m(&self) -> u32 {
        self.base.m
    }
}

/// A fixed field tower together with the working relative precision.
#[derive(Debug)]
pub struct Tower {
    spec: FieldSpec,
    fq: Fq,
    rel_cap: i64,
}

pub type TowerRef = Arc<Tower>;

impl Tower {
    /// `rel_cap` bounds the relative precision any value carries.
    pub fn new(spec: FieldSpec, rel_cap: i64) -> Result<TowerRef> {
        if spec.e == 0 {
            return Err(Error::domain("ramification index must be at least 1"));
        }
        if rel_cap < 1 {
            return Err(Error::domain("working precision must be positive"));
        }
        Ok(Arc::new(Tower {
            spec,
            fq: Fq::new(spec.base)?,
            rel_cap,
        }))
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn fq(&self) -> &Fq {
        &self.fq
    }

    pub fn ext(&self) -> &GaloisField {
        self.fq.ext()
    }

    pub fn e(&self) -> i64 {
        self.spec.e as i64
    }

    pub fn q(&self) -> u64 {
        self.fq.q()
    }

    pub fn rel_cap(&self) -> i64 {
        self.rel_cap
    }

    /// Same tower with a different working precision.
    pub fn with_cap(&self, rel_cap: i64) -> Result<TowerRef> {
        Tower::new(self.spec, rel_cap)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valuation {
    Exact(Rational64),
    /// Zero to the available precision; the valuation is at least this.
    AtLeast(Rational64),
}

impl Valuation {
    pub fn lower_bound(&self) -> Rational64 {
        match *self {
            Valuation::Exact(v) | Valuation::AtLeast(v) => v,
        }
    }
}

#[derive(Clone)]
pub struct Series {
    tower: TowerRef,
    lead: i64,
    prec: i64,
    coeffs: Vec<Fe>,
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ext = self.tower.ext();
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}*u^{}", ext.encoding(c), self.lead + i as i64)?;
        }
        if first {
            write!(f, "0")?;
        }
        if self.prec < EXACT {
            write!(f, " + O(u^{})", self.prec)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked binary arithmetic on series of the same tower.
pub fn series_arith(x: &Series, y: &Series, op: ArithOp) -> Result<Series> {
    x.same_tower(y)?;
    match op {
        ArithOp::Add => Ok(x.add(y)),
        ArithOp::Sub => Ok(x.sub(y)),
        ArithOp::Mul => Ok(x.mul(y)),
        ArithOp::Div => x.div(y),
    }
}

impl Series {
    fn build(tower: &TowerRef, lead: i64, prec: i64, coeffs: Vec<Fe>) -> Series {
        let mut s = Series {
            tower: tower.clone(),
            lead,
            prec,
            coeffs,
        };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        let cap = self.tower.rel_cap;
        let skip = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if skip == self.coeffs.len() {
            self.coeffs.clear();
            self.lead = self.prec;
            return;
        }
        self.coeffs.drain(..skip);
        self.lead += skip as i64;
        if self.prec - self.lead > cap {
            self.prec = self.lead + cap;
        }
        self.coeffs.truncate((self.prec - self.lead) as usize);
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn tower(&self) -> &TowerRef {
        &self.tower
    }

    pub fn same_tower(&self, o: &Series) -> Result<()> {
        if Arc::ptr_eq(&self.tower, &o.tower) || self.tower.spec == o.tower.spec {
            Ok(())
        } else {
            Err(Error::SpecMismatch)
        }
    }

    /// Exact zero.
    pub fn zero(tower: &TowerRef) -> Series {
        Series {
            tower: tower.clone(),
            lead: EXACT,
            prec: EXACT,
            coeffs: Vec::new(),
        }
    }

    /// Zero known to absolute precision `prec`.
    pub fn zero_to(tower: &TowerRef, prec: i64) -> Series {
        Series {
            tower: tower.clone(),
            lead: prec,
            prec,
            coeffs: Vec::new(),
        }
    }

    /// `c * u^n` at working precision.
    pub fn monomial(tower: &TowerRef, c: Fe, n: i64) -> Series {
        if c.is_zero() {
            return Series::zero(tower);
        }
        Series::build(tower, n, n + tower.rel_cap, vec![c])
    }

    pub fn one(tower: &TowerRef) -> Series {
        Series::monomial(tower, Fe::ONE, 0)
    }

    /// `u^n`, i.e. `T^(-n/e)`.
    pub fn u_pow(tower: &TowerRef, n: i64) -> Series {
        Series::monomial(tower, Fe::ONE, n)
    }

    /// `T^(a/e)`.
    pub fn t_frac(tower: &TowerRef, a: i64) -> Series {
        Series::u_pow(tower, -a)
    }

    pub fn constant(tower: &TowerRef, c: Fe) -> Series {
        Series::monomial(tower, c, 0)
    }

    /// Image of `F_q` in the coefficient field.
    pub fn from_base(tower: &TowerRef, c: Fe) -> Series {
        Series::constant(tower, tower.fq.embed(c))
    }

    /// Embed an element of `A` (`T = u^-e`) at working precision.
    pub fn from_apoly(tower: &TowerRef, a: &APoly) -> Series {
        let Some(d) = a.degree() else {
            return Series::zero(tower);
        };
        let e = tower.e();
        let lead = -(d as i64) * e;
        let n = (d as i64 * e + 1) as usize;
        let mut coeffs = vec![Fe::ZERO; n];
        for (i, &c) in a.coeffs().iter().enumerate() {
            coeffs[((d - i) as i64 * e) as usize] = tower.fq.embed(c);
        }
        Series::build(tower, lead, lead + tower.rel_cap, coeffs)
    }

    /// Coefficients given explicitly for `u^lead, u^(lead+1), ...`.
    pub fn from_coeffs(tower: &TowerRef, lead: i64, prec: i64, coeffs: Vec<Fe>) -> Result<Series> {
        if prec < lead || coeffs.len() as i64 > prec - lead {
            return Err(Error::domain("coefficient window exceeds precision"));
        }
        Ok(Series::build(tower, lead, prec, coeffs))
    }

    /// A series with random coefficients on `[lead, prec)` and a nonzero leading term.
    pub fn random<R: Rng>(tower: &TowerRef, lead: i64, prec: i64, rng: &mut R) -> Series {
        let order = tower.ext().order();
        let mut coeffs: Vec<Fe> = (lead..prec)
            .map(|_| tower.ext().from_encoding(rng.gen_range(0..order)).unwrap())
            .collect();
        if let Some(c) = coeffs.first_mut() {
            if c.is_zero() {
                *c = Fe::ONE;
            }
        }
        Series::build(tower, lead, prec, coeffs)
    }

    /// Lowest exponent carried (equals `prec` for a zero).
    pub fn lead(&self) -> i64 {
        self.lead
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Number of correct digits after the leading one.
    pub fn rel_prec(&self) -> i64 {
        self.prec - self.lead
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    /// Coefficient of `u^n` (`n < prec`).
    pub fn coeff(&self, n: i64) -> Fe {
        if n < self.lead {
            return Fe::ZERO;
        }
        self.coeffs
            .get((n - self.lead) as usize)
            .copied()
            .unwrap_or(Fe::ZERO)
    }

    pub fn leading_coeff(&self) -> Fe {
        self.coeffs.first().copied().unwrap_or(Fe::ZERO)
    }

    /// Zero to the available precision.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.is_zero() && self.prec >= EXACT
    }

    pub fn valuation(&self) -> Valuation {
        let r = Rational64::new(self.lead, self.tower.e());
        if self.is_zero() {
            Valuation::AtLeast(Rational64::new(self.prec.min(EXACT), self.tower.e()))
        } else {
            Valuation::Exact(r)
        }
    }

    /// Lower the absolute precision to `prec`.
    pub fn truncate(&self, prec: i64) -> Series {
        if prec >= self.prec {
            return self.clone();
        }
        let keep = (prec - self.lead).max(0) as usize;
        let coeffs = self.coeffs.iter().take(keep).copied().collect();
        Series::build(&self.tower, self.lead.min(prec), prec, coeffs)
    }

    /// Raise the working-precision claim to `prec` by padding with zeros. Only
    /// valid when the value is known to be exact (a polynomial in `u`).
    pub fn assume_exact_to(&self, prec: i64) -> Series {
        let mut s = self.clone();
        if prec > s.prec {
            s.prec = prec;
            if s.coeffs.is_empty() {
                s.lead = prec;
            }
        }
        s.normalize();
        s
    }

    pub fn neg(&self) -> Series {
        let ext = self.tower.ext();
        Series {
            tower: self.tower.clone(),
            lead: self.lead,
            prec: self.prec,
            coeffs: self.coeffs.iter().map(|&c| ext.neg(c)).collect(),
        }
    }

    pub fn add(&self, o: &Series) -> Series {
        debug_assert!(self.same_tower(o).is_ok());
        if o.is_exact_zero() {
            return self.clone();
        }
        if self.is_exact_zero() {
            return o.clone();
        }
        let ext = self.tower.ext();
        let prec = self.prec.min(o.prec);
        let lead = self.lead.min(o.lead).min(prec);
        let n = (prec - lead) as usize;
        let mut coeffs = vec![Fe::ZERO; n];
        for s in [self, o] {
            let off = (s.lead - lead) as usize;
            for (i, &c) in s.coeffs.iter().enumerate() {
                if off + i >= n {
                    break;
                }
                coeffs[off + i] = ext.add(coeffs[off + i], c);
            }
        }
        Series::build(&self.tower, lead, prec, coeffs)
    }

    pub fn sub(&self, o: &Series) -> Series {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Series) -> Series {
        debug_assert!(self.same_tower(o).is_ok());
        if self.is_exact_zero() || o.is_exact_zero() {
            return Series::zero(&self.tower);
        }
        let ext = self.tower.ext();
        let lead = self.lead + o.lead;
        let prec = (self.lead + o.prec).min(o.lead + self.prec);
        let n = (prec - lead).max(0) as usize;
        let mut coeffs = vec![Fe::ZERO; n];
        for (i, &a) in self.coeffs.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate().take(n - i) {
                coeffs[i + j] = ext.add(coeffs[i + j], ext.mul(a, b));
            }
        }
        Series::build(&self.tower, lead, prec, coeffs)
    }

    /// Multiply by a coefficient-field scalar.
    pub fn scale(&self, c: Fe) -> Series {
        if c.is_zero() {
            return Series::zero_to(&self.tower, self.prec).min_exact(self);
        }
        let ext = self.tower.ext();
        let coeffs = self.coeffs.iter().map(|&a| ext.mul(a, c)).collect();
        Series::build(&self.tower, self.lead, self.prec, coeffs)
    }

    fn min_exact(self, src: &Series) -> Series {
        if src.is_exact_zero() {
            Series::zero(&src.tower)
        } else {
            self
        }
    }

    /// Multiply by `u^n`.
    pub fn shift(&self, n: i64) -> Series {
        if self.is_exact_zero() {
            return self.clone();
        }
        Series {
            tower: self.tower.clone(),
            lead: self.lead + n,
            prec: self.prec + n,
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn inv(&self) -> Result<Series> {
        if self.is_zero() {
            return Err(Error::precision(format!(
                "inverse of a series indistinguishable from zero (O(u^{}))",
                self.prec
            )));
        }
        let ext = self.tower.ext();
        let n = self.rel_prec() as usize;
        let a0inv = ext.inv(self.coeffs[0])?;
        let mut out = vec![Fe::ZERO; n];
        out[0] = a0inv;
        for k in 1..n {
            let mut s = Fe::ZERO;
            for j in 1..=k.min(self.coeffs.len() - 1) {
                s = ext.add(s, ext.mul(self.coeffs[j], out[k - j]));
            }
            out[k] = ext.neg(ext.mul(s, a0inv));
        }
        Ok(Series::build(
            &self.tower,
            -self.lead,
            -self.lead + n as i64,
            out,
        ))
    }

    pub fn div(&self, o: &Series) -> Result<Series> {
        Ok(self.mul(&o.inv()?))
    }

    /// `self^n` for any integer `n` (negative powers need a nonzero base).
    pub fn pow(&self, n: i64) -> Result<Series> {
        if n < 0 {
            return self.inv()?.pow(-n);
        }
        let mut acc = Series::one(&self.tower);
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// `self^(q^i)`, computed by coefficient Frobenius and exponent scaling.
    pub fn frobenius_pow(&self, i: u32) -> Result<Series> {
        if self.is_exact_zero() || i == 0 {
            return Ok(self.clone());
        }
        let q = self.tower.q() as i64;
        let f = q
            .checked_pow(i)
            .ok_or_else(|| Error::Resource(format!("q^{i} overflows")))?;
        let overflow = || Error::Resource("valuation exponent overflow".into());
        let lead = self.lead.checked_mul(f).ok_or_else(overflow)?;
        let prec = self.prec.checked_mul(f).ok_or_else(overflow)?.min(EXACT);
        let ext = self.tower.ext();
        let k = self.tower.spec.base.s * i;
        let cap = prec
            .checked_sub(lead)
            .ok_or_else(overflow)?
            .min(self.tower.rel_cap) as usize;
        let mut coeffs = vec![Fe::ZERO; cap];
        for (j, &c) in self.coeffs.iter().enumerate() {
            let idx = j * f as usize;
            if idx >= cap {
                break;
            }
            coeffs[idx] = ext.frobenius(c, k);
        }
        Ok(Series::build(&self.tower, lead, prec, coeffs))
    }

    /// `v(self - o) >= p / e`; errors if either operand is not known to `p`.
    pub fn approx_equal(&self, o: &Series, p: i64) -> Result<bool> {
        self.same_tower(o)?;
        if self.prec < p || o.prec < p {
            return Err(Error::precision(format!(
                "comparison at u^{p} needs precision {p}, have {} and {}",
                self.prec, o.prec
            )));
        }
        Ok(self.sub(o).lead >= p)
    }

    /// Relative agreement: `v(self - o) - v(o) >= p / e`.
    pub fn rel_equal(&self, o: &Series, p: i64) -> Result<bool> {
        if o.is_zero() {
            return self.approx_equal(o, p);
        }
        let shift = o.lead;
        self.shift(-shift).approx_equal(&o.shift(-shift), p)
    }

    pub fn to_json(&self) -> SeriesJson {
        let ext = self.tower.ext();
        SeriesJson {
            e: self.tower.spec.e,
            m: self.tower.spec.m(),
            lead: self.lead,
            prec: self.prec,
            coeffs: self.coeffs.iter().map(|&c| ext.to_digits(c)).collect(),
        }
    }

    pub fn from_json(tower: &TowerRef, j: &SeriesJson) -> Result<Series> {
        if j.e != tower.spec.e || j.m != tower.spec.m() {
            return Err(Error::SpecMismatch);
        }
        let ext = tower.ext();
        let coeffs = j
            .coeffs
            .iter()
            .map(|d| ext.from_digits(d))
            .collect::<Result<Vec<_>>>()?;
        if j.prec < j.lead || coeffs.len() as i64 > j.prec - j.lead {
            return Err(Error::Parse("series window inconsistent".into()));
        }
        Ok(Series {
            tower: tower.clone(),
            lead: j.lead,
            prec: j.prec,
            coeffs,
        }
        .renormalized())
    }

    fn renormalized(mut self) -> Series {
        self.normalize();
        self
    }

    /// Encoded coefficients, useful as a hashable fingerprint.
    pub fn fingerprint(&self) -> (i64, i64, Vec<u32>) {
        let p = self.tower.spec.base.p;
        let ext = self.tower.ext();
        (
            self.lead,
            self.prec,
            self.coeffs
                .iter()
                .map(|&c| encode(&ext.to_digits(c), p))
                .collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub e: u32,
    pub m: u32,
    pub lead: i64,
    pub prec: i64,
    pub coeffs: Vec<Vec<u32>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tower(p: u32, e: u32, m: u32) -> TowerRef {
        Tower::new(FieldSpec::new(p, 1, e, m), 40).unwrap()
    }

    #[test]
    fn inverse_examples() {
        let t = tower(3, 2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = Series::random(&t, -3, 20, &mut rng);
        let y = x.mul(&x.inv().unwrap());
        assert!(y.approx_equal(&Series::one(&t), y.prec()).unwrap());
        assert_eq!(y.prec(), 23);

        let tt = Series::from_apoly(&t, &APoly::t());
        let ti = Series::u_pow(&t, 2);
        assert!(tt.mul(&ti).approx_equal(&Series::one(&t), 40).unwrap());
    }

    #[test]
    fn characteristic_two_cancels() {
        let t = tower(2, 1, 1);
        let u = Series::u_pow(&t, 1);
        let u2 = Series::u_pow(&t, 2);
        let s = u.add(&u2).add(&u.sub(&u2));
        assert!(s.is_zero());
    }

    #[test]
    fn valuation_examples() {
        let t = tower(2, 2, 1);
        let tt = Series::from_apoly(&t, &APoly::t());
        assert_eq!(
            tt.valuation(),
            Valuation::Exact(Rational64::from_integer(-1))
        );
        assert_eq!(
            Series::one(&t).valuation(),
            Valuation::Exact(Rational64::from_integer(0))
        );
        assert_eq!(
            Series::u_pow(&t, 1).valuation(),
            Valuation::Exact(Rational64::new(1, 2))
        );
        assert_eq!(
            Series::zero_to(&t, 6).valuation(),
            Valuation::AtLeast(Rational64::from_integer(3))
        );
    }

    #[test]
    fn frobenius_examples() {
        let t = tower(2, 1, 1);
        let tt = Series::from_apoly(&t, &APoly::t());
        let t2 = Series::from_apoly(&t, &APoly::t().mul(&APoly::t(), t.fq()));
        assert!(tt.frobenius_pow(1).unwrap().approx_equal(&t2, 30).unwrap());
    }

    #[test]
    fn approx_equal_threshold() {
        let t = tower(2, 1, 1);
        let x = Series::u_pow(&t, 3);
        let z = Series::zero(&t);
        assert!(x.approx_equal(&z, 3).unwrap());
        assert!(!x.approx_equal(&z, 4).unwrap());
        assert!(x.truncate(5).approx_equal(&z, 6).is_err());
    }

    #[test]
    fn apoly_embedding() {
        let t = tower(3, 2, 1);
        let fq = t.fq();
        let a = APoly::from_ints(fq, &[1, 2, 1]).unwrap();
        let s = Series::from_apoly(&t, &a);
        assert_eq!(s.lead(), -4);
        assert_eq!(t.ext().encoding(s.coeff(-4)), 1);
        assert_eq!(t.ext().encoding(s.coeff(-2)), 2);
        assert_eq!(t.ext().encoding(s.coeff(0)), 1);
        assert!(s.coeff(-3).is_zero());
    }

    #[test]
    fn json_round_trip() {
        let t = tower(3, 2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = Series::random(&t, -5, 12, &mut rng);
        let j = x.to_json();
        let y = Series::from_json(&t, &j).unwrap();
        assert_eq!(x.fingerprint(), y.fingerprint());
        let s = serde_json::to_string(&j).unwrap();
        let back: SeriesJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back, j);
        let other = tower(3, 1, 2);
        assert_eq!(
            Series::from_json(&other, &j).unwrap_err(),
            Error::SpecMismatch
        );
    }
}
