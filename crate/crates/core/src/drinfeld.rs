//! Exponential coefficients, the Drinfeld module `φ^Λ`, division values and
//! Goss polynomials.
//!
//! Sign conventions used throughout, with `E_0 = -1` and `α_0 = 1`:
//!
//! ```text
//! Σ_{i+j=n} α_i E_{q^j-1}^(q^i) = -δ_{n,0}
//! e_Λ(Tz) = φ_T(e_Λ(z)),   φ_T = T X + g_1 X^q + ... + g_r X^(q^r)
//! G_1 = X,  G_k = X (G_{k-1} + α_1 G_{k-q} + α_2 G_{k-q^2} + ...)
//! ```

use serde::Serialize;

use crate::arithmetic::{nonzero_classes, APoly, CongClass};
use crate::eisenstein::Prepared;
use crate::error::{Error, Result};
use crate::expo::{fq_basis, shifted_power_sums};
use crate::lattice::LatticeFrame;
use crate::series::{Series, SeriesJson, TowerRef};

/// `Σ c_i X^(q^i)`.
#[derive(Clone, Debug)]
pub struct AdditivePoly {
    pub coeffs: Vec<Series>,
}

impl AdditivePoly {
    pub fn constant(tower: &TowerRef, c: &APoly) -> Self {
        AdditivePoly {
            coeffs: vec![Series::from_apoly(tower, c)],
        }
    }

    pub fn q_degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn add(&self, o: &AdditivePoly) -> AdditivePoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let tower = self.coeffs[0].tower();
        let coeffs = (0..n)
            .map(|i| match (self.coeffs.get(i), o.coeffs.get(i)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) | (None, Some(a)) => a.clone(),
                (None, None) => Series::zero(tower),
            })
            .collect();
        AdditivePoly { coeffs }
    }

    /// `self ∘ o`: `(a ∘ b)_k = Σ_{i+j=k} a_i b_j^(q^i)`.
    pub fn compose(&self, o: &AdditivePoly) -> Result<AdditivePoly> {
        let tower = self.coeffs[0].tower();
        let mut out = vec![Series::zero(tower); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(&b.frobenius_pow(i as u32)?));
            }
        }
        Ok(AdditivePoly { coeffs: out })
    }

    /// The terms `c_i x^(q^i)`.
    pub fn terms(&self, x: &Series) -> Result<Vec<Series>> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| Ok(c.mul(&x.frobenius_pow(i as u32)?)))
            .collect()
    }

    pub fn eval(&self, x: &Series) -> Result<Series> {
        let tower = x.tower().clone();
        Ok(self
            .terms(x)?
            .iter()
            .fold(Series::zero(&tower), |a, t| a.add(t)))
    }

    /// Ordinary coefficients in `X`, indexed by exponent.
    pub fn dense(&self, q: u64) -> Vec<Series> {
        let tower = self.coeffs[0].tower();
        let top = q.pow(self.q_degree() as u32) as usize;
        let mut out = vec![Series::zero(tower); top + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[q.pow(i as u32) as usize] = c.clone();
        }
        out
    }

    pub fn to_json(&self) -> Vec<SeriesJson> {
        self.coeffs.iter().map(Series::to_json).collect()
    }
}

/// Whether a sum vanishes to `p` digits relative to its largest term.
pub fn sum_vanishes(terms: &[Series], p: i64) -> Result<bool> {
    let scale = terms
        .iter()
        .filter(|t| !t.is_zero())
        .map(Series::lead)
        .min()
        .ok_or_else(|| Error::precision("every term vanishes to precision"))?;
    let tower = terms[0].tower().clone();
    let s = terms.iter().fold(Series::zero(&tower), |a, t| a.add(t));
    if s.prec() < scale + p {
        return Err(Error::precision(format!(
            "sum known to {} digits, {p} requested",
            s.prec() - scale
        )));
    }
    Ok(s.is_zero() || s.lead() >= scale + p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExpMethod {
    Product,
    Eisenstein,
}

#[derive(Clone, Debug)]
pub struct ExpCoeffs {
    pub alphas: Vec<Series>,
    pub method: ExpMethod,
    /// Largest `T`-degree of lattice vectors used.
    pub d_used: i64,
}

impl ExpCoeffs {
    pub fn n(&self) -> usize {
        self.alphas.len() - 1
    }
}

fn certify_all(xs: &[Series], p: i64, what: &str) -> Result<()> {
    for (i, x) in xs.iter().enumerate() {
        if !x.is_exact_zero() && (x.is_zero() || x.rel_prec() < p) {
            return Err(Error::Resource(format!(
                "{what}_{i} not reachable to {p} digits at this working precision"
            )));
        }
    }
    Ok(())
}

/// `α_0, ..., α_n` of `e_Λ`.
///
/// `Product` adjoins basis vectors to the exponential of a growing subspace.
/// `Eisenstein` solves the triangular system above, with `E_{q^j-1}` taken from
/// the `T`-division values by `(T^k - 1) E_k = Σ_{u ≠ 0} E_{k,u}`, where each
/// `E_{k,u}` needs only the `α_i` already found.
pub fn exp_coeffs(frame: &LatticeFrame, n: usize, method: ExpMethod, p: i64) -> Result<ExpCoeffs> {
    let prep = Prepared::new(frame)?;
    let out = match method {
        ExpMethod::Product => {
            let out = prep.exp(n, &[])?;
            ExpCoeffs {
                alphas: out.alphas,
                method,
                d_used: out.d_used,
            }
        }
        ExpMethod::Eisenstein => exp_coeffs_eisenstein(&prep, n)?,
    };
    certify_all(&out.alphas, p, "alpha")?;
    Ok(out)
}

fn exp_coeffs_eisenstein(prep: &Prepared, n: usize) -> Result<ExpCoeffs> {
    let tower = prep.tower().clone();
    let fq = tower.fq();
    let q = tower.q();
    let t = APoly::t();
    let classes = nonzero_classes(&t, prep.rank(), fq)?;
    let points: Vec<Series> = classes
        .iter()
        .map(|u| prep.point(&prep.reduce_class(u)))
        .collect::<Result<_>>()?;
    let out = prep.exp(0, &points)?;
    let mut alphas = vec![Series::one(&tower)];
    let mut es: Vec<Series> = Vec::new();
    for m in 1..=n {
        let k = q.pow(m as u32) - 1;
        let mut sum = Series::zero(&tower);
        for y in &out.values {
            let s = shifted_power_sums(y, &alphas, q, k as usize)?;
            sum = sum.add(&s[k as usize - 1]);
        }
        let den = Series::from_apoly(&tower, &t.pow(k as u32, fq).sub(&APoly::one(), fq));
        es.push(sum.div(&den)?);
        let mut a = Series::zero(&tower);
        for (i, ai) in alphas.iter().enumerate() {
            a = a.add(&ai.mul(&es[m - i - 1].frobenius_pow(i as u32)?));
        }
        alphas.push(a);
    }
    Ok(ExpCoeffs {
        alphas,
        method: ExpMethod::Eisenstein,
        d_used: out.d_used,
    })
}

/// `φ_T` together with the exponential coefficients that produced it.
#[derive(Clone, Debug)]
pub struct DrinfeldModule {
    pub phi_t: AdditivePoly,
    pub exp: ExpCoeffs,
}

impl DrinfeldModule {
    pub fn rank(&self) -> usize {
        self.phi_t.q_degree()
    }

    /// `α_k T^(q^k) - Σ_{i=0}^{r} g_i α_{k-i}^(q^i)` as a list of terms, for
    /// `k = 1..=n`; each list sums to zero.
    pub fn residual_terms(&self) -> Result<Vec<Vec<Series>>> {
        let tower = self.phi_t.coeffs[0].tower().clone();
        let q = tower.q();
        let a = &self.exp.alphas;
        let mut out = Vec::new();
        for k in 1..a.len() {
            let tq = Series::from_apoly(&tower, &APoly::t()).pow(q.pow(k as u32) as i64)?;
            let mut terms = vec![a[k].mul(&tq)];
            for (i, g) in self.phi_t.coeffs.iter().enumerate().take(k + 1) {
                terms.push(g.mul(&a[k - i].frobenius_pow(i as u32)?).neg());
            }
            out.push(terms);
        }
        Ok(out)
    }
}

/// `φ_T = T X + g_1 X^q + ... + g_r X^(q^r)`.
///
/// `g_k = α_k (T^(q^k) - T) - Σ_{i=1}^{k-1} g_i α_{k-i}^(q^i)`; `α` runs to
/// `r + 1` so that one extra coefficient of the functional equation is checked.
pub fn drinfeld_coeffs(frame: &LatticeFrame, p: i64) -> Result<DrinfeldModule> {
    let tower = frame.tower().clone();
    let fq = tower.fq();
    let q = tower.q();
    let r = frame.rank();
    let exp = exp_coeffs(frame, r + 1, ExpMethod::Product, p)?;
    let a = &exp.alphas;
    let mut g = vec![Series::from_apoly(&tower, &APoly::t())];
    for k in 1..=r {
        let tq = APoly::t()
            .pow(q.pow(k as u32) as u32, fq)
            .sub(&APoly::t(), fq);
        let mut gk = a[k].mul(&Series::from_apoly(&tower, &tq));
        for i in 1..k {
            gk = gk.sub(&g[i].mul(&a[k - i].frobenius_pow(i as u32)?));
        }
        g.push(gk);
    }
    if g[r].is_zero() {
        return Err(Error::precision(
            "g_r vanishes to precision: frame is degenerate",
        ));
    }
    let m = DrinfeldModule {
        phi_t: AdditivePoly { coeffs: g },
        exp,
    };
    for (k, terms) in m.residual_terms()?.iter().enumerate() {
        if !sum_vanishes(terms, p)? {
            return Err(Error::precision(format!(
                "functional equation fails at z^(q^{})",
                k + 1
            )));
        }
    }
    Ok(m)
}

/// `φ_N` by Horner's rule in `φ_T`.
pub fn division_poly(phi_t: &AdditivePoly, n: &APoly) -> Result<AdditivePoly> {
    if n.is_zero() {
        return Err(Error::domain("N must be nonzero"));
    }
    let tower = phi_t.coeffs[0].tower().clone();
    let d = n.degree().unwrap();
    let mut acc = AdditivePoly::constant(&tower, &APoly::constant(n.coeff(d)));
    for i in (0..d).rev() {
        acc = acc.compose(phi_t)?.add(&AdditivePoly::constant(
            &tower,
            &APoly::constant(n.coeff(i)),
        ));
    }
    Ok(acc)
}

#[derive(Clone, Debug)]
pub struct DivisionPoint {
    pub class: CongClass,
    pub value: Series,
    /// Number of exponential coefficients summed.
    pub terms: usize,
}

/// `d_u = e_ω(uω)` from the truncated series `Σ_{i <= I} α_i (uω)^(q^i)`.
///
/// With `b_1, b_2, ...` an `F_q`-basis of `Λ` by increasing norm,
/// `v(α_i) >= -Σ_{j<=i} (q-1) q^(j-1) v(b_j)`, which fixes `I`.
pub fn division_points(
    frame: &LatticeFrame,
    us: &[CongClass],
    p: i64,
) -> Result<Vec<DivisionPoint>> {
    let prep = Prepared::new(frame)?;
    let tower = prep.tower().clone();
    let q = tower.q() as i128;
    let mut zs = Vec::with_capacity(us.len());
    for u in us {
        if u.is_zero() {
            return Err(Error::domain("u must be a nonzero class"));
        }
        zs.push(prep.point(&prep.reduce_class(u))?);
    }
    let basis = fq_basis(&prep.smb.frame, 64);
    let mut needed = 0usize;
    for z in &zs {
        let lz = z.lead() as i128;
        let target = lz + (p + 16) as i128;
        let mut bound: i128 = 0;
        let mut prev = i128::MIN;
        let mut i = 0usize;
        loop {
            let term = bound + q.pow(i as u32) * lz;
            if term >= target && term > prev && i > 0 {
                break;
            }
            prev = term;
            i += 1;
            let b = basis.get(i - 1).ok_or_else(|| {
                Error::Resource("division series does not converge fast enough".into())
            })?;
            bound -= (q - 1) * q.pow(i as u32 - 1) * b.2.lead() as i128;
            if i > 40 {
                return Err(Error::Resource(
                    "division series does not converge fast enough".into(),
                ));
            }
        }
        needed = needed.max(i);
    }
    let alphas = prep.exp(needed, &[])?.alphas;
    us.iter()
        .zip(&zs)
        .map(|(u, z)| {
            let poly = AdditivePoly {
                coeffs: alphas[..needed].to_vec(),
            };
            Ok(DivisionPoint {
                class: u.clone(),
                value: poly.eval(z)?,
                terms: needed,
            })
        })
        .collect()
}

/// `G_k(X) = Σ a_j X^j`, stored densely by exponent.
#[derive(Clone, Debug)]
pub struct GossPoly {
    pub k: usize,
    pub coeffs: Vec<Series>,
}

impl GossPoly {
    pub fn eval(&self, x: &Series) -> Series {
        let tower = x.tower().clone();
        self.coeffs
            .iter()
            .rev()
            .fold(Series::zero(&tower), |acc, c| acc.mul(x).add(c))
    }

    pub fn to_json(&self) -> Vec<SeriesJson> {
        self.coeffs.iter().map(Series::to_json).collect()
    }
}

/// `G_1, ..., G_kmax` from the recursion, given enough `α_i` (those with `q^i < kmax`).
pub fn goss_polys(alphas: &[Series], q: u64, kmax: usize) -> Result<Vec<GossPoly>> {
    let tower = alphas[0].tower().clone();
    let need = crate::expo::alphas_up_to(q, kmax.saturating_sub(1) as u64);
    if alphas.len() < need {
        return Err(Error::domain("not enough exponential coefficients"));
    }
    let mut gs: Vec<Vec<Series>> = vec![vec![Series::zero(&tower)]];
    for k in 1..=kmax {
        let mut inner = vec![Series::zero(&tower); k];
        if k == 1 {
            inner[0] = Series::one(&tower);
        }
        let mut qi = 1u64;
        for a in alphas {
            if qi as usize > k - 1 || (k == 1) {
                break;
            }
            let prev = &gs[k - qi as usize];
            for (j, c) in prev.iter().enumerate() {
                if !c.is_exact_zero() {
                    inner[j] = inner[j].add(&a.mul(c));
                }
            }
            qi *= q;
        }
        let mut g = vec![Series::zero(&tower)];
        g.extend(inner);
        gs.push(g);
    }
    Ok(gs
        .into_iter()
        .enumerate()
        .skip(1)
        .map(|(k, coeffs)| GossPoly { k, coeffs })
        .collect())
}

/// `G_{k,Λ}` for the lattice spanned by `frame`.
pub fn goss_poly(frame: &LatticeFrame, k: usize, p: i64) -> Result<GossPoly> {
    if k == 0 {
        return Err(Error::domain("k must be positive"));
    }
    let q = frame.tower().q();
    let n = crate::expo::alphas_up_to(q, k.saturating_sub(1) as u64).max(1) - 1;
    let exp = exp_coeffs(frame, n, ExpMethod::Product, p)?;
    Ok(goss_polys(&exp.alphas, q, k)?.pop().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eisenstein::Prepared;
    use crate::lattice::Builtin;
    use crate::series::{FieldSpec, Tower};

    fn tower(q: u32, e: u32, cap: i64) -> TowerRef {
        Tower::new(FieldSpec::new(q, 1, e, 1), cap).unwrap()
    }

    #[test]
    fn two_routes_agree() {
        for (q, b, e) in [
            (2, Builtin::Carlitz, 1),
            (3, Builtin::Carlitz, 1),
            (2, Builtin::Rank2Sqrt, 2),
        ] {
            let t = tower(q, e, 64);
            let f = b.frame(&t).unwrap();
            let x = exp_coeffs(&f, 2, ExpMethod::Product, 40).unwrap();
            let y = exp_coeffs(&f, 2, ExpMethod::Eisenstein, 40).unwrap();
            assert!(
                x.alphas[0].is_exact_zero()
                    || x.alphas[0].approx_equal(&Series::one(&t), 40).unwrap()
            );
            for (a, b) in x.alphas.iter().zip(&y.alphas) {
                assert!(a.rel_equal(b, 40).unwrap(), "q={q} {}", b.rel_prec());
            }
        }
    }

    #[test]
    fn carlitz_module() {
        let t = tower(2, 1, 64);
        let m = drinfeld_coeffs(&Builtin::Carlitz.frame(&t).unwrap(), 40).unwrap();
        let f = Builtin::Carlitz.frame(&t).unwrap();
        let e1 = crate::eisenstein::eisenstein_full(&f, 1, 40).unwrap().value;
        let tq = Series::from_apoly(&t, &APoly::t().pow(2, t.fq()).sub(&APoly::t(), t.fq()));
        assert!(m.phi_t.coeffs[1].rel_equal(&tq.mul(&e1), 40).unwrap());
        let phi2 = division_poly(&m.phi_t, &APoly::t().pow(2, t.fq())).unwrap();
        let comp = m.phi_t.compose(&m.phi_t).unwrap();
        for (a, b) in phi2.coeffs.iter().zip(&comp.coeffs) {
            assert!(a.rel_equal(b, 40).unwrap());
        }
    }

    #[test]
    fn division_values_are_roots() {
        let t = tower(2, 2, 64);
        let fq = t.fq();
        let f = Builtin::Rank2Sqrt.frame(&t).unwrap();
        let m = drinfeld_coeffs(&f, 40).unwrap();
        let n = APoly::t();
        let phi = division_poly(&m.phi_t, &n).unwrap();
        let us = nonzero_classes(&n, 2, fq).unwrap();
        let ds = division_points(&f, &us, 40).unwrap();
        let prep = Prepared::new(&f).unwrap();
        let es = prep.partial_values(1, &us).unwrap();
        for (d, e) in ds.iter().zip(&es) {
            assert!(sum_vanishes(&phi.terms(&d.value).unwrap(), 36).unwrap());
            assert!(d
                .value
                .mul(&e[0].value)
                .rel_equal(&Series::one(&t), 36)
                .unwrap());
        }
    }

    #[test]
    fn goss_matches_generating_series() {
        for q in [2u32, 3] {
            let t = tower(q, 2, 48);
            let fq = t.fq();
            let f = Builtin::Rank2Sqrt.frame(&t).unwrap();
            let gs = goss_polys(
                &exp_coeffs(&f, 2, ExpMethod::Product, 30).unwrap().alphas,
                q as u64,
                7,
            )
            .unwrap();
            for (k, g) in gs.iter().enumerate().take(q as usize) {
                assert!(g.coeffs[..=k].iter().all(Series::is_exact_zero));
                assert!(g.coeffs[k + 1].approx_equal(&Series::one(&t), 30).unwrap());
            }
            let us = nonzero_classes(&APoly::t(), 2, fq).unwrap();
            let vals = Prepared::new(&f).unwrap().partial_values(7, &us).unwrap();
            for v in vals {
                for k in 1..=7 {
                    let lhs = gs[k - 1].eval(&v[0].value);
                    assert!(lhs.rel_equal(&v[k - 1].value, 24).unwrap(), "q={q} k={k}");
                }
            }
        }
    }
}
