//! A-lattices `Λ = A ω_1 + ... + A ω_r` inside the series field.
//!
//! Orthogonality of a basis is read off leading coefficients: a combination
//! `Σ a_i ω_i` can only lose norm when some leading terms line up on the
//! same exponent, which forces those `ω_i` into one residue class of `lead`
//! mod `e` with `F_q`-dependent leading coefficients. Reduction removes such
//! dependencies one at a time.

use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arithmetic::{APoly, Fq};
use crate::error::{Error, Result};
use crate::field::Fe;
use crate::series::{Series, SeriesJson, TowerRef};

#[derive(Clone, Debug)]
pub struct LatticeFrame {
    omegas: Vec<Series>,
}

impl LatticeFrame {
    pub fn new(omegas: Vec<Series>) -> Result<Self> {
        let first = omegas
            .first()
            .ok_or_else(|| Error::domain("a frame needs rank >= 1"))?;
        for w in &omegas {
            first.same_tower(w)?;
        }
        Ok(LatticeFrame { omegas })
    }

    pub fn omegas(&self) -> &[Series] {
        &self.omegas
    }

    pub fn rank(&self) -> usize {
        self.omegas.len()
    }

    pub fn tower(&self) -> &TowerRef {
        self.omegas[0].tower()
    }

    /// Rescale so the last coordinate is 1.
    pub fn normalized(&self) -> Result<LatticeFrame> {
        let last = self.omegas.last().unwrap().inv()?;
        Ok(self.scale(&last))
    }

    pub fn scale(&self, c: &Series) -> LatticeFrame {
        LatticeFrame {
            omegas: self.omegas.iter().map(|w| w.mul(c)).collect(),
        }
    }

    /// `Σ a_i ω_i` for `a ∈ A^r`.
    pub fn combine(&self, a: &[APoly]) -> Series {
        let tower = self.tower();
        let mut acc = Series::zero(tower);
        for (ai, w) in a.iter().zip(&self.omegas) {
            acc = acc.add(&poly_times(ai, w));
        }
        acc
    }

    /// Same combination with coefficients in `K = F_q(T)` written as `n_i / den`.
    pub fn combine_frac(&self, nums: &[APoly], den: &APoly) -> Result<Series> {
        let d = Series::from_apoly(self.tower(), den);
        self.combine(nums).div(&d)
    }

    pub fn to_json(&self) -> Vec<SeriesJson> {
        self.omegas.iter().map(Series::to_json).collect()
    }

    pub fn from_json(tower: &TowerRef, j: &[SeriesJson]) -> Result<Self> {
        LatticeFrame::new(
            j.iter()
                .map(|s| Series::from_json(tower, s))
                .collect::<Result<_>>()?,
        )
    }
}

/// `a * w` for `a ∈ A`, exact in `a`.
pub fn poly_times(a: &APoly, w: &Series) -> Series {
    let tower = w.tower();
    let e = tower.e();
    let mut acc = Series::zero(tower);
    for (j, &c) in a.coeffs().iter().enumerate() {
        if !c.is_zero() {
            acc = acc.add(&w.shift(-e * j as i64).scale(tower.fq().embed(c)));
        }
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaMatrix {
    pub rows: Vec<Vec<APoly>>,
}

impl GammaMatrix {
    pub fn identity(r: usize) -> Self {
        GammaMatrix {
            rows: (0..r)
                .map(|i| {
                    (0..r)
                        .map(|j| if i == j { APoly::one() } else { APoly::zero() })
                        .collect()
                })
                .collect(),
        }
    }

    /// `1 + a E_{ij}`.
    pub fn elementary(r: usize, i: usize, j: usize, a: APoly) -> Self {
        let mut g = GammaMatrix::identity(r);
        g.rows[i][j] = a;
        g
    }

    pub fn scalar(r: usize, c: Fe) -> Self {
        let mut g = GammaMatrix::identity(r);
        for i in 0..r {
            g.rows[i][i] = APoly::constant(c);
        }
        g
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn mul(&self, o: &GammaMatrix, fq: &Fq) -> GammaMatrix {
        let r = self.dim();
        GammaMatrix {
            rows: (0..r)
                .map(|i| {
                    (0..r)
                        .map(|j| {
                            (0..r).fold(APoly::zero(), |acc, k| {
                                acc.add(&self.rows[i][k].mul(&o.rows[k][j], fq), fq)
                            })
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn det(&self, fq: &Fq) -> APoly {
        let r = self.dim();
        let mut perm: Vec<usize> = (0..r).collect();
        let mut total = APoly::zero();
        permute(&mut perm, 0, &mut |p, sign| {
            let mut term = APoly::one();
            for (i, &j) in p.iter().enumerate() {
                term = term.mul(&self.rows[i][j], fq);
            }
            total = if sign {
                total.add(&term, fq)
            } else {
                total.sub(&term, fq)
            };
        });
        total
    }

    /// Inverse over `A` via the adjugate.
    pub fn inverse(&self, fq: &Fq) -> Result<GammaMatrix> {
        let r = self.dim();
        let d = self.det(fq);
        if d.is_zero() || !d.is_constant() {
            return Err(Error::domain("matrix is not in GL(r, A)"));
        }
        let dinv = fq.base().inv(d.lead())?;
        let minor = |skip_r: usize, skip_c: usize| -> APoly {
            if r == 1 {
                return APoly::one();
            }
            let rows = (0..r)
                .filter(|&i| i != skip_r)
                .map(|i| {
                    (0..r)
                        .filter(|&j| j != skip_c)
                        .map(|j| self.rows[i][j].clone())
                        .collect()
                })
                .collect();
            GammaMatrix { rows }.det(fq)
        };
        let rows = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| {
                        let m = minor(j, i).scale(dinv, fq);
                        if (i + j) % 2 == 1 {
                            m.neg(fq)
                        } else {
                            m
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(GammaMatrix { rows })
    }

    pub fn is_invertible(&self, fq: &Fq) -> bool {
        let d = self.det(fq);
        !d.is_zero() && d.is_constant()
    }

    /// Largest monic `N` with `γ ≡ 1 mod N`; `None` for the identity.
    pub fn level(&self, fq: &Fq) -> Option<APoly> {
        let id = GammaMatrix::identity(self.dim());
        let mut g = APoly::zero();
        for (ra, rb) in self.rows.iter().zip(&id.rows) {
            for (a, b) in ra.iter().zip(rb) {
                g = g.gcd(&a.sub(b, fq), fq);
            }
        }
        if g.is_zero() {
            None
        } else {
            Some(g)
        }
    }

    pub fn max_degree(&self) -> i64 {
        self.rows
            .iter()
            .flatten()
            .map(APoly::deg_i)
            .max()
            .unwrap_or(-1)
    }

    pub fn to_ints(&self, fq: &Fq) -> Vec<Vec<Vec<u32>>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|a| a.to_ints(fq)).collect())
            .collect()
    }
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize], bool)) {
    fn parity(p: &[usize]) -> bool {
        let mut inv = 0;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if p[i] > p[j] {
                    inv += 1;
                }
            }
        }
        inv % 2 == 0
    }
    if k == p.len() {
        let s = parity(p);
        f(p, s);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

/// Seeded element of `GL(r, A)` with entries of degree at most 2.
pub fn random_gamma<R: Rng>(r: usize, fq: &Fq, rng: &mut R) -> GammaMatrix {
    let units = fq.units();
    let mut g = GammaMatrix::identity(r);
    for i in 0..r {
        g.rows[i][i] = APoly::constant(*units.choose(rng).unwrap());
    }
    if r == 1 {
        return g;
    }
    let mut perm: Vec<usize> = (0..r).collect();
    perm.shuffle(rng);
    g.rows = perm.iter().map(|&i| g.rows[i].clone()).collect();
    for _ in 0..2 {
        let i = rng.gen_range(0..r);
        let j = (i + rng.gen_range(1..r)) % r;
        let a = APoly::from_index(rng.gen_range(0..fq.q() * fq.q()), 2, fq);
        g = g.mul(&GammaMatrix::elementary(r, i, j, a), fq);
    }
    g
}

/// Seeded element of `Γ(N)`: a product of two elementary matrices `1 + N c E_ij`.
pub fn random_gamma_level<R: Rng>(r: usize, n: &APoly, fq: &Fq, rng: &mut R) -> GammaMatrix {
    let mut g = GammaMatrix::identity(r);
    if r == 1 {
        return g;
    }
    for _ in 0..2 {
        let i = rng.gen_range(0..r);
        let j = (i + rng.gen_range(1..r)) % r;
        let c = APoly::constant(*fq.units().choose(rng).unwrap());
        g = g.mul(&GammaMatrix::elementary(r, i, j, n.mul(&c, fq)), fq);
    }
    g
}

/// `F_q`-relation among the given leading coefficients, first in enumeration order.
fn find_relation(lcs: &[Fe], fq: &Fq) -> Result<Option<Vec<Fe>>> {
    let k = lcs.len();
    if k < 2 && lcs.iter().all(|c| !c.is_zero()) {
        return Ok(None);
    }
    let q = fq.q();
    let total = q
        .checked_pow(k as u32)
        .filter(|&t| t <= 1 << 22)
        .ok_or_else(|| Error::Resource("relation search too large".into()))?;
    let ext = fq.ext();
    for idx in 1..total {
        let c: Vec<Fe> = APoly::from_index(idx, k, fq).coeffs().to_vec();
        let mut c = c;
        c.resize(k, Fe::ZERO);
        // projective: first nonzero entry is 1
        if c.iter().find(|x| !x.is_zero()) != Some(&Fe::ONE) {
            continue;
        }
        let s = c.iter().zip(lcs).fold(Fe::ZERO, |acc, (&ci, &l)| {
            ext.add(acc, ext.mul(fq.embed(ci), l))
        });
        if s.is_zero() {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// First dependency among leading coefficients: (indices, coefficients).
fn first_dependency(rows: &[Series], fq: &Fq, e: i64) -> Result<Option<(Vec<usize>, Vec<Fe>)>> {
    for class in 0..e {
        let idx: Vec<usize> = (0..rows.len())
            .filter(|&i| rows[i].lead().rem_euclid(e) == class)
            .collect();
        if idx.len() < 2 {
            continue;
        }
        let lcs: Vec<Fe> = idx.iter().map(|&i| rows[i].leading_coeff()).collect();
        if let Some(c) = find_relation(&lcs, fq)? {
            return Ok(Some((idx, c)));
        }
    }
    Ok(None)
}

/// True when no combination `Σ a_i ω_i` has smaller norm than its largest term.
pub fn is_orthogonal(frame: &LatticeFrame) -> Result<bool> {
    if frame.omegas.iter().any(Series::is_zero) {
        return Err(Error::precision("frame vector vanishes to precision"));
    }
    let tower = frame.tower();
    Ok(first_dependency(&frame.omegas, tower.fq(), tower.e())?.is_none())
}

enum Reduced {
    Orthogonal(Vec<Series>, GammaMatrix),
    Vanished(usize),
}

fn reduce(frame: &LatticeFrame) -> Result<Reduced> {
    let tower = frame.tower().clone();
    let fq = tower.fq();
    let e = tower.e();
    let r = frame.rank();
    if let Some(i) = frame.omegas.iter().position(Series::is_zero) {
        return Err(Error::precision(format!(
            "frame vector {} vanishes to precision",
            i + 1
        )));
    }
    let mut rows = frame.omegas.clone();
    let mut change = GammaMatrix::identity(r);
    while let Some((idx, c)) = first_dependency(&rows, fq, e)? {
        let members: Vec<(usize, Fe)> = idx
            .iter()
            .zip(&c)
            .filter(|(_, ci)| !ci.is_zero())
            .map(|(&i, &ci)| (i, ci))
            .collect();
        // pivot: the largest vector, ties to the highest index
        let &(i0, c0) = members
            .iter()
            .min_by(|a, b| rows[a.0].lead().cmp(&rows[b.0].lead()).then(b.0.cmp(&a.0)))
            .unwrap();
        let n0 = rows[i0].lead();
        let inv0 = fq.base().inv(c0)?;
        let mut new_row = rows[i0].clone();
        let mut new_change = change.rows[i0].clone();
        for &(i, ci) in &members {
            if i == i0 {
                continue;
            }
            let k = ((rows[i].lead() - n0) / e) as usize;
            let coef = APoly::monomial(fq.base().mul(ci, inv0), k);
            new_row = new_row.add(&poly_times(&coef, &rows[i]));
            for (nc, oc) in new_change.iter_mut().zip(&change.rows[i]) {
                *nc = nc.add(&coef.mul(oc, fq), fq);
            }
        }
        if new_row.is_zero() {
            return Ok(Reduced::Vanished(i0));
        }
        rows[i0] = new_row;
        change.rows[i0] = new_change;
    }
    Ok(Reduced::Orthogonal(rows, change))
}

/// `K_∞`-linear independence, decided by running the reduction to the end.
pub fn check_independent(frame: &LatticeFrame) -> Result<bool> {
    Ok(matches!(reduce(frame)?, Reduced::Orthogonal(..)))
}

#[derive(Clone, Debug)]
pub struct SmbCertificate {
    pub frame: LatticeFrame,
    /// `frame = change * input` as column vectors.
    pub change: GammaMatrix,
    /// `log_q |ω_i|`, weakly increasing.
    pub minima: Vec<Rational64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SmbJson {
    pub frame: Vec<SeriesJson>,
    pub change: Vec<Vec<Vec<u32>>>,
    pub minima: Vec<String>,
}

impl SmbCertificate {
    pub fn to_json(&self, fq: &Fq) -> SmbJson {
        SmbJson {
            frame: self.frame.to_json(),
            change: self.change.to_ints(fq),
            minima: self.minima.iter().map(|m| m.to_string()).collect(),
        }
    }
}

pub fn norm_exponent(x: &Series) -> Rational64 {
    Rational64::new(-x.lead(), x.tower().e())
}

/// Successive minimum basis, sorted by norm (stable in the reduced order).
pub fn smb_reduce(frame: &LatticeFrame) -> Result<SmbCertificate> {
    match reduce(frame)? {
        Reduced::Vanished(i) => Err(Error::precision(format!(
            "reduction pivot {} vanished: frame dependent or precision exhausted",
            i + 1
        ))),
        Reduced::Orthogonal(rows, change) => {
            let mut order: Vec<usize> = (0..rows.len()).collect();
            order.sort_by_key(|&i| std::cmp::Reverse(rows[i].lead()));
            let omegas: Vec<Series> = order.iter().map(|&i| rows[i].clone()).collect();
            let change = GammaMatrix {
                rows: order.iter().map(|&i| change.rows[i].clone()).collect(),
            };
            let minima = omegas.iter().map(norm_exponent).collect();
            Ok(SmbCertificate {
                frame: LatticeFrame { omegas },
                change,
                minima,
            })
        }
    }
}

/// `(ω_r, ..., ω_1)` is an SMB of `Λ_ω`. Scale invariant, so no normalization is needed.
pub fn in_fundamental_domain(frame: &LatticeFrame) -> Result<bool> {
    if !is_orthogonal(frame)? {
        return Ok(false);
    }
    Ok(frame.omegas.windows(2).all(|w| w[0].lead() <= w[1].lead()))
}

/// Left action on column vectors, renormalized to last coordinate 1,
/// together with `aut(γ, ω) = Σ γ_{r,i} ω_i`.
pub fn gamma_act(gamma: &GammaMatrix, frame: &LatticeFrame) -> Result<(LatticeFrame, Series)> {
    let fq = frame.tower().fq();
    if gamma.dim() != frame.rank() {
        return Err(Error::domain("matrix size does not match frame rank"));
    }
    if !gamma.is_invertible(fq) {
        return Err(Error::domain("matrix is not in GL(r, A)"));
    }
    let raw: Vec<Series> = gamma.rows.iter().map(|row| frame.combine(row)).collect();
    let aut = raw.last().unwrap().clone();
    if aut.is_zero() {
        return Err(Error::precision(
            "factor of automorphy vanishes to precision",
        ));
    }
    let inv = aut.inv()?;
    let omegas = raw.iter().map(|w| w.mul(&inv)).collect();
    Ok((LatticeFrame { omegas }, aut))
}

/// Iterator over nonzero `λ = Σ a_i ω_i` with `deg a_i <= d`.
pub struct PointIter<'a> {
    frame: &'a LatticeFrame,
    d: usize,
    next: u64,
    total: u64,
}

impl Iterator for PointIter<'_> {
    type Item = (Vec<APoly>, Series);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.total {
            return None;
        }
        let fq = self.frame.tower().fq();
        let per = fq.q().pow(self.d as u32 + 1);
        let mut idx = self.next;
        self.next += 1;
        let mut a = Vec::with_capacity(self.frame.rank());
        for _ in 0..self.frame.rank() {
            a.push(APoly::from_index(idx % per, self.d + 1, fq));
            idx /= per;
        }
        let lam = self.frame.combine(&a);
        Some((a, lam))
    }
}

pub fn enumerate_points(frame: &LatticeFrame, d: usize) -> Result<PointIter<'_>> {
    let q = frame.tower().q();
    let total = q
        .checked_pow(((d + 1) * frame.rank()) as u32)
        .ok_or_else(|| Error::Resource("point enumeration too large".into()))?;
    Ok(PointIter {
        frame,
        d,
        next: 1,
        total,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Builtin {
    Carlitz,
    Rank2Sqrt,
    Rank3Cbrt,
}

impl Builtin {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "carlitz" => Ok(Builtin::Carlitz),
            "rank2-sqrt" => Ok(Builtin::Rank2Sqrt),
            "rank3-cbrt" => Ok(Builtin::Rank3Cbrt),
            _ => Err(Error::Parse(format!("unknown builtin frame {s}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Carlitz => "carlitz",
            Builtin::Rank2Sqrt => "rank2-sqrt",
            Builtin::Rank3Cbrt => "rank3-cbrt",
        }
    }

    pub fn rank(self) -> usize {
        match self {
            Builtin::Carlitz => 1,
            Builtin::Rank2Sqrt => 2,
            Builtin::Rank3Cbrt => 3,
        }
    }

    /// Smallest ramification index that can hold the frame.
    pub fn min_e(self) -> u32 {
        self.rank() as u32
    }

    /// `A`, `(T^(1/2), 1)` or `(T^(2/3), T^(1/3), 1)`.
    pub fn frame(self, tower: &TowerRef) -> Result<LatticeFrame> {
        let e = tower.e();
        let r = self.rank() as i64;
        if e % r != 0 {
            return Err(Error::domain(format!(
                "{} needs e divisible by {r}",
                self.name()
            )));
        }
        let omegas = (0..r)
            .map(|i| Series::t_frac(tower, (r - 1 - i) * e / r))
            .collect();
        LatticeFrame::new(omegas)
    }
}

/// Seeded point of the fundamental domain: `ω_r = 1` and `ω_i = T^(c_i + (r-i)/r) * (unit)`
/// with `c_1 >= ... >= c_{r-1} >= 0` drawn from `0..=spread`.
pub fn random_fd_frame<R: Rng>(
    tower: &TowerRef,
    r: usize,
    spread: i64,
    rng: &mut R,
) -> Result<LatticeFrame> {
    let e = tower.e();
    if e % r as i64 != 0 {
        return Err(Error::domain(format!(
            "rank {r} samples need e divisible by {r}"
        )));
    }
    let step = e / r as i64;
    let mut cs: Vec<i64> = (0..r - 1).map(|_| rng.gen_range(0..=spread)).collect();
    cs.sort_by(|a, b| b.cmp(a));
    let cap = tower.rel_cap();
    let mut omegas = Vec::with_capacity(r);
    for (i, c) in cs.iter().enumerate() {
        let lead = -(e * c + (r - 1 - i) as i64 * step);
        omegas.push(Series::random(tower, 0, cap, rng).shift(lead));
    }
    omegas.push(Series::one(tower));
    LatticeFrame::new(omegas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{FieldSpec, Tower};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tower(q: u32, e: u32) -> TowerRef {
        Tower::new(FieldSpec::new(q, 1, e, 1), 48).unwrap()
    }

    #[test]
    fn independence_examples() {
        let t = tower(2, 2);
        let f = Builtin::Rank2Sqrt.frame(&t).unwrap();
        assert!(check_independent(&f).unwrap());
        let tt = tower(3, 1);
        let dep = LatticeFrame::new(vec![Series::one(&tt), Series::t_frac(&tt, 1)]).unwrap();
        assert!(!check_independent(&dep).unwrap());
        let w = Series::random(&tt, -2, 30, &mut ChaCha8Rng::seed_from_u64(3));
        let c = tt.fq().embed(tt.fq().base().from_int(2));
        let dep = LatticeFrame::new(vec![w.clone(), w.scale(c)]).unwrap();
        assert!(!check_independent(&dep).unwrap());
    }

    #[test]
    fn smb_examples() {
        let t = tower(2, 2);
        let fq = t.fq();
        let s = smb_reduce(&Builtin::Rank2Sqrt.frame(&t).unwrap()).unwrap();
        assert_eq!(
            s.minima,
            vec![Rational64::from_integer(0), Rational64::new(1, 2)]
        );
        let swapped = GammaMatrix {
            rows: vec![
                vec![APoly::zero(), APoly::one()],
                vec![APoly::one(), APoly::zero()],
            ],
        };
        assert_eq!(s.change, swapped);

        let f = LatticeFrame::new(vec![Series::t_frac(&t, 1), Series::one(&t)]).unwrap();
        let s = smb_reduce(&f.clone()).unwrap();
        assert_eq!(s.change, swapped);

        let w = Series::t_frac(&t, 1).add(&Series::t_frac(&t, 2));
        let f = LatticeFrame::new(vec![w, Series::one(&t)]).unwrap();
        let s = smb_reduce(&f).unwrap();
        assert_eq!(
            s.minima,
            vec![Rational64::from_integer(0), Rational64::new(1, 2)]
        );
        // ω_1 - T ω_2 appears as the second basis vector
        assert_eq!(s.change.rows[1], vec![APoly::one(), APoly::t()]);
        // brute-force minimum outside A*1 over coefficient degree <= 3
        let best = enumerate_points(&f, 3)
            .unwrap()
            .filter(|(a, _)| !a[0].is_zero())
            .map(|(_, l)| norm_exponent(&l))
            .min()
            .unwrap();
        assert_eq!(best, s.minima[1]);
        let _ = fq;
    }

    #[test]
    fn fundamental_domain_examples() {
        let t = tower(2, 6);
        let f = Builtin::Rank2Sqrt.frame(&t).unwrap();
        assert!(in_fundamental_domain(&f).unwrap());
        let g = LatticeFrame::new(vec![Series::one(&t), Series::t_frac(&t, 3)]).unwrap();
        assert!(!in_fundamental_domain(&g.normalized().unwrap()).unwrap());
        let h = Builtin::Rank3Cbrt.frame(&t).unwrap();
        assert!(in_fundamental_domain(&h).unwrap());
        let rev: Vec<Series> = h.omegas().iter().rev().cloned().collect();
        let min_rev = enumerate_points(&LatticeFrame::new(rev).unwrap(), 2)
            .unwrap()
            .map(|(_, l)| norm_exponent(&l))
            .min()
            .unwrap();
        assert_eq!(min_rev, Rational64::from_integer(0));
    }

    #[test]
    fn gamma_examples() {
        let t = tower(3, 2);
        let fq = t.fq();
        let f = Builtin::Rank2Sqrt.frame(&t).unwrap();
        let (g, aut) = gamma_act(&GammaMatrix::identity(2), &f).unwrap();
        assert!(aut.approx_equal(&Series::one(&t), 40).unwrap());
        assert!(g.omegas()[0].approx_equal(&f.omegas()[0], 40).unwrap());

        let two = fq.base().from_int(2);
        let (g, aut) = gamma_act(&GammaMatrix::scalar(2, two), &f).unwrap();
        assert!(aut.approx_equal(&Series::from_base(&t, two), 40).unwrap());
        assert!(g.omegas()[0].approx_equal(&f.omegas()[0], 40).unwrap());

        let (g, aut) = gamma_act(&GammaMatrix::elementary(2, 0, 1, APoly::t()), &f).unwrap();
        assert!(aut.approx_equal(&Series::one(&t), 40).unwrap());
        let expect = f.omegas()[0].add(&Series::from_apoly(&t, &APoly::t()));
        assert!(g.omegas()[0].approx_equal(&expect, 40).unwrap());

        let bad = GammaMatrix::scalar(2, Fe::ZERO);
        assert!(gamma_act(&bad, &f).is_err());
    }

    #[test]
    fn point_counts() {
        let t = tower(2, 1);
        let a = Builtin::Carlitz.frame(&t).unwrap();
        let pts: Vec<_> = enumerate_points(&a, 1).unwrap().collect();
        assert_eq!(pts.len(), 3);
        let t3 = tower(3, 2);
        let f = Builtin::Rank2Sqrt.frame(&t3).unwrap();
        assert_eq!(enumerate_points(&f, 1).unwrap().count(), 3usize.pow(4) - 1);
        let s = smb_reduce(&f).unwrap();
        let m = enumerate_points(&f, 2)
            .unwrap()
            .map(|(_, l)| norm_exponent(&l))
            .min()
            .unwrap();
        assert_eq!(m, s.minima[0]);
    }

    #[test]
    fn level_of_gamma() {
        let t = tower(2, 2);
        let fq = t.fq();
        let n = APoly::t().mul(&APoly::t(), fq);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let g = random_gamma_level(2, &n, fq, &mut rng);
            assert!(g.is_invertible(fq));
            if let Some(l) = g.level(fq) {
                assert!(l.rem(&n, fq).unwrap().is_zero());
            }
            let h = random_gamma(2, fq, &mut rng);
            assert!(h.is_invertible(fq));
            assert!(h.max_degree() <= 2);
            assert_eq!(h.mul(&h.inverse(fq).unwrap(), fq), GammaMatrix::identity(2));
            let h3 = random_gamma(3, fq, &mut rng);
            assert_eq!(
                h3.inverse(fq).unwrap().mul(&h3, fq),
                GammaMatrix::identity(3)
            );
        }
    }
}
