//! Eisenstein series of lattices: full `E_k`, partial `E_{k,u}`, restricted
//! `F_{k,u}`, the weight-one coordinate vector `j_N`, and related experiments.
//!
//! Conventions. For `u ∈ (N^{-1}A/A)^r`,
//!
//! ```text
//! E_{k,u}(ω) = Σ_{a ∈ u + A^r, a ≠ 0} (aω)^(-k),
//! F_{k,u}(ω) = N^k Σ_{b ∈ A^r primitive, b ≡ Nu mod N} (bω)^(-k),
//! ```
//!
//! so that `E_{1,u} = 1 / e_ω(uω)` and `E_{k,0} = E_k`.

use std::collections::HashMap;

use num_rational::Rational64;
use serde::Serialize;

use crate::arithmetic::{primitive_monic_reps, unit_residues, APoly, CongClass, ENUMERATION_CAP};
use crate::error::{Error, Result};
use crate::expo::{
    alphas_up_to, fq_basis, lattice_exponential, power_sums, shifted_power_sums, ExpOutput,
    ExpState,
};
use crate::lattice::{poly_times, smb_reduce, GammaMatrix, LatticeFrame, SmbCertificate};
use crate::series::{Series, SeriesJson, TowerRef};

#[derive(Clone, Debug)]
pub struct EisenValue {
    pub value: Series,
    pub k: u32,
    /// Absolute `u`-exponent below which the value is certified.
    pub tail_bound: i64,
    /// Largest `T`-degree of lattice vectors entering the computation.
    pub d_used: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EisenValueJson {
    pub k: u32,
    pub tail_bound: i64,
    pub d_used: i64,
    pub value: SeriesJson,
}

impl EisenValue {
    fn new(value: Series, k: u32, d_used: i64) -> Self {
        EisenValue {
            tail_bound: value.prec(),
            value,
            k,
            d_used,
        }
    }

    pub fn to_json(&self) -> EisenValueJson {
        EisenValueJson {
            k: self.k,
            tail_bound: self.tail_bound,
            d_used: self.d_used,
            value: self.value.to_json(),
        }
    }

    /// Fails unless the value is exact zero or carries `p` digits past its leading term.
    pub fn certify(self, p: i64) -> Result<Self> {
        if self.value.is_exact_zero() {
            return Ok(self);
        }
        if self.value.is_zero() || self.value.rel_prec() < p {
            return Err(Error::precision(format!(
                "weight {} value known to {} digits, {} requested",
                self.k,
                if self.value.is_zero() {
                    0
                } else {
                    self.value.rel_prec()
                },
                p
            )));
        }
        Ok(self)
    }
}

/// A frame together with its successive minimum basis.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub input: LatticeFrame,
    pub smb: SmbCertificate,
    /// `input = inv_change * smb.frame`.
    inv_change: GammaMatrix,
}

impl Prepared {
    pub fn new(frame: &LatticeFrame) -> Result<Self> {
        let smb = smb_reduce(frame)?;
        let inv_change = smb.change.inverse(frame.tower().fq())?;
        Ok(Prepared {
            input: frame.clone(),
            smb,
            inv_change,
        })
    }

    pub fn tower(&self) -> &TowerRef {
        self.input.tower()
    }

    pub fn rank(&self) -> usize {
        self.input.rank()
    }

    /// `u` expressed against the reduced basis.
    pub fn reduce_class(&self, u: &CongClass) -> CongClass {
        u.act(&self.inv_change.rows, self.tower().fq())
    }

    /// `uω` for a class already in reduced coordinates.
    pub fn point(&self, ur: &CongClass) -> Result<Series> {
        self.smb.frame.combine_frac(&ur.numerators, &ur.level)
    }

    /// `x` minus a lattice vector, reduced greedily by leading terms. The
    /// exponential loses precision on points much larger than the lattice.
    pub fn reduce_point(&self, x: &Series) -> Result<Series> {
        let tower = self.tower();
        let ext = tower.ext();
        let q = tower.q() as i64;
        let e = tower.e();
        let mut y = x.clone();
        if y.is_zero() {
            return Ok(y);
        }
        let count: i64 = self
            .smb
            .frame
            .omegas()
            .iter()
            .map(|w| ((w.lead() - y.lead()).div_euclid(e) + 1).max(0))
            .sum();
        let basis = fq_basis(&self.smb.frame, count as usize);
        loop {
            if y.is_zero() {
                return Ok(y);
            }
            let Some((_, _, b)) = basis.iter().find(|b| b.2.lead() == y.lead()) else {
                return Ok(y);
            };
            let c = ext.div(y.leading_coeff(), b.leading_coeff())?;
            if ext.pow(c, q) != c {
                return Ok(y);
            }
            y = y.sub(&b.scale(c));
        }
    }

    pub fn exp(&self, n_alpha: usize, points: &[Series]) -> Result<ExpOutput> {
        lattice_exponential(&self.smb.frame, n_alpha, points, self.tower().rel_cap())
    }

    /// `E_1, ..., E_kmax`.
    pub fn full_values(&self, kmax: u32) -> Result<Vec<EisenValue>> {
        let tower = self.tower();
        let q = tower.q();
        let n_alpha = alphas_up_to(q, kmax as u64 + 1).saturating_sub(1);
        let out = self.exp(n_alpha, &[])?;
        let sums = power_sums(&out.alphas, q, kmax as usize, tower)?;
        Ok(sums
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                let k = i as u32 + 1;
                let v = if k as u64 % (q - 1) != 0 {
                    Series::zero(tower)
                } else {
                    s
                };
                EisenValue::new(v, k, out.d_used)
            })
            .collect())
    }

    /// `E_{k,u}` for `k = 1..=kmax` and each class; result indexed `[u][k-1]`.
    pub fn partial_values(&self, kmax: u32, us: &[CongClass]) -> Result<Vec<Vec<EisenValue>>> {
        let tower = self.tower().clone();
        let q = tower.q();
        let mut points = Vec::new();
        let mut slot = Vec::with_capacity(us.len());
        for u in us {
            if u.rank() != self.rank() {
                return Err(Error::domain("congruence class rank does not match frame"));
            }
            if u.is_zero() {
                slot.push(None);
            } else {
                slot.push(Some(points.len()));
                points.push(self.point(&self.reduce_class(u))?);
            }
        }
        let n_alpha = alphas_up_to(q, kmax.saturating_sub(1) as u64).saturating_sub(1);
        let out = self.exp(n_alpha, &points)?;
        let full = if slot.iter().any(Option::is_none) {
            Some(self.full_values(kmax)?)
        } else {
            None
        };
        slot.iter()
            .map(|s| match s {
                None => Ok(full.clone().unwrap()),
                Some(i) => {
                    let y = &out.values[*i];
                    if y.is_zero() {
                        return Err(Error::precision("division value vanishes to precision"));
                    }
                    let sums = shifted_power_sums(y, &out.alphas, q, kmax as usize)?;
                    Ok(sums
                        .into_iter()
                        .enumerate()
                        .map(|(j, v)| EisenValue::new(v, j as u32 + 1, out.d_used))
                        .collect())
                }
            })
            .collect()
    }
}

/// `E_k` of the lattice spanned by `frame`, with `p` certified digits.
pub fn eisenstein_full(frame: &LatticeFrame, k: u32, p: i64) -> Result<EisenValue> {
    if k == 0 {
        return Err(Error::domain("weight must be positive"));
    }
    Prepared::new(frame)?
        .full_values(k)?
        .pop()
        .unwrap()
        .certify(p)
}

/// `E_{k,u}` with `p` certified digits.
pub fn eisenstein_partial(
    frame: &LatticeFrame,
    k: u32,
    u: &CongClass,
    p: i64,
) -> Result<EisenValue> {
    if k == 0 {
        return Err(Error::domain("weight must be positive"));
    }
    let prep = Prepared::new(frame)?;
    let mut v = prep.partial_values(k, std::slice::from_ref(u))?;
    v[0].pop().unwrap().certify(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Method {
    Direct,
    Moebius,
}

/// Weights `m(t) = Σ_{a monic, at ≡ 1} μ(a) a^(-k)` for `t ∈ (A/N)^*`, so that
/// `F_{k,u} = Σ_t m(t) E_{k,tu}`.
#[derive(Clone, Debug)]
pub struct MoebiusTable {
    pub level: APoly,
    pub k: u32,
    pub units: Vec<APoly>,
    pub weights: Vec<Series>,
    /// Degrees of `a` summed exactly; the rest is bounded by `|a|^-k`.
    pub j_max: usize,
}

/// Builds the weights from `Z_j[h] = Σ_{g monic, deg g = j, g ≡ h} g^(-k)`,
/// inverted as a power series over the group ring of `(A/N)^*`. For `j >= deg N`
/// the classes `g ≡ h` of degree `j` are translates of `N A_{<j-d}` and their
/// sums come from one growing subspace exponential.
pub fn moebius_table(tower: &TowerRef, n: &APoly, k: u32) -> Result<MoebiusTable> {
    let fq = tower.fq();
    let e = tower.e();
    let q = tower.q();
    let d = n
        .degree()
        .filter(|&d| d >= 1)
        .ok_or_else(|| Error::domain("level must have positive degree"))?;
    if !n.is_monic() {
        return Err(Error::domain("level must be monic"));
    }
    if k == 0 {
        return Err(Error::domain("weight must be positive"));
    }
    let units = unit_residues(n, fq)?;
    let phi = units.len();
    let index: HashMap<APoly, usize> = units
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, u)| (u, i))
        .collect();
    let mul: Vec<Vec<usize>> = units
        .iter()
        .map(|a| units.iter().map(|b| index[&a.mul_mod(b, n, fq)]).collect())
        .collect();
    let inv: Vec<usize> = units
        .iter()
        .map(|a| index[&a.inv_mod(n, fq).unwrap()])
        .collect();
    let rel = tower.rel_cap();
    let j_max = ((rel + e * k as i64 - 1) / (e * k as i64)) as usize;

    let mut z = vec![vec![Series::zero(tower); phi]; j_max + 1];
    for (hi, h) in units.iter().enumerate() {
        if h.is_monic() && h.degree().unwrap() <= j_max && h.degree().unwrap() < d {
            z[h.degree().unwrap()][hi] = Series::from_apoly(tower, h).pow(-(k as i64))?;
        }
    }
    // level j >= d sums to G_k(1/e_W(y)) with |W| = q^(j-d), so
    // v(z_j) >= e j max(k, q^(j-d)); levels past j_z are below precision
    let zbound = |j: usize| -> i64 {
        let grow = u32::try_from(j.saturating_sub(d))
            .ok()
            .and_then(|x| (q as i64).checked_pow(x))
            .unwrap_or(i64::MAX);
        (e * j as i64).saturating_mul(grow.max(k as i64))
    };
    let mut j_z = j_max;
    while j_z >= d && j_z > 0 && zbound(j_z) >= rel {
        j_z -= 1;
    }
    if j_z >= d {
        let basis: Vec<Series> = (0..j_z - d)
            .map(|i| {
                Series::from_apoly(
                    tower,
                    &n.mul(&APoly::monomial(crate::field::Fe::ONE, i), fq),
                )
            })
            .collect();
        let mut points = Vec::new();
        for j in d..=j_z {
            let tj = APoly::monomial(crate::field::Fe::ONE, j);
            for h in &units {
                let g0 = tj.add(&h.sub(&tj, fq).rem(n, fq)?, fq);
                points.push(Series::from_apoly(tower, &g0));
            }
        }
        let mut st = ExpState::new(tower, basis, points);
        for s in 0..=j_z - d {
            for hi in 0..phi {
                let y = &st.values[s * phi + hi];
                let sums = shifted_power_sums(y, &st.alphas, q, k as usize)?;
                z[d + s][hi] = sums[k as usize - 1].clone();
            }
            if s < j_z - d {
                st.advance()?;
            }
        }
    }

    let one = index[&APoly::one()];
    let mut m = vec![vec![Series::zero(tower); phi]; j_max + 1];
    m[0][one] = Series::one(tower);
    for j in 1..=j_max {
        for h in 0..phi {
            let mut acc = Series::zero(tower);
            for i in 1..=j {
                for h1 in 0..phi {
                    if z[i][h1].is_exact_zero() || m[j - i][mul[h][inv[h1]]].is_exact_zero() {
                        continue;
                    }
                    acc = acc.add(&z[i][h1].mul(&m[j - i][mul[h][inv[h1]]]));
                }
            }
            m[j][h] = acc.neg();
        }
    }
    let tail = (e * k as i64 * (j_max as i64 + 1)).min(if j_z < j_max {
        zbound(j_z + 1)
    } else {
        i64::MAX
    });
    let weights = (0..phi)
        .map(|t| {
            let target = inv[t];
            let mut acc = Series::zero(tower);
            for mj in &m {
                acc = acc.add(&mj[target]);
            }
            acc.assume_exact_to(tail).truncate(tail)
        })
        .collect();
    Ok(MoebiusTable {
        level: n.clone(),
        k,
        units,
        weights,
        j_max,
    })
}

/// `F_{k,u}` for several classes of the table's level, via the Möbius weights.
pub fn restricted_moebius(
    prep: &Prepared,
    table: &MoebiusTable,
    us: &[CongClass],
) -> Result<Vec<EisenValue>> {
    let fq = prep.tower().fq();
    let mut classes = Vec::with_capacity(us.len() * table.units.len());
    for u in us {
        if u.level != table.level {
            return Err(Error::domain("class level differs from the table level"));
        }
        for t in &table.units {
            classes.push(u.scale(t, fq));
        }
    }
    let vals = prep.partial_values(table.k, &classes)?;
    let phi = table.units.len();
    Ok(us
        .iter()
        .enumerate()
        .map(|(ui, _)| {
            let mut acc = Series::zero(prep.tower());
            let mut d_used = 0;
            for (ti, w) in table.weights.iter().enumerate() {
                let ev = &vals[ui * phi + ti][table.k as usize - 1];
                d_used = d_used.max(ev.d_used);
                acc = acc.add(&w.mul(&ev.value));
            }
            EisenValue::new(acc, table.k, d_used)
        })
        .collect())
}

/// `F_{k,u}` by summing primitive vectors in a box large enough that the
/// ultrametric bound on the rest reaches `rel` digits past the largest term.
pub fn restricted_direct(prep: &Prepared, k: u32, u: &CongClass, rel: i64) -> Result<EisenValue> {
    restricted_direct_capped(prep, k, u, rel, ENUMERATION_CAP)
}

/// As [`restricted_direct`] with an explicit bound on the number of vectors visited.
pub fn restricted_direct_capped(
    prep: &Prepared,
    k: u32,
    u: &CongClass,
    rel: i64,
    cap: u64,
) -> Result<EisenValue> {
    let tower = prep.tower().clone();
    let fq = tower.fq();
    let e = tower.e();
    let n = &u.level;
    let d = n.degree().unwrap() as i64;
    let ur = prep.reduce_class(u);
    if !ur.is_primitive(fq) {
        return Ok(EisenValue::new(Series::zero(&tower), k, 0));
    }
    let frame = &prep.smb.frame;
    let r = frame.rank();
    let kk = k as i64;
    let nk = Series::from_apoly(&tower, n).pow(kk)?;

    // largest term among small boxes fixes the scale
    let mut scale = None;
    for extra in 0..4 {
        let mut best: Option<i64> = None;
        for_each_member(&ur, &vec![extra - 1; r], fq, |a| {
            let lam = frame.combine(a);
            if !lam.is_zero() {
                let l = -kk * lam.lead() + nk.lead();
                best = Some(best.map_or(l, |b: i64| b.min(l)));
            }
            Ok(())
        })?;
        if best.is_some() {
            scale = best;
            break;
        }
    }
    let scale =
        scale.ok_or_else(|| Error::Resource("no primitive vector found in small boxes".into()))?;
    // the basis is orthogonal, so a term is negligible once any one
    // coordinate has degree above its own bound
    let sum_to = |target: i64| -> Result<(Series, i64)> {
        let bounds: Vec<i64> = frame
            .omegas()
            .iter()
            .map(|w| {
                (target - nk.lead() + kk * w.lead()).div_euclid(kk * e)
                    - i64::from((target - nk.lead() + kk * w.lead()).rem_euclid(kk * e) == 0)
            })
            .collect();
        let cdegs: Vec<i64> = bounds.iter().map(|b| b - d).collect();
        let digits: i64 = cdegs.iter().map(|c| (c + 1).max(0)).sum();
        let count = u32::try_from(digits)
            .ok()
            .and_then(|x| fq.q().checked_pow(x));
        if count.is_none_or(|c| c > cap) {
            return Err(Error::Resource(format!(
                "direct sum needs degree bounds {bounds:?}"
            )));
        }
        let mut acc = Series::zero(&tower);
        for_each_member(&ur, &cdegs, fq, |a| {
            let lam = frame.combine(a);
            if lam.is_zero() {
                return Err(Error::precision("lattice vector vanishes to precision"));
            }
            let term_lead = -kk * lam.lead() + nk.lead();
            let need = target - term_lead;
            if need <= 0 {
                return Ok(());
            }
            let lam = lam.truncate(lam.lead() + need);
            acc = acc.add(&lam.pow(-kk)?);
            Ok(())
        })?;
        let dd = bounds.iter().copied().max().unwrap_or(0);
        Ok((acc.mul(&nk).truncate(target), dd))
    };
    // the leading terms may cancel; then sum again relative to the result
    let mut target = scale + rel;
    loop {
        let (value, dd) = sum_to(target)?;
        if value.is_zero() || value.lead() + rel <= target {
            return Ok(EisenValue::new(value, k, dd));
        }
        target = value.lead() + rel;
    }
}

/// Visit primitive `a ∈ A^r` with `a ≡ n mod N`, `a = n + N c`, `deg c_i <= cdegs[i]`.
fn for_each_member(
    ur: &CongClass,
    cdegs: &[i64],
    fq: &crate::arithmetic::Fq,
    mut f: impl FnMut(&[APoly]) -> Result<()>,
) -> Result<()> {
    let lens: Vec<usize> = cdegs.iter().map(|c| (c + 1).max(0) as usize).collect();
    let pers: Vec<u64> = lens.iter().map(|&l| fq.q().pow(l as u32)).collect();
    let total: u64 = pers.iter().product();
    let n = &ur.level;
    for idx in 0..total {
        let mut rest = idx;
        let mut a = Vec::with_capacity(lens.len());
        for i in 0..lens.len() {
            let c = APoly::from_index(rest % pers[i], lens[i], fq);
            rest /= pers[i];
            a.push(ur.numerators[i].add(&n.mul(&c, fq), fq));
        }
        let g = a.iter().fold(APoly::zero(), |g, x| g.gcd(x, fq));
        if g.is_one() {
            f(&a)?;
        }
    }
    Ok(())
}

/// `F_{k,u}` by either route, certified to `p` digits.
pub fn eisenstein_restricted(
    frame: &LatticeFrame,
    k: u32,
    u: &CongClass,
    p: i64,
    method: Method,
) -> Result<EisenValue> {
    let prep = Prepared::new(frame)?;
    let v = match method {
        Method::Direct => restricted_direct(&prep, k, u, p)?,
        Method::Moebius => {
            let table = moebius_table(prep.tower(), &u.level, k)?;
            restricted_moebius(&prep, &table, std::slice::from_ref(u))?
                .pop()
                .unwrap()
        }
    };
    if !u.is_primitive(frame.tower().fq()) && method == Method::Direct {
        return Ok(v);
    }
    v.certify(p)
}

/// The weight-one coordinates `(E_u(ω))_{u ∈ N^{-1}S}`.
#[derive(Clone, Debug)]
pub struct EisenCoordVector {
    pub level: APoly,
    pub reps: Vec<Vec<APoly>>,
    pub entries: Vec<EisenValue>,
}

impl EisenCoordVector {
    /// Index of an entry of largest absolute value.
    fn pivot(&self) -> Option<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.value.is_zero())
            .min_by_key(|(_, v)| v.value.lead())
            .map(|(i, _)| i)
    }

    /// Entries divided by the largest one.
    pub fn normalized(&self) -> Result<Vec<Series>> {
        let i = self
            .pivot()
            .ok_or_else(|| Error::precision("all coordinates vanish to precision"))?;
        let inv = self.entries[i].value.inv()?;
        Ok(self.entries.iter().map(|v| v.value.mul(&inv)).collect())
    }

    /// Projective equality to `p` digits.
    pub fn projectively_equal(&self, o: &EisenCoordVector, p: i64) -> Result<bool> {
        if self.entries.len() != o.entries.len() {
            return Ok(false);
        }
        let a = self.normalized()?;
        let b = o.normalized()?;
        for (x, y) in a.iter().zip(&b) {
            if !x.approx_equal(y, p)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn embed_jn(frame: &LatticeFrame, n: &APoly, p: i64) -> Result<EisenCoordVector> {
    let fq = frame.tower().fq();
    let reps = primitive_monic_reps(n, frame.rank(), fq)?;
    let us: Vec<CongClass> = reps
        .iter()
        .map(|v| CongClass::new(n.clone(), v.clone(), fq))
        .collect::<Result<_>>()?;
    let prep = Prepared::new(frame)?;
    let vals = prep.partial_values(1, &us)?;
    let entries: Vec<EisenValue> = vals
        .into_iter()
        .map(|mut v| v.pop().unwrap().certify(p))
        .collect::<Result<_>>()?;
    let vec = EisenCoordVector {
        level: n.clone(),
        reps,
        entries,
    };
    if vec.pivot().is_none() {
        return Err(Error::precision(
            "all Eisenstein coordinates vanish: impossible on interior points",
        ));
    }
    Ok(vec)
}

/// Rank of `[F_{k,u}(ω_j)]` over `u ∈ N^{-1}S` and the sample frames.
pub fn eis_rank(n: &APoly, k: u32, frames: &[LatticeFrame], p: i64) -> Result<usize> {
    let first = frames
        .first()
        .ok_or_else(|| Error::domain("no sample frames"))?;
    let tower = first.tower().clone();
    let fq = tower.fq();
    let r = first.rank();
    let reps = primitive_monic_reps(n, r, fq)?;
    if frames.len() < reps.len() + 2 {
        return Err(Error::domain(format!(
            "need at least {} sample frames",
            reps.len() + 2
        )));
    }
    let us: Vec<CongClass> = reps
        .iter()
        .map(|v| CongClass::new(n.clone(), v.clone(), fq))
        .collect::<Result<_>>()?;
    let table = moebius_table(&tower, n, k)?;
    let mut cols = Vec::with_capacity(frames.len());
    for f in frames {
        let prep = Prepared::new(f)?;
        cols.push(restricted_moebius(&prep, &table, &us)?);
    }
    let matrix: Vec<Vec<Series>> = (0..us.len())
        .map(|i| cols.iter().map(|c| c[i].value.clone()).collect())
        .collect();
    valuation_rank(matrix, p)
}

/// Rank by full pivoting on the largest entry; rows are scaled to unit maximum
/// first and entries below `u^p` count as zero.
pub fn valuation_rank(mut rows: Vec<Vec<Series>>, p: i64) -> Result<usize> {
    let is_zero = |x: &Series| -> Result<bool> {
        if x.is_zero() {
            if x.prec() < p {
                return Err(Error::precision(
                    "matrix entry indeterminate at the zero threshold",
                ));
            }
            return Ok(true);
        }
        Ok(x.lead() >= p)
    };
    for row in rows.iter_mut() {
        if let Some(best) = row
            .iter()
            .filter(|x| !x.is_zero())
            .min_by_key(|x| x.lead())
            .cloned()
        {
            let inv = best.inv()?;
            for x in row.iter_mut() {
                *x = x.mul(&inv);
            }
        }
    }
    let mut rank = 0;
    let ncols = rows.first().map_or(0, Vec::len);
    let mut live_rows: Vec<usize> = (0..rows.len()).collect();
    let mut live_cols: Vec<usize> = (0..ncols).collect();
    loop {
        let mut piv: Option<(usize, usize)> = None;
        for &i in &live_rows {
            for &j in &live_cols {
                let x = &rows[i][j];
                if is_zero(x)? {
                    continue;
                }
                if piv.is_none_or(|(a, b)| x.lead() < rows[a][b].lead()) {
                    piv = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = piv else { break };
        rank += 1;
        let pinv = rows[pi][pj].inv()?;
        live_rows.retain(|&i| i != pi);
        live_cols.retain(|&j| j != pj);
        for &i in &live_rows {
            let f = rows[i][pj].mul(&pinv);
            for &j in &live_cols {
                let t = rows[pi][j].mul(&f);
                rows[i][j] = rows[i][j].sub(&t);
            }
        }
    }
    Ok(rank)
}

/// `t(ω) = 1 / e_{NΛ'}(ω_1)` with `Λ' = A ω_2 + ... + A ω_r`.
pub fn boundary_parameter(frame: &LatticeFrame, n: &APoly, _p: i64) -> Result<Series> {
    if frame.rank() < 2 {
        return Err(Error::domain("boundary parameter needs rank >= 2"));
    }
    let rest: Vec<Series> = frame.omegas()[1..]
        .iter()
        .map(|w| poly_times(n, w))
        .collect();
    let sub = LatticeFrame::new(rest)?;
    let prep = Prepared::new(&sub)?;
    let w1 = prep.reduce_point(&frame.omegas()[0])?;
    let out = prep.exp(0, &[w1])?;
    let y = &out.values[0];
    if y.is_zero() {
        return Err(Error::precision("ω_1 lies in NΛ' to precision"));
    }
    y.inv()
}

/// `ω = (T^(c + 1/2), 1)`, a rank-two frame at distance `|T|^(c+1/2)` from
/// the boundary component `ω_1 = ∞`. Needs an even ramification index.
pub fn ray_frame(tower: &TowerRef, c: i64) -> Result<LatticeFrame> {
    let e = tower.e();
    if e % 2 != 0 {
        return Err(Error::Unsupported(
            "ray frames need an even ramification index".into(),
        ));
    }
    LatticeFrame::new(vec![
        Series::t_frac(tower, e * c + e / 2),
        Series::one(tower),
    ])
}

#[derive(Clone, Debug, Serialize)]
pub struct DegenerationPoint {
    pub c: i64,
    /// Lower bound for the valuation of `E_{k,u}(ω) - limit`.
    pub residual_lead: i64,
    /// The difference vanishes to the working precision.
    pub saturated: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegenerationReport {
    pub k: u32,
    /// Whether `u_1 = 0`, so the limit is the rank-one value `E_{k,u_2}(A)`.
    pub restricts: bool,
    pub points: Vec<DegenerationPoint>,
    pub pass: bool,
}

/// Evaluates `E_{k,u}` at three frames along [`ray_frame`] and checks that the
/// distance to the limit shrinks monotonically and ends below `u^(p/2)`.
pub fn degeneration_ray(
    tower: &TowerRef,
    k: u32,
    u: &CongClass,
    p: i64,
) -> Result<DegenerationReport> {
    if u.rank() != 2 {
        return Err(Error::Unsupported("degeneration rays are rank two".into()));
    }
    let fq = tower.fq();
    let e = tower.e();
    let d = u.level.deg_i();
    let restricts = u.numerators[0].is_zero();
    let limit = if restricts {
        let rank1 = LatticeFrame::new(vec![Series::one(tower)])?;
        let u2 = CongClass::new(u.level.clone(), vec![u.numerators[1].clone()], fq)?;
        Some(
            Prepared::new(&rank1)?
                .partial_values(k, &[u2])?
                .pop()
                .unwrap()
                .pop()
                .unwrap()
                .value,
        )
    } else {
        None
    };
    let c0 = d + (p / 2 + 4 + k as i64 * e - 1) / (k as i64 * e);
    let mut points = Vec::new();
    for c in [c0, c0 + 2, c0 + 4] {
        let prep = Prepared::new(&ray_frame(tower, c)?)?;
        let v = prep
            .partial_values(k, std::slice::from_ref(u))?
            .pop()
            .unwrap()
            .pop()
            .unwrap()
            .value;
        let res = match &limit {
            Some(l) => v.sub(l),
            None => v,
        };
        let saturated = res.is_zero();
        let residual_lead = if saturated { res.prec() } else { res.lead() };
        points.push(DegenerationPoint {
            c,
            residual_lead,
            saturated,
        });
    }
    // once the difference is below the working precision it can only be bounded
    let pass = points.windows(2).all(|w| {
        w[1].residual_lead > w[0].residual_lead || (w[1].saturated && w[1].residual_lead >= p / 2)
    }) && points.last().unwrap().residual_lead >= p / 2;
    Ok(DegenerationReport {
        k,
        restricts,
        points,
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SlopePoint {
    pub c: i64,
    /// `log_q |t(ω)|`.
    pub log_t: Rational64,
    /// `log_q |E_u(ω)|`.
    pub log_e: Rational64,
}

/// Least-squares slope of `log|E_u|` against `log|t|` along [`ray_frame`] for
/// `u = (a/N, 0)`, with `t = 1/e_{NA}(ω_1)`.
pub fn vanishing_slope(
    tower: &TowerRef,
    n: &APoly,
    a: &APoly,
    cs: &[i64],
) -> Result<(Vec<SlopePoint>, Rational64)> {
    let fq = tower.fq();
    if a.deg_i() >= n.deg_i() || a.is_zero() {
        return Err(Error::domain("need 0 <= deg a < deg N"));
    }
    if cs.len() < 2 {
        return Err(Error::domain("need at least two ray points"));
    }
    let u = CongClass::new(n.clone(), vec![a.clone(), APoly::zero()], fq)?;
    let e = tower.e();
    let mut pts = Vec::new();
    for &c in cs {
        let f = ray_frame(tower, c)?;
        let t = boundary_parameter(&f, n, 0)?;
        let v = Prepared::new(&f)?
            .partial_values(1, std::slice::from_ref(&u))?
            .pop()
            .unwrap()
            .pop()
            .unwrap()
            .value;
        if v.is_zero() || t.is_zero() {
            return Err(Error::precision("ray value vanishes to precision"));
        }
        pts.push(SlopePoint {
            c,
            log_t: Rational64::new(-t.lead(), e),
            log_e: Rational64::new(-v.lead(), e),
        });
    }
    let len = Rational64::from_integer(pts.len() as i64);
    let mx = pts.iter().map(|p| p.log_t).sum::<Rational64>() / len;
    let my = pts.iter().map(|p| p.log_e).sum::<Rational64>() / len;
    let sxy: Rational64 = pts.iter().map(|p| (p.log_t - mx) * (p.log_e - my)).sum();
    let sxx: Rational64 = pts.iter().map(|p| (p.log_t - mx) * (p.log_t - mx)).sum();
    if sxx == Rational64::from_integer(0) {
        return Err(Error::precision("|t| constant along the ray"));
    }
    Ok((pts, sxy / sxx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Builtin;
    use crate::series::{FieldSpec, Tower};

    fn tower(q: u32, e: u32, cap: i64) -> TowerRef {
        Tower::new(FieldSpec::new(q, 1, e, 1), cap).unwrap()
    }

    #[test]
    fn full_examples() {
        let t = tower(3, 1, 40);
        let a = Builtin::Carlitz.frame(&t).unwrap();
        assert!(eisenstein_full(&a, 1, 30).unwrap().value.is_exact_zero());
        let lo = tower(2, 1, 32);
        let hi = tower(2, 1, 64);
        let x = eisenstein_full(&Builtin::Carlitz.frame(&lo).unwrap(), 1, 24).unwrap();
        let y = eisenstein_full(&Builtin::Carlitz.frame(&hi).unwrap(), 1, 48).unwrap();
        assert!(!x.value.is_zero());
        let y = Series::from_json(&lo, &y.value.truncate(x.value.prec()).to_json()).unwrap();
        assert!(x.value.approx_equal(&y, x.value.prec()).unwrap());
    }

    #[test]
    fn partial_matches_enumeration() {
        let t = tower(2, 2, 40);
        let fq = t.fq();
        let f = Builtin::Rank2Sqrt.frame(&t).unwrap();
        let u = CongClass::new(APoly::t(), vec![APoly::one(), APoly::zero()], fq).unwrap();
        let v = eisenstein_partial(&f, 3, &u, 20).unwrap();
        // brute force: a = (1/T + c_1, c_2), c in A of degree <= 6
        let mut acc = Series::zero(&t);
        let z0 = f.omegas()[0]
            .div(&Series::from_apoly(&t, &APoly::t()))
            .unwrap();
        for (_, lam) in crate::lattice::enumerate_points(&f, 6).unwrap() {
            acc = acc.add(&z0.add(&lam).pow(-3).unwrap());
        }
        acc = acc.add(&z0.pow(-3).unwrap());
        // the box tail is below u^(3*(2*7 - 0)) relative to |z0|^-3
        let p = v.value.prec().min(acc.prec()).min(30);
        assert!(v.value.approx_equal(&acc, p).unwrap());
    }

    #[test]
    fn direct_and_moebius_agree_small() {
        let t = tower(2, 2, 40);
        let fq = t.fq();
        let f = Builtin::Rank2Sqrt.frame(&t).unwrap();
        let prep = Prepared::new(&f).unwrap();
        for k in [1u32, 2, 3] {
            let table = moebius_table(&t, &APoly::t(), k).unwrap();
            for rep in primitive_monic_reps(&APoly::t(), 2, fq).unwrap() {
                let u = CongClass::new(APoly::t(), rep, fq).unwrap();
                let d = restricted_direct(&prep, k, &u, 16).unwrap();
                let m = restricted_moebius(&prep, &table, std::slice::from_ref(&u))
                    .unwrap()
                    .pop()
                    .unwrap();
                let p = d.value.prec().min(m.value.prec());
                assert!(p - m.value.lead() >= 16);
                assert!(d.value.approx_equal(&m.value, p).unwrap(), "k={k}");
            }
        }
    }

    #[test]
    fn rank_small() {
        use rand::SeedableRng;
        let t = tower(2, 2, 40);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let frames: Vec<LatticeFrame> = (0..5)
            .map(|_| crate::lattice::random_fd_frame(&t, 2, 3, &mut rng).unwrap())
            .collect();
        assert_eq!(eis_rank(&APoly::t(), 1, &frames, 24).unwrap(), 3);
    }

    #[test]
    fn degeneration_and_slope() {
        let t = tower(2, 2, 48);
        let fq = t.fq();
        for rep in primitive_monic_reps(&APoly::t(), 2, fq).unwrap() {
            let u = CongClass::new(APoly::t(), rep, fq).unwrap();
            let r = degeneration_ray(&t, 1, &u, 32).unwrap();
            assert!(r.pass, "{r:?}");
        }
        let (_, s1) = vanishing_slope(&t, &APoly::t(), &APoly::one(), &[3, 4, 5, 6]).unwrap();
        let (_, s2) =
            vanishing_slope(&t, &APoly::t().pow(2, fq), &APoly::t(), &[3, 4, 5, 6]).unwrap();
        eprintln!("slopes {s1} {s2}");
        let near = |s: Rational64, x: i64| {
            (s - Rational64::from_integer(x)) * 4 <= Rational64::from_integer(1)
                && (Rational64::from_integer(x) - s) * 4 <= Rational64::from_integer(1)
        };
        assert!(near(s1, 1) && near(s2, 2));
    }
}
