//! Exponential functions of `F_q`-subspaces and of lattices.
//!
//! For an `F_q`-space `W` and `b ∉ W`, with `c = e_W(b)`,
//!
//! ```text
//! e_{W + F_q b}(x) = e_W(x) - e_W(x)^q / c^(q-1)
//! ```
//!
//! so the exponential of a lattice is built one basis vector at a time,
//! tracking its coefficients `α_i` and its values at chosen points. Adding
//! an orthogonal basis in order of increasing norm makes `|c|` grow
//! monotonically, which bounds every later correction; see [`lattice_exponential`].

use crate::error::{Error, Result};
use crate::lattice::LatticeFrame;
use crate::series::{Series, TowerRef};

/// Running state of `e_W` for a growing subspace `W`.
#[derive(Clone, Debug)]
pub struct ExpState {
    tower: TowerRef,
    q: u64,
    /// Coefficients of `e_W(z) = Σ α_i z^(q^i)`.
    pub alphas: Vec<Series>,
    /// `e_W(b)` for the basis vectors still to be added, in order.
    pending: Vec<Series>,
    /// `e_W(x)` for query points.
    pub values: Vec<Series>,
    /// Number of vectors added so far.
    pub dim: usize,
}

impl ExpState {
    pub fn new(tower: &TowerRef, basis: Vec<Series>, points: Vec<Series>) -> Self {
        ExpState {
            tower: tower.clone(),
            q: tower.q(),
            alphas: vec![Series::one(tower)],
            pending: basis,
            values: points,
            dim: 0,
        }
    }

    /// `e_W` at the next basis vector.
    pub fn next_c(&self) -> Option<&Series> {
        self.pending.get(self.dim)
    }

    pub fn remaining(&self) -> usize {
        self.pending.len() - self.dim
    }

    /// Adjoin the next basis vector.
    pub fn advance(&mut self) -> Result<()> {
        let c = self
            .next_c()
            .ok_or_else(|| Error::Resource("subspace basis exhausted".into()))?
            .clone();
        if c.is_zero() {
            return Err(Error::precision(format!(
                "exponential at basis vector {} vanishes to precision",
                self.dim + 1
            )));
        }
        let inv = c.pow(self.q as i64 - 1)?.inv()?;
        let step = |y: &Series| -> Result<Series> { Ok(y.sub(&y.frobenius_pow(1)?.mul(&inv))) };
        let n = self.alphas.len();
        let top = self.alphas[n - 1].frobenius_pow(1)?.mul(&inv).neg();
        for i in (1..n).rev() {
            let corr = self.alphas[i - 1].frobenius_pow(1)?.mul(&inv);
            self.alphas[i] = self.alphas[i].sub(&corr);
        }
        self.alphas.push(top);
        self.pending[self.dim] = Series::zero(&self.tower);
        for j in self.dim + 1..self.pending.len() {
            self.pending[j] = step(&self.pending[j])?;
        }
        for v in self.values.iter_mut() {
            *v = step(v)?;
        }
        self.dim += 1;
        Ok(())
    }
}

/// `F_q`-basis `{T^l ω_i}` of an orthogonal frame, by increasing norm
/// (ties broken by frame index). Entries are `(l, i, T^l ω_i)`.
pub fn fq_basis(frame: &LatticeFrame, count: usize) -> Vec<(i64, usize, Series)> {
    let e = frame.tower().e();
    let mut keys: Vec<(i64, usize, i64)> = Vec::with_capacity(count * frame.rank());
    for (i, w) in frame.omegas().iter().enumerate() {
        for l in 0..count as i64 {
            keys.push((w.lead() - e * l, i, l));
        }
    }
    keys.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    keys.truncate(count);
    keys.into_iter()
        .map(|(_, i, l)| (l, i, frame.omegas()[i].shift(-e * l)))
        .collect()
}

#[derive(Clone, Debug)]
pub struct ExpOutput {
    /// `α_0, ..., α_n`, each truncated to its certified precision.
    pub alphas: Vec<Series>,
    /// `e_Λ(x)` at the requested points, certified likewise.
    pub values: Vec<Series>,
    /// Basis vectors adjoined before stopping.
    pub steps: usize,
    /// Largest `T`-degree among the adjoined basis vectors.
    pub d_used: i64,
}

fn lead_or(x: &Series, dflt: i128) -> i128 {
    if x.is_zero() {
        dflt
    } else {
        x.lead() as i128
    }
}

/// Exponential of the lattice spanned by an orthogonal frame sorted by
/// increasing norm (an SMB), with `α_0..=α_{n_alpha}` and point values known
/// to `rel` digits beyond their leading term.
///
/// Stopping rule: let `v_c` be the valuation of the next `c`. All later `c`
/// are at least as large, so with `B_0 = v(α_0) = 0`,
///
/// ```text
/// t_i = q B_{i-1} - (q-1) v_c,   B_i = min(v(α_i), t_i)
/// ```
///
/// bounds every future correction of `α_i` by `t_i` and every future `α_i` by `B_i`.
/// A point value `y` with `v(y) >= v_c` changes by at most `q v(y) - (q-1) v_c`.
pub fn lattice_exponential(
    frame: &LatticeFrame,
    n_alpha: usize,
    points: &[Series],
    rel: i64,
) -> Result<ExpOutput> {
    let mut count = 24 + 2 * n_alpha;
    loop {
        match run_lattice(frame, n_alpha, points, rel, count) {
            Err(Error::Resource(msg)) if msg == "subspace basis exhausted" && count < 2048 => {
                count *= 2
            }
            other => return other,
        }
    }
}

fn run_lattice(
    frame: &LatticeFrame,
    n_alpha: usize,
    points: &[Series],
    rel: i64,
    count: usize,
) -> Result<ExpOutput> {
    let tower = frame.tower().clone();
    let q = tower.q() as i128;
    let basis = fq_basis(frame, count);
    let degrees: Vec<i64> = basis.iter().map(|b| b.0).collect();
    let mut st = ExpState::new(
        &tower,
        basis.into_iter().map(|b| b.2).collect(),
        points.to_vec(),
    );
    loop {
        let c = st
            .next_c()
            .ok_or_else(|| Error::Resource("subspace basis exhausted".into()))?;
        if c.is_zero() {
            return Err(Error::precision("lattice exponential lost all precision"));
        }
        let vc = c.lead() as i128;
        let mut tails = vec![i128::MAX; n_alpha + 1];
        let mut done = st.alphas.len() > n_alpha;
        let mut b_prev: i128 = 0;
        for i in 1..=n_alpha {
            let t = q * b_prev - (q - 1) * vc;
            let a = st.alphas.get(i);
            let la = a.map_or(i128::MAX, |a| lead_or(a, a.prec() as i128));
            tails[i] = t;
            b_prev = la.min(t);
            if let Some(a) = a {
                let want = if a.is_zero() {
                    a.prec() as i128
                } else {
                    a.lead() as i128 + rel as i128
                };
                if t < want {
                    done = false;
                }
            }
        }
        let mut ptails = Vec::with_capacity(st.values.len());
        for y in &st.values {
            let ly = lead_or(y, y.prec() as i128);
            if ly < vc {
                done = false;
                ptails.push(i128::MIN);
                continue;
            }
            let t = q * ly - (q - 1) * vc;
            let want = if y.is_zero() {
                y.prec() as i128
            } else {
                ly + rel as i128
            };
            if t < want {
                done = false;
            }
            ptails.push(t);
        }
        if done {
            let clamp = |t: i128| t.min(i64::MAX as i128 / 4) as i64;
            let alphas = st.alphas[..=n_alpha]
                .iter()
                .zip(&tails)
                .map(|(a, &t)| a.truncate(clamp(t)))
                .collect();
            let values = st
                .values
                .iter()
                .zip(&ptails)
                .map(|(y, &t)| y.truncate(clamp(t)))
                .collect();
            let d_used = degrees[..st.dim].iter().copied().max().unwrap_or(0);
            return Ok(ExpOutput {
                alphas,
                values,
                steps: st.dim,
                d_used,
            });
        }
        st.advance()?;
    }
}

/// Exponential of the finite space spanned by `basis` (orthogonal, by increasing norm).
pub fn subspace_exponential(
    tower: &TowerRef,
    basis: &[Series],
    points: &[Series],
) -> Result<ExpState> {
    let mut st = ExpState::new(tower, basis.to_vec(), points.to_vec());
    while st.remaining() > 0 {
        st.advance()?;
    }
    Ok(st)
}

/// Power series in an auxiliary variable `z`, truncated at `z^len`.
pub type ZSeries = Vec<Series>;

/// `Σ α_i z^(q^i)` truncated at `z^len`.
pub fn additive_to_z(alphas: &[Series], q: u64, len: usize, tower: &TowerRef) -> ZSeries {
    let mut out = vec![Series::zero(tower); len];
    let mut deg = 1u64;
    for a in alphas {
        if deg as usize >= len {
            break;
        }
        out[deg as usize] = a.clone();
        deg = deg.saturating_mul(q);
    }
    out
}

pub fn z_mul(a: &ZSeries, b: &ZSeries) -> ZSeries {
    let len = a.len().min(b.len());
    let tower = a[0].tower();
    let mut out = vec![Series::zero(tower); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_exact_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if !y.is_exact_zero() {
                out[i + j] = out[i + j].add(&x.mul(y));
            }
        }
    }
    out
}

pub fn z_inv(a: &ZSeries) -> Result<ZSeries> {
    let len = a.len();
    let inv0 = a[0].inv()?;
    let mut out = vec![Series::zero(a[0].tower()); len];
    out[0] = inv0.clone();
    for k in 1..len {
        let mut s = Series::zero(a[0].tower());
        for j in 1..=k {
            if !a[j].is_exact_zero() {
                s = s.add(&a[j].mul(&out[k - j]));
            }
        }
        out[k] = s.mul(&inv0).neg();
    }
    Ok(out)
}

/// Number of `α_i` with `q^i <= bound` (as an index range end, exclusive).
pub fn alphas_up_to(q: u64, bound: u64) -> usize {
    let mut n = 0;
    let mut deg = 1u64;
    while deg <= bound {
        n += 1;
        deg = deg.saturating_mul(q);
    }
    n
}

/// `Σ_{w ∈ W} (x + w)^(-k)` for `k = 1..=kmax`, from `y = e_W(x)` and the
/// coefficients of `e_W`: the coefficient of `z^(k-1)` in `1/(y + e_W(z))`,
/// times `(-1)^(k-1)`.
pub fn shifted_power_sums(
    y: &Series,
    alphas: &[Series],
    q: u64,
    kmax: usize,
) -> Result<Vec<Series>> {
    let tower = y.tower();
    let mut den = additive_to_z(alphas, q, kmax, tower);
    den[0] = y.clone();
    let inv = z_inv(&den)?;
    Ok(inv
        .into_iter()
        .enumerate()
        .map(|(j, c)| if j % 2 == 1 { c.neg() } else { c })
        .collect())
}

/// `Σ'_{w ∈ W} w^(-k)` for `k = 1..=kmax` from `-[z^k] z / e_W(z)`.
pub fn power_sums(alphas: &[Series], q: u64, kmax: usize, tower: &TowerRef) -> Result<Vec<Series>> {
    // z / e(z) = 1 / (1 + Σ_{i>=1} α_i z^(q^i - 1))
    let len = kmax + 1;
    let mut den = vec![Series::zero(tower); len];
    den[0] = Series::one(tower);
    let mut deg = q;
    for a in alphas.iter().skip(1) {
        if (deg - 1) as usize >= len {
            break;
        }
        den[(deg - 1) as usize] = a.clone();
        deg = deg.saturating_mul(q);
    }
    let inv = z_inv(&den)?;
    Ok(inv.into_iter().skip(1).map(|c| c.neg()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::APoly;
    use crate::lattice::{Builtin, LatticeFrame};
    use crate::series::{FieldSpec, Tower};

    fn tower(q: u32, e: u32, cap: i64) -> TowerRef {
        Tower::new(FieldSpec::new(q, 1, e, 1), cap).unwrap()
    }

    /// Brute-force `Σ_{w ∈ W} (x + w)^(-k)` over all `F_q`-combinations.
    fn brute_shift_sum(basis: &[Series], x: &Series, k: i64) -> Series {
        let tower = x.tower();
        let fq = tower.fq();
        let n = basis.len();
        let mut acc = Series::zero(tower);
        for idx in 0..fq.q().pow(n as u32) {
            let c = APoly::from_index(idx, n, fq);
            let mut w = x.clone();
            for (i, b) in basis.iter().enumerate() {
                w = w.add(&b.scale(fq.embed(c.coeff(i))));
            }
            acc = acc.add(&w.pow(-k).unwrap());
        }
        acc
    }

    #[test]
    fn subspace_exp_matches_product() {
        for q in [2u32, 3] {
            let t = tower(q, 2, 40);
            let basis = vec![
                Series::one(&t),
                Series::t_frac(&t, 1),
                Series::t_frac(&t, 2),
            ];
            let x = Series::t_frac(&t, 3).add(&Series::u_pow(&t, 1));
            let st = subspace_exponential(&t, &basis, &[x.clone()]).unwrap();
            // product oracle: x * prod_{w != 0} (1 - x/w)
            let fq = t.fq();
            let mut prod = x.clone();
            for idx in 1..fq.q().pow(3) {
                let c = APoly::from_index(idx, 3, fq);
                let mut w = Series::zero(&t);
                for (i, b) in basis.iter().enumerate() {
                    w = w.add(&b.scale(fq.embed(c.coeff(i))));
                }
                prod = prod.mul(&Series::one(&t).sub(&x.div(&w).unwrap()));
            }
            assert!(st.values[0].rel_equal(&prod, 30).unwrap());
            // polynomial form agrees with the tracked value
            let mut poly = Series::zero(&t);
            for (i, a) in st.alphas.iter().enumerate() {
                poly = poly.add(&a.mul(&x.frobenius_pow(i as u32).unwrap()));
            }
            assert!(poly.rel_equal(&st.values[0], 30).unwrap());
            for k in 1..=5 {
                let sums = shifted_power_sums(&st.values[0], &st.alphas, t.q(), k).unwrap();
                let brute = brute_shift_sum(&basis, &x, k as i64);
                let p = sums[k - 1].prec().min(brute.prec());
                assert!(sums[k - 1].approx_equal(&brute, p).unwrap(), "q={q} k={k}");
            }
        }
    }

    #[test]
    fn lattice_exp_tail_is_honest() {
        let lo = tower(2, 2, 40);
        let hi = tower(2, 2, 80);
        let f_lo = Builtin::Rank2Sqrt.frame(&lo).unwrap();
        let f_hi = Builtin::Rank2Sqrt.frame(&hi).unwrap();
        let x_lo = Series::u_pow(&lo, 1);
        let x_hi = Series::u_pow(&hi, 1);
        let a = lattice_exponential(&f_lo, 3, &[x_lo], 30).unwrap();
        let b = lattice_exponential(&f_hi, 3, &[x_hi], 70).unwrap();
        for (x, y) in a.alphas.iter().zip(&b.alphas) {
            let y = Series::from_json(&lo, &y.truncate(x.prec()).to_json()).unwrap();
            assert!(x.approx_equal(&y, x.prec()).unwrap());
            assert!(x.rel_prec() >= 30);
        }
        let y =
            Series::from_json(&lo, &b.values[0].truncate(a.values[0].prec()).to_json()).unwrap();
        assert!(a.values[0].approx_equal(&y, a.values[0].prec()).unwrap());
    }

    #[test]
    fn carlitz_power_sums() {
        // Σ'_{a ∈ A} a^(-k) vanishes unless (q-1) | k
        let t = tower(3, 1, 40);
        let f = LatticeFrame::new(vec![Series::one(&t)]).unwrap();
        let out = lattice_exponential(&f, 2, &[], 30).unwrap();
        let sums = power_sums(&out.alphas, 3, 8, &t).unwrap();
        for (k, s) in sums.iter().enumerate() {
            let k = k + 1;
            if k % 2 == 1 {
                assert!(s.is_zero(), "k={k}");
            } else {
                assert!(!s.is_zero(), "k={k}");
            }
        }
    }
}
