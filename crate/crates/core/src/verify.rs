//! The verification suite: a fixed registry of identity checks, each run on
//! seeded sample data and reported as pass, fail or precision-insufficient.

use num_rational::Rational64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arithmetic::{
    monic_of_degree, nonzero_classes, primitive_monic_reps, APoly, CongClass, Fq,
};
use crate::config::{RunConfig, GUARD};
use crate::drinfeld::{
    division_points, division_poly, drinfeld_coeffs, exp_coeffs, goss_polys, ExpMethod,
};
use crate::eisenstein::{
    boundary_parameter, degeneration_ray, eis_rank, embed_jn, moebius_table, ray_frame,
    restricted_direct_capped, restricted_moebius, vanishing_slope, Prepared,
};
use crate::error::{Error, Result};
use crate::field::Fe;
use crate::lattice::{
    gamma_act, in_fundamental_domain, is_orthogonal, random_fd_frame, random_gamma,
    random_gamma_level, smb_reduce, Builtin, GammaMatrix, LatticeFrame,
};
use crate::modspace::{curve_invariants, cusp_count, lambda_of, CountMethod};
use crate::series::{Series, TowerRef};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    PrecisionInsufficient,
    ResourceCap,
    Error,
}

/// Agreement of two quantities in `u`-digits past the larger of them. When
/// `bound` is set the difference vanished to the working precision and only
/// a lower bound is known.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Digits {
    pub value: i64,
    pub bound: bool,
}

const EXACT: Digits = Digits {
    value: i64::MAX / 8,
    bound: false,
};

pub fn agreement(a: &Series, b: &Series) -> Digits {
    let scale = [a, b]
        .iter()
        .filter(|x| !x.is_zero())
        .map(|x| x.lead())
        .min();
    agreement_at(a, b, scale)
}

/// Agreement measured against an outside scale, for identities whose two
/// sides may both vanish.
pub fn agreement_at(a: &Series, b: &Series, scale: Option<i64>) -> Digits {
    let d = a.sub(b);
    if d.is_exact_zero() {
        return EXACT;
    }
    let Some(scale) = scale else {
        return Digits {
            value: i64::MIN / 8,
            bound: true,
        };
    };
    if d.is_zero() {
        Digits {
            value: d.prec() - scale,
            bound: true,
        }
    } else {
        Digits {
            value: d.lead() - scale,
            bound: false,
        }
    }
}

/// How small a sum is relative to its largest term.
pub fn cancellation(terms: &[Series]) -> Digits {
    let tower = terms[0].tower().clone();
    let s = terms.iter().fold(Series::zero(&tower), |a, t| a.add(t));
    let Some(scale) = terms
        .iter()
        .filter(|t| !t.is_zero())
        .map(Series::lead)
        .min()
    else {
        return Digits {
            value: i64::MIN / 8,
            bound: true,
        };
    };
    if s.is_exact_zero() {
        EXACT
    } else if s.is_zero() {
        Digits {
            value: s.prec() - scale,
            bound: true,
        }
    } else {
        Digits {
            value: s.lead() - scale,
            bound: false,
        }
    }
}

#[derive(Clone, Debug)]
enum Measure {
    Exact(bool),
    Digits(Option<Digits>, i64),
}

#[derive(Clone, Debug)]
struct Outcome {
    measure: Measure,
    e: i64,
    detail: String,
}

struct Acc {
    worst: Option<Digits>,
}

impl Acc {
    fn new() -> Self {
        Acc { worst: None }
    }

    fn add(&mut self, d: Digits) {
        self.worst = Some(match self.worst {
            Some(w) if (w.value, !w.bound) <= (d.value, !d.bound) => w,
            _ => d,
        });
    }

    fn outcome(self, target: i64, e: i64, detail: impl Into<String>) -> Outcome {
        Outcome {
            measure: Measure::Digits(self.worst, target),
            e,
            detail: detail.into(),
        }
    }
}

/// Inputs shared by every check.
#[derive(Clone, Debug)]
pub struct Ctx {
    pub cfg: RunConfig,
    /// Adds one to `g_1` before the functional-equation residual is taken.
    pub corrupt_g1: bool,
}

impl Ctx {
    pub fn new(cfg: RunConfig) -> Self {
        Ctx {
            cfg,
            corrupt_g1: false,
        }
    }

    fn tower(&self, min_e: u32) -> Result<TowerRef> {
        self.cfg.tower(min_e)
    }

    /// Tower with `extra` more working digits and a residue field of at least
    /// `min_field` elements, for checks that lose precision or need generic points.
    fn wide_tower(&self, min_e: u32, extra: i64, min_field: u64) -> Result<TowerRef> {
        let mut cfg = self.cfg.clone();
        let mut m = cfg.ext_m;
        while self.cfg.q.checked_pow(m).is_some_and(|x| x < min_field) {
            m += cfg.ext_m;
        }
        cfg.ext_m = m;
        cfg.precision += extra;
        cfg.tower(min_e)
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(
            self.cfg
                .seed
                .wrapping_mul(0x9e37_79b9_7f4a_7c15)
                .wrapping_add(salt),
        )
    }

    fn p(&self) -> i64 {
        self.cfg.precision
    }

    fn q(&self) -> u64 {
        self.cfg.q
    }
}

type CheckFn = fn(&Ctx) -> Result<Outcome>;

pub struct Check {
    pub name: &'static str,
    pub about: &'static str,
    /// Below this precision the check cannot separate the values it compares.
    pub min_precision: i64,
    run: CheckFn,
}

pub fn registry() -> Vec<Check> {
    let c = |name, about, min_precision, run| Check {
        name,
        about,
        min_precision,
        run,
    };
    vec![
        c(
            "smb-orthogonality",
            "reduced frames are orthogonal; samples lie in the fundamental domain",
            1,
            check_orthogonality as CheckFn,
        ),
        c(
            "smb-invariance",
            "successive minima are unchanged by GL(r, A) basis changes",
            1,
            check_smb_invariance,
        ),
        c(
            "covariance",
            "E_k, E_{k,u}, F_{k,u} transform with aut(γ, ω)^k",
            1,
            check_covariance,
        ),
        c(
            "functional-equation",
            "e(Tz) = φ_T(e(z)) coefficientwise",
            1,
            check_functional_equation,
        ),
        c(
            "exp-recursion",
            "product and Eisenstein routes to α_i agree",
            1,
            check_exp_recursion,
        ),
        c(
            "division-product",
            "N X Π(1 - E_u X) = φ_N(X) and φ_{T^2} = φ_T ∘ φ_T",
            1,
            check_division_product,
        ),
        c(
            "division-reciprocal",
            "d_u E_u = 1 and φ_N(d_u) = 0",
            1,
            check_division_reciprocal,
        ),
        c(
            "symmetric-functions",
            "ℓ_i(N) = N s_{q^i-1}(E_u)",
            1,
            check_symmetric,
        ),
        c(
            "distribution",
            "(N'/N)^k Σ_{(N/N')u = v} E_{k,u} = E_{k,v}",
            1,
            check_distribution,
        ),
        c(
            "scaling",
            "E_{k,cu} = c^-k E_{k,u} and E_k(cΛ) = c^-k E_k(Λ)",
            1,
            check_scaling,
        ),
        c(
            "moebius-direct",
            "restricted series by Möbius weights and by direct summation agree",
            1,
            check_moebius_direct,
        ),
        c(
            "eisenstein-rank",
            "rank of [F_{k,u}(ω_j)] equals the cusp count",
            16,
            check_rank,
        ),
        c(
            "degeneration",
            "E_{k,u} tends to 0 or to its rank-one restriction at the boundary",
            16,
            check_degeneration,
        ),
        c(
            "goss",
            "E_{k,u} = G_k(E_{1,u}) for k <= q + 1",
            1,
            check_goss,
        ),
        c(
            "boundary-parameter",
            "t is invariant under G_1 and |t| decreases towards the boundary",
            1,
            check_boundary,
        ),
        c(
            "vanishing-order",
            "log|E_u| / log|t| slopes match |a|^(r-1)",
            16,
            check_vanishing_order,
        ),
        c(
            "cusp-count",
            "cusp counts by formula and enumeration agree and are multiplicative",
            1,
            check_cusp_count,
        ),
        c(
            "curve-invariants",
            "genus, cusps, degree and dim Mod_k of the rank-two curves",
            1,
            check_curve_invariants,
        ),
        c(
            "separation",
            "j_N separates sampled fundamental-domain points",
            16,
            check_separation,
        ),
        c(
            "jn-invariance",
            "j_N is projectively invariant under Γ(N)",
            1,
            check_jn_invariance,
        ),
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: &'static str,
    pub about: &'static str,
    pub status: Status,
    /// Ramification index of the tower used.
    pub e: i64,
    pub working_precision: i64,
    /// Digits required and achieved, for residual checks.
    pub target_digits: Option<i64>,
    pub digits: Option<i64>,
    pub digits_is_bound: Option<bool>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub checks: Vec<CheckReport>,
    pub passed: usize,
    pub failed: usize,
    pub insufficient: usize,
    pub other: usize,
}

impl SuiteReport {
    /// 0 all pass, 1 some failure, 2 precision-insufficient only, 4 resource/error only.
    pub fn exit_code(&self) -> i32 {
        if self.failed > 0 {
            1
        } else if self.insufficient > 0 {
            2
        } else if self.other > 0 {
            4
        } else {
            0
        }
    }
}

fn finish(check: &Check, ctx: &Ctx, res: Result<Outcome>) -> CheckReport {
    let mut rep = CheckReport {
        name: check.name,
        about: check.about,
        status: Status::Error,
        e: 0,
        working_precision: ctx.p() + GUARD,
        target_digits: None,
        digits: None,
        digits_is_bound: None,
        detail: String::new(),
    };
    match res {
        Err(err) => {
            rep.status = match err {
                Error::Precision(_) => Status::PrecisionInsufficient,
                Error::Resource(_) => Status::ResourceCap,
                _ => Status::Error,
            };
            rep.detail = err.to_string();
        }
        Ok(o) => {
            rep.e = o.e;
            rep.detail = o.detail;
            rep.status = match o.measure {
                Measure::Exact(ok) => {
                    if ok {
                        Status::Pass
                    } else {
                        Status::Fail
                    }
                }
                Measure::Digits(d, target) => {
                    rep.target_digits = Some(target);
                    match d {
                        None => Status::Pass,
                        Some(d) => {
                            rep.digits = Some(d.value.min(ctx.p() + GUARD));
                            rep.digits_is_bound = Some(d.bound);
                            if d.value >= target {
                                Status::Pass
                            } else if d.bound {
                                Status::PrecisionInsufficient
                            } else {
                                Status::Fail
                            }
                        }
                    }
                }
            };
        }
    }
    rep
}

/// Runs the named checks (all when `names` is empty), concurrently, reporting in registry order.
pub fn run_suite(ctx: &Ctx, names: &[String]) -> Result<SuiteReport> {
    let reg = registry();
    for n in names {
        if !reg.iter().any(|c| c.name == n) {
            return Err(Error::Parse(format!("unknown check {n}")));
        }
    }
    let chosen: Vec<&Check> = reg
        .iter()
        .filter(|c| names.is_empty() || names.iter().any(|n| n == c.name))
        .collect();
    let checks: Vec<CheckReport> = std::thread::scope(|s| {
        let handles: Vec<_> = chosen
            .iter()
            .map(|c| {
                s.spawn(move || {
                    if ctx.p() < c.min_precision {
                        let o = Err(Error::precision(format!(
                            "needs precision >= {} to separate the compared values",
                            c.min_precision
                        )));
                        return finish(c, ctx, o);
                    }
                    finish(c, ctx, (c.run)(ctx))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("check thread panicked"))
            .collect()
    });
    let count = |st: Status| checks.iter().filter(|c| c.status == st).count();
    let passed = count(Status::Pass);
    let failed = count(Status::Fail);
    let insufficient = count(Status::PrecisionInsufficient);
    let other = checks.len() - passed - failed - insufficient;
    Ok(SuiteReport {
        checks,
        passed,
        failed,
        insufficient,
        other,
    })
}

/// Runs one check by name.
pub fn run_check(ctx: &Ctx, name: &str) -> Result<CheckReport> {
    Ok(run_suite(ctx, &[name.to_string()])?.checks.pop().unwrap())
}

fn builtins() -> [Builtin; 3] {
    [Builtin::Carlitz, Builtin::Rank2Sqrt, Builtin::Rank3Cbrt]
}

fn rank2(ctx: &Ctx) -> Result<(TowerRef, LatticeFrame)> {
    let t = ctx.tower(2)?;
    let f = Builtin::Rank2Sqrt.frame(&t)?;
    Ok((t, f))
}

fn classes(n: &APoly, r: usize, fq: &Fq) -> Result<Vec<CongClass>> {
    primitive_monic_reps(n, r, fq)?
        .into_iter()
        .map(|v| CongClass::new(n.clone(), v, fq))
        .collect()
}

fn check_orthogonality(ctx: &Ctx) -> Result<Outcome> {
    let mut ok = true;
    let mut n = 0;
    for b in builtins() {
        let t = ctx.tower(b.min_e())?;
        let f = b.frame(&t)?;
        ok &= is_orthogonal(&smb_reduce(&f)?.frame)? && in_fundamental_domain(&f)?;
        n += 1;
    }
    let t = ctx.tower(6)?;
    let mut rng = ctx.rng(1);
    for r in [2, 3] {
        for _ in 0..5 {
            let f = random_fd_frame(&t, r, 3, &mut rng)?;
            let g = random_gamma(r, t.fq(), &mut rng);
            let gf = LatticeFrame::new(g.rows.iter().map(|row| f.combine(row)).collect())?;
            ok &= in_fundamental_domain(&f)? && is_orthogonal(&smb_reduce(&gf)?.frame)?;
            n += 1;
        }
    }
    Ok(Outcome {
        measure: Measure::Exact(ok),
        e: t.e(),
        detail: format!("{n} frames"),
    })
}

fn check_smb_invariance(ctx: &Ctx) -> Result<Outcome> {
    let mut ok = true;
    let mut rng = ctx.rng(2);
    let mut e = 1;
    for b in builtins() {
        let t = ctx.tower(b.min_e())?;
        e = e.max(t.e());
        let f = b.frame(&t)?;
        let base = smb_reduce(&f)?.minima;
        for _ in 0..10 {
            let g = random_gamma(f.rank(), t.fq(), &mut rng);
            let gf = LatticeFrame::new(g.rows.iter().map(|row| f.combine(row)).collect())?;
            ok &= smb_reduce(&gf)?.minima == base;
        }
    }
    Ok(Outcome {
        measure: Measure::Exact(ok),
        e,
        detail: "10 basis changes per builtin lattice".into(),
    })
}

fn check_covariance(ctx: &Ctx) -> Result<Outcome> {
    let (t, f) = rank2(ctx)?;
    let fq = t.fq();
    let q = ctx.q();
    let kf = (q - 1) as u32;
    let n = APoly::t();
    let us = nonzero_classes(&n, 2, fq)?;
    let reps = classes(&n, 2, fq)?;
    let table = moebius_table(&t, &n, 1)?;
    let prep = Prepared::new(&f)?;
    let full = prep.full_values(kf)?.pop().unwrap().value;
    let mut rng = ctx.rng(3);
    let mut acc = Acc::new();
    for _ in 0..10 {
        let g = random_gamma(2, fq, &mut rng);
        let (gf, aut) = gamma_act(&g, &f)?;
        let gprep = Prepared::new(&gf)?;
        let lhs = gprep.full_values(kf)?.pop().unwrap().value;
        acc.add(agreement(&lhs, &aut.pow(kf as i64)?.mul(&full)));
        let moved: Vec<CongClass> = us.iter().map(|u| u.act(&g.rows, fq)).collect();
        let l = gprep.partial_values(1, &us)?;
        let r = prep.partial_values(1, &moved)?;
        for (a, b) in l.iter().zip(&r) {
            acc.add(agreement(&a[0].value, &aut.mul(&b[0].value)));
        }
        let moved: Vec<CongClass> = reps.iter().map(|u| u.act(&g.rows, fq)).collect();
        let l = restricted_moebius(&gprep, &table, &reps)?;
        let r = restricted_moebius(&prep, &table, &moved)?;
        for (a, b) in l.iter().zip(&r) {
            acc.add(agreement(&a.value, &aut.mul(&b.value)));
        }
    }
    Ok(acc.outcome(
        ctx.p() * 5 / 6,
        t.e(),
        format!("10 seeded γ, k = {kf} (full), 1 (partial, restricted)"),
    ))
}

fn check_functional_equation(ctx: &Ctx) -> Result<Outcome> {
    let mut acc = Acc::new();
    let mut e = 1;
    for b in builtins() {
        let t = ctx.tower(b.min_e())?;
        e = e.max(t.e());
        let mut m = drinfeld_coeffs(&b.frame(&t)?, if ctx.corrupt_g1 { 1 } else { ctx.p() })?;
        if ctx.corrupt_g1 {
            m.phi_t.coeffs[1] = m.phi_t.coeffs[1].add(&Series::one(&t));
        }
        for terms in m.residual_terms()? {
            acc.add(cancellation(&terms));
        }
    }
    Ok(acc.outcome(ctx.p(), e, "coefficients of z^(q^k), k <= r + 1"))
}

fn check_exp_recursion(ctx: &Ctx) -> Result<Outcome> {
    let mut acc = Acc::new();
    let mut e = 1;
    for b in builtins() {
        // Σ_u E_{k,u} cancels heavily for k = q^n - 1
        let t = ctx.wide_tower(b.min_e(), 2 * ctx.p(), 0)?;
        e = e.max(t.e());
        let f = b.frame(&t)?;
        let n = b.rank().max(2);
        let x = exp_coeffs(&f, n, ExpMethod::Product, ctx.p())?;
        let y = exp_coeffs(&f, n, ExpMethod::Eisenstein, 1)?;
        for (a, b) in x.alphas.iter().zip(&y.alphas) {
            acc.add(agreement(a, b));
        }
    }
    Ok(acc.outcome(ctx.p(), e, "α_1..α_max(r,2) on each builtin lattice"))
}

/// `N X Π_u (1 - E_u X)` as dense coefficients.
fn division_product(tower: &TowerRef, n: &APoly, es: &[Series]) -> Vec<Series> {
    let mut poly = vec![Series::one(tower)];
    for x in es {
        let mut next = vec![Series::zero(tower); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i] = next[i].add(c);
            next[i + 1] = next[i + 1].sub(&c.mul(x));
        }
        poly = next;
    }
    let nn = Series::from_apoly(tower, n);
    let mut out = vec![Series::zero(tower)];
    out.extend(poly.iter().map(|c| c.mul(&nn)));
    out
}

fn division_setup(
    ctx: &Ctx,
    n: &APoly,
) -> Result<(TowerRef, LatticeFrame, Vec<CongClass>, Vec<Series>)> {
    let (t, f) = rank2(ctx)?;
    let us = nonzero_classes(n, 2, t.fq())?;
    if us.len() > 256 {
        return Err(Error::Resource("too many division points".into()));
    }
    let es = Prepared::new(&f)?
        .partial_values(1, &us)?
        .into_iter()
        .map(|mut v| v.pop().unwrap().value)
        .collect();
    Ok((t, f, us, es))
}

fn check_division_product(ctx: &Ctx) -> Result<Outcome> {
    let n = APoly::t();
    let (t, f, _, es) = division_setup(ctx, &n)?;
    let q = ctx.q();
    let m = drinfeld_coeffs(&f, ctx.p())?;
    let phi = division_poly(&m.phi_t, &n)?.dense(q);
    let lhs = division_product(&t, &n, &es);
    let big = es.iter().map(Series::lead).min().unwrap();
    let mut acc = Acc::new();
    for (j, (a, b)) in lhs.iter().zip(&phi).enumerate() {
        let d = a.sub(b);
        let scale = Series::from_apoly(&t, &n).lead() + (j as i64 - 1).max(0) * big;
        acc.add(if d.is_zero() {
            Digits {
                value: d.prec() - scale,
                bound: !d.is_exact_zero(),
            }
        } else {
            Digits {
                value: d.lead() - scale,
                bound: false,
            }
        });
    }
    let tt = APoly::t().pow(2, t.fq());
    let phi2 = division_poly(&m.phi_t, &tt)?;
    let comp = m.phi_t.compose(&m.phi_t)?;
    for (a, b) in phi2.coeffs.iter().zip(&comp.coeffs) {
        acc.add(agreement(a, b));
    }
    Ok(acc.outcome(
        ctx.p(),
        t.e(),
        "N = T, rank 2; coefficient X^j scaled by |N| max|E_u|^(j-1)",
    ))
}

fn check_division_reciprocal(ctx: &Ctx) -> Result<Outcome> {
    let n = APoly::t();
    let (t, f, us, es) = division_setup(ctx, &n)?;
    let m = drinfeld_coeffs(&f, ctx.p())?;
    let phi = division_poly(&m.phi_t, &n)?;
    let ds = division_points(&f, &us, ctx.p())?;
    let mut acc = Acc::new();
    for (d, e) in ds.iter().zip(&es) {
        acc.add(agreement(&d.value.mul(e), &Series::one(&t)));
        acc.add(cancellation(&phi.terms(&d.value)?));
    }
    let terms = ds.iter().map(|d| d.terms).max().unwrap_or(0);
    Ok(acc.outcome(
        ctx.p(),
        t.e(),
        format!("N = T, rank 2, {terms} exponential terms"),
    ))
}

fn check_symmetric(ctx: &Ctx) -> Result<Outcome> {
    let q = ctx.q();
    let n = APoly::monomial(Fe::ONE, if q == 2 { 2 } else { 1 });
    let (t, f, _, es) = division_setup(ctx, &n)?;
    let m = drinfeld_coeffs(&f, ctx.p())?;
    let phi = division_poly(&m.phi_t, &n)?;
    let prod = division_product(&t, &n, &es);
    let mut acc = Acc::new();
    for (i, l) in phi.coeffs.iter().enumerate() {
        acc.add(agreement(l, &prod[q.pow(i as u32) as usize]));
    }
    Ok(acc.outcome(
        ctx.p(),
        t.e(),
        format!(
            "N of degree {}, rank 2, i = 0..{}",
            n.deg_i(),
            phi.q_degree()
        ),
    ))
}

fn check_distribution(ctx: &Ctx) -> Result<Outcome> {
    let (t, f) = rank2(ctx)?;
    let fq = t.fq();
    let prep = Prepared::new(&f)?;
    let tt = APoly::t();
    let n = tt.pow(2, fq);
    let kmax = 3u32;
    let mut vs = vec![CongClass::new(
        tt.clone(),
        vec![APoly::zero(), APoly::zero()],
        fq,
    )?];
    vs.extend(nonzero_classes(&tt, 2, fq)?);
    let lifts: Vec<Vec<APoly>> = crate::arithmetic::all_residue_vectors(&tt, 2, fq)?;
    let mut acc = Acc::new();
    let rhs = prep.partial_values(kmax, &vs)?;
    let tinv = Series::from_apoly(&t, &tt).inv()?;
    for (v, r) in vs.iter().zip(&rhs) {
        let us: Vec<CongClass> = lifts
            .iter()
            .map(|w| {
                let nums = v
                    .numerators
                    .iter()
                    .zip(w)
                    .map(|(a, b)| a.add(&tt.mul(b, fq), fq))
                    .collect();
                CongClass::new(n.clone(), nums, fq)
            })
            .collect::<Result<_>>()?;
        let vals = prep.partial_values(kmax, &us)?;
        for k in 1..=kmax as usize {
            let tk = tinv.pow(k as i64)?;
            let terms: Vec<Series> = vals.iter().map(|x| x[k - 1].value.mul(&tk)).collect();
            let s = terms.iter().fold(Series::zero(&t), |a, x| a.add(x));
            // classes fixed by scalars vanish when (q-1) does not divide k
            let scale = terms
                .iter()
                .chain([&r[k - 1].value])
                .filter(|x| !x.is_zero())
                .map(Series::lead)
                .min();
            if scale.is_some() {
                acc.add(agreement_at(&s, &r[k - 1].value, scale));
            }
        }
    }
    Ok(acc.outcome(ctx.p(), t.e(), "N = T^2 over N' = T, k = 1..3, rank 2"))
}

fn check_scaling(ctx: &Ctx) -> Result<Outcome> {
    let (t, f) = rank2(ctx)?;
    let fq = t.fq();
    let q = ctx.q();
    let kmax = q as u32 + 1;
    let prep = Prepared::new(&f)?;
    let us = nonzero_classes(&APoly::t(), 2, fq)?;
    let base = prep.partial_values(kmax, &us)?;
    let mut acc = Acc::new();
    for c in fq.units() {
        let cp = APoly::constant(c);
        let cs = Series::from_apoly(&t, &cp);
        let scaled: Vec<CongClass> = us.iter().map(|u| u.scale(&cp, fq)).collect();
        let vals = prep.partial_values(kmax, &scaled)?;
        for (a, b) in vals.iter().zip(&base) {
            for k in 0..kmax as usize {
                acc.add(agreement(
                    &a[k].value,
                    &b[k].value.mul(&cs.pow(-(k as i64 + 1))?),
                ));
            }
        }
    }
    let mut rng = ctx.rng(4);
    let c = Series::random(&t, -3, t.rel_cap() - 3, &mut rng);
    let kf = 2 * (q as u32 - 1);
    let lhs = Prepared::new(&f.scale(&c))?.full_values(kf)?;
    let rhs = prep.full_values(kf)?;
    for k in [(q - 1) as usize, kf as usize] {
        acc.add(agreement(
            &lhs[k - 1].value,
            &rhs[k - 1].value.mul(&c.pow(-(k as i64))?),
        ));
    }
    Ok(acc.outcome(
        ctx.p(),
        t.e(),
        format!("c in F_q^*, k <= {kmax}; random scalar, k = q-1, 2(q-1)"),
    ))
}

const DIRECT_CHECK_CAP: u64 = 1 << 18;

fn check_moebius_direct(ctx: &Ctx) -> Result<Outcome> {
    let (t, f) = rank2(ctx)?;
    let fq = t.fq();
    let n = APoly::t();
    let prep = Prepared::new(&f)?;
    let reps = classes(&n, 2, fq)?;
    let mut acc = Acc::new();
    let mut used = Vec::new();
    let mut skipped = Vec::new();
    // the direct sum converges like |a|^-k, so small weights may not fit the enumeration cap
    for k in 1..=(2 * ctx.q() as u32 + 4) {
        if used.len() == 3 {
            break;
        }
        let direct: Result<Vec<_>> = reps
            .iter()
            .map(|u| restricted_direct_capped(&prep, k, u, ctx.p(), DIRECT_CHECK_CAP))
            .collect();
        let direct = match direct {
            Ok(d) => d,
            Err(Error::Resource(_)) => {
                skipped.push(k);
                continue;
            }
            Err(e) => return Err(e),
        };
        let table = moebius_table(&t, &n, k)?;
        let m = restricted_moebius(&prep, &table, &reps)?;
        for (d, mv) in direct.iter().zip(&m) {
            acc.add(agreement(&d.value, &mv.value));
        }
        used.push(k);
    }
    if used.is_empty() {
        return Err(Error::Resource(
            "direct sum exceeds the enumeration cap for every weight tried".into(),
        ));
    }
    let detail = format!(
        "N = T, rank 2, all classes, k in {used:?}; over the enumeration cap: k in {skipped:?}"
    );
    Ok(acc.outcome(ctx.p(), t.e(), detail))
}

/// `(r, N)` cases for the rank check at the configured `q`.
fn rank_cases(q: u64, fq: &Fq) -> Vec<(usize, APoly)> {
    let mut v = vec![(2, APoly::t())];
    if q == 2 {
        v.push((2, APoly::t().pow(2, fq)));
        v.push((3, APoly::t()));
    }
    v
}

pub fn rank_case(ctx: &Ctx, r: usize, n: &APoly, k: u32) -> Result<(usize, u128)> {
    // sample frames over a larger residue field so they are in general position
    let t = ctx.wide_tower(r as u32, 0, 16)?;
    let fq = t.fq();
    let c = cusp_count(n, r, CountMethod::Formula, fq)?;
    let mut rng = ctx.rng(5 + r as u64 * 7 + n.deg_i() as u64);
    let frames: Vec<LatticeFrame> = (0..2 * c as usize + 2)
        .map(|_| random_fd_frame(&t, r, 1, &mut rng))
        .collect::<Result<_>>()?;
    Ok((eis_rank(n, k, &frames, ctx.p())?, c))
}

fn check_rank(ctx: &Ctx) -> Result<Outcome> {
    let q = ctx.q();
    let tower = ctx.tower(1)?;
    let fq = tower.fq();
    let mut ok = true;
    let mut detail = Vec::new();
    for (r, n) in rank_cases(q, &fq) {
        let mut ks = vec![1u32, (q - 1) as u32, q as u32];
        ks.dedup();
        for k in ks {
            let (rank, c) = rank_case(ctx, r, &n, k)?;
            ok &= rank as u128 == c;
            detail.push(format!("r={r} deg N={} k={k}: {rank}/{c}", n.deg_i()));
        }
    }
    Ok(Outcome {
        measure: Measure::Exact(ok),
        e: ctx.cfg.ram_e as i64,
        detail: detail.join("; "),
    })
}

fn check_degeneration(ctx: &Ctx) -> Result<Outcome> {
    let t = ctx.tower(2)?;
    let fq = t.fq();
    let mut ok = true;
    let mut n = 0;
    for k in [1u32, (ctx.q() - 1) as u32] {
        for u in classes(&APoly::t(), 2, fq)? {
            ok &= degeneration_ray(&t, k, &u, ctx.p())?.pass;
            n += 1;
        }
    }
    Ok(Outcome {
        measure: Measure::Exact(ok),
        e: t.e(),
        detail: format!("{n} rays, 3 points each"),
    })
}

fn check_goss(ctx: &Ctx) -> Result<Outcome> {
    let (t, f) = rank2(ctx)?;
    let q = ctx.q();
    let kmax = q as usize + 1;
    let prep = Prepared::new(&f)?;
    let alphas = prep.exp(2, &[])?.alphas;
    let gs = goss_polys(&alphas, q, kmax)?;
    let us = nonzero_classes(&APoly::t(), 2, t.fq())?;
    let vals = prep.partial_values(kmax as u32, &us)?;
    let mut acc = Acc::new();
    let mut monomial = true;
    for (k, g) in gs.iter().enumerate().take(q as usize) {
        monomial &=
            g.coeffs[..=k].iter().all(Series::is_exact_zero) && g.coeffs[k + 1].is_zero() == false;
    }
    for v in &vals {
        for (k, g) in gs.iter().enumerate() {
            acc.add(agreement(&g.eval(&v[0].value), &v[k].value));
        }
    }
    if !monomial {
        return Ok(Outcome {
            measure: Measure::Exact(false),
            e: t.e(),
            detail: "G_k != X^k for some k <= q".into(),
        });
    }
    Ok(acc.outcome(ctx.p(), t.e(), format!("N = T, rank 2, k <= {kmax}")))
}

fn check_boundary(ctx: &Ctx) -> Result<Outcome> {
    let t = ctx.tower(6)?;
    let fq = t.fq();
    let n = APoly::t();
    let mut rng = ctx.rng(6);
    let mut acc = Acc::new();
    for r in [2usize, 3] {
        for _ in 0..3 {
            let f = random_fd_frame(&t, r, 2, &mut rng)?;
            let base = boundary_parameter(&f, &n, ctx.p())?;
            let mut g = GammaMatrix::identity(r);
            for j in 1..r {
                g.rows[0][j] = n.mul(
                    &APoly::from_index(rand::Rng::gen_range(&mut rng, 0..fq.q() * fq.q()), 2, fq),
                    fq,
                );
            }
            if r == 3 {
                g.rows[1][2] = n.clone();
            }
            let (gf, aut) = gamma_act(&g, &f)?;
            acc.add(agreement(&aut, &Series::one(&t)));
            acc.add(agreement(&boundary_parameter(&gf, &n, ctx.p())?, &base));
        }
    }
    let leads: Vec<i64> = (1..=5)
        .map(|c| boundary_parameter(&ray_frame(&t, c)?, &n, 0).map(|x| x.lead()))
        .collect::<Result<_>>()?;
    if !leads.windows(2).all(|w| w[1] > w[0]) {
        return Ok(Outcome {
            measure: Measure::Exact(false),
            e: t.e(),
            detail: format!("|t| not decreasing: {leads:?}"),
        });
    }
    Ok(acc.outcome(
        ctx.p(),
        t.e(),
        format!("G_1 invariance for ranks 2, 3; ray valuations {leads:?}"),
    ))
}

pub fn slope_cases(ctx: &Ctx) -> Result<Vec<(String, Rational64, Rational64)>> {
    let t = ctx.tower(2)?;
    let fq = t.fq();
    let q = ctx.q() as i64;
    let cs = [3, 4, 5, 6];
    let (_, s1) = vanishing_slope(&t, &APoly::t(), &APoly::one(), &cs)?;
    let (_, s2) = vanishing_slope(&t, &APoly::t().pow(2, fq), &APoly::t(), &cs)?;
    Ok(vec![
        ("a = 1, N = T".into(), s1, Rational64::from_integer(1)),
        ("a = T, N = T^2".into(), s2, Rational64::from_integer(q)),
    ])
}

fn check_vanishing_order(ctx: &Ctx) -> Result<Outcome> {
    let cases = slope_cases(ctx)?;
    let quarter = Rational64::new(1, 4);
    let ok = cases
        .iter()
        .all(|(_, s, x)| *s - *x <= quarter && *x - *s <= quarter);
    let detail = cases
        .iter()
        .map(|(n, s, x)| format!("{n}: slope {s}, expected {x}"))
        .collect::<Vec<_>>()
        .join("; ");
    Ok(Outcome {
        measure: Measure::Exact(ok),
        e: ctx.tower(2)?.e(),
        detail,
    })
}

const CUSP_ENUM_BUDGET: u64 = 1 << 17;

fn check_cusp_count(ctx: &Ctx) -> Result<Outcome> {
    let tower = ctx.tower(1)?;
    let fq = tower.fq();
    let mut ok = true;
    let mut n_checked = 0;
    let mut n_skipped = 0;
    for r in [2usize, 3] {
        for d in 1..=ctx.cfg.deg_cap.min(3) {
            for n in monic_of_degree(d, &fq) {
                let f = cusp_count(&n, r, CountMethod::Formula, &fq)?;
                if fq
                    .q()
                    .checked_pow((r * d) as u32)
                    .is_none_or(|c| c > CUSP_ENUM_BUDGET)
                {
                    n_skipped += 1;
                } else {
                    match cusp_count(&n, r, CountMethod::Enumerate, &fq) {
                        Ok(e) => {
                            ok &= e == f;
                            n_checked += 1;
                        }
                        Err(Error::Resource(_)) => n_skipped += 1,
                        Err(e) => return Err(e),
                    }
                }
                // multiplicativity over coprime splittings N = N1 N2
                for n1 in crate::arithmetic::monic_divisors(&n, &fq)? {
                    let (n2, _) = n.div_rem(&n1, &fq)?;
                    if n1.is_constant() || n2.is_constant() || !n1.gcd(&n2, &fq).is_one() {
                        continue;
                    }
                    let q1 = fq.q() as u128 - 1;
                    let a = cusp_count(&n1, r, CountMethod::Formula, &fq)?;
                    let b = cusp_count(&n2, r, CountMethod::Formula, &fq)?;
                    ok &= a * q1 * b * q1 == f * q1;
                }
            }
        }
    }
    Ok(Outcome {
        measure: Measure::Exact(ok),
        e: 1,
        detail: format!("{n_checked} levels enumerated, {n_skipped} over the enumeration budget"),
    })
}

fn check_curve_invariants(ctx: &Ctx) -> Result<Outcome> {
    let tower = ctx.tower(1)?;
    let fq = tower.fq();
    let q = fq.q() as u128;
    let mut ok = true;
    let mut genera = Vec::new();
    for d in 1..=ctx.cfg.deg_cap.min(3) {
        for n in monic_of_degree(d, &fq) {
            let inv = curve_invariants(&n, 5, &fq)?;
            ok &= inv.cusps == cusp_count(&n, 2, CountMethod::Formula, &fq)?;
            ok &= inv.lambda == lambda_of(&n, &fq)?;
            let inc = q.pow(d as u32) * inv.lambda / (q * q - 1);
            ok &= inv
                .dim_mod
                .values()
                .collect::<Vec<_>>()
                .windows(2)
                .all(|w| w[1] - w[0] == inc);
            ok &= inv.dim_mod[&1] == inv.cusps;
            if d == 2 {
                genera.push(inv.genus);
            }
            if d == 1 && q == 2 {
                ok &= inv.dim_mod.iter().all(|(k, v)| *v == 1 + 2 * *k as u128);
                ok &= inv.genus == 0 && inv.deg_m == 2;
            }
        }
    }
    genera.sort();
    genera.dedup();
    if q == 2 && ctx.cfg.deg_cap >= 2 {
        ok &= genera == vec![4, 5, 6];
    }
    Ok(Outcome {
        measure: Measure::Exact(ok),
        e: 1,
        detail: format!("degree-2 genera {genera:?}"),
    })
}

pub fn separation_frames(ctx: &Ctx, count: usize) -> Result<(TowerRef, Vec<LatticeFrame>)> {
    let t = ctx.tower(2)?;
    let mut rng = ctx.rng(7);
    let frames = (0..count)
        .map(|_| random_fd_frame(&t, 2, 1, &mut rng))
        .collect::<Result<_>>()?;
    Ok((t, frames))
}

fn check_separation(ctx: &Ctx) -> Result<Outcome> {
    let (t, frames) = separation_frames(ctx, 10)?;
    let n = APoly::t();
    let vecs = frames
        .iter()
        .map(|f| embed_jn(f, &n, ctx.p()))
        .collect::<Result<Vec<_>>>()?;
    let mut ok = true;
    for i in 0..vecs.len() {
        for j in i + 1..vecs.len() {
            ok &= !vecs[i].projectively_equal(&vecs[j], ctx.p())?;
        }
    }
    Ok(Outcome {
        measure: Measure::Exact(ok),
        e: t.e(),
        detail: "10 seeded frames, 45 pairs, N = T".into(),
    })
}

fn check_jn_invariance(ctx: &Ctx) -> Result<Outcome> {
    let (t, f) = rank2(ctx)?;
    let fq = t.fq();
    let n = APoly::t();
    let base = embed_jn(&f, &n, ctx.p())?;
    let bn = base.normalized()?;
    let mut rng = ctx.rng(8);
    let mut acc = Acc::new();
    for _ in 0..5 {
        let g = random_gamma_level(2, &n, fq, &mut rng);
        let (gf, _) = gamma_act(&g, &f)?;
        let v = embed_jn(&gf, &n, ctx.p())?.normalized()?;
        for (a, b) in v.iter().zip(&bn) {
            acc.add(agreement(a, b));
        }
    }
    Ok(acc.outcome(ctx.p(), t.e(), "5 seeded γ in Γ(T), rank 2"))
}
