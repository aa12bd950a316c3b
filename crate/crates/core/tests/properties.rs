use drinfeld_eis::arithmetic::{monic_of_degree, nonzero_classes, APoly, CongClass, Fq, FqConfig};
use drinfeld_eis::config::RunConfig;
use drinfeld_eis::drinfeld::goss_polys;
use drinfeld_eis::eisenstein::Prepared;
use drinfeld_eis::lattice::{gamma_act, random_fd_frame, random_gamma, smb_reduce, Builtin};
use drinfeld_eis::modspace::{cusp_count, CountMethod};
use drinfeld_eis::series::{Series, TowerRef};
use drinfeld_eis::verify::agreement;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const P: i64 = 24;

fn tower(q: u64, e: u32) -> TowerRef {
    RunConfig::new(q, e, 1, P, 3, 1).unwrap().tower(e).unwrap()
}

fn close(a: &Series, b: &Series, digits: i64) -> bool {
    agreement(a, b).value >= digits
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn series_ring_axioms(seed in any::<u64>(), q in prop::sample::select(vec![2u64, 3, 4]), la in -6i64..6, lb in -6i64..6, lc in -6i64..6) {
        let t = tower(q, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Series::random(&t, la, la + P, &mut rng);
        let b = Series::random(&t, lb, lb + P, &mut rng);
        let c = Series::random(&t, lc, lc + P, &mut rng);
        prop_assert!(close(&a.mul(&b).mul(&c), &a.mul(&b.mul(&c)), P - 1));
        prop_assert!(close(&a.mul(&b), &b.mul(&a), P));
        // distributivity holds to the precision of the smaller product
        let lhs = a.mul(&b.add(&c));
        let rhs = a.mul(&b).add(&a.mul(&c));
        prop_assert!(lhs.sub(&rhs).is_zero());
        prop_assert!(close(&a.mul(&a.inv().unwrap()), &Series::one(&t), P - 1));
    }

    #[test]
    fn frobenius_is_a_ring_map(seed in any::<u64>(), q in prop::sample::select(vec![2u64, 3, 5])) {
        let t = tower(q, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Series::random(&t, -3, P - 3, &mut rng);
        let b = Series::random(&t, 1, P + 1, &mut rng);
        let f = |x: &Series| x.frobenius_pow(1).unwrap();
        prop_assert!(f(&a.add(&b)).sub(&f(&a).add(&f(&b))).is_zero());
        prop_assert!(close(&f(&a.mul(&b)), &f(&a).mul(&f(&b)), P - 1));
        prop_assert!(close(&f(&a), &a.pow(q as i64).unwrap(), P - 1));
    }

    #[test]
    fn successive_minima_are_basis_independent(seed in any::<u64>(), q in prop::sample::select(vec![2u64, 3])) {
        let t = tower(q, 3);
        let fq = t.fq();
        let frame = Builtin::Rank3Cbrt.frame(&t).unwrap();
        let base = smb_reduce(&frame).unwrap().minima;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_gamma(3, fq, &mut rng);
        let (moved, aut) = gamma_act(&g, &frame).unwrap();
        // scaling by aut shifts every minimum by the same amount
        let shift = drinfeld_eis::lattice::norm_exponent(&aut);
        let got: Vec<_> = smb_reduce(&moved).unwrap().minima.iter().map(|m| *m + shift).collect();
        prop_assert_eq!(got, base);
    }

    #[test]
    fn partial_series_scale_by_constants(seed in any::<u64>(), q in prop::sample::select(vec![3u64, 4, 5])) {
        let t = tower(q, 2);
        let fq = t.fq();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let frame = random_fd_frame(&t, 2, 1, &mut rng).unwrap();
        let prep = Prepared::new(&frame).unwrap();
        let n = APoly::t();
        let u = nonzero_classes(&n, 2, fq).unwrap()[(seed % 3) as usize].clone();
        let units = fq.units();
        let c = units[(seed as usize / 3) % units.len()];
        let cu = u.scale(&APoly::constant(c), fq);
        let kmax = 3u32;
        let vals = prep.partial_values(kmax, &[u, cu]).unwrap();
        let cs = Series::from_apoly(&t, &APoly::constant(c));
        for k in 1..=kmax as usize {
            let expect = vals[0][k - 1].value.mul(&cs.pow(-(k as i64)).unwrap());
            prop_assert!(close(&vals[1][k - 1].value, &expect, P));
        }
    }

    #[test]
    fn goss_polynomials_give_higher_weights(seed in any::<u64>(), q in prop::sample::select(vec![2u64, 3])) {
        let t = tower(q, 2);
        let fq = t.fq();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let frame = random_fd_frame(&t, 2, 1, &mut rng).unwrap();
        let prep = Prepared::new(&frame).unwrap();
        let kmax = 2 * q as u32 + 1;
        let alphas = prep.exp(4, &[]).unwrap().alphas;
        let goss = goss_polys(&alphas, q, kmax as usize).unwrap();
        let us: Vec<CongClass> = nonzero_classes(&APoly::t(), 2, fq).unwrap();
        for row in prep.partial_values(kmax, &us).unwrap() {
            for k in 1..=kmax as usize {
                prop_assert!(close(&goss[k - 1].eval(&row[0].value), &row[k - 1].value, P));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn cusp_formula_matches_enumeration(q in prop::sample::select(vec![2u64, 3]), d in 1usize..=2, pick in any::<usize>(), r in 2usize..=3) {
        let fq = Fq::new(FqConfig::new(q as u32, 1, 1)).unwrap();
        let ns = monic_of_degree(d, &fq);
        let n = &ns[pick % ns.len()];
        let f = cusp_count(n, r, CountMethod::Formula, &fq).unwrap();
        let e = cusp_count(n, r, CountMethod::Enumerate, &fq).unwrap();
        prop_assert_eq!(f, e);
    }
}
