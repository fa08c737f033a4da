use std::sync::Arc;

use proptest::prelude::*;

use anderson_core::extension::residue_symbol;
use anderson_core::fq::Fq;
use anderson_core::group::{AbelianGroup, GroupRing};
use anderson_core::lattice::FiniteThetaModule;
use anderson_core::lvalues::{fitting_monic_of, forget_group};
use anderson_core::matrix::Matrix;
use anderson_core::poly::poly_a;
use anderson_core::series::SeriesRing;
use anderson_core::Ring;

fn group(i: usize) -> (&'static str, u64) {
    [("Z/2", 3), ("Z/3", 2), ("Z/4", 3), ("Z/2 x Z/2", 2), ("Z/3", 3)][i % 5]
}

fn monic(p: u32) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0..p, 0..4).prop_map(|mut v| {
        v.push(1);
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fitting_bridge(g in 0usize..5, rank in 1usize..4, entries in prop::collection::vec(0u32..6, 64)) {
        let (spec, p) = group(g);
        let f = Fq::prime(p).unwrap();
        let grp = Arc::new(AbelianGroup::parse(spec, p).unwrap());
        let ring = GroupRing::new(f.clone(), grp.clone());
        let n = ring.order();
        let action = Matrix::from_fn(rank, rank, |i, j| (0..n).map(|h| entries[(i * rank + j) * n + h] % p as u32).collect::<Vec<u32>>());
        let module = FiniteThetaModule { ring, rank, parts: vec![action], modulus: None };
        let fit = fitting_monic_of(&module);
        let a = poly_a(&f);
        let x: Vec<Vec<u32>> = (0..n).map(|h| a.normalize(fit.iter().map(|c| c[h]).collect())).collect();
        let flat: Vec<u32> = fitting_monic_of(&forget_group(&module)).iter().map(|c| c[0]).collect();
        prop_assert_eq!(GroupRing::new(a.clone(), grp).det_g(&x), a.normalize(flat));
    }

    #[test]
    fn symbol_multiplicative_in_the_modulus(b in prop::collection::vec(0u32..5, 1..5), m1 in monic(5), m2 in monic(5)) {
        let a = poly_a(&Fq::prime(5).unwrap());
        let b = a.normalize(b);
        prop_assume!(!b.is_empty());
        for d in [2u64, 4] {
            let whole = residue_symbol(&a, &b, &a.mul(&m1, &m2), d).unwrap();
            let split = (residue_symbol(&a, &b, &m1, d).unwrap() * residue_symbol(&a, &b, &m2, d).unwrap()) % 5;
            prop_assert_eq!(whole, split);
        }
    }

    #[test]
    fn series_inverse(lead in -3i64..3, coeffs in prop::collection::vec(0u32..3, 1..12)) {
        let s = SeriesRing::new(Fq::prime(3).unwrap(), 10);
        let mut coeffs = coeffs;
        coeffs[0] = coeffs[0].max(1);
        let x = s.from_coeffs(lead, coeffs, 10);
        let y = s.invert(&x).unwrap();
        let one = s.mul(&x, &y);
        prop_assert!(s.agree_to(&one, &s.one(), one.prec.min(10)));
    }
}
