use proptest::prelude::*;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use anderson_core::anderson::carlitz;
use anderson_core::fq::Fq;
use anderson_core::group::GroupRing;
use anderson_core::lattice::{build_artin_schreier, deformed_ring, Lattice};
use anderson_core::lvalues::{deformed_euler_product, EulerConfig};
use anderson_core::matrix::{self, Matrix};
use anderson_core::nuclear::*;
use anderson_core::poly::{irreducibles_by_degree, poly_a};
use anderson_core::series::SeriesRing;
use anderson_core::Ring;

fn lattices(p: u64) -> Vec<Lattice> {
    let data = build_artin_schreier(p).unwrap();
    vec![data.twisted, data.trace_lattice, Lattice::standard(data.alg.fq(), 2).unwrap()]
}

fn random_prime(rng: &mut ChaCha8Rng, m: &Lattice) -> Vec<u32> {
    let primes = irreducibles_by_degree(&poly_a(m.alg.fq()), 2);
    let all: Vec<_> = primes.into_iter().flatten().collect();
    all[rng.gen_range(0..all.len())].clone()
}

#[test]
fn localization_at_theta() {
    let f = Fq::prime(3).unwrap();
    let m = Lattice::standard(&f, 1).unwrap();
    for c in check_localization(&carlitz(&f), &m, &[0, 1], 3).unwrap() {
        assert!(c.holds, "{c:?}");
    }
    let data = build_artin_schreier(3).unwrap();
    let e = carlitz(data.alg.fq());
    for c in check_localization(&e, &data.twisted, &[1, 1], 2).unwrap() {
        assert!(c.holds, "{c:?}");
    }
    let tower = QuotientTower::new(&data.twisted, &[1, 1], 3).unwrap();
    assert!(tower.check_admissible().unwrap());
}

#[test]
fn layers_are_compatible() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for p in [2, 3] {
        for m in lattices(p) {
            let f = m.alg.fq().clone();
            let prime = random_prime(&mut rng, &m);
            let tower = QuotientTower::new(&m, &prime, 3).unwrap();
            let t = random_twisted(&mut rng, &m, 2, true);
            for i in 1..3 {
                let pr = tower.projection(i);
                let hi: Matrix<u32> = tower.layer_matrices(&t, i + 1).iter().fold(matrix::zeros(&f, pr.cols, pr.cols), |acc, x| matrix::add(&f, &acc, x));
                let lo: Matrix<u32> = tower.layer_matrices(&t, i).iter().fold(matrix::zeros(&f, pr.rows, pr.rows), |acc, x| matrix::add(&f, &acc, x));
                assert_eq!(matrix::mul(&f, &pr, &hi), matrix::mul(&f, &lo, &pr), "p = {p}, P = {prime:?}, i = {i}");
            }
        }
    }
}

#[test]
fn nucleus_independence() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in [2, 3] {
        for m in lattices(p) {
            let order = rng.gen_range(2..=4);
            let op = random_operator(&mut rng, &m, order);
            let prime = random_prime(&mut rng, &m);
            let tower = QuotientTower::new(&m, &prime, 3).unwrap();
            let d = tower.det_mod_zn(&op).unwrap();
            assert!(d.nucleus <= 1);
            for i in d.nucleus.max(1)..=3 {
                assert_eq!(tower.det_at_layer(&op, i).unwrap(), d.value, "p = {p}, layer {i}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn multiplicativity(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3]), order in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for m in lattices(p) {
            let phi = random_operator(&mut rng, &m, order);
            let psi = random_operator(&mut rng, &m, order);
            let prime = random_prime(&mut rng, &m);
            let tower = QuotientTower::new(&m, &prime, 2).unwrap();
            let c = check_multiplicativity(&tower, &phi, &psi).unwrap();
            prop_assert!(c.holds, "{:?}", c);
        }
    }

    #[test]
    fn commutation(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3]), power in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for m in lattices(p) {
            let a = random_twisted(&mut rng, &m, 1, true);
            let phi = random_twisted(&mut rng, &m, 2, false);
            let prime = random_prime(&mut rng, &m);
            let tower = QuotientTower::new(&m, &prime, 2).unwrap();
            let c = check_commutation(&tower, &a, &phi, power, 4).unwrap();
            prop_assert!(c.holds, "{:?}", c);
        }
    }

    #[test]
    fn reverse_charpoly(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = Fq::with_order(*[2u64, 3, 4, 5].get(rng.gen_range(0..4)).unwrap()).unwrap();
        let q = f.order() as u32;
        let a = Matrix::from_fn(n, n, |_, _| rng.gen_range(0..q));
        let (rev, cp) = reverse_charpoly_bridge(&f, &a);
        prop_assert_eq!(rev, cp);
    }
}

#[test]
fn trace_formula_instance() {
    // Π_v det(1 + ψ | M/vM) at Z = θ⁻¹ stabilizes and inverts the L-series
    let f = Fq::prime(3).unwrap();
    let cases = [(carlitz(&f), Lattice::standard(&f, 1).unwrap(), 4usize)];
    let data = build_artin_schreier(3).unwrap();
    let twisted = (carlitz(data.alg.fq()), data.twisted.clone(), 3usize);
    for (e, m, order) in cases.into_iter().chain([twisted]) {
        let prec = order as i64 - 1;
        let zr = deformed_ring(&GroupRing::new(f.clone(), m.group.clone()));
        let s = SeriesRing::new(zr.clone(), prec);
        let d_max = order + 1;
        let partials = euler_determinant(&e.z_deform(), &m, d_max, order).unwrap();
        let evaluated: Vec<_> = partials.iter().map(|v| at_inverse_theta(&zr, v, order)).collect();
        for d in order - 1..d_max {
            assert_eq!(evaluated[d], evaluated[order - 1], "degree {}", d + 1);
        }
        let l = deformed_euler_product(&e, &m, &EulerConfig::new(d_max, prec)).unwrap();
        let product = s.truncate(&s.mul(&l.series, &evaluated[d_max - 1]), prec);
        assert_eq!(product, s.truncate(&s.one(), prec));
    }
}
