use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use anderson_core::anderson::carlitz;
use anderson_core::fq::Fq;
use anderson_core::lattice::{build_artin_schreier, deformed_ring, Lattice};
use anderson_core::lvalues::*;
use anderson_core::matrix::Matrix;
use anderson_core::group::GroupRing;
use anderson_core::series::SeriesRing;
use anderson_core::Ring;

#[test]
fn twisted_lattice_product_matches_closed_form() {
    let data = build_artin_schreier(3).unwrap();
    let f = data.alg.fq().clone();
    let c = carlitz(&f);
    let n = 6;
    let cfg = EulerConfig::new(n as usize, n);
    let l = deformed_euler_product(&c, &data.twisted, &cfg).unwrap();
    let w = symbol_weight(3, SymbolWeightOptions { artin: true, with_z: true, coprime_to_theta: true }).unwrap();
    let sum = monic_sum(&w, n as usize, n);
    let zr = &w.ring;
    let s = SeriesRing::new(zr.clone(), n);
    let z_tr: Vec<Vec<u32>> = vec![vec![0, 1]; 3];
    let ramified = s.sub(&s.one(), &s.monomial(z_tr, -1));
    let closed = s.truncate(&s.mul(&ramified, &sum), n);
    assert_eq!(l.series, closed);
}

#[test]
fn trace_lattice_product_matches_closed_form() {
    let data = build_artin_schreier(3).unwrap();
    let f = data.alg.fq().clone();
    let n = 6;
    let mut cfg = EulerConfig::new(n as usize, n);
    cfg.equivariant = false;
    let l = euler_product(&carlitz(&f), &data.trace_lattice, &cfg).unwrap();
    let w = symbol_weight(3, SymbolWeightOptions { artin: false, with_z: false, coprime_to_theta: true }).unwrap();
    let sum = monic_sum(&w, n as usize, n);
    let zr = deformed_ring(&GroupRing::new(f.clone(), data.trace_lattice.group.clone()));
    assert_eq!(specialize_series(&zr, &sum, 1), l.series);
}

#[test]
fn trace_lattice_unit() {
    let f = Fq::prime(3).unwrap();
    let n = 25;
    let extra = 2;
    let w = symbol_weight(3, SymbolWeightOptions { artin: false, with_z: false, coprime_to_theta: true }).unwrap();
    let sum = monic_sum(&w, (n + extra) as usize, n + extra);
    let fs = SeriesRing::new(f.clone(), n + extra);
    let l = SeriesRing::new(w.ring.clone(), n + extra).map(&sum, &fs, |c| c[0].first().copied().unwrap_or(0));
    let delta = kummer_root_series(&f, n + extra);
    let gen = fs.shift(&delta, 1);
    let x = fs.mul(&l, &gen);
    let basis = Matrix { rows: 1, cols: 1, data: vec![gen] };
    let r = verify_unit(&carlitz(&f), &basis, &[x], n).unwrap();
    assert!(r.member);
}

#[test]
fn stabilization_and_shuffled_order() {
    let f = Fq::prime(2).unwrap();
    let m = Lattice::standard(&f, 1).unwrap();
    let c = carlitz(&f);
    let mut cfg = EulerConfig::new(6, 6);
    cfg.keep_factors = true;
    let a = euler_product(&c, &m, &cfg).unwrap();
    let b = euler_product(&c, &m, &EulerConfig::new(9, 6)).unwrap();
    assert_eq!(a.series, b.series);
    assert_eq!(a.partials.len(), 6);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut factors = a.factors.clone();
    factors.shuffle(&mut rng);
    let ring = GroupRing::new(f.clone(), m.group.clone());
    let s = SeriesRing::new(ring.clone(), 6);
    let prod = factors
        .iter()
        .fold(s.truncate(&s.one(), 6), |acc, lf| s.mul(&acc, &factor_series(&ring, lf, 6).unwrap()));
    assert_eq!(s.truncate(&prod, 6), a.series);
}

#[test]
fn deformation_specializes() {
    let data = build_artin_schreier(3).unwrap();
    let f = data.alg.fq().clone();
    let c = carlitz(&f);
    let cfg = EulerConfig::new(4, 4);
    let plain = euler_product(&c, &data.twisted, &cfg).unwrap();
    let deformed = deformed_euler_product(&c, &data.twisted, &cfg).unwrap();
    let zr = deformed_ring(&GroupRing::new(f.clone(), data.twisted.group.clone()));
    assert_eq!(specialize_series(&zr, &deformed.series, 1), plain.series);
    let at_zero = specialize_series(&zr, &deformed.series, 0);
    let s = SeriesRing::new(GroupRing::new(f.clone(), data.twisted.group.clone()), 4);
    assert_eq!(at_zero, s.truncate(&s.one(), 4));
    // the θ^{-d} coefficient has z-degree at most d
    for d in 0..=4i64 {
        let coeff = SeriesRing::new(zr.clone(), 4).coeff(&deformed.series, -d);
        assert!(coeff.iter().all(|p| p.len() <= d as usize + 1), "θ^-{d}: {coeff:?}");
    }
}

#[test]
fn z_sum_at_zero_is_one() {
    let w = symbol_weight(3, SymbolWeightOptions { artin: true, with_z: true, coprime_to_theta: true }).unwrap();
    let sum = monic_sum(&w, 5, 5);
    let at_zero = specialize_series(&w.ring, &sum, 0);
    let s = SeriesRing::new(GroupRing::new(w.field.clone(), w.ring.group.clone()), 5);
    assert_eq!(at_zero, s.truncate(&s.one(), 5));
}
