//! Determinants of `1 + ψ` modulo `Z^N` for locally contracting additive
//! operators on the towers `M ⊃ PM ⊃ P²M ⊃ …`.
//!
//! An operator `ψ = Σ_r ψ_r Z^r` whose coefficients lie in `M_s(A){τ}τ`
//! sends `P^i M` into `P^{qi} M`, so every `U_i = P^i M` with `i ≥ 1` is a
//! nucleus and the determinant lives on the finite layer `M/P^i M`. The
//! containment is not assumed: it is certified on generators of each layer.

use rand::Rng;

use crate::anderson::{reduce_twisted, AndersonModule};
use crate::error::{Error, Result};
use crate::fq::Fq;
use crate::group::{is_g_cohomologically_trivial, FiniteGModule, GroupRing};
use crate::lattice::{deformed_ring, to_group_ring, Lattice};
use crate::matrix::{self, Matrix};
use crate::poly::{irreducibles_by_degree, poly_a, PolyRing};
use crate::residue::ResidueRing;
use crate::series::{SeriesRing, ThetaSeries};
use crate::ring::Ring;
use crate::twisted::{self, TwistedPoly};

/// `R[Z]/Z^N`; elements are little-endian coefficient vectors without
/// trailing zeros.
#[derive(Clone, Debug)]
pub struct TruncatedZ<R: Ring> {
    pub base: R,
    pub order: usize,
}

impl<R: Ring> TruncatedZ<R> {
    pub fn new(base: R, order: usize) -> Self {
        TruncatedZ { base, order }
    }

    fn trim(&self, mut v: Vec<R::Elem>) -> Vec<R::Elem> {
        v.truncate(self.order);
        while v.last().is_some_and(|c| self.base.is_zero(c)) {
            v.pop();
        }
        v
    }

    /// `c Z^k`.
    pub fn monomial(&self, c: R::Elem, k: usize) -> Vec<R::Elem> {
        let mut v = vec![self.base.zero(); k];
        v.push(c);
        self.trim(v)
    }

    pub fn constant(&self, c: R::Elem) -> Vec<R::Elem> {
        self.monomial(c, 0)
    }

    pub fn coeff(&self, a: &[R::Elem], k: usize) -> R::Elem {
        a.get(k).cloned().unwrap_or_else(|| self.base.zero())
    }
}

impl<R: Ring> Ring for TruncatedZ<R> {
    type Elem = Vec<R::Elem>;

    fn zero(&self) -> Self::Elem {
        vec![]
    }

    fn one(&self) -> Self::Elem {
        self.constant(self.base.one())
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let n = a.len().max(b.len());
        self.trim((0..n).map(|i| self.base.add(&self.coeff(a, i), &self.coeff(b, i))).collect())
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|c| self.base.neg(c)).collect()
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let n = (a.len() + b.len() - 1).min(self.order);
        let mut v = vec![self.base.zero(); n];
        for (i, x) in a.iter().enumerate() {
            if self.base.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(n.saturating_sub(i)) {
                v[i + j] = self.base.add(&v[i + j], &self.base.mul(x, y));
            }
        }
        self.trim(v)
    }

    fn from_int(&self, n: i64) -> Self::Elem {
        self.constant(self.base.from_int(n))
    }

    fn unit_inverse(&self, a: &Self::Elem) -> Option<Self::Elem> {
        let c0 = self.base.unit_inverse(a.first()?)?;
        let mut g = vec![c0.clone()];
        for k in 1..self.order {
            let mut acc = self.base.zero();
            for j in 1..=k.min(a.len() - 1) {
                acc = self.base.add(&acc, &self.base.mul(&a[j], &g[k - j]));
            }
            g.push(self.base.neg(&self.base.mul(&c0, &acc)));
        }
        Some(self.trim(g))
    }

    fn frobenius(&self, a: &Self::Elem, r: u32) -> Self::Elem {
        self.trim(a.iter().map(|c| self.base.frobenius(c, r)).collect())
    }

    fn field_order(&self) -> u64 {
        self.base.field_order()
    }

    fn characteristic(&self) -> u64 {
        self.base.characteristic()
    }

    fn format(&self, a: &Self::Elem) -> String {
        if a.is_empty() {
            return "0".into();
        }
        a.iter()
            .enumerate()
            .filter(|(_, c)| !self.base.is_zero(c))
            .map(|(k, c)| match k {
                0 => format!("({})", self.base.format(c)),
                1 => format!("({})·Z", self.base.format(c)),
                _ => format!("({})·Z^{k}", self.base.format(c)),
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// `det(1 + Σ_r ψ_r Z^r)` over `R[Z]/Z^N` for matrices `ψ_1, ψ_2, …` over `R`.
pub fn det_one_plus<R: Ring>(tz: &TruncatedZ<R>, psi: &[Matrix<R::Elem>]) -> Vec<R::Elem> {
    let n = psi.first().map_or(0, |m| m.rows);
    let m = Matrix::from_fn(n, n, |i, j| {
        let mut v = vec![if i == j { tz.base.one() } else { tz.base.zero() }];
        v.extend(psi.iter().map(|p| p.get(i, j).clone()));
        tz.trim(v)
    });
    matrix::det(tz, &m)
}

/// `ψ = Σ_{1 ≤ r < N} ψ_r Z^r` with each `ψ_r ∈ M_s(A){τ}τ` acting on lattice
/// coordinates; in the deformed case `τ^j` carries `z^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct NuclearOperator {
    pub field: Fq,
    pub dim: usize,
    pub order: usize,
    /// `ψ_r` at index `r − 1`.
    pub terms: Vec<TwistedPoly<Vec<u32>>>,
    pub deformed: bool,
}

impl NuclearOperator {
    pub fn new(field: &Fq, dim: usize, order: usize, mut terms: Vec<TwistedPoly<Vec<u32>>>, deformed: bool) -> Result<Self> {
        let a = poly_a(field);
        terms.truncate(order.saturating_sub(1));
        for (r, t) in terms.iter_mut().enumerate() {
            if t.dim != dim {
                return Err(Error::DimensionMismatch(format!("ψ_{} has dimension {}, expected {dim}", r + 1, t.dim)));
            }
            if t.coeffs.first().is_some_and(|c| !matrix::is_zero(&a, c)) {
                return Err(Error::InvalidArgument(format!("ψ_{} has a τ^0 term", r + 1)));
            }
            *t = twisted::normalize(&a, t.clone());
        }
        Ok(NuclearOperator { field: field.clone(), dim, order, terms, deformed })
    }

    pub fn zero(field: &Fq, dim: usize, order: usize) -> Self {
        NuclearOperator { field: field.clone(), dim, order, terms: vec![], deformed: false }
    }

    fn term(&self, r: usize) -> Option<&TwistedPoly<Vec<u32>>> {
        self.terms.get(r.checked_sub(1)?)
    }

    /// `(1 + self)(1 + other) − 1`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim || self.order != other.order || self.deformed != other.deformed {
            return Err(Error::DimensionMismatch("operators differ in dimension, order or deformation".into()));
        }
        let a = poly_a(&self.field);
        let zero = TwistedPoly { dim: self.dim, coeffs: vec![] };
        let mut terms = vec![];
        for r in 1..self.order {
            let mut t = twisted::twisted_add(&a, self.term(r).unwrap_or(&zero), other.term(r).unwrap_or(&zero))?;
            for s in 1..r {
                if let (Some(x), Some(y)) = (self.term(s), other.term(r - s)) {
                    t = twisted::twisted_add(&a, &t, &twisted::twisted_mul(&a, x, y)?)?;
                }
            }
            terms.push(t);
        }
        NuclearOperator::new(&self.field, self.dim, self.order, terms, self.deformed)
    }
}

/// `ψ = (1 − φ_E(θ)Z)/(1 − δ_E(θ)Z) − 1`, i.e.
/// `ψ_r = (δ_E(θ) − φ_E(θ)) δ_E(θ)^{r−1}` in the coordinates of `M`.
pub fn ratio_operator(e: &AndersonModule, m: &Lattice, order: usize) -> Result<NuclearOperator> {
    let f = &e.field;
    let a = poly_a(f);
    let c = m.action_matrices(e)?;
    let s = m.rank();
    let mut tail = c.clone();
    tail[0] = matrix::zeros(&a, s, s);
    let minus_tail = TwistedPoly { dim: s, coeffs: tail.iter().map(|x| matrix::neg(&a, x)).collect() };
    let mut power = matrix::identity(&a, s);
    let mut terms = vec![];
    for _ in 1..order {
        terms.push(twisted::twisted_mul(&a, &minus_tail, &twisted::constant(&a, power.clone()))?);
        power = matrix::mul(&a, &power, &c[0]);
    }
    NuclearOperator::new(f, s, order, terms, e.deformed)
}

/// The layers `M/P^i M`, `1 ≤ i ≤ depth`, of a lattice.
#[derive(Clone, Debug)]
pub struct QuotientTower {
    pub lattice: Lattice,
    pub prime: Vec<u32>,
    pub depth: usize,
}

/// Determinant of `1 + ψ` with the nucleus it was computed past.
#[derive(Clone, Debug, PartialEq)]
pub struct NuclearDet {
    pub nucleus: usize,
    /// Coefficients of `Z^k` in `F_q[z][G]`.
    pub value: Vec<Vec<Vec<u32>>>,
}

impl QuotientTower {
    pub fn new(m: &Lattice, prime: &[u32], depth: usize) -> Result<Self> {
        let a = poly_a(&m.alg.k.poly.base);
        let prime = a.make_monic(prime);
        if prime.len() < 2 || depth == 0 {
            return Err(Error::InvalidArgument("a tower needs a modulus of positive degree and depth ≥ 1".into()));
        }
        Ok(QuotientTower { lattice: m.clone(), prime, depth })
    }

    pub fn field(&self) -> &Fq {
        &self.lattice.alg.k.poly.base
    }

    /// `P^i`.
    pub fn modulus(&self, i: usize) -> Vec<u32> {
        let a = poly_a(self.field());
        a.pow(&self.prime, i as u64)
    }

    /// The `F_q`-dimension of `M/P^i M`.
    pub fn layer_dim(&self, i: usize) -> usize {
        self.lattice.rank() * i * (self.prime.len() - 1)
    }

    /// `M/P^i M` as a finite `G`-module (the group permutes the basis).
    pub fn layer_module(&self, i: usize) -> Result<FiniteGModule> {
        let g = &self.lattice.group;
        let ord = g.order();
        let d = i * (self.prime.len() - 1);
        let t = self.lattice.group_rank();
        let n = self.layer_dim(i);
        let idx = |l: usize, h: usize, k: usize| (l * ord + h) * d + k;
        let gens = g
            .generators()
            .into_iter()
            .map(|gen| {
                let mut m = Matrix::from_fn(n, n, |_, _| 0u32);
                for l in 0..t {
                    for h in 0..ord {
                        for k in 0..d {
                            m.set(idx(l, g.op(gen, h), k), idx(l, h, k), 1);
                        }
                    }
                }
                m
            })
            .collect();
        FiniteGModule::new(self.field().clone(), g.clone(), gens)
    }

    /// Every layer is `G`-cohomologically trivial.
    pub fn check_admissible(&self) -> Result<bool> {
        for i in 1..=self.depth {
            if !is_g_cohomologically_trivial(&self.layer_module(i)?)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The `F_q`-matrices on `M/P^i M` of the summands `B_j τ^j` of `t`.
    pub fn layer_matrices(&self, t: &TwistedPoly<Vec<u32>>, i: usize) -> Vec<Matrix<u32>> {
        let n = self.layer_dim(i);
        if t.coeffs.is_empty() {
            return vec![Matrix::from_fn(n, n, |_, _| 0u32)];
        }
        reduce_twisted(self.field(), &t.coeffs, &self.modulus(i))
    }

    /// The reduction `M/P^{i+1} M → M/P^i M` on `F_q`-coordinates.
    pub fn projection(&self, i: usize) -> Matrix<u32> {
        let a = poly_a(self.field());
        let low = ResidueRing::new(self.field(), &self.modulus(i));
        let (d1, d0) = ((i + 1) * (self.prime.len() - 1), low.degree());
        let s = self.lattice.rank();
        let mut m = Matrix::from_fn(s * d0, s * d1, |_, _| 0u32);
        for k in 0..s {
            for l in 0..d1 {
                let c = low.coords(&low.reduce(&a.monomial(1, l)));
                for (r, x) in c.into_iter().enumerate() {
                    m.set(k * d0 + r, k * d1 + l, x);
                }
            }
        }
        m
    }

    /// The smallest `i` with `ψ_r(P^i M) ⊆ P^{i+1} M` for all `r`, certified on
    /// the `F_q`-generators `P^i θ^l e_k` of `P^i M / P^{depth} M` (the
    /// coefficients of `ψ_r` are integral, so `P^{depth} M` is stable).
    pub fn find_nucleus(&self, op: &NuclearOperator) -> Result<usize> {
        let f = self.field();
        let a = poly_a(f);
        let top = ResidueRing::new(f, &self.modulus(self.depth));
        let s = self.lattice.rank();
        'scan: for i in 0..self.depth {
            let next = self.modulus(i + 1);
            let base = self.modulus(i);
            let span = (self.depth - i) * (self.prime.len() - 1);
            for t in &op.terms {
                let t = TwistedPoly { dim: t.dim, coeffs: t.coeffs.iter().map(|c| c.map(|x| top.reduce(x))).collect() };
                for k in 0..s {
                    for l in 0..span {
                        let mut x = vec![vec![]; s];
                        x[k] = top.reduce(&a.shift(&base, l));
                        let y = twisted::apply(&top, &t, &x);
                        if y.iter().any(|c| !a.divides(&next, c)) {
                            continue 'scan;
                        }
                    }
                }
            }
            return Ok(i);
        }
        Err(Error::NoNucleus { depth: self.depth })
    }

    /// `det(1 + ψ | M/P^i M)` over `F_q[z][G][Z]/Z^N`.
    pub fn det_at_layer(&self, op: &NuclearOperator, i: usize) -> Result<Vec<Vec<Vec<u32>>>> {
        let f = self.field();
        let ring = GroupRing::new(f.clone(), self.lattice.group.clone());
        let zr = deformed_ring(&ring);
        let tz = TruncatedZ::new(zr.clone(), op.order);
        if i == 0 {
            return Ok(tz.one());
        }
        let v = self.modulus(i);
        let mut psi = vec![];
        for r in 1..op.order {
            let Some(t) = op.term(r) else {
                psi.push(matrix::zeros(&zr, self.layer_dim(i) / ring.order(), self.layer_dim(i) / ring.order()));
                continue;
            };
            let flat = self.layer_matrices(t, i);
            let parts = to_group_ring(&self.lattice, f, &flat, &v)?.parts;
            let mut acc = matrix::zeros(&zr, parts[0].rows, parts[0].cols);
            for (j, p) in parts.iter().enumerate() {
                let zj = if op.deformed { j } else { 0 };
                acc = matrix::add(&zr, &acc, &p.map(|x| x.iter().map(|c| zr.base.monomial(*c, zj)).collect::<Vec<_>>()));
            }
            psi.push(acc);
        }
        Ok(det_one_plus(&tz, &psi))
    }

    /// `det(1 + ψ | V/U)` with `U` the first certified nucleus.
    pub fn det_mod_zn(&self, op: &NuclearOperator) -> Result<NuclearDet> {
        let nucleus = self.find_nucleus(op)?;
        Ok(NuclearDet { nucleus, value: self.det_at_layer(op, nucleus)? })
    }
}

/// `Z ↦ θ⁻¹`: a determinant modulo `Z^N` becomes a series known through `θ^{1−N}`.
pub fn at_inverse_theta(zr: &GroupRing<PolyRing<Fq>>, value: &[Vec<Vec<u32>>], order: usize) -> ThetaSeries<Vec<Vec<u32>>> {
    let s = SeriesRing::new(zr.clone(), order as i64 - 1);
    let coeffs = (0..order).map(|k| value.get(k).cloned().unwrap_or_else(|| zr.zero())).collect();
    s.from_coeffs(0, coeffs, order as i64 - 1)
}

/// Both sides of an identity between truncated determinants.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub holds: bool,
    pub lhs: Vec<Vec<Vec<u32>>>,
    pub rhs: Vec<Vec<Vec<u32>>>,
}

impl CheckOutcome {
    fn new(lhs: Vec<Vec<Vec<u32>>>, rhs: Vec<Vec<Vec<u32>>>) -> Self {
        CheckOutcome { holds: lhs == rhs, lhs, rhs }
    }
}

fn truncated_ring(tower: &QuotientTower, order: usize) -> TruncatedZ<GroupRing<PolyRing<Fq>>> {
    let ring = GroupRing::new(tower.field().clone(), tower.lattice.group.clone());
    TruncatedZ::new(deformed_ring(&ring), order)
}

/// `det(1 + χ) = det(1 + φ) det(1 + ψ)` for `1 + χ = (1 + φ)(1 + ψ)`.
pub fn check_multiplicativity(tower: &QuotientTower, phi: &NuclearOperator, psi: &NuclearOperator) -> Result<CheckOutcome> {
    let chi = phi.compose(psi)?;
    let tz = truncated_ring(tower, phi.order);
    let lhs = tower.det_mod_zn(&chi)?.value;
    let rhs = tz.mul(&tower.det_mod_zn(phi)?.value, &tower.det_mod_zn(psi)?.value);
    Ok(CheckOutcome::new(lhs, rhs))
}

/// `det(1 + aφZ^m) = det(1 + φaZ^m)` for an additive `a` and `φ ∈ M_s(A){τ}τ`.
pub fn check_commutation(
    tower: &QuotientTower,
    a: &TwistedPoly<Vec<u32>>,
    phi: &TwistedPoly<Vec<u32>>,
    m: usize,
    order: usize,
) -> Result<CheckOutcome> {
    let f = tower.field();
    let pa = poly_a(f);
    let single = |t: TwistedPoly<Vec<u32>>| {
        let mut terms = vec![TwistedPoly { dim: t.dim, coeffs: vec![] }; m.saturating_sub(1)];
        terms.push(t);
        NuclearOperator::new(f, a.dim, order, terms, false)
    };
    let left = single(twisted::twisted_mul(&pa, a, phi)?)?;
    let right = single(twisted::twisted_mul(&pa, phi, a)?)?;
    Ok(CheckOutcome::new(tower.det_mod_zn(&left)?.value, tower.det_mod_zn(&right)?.value))
}

/// The determinant of the ratio operator on the `P`-tower of depth 3 agrees
/// with the one on the single layer `M/PM`, at every depth.
pub fn check_localization(e: &AndersonModule, m: &Lattice, prime: &[u32], order: usize) -> Result<Vec<CheckOutcome>> {
    let op = ratio_operator(e, m, order)?;
    let tower = QuotientTower::new(m, prime, 3)?;
    let nucleus = tower.find_nucleus(&op)?;
    let single = tower.det_at_layer(&op, nucleus.max(1))?;
    (1..=3)
        .map(|i| Ok(CheckOutcome::new(tower.det_at_layer(&op, i.max(nucleus))?, single.clone())))
        .collect()
}

/// `θ^m det(1 − A θ⁻¹) = det(θI − A)`: the reversed `det(1 − AZ)` against the
/// characteristic polynomial, each by its own determinant.
pub fn reverse_charpoly_bridge<R: Ring>(ring: &R, a: &Matrix<R::Elem>) -> (Vec<R::Elem>, Vec<R::Elem>) {
    let m = a.rows;
    let tz = TruncatedZ::new(ring.clone(), m + 1);
    let neg = matrix::neg(ring, a);
    let d = det_one_plus(&tz, &[neg]);
    let reversed: Vec<R::Elem> = (0..=m).map(|k| tz.coeff(&d, m - k)).collect();
    (reversed, matrix::charpoly(ring, a))
}

/// `Π_{deg v ≤ D} det(1 + ψ | M/vM)` for the ratio operator, with the partial
/// product after each degree.
pub fn euler_determinant(e: &AndersonModule, m: &Lattice, d_max: usize, order: usize) -> Result<Vec<Vec<Vec<Vec<u32>>>>> {
    let op = ratio_operator(e, m, order)?;
    let f = &e.field;
    let primes = irreducibles_by_degree(&poly_a(f), d_max);
    let group = m.group.clone();
    let tz = TruncatedZ::new(deformed_ring(&GroupRing::new(f.clone(), group)), order);
    let mut acc = tz.one();
    let mut partials = vec![];
    for by_deg in primes.iter().skip(1) {
        for v in by_deg {
            let tower = QuotientTower::new(m, v, 2)?;
            acc = tz.mul(&acc, &tower.det_mod_zn(&op)?.value);
        }
        partials.push(acc.clone());
    }
    Ok(partials)
}

/// A random `A`-matrix commuting with the group action on the lattice
/// coordinates, entries of degree `≤ deg`.
pub fn random_equivariant_block<G: Rng>(rng: &mut G, m: &Lattice, deg: usize) -> Matrix<Vec<u32>> {
    let f = m.alg.fq();
    let a = poly_a(f);
    let gr = GroupRing::new(a.clone(), m.group.clone());
    let t = m.group_rank();
    let q = f.order() as u32;
    let blocks: Vec<Vec<Matrix<Vec<u32>>>> = (0..t)
        .map(|_| {
            (0..t)
                .map(|_| {
                    let c: Vec<Vec<u32>> =
                        (0..gr.order()).map(|_| a.normalize((0..=deg).map(|_| rng.gen_range(0..q)).collect())).collect();
                    gr.multiplication_matrix(&c)
                })
                .collect()
        })
        .collect();
    matrix::block(&blocks)
}

/// `Σ_{j ≤ tau_deg} B_j τ^j` with random equivariant `B_j`, and `B_0 = 0`
/// unless `with_constant`.
pub fn random_twisted<G: Rng>(rng: &mut G, m: &Lattice, tau_deg: usize, with_constant: bool) -> TwistedPoly<Vec<u32>> {
    let a = poly_a(m.alg.fq());
    let s = m.rank();
    let coeffs = (0..=tau_deg)
        .map(|j| if j == 0 && !with_constant { matrix::zeros(&a, s, s) } else { random_equivariant_block(rng, m, 2) })
        .collect();
    TwistedPoly { dim: s, coeffs }
}

/// A random operator with terms of `τ`-degree 1 or 2.
pub fn random_operator<G: Rng>(rng: &mut G, m: &Lattice, order: usize) -> NuclearOperator {
    let terms = (1..order)
        .map(|_| {
            let deg = rng.gen_range(1..=2);
            random_twisted(rng, m, deg, false)
        })
        .collect();
    NuclearOperator::new(m.alg.fq(), m.rank(), order, terms, false).expect("terms have no τ^0 part")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anderson::carlitz;
    use crate::lattice::{build_artin_schreier, reduce_mod};
    use crate::poly::Var;

    // coefficients of Z^k in F_q[z], trivial group
    fn flat(d: &[Vec<Vec<u32>>]) -> Vec<Vec<u32>> {
        d.iter().map(|c| c[0].clone()).collect()
    }

    #[test]
    fn carlitz_ratio_operator() {
        let f = Fq::prime(3).unwrap();
        let m = Lattice::standard(&f, 1).unwrap();
        let op = ratio_operator(&carlitz(&f), &m, 4).unwrap();
        let a = poly_a(&f);
        for (r, t) in op.terms.iter().enumerate() {
            // ψ_{r+1} = −τθ^r = −θ^{qr}τ
            let expected = a.neg(&a.pow(&vec![0, 1], 3 * r as u64));
            assert_eq!(t.coeffs.len(), 2);
            assert_eq!(t.coeffs[1].data[0], expected);
        }
        assert!(ratio_operator(&carlitz(&f), &m, 1).unwrap().terms.is_empty());
        let deformed = ratio_operator(&carlitz(&f).z_deform(), &m, 3).unwrap();
        assert!(deformed.deformed);
    }

    #[test]
    fn carlitz_at_theta() {
        let f = Fq::prime(3).unwrap();
        let m = Lattice::standard(&f, 1).unwrap();
        let tower = QuotientTower::new(&m, &[0, 1], 3).unwrap();
        assert!(tower.check_admissible().unwrap());
        let op = ratio_operator(&carlitz(&f), &m, 3).unwrap();
        let det = tower.det_mod_zn(&op).unwrap();
        assert_eq!(det.nucleus, 1);
        // det(1 − φZ)/det(1 − δZ) = (1 − Z)/1 on A/θ
        assert_eq!(flat(&det.value), vec![vec![1], vec![2]]);
        let dz = tower.det_mod_zn(&ratio_operator(&carlitz(&f).z_deform(), &m, 3).unwrap()).unwrap();
        assert_eq!(flat(&dz.value), vec![vec![1], vec![0, 2]]);
        for i in 1..=3 {
            assert_eq!(tower.det_at_layer(&op, i).unwrap(), det.value, "layer {i}");
        }
    }

    #[test]
    fn zero_operator_and_finite_layers() {
        let f = Fq::prime(2).unwrap();
        let m = Lattice::standard(&f, 1).unwrap();
        let tower = QuotientTower::new(&m, &[1, 1], 2).unwrap();
        let zero = NuclearOperator::zero(&f, 1, 4);
        let d = tower.det_mod_zn(&zero).unwrap();
        assert_eq!(d.nucleus, 0);
        assert_eq!(d.value, truncated_ring(&tower, 4).one());
        // plain matrices: det(1 + AZ) = 1 + tr(A) Z + det(A) Z²
        let tz = TruncatedZ::new(f.clone(), 3);
        let a = Matrix::from_rows(vec![vec![1, 1], vec![0, 1]]);
        assert_eq!(det_one_plus(&tz, &[a]), vec![1, 0, 1]);
        let tz = TruncatedZ::new(f.clone(), 2);
        assert_eq!(tz.unit_inverse(&vec![1, 1]), Some(vec![1, 1]));
    }

    #[test]
    fn operator_rejects_constant_term() {
        let f = Fq::prime(2).unwrap();
        let a = poly_a(&f);
        let t = twisted::one(&a, 1);
        assert!(NuclearOperator::new(&f, 1, 3, vec![t], false).is_err());
    }

    #[test]
    fn layer_determinant_matches_fitting_side() {
        // det(1 + ψ | M/PM) · det(1 − δZ) = det(1 − φZ), both from reduce_mod
        let data = build_artin_schreier(3).unwrap();
        let f = data.alg.fq().clone();
        let e = carlitz(&f);
        let order = 4;
        let op = ratio_operator(&e, &data.twisted, order).unwrap();
        for prime in [vec![1, 1], vec![2, 1], vec![0, 1]] {
            let tower = QuotientTower::new(&data.twisted, &prime, 2).unwrap();
            let det = tower.det_mod_zn(&op).unwrap();
            let (lie, full) = reduce_mod(&e, &data.twisted, &prime).unwrap();
            let zr = deformed_ring(&lie.ring);
            let tz = TruncatedZ::new(zr.clone(), order);
            let lift = |m: &Matrix<Vec<u32>>| m.map(|x| x.iter().map(|c| zr.base.constant(*c)).collect::<Vec<_>>());
            let dl = det_one_plus(&tz, &[matrix::neg(&zr, &lift(&lie.theta_action()))]);
            let df = det_one_plus(&tz, &[matrix::neg(&zr, &lift(&full.theta_action()))]);
            assert_eq!(tz.mul(&det.value, &dl), df, "P = {prime:?}");
        }
    }

    #[test]
    fn bridge_on_random_matrix() {
        let f = Fq::prime(3).unwrap();
        let a = Matrix::from_rows(vec![vec![1, 2, 0], vec![0, 1, 1], vec![2, 0, 2]]);
        let (rev, cp) = reverse_charpoly_bridge(&f, &a);
        assert_eq!(rev, cp);
        let px = PolyRing::new(f.clone(), Var::Z);
        let b = a.map(|c| px.constant(*c));
        let (rev, cp) = reverse_charpoly_bridge(&px, &b);
        assert_eq!(rev, cp);
    }
}
