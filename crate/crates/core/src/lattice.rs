//! `G`-stable `A`-lattices inside `L^n`, their `τ`-matrices, and the finite
//! `F_q[G][θ]`-modules `M/vM` on which local factors are read off.

use std::sync::Arc;

use crate::anderson::{reduce_twisted, AndersonModule};
use crate::error::{Error, Result};
use crate::extension::ExtensionAlgebra;
use crate::fq::Fq;
use crate::group::{AbelianGroup, GroupRing};
use crate::matrix::{self, Matrix};
use crate::poly::{poly_a, PolyRing, Var};
use crate::ratfunc::RatFunc;
use crate::ring::Ring;

type AlgElem = Vec<RatFunc>;

#[derive(Clone, Debug)]
pub struct Lattice {
    pub alg: ExtensionAlgebra,
    /// `n`: the lattice lives in `L^n`.
    pub dim: usize,
    pub group: Arc<AbelianGroup>,
    /// Generators over `A[G]`; the `A`-basis is `σ_h(g_l)` at index `l·|G| + h`.
    pub generators: Vec<Vec<AlgElem>>,
    pub basis: Vec<Vec<AlgElem>>,
    basis_matrix: Matrix<RatFunc>,
}

impl Lattice {
    /// The lattice `⊕_{l,h} A σ_h(g_l)`, which must be free of that rank.
    /// A nontrivial `G` must be `Z/p` acting through `σ_h(α) = α + h`.
    pub fn from_generators(alg: &ExtensionAlgebra, group: Arc<AbelianGroup>, generators: Vec<Vec<AlgElem>>) -> Result<Self> {
        let dim = generators.first().map_or(0, |g| g.len());
        if dim == 0 || generators.iter().any(|g| g.len() != dim) {
            return Err(Error::DimensionMismatch("generators must be nonempty vectors of equal length".into()));
        }
        if group.order() > 1 && (alg.artin_schreier.is_none() || group.factors() != [alg.p()]) {
            return Err(Error::InvalidArgument(format!(
                "group {} does not act on this algebra; expected Z/{} with an Artin–Schreier generator",
                group.spec(),
                alg.p()
            )));
        }
        let basis: Vec<Vec<AlgElem>> = generators
            .iter()
            .flat_map(|g| (0..group.order()).map(move |h| (g, h)))
            .map(|(g, h)| {
                let shift = group.tuple(h).first().copied().unwrap_or(0);
                g.iter().map(|x| alg.sigma(shift, x)).collect()
            })
            .collect();
        let flat: Vec<Vec<RatFunc>> = basis.iter().map(|b| b.concat()).collect();
        let rows = dim * alg.dim();
        let basis_matrix = Matrix::from_fn(rows, flat.len(), |i, j| flat[j][i].clone());
        if matrix::rank(&alg.k, &basis_matrix) < flat.len() {
            return Err(Error::NotFree("the G-translates of the generators are linearly dependent".into()));
        }
        Ok(Lattice { alg: alg.clone(), dim, group, generators, basis, basis_matrix })
    }

    /// `A^n` with trivial group.
    pub fn standard(f: &Fq, n: usize) -> Result<Self> {
        let alg = ExtensionAlgebra::new(f, None, None)?;
        let gens = (0..n)
            .map(|k| (0..n).map(|i| if i == k { alg.one() } else { alg.zero() }).collect())
            .collect();
        Lattice::from_generators(&alg, Arc::new(AbelianGroup::trivial(f.p())), gens)
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn group_rank(&self) -> usize {
        self.generators.len()
    }

    /// Coordinates over `k` in the `A`-basis.
    pub fn coords(&self, x: &[AlgElem]) -> Result<Vec<RatFunc>> {
        let flat = x.concat();
        matrix::solve(&self.alg.k, &self.basis_matrix, &flat)
            .ok_or_else(|| Error::NotTauStable("element outside the k-span of the lattice".into()))
    }

    /// Coordinates, required to lie in `A`.
    pub fn integral_coords(&self, x: &[AlgElem]) -> Result<Vec<Vec<u32>>> {
        self.coords(x)?
            .into_iter()
            .map(|c| {
                if self.alg.k.is_polynomial(&c) {
                    Ok(c.num)
                } else {
                    Err(Error::NotTauStable(format!("coordinate {} is not in A", self.alg.k.format(&c))))
                }
            })
            .collect()
    }

    fn integral_matrix(&self, images: Vec<Vec<AlgElem>>) -> Result<Matrix<Vec<u32>>> {
        let cols = images.iter().map(|y| self.integral_coords(y)).collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_fn(self.rank(), self.rank(), |i, j| cols[j][i].clone()))
    }

    /// `T ∈ M_s(A)` with `τ(b_k) = Σ_j T_{jk} b_j`: the symbolic certificate of
    /// `τ`-stability.
    pub fn tau_matrix(&self) -> Result<Matrix<Vec<u32>>> {
        let images = self.basis.iter().map(|b| b.iter().map(|x| self.alg.frobenius(x, 1)).collect()).collect();
        self.integral_matrix(images)
    }

    /// `C_j = Φ_j T T^{(1)} ⋯ T^{(j−1)}`, where `Φ_j` is the matrix of `A_j`;
    /// then `φ(θ)` acts on coordinates as `c ↦ Σ_j C_j c^{(j)}`.
    pub fn action_matrices(&self, e: &AndersonModule) -> Result<Vec<Matrix<Vec<u32>>>> {
        if e.dim != self.dim {
            return Err(Error::DimensionMismatch(format!("module of dimension {} on a lattice in L^{}", e.dim, self.dim)));
        }
        let a = poly_a(&self.alg.k.poly.base);
        let t = self.tau_matrix()?;
        let mut tpow = matrix::identity(&a, self.rank());
        let mut out = vec![];
        for (j, aj) in e.mats.iter().enumerate() {
            let images = self
                .basis
                .iter()
                .map(|b| {
                    (0..self.dim)
                        .map(|r| {
                            (0..self.dim).fold(self.alg.zero(), |acc, c| {
                                let coef = self.alg.embed(self.alg.k.from_poly(aj.get(r, c).clone()));
                                self.alg.add(&acc, &self.alg.mul(&coef, &b[c]))
                            })
                        })
                        .collect()
                })
                .collect();
            let phi_j = self.integral_matrix(images)?;
            out.push(matrix::mul(&a, &phi_j, &tpow));
            tpow = matrix::mul(&a, &tpow, &matrix::frobenius(&a, &t, j as u32));
        }
        Ok(out)
    }
}

/// A finite free `F_q[G]`-module of rank `m` on which `θ` acts as
/// `Σ_j z^j parts[j]` (set `z = 1` when not deformed).
#[derive(Clone, Debug)]
pub struct FiniteThetaModule {
    pub ring: GroupRing<Fq>,
    pub rank: usize,
    pub parts: Vec<Matrix<Vec<u32>>>,
    /// The modulus `v` of `M/vM`, when the module arose that way.
    pub modulus: Option<Vec<u32>>,
}

impl FiniteThetaModule {
    pub fn theta_action(&self) -> Matrix<Vec<u32>> {
        let r = &self.ring;
        self.parts.iter().fold(matrix::zeros(r, self.rank, self.rank), |acc, m| matrix::add(r, &acc, m))
    }

    /// The `θ`-action over `F_q[z][G]`.
    pub fn deformed_action(&self, zr: &GroupRing<PolyRing<Fq>>) -> Matrix<Vec<Vec<u32>>> {
        let mut acc = matrix::zeros(zr, self.rank, self.rank);
        for (j, m) in self.parts.iter().enumerate() {
            let lifted = m.map(|x| x.iter().map(|c| zr.base.monomial(*c, j)).collect::<Vec<_>>());
            acc = matrix::add(zr, &acc, &lifted);
        }
        acc
    }

    /// `z ↦ c`.
    pub fn specialize(&self, c: u32) -> FiniteThetaModule {
        let f = &self.ring.base;
        let m = self
            .parts
            .iter()
            .enumerate()
            .fold(matrix::zeros(&self.ring, self.rank, self.rank), |acc, (j, p)| {
                matrix::add(&self.ring, &acc, &matrix::scale(&self.ring, p, &self.ring.embed(f.pow(&c, j as u64))))
            });
        FiniteThetaModule { parts: vec![m], ..self.clone() }
    }

    /// The `F_q`-matrix of the `θ`-action (`z = 1`) on the underlying
    /// `F_q`-space of dimension `rank·|G|`.
    pub fn restrict(&self) -> Matrix<u32> {
        self.ring.restrict_matrix(&self.theta_action())
    }
}

/// `(Lie_E(M/vM), E(M/vM))` as `F_q[G][θ]`-modules with basis `θ^i g_l`.
pub fn reduce_mod(e: &AndersonModule, m: &Lattice, v: &[u32]) -> Result<(FiniteThetaModule, FiniteThetaModule)> {
    let f = &m.alg.k.poly.base;
    if f != &e.field {
        return Err(Error::InvalidArgument("module and lattice use different constant fields".into()));
    }
    reduce_action(m, &m.action_matrices(e)?, v)
}

/// [`reduce_mod`] with the lattice action matrices computed once by the caller.
pub fn reduce_action(m: &Lattice, mats: &[Matrix<Vec<u32>>], v: &[u32]) -> Result<(FiniteThetaModule, FiniteThetaModule)> {
    let f = &m.alg.k.poly.base;
    let a = poly_a(f);
    let v = a.make_monic(v);
    if a.degree(&v).unwrap_or(0) == 0 {
        return Err(Error::InvalidArgument("reduction needs a modulus of positive degree".into()));
    }
    let flat = reduce_twisted(f, mats, &v);
    let lie = to_group_ring(m, f, &flat[..1], &v)?;
    let full = to_group_ring(m, f, &flat, &v)?;
    Ok((lie, full))
}

/// Re-expresses `F_q`-matrices on `M/vM` (basis `θ^i σ_h g_l`) over `F_q[G]`
/// (basis `θ^i g_l`), checking `G`-equivariance on the way.
pub(crate) fn to_group_ring(m: &Lattice, f: &Fq, flat: &[Matrix<u32>], v: &[u32]) -> Result<FiniteThetaModule> {
    let g = &m.group;
    let ord = g.order();
    let d = v.len() - 1;
    let t = m.group_rank();
    let idx = |l: usize, h: usize, i: usize| (l * ord + h) * d + i;
    let ring = GroupRing::new(f.clone(), g.clone());
    let mut parts = vec![];
    for fm in flat {
        for gen in g.generators() {
            // σ_gen · F = F · σ_gen on the permutation basis
            for l in 0..t {
                for h in 0..ord {
                    for i in 0..d {
                        for l2 in 0..t {
                            for h2 in 0..ord {
                                for i2 in 0..d {
                                    let lhs = fm.get(idx(l2, g.op(gen, h2), i2), idx(l, g.op(gen, h), i));
                                    let rhs = fm.get(idx(l2, h2, i2), idx(l, h, i));
                                    if lhs != rhs {
                                        return Err(Error::InvalidArgument("θ-action is not G-equivariant".into()));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        let n = t * d;
        let gm = Matrix::from_fn(n, n, |row, col| {
            let (l2, i2) = (row / d, row % d);
            let (l, i) = (col / d, col % d);
            (0..ord).map(|h2| *fm.get(idx(l2, h2, i2), idx(l, 0, i))).collect::<Vec<u32>>()
        });
        parts.push(gm);
    }
    Ok(FiniteThetaModule { ring, rank: t * d, parts, modulus: Some(v.to_vec()) })
}

/// The three lattices of the Artin–Schreier example inside `k(α, δ)`.
#[derive(Clone, Debug)]
pub struct ArtinSchreierData {
    pub p: u64,
    pub alg: ExtensionAlgebra,
    /// `A ⊕ θAα ⊕ … ⊕ θAα^{p−1}`.
    pub integers: Lattice,
    /// `θA[G]α^{p−1}δ`.
    pub twisted: Lattice,
    /// `Tr_G` of the twisted lattice, `θAδ`.
    pub trace_lattice: Lattice,
    /// The product `1 + θ^{p−1}` whose prime divisors are excluded.
    pub kummer_radicand: Vec<u32>,
}

pub fn build_artin_schreier(p: u64) -> Result<ArtinSchreierData> {
    let alg = ExtensionAlgebra::artin_schreier_example(p, true)?;
    let theta = alg.theta();
    let alpha = alg.alpha();
    let delta = alg.delta();
    let trivial = Arc::new(AbelianGroup::trivial(p));
    let g = Arc::new(AbelianGroup::cyclic(p, p)?);

    let mut ints = vec![vec![alg.one()]];
    for i in 1..p {
        ints.push(vec![alg.mul(&theta, &alg.pow(&alpha, i))]);
    }
    let integers = Lattice::from_generators(&alg, trivial.clone(), ints)?;

    let top = alg.mul(&theta, &alg.pow(&alpha, p - 1));
    let gen = alg.mul(&top, &delta);
    let twisted = Lattice::from_generators(&alg, g, vec![vec![gen.clone()]])?;

    let tr = alg.trace(&gen);
    let theta_delta = alg.mul(&theta, &delta);
    if tr != alg.neg(&theta_delta) {
        return Err(Error::InvalidArgument(format!("Tr_G(θα^(p−1)δ) = {}, expected −θδ", alg.format(&tr))));
    }
    let trace_lattice = Lattice::from_generators(&alg, trivial, vec![vec![theta_delta]])?;

    let mut radicand = vec![0u32; p as usize];
    radicand[0] = 1;
    radicand[p as usize - 1] = 1;
    for l in [&integers, &twisted, &trace_lattice] {
        l.tau_matrix()?;
    }
    Ok(ArtinSchreierData { p, alg, integers, twisted, trace_lattice, kummer_radicand: radicand })
}

/// `F_q[z][G]`, the coefficient ring of deformed factors.
pub fn deformed_ring(ring: &GroupRing<Fq>) -> GroupRing<PolyRing<Fq>> {
    GroupRing::new(PolyRing::new(ring.base.clone(), Var::Z), ring.group.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anderson::carlitz;
    use crate::group::{is_g_cohomologically_trivial, FiniteGModule};

    #[test]
    fn carlitz_on_a_mod_theta() {
        let f = Fq::prime(2).unwrap();
        let l = Lattice::standard(&f, 1).unwrap();
        let (lie, e) = reduce_mod(&carlitz(&f), &l, &[0, 1]).unwrap();
        assert_eq!(lie.theta_action().data, vec![lie.ring.zero()]);
        assert_eq!(e.theta_action().data, vec![e.ring.one()]);
    }

    #[test]
    fn twisted_lattice_is_tau_stable() {
        for p in [2u64, 3, 5] {
            let d = build_artin_schreier(p).unwrap();
            let t = d.twisted.tau_matrix().unwrap();
            assert_eq!(t.rows, p as usize);
            assert!(d.integers.tau_matrix().is_ok());
        }
    }

    #[test]
    fn ramified_reduction_has_rank_one() {
        let d = build_artin_schreier(3).unwrap();
        let c = carlitz(d.alg.fq());
        let (lie, e) = reduce_mod(&c, &d.twisted, &[0, 1]).unwrap();
        assert_eq!(lie.rank, 1);
        assert_eq!(e.rank, 1);
        // θ acts as −Tr_G
        let tr = e.ring.trace_element();
        assert_eq!(e.theta_action().data[0], e.ring.neg(&tr));
    }

    #[test]
    fn reductions_are_free_over_the_group_ring() {
        let d = build_artin_schreier(3).unwrap();
        let c = carlitz(d.alg.fq());
        let a = poly_a(d.alg.fq());
        for deg in 1..=3 {
            for v in crate::poly::irreducibles_by_degree(&a, deg)[deg].iter() {
                let (_, e) = reduce_mod(&c, &d.twisted, v).unwrap();
                assert_eq!(e.rank, deg);
                // the F_3-module with its G-action and θ-action
                let ring = &e.ring;
                let n = e.rank;
                let gen = ring.basis(1);
                let act = ring.restrict_matrix(&matrix::scalar_matrix(ring, n, &gen));
                let m = FiniteGModule::new(ring.base.clone(), ring.group.clone(), vec![act]).unwrap();
                assert!(is_g_cohomologically_trivial(&m).unwrap());
            }
        }
    }
}
