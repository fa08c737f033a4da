//! The algebra `k[α, δ]` with `α^p − α = c` and `δ^m = d` over `k = F_p(θ)`,
//! the `F_p`-action `σ_h(α) = α + h`, power residue symbols and Artin
//! symbols of Artin–Schreier extensions.

use crate::error::{Error, Result};
use crate::fq::Fq;
use crate::matrix::{self, Matrix};
use crate::poly::{poly_a, PolyA, PolyRing, Var};
use crate::ratfunc::{RatFunc, RatFuncField};
use crate::residue::ResidueRing;
use crate::ring::Ring;

#[derive(Clone, Debug)]
pub struct ExtensionAlgebra {
    pub k: RatFuncField,
    /// `c` in `α^p − α = c`; `None` means no `α`.
    pub artin_schreier: Option<RatFunc>,
    /// `(m, d)` in `δ^m = d`; `None` means no `δ`.
    pub kummer: Option<(usize, RatFunc)>,
    a_deg: usize,
    m: usize,
    tau_alpha: Vec<RatFunc>,
    tau_delta: Vec<RatFunc>,
}

impl ExtensionAlgebra {
    pub fn new(f: &Fq, artin_schreier: Option<RatFunc>, kummer: Option<(usize, RatFunc)>) -> Result<Self> {
        if artin_schreier.is_some() && !f.is_prime_field() {
            return Err(Error::InvalidArgument("Artin–Schreier algebras are built over prime fields".into()));
        }
        let k = RatFuncField::new(f, Var::Theta);
        if let Some((m, d)) = &kummer {
            if *m == 0 || k.is_zero(d) {
                return Err(Error::InvalidArgument("Kummer relation needs m ≥ 1 and d ≠ 0".into()));
            }
        }
        let p = f.p() as usize;
        let q = f.order() as usize;
        let a_deg = if artin_schreier.is_some() { p } else { 1 };
        let m = kummer.as_ref().map_or(1, |(m, _)| *m);
        let mut alg = ExtensionAlgebra { k, artin_schreier, kummer, a_deg, m, tau_alpha: vec![], tau_delta: vec![] };
        // τ(α) = α^p = α + c, τ(δ) = δ^q = δ^{q mod m} d^{⌊q/m⌋}
        alg.tau_alpha = match &alg.artin_schreier {
            Some(c) => alg.add(&alg.alpha(), &alg.embed(c.clone())),
            None => alg.zero(),
        };
        alg.tau_delta = match &alg.kummer {
            Some((m, d)) => {
                let dq = alg.k.pow(d, (q / m) as u64);
                alg.mul(&alg.delta_power(q % m), &alg.embed(dq))
            }
            None => alg.zero(),
        };
        Ok(alg)
    }

    /// `k(α)` with `α^p − α = 1/θ`, optionally adjoining `δ^{p−1} = 1 + θ^{p−1}`.
    pub fn artin_schreier_example(p: u64, with_delta: bool) -> Result<Self> {
        let f = Fq::prime(p)?;
        let k = RatFuncField::new(&f, Var::Theta);
        let c = k.frac(vec![1], vec![0, 1]);
        let kummer = with_delta.then(|| {
            let mut d = vec![0u32; p as usize];
            d[0] = 1;
            d[p as usize - 1] = 1;
            ((p - 1) as usize, k.from_poly(d))
        });
        ExtensionAlgebra::new(&f, Some(c), kummer)
    }

    pub fn fq(&self) -> &Fq {
        self.k.fq()
    }

    pub fn p(&self) -> u64 {
        self.fq().p()
    }

    pub fn dim(&self) -> usize {
        self.a_deg * self.m
    }

    pub fn alpha_degree(&self) -> usize {
        self.a_deg
    }

    pub fn delta_degree(&self) -> usize {
        self.m
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i + self.a_deg * j
    }

    pub fn embed(&self, c: RatFunc) -> Vec<RatFunc> {
        let mut v = vec![self.k.zero(); self.dim()];
        v[0] = c;
        v
    }

    pub fn theta(&self) -> Vec<RatFunc> {
        self.embed(self.k.from_poly(vec![0, 1]))
    }

    pub fn alpha(&self) -> Vec<RatFunc> {
        assert!(self.artin_schreier.is_some(), "no Artin–Schreier generator");
        let mut v = self.zero();
        v[self.idx(1, 0)] = self.k.one();
        v
    }

    pub fn delta(&self) -> Vec<RatFunc> {
        assert!(self.kummer.is_some(), "no Kummer generator");
        self.delta_power(1)
    }

    fn delta_power(&self, j: usize) -> Vec<RatFunc> {
        let (m, d) = self.kummer.clone().unwrap_or((1, self.k.one()));
        let mut v = self.zero();
        v[self.idx(0, j % m)] = self.k.pow(&d, (j / m) as u64);
        v
    }

    /// Coefficient of `α^i δ^j`.
    pub fn coeff(&self, x: &[RatFunc], i: usize, j: usize) -> RatFunc {
        x[self.idx(i, j)].clone()
    }

    /// `Some(c)` when `x` lies in `k`.
    pub fn as_scalar(&self, x: &[RatFunc]) -> Option<RatFunc> {
        x[1..].iter().all(|c| self.k.is_zero(c)).then(|| x[0].clone())
    }

    /// `σ_h`: `α ↦ α + h`, `δ ↦ δ`.
    pub fn sigma(&self, h: u64, x: &[RatFunc]) -> Vec<RatFunc> {
        if self.artin_schreier.is_none() || h % self.p() == 0 {
            return x.to_vec();
        }
        let shifted = self.add(&self.alpha(), &self.from_int(h as i64));
        let mut pows = vec![self.one()];
        for i in 1..self.a_deg {
            pows.push(self.mul(&pows[i - 1], &shifted));
        }
        let mut out = self.zero();
        for j in 0..self.m {
            for (i, pw) in pows.iter().enumerate() {
                let c = &x[self.idx(i, j)];
                if self.k.is_zero(c) {
                    continue;
                }
                let term = self.mul(&self.mul(pw, &self.delta_power(j)), &self.embed(c.clone()));
                out = self.add(&out, &term);
            }
        }
        out
    }

    /// `Tr_G = Σ_{h ∈ F_p} σ_h`.
    pub fn trace(&self, x: &[RatFunc]) -> Vec<RatFunc> {
        let n = if self.artin_schreier.is_some() { self.p() } else { 1 };
        (0..n).fold(self.zero(), |acc, h| self.add(&acc, &self.sigma(h, x)))
    }

    fn tau_once(&self, x: &[RatFunc]) -> Vec<RatFunc> {
        let mut apow = vec![self.one()];
        for i in 1..self.a_deg {
            apow.push(self.mul(&apow[i - 1], &self.tau_alpha));
        }
        let mut dpow = vec![self.one()];
        for j in 1..self.m {
            dpow.push(self.mul(&dpow[j - 1], &self.tau_delta));
        }
        let mut out = self.zero();
        for j in 0..self.m {
            for i in 0..self.a_deg {
                let c = &x[self.idx(i, j)];
                if self.k.is_zero(c) {
                    continue;
                }
                let c = self.k.frobenius(c, 1);
                let term = self.mul(&self.mul(&apow[i], &dpow[j]), &self.embed(c));
                out = self.add(&out, &term);
            }
        }
        out
    }

    /// Multiplication matrix over `k` in the basis `α^i δ^j`.
    pub fn multiplication_matrix(&self, x: &[RatFunc]) -> Matrix<RatFunc> {
        let cols: Vec<Vec<RatFunc>> = (0..self.dim())
            .map(|b| {
                let mut e = self.zero();
                e[b] = self.k.one();
                self.mul(&x.to_vec(), &e)
            })
            .collect();
        Matrix::from_fn(self.dim(), self.dim(), |i, j| cols[j][i].clone())
    }
}

impl Ring for ExtensionAlgebra {
    type Elem = Vec<RatFunc>;

    fn zero(&self) -> Self::Elem {
        vec![self.k.zero(); self.dim()]
    }

    fn one(&self) -> Self::Elem {
        self.embed(self.k.one())
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| self.k.add(x, y)).collect()
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|x| self.k.neg(x)).collect()
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let (na, nm) = (2 * self.a_deg - 1, 2 * self.m - 1);
        let k = &self.k;
        let mut grid = vec![vec![k.zero(); nm]; na];
        for (ia, x) in a.iter().enumerate() {
            if k.is_zero(x) {
                continue;
            }
            let (i1, j1) = (ia % self.a_deg, ia / self.a_deg);
            for (ib, y) in b.iter().enumerate() {
                if k.is_zero(y) {
                    continue;
                }
                let (i2, j2) = (ib % self.a_deg, ib / self.a_deg);
                let cell = &mut grid[i1 + i2][j1 + j2];
                *cell = k.add(cell, &k.mul(x, y));
            }
        }
        if let Some(c) = &self.artin_schreier {
            let p = self.a_deg;
            for i in (p..na).rev() {
                for j in 0..nm {
                    let v = std::mem::replace(&mut grid[i][j], k.zero());
                    if k.is_zero(&v) {
                        continue;
                    }
                    grid[i - p + 1][j] = k.add(&grid[i - p + 1][j], &v);
                    grid[i - p][j] = k.add(&grid[i - p][j], &k.mul(&v, c));
                }
            }
        }
        if let Some((m, d)) = &self.kummer {
            for j in (*m..nm).rev() {
                for row in grid.iter_mut().take(self.a_deg) {
                    let v = std::mem::replace(&mut row[j], k.zero());
                    if !k.is_zero(&v) {
                        row[j - m] = k.add(&row[j - m], &k.mul(&v, d));
                    }
                }
            }
        }
        let mut out = self.zero();
        for (i, row) in grid.iter().enumerate().take(self.a_deg) {
            for (j, v) in row.iter().enumerate().take(self.m) {
                out[self.idx(i, j)] = v.clone();
            }
        }
        out
    }

    fn from_int(&self, n: i64) -> Self::Elem {
        self.embed(self.k.from_int(n))
    }

    fn unit_inverse(&self, a: &Self::Elem) -> Option<Self::Elem> {
        matrix::solve(&self.k, &self.multiplication_matrix(a), &self.one())
            .filter(|y| self.mul(a, y) == self.one())
    }

    fn frobenius(&self, a: &Self::Elem, r: u32) -> Self::Elem {
        (0..r).fold(a.clone(), |x, _| self.tau_once(&x))
    }

    fn field_order(&self) -> u64 {
        self.fq().order()
    }

    fn characteristic(&self) -> u64 {
        self.p()
    }

    fn format(&self, a: &Self::Elem) -> String {
        let mut terms = vec![];
        for j in 0..self.m {
            for i in 0..self.a_deg {
                let c = &a[self.idx(i, j)];
                if self.k.is_zero(c) {
                    continue;
                }
                let mut t = format!("({})", self.k.format(c));
                if i > 0 {
                    t += &format!("*alpha^{i}");
                }
                if j > 0 {
                    t += &format!("*delta^{j}");
                }
                terms.push(t);
            }
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

/// Image of `x ∈ k` in `A/v`; fails when `v` shares a factor with the denominator.
pub fn reduce_ratfunc(ring: &PolyA, x: &RatFunc, v: &[u32]) -> Result<Vec<u32>> {
    let r = ResidueRing::new(&ring.base, v);
    let inv = r.unit_inverse(&r.reduce(&x.den)).ok_or_else(|| Error::BadPrime { prime: ring.format(&v.to_vec()) })?;
    Ok(r.mul(&r.reduce(&x.num), &inv))
}

/// `(b/P)_d` for a monic irreducible `P`.
pub fn residue_symbol_at_prime(ring: &PolyA, b: &[u32], prime: &[u32], d: u64) -> u32 {
    let r = ResidueRing::new(&ring.base, prime);
    let b = r.reduce(b);
    if b.is_empty() {
        return 0;
    }
    let q = ring.base.order() as u128;
    let e = (q.pow(r.degree() as u32) - 1) / d as u128;
    let s = ring.pow_mod(&b, e, &r.modulus).expect("monic modulus");
    assert_eq!(s.len(), 1, "power residue must be a constant");
    s[0]
}

/// `(b/c)_d = Π (b/P_i)_d^{f_i}` over the factorization of `c`.
pub fn residue_symbol(ring: &PolyA, b: &[u32], c: &[u32], d: u64) -> Result<u32> {
    let q = ring.base.order();
    if d == 0 || (q - 1) % d != 0 {
        return Err(Error::InvalidArgument(format!("d = {d} must divide q − 1 = {}", q - 1)));
    }
    if c.is_empty() {
        return Err(Error::InvalidArgument("residue symbol modulo 0".into()));
    }
    let f = &ring.base;
    let (_, factors) = ring.factor(c);
    Ok(factors
        .iter()
        .fold(f.one(), |acc, (pr, e)| f.mul(&acc, &f.pow(&residue_symbol_at_prime(ring, b, pr, d), *e as u64))))
}

/// The Frobenius `σ_P` of an Artin–Schreier extension, as the shift `η` with
/// `σ_P(α) = α + η`: read off from `α^{p^{deg P}}` computed in
/// `(A/P)[x]/(x^p − x − c)`.
pub fn artin_schreier_frobenius(alg: &ExtensionAlgebra, prime: &[u32]) -> Result<u64> {
    let c = alg.artin_schreier.as_ref().ok_or_else(|| Error::InvalidArgument("no Artin–Schreier generator".into()))?;
    let a = poly_a(alg.fq());
    let cbar = reduce_ratfunc(&a, c, prime).map_err(|_| Error::Ramified { prime: a.format(&prime.to_vec()) })?;
    let r = ResidueRing::new(alg.fq(), prime);
    let bx = PolyRing::new(r.clone(), Var::Z);
    let p = alg.p() as usize;
    let mut modulus = vec![r.zero(); p + 1];
    modulus[0] = r.neg(&cbar);
    modulus[1] = r.neg(&r.one());
    modulus[p] = r.one();
    let modulus = bx.normalize(modulus);
    let e = (alg.p() as u128).pow(r.degree() as u32);
    let y = bx.pow_mod(&bx.var_elem(), e, &modulus)?;
    let eta = bx.sub(&y, &bx.var_elem());
    match eta.as_slice() {
        [] => Ok(0),
        [c] if c.len() == 1 => Ok(c[0] as u64),
        _ => Err(Error::InvalidArgument(format!("{} does not give an F_p-shift of α", a.format(&prime.to_vec())))),
    }
}

/// `Tr_{(A/P)/F_p}(c mod P)`, the closed form of the Artin–Schreier Frobenius shift.
pub fn artin_schreier_trace(alg: &ExtensionAlgebra, prime: &[u32]) -> Result<u64> {
    let c = alg.artin_schreier.as_ref().ok_or_else(|| Error::InvalidArgument("no Artin–Schreier generator".into()))?;
    let a = poly_a(alg.fq());
    let cbar = reduce_ratfunc(&a, c, prime).map_err(|_| Error::Ramified { prime: a.format(&prime.to_vec()) })?;
    let r = ResidueRing::new(alg.fq(), prime);
    let t = (0..r.degree() as u32).fold(r.zero(), |acc, i| r.add(&acc, &r.frobenius(&cbar, i)));
    match t.as_slice() {
        [] => Ok(0),
        [c] => Ok(*c as u64),
        _ => unreachable!("trace lies in the prime field"),
    }
}

/// Coordinates of `σ_h(θα^{p−1})`, `h = 0..p−1` (columns), in the basis
/// `1, θα, …, θα^{p−1}` (rows).
pub fn normal_basis_matrix(alg: &ExtensionAlgebra) -> Result<Matrix<RatFunc>> {
    if alg.artin_schreier.is_none() {
        return Err(Error::InvalidArgument("no Artin–Schreier generator".into()));
    }
    let p = alg.p() as usize;
    let k = &alg.k;
    let theta = alg.theta();
    let g = alg.mul(&theta, &alg.pow(&alg.alpha(), (p - 1) as u64));
    let mut m = matrix::zeros(k, p, p);
    let theta_inv = k.frac(vec![1], vec![0, 1]);
    for h in 0..p {
        let x = alg.sigma(h as u64, &g);
        if (0..p).any(|i| (1..alg.delta_degree()).any(|j| !k.is_zero(&alg.coeff(&x, i, j)))) {
            return Err(Error::InvalidArgument("unexpected δ-component".into()));
        }
        for r in 0..p {
            let c = alg.coeff(&x, r, 0);
            m.set(r, h, if r == 0 { c } else { k.mul(&c, &theta_inv) });
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations_hold() {
        for p in [2u64, 3, 5] {
            let alg = ExtensionAlgebra::artin_schreier_example(p, true).unwrap();
            let a = alg.alpha();
            let lhs = alg.sub(&alg.pow(&a, p), &a);
            assert_eq!(alg.as_scalar(&lhs), Some(alg.k.frac(vec![1], vec![0, 1])));
            let d = alg.delta();
            let dm = alg.pow(&d, p - 1);
            let mut rel = vec![0u32; p as usize];
            rel[0] = 1;
            rel[p as usize - 1] = 1;
            assert_eq!(alg.as_scalar(&dm), Some(alg.k.from_poly(rel).clone()));
            // Frobenius agrees with p-th powers
            let x = alg.add(&alg.mul(&a, &d), &alg.theta());
            assert_eq!(alg.frobenius(&x, 1), alg.pow(&x, p));
        }
    }

    #[test]
    fn galois_action_is_a_group_action() {
        let alg = ExtensionAlgebra::artin_schreier_example(3, true).unwrap();
        let x = alg.add(&alg.pow(&alg.alpha(), 2), &alg.mul(&alg.alpha(), &alg.delta()));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(alg.sigma(i, &alg.sigma(j, &x)), alg.sigma((i + j) % 3, &x));
            }
        }
        // σ respects products
        let y = alg.add(&alg.alpha(), &alg.theta());
        assert_eq!(alg.sigma(1, &alg.mul(&x, &y)), alg.mul(&alg.sigma(1, &x), &alg.sigma(1, &y)));
    }

    #[test]
    fn trace_of_theta_alpha_top() {
        for p in [3u64, 5] {
            let alg = ExtensionAlgebra::artin_schreier_example(p, false).unwrap();
            let x = alg.mul(&alg.theta(), &alg.pow(&alg.alpha(), p - 1));
            let t = alg.trace(&x);
            assert_eq!(t, alg.neg(&alg.theta()));
        }
    }

    #[test]
    fn symbols_for_small_primes() {
        let f = Fq::prime(3).unwrap();
        let a = poly_a(&f);
        let b = vec![1, 0, 1];
        assert_eq!(residue_symbol_at_prime(&a, &b, &[0, 1], 2), 1);
        assert_eq!(residue_symbol_at_prime(&a, &b, &[1, 1], 2), 2);
        assert_eq!(residue_symbol_at_prime(&a, &b, &[1, 0, 1], 2), 0);
        assert!(residue_symbol(&a, &b, &[1, 1], 4).is_err());
        // (b/c) multiplicative in c
        let c1 = vec![1, 1];
        let c2 = vec![2, 1];
        let c = a.mul(&c1, &c2);
        let s = residue_symbol(&a, &b, &c, 2).unwrap();
        let s1 = residue_symbol(&a, &b, &c1, 2).unwrap();
        let s2 = residue_symbol(&a, &b, &c2, 2).unwrap();
        assert_eq!(s, f.mul(&s1, &s2));
    }

    #[test]
    fn frobenius_matches_trace() {
        let alg = ExtensionAlgebra::artin_schreier_example(3, false).unwrap();
        assert_eq!(artin_schreier_frobenius(&alg, &[1, 1]).unwrap(), 2);
        assert_eq!(artin_schreier_frobenius(&alg, &[2, 1]).unwrap(), 1);
        assert!(matches!(artin_schreier_frobenius(&alg, &[0, 1]), Err(Error::Ramified { .. })));
        let a = poly_a(alg.fq());
        for d in 1..=3 {
            for pr in crate::poly::irreducibles_by_degree(&a, d)[d].iter() {
                if pr == &vec![0, 1] {
                    continue;
                }
                assert_eq!(artin_schreier_frobenius(&alg, pr).unwrap(), artin_schreier_trace(&alg, pr).unwrap());
            }
        }
    }

    #[test]
    fn normal_basis_matrix_is_invertible() {
        let alg = ExtensionAlgebra::artin_schreier_example(3, false).unwrap();
        let m = normal_basis_matrix(&alg).unwrap();
        assert!(matrix::inverse(&alg.k, &m).is_some());
        // column h = 1: θ(α+1)^2 = θα^2 + 2θα + θ
        assert_eq!(*m.get(0, 1), alg.k.from_poly(vec![0, 1]));
        assert_eq!(*m.get(1, 1), alg.k.from_int(2));
        assert_eq!(*m.get(2, 1), alg.k.one());
    }
}
