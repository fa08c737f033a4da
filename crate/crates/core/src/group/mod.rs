//! Finite abelian groups and their group rings `R[G]`.

mod characters;
mod cohomology;
mod monic;

pub use characters::{idempotent_decomposition, CharacterBlock, Characters};
pub use cohomology::{is_free_over, is_g_cohomologically_trivial, tate_h0, FiniteGModule};
pub use monic::{is_block_monic, monic_representative, MonicDecomposition};

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrix::{self, Matrix};
use crate::ring::Ring;

/// `Z/d_1 × … × Z/d_k`, elements indexed in mixed radix with the first
/// factor most significant.
#[derive(Clone, PartialEq, Eq)]
pub struct AbelianGroup {
    factors: Vec<u64>,
    p: u64,
    order: usize,
    op: Vec<usize>,
    inv: Vec<usize>,
}

impl fmt::Debug for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.spec())
    }
}

impl AbelianGroup {
    /// Group with the given cyclic factors; `p` is the characteristic of the
    /// coefficient rings it will be used with.
    pub fn new(factors: Vec<u64>, p: u64) -> Result<Self> {
        if factors.iter().any(|&d| d == 0) {
            return Err(Error::InvalidArgument("cyclic factor of order 0".into()));
        }
        let factors: Vec<u64> = factors.into_iter().filter(|&d| d > 1).collect();
        let order: usize = factors.iter().product::<u64>() as usize;
        if order > 4096 {
            return Err(Error::InvalidArgument(format!("group of order {order} is too large")));
        }
        let mut g = AbelianGroup { factors, p, order, op: vec![], inv: vec![] };
        let tuples: Vec<Vec<u64>> = (0..order).map(|i| g.tuple(i)).collect();
        g.op = Vec::with_capacity(order * order);
        for a in &tuples {
            for b in &tuples {
                let s: Vec<u64> = a.iter().zip(b).zip(&g.factors).map(|((x, y), d)| (x + y) % d).collect();
                g.op.push(g.index(&s));
            }
        }
        g.inv = tuples
            .iter()
            .map(|a| {
                let s: Vec<u64> = a.iter().zip(&g.factors).map(|(x, d)| (d - x) % d).collect();
                g.index(&s)
            })
            .collect();
        Ok(g)
    }

    pub fn trivial(p: u64) -> Self {
        Self::new(vec![], p).unwrap()
    }

    pub fn cyclic(n: u64, p: u64) -> Result<Self> {
        Self::new(vec![n], p)
    }

    /// Parses `"Z/d1 x Z/d2 x ..."`; `"1"` or an empty string is the trivial group.
    pub fn parse(spec: &str, p: u64) -> Result<Self> {
        let s = spec.trim();
        if s.is_empty() || s == "1" {
            return Ok(Self::trivial(p));
        }
        let factors = s
            .split(['x', '×'])
            .map(|part| {
                let t = part.trim();
                let n = t
                    .strip_prefix("Z/")
                    .ok_or_else(|| Error::Parse(format!("group factor `{t}` must look like Z/n")))?;
                n.trim().parse::<u64>().map_err(|e| Error::Parse(format!("group factor `{t}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(factors, p)
    }

    pub fn spec(&self) -> String {
        if self.factors.is_empty() {
            "1".into()
        } else {
            self.factors.iter().map(|d| format!("Z/{d}")).collect::<Vec<_>>().join(" x ")
        }
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn op(&self, a: usize, b: usize) -> usize {
        self.op[a * self.order + b]
    }

    #[inline]
    pub fn inverse(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn tuple(&self, mut i: usize) -> Vec<u64> {
        let mut t = vec![0; self.factors.len()];
        for k in (0..self.factors.len()).rev() {
            let d = self.factors[k] as usize;
            t[k] = (i % d) as u64;
            i /= d;
        }
        t
    }

    pub fn index(&self, t: &[u64]) -> usize {
        t.iter().zip(&self.factors).fold(0usize, |acc, (x, d)| acc * *d as usize + (*x % *d) as usize)
    }

    /// Generators `(0,…,1,…,0)` of the cyclic factors.
    pub fn generators(&self) -> Vec<usize> {
        (0..self.factors.len())
            .map(|k| {
                let mut t = vec![0; self.factors.len()];
                t[k] = 1;
                self.index(&t)
            })
            .collect()
    }

    pub fn power(&self, g: usize, n: u64) -> usize {
        let t: Vec<u64> = self.tuple(g).iter().zip(&self.factors).map(|(x, d)| (x * (n % d)) % d).collect();
        self.index(&t)
    }

    /// Per factor, `d = p^a · m` with `p ∤ m`.
    fn split_factor(&self, d: u64) -> (u64, u64) {
        let mut pa = 1;
        let mut m = d;
        while m % self.p == 0 {
            m /= self.p;
            pa *= self.p;
        }
        (pa, m)
    }

    /// Orders of the cyclic factors of the `p`-Sylow subgroup `H`.
    pub fn h_factors(&self) -> Vec<u64> {
        self.factors.iter().map(|&d| self.split_factor(d).0).collect()
    }

    /// Orders of the cyclic factors of the prime-to-`p` part `Δ`.
    pub fn delta_factors(&self) -> Vec<u64> {
        self.factors.iter().map(|&d| self.split_factor(d).1).collect()
    }

    pub fn h_order(&self) -> usize {
        self.h_factors().iter().product::<u64>() as usize
    }

    pub fn delta_order(&self) -> usize {
        self.delta_factors().iter().product::<u64>() as usize
    }

    /// Residues of `g` in the factors of `Δ`.
    pub fn delta_part(&self, g: usize) -> Vec<u64> {
        self.tuple(g).iter().zip(self.delta_factors()).map(|(x, m)| x % m).collect()
    }

    /// The element of `G` lying in `Δ` with the given `Δ`-residues (CRT lift).
    pub fn delta_element(&self, residues: &[u64]) -> usize {
        let t: Vec<u64> = self
            .factors
            .iter()
            .zip(residues)
            .map(|(&d, &r)| {
                let (pa, m) = self.split_factor(d);
                (0..d).find(|x| x % pa == 0 && x % m == r % m).unwrap()
            })
            .collect();
        self.index(&t)
    }

    /// Generators of `H` as elements of `G`.
    pub fn h_generators(&self) -> Vec<usize> {
        self.factors
            .iter()
            .enumerate()
            .filter_map(|(k, &d)| {
                let (pa, m) = self.split_factor(d);
                (pa > 1).then(|| {
                    let mut t = vec![0; self.factors.len()];
                    t[k] = (0..d).find(|x| x % pa == 1 % pa && x % m == 0).unwrap();
                    self.index(&t)
                })
            })
            .collect()
    }

    pub fn format_element(&self, g: usize) -> String {
        if g == 0 {
            return "1".into();
        }
        let t = self.tuple(g);
        if t.len() == 1 {
            if t[0] == 1 {
                "s".into()
            } else {
                format!("s^{}", t[0])
            }
        } else {
            format!("s({})", t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
        }
    }

    /// JSON key `"(a,b,...)"`.
    pub fn element_key(&self, g: usize) -> String {
        format!("({})", self.tuple(g).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
    }

    pub fn parse_element_key(&self, key: &str) -> Result<usize> {
        let inner = key
            .trim()
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("group element key `{key}`")))?;
        let parts: Vec<u64> = if inner.trim().is_empty() {
            vec![]
        } else {
            inner
                .split(',')
                .map(|x| x.trim().parse::<u64>().map_err(|e| Error::Parse(format!("group element key `{key}`: {e}"))))
                .collect::<Result<_>>()?
        };
        if parts.len() != self.factors.len() {
            return Err(Error::Parse(format!("group element key `{key}` has wrong arity")));
        }
        Ok(self.index(&parts))
    }
}

/// `R[G]`, elements dense over `G`.
#[derive(Clone, PartialEq)]
pub struct GroupRing<R: Ring> {
    pub base: R,
    pub group: Arc<AbelianGroup>,
}

impl<R: Ring> fmt::Debug for GroupRing<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[{:?}]", self.base, self.group)
    }
}

impl<R: Ring> GroupRing<R> {
    pub fn new(base: R, group: Arc<AbelianGroup>) -> Self {
        GroupRing { base, group }
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    /// `c · g`.
    pub fn term(&self, c: R::Elem, g: usize) -> Vec<R::Elem> {
        let mut v = vec![self.base.zero(); self.order()];
        v[g] = c;
        v
    }

    pub fn basis(&self, g: usize) -> Vec<R::Elem> {
        self.term(self.base.one(), g)
    }

    pub fn embed(&self, c: R::Elem) -> Vec<R::Elem> {
        self.term(c, 0)
    }

    /// `Tr_G = Σ_{g ∈ G} g`.
    pub fn trace_element(&self) -> Vec<R::Elem> {
        vec![self.base.one(); self.order()]
    }

    pub fn scale(&self, x: &[R::Elem], c: &R::Elem) -> Vec<R::Elem> {
        x.iter().map(|a| self.base.mul(a, c)).collect()
    }

    /// Multiplication by a group element.
    pub fn translate(&self, x: &[R::Elem], g: usize) -> Vec<R::Elem> {
        let mut v = vec![self.base.zero(); self.order()];
        for (h, c) in x.iter().enumerate() {
            v[self.group.op(g, h)] = c.clone();
        }
        v
    }

    /// `M_x` with `(M_x)_{ij} = x_{g_i g_j^{-1}}`, the matrix of left
    /// multiplication by `x` on the basis `G`.
    pub fn multiplication_matrix(&self, x: &[R::Elem]) -> Matrix<R::Elem> {
        let g = &self.group;
        Matrix::from_fn(self.order(), self.order(), |i, j| x[g.op(i, g.inverse(j))].clone())
    }

    /// `det_G(x) = det(M_x)`.
    pub fn det_g(&self, x: &[R::Elem]) -> R::Elem {
        matrix::det(&self.base, &self.multiplication_matrix(x))
    }

    /// Augmentation `Σ_g x_g`.
    pub fn augmentation(&self, x: &[R::Elem]) -> R::Elem {
        self.base.sum(x.iter())
    }

    pub fn map_to<S: Ring>(&self, target: &GroupRing<S>, x: &[R::Elem], f: impl Fn(&R::Elem) -> S::Elem) -> Vec<S::Elem> {
        debug_assert_eq!(self.order(), target.order());
        x.iter().map(f).collect()
    }

    /// Restriction of scalars: a matrix over `R[G]` as a block matrix over `R`
    /// acting on the basis `{g · e_j}`; block `(i, j)` is `M_{a_ij}`.
    pub fn restrict_matrix(&self, a: &Matrix<Vec<R::Elem>>) -> Matrix<R::Elem> {
        let n = self.order();
        let blocks: Vec<Vec<Matrix<R::Elem>>> = (0..a.rows)
            .map(|i| (0..a.cols).map(|j| self.multiplication_matrix(a.get(i, j))).collect())
            .collect();
        if a.rows == 0 {
            return Matrix { rows: 0, cols: 0, data: vec![] };
        }
        let m = matrix::block(&blocks);
        debug_assert_eq!(m.rows, a.rows * n);
        m
    }
}

impl<R: Ring> Ring for GroupRing<R> {
    type Elem = Vec<R::Elem>;

    fn zero(&self) -> Self::Elem {
        vec![self.base.zero(); self.order()]
    }

    fn one(&self) -> Self::Elem {
        self.basis(0)
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|x| self.base.neg(x)).collect()
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| self.base.sub(x, y)).collect()
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let mut v = self.zero();
        for (g, x) in a.iter().enumerate() {
            if self.base.is_zero(x) {
                continue;
            }
            for (h, y) in b.iter().enumerate() {
                if self.base.is_zero(y) {
                    continue;
                }
                let k = self.group.op(g, h);
                v[k] = self.base.add(&v[k], &self.base.mul(x, y));
            }
        }
        v
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.iter().all(|x| self.base.is_zero(x))
    }

    fn from_int(&self, n: i64) -> Self::Elem {
        self.embed(self.base.from_int(n))
    }

    /// Inverse through the adjugate of `M_x`; succeeds iff `det_G(x)` is a
    /// unit of the base ring.
    fn unit_inverse(&self, a: &Self::Elem) -> Option<Self::Elem> {
        let m = self.multiplication_matrix(a);
        let d = matrix::det(&self.base, &m);
        let di = self.base.unit_inverse(&d)?;
        let adj = matrix::adjugate(&self.base, &m);
        Some(adj.column(0).iter().map(|c| self.base.mul(c, &di)).collect())
    }

    fn frobenius(&self, a: &Self::Elem, r: u32) -> Self::Elem {
        a.iter().map(|x| self.base.frobenius(x, r)).collect()
    }

    fn field_order(&self) -> u64 {
        self.base.field_order()
    }

    fn characteristic(&self) -> u64 {
        self.base.characteristic()
    }

    fn format(&self, a: &Self::Elem) -> String {
        let mut terms = vec![];
        for (g, c) in a.iter().enumerate() {
            if self.base.is_zero(c) {
                continue;
            }
            let cs = self.base.format(c);
            let gs = self.group.format_element(g);
            terms.push(match (g, self.base.is_one(c)) {
                (0, _) => cs,
                (_, true) => gs,
                _ if cs.contains(' ') || cs.contains('+') => format!("({cs})*{gs}"),
                _ => format!("{cs}*{gs}"),
            });
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fq::Fq;
    use crate::poly::poly_a;

    #[test]
    fn parse_and_split() {
        let g = AbelianGroup::parse("Z/2 x Z/6", 3).unwrap();
        assert_eq!(g.order(), 12);
        assert_eq!(g.h_order(), 3);
        assert_eq!(g.delta_order(), 4);
        let h = g.h_generators();
        assert_eq!(h.len(), 1);
        assert_eq!(g.power(h[0], 3), 0);
        assert!(AbelianGroup::parse("Z/x", 3).is_err());
        assert_eq!(g.parse_element_key(&g.element_key(7)).unwrap(), 7);
    }

    #[test]
    fn det_g_of_theta_plus_sigma() {
        let f = Fq::prime(3).unwrap();
        let a = poly_a(&f);
        let g = Arc::new(AbelianGroup::cyclic(2, 3).unwrap());
        let ag = GroupRing::new(a.clone(), g);
        let x = vec![vec![0, 1], vec![1]];
        // θ^2 - 1
        assert_eq!(ag.det_g(&x), vec![2, 0, 1]);
        assert_eq!(ag.det_g(&ag.one()), a.one());
    }

    #[test]
    fn trace_is_absorbing() {
        let f = Fq::prime(3).unwrap();
        let g = Arc::new(AbelianGroup::cyclic(3, 3).unwrap());
        let r = GroupRing::new(f, g);
        let tr = r.trace_element();
        for h in 0..3 {
            assert_eq!(r.mul(&r.basis(h), &tr), tr);
        }
        assert!(r.is_zero(&r.mul(&tr, &tr)));
    }

    #[test]
    fn unit_inverse_via_adjugate() {
        let f = Fq::prime(5).unwrap();
        let g = Arc::new(AbelianGroup::cyclic(2, 5).unwrap());
        let r = GroupRing::new(f, g);
        let x = vec![1, 2];
        let y = r.unit_inverse(&x).unwrap();
        assert_eq!(r.mul(&x, &y), r.one());
        assert!(r.unit_inverse(&vec![1, 1]).is_none());
    }
}
