//! Dense univariate polynomials over any [`Ring`], in either `θ` or `z`.
//!
//! Coefficient vectors are little-endian and carry no trailing zeros, so the
//! zero polynomial is the empty vector.

use crate::error::{Error, Result};
use crate::fq::Fq;
use crate::ring::{Field, Ring};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    /// The θ-side variable; Frobenius raises it to the `q`-th power.
    Theta,
    /// The deformation variable, fixed by Frobenius.
    Z,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::Theta => "theta",
            Var::Z => "z",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolyRing<R: Ring> {
    pub base: R,
    pub var: Var,
}

pub type Poly<R> = Vec<<R as Ring>::Elem>;

impl<R: Ring> PolyRing<R> {
    pub fn new(base: R, var: Var) -> Self {
        PolyRing { base, var }
    }

    pub fn normalize(&self, mut v: Vec<R::Elem>) -> Vec<R::Elem> {
        while v.last().is_some_and(|c| self.base.is_zero(c)) {
            v.pop();
        }
        v
    }

    pub fn from_coeffs(&self, v: Vec<R::Elem>) -> Vec<R::Elem> {
        self.normalize(v)
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self, a: &[R::Elem]) -> Option<usize> {
        a.len().checked_sub(1)
    }

    pub fn lead(&self, a: &[R::Elem]) -> R::Elem {
        a.last().cloned().unwrap_or_else(|| self.base.zero())
    }

    pub fn coeff(&self, a: &[R::Elem], i: usize) -> R::Elem {
        a.get(i).cloned().unwrap_or_else(|| self.base.zero())
    }

    pub fn constant(&self, c: R::Elem) -> Vec<R::Elem> {
        self.normalize(vec![c])
    }

    /// `c · var^i`.
    pub fn monomial(&self, c: R::Elem, i: usize) -> Vec<R::Elem> {
        if self.base.is_zero(&c) {
            return vec![];
        }
        let mut v = vec![self.base.zero(); i + 1];
        v[i] = c;
        v
    }

    pub fn var_elem(&self) -> Vec<R::Elem> {
        self.monomial(self.base.one(), 1)
    }

    pub fn is_monic(&self, a: &[R::Elem]) -> bool {
        a.last().is_some_and(|c| self.base.is_one(c))
    }

    pub fn scale(&self, a: &[R::Elem], c: &R::Elem) -> Vec<R::Elem> {
        self.normalize(a.iter().map(|x| self.base.mul(x, c)).collect())
    }

    /// Multiplication by `var^k`.
    pub fn shift(&self, a: &[R::Elem], k: usize) -> Vec<R::Elem> {
        if a.is_empty() {
            return vec![];
        }
        let mut v = vec![self.base.zero(); k];
        v.extend_from_slice(a);
        v
    }

    pub fn map_coeffs<S: Ring>(&self, a: &[R::Elem], target: &PolyRing<S>, f: impl Fn(&R::Elem) -> S::Elem) -> Vec<S::Elem> {
        target.normalize(a.iter().map(f).collect())
    }

    pub fn eval(&self, a: &[R::Elem], x: &R::Elem) -> R::Elem {
        let mut acc = self.base.zero();
        for c in a.iter().rev() {
            acc = self.base.add(&self.base.mul(&acc, x), c);
        }
        acc
    }

    /// Division with remainder by a divisor whose leading coefficient is a unit.
    pub fn div_rem(&self, a: &[R::Elem], b: &[R::Elem]) -> Result<(Vec<R::Elem>, Vec<R::Elem>)> {
        let lb = b.last().ok_or_else(|| Error::InvalidArgument("division by zero polynomial".into()))?;
        let inv = self
            .base
            .unit_inverse(lb)
            .ok_or_else(|| Error::NonInvertibleLead { coefficient: self.base.format(lb) })?;
        let db = b.len() - 1;
        let mut r = a.to_vec();
        if r.len() <= db {
            return Ok((vec![], self.normalize(r)));
        }
        let mut quot = vec![self.base.zero(); r.len() - db];
        for k in (db..r.len()).rev() {
            let c = self.base.mul(&r[k], &inv);
            if self.base.is_zero(&c) {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                let t = self.base.mul(&c, bj);
                r[k - db + j] = self.base.sub(&r[k - db + j], &t);
            }
            quot[k - db] = c;
        }
        r.truncate(db);
        Ok((self.normalize(quot), self.normalize(r)))
    }

    pub fn rem(&self, a: &[R::Elem], b: &[R::Elem]) -> Result<Vec<R::Elem>> {
        Ok(self.div_rem(a, b)?.1)
    }

    pub fn mul_mod(&self, a: &[R::Elem], b: &[R::Elem], m: &[R::Elem]) -> Result<Vec<R::Elem>> {
        self.rem(&self.mul(&a.to_vec(), &b.to_vec()), m)
    }

    pub fn pow_mod(&self, a: &[R::Elem], mut e: u128, m: &[R::Elem]) -> Result<Vec<R::Elem>> {
        let mut base = self.rem(a, m)?;
        let mut acc = self.rem(&self.one(), m)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_mod(&acc, &base, m)?;
            }
            e >>= 1;
            if e > 0 {
                base = self.mul_mod(&base, &base, m)?;
            }
        }
        Ok(acc)
    }

    pub fn format_with(&self, a: &[R::Elem], var: &str) -> String {
        if a.is_empty() {
            return "0".into();
        }
        let mut terms = vec![];
        for (i, c) in a.iter().enumerate().rev() {
            if self.base.is_zero(c) {
                continue;
            }
            let cs = self.base.format(c);
            let cs = if cs.contains('+') || cs.contains(' ') { format!("({cs})") } else { cs };
            let t = match (i, self.base.is_one(c)) {
                (0, _) => cs,
                (1, true) => var.to_string(),
                (1, false) => format!("{cs}*{var}"),
                (_, true) => format!("{var}^{i}"),
                (_, false) => format!("{cs}*{var}^{i}"),
            };
            terms.push(t);
        }
        terms.join(" + ")
    }
}

impl<R: Ring> Ring for PolyRing<R> {
    type Elem = Vec<R::Elem>;

    fn zero(&self) -> Self::Elem {
        vec![]
    }

    fn one(&self) -> Self::Elem {
        self.constant(self.base.one())
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let n = a.len().max(b.len());
        let v = (0..n)
            .map(|i| match (a.get(i), b.get(i)) {
                (Some(x), Some(y)) => self.base.add(x, y),
                (Some(x), None) => x.clone(),
                (None, Some(y)) => y.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        self.normalize(v)
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|x| self.base.neg(x)).collect()
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let n = a.len().max(b.len());
        let v = (0..n)
            .map(|i| match (a.get(i), b.get(i)) {
                (Some(x), Some(y)) => self.base.sub(x, y),
                (Some(x), None) => x.clone(),
                (None, Some(y)) => self.base.neg(y),
                (None, None) => unreachable!(),
            })
            .collect();
        self.normalize(v)
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut v = vec![self.base.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if self.base.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                v[i + j] = self.base.add(&v[i + j], &self.base.mul(x, y));
            }
        }
        self.normalize(v)
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.is_empty()
    }

    fn from_int(&self, n: i64) -> Self::Elem {
        self.constant(self.base.from_int(n))
    }

    /// Units of `R[x]` that this routine finds: the units of `R` in degree 0.
    fn unit_inverse(&self, a: &Self::Elem) -> Option<Self::Elem> {
        if a.len() == 1 {
            self.base.unit_inverse(&a[0]).map(|c| vec![c])
        } else {
            None
        }
    }

    fn frobenius(&self, a: &Self::Elem, r: u32) -> Self::Elem {
        if r == 0 || a.is_empty() {
            return a.clone();
        }
        match self.var {
            Var::Z => a.iter().map(|c| self.base.frobenius(c, r)).collect(),
            Var::Theta => {
                let qr = (self.base.field_order() as usize).pow(r);
                let mut v = vec![self.base.zero(); (a.len() - 1) * qr + 1];
                for (i, c) in a.iter().enumerate() {
                    v[i * qr] = self.base.frobenius(c, r);
                }
                v
            }
        }
    }

    fn field_order(&self) -> u64 {
        self.base.field_order()
    }

    fn characteristic(&self) -> u64 {
        self.base.characteristic()
    }

    fn format(&self, a: &Self::Elem) -> String {
        self.format_with(a, self.var.name())
    }
}

/// `F_q[θ]`.
pub type PolyA = PolyRing<Fq>;

pub fn poly_a(f: &Fq) -> PolyA {
    PolyRing::new(f.clone(), Var::Theta)
}

impl PolyRing<Fq> {
    pub fn make_monic(&self, a: &[u32]) -> Vec<u32> {
        match a.last() {
            None => vec![],
            Some(l) => {
                let inv = self.base.inv(l).expect("nonzero lead");
                self.scale(a, &inv)
            }
        }
    }

    pub fn gcd(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let (mut x, mut y) = (a.to_vec(), b.to_vec());
        while !y.is_empty() {
            let r = self.rem(&x, &y).expect("nonzero divisor");
            x = y;
            y = r;
        }
        self.make_monic(&x)
    }

    pub fn divides(&self, d: &[u32], a: &[u32]) -> bool {
        self.rem(a, d).map(|r| r.is_empty()).unwrap_or(false)
    }

    /// Exact quotient, `None` when `d` does not divide `a`.
    pub fn exact_div(&self, a: &[u32], d: &[u32]) -> Option<Vec<u32>> {
        let (q, r) = self.div_rem(a, d).ok()?;
        r.is_empty().then_some(q)
    }

    /// Rabin's irreducibility test: `f | x^{q^n} - x` and
    /// `gcd(x^{q^{n/r}} - x, f) = 1` for each prime `r | n`.
    pub fn is_irreducible(&self, f: &[u32]) -> bool {
        let n = match self.degree(f) {
            None | Some(0) => return false,
            Some(n) => n,
        };
        if n == 1 {
            return true;
        }
        let q = self.base.order() as u128;
        let x = self.var_elem();
        let frob_pow = |k: usize| -> Vec<u32> {
            let mut acc = x.clone();
            for _ in 0..k {
                acc = self.pow_mod(&acc, q, f).unwrap();
            }
            acc
        };
        let full = self.sub(&frob_pow(n), &x);
        if !self.rem(&full, f).unwrap().is_empty() {
            return false;
        }
        for r in (2..=n).filter(|r| n % r == 0 && crate::fq::is_prime(*r as u64)) {
            let h = self.sub(&frob_pow(n / r), &x);
            if self.degree(&self.gcd(&h, f)) != Some(0) {
                return false;
            }
        }
        true
    }

    /// The monic polynomial of degree `d` whose lower coefficients are the
    /// base-`q` digits of `index`.
    pub fn monic_from_index(&self, d: usize, index: u64) -> Vec<u32> {
        let q = self.base.order();
        let mut x = index;
        let mut v = Vec::with_capacity(d + 1);
        for _ in 0..d {
            v.push((x % q) as u32);
            x /= q;
        }
        v.push(1);
        v
    }

    pub fn index_of_monic(&self, f: &[u32]) -> u64 {
        let q = self.base.order();
        f[..f.len() - 1].iter().rev().fold(0u64, |acc, &c| acc * q + c as u64)
    }

    pub fn monics_of_degree(&self, d: usize) -> impl Iterator<Item = Vec<u32>> + '_ {
        let count = self.base.order().pow(d as u32);
        (0..count).map(move |i| self.monic_from_index(d, i))
    }

    /// Factorization into monic irreducibles with multiplicity, plus the
    /// leading coefficient. Trial division; meant for small degrees.
    pub fn factor(&self, f: &[u32]) -> (u32, Vec<(Vec<u32>, u32)>) {
        assert!(!f.is_empty(), "cannot factor zero");
        let lead = *f.last().unwrap();
        let mut rest = self.make_monic(f);
        let mut out = vec![];
        let mut d = 1;
        while self.degree(&rest).unwrap() >= 2 * d {
            for p in self.monics_of_degree(d) {
                if !self.is_irreducible(&p) {
                    continue;
                }
                let mut e = 0;
                while let Some(qt) = self.exact_div(&rest, &p) {
                    rest = qt;
                    e += 1;
                }
                if e > 0 {
                    out.push((p, e));
                }
            }
            d += 1;
        }
        if self.degree(&rest).unwrap() > 0 {
            match out.iter_mut().find(|(p, _)| *p == rest) {
                Some(entry) => entry.1 += 1,
                None => out.push((rest, 1)),
            }
        }
        out.sort();
        (lead, out)
    }
}

/// Number of monic irreducibles of degree `d` over `F_q`:
/// `(1/d) Σ_{e|d} μ(e) q^{d/e}`.
pub fn necklace_count(q: u64, d: u32) -> u128 {
    let mobius = |mut n: u32| -> i128 {
        let mut m = 1i128;
        let mut p = 2;
        while p * p <= n {
            if n % p == 0 {
                n /= p;
                if n % p == 0 {
                    return 0;
                }
                m = -m;
            }
            p += 1;
        }
        if n > 1 {
            m = -m;
        }
        m
    };
    let total: i128 = (1..=d)
        .filter(|e| d % e == 0)
        .map(|e| mobius(e) * (q as i128).pow(d / e))
        .sum();
    (total / d as i128) as u128
}

/// A monic irreducible `v ∈ F_q[θ]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeOfA {
    pub v: Vec<u32>,
}

impl PrimeOfA {
    /// Checked constructor: the polynomial must be monic and irreducible.
    pub fn new(ring: &PolyA, v: Vec<u32>) -> Result<Self> {
        if !ring.is_monic(&v) || !ring.is_irreducible(&v) {
            return Err(Error::InvalidArgument(format!("{} is not a monic irreducible", ring.format(&v))));
        }
        Ok(PrimeOfA { v })
    }

    pub fn degree(&self) -> usize {
        self.v.len() - 1
    }
}

/// Monic irreducibles of degree exactly `d`, in increasing index order,
/// given those of all smaller degrees. Sieves out every product `f·g` with
/// `f` irreducible of degree `≤ d/2`.
fn sieve_degree(ring: &PolyA, d: usize, smaller: &[Vec<Vec<u32>>]) -> Vec<Vec<u32>> {
    let q = ring.base.order();
    let count = q.pow(d as u32) as usize;
    let mut composite = vec![false; count];
    for e in 1..=d / 2 {
        for f in &smaller[e] {
            for g in ring.monics_of_degree(d - e) {
                let h = ring.mul(f, &g);
                composite[ring.index_of_monic(&h) as usize] = true;
            }
        }
    }
    composite
        .iter()
        .enumerate()
        .filter(|(_, c)| !**c)
        .map(|(i, _)| ring.monic_from_index(d, i as u64))
        .collect()
}

/// All monic irreducibles of degree `≤ d_max`, grouped by degree (index `d`
/// holds degree `d`; index 0 is empty).
pub fn irreducibles_by_degree(ring: &PolyA, d_max: usize) -> Vec<Vec<Vec<u32>>> {
    let mut by_deg: Vec<Vec<Vec<u32>>> = vec![vec![]];
    for d in 1..=d_max {
        let next = sieve_degree(ring, d, &by_deg);
        by_deg.push(next);
    }
    by_deg
}

pub fn enumerate_monic_irreducibles(ring: &PolyA, d_max: usize) -> Vec<PrimeOfA> {
    irreducibles_by_degree(ring, d_max)
        .into_iter()
        .flatten()
        .map(|v| PrimeOfA { v })
        .collect()
}

/// Number of monic irreducibles of degree `≤ d_max` without enumerating them.
pub fn prime_count_up_to(q: u64, d_max: u32) -> u128 {
    (1..=d_max).map(|d| necklace_count(q, d)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_irreducible_lists() {
        let f2 = Fq::prime(2).unwrap();
        let a = poly_a(&f2);
        let ps: Vec<_> = enumerate_monic_irreducibles(&a, 2).into_iter().map(|p| p.v).collect();
        assert_eq!(ps, vec![vec![0, 1], vec![1, 1], vec![1, 1, 1]]);
        let by = irreducibles_by_degree(&a, 3);
        assert_eq!(by[3].len(), 2);

        let f3 = Fq::prime(3).unwrap();
        let a3 = poly_a(&f3);
        let ps: Vec<_> = enumerate_monic_irreducibles(&a3, 1).into_iter().map(|p| p.v).collect();
        assert_eq!(ps, vec![vec![0, 1], vec![1, 1], vec![2, 1]]);
    }

    #[test]
    fn sieve_matches_necklace_and_rabin() {
        for q in [2u64, 3, 4] {
            let f = Fq::with_order(q).unwrap();
            let a = poly_a(&f);
            let by = irreducibles_by_degree(&a, if q == 4 { 4 } else { 6 });
            for (d, list) in by.iter().enumerate().skip(1) {
                assert_eq!(list.len() as u128, necklace_count(q, d as u32), "q={q} d={d}");
                if d <= 4 {
                    let rabin = a.monics_of_degree(d).filter(|p| a.is_irreducible(p)).count();
                    assert_eq!(rabin, list.len());
                }
                assert!(list.iter().all(|p| a.is_irreducible(p)));
            }
        }
    }

    #[test]
    fn frobenius_on_theta() {
        let f2 = Fq::prime(2).unwrap();
        let a = poly_a(&f2);
        assert_eq!(a.frobenius(&vec![1, 1], 1), vec![1, 0, 1]);
        let z = PolyRing::new(f2.clone(), Var::Z);
        assert_eq!(z.frobenius(&vec![0, 1], 3), vec![0, 1]);
    }

    #[test]
    fn factor_roundtrip() {
        let f3 = Fq::prime(3).unwrap();
        let a = poly_a(&f3);
        // (θ+1)^2 (θ^2+1) · 2
        let f = a.scale(&a.mul(&a.mul(&vec![1, 1], &vec![1, 1]), &vec![1, 0, 1]), &2);
        let (lead, fac) = a.factor(&f);
        assert_eq!(lead, 2);
        assert_eq!(fac, vec![(vec![1, 0, 1], 1), (vec![1, 1], 2)]);
    }

    #[test]
    fn div_rem_identity() {
        let f3 = Fq::prime(3).unwrap();
        let a = poly_a(&f3);
        let x = vec![2, 0, 1, 1, 2];
        let y = vec![1, 2, 2];
        let (qt, r) = a.div_rem(&x, &y).unwrap();
        assert_eq!(a.add(&a.mul(&qt, &y), &r), x);
        assert!(r.len() < y.len());
    }
}
