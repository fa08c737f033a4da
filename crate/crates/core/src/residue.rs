//! The finite quotient `A/vA` with its `q`-power Frobenius, the natural place
//! to let a t-module act on torsion.

use crate::fq::Fq;
use crate::matrix::Matrix;
use crate::poly::{poly_a, PolyA};
use crate::ring::{Field, Ring};

#[derive(Clone, Debug)]
pub struct ResidueRing {
    pub poly: PolyA,
    pub modulus: Vec<u32>,
}

impl ResidueRing {
    /// `modulus` must have positive degree; it is made monic.
    pub fn new(f: &Fq, modulus: &[u32]) -> Self {
        let poly = poly_a(f);
        let modulus = poly.make_monic(modulus);
        assert!(modulus.len() >= 2, "modulus must have positive degree");
        ResidueRing { poly, modulus }
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn reduce(&self, a: &[u32]) -> Vec<u32> {
        self.poly.rem(a, &self.modulus).expect("monic modulus")
    }

    /// Coordinates in the basis `1, θ, …, θ^{d−1}`.
    pub fn coords(&self, a: &[u32]) -> Vec<u32> {
        (0..self.degree()).map(|i| self.poly.coeff(a, i)).collect()
    }

    pub fn from_coords(&self, c: &[u32]) -> Vec<u32> {
        self.poly.from_coeffs(c.to_vec())
    }

    /// Matrix over `F_q` of an `F_q`-linear map `(A/v)^n → (A/v)^n`, in the
    /// basis ordered coordinate-major: `(e_k θ^i)` at index `k·d + i`.
    pub fn linear_map_matrix(&self, n: usize, map: impl Fn(&[Vec<u32>]) -> Vec<Vec<u32>>) -> Matrix<u32> {
        let d = self.degree();
        let f = &self.poly.base;
        let mut m = Matrix { rows: n * d, cols: n * d, data: vec![f.zero(); n * d * n * d] };
        for k in 0..n {
            for i in 0..d {
                let mut x = vec![vec![]; n];
                x[k] = self.poly.monomial(f.one(), i);
                let y = map(&x);
                for (k2, yk) in y.iter().enumerate() {
                    for (i2, c) in self.coords(yk).into_iter().enumerate() {
                        m.set(k2 * d + i2, k * d + i, c);
                    }
                }
            }
        }
        m
    }
}

impl Ring for ResidueRing {
    type Elem = Vec<u32>;

    fn zero(&self) -> Self::Elem {
        vec![]
    }

    fn one(&self) -> Self::Elem {
        self.poly.one()
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.poly.add(a, b)
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        self.poly.neg(a)
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.reduce(&self.poly.mul(a, b))
    }

    fn from_int(&self, n: i64) -> Self::Elem {
        self.poly.from_int(n)
    }

    fn unit_inverse(&self, a: &Self::Elem) -> Option<Self::Elem> {
        // extended Euclid: track s with s·a ≡ r (mod v)
        let p = &self.poly;
        let (mut r0, mut r1) = (self.modulus.clone(), self.reduce(a));
        let (mut s0, mut s1): (Vec<u32>, Vec<u32>) = (vec![], p.one());
        while !r1.is_empty() {
            let (q, r) = p.div_rem(&r0, &r1).ok()?;
            let s = p.sub(&s0, &p.mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        if r0.len() != 1 {
            return None;
        }
        let c = p.base.inv(&r0[0])?;
        Some(self.reduce(&p.scale(&s0, &c)))
    }

    fn frobenius(&self, a: &Self::Elem, r: u32) -> Self::Elem {
        let q = self.poly.base.order() as u128;
        (0..r).fold(a.clone(), |x, _| self.poly.pow_mod(&x, q, &self.modulus).expect("monic modulus"))
    }

    fn field_order(&self) -> u64 {
        self.poly.field_order()
    }

    fn characteristic(&self) -> u64 {
        self.poly.characteristic()
    }

    fn format(&self, a: &Self::Elem) -> String {
        self.poly.format(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_frobenius() {
        let f = Fq::prime(3).unwrap();
        let r = ResidueRing::new(&f, &[1, 0, 1]); // θ² + 1, irreducible over F_3
        let x = vec![2, 1];
        let y = r.unit_inverse(&x).unwrap();
        assert_eq!(r.mul(&x, &y), r.one());
        // Frobenius of order deg v on a field
        assert_eq!(r.frobenius(&x, 2), x);
        assert_ne!(r.frobenius(&x, 1), x);
        let z = ResidueRing::new(&f, &[0, 1, 1]); // θ(θ+1)
        assert!(z.unit_inverse(&vec![0, 1]).is_none());
    }
}
