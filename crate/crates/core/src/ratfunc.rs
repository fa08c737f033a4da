//! The rational function field `F_q(x)`, elements kept as reduced fractions
//! with monic denominator.

use crate::fq::Fq;
use crate::poly::{PolyRing, Var};
use crate::ring::{Field, Ring};
use crate::series::{SeriesRing, ThetaSeries};

#[derive(Clone, Debug, PartialEq)]
pub struct RatFuncField {
    pub poly: PolyRing<Fq>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    pub num: Vec<u32>,
    pub den: Vec<u32>,
}

impl RatFuncField {
    pub fn new(f: &Fq, var: Var) -> Self {
        RatFuncField { poly: PolyRing::new(f.clone(), var) }
    }

    pub fn fq(&self) -> &Fq {
        &self.poly.base
    }

    /// Builds `num/den` in lowest terms. Panics on a zero denominator.
    pub fn frac(&self, num: Vec<u32>, den: Vec<u32>) -> RatFunc {
        assert!(!den.is_empty(), "zero denominator");
        let p = &self.poly;
        if num.is_empty() {
            return RatFunc { num: vec![], den: vec![1] };
        }
        let g = p.gcd(&num, &den);
        let num = p.exact_div(&num, &g).unwrap();
        let den = p.exact_div(&den, &g).unwrap();
        let l = self.fq().inv(den.last().unwrap()).unwrap();
        RatFunc { num: p.scale(&num, &l), den: p.scale(&den, &l) }
    }

    pub fn from_poly(&self, num: Vec<u32>) -> RatFunc {
        RatFunc { num: self.poly.normalize(num), den: vec![1] }
    }

    /// `v_∞`: `deg den − deg num`; `None` for zero.
    pub fn valuation(&self, a: &RatFunc) -> Option<i64> {
        if a.num.is_empty() {
            None
        } else {
            Some(a.den.len() as i64 - a.num.len() as i64)
        }
    }

    pub fn is_polynomial(&self, a: &RatFunc) -> bool {
        a.den.len() == 1
    }

    /// Expansion in `k_∞` known to absolute precision `prec`.
    pub fn to_series(&self, a: &RatFunc, prec: i64) -> ThetaSeries<u32> {
        let deg_num = a.num.len() as i64 - 1;
        let s = SeriesRing::new(self.fq().clone(), prec + deg_num.max(0) + 1);
        let inv = s.invert(&s.from_poly(&a.den)).expect("monic denominator");
        s.truncate(&s.mul(&s.from_poly(&a.num), &inv), prec)
    }
}

impl Ring for RatFuncField {
    type Elem = RatFunc;

    fn zero(&self) -> RatFunc {
        RatFunc { num: vec![], den: vec![1] }
    }
    fn one(&self) -> RatFunc {
        RatFunc { num: vec![1], den: vec![1] }
    }
    fn add(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        let p = &self.poly;
        if a.den == b.den {
            return self.frac(p.add(&a.num, &b.num), a.den.clone());
        }
        let num = p.add(&p.mul(&a.num, &b.den), &p.mul(&b.num, &a.den));
        self.frac(num, p.mul(&a.den, &b.den))
    }
    fn neg(&self, a: &RatFunc) -> RatFunc {
        RatFunc { num: self.poly.neg(&a.num), den: a.den.clone() }
    }
    fn mul(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        if a.num.is_empty() || b.num.is_empty() {
            return self.zero();
        }
        let p = &self.poly;
        self.frac(p.mul(&a.num, &b.num), p.mul(&a.den, &b.den))
    }
    fn is_zero(&self, a: &RatFunc) -> bool {
        a.num.is_empty()
    }
    fn from_int(&self, n: i64) -> RatFunc {
        self.from_poly(vec![self.fq().from_i64(n)])
    }
    fn unit_inverse(&self, a: &RatFunc) -> Option<RatFunc> {
        if a.num.is_empty() {
            None
        } else {
            Some(self.frac(a.den.clone(), a.num.clone()))
        }
    }
    fn frobenius(&self, a: &RatFunc, r: u32) -> RatFunc {
        RatFunc { num: self.poly.frobenius(&a.num, r), den: self.poly.frobenius(&a.den, r) }
    }
    fn field_order(&self) -> u64 {
        self.fq().order()
    }
    fn characteristic(&self) -> u64 {
        self.fq().p()
    }
    fn format(&self, a: &RatFunc) -> String {
        if a.den.len() == 1 {
            self.poly.format(&a.num)
        } else {
            format!("({})/({})", self.poly.format(&a.num), self.poly.format(&a.den))
        }
    }
}

impl Field for RatFuncField {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_form() {
        let f3 = Fq::prime(3).unwrap();
        let k = RatFuncField::new(&f3, Var::Theta);
        // (2θ+2)/(2θ^2+2θ) = 1/θ
        let x = k.frac(vec![2, 2], vec![0, 2, 2]);
        assert_eq!(x, RatFunc { num: vec![1], den: vec![0, 1] });
        let y = k.add(&x, &k.neg(&x));
        assert!(k.is_zero(&y));
        assert_eq!(k.mul(&x, &k.inv(&x).unwrap()), k.one());
    }
}
