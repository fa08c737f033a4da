//! Finite fields `F_q`, `q = p^e`.
//!
//! Elements are encoded as integers `0 <= x < q` whose base-`p` digits are the
//! coefficients of a polynomial in the generator modulo the defining modulus.
//! Prime fields do plain modular arithmetic; extension fields multiply
//! through discrete log / exponential tables, which bounds `q` to `2^16`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ring::{Field, Ring};

pub const MAX_FIELD_ORDER: u64 = 1 << 16;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Clone, PartialEq, Eq)]
pub struct Fq {
    inner: Arc<FqInner>,
}

#[derive(PartialEq, Eq)]
struct FqInner {
    p: u64,
    e: u32,
    q: u64,
    /// Monic modulus over F_p, ascending coefficients, length e + 1.
    modulus: Vec<u64>,
    /// exp[i] = g^i for a fixed primitive element g (extension fields only).
    exp: Vec<u32>,
    /// log[x] for x != 0.
    log: Vec<u32>,
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inner.e == 1 {
            write!(f, "F_{}", self.inner.p)
        } else {
            write!(f, "F_{}^{} mod {:?}", self.inner.p, self.inner.e, self.inner.modulus)
        }
    }
}

impl Fq {
    pub fn prime(p: u64) -> Result<Self> {
        Self::new(p, 1)
    }

    /// `F_{p^e}`, with the modulus chosen as the lexicographically smallest
    /// monic irreducible of degree `e` over `F_p`.
    pub fn new(p: u64, e: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if e == 0 {
            return Err(Error::InvalidArgument("extension degree must be >= 1".into()));
        }
        let q = p
            .checked_pow(e)
            .filter(|&q| q <= MAX_FIELD_ORDER)
            .ok_or(Error::FieldTooLarge(p.saturating_pow(e)))?;
        if e == 1 {
            return Ok(Fq {
                inner: Arc::new(FqInner { p, e, q, modulus: vec![0, 1], exp: vec![], log: vec![] }),
            });
        }
        let modulus = smallest_irreducible(p, e as usize);
        let mut inner = FqInner { p, e, q, modulus, exp: vec![], log: vec![] };
        build_tables(&mut inner);
        Ok(Fq { inner: Arc::new(inner) })
    }

    /// Field of order `q`, which must be a prime power.
    pub fn with_order(q: u64) -> Result<Self> {
        for p in 2..=q {
            if q % p == 0 {
                let mut e = 0;
                let mut r = q;
                while r % p == 0 {
                    r /= p;
                    e += 1;
                }
                if r != 1 {
                    return Err(Error::InvalidArgument(format!("{q} is not a prime power")));
                }
                return Self::new(p, e);
            }
        }
        Err(Error::InvalidArgument(format!("{q} is not a prime power")))
    }

    pub fn p(&self) -> u64 {
        self.inner.p
    }

    pub fn degree(&self) -> u32 {
        self.inner.e
    }

    pub fn order(&self) -> u64 {
        self.inner.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.inner.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.inner.e == 1
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.inner.q as u32
    }

    pub fn digits(&self, a: u32) -> Vec<u64> {
        let p = self.inner.p;
        let mut x = a as u64;
        (0..self.inner.e)
            .map(|_| {
                let d = x % p;
                x /= p;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, digits: &[u64]) -> u32 {
        let p = self.inner.p;
        let mut x = 0u64;
        for &d in digits.iter().rev() {
            x = x * p + d % p;
        }
        x as u32
    }

    /// The class of the polynomial generator of the field over `F_p`.
    pub fn generator(&self) -> u32 {
        if self.inner.e == 1 {
            1
        } else {
            self.inner.p as u32
        }
    }

    /// A generator of the cyclic group `F_q^*`.
    pub fn primitive_element(&self) -> u32 {
        if self.inner.e > 1 {
            return self.inner.exp[1];
        }
        let p = self.inner.p;
        if p == 2 {
            return 1;
        }
        let n = p - 1;
        let factors: Vec<u64> = (2..=n).filter(|d| n % d == 0 && is_prime(*d)).collect();
        (2..p)
            .find(|&g| factors.iter().all(|f| self.pow(&(g as u32), n / f) != 1))
            .map(|g| g as u32)
            .expect("F_p^* is cyclic")
    }

    /// Element of `F_p` embedded in `F_q`.
    pub fn from_prime(&self, c: u64) -> u32 {
        (c % self.inner.p) as u32
    }

    /// Returns the `F_p` value when `a` lies in the prime field.
    pub fn to_prime(&self, a: u32) -> Option<u64> {
        if (a as u64) < self.inner.p {
            Some(a as u64)
        } else {
            None
        }
    }

    #[inline]
    pub fn add_u(&self, a: u32, b: u32) -> u32 {
        let p = self.inner.p;
        if self.inner.e == 1 {
            let s = a as u64 + b as u64;
            return (if s >= p { s - p } else { s }) as u32;
        }
        let (mut x, mut y) = (a as u64, b as u64);
        let (mut out, mut place) = (0u64, 1u64);
        while x > 0 || y > 0 {
            let d = (x % p + y % p) % p;
            out += d * place;
            place *= p;
            x /= p;
            y /= p;
        }
        out as u32
    }

    #[inline]
    pub fn neg_u(&self, a: u32) -> u32 {
        let p = self.inner.p;
        if self.inner.e == 1 {
            return if a == 0 { 0 } else { (p - a as u64) as u32 };
        }
        let mut x = a as u64;
        let (mut out, mut place) = (0u64, 1u64);
        while x > 0 {
            let d = (p - x % p) % p;
            out += d * place;
            place *= p;
            x /= p;
        }
        out as u32
    }

    #[inline]
    pub fn sub_u(&self, a: u32, b: u32) -> u32 {
        self.add_u(a, self.neg_u(b))
    }

    #[inline]
    pub fn mul_u(&self, a: u32, b: u32) -> u32 {
        if self.inner.e == 1 {
            return ((a as u64 * b as u64) % self.inner.p) as u32;
        }
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.inner.q - 1;
        let s = (self.inner.log[a as usize] as u64 + self.inner.log[b as usize] as u64) % n;
        self.inner.exp[s as usize]
    }

    pub fn inv_u(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        if self.inner.e == 1 {
            let p = self.inner.p as i64;
            let (mut r0, mut r1, mut s0, mut s1) = (a as i64, p, 1i64, 0i64);
            while r1 != 0 {
                let t = r0 / r1;
                (r0, r1) = (r1, r0 - t * r1);
                (s0, s1) = (s1, s0 - t * s1);
            }
            return Some(s0.rem_euclid(p) as u32);
        }
        let n = self.inner.q - 1;
        let l = self.inner.log[a as usize] as u64;
        Some(self.inner.exp[((n - l) % n) as usize])
    }

    pub fn from_i64(&self, n: i64) -> u32 {
        n.rem_euclid(self.inner.p as i64) as u32
    }
}

fn poly_mulmod_raw(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let e = m.len() - 1;
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for k in (e..prod.len()).rev() {
        let c = prod[k];
        if c != 0 {
            for j in 0..=e {
                let idx = k - e + j;
                prod[idx] = (prod[idx] + p - (c * m[j]) % p) % p;
            }
        }
    }
    prod.truncate(e);
    prod
}

/// Brute-force irreducibility over F_p by trial division (only used to pick
/// the small defining moduli of extension fields).
fn is_irreducible_raw(f: &[u64], p: u64) -> bool {
    let n = f.len() - 1;
    for d in 1..=n / 2 {
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut g = vec![0u64; d + 1];
            let mut x = idx;
            for c in g.iter_mut().take(d) {
                *c = x % p;
                x /= p;
            }
            g[d] = 1;
            if rem_raw(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn rem_raw(f: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    while r.len() > dg {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - dg;
        for j in 0..=dg {
            r[shift + j] = (r[shift + j] + p - (c * g[j]) % p) % p;
        }
        r.pop();
    }
    r
}

pub(crate) fn smallest_irreducible(p: u64, e: usize) -> Vec<u64> {
    let count = p.pow(e as u32);
    for idx in 0..count {
        let mut f = vec![0u64; e + 1];
        let mut x = idx;
        for c in f.iter_mut().take(e) {
            *c = x % p;
            x /= p;
        }
        f[e] = 1;
        if f[0] != 0 && is_irreducible_raw(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn build_tables(inner: &mut FqInner) {
    let (p, e, q) = (inner.p, inner.e as usize, inner.q);
    let encode = |v: &[u64]| -> u32 {
        let mut x = 0u64;
        for &d in v.iter().rev() {
            x = x * p + d;
        }
        x as u32
    };
    let decode = |mut x: u64| -> Vec<u64> {
        (0..e)
            .map(|_| {
                let d = x % p;
                x /= p;
                d
            })
            .collect()
    };
    for cand in 2..q {
        let g = decode(cand);
        let mut exp = Vec::with_capacity(q as usize - 1);
        let mut cur = decode(1);
        let mut ok = true;
        for i in 0..q - 1 {
            let code = encode(&cur);
            if i > 0 && code == 1 {
                ok = false;
                break;
            }
            exp.push(code);
            cur = poly_mulmod_raw(&cur, &g, &inner.modulus, p);
        }
        if ok {
            let mut log = vec![0u32; q as usize];
            for (i, &x) in exp.iter().enumerate() {
                log[x as usize] = i as u32;
            }
            inner.exp = exp;
            inner.log = log;
            return;
        }
    }
    unreachable!("F_q^* has a generator")
}

impl Ring for Fq {
    type Elem = u32;

    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        self.add_u(*a, *b)
    }
    fn neg(&self, a: &u32) -> u32 {
        self.neg_u(*a)
    }
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        self.sub_u(*a, *b)
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        self.mul_u(*a, *b)
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn from_int(&self, n: i64) -> u32 {
        self.from_i64(n)
    }
    fn unit_inverse(&self, a: &u32) -> Option<u32> {
        self.inv_u(*a)
    }
    fn frobenius(&self, a: &u32, _r: u32) -> u32 {
        *a
    }
    fn field_order(&self) -> u64 {
        self.inner.q
    }
    fn characteristic(&self) -> u64 {
        self.inner.p
    }
    fn format(&self, a: &u32) -> String {
        if self.inner.e == 1 {
            a.to_string()
        } else {
            let terms: Vec<String> = self
                .digits(*a)
                .iter()
                .enumerate()
                .filter(|(_, &d)| d != 0)
                .map(|(i, d)| match i {
                    0 => d.to_string(),
                    1 => format!("{d}g"),
                    _ => format!("{d}g^{i}"),
                })
                .collect();
            if terms.is_empty() {
                "0".into()
            } else {
                terms.join("+")
            }
        }
    }
}

impl Field for Fq {}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_composite_characteristic() {
        assert_eq!(Fq::prime(9), Err(Error::NotPrime(9)));
    }

    #[test]
    fn f4_modulus_is_x2_x_1() {
        let f = Fq::new(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        let g = f.generator();
        // g^2 = g + 1
        assert_eq!(f.mul(&g, &g), f.add(&g, &1));
    }

    #[test]
    fn field_axioms_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (p, e) in [(2, 1), (3, 1), (7, 1), (2, 3), (3, 2), (5, 2)] {
            let f = Fq::new(p, e).unwrap();
            let q = f.order() as u32;
            for _ in 0..200 {
                let (a, b, c) = (rng.gen_range(0..q), rng.gen_range(0..q), rng.gen_range(0..q));
                assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
                assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
                assert_eq!(f.add(&a, &f.neg(&a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), 1);
                }
            }
        }
    }

    #[test]
    fn primitive_element_generates() {
        for (p, e) in [(3, 1), (7, 1), (2, 4), (3, 2)] {
            let f = Fq::new(p, e).unwrap();
            let g = f.primitive_element();
            let n = f.order() - 1;
            let mut seen = std::collections::HashSet::new();
            let mut x = 1u32;
            for _ in 0..n {
                seen.insert(x);
                x = f.mul(&x, &g);
            }
            assert_eq!(seen.len() as u64, n);
        }
    }
}
