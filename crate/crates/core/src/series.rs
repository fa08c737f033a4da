//! Truncated Laurent series in `θ⁻¹` with explicit precision.
//!
//! A series `Σ_{e ≤ lead} c_e θ^e` is stored as `coeffs[k] = c_{lead-k}`.
//! Precision `N` means the value is known modulo `θ^{-(N+1)}`, so exactly the
//! coefficients of `θ^e` with `e ≥ -N` are meaningful. [`EXACT`] marks a
//! series with no truncation error (all omitted coefficients vanish).
//!
//! Every operation reports the precision it can guarantee:
//!
//! * `a + b` is known to `min(N_a, N_b)`;
//! * `a · b` to `min(N_a + v(b), N_b + v(a))`;
//! * `1/a` keeps the relative precision, which moves the absolute precision
//!   to `N_a + 2·lead(a)`.

use crate::error::{Error, Result};
use crate::ring::Ring;

pub const EXACT: i64 = i64::MAX;

#[derive(Clone, Debug, PartialEq)]
pub struct ThetaSeries<E> {
    pub lead: i64,
    pub coeffs: Vec<E>,
    pub prec: i64,
}

impl<E> ThetaSeries<E> {
    pub fn is_exact(&self) -> bool {
        self.prec == EXACT
    }

    /// Lowest exponent carried by `coeffs`.
    fn low(&self) -> i64 {
        self.lead - self.coeffs.len() as i64 + 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesRing<R: Ring> {
    pub base: R,
    /// Absolute precision used when an exact operand has an infinite expansion.
    pub default_prec: i64,
}

fn padd(p: i64, v: i64) -> i64 {
    if p == EXACT || v == EXACT {
        EXACT
    } else {
        p.saturating_add(v).min(EXACT - 1)
    }
}

impl<R: Ring> SeriesRing<R> {
    pub fn new(base: R, default_prec: i64) -> Self {
        SeriesRing { base, default_prec }
    }

    pub fn canonical(&self, mut s: ThetaSeries<R::Elem>) -> ThetaSeries<R::Elem> {
        let lead_zeros = s.coeffs.iter().take_while(|c| self.base.is_zero(c)).count();
        s.coeffs.drain(..lead_zeros);
        s.lead -= lead_zeros as i64;
        if s.prec == EXACT {
            while s.coeffs.last().is_some_and(|c| self.base.is_zero(c)) {
                s.coeffs.pop();
            }
        } else if !s.coeffs.is_empty() {
            if s.lead < -s.prec {
                s.coeffs.clear();
            } else {
                let n = (s.lead + s.prec + 1) as usize;
                s.coeffs.resize(n, self.base.zero());
            }
        }
        if s.coeffs.is_empty() {
            s.lead = 0;
        }
        s
    }

    pub fn zero_with_prec(&self, prec: i64) -> ThetaSeries<R::Elem> {
        ThetaSeries { lead: 0, coeffs: vec![], prec }
    }

    pub fn from_coeffs(&self, lead: i64, coeffs: Vec<R::Elem>, prec: i64) -> ThetaSeries<R::Elem> {
        self.canonical(ThetaSeries { lead, coeffs, prec })
    }

    pub fn scalar(&self, c: R::Elem) -> ThetaSeries<R::Elem> {
        self.from_coeffs(0, vec![c], EXACT)
    }

    /// `c · θ^e`.
    pub fn monomial(&self, c: R::Elem, e: i64) -> ThetaSeries<R::Elem> {
        self.from_coeffs(e, vec![c], EXACT)
    }

    /// Exact series of a polynomial in `θ` given little-endian.
    pub fn from_poly(&self, p: &[R::Elem]) -> ThetaSeries<R::Elem> {
        if p.is_empty() {
            return self.zero();
        }
        let coeffs: Vec<_> = p.iter().rev().cloned().collect();
        self.from_coeffs(p.len() as i64 - 1, coeffs, EXACT)
    }

    pub fn coeff(&self, s: &ThetaSeries<R::Elem>, e: i64) -> R::Elem {
        if e > s.lead || e < s.low() {
            self.base.zero()
        } else {
            s.coeffs[(s.lead - e) as usize].clone()
        }
    }

    /// Lower bound for `v_∞`: `-lead` for nonzero series, `N+1` for a zero
    /// series known to precision `N`.
    pub fn valuation_bound(&self, s: &ThetaSeries<R::Elem>) -> i64 {
        if s.coeffs.is_empty() {
            padd(s.prec, 1)
        } else {
            -s.lead
        }
    }

    pub fn valuation(&self, s: &ThetaSeries<R::Elem>) -> Option<i64> {
        (!s.coeffs.is_empty()).then_some(-s.lead)
    }

    pub fn truncate(&self, s: &ThetaSeries<R::Elem>, prec: i64) -> ThetaSeries<R::Elem> {
        let mut t = s.clone();
        t.prec = t.prec.min(prec);
        self.canonical(t)
    }

    /// Multiplication by `θ^k`.
    pub fn shift(&self, s: &ThetaSeries<R::Elem>, k: i64) -> ThetaSeries<R::Elem> {
        if s.coeffs.is_empty() {
            return self.zero_with_prec(if s.prec == EXACT { EXACT } else { s.prec - k });
        }
        ThetaSeries {
            lead: s.lead + k,
            coeffs: s.coeffs.clone(),
            prec: if s.prec == EXACT { EXACT } else { s.prec - k },
        }
    }

    pub fn map<S: Ring>(&self, s: &ThetaSeries<R::Elem>, target: &SeriesRing<S>, f: impl Fn(&R::Elem) -> S::Elem) -> ThetaSeries<S::Elem> {
        target.canonical(ThetaSeries { lead: s.lead, coeffs: s.coeffs.iter().map(f).collect(), prec: s.prec })
    }

    pub fn scale(&self, s: &ThetaSeries<R::Elem>, c: &R::Elem) -> ThetaSeries<R::Elem> {
        self.canonical(ThetaSeries {
            lead: s.lead,
            coeffs: s.coeffs.iter().map(|x| self.base.mul(x, c)).collect(),
            prec: s.prec,
        })
    }

    /// Coefficients of `θ^e` for `e ≥ 0`, little-endian.
    pub fn polynomial_part(&self, s: &ThetaSeries<R::Elem>) -> Vec<R::Elem> {
        if s.coeffs.is_empty() || s.lead < 0 {
            return vec![];
        }
        let mut v: Vec<_> = (0..=s.lead).map(|e| self.coeff(s, e)).collect();
        while v.last().is_some_and(|c| self.base.is_zero(c)) {
            v.pop();
        }
        v
    }

    /// Agreement of all coefficients of `θ^e`, `e ≥ -n`.
    pub fn agree_to(&self, a: &ThetaSeries<R::Elem>, b: &ThetaSeries<R::Elem>, n: i64) -> bool {
        let hi = a.lead.max(b.lead);
        (-n..=hi).all(|e| self.coeff(a, e) == self.coeff(b, e))
    }

    pub fn invert(&self, f: &ThetaSeries<R::Elem>) -> Result<ThetaSeries<R::Elem>> {
        let c = f
            .coeffs
            .first()
            .ok_or_else(|| Error::NonInvertibleLead { coefficient: "0 (zero series)".into() })?;
        let ci = self
            .base
            .unit_inverse(c)
            .ok_or_else(|| Error::NonInvertibleLead { coefficient: self.base.format(c) })?;
        let d = f.lead;
        if f.prec == EXACT && f.coeffs.len() == 1 {
            return Ok(self.monomial(ci, -d));
        }
        let prec = if f.prec == EXACT { self.default_prec } else { padd(f.prec, 2 * d) };
        let n = (prec - d + 1).max(0) as usize;
        let mut g: Vec<R::Elem> = Vec::with_capacity(n);
        for k in 0..n {
            if k == 0 {
                g.push(ci.clone());
                continue;
            }
            let mut acc = self.base.zero();
            for j in 1..=k.min(f.coeffs.len() - 1) {
                acc = self.base.add(&acc, &self.base.mul(&f.coeffs[j], &g[k - j]));
            }
            g.push(self.base.neg(&self.base.mul(&ci, &acc)));
        }
        Ok(self.from_coeffs(-d, g, prec))
    }
}

/// Inverse of a series with invertible leading coefficient.
pub fn series_invert<R: Ring>(ring: &SeriesRing<R>, f: &ThetaSeries<R::Elem>) -> Result<ThetaSeries<R::Elem>> {
    ring.invert(f)
}

impl<R: Ring> Ring for SeriesRing<R> {
    type Elem = ThetaSeries<R::Elem>;

    fn zero(&self) -> Self::Elem {
        self.zero_with_prec(EXACT)
    }

    fn one(&self) -> Self::Elem {
        self.scalar(self.base.one())
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let prec = a.prec.min(b.prec);
        if a.coeffs.is_empty() && b.coeffs.is_empty() {
            return self.zero_with_prec(prec);
        }
        let hi = match (a.coeffs.is_empty(), b.coeffs.is_empty()) {
            (true, _) => b.lead,
            (_, true) => a.lead,
            _ => a.lead.max(b.lead),
        };
        let mut lo = i64::MAX;
        if !a.coeffs.is_empty() {
            lo = lo.min(a.low());
        }
        if !b.coeffs.is_empty() {
            lo = lo.min(b.low());
        }
        if prec != EXACT {
            lo = lo.max(-prec);
        }
        if lo > hi {
            return self.zero_with_prec(prec);
        }
        let coeffs = (lo..=hi).rev().map(|e| self.base.add(&self.coeff(a, e), &self.coeff(b, e))).collect();
        self.canonical(ThetaSeries { lead: hi, coeffs, prec })
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        ThetaSeries { lead: a.lead, coeffs: a.coeffs.iter().map(|c| self.base.neg(c)).collect(), prec: a.prec }
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let prec = padd(a.prec, self.valuation_bound(b)).min(padd(b.prec, self.valuation_bound(a)));
        if a.coeffs.is_empty() || b.coeffs.is_empty() {
            return self.zero_with_prec(prec);
        }
        let lead = a.lead + b.lead;
        let full = a.coeffs.len() + b.coeffs.len() - 1;
        let n = if prec == EXACT { full } else { ((lead + prec + 1).max(0) as usize).min(full) };
        let mut coeffs = vec![self.base.zero(); n];
        for (i, x) in a.coeffs.iter().enumerate().take(n) {
            if self.base.is_zero(x) {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate().take(n - i) {
                coeffs[i + j] = self.base.add(&coeffs[i + j], &self.base.mul(x, y));
            }
        }
        self.canonical(ThetaSeries { lead, coeffs, prec })
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.coeffs.is_empty()
    }

    fn from_int(&self, n: i64) -> Self::Elem {
        self.scalar(self.base.from_int(n))
    }

    fn unit_inverse(&self, a: &Self::Elem) -> Option<Self::Elem> {
        self.invert(a).ok()
    }

    fn frobenius(&self, a: &Self::Elem, r: u32) -> Self::Elem {
        if r == 0 {
            return a.clone();
        }
        let qr = (self.base.field_order() as i64).pow(r);
        let prec = if a.prec == EXACT { EXACT } else { (a.prec + 1).saturating_mul(qr) - 1 };
        if a.coeffs.is_empty() {
            return self.zero_with_prec(prec);
        }
        let lead = a.lead * qr;
        let span = (a.coeffs.len() - 1) * qr as usize + 1;
        let mut coeffs = vec![self.base.zero(); span];
        for (k, c) in a.coeffs.iter().enumerate() {
            coeffs[k * qr as usize] = self.base.frobenius(c, r);
        }
        self.canonical(ThetaSeries { lead, coeffs, prec })
    }

    fn field_order(&self) -> u64 {
        self.base.field_order()
    }

    fn characteristic(&self) -> u64 {
        self.base.characteristic()
    }

    fn format(&self, a: &Self::Elem) -> String {
        let mut terms = vec![];
        for (k, c) in a.coeffs.iter().enumerate() {
            if self.base.is_zero(c) {
                continue;
            }
            let e = a.lead - k as i64;
            let cs = self.base.format(c);
            let cs = if cs.contains(' ') { format!("({cs})") } else { cs };
            terms.push(match e {
                0 => cs,
                1 => format!("{cs}*theta"),
                _ => format!("{cs}*theta^{e}"),
            });
        }
        if a.prec != EXACT {
            terms.push(format!("O(theta^{})", -(a.prec + 1)));
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

    #[test]
    fn geometric_series() {
        let f2 = Fq::prime(2).unwrap();
        let s = SeriesRing::new(f2, 6);
        // θ - 1 = θ + 1 in characteristic 2
        let f = s.from_poly(&[1, 1]);
        let g = s.invert(&f).unwrap();
        assert_eq!(g.lead, -1);
        assert_eq!(g.prec, 6);
        assert_eq!(g.coeffs, vec![1; 6]);
        let prod = s.mul(&f, &g);
        assert_eq!(prod.prec, 5);
        assert!(s.agree_to(&prod, &s.one(), 5));
        assert_eq!(s.invert(&s.one()).unwrap(), s.one());
    }

    #[test]
    fn precision_propagation() {
        let f3 = Fq::prime(3).unwrap();
        let s = SeriesRing::new(f3, 10);
        let a = s.from_coeffs(2, vec![1, 2, 0, 1, 1], 2);
        let b = s.from_coeffs(-1, vec![2, 1], 5);
        assert_eq!(s.add(&a, &b).prec, 2);
        // min(2 + 1, 5 - 2)
        assert_eq!(s.mul(&a, &b).prec, 3);
        let ai = s.invert(&a).unwrap();
        assert_eq!(ai.prec, 6);
        assert_eq!(s.frobenius(&b, 1).prec, 17);
    }

    #[test]
    fn zero_series_has_valuation_bound() {
        let f3 = Fq::prime(3).unwrap();
        let s = SeriesRing::new(f3, 10);
        let z = s.zero_with_prec(4);
        let b = s.from_coeffs(3, vec![1], EXACT);
        let p = s.mul(&z, &b);
        assert!(p.coeffs.is_empty());
        assert_eq!(p.prec, 1);
    }
}
