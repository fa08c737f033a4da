//! Anderson t-modules `φ(θ) = Σ A_j τ^j` over `A = F_q[θ]`, their
//! `z`-deformation `Σ z^j A_j τ^j`, actions on `τ`-rings and the exponential
//! on `k_∞^n`.

use crate::error::{Error, Result};
use crate::fq::Fq;
use crate::matrix::{self, Matrix};
use crate::poly::{poly_a, PolyA, Var};
use crate::ratfunc::RatFuncField;
use crate::residue::ResidueRing;
use crate::ring::Ring;
use crate::series::{SeriesRing, ThetaSeries};
use crate::twisted::{self, ExpSeries, TwistedPoly};

#[derive(Clone, Debug, PartialEq)]
pub struct AndersonModule {
    pub field: Fq,
    pub dim: usize,
    /// `A_0, …, A_r` with entries in `A`, little-endian polynomials.
    pub mats: Vec<Matrix<Vec<u32>>>,
    pub deformed: bool,
}

pub fn carlitz(f: &Fq) -> AndersonModule {
    AndersonModule {
        field: f.clone(),
        dim: 1,
        mats: vec![Matrix::from_rows(vec![vec![vec![0, 1]]]), Matrix::from_rows(vec![vec![vec![1]]])],
        deformed: false,
    }
}

impl AndersonModule {
    pub fn new(field: &Fq, mats: Vec<Matrix<Vec<u32>>>) -> Result<Self> {
        let dim = mats.first().map_or(0, |m| m.rows);
        let a = poly_a(field);
        let mut mats: Vec<_> = mats.into_iter().map(|m| m.map(|p| a.normalize(p.clone()))).collect();
        while mats.len() > 1 && mats.last().is_some_and(|m| matrix::is_zero(&a, m)) {
            mats.pop();
        }
        let e = AndersonModule { field: field.clone(), dim, mats, deformed: false };
        e.check()?;
        Ok(e)
    }

    pub fn ring(&self) -> PolyA {
        poly_a(&self.field)
    }

    pub fn rank(&self) -> usize {
        self.mats.len() - 1
    }

    pub fn is_carlitz(&self) -> bool {
        let c = carlitz(&self.field);
        self.mats == c.mats
    }

    /// `(A_0 − θI)^n = 0`, and its consequence `A_0^{q^n} = θ^{q^n} I`.
    pub fn check(&self) -> Result<()> {
        let n = self.dim;
        if n == 0 || self.mats.is_empty() {
            return Err(Error::NotTModule);
        }
        if self.mats.iter().any(|m| m.rows != n || m.cols != n) {
            return Err(Error::DimensionMismatch("all coefficient matrices must be n × n".into()));
        }
        let a = self.ring();
        let theta = a.var_elem();
        let shifted = matrix::sub(&a, &self.mats[0], &matrix::scalar_matrix(&a, n, &theta));
        if !matrix::is_zero(&a, &matrix::pow(&a, &shifted, n as u64)) {
            return Err(Error::NotTModule);
        }
        let qn = self.field.order().pow(n as u32);
        let lhs = matrix::pow(&a, &self.mats[0], qn);
        if lhs != matrix::scalar_matrix(&a, n, &a.pow(&theta, qn)) {
            return Err(Error::NotTModule);
        }
        Ok(())
    }

    pub fn z_deform(&self) -> Self {
        AndersonModule { deformed: true, ..self.clone() }
    }

    /// `z ↦ c`: `A_j ↦ c^j A_j`. At `c = 0` only `δ(θ) = A_0` survives.
    pub fn specialize(&self, c: u32) -> Self {
        let a = self.ring();
        let f = &self.field;
        let mut mats: Vec<_> = self
            .mats
            .iter()
            .enumerate()
            .map(|(j, m)| matrix::scale(&a, m, &a.constant(f.pow(&c, j as u64))))
            .collect();
        while mats.len() > 1 && mats.last().is_some_and(|m| matrix::is_zero(&a, m)) {
            mats.pop();
        }
        AndersonModule { mats, deformed: false, ..self.clone() }
    }

    /// `φ(θ)` with coefficients pushed into `R`. A deformed module needs the
    /// image of `z`.
    pub fn phi_theta<R: Ring>(
        &self,
        ring: &R,
        embed: &impl Fn(&[u32]) -> R::Elem,
        z: Option<&R::Elem>,
    ) -> Result<TwistedPoly<R::Elem>> {
        if self.deformed && z.is_none() {
            return Err(Error::InvalidArgument("a deformed module acts only on rings containing z".into()));
        }
        let coeffs = self
            .mats
            .iter()
            .enumerate()
            .map(|(j, m)| {
                let m = m.map(|p| embed(p));
                match (self.deformed, z) {
                    (true, Some(z)) => matrix::scale(ring, &m, &ring.pow(z, j as u64)),
                    _ => m,
                }
            })
            .collect();
        Ok(twisted::normalize(ring, TwistedPoly { dim: self.dim, coeffs }))
    }

    /// `φ(a)` by Horner's rule in `φ(θ)`.
    pub fn phi<R: Ring>(
        &self,
        a: &[u32],
        ring: &R,
        embed: &impl Fn(&[u32]) -> R::Elem,
        z: Option<&R::Elem>,
    ) -> Result<TwistedPoly<R::Elem>> {
        let phi_t = self.phi_theta(ring, embed, z)?;
        let n = self.dim;
        let mut acc = TwistedPoly { dim: n, coeffs: vec![] };
        for c in a.iter().rev() {
            acc = twisted::twisted_mul(ring, &acc, &phi_t)?;
            let cm = matrix::scalar_matrix(ring, n, &embed(&[*c]));
            acc = twisted::twisted_add(ring, &acc, &twisted::constant(ring, cm))?;
        }
        Ok(acc)
    }

    pub fn act<R: Ring>(
        &self,
        a: &[u32],
        x: &[R::Elem],
        ring: &R,
        embed: &impl Fn(&[u32]) -> R::Elem,
        z: Option<&R::Elem>,
    ) -> Result<Vec<R::Elem>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch(format!("vector of length {} for a module of dimension {}", x.len(), self.dim)));
        }
        Ok(twisted::apply(ring, &self.phi(a, ring, embed, z)?, x))
    }

    /// Action on `(A/v)^n`.
    pub fn act_mod(&self, a: &[u32], x: &[Vec<u32>], v: &[u32]) -> Result<Vec<Vec<u32>>> {
        let r = ResidueRing::new(&self.field, v);
        let x: Vec<_> = x.iter().map(|c| r.reduce(c)).collect();
        let z = r.one();
        self.act(a, &x, &r, &|p: &[u32]| r.reduce(p), self.deformed.then_some(&z))
    }

    /// The `F_q`-matrices `M_j` of `x ↦ A_j x^{(j)}` on `(A/v)^n`. Then
    /// `θ` acts on `E(A/v)` as `Σ M_j` (as `Σ z^j M_j` after deformation) and
    /// on `Lie_E(A/v)` as `M_0`.
    pub fn reduction_matrices(&self, v: &[u32]) -> Vec<Matrix<u32>> {
        reduce_twisted(&self.field, &self.mats, v)
    }

    /// `exp_E(x)` for `x ∈ k_∞^n`, correct through `θ^{-n}`.
    pub fn exp_eval(&self, x: &[ThetaSeries<u32>], n: i64) -> Result<Vec<ThetaSeries<u32>>> {
        if self.deformed {
            return Err(Error::InvalidArgument("specialize the deformation before evaluating exp".into()));
        }
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch(format!("vector of length {} for a module of dimension {}", x.len(), self.dim)));
        }
        self.check()?;
        let f = &self.field;
        let s = SeriesRing::new(f.clone(), n);
        let k = RatFuncField::new(f, Var::Theta);
        let q = f.order() as i64;
        let x_prec = x.iter().map(|c| c.prec).min().unwrap();
        let Some(v) = x.iter().filter_map(|c| s.valuation(c)).min() else {
            return Ok(vec![s.zero_with_prec(x_prec.min(n)); self.dim]);
        };
        let carlitz = self.is_carlitz();
        let mut exp = ExpSeries { dim: self.dim, coeffs: vec![matrix::identity(&k, self.dim)] };
        let mut out = vec![s.zero(); self.dim];
        let mut prev: Option<i64> = None;
        for i in 0.. {
            if i >= 64 {
                return Err(Error::Convergence { achieved: i, target: n });
            }
            twisted::exp_extend(self, &mut exp, i as usize)?;
            let e_i = &exp.coeffs[i as usize];
            let qi = q.checked_pow(i as u32).ok_or(Error::Convergence { achieved: i, target: n })?;
            let v_e = e_i.data.iter().filter_map(|c| k.valuation(c)).min();
            if carlitz {
                debug_assert_eq!(v_e, Some(i * qi));
            }
            let Some(v_e) = v_e else { continue };
            let b = v_e.saturating_add(qi.saturating_mul(v));
            if b <= n {
                let want = n.saturating_sub(qi.saturating_mul(v)).max(0);
                let em = e_i.map(|c| k.to_series(c, want));
                let xi: Vec<_> = x.iter().map(|c| s.frobenius(c, i as u32)).collect();
                let term = matrix::mul_vec(&s, &em, &xi);
                out = out.iter().zip(&term).map(|(a, b)| s.add(a, b)).collect();
            }
            // certify that every later term has valuation > n
            let done = if carlitz {
                let nq = qi * q;
                i + 1 + v >= 1 && nq.saturating_mul(i + 1 + v) > n
            } else {
                if i >= 1 {
                    if let Some(p) = prev {
                        if v_e < q.saturating_mul(p) {
                            return Err(Error::Convergence { achieved: b, target: n });
                        }
                    }
                }
                i >= 1 && b > 0 && q.saturating_mul(b) > n
            };
            if i >= 1 {
                prev = Some(v_e);
            }
            if done {
                break;
            }
        }
        let out: Vec<_> = out.iter().map(|c| s.truncate(c, n)).collect();
        let achieved = out.iter().map(|c| c.prec).min().unwrap();
        if achieved < n {
            return Err(Error::Precision { precision: achieved, reason: "input series too short for the requested precision".into() });
        }
        Ok(out)
    }
}

/// For `θ`-actions `x ↦ Σ_j C_j x^{(j)}` on `A^s` with `C_j ∈ M_s(A)`: the
/// `F_q`-matrix of each summand on `(A/v)^s`, basis index `k·deg v + i` for
/// `θ^i e_k`.
pub fn reduce_twisted(field: &Fq, mats: &[Matrix<Vec<u32>>], v: &[u32]) -> Vec<Matrix<u32>> {
    let r = ResidueRing::new(field, v);
    let s = mats.first().map_or(0, |m| m.rows);
    mats.iter()
        .enumerate()
        .map(|(j, a)| {
            let a = a.map(|p| r.reduce(p));
            r.linear_map_matrix(s, |x| {
                let xj: Vec<_> = x.iter().map(|c| r.frobenius(c, j as u32)).collect();
                matrix::mul_vec(&r, &a, &xj)
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariant_rejects_bad_a0() {
        let f = Fq::prime(3).unwrap();
        let bad = Matrix::from_rows(vec![vec![vec![1, 1]]]);
        assert!(matches!(AndersonModule::new(&f, vec![bad]), Err(Error::NotTModule)));
        let jordan = Matrix::from_rows(vec![vec![vec![0, 1], vec![1]], vec![vec![], vec![0, 1]]]);
        assert!(AndersonModule::new(&f, vec![jordan, matrix::identity(&poly_a(&f), 2)]).is_ok());
    }

    #[test]
    fn carlitz_action_mod_theta() {
        let f = Fq::prime(2).unwrap();
        let c = carlitz(&f);
        assert_eq!(c.act_mod(&[0, 1], &[vec![1]], &[0, 1]).unwrap(), vec![vec![1]]);
        assert_eq!(c.act_mod(&[1], &[vec![1]], &[0, 1]).unwrap(), vec![vec![1]]);
    }

    #[test]
    fn carlitz_prime_acts_as_frobenius_power() {
        // C_P(x) ≡ x^{p^{deg P}} mod P, P = θ + 1 over F_3
        let f = Fq::prime(3).unwrap();
        let c = carlitz(&f);
        let p = vec![1, 1];
        let r = ResidueRing::new(&f, &p);
        for x in [vec![2], vec![1], vec![]] {
            assert_eq!(c.act_mod(&p, &[x.clone()], &p).unwrap()[0], r.frobenius(&x, 1));
        }
        // and on a deeper quotient, P^2
        let p2 = r.poly.mul(&p, &p);
        let r2 = ResidueRing::new(&f, &p2);
        let x = vec![1, 2];
        let cp = c.act_mod(&p, &[x.clone()], &p2).unwrap()[0].clone();
        assert_eq!(r.reduce(&cp), r.reduce(&r2.frobenius(&x, 1)));
    }

    #[test]
    fn deformation_specializes() {
        let f = Fq::prime(3).unwrap();
        let c = carlitz(&f);
        let d = c.z_deform();
        assert_eq!(d.specialize(1).mats, c.mats);
        assert_eq!(d.specialize(0).mats, vec![c.mats[0].clone()]);
        let a = poly_a(&f);
        assert!(d.phi_theta(&a, &|p: &[u32]| p.to_vec(), None).is_err());
    }

    #[test]
    fn exp_of_zero_and_leading_term() {
        let f = Fq::prime(2).unwrap();
        let c = carlitz(&f);
        let s = SeriesRing::new(f.clone(), 20);
        let zero = c.exp_eval(&[s.zero()], 20).unwrap();
        assert!(zero[0].coeffs.is_empty());
        // exp(θ^{-1}) = θ^{-1} + e_1 θ^{-2} + …, e_1 = θ^{-2} + …
        let x = s.monomial(1, -1);
        let y = c.exp_eval(&[x.clone()], 10).unwrap();
        assert_eq!(y[0].lead, -1);
        assert_eq!(s.coeff(&y[0], -4), 1);
    }
}
