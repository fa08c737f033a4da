//! Twisted polynomials `Σ B_i τ^i` with matrix coefficients, where
//! `B τ^i · C τ^j = B C^{(i)} τ^{i+j}`, and the exponential / logarithm
//! coefficient recursions of a t-module.

use crate::anderson::AndersonModule;
use crate::error::{Error, Result};
use crate::matrix::{self, Matrix};
use crate::ratfunc::{RatFunc, RatFuncField};
use crate::ring::Ring;

#[derive(Clone, Debug, PartialEq)]
pub struct TwistedPoly<E> {
    pub dim: usize,
    pub coeffs: Vec<Matrix<E>>,
}

impl<E: Clone> TwistedPoly<E> {
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }
}

pub fn normalize<R: Ring>(r: &R, mut f: TwistedPoly<R::Elem>) -> TwistedPoly<R::Elem> {
    while f.coeffs.last().is_some_and(|m| matrix::is_zero(r, m)) {
        f.coeffs.pop();
    }
    f
}

pub fn constant<R: Ring>(r: &R, m: Matrix<R::Elem>) -> TwistedPoly<R::Elem> {
    normalize(r, TwistedPoly { dim: m.rows, coeffs: vec![m] })
}

pub fn one<R: Ring>(r: &R, n: usize) -> TwistedPoly<R::Elem> {
    TwistedPoly { dim: n, coeffs: vec![matrix::identity(r, n)] }
}

/// `τ^k` as an `n × n` twisted polynomial.
pub fn tau_power<R: Ring>(r: &R, n: usize, k: usize) -> TwistedPoly<R::Elem> {
    let mut coeffs = vec![matrix::zeros(r, n, n); k];
    coeffs.push(matrix::identity(r, n));
    TwistedPoly { dim: n, coeffs }
}

pub fn twisted_add<R: Ring>(r: &R, f: &TwistedPoly<R::Elem>, g: &TwistedPoly<R::Elem>) -> Result<TwistedPoly<R::Elem>> {
    if f.dim != g.dim {
        return Err(Error::DimensionMismatch(format!("{} vs {}", f.dim, g.dim)));
    }
    let n = f.coeffs.len().max(g.coeffs.len());
    let z = matrix::zeros(r, f.dim, f.dim);
    let coeffs = (0..n)
        .map(|i| matrix::add(r, f.coeffs.get(i).unwrap_or(&z), g.coeffs.get(i).unwrap_or(&z)))
        .collect();
    Ok(normalize(r, TwistedPoly { dim: f.dim, coeffs }))
}

pub fn twisted_mul<R: Ring>(r: &R, f: &TwistedPoly<R::Elem>, g: &TwistedPoly<R::Elem>) -> Result<TwistedPoly<R::Elem>> {
    if f.dim != g.dim {
        return Err(Error::DimensionMismatch(format!("{} vs {}", f.dim, g.dim)));
    }
    if f.coeffs.is_empty() || g.coeffs.is_empty() {
        return Ok(TwistedPoly { dim: f.dim, coeffs: vec![] });
    }
    let mut coeffs = vec![matrix::zeros(r, f.dim, f.dim); f.coeffs.len() + g.coeffs.len() - 1];
    for (i, b) in f.coeffs.iter().enumerate() {
        if matrix::is_zero(r, b) {
            continue;
        }
        for (j, c) in g.coeffs.iter().enumerate() {
            let t = matrix::mul(r, b, &matrix::frobenius(r, c, i as u32));
            coeffs[i + j] = matrix::add(r, &coeffs[i + j], &t);
        }
    }
    Ok(normalize(r, TwistedPoly { dim: f.dim, coeffs }))
}

/// `Σ B_i x^{(i)}` for a column vector `x`.
pub fn apply<R: Ring>(r: &R, f: &TwistedPoly<R::Elem>, x: &[R::Elem]) -> Vec<R::Elem> {
    let mut out = vec![r.zero(); f.dim];
    for (i, b) in f.coeffs.iter().enumerate() {
        let xi: Vec<_> = x.iter().map(|c| r.frobenius(c, i as u32)).collect();
        let y = matrix::mul_vec(r, b, &xi);
        out = out.iter().zip(&y).map(|(a, b)| r.add(a, b)).collect();
    }
    out
}

/// Coefficients `E_0 = I, E_1, …` of a t-module exponential over `k = F_q(θ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpSeries {
    pub dim: usize,
    pub coeffs: Vec<Matrix<RatFunc>>,
}

/// Solves `X·B − A·X = C` for `X`, as an `n² × n²` linear system.
pub fn solve_sylvester(k: &RatFuncField, a: &Matrix<RatFunc>, b: &Matrix<RatFunc>, c: &Matrix<RatFunc>) -> Result<Matrix<RatFunc>> {
    let n = a.rows;
    let idx = |i: usize, j: usize| i * n + j;
    let mut sys = matrix::zeros(k, n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let row = idx(i, j);
            for m in 0..n {
                // (X B)_{ij} = Σ_m x_{im} b_{mj}
                let cur = sys.get(row, idx(i, m)).clone();
                sys.set(row, idx(i, m), k.add(&cur, b.get(m, j)));
                // (A X)_{ij} = Σ_m a_{im} x_{mj}
                let cur = sys.get(row, idx(m, j)).clone();
                sys.set(row, idx(m, j), k.sub(&cur, a.get(i, m)));
            }
        }
    }
    if matrix::rank(k, &sys) < n * n {
        return Err(Error::Singular("Sylvester operator is not injective".into()));
    }
    let rhs: Vec<RatFunc> = c.data.clone();
    let x = matrix::solve(k, &sys, &rhs).ok_or_else(|| Error::Singular("inconsistent Sylvester system".into()))?;
    Ok(Matrix { rows: n, cols: n, data: x })
}

/// The coefficient matrices of `φ(θ)` lifted to `k`, with the deformation
/// variable specialized away (the `z`-weights are handled by the caller).
fn lifted(e: &AndersonModule, k: &RatFuncField) -> Vec<Matrix<RatFunc>> {
    e.mats.iter().map(|m| m.map(|p| k.from_poly(p.clone()))).collect()
}

/// `E_i` for `i ≤ i_max`, from `E_i A_0^{(i)} − A_0 E_i = Σ_{j=1}^{min(i,r)} A_j E_{i−j}^{(j)}`.
pub fn exp_coefficients(e: &AndersonModule, i_max: usize) -> Result<ExpSeries> {
    e.check()?;
    let k = RatFuncField::new(&e.field, crate::poly::Var::Theta);
    let mut exp = ExpSeries { dim: e.dim, coeffs: vec![matrix::identity(&k, e.dim)] };
    exp_extend(e, &mut exp, i_max)?;
    Ok(exp)
}

/// Appends coefficients until `exp` reaches `τ`-degree `i_max`.
pub fn exp_extend(e: &AndersonModule, exp: &mut ExpSeries, i_max: usize) -> Result<()> {
    let k = RatFuncField::new(&e.field, crate::poly::Var::Theta);
    let a = lifted(e, &k);
    let n = e.dim;
    for i in exp.coeffs.len()..=i_max {
        let mut rhs = matrix::zeros(&k, n, n);
        for j in 1..=i.min(e.rank()) {
            let t = matrix::mul(&k, &a[j], &matrix::frobenius(&k, &exp.coeffs[i - j], j as u32));
            rhs = matrix::add(&k, &rhs, &t);
        }
        let a0i = matrix::frobenius(&k, &a[0], i as u32);
        exp.coeffs.push(solve_sylvester(&k, &a[0], &a0i, &rhs)?);
    }
    Ok(())
}

/// Exponential of the `z`-deformed module, kept as polynomials in `z`:
/// `coeffs[i][m]` is the coefficient of `z^m τ^i`. Each `z`-degree is solved
/// separately since `τ` fixes `z`.
pub fn deformed_exp_coefficients(e: &AndersonModule, i_max: usize) -> Result<Vec<Vec<Matrix<RatFunc>>>> {
    e.check()?;
    let k = RatFuncField::new(&e.field, crate::poly::Var::Theta);
    let a = lifted(e, &k);
    let n = e.dim;
    let mut out: Vec<Vec<Matrix<RatFunc>>> = vec![vec![matrix::identity(&k, n)]];
    for i in 1..=i_max {
        let mut by_z = vec![];
        for m in 0..=i {
            let mut rhs = matrix::zeros(&k, n, n);
            for j in 1..=i.min(e.rank()) {
                // A~_j = z^j A_j contributes to z^m from z^{m-j} of E~_{i-j}
                if m < j {
                    continue;
                }
                if let Some(prev) = out[i - j].get(m - j) {
                    let t = matrix::mul(&k, &a[j], &matrix::frobenius(&k, prev, j as u32));
                    rhs = matrix::add(&k, &rhs, &t);
                }
            }
            let a0i = matrix::frobenius(&k, &a[0], i as u32);
            by_z.push(solve_sylvester(&k, &a[0], &a0i, &rhs)?);
        }
        out.push(by_z);
    }
    Ok(out)
}

/// Formal inverse of `exp` under composition: `L_0 = I`,
/// `L_k = −Σ_{i=1}^{k} E_i L_{k−i}^{(i)}`.
pub fn log_coefficients(exp: &ExpSeries, k: &RatFuncField) -> Vec<Matrix<RatFunc>> {
    let n = exp.dim;
    let mut logs = vec![matrix::identity(k, n)];
    for m in 1..exp.coeffs.len() {
        let mut acc = matrix::zeros(k, n, n);
        for i in 1..=m {
            let t = matrix::mul(k, &exp.coeffs[i], &matrix::frobenius(k, &logs[m - i], i as u32));
            acc = matrix::add(k, &acc, &t);
        }
        logs.push(matrix::neg(k, &acc));
    }
    logs
}

/// `exp_E ∘ δ_E(θ) − φ_E(θ) ∘ exp_E` through `τ`-degree `len − 1`; all
/// returned matrices vanish when the coefficients are right.
pub fn functional_equation_residual(e: &AndersonModule, exp: &ExpSeries) -> Vec<Matrix<RatFunc>> {
    let k = RatFuncField::new(&e.field, crate::poly::Var::Theta);
    let a = lifted(e, &k);
    let len = exp.coeffs.len();
    let f = TwistedPoly { dim: exp.dim, coeffs: exp.coeffs.clone() };
    let lhs = twisted_mul(&k, &f, &constant(&k, a[0].clone())).unwrap();
    let phi = normalize(&k, TwistedPoly { dim: exp.dim, coeffs: a });
    let rhs = twisted_mul(&k, &phi, &f).unwrap();
    let z = matrix::zeros(&k, exp.dim, exp.dim);
    (0..len)
        .map(|i| matrix::sub(&k, lhs.coeffs.get(i).unwrap_or(&z), rhs.coeffs.get(i).unwrap_or(&z)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anderson::carlitz;
    use crate::fq::Fq;
    use crate::poly::{poly_a, Var};

    #[test]
    fn tau_theta_commutation() {
        let f2 = Fq::prime(2).unwrap();
        let a = poly_a(&f2);
        let tau = tau_power(&a, 1, 1);
        let theta = constant(&a, Matrix::from_rows(vec![vec![vec![0, 1]]]));
        let prod = twisted_mul(&a, &tau, &theta).unwrap();
        assert_eq!(prod.coeffs[1].data[0], vec![0, 0, 1]);
        assert!(prod.coeffs[0].data[0].is_empty());
    }

    #[test]
    fn carlitz_square_q2() {
        let f2 = Fq::prime(2).unwrap();
        let a = poly_a(&f2);
        let phi = TwistedPoly { dim: 1, coeffs: vec![Matrix::from_rows(vec![vec![vec![0, 1]]]), matrix::identity(&a, 1)] };
        let sq = twisted_mul(&a, &phi, &phi).unwrap();
        // θ^2 + (θ^2 + θ)τ + τ^2
        assert_eq!(sq.coeffs[0].data[0], vec![0, 0, 1]);
        assert_eq!(sq.coeffs[1].data[0], vec![0, 1, 1]);
        assert_eq!(sq.coeffs[2].data[0], vec![1]);
    }

    #[test]
    fn carlitz_exp_q2() {
        let f2 = Fq::prime(2).unwrap();
        let c = carlitz(&f2);
        let exp = exp_coefficients(&c, 3).unwrap();
        let k = RatFuncField::new(&f2, Var::Theta);
        assert_eq!(exp.coeffs[0].data[0], k.one());
        assert_eq!(exp.coeffs[1].data[0], k.frac(vec![1], vec![0, 1, 1]));
        let a = poly_a(&f2);
        let t = vec![0, 1, 1];
        let den = a.mul(&a.mul(&t, &t), &vec![0, 1, 0, 0, 1]);
        assert_eq!(exp.coeffs[2].data[0], k.frac(vec![1], den));
        for i in 0..4 {
            let v = k.valuation(&exp.coeffs[i].data[0]).unwrap();
            assert_eq!(v, (i as i64) * 2i64.pow(i as u32));
        }
        assert!(functional_equation_residual(&c, &exp).iter().all(|m| matrix::is_zero(&k, m)));
        let logs = log_coefficients(&exp, &k);
        assert_eq!(logs[1], exp.coeffs[1]);
    }

    #[test]
    fn deformed_exp_is_diagonal_in_z() {
        let f3 = Fq::prime(3).unwrap();
        let jordan = Matrix::from_rows(vec![vec![vec![0, 1], vec![1]], vec![vec![], vec![0, 1]]]);
        let a1 = Matrix::from_rows(vec![vec![vec![], vec![]], vec![vec![1], vec![]]]);
        for e in [carlitz(&f3), AndersonModule::new(&f3, vec![jordan, a1]).unwrap()] {
            let k = RatFuncField::new(&f3, Var::Theta);
            let plain = exp_coefficients(&e, 3).unwrap();
            let def = deformed_exp_coefficients(&e.z_deform(), 3).unwrap();
            for i in 0..=3 {
                for (m, x) in def[i].iter().enumerate() {
                    if m == i {
                        assert_eq!(*x, plain.coeffs[i]);
                    } else {
                        assert!(matrix::is_zero(&k, x));
                    }
                }
            }
            assert!(functional_equation_residual(&e, &plain).iter().all(|m| matrix::is_zero(&k, m)));
        }
    }
}
