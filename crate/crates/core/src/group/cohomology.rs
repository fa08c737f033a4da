//! Finite `F_p[G]`-modules given by generator action matrices: projectivity
//! (equivalently, `G`-cohomological triviality) and `Ĥ⁰`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fq::Fq;
use crate::group::characters::Characters;
use crate::group::{AbelianGroup, GroupRing};
use crate::matrix::{self, Matrix};
use crate::ring::Ring;

#[derive(Clone, Debug)]
pub struct FiniteGModule {
    pub field: Fq,
    pub group: Arc<AbelianGroup>,
    pub dim: usize,
    /// Action of each generator of `G`, in the order of `AbelianGroup::generators`.
    pub gens: Vec<Matrix<u32>>,
}

impl FiniteGModule {
    pub fn new(field: Fq, group: Arc<AbelianGroup>, gens: Vec<Matrix<u32>>) -> Result<Self> {
        let dim = gens.first().map_or(0, |m| m.rows);
        if gens.len() != group.factors().len() {
            return Err(Error::DimensionMismatch("one action matrix per cyclic factor".into()));
        }
        for (m, &d) in gens.iter().zip(group.factors()) {
            if m.rows != dim || m.cols != dim {
                return Err(Error::DimensionMismatch("action matrices must be square of equal size".into()));
            }
            if matrix::pow(&field, m, d) != matrix::identity(&field, dim) {
                return Err(Error::InvalidArgument(format!("generator action does not have order dividing {d}")));
            }
        }
        for (i, a) in gens.iter().enumerate() {
            for b in &gens[i + 1..] {
                if matrix::mul(&field, a, b) != matrix::mul(&field, b, a) {
                    return Err(Error::InvalidArgument("generator actions do not commute".into()));
                }
            }
        }
        Ok(FiniteGModule { field, group, dim, gens })
    }

    /// `F_p[G]^rank` with the left regular action.
    pub fn free(field: &Fq, group: Arc<AbelianGroup>, rank: usize) -> Self {
        let r = GroupRing::new(field.clone(), group.clone());
        let gens = group
            .generators()
            .into_iter()
            .map(|g| {
                let m = r.multiplication_matrix(&r.basis(g));
                let blocks: Vec<Vec<Matrix<u32>>> = (0..rank)
                    .map(|i| (0..rank).map(|j| if i == j { m.clone() } else { matrix::zeros(field, m.rows, m.cols) }).collect())
                    .collect();
                if rank == 0 {
                    Matrix { rows: 0, cols: 0, data: vec![] }
                } else {
                    matrix::block(&blocks)
                }
            })
            .collect();
        FiniteGModule { field: field.clone(), dim: rank * group.order(), group, gens }
    }

    pub fn trivial(field: &Fq, group: Arc<AbelianGroup>, dim: usize) -> Self {
        let gens = group.generators().iter().map(|_| matrix::identity(field, dim)).collect();
        FiniteGModule { field: field.clone(), group, dim, gens }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let f = &self.field;
        let gens = self
            .gens
            .iter()
            .zip(&other.gens)
            .map(|(a, b)| {
                let n = a.rows + b.rows;
                Matrix::from_fn(n, n, |i, j| {
                    if i < a.rows && j < a.rows {
                        *a.get(i, j)
                    } else if i >= a.rows && j >= a.rows {
                        *b.get(i - a.rows, j - a.rows)
                    } else {
                        f.zero()
                    }
                })
            })
            .collect();
        FiniteGModule { field: f.clone(), group: self.group.clone(), dim: self.dim + other.dim, gens }
    }

    /// Same module in another basis: `P^{-1} ρ(g) P`.
    pub fn conjugate(&self, p: &Matrix<u32>) -> Option<Self> {
        let pi = matrix::inverse(&self.field, p)?;
        let gens = self
            .gens
            .iter()
            .map(|g| matrix::mul(&self.field, &pi, &matrix::mul(&self.field, g, p)))
            .collect();
        Some(FiniteGModule { gens, ..self.clone() })
    }

    pub fn element_matrix(&self, g: usize) -> Matrix<u32> {
        let t = self.group.tuple(g);
        t.iter()
            .zip(&self.gens)
            .fold(matrix::identity(&self.field, self.dim), |acc, (&e, m)| {
                matrix::mul(&self.field, &acc, &matrix::pow(&self.field, m, e))
            })
    }

    /// Action of a group-ring element `Σ x_g g`.
    pub fn ring_element_matrix(&self, x: &[u32]) -> Matrix<u32> {
        let f = &self.field;
        let mut acc = matrix::zeros(f, self.dim, self.dim);
        for (g, c) in x.iter().enumerate() {
            if *c != 0 {
                acc = matrix::add(f, &acc, &matrix::scale(f, &self.element_matrix(g), c));
            }
        }
        acc
    }

    pub fn fixed_dim(&self) -> usize {
        let f = &self.field;
        let mut rows: Vec<Vec<u32>> = vec![];
        for m in &self.gens {
            let d = matrix::sub(f, m, &matrix::identity(f, self.dim));
            for i in 0..self.dim {
                rows.push(d.row(i).to_vec());
            }
        }
        if rows.is_empty() {
            return self.dim;
        }
        self.dim - matrix::rank(f, &Matrix::from_rows(rows))
    }
}

/// `dim_{F_p} Ĥ⁰(G, M) = dim M^G − dim Tr_G(M)`.
pub fn tate_h0(m: &FiniteGModule) -> usize {
    let r = GroupRing::new(m.field.clone(), m.group.clone());
    let tr = m.ring_element_matrix(&r.trace_element());
    m.fixed_dim() - matrix::rank(&m.field, &tr)
}

fn hconcat(a: &[Matrix<u32>], rows: usize) -> Matrix<u32> {
    let cols: usize = a.iter().map(|m| m.cols).sum();
    let mut out = Matrix { rows, cols, data: vec![0; rows * cols] };
    let mut off = 0;
    for m in a {
        for i in 0..rows {
            for j in 0..m.cols {
                out.set(i, off + j, *m.get(i, j));
            }
        }
        off += m.cols;
    }
    out
}

/// Per block `e_χ M`, freeness over the local ring `F_p(χ)[H]` by Nakayama:
/// `dim e_χM = |H| · dim(e_χM / I_H e_χM)`.
pub fn is_g_cohomologically_trivial(m: &FiniteGModule) -> Result<bool> {
    let f = &m.field;
    let r = GroupRing::new(f.clone(), m.group.clone());
    let chars = Characters::new(&r)?;
    let h = m.group.h_order();
    let hgens = m.group.h_generators();
    for b in &chars.blocks {
        let e = m.ring_element_matrix(&b.idempotent);
        let dim_block = matrix::rank(f, &e);
        let images: Vec<Matrix<u32>> = hgens
            .iter()
            .map(|&g| matrix::mul(f, &matrix::sub(f, &m.element_matrix(g), &matrix::identity(f, m.dim)), &e))
            .collect();
        let dim_ih = if images.is_empty() { 0 } else { matrix::rank(f, &hconcat(&images, m.dim)) };
        if dim_block != h * (dim_block - dim_ih) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exhaustive search, block by block, for a basis over `F_p(χ)[H]`.
/// Returns `None` when the search space exceeds `budget` tuples.
pub fn is_free_over(m: &FiniteGModule, budget: u64) -> Result<Option<bool>> {
    let f = &m.field;
    let p = f.p();
    let r = GroupRing::new(f.clone(), m.group.clone());
    let chars = Characters::new(&r)?;
    let h = m.group.h_order();
    let all: Vec<Matrix<u32>> = (0..m.group.order()).map(|g| m.element_matrix(g)).collect();
    for b in &chars.blocks {
        let e = m.ring_element_matrix(&b.idempotent);
        let (red, pivots) = matrix::rref(f, &e.transpose());
        let basis: Vec<Vec<u32>> = (0..pivots.len()).map(|i| red.row(i).to_vec()).collect();
        let d = basis.len();
        let unit = h * b.degree;
        if d % unit != 0 {
            return Ok(Some(false));
        }
        let rank = d / unit;
        if rank == 0 {
            continue;
        }
        let per = (p as u128).pow(d as u32);
        let total = per.checked_pow(rank as u32).unwrap_or(u128::MAX);
        if total > budget as u128 {
            return Ok(None);
        }
        let vec_of = |mut idx: u128| -> Vec<u32> {
            let mut v = vec![0u32; m.dim];
            for bv in &basis {
                let c = (idx % p as u128) as u32;
                idx /= p as u128;
                if c != 0 {
                    for (x, y) in v.iter_mut().zip(bv) {
                        *x = f.add_u(*x, f.mul_u(c, *y));
                    }
                }
            }
            v
        };
        let mut found = false;
        for t in 0..total {
            let mut idx = t;
            let mut rows = vec![];
            for _ in 0..rank {
                let v = vec_of(idx % per);
                idx /= per;
                for a in &all {
                    rows.push(matrix::mul_vec(f, a, &v));
                }
            }
            if matrix::rank(f, &Matrix::from_rows(rows)) == d {
                found = true;
                break;
            }
        }
        if !found {
            return Ok(Some(false));
        }
    }
    Ok(Some(true))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(spec: &str, p: u64) -> Arc<AbelianGroup> {
        Arc::new(AbelianGroup::parse(spec, p).unwrap())
    }

    #[test]
    fn regular_and_trivial_modules() {
        for p in [2u64, 3] {
            let f = Fq::prime(p).unwrap();
            let g = group(&format!("Z/{p}"), p);
            let reg = FiniteGModule::free(&f, g.clone(), 1);
            assert!(is_g_cohomologically_trivial(&reg).unwrap());
            assert_eq!(tate_h0(&reg), 0);
            let triv = FiniteGModule::trivial(&f, g.clone(), 1);
            assert!(!is_g_cohomologically_trivial(&triv).unwrap());
            assert_eq!(tate_h0(&triv), 1);
            let two = FiniteGModule::free(&f, g.clone(), 2);
            assert!(is_g_cohomologically_trivial(&two).unwrap());
            assert_eq!(tate_h0(&triv.direct_sum(&triv)), 2);
            assert_eq!(tate_h0(&reg.direct_sum(&triv)), 1);
        }
    }

    #[test]
    fn prime_to_p_groups_are_always_projective() {
        let f = Fq::prime(3).unwrap();
        let g = group("Z/2", 3);
        let triv = FiniteGModule::trivial(&f, g, 1);
        assert!(is_g_cohomologically_trivial(&triv).unwrap());
        assert_eq!(tate_h0(&triv), 0);
    }

    #[test]
    fn brute_force_agrees_on_small_cases() {
        let f = Fq::prime(2).unwrap();
        let g = group("Z/2", 2);
        let reg = FiniteGModule::free(&f, g.clone(), 2);
        assert_eq!(is_free_over(&reg, 1 << 20).unwrap(), Some(true));
        let triv = FiniteGModule::trivial(&f, g, 2);
        assert_eq!(is_free_over(&triv, 1 << 20).unwrap(), Some(false));
    }
}
