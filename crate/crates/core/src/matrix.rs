//! Dense matrices over a [`Ring`] parent.
//!
//! Determinants and characteristic polynomials use Berkowitz's algorithm,
//! which never divides and is therefore sound over rings with zero divisors
//! such as `F_q[G][θ]`. Elimination routines require a [`Field`].

use crate::poly::{PolyRing, Var};
use crate::ring::{Field, Ring};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<E> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<E>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: E) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<F>(&self, f: impl Fn(&E) -> F) -> Matrix<F> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let (r0, c0) = (rows.start, cols.start);
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self.get(r0 + i, c0 + j).clone())
    }
}

pub fn zeros<R: Ring>(r: &R, rows: usize, cols: usize) -> Matrix<R::Elem> {
    Matrix { rows, cols, data: vec![r.zero(); rows * cols] }
}

pub fn identity<R: Ring>(r: &R, n: usize) -> Matrix<R::Elem> {
    Matrix::from_fn(n, n, |i, j| if i == j { r.one() } else { r.zero() })
}

pub fn scalar_matrix<R: Ring>(r: &R, n: usize, c: &R::Elem) -> Matrix<R::Elem> {
    Matrix::from_fn(n, n, |i, j| if i == j { c.clone() } else { r.zero() })
}

pub fn add<R: Ring>(r: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols), "shape mismatch");
    Matrix { rows: a.rows, cols: a.cols, data: a.data.iter().zip(&b.data).map(|(x, y)| r.add(x, y)).collect() }
}

pub fn sub<R: Ring>(r: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols), "shape mismatch");
    Matrix { rows: a.rows, cols: a.cols, data: a.data.iter().zip(&b.data).map(|(x, y)| r.sub(x, y)).collect() }
}

pub fn neg<R: Ring>(r: &R, a: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    a.map(|x| r.neg(x))
}

pub fn scale<R: Ring>(r: &R, a: &Matrix<R::Elem>, c: &R::Elem) -> Matrix<R::Elem> {
    a.map(|x| r.mul(c, x))
}

pub fn mul<R: Ring>(r: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    assert_eq!(a.cols, b.rows, "shape mismatch");
    let mut out = zeros(r, a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let x = a.get(i, k);
            if r.is_zero(x) {
                continue;
            }
            for j in 0..b.cols {
                let t = r.mul(x, b.get(k, j));
                let cur = &mut out.data[i * b.cols + j];
                *cur = r.add(cur, &t);
            }
        }
    }
    out
}

pub fn mul_vec<R: Ring>(r: &R, a: &Matrix<R::Elem>, v: &[R::Elem]) -> Vec<R::Elem> {
    assert_eq!(a.cols, v.len(), "shape mismatch");
    (0..a.rows)
        .map(|i| {
            a.row(i)
                .iter()
                .zip(v)
                .fold(r.zero(), |acc, (x, y)| if r.is_zero(x) { acc } else { r.add(&acc, &r.mul(x, y)) })
        })
        .collect()
}

pub fn pow<R: Ring>(r: &R, a: &Matrix<R::Elem>, mut e: u64) -> Matrix<R::Elem> {
    let mut acc = identity(r, a.rows);
    let mut base = a.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(r, &acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = mul(r, &base, &base);
        }
    }
    acc
}

pub fn is_zero<R: Ring>(r: &R, a: &Matrix<R::Elem>) -> bool {
    a.data.iter().all(|x| r.is_zero(x))
}

/// Entrywise Frobenius twist `A^{(k)}`.
pub fn frobenius<R: Ring>(r: &R, a: &Matrix<R::Elem>, k: u32) -> Matrix<R::Elem> {
    a.map(|x| r.frobenius(x, k))
}

/// Block matrix from a square grid of equally sized blocks.
pub fn block<E: Clone>(blocks: &[Vec<Matrix<E>>]) -> Matrix<E> {
    let br = blocks.len();
    let bc = blocks[0].len();
    let (h, w) = (blocks[0][0].rows, blocks[0][0].cols);
    Matrix::from_fn(br * h, bc * w, |i, j| blocks[i / h][j / w].get(i % h, j % w).clone())
}

/// `det(xI − A)`, little-endian, via Berkowitz. Monic of degree `n`.
pub fn charpoly<R: Ring>(r: &R, a: &Matrix<R::Elem>) -> Vec<R::Elem> {
    assert!(a.is_square(), "charpoly of non-square matrix");
    let n = a.rows;
    if n == 0 {
        return vec![r.one()];
    }
    // big-endian coefficients of the leading k×k principal minor's charpoly
    let mut p = vec![r.one(), r.neg(a.get(0, 0))];
    for k in 1..n {
        let sub = a.submatrix(0..k, 0..k);
        let col: Vec<_> = (0..k).map(|i| a.get(i, k).clone()).collect();
        let row: Vec<_> = (0..k).map(|j| a.get(k, j).clone()).collect();
        let mut t = Vec::with_capacity(k + 2);
        t.push(r.one());
        t.push(r.neg(a.get(k, k)));
        let mut v = col;
        for i in 0..k {
            let dot = row.iter().zip(&v).fold(r.zero(), |acc, (x, y)| r.add(&acc, &r.mul(x, y)));
            t.push(r.neg(&dot));
            if i + 1 < k {
                v = mul_vec(r, &sub, &v);
            }
        }
        // new_p = T · p with T lower-triangular Toeplitz, first column t
        let new_p: Vec<_> = (0..k + 2)
            .map(|i| {
                (0..=i.min(k)).fold(r.zero(), |acc, j| r.add(&acc, &r.mul(&t[i - j], &p[j])))
            })
            .collect();
        p = new_p;
    }
    p.reverse();
    p
}

/// `det(xI − A)` over a field in `O(n³)`: reduce to upper Hessenberg form by
/// similarity, then expand along the subdiagonal.
pub fn charpoly_hessenberg<F: Field>(f: &F, a: &Matrix<F::Elem>) -> Vec<F::Elem> {
    assert!(a.is_square(), "charpoly of non-square matrix");
    let n = a.rows;
    let mut h = a.clone();
    for m in 1..n.saturating_sub(1) {
        let Some(piv) = (m..n).find(|&i| !f.is_zero(h.get(i, m - 1))) else {
            continue;
        };
        if piv != m {
            for j in 0..n {
                h.data.swap(piv * n + j, m * n + j);
            }
            for i in 0..n {
                h.data.swap(i * n + piv, i * n + m);
            }
        }
        let inv = f.inv(h.get(m, m - 1)).expect("nonzero pivot");
        for i in m + 1..n {
            let u = f.mul(h.get(i, m - 1), &inv);
            if f.is_zero(&u) {
                continue;
            }
            for j in 0..n {
                let v = f.sub(h.get(i, j), &f.mul(&u, h.get(m, j)));
                h.set(i, j, v);
            }
            for r in 0..n {
                let v = f.add(h.get(r, m), &f.mul(&u, h.get(r, i)));
                h.set(r, m, v);
            }
        }
    }
    let px = PolyRing::new(f.clone(), Var::Theta);
    let mut p: Vec<Vec<F::Elem>> = vec![px.one()];
    for m in 1..=n {
        let k = m - 1;
        let lin = px.from_coeffs(vec![f.neg(h.get(k, k)), f.one()]);
        let mut next = px.mul(&lin, &p[m - 1]);
        let mut t = f.one();
        for i in (1..m).rev() {
            t = f.mul(&t, h.get(i, i - 1));
            if f.is_zero(&t) {
                break;
            }
            let c = f.mul(&t, h.get(i - 1, k));
            next = px.sub(&next, &px.scale(&p[i - 1], &c));
        }
        p.push(next);
    }
    let mut out = p.pop().unwrap();
    out.resize(n + 1, f.zero());
    out
}

pub fn det<R: Ring>(r: &R, a: &Matrix<R::Elem>) -> R::Elem {
    let cp = charpoly(r, a);
    if a.rows % 2 == 0 {
        cp[0].clone()
    } else {
        r.neg(&cp[0])
    }
}

/// Classical adjoint from Cayley–Hamilton; division-free.
pub fn adjugate<R: Ring>(r: &R, a: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    let n = a.rows;
    if n == 0 {
        return a.clone();
    }
    let cp = charpoly(r, a); // little-endian, cp[n] = 1
    let mut b = identity(r, n);
    for i in 1..n {
        b = add(r, &mul(r, a, &b), &scalar_matrix(r, n, &cp[n - i]));
    }
    if n % 2 == 0 {
        neg(r, &b)
    } else {
        b
    }
}

/// Reduced row echelon form and pivot columns.
pub fn rref<F: Field>(f: &F, a: &Matrix<F::Elem>) -> (Matrix<F::Elem>, Vec<usize>) {
    let mut m = a.clone();
    let mut pivots = vec![];
    let mut row = 0;
    for col in 0..m.cols {
        if row == m.rows {
            break;
        }
        let Some(pr) = (row..m.rows).find(|&i| !f.is_zero(m.get(i, col))) else {
            continue;
        };
        if pr != row {
            for j in 0..m.cols {
                m.data.swap(pr * m.cols + j, row * m.cols + j);
            }
        }
        let inv = f.inv(m.get(row, col)).unwrap();
        for j in 0..m.cols {
            let v = f.mul(m.get(row, j), &inv);
            m.set(row, j, v);
        }
        for i in 0..m.rows {
            if i == row || f.is_zero(m.get(i, col)) {
                continue;
            }
            let c = m.get(i, col).clone();
            for j in col..m.cols {
                let v = f.sub(m.get(i, j), &f.mul(&c, m.get(row, j)));
                m.set(i, j, v);
            }
        }
        pivots.push(col);
        row += 1;
    }
    (m, pivots)
}

pub fn rank<F: Field>(f: &F, a: &Matrix<F::Elem>) -> usize {
    rref(f, a).1.len()
}

/// Basis of `{x : A x = 0}`.
pub fn nullspace<F: Field>(f: &F, a: &Matrix<F::Elem>) -> Vec<Vec<F::Elem>> {
    let (m, pivots) = rref(f, a);
    let free: Vec<usize> = (0..a.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![f.zero(); a.cols];
            v[fc] = f.one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(m.get(r, fc));
            }
            v
        })
        .collect()
}

/// Some solution of `A x = b`, or `None` if inconsistent.
pub fn solve<F: Field>(f: &F, a: &Matrix<F::Elem>, b: &[F::Elem]) -> Option<Vec<F::Elem>> {
    let aug = Matrix::from_fn(a.rows, a.cols + 1, |i, j| if j < a.cols { a.get(i, j).clone() } else { b[i].clone() });
    let (m, pivots) = rref(f, &aug);
    if pivots.last() == Some(&a.cols) {
        return None;
    }
    let mut x = vec![f.zero(); a.cols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = m.get(r, a.cols).clone();
    }
    Some(x)
}

pub fn inverse<F: Field>(f: &F, a: &Matrix<F::Elem>) -> Option<Matrix<F::Elem>> {
    let n = a.rows;
    let aug = Matrix::from_fn(n, 2 * n, |i, j| {
        if j < n {
            a.get(i, j).clone()
        } else if j - n == i {
            f.one()
        } else {
            f.zero()
        }
    });
    let (m, pivots) = rref(f, &aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(m.submatrix(0..n, n..2 * n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fq::Fq;
    use crate::poly::{poly_a, PolyRing};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hessenberg_matches_berkowitz() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for q in [2u64, 3, 4, 5] {
            let f = Fq::with_order(q).unwrap();
            for n in 0..9 {
                for _ in 0..5 {
                    // sparse matrices exercise the zero-pivot branches
                    let a = Matrix::from_fn(n, n, |_, _| if rng.gen_bool(0.5) { 0 } else { rng.gen_range(0..q as u32) });
                    assert_eq!(charpoly_hessenberg(&f, &a), charpoly(&f, &a));
                }
            }
        }
    }

    fn gauss_det(f: &Fq, a: &Matrix<u32>) -> u32 {
        let n = a.rows;
        let mut m = a.clone();
        let mut d = 1u32;
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| *m.get(i, c) != 0) else { return 0 };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                d = f.neg_u(d);
            }
            let piv = *m.get(c, c);
            d = f.mul_u(d, piv);
            let inv = f.inv_u(piv).unwrap();
            for i in c + 1..n {
                let k = f.mul_u(*m.get(i, c), inv);
                for j in c..n {
                    let v = f.sub_u(*m.get(i, j), f.mul_u(k, *m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        d
    }

    #[test]
    fn berkowitz_det_matches_gauss() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for p in [2u64, 3, 5] {
            let f = Fq::prime(p).unwrap();
            for n in 0..7 {
                for _ in 0..20 {
                    let a = Matrix::from_fn(n, n, |_, _| rng.gen_range(0..p as u32));
                    assert_eq!(det(&f, &a), if n == 0 { 1 } else { gauss_det(&f, &a) });
                    let adj = adjugate(&f, &a);
                    assert_eq!(mul(&f, &a, &adj), scalar_matrix(&f, n, &det(&f, &a)));
                }
            }
        }
    }

    #[test]
    fn charpoly_over_polynomials_is_monic() {
        let f = Fq::prime(3).unwrap();
        let a = poly_a(&f);
        let m = Matrix::from_rows(vec![vec![vec![0, 1], vec![1]], vec![vec![2], vec![]]]);
        let cp = charpoly(&a, &m);
        assert_eq!(cp.len(), 3);
        assert!(PolyRing::is_monic(&a, &cp[2]));
        // x^2 - θx - 2
        assert_eq!(cp[1], vec![0, 2]);
        assert_eq!(cp[0], vec![1]);
    }

    #[test]
    fn nullspace_and_solve() {
        let f = Fq::prime(5).unwrap();
        let a = Matrix::from_rows(vec![vec![1, 2, 3], vec![2, 4, 2]]);
        let ns = nullspace(&f, &a);
        assert_eq!(ns.len(), 1);
        assert!(mul_vec(&f, &a, &ns[0]).iter().all(|x| *x == 0));
        let x = solve(&f, &a, &[1, 1]).unwrap();
        assert_eq!(mul_vec(&f, &a, &x), vec![1, 1]);
    }
}
