//! Exact Gaussian elimination over rationals and over rational functions.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::scalar::Scalar;

/// The operations elimination needs. Implemented for [`BigRational`] and
/// for symbolic [`Scalar`]s (the field of rational functions, where a pivot
/// is usable iff it is not identically zero).
pub trait Field: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
}

impl Field for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl Field for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self.checked_div(o).expect("pivot is nonzero")
    }
    fn neg(&self) -> Self {
        -self
    }
}

pub type Matrix<F> = Vec<Vec<F>>;

/// Reduced row echelon form in place; returns the pivot columns.
///
/// Pivots are taken on the first nonzero column, scanning columns in the
/// order given by `col_order` (all columns, left to right, when `None`).
pub fn rref_with_order<F: Field>(m: &mut Matrix<F>, col_order: Option<&[usize]>) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let natural: Vec<usize> = (0..cols).collect();
    let order = col_order.unwrap_or(&natural);
    let mut pivots = Vec::new();
    let mut r = 0;
    for &c in order {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = F::one().div(&m[r][c]);
        if inv != F::one() {
            for x in m[r].iter_mut() {
                if !x.is_zero() {
                    *x = x.mul(&inv);
                }
            }
        }
        let pivot = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot) {
                if !y.is_zero() {
                    *x = x.sub(&y.mul(&f));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rref<F: Field>(m: &mut Matrix<F>) -> Vec<usize> {
    rref_with_order(m, None)
}

pub fn rank<F: Field>(m: &Matrix<F>) -> usize {
    let mut a = m.clone();
    rref(&mut a).len()
}

/// Row-echelon basis of the row space (zero rows dropped).
pub fn row_basis<F: Field>(m: &Matrix<F>) -> Matrix<F> {
    let mut a = m.clone();
    let k = rref(&mut a).len();
    a.truncate(k);
    a
}

/// Basis of `{x : m x = 0}`.
pub fn nullspace<F: Field>(m: &Matrix<F>, cols: usize) -> Matrix<F> {
    let mut a = m.clone();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![F::zero(); cols];
            v[f] = F::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = a[r][f].neg();
            }
            v
        })
        .collect()
}

/// A pivot unknown with its constant part and its coefficients on the free unknowns.
pub type Solved<F> = (usize, F, Vec<(usize, F)>);

/// Result of solving an affine system `A x = b`.
#[derive(Clone, Debug)]
pub struct AffineSolution<F> {
    /// Pivot (solved) unknowns, in pivot order.
    pub pivots: Vec<usize>,
    /// Unknowns left free.
    pub free: Vec<usize>,
    pub solved: Vec<Solved<F>>,
}

/// Solves `A x = b` exactly, eliminating pivots in `col_order`. Returns
/// `Err(row)` with the index of an inconsistent reduced row.
pub fn solve_affine<F: Field>(
    a: &Matrix<F>,
    b: &[F],
    cols: usize,
    col_order: Option<&[usize]>,
) -> Result<AffineSolution<F>, F> {
    let mut aug: Matrix<F> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let natural: Vec<usize> = (0..cols).collect();
    let order = col_order.unwrap_or(&natural);
    let pivots = rref_with_order(&mut aug, Some(order));
    for row in aug.iter().skip(pivots.len()) {
        if !row[cols].is_zero() {
            return Err(row[cols].clone());
        }
    }
    let free: Vec<usize> = order.iter().copied().filter(|c| !pivots.contains(c)).collect();
    let solved = pivots
        .iter()
        .enumerate()
        .map(|(r, &p)| {
            let deps = free
                .iter()
                .filter(|&&f| !aug[r][f].is_zero())
                .map(|&f| (f, aug[r][f].neg()))
                .collect();
            (p, aug[r][cols].clone(), deps)
        })
        .collect();
    Ok(AffineSolution { pivots, free, solved })
}

/// Determinant by elimination.
pub fn det<F: Field>(m: &Matrix<F>) -> F {
    let n = m.len();
    let mut a = m.clone();
    let mut d = F::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return F::zero();
        };
        if p != c {
            a.swap(p, c);
            d = d.neg();
        }
        d = d.mul(&a[c][c]);
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].div(&a[c][c]);
            let (top, bottom) = a.split_at_mut(i);
            for (x, y) in bottom[0][c..].iter_mut().zip(&top[c][c..]) {
                *x = x.sub(&y.mul(&f));
            }
        }
    }
    d
}

/// Whether `v` lies in the row space of `m`.
pub fn in_row_space<F: Field>(m: &Matrix<F>, v: &[F]) -> bool {
    let r = rank(m);
    let mut a = m.clone();
    a.push(v.to_vec());
    rank(&a) == r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn rank_and_nullspace() {
        let m = vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)], vec![q(0), q(1), q(1)]];
        assert_eq!(rank(&m), 2);
        let ns = nullspace(&m, 3);
        assert_eq!(ns.len(), 1);
        for row in &m {
            let dot: BigRational = row.iter().zip(&ns[0]).map(|(a, b)| a * b).sum();
            assert!(Zero::is_zero(&dot));
        }
    }

    #[test]
    fn determinant() {
        let m = vec![vec![q(0), q(1)], vec![q(1), q(0)]];
        assert_eq!(det(&m), q(-1));
    }

    #[test]
    fn affine_solve_prefers_given_order() {
        // x0 + x1 = 1: eliminating in reverse order solves for x1.
        let a = vec![vec![q(1), q(1)]];
        let s = solve_affine(&a, &[q(1)], 2, Some(&[1, 0])).unwrap();
        assert_eq!(s.pivots, vec![1]);
        assert_eq!(s.free, vec![0]);
        assert!(solve_affine(&vec![vec![q(0), q(0)]], &[q(1)], 2, None).is_err());
    }
}
