//! Rank, nullspace and determinants over exact rationals (fraction-free
//! elimination) and over `f64` (SVD with a relative tolerance).

use std::ops::{Mul, Sub};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::{to_f64, Scalar};

/// Relative tolerance for floating rank decisions.
pub const FLOAT_RANK_TOL: f64 = 1e-9;

/// Commutative ring operations needed by [`det`] and [`wedge`].
pub trait Ring: Clone + Zero + Sub<Output = Self> + Mul<Output = Self> {}
impl<T: Clone + Zero + Sub<Output = T> + Mul<Output = T>> Ring for T {}

/// Determinant by cofactor expansion along the first row. Intended for the
/// small (at most 6x6) matrices with polynomial entries used here.
pub fn det<T: Ring>(m: &[Vec<T>]) -> T {
    let n = m.len();
    match n {
        0 => panic!("determinant of an empty matrix"),
        1 => return m[0][0].clone(),
        2 => return m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone(),
        _ => {}
    }
    let mut acc = T::zero();
    for (j, a) in m[0].iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let minor: Vec<Vec<T>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let term = a.clone() * det(&minor);
        acc = if j % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

/// Covector `w` of the k vectors `vs` in (k+1)-space with
/// `w . x = det[x; vs]` for every `x`. Zero iff the inputs are dependent.
pub fn wedge<T: Ring>(vs: &[Vec<T>]) -> Vec<T> {
    let dim = vs.len() + 1;
    assert!(dim >= 2, "wedge needs at least one vector");
    (0..dim)
        .map(|j| {
            let minor: Vec<Vec<T>> = vs
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, x)| x.clone())
                        .collect()
                })
                .collect();
            let d = det(&minor);
            if j % 2 == 0 {
                d
            } else {
                T::zero() - d
            }
        })
        .collect()
}

/// Scales a rational row to a primitive integer row.
pub fn integer_row(row: &[Scalar]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = row
        .iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        ints
    } else {
        ints.into_iter().map(|x| x / &g).collect()
    }
}

/// Fraction-free row echelon form. Returns the reduced integer rows and
/// the pivot columns; the sign of the permutation is tracked for `det`.
struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
    swaps: usize,
}

fn bareiss(m: &[Vec<Scalar>]) -> Echelon {
    let mut rows: Vec<Vec<BigInt>> = m.iter().map(|r| integer_row(r)).collect();
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut swaps = 0;
    let mut r = 0;
    for col in 0..ncols {
        if r == nrows {
            break;
        }
        // smallest nonzero pivot keeps intermediate minors short
        let pick = (r..nrows)
            .filter(|&i| !rows[i][col].is_zero())
            .min_by(|&a, &b| rows[a][col].abs().cmp(&rows[b][col].abs()));
        let Some(p) = pick else { continue };
        if p != r {
            rows.swap(p, r);
            swaps += 1;
        }
        let (head, tail) = rows.split_at_mut(r + 1);
        let pivot_row = &head[r];
        let pivot = pivot_row[col].clone();
        for row in tail.iter_mut() {
            let lead = row[col].clone();
            for j in col + 1..ncols {
                let v = &pivot * &row[j] - &lead * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = pivot;
        pivots.push(col);
        r += 1;
    }
    Echelon {
        rows,
        pivots,
        swaps,
    }
}

pub fn rank(m: &[Vec<Scalar>]) -> usize {
    if m.is_empty() {
        return 0;
    }
    bareiss(m).pivots.len()
}

/// Exact determinant of a square rational matrix.
pub fn det_exact(m: &[Vec<Scalar>]) -> Scalar {
    let n = m.len();
    if n == 0 {
        return Scalar::one();
    }
    // row scaling by integer_row changes the determinant; undo it
    let mut scale = Scalar::one();
    for row in m {
        let ints = integer_row(row);
        if let Some((x, k)) = row.iter().zip(&ints).find(|(x, _)| !x.is_zero()) {
            scale *= x / Scalar::from_integer(k.clone());
        } else {
            return Scalar::zero();
        }
    }
    let e = bareiss(m);
    if e.pivots.len() < n {
        return Scalar::zero();
    }
    let d = Scalar::from_integer(e.rows[n - 1][n - 1].clone()) * scale;
    if e.swaps % 2 == 1 {
        -d
    } else {
        d
    }
}

/// Basis of the right nullspace `{x : m x = 0}`; each vector is a primitive
/// integer vector.
pub fn nullspace(m: &[Vec<Scalar>], ncols: usize) -> Vec<Vec<Scalar>> {
    if m.is_empty() {
        return (0..ncols)
            .map(|i| {
                let mut v = vec![Scalar::zero(); ncols];
                v[i] = Scalar::one();
                v
            })
            .collect();
    }
    let e = bareiss(m);
    let free: Vec<usize> = (0..ncols).filter(|c| !e.pivots.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &f in &free {
        let mut x = vec![Scalar::zero(); ncols];
        x[f] = Scalar::one();
        for (r, &pc) in e.pivots.iter().enumerate().rev() {
            let row = &e.rows[r];
            let mut s = Scalar::zero();
            for j in pc + 1..ncols {
                if !row[j].is_zero() && !x[j].is_zero() {
                    s += Scalar::from_integer(row[j].clone()) * &x[j];
                }
            }
            x[pc] = -s / Scalar::from_integer(row[pc].clone());
        }
        basis.push(
            integer_row(&x)
                .into_iter()
                .map(Scalar::from_integer)
                .collect(),
        );
    }
    basis
}

fn to_dmatrix(m: &[Vec<f64>], ncols: usize) -> DMatrix<f64> {
    // pad to at least ncols rows so the SVD exposes the full right nullspace
    let nrows = m.len().max(ncols);
    DMatrix::from_fn(nrows, ncols, |i, j| m.get(i).map_or(0.0, |r| r[j]))
}

/// Numerical rank with singular values compared against `tol * sigma_max`.
pub fn rank_f64(m: &[Vec<f64>], ncols: usize, tol: f64) -> usize {
    if m.is_empty() || ncols == 0 {
        return 0;
    }
    let svd = to_dmatrix(m, ncols).svd(false, false);
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return 0;
    }
    svd.singular_values
        .iter()
        .filter(|&&s| s > tol * smax)
        .count()
}

/// Right singular vectors whose singular values fall below `tol * sigma_max`.
pub fn nullspace_f64(m: &[Vec<f64>], ncols: usize, tol: f64) -> Vec<Vec<f64>> {
    let svd = to_dmatrix(m, ncols).svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.max();
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|&(_, &s)| smax == 0.0 || s <= tol * smax)
        .map(|(i, _)| v_t.row(i).iter().copied().collect())
        .collect()
}

pub fn to_f64_matrix(m: &[Vec<Scalar>]) -> Vec<Vec<f64>> {
    m.iter().map(|r| r.iter().map(to_f64).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{dot, int, ints, ratio};

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
        rows.iter().map(|r| ints(r)).collect()
    }

    #[test]
    fn rank_of_dependent_rows() {
        let m = mat(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(rank(&m), 2);
        assert_eq!(rank(&mat(&[&[0, 0], &[0, 0]])), 0);
    }

    #[test]
    fn nullspace_vectors_annihilate_rows() {
        let m = mat(&[&[1, 2, 3, 4], &[2, 3, 5, 7]]);
        let ns = nullspace(&m, 4);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for row in &m {
                assert!(dot(row, v).is_zero());
            }
        }
    }

    #[test]
    fn nullspace_with_rational_entries() {
        let m = vec![vec![ratio(1, 2), ratio(1, 3), int(0)]];
        let ns = nullspace(&m, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(dot(&m[0], v).is_zero());
        }
    }

    #[test]
    fn exact_determinant_matches_cofactor_expansion() {
        let m = vec![
            vec![ratio(1, 2), int(3), int(-1)],
            vec![int(2), ratio(-5, 3), int(4)],
            vec![int(0), int(7), ratio(1, 7)],
        ];
        assert_eq!(det_exact(&m), det(&m));
        let swapped = vec![m[1].clone(), m[0].clone(), m[2].clone()];
        assert_eq!(det_exact(&swapped), -det(&m));
    }

    #[test]
    fn float_rank_respects_tolerance() {
        let m = vec![vec![1.0, 2.0], vec![2.0, 4.0 + 1e-13]];
        assert_eq!(rank_f64(&m, 2, FLOAT_RANK_TOL), 1);
        let m = vec![vec![1.0, 2.0], vec![2.0, 5.0]];
        assert_eq!(rank_f64(&m, 2, FLOAT_RANK_TOL), 2);
        let ns = nullspace_f64(&[vec![1.0, 1.0, 0.0]], 3, FLOAT_RANK_TOL);
        assert_eq!(ns.len(), 2);
    }
}
