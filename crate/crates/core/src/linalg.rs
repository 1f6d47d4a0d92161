//! Small exact and floating linear algebra helpers.
//!
//! The classification machinery works over exact rationals (ranks and
//! kernels must not wobble), while group parameters live in `f64`.  Exact
//! reduction uses full pivoting on `BigRational`; the float variants take an
//! explicit tolerance.

use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, One, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Reduced row echelon form in place; returns the rank.
pub fn rref(rows: &mut Vec<Vec<Rat>>) -> usize {
    let nrows = rows.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = rows[0].len();
    let mut pivot_row = 0;
    for col in 0..ncols {
        let Some(sel) = (pivot_row..nrows).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(pivot_row, sel);
        let inv = rows[pivot_row][col].clone();
        for c in col..ncols {
            let v = rows[pivot_row][c].clone() / inv.clone();
            rows[pivot_row][c] = v;
        }
        for r in 0..nrows {
            if r != pivot_row && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in col..ncols {
                    let v = rows[r][c].clone() - factor.clone() * rows[pivot_row][c].clone();
                    rows[r][c] = v;
                }
            }
        }
        pivot_row += 1;
        if pivot_row == nrows {
            break;
        }
    }
    pivot_row
}

pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    rref(&mut m)
}

/// Is `v` in the row span of `basis`?
pub fn in_span(basis: &[Vec<Rat>], v: &[Rat]) -> bool {
    let r0 = rank(basis);
    let mut m: Vec<Vec<Rat>> = basis.to_vec();
    m.push(v.to_vec());
    rank(&m) == r0
}

/// Mutual-containment span equality over exact rationals.
pub fn span_eq(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> bool {
    a.iter().all(|v| in_span(b, v)) && b.iter().all(|v| in_span(a, v))
}

/// Basis of the null space of the matrix (solutions of A x = 0).
pub fn kernel(rows: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let ncols = rows[0].len();
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    rref(&mut m);
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row < m.len() && m[row][col].is_one() && pivot_cols.len() == row {
            // candidate pivot: confirm the column is elementary below
            let is_pivot = m.iter().enumerate().all(|(r, mr)| {
                if r == row {
                    mr[col].is_one()
                } else {
                    mr[col].is_zero()
                }
            });
            if is_pivot {
                pivot_cols.push(col);
                row += 1;
                continue;
            }
        }
    }
    let free_cols: Vec<usize> = (0..ncols).filter(|c| !pivot_cols.contains(c)).collect();
    let mut basis = Vec::with_capacity(free_cols.len());
    for &fc in &free_cols {
        let mut v = vec![Rat::zero(); ncols];
        v[fc] = Rat::one();
        for (r, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -m[r][fc].clone();
        }
        basis.push(v);
    }
    basis
}

/// Rank of a float matrix by Gaussian elimination with partial pivoting.
pub fn rank_f64(rows: &[Vec<f64>], tol: f64) -> usize {
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let nrows = m.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = m[0].len();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(sel) = (rank..nrows).max_by(|&a, &b| {
            m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap()
        }) else {
            break;
        };
        if m[sel][col].abs() <= tol {
            continue;
        }
        m.swap(rank, sel);
        let piv = m[rank][col];
        for r in 0..nrows {
            if r != rank {
                let f = m[r][col] / piv;
                for c in col..ncols {
                    m[r][c] -= f * m[rank][c];
                }
            }
        }
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

/// Mutual span equality for float row sets, threshold on augmented ranks.
pub fn span_eq_f64(a: &[Vec<f64>], b: &[Vec<f64>], tol: f64) -> bool {
    let normalize = |rows: &[Vec<f64>]| -> Vec<Vec<f64>> {
        rows.iter()
            .map(|r| {
                let n = r.iter().map(|x| x * x).sum::<f64>().sqrt();
                if n > 0.0 {
                    r.iter().map(|x| x / n).collect()
                } else {
                    r.clone()
                }
            })
            .collect()
    };
    let an = normalize(a);
    let bn = normalize(b);
    let ra = rank_f64(&an, tol);
    let rb = rank_f64(&bn, tol);
    if ra != rb {
        return false;
    }
    let mut joint = an;
    joint.extend(bn);
    rank_f64(&joint, tol) == ra
}

/// Smallest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
pub fn min_eigenvalue_symmetric(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for _sweep in 0..60 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += m[p][q] * m[p][q];
            }
        }
        if off.sqrt() < 1e-14 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i][i]).fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_rank_kernel() {
        let rows = vec![
            vec![rat_int(1), rat_int(2), rat_int(3)],
            vec![rat_int(2), rat_int(4), rat_int(6)],
            vec![rat_int(0), rat_int(1), rat_int(1)],
        ];
        assert_eq!(rank(&rows), 2);
        let k = kernel(&rows);
        assert_eq!(k.len(), 1);
        // kernel vector satisfies all equations
        for row in &rows {
            let dot: Rat = row.iter().zip(&k[0]).map(|(a, b)| a * b).sum();
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn span_equality() {
        let a = vec![vec![rat_int(1), rat_int(0)], vec![rat_int(0), rat_int(1)]];
        let b = vec![vec![rat_int(1), rat_int(1)], vec![rat_int(1), rat_int(-1)]];
        assert!(span_eq(&a, &b));
        let c = vec![vec![rat_int(1), rat_int(1)]];
        assert!(!span_eq(&a, &c));
        assert!(in_span(&a, &c[0]));
    }

    #[test]
    fn jacobi_eigen_small() {
        // eigenvalues of [[2,1],[1,2]] are 1 and 3
        let m = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        let min = min_eigenvalue_symmetric(&m);
        assert!((min - 1.0).abs() < 1e-10);
    }
}
