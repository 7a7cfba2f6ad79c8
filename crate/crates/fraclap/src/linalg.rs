//! Minimal dense linear algebra: row-major matrices, a partial-pivot LU solve
//! for the bordered Newton systems, and a cyclic Jacobi eigensolver.
//!
//! The Jacobi route exists on purpose as an audit path: the discretized
//! nonlocal operator is checked for spectral completeness with an eigensolver
//! that shares no code with the Fourier diagonalization it is auditing.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Debug)]
pub struct Mat {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Mat { n_rows, n_cols, data: vec![0.0; n_rows * n_cols] }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n_cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n_cols + j] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n_cols + j] += v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_cols);
        let mut y = vec![0.0; self.n_rows];
        for i in 0..self.n_rows {
            let row = &self.data[i * self.n_cols..(i + 1) * self.n_cols];
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            y[i] = acc;
        }
        y
    }

    /// Largest absolute asymmetry |A_ij − A_ji|; the eigensolver below demands
    /// this be negligible.
    pub fn asymmetry(&self) -> f64 {
        assert_eq!(self.n_rows, self.n_cols);
        let mut worst: f64 = 0.0;
        for i in 0..self.n_rows {
            for j in (i + 1)..self.n_cols {
                worst = worst.max(libm::fabs(self.at(i, j) - self.at(j, i)));
            }
        }
        worst
    }
}

/// Solve A x = b by LU with partial pivoting, consuming A. Returns `None` when
/// a pivot collapses below `tiny` — the caller treats that as a singular
/// Jacobian and backs off.
pub fn lu_solve(mut a: Mat, mut b: Vec<f64>) -> Option<Vec<f64>> {
    assert_eq!(a.n_rows, a.n_cols);
    assert_eq!(b.len(), a.n_rows);
    let n = a.n_rows;
    let tiny = 1e-300;
    let mut perm: Vec<usize> = (0..n).collect();

    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = libm::fabs(a.at(col, col));
        for r in (col + 1)..n {
            let v = libm::fabs(a.at(r, col));
            if v > pivot_val {
                pivot_val = v;
                pivot_row = r;
            }
        }
        if pivot_val < tiny {
            return None;
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = a.at(col, j);
                a.set(col, j, a.at(pivot_row, j));
                a.set(pivot_row, j, tmp);
            }
            b.swap(col, pivot_row);
            perm.swap(col, pivot_row);
        }
        let inv_pivot = 1.0 / a.at(col, col);
        for r in (col + 1)..n {
            let factor = a.at(r, col) * inv_pivot;
            if factor == 0.0 {
                continue;
            }
            a.set(r, col, factor);
            for j in (col + 1)..n {
                a.add_to(r, j, -factor * a.at(col, j));
            }
            b[r] -= factor * b[col];
        }
    }

    // Back substitution.
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = b[i];
        for j in (i + 1)..n {
            acc -= a.at(i, j) * x[j];
        }
        x[i] = acc / a.at(i, i);
    }
    Some(x)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
///
/// Convergence is quadratic once the off-diagonal mass is small; the sweep cap
/// is generous because the audit matrices are at most a few hundred rows.
pub fn symmetric_eigenvalues(a: &Mat) -> Vec<f64> {
    assert_eq!(a.n_rows, a.n_cols);
    assert!(
        a.asymmetry() <= 1e-9 * matrix_scale(a).max(1.0),
        "jacobi eigensolve fed a non-symmetric matrix"
    );
    let n = a.n_rows;
    let mut m = a.clone();
    // Symmetrize exactly so rotations preserve symmetry to rounding.
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m.at(i, j) + m.at(j, i));
            m.set(i, j, avg);
            m.set(j, i, avg);
        }
    }

    let scale = matrix_scale(&m).max(1e-300);
    for _sweep in 0..60 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m.at(i, j) * m.at(i, j);
            }
        }
        if libm::sqrt(off) <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.at(p, q);
                if libm::fabs(apq) <= 1e-300 {
                    continue;
                }
                let app = m.at(p, p);
                let aqq = m.at(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                // Stable rotation: t = sign(theta)/(|theta| + sqrt(theta^2+1)).
                let t = if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(theta * theta + 1.0))
                } else {
                    -1.0 / (-theta + libm::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = m.at(k, p);
                    let akq = m.at(k, q);
                    m.set(k, p, c * akp - s * akq);
                    m.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = m.at(p, k);
                    let aqk = m.at(q, k);
                    m.set(p, k, c * apk - s * aqk);
                    m.set(q, k, s * apk + c * aqk);
                }
            }
        }
    }

    let mut eigs: Vec<f64> = (0..n).map(|i| m.at(i, i)).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalue NaN"));
    eigs
}

fn matrix_scale(a: &Mat) -> f64 {
    let mut s: f64 = 0.0;
    for i in 0..a.n_rows {
        s = s.max(libm::fabs(a.at(i, i)));
    }
    s
}
