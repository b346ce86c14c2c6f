// Copyright 2026 The ghzdist developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Dense complex matrices sized for state spaces of at most a dozen qubits.
//!
//! Everything here is deliberately plain: row-major storage, textbook
//! algorithms, no sparsity. The Hermitian eigensolver is a cyclic complex
//! Jacobi iteration, which is accurate and deterministic on the small
//! matrices this crate works with.

use std::fmt;
use std::ops::{Index, IndexMut};

pub use num_complex::Complex64 as C64;

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> C64>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut m = CMatrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Rank-one projector |v><v| of a unit (or arbitrary) vector.
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        CMatrix::from_fn(n, n, |r, c| v[r] * v[c].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    out[(r, c)] += a * other[(k, c)];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a += *b;
        }
        out
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a -= *b;
        }
        out
    }

    pub fn scale(&self, factor: C64) -> CMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= factor;
        }
        out
    }

    pub fn add_scaled_assign(&mut self, factor: C64, other: &CMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += factor * *b;
        }
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Re tr(A B); exact real trace for Hermitian A, B.
    pub fn re_trace_product(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = 0.0;
        for r in 0..self.rows {
            for c in 0..self.cols {
                let prod = self[(r, c)] * other[(c, r)];
                acc += prod.re;
            }
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian_within(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        for r in 0..self.rows {
            for c in r..self.cols {
                let d = self[(r, c)] - self[(c, r)].conj();
                if d.norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// (A + A†)/2, used to wash out roundoff drift on Hermitian iterates.
    pub fn hermitize(&self) -> CMatrix {
        assert!(self.is_square());
        CMatrix::from_fn(self.rows, self.cols, |r, c| {
            (self[(r, c)] + self[(c, r)].conj()) * 0.5
        })
    }

    fn jacobi(&self, want_vectors: bool) -> (Vec<f64>, Option<CMatrix>) {
        assert!(self.is_square(), "eigh requires a square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut v = want_vectors.then(|| CMatrix::identity(n));
        let scale = 1.0 + self.frobenius_norm();
        let target = 1e-14 * scale;

        for _sweep in 0..64 {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[(p, q)].norm_sqr();
                }
            }
            if (2.0 * off).sqrt() <= target {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    let abs_apq = apq.norm();
                    if abs_apq <= 1e-300 {
                        continue;
                    }
                    let phase = apq / abs_apq;
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let tau = (aqq - app) / (2.0 * abs_apq);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    let s_phase = phase * s;

                    // A <- R† A R with R the (p,q) plane rotation.
                    for r in 0..n {
                        let arp = a[(r, p)];
                        let arq = a[(r, q)];
                        a[(r, p)] = arp * c - arq * s_phase.conj();
                        a[(r, q)] = arp * s_phase + arq * c;
                    }
                    for r in 0..n {
                        let apr = a[(p, r)];
                        let aqr = a[(q, r)];
                        a[(p, r)] = apr * c - aqr * s_phase;
                        a[(q, r)] = apr * s_phase.conj() + aqr * c;
                    }
                    // Known closed forms keep the pivots exactly real/zero.
                    a[(p, p)] = C64::new(app - t * abs_apq, 0.0);
                    a[(q, q)] = C64::new(aqq + t * abs_apq, 0.0);
                    a[(p, q)] = C64::new(0.0, 0.0);
                    a[(q, p)] = C64::new(0.0, 0.0);

                    if let Some(v) = v.as_mut() {
                        for r in 0..n {
                            let vrp = v[(r, p)];
                            let vrq = v[(r, q)];
                            v[(r, p)] = vrp * c - vrq * s_phase.conj();
                            v[(r, q)] = vrp * s_phase + vrq * c;
                        }
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
        let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
        let vectors = v.map(|v| CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]));
        (eigenvalues, vectors)
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
    /// rotations. Returns eigenvalues in ascending order and the matching
    /// unitary of eigenvector columns, so that `A = V diag(w) V†`.
    pub fn eigh(&self) -> (Vec<f64>, CMatrix) {
        let (w, v) = self.jacobi(true);
        (w, v.expect("vectors requested"))
    }

    /// Eigenvalues only, ascending.
    pub fn eigvalsh(&self) -> Vec<f64> {
        self.jacobi(false).0
    }

    /// Cholesky factor L (lower triangular, LL† = A) of a Hermitian
    /// positive definite matrix; `None` if the matrix is not numerically
    /// positive definite.
    pub fn cholesky(&self) -> Option<CMatrix> {
        assert!(self.is_square());
        let n = self.rows;
        let mut l = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            // NaN also falls through here.
            if d <= 0.0 || !d.is_finite() {
                return None;
            }
            let ljj = d.sqrt();
            l[(j, j)] = C64::new(ljj, 0.0);
            for i in (j + 1)..n {
                let mut sum = self[(i, j)];
                for k in 0..j {
                    sum -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = sum / ljj;
            }
        }
        Some(l)
    }

    /// Solve L y = b with L lower triangular (in-place on a copy).
    pub fn solve_lower(&self, b: &[C64]) -> Vec<C64> {
        let n = self.rows;
        assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                let lik = self[(i, k)];
                y[i] = y[i] - lik * y[k];
            }
            y[i] /= self[(i, i)];
        }
        y
    }

    /// Solve L† x = y with L lower triangular.
    pub fn solve_lower_adjoint(&self, y: &[C64]) -> Vec<C64> {
        let n = self.rows;
        assert_eq!(y.len(), n);
        let mut x = y.to_vec();
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let lki = self[(k, i)].conj();
                x[i] = x[i] - lki * x[k];
            }
            x[i] /= self[(i, i)].conj();
        }
        x
    }

    /// A⁻¹ for Hermitian positive definite A, via Cholesky.
    pub fn cholesky_inverse(&self) -> Option<CMatrix> {
        let l = self.cholesky()?;
        let n = self.rows;
        let mut inv = CMatrix::zeros(n, n);
        let mut e = vec![C64::new(0.0, 0.0); n];
        for c in 0..n {
            e.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            e[c] = C64::new(1.0, 0.0);
            let y = l.solve_lower(&e);
            let x = l.solve_lower_adjoint(&y);
            for r in 0..n {
                inv[(r, c)] = x[r];
            }
        }
        Some(inv.hermitize())
    }

    /// L⁻¹ H L⁻† for a lower-triangular L and Hermitian H. Used for
    /// cone step lengths: X + α dX ⪰ 0 iff I + α L⁻¹ dX L⁻† ⪰ 0.
    pub fn two_sided_lower_solve(l: &CMatrix, h: &CMatrix) -> CMatrix {
        let n = l.rows;
        assert_eq!(h.rows, n);
        // Y = L⁻¹ H, column by column.
        let mut y = CMatrix::zeros(n, n);
        let mut col = vec![C64::new(0.0, 0.0); n];
        for c in 0..n {
            for r in 0..n {
                col[r] = h[(r, c)];
            }
            let solved = l.solve_lower(&col);
            for r in 0..n {
                y[(r, c)] = solved[r];
            }
        }
        // Z = Y L⁻† = (L⁻¹ Y†)†.
        let yadj = y.adjoint();
        let mut z = CMatrix::zeros(n, n);
        for c in 0..n {
            for r in 0..n {
                col[r] = yadj[(r, c)];
            }
            let solved = l.solve_lower(&col);
            for r in 0..n {
                z[(r, c)] = solved[r];
            }
        }
        z.adjoint().hermitize()
    }
}
