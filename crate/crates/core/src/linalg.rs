//! Fixed-capacity complex vectors and matrices for systems of up to four
//! levels, and a cyclic Jacobi eigensolver for Hermitian matrices.
//!
//! Everything lives on the stack; `dim` records how many leading rows and
//! columns are in use. Entries outside the active block are kept at zero.

use core::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::math;

pub type C64 = Complex64;

pub const MAX_DIM: usize = 4;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Complex column vector with `dim ≤ 4` active entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CVec {
    pub dim: usize,
    pub data: [C64; MAX_DIM],
}

impl CVec {
    pub fn zeros(dim: usize) -> Self {
        debug_assert!(dim <= MAX_DIM);
        Self {
            dim,
            data: [ZERO; MAX_DIM],
        }
    }

    /// Unit vector along bare state `k` (zero-based).
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[k] = C64::new(1.0, 0.0);
        v
    }

    pub fn from_slice(values: &[C64]) -> Self {
        let mut v = Self::zeros(values.len());
        v.data[..values.len()].copy_from_slice(values);
        v
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data[..self.dim]
    }

    /// ⟨self|other⟩, conjugate-linear in `self`.
    pub fn inner(&self, other: &CVec) -> C64 {
        let mut acc = ZERO;
        for k in 0..self.dim {
            acc += self.data[k].conj() * other.data[k];
        }
        acc
    }

    pub fn norm_sqr(&self) -> f64 {
        self.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        math::sqrt(self.norm_sqr())
    }

    pub fn scale(&self, s: C64) -> CVec {
        let mut out = *self;
        for z in out.data[..self.dim].iter_mut() {
            *z *= s;
        }
        out
    }

    /// `self + s·other`
    pub fn axpy(&self, s: C64, other: &CVec) -> CVec {
        let mut out = *self;
        for k in 0..self.dim {
            out.data[k] += s * other.data[k];
        }
        out
    }
}

impl Index<usize> for CVec {
    type Output = C64;
    fn index(&self, k: usize) -> &C64 {
        &self.data[k]
    }
}

impl IndexMut<usize> for CVec {
    fn index_mut(&mut self, k: usize) -> &mut C64 {
        &mut self.data[k]
    }
}

/// Complex square matrix with `dim ≤ 4` active rows and columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMat {
    pub dim: usize,
    pub data: [[C64; MAX_DIM]; MAX_DIM],
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        debug_assert!(dim <= MAX_DIM);
        Self {
            dim,
            data: [[ZERO; MAX_DIM]; MAX_DIM],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m.data[k][k] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let mut m = Self::zeros(rows.len());
        for (i, row) in rows.iter().enumerate() {
            debug_assert_eq!(row.len(), rows.len());
            m.data[i][..row.len()].copy_from_slice(row);
        }
        m
    }

    pub fn from_real(rows: &[&[f64]]) -> Self {
        let mut m = Self::zeros(rows.len());
        for (i, row) in rows.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                m.data[i][j] = C64::new(x, 0.0);
            }
        }
        m
    }

    pub fn adjoint(&self) -> CMat {
        let mut out = CMat::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.data[i][j] = self.data[j][i].conj();
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &CVec) -> CVec {
        let mut out = CVec::zeros(self.dim);
        for i in 0..self.dim {
            let mut acc = ZERO;
            for j in 0..self.dim {
                acc += self.data[i][j] * v.data[j];
            }
            out.data[i] = acc;
        }
        out
    }

    pub fn mul_mat(&self, other: &CMat) -> CMat {
        let mut out = CMat::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut acc = ZERO;
                for k in 0..self.dim {
                    acc += self.data[i][k] * other.data[k][j];
                }
                out.data[i][j] = acc;
            }
        }
        out
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        let mut out = *self;
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.data[i][j] -= other.data[i][j];
            }
        }
        out
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                m = m.max(self.data[i][j].norm());
            }
        }
        m
    }

    /// `max |H − H†|` over entries.
    pub fn hermiticity_defect(&self) -> f64 {
        self.sub(&self.adjoint()).max_abs()
    }

    pub fn column(&self, j: usize) -> CVec {
        let mut v = CVec::zeros(self.dim);
        for i in 0..self.dim {
            v.data[i] = self.data[i][j];
        }
        v
    }

    pub fn set_column(&mut self, j: usize, v: &CVec) {
        for i in 0..self.dim {
            self.data[i][j] = v.data[i];
        }
    }

    /// `⟨u|self|v⟩`
    pub fn sandwich(&self, u: &CVec, v: &CVec) -> C64 {
        u.inner(&self.mul_vec(v))
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i][j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i][j]
    }
}

/// Eigen-decomposition of a Hermitian matrix: `values[k]` belongs to
/// column `k` of `vectors`. Values are sorted ascending.
#[derive(Debug, Clone, Copy)]
pub struct Eigen {
    pub values: [f64; MAX_DIM],
    pub vectors: CMat,
}

impl Eigen {
    pub fn dim(&self) -> usize {
        self.vectors.dim
    }

    pub fn vector(&self, k: usize) -> CVec {
        self.vectors.column(k)
    }
}

/// Cyclic complex Jacobi sweeps. Only the Hermitian part of `h` is used
/// (entries below the diagonal are taken as the conjugates of those above).
pub fn eigh(h: &CMat) -> Eigen {
    let n = h.dim;
    let mut a = *h;
    for i in 0..n {
        a.data[i][i] = C64::new(a.data[i][i].re, 0.0);
        for j in (i + 1)..n {
            a.data[j][i] = a.data[i][j].conj();
        }
    }
    let mut v = CMat::identity(n);
    let scale = a.max_abs().max(f64::MIN_POSITIVE);

    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a.data[i][j].norm_sqr();
            }
        }
        if math::sqrt(off) <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.data[p][q];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let app = a.data[p][p].re;
                let aqq = a.data[q][q].re;
                // Phase-rotate so the (p,q) entry is real, then a real Jacobi rotation.
                let phase = apq / mag;
                let theta = 0.5 * (aqq - app) / mag;
                let t = {
                    let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sgn / (theta.abs() + math::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / math::sqrt(t * t + 1.0);
                let s = t * c;
                // Unitary J acting on columns p,q:
                //   col_p' = c·col_p − s·conj(phase)·col_q
                //   col_q' = s·phase·col_p + c·col_q
                let sp = phase * s;
                let spc = sp.conj();
                for k in 0..n {
                    let akp = a.data[k][p];
                    let akq = a.data[k][q];
                    a.data[k][p] = akp * c - akq * spc;
                    a.data[k][q] = akp * sp + akq * c;
                }
                for k in 0..n {
                    let apk = a.data[p][k];
                    let aqk = a.data[q][k];
                    a.data[p][k] = apk * c - aqk * sp;
                    a.data[q][k] = apk * spc + aqk * c;
                }
                a.data[p][q] = ZERO;
                a.data[q][p] = ZERO;
                a.data[p][p] = C64::new(a.data[p][p].re, 0.0);
                a.data[q][q] = C64::new(a.data[q][q].re, 0.0);
                for k in 0..n {
                    let vkp = v.data[k][p];
                    let vkq = v.data[k][q];
                    v.data[k][p] = vkp * c - vkq * spc;
                    v.data[k][q] = vkp * sp + vkq * c;
                }
            }
        }
    }

    let mut order = [0usize, 1, 2, 3];
    let diag: [f64; MAX_DIM] = core::array::from_fn(|k| if k < n { a.data[k][k].re } else { 0.0 });
    order[..n].sort_by(|&x, &y| diag[x].total_cmp(&diag[y]));
    let mut values = [0.0; MAX_DIM];
    let mut vectors = CMat::zeros(n);
    for (dst, &src) in order[..n].iter().enumerate() {
        values[dst] = diag[src];
        vectors.set_column(dst, &v.column(src));
    }
    Eigen { values, vectors }
}
