//! Dense complex linear algebra for operators on small Hilbert spaces.
//!
//! Row-major storage, dimensions up to a few hundred. Provides the tensor
//! operations needed for bipartite systems (Kronecker product, partial trace,
//! partial transpose), a cyclic Jacobi eigensolver for Hermitian matrices and
//! the PSD square root built on top of it.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap on any matrix dimension produced by tensor products.
pub const MAX_DIM: usize = 4096;

/// Tolerance for accepting a matrix as Hermitian (max |H - H†| entrywise).
pub const HERM_TOL: f64 = 1e-10;

/// Eigenvalues in [-PSD_CLIP, 0) are treated as exact zeros.
pub const PSD_CLIP: f64 = 1e-10;

/// Dimensions of the two tensor factors of a bipartite space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DimSplit {
    pub da: usize,
    pub db: usize,
}

impl DimSplit {
    pub fn new(da: usize, db: usize) -> Result<Self> {
        if da == 0 || db == 0 {
            return Err(Error::Dimension(format!(
                "split factors must be positive, got {da}x{db}"
            )));
        }
        Ok(Self { da, db })
    }

    /// Total dimension `da * db`.
    pub fn total(&self) -> usize {
        self.da * self.db
    }
}

impl fmt::Display for DimSplit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.da, self.db)
    }
}

/// One of the two factors of a bipartite split.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Dense complex matrix in row-major order.
#[derive(Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self.get(i, j);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::ONE);
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(
        rows: usize,
        cols: usize,
        mut f: F,
    ) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds a matrix from real entries laid out as nested rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r > 0 { rows[0].len() } else { 0 };
        Self::from_fn(r, c, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    /// Outer product `|u><v|`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m.set(i, i, z);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.data[i * self.cols + j] = z;
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Matrix product; panics on inner-dimension mismatch.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul: {}x{} times {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    /// Applies the matrix to a vector.
    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Largest entrywise absolute difference to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max entrywise deviation from Hermiticity, `max |H - H†|`.
    pub fn herm_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.herm_deviation() <= tol
    }

    /// Kronecker product. Entry `A[i,j]*B[k,l]` lands at `(i*rb+k, j*cb+l)`.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        if rows > MAX_DIM || cols > MAX_DIM {
            return Err(Error::TooLarge {
                rows,
                cols,
                max: MAX_DIM,
            });
        }
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == Complex64::ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(i * other.rows + k, j * other.cols + l, a * other.get(k, l));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Traces out one factor of a bipartite operator. `keep` selects the
    /// factor that survives; the trace of the result equals the full trace.
    pub fn partial_trace(&self, split: DimSplit, keep: Subsystem) -> Result<Self> {
        self.check_split(split)?;
        let (da, db) = (split.da, split.db);
        match keep {
            Subsystem::A => {
                let mut out = Self::zeros(da, da);
                for i in 0..da {
                    for j in 0..da {
                        let mut s = Complex64::ZERO;
                        for k in 0..db {
                            s += self.get(i * db + k, j * db + k);
                        }
                        out.set(i, j, s);
                    }
                }
                Ok(out)
            }
            Subsystem::B => {
                let mut out = Self::zeros(db, db);
                for k in 0..db {
                    for l in 0..db {
                        let mut s = Complex64::ZERO;
                        for i in 0..da {
                            s += self.get(i * db + k, i * db + l);
                        }
                        out.set(k, l, s);
                    }
                }
                Ok(out)
            }
        }
    }

    /// Transposes the chosen factor of a bipartite operator in place of the
    /// full transpose: `(T_A M)[(i,k),(j,l)] = M[(j,k),(i,l)]`.
    pub fn partial_transpose(&self, split: DimSplit, side: Subsystem) -> Result<Self> {
        self.check_split(split)?;
        let (da, db) = (split.da, split.db);
        let mut out = Self::zeros(self.rows, self.cols);
        for i in 0..da {
            for k in 0..db {
                for j in 0..da {
                    for l in 0..db {
                        let src = match side {
                            Subsystem::A => self.get(j * db + k, i * db + l),
                            Subsystem::B => self.get(i * db + l, j * db + k),
                        };
                        out.set(i * db + k, j * db + l, src);
                    }
                }
            }
        }
        Ok(out)
    }

    fn check_split(&self, split: DimSplit) -> Result<()> {
        if !self.is_square() || self.rows != split.total() {
            return Err(Error::Dimension(format!(
                "operator is {}x{}, split {} requires {}x{}",
                self.rows,
                self.cols,
                split,
                split.total(),
                split.total()
            )));
        }
        Ok(())
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
    ///
    /// Returns eigenvalues in ascending order with matching orthonormal
    /// eigenvector columns. Input must be Hermitian within [`HERM_TOL`].
    pub fn eig_hermitian(&self) -> Result<EigH> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "eig_hermitian needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let dev = self.herm_deviation();
        if dev > HERM_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let n = self.rows;
        // Work on the symmetrized copy so roundoff in the input cannot drift.
        let mut a = Self::from_fn(n, n, |i, j| (self.get(i, j) + self.get(j, i).conj()) * 0.5);
        let mut v = Self::identity(n);

        let scale = a.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let target = 1e-14 * scale.max(1e-300);
        const MAX_SWEEPS: usize = 100;

        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            let off = off_diag_norm(&a);
            if off <= target {
                converged = true;
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    jacobi_rotate(&mut a, &mut v, p, q);
                }
            }
        }
        if !converged && off_diag_norm(&a) > target {
            return Err(Error::NoConvergence(MAX_SWEEPS));
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a.get(i, i).re.total_cmp(&a.get(j, j).re));
        let values: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
        let vectors = Self::from_fn(n, n, |i, j| v.get(i, order[j]));
        Ok(EigH { values, vectors })
    }

    /// Square root of a Hermitian PSD matrix via its eigendecomposition.
    /// Eigenvalues below `-PSD_CLIP` are rejected; tiny negatives are clipped.
    pub fn psd_sqrt(&self) -> Result<Self> {
        let eig = self.eig_hermitian()?;
        if let Some(&min) = eig.values.first() {
            if min < -PSD_CLIP {
                return Err(Error::NotPsd(min));
            }
        }
        Ok(eig.reassemble(|x| x.max(0.0).sqrt()))
    }
}

/// Result of a Hermitian eigendecomposition: ascending eigenvalues and the
/// unitary whose columns are the matching eigenvectors.
#[derive(Clone, Debug)]
pub struct EigH {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl EigH {
    /// Builds `V f(Λ) V†` from the decomposition.
    pub fn reassemble<F: Fn(f64) -> f64>(&self, f: F) -> CMat {
        let n = self.values.len();
        let mut out = CMat::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors.get(i, k);
                for j in 0..n {
                    let z = vi * self.vectors.get(j, k).conj() * w;
                    let idx = i * n + j;
                    out.data[idx] += z;
                }
            }
        }
        out
    }

    /// Eigenvector column `k`.
    pub fn column(&self, k: usize) -> Vec<Complex64> {
        (0..self.vectors.rows())
            .map(|i| self.vectors.get(i, k))
            .collect()
    }
}

fn off_diag_norm(a: &CMat) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for p in 0..n {
        for q in 0..n {
            if p != q {
                s += a.get(p, q).norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One complex Jacobi rotation annihilating the (p, q) entry of Hermitian `a`,
/// accumulated into `v`.
fn jacobi_rotate(a: &mut CMat, v: &mut CMat, p: usize, q: usize) {
    let h = a.get(p, q);
    let habs = h.norm();
    if habs < 1e-300 {
        a.set(p, q, Complex64::ZERO);
        a.set(q, p, Complex64::ZERO);
        return;
    }
    let n = a.rows();
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let phase = h / habs;

    // Zero the rotated off-diagonal: (c^2 - s^2)|h| + c s (aqq - app) = 0.
    let delta = (aqq - app) / (2.0 * habs);
    let t = if delta == 0.0 {
        1.0
    } else {
        -delta.signum() / (delta.abs() + (1.0 + delta * delta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let new_pp = c * c * app + 2.0 * c * s * habs + s * s * aqq;
    let new_qq = s * s * app - 2.0 * c * s * habs + c * c * aqq;
    a.set(p, p, Complex64::new(new_pp, 0.0));
    a.set(q, q, Complex64::new(new_qq, 0.0));
    a.set(p, q, Complex64::ZERO);
    a.set(q, p, Complex64::ZERO);

    let s_conj_phase = s * phase.conj();
    let s_phase = s * phase;
    for j in 0..n {
        if j == p || j == q {
            continue;
        }
        let ajp = a.get(j, p);
        let ajq = a.get(j, q);
        let new_jp = ajp * c + ajq * s_conj_phase;
        let new_jq = -ajp * s_phase + ajq * c;
        a.set(j, p, new_jp);
        a.set(p, j, new_jp.conj());
        a.set(j, q, new_jq);
        a.set(q, j, new_jq.conj());
    }
    for j in 0..n {
        let vjp = v.get(j, p);
        let vjq = v.get(j, q);
        v.set(j, p, vjp * c + vjq * s_conj_phase);
        v.set(j, q, -vjp * s_phase + vjq * c);
    }
}

impl Add for &CMat {
    type Output = CMat;
    fn add(self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CMat {
    type Output = CMat;
    fn sub(self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &CMat {
    type Output = CMat;
    fn mul(self, rhs: &CMat) -> CMat {
        self.matmul(rhs)
    }
}
