//! Dense complex linear algebra used by every other module.
//!
//! Matrices are stored row-major. Tensor products follow the "first factor
//! slowest" convention: the row index of `kron(a, b)` is `i * b.rows + k`
//! where `i` indexes `a` and `k` indexes `b`. Vectorization is row-major as
//! well, so `vec(x)[i * cols + j] = x[(i, j)]`.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative Hermiticity tolerance accepted by the eigensolver.
pub const HERMITIAN_TOL: f64 = 1e-8;

/// Scale-aware PSD threshold: `min_eig >= -PSD_TOL * max(1, ||A||_F)`.
pub const PSD_TOL: f64 = 1e-9;

/// Dense complex matrix, row-major.
///
/// Serialized as `{"rows", "cols", "data": [[re, im], ...]}`; deserialization
/// validates the entry count and rejects non-finite entries.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

#[derive(Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl TryFrom<RawMatrix> for ComplexMatrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        Self::from_vec(raw.rows, raw.cols, raw.data)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major data, rejecting wrong lengths and non-finite entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Column vector from its entries.
    pub fn column(v: &[Complex64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// Matrix unit `E_ij` of size `n x n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = ONE;
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    /// Row-major vectorization as a column vector.
    pub fn vectorize(&self) -> ComplexMatrix {
        Self {
            rows: self.rows * self.cols,
            cols: 1,
            data: self.data.clone(),
        }
    }

    /// Inverse of [`vectorize`](Self::vectorize).
    pub fn reshape(&self, rows: usize, cols: usize) -> Result<ComplexMatrix> {
        if rows * cols != self.data.len() {
            return Err(Error::DimensionMismatch(format!(
                "cannot reshape {} entries into {rows}x{cols}",
                self.data.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            data: self.data.clone(),
        })
    }

    pub fn col(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[Complex64]) {
        for (i, &z) in v.iter().enumerate() {
            self[(i, j)] = z;
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `||A - A*||_F`.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                s += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        s.sqrt()
    }

    /// Hermitian part `(A + A*)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "matmul {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(self.mul_unchecked(rhs))
    }

    fn mul_unchecked(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &a) in row.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Matrix-vector product with a plain slice.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols, "apply: dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `<v, A v>` for a square matrix.
    pub fn quadratic_form(&self, v: &[Complex64]) -> Complex64 {
        inner(v, &self.apply(v))
    }

    /// Block `(bi, bj)` when the matrix is viewed as a `blocks x blocks` grid of equal squares.
    pub fn block(&self, blocks: usize, bi: usize, bj: usize) -> ComplexMatrix {
        let s = self.rows / blocks;
        Self::from_fn(s, s, |i, j| self[(bi * s + i, bj * s + j)])
    }

    pub fn approx_eq(&self, other: &ComplexMatrix, tol: f64) -> bool {
        self.shape() == other.shape() && (self - other).frobenius_norm() <= tol
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }

    /// Matrix with i.i.d. standard complex Gaussian entries (variance 1 per entry).
    pub fn random_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        Self::from_fn(rows, cols, |_, _| complex_normal(rng))
    }

    /// Random Hermitian matrix (GUE-like, unnormalized).
    pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self::random_gaussian(n, n, rng).hermitian_part()
    }

    /// Random PSD matrix `G G* / tr` of the given rank, normalized to unit trace.
    pub fn random_psd<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> Self {
        let g = Self::random_gaussian(n, rank.max(1), rng);
        let p = &g * &g.adjoint();
        let t = p.trace().re;
        p.scale_real(1.0 / t)
    }
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..n).map(|_| complex_normal(rng)).collect();
    normalize(&mut v);
    v
}

/// `<a, b>` conjugate-linear in the first slot.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Normalizes in place; returns the original norm.
pub fn normalize(v: &mut [Complex64]) -> f64 {
    let n = norm(v);
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
    n
}

/// Kronecker product of two vectors (first factor slowest).
pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

macro_rules! elementwise {
    ($tr:ident, $f:ident, $op:tt) => {
        impl $tr<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $f(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                assert_eq!(self.shape(), rhs.shape(), "shape mismatch");
                ComplexMatrix {
                    rows: self.rows,
                    cols: self.cols,
                    data: self.data.iter().zip(&rhs.data).map(|(a, b)| a $op b).collect(),
                }
            }
        }
        impl $tr<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $f(self, rhs: ComplexMatrix) -> ComplexMatrix {
                (&self).$f(&rhs)
            }
        }
    };
}

elementwise!(Add, add, +);
elementwise!(Sub, sub, -);

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

/// Panics on shape mismatch; use [`ComplexMatrix::matmul`] for a checked product.
impl Mul<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        self.mul_unchecked(rhs)
    }
}

impl Mul<ComplexMatrix> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        &self * &rhs
    }
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermEig {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl HermEig {
    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.col(k)
    }

    /// `V f(Λ) V*`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * fl[k] * v[(j, k)].conj())
                .sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|l| l)
    }
}

fn check_hermitian(a: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotSquare(a.rows(), a.cols()));
    }
    let defect = a.hermitian_defect();
    if defect > HERMITIAN_TOL * a.frobenius_norm().max(f64::MIN_POSITIVE) && defect > 0.0 {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues come out ascending. Each eigenvector is rephased so that its
/// largest-magnitude component (first one on ties) is real and positive, which
/// makes the output a deterministic function of the input.
pub fn herm_eig(a: &ComplexMatrix) -> Result<HermEig> {
    check_hermitian(a)?;
    let n = a.rows();
    // Exact symmetrization removes the rounding-level anti-Hermitian part.
    let eig = SymmetricEigen::new(a.hermitian_part().to_nalgebra());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]).then(x.cmp(&y)));

    let mut eigenvalues = Vec::with_capacity(n);
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvalues.push(eig.eigenvalues[src]);
        let mut col: Vec<Complex64> = eig.eigenvectors.column(src).iter().copied().collect();
        fix_phase(&mut col);
        vectors.set_col(dst, &col);
    }
    Ok(HermEig {
        eigenvalues,
        eigenvectors: vectors,
    })
}

fn fix_phase(v: &mut [Complex64]) {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, z) in v.iter().enumerate() {
        // Ties within rounding go to the earliest index.
        if z.norm() > best_abs * (1.0 + 1e-12) {
            best_abs = z.norm();
            best = i;
        }
    }
    if best_abs <= 0.0 {
        return;
    }
    let phase = v[best].conj() / v[best].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
    v[best] = Complex64::new(v[best].re, 0.0);
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn psd_min_eig(a: &ComplexMatrix) -> Result<f64> {
    Ok(herm_eig(a)?.eigenvalues[0])
}

/// Threshold below which a minimum eigenvalue counts as a genuine negative.
pub fn psd_threshold(a: &ComplexMatrix) -> f64 {
    -PSD_TOL * a.frobenius_norm().max(1.0)
}

pub fn is_psd(a: &ComplexMatrix) -> Result<bool> {
    Ok(psd_min_eig(a)? >= psd_threshold(a))
}

/// `A^beta` for PSD `A`, computed spectrally.
///
/// Eigenvalues in `[-tol, 0)` are clamped to zero. Negative powers need a
/// strictly positive spectrum.
pub fn frac_power(a: &ComplexMatrix, beta: f64) -> Result<ComplexMatrix> {
    let eig = herm_eig(a)?;
    let min = eig.eigenvalues[0];
    if min < psd_threshold(a) {
        return Err(Error::NotPsd(min));
    }
    if beta < 0.0 {
        let max = eig.eigenvalues.last().copied().unwrap_or(0.0).abs();
        if min <= 1e-12 * max.max(f64::MIN_POSITIVE) {
            return Err(Error::SingularForNegativePower(min));
        }
    }
    Ok(eig.map_spectrum(|l| {
        let l = l.max(0.0);
        if beta == 0.0 {
            1.0
        } else {
            l.powf(beta)
        }
    }))
}

/// Kronecker product with `(i,k),(j,l) -> a[i,j] * b[k,l]` and `a` the slow factor.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    ComplexMatrix::from_fn(ar * br, ac * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

/// Tensor factor acted on by [`partial_transpose`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    First,
    Second,
}

/// Transposes the indices of one tensor factor of an operator on `C^dim_a ⊗ C^dim_b`.
pub fn partial_transpose(
    h: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    side: Side,
) -> Result<ComplexMatrix> {
    let n = dim_a * dim_b;
    if h.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "partial transpose of {}x{} over {dim_a}x{dim_b}",
            h.rows(),
            h.cols()
        )));
    }
    Ok(ComplexMatrix::from_fn(n, n, |r, c| {
        let (i, k) = (r / dim_b, r % dim_b);
        let (j, l) = (c / dim_b, c % dim_b);
        match side {
            Side::First => h[(j * dim_b + k, i * dim_b + l)],
            Side::Second => h[(i * dim_b + l, j * dim_b + k)],
        }
    }))
}

/// Hilbert–Schmidt inner product `Tr(A* B)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch(format!(
            "hs_inner {:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(inner(a.as_slice(), b.as_slice()))
}

/// Orthonormal `dim x rank` isometry drawn from the Haar measure (QR of a Gaussian).
pub fn haar_isometry<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Result<ComplexMatrix> {
    if rank == 0 || rank > dim {
        return Err(Error::RankOutOfRange { rank, dim });
    }
    let g = ComplexMatrix::random_gaussian(dim, rank, rng);
    Ok(orthonormalize_columns(&g).0)
}

/// Modified Gram–Schmidt. Returns the orthonormalized columns and how many
/// columns were numerically dependent (those are replaced by basis completions).
pub fn orthonormalize_columns(g: &ComplexMatrix) -> (ComplexMatrix, usize) {
    let (n, k) = g.shape();
    let mut q = ComplexMatrix::zeros(n, k);
    let mut deficient = 0;
    let mut filler = 0;
    for j in 0..k {
        let mut v = g.col(j);
        for _pass in 0..2 {
            for p in 0..j {
                let qp = q.col(p);
                let c = inner(&qp, &v);
                for (x, y) in v.iter_mut().zip(&qp) {
                    *x -= c * y;
                }
            }
        }
        let col_norm = norm(&g.col(j));
        if norm(&v) <= 1e-10 * col_norm.max(1e-300) {
            deficient += 1;
            // Complete with the first standard basis vector not in the span.
            loop {
                let mut e = vec![ZERO; n];
                e[filler % n] = ONE;
                filler += 1;
                for p in 0..j {
                    let qp = q.col(p);
                    let c = inner(&qp, &e);
                    for (x, y) in e.iter_mut().zip(&qp) {
                        *x -= c * y;
                    }
                }
                if norm(&e) > 1e-6 {
                    v = e;
                    break;
                }
            }
        }
        normalize(&mut v);
        q.set_col(j, &v);
    }
    (q, deficient)
}

/// Rank-`rank` orthogonal projection on `C^dim`, Haar-distributed, deterministic per rng state.
pub fn haar_projection<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Result<ComplexMatrix> {
    if rank == dim {
        if rank == 0 {
            return Err(Error::RankOutOfRange { rank, dim });
        }
        return Ok(ComplexMatrix::identity(dim));
    }
    let w = haar_isometry(dim, rank, rng)?;
    Ok(&w * &w.adjoint())
}
