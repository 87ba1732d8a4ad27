//! Numeric containers shared by every module, plus the CSV reader/writer.

use std::io::{Read, Write};
use std::ops::{Deref, Index};

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// An `n × p` data matrix, one observation per row. Entries are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T> {
    n: usize,
    p: usize,
    values: Vec<T>,
}

impl<T: Scalar> Sample<T> {
    /// Builds a sample from a row-major buffer of length `n * p`.
    pub fn from_flat(n: usize, p: usize, values: Vec<T>) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(Error::EmptyInput);
        }
        if values.len() != n * p {
            return Err(Error::DimensionMismatch { expected: n * p, found: values.len() });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEntry { row: k / p, col: k % p });
        }
        Ok(Self { n, p, values })
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        validate_sample(rows)
    }

    /// Skips validation; callers guarantee shape and finiteness.
    pub(crate) fn from_flat_unchecked(n: usize, p: usize, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), n * p);
        Self { n, p, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, T> {
        self.values.chunks_exact(self.p)
    }

    pub fn as_flat(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.p + j]
    }

    pub fn mean(&self) -> Vector<T> {
        let mut m = vec![T::zero(); self.p];
        for row in self.rows() {
            for (acc, &x) in m.iter_mut().zip(row) {
                *acc += x;
            }
        }
        let inv = T::one() / T::of_usize(self.n);
        m.iter_mut().for_each(|v| *v *= inv);
        Vector(m)
    }

    /// Applies `f` to every entry, revalidating finiteness.
    pub fn map(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Self::from_flat(self.n, self.p, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Adds `shift` to every observation.
    pub fn translate(&self, shift: &[T]) -> Result<Self> {
        if shift.len() != self.p {
            return Err(Error::DimensionMismatch { expected: self.p, found: shift.len() });
        }
        let mut values = self.values.clone();
        for row in values.chunks_exact_mut(self.p) {
            for (x, &c) in row.iter_mut().zip(shift) {
                *x += c;
            }
        }
        Self::from_flat(self.n, self.p, values)
    }

    /// Subtracts `center` from every observation; no revalidation needed.
    pub(crate) fn residuals(&self, center: &[T]) -> Vec<T> {
        let mut values = self.values.clone();
        for row in values.chunks_exact_mut(self.p) {
            for (x, &c) in row.iter_mut().zip(center) {
                *x -= c;
            }
        }
        values
    }
}

/// Validates a raw row-major matrix into a [`Sample`].
pub fn validate_sample<T: Scalar, R: AsRef<[T]>>(raw: &[R]) -> Result<Sample<T>> {
    let n = raw.len();
    let p = raw.first().map(|r| r.as_ref().len()).unwrap_or(0);
    if n == 0 || p == 0 {
        return Err(Error::EmptyInput);
    }
    let mut values = Vec::with_capacity(n * p);
    for (i, row) in raw.iter().enumerate() {
        let row = row.as_ref();
        if row.len() != p {
            return Err(Error::RaggedRow { row: i, expected: p, found: row.len() });
        }
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteEntry { row: i, col: j });
            }
        }
        values.extend_from_slice(row);
    }
    Ok(Sample { n, p, values })
}

/// A finite real vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector<T>(Vec<T>);

impl<T: Scalar> Vector<T> {
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if let Some(k) = coords.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteVector(k));
        }
        Ok(Self(coords))
    }

    pub fn zeros(p: usize) -> Self {
        Self(vec![T::zero(); p])
    }

    pub(crate) fn from_vec_unchecked(coords: Vec<T>) -> Self {
        Self(coords)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }

    pub fn max_norm(&self) -> T {
        crate::scalar::max_abs(&self.0)
    }

    pub fn norm(&self) -> T {
        crate::scalar::norm_sq(&self.0).sqrt()
    }
}

impl<T> Deref for Vector<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.0
    }
}

/// Plain dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn from_flat(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn identity(p: usize) -> Self {
        let mut data = vec![T::zero(); p * p];
        for i in 0..p {
            data[i * p + i] = T::one();
        }
        Self { rows: p, cols: p, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_flat(&self) -> &[T] {
        &self.data
    }

    pub fn matmul(&self, other: &Matrix<T>) -> Result<Matrix<T>> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = vec![T::zero(); self.rows * other.cols];
        for i in 0..self.rows {
            let out_row = &mut out[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(Matrix { rows: self.rows, cols: other.cols, data: out })
    }

    /// `out = self · x`.
    pub fn mul_vec_into(&self, x: &[T], out: &mut [T]) {
        debug_assert_eq!(x.len(), self.cols);
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.cols)) {
            *o = crate::scalar::dot(row, x);
        }
    }

    pub fn max_abs_diff(&self, other: &Matrix<T>) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

/// Symmetric positive-definite dependence (shape) matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeMatrix<T> {
    matrix: Matrix<T>,
}

impl<T: Scalar> ShapeMatrix<T> {
    /// Accepts a matrix symmetric to 1e-12 relative tolerance.
    pub fn new(p: usize, values: Vec<T>) -> Result<Self> {
        if p == 0 {
            return Err(Error::EmptyInput);
        }
        let matrix = Matrix::from_flat(p, p, values)?;
        if let Some(k) = matrix.data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEntry { row: k / p, col: k % p });
        }
        let scale = crate::scalar::max_abs(&matrix.data).max(T::min_positive_value());
        let tol = T::of(1e-12) * scale;
        for i in 0..p {
            for j in (i + 1)..p {
                if (matrix[(i, j)] - matrix[(j, i)]).abs() > tol {
                    return Err(Error::NotSymmetric(i, j));
                }
            }
        }
        Ok(Self { matrix })
    }

    /// Like [`ShapeMatrix::new`] but rescales so that the trace equals `p`.
    pub fn normalized(p: usize, values: Vec<T>) -> Result<Self> {
        let raw = Self::new(p, values)?;
        let trace = raw.trace();
        if trace <= T::zero() {
            return Err(Error::NotPsd(trace.as_f64()));
        }
        let s = T::of_usize(p) / trace;
        let data = raw.matrix.data.iter().map(|&v| v * s).collect();
        Ok(Self { matrix: Matrix { rows: p, cols: p, data } })
    }

    pub fn identity(p: usize) -> Self {
        Self { matrix: Matrix::identity(p) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn trace(&self) -> T {
        (0..self.dim()).map(|i| self.matrix[(i, i)]).sum()
    }

    pub fn is_identity(&self) -> bool {
        let p = self.dim();
        (0..p).all(|i| {
            (0..p).all(|j| self.matrix[(i, j)] == if i == j { T::one() } else { T::zero() })
        })
    }

    pub fn as_matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn scaled(&self, s: T) -> Self {
        let data = self.matrix.data.iter().map(|&v| v * s).collect();
        Self { matrix: Matrix { rows: self.dim(), cols: self.dim(), data } }
    }
}

impl<T> Index<(usize, usize)> for ShapeMatrix<T> {
    type Output = T;

    fn index(&self, idx: (usize, usize)) -> &T {
        &self.matrix[idx]
    }
}

/// AR(1) correlation matrix with entries `rho^|j - l|`.
pub fn ar1_shape<T: Scalar>(p: usize, rho: T) -> Result<ShapeMatrix<T>> {
    if !(rho >= T::zero() && rho < T::one()) {
        return Err(Error::InvalidRho(rho.as_f64()));
    }
    if p == 0 {
        return Err(Error::EmptyInput);
    }
    // powers[k] = rho^k, built by repeated multiplication so every lag uses the
    // same value on both sides of the diagonal.
    let mut powers = Vec::with_capacity(p);
    let mut acc = T::one();
    for _ in 0..p {
        powers.push(acc);
        acc *= rho;
    }
    let mut data = vec![T::zero(); p * p];
    for i in 0..p {
        for j in 0..p {
            data[i * p + j] = powers[i.abs_diff(j)];
        }
    }
    Ok(ShapeMatrix { matrix: Matrix { rows: p, cols: p, data } })
}

/// Symmetric positive semi-definite square root via spectral decomposition.
///
/// Diagonal inputs take a shortcut; everything else goes through a dense
/// symmetric eigensolver in `f64`. Eigenvalues below `-1e-10 * λ_max` are
/// rejected, small negative ones are clamped to zero.
pub fn symmetric_sqrt<T: Scalar>(omega: &ShapeMatrix<T>) -> Result<Matrix<T>> {
    let p = omega.dim();
    let is_diagonal =
        (0..p).all(|i| (0..p).all(|j| i == j || omega[(i, j)] == T::zero()));
    if is_diagonal {
        let lambda_max = (0..p).fold(T::zero(), |m, i| m.max(omega[(i, i)]));
        let mut data = vec![T::zero(); p * p];
        for i in 0..p {
            let d = omega[(i, i)];
            if d < -T::of(1e-10) * lambda_max {
                return Err(Error::NotPsd(d.as_f64()));
            }
            data[i * p + i] = d.max(T::zero()).sqrt();
        }
        return Ok(Matrix { rows: p, cols: p, data });
    }

    let m = DMatrix::from_fn(p, p, |i, j| omega[(i, j)].as_f64());
    let eig = SymmetricEigen::new(m);
    let lambda_max = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    let mut roots = Vec::with_capacity(p);
    for &l in eig.eigenvalues.iter() {
        if l < -1e-10 * lambda_max {
            return Err(Error::NotPsd(l));
        }
        roots.push(l.max(0.0).sqrt());
    }
    let v = &eig.eigenvectors;
    let mut data = vec![T::zero(); p * p];
    for i in 0..p {
        for j in i..p {
            let s: f64 = (0..p).map(|k| v[(i, k)] * roots[k] * v[(j, k)]).sum();
            data[i * p + j] = T::of(s);
            data[j * p + i] = T::of(s);
        }
    }
    Ok(Matrix { rows: p, cols: p, data })
}

/// Reads comma-separated observations, one per row.
///
/// A first row containing any field that does not parse as a number is taken
/// to be a header and skipped; returns the header (if any) with the sample.
pub fn read_csv<T: Scalar, R: Read>(reader: R) -> Result<(Sample<T>, Option<Vec<String>>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut header = None;
    let mut rows: Vec<Vec<T>> = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parsed: std::result::Result<Vec<f64>, _> =
            rec.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(vals) => rows.push(vals.into_iter().map(T::of).collect()),
            Err(_) if k == 0 => header = Some(rec.iter().map(str::to_owned).collect()),
            Err(e) => {
                return Err(Error::InvalidArgument(format!(
                    "row {}: {e}",
                    k - usize::from(header.is_some())
                )))
            }
        }
    }
    Ok((validate_sample(&rows)?, header))
}

/// Writes a sample in the layout [`read_csv`] accepts.
pub fn write_csv<T: Scalar, W: Write>(
    sample: &Sample<T>,
    header: Option<&[String]>,
    writer: W,
) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    if let Some(h) = header {
        wtr.write_record(h)?;
    }
    for row in sample.rows() {
        wtr.write_record(row.iter().map(|v| v.to_string()))?;
    }
    wtr.flush()?;
    Ok(())
}
