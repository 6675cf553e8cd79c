//! Dense complex matrix kernel: arithmetic, Kronecker products, LU solves,
//! matrix exponential, and eigenvalues (see [`eigen`]).
//!
//! Matrices are stored row-major over `Complex64`; real matrices are the
//! imaginary-part-zero case. Everything here is a pure function of its
//! inputs and safe to share across threads.

mod eigen;

pub use eigen::eigenvalues;
pub use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense matrix with complex entries, row-major layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    /// Build from row-major complex entries. Rejects size mismatches and
    /// non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::Dimension(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput(
                "matrix entries must be finite".into(),
            ));
        }
        Ok(Self { rows, cols, data })
    }

    /// Build from row-major real entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    /// Build from nested real rows (the network-file layout).
    pub fn from_rows_real(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows in matrix literal".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::from_real(r, c, &flat)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn diag_real(entries: &[f64]) -> Self {
        Self::diag(
            &entries
                .iter()
                .map(|&x| Complex64::new(x, 0.0))
                .collect::<Vec<_>>(),
        )
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

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik.re == 0.0 && aik.im == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += aik * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Dimension("matrix addition shape mismatch".into()));
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Dimension("matrix subtraction shape mismatch".into()));
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn trace(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(Error::Dimension("trace of non-square matrix".into()));
        }
        Ok((0..self.rows).map(|i| self[(i, i)]).sum())
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// True when every imaginary part is below `tol` in magnitude.
    pub fn is_real(&self, tol: f64) -> bool {
        self.data.iter().all(|z| z.im.abs() <= tol)
    }

    /// Real parts, row-major.
    pub fn real_entries(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.re).collect()
    }

    /// Matrix-vector product.
    pub fn matvec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::Dimension("matvec length mismatch".into()));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect())
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Kronecker product: block (i,j) of the result equals `a[i,j] * b`.
pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(a.rows * b.rows, a.cols * b.cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            if aij.re == 0.0 && aij.im == 0.0 {
                continue;
            }
            for p in 0..b.rows {
                for q in 0..b.cols {
                    out[(i * b.rows + p, j * b.cols + q)] = aij * b[(p, q)];
                }
            }
        }
    }
    out
}

/// LU factorization with partial pivoting. Returns (combined LU, pivot row
/// permutation, number of swaps).
fn lu_factor(a: &DenseMatrix) -> Result<(DenseMatrix, Vec<usize>, usize)> {
    if !a.is_square() {
        return Err(Error::Dimension("LU factorization needs a square matrix".into()));
    }
    let n = a.rows;
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut swaps = 0;
    let scale = a.max_abs().max(1.0);
    for k in 0..n {
        let (pivot_row, pivot_mag) = (k..n)
            .map(|i| (i, lu[(i, k)].norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if pivot_mag <= f64::EPSILON * scale * n as f64 {
            return Err(Error::InvalidInput(
                "singular matrix in linear solve".into(),
            ));
        }
        if pivot_row != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(pivot_row, j)];
                lu[(pivot_row, j)] = tmp;
            }
            perm.swap(k, pivot_row);
            swaps += 1;
        }
        let pivot = lu[(k, k)];
        for i in (k + 1)..n {
            let factor = lu[(i, k)] / pivot;
            lu[(i, k)] = factor;
            for j in (k + 1)..n {
                let sub = factor * lu[(k, j)];
                lu[(i, j)] -= sub;
            }
        }
    }
    Ok((lu, perm, swaps))
}

/// Solve `a * x = b` for possibly multiple right-hand sides.
pub fn solve(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.rows != b.rows {
        return Err(Error::Dimension("solve: rhs row count mismatch".into()));
    }
    let n = a.rows;
    let (lu, perm, _) = lu_factor(a)?;
    let mut x = DenseMatrix::zeros(n, b.cols);
    for col in 0..b.cols {
        // forward substitution on the permuted rhs
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = b[(perm[i], col)];
            for j in 0..i {
                acc -= lu[(i, j)] * y[j];
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in (i + 1)..n {
                acc -= lu[(i, j)] * x[(j, col)];
            }
            x[(i, col)] = acc / lu[(i, i)];
        }
    }
    Ok(x)
}

/// Solve `a * x = b` for a single right-hand side vector.
pub fn solve_vec(a: &DenseMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    let rhs = DenseMatrix::new(b.len(), 1, b.to_vec())?;
    let x = solve(a, &rhs)?;
    Ok(x.data)
}

/// Determinant via LU; zero for singular input.
pub fn det(a: &DenseMatrix) -> Result<Complex64> {
    if !a.is_square() {
        return Err(Error::Dimension("determinant of non-square matrix".into()));
    }
    match lu_factor(a) {
        Ok((lu, _, swaps)) => {
            let mut d = Complex64::new(if swaps % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
            for i in 0..a.rows {
                d *= lu[(i, i)];
            }
            Ok(d)
        }
        Err(Error::InvalidInput(_)) => Ok(Complex64::new(0.0, 0.0)),
        Err(e) => Err(e),
    }
}

// Pade(13,13) numerator coefficients for the scaling-and-squaring exponential.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const PADE13_THETA: f64 = 5.371920351148152;

/// Matrix exponential of `m * t` by scaling-and-squaring with a degree-13
/// Pade approximant (truncation below 1e-13 after scaling).
pub fn expm(m: &DenseMatrix, t: f64) -> Result<DenseMatrix> {
    if !m.is_square() {
        return Err(Error::Dimension("expm of non-square matrix".into()));
    }
    if !t.is_finite() {
        return Err(Error::InvalidInput("expm time must be finite".into()));
    }
    let n = m.rows;
    if n == 0 {
        return Ok(DenseMatrix::zeros(0, 0));
    }
    let a = m.scale_real(t);
    let norm = a.norm_one();
    let squarings = if norm > PADE13_THETA {
        (norm / PADE13_THETA).log2().ceil() as u32
    } else {
        0
    };
    let a = a.scale_real(0.5f64.powi(squarings as i32));

    let ident = DenseMatrix::identity(n);
    let a2 = a.matmul(&a)?;
    let a4 = a2.matmul(&a2)?;
    let a6 = a2.matmul(&a4)?;

    let b = |k: usize| Complex64::new(PADE13[k], 0.0);
    let u_hi = a6
        .scale(b(13))
        .add(&a4.scale(b(11)))?
        .add(&a2.scale(b(9)))?;
    let u_inner = a6
        .matmul(&u_hi)?
        .add(&a6.scale(b(7)))?
        .add(&a4.scale(b(5)))?
        .add(&a2.scale(b(3)))?
        .add(&ident.scale(b(1)))?;
    let u = a.matmul(&u_inner)?;
    let v_hi = a6
        .scale(b(12))
        .add(&a4.scale(b(10)))?
        .add(&a2.scale(b(8)))?;
    let v = a6
        .matmul(&v_hi)?
        .add(&a6.scale(b(6)))?
        .add(&a4.scale(b(4)))?
        .add(&a2.scale(b(2)))?
        .add(&ident.scale(b(0)))?;

    let mut x = solve(&v.sub(&u)?, &v.add(&u)?)?;
    for _ in 0..squarings {
        x = x.matmul(&x)?;
    }
    Ok(x)
}

/// Sort eigenvalues by (Re, Im); QR output order is not deterministic, so
/// consumers compare sorted lists.
pub fn sort_complex(values: &mut [Complex64]) {
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}
