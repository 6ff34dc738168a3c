use std::fmt;
use std::ops::Mul;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Entries below this magnitude are skipped when picking the canonical phase.
pub const CANONICAL_EPS: f64 = 1e-9;

/// Square complex matrix acting on one or more logical qubits.
#[derive(Clone, PartialEq)]
pub struct GateMatrix {
    m: DMatrix<Complex64>,
}

impl fmt::Debug for GateMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GateMatrix {}x{}", self.m.nrows(), self.m.ncols())?;
        for r in 0..self.m.nrows() {
            let row: Vec<String> = (0..self.m.ncols())
                .map(|c| format!("{:+.6}{:+.6}i", self.m[(r, c)].re, self.m[(r, c)].im))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl GateMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::Shape(format!("gate must be square, got {}x{}", m.nrows(), m.ncols())));
        }
        Ok(GateMatrix { m })
    }

    /// Builds a gate from rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("rows must form a square matrix".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |r, col| rows[r][col]))
    }

    pub fn identity(dim: usize) -> Self {
        GateMatrix {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn pauli_x() -> Self {
        Self::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]).unwrap()
    }

    pub fn pauli_z() -> Self {
        Self::phase(std::f64::consts::PI)
    }

    pub fn hadamard() -> Self {
        let h = 1.0 / 2f64.sqrt();
        Self::from_rows(&[vec![c(h, 0.0), c(h, 0.0)], vec![c(h, 0.0), c(-h, 0.0)]]).unwrap()
    }

    /// `diag(1, e^{i phi})`.
    pub fn phase(phi: f64) -> Self {
        Self::diagonal(&[c(1.0, 0.0), Complex64::from_polar(1.0, phi)])
    }

    pub fn diagonal(d: &[Complex64]) -> Self {
        GateMatrix {
            m: DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)),
        }
    }

    /// `diag(1, 1, 1, -1)`.
    pub fn controlled_z() -> Self {
        Self::diagonal(&[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)])
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        GateMatrix { m: self.m.adjoint() }
    }

    /// Matrix inverse (the adjoint for unitary gates).
    pub fn inverse(&self) -> Result<Self> {
        if self.is_unitary(1e-12) {
            return Ok(self.adjoint());
        }
        self.m
            .clone()
            .try_inverse()
            .map(|m| GateMatrix { m })
            .ok_or_else(|| Error::Invalid("matrix is singular".into()))
    }

    pub fn scaled(&self, z: Complex64) -> Self {
        GateMatrix { m: &self.m * z }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::identity(self.dim()), |acc, _| &acc * self)
    }

    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &GateMatrix) -> Self {
        GateMatrix {
            m: self.m.kronecker(&other.m),
        }
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let p = &self.m * self.m.adjoint();
        let id = DMatrix::<Complex64>::identity(self.dim(), self.dim());
        (p - id).iter().all(|z| z.norm() <= tol)
    }

    /// Same matrix with its first entry (row-major) of magnitude above
    /// [`CANONICAL_EPS`] rotated to the positive real axis.
    pub fn phase_canonical(&self) -> Self {
        for r in 0..self.dim() {
            for col in 0..self.dim() {
                let z = self.m[(r, col)];
                if z.norm() > CANONICAL_EPS {
                    return self.scaled(z.conj() / z.norm());
                }
            }
        }
        self.clone()
    }

    /// Largest entrywise difference.
    pub fn max_diff(&self, other: &GateMatrix) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        (&self.m - &other.m).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference between the phase-canonical forms.
    pub fn canonical_diff(&self, other: &GateMatrix) -> f64 {
        self.phase_canonical().max_diff(&other.phase_canonical())
    }

    /// `min_phi ||A - e^{i phi} B||_F`.
    pub fn projective_distance(&self, other: &GateMatrix) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        // the optimal phase aligns tr(B^dag A); evaluating the difference directly avoids cancellation
        let overlap = (other.m.adjoint() * &self.m).trace();
        let z = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { c(1.0, 0.0) };
        (&self.m - &other.m * z).norm()
    }

    /// Operator (spectral) norm of `self - 1`.
    pub fn distance_from_identity(&self) -> f64 {
        let d = &self.m - DMatrix::<Complex64>::identity(self.dim(), self.dim());
        d.singular_values().iter().cloned().fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> GateJson {
        GateJson::from(self)
    }
}

impl Mul for &GateMatrix {
    type Output = GateMatrix;

    fn mul(self, rhs: &GateMatrix) -> GateMatrix {
        GateMatrix { m: &self.m * &rhs.m }
    }
}

impl Mul for GateMatrix {
    type Output = GateMatrix;

    fn mul(self, rhs: GateMatrix) -> GateMatrix {
        &self * &rhs
    }
}

/// Matrix as separate real and imaginary row lists.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&DMatrix<Complex64>> for MatrixJson {
    fn from(m: &DMatrix<Complex64>) -> Self {
        let rows = |f: fn(&Complex64) -> f64| (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| f(&m[(r, c)])).collect()).collect();
        MatrixJson {
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateJson {
    pub dim: usize,
    pub exact: MatrixJson,
    pub canonical: MatrixJson,
}

impl From<&GateMatrix> for GateJson {
    fn from(g: &GateMatrix) -> Self {
        GateJson {
            dim: g.dim(),
            exact: g.matrix().into(),
            canonical: g.phase_canonical().matrix().into(),
        }
    }
}
