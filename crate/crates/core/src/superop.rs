//! Liouvillian supermatrices acting on vectorized `n x n` matrices.
//!
//! A [`VecOrdering`] fixes which slot of the `n^2` vector holds `X_ij`.
//! `RowMajor` puts `X_ij` at `i*n + j`. `Block3` exists only for `n = 3` and
//! lays the density matrix out as
//! `(rho11, rho22, rho33, rho12, rho21, rho13, rho31, rho23, rho32)`, the
//! order in which the three-level models are written down.

use std::fmt;
use std::str::FromStr;

use ndarray::Array1;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, trace, CMatrix, CVector};

/// Relative tolerance used by [`validate_dissipator`].
pub const DISSIPATOR_TOL: f64 = 1e-12;

const BLOCK3: [(usize, usize); 9] = [
    (0, 0),
    (1, 1),
    (2, 2),
    (0, 1),
    (1, 0),
    (0, 2),
    (2, 0),
    (1, 2),
    (2, 1),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum VecOrdering {
    #[default]
    #[serde(rename = "row-major")]
    RowMajor,
    #[serde(rename = "block3")]
    Block3,
}

impl VecOrdering {
    pub fn name(self) -> &'static str {
        match self {
            VecOrdering::RowMajor => "row-major",
            VecOrdering::Block3 => "block3",
        }
    }

    fn check(self, n: usize) -> Result<()> {
        if self == VecOrdering::Block3 && n != 3 {
            return Err(Error::InvalidArgument(format!(
                "ordering block3 is defined for n = 3 only, got n = {n}"
            )));
        }
        Ok(())
    }

    /// `pairs[slot] = (i, j)`.
    pub fn slot_pairs(self, n: usize) -> Result<Vec<(usize, usize)>> {
        self.check(n)?;
        Ok(match self {
            VecOrdering::RowMajor => (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect(),
            VecOrdering::Block3 => BLOCK3.to_vec(),
        })
    }

    /// Map from the row-major index `i*n + j` to the slot holding `X_ij`.
    pub fn permutation(self, n: usize) -> Result<Vec<usize>> {
        let pairs = self.slot_pairs(n)?;
        let mut perm = vec![0; n * n];
        for (slot, (i, j)) in pairs.into_iter().enumerate() {
            perm[i * n + j] = slot;
        }
        Ok(perm)
    }
}

impl fmt::Display for VecOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VecOrdering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "row-major" => Ok(VecOrdering::RowMajor),
            "block3" => Ok(VecOrdering::Block3),
            other => Err(Error::InvalidArgument(format!("unknown ordering {other:?}"))),
        }
    }
}

/// Vectorize `x` in the given ordering.
pub fn vec(x: &CMatrix, ordering: VecOrdering) -> Result<CVector> {
    let n = x.nrows();
    if x.ncols() != n {
        return Err(Error::InvalidArgument(format!(
            "expected a square matrix, got {}x{}",
            x.nrows(),
            x.ncols()
        )));
    }
    let pairs = ordering.slot_pairs(n)?;
    Ok(Array1::from_iter(pairs.into_iter().map(|(i, j)| x[(i, j)])))
}

/// Inverse of [`vec`].
pub fn devec(v: &CVector, ordering: VecOrdering) -> Result<CMatrix> {
    let n = (v.len() as f64).sqrt().round() as usize;
    if n * n != v.len() || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "vector length {} is not a perfect square",
            v.len()
        )));
    }
    let pairs = ordering.slot_pairs(n)?;
    let mut x = CMatrix::zeros((n, n));
    for (slot, (i, j)) in pairs.into_iter().enumerate() {
        x[(i, j)] = v[slot];
    }
    Ok(x)
}

/// Dissipative part of a Liouvillian as an `n^2 x n^2` supermatrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dissipator {
    n: usize,
    ordering: VecOrdering,
    matrix: CMatrix,
}

impl Dissipator {
    pub fn new(n: usize, ordering: VecOrdering, matrix: CMatrix) -> Result<Self> {
        ordering.check(n)?;
        if n == 0 || matrix.dim() != (n * n, n * n) {
            return Err(Error::InvalidArgument(format!(
                "supermatrix for n = {n} must be {0}x{0}, got {1}x{2}",
                n * n,
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self {
            n,
            ordering,
            matrix,
        })
    }

    pub fn zeros(n: usize, ordering: VecOrdering) -> Result<Self> {
        Self::new(n, ordering, CMatrix::zeros((n * n, n * n)))
    }

    /// Tabulate a linear map `X -> map(X)` on the matrix units.
    pub fn from_map(
        n: usize,
        ordering: VecOrdering,
        map: impl Fn(&CMatrix) -> CMatrix,
    ) -> Result<Self> {
        let pairs = ordering.slot_pairs(n)?;
        let mut matrix = CMatrix::zeros((n * n, n * n));
        for (col, &(i, j)) in pairs.iter().enumerate() {
            let mut unit = CMatrix::zeros((n, n));
            unit[(i, j)] = Complex64::new(1.0, 0.0);
            let image = vec(&map(&unit), ordering)?;
            matrix.column_mut(col).assign(&image);
        }
        Self::new(n, ordering, matrix)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ordering(&self) -> VecOrdering {
        self.ordering
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

/// `devec(L vec(X))`.
pub fn apply(l: &Dissipator, x: &CMatrix) -> Result<CMatrix> {
    if x.dim() != (l.n, l.n) {
        return Err(Error::InvalidArgument(format!(
            "operand is {}x{}, dissipator acts on {n}x{n}",
            x.nrows(),
            x.ncols(),
            n = l.n
        )));
    }
    let v = vec(x, l.ordering)?;
    devec(&l.matrix.dot(&v), l.ordering)
}

/// Residuals of the two structural properties every dissipator must have,
/// relative to `max(1, ||L||_F)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationReport {
    pub trace_residual: f64,
    pub hermiticity_residual: f64,
    pub passed: bool,
}

/// Check trace annihilation and Hermiticity preservation on all matrix units.
pub fn validate_dissipator(l: &Dissipator) -> ValidationReport {
    let n = l.n;
    let scale = frobenius_norm(l.matrix.view()).max(1.0);
    let mut images = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut unit = CMatrix::zeros((n, n));
            unit[(i, j)] = Complex64::new(1.0, 0.0);
            images.push(apply(l, &unit).expect("unit has matching shape"));
        }
    }
    let mut tr: f64 = 0.0;
    let mut herm: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let img = &images[i * n + j];
            tr = tr.max(trace(img).norm());
            let mirrored = &images[j * n + i];
            let diff = img - &mirrored.t().mapv(|z| z.conj());
            herm = herm.max(frobenius_norm(diff.view()));
        }
    }
    let trace_residual = tr / scale;
    let hermiticity_residual = herm / scale;
    ValidationReport {
        trace_residual,
        hermiticity_residual,
        passed: trace_residual <= DISSIPATOR_TOL && hermiticity_residual <= DISSIPATOR_TOL,
    }
}

/// Express `l` in another vectorization, `L' = P L P^T`.
pub fn reorder(l: &Dissipator, to: VecOrdering) -> Result<Dissipator> {
    let n = l.n;
    let from_perm = l.ordering.permutation(n)?;
    let to_perm = to.permutation(n)?;
    // new slot for every old slot
    let mut map = vec![0; n * n];
    for (row_major, &old) in from_perm.iter().enumerate() {
        map[old] = to_perm[row_major];
    }
    let mut out = CMatrix::zeros((n * n, n * n));
    for r in 0..n * n {
        for c in 0..n * n {
            out[(map[r], map[c])] = l.matrix[(r, c)];
        }
    }
    Dissipator::new(n, to, out)
}
