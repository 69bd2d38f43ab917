//! Spectrum-based analysis of a Kossakowski matrix: complete-positivity
//! verdict, diagonal Lindblad form and restoration of complete positivity.

use ndarray::Array1;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kossakowski::KossakowskiMatrix;
use crate::linalg::{adjoint, hermitian_eig, CMatrix};
use crate::sun_basis::GeneratorBasis;
use crate::superop::{Dissipator, VecOrdering};

/// Default CP tolerance is `CP_TOL_REL * max(1, lambda_max)`.
pub const CP_TOL_REL: f64 = 1e-12;
/// An eigenvalue counts as nonzero above `NONZERO_REL * max(1, lambda_max)`.
pub const NONZERO_REL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CpVerdict {
    pub is_cp: bool,
    pub min_eigenvalue: f64,
    pub tolerance_used: f64,
    /// Full spectrum, descending.
    pub spectrum: Vec<f64>,
}

/// Descending eigenvalues of `A`.
pub fn spectrum(a: &KossakowskiMatrix) -> Result<Array1<f64>> {
    a.require_hermitian()?;
    Ok(hermitian_eig(a.matrix())?.eigenvalues)
}

/// `A` generates a CP semigroup iff all its eigenvalues are non-negative.
/// `tol = None` uses `1e-12 * max(1, lambda_max)`.
pub fn cp_verdict(a: &KossakowskiMatrix, tol: Option<f64>) -> Result<CpVerdict> {
    let spec = spectrum(a)?;
    let lambda_max = spec.first().copied().unwrap_or(0.0);
    let min_eigenvalue = spec.last().copied().unwrap_or(0.0);
    let tolerance_used = tol.unwrap_or(CP_TOL_REL * lambda_max.max(1.0));
    Ok(CpVerdict {
        is_cp: min_eigenvalue >= -tolerance_used,
        min_eigenvalue,
        tolerance_used,
        spectrum: spec.to_vec(),
    })
}

/// Number of eigenvalues above `1e-9 * max(1, lambda_max)`.
pub fn count_nonzero(spectrum: &[f64]) -> usize {
    let top = spectrum.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let threshold = NONZERO_REL * top.max(1.0);
    spectrum.iter().filter(|&&l| l > threshold).count()
}

/// Diagonal form `L[rho] = sum_k rate_k (L_k rho L_k^H - 1/2 {L_k^H L_k, rho})`.
#[derive(Debug, Clone)]
pub struct LindbladForm {
    pub rates: Vec<f64>,
    pub operators: Vec<CMatrix>,
}

impl LindbladForm {
    /// Rebuild the dissipator from the jump operators.
    pub fn to_dissipator(&self, ordering: VecOrdering) -> Result<Dissipator> {
        let n = self
            .operators
            .first()
            .map(|op| op.nrows())
            .ok_or_else(|| Error::InvalidArgument("empty Lindblad form".into()))?;
        let terms: Vec<(f64, &CMatrix, CMatrix, CMatrix)> = self
            .rates
            .iter()
            .zip(&self.operators)
            .map(|(&rate, op)| {
                let dag = adjoint(op);
                let number = dag.dot(op);
                (rate, op, dag, number)
            })
            .collect();
        Dissipator::from_map(n, ordering, |x| {
            let mut out = CMatrix::zeros((n, n));
            for (rate, op, dag, number) in &terms {
                let jump = op.dot(x).dot(dag);
                let anti = number.dot(x) + x.dot(number);
                out = out + (jump - anti.mapv(|z| z * 0.5)).mapv(|z| z * *rate);
            }
            out
        })
    }
}

/// Diagonalize `A = U diag(lambda) U^H` and form `L_k = sum_i U_ik F_i`.
pub fn lindblad_form(a: &KossakowskiMatrix, basis: &GeneratorBasis) -> Result<LindbladForm> {
    if a.n() != basis.n() {
        return Err(Error::InvalidArgument(format!(
            "Kossakowski matrix is for n = {}, basis for n = {}",
            a.n(),
            basis.n()
        )));
    }
    a.require_hermitian()?;
    let eig = hermitian_eig(a.matrix())?;
    let n = basis.n();
    let operators = eig
        .eigenvectors
        .columns()
        .into_iter()
        .map(|u| {
            basis
                .generators()
                .iter()
                .zip(u.iter())
                .fold(CMatrix::zeros((n, n)), |acc, (f, &c)| acc + f.mapv(|z| z * c))
        })
        .collect();
    Ok(LindbladForm {
        rates: eig.eigenvalues.to_vec(),
        operators,
    })
}

/// Closest positive semidefinite matrix in Frobenius norm: clip negative
/// eigenvalues to zero.
pub fn restore_cp(a: &KossakowskiMatrix) -> Result<KossakowskiMatrix> {
    a.require_hermitian()?;
    let eig = hermitian_eig(a.matrix())?;
    if eig.eigenvalues.iter().all(|&l| l >= 0.0) {
        return Ok(a.clone());
    }
    let clipped = eig.reassemble_with(|l| l.max(0.0));
    // the reassembled matrix is Hermitian up to rounding
    let clipped = (&clipped + &adjoint(&clipped)).mapv(|z: Complex64| z * 0.5);
    KossakowskiMatrix::new(a.n(), clipped)
}

/// `max_k |lambda_k(A1) - lambda_k(A2)|` over descending spectra.
pub fn compare_spectra(a1: &KossakowskiMatrix, a2: &KossakowskiMatrix) -> Result<f64> {
    if a1.n() != a2.n() {
        return Err(Error::InvalidArgument(format!(
            "cannot compare spectra for n = {} and n = {}",
            a1.n(),
            a2.n()
        )));
    }
    let (s1, s2) = (spectrum(a1)?, spectrum(a2)?);
    Ok(s1
        .iter()
        .zip(s2.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}
