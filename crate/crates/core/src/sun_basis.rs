//! Orthonormal SU(N) generator bases and their structure constants.
//!
//! The basis is stored as `F_0, F_1, .., F_M` with `F_0 = I/sqrt(n)` and
//! `M = n^2 - 1`, so the full set is orthonormal under the Hilbert-Schmidt
//! inner product. For `n = 3` the traceless part is the standard Gell-Mann
//! set `lambda_1..lambda_8` divided by `sqrt(2)`, in the usual order. Other
//! dimensions use the generalized Gell-Mann order: symmetric off-diagonal
//! pairs, antisymmetric pairs, then the diagonal matrices.

use ndarray::{Array1, Array3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kossakowski::TransformationTensor;
use crate::linalg::{adjoint, frobenius_norm, identity, trace_of_product, CMatrix};

/// Tolerance for the orthonormality gate in [`structure_constants`].
pub const ORTHONORMALITY_TOL: f64 = 1e-12;
/// Largest imaginary residue tolerated in the structure-constant traces.
pub const STRUCTURE_IMAG_TOL: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct GeneratorBasis {
    n: usize,
    matrices: Vec<CMatrix>,
}

impl GeneratorBasis {
    /// Wrap an explicit list `F_0..F_M`. Only shapes are checked here; use
    /// [`GeneratorBasis::orthonormality_residual`] to audit the contents.
    pub fn from_matrices(matrices: Vec<CMatrix>) -> Result<Self> {
        let n = matrices
            .first()
            .map(|m| m.nrows())
            .ok_or_else(|| Error::InvalidArgument("empty basis".into()))?;
        if n < 2 || matrices.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "expected {} matrices of size {n}x{n}, got {}",
                n * n,
                matrices.len()
            )));
        }
        if matrices.iter().any(|m| m.dim() != (n, n)) {
            return Err(Error::InvalidArgument("basis matrices differ in shape".into()));
        }
        Ok(Self { n, matrices })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of traceless generators, `n^2 - 1`.
    pub fn m(&self) -> usize {
        self.n * self.n - 1
    }

    /// All matrices `F_0..F_M`.
    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    /// The traceless generators `F_1..F_M`.
    pub fn generators(&self) -> &[CMatrix] {
        &self.matrices[1..]
    }

    /// `F_i` with `i` counted from 1 (as in `a_ik`).
    pub fn generator(&self, i: usize) -> &CMatrix {
        &self.matrices[i]
    }

    /// `max_{i,k} |Tr(F_i F_k^H) - delta_ik|` over the full set.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, fi) in self.matrices.iter().enumerate() {
            for (k, fk) in self.matrices.iter().enumerate() {
                let target = if i == k { 1.0 } else { 0.0 };
                let g = trace_of_product(fi, &adjoint(fk));
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }

    /// Coherence vector `v_i = Tr(rho F_i)`, `i = 1..M` (real part).
    pub fn coherence_vector(&self, rho: &CMatrix) -> Array1<f64> {
        Array1::from_iter(self.generators().iter().map(|f| trace_of_product(rho, f).re))
    }

    /// `rho = I/n + sum_i v_i F_i`.
    pub fn density_from_coherence(&self, v: &Array1<f64>) -> CMatrix {
        let mut rho = identity(self.n).mapv(|z| z / self.n as f64);
        for (vi, f) in v.iter().zip(self.generators()) {
            rho = rho + f.mapv(|z| z * *vi);
        }
        rho
    }
}

fn unit(n: usize, entries: &[(usize, usize, Complex64)], scale: f64) -> CMatrix {
    let mut m = CMatrix::zeros((n, n));
    for &(i, k, z) in entries {
        m[(i, k)] = z * scale;
    }
    m
}

/// Build the orthonormal generator basis for dimension `n >= 2`.
pub fn generate_basis(n: usize) -> Result<GeneratorBasis> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "Hilbert-space dimension must be at least 2, got {n}"
        )));
    }
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;

    let mut matrices = vec![identity(n).mapv(|z| z / (n as f64).sqrt())];
    if n == 3 {
        let r3 = 3f64.sqrt();
        matrices.extend([
            unit(3, &[(0, 1, one), (1, 0, one)], h),
            unit(3, &[(0, 1, -i), (1, 0, i)], h),
            unit(3, &[(0, 0, one), (1, 1, -one)], h),
            unit(3, &[(0, 2, one), (2, 0, one)], h),
            unit(3, &[(0, 2, -i), (2, 0, i)], h),
            unit(3, &[(1, 2, one), (2, 1, one)], h),
            unit(3, &[(1, 2, -i), (2, 1, i)], h),
            unit(3, &[(0, 0, one), (1, 1, one), (2, 2, -2.0 * one)], h / r3),
        ]);
    } else {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|j| ((j + 1)..n).map(move |k| (j, k)))
            .collect();
        for &(j, k) in &pairs {
            matrices.push(unit(n, &[(j, k, one), (k, j, one)], h));
        }
        for &(j, k) in &pairs {
            matrices.push(unit(n, &[(j, k, -i), (k, j, i)], h));
        }
        for l in 1..n {
            let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
            let mut entries: Vec<_> = (0..l).map(|j| (j, j, one)).collect();
            entries.push((l, l, -(l as f64) * one));
            matrices.push(unit(n, &entries, norm));
        }
    }
    GeneratorBasis::from_matrices(matrices)
}

/// Antisymmetric (`f`) and symmetric (`d`) structure constants, indexed
/// from 0 for generators `F_1..F_M`.
#[derive(Debug, Clone)]
pub struct StructureConstants {
    n: usize,
    pub f: Array3<f64>,
    pub d: Array3<f64>,
}

impl StructureConstants {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.f.dim().0
    }
}

/// `f_ijk = -i Tr([F_i, F_j] F_k)` and `d_ijk = Tr({F_i, F_j} F_k)`.
pub fn structure_constants(basis: &GeneratorBasis) -> Result<StructureConstants> {
    let residual = basis.orthonormality_residual();
    if residual > ORTHONORMALITY_TOL {
        return Err(Error::InconsistentBasis { residual });
    }
    let gens = basis.generators();
    let m = gens.len();
    let products: Vec<CMatrix> = gens
        .iter()
        .flat_map(|a| gens.iter().map(move |b| a.dot(b)))
        .collect();

    let mut f = Array3::zeros((m, m, m));
    let mut d = Array3::zeros((m, m, m));
    let mut imag: f64 = 0.0;
    let i_unit = Complex64::new(0.0, 1.0);
    for a in 0..m {
        for b in 0..m {
            let ab = &products[a * m + b];
            let ba = &products[b * m + a];
            for (c, fc) in gens.iter().enumerate() {
                let t_ab = trace_of_product(ab, fc);
                let t_ba = trace_of_product(ba, fc);
                let fz = -i_unit * (t_ab - t_ba);
                let dz = t_ab + t_ba;
                imag = imag.max(fz.im.abs()).max(dz.im.abs());
                f[(a, b, c)] = fz.re;
                d[(a, b, c)] = dz.re;
            }
        }
    }
    if imag >= STRUCTURE_IMAG_TOL {
        return Err(Error::InconsistentBasis { residual: imag });
    }
    Ok(StructureConstants { n: basis.n(), f, d })
}

/// Residuals of the closure relations
/// `[F_i, F_j] = i sum_l f_ijl F_l` and
/// `{F_i, F_j} = (2/n) delta_ij I + sum_l d_ijl F_l` (max Frobenius norm).
pub fn closure_residuals(basis: &GeneratorBasis, sc: &StructureConstants) -> (f64, f64) {
    let gens = basis.generators();
    let n = basis.n();
    let m = gens.len();
    let i_unit = Complex64::new(0.0, 1.0);
    let (mut comm, mut anti): (f64, f64) = (0.0, 0.0);
    for a in 0..m {
        for b in 0..m {
            let ab = gens[a].dot(&gens[b]);
            let ba = gens[b].dot(&gens[a]);
            let mut c_rec = CMatrix::zeros((n, n));
            let mut a_rec = if a == b {
                identity(n).mapv(|z| z * (2.0 / n as f64))
            } else {
                CMatrix::zeros((n, n))
            };
            for (l, fl) in gens.iter().enumerate() {
                c_rec = c_rec + fl.mapv(|z| z * i_unit * sc.f[(a, b, l)]);
                a_rec = a_rec + fl.mapv(|z| z * sc.d[(a, b, l)]);
            }
            comm = comm.max(frobenius_norm((&ab - &ba - c_rec).view()));
            anti = anti.max(frobenius_norm((&ab + &ba - a_rec).view()));
        }
    }
    (comm, anti)
}

/// Largest deviation of `sum_{i,k} T_{sm,ik} f_ikp` from `i n d_msp / 2`.
pub fn check_sum_rule(sc: &StructureConstants, t: &TransformationTensor) -> Result<f64> {
    let m = sc.m();
    if t.n() != sc.n() || t.square().nrows() != m * m {
        return Err(Error::InvalidArgument(format!(
            "tensor for n = {} does not match structure constants for n = {}",
            t.n(),
            sc.n()
        )));
    }
    let half_n = Complex64::new(0.0, sc.n() as f64 / 2.0);
    let square = t.square();
    let mut worst: f64 = 0.0;
    for s in 0..m {
        for mm in 0..m {
            let row = square.row(s * m + mm);
            for p in 0..m {
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..m {
                    for k in 0..m {
                        acc += row[i * m + k] * sc.f[(i, k, p)];
                    }
                }
                worst = worst.max((acc - half_n * sc.d[(mm, s, p)]).norm());
            }
        }
    }
    Ok(worst)
}
