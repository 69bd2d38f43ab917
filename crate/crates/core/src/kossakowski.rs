//! Kossakowski matrix extraction.
//!
//! The dissipator is written over the traceless generators as
//!
//! ```text
//! L[rho] = 1/2 sum_{i,k} a_ik (2 F_i rho F_k - rho F_k F_i - F_k F_i rho)
//! ```
//!
//! and `A = (a_ik)` is recovered in two independent ways:
//!
//! * [`kossakowski_trace`] evaluates `a_ij = sum_{m=0}^{M} Tr(F_m F_i L[F_m] F_j)`
//!   directly from the action of `L` on the basis.
//! * [`kossakowski_pinv`] goes through the coherence-vector rates
//!   `dv/dt = R v + k` and solves the overdetermined linear system
//!   `T a = (vec R, k)` with the Moore-Penrose pseudo-inverse of the
//!   structure-constant tensor `T`.
//!
//! Composite indices are row-major everywhere: `a_ik` lives at `i*M + k` of
//! `vec(A)` and `r_sm` at `s*M + m` of `vec(R)`. Row `(s, m)` and column
//! `(i, k)` of the tensor follow the same rule.

use std::sync::OnceLock;

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    self, frobenius_norm, hermiticity_residual, hermitize, identity, trace_of_product,
    CMatrix, CVector,
};
use crate::sun_basis::{GeneratorBasis, StructureConstants};
use crate::superop::{apply, validate_dissipator, Dissipator, VecOrdering};

/// Relative Hermiticity tolerance for extracted Kossakowski matrices.
pub const KOSSAKOWSKI_HERMITIAN_TOL: f64 = 1e-10;
/// Imaginary residue above which the coherence rates are rejected.
pub const COHERENCE_IMAG_TOL: f64 = 1e-10;
/// Relative least-squares residual above which the rates are rejected.
pub const PINV_RESIDUAL_TOL: f64 = 1e-9;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct KossakowskiMatrix {
    n: usize,
    a: CMatrix,
    hermiticity_residual: f64,
}

impl KossakowskiMatrix {
    /// Wrap an `M x M` matrix as given. The recorded residual is the relative
    /// distance from Hermitian of `a` itself.
    pub fn new(n: usize, a: CMatrix) -> Result<Self> {
        let m = n * n - 1;
        if n < 2 || a.dim() != (m, m) {
            return Err(Error::InvalidArgument(format!(
                "Kossakowski matrix for n = {n} must be {m}x{m}, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let hermiticity_residual = relative_hermiticity(&a);
        Ok(Self {
            n,
            a,
            hermiticity_residual,
        })
    }

    /// Hermitize `a` and remember how far it was from Hermitian.
    fn hermitized(n: usize, a: CMatrix) -> Result<Self> {
        let residual = relative_hermiticity(&a);
        if residual > KOSSAKOWSKI_HERMITIAN_TOL {
            return Err(Error::NotHermitian { residual });
        }
        Ok(Self {
            n,
            a: hermitize(&a),
            hermiticity_residual: residual,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.n * self.n - 1
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.a
    }

    /// Relative `||A - A^H||_F` before Hermitization.
    pub fn hermiticity_residual(&self) -> f64 {
        self.hermiticity_residual
    }

    pub(crate) fn require_hermitian(&self) -> Result<()> {
        let residual = relative_hermiticity(&self.a);
        if residual > KOSSAKOWSKI_HERMITIAN_TOL {
            return Err(Error::NotHermitian { residual });
        }
        Ok(())
    }
}

fn relative_hermiticity(a: &CMatrix) -> f64 {
    hermiticity_residual(a) / frobenius_norm(a.view()).max(1.0)
}

/// Real affine generator `dv/dt = R v + k` of the coherence vector under the
/// dissipator alone.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceAffineForm {
    pub rates: Array2<f64>,
    pub drive: Array1<f64>,
}

impl CoherenceAffineForm {
    pub fn m(&self) -> usize {
        self.drive.len()
    }

    /// `R v + k`.
    pub fn evaluate(&self, v: &Array1<f64>) -> Array1<f64> {
        self.rates.dot(v) + &self.drive
    }
}

fn check_dims(l: &Dissipator, basis: &GeneratorBasis) -> Result<()> {
    if l.n() != basis.n() {
        return Err(Error::InvalidArgument(format!(
            "dissipator acts on n = {}, basis is for n = {}",
            l.n(),
            basis.n()
        )));
    }
    Ok(())
}

fn require_valid(l: &Dissipator) -> Result<()> {
    let report = validate_dissipator(l);
    if !report.passed {
        return Err(Error::InvalidDissipator {
            trace_residual: report.trace_residual,
            hermiticity_residual: report.hermiticity_residual,
        });
    }
    Ok(())
}

/// Method 1: `a_ij = sum_{m=0}^{M} Tr(F_m F_i L[F_m] F_j)`, including `F_0`.
pub fn kossakowski_trace(l: &Dissipator, basis: &GeneratorBasis) -> Result<KossakowskiMatrix> {
    check_dims(l, basis)?;
    require_valid(l)?;
    let m = basis.m();
    let gens = basis.generators();
    let mut a = CMatrix::zeros((m, m));
    for fm in basis.matrices() {
        let image = apply(l, fm)?;
        let left: Vec<CMatrix> = gens.iter().map(|fi| fm.dot(fi)).collect();
        let right: Vec<CMatrix> = gens.iter().map(|fj| image.dot(fj)).collect();
        for (i, li) in left.iter().enumerate() {
            for (j, rj) in right.iter().enumerate() {
                a[(i, j)] += trace_of_product(li, rj);
            }
        }
    }
    KossakowskiMatrix::hermitized(basis.n(), a)
}

/// `R_sm = Tr(F_s L[F_m])` and `k_s = Tr(F_s L[I]) / n`.
pub fn coherence_form(l: &Dissipator, basis: &GeneratorBasis) -> Result<CoherenceAffineForm> {
    check_dims(l, basis)?;
    let n = basis.n();
    let m = basis.m();
    let gens = basis.generators();
    let mut rates = Array2::zeros((m, m));
    let mut imag: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for (col, fm) in gens.iter().enumerate() {
        let image = apply(l, fm)?;
        for (row, fs) in gens.iter().enumerate() {
            let z = trace_of_product(fs, &image);
            rates[(row, col)] = z.re;
            imag = imag.max(z.im.abs());
            scale = scale.max(z.re.abs());
        }
    }
    let image = apply(l, &identity(n))?;
    let mut drive = Array1::zeros(m);
    for (row, fs) in gens.iter().enumerate() {
        let z = trace_of_product(fs, &image) / n as f64;
        drive[row] = z.re;
        imag = imag.max(z.im.abs());
        scale = scale.max(z.re.abs());
    }
    let residual = imag / scale;
    if residual >= COHERENCE_IMAG_TOL {
        return Err(Error::NotHermiticityPreserving { residual });
    }
    require_valid(l)?;
    Ok(CoherenceAffineForm { rates, drive })
}

/// The structure-constant tensor mapping `vec(A)` to `vec(R)` (square part)
/// and to `(vec(R), k)` (augmented part).
#[derive(Debug)]
pub struct TransformationTensor {
    n: usize,
    square: CMatrix,
    augmented: CMatrix,
    square_singular_values: Array1<f64>,
    pinv: OnceLock<CMatrix>,
}

impl TransformationTensor {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.n * self.n - 1
    }

    /// `M^2 x M^2`.
    pub fn square(&self) -> &CMatrix {
        &self.square
    }

    /// `(M^2 + M) x M^2`.
    pub fn augmented(&self) -> &CMatrix {
        &self.augmented
    }

    /// Singular values of the square part, descending.
    pub fn square_singular_values(&self) -> &Array1<f64> {
        &self.square_singular_values
    }

    /// Pseudo-inverse of the augmented tensor, computed on first use.
    pub fn augmented_pinv(&self) -> Result<&CMatrix> {
        if let Some(p) = self.pinv.get() {
            return Ok(p);
        }
        let p = linalg::pseudo_inverse(&self.augmented)?;
        Ok(self.pinv.get_or_init(|| p))
    }
}

/// Build the transformation tensor
///
/// ```text
/// T_{sm,ik} = -1/4 sum_l [ (f_mil + i d_mil) f_kls + (f_klm - i d_klm) f_ils ]
/// ```
///
/// and append one row per `s` with entries `(i/n) f_iks`, the coefficient of
/// `a_ik` in `k_s` (from `L[I] = sum_ik a_ik [F_i, F_k]`).
pub fn build_tensor(sc: &StructureConstants, n: usize) -> Result<TransformationTensor> {
    if sc.n() != n {
        return Err(Error::InvalidArgument(format!(
            "structure constants are for n = {}, requested n = {n}",
            sc.n()
        )));
    }
    let m = sc.m();
    let (f, d) = (&sc.f, &sc.d);
    let mut square = CMatrix::zeros((m * m, m * m));
    for s in 0..m {
        for mm in 0..m {
            let row = s * m + mm;
            for i in 0..m {
                for k in 0..m {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for l in 0..m {
                        acc += Complex64::new(f[(mm, i, l)], d[(mm, i, l)]) * f[(k, l, s)]
                            + Complex64::new(f[(k, l, mm)], -d[(k, l, mm)]) * f[(i, l, s)];
                    }
                    square[(row, i * m + k)] = acc * -0.25;
                }
            }
        }
    }

    let mut augmented = CMatrix::zeros((m * m + m, m * m));
    augmented
        .slice_mut(ndarray::s![..m * m, ..])
        .assign(&square);
    let coeff = I / n as f64;
    for s in 0..m {
        for i in 0..m {
            for k in 0..m {
                augmented[(m * m + s, i * m + k)] = coeff * f[(i, k, s)];
            }
        }
    }

    let square_singular_values = linalg::singular_values(&square);
    let zeros = linalg::count_zero_singular_values(&square_singular_values);
    if zeros != m {
        return Err(Error::TensorConstruction(format!(
            "square tensor has {zeros} zero singular values, expected {m}"
        )));
    }
    let aug_sv = linalg::singular_values(&augmented);
    if linalg::count_zero_singular_values(&aug_sv) != 0 {
        return Err(Error::TensorConstruction(
            "augmented tensor is not of full column rank".into(),
        ));
    }

    Ok(TransformationTensor {
        n,
        square,
        augmented,
        square_singular_values,
        pinv: OnceLock::new(),
    })
}

/// `(vec R, k)` as a complex vector of length `M^2 + M`.
pub fn rate_vector(form: &CoherenceAffineForm) -> CVector {
    let m = form.m();
    let mut r = CVector::zeros(m * m + m);
    for s in 0..m {
        for mm in 0..m {
            r[s * m + mm] = Complex64::new(form.rates[(s, mm)], 0.0);
        }
        r[m * m + s] = Complex64::new(form.drive[s], 0.0);
    }
    r
}

/// Method 2: `vec(A) = T^+ (vec R, k)`.
pub fn kossakowski_pinv(
    form: &CoherenceAffineForm,
    t: &TransformationTensor,
) -> Result<KossakowskiMatrix> {
    let m = t.m();
    if form.m() != m || form.rates.dim() != (m, m) {
        return Err(Error::InvalidArgument(format!(
            "coherence form has M = {}, tensor expects M = {m}",
            form.m()
        )));
    }
    let r = rate_vector(form);
    let a = t.augmented_pinv()?.dot(&r);
    let fitted = t.augmented().dot(&a) - &r;
    let r_norm = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let residual = fitted.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() / r_norm.max(1.0);
    if residual >= PINV_RESIDUAL_TOL {
        return Err(Error::NotGklsRepresentable { residual });
    }
    let a = Array2::from_shape_vec((m, m), a.to_vec()).expect("length M^2");
    KossakowskiMatrix::hermitized(t.n(), a)
}

/// Supermatrix of the GKLS dissipator with coefficient matrix `A`.
pub fn reconstruct_dissipator(
    a: &KossakowskiMatrix,
    basis: &GeneratorBasis,
    ordering: VecOrdering,
) -> Result<Dissipator> {
    if a.n() != basis.n() {
        return Err(Error::InvalidArgument(format!(
            "Kossakowski matrix is for n = {}, basis for n = {}",
            a.n(),
            basis.n()
        )));
    }
    a.require_hermitian()?;
    let n = basis.n();
    let gens = basis.generators();
    let coeffs = a.matrix();
    // B_i = sum_k a_ik F_k, G = sum_ik a_ik F_k F_i = sum_i B_i F_i
    let partial: Vec<CMatrix> = (0..gens.len())
        .map(|i| {
            gens.iter()
                .enumerate()
                .fold(CMatrix::zeros((n, n)), |acc, (k, fk)| {
                    acc + fk.mapv(|z| z * coeffs[(i, k)])
                })
        })
        .collect();
    let g = partial
        .iter()
        .zip(gens)
        .fold(CMatrix::zeros((n, n)), |acc, (b, f)| acc + b.dot(f));

    Dissipator::from_map(n, ordering, |x| {
        let mut out = (x.dot(&g) + g.dot(x)).mapv(|z| z * -0.5);
        for (fi, bi) in gens.iter().zip(&partial) {
            out = out + fi.dot(x).dot(bi);
        }
        out
    })
}

/// `||A1 - A2||_F`.
pub fn frobenius_distance(a1: &KossakowskiMatrix, a2: &KossakowskiMatrix) -> f64 {
    frobenius_norm((a1.matrix() - a2.matrix()).view())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sun_basis::{generate_basis, structure_constants};
    use crate::superop::Dissipator;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Pure dephasing `(gamma/2) (sz rho sz - rho)` on a qubit, tabulated
    /// entrywise: diagonals are unchanged, coherences decay at `gamma`.
    fn dephasing(gamma: f64) -> Dissipator {
        let mut m = CMatrix::zeros((4, 4));
        m[(1, 1)] = c(-gamma, 0.0);
        m[(2, 2)] = c(-gamma, 0.0);
        Dissipator::new(2, VecOrdering::RowMajor, m).unwrap()
    }

    /// Spontaneous decay in basis (excited, ground), tabulated entrywise.
    fn decay(gamma: f64) -> Dissipator {
        let mut m = CMatrix::zeros((4, 4));
        m[(0, 0)] = c(-gamma, 0.0);
        m[(1, 1)] = c(-gamma / 2.0, 0.0);
        m[(2, 2)] = c(-gamma / 2.0, 0.0);
        m[(3, 0)] = c(gamma, 0.0);
        Dissipator::new(2, VecOrdering::RowMajor, m).unwrap()
    }

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn decay_kossakowski(gamma: f64) -> CMatrix {
        let h = gamma / 2.0;
        ndarray::array![
            [c(h, 0.0), c(0.0, h), c(0.0, 0.0)],
            [c(0.0, -h), c(h, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]
        ]
    }

    #[test]
    fn trace_method_on_dephasing() {
        // sz = sqrt(2) F_3, so (gamma/2)(sz rho sz - rho) has a_33 = gamma
        let basis = generate_basis(2).unwrap();
        let a = kossakowski_trace(&dephasing(0.8), &basis).unwrap();
        let mut want = CMatrix::zeros((3, 3));
        want[(2, 2)] = c(0.8, 0.0);
        assert!(max_abs(&(a.matrix() - &want)) < 1e-15);
    }

    #[test]
    fn trace_method_on_decay() {
        let basis = generate_basis(2).unwrap();
        let a = kossakowski_trace(&decay(1.3), &basis).unwrap();
        assert!(max_abs(&(a.matrix() - &decay_kossakowski(1.3))) < 1e-15);
        assert!(a.hermiticity_residual() < 1e-15);
    }

    #[test]
    fn zero_dissipator_gives_zero_everywhere() {
        let basis = generate_basis(3).unwrap();
        let l = Dissipator::zeros(3, VecOrdering::Block3).unwrap();
        assert_eq!(kossakowski_trace(&l, &basis).unwrap().matrix(), &CMatrix::zeros((8, 8)));
        let form = coherence_form(&l, &basis).unwrap();
        assert!(form.rates.iter().all(|&x| x == 0.0) && form.drive.iter().all(|&x| x == 0.0));
        let t = build_tensor(&structure_constants(&basis).unwrap(), 3).unwrap();
        let a = kossakowski_pinv(&form, &t).unwrap();
        assert!(max_abs(a.matrix()) < 1e-15);
    }

    #[test]
    fn pinv_method_on_decay() {
        let basis = generate_basis(2).unwrap();
        let t = build_tensor(&structure_constants(&basis).unwrap(), 2).unwrap();
        let form = coherence_form(&decay(1.3), &basis).unwrap();
        let a = kossakowski_pinv(&form, &t).unwrap();
        assert!(max_abs(&(a.matrix() - &decay_kossakowski(1.3))) < 1e-12);
    }

    #[test]
    fn invalid_dissipator_is_rejected() {
        let basis = generate_basis(2).unwrap();
        let mut m = decay(1.0).into_matrix();
        m[(0, 0)] += c(0.1, 0.0);
        let bad = Dissipator::new(2, VecOrdering::RowMajor, m).unwrap();
        assert!(matches!(
            kossakowski_trace(&bad, &basis),
            Err(Error::InvalidDissipator { .. })
        ));
        assert!(matches!(
            coherence_form(&bad, &basis),
            Err(Error::InvalidDissipator { .. })
        ));
    }

    #[test]
    fn non_hermiticity_preserving_map_is_rejected_by_coherence_form() {
        let basis = generate_basis(2).unwrap();
        let mut m = CMatrix::zeros((4, 4));
        m[(1, 1)] = c(0.0, 1.0);
        let l = Dissipator::new(2, VecOrdering::RowMajor, m).unwrap();
        assert!(matches!(
            coherence_form(&l, &basis),
            Err(Error::NotHermiticityPreserving { .. })
        ));
    }

    #[test]
    fn hamiltonian_part_is_not_gkls_representable() {
        // -i[sz, rho]: trace-preserving and Hermiticity-preserving, but not
        // a dissipator; the least-squares system is inconsistent.
        let basis = generate_basis(2).unwrap();
        let mut m = CMatrix::zeros((4, 4));
        m[(1, 1)] = c(0.0, -2.0);
        m[(2, 2)] = c(0.0, 2.0);
        let l = Dissipator::new(2, VecOrdering::RowMajor, m).unwrap();
        let form = coherence_form(&l, &basis).unwrap();
        let t = build_tensor(&structure_constants(&basis).unwrap(), 2).unwrap();
        assert!(matches!(
            kossakowski_pinv(&form, &t),
            Err(Error::NotGklsRepresentable { .. })
        ));
    }

    #[test]
    fn reconstruct_dephasing_matches_hand_built() {
        let basis = generate_basis(2).unwrap();
        let mut a = CMatrix::zeros((3, 3));
        a[(2, 2)] = c(0.8, 0.0);
        let l = reconstruct_dissipator(
            &KossakowskiMatrix::new(2, a).unwrap(),
            &basis,
            VecOrdering::RowMajor,
        )
        .unwrap();
        assert!(max_abs(&(l.matrix() - dephasing(0.8).matrix())) < 1e-15);
    }

    #[test]
    fn reconstruct_zero_and_non_hermitian() {
        let basis = generate_basis(3).unwrap();
        let zero = KossakowskiMatrix::new(3, CMatrix::zeros((8, 8))).unwrap();
        let l = reconstruct_dissipator(&zero, &basis, VecOrdering::RowMajor).unwrap();
        assert_eq!(l.matrix(), &CMatrix::zeros((9, 9)));

        let mut a = CMatrix::zeros((8, 8));
        a[(0, 1)] = c(1.0, 0.0);
        let bad = KossakowskiMatrix::new(3, a).unwrap();
        assert!(matches!(
            reconstruct_dissipator(&bad, &basis, VecOrdering::RowMajor),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn tensor_shapes_and_ranks() {
        for (n, zeros) in [(2, 3), (3, 8)] {
            let basis = generate_basis(n).unwrap();
            let t = build_tensor(&structure_constants(&basis).unwrap(), n).unwrap();
            let m = n * n - 1;
            assert_eq!(t.square().dim(), (m * m, m * m));
            assert_eq!(t.augmented().dim(), (m * m + m, m * m));
            assert_eq!(linalg::count_zero_singular_values(t.square_singular_values()), zeros);
            let p = t.augmented_pinv().unwrap();
            let eye = p.dot(t.augmented());
            assert!(max_abs(&(eye - identity(m * m))) < 1e-10);
        }
    }

    #[test]
    fn tensor_dimension_mismatch() {
        let sc = structure_constants(&generate_basis(2).unwrap()).unwrap();
        assert!(build_tensor(&sc, 3).is_err());
    }
}
