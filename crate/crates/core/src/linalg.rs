//! Dense complex linear algebra for the small matrices this crate works with
//! (at most a few hundred rows).
//!
//! Everything here is written against `ndarray::Array2<Complex64>` and has no
//! LAPACK dependency:
//!
//! * [`hermitian_eig`] is a cyclic complex Jacobi eigensolver.
//! * [`singular_values`] is a one-sided (Hestenes) Jacobi SVD. It keeps high
//!   relative accuracy for the smallest singular values, which matters when
//!   counting the exact zeros of a structure-constant tensor.
//! * [`pseudo_inverse`] solves the Gram system `(T^H T) X = T^H`.
//! * [`solve`] / [`solve_many`] use LU with partial row pivoting.

use ndarray::{s, Array1, Array2, ArrayView2, Axis};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = Array2<Complex64>;
pub type CVector = Array1<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative Hermiticity tolerance accepted by the eigensolver.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// A singular value below `ZERO_SV_REL * sigma_max` counts as zero.
pub const ZERO_SV_REL: f64 = 1e-10;

const JACOBI_OFF_REL: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;

pub fn identity(n: usize) -> CMatrix {
    Array2::from_diag_elem(n, ONE)
}

/// Conjugate transpose.
pub fn adjoint(m: &CMatrix) -> CMatrix {
    m.t().mapv(|z| z.conj())
}

pub fn frobenius_norm(m: ArrayView2<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diag().sum()
}

/// `Tr(A B)` without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let mut acc = ZERO;
    for (i, row) in a.outer_iter().enumerate() {
        for (k, &aik) in row.iter().enumerate() {
            acc += aik * b[(k, i)];
        }
    }
    acc
}

/// `||H - H^H||_F`.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            acc += (m[(i, k)] - m[(k, i)].conj()).norm_sqr();
        }
    }
    acc.sqrt()
}

/// `(H + H^H) / 2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + &adjoint(m)).mapv(|z| z * 0.5)
}

fn require_square(m: &CMatrix, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidArgument(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted in descending order and column `k` of
/// `eigenvectors` belongs to `eigenvalues[k]`. Each eigenvector is scaled so
/// that its first non-negligible component is real and positive.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Array1<f64>,
    pub eigenvectors: CMatrix,
}

impl HermitianEig {
    /// `U diag(f(lambda)) U^H`.
    pub fn reassemble_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for (k, mut col) in scaled.axis_iter_mut(Axis(1)).enumerate() {
            let w = f(self.eigenvalues[k]);
            col.mapv_inplace(|z| z * w);
        }
        scaled.dot(&adjoint(u))
    }
}

/// Cyclic Jacobi diagonalization of a complex Hermitian matrix.
///
/// The input is Hermitized as `(H + H^H)/2` first; inputs further than
/// `1e-10 * max(1, ||H||_F)` from Hermitian are rejected.
pub fn hermitian_eig(h: &CMatrix) -> Result<HermitianEig> {
    let m = require_square(h, "Hermitian eigenproblem input")?;
    let norm = frobenius_norm(h.view());
    let residual = hermiticity_residual(h);
    if residual > HERMITIAN_TOL * norm.max(1.0) {
        return Err(Error::NotHermitian { residual });
    }

    let mut a = hermitize(h);
    let mut v = identity(m);
    let scale = frobenius_norm(a.view());

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..m)
            .flat_map(|p| (0..m).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_OFF_REL * scale || off == 0.0 {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..m).collect();
    let diag: Vec<f64> = (0..m).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&x, &y| diag[y].total_cmp(&diag[x]));

    let eigenvalues = Array1::from_iter(order.iter().map(|&i| diag[i]));
    let mut eigenvectors = CMatrix::zeros((m, m));
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src).to_owned();
        fix_phase(&mut col);
        eigenvectors.column_mut(dst).assign(&col);
    }
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

fn jacobi_rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip rotations that cannot change the diagonal in floating point.
    if mag < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let phase_conj = (apq / mag).conj();
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // J = diag(1, e^{-i phi}) * [[c, s], [-s, c]] restricted to (p, q).
    let jpp = Complex64::new(c, 0.0);
    let jpq = Complex64::new(s, 0.0);
    let jqp = phase_conj * (-s);
    let jqq = phase_conj * c;

    let n = a.nrows();
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * jpp + aiq * jqp;
        a[(i, q)] = aip * jpq + aiq * jqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * jpp + viq * jqp;
        v[(i, q)] = vip * jpq + viq * jqq;
    }
}

fn fix_phase(col: &mut CVector) {
    let biggest = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(&lead) = col.iter().find(|z| z.norm() > 1e-12 * biggest) {
        let rot = lead.conj() / lead.norm();
        col.mapv_inplace(|z| z * rot);
    }
}

/// Singular values in descending order.
///
/// Values below `1e-15 * sigma_max` are clamped to zero.
pub fn singular_values(m: &CMatrix) -> Array1<f64> {
    let mut work = if m.nrows() >= m.ncols() {
        m.clone()
    } else {
        adjoint(m)
    };
    let cols = work.ncols();
    if cols == 0 {
        return Array1::zeros(0);
    }

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for j in 0..cols {
            for k in (j + 1)..cols {
                if orthogonalize_pair(&mut work, j, k) {
                    rotated = true;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut values: Vec<f64> = work
        .axis_iter(Axis(1))
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    values.sort_by(|x, y| y.total_cmp(x));
    let top = values[0];
    for v in values.iter_mut() {
        if *v < 1e-15 * top {
            *v = 0.0;
        }
    }
    Array1::from(values)
}

fn orthogonalize_pair(w: &mut CMatrix, j: usize, k: usize) -> bool {
    let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, ZERO);
    for row in w.outer_iter() {
        let (x, y) = (row[j], row[k]);
        alpha += x.norm_sqr();
        beta += y.norm_sqr();
        gamma += x.conj() * y;
    }
    let g = gamma.norm();
    if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() {
        return false;
    }
    let phase_conj = (gamma / g).conj();
    let zeta = (beta - alpha) / (2.0 * g);
    let t = if zeta == 0.0 {
        1.0
    } else {
        zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = c * t;
    for mut row in w.outer_iter_mut() {
        let x = row[j];
        let y = row[k] * phase_conj;
        row[j] = x * c - y * s;
        row[k] = x * s + y * c;
    }
    true
}

/// Number of singular values below `ZERO_SV_REL * sigma_max`.
pub fn count_zero_singular_values(values: &Array1<f64>) -> usize {
    let top = values.iter().cloned().fold(0.0, f64::max);
    values.iter().filter(|&&v| v < ZERO_SV_REL * top).count()
}

/// Moore-Penrose pseudo-inverse `(T^H T)^{-1} T^H` of a tall matrix with full
/// column rank.
pub fn pseudo_inverse(t: &CMatrix) -> Result<CMatrix> {
    if t.nrows() < t.ncols() {
        return Err(Error::InvalidArgument(format!(
            "pseudo_inverse expects rows >= columns, got {}x{}",
            t.nrows(),
            t.ncols()
        )));
    }
    let sv = singular_values(t);
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let sigma_min = sv.last().copied().unwrap_or(0.0);
    if sigma_max == 0.0 || sigma_min <= ZERO_SV_REL * sigma_max {
        return Err(Error::RankDeficient {
            sigma_min,
            sigma_max,
        });
    }
    let th = adjoint(t);
    let gram = th.dot(t);
    solve_many(&gram, &th)
}

/// Solve `A x = b` for square nonsingular `A`.
pub fn solve(a: &CMatrix, b: &CVector) -> Result<CVector> {
    let rhs = b.view().insert_axis(Axis(1)).to_owned();
    let x = solve_many(a, &rhs)?;
    Ok(x.column(0).to_owned())
}

/// Solve `A X = B` column by column with one LU factorization.
pub fn solve_many(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let n = require_square(a, "system matrix")?;
    if b.nrows() != n {
        return Err(Error::InvalidArgument(format!(
            "right-hand side has {} rows, expected {n}",
            b.nrows()
        )));
    }
    let mut lu = a.clone();
    let mut x = b.clone();
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);

    for col in 0..n {
        let (pivot_row, pivot_mag) = (col..n)
            .map(|r| (r, lu[(r, col)].norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_mag <= 1e-14 * scale || pivot_mag == 0.0 {
            return Err(Error::SingularMatrix {
                column: col,
                pivot: pivot_mag,
            });
        }
        if pivot_row != col {
            swap_rows(&mut lu, pivot_row, col);
            swap_rows(&mut x, pivot_row, col);
        }
        let pivot = lu[(col, col)];
        for r in (col + 1)..n {
            let factor = lu[(r, col)] / pivot;
            if factor == ZERO {
                continue;
            }
            lu[(r, col)] = ZERO;
            for c in (col + 1)..n {
                let v = lu[(col, c)];
                lu[(r, c)] -= factor * v;
            }
            for c in 0..x.ncols() {
                let v = x[(col, c)];
                x[(r, c)] -= factor * v;
            }
        }
    }

    for col in (0..n).rev() {
        let pivot = lu[(col, col)];
        let upper = lu.slice(s![col, (col + 1)..]).to_owned();
        for c in 0..x.ncols() {
            let mut acc = x[(col, c)];
            for (off, &u) in upper.iter().enumerate() {
                acc -= u * x[(col + 1 + off, c)];
            }
            x[(col, c)] = acc / pivot;
        }
    }
    Ok(x)
}

fn swap_rows(m: &mut CMatrix, i: usize, j: usize) {
    for c in 0..m.ncols() {
        m.swap((i, c), (j, c));
    }
}
