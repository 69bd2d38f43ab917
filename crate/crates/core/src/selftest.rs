//! Runtime invariant suite behind `kossak selftest`.
//!
//! Every check is cheap enough that the whole table runs in a few seconds.
//! The model builders are taken as a [`ModelSet`] so a broken transcription
//! of a model matrix shows up as failed rows.

use std::fmt;
use std::time::Instant;

use ndarray::Array1;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cp::{compare_spectra, count_nonzero, cp_verdict, lindblad_form, restore_cp};
use crate::error::Result;
use crate::io::{dissipator_from_json, dissipator_to_json};
use crate::kossakowski::{
    build_tensor, coherence_form, frobenius_distance, kossakowski_pinv, kossakowski_trace,
    reconstruct_dissipator, KossakowskiMatrix,
};
use crate::linalg::{adjoint, count_zero_singular_values, frobenius_norm, hermitian_eig, CMatrix};
use crate::models::{v_system_coherence_oracle, Model, ModelSet, PsbrParams};
use crate::sun_basis::{check_sum_rule, closure_residuals, generate_basis, structure_constants};
use crate::superop::{devec, validate_dissipator, vec, Dissipator, VecOrdering};
use crate::sweep::{run_sweep, SweepRow, SweepSpec};

const SEED: u64 = 0x5eed_1234;

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelfTestReport {
    pub checks: Vec<CheckOutcome>,
    pub seconds: f64,
}

impl SelfTestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for SelfTestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{tag}  {:width$}  {}", c.name, c.detail)?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(
            f,
            "{} checks, {} failed, {:.2} s",
            self.checks.len(),
            failed,
            self.seconds
        )
    }
}

type Check = (bool, String);

/// Grid used for the per-point model checks.
pub fn model_grid() -> Vec<PsbrParams> {
    let mut grid = Vec::new();
    for ratio in [0.1, 0.5, 1.0, 2.0, 10.0] {
        for nbar in [0.01, 1.0, 100.0] {
            for p in [0.0, 0.5, 1.0] {
                grid.push(PsbrParams::new(ratio, 1.0, nbar, p));
            }
        }
    }
    grid
}

pub fn random_hermitian(rng: &mut impl Rng, m: usize) -> CMatrix {
    let mut a = CMatrix::zeros((m, m));
    for i in 0..m {
        a[(i, i)] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
        for j in i + 1..m {
            let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
    a
}

/// Eigenvectors of a random Hermitian matrix form a random unitary.
pub fn random_unitary(rng: &mut impl Rng, m: usize) -> CMatrix {
    hermitian_eig(&random_hermitian(rng, m))
        .expect("Hermitian by construction")
        .eigenvectors
}

fn outcome(name: &'static str, check: Result<Check>) -> CheckOutcome {
    match check {
        Ok((passed, detail)) => CheckOutcome { name, passed, detail },
        Err(e) => CheckOutcome {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn basis_orthonormality() -> Result<Check> {
    let mut worst: f64 = 0.0;
    for n in 2..=5 {
        worst = worst.max(generate_basis(n)?.orthonormality_residual());
    }
    Ok((worst < 1e-12, format!("max residual {worst:.1e} for n = 2..5")))
}

fn algebra_closure() -> Result<Check> {
    let mut worst: f64 = 0.0;
    for n in 2..=4 {
        let basis = generate_basis(n)?;
        let (c, a) = closure_residuals(&basis, &structure_constants(&basis)?);
        worst = worst.max(c).max(a);
    }
    Ok((worst < 1e-12, format!("max residual {worst:.1e} for n = 2..4")))
}

fn sum_rule() -> Result<Check> {
    let mut worst: f64 = 0.0;
    for n in 2..=3 {
        let sc = structure_constants(&generate_basis(n)?)?;
        worst = worst.max(check_sum_rule(&sc, &build_tensor(&sc, n)?)?);
    }
    Ok((worst < 1e-12, format!("max residual {worst:.1e} for n = 2, 3")))
}

fn tensor_rank() -> Result<Check> {
    let mut counts = Vec::new();
    let mut ok = true;
    for n in 2..=4 {
        let sc = structure_constants(&generate_basis(n)?)?;
        let t = build_tensor(&sc, n)?;
        let zeros = count_zero_singular_values(t.square_singular_values());
        ok &= zeros == n * n - 1;
        if n <= 3 {
            ok &= t.augmented_pinv().is_ok();
        }
        counts.push(format!("n={n}: {zeros}"));
    }
    Ok((ok, format!("zero singular values {}", counts.join(", "))))
}

fn vectorization_roundtrip(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for (n, ordering) in [(2, VecOrdering::RowMajor), (3, VecOrdering::RowMajor), (3, VecOrdering::Block3)] {
        for _ in 0..10 {
            let x = random_hermitian(rng, n);
            let back = devec(&vec(&x, ordering)?, ordering)?;
            worst = worst.max(frobenius_norm((&back - &x).view()));
        }
    }
    Ok((worst == 0.0, format!("max deviation {worst:.1e}")))
}

fn model_validity(models: &ModelSet) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for params in model_grid() {
        for model in [Model::V, Model::Lambda] {
            let r = validate_dissipator(&models.build(model, &params)?);
            worst = worst.max(r.trace_residual).max(r.hermiticity_residual);
        }
    }
    Ok((worst <= crate::superop::DISSIPATOR_TOL, format!("max residual {worst:.1e}")))
}

fn method_agreement(models: &ModelSet) -> Result<Check> {
    let basis = generate_basis(3)?;
    let sc = structure_constants(&basis)?;
    let t = build_tensor(&sc, 3)?;
    let mut worst: f64 = 0.0;
    for params in model_grid() {
        for model in [Model::V, Model::Lambda] {
            let l = models.build(model, &params)?;
            let a1 = kossakowski_trace(&l, &basis)?;
            let a2 = kossakowski_pinv(&coherence_form(&l, &basis)?, &t)?;
            let scale = frobenius_norm(a1.matrix().view()).max(1.0);
            worst = worst.max(frobenius_distance(&a1, &a2) / scale);
        }
    }
    Ok((worst < 1e-9, format!("max relative distance {worst:.1e}")))
}

fn coherence_table(models: &ModelSet) -> Result<Check> {
    let basis = generate_basis(3)?;
    let mut worst: f64 = 0.0;
    for params in model_grid() {
        let form = coherence_form(&(models.v)(&params)?, &basis)?;
        let oracle = v_system_coherence_oracle(&params)?;
        let dr = (&form.rates - &oracle.rates).iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let dk = (&form.drive - &oracle.drive).iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        worst = worst.max(dr).max(dk);
    }
    Ok((worst < 1e-11, format!("max entry deviation {worst:.1e}")))
}

fn model_reconstruction(models: &ModelSet) -> Result<Check> {
    let basis = generate_basis(3)?;
    let mut worst: f64 = 0.0;
    for params in model_grid() {
        for model in [Model::V, Model::Lambda] {
            let l = models.build(model, &params)?;
            let a = kossakowski_trace(&l, &basis)?;
            let back = reconstruct_dissipator(&a, &basis, l.ordering())?;
            worst = worst.max(frobenius_norm((back.matrix() - l.matrix()).view()));
        }
    }
    Ok((worst < 1e-10, format!("max Frobenius deviation {worst:.1e}")))
}

fn random_roundtrip(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for n in 2..=3 {
        let basis = generate_basis(n)?;
        for _ in 0..20 {
            let a = KossakowskiMatrix::new(n, random_hermitian(rng, n * n - 1))?;
            let l = reconstruct_dissipator(&a, &basis, VecOrdering::RowMajor)?;
            let l2 = reconstruct_dissipator(&kossakowski_trace(&l, &basis)?, &basis, VecOrdering::RowMajor)?;
            worst = worst.max(frobenius_norm((l2.matrix() - l.matrix()).view()));
        }
    }
    Ok((worst < 1e-10, format!("max Frobenius deviation {worst:.1e}")))
}

fn lindblad_reassembly(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut worst: f64 = 0.0;
    let mut gram: f64 = 0.0;
    for n in 2..=3 {
        let basis = generate_basis(n)?;
        for _ in 0..10 {
            let a = KossakowskiMatrix::new(n, random_hermitian(rng, n * n - 1))?;
            let form = lindblad_form(&a, &basis)?;
            for (j, lj) in form.operators.iter().enumerate() {
                for (k, lk) in form.operators.iter().enumerate() {
                    let g = crate::linalg::trace_of_product(&adjoint(lj), lk);
                    let want = if j == k { 1.0 } else { 0.0 };
                    gram = gram.max((g - want).norm());
                }
            }
            let direct = reconstruct_dissipator(&a, &basis, VecOrdering::RowMajor)?;
            let rebuilt = form.to_dissipator(VecOrdering::RowMajor)?;
            worst = worst.max(frobenius_norm((direct.matrix() - rebuilt.matrix()).view()));
        }
    }
    Ok((
        worst < 1e-10 && gram < 1e-10,
        format!("reassembly {worst:.1e}, operator Gram {gram:.1e}"),
    ))
}

fn restoration(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut idem: f64 = 0.0;
    let mut dist: f64 = 0.0;
    let mut psd = true;
    for _ in 0..20 {
        let a = KossakowskiMatrix::new(3, random_hermitian(rng, 8))?;
        let fixed = restore_cp(&a)?;
        idem = idem.max(frobenius_distance(&restore_cp(&fixed)?, &fixed));
        let negative: f64 = cp_verdict(&a, None)?
            .spectrum
            .iter()
            .filter(|&&l| l < 0.0)
            .map(|l| l * l)
            .sum();
        dist = dist.max((frobenius_distance(&a, &fixed).powi(2) - negative).abs());
        psd &= cp_verdict(&fixed, None)?.is_cp;
    }
    Ok((
        idem < 1e-12 && dist < 1e-10 && psd,
        format!("idempotence {idem:.1e}, distance identity {dist:.1e}"),
    ))
}

fn rotation_invariance(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut worst: f64 = 0.0;
    let mut same_verdict = true;
    for _ in 0..20 {
        let a = KossakowskiMatrix::new(3, random_hermitian(rng, 8))?;
        let u = random_unitary(rng, 8);
        let rotated = KossakowskiMatrix::new(3, u.dot(a.matrix()).dot(&adjoint(&u)))?;
        worst = worst.max(compare_spectra(&a, &rotated)?);
        same_verdict &= cp_verdict(&a, None)?.is_cp == cp_verdict(&rotated, None)?.is_cp;
    }
    Ok((worst < 1e-10 && same_verdict, format!("max spectral change {worst:.1e}")))
}

fn json_roundtrip(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut exact = true;
    for _ in 0..10 {
        let m = CMatrix::from_shape_fn((9, 9), |_| {
            Complex64::new(rng.random::<f64>() * 1e3 - 5e2, rng.random::<f64>() * 1e-7)
        });
        let l = Dissipator::new(3, VecOrdering::Block3, m)?;
        let back = dissipator_from_json(&dissipator_to_json(&l)?)?;
        exact &= l
            .matrix()
            .iter()
            .zip(back.matrix())
            .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits());
    }
    Ok((exact, "bit-exact".to_string()))
}

fn two_level_fixtures() -> Result<Check> {
    let basis = generate_basis(2)?;
    let sc = structure_constants(&basis)?;
    let t = build_tensor(&sc, 2)?;
    let gamma = 0.8;
    let sigma_minus = {
        let mut s = CMatrix::zeros((2, 2));
        s[(1, 0)] = Complex64::new(1.0, 0.0);
        s
    };
    let sz = basis.generator(3).clone();
    let channel = |op: CMatrix, rate: f64| {
        let dag = adjoint(&op);
        let number = dag.dot(&op);
        Dissipator::from_map(2, VecOrdering::RowMajor, move |x| {
            let anti = number.dot(x) + x.dot(&number);
            (op.dot(x).dot(&dag) - anti.mapv(|z| z * 0.5)).mapv(|z| z * rate)
        })
    };
    let mut worst: f64 = 0.0;
    let mut dephasing_axis = 0.0;
    for (l, axis) in [(channel(sigma_minus, gamma)?, None), (channel(sz, gamma)?, Some(2))] {
        let a1 = kossakowski_trace(&l, &basis)?;
        let a2 = kossakowski_pinv(&coherence_form(&l, &basis)?, &t)?;
        worst = worst.max(frobenius_distance(&a1, &a2));
        let eig = hermitian_eig(a1.matrix())?;
        let want = Array1::from(vec![gamma, 0.0, 0.0]);
        worst = worst.max((&eig.eigenvalues - &want).iter().fold(0.0_f64, |m, x| m.max(x.abs())));
        if let Some(k) = axis {
            dephasing_axis = eig.eigenvectors[(k, 0)].norm();
        }
    }
    Ok((
        worst < 1e-12 && (dephasing_axis - 1.0).abs() < 1e-12,
        format!("max deviation {worst:.1e}"),
    ))
}

fn sweep_checks(models: &ModelSet) -> Result<Vec<CheckOutcome>> {
    let rows = run_sweep(&SweepSpec::default(), models)?;
    let mut out = Vec::new();

    let cp_fail = rows.iter().filter(|r| !r.is_cp).count();
    let min_ev = rows.iter().map(|r| r.min_eigenvalue).fold(f64::INFINITY, f64::min);
    out.push(CheckOutcome {
        name: "sweep complete positivity",
        passed: cp_fail == 0,
        detail: format!("{} points, {cp_fail} not CP, min eigenvalue {min_ev:.1e}", rows.len()),
    });

    let diff = rows.iter().filter_map(|r| r.vlambda_diff).fold(0.0_f64, f64::max);
    out.push(CheckOutcome {
        name: "V/Lambda spectral identity",
        passed: diff < 1e-10,
        detail: format!("max sorted-eigenvalue difference {diff:.1e}"),
    });

    let mut counts_ok = true;
    for r in rows.iter().filter(|r| r.nbar == 0.01) {
        let want = if r.p == 1.0 { 2 } else { 4 };
        counts_ok &= count_nonzero(&r.eigenvalues) == want;
    }
    out.push(CheckOutcome {
        name: "nonzero counts at nbar = 0.01",
        passed: counts_ok,
        detail: "2 for p = 1, 4 for p < 1".to_string(),
    });

    out.push(monotonicity(&rows));
    out.push(outcome("crossing structure", crossings(models)));
    Ok(out)
}

/// Sorted eigenvalues never decrease along the ratio axis.
pub fn monotonicity(rows: &[SweepRow]) -> CheckOutcome {
    let mut worst: f64 = 0.0;
    for pair in rows.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if a.model != b.model || a.nbar != b.nbar || a.p != b.p {
            continue;
        }
        let scale = a.eigenvalues[0].max(b.eigenvalues[0]).max(1.0);
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            worst = worst.max((x - y) / scale);
        }
    }
    CheckOutcome {
        name: "monotone in gamma1/gamma2",
        passed: worst <= 1e-12,
        detail: format!("largest relative decrease {worst:.1e}"),
    }
}

/// At `nbar = 0.01`: degenerate pairs `ev1 = ev2`, `ev3 = ev4` at equal
/// decay rates for `p = 0`, and a gap bounded away from zero for `p = 1/2`.
fn crossings(models: &ModelSet) -> Result<Check> {
    let mut ratios = SweepSpec::default().ratios;
    ratios.push(1.0);
    ratios.sort_by(f64::total_cmp);
    let spec = SweepSpec {
        models: vec![Model::V, Model::Lambda],
        ratios,
        nbars: vec![0.01],
        ps: vec![0.0, 0.5],
        ..SweepSpec::default()
    };
    let rows = run_sweep(&spec, models)?;
    let mut degeneracy: f64 = 0.0;
    let mut min_gap = f64::INFINITY;
    let mut gap_ok = true;
    for r in &rows {
        let ev = &r.eigenvalues;
        if r.p == 0.0 && r.ratio == 1.0 {
            degeneracy = degeneracy.max((ev[0] - ev[1]).abs()).max((ev[2] - ev[3]).abs());
        }
        if r.p == 0.5 {
            let gap = ev[..4].windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
            min_gap = min_gap.min(gap);
            gap_ok &= gap >= 1e-6 * ev[0];
        }
    }
    Ok((
        degeneracy < 1e-10 && gap_ok,
        format!("p = 0 degeneracy {degeneracy:.1e}, p = 1/2 min gap {min_gap:.2e}"),
    ))
}

pub fn run_selftest(models: &ModelSet) -> SelfTestReport {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut checks = vec![
        outcome("basis orthonormality", basis_orthonormality()),
        outcome("commutator/anticommutator closure", algebra_closure()),
        outcome("tensor sum rule", sum_rule()),
        outcome("tensor rank", tensor_rank()),
        outcome("vec/devec roundtrip", vectorization_roundtrip(&mut rng)),
        outcome("model dissipators valid", model_validity(models)),
        outcome("trace vs pinv extraction", method_agreement(models)),
        outcome("V coherence rates table", coherence_table(models)),
        outcome("model reconstruction", model_reconstruction(models)),
        outcome("random A roundtrip", random_roundtrip(&mut rng)),
        outcome("Lindblad form reassembly", lindblad_reassembly(&mut rng)),
        outcome("CP restoration", restoration(&mut rng)),
        outcome("CP rotation invariance", rotation_invariance(&mut rng)),
        outcome("JSON roundtrip", json_roundtrip(&mut rng)),
        outcome("two-level fixtures", two_level_fixtures()),
    ];
    match sweep_checks(models) {
        Ok(rows) => checks.extend(rows),
        Err(e) => checks.push(CheckOutcome {
            name: "default sweep",
            passed: false,
            detail: format!("error: {e}"),
        }),
    }
    SelfTestReport {
        checks,
        seconds: start.elapsed().as_secs_f64(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::models::v_system_dissipator;

    #[test]
    fn passes_with_shipped_models() {
        let report = run_selftest(&ModelSet::default());
        assert!(report.passed(), "{report}");
    }

    fn perturbed_v(params: &PsbrParams) -> Result<Dissipator> {
        let l = v_system_dissipator(params)?;
        let mut m = l.matrix().clone();
        // rho12 coherence decay, off by 1%
        m[(3, 3)] *= 1.01;
        Dissipator::new(3, l.ordering(), m)
    }

    fn perturbed_v_pair(params: &PsbrParams) -> Result<Dissipator> {
        let l = v_system_dissipator(params)?;
        let mut m = l.matrix().clone();
        // rho12 and rho21 together, so the map stays Hermiticity preserving
        m[(3, 3)] *= 1.01;
        m[(4, 4)] *= 1.01;
        Dissipator::new(3, l.ordering(), m)
    }

    fn failures(models: &ModelSet) -> Vec<&'static str> {
        let report = run_selftest(models);
        assert!(!report.passed());
        report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }

    #[test]
    fn fails_with_perturbed_v_entry() {
        let failed = failures(&ModelSet {
            v: perturbed_v,
            ..ModelSet::default()
        });
        assert!(failed.contains(&"model dissipators valid"), "{failed:?}");
        assert!(failed.contains(&"V coherence rates table"), "{failed:?}");
    }

    #[test]
    fn fails_with_consistently_perturbed_v_pair() {
        let failed = failures(&ModelSet {
            v: perturbed_v_pair,
            ..ModelSet::default()
        });
        assert!(!failed.contains(&"model dissipators valid"), "{failed:?}");
        assert!(failed.contains(&"V coherence rates table"), "{failed:?}");
        assert!(failed.contains(&"V/Lambda spectral identity"), "{failed:?}");
    }

    #[test]
    fn errors_become_failed_rows() {
        let c = outcome("x", Err(Error::InvalidArgument("boom".into())));
        assert!(!c.passed);
        assert!(c.detail.contains("boom"));
    }
}
