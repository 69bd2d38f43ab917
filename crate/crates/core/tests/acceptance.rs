//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on any FAIL.

use std::process::ExitCode;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kossak_core::linalg::{adjoint, count_zero_singular_values, frobenius_norm, hermitian_eig, singular_values};
use kossak_core::sun_basis::check_sum_rule;
use kossak_core::{
    build_tensor, coherence_form, compare_spectra, count_nonzero, cp_verdict, frobenius_distance,
    generate_basis, kossakowski_pinv, kossakowski_trace, reconstruct_dissipator, run_sweep,
    structure_constants, v_system_coherence_oracle, CMatrix, Dissipator, KossakowskiMatrix, Model,
    ModelSet, PsbrParams, SweepSpec, VecOrdering,
};

type Outcome = Result<String, String>;

fn grid() -> Vec<PsbrParams> {
    let mut g = Vec::new();
    for ratio in [0.1, 0.5, 1.0, 2.0, 10.0] {
        for nbar in [0.01, 1.0, 100.0] {
            for p in [0.0, 0.5, 1.0] {
                g.push(PsbrParams::new(ratio, 1.0, nbar, p));
            }
        }
    }
    g
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err(e: kossak_core::Error) -> String {
    format!("error: {e}")
}

fn cross_method() -> Outcome {
    let basis = generate_basis(3).map_err(err)?;
    let t = build_tensor(&structure_constants(&basis).map_err(err)?, 3).map_err(err)?;
    let models = ModelSet::default();
    let mut worst: f64 = 0.0;
    for params in grid() {
        for model in [Model::V, Model::Lambda] {
            let l = models.build(model, &params).map_err(err)?;
            let a1 = kossakowski_trace(&l, &basis).map_err(err)?;
            let a2 = kossakowski_pinv(&coherence_form(&l, &basis).map_err(err)?, &t).map_err(err)?;
            let scale = frobenius_norm(a1.matrix().view()).max(1.0);
            worst = worst.max(frobenius_distance(&a1, &a2) / scale);
        }
    }
    verdict(worst < 1e-9, format!("max ||A_trace - A_pinv||_F / max(1, ||A||_F) = {worst:.2e}"))
}

fn default_sweep() -> Result<Vec<kossak_core::SweepRow>, String> {
    run_sweep(&SweepSpec::default(), &ModelSet::default()).map_err(err)
}

fn complete_positivity(rows: &[kossak_core::SweepRow]) -> Outcome {
    let mut worst = f64::INFINITY;
    let mut ok = rows.len() == 900;
    for r in rows {
        let scale = r.eigenvalues[0].max(1.0);
        worst = worst.min(r.min_eigenvalue / scale);
        ok &= r.eigenvalues.iter().all(|&x| x >= -1e-12 * scale);
    }
    verdict(ok, format!("{} points, min lambda / max(1, lambda_max) = {worst:.2e}", rows.len()))
}

fn spectral_identity() -> Outcome {
    let basis = generate_basis(3).map_err(err)?;
    let spec = SweepSpec::default();
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for &nbar in &spec.nbars {
        for &p in &spec.ps {
            for &ratio in &spec.ratios {
                let params = PsbrParams::new(ratio, 1.0, nbar, p);
                let v = kossak_core::v_system_dissipator(&params).map_err(err)?;
                let l = kossak_core::lambda_system_dissipator(&params).map_err(err)?;
                let av = kossakowski_trace(&v, &basis).map_err(err)?;
                let al = kossakowski_trace(&l, &basis).map_err(err)?;
                worst = worst.max(compare_spectra(&av, &al).map_err(err)?);
                points += 1;
            }
        }
    }
    verdict(worst < 1e-10, format!("{points} points, max sorted-eigenvalue difference {worst:.2e}"))
}

fn nonzero_counts(rows: &[kossak_core::SweepRow]) -> Outcome {
    let mut bad = 0;
    let mut checked = 0;
    for r in rows.iter().filter(|r| r.nbar == 0.01) {
        let want = if r.p == 1.0 { 2 } else { 4 };
        checked += 1;
        if count_nonzero(&r.eigenvalues) != want {
            bad += 1;
        }
    }
    verdict(bad == 0 && checked == 300, format!("{checked} points at nbar = 0.01, {bad} with wrong count"))
}

fn monotone_and_crossings(rows: &[kossak_core::SweepRow]) -> Outcome {
    let mut decrease: f64 = 0.0;
    for w in rows.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if (a.model, a.nbar, a.p) != (b.model, b.nbar, b.p) {
            continue;
        }
        let scale = a.eigenvalues[0].max(1.0);
        let threshold = 1e-9 * scale;
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            if *x > threshold || *y > threshold {
                decrease = decrease.max((x - y) / scale);
            }
        }
    }

    let mut ratios = SweepSpec::default().ratios;
    ratios.push(1.0);
    ratios.sort_by(f64::total_cmp);
    let spec = SweepSpec {
        ratios,
        nbars: vec![0.01],
        ps: vec![0.0, 0.5],
        ..SweepSpec::default()
    };
    let fine = run_sweep(&spec, &ModelSet::default()).map_err(err)?;
    let mut degeneracy: f64 = 0.0;
    let mut gap_ok = true;
    let mut min_gap = f64::INFINITY;
    for r in &fine {
        let ev = &r.eigenvalues;
        if r.p == 0.0 && r.ratio == 1.0 {
            degeneracy = degeneracy.max((ev[0] - ev[1]).abs()).max((ev[2] - ev[3]).abs());
        }
        if r.p == 0.5 {
            let gap = ev[..4].windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
            min_gap = min_gap.min(gap / ev[0]);
            gap_ok &= gap >= 1e-6 * ev[0];
        }
    }
    verdict(
        decrease <= 1e-12 && degeneracy < 1e-10 && gap_ok,
        format!(
            "largest decrease {decrease:.1e}; p = 0, gamma1 = gamma2 pair splittings {degeneracy:.1e}; p = 1/2 min gap / lambda_max {min_gap:.2e}"
        ),
    )
}

fn tensor_rank() -> Outcome {
    let sc = structure_constants(&generate_basis(3).map_err(err)?).map_err(err)?;
    let t = build_tensor(&sc, 3).map_err(err)?;
    let zeros = count_zero_singular_values(t.square_singular_values());
    let aug = singular_values(t.augmented());
    let aug_rank = aug.len() - count_zero_singular_values(&aug);
    verdict(
        zeros == 8 && aug_rank == 64 && t.augmented().ncols() == 64,
        format!("square tensor: {zeros} zero singular values of 64; augmented rank {aug_rank}"),
    )
}

fn sum_rule() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [2, 3] {
        let sc = structure_constants(&generate_basis(n).map_err(err)?).map_err(err)?;
        worst = worst.max(check_sum_rule(&sc, &build_tensor(&sc, n).map_err(err)?).map_err(err)?);
    }
    verdict(worst < 1e-12, format!("max residual {worst:.2e} for n = 2, 3"))
}

fn coherence_oracle() -> Outcome {
    let basis = generate_basis(3).map_err(err)?;
    let mut worst: f64 = 0.0;
    for params in grid() {
        let l = kossak_core::v_system_dissipator(&params).map_err(err)?;
        let form = coherence_form(&l, &basis).map_err(err)?;
        let oracle = v_system_coherence_oracle(&params).map_err(err)?;
        for (x, y) in form.rates.iter().zip(oracle.rates.iter()) {
            worst = worst.max((x - y).abs());
        }
        for (x, y) in form.drive.iter().zip(oracle.drive.iter()) {
            worst = worst.max((x - y).abs());
        }
    }
    verdict(worst < 1e-11, format!("45 points, max entry deviation {worst:.2e}"))
}

fn random_hermitian(rng: &mut ChaCha8Rng, m: usize) -> CMatrix {
    let raw = CMatrix::from_shape_fn((m, m), |_| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    (&raw + &adjoint(&raw)).mapv(|z| z * 0.5)
}

fn roundtrips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_260_101);
    let mut random: f64 = 0.0;
    for n in [2, 3] {
        let basis = generate_basis(n).map_err(err)?;
        for _ in 0..100 {
            let a = KossakowskiMatrix::new(n, random_hermitian(&mut rng, n * n - 1)).map_err(err)?;
            let l = reconstruct_dissipator(&a, &basis, VecOrdering::RowMajor).map_err(err)?;
            let a2 = kossakowski_trace(&l, &basis).map_err(err)?;
            let l2 = reconstruct_dissipator(&a2, &basis, VecOrdering::RowMajor).map_err(err)?;
            random = random.max(frobenius_norm((l2.matrix() - l.matrix()).view()));
        }
    }
    let basis = generate_basis(3).map_err(err)?;
    let models = ModelSet::default();
    let mut model: f64 = 0.0;
    for params in grid() {
        for m in [Model::V, Model::Lambda] {
            let l = models.build(m, &params).map_err(err)?;
            let a = kossakowski_trace(&l, &basis).map_err(err)?;
            let back = reconstruct_dissipator(&a, &basis, VecOrdering::Block3).map_err(err)?;
            model = model.max(frobenius_norm((back.matrix() - l.matrix()).view()));
        }
    }
    verdict(
        random < 1e-10 && model < 1e-10,
        format!("random A (200 draws) {random:.2e}; model supermatrices {model:.2e}"),
    )
}

fn lindblad_channel(op: CMatrix, rate: f64) -> Dissipator {
    let dag = adjoint(&op);
    let number = dag.dot(&op);
    Dissipator::from_map(2, VecOrdering::RowMajor, |x| {
        let anti = number.dot(x) + x.dot(&number);
        (op.dot(x).dot(&dag) - anti.mapv(|z| z * 0.5)).mapv(|z| z * rate)
    })
    .expect("2x2 map")
}

fn two_level_fixtures() -> Outcome {
    let gamma = 0.7;
    let basis = generate_basis(2).map_err(err)?;
    let t = build_tensor(&structure_constants(&basis).map_err(err)?, 2).map_err(err)?;
    let mut lowering = CMatrix::zeros((2, 2));
    lowering[(1, 0)] = Complex64::new(1.0, 0.0);
    // coherences decay at gamma
    let dephasing = lindblad_channel(basis.generator(3).clone(), gamma);

    let mut worst: f64 = 0.0;
    let mut axis = 0.0;
    for (name, l) in [("decay", lindblad_channel(lowering, gamma)), ("dephasing", dephasing)] {
        let a1 = kossakowski_trace(&l, &basis).map_err(err)?;
        let a2 = kossakowski_pinv(&coherence_form(&l, &basis).map_err(err)?, &t).map_err(err)?;
        worst = worst.max(frobenius_distance(&a1, &a2));
        let spectrum = cp_verdict(&a1, None).map_err(err)?.spectrum;
        for (x, want) in spectrum.iter().zip([gamma, 0.0, 0.0]) {
            worst = worst.max((x - want).abs());
        }
        if name == "dephasing" {
            axis = hermitian_eig(a1.matrix()).map_err(err)?.eigenvectors[(2, 0)].norm();
        }
    }
    verdict(
        worst < 1e-12 && (axis - 1.0).abs() < 1e-12,
        format!("spectra (gamma, 0, 0) and method agreement to {worst:.1e}; dephasing eigenvector |<F_3|u>| = {axis:.15}"),
    )
}

fn main() -> ExitCode {
    let rows = default_sweep();
    let with_rows = |f: fn(&[kossak_core::SweepRow]) -> Outcome| match &rows {
        Ok(r) => f(r),
        Err(e) => Err(e.clone()),
    };
    let results = [
        ("cross-method agreement", cross_method()),
        ("complete positivity on the default sweep", with_rows(complete_positivity)),
        ("V/Lambda spectral identity", spectral_identity()),
        ("nonzero-eigenvalue counts", with_rows(nonzero_counts)),
        ("monotonicity and crossings", with_rows(monotone_and_crossings)),
        ("tensor rank diagnostic", tensor_rank()),
        ("tensor sum rule", sum_rule()),
        ("V coherence-rate table", coherence_oracle()),
        ("extract/reconstruct roundtrips", roundtrips()),
        ("two-level fixtures", two_level_fixtures()),
    ];
    let mut failed = 0;
    for (k, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
