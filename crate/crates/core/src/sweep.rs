//! Kossakowski spectra of the three-level models over a parameter grid.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::cp::{compare_spectra, cp_verdict};
use crate::error::{Error, Result};
use crate::kossakowski::kossakowski_trace;
use crate::models::{Model, ModelSet, PsbrParams};
use crate::sun_basis::{generate_basis, GeneratorBasis};

/// `count` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            let step = (b - a) / (count - 1) as f64;
            (0..count).map(|k| 10f64.powf(a + step * k as f64)).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub models: Vec<Model>,
    /// Values of `gamma1 / gamma2`.
    pub ratios: Vec<f64>,
    pub nbars: Vec<f64>,
    pub ps: Vec<f64>,
    pub gamma2: f64,
    /// CP tolerance override, see [`crate::cp::cp_verdict`].
    pub tol: Option<f64>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            models: vec![Model::V, Model::Lambda],
            ratios: log_grid(0.1, 10.0, 50),
            nbars: vec![0.01, 1.0, 100.0],
            ps: vec![0.0, 0.5, 1.0],
            gamma2: 1.0,
            tol: None,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.to_string()));
        if self.models.is_empty() || self.ratios.is_empty() || self.nbars.is_empty() || self.ps.is_empty() {
            return bad("sweep grids must be nonempty");
        }
        if !(self.gamma2.is_finite() && self.gamma2 > 0.0) {
            return bad("gamma2 must be positive");
        }
        if self.ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return bad("ratios gamma1/gamma2 must be positive");
        }
        if self.nbars.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return bad("nbar values must be non-negative");
        }
        if self.ps.iter().any(|p| !(p.is_finite() && p.abs() <= 1.0)) {
            return bad("p values must lie in [-1, 1]");
        }
        Ok(())
    }

    fn compares_models(&self) -> bool {
        self.models.contains(&Model::V) && self.models.contains(&Model::Lambda)
    }

    fn params(&self, ratio: f64, nbar: f64, p: f64) -> PsbrParams {
        PsbrParams::new(ratio * self.gamma2, self.gamma2, nbar, p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub model: Model,
    pub ratio: f64,
    pub nbar: f64,
    pub p: f64,
    /// Descending.
    pub eigenvalues: Vec<f64>,
    pub min_eigenvalue: f64,
    pub is_cp: bool,
    /// Max sorted-eigenvalue difference between V and Lambda at this point.
    pub vlambda_diff: Option<f64>,
}

fn evaluate(
    models: &ModelSet,
    basis: &GeneratorBasis,
    model: Model,
    params: &PsbrParams,
    tol: Option<f64>,
) -> Result<(crate::kossakowski::KossakowskiMatrix, crate::cp::CpVerdict)> {
    let l = models.build(model, params)?;
    let a = kossakowski_trace(&l, basis)?;
    let verdict = cp_verdict(&a, tol)?;
    Ok((a, verdict))
}

/// Evaluate every grid point. Rows come back ordered by model, then nbar,
/// then p, then ratio, regardless of evaluation order.
pub fn run_sweep(spec: &SweepSpec, models: &ModelSet) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let basis = generate_basis(3)?;
    let both = spec.compares_models();

    let mut points = Vec::new();
    for &model in &spec.models {
        for &nbar in &spec.nbars {
            for &p in &spec.ps {
                for &ratio in &spec.ratios {
                    points.push((model, nbar, p, ratio));
                }
            }
        }
    }

    points
        .par_iter()
        .map(|&(model, nbar, p, ratio)| {
            let params = spec.params(ratio, nbar, p);
            let (a, verdict) = evaluate(models, &basis, model, &params, spec.tol)?;
            let vlambda_diff = if both {
                let other = match model {
                    Model::V => Model::Lambda,
                    Model::Lambda => Model::V,
                };
                let (b, _) = evaluate(models, &basis, other, &params, spec.tol)?;
                Some(compare_spectra(&a, &b)?)
            } else {
                None
            };
            Ok(SweepRow {
                model,
                ratio,
                nbar,
                p,
                eigenvalues: verdict.spectrum,
                min_eigenvalue: verdict.min_eigenvalue,
                is_cp: verdict.is_cp,
                vlambda_diff,
            })
        })
        .collect()
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV text. The V/Lambda column is present only if every row carries it.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let width = rows.first().map_or(8, |r| r.eigenvalues.len());
    let with_diff = !rows.is_empty() && rows.iter().all(|r| r.vlambda_diff.is_some());

    let mut out = String::from("model,gamma1_over_gamma2,nbar,p");
    for k in 1..=width {
        write!(out, ",ev{k}").unwrap();
    }
    out.push_str(",min_ev,is_cp");
    if with_diff {
        out.push_str(",vlambda_max_spectral_diff");
    }
    out.push('\n');

    for r in rows {
        let mut fields = vec![r.model.name().to_string(), num(r.ratio), num(r.nbar), num(r.p)];
        fields.extend(r.eigenvalues.iter().map(|&x| num(x)));
        fields.push(num(r.min_eigenvalue));
        fields.push(r.is_cp.to_string());
        if with_diff {
            fields.push(num(r.vlambda_diff.unwrap_or(f64::NAN)));
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> SweepSpec {
        SweepSpec {
            ratios: vec![0.5, 1.0, 2.0],
            nbars: vec![0.01, 1.0],
            ps: vec![0.0, 1.0],
            ..SweepSpec::default()
        }
    }

    #[test]
    fn default_grid() {
        let spec = SweepSpec::default();
        assert_eq!(spec.ratios.len(), 50);
        assert!((spec.ratios[0] - 0.1).abs() < 1e-15);
        assert!((spec.ratios[49] - 10.0).abs() < 1e-12);
        assert!(spec.ratios.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn row_order_and_shape() {
        let rows = run_sweep(&small_spec(), &ModelSet::default()).unwrap();
        assert_eq!(rows.len(), 2 * 3 * 2 * 2);
        assert_eq!(rows[0].model, Model::V);
        assert_eq!(rows[12].model, Model::Lambda);
        assert_eq!((rows[0].nbar, rows[0].p, rows[0].ratio), (0.01, 0.0, 0.5));
        assert_eq!((rows[1].nbar, rows[1].p, rows[1].ratio), (0.01, 0.0, 1.0));
        assert_eq!((rows[3].nbar, rows[3].p), (0.01, 1.0));
        assert_eq!(rows[6].nbar, 1.0);
        for r in &rows {
            assert_eq!(r.eigenvalues.len(), 8);
            assert!(r.is_cp);
            assert!(r.vlambda_diff.unwrap() < 1e-10);
        }
    }

    #[test]
    fn csv_is_deterministic_and_finite() {
        let spec = small_spec();
        let a = sweep_csv(&run_sweep(&spec, &ModelSet::default()).unwrap());
        let b = sweep_csv(&run_sweep(&spec, &ModelSet::default()).unwrap());
        assert_eq!(a, b);
        let mut lines = a.lines();
        let header = lines.next().unwrap();
        assert_eq!(header.split(',').count(), 4 + 8 + 3);
        assert!(header.ends_with("vlambda_max_spectral_diff"));
        for line in lines {
            let fields: Vec<&str> = line.split(',').collect();
            for f in &fields[1..fields.len() - 2] {
                assert!(f.parse::<f64>().unwrap().is_finite());
            }
        }
    }

    #[test]
    fn single_model_has_no_diff_column() {
        let spec = SweepSpec {
            models: vec![Model::Lambda],
            ..small_spec()
        };
        let csv = sweep_csv(&run_sweep(&spec, &ModelSet::default()).unwrap());
        assert!(csv.lines().next().unwrap().ends_with("is_cp"));
    }

    #[test]
    fn invalid_specs() {
        let models = ModelSet::default();
        for spec in [
            SweepSpec { ratios: vec![], ..small_spec() },
            SweepSpec { gamma2: 0.0, ..small_spec() },
            SweepSpec { ratios: vec![-1.0], ..small_spec() },
            SweepSpec { ps: vec![1.5], ..small_spec() },
            SweepSpec { nbars: vec![f64::NAN], ..small_spec() },
        ] {
            assert!(matches!(run_sweep(&spec, &models), Err(Error::InvalidArgument(_))));
        }
    }
}
