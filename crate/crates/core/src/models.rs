//! Partial secular Bloch-Redfield dissipators for three-level V and Lambda
//! systems driven by incoherent radiation.
//!
//! Both builders return a 9x9 supermatrix in [`VecOrdering::Block3`],
//! block diagonal as a 5x5 block on `(rho11, rho22, rho33, rho12, rho21)`
//! and a 4x4 block on `(rho13, rho31, rho23, rho32)`. The level splitting
//! `delta` belongs to the Hamiltonian part and never enters these matrices.
//!
//! V system: levels 1, 2 excited, 3 ground. Lambda system: levels 1, 2
//! ground, 3 excited. Pumping rates default to `r_i = nbar * gamma_i`.
//!
//! Two entries are easy to get wrong:
//! * V, 4x4 block: `rho23` decays at `(r1 + 2 r2 + gamma2)/2`, with
//!   `gamma2` (the decay of level 2), not `gamma1`.
//! * Lambda, 5x5 block: ground-state populations are depleted at `r_i`
//!   only (absorption). Depleting them at `r_i + gamma_i` yields negative
//!   Kossakowski eigenvalues.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kossakowski::CoherenceAffineForm;
use crate::linalg::CMatrix;
use crate::superop::{Dissipator, VecOrdering};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsbrParams {
    pub gamma1: f64,
    pub gamma2: f64,
    pub nbar: f64,
    pub p: f64,
    /// Excited/ground splitting. Carried for bookkeeping only.
    pub delta: f64,
    /// Explicit pumping rates overriding `nbar * gamma_i`.
    pub r1_override: Option<f64>,
    pub r2_override: Option<f64>,
}

impl PsbrParams {
    pub fn new(gamma1: f64, gamma2: f64, nbar: f64, p: f64) -> Self {
        Self {
            gamma1,
            gamma2,
            nbar,
            p,
            delta: 0.0,
            r1_override: None,
            r2_override: None,
        }
    }

    pub fn with_pumping(mut self, r1: Option<f64>, r2: Option<f64>) -> Self {
        self.r1_override = r1;
        self.r2_override = r2;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn r1(&self) -> f64 {
        self.r1_override.unwrap_or(self.nbar * self.gamma1)
    }

    pub fn r2(&self) -> f64 {
        self.r2_override.unwrap_or(self.nbar * self.gamma2)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        let all = [self.gamma1, self.gamma2, self.nbar, self.p, self.delta];
        if all.iter().any(|x| !x.is_finite()) {
            return bad(format!("non-finite model parameter in {self:?}"));
        }
        if self.gamma1 <= 0.0 || self.gamma2 <= 0.0 {
            return bad(format!(
                "emission rates must be positive, got gamma1 = {}, gamma2 = {}",
                self.gamma1, self.gamma2
            ));
        }
        if self.nbar < 0.0 {
            return bad(format!("nbar must be non-negative, got {}", self.nbar));
        }
        if self.p.abs() > 1.0 {
            return bad(format!("dipole alignment p must lie in [-1, 1], got {}", self.p));
        }
        for (name, r) in [("r1", self.r1_override), ("r2", self.r2_override)] {
            if let Some(r) = r {
                if !r.is_finite() || r < 0.0 {
                    return bad(format!("{name} must be finite and non-negative, got {r}"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    V,
    Lambda,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::V => "v",
            Model::Lambda => "lambda",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "v" => Ok(Model::V),
            "lambda" => Ok(Model::Lambda),
            other => Err(Error::InvalidArgument(format!(
                "unknown model {other:?}, expected v or lambda"
            ))),
        }
    }
}

pub type DissipatorBuilder = fn(&PsbrParams) -> Result<Dissipator>;

/// The dissipator builders used by sweeps and the self-test. Swappable so
/// a deliberately broken builder can be checked against the invariants.
#[derive(Debug, Clone, Copy)]
pub struct ModelSet {
    pub v: DissipatorBuilder,
    pub lambda: DissipatorBuilder,
}

impl Default for ModelSet {
    fn default() -> Self {
        Self {
            v: v_system_dissipator,
            lambda: lambda_system_dissipator,
        }
    }
}

impl ModelSet {
    pub fn build(&self, model: Model, params: &PsbrParams) -> Result<Dissipator> {
        match model {
            Model::V => (self.v)(params),
            Model::Lambda => (self.lambda)(params),
        }
    }
}

struct Rates {
    r1: f64,
    r2: f64,
    g1: f64,
    g2: f64,
    p: f64,
    r12: f64,
    g12: f64,
}

impl Rates {
    fn from(params: &PsbrParams) -> Result<Self> {
        params.validate()?;
        let (r1, r2) = (params.r1(), params.r2());
        let (g1, g2) = (params.gamma1, params.gamma2);
        Ok(Self {
            r1,
            r2,
            g1,
            g2,
            p: params.p,
            r12: (r1 * r2).sqrt(),
            g12: (g1 * g2).sqrt(),
        })
    }

    /// `xi_12(p) = -(p/2)(sqrt(r1 r2) + sqrt(gamma1 gamma2))`.
    fn xi(&self) -> f64 {
        -0.5 * self.p * (self.r12 + self.g12)
    }
}

fn assemble(block5: [[f64; 5]; 5], block4: [[f64; 4]; 4]) -> Result<Dissipator> {
    let mut m = CMatrix::zeros((9, 9));
    for (i, row) in block5.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            m[(i, j)] = Complex64::new(v, 0.0);
        }
    }
    for (i, row) in block4.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            m[(5 + i, 5 + j)] = Complex64::new(v, 0.0);
        }
    }
    Dissipator::new(3, VecOrdering::Block3, m)
}

/// V-system dissipator.
pub fn v_system_dissipator(params: &PsbrParams) -> Result<Dissipator> {
    let rates = Rates::from(params)?;
    let xi = rates.xi();
    let Rates { r1, r2, g1, g2, p, r12, .. } = rates;
    let coh = -0.5 * (r1 + r2 + g1 + g2);
    let block5 = [
        [-(r1 + g1), 0.0, r1, xi, xi],
        [0.0, -(r2 + g2), r2, xi, xi],
        [r1 + g1, r2 + g2, -(r1 + r2), -2.0 * xi, -2.0 * xi],
        [xi, xi, p * r12, coh, 0.0],
        [xi, xi, p * r12, 0.0, coh],
    ];
    let d13 = -0.5 * (2.0 * r1 + r2 + g1);
    let d23 = -0.5 * (r1 + 2.0 * r2 + g2);
    let block4 = [
        [d13, 0.0, xi, 0.0],
        [0.0, d13, 0.0, xi],
        [xi, 0.0, d23, 0.0],
        [0.0, xi, 0.0, d23],
    ];
    assemble(block5, block4)
}

/// Lambda-system dissipator.
pub fn lambda_system_dissipator(params: &PsbrParams) -> Result<Dissipator> {
    let rates = Rates::from(params)?;
    let xi = rates.xi();
    let Rates { r1, r2, g1, g2, p, r12, .. } = rates;
    let c = -0.5 * p * r12;
    let coh = -0.5 * (r1 + r2);
    let block5 = [
        [-r1, 0.0, r1 + g1, c, c],
        [0.0, -r2, r2 + g2, c, c],
        [r1, r2, -(r1 + r2 + g1 + g2), p * r12, p * r12],
        [c, c, -2.0 * xi, coh, 0.0],
        [c, c, -2.0 * xi, 0.0, coh],
    ];
    let d13 = -0.5 * (g1 + g2 + 2.0 * r1 + r2);
    let d23 = -0.5 * (g1 + g2 + r1 + 2.0 * r2);
    let block4 = [
        [d13, 0.0, c, 0.0],
        [0.0, d13, 0.0, c],
        [c, 0.0, d23, 0.0],
        [0.0, c, 0.0, d23],
    ];
    assemble(block5, block4)
}

/// Hand-derived coherence-vector rates of the V system, written out entry by
/// entry in the Gell-Mann component layout
/// `v = sqrt(2) (Re rho12, -Im rho12, (rho11 - rho22)/2, Re rho13, -Im rho13,
///  Re rho23, -Im rho23, (rho11 + rho22 - 2 rho33)/sqrt(12))`.
///
/// This table is kept independent of the generic trace-based route in
/// [`crate::kossakowski::coherence_form`] so the two can check each other.
pub fn v_system_coherence_oracle(params: &PsbrParams) -> Result<CoherenceAffineForm> {
    let Rates { r1, r2, g1, g2, p, r12, g12 } = Rates::from(params)?;
    let rbar = 0.5 * (r1 + r2);
    let gbar = 0.5 * (g1 + g2);
    let s3 = 3f64.sqrt();
    let cross = -0.5 * p * (r12 + g12);

    let mut r = Array2::zeros((8, 8));
    let mut set = |i: usize, j: usize, v: f64| r[(i - 1, j - 1)] = v;
    set(1, 1, -rbar - gbar);
    set(1, 8, -(p * s3 / 3.0) * (3.0 * r12 + g12));
    set(2, 2, -rbar - gbar);
    set(3, 3, -rbar - gbar);
    // Population imbalance fed by v_8: from d(rho11 - rho22)/dt at fixed trace.
    set(3, 8, -(3.0 * (r1 - r2) + (g1 - g2)) / (2.0 * s3));
    set(4, 4, -0.5 * (2.0 * r1 + r2 + g1));
    set(4, 6, cross);
    set(5, 5, -0.5 * (2.0 * r1 + r2 + g1));
    set(5, 7, cross);
    set(6, 4, cross);
    set(6, 6, -0.5 * (r1 + 2.0 * r2 + g2));
    set(7, 5, cross);
    set(7, 7, -0.5 * (r1 + 2.0 * r2 + g2));
    set(8, 1, -p * s3 * (r12 + g12));
    set(8, 3, (s3 / 2.0) * ((r2 + g2) - (r1 + g1)));
    set(8, 8, -3.0 * rbar - gbar);

    let drive = Array1::from(vec![
        -(p * 2f64.sqrt() / 3.0) * g12,
        0.0,
        -(g1 - g2) / (3.0 * 2f64.sqrt()),
        0.0,
        0.0,
        0.0,
        0.0,
        -(g1 + g2) / 6f64.sqrt(),
    ]);
    Ok(CoherenceAffineForm { rates: r, drive })
}
