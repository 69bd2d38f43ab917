//! JSON document format for Liouvillian supermatrices.
//!
//! ```json
//! { "n": 2, "ordering": "row-major", "matrix": [[[re, im], ...], ...] }
//! ```
//!
//! `matrix` has `n^2` rows of `n^2` `[re, im]` pairs. Floats are written in
//! shortest round-trip form and parsed exactly, so write-then-read
//! reproduces every bit.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::superop::{Dissipator, VecOrdering};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiouvillianDocument {
    pub n: usize,
    pub ordering: VecOrdering,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl From<&Dissipator> for LiouvillianDocument {
    fn from(l: &Dissipator) -> Self {
        Self {
            n: l.n(),
            ordering: l.ordering(),
            matrix: matrix_to_pairs(l.matrix()),
        }
    }
}

impl TryFrom<LiouvillianDocument> for Dissipator {
    type Error = Error;

    fn try_from(doc: LiouvillianDocument) -> Result<Self> {
        let dim = doc.n * doc.n;
        if doc.matrix.len() != dim || doc.matrix.iter().any(|row| row.len() != dim) {
            return Err(Error::InvalidArgument(format!(
                "matrix must be {dim}x{dim} for n = {}",
                doc.n
            )));
        }
        let mut m = CMatrix::zeros((dim, dim));
        for (i, row) in doc.matrix.iter().enumerate() {
            for (j, &[re, im]) in row.iter().enumerate() {
                m[(i, j)] = Complex64::new(re, im);
            }
        }
        Dissipator::new(doc.n, doc.ordering, m)
    }
}

pub fn matrix_to_pairs(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    m.outer_iter()
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn dissipator_to_json(l: &Dissipator) -> Result<String> {
    Ok(serde_json::to_string_pretty(&LiouvillianDocument::from(l))?)
}

pub fn dissipator_from_json(text: &str) -> Result<Dissipator> {
    let doc: LiouvillianDocument = serde_json::from_str(text)?;
    Dissipator::try_from(doc)
}

pub fn read_dissipator(path: impl AsRef<Path>) -> Result<Dissipator> {
    dissipator_from_json(&fs::read_to_string(path)?)
}

pub fn write_dissipator(path: impl AsRef<Path>, l: &Dissipator) -> Result<()> {
    fs::write(path, dissipator_to_json(l)?)?;
    Ok(())
}
