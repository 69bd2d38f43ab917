//! Kossakowski matrices of N-level Markovian dissipators.
//!
//! Given a dissipator as an `n^2 x n^2` supermatrix, extract its Kossakowski
//! (GKLS coefficient) matrix over the generalized Gell-Mann basis, either by
//! a direct trace formula or by least squares on the coherence-vector
//! equations of motion. The spectrum decides complete positivity and yields
//! the diagonal Lindblad form.
//!
//! ```
//! use kossak_core::{cp_verdict, generate_basis, kossakowski_trace, v_system_dissipator, PsbrParams};
//!
//! let basis = generate_basis(3).unwrap();
//! let l = v_system_dissipator(&PsbrParams::new(1.0, 1.0, 1.0, 1.0)).unwrap();
//! let a = kossakowski_trace(&l, &basis).unwrap();
//! assert!(cp_verdict(&a, None).unwrap().is_cp);
//! ```

pub mod cp;
pub mod error;
pub mod io;
pub mod kossakowski;
pub mod linalg;
pub mod models;
pub mod selftest;
pub mod sun_basis;
pub mod superop;
pub mod sweep;

pub use cp::{
    compare_spectra, count_nonzero, cp_verdict, lindblad_form, restore_cp, spectrum, CpVerdict,
    LindbladForm,
};
pub use error::{Error, Result};
pub use io::{dissipator_from_json, dissipator_to_json, read_dissipator, write_dissipator, LiouvillianDocument};
pub use kossakowski::{
    build_tensor, coherence_form, frobenius_distance, kossakowski_pinv, kossakowski_trace,
    reconstruct_dissipator, CoherenceAffineForm, KossakowskiMatrix, TransformationTensor,
};
pub use linalg::{CMatrix, CVector};
pub use models::{
    lambda_system_dissipator, v_system_coherence_oracle, v_system_dissipator, Model, ModelSet,
    PsbrParams,
};
pub use selftest::{run_selftest, SelfTestReport};
pub use sun_basis::{generate_basis, structure_constants, GeneratorBasis, StructureConstants};
pub use superop::{apply, devec, reorder, validate_dissipator, vec, Dissipator, ValidationReport, VecOrdering};
pub use sweep::{run_sweep, sweep_csv, SweepRow, SweepSpec};
