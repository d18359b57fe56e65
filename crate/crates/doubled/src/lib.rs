//! Iterated mixing and dilation of finite-dimensional state tensors.
//!
//! Density-like states can be built two ways: as a weighted sum of doubled
//! vectors (mixing), or by doubling a vector over a larger space and summing
//! out the ancilla part (dilation). Both constructions send vectors to
//! vectors, so both iterate. This crate implements the constructions and
//! their iterations, the family of Choi-Jamiolkowski reshapings of the
//! resulting doubled tensors, decision procedures that certify membership in
//! the dilated family and refute membership in the mixed family, literal
//! summation oracles that pin the wiring conventions, and a boolean-relation
//! backend with an exhaustive census over small carriers.

pub mod cj;
pub mod classify;
pub mod config;
pub mod constructions;
pub mod doubling;
pub mod error;
pub mod matrix;
pub mod oracle;
pub mod rel;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::{conjugate_reverse, contract_basis, tensor_product, Shape, StateTensor};
pub use matrix::{
    hermitian_eigen, hermitian_eigenvalues, is_psd, partial_transpose, reshape_group, CJMatrix,
};
pub use doubling::{doubled_shape, position_pairs, printed_mix_pairing, DoubledShape, PairingSpec, Role};
pub use constructions::{
    counterexample_state, cup_seed, dilate_step, eigen_ensemble, iterate_dilation, iterate_mix,
    mix_step, mix_to_dilation_witness, purify, random_dilation_seed, random_gaussian_state,
    random_mix_tree, DilationSeed, Ensemble, MixTree,
};
pub use cj::{
    cj_along, cj_operator, cj_report_all, mix_pairing_operator, mix_pairing_report, CJReport,
};
pub use classify::{
    conjugate_symmetry_check, doubly_mixed_necessary, is_depth_n_dilated, ppt_check, Evidence,
    Verdict, VerdictKind,
};

/// Shared default tolerance for PSD and symmetry verdicts; interpreted
/// relative to `dim * max|entry| + 1` by the matrix checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
