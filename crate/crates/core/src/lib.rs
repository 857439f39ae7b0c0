pub mod catalog;
pub mod cohomology;
pub mod complex;
pub mod deformation;
pub mod error;
pub mod extension;
pub mod form;
pub mod io;
pub mod lemmata;
pub mod linalg;
pub mod positivity;
pub mod scalar;
pub mod structure;

pub use complex::{build_complex, InvariantComplex, NumericComplex};
pub use error::{NilError, Result};
pub use form::{
    contract, contract_pow, exp_contract, neumann_invert, simultaneous_contract, Coframe, CoframeMap, Form, Monomial,
    ParamMatrix, Valence, VectorValuedForm,
};
pub use linalg::Matrix;
pub use scalar::{Exponent, GaussianRational, Gq, ParamScalar, EXACT};
pub use structure::StructureEquations;

pub use catalog::{catalog_load, run_scenario, CatalogEntry, Source};
pub use cohomology::{cohomology, cohomology_report, CohomologyKind, CohomologyReport, HodgeContext, RankProfile};
pub use deformation::{check_integrability, deform_complex, lie_brackets, BeltramiDifferential, DeformMode};
pub use extension::{obstruction_residual, pkahler_extend, solve_extension, ExtensionState};
pub use lemmata::{lemma_report, LemmaReport, Verdict, Witness};
pub use positivity::{is_strictly_positive, is_transverse, pkahler_check, PositivityVerdict};
