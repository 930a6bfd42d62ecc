//! Multilinear algebra on `R^n`: exterior and symmetric powers, skew
//! operators acting on them, and algebraic curvature tensors.

pub mod curvature;
pub mod forms;
pub mod sym;

pub use curvature::{
    ch_model, complex_structure, g_tensor, g_value, r0_frame_search, r0_unit_tuple_max,
    sectional_range, CurvatureTensor, R0SearchReport,
};
pub use forms::{
    basis_masks, extend_to_forms, wedge_contract_identity_check, FormOperator, PForm,
};
pub use sym::{extend_to_sym2, Sym2Operator, SymMatrix};

/// Coordinates of a vector in `R^n`.
pub type EuclideanVector<T = f64> = Vec<T>;
