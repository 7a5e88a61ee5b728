//! Alternating form fields, wedge products, a numeric exterior derivative
//! and top-degree integration.

pub mod derivative;
pub mod field;
pub mod quadrature;

pub use derivative::exterior_derivative_numeric;
pub use field::{
    antisymmetry_residual, basis, coordinate_frame, linearity_residual, wedge, FormEval, FormField, ValueKind,
};
pub use quadrature::{
    gauss_legendre, integrate, integrate_function, integrate_reduced, pairwise_sum, Integral, Orientation,
    QuadratureSpec, Scheme,
};
