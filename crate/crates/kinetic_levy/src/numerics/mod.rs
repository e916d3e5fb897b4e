//! Numerical infrastructure: quadrature, root bracketing, Gauss rules and
//! compensated summation.

pub mod gauss;
pub mod quadrature;
pub mod roots;
pub mod summation;

pub use gauss::gauss_legendre;
pub use quadrature::{Estimate, Quadrature};
pub use roots::{bisect, bisect_newton, RootOptions};
pub use summation::{linear_fit, NeumaierSum};
