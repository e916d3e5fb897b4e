//! Implicit roots `x_{B,±}`, Lévy densities `g_{B,±}` and primitives
//! `h_{B,±}`, the limiting Lévy measures ν_δ and exponents Φ_δ, and the
//! constants that appear in the B → 0 and B → ∞ limits.
//!
//! Throughout, `r(x) = π / (γ x (2√(x²+B²/4) ± B))` is the explicit inverse
//! of `x_{B,±}`; integrals against `g dr` are evaluated in the `x` variable,
//! where `g_{B,±}(r) dr = −(1/4π) w_±(x) x² dx` with
//! `w_±(x) = 1/2 ± B/(4√(x²+B²/4))`.

pub mod constants;
pub mod density;
pub mod exponent;
pub mod measure;
pub mod roots;

pub use constants::{limit_constants, LimitConstants};
pub use density::{density_g, primitive_h, primitive_h_closed_form};
pub use exponent::{interpolation_generator_apply, levy_exponent, ExponentRow, LevyExponent};
pub use measure::{levy_measure, JumpScale, LevyMeasureSpec, Regime, TauMoment};
pub use roots::{solve_x, RootBranch};
