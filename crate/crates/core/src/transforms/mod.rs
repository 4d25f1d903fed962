//! Laplace transforms of cones and `Γ`-regions as exact meromorphic expressions.

mod laplace;
mod meromorphic;
mod montecarlo;
mod poly;
mod polyexp;
mod scalar;

pub use laplace::{
    cone_transform_ordered, is_regular, laplace_cone, laplace_cone_ordered, laplace_gamma, laplace_gamma_symbolic,
    laplace_translated, placing_triangulation, RegularityRegion,
};
pub use meromorphic::{MeromorphicTransform, TermKey, DEGREE_CAP};
pub use montecarlo::{monte_carlo_cross_check, McEstimate};
pub use poly::{canonical_form, max_var, Coeff, Poly};
pub use polyexp::{ExponentKey, PolyExp};
pub use scalar::ExactScalar;
