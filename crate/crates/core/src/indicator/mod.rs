pub mod cell;
pub mod functions;
pub mod identities;
pub mod sampling;

pub use cell::{product_of_cells, Cell, SamplePoint, SignedCellSum, Term};
pub use functions::{gamma, gamma_support_certificate, sigma, sigma_of, tau, tau_hat, Ball};
pub use identities::{
    fan_refinement_terms, run_checks, validate_fan, verify_identity, verify_identity_timed, Check, Failure, IdentityContext,
    IdentityId, IdentityReport, RefinementTerm, Side,
};
pub use sampling::{sample_points, Sampler, SamplerConfig};
