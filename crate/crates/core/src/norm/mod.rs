//! Injective and projective norms of tensors over ℓp factors.

pub mod eps;
pub mod pi;
pub mod weak;

pub use eps::{
    eps_norm_ascend, eps_norm_ascend_with, eps_norm_bruteforce, eps_norm_exact, khintchine_lower_bound,
    khintchine_witness, AscentOptions, BruteForce, EpsilonEstimate,
};
pub use pi::{pi_norm, pi_norm_lower, pi_norm_structural_exact, pi_norm_upper, PiEstimate, PiOptions};
pub use weak::{chevet_rhs_basis, weak_l2_norm, ChevetMode, ChevetRhs};

use crate::error::{Error, Result};
use crate::space::SpaceSpec;
use crate::tensor::Tensor;

pub(crate) fn check_spec(a: &Tensor, spec: &SpaceSpec) -> Result<()> {
    if a.order() != spec.order() {
        return Err(Error::DimensionMismatch {
            expected: spec.order(),
            found: a.order(),
        });
    }
    if a.n() != spec.n() {
        return Err(Error::DimensionMismatch {
            expected: spec.n(),
            found: a.n(),
        });
    }
    Ok(())
}
