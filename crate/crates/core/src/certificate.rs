//! Certificates attached to norm values, serializable to JSON.

use serde::{Deserialize, Serialize};

use crate::exponent::ExtExponent;
use crate::lp::lp_norm;
use crate::space::SpaceSpec;
use crate::tensor::Tensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    WitnessVectors,
    RankOneDecomposition,
    ClosedForm,
    Exhaustive,
}

/// One elementary tensor `u⁽¹⁾ ⊗ … ⊗ u⁽ᵏ⁾`; scale lives in the factors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankOneTerm {
    pub factors: Vec<Vec<f64>>,
}

impl RankOneTerm {
    /// `∏_j ‖u⁽ʲ⁾‖_{p_j}` with exponents in mode order.
    pub fn cost(&self, exponents: &[ExtExponent]) -> f64 {
        self.factors
            .iter()
            .zip(exponents)
            .map(|(u, &p)| lp_norm(u, p))
            .product()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Payload {
    /// One vector per mode, each of unit norm in the listed ball.
    Witness {
        vectors: Vec<Vec<f64>>,
        balls: Vec<ExtExponent>,
    },
    Decomposition {
        terms: Vec<RankOneTerm>,
        /// Max-abs reconstruction error the decomposition claims.
        residual: f64,
    },
    /// A dual tensor `B` whose norm in the dual space was computed exactly.
    DualTensor {
        tensor: Tensor,
        dual_norm: f64,
    },
    Formula {
        description: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormCertificate {
    pub kind: CertificateKind,
    pub payload: Payload,
    pub achieved_value: f64,
}

impl NormCertificate {
    pub fn witness(vectors: Vec<Vec<f64>>, balls: Vec<ExtExponent>, achieved_value: f64) -> Self {
        NormCertificate {
            kind: CertificateKind::WitnessVectors,
            payload: Payload::Witness { vectors, balls },
            achieved_value,
        }
    }

    pub fn formula(description: impl Into<String>, achieved_value: f64) -> Self {
        NormCertificate {
            kind: CertificateKind::ClosedForm,
            payload: Payload::Formula {
                description: description.into(),
            },
            achieved_value,
        }
    }

    /// Largest deviation of a witness vector's norm from 1.
    pub fn witness_unit_error(&self) -> Option<f64> {
        match &self.payload {
            Payload::Witness { vectors, balls } => Some(
                vectors
                    .iter()
                    .zip(balls)
                    .map(|(v, &b)| (lp_norm(v, b) - 1.0).abs())
                    .fold(0.0, f64::max),
            ),
            _ => None,
        }
    }

    /// `|⟨A, x₁⊗…⊗x_k⟩|` for a witness payload.
    pub fn witness_value(&self, a: &Tensor) -> Option<f64> {
        match &self.payload {
            Payload::Witness { vectors, .. } => Some(a.multilinear(vectors).abs()),
            _ => None,
        }
    }

    /// Reconstruction of a decomposition payload.
    pub fn reconstruct(&self, order: usize, n: usize) -> Option<Tensor> {
        match &self.payload {
            Payload::Decomposition { terms, .. } => {
                let mut t = Tensor::zeros(order, n);
                for term in terms {
                    t.add_scaled_rank_one(1.0, &term.factors);
                }
                Some(t)
            }
            _ => None,
        }
    }

    /// `Σ_t ∏_j ‖u_t⁽ʲ⁾‖_{p_j}` for a decomposition payload.
    pub fn decomposition_cost(&self, spec: &SpaceSpec) -> Option<f64> {
        match &self.payload {
            Payload::Decomposition { terms, .. } => {
                let exps = spec.mode_exponents();
                Some(terms.iter().map(|t| t.cost(&exps)).sum())
            }
            _ => None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }
}
