//! Weak-ℓ2 norms of vector families and the right-hand side of Chevet-type
//! bounds for standard bases.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponent::ExtExponent;
use crate::lp::{l2_norm, lp_norm, maximize_on_ball};
use crate::sampling::{child_seed, gaussian_vector, rng};
use crate::space::SpaceSpec;

const SIGN_ENUMERATION_MAX_DIM: usize = 20;
const ASCENT_RESTARTS: u64 = 16;
const ASCENT_SWEEPS: usize = 500;

/// Operator norm of `t ↦ Σ t_i x_i` from ℓ2 into ℓp.
///
/// Exact for `p ∈ {1, 2, ∞}` (for `p = 1` while the dimension allows sign
/// enumeration); other exponents use alternating ascent and return the best
/// value found.
pub fn weak_l2_norm(xs: &[Vec<f64>], p: ExtExponent) -> Result<f64> {
    let Some(first) = xs.first() else {
        return Err(Error::InvalidSpec("weak-l2 norm of an empty family".into()));
    };
    let dim = first.len();
    if let Some(bad) = xs.iter().find(|x| x.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.len(),
        });
    }
    let m = DMatrix::from_fn(dim, xs.len(), |i, j| xs[j][i]);
    if p == ExtExponent::two() {
        return Ok(m.singular_values().max());
    }
    if p.is_infinite() {
        return Ok(m.row_iter().map(|r| r.norm()).fold(0.0, f64::max));
    }
    if p.is_one() && dim <= SIGN_ENUMERATION_MAX_DIM {
        let mut best: f64 = 0.0;
        let mut eps = vec![1.0; dim];
        for code in 0u64..1 << dim.saturating_sub(1) {
            for (i, e) in eps.iter_mut().enumerate().skip(1) {
                *e = if (code >> (i - 1)) & 1 == 1 { -1.0 } else { 1.0 };
            }
            let v = m.tr_mul(&nalgebra::DVector::from_column_slice(&eps));
            best = best.max(v.norm());
        }
        return Ok(best);
    }
    Ok(ascent(&m, p))
}

/// `sup_{y ∈ B_{p*}} ‖Mᵀy‖₂` by alternating maximization.
fn ascent(m: &DMatrix<f64>, p: ExtExponent) -> f64 {
    let ball = p.dual();
    let mut best: f64 = 0.0;
    for r in 0..ASCENT_RESTARTS {
        let mut g = rng(child_seed(0x5eed, r));
        let mut t = gaussian_vector(&mut g, m.ncols());
        let mut last = 0.0;
        for _ in 0..ASCENT_SWEEPS {
            let mt: Vec<f64> = (m * nalgebra::DVector::from_column_slice(&t)).iter().copied().collect();
            let (_, y) = maximize_on_ball(&mt, ball);
            let v: Vec<f64> = m
                .tr_mul(&nalgebra::DVector::from_column_slice(&y))
                .iter()
                .copied()
                .collect();
            let value = l2_norm(&v);
            if value == 0.0 {
                break;
            }
            t = v.iter().map(|x| x / value).collect();
            if value - last <= 1e-13 * value {
                last = value;
                break;
            }
            last = value;
        }
        best = best.max(last);
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChevetMode {
    Asymptotic,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ChevetRhs {
    pub value: f64,
    pub stderr: f64,
}

/// Weak-ℓ2 norm of the unit vector basis of ℓα^n.
pub fn basis_weak_l2(alpha: ExtExponent, n: usize) -> f64 {
    (n as f64).powf((alpha.reciprocal_f64() - 0.5).max(0.0))
}

/// `Λ = Σ_j (∏_{j'≠j} ‖(e_i)‖_{w,2, ℓα_{j'}}) · E‖Σ g_i e_i‖_{α_j}` for the
/// standard bases of the factors of `spec`.
pub fn chevet_rhs_basis(spec: &SpaceSpec, mode: ChevetMode, samples: usize, seed: u64) -> Result<ChevetRhs> {
    let n = spec.n();
    let alphas = spec.mode_exponents();
    let weak: Vec<f64> = alphas.iter().map(|&a| basis_weak_l2(a, n)).collect();
    let mut value = 0.0;
    let mut var = 0.0;
    for (j, &alpha) in alphas.iter().enumerate() {
        let others: f64 = weak
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .map(|(_, w)| w)
            .product();
        let (mean, se) = match mode {
            ChevetMode::Asymptotic => ((n as f64).powf(alpha.reciprocal_f64()), 0.0),
            ChevetMode::MonteCarlo => gaussian_mean_norm(n, alpha, samples, child_seed(seed, j as u64))?,
        };
        value += others * mean;
        var += (others * se).powi(2);
    }
    Ok(ChevetRhs {
        value,
        stderr: var.sqrt(),
    })
}

/// Monte Carlo estimate of `E‖g‖_α` for a standard Gaussian `g ∈ ℝⁿ`.
pub fn gaussian_mean_norm(n: usize, alpha: ExtExponent, samples: usize, seed: u64) -> Result<(f64, f64)> {
    if samples < 2 {
        return Err(Error::InvalidSpec("Monte Carlo needs at least two samples".into()));
    }
    let mut g = rng(seed);
    let values: Vec<f64> = (0..samples)
        .map(|_| lp_norm(&gaussian_vector(&mut g, n), alpha))
        .collect();
    let mean = values.iter().sum::<f64>() / samples as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
    Ok((mean, (var / samples as f64).sqrt()))
}
