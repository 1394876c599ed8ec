//! Monte Carlo volumes of unit balls and the certified lower bounds they are
//! checked against.
//!
//! Volumes are reported as `log vol(K)^{1/N}`, where `N` is the ambient
//! dimension. The radial estimator uses `vol(K) = vol(B₂^N)·E[‖θ‖_K^{−N}]`
//! over uniform directions `θ`, accumulated in log space.

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::exponent::ExtExponent;
use crate::lp::lp_norm;
use crate::norm::eps::{eps_norm_ascend_with, eps_norm_exact, AscentOptions};
use crate::norm::pi::{pi_norm_lower, pi_norm_structural_exact, pi_norm_upper_with, PiOptions};
use crate::rates::vol_exponent_3fold;
use crate::sampling::{child_seed, gaussian_vector, rng, sample_gaussian_tensor, sign_vector, sphere_direction};
use crate::space::SpaceSpec;
use crate::tensor::Tensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    Pi,
    Eps,
    Lp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormMode {
    ExactOracle,
    Heuristic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Ball {
    Lp {
        exponent: ExtExponent,
        dim: usize,
    },
    Pi {
        spec: SpaceSpec,
    },
    /// Exponents are the factors of the injective product.
    Eps {
        spec: SpaceSpec,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BallSpec {
    pub ball: Ball,
    pub mode: NormMode,
}

/// Budget for heuristic projective norms inside sampling loops.
const SAMPLING_PI: PiOptions = PiOptions {
    rank_budget: 2,
    restarts: 2,
    tol: 1e-12,
    seed: 0,
};

impl BallSpec {
    pub fn lp(exponent: ExtExponent, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSpec("dimension must be positive".into()));
        }
        Ok(BallSpec {
            ball: Ball::Lp { exponent, dim },
            mode: NormMode::ExactOracle,
        })
    }

    /// A π or ε ball; exact-oracle mode is rejected unless every norm
    /// evaluation is exact for this spec.
    pub fn tensor(kind: NormKind, spec: SpaceSpec, mode: NormMode) -> Result<Self> {
        let ball = match kind {
            NormKind::Pi => Ball::Pi { spec },
            NormKind::Eps => Ball::Eps { spec },
            NormKind::Lp => return Err(Error::InvalidSpec("use BallSpec::lp for lp balls".into())),
        };
        let out = BallSpec { ball, mode };
        if mode == NormMode::ExactOracle && !out.supports_exact()? {
            return Err(Error::Unsupported(format!("no exact norm oracle for {}", out.label())));
        }
        Ok(out)
    }

    /// Exact oracle when the spec has one, heuristic otherwise.
    pub fn tensor_auto(kind: NormKind, spec: SpaceSpec) -> Result<Self> {
        Self::tensor(kind, spec.clone(), NormMode::ExactOracle)
            .or_else(|_| Self::tensor(kind, spec, NormMode::Heuristic))
    }

    pub fn kind(&self) -> NormKind {
        match self.ball {
            Ball::Lp { .. } => NormKind::Lp,
            Ball::Pi { .. } => NormKind::Pi,
            Ball::Eps { .. } => NormKind::Eps,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.ball {
            Ball::Lp { dim, .. } => *dim,
            Ball::Pi { spec } | Ball::Eps { spec } => spec.dim(),
        }
    }

    pub fn label(&self) -> String {
        match &self.ball {
            Ball::Lp { exponent, dim } => format!("l{exponent}^{dim}"),
            Ball::Pi { spec } => format!("pi({}; n={})", spec.exponent_label(), spec.n()),
            Ball::Eps { spec } => format!("eps({}; n={})", spec.exponent_label(), spec.n()),
        }
    }

    /// Ball of the dual norm: exponent-wise duals with π and ε swapped.
    pub fn polar(&self) -> Result<BallSpec> {
        match &self.ball {
            Ball::Lp { exponent, dim } => BallSpec::lp(exponent.dual(), *dim),
            Ball::Pi { spec } => BallSpec::tensor_auto(NormKind::Eps, spec.dual()),
            Ball::Eps { spec } => BallSpec::tensor_auto(NormKind::Pi, spec.dual()),
        }
    }

    fn supports_exact(&self) -> Result<bool> {
        Ok(match &self.ball {
            Ball::Lp { .. } => true,
            Ball::Pi { spec } => {
                let probe = sample_gaussian_tensor(spec.order(), spec.n(), 0);
                pi_norm_structural_exact(&probe, spec)?.is_some()
            }
            Ball::Eps { spec } => {
                let probe = sample_gaussian_tensor(spec.order(), spec.n(), 0);
                eps_norm_exact(&probe, spec)?.is_some()
            }
        })
    }

    /// Norm of the flat vector `x` (row-major tensor entries for π/ε).
    pub fn norm(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        match &self.ball {
            Ball::Lp { exponent, .. } => Ok(lp_norm(x, *exponent)),
            Ball::Pi { spec } => {
                let a = Tensor::new(spec.order(), spec.n(), x.to_vec())?;
                if let Some(v) = pi_norm_structural_exact(&a, spec)? {
                    return Ok(v);
                }
                let upper = pi_norm_upper_with(&a, spec, &SAMPLING_PI)?.value;
                if self.mode == NormMode::ExactOracle {
                    let lower = pi_norm_lower(&a, spec)?.value;
                    if (upper - lower).abs() > 1e-12 * upper {
                        return Err(Error::Unsupported(format!(
                            "projective norm of {} not exact here",
                            self.label()
                        )));
                    }
                }
                Ok(upper)
            }
            Ball::Eps { spec } => {
                let a = Tensor::new(spec.order(), spec.n(), x.to_vec())?;
                if let Some((v, _)) = eps_norm_exact(&a, spec)? {
                    return Ok(v);
                }
                if self.mode == NormMode::ExactOracle {
                    return Err(Error::Unsupported(format!(
                        "injective norm of {} not exact here",
                        self.label()
                    )));
                }
                let opts = AscentOptions {
                    restarts: 8,
                    ..AscentOptions::default()
                };
                Ok(eps_norm_ascend_with(&a, spec, &opts)?.best())
            }
        }
    }

    /// Which way heuristic norm evaluation biases a volume estimate.
    pub fn volume_bias(&self) -> Option<&'static str> {
        match (self.mode, self.kind()) {
            (NormMode::Heuristic, NormKind::Pi) => Some("under-estimate (norm from certified upper bounds)"),
            (NormMode::Heuristic, NormKind::Eps) => Some("over-estimate (norm from certified lower bounds)"),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VolumeEstimate {
    /// Natural log of `vol^{1/N}`.
    pub log_vol_root: f64,
    /// Delta-method standard error of `log_vol_root`.
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
    pub bias: Option<String>,
}

impl VolumeEstimate {
    pub fn vol_root(&self) -> f64 {
        self.log_vol_root.exp()
    }
}

/// `ln vol(B₂^N)`.
pub fn ln_euclidean_ball_volume(dim: usize) -> f64 {
    let d = dim as f64;
    0.5 * d * std::f64::consts::PI.ln() - ln_gamma(0.5 * d + 1.0)
}

/// `ln vol(B_p^n) = n ln 2 + n ln Γ(1 + 1/p) − ln Γ(1 + n/p)`.
pub fn ln_lp_ball_volume(n: usize, p: ExtExponent) -> f64 {
    let d = n as f64;
    if p.is_infinite() {
        return d * std::f64::consts::LN_2;
    }
    let inv = p.reciprocal_f64();
    d * std::f64::consts::LN_2 + d * ln_gamma(1.0 + inv) - ln_gamma(1.0 + d * inv)
}

pub fn lp_ball_volume_exact(n: usize, p: ExtExponent) -> f64 {
    ln_lp_ball_volume(n, p).exp()
}

/// Mean and standard error of `ln mean(exp(xs))`, computed stably.
fn log_mean_exp(xs: &[f64]) -> (f64, f64) {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = xs.iter().map(|x| (x - m).exp()).collect();
    let len = w.len() as f64;
    let mean = w.iter().sum::<f64>() / len;
    let var = w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (len - 1.0).max(1.0);
    (m + mean.ln(), (var / len).sqrt() / mean)
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let len = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / len;
    let var = xs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (len - 1.0).max(1.0);
    (mean, (var / len).sqrt())
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < 2 {
        return Err(Error::Usage("need at least two samples".into()));
    }
    Ok(())
}

/// Per-sample values `f(i, rng_i)`, evaluated in parallel with per-index seeds.
fn sample_values<F>(samples: usize, seed: u64, f: F) -> Result<Vec<f64>>
where
    F: Fn(&mut crate::sampling::SeededRng) -> Result<f64> + Sync,
{
    (0..samples)
        .into_par_iter()
        .map(|i| f(&mut rng(child_seed(seed, i as u64))))
        .collect()
}

pub fn radial_volume(ball: &BallSpec, samples: usize, seed: u64) -> Result<VolumeEstimate> {
    check_samples(samples)?;
    let dim = ball.dim();
    let nf = dim as f64;
    let logs = sample_values(samples, seed, |g| {
        let theta = sphere_direction(g, dim);
        let norm = ball.norm(&theta)?;
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::Numerical(format!("degenerate norm {norm} on {}", ball.label())));
        }
        Ok(-nf * norm.ln())
    })?;
    let (lme, se) = log_mean_exp(&logs);
    Ok(VolumeEstimate {
        log_vol_root: (ln_euclidean_ball_volume(dim) + lme) / nf,
        stderr: se / nf,
        samples,
        seed,
        bias: ball.volume_bias().map(String::from),
    })
}

/// Averages of `‖Σ ε_I e_I‖` over random signs.
pub fn rademacher_average(ball: &BallSpec, samples: usize, seed: u64) -> Result<(f64, f64)> {
    check_samples(samples)?;
    let dim = ball.dim();
    let values = sample_values(samples, seed, |g| ball.norm(&sign_vector(g, dim)))?;
    Ok(mean_and_stderr(&values))
}

pub fn gaussian_average(ball: &BallSpec, samples: usize, seed: u64) -> Result<(f64, f64)> {
    check_samples(samples)?;
    let dim = ball.dim();
    let values = sample_values(samples, seed, |g| ball.norm(&gaussian_vector(g, dim)))?;
    Ok(mean_and_stderr(&values))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchuettBound {
    /// `2 / mean`
    pub value: f64,
    /// `2 / (mean + 3·stderr)`, valid with high confidence.
    pub certified: f64,
    pub mean: f64,
    pub stderr: f64,
}

/// Lower bound on `vol^{1/N}` from the Rademacher average of the unit vector
/// basis, which must consist of norm-one vectors.
pub fn schuett_lower_bound(ball: &BallSpec, samples: usize, seed: u64) -> Result<SchuettBound> {
    let dim = ball.dim();
    for i in 0..dim {
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        let v = ball.norm(&e)?;
        if (v - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSpec(format!(
                "basis vector {i} has norm {v} in {}",
                ball.label()
            )));
        }
    }
    let (mean, stderr) = rademacher_average(ball, samples, seed)?;
    Ok(SchuettBound {
        value: 2.0 / mean,
        certified: 2.0 / (mean + 3.0 * stderr),
        mean,
        stderr,
    })
}

/// `n^{−e}` with `−e` the volume exponent: a lower bound on `vol(B_π)^{1/n³}`.
pub fn cube_inclusion_bound(spec: &SpaceSpec) -> Result<f64> {
    if spec.order() != 3 {
        return Err(Error::Unsupported(format!("order {} (needs 3)", spec.order())));
    }
    let s = spec.sorted();
    let e = crate::exponent::rational_to_f64(vol_exponent_3fold(s[0], s[1], s[2]));
    Ok((spec.n() as f64).powf(e))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SantaloRecord {
    /// `log(vol(K)^{1/N}·vol(K°)^{1/N})`
    pub lhs_log: f64,
    /// `log(vol(B₂^N)^{2/N})`
    pub rhs_log: f64,
    pub stderr: f64,
    /// `(rhs − lhs)/stderr`; infinite when the estimate is noiseless.
    pub margin_sigmas: f64,
    pub primal: VolumeEstimate,
    pub polar: VolumeEstimate,
}

pub const SANTALO_MAX_DIM: usize = 64;

pub fn santalo_check_balls(primal: &BallSpec, polar: &BallSpec, samples: usize, seed: u64) -> Result<SantaloRecord> {
    let dim = primal.dim();
    if dim != polar.dim() {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: polar.dim(),
        });
    }
    if dim > SANTALO_MAX_DIM {
        return Err(Error::ResourceGuard(format!(
            "dimension {dim} exceeds {SANTALO_MAX_DIM}"
        )));
    }
    let a = radial_volume(primal, samples, child_seed(seed, 0))?;
    let b = radial_volume(polar, samples, child_seed(seed, 1))?;
    let lhs_log = a.log_vol_root + b.log_vol_root;
    let rhs_log = 2.0 * ln_euclidean_ball_volume(dim) / dim as f64;
    let stderr = a.stderr.hypot(b.stderr);
    let gap = rhs_log - lhs_log;
    let margin_sigmas = if stderr > 1e-12 {
        gap / stderr
    } else if gap.abs() <= 1e-12 {
        0.0
    } else {
        gap.signum() * f64::INFINITY
    };
    Ok(SantaloRecord {
        lhs_log,
        rhs_log,
        stderr,
        margin_sigmas,
        primal: a,
        polar: b,
    })
}

/// Product of the volumes of `B_π(spec)` and its polar `B_ε(spec*)`.
pub fn santalo_check(spec: &SpaceSpec, samples: usize, seed: u64) -> Result<SantaloRecord> {
    if spec.dim() > SANTALO_MAX_DIM {
        return Err(Error::ResourceGuard(format!(
            "dimension {} exceeds {SANTALO_MAX_DIM}",
            spec.dim()
        )));
    }
    let primal = BallSpec::tensor_auto(NormKind::Pi, spec.clone())?;
    let polar = primal.polar()?;
    santalo_check_balls(&primal, &polar, samples, seed)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DominationRecord {
    pub rademacher: f64,
    pub rademacher_stderr: f64,
    pub gaussian: f64,
    pub gaussian_stderr: f64,
    /// `√(π/2)·E_g + 3σ − E_ε`
    pub slack: f64,
    pub holds: bool,
}

pub fn gaussian_vs_rademacher_check(ball: &BallSpec, samples: usize, seed: u64) -> Result<DominationRecord> {
    let (r, rs) = rademacher_average(ball, samples, child_seed(seed, 0))?;
    let (g, gs) = gaussian_average(ball, samples, child_seed(seed, 1))?;
    let c = (std::f64::consts::PI / 2.0).sqrt();
    let sigma = rs.hypot(c * gs);
    let slack = c * g + 3.0 * sigma - r;
    Ok(DominationRecord {
        rademacher: r,
        rademacher_stderr: rs,
        gaussian: g,
        gaussian_stderr: gs,
        slack,
        holds: slack >= 0.0,
    })
}
