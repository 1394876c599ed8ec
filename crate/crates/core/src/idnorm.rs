//! Bounds on `‖id: ℓ₂^{n^k} → ℓ_{p₁} ⊗_π … ⊗_π ℓ_{p_k}‖`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponent::{ExtExponent, Rational};
use crate::lp::lp_norm;
use crate::norm::pi::pi_norm_lower;
use crate::rates::diag_s;
use crate::sampling::{child_seed, gaussian, rng, sample_sign_tensor};
use crate::space::SpaceSpec;
use crate::tensor::Tensor;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bound {
    pub value: f64,
    pub label: String,
    pub certified: bool,
}

impl Bound {
    fn new(value: f64, label: impl Into<String>, certified: bool) -> Self {
        Bound {
            value,
            label: label.into(),
            certified,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdNormLower {
    pub best: Bound,
    pub candidates: Vec<Bound>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdNormUpper {
    pub best: Bound,
    pub candidates: Vec<Bound>,
    /// Exponent of an asymptotic bound with an unknown constant.
    #[serde(with = "crate::exponent::rational_serde::option")]
    pub asymptotic_exponent: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdNormEstimate {
    pub lower: Bound,
    pub upper: Bound,
    pub n: usize,
    pub spec: SpaceSpec,
}

fn pi_ratio(a: &Tensor, spec: &SpaceSpec) -> Result<f64> {
    let l2 = a.l2_norm();
    if l2 == 0.0 {
        return Err(Error::Numerical("zero tensor in norm ratio".into()));
    }
    Ok(pi_norm_lower(a, spec)?.value / l2)
}

fn matrix_candidates(n: usize) -> Vec<(&'static str, Tensor)> {
    let mut out = vec![
        ("e1e1", Tensor::basis(2, n, &[0, 0])),
        ("identity", Tensor::diagonal(2, n)),
        ("ones", Tensor::filled(2, n, 1.0)),
    ];
    for seed in 0..4 {
        out.push(("signs", sample_sign_tensor(2, n, child_seed(0x1d, seed))));
    }
    out
}

fn vector_candidates(n: usize) -> Vec<(&'static str, Vec<f64>)> {
    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;
    vec![("e1", e1), ("ones", vec![1.0; n])]
}

const SIGN_TENSOR_DRAWS: u64 = 6;

/// Largest certified ratio `‖A‖_π / ‖A‖₂` among the structured candidates:
/// the diagonal, `x ⊗ B` for `x ∈ {e₁, 1}` in each mode with a two-fold
/// witness `B` in the other modes, and sign tensors.
pub fn idnorm_lower(spec: &SpaceSpec) -> Result<IdNormLower> {
    let n = spec.n();
    let k = spec.order();
    let exps = spec.mode_exponents();
    let mut candidates = Vec::new();

    let s = diag_s(&exps);
    candidates.push(Bound::new((n as f64).powf(s.reciprocal_f64() - 0.5), "diagonal", true));

    if k == 3 {
        for m in 0..3 {
            let rest: Vec<ExtExponent> = (0..3).filter(|&j| j != m).map(|j| exps[j]).collect();
            let pair = SpaceSpec::new(rest, n)?;
            let mut best_b = (0.0, "");
            for (name, b) in matrix_candidates(n) {
                let r = pi_ratio(&b, &pair)?;
                if r > best_b.0 {
                    best_b = (r, name);
                }
            }
            for (xname, x) in vector_candidates(n) {
                let value = lp_norm(&x, exps[m]) / lp_norm(&x, ExtExponent::two()) * best_b.0;
                candidates.push(Bound::new(value, format!("{xname} (mode {m}) x {}", best_b.1), true));
            }
        }
    } else {
        let one_hot = Tensor::basis(k, n, &vec![0; k]);
        candidates.push(Bound::new(pi_ratio(&one_hot, spec)?, "one-hot", true));
    }

    let mut signs = vec![("all-ones signs".to_string(), Tensor::filled(k, n, 1.0))];
    for seed in 0..SIGN_TENSOR_DRAWS {
        signs.push((
            format!("random signs #{seed}"),
            sample_sign_tensor(k, n, child_seed(0x5a, seed)),
        ));
    }
    for (label, a) in signs {
        candidates.push(Bound::new(pi_ratio(&a, spec)?, label, true));
    }

    let best = candidates
        .iter()
        .fold(None::<&Bound>, |acc, c| match acc {
            Some(b) if b.value >= c.value => Some(b),
            _ => Some(c),
        })
        .cloned()
        .expect("at least one construction");
    Ok(IdNormLower { best, candidates })
}

/// `max_B ‖B‖_π/‖B‖₂` over ℓ_p ⊗_π ℓ_q from column slices, or exactly `√n`
/// for `p = q = 2`.
fn two_fold_upper(p: ExtExponent, q: ExtExponent, n: usize) -> (f64, &'static str) {
    let nf = n as f64;
    if p == ExtExponent::two() && q == ExtExponent::two() {
        return (nf.sqrt(), "trace norm");
    }
    let fiber = |e: ExtExponent| (e.reciprocal_f64() - 0.5).max(0.0) + 0.5;
    let exponent = fiber(p).min(fiber(q));
    (nf.powf(exponent), "column slices")
}

/// Certified numeric upper bounds, plus the asymptotic exponent when the
/// multilinear Hardy–Littlewood regime `Σ 1/p_j ≤ 1/2` applies.
pub fn idnorm_upper_numeric(spec: &SpaceSpec) -> Result<IdNormUpper> {
    let n = spec.n();
    let nf = n as f64;
    let sorted = spec.sorted();
    let k = spec.order();
    let mut candidates = Vec::new();

    candidates.push(Bound::new(nf.powf(k as f64 / 2.0), "entrywise", true));
    for &e in sorted {
        let v = nf.powf((e.reciprocal_f64() - 0.5).max(0.0) + (k as f64 - 1.0) / 2.0);
        candidates.push(Bound::new(v, format!("fibers in l{e}"), true));
    }
    if k == 3 {
        let (p, q, r) = (sorted[0], sorted[1], sorted[2]);
        let (two, how) = two_fold_upper(p, q, n);
        let v = nf.powf(r.reciprocal_f64().min(0.5)) * two;
        candidates.push(Bound::new(v, format!("recursive ({how})"), true));
    }
    let best = candidates
        .iter()
        .fold(None::<&Bound>, |acc, c| match acc {
            Some(b) if b.value <= c.value => Some(b),
            _ => Some(c),
        })
        .cloned()
        .expect("at least one bound");
    let asymptotic_exponent = (spec.reciprocal_sum() <= crate::exponent::rat(1, 2)).then(|| Rational::from_integer(0));
    Ok(IdNormUpper {
        best,
        candidates,
        asymptotic_exponent,
    })
}

pub fn idnorm_estimate(spec: &SpaceSpec) -> Result<IdNormEstimate> {
    Ok(IdNormEstimate {
        lower: idnorm_lower(spec)?.best,
        upper: idnorm_upper_numeric(spec)?.best,
        n: spec.n(),
        spec: spec.clone(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioSearch {
    pub value: f64,
    pub tensor: Tensor,
    pub label: String,
}

const HILL_CLIMB_STEPS: usize = 150;

/// Hill climbing on the entries of `A` to raise the certified ratio
/// `π-lower(A)/‖A‖₂`; the result is never below [`idnorm_lower`].
pub fn idnorm_ratio_search(spec: &SpaceSpec, restarts: usize, seed: u64) -> Result<RatioSearch> {
    let (k, n) = (spec.order(), spec.n());
    let mut starts = vec![
        ("one-hot", Tensor::basis(k, n, &vec![0; k])),
        ("all-ones", Tensor::filled(k, n, 1.0)),
        ("diagonal", Tensor::diagonal(k, n)),
    ];
    for r in 0..restarts as u64 {
        starts.push(("random signs", sample_sign_tensor(k, n, child_seed(seed, r))));
    }
    let mut best: Option<RatioSearch> = None;
    for (i, (label, start)) in starts.into_iter().enumerate() {
        let found = climb(spec, start, child_seed(seed ^ 0xc1, i as u64), label)?;
        if best.as_ref().map_or(true, |b| found.value > b.value) {
            best = Some(found);
        }
    }
    let mut best = best.expect("at least one start");
    let constructions = idnorm_lower(spec)?.best;
    if constructions.value > best.value {
        best.value = constructions.value;
        best.label = constructions.label;
    }
    Ok(best)
}

fn climb(spec: &SpaceSpec, start: Tensor, seed: u64, label: &str) -> Result<RatioSearch> {
    let mut g = rng(seed);
    let mut a = start;
    let mut value = pi_ratio(&a, spec)?;
    let scale = a.max_abs();
    for _ in 0..HILL_CLIMB_STEPS {
        let mut trial = a.clone();
        let idx = g.random_range(0..trial.len());
        trial.entries_mut()[idx] += 0.5 * scale * gaussian(&mut g);
        if trial.is_zero() {
            continue;
        }
        let v = pi_ratio(&trial, spec)?;
        if v > value {
            a = trial;
            value = v;
        }
    }
    Ok(RatioSearch {
        value,
        tensor: a,
        label: format!("hill climb from {label}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str, n: usize) -> SpaceSpec {
        SpaceSpec::parse(s, n).unwrap()
    }

    #[test]
    fn ones_spec_pins_the_norm() {
        let sp = spec("1,1,1", 4);
        let low = idnorm_lower(&sp).unwrap();
        assert!((low.best.value - 8.0).abs() < 1e-9, "{:?}", low.best);
        let diag = low.candidates.iter().find(|c| c.label == "diagonal").unwrap();
        assert!((diag.value - 2.0).abs() < 1e-12);
        let up = idnorm_upper_numeric(&sp).unwrap();
        assert!((up.best.value - 8.0).abs() < 1e-9);
    }

    #[test]
    fn lower_reaches_n_for_one_two_two() {
        for n in 2..=3 {
            let low = idnorm_lower(&spec("1,2,2", n)).unwrap();
            assert!(low.best.value >= n as f64 * (1.0 - 1e-9), "n={n}: {:?}", low.best);
        }
    }

    #[test]
    fn euclidean_pair_upper() {
        for n in 2..5 {
            let up = idnorm_upper_numeric(&spec("2,2,4", n)).unwrap();
            let target = (n as f64).powf(0.25) * (n as f64).sqrt();
            assert!(up.best.value <= target * (1.0 + 1e-12));
        }
    }

    #[test]
    fn hardy_littlewood_regime() {
        assert_eq!(
            idnorm_upper_numeric(&spec("8,8,8", 3)).unwrap().asymptotic_exponent,
            Some(Rational::from_integer(0))
        );
        assert_eq!(
            idnorm_upper_numeric(&spec("4,4,4", 3)).unwrap().asymptotic_exponent,
            None
        );
    }

    #[test]
    fn lower_is_at_least_one() {
        for s in ["inf,inf,inf", "2,3,inf", "4/3,2,4", "1,1,1"] {
            for n in 1..4 {
                assert!(idnorm_lower(&spec(s, n)).unwrap().best.value >= 1.0 - 1e-12);
            }
        }
    }

    #[test]
    fn ratio_search_examples() {
        let found = idnorm_ratio_search(&spec("1,1,1", 2), 2, 0).unwrap();
        assert!((found.value - 2f64.powf(1.5)).abs() < 1e-9);
        let sp = spec("2,3,inf", 2);
        let one_hot = Tensor::basis(3, 2, &[0, 0, 0]);
        assert!((pi_ratio(&one_hot, &sp).unwrap() - 1.0).abs() < 1e-12);
        assert!((pi_ratio(&one_hot.scaled(10.0), &sp).unwrap() - 1.0).abs() < 1e-12);
    }
}
