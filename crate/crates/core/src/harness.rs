//! Experiment plumbing: volume-ratio brackets, sweeps over `n` with log-log
//! slope fits, verdicts against the exponent tables, and invariant suites.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{rat, rational_serde, rational_to_f64, ExtExponent, Rational};
use crate::idnorm::{idnorm_lower, idnorm_upper_numeric};
use crate::rates::{
    bourgain_milman_floor, chevet_exponent, cotype2_unbounded, cotype_thresholds_3fold, cotype_thresholds_kfold,
    diag_s, idnorm_exponent_2fold, idnorm_exponent_3fold, mu_exponent, vol_exponent_3fold, vol_exponent_kfold,
    vr_bounds_kfold, vr_cases_kfold, vr_exponent_2fold, vr_exponent_3fold, vr_same_p, CotypeThreshold, RateResult,
};
use crate::sampling::child_seed;
use crate::space::SpaceSpec;
use crate::volume::{
    cube_inclusion_bound, ln_euclidean_ball_volume, radial_volume, schuett_lower_bound, BallSpec, NormKind,
    VolumeEstimate, SANTALO_MAX_DIM,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_TOLERANCE: f64 = 0.15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    Vr,
    Volume,
    Idnorm,
}

impl std::str::FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vr" => Ok(Quantity::Vr),
            "volume" | "vol" => Ok(Quantity::Volume),
            "idnorm" | "id" => Ok(Quantity::Idnorm),
            other => Err(Error::Usage(format!("unknown quantity {other:?} (vr, volume, idnorm)"))),
        }
    }
}

/// Bracket on `vol(B_π)^{1/N}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VolumeBracket {
    pub lower: f64,
    pub lower_source: String,
    pub upper: f64,
    pub upper_source: String,
    pub estimate: VolumeEstimate,
}

fn check_dim(spec: &SpaceSpec) -> Result<()> {
    if spec.dim() > SANTALO_MAX_DIM {
        return Err(Error::ResourceGuard(format!(
            "n^k = {} exceeds the Monte Carlo limit {SANTALO_MAX_DIM}",
            spec.dim()
        )));
    }
    Ok(())
}

/// Lower end: the larger of the cube-inclusion bound and the conservative
/// Schütt bound. Upper end: the smaller of the radial estimate plus 3σ and
/// the Santaló bound with a conservative Schütt bound on the polar.
pub fn volume_bracket(spec: &SpaceSpec, samples: usize, seed: u64) -> Result<VolumeBracket> {
    check_dim(spec)?;
    let ball = BallSpec::tensor_auto(NormKind::Pi, spec.clone())?;
    let estimate = radial_volume(&ball, samples, child_seed(seed, 0))?;
    let schuett = schuett_lower_bound(&ball, samples, child_seed(seed, 1))?.certified;
    let (mut lower, mut lower_source) = (schuett, "schuett".to_string());
    if spec.order() == 3 {
        let cube = cube_inclusion_bound(spec)?;
        if cube > lower {
            (lower, lower_source) = (cube, "cube inclusion".into());
        }
    }
    let polar = ball.polar()?;
    let polar_lower = schuett_lower_bound(&polar, samples, child_seed(seed, 2))?.certified;
    let santalo = (2.0 * ln_euclidean_ball_volume(spec.dim()) / spec.dim() as f64).exp() / polar_lower;
    let mc = (estimate.log_vol_root + 3.0 * estimate.stderr).exp();
    let (upper, upper_source) = if santalo < mc {
        (santalo, "santalo".to_string())
    } else {
        (mc, "radial estimate + 3 sigma".to_string())
    };
    Ok(VolumeBracket {
        lower,
        lower_source,
        upper: upper.max(lower),
        upper_source,
        estimate,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VrRecord {
    pub n: usize,
    pub vr_lower: f64,
    pub vr_upper: f64,
    pub volume: VolumeBracket,
    pub id_lower: f64,
    pub id_upper: f64,
    /// `vol(B₂^N)^{1/N}` from the Gamma function.
    pub euclidean_root: f64,
}

/// `vr = vol(B_X)^{1/N}·‖id: ℓ₂ → X‖ / vol(B₂^N)^{1/N}`, bracketed.
pub fn vr_numeric(spec: &SpaceSpec, samples: usize, seed: u64) -> Result<VrRecord> {
    check_dim(spec)?;
    let volume = volume_bracket(spec, samples, seed)?;
    let id_lower = idnorm_lower(spec)?.best.value;
    let id_upper = idnorm_upper_numeric(spec)?.best.value;
    let euclidean_root = (ln_euclidean_ball_volume(spec.dim()) / spec.dim() as f64).exp();
    Ok(VrRecord {
        n: spec.n(),
        vr_lower: volume.lower * id_lower / euclidean_root,
        vr_upper: volume.upper * id_upper / euclidean_root,
        volume,
        id_lower,
        id_upper,
        euclidean_root,
    })
}

/// Exponent-table prediction for a quantity.
pub fn theory(quantity: Quantity, exps: &[ExtExponent]) -> Result<RateResult> {
    let k = exps.len();
    let vr = || -> Result<RateResult> {
        Ok(match k {
            2 => vr_exponent_2fold(exps[0], exps[1]),
            3 => vr_exponent_3fold(exps[0], exps[1], exps[2]),
            _ => vr_bounds_kfold(exps)?,
        })
    };
    let vol = || -> Result<Rational> {
        Ok(if k == 3 {
            vol_exponent_3fold(exps[0], exps[1], exps[2])
        } else {
            vol_exponent_kfold(exps)?.exponent
        })
    };
    Ok(match quantity {
        Quantity::Vr => vr()?,
        Quantity::Volume => RateResult::exact(vol()?, "volume"),
        Quantity::Idnorm => match k {
            2 => RateResult::exact(idnorm_exponent_2fold(exps[0], exps[1]), "two-fold"),
            3 => idnorm_exponent_3fold(exps[0], exps[1], exps[2]),
            _ => {
                // vr = k/2 + vol + id at the exponent level
                let v = vr()?;
                let shift = rat(k as i64, 2) + vol()?;
                RateResult::interval(v.lower_exp - shift, v.upper_exp - shift, "k-fold via composition")
            }
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Consistent,
    Inconsistent,
    OpenInterval,
}

/// `consistent` (exact theory) or `open-interval` (interval theory) when the
/// slope lies within `tol` of the predicted range, `inconsistent` otherwise.
pub fn verdict(slope: f64, theory: &RateResult, tol: f64) -> Verdict {
    let inside = slope >= theory.lower_f64() - tol && slope <= theory.upper_f64() + tol;
    match (inside, theory.exact) {
        (false, _) => Verdict::Inconsistent,
        (true, true) => Verdict::Consistent,
        (true, false) => Verdict::OpenInterval,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub n: usize,
    pub lower: f64,
    pub upper: f64,
    /// Point estimate when one exists (Monte Carlo volume).
    pub estimate: Option<f64>,
    pub stderr: Option<f64>,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepFailure {
    pub n: usize,
    pub message: String,
    pub exit_code: i32,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub schema: u32,
    pub command: String,
    pub quantity: Quantity,
    pub spec: String,
    pub n_list: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub records: Vec<SweepRecord>,
    pub failures: Vec<SweepFailure>,
    pub fitted_slope: Option<SlopeFit>,
    pub lower_slope: Option<f64>,
    pub upper_slope: Option<f64>,
    pub theory: RateResult,
    pub tolerance: f64,
    pub verdict: Option<Verdict>,
    pub wall_time_ms: u64,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Weighted least squares of `ys` on `xs`; returns slope and its
/// residual-based standard error.
pub fn weighted_slope(xs: &[f64], ys: &[f64], weights: &[f64]) -> Option<SlopeFit> {
    if xs.len() < 2 {
        return None;
    }
    let sw: f64 = weights.iter().sum();
    let mx = xs.iter().zip(weights).map(|(x, w)| x * w).sum::<f64>() / sw;
    let my = ys.iter().zip(weights).map(|(y, w)| y * w).sum::<f64>() / sw;
    let sxx: f64 = xs.iter().zip(weights).map(|(x, w)| w * (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = xs
        .iter()
        .zip(ys)
        .zip(weights)
        .map(|((x, y), w)| w * (x - mx) * (y - my))
        .sum();
    let slope = sxy / sxx;
    let stderr = if xs.len() > 2 {
        let rss: f64 = xs
            .iter()
            .zip(ys)
            .zip(weights)
            .map(|((x, y), w)| w * (y - my - slope * (x - mx)).powi(2))
            .sum();
        (rss / (xs.len() - 2) as f64 / sxx).sqrt()
    } else {
        0.0
    };
    Some(SlopeFit { slope, stderr })
}

fn plain_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    weighted_slope(xs, ys, &vec![1.0; xs.len()]).map(|f| f.slope)
}

const MIN_WIDTH: f64 = 1e-3;

/// Slope of the log-midpoints with weights `1/width²` in log space.
pub fn fit_records(records: &[SweepRecord]) -> Option<SlopeFit> {
    let xs: Vec<f64> = records.iter().map(|r| (r.n as f64).ln()).collect();
    let ys: Vec<f64> = records.iter().map(|r| 0.5 * (r.lower.ln() + r.upper.ln())).collect();
    let ws: Vec<f64> = records
        .iter()
        .map(|r| (r.upper.ln() - r.lower.ln()).max(MIN_WIDTH).powi(-2))
        .collect();
    weighted_slope(&xs, &ys, &ws)
}

fn sweep_point(quantity: Quantity, spec: &SpaceSpec, samples: usize, seed: u64) -> Result<SweepRecord> {
    let n = spec.n();
    Ok(match quantity {
        Quantity::Idnorm => SweepRecord {
            n,
            lower: idnorm_lower(spec)?.best.value,
            upper: idnorm_upper_numeric(spec)?.best.value,
            estimate: None,
            stderr: None,
            certified: true,
        },
        Quantity::Volume => {
            let b = volume_bracket(spec, samples, seed)?;
            SweepRecord {
                n,
                lower: b.lower,
                upper: b.upper,
                estimate: Some(b.estimate.vol_root()),
                stderr: Some(b.estimate.stderr),
                certified: false,
            }
        }
        Quantity::Vr => {
            let v = vr_numeric(spec, samples, seed)?;
            SweepRecord {
                n,
                lower: v.vr_lower,
                upper: v.vr_upper,
                estimate: None,
                stderr: None,
                certified: false,
            }
        }
    })
}

/// Runs one quantity over `n_list`; failing points are kept in `failures`.
pub fn sweep(
    quantity: Quantity,
    exps: &[ExtExponent],
    n_list: &[usize],
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<ExperimentReport> {
    if n_list.len() < 2 {
        return Err(Error::Usage("a sweep needs at least two values of n".into()));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Usage("n values must be strictly increasing".into()));
    }
    let start = Instant::now();
    let specs: Vec<SpaceSpec> = n_list
        .iter()
        .map(|&n| SpaceSpec::new(exps.to_vec(), n))
        .collect::<Result<_>>()?;
    let theory = theory(quantity, exps)?;
    let outcomes: Vec<Result<SweepRecord>> = specs
        .par_iter()
        .enumerate()
        .map(|(i, spec)| sweep_point(quantity, spec, samples, child_seed(seed, i as u64)))
        .collect();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (outcome, &n) in outcomes.into_iter().zip(n_list) {
        match outcome {
            Ok(r) => records.push(r),
            Err(e) => failures.push(SweepFailure {
                n,
                message: e.to_string(),
                exit_code: e.exit_code(),
            }),
        }
    }
    let fitted_slope = fit_records(&records);
    let xs: Vec<f64> = records.iter().map(|r| (r.n as f64).ln()).collect();
    let lows: Vec<f64> = records.iter().map(|r| r.lower.ln()).collect();
    let highs: Vec<f64> = records.iter().map(|r| r.upper.ln()).collect();
    Ok(ExperimentReport {
        schema: SCHEMA_VERSION,
        command: "sweep".into(),
        quantity,
        spec: SpaceSpec::new(exps.to_vec(), 1)?.exponent_label(),
        n_list: n_list.to_vec(),
        samples,
        seed,
        verdict: fitted_slope.map(|f| verdict(f.slope, &theory, tol)),
        lower_slope: plain_slope(&xs, &lows),
        upper_slope: plain_slope(&xs, &highs),
        records,
        failures,
        fitted_slope,
        theory,
        tolerance: tol,
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

pub fn records_to_csv(records: &[SweepRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).map_err(|e| Error::Malformed(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Malformed(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Malformed(e.to_string()))
}

pub fn records_from_csv(text: &str) -> Result<Vec<SweepRecord>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .map(|r| r.map_err(|e| Error::Malformed(e.to_string())))
        .collect()
}

/// Everything the exponent tables say about one product.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentsReport {
    pub schema: u32,
    pub spec: String,
    pub k: usize,
    pub kfold: bool,
    pub vr: RateResult,
    #[serde(with = "rational_serde")]
    pub vol: Rational,
    pub idnorm: RateResult,
    #[serde(with = "rational_serde::option")]
    pub mu: Option<Rational>,
    pub s: ExtExponent,
    #[serde(with = "rational_serde")]
    pub chevet: Rational,
    pub cotype_thresholds: Vec<CotypeThreshold>,
    pub cotype2_unbounded: bool,
    pub kfold_cases: Vec<RateResult>,
    pub same_p: Option<crate::rates::SamePRates>,
    /// Constant floor implied at `n = 2` by the lower volume-ratio rate.
    pub bourgain_milman_floor_n2: f64,
}

pub fn exponents_report(exps: &[ExtExponent], kfold: bool) -> Result<ExponentsReport> {
    let k = exps.len();
    if k < 2 {
        return Err(Error::InvalidSpec("need at least two exponents".into()));
    }
    let label = SpaceSpec::new(exps.to_vec(), 1)?.exponent_label();
    let use_kfold = kfold || k > 3;
    if use_kfold && k < 3 {
        return Err(Error::Usage("k-fold tables need at least three factors".into()));
    }
    let vr = if use_kfold {
        vr_bounds_kfold(exps)?
    } else {
        theory(Quantity::Vr, exps)?
    };
    let vol = if use_kfold || k != 3 {
        vol_exponent_kfold(exps)?.exponent
    } else {
        vol_exponent_3fold(exps[0], exps[1], exps[2])
    };
    let idnorm = theory(Quantity::Idnorm, exps)?;
    let mu = (k == 3).then(|| mu_exponent(exps[0], exps[1], exps[2])).flatten();
    let cotype_thresholds = if k == 3 && !use_kfold {
        cotype_thresholds_3fold(exps[0], exps[1], exps[2])
    } else {
        cotype_thresholds_kfold(exps)
    };
    let kfold_cases = if use_kfold { vr_cases_kfold(exps)? } else { Vec::new() };
    let same_p = if exps.iter().all(|&p| p == exps[0]) {
        Some(vr_same_p(exps[0], k)?)
    } else {
        None
    };
    Ok(ExponentsReport {
        schema: SCHEMA_VERSION,
        spec: label,
        k,
        kfold: use_kfold,
        cotype2_unbounded: cotype2_unbounded(&vr),
        bourgain_milman_floor_n2: bourgain_milman_floor(vr.lower_const * 2f64.powf(rational_to_f64(vr.lower_exp))),
        vr,
        vol,
        idnorm,
        mu,
        s: diag_s(exps),
        chevet: chevet_exponent(exps),
        cotype_thresholds,
        kfold_cases,
        same_p,
    })
}

pub const GRID: [&str; 6] = ["1", "4/3", "2", "3", "4", "inf"];

/// One row of the 3-fold table over the standard grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub p: String,
    pub q: String,
    pub r: String,
    pub vr_lower: String,
    pub vr_upper: String,
    pub vol: String,
    pub id_lower: String,
    pub id_upper: String,
}

pub fn exponents_grid() -> Vec<GridRow> {
    let g: Vec<ExtExponent> = GRID.iter().map(|s| s.parse().expect("grid exponent")).collect();
    let mut out = Vec::new();
    for i in 0..g.len() {
        for j in i..g.len() {
            for l in j..g.len() {
                let (p, q, r) = (g[i], g[j], g[l]);
                let vr = vr_exponent_3fold(p, q, r);
                let id = idnorm_exponent_3fold(p, q, r);
                let f = rational_serde::to_string;
                out.push(GridRow {
                    p: p.to_string(),
                    q: q.to_string(),
                    r: r.to_string(),
                    vr_lower: f(&vr.lower_exp),
                    vr_upper: f(&vr.upper_exp),
                    vol: f(&vol_exponent_3fold(p, q, r)),
                    id_lower: f(&id.lower_exp),
                    id_upper: f(&id.upper_exp),
                });
            }
        }
    }
    out
}

pub fn grid_to_csv(rows: &[GridRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Malformed(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Malformed(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Malformed(e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifySummary {
    pub schema: u32,
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

pub const SUITES: [&str; 5] = ["exponents", "norms", "volume", "idnorm", "all"];

pub fn verify(suite: &str, seed: u64) -> Result<VerifySummary> {
    let mut checks = Vec::new();
    let parts: Vec<&str> = match suite {
        "all" => SUITES[..4].to_vec(),
        s if SUITES.contains(&s) => vec![s],
        other => {
            return Err(Error::Usage(format!(
                "unknown suite {other:?}; available: {}",
                SUITES.join(", ")
            )))
        }
    };
    for part in parts {
        match part {
            "exponents" => suites::exponents(&mut checks)?,
            "norms" => suites::norms(&mut checks, seed)?,
            "volume" => suites::volume(&mut checks, seed)?,
            "idnorm" => suites::idnorm(&mut checks)?,
            _ => unreachable!(),
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifySummary {
        schema: SCHEMA_VERSION,
        suite: suite.to_string(),
        seed,
        checks,
        passed,
    })
}

mod suites {
    use super::*;
    use crate::norm::{eps_norm_ascend, eps_norm_bruteforce, khintchine_lower_bound, pi_norm_lower, pi_norm_upper};
    use crate::sampling::sample_gaussian_tensor;
    use crate::volume::{ln_lp_ball_volume, santalo_check};

    fn check(out: &mut Vec<CheckResult>, name: &str, failures: Vec<String>, total: usize) {
        out.push(CheckResult {
            name: name.to_string(),
            passed: failures.is_empty(),
            detail: if failures.is_empty() {
                format!("{total} cases")
            } else {
                format!("{} of {total} failed; first: {}", failures.len(), failures[0])
            },
        });
    }

    fn grid3(choices: &[&str]) -> Vec<[ExtExponent; 3]> {
        let g: Vec<ExtExponent> = choices.iter().map(|s| s.parse().expect("exponent")).collect();
        let mut out = Vec::new();
        for i in 0..g.len() {
            for j in i..g.len() {
                for l in j..g.len() {
                    out.push([g[i], g[j], g[l]]);
                }
            }
        }
        out
    }

    pub fn exponents(out: &mut Vec<CheckResult>) -> Result<()> {
        let grid = grid3(&GRID);
        let three_halves = rat(3, 2);
        let mut bad = Vec::new();
        for [p, q, r] in &grid {
            let vr = vr_exponent_3fold(*p, *q, *r);
            let id = idnorm_exponent_3fold(*p, *q, *r);
            if vr.exact && id.exact && three_halves + vol_exponent_3fold(*p, *q, *r) + id.lower_exp != vr.lower_exp {
                bad.push(format!("({p},{q},{r})"));
            }
        }
        check(out, "composition identity", bad, grid.len());
        let mut bad = Vec::new();
        for [p, q, r] in &grid {
            let k = vr_bounds_kfold(&[*p, *q, *r])?;
            let a = vr_exponent_3fold(*p, *q, *r);
            let kv = vol_exponent_kfold(&[*p, *q, *r])?.exponent;
            if k.upper_exp != a.upper_exp || k.lower_exp > a.lower_exp || kv != vol_exponent_3fold(*p, *q, *r) {
                bad.push(format!("({p},{q},{r})"));
            }
        }
        check(out, "k-fold reduces at k = 3", bad, grid.len());
        Ok(())
    }

    pub fn norms(out: &mut Vec<CheckResult>, seed: u64) -> Result<()> {
        let polytope = grid3(&["1", "inf"]);
        let mut bad = Vec::new();
        let mut total = 0;
        for (i, exps) in polytope.iter().enumerate() {
            for t in 0..5u64 {
                let spec = SpaceSpec::new(exps.to_vec(), 2)?;
                let a = sample_gaussian_tensor(3, 2, child_seed(seed, (i as u64) * 16 + t));
                let asc = eps_norm_ascend(&a, &spec, 32, 1e-10)?.heuristic;
                let brute = eps_norm_bruteforce(&a, &spec, 2)?;
                if (asc - brute.lower).abs() > 1e-8 * brute.lower.max(1.0) {
                    bad.push(format!("{spec}: ascent {asc} vs {}", brute.lower));
                }
                if brute.lower < khintchine_lower_bound(&a, &spec)? {
                    bad.push(format!("{spec}: khintchine bound violated"));
                }
                total += 1;
            }
        }
        check(out, "injective oracle agreement and khintchine", bad, total);
        let mut bad = Vec::new();
        let mixed = grid3(&["1", "2", "inf"]);
        for (i, exps) in mixed.iter().enumerate() {
            let spec = SpaceSpec::new(exps.to_vec(), 2)?;
            let a = sample_gaussian_tensor(3, 2, child_seed(seed ^ 0x77, i as u64));
            let low = pi_norm_lower(&a, &spec)?.value;
            let up = pi_norm_upper(&a, &spec, 2, 2, 1e-12)?.value;
            if low > up * (1.0 + 1e-9) {
                bad.push(format!("{spec}: {low} > {up}"));
            }
        }
        check(out, "projective bracket ordered", bad, mixed.len());
        Ok(())
    }

    pub fn volume(out: &mut Vec<CheckResult>, seed: u64) -> Result<()> {
        let mut bad = Vec::new();
        let cases = [(8, "1"), (8, "2"), (8, "inf")];
        for (i, (n, p)) in cases.iter().enumerate() {
            let p: ExtExponent = p.parse()?;
            let est = radial_volume(&BallSpec::lp(p, *n)?, 20_000, child_seed(seed, i as u64))?;
            let exact = ln_lp_ball_volume(*n, p) / *n as f64;
            if (est.log_vol_root - exact).abs() > 3.0 * est.stderr + 1e-12 {
                bad.push(format!("l{p}^{n}: {} vs {exact}", est.log_vol_root));
            }
        }
        check(out, "radial volume matches closed forms", bad, cases.len());
        let mut bad = Vec::new();
        let specs = ["1,1,1", "1,2,inf", "inf,inf,inf"];
        for (i, s) in specs.iter().enumerate() {
            let spec = SpaceSpec::parse(s, 2)?;
            let b = volume_bracket(&spec, 2000, child_seed(seed ^ 0x55, i as u64))?;
            let ceiling = b.estimate.log_vol_root + 3.0 * b.estimate.stderr;
            if b.lower.ln() > ceiling {
                bad.push(format!("{spec}: lower {} above estimate", b.lower));
            }
            let rec = santalo_check(&spec, 2000, child_seed(seed ^ 0x66, i as u64))?;
            if rec.margin_sigmas < -3.0 {
                bad.push(format!("{spec}: santalo margin {}", rec.margin_sigmas));
            }
        }
        check(out, "certified volume envelope", bad, specs.len());
        Ok(())
    }

    pub fn idnorm(out: &mut Vec<CheckResult>) -> Result<()> {
        let mut bad = Vec::new();
        for n in 2..=4 {
            let spec = SpaceSpec::parse("1,1,1", n)?;
            let low = idnorm_lower(&spec)?.best.value;
            let up = idnorm_upper_numeric(&spec)?.best.value;
            let target = (n as f64).powf(1.5);
            if (low - target).abs() > 1e-9 * target || (up - target).abs() > 1e-9 * target {
                bad.push(format!("n={n}: [{low}, {up}] vs {target}"));
            }
        }
        check(out, "identity norm pinned for (1,1,1)", bad, 3);
        let mut bad = Vec::new();
        let grid = grid3(&["1", "2", "inf"]);
        for exps in &grid {
            let spec = SpaceSpec::new(exps.to_vec(), 3)?;
            let low = idnorm_lower(&spec)?.best.value;
            let up = idnorm_upper_numeric(&spec)?.best.value;
            if low > up + 1e-9 || low < 1.0 - 1e-12 {
                bad.push(format!("{spec}: [{low}, {up}]"));
            }
        }
        check(out, "identity norm bracket ordered", bad, grid.len());
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::parse_exponent_list;

    fn exps(s: &str) -> Vec<ExtExponent> {
        parse_exponent_list(s).unwrap()
    }

    #[test]
    fn slope_of_exact_power_law() {
        let xs: Vec<f64> = [2.0f64, 3.0, 5.0].iter().map(|x| x.ln()).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.5 * x + 0.2).collect();
        let fit = weighted_slope(&xs, &ys, &[1.0, 2.0, 3.0]).unwrap();
        assert!((fit.slope - 1.5).abs() < 1e-12 && fit.stderr < 1e-9);
        assert!(weighted_slope(&xs[..1], &ys[..1], &[1.0]).is_none());
    }

    #[test]
    fn verdict_bands() {
        let exact = RateResult::exact(rat(1, 2), "x");
        assert_eq!(verdict(0.6, &exact, 0.15), Verdict::Consistent);
        assert_eq!(verdict(0.7, &exact, 0.15), Verdict::Inconsistent);
        let open = RateResult::interval(rat(0, 1), rat(1, 4), "y");
        assert_eq!(verdict(0.1, &open, 0.15), Verdict::OpenInterval);
        assert_eq!(verdict(-0.2, &open, 0.15), Verdict::Inconsistent);
    }

    #[test]
    fn idnorm_sweep_on_ones() {
        let rep = sweep(
            Quantity::Idnorm,
            &exps("1,1,1"),
            &[2, 3, 4, 6, 8],
            0,
            0,
            DEFAULT_TOLERANCE,
        )
        .unwrap();
        let fit = rep.fitted_slope.unwrap();
        assert!((fit.slope - 1.5).abs() < 1e-9, "{fit:?}");
        assert_eq!(rep.verdict, Some(Verdict::Consistent));
        assert_eq!(rep.schema, 1);
    }

    #[test]
    fn sweep_rejects_short_lists() {
        assert!(matches!(
            sweep(Quantity::Idnorm, &exps("1,1,1"), &[], 0, 0, 0.15),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            sweep(Quantity::Idnorm, &exps("1,1,1"), &[3, 2], 0, 0, 0.15),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn volume_sweep_keeps_partial_results() {
        let rep = sweep(Quantity::Volume, &exps("inf,inf,inf"), &[2, 3, 5], 200, 1, 0.15).unwrap();
        assert_eq!(rep.records.len(), 2);
        assert_eq!(rep.failures.len(), 1);
        assert_eq!(rep.failures[0].exit_code, 2);
    }

    #[test]
    fn cube_bound_slope_is_exact() {
        let xs: Vec<f64> = [2.0f64, 3.0].iter().map(|x| x.ln()).collect();
        let ys: Vec<f64> = [2, 3]
            .iter()
            .map(|&n| {
                cube_inclusion_bound(&SpaceSpec::parse("inf,inf,inf", n).unwrap())
                    .unwrap()
                    .ln()
            })
            .collect();
        assert!((plain_slope(&xs, &ys).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip() {
        let records = vec![
            SweepRecord {
                n: 2,
                lower: 0.1 + 0.2,
                upper: 1.0 / 3.0,
                estimate: Some(std::f64::consts::PI),
                stderr: Some(1e-17),
                certified: false,
            },
            SweepRecord {
                n: 3,
                lower: 1.0,
                upper: 2.0,
                estimate: None,
                stderr: None,
                certified: true,
            },
        ];
        assert_eq!(records_from_csv(&records_to_csv(&records).unwrap()).unwrap(), records);
    }

    #[test]
    fn exponents_reports() {
        let r = exponents_report(&exps("1,2,inf"), false).unwrap();
        assert_eq!(r.vr.lower_exp, rat(0, 1));
        assert!(r.vr.exact);
        let k = exponents_report(&exps("4,4,4,4"), true).unwrap();
        assert!(k.kfold && !k.kfold_cases.is_empty());
        assert!(k.same_p.is_some());
        assert_eq!(exponents_grid().len(), 56);
    }

    #[test]
    fn vr_bracket_examples() {
        for s in ["inf,inf,inf", "1,1,1", "1,2,inf"] {
            let v = vr_numeric(&SpaceSpec::parse(s, 2).unwrap(), 4000, 3).unwrap();
            assert!(0.0 < v.vr_lower && v.vr_lower <= v.vr_upper, "{s}: {v:?}");
            assert!(v.id_lower <= v.id_upper * (1.0 + 1e-12));
        }
    }

    #[test]
    fn verify_rejects_unknown_suite() {
        assert!(matches!(verify("nope", 0), Err(Error::Usage(_))));
    }
}
