//! Piecewise asymptotic exponents in exact rational arithmetic.
//!
//! Every table is keyed on reciprocals `a = 1/p ≥ b = 1/q ≥ c = 1/r` of the
//! sorted exponents, so case conditions such as `1/p + 1/q + 1/r ≥ 1` are
//! decided exactly. Exponents are powers of `n`: a result `e` stands for
//! `n^e` up to constants depending on the exponents only.

use std::cmp::{max, min};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{rat, rational_serde, rational_to_f64, ExtExponent, Rational};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    #[serde(with = "rational_serde")]
    pub lower_exp: Rational,
    #[serde(with = "rational_serde")]
    pub upper_exp: Rational,
    pub exact: bool,
    pub case_label: String,
    /// Printed multiplicative constant in front of the lower bound.
    pub lower_const: f64,
    /// Printed multiplicative constant in front of the upper bound.
    pub upper_const: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notice: Option<String>,
}

impl RateResult {
    pub fn exact(value: Rational, label: impl Into<String>) -> Self {
        Self::interval(value, value, label)
    }

    pub fn interval(lower: Rational, upper: Rational, label: impl Into<String>) -> Self {
        debug_assert!(lower <= upper);
        RateResult {
            lower_exp: lower,
            upper_exp: upper,
            exact: lower == upper,
            case_label: label.into(),
            lower_const: 1.0,
            upper_const: 1.0,
            notice: None,
        }
    }

    fn with_consts(mut self, lower_const: f64, upper_const: f64) -> Self {
        self.lower_const = lower_const;
        self.upper_const = upper_const;
        self
    }

    pub fn contains(&self, x: Rational) -> bool {
        self.lower_exp <= x && x <= self.upper_exp
    }

    pub fn lower_f64(&self) -> f64 {
        rational_to_f64(self.lower_exp)
    }

    pub fn upper_f64(&self) -> f64 {
        rational_to_f64(self.upper_exp)
    }
}

fn half() -> Rational {
    rat(1, 2)
}

/// Reciprocals of a sorted triple plus their sum.
#[derive(Clone, Copy, Debug)]
struct Triple {
    a: Rational,
    b: Rational,
    c: Rational,
    s: Rational,
}

fn sorted_exponents(exps: &[ExtExponent]) -> (Vec<ExtExponent>, Option<String>) {
    let mut sorted = exps.to_vec();
    sorted.sort();
    let notice = (sorted != exps).then(|| {
        let shown: Vec<String> = sorted.iter().map(|p| p.to_string()).collect();
        format!("input sorted to ({})", shown.join(","))
    });
    (sorted, notice)
}

fn triple(p: ExtExponent, q: ExtExponent, r: ExtExponent) -> (Triple, Option<String>) {
    let (s, notice) = sorted_exponents(&[p, q, r]);
    let (a, b, c) = (s[0].reciprocal(), s[1].reciprocal(), s[2].reciprocal());
    (Triple { a, b, c, s: a + b + c }, notice)
}

fn noted(mut r: RateResult, notice: Option<String>) -> RateResult {
    r.notice = notice;
    r
}

/// One row of a piecewise table: which family it belongs to and its value.
#[derive(Clone, Debug, PartialEq)]
pub struct CaseHit {
    pub kind: CaseKind,
    pub rate: RateResult,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseKind {
    Regular,
    Override,
    Open,
}

fn select(hits: Vec<CaseHit>) -> RateResult {
    for kind in [CaseKind::Regular, CaseKind::Override, CaseKind::Open] {
        if let Some(hit) = hits.iter().find(|h| h.kind == kind) {
            return hit.rate.clone();
        }
    }
    unreachable!("the 3-fold tables cover every sorted triple")
}

fn hit(kind: CaseKind, rate: RateResult) -> CaseHit {
    CaseHit { kind, rate }
}

/// Every 3-fold volume-ratio case whose (closed) hypothesis holds.
pub fn vr_cases_3fold(p: ExtExponent, q: ExtExponent, r: ExtExponent) -> Vec<CaseHit> {
    let (t, _) = triple(p, q, r);
    let h = half();
    let zero = Rational::zero();
    let mut out = Vec::new();
    if t.c >= h {
        out.push(hit(CaseKind::Regular, RateResult::exact(zero, "r<=2")));
    }
    if t.a >= h && t.b <= h {
        if t.s >= Rational::one() {
            out.push(hit(
                CaseKind::Regular,
                RateResult::exact(max(h - t.b - t.c, zero), "p<=2<=q, sum>=1"),
            ));
        }
        if t.s <= Rational::one() {
            out.push(hit(CaseKind::Regular, RateResult::exact(t.a - h, "p<=2<=q, sum<=1")));
        }
    }
    if t.a <= h {
        out.push(hit(CaseKind::Regular, RateResult::exact(max(h - t.s, zero), "p>=2")));
    }
    if t.b >= h && t.c <= h {
        if t.a.is_one() {
            out.push(hit(
                CaseKind::Override,
                RateResult::exact(min(t.b - h, h - t.c), "p=1<=q<=2<=r"),
            ));
        }
        if t.a == t.b && t.c.is_zero() {
            out.push(hit(CaseKind::Override, RateResult::exact(t.b - h, "p=q<=2, r=inf")));
        }
        if t.b == h {
            out.push(hit(CaseKind::Override, RateResult::exact(zero, "p<=q=2<=r")));
        }
        out.push(hit(
            CaseKind::Open,
            RateResult::interval(zero, min(h - t.c, t.b - h), "p<=q<=2<=r (open)"),
        ));
    }
    out
}

/// Volume-ratio exponent of `ℓ_p ⊗_π ℓ_q ⊗_π ℓ_r`.
///
/// Regular cases take precedence, then the special cases resolved inside
/// the region `q ≤ 2 ≤ r`, then the open interval.
pub fn vr_exponent_3fold(p: ExtExponent, q: ExtExponent, r: ExtExponent) -> RateResult {
    let (_, notice) = triple(p, q, r);
    noted(select(vr_cases_3fold(p, q, r)), notice)
}

/// Exponent of `vol(B)^{1/n³}`.
pub fn vol_exponent_3fold(p: ExtExponent, q: ExtExponent, r: ExtExponent) -> Rational {
    let (t, _) = triple(p, q, r);
    -min(t.a, half()) - min(t.b, half()) - t.c - Rational::one()
}

/// Every identity-norm case whose hypothesis holds.
pub fn idnorm_cases_3fold(p: ExtExponent, q: ExtExponent, r: ExtExponent) -> Vec<CaseHit> {
    let (t, _) = triple(p, q, r);
    let h = half();
    let one = Rational::one();
    let mut out = Vec::new();
    if t.c >= h {
        out.push(hit(CaseKind::Regular, RateResult::exact(h + t.c, "r<=2")));
    }
    if t.a >= h && t.b <= h {
        if t.s >= one {
            out.push(hit(
                CaseKind::Regular,
                RateResult::exact(max(t.b + t.c, h), "p<=2<=q, sum>=1"),
            ));
        }
        if t.s <= one {
            out.push(hit(CaseKind::Regular, RateResult::exact(t.s - h, "p<=2<=q, sum<=1")));
        }
    }
    if t.a <= h {
        out.push(hit(CaseKind::Regular, RateResult::exact(max(t.s, h) - h, "p>=2")));
    }
    if t.b >= h && t.c <= h {
        if t.a.is_one() {
            out.push(hit(
                CaseKind::Override,
                RateResult::exact(min(t.b + t.c, one), "p=1<=q<=2<=r"),
            ));
        }
        if t.a == t.b && t.c.is_zero() {
            out.push(hit(CaseKind::Override, RateResult::exact(t.b, "p=q<=2, r=inf")));
        }
        if t.b == h {
            out.push(hit(CaseKind::Override, RateResult::exact(h + t.c, "p<=q=2<=r")));
        }
        out.push(hit(
            CaseKind::Open,
            RateResult::interval(h + t.c, min(t.b + t.c, one), "q<=2<=r (open)"),
        ));
    }
    out
}

/// Exponent of `‖id: ℓ₂^{n³} → ℓ_p ⊗_π ℓ_q ⊗_π ℓ_r‖`.
pub fn idnorm_exponent_3fold(p: ExtExponent, q: ExtExponent, r: ExtExponent) -> RateResult {
    let (_, notice) = triple(p, q, r);
    noted(select(idnorm_cases_3fold(p, q, r)), notice)
}

fn pair(p: ExtExponent, q: ExtExponent) -> (Rational, Rational) {
    let (a, b) = (p.reciprocal(), q.reciprocal());
    (max(a, b), min(a, b))
}

/// Every two-fold volume-ratio case whose hypothesis holds.
pub fn vr_cases_2fold(p: ExtExponent, q: ExtExponent) -> Vec<RateResult> {
    let (a, b) = pair(p, q);
    let h = half();
    let one = Rational::one();
    let mut out = Vec::new();
    if b >= h {
        out.push(RateResult::exact(Rational::zero(), "q<=2"));
    }
    if a >= h && b <= h {
        if a + b >= one {
            out.push(RateResult::exact(h - b, "p<=2<=q, sum>=1"));
        }
        if a + b <= one {
            out.push(RateResult::exact(a - h, "p<=2<=q, sum<=1"));
        }
    }
    if a <= h {
        out.push(RateResult::exact(max(h - a - b, Rational::zero()), "p>=2"));
    }
    out
}

pub fn vr_exponent_2fold(p: ExtExponent, q: ExtExponent) -> RateResult {
    let (_, notice) = sorted_exponents(&[p, q]);
    noted(vr_cases_2fold(p, q).remove(0), notice)
}

/// Every two-fold identity-norm case whose hypothesis holds.
pub fn idnorm_cases_2fold(p: ExtExponent, q: ExtExponent) -> Vec<(&'static str, Rational)> {
    let (a, b) = pair(p, q);
    let h = half();
    let mut out = Vec::new();
    if b >= h {
        out.push(("q<=2", b));
    }
    if a >= h && b <= h {
        out.push(("p<=2<=q", min(a + b, Rational::one()) - h));
    }
    if a <= h {
        out.push(("p>=2", max(a + b, h) - h));
    }
    out
}

pub fn idnorm_exponent_2fold(p: ExtExponent, q: ExtExponent) -> Rational {
    idnorm_cases_2fold(p, q)[0].1
}

/// `µ = 3/(2 − 1/p − 1/q − 1/r)`, defined when the reciprocal sum is at most 1/2.
pub fn mu_exponent(p: ExtExponent, q: ExtExponent, r: ExtExponent) -> Option<Rational> {
    let (t, _) = triple(p, q, r);
    (t.s <= half()).then(|| Rational::from_integer(3) / (Rational::from_integer(2) - t.s))
}

/// `s = 1/min(Σ 1/p_j, 1)`; an all-`∞` list gives `s = ∞`.
pub fn diag_s(exponents: &[ExtExponent]) -> ExtExponent {
    let sum = exponents.iter().fold(Rational::zero(), |acc, p| acc + p.reciprocal());
    ExtExponent::from_reciprocal(min(sum, Rational::one())).expect("reciprocal in [0, 1]")
}

/// Volume exponent of the `k`-fold product with its printed side constants.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KfoldVolume {
    #[serde(with = "rational_serde")]
    pub exponent: Rational,
    pub lower_const: f64,
    pub upper_const: f64,
}

/// Exponent of `vol(B)^{1/n^k}` for `ℓ_{p₁} ⊗_π … ⊗_π ℓ_{p_k}`:
/// `−Σ_{j<k} min(1/p_j, 1/2) − 1/p_k − (k−1)/2`.
///
/// The constants are `2^{−(k−j₀)/2}` below and `k` above, `j₀` counting the
/// factors with `p_j ≤ 2`.
pub fn vol_exponent_kfold(exponents: &[ExtExponent]) -> Result<KfoldVolume> {
    let k = exponents.len();
    if k < 2 {
        return Err(Error::InvalidSpec(format!("need at least 2 factors, got {k}")));
    }
    let (sorted, _) = sorted_exponents(exponents);
    let head = sorted[..k - 1]
        .iter()
        .fold(Rational::zero(), |acc, p| acc + min(p.reciprocal(), half()));
    let exponent = -head - sorted[k - 1].reciprocal() - rat(k as i64 - 1, 2);
    let j0 = sorted.iter().filter(|p| **p <= ExtExponent::two()).count();
    Ok(KfoldVolume {
        exponent,
        lower_const: 2f64.powf(-((k - j0) as f64) / 2.0),
        upper_const: k as f64,
    })
}

/// The `k`-fold volume exponent with the trailing `−1` of the general display,
/// which coincides with [`vol_exponent_kfold`] only for `k = 3`.
pub fn vol_exponent_kfold_as_displayed(exponents: &[ExtExponent]) -> Rational {
    let (sorted, _) = sorted_exponents(exponents);
    let k = sorted.len();
    let head = sorted[..k - 1]
        .iter()
        .fold(Rational::zero(), |acc, p| acc + min(p.reciprocal(), half()));
    -head - sorted[k - 1].reciprocal() - Rational::one()
}

/// The six volume-ratio bounds for `k ≥ 3` factors whose hypotheses hold.
pub fn vr_cases_kfold(exponents: &[ExtExponent]) -> Result<Vec<RateResult>> {
    let k = exponents.len();
    if k < 3 {
        return Err(Error::InvalidSpec(format!("need at least 3 factors, got {k}")));
    }
    let (sorted, _) = sorted_exponents(exponents);
    let a: Vec<Rational> = sorted.iter().map(|p| p.reciprocal()).collect();
    let h = half();
    let one = Rational::one();
    let zero = Rational::zero();
    let s: Rational = a.iter().copied().fold(zero, |x, y| x + y);
    let s2 = s - a[0];
    let (ak1, ak) = (a[k - 2], a[k - 1]);
    let kf = k as f64;
    let small = 2f64.powf(-kf / 2.0);
    let mut out = Vec::new();
    if ak >= h {
        out.push(RateResult::exact(zero, "(1) p_k<=2").with_consts(1.0, kf));
    }
    if s >= one && ak1 >= h && ak < h {
        let up = min(ak1 + ak, one) - ak - h;
        out.push(RateResult::interval(zero, up, "(2) sum>=1, p_{k-1}<=2<p_k").with_consts(1.0, kf));
    }
    if s >= one && ak1 < h {
        let up = max(ak1 + ak, h) - ak1 - ak;
        out.push(RateResult::interval(zero, up, "(3) sum>=1, p_{k-1}>2").with_consts(1.0, kf));
    }
    if s >= one && s2 <= h {
        out.push(RateResult::exact(h - s2, "(4) sum>=1, tail sum<=1/2").with_consts(small, kf));
    }
    if h <= s && s <= one {
        out.push(RateResult::exact(max(a[0] - h, zero), "(5) 1/2<=sum<=1").with_consts(small, kf));
    }
    if s <= h {
        out.push(RateResult::exact(h - s, "(6) sum<=1/2").with_consts(small, kf));
    }
    Ok(out)
}

fn intersect(cases: &[RateResult], what: &str) -> Result<RateResult> {
    if cases.is_empty() {
        return Err(Error::Numerical(format!("no {what} case applies")));
    }
    let lower = cases.iter().map(|c| c.lower_exp).max().unwrap();
    let upper = cases.iter().map(|c| c.upper_exp).min().unwrap();
    if lower > upper {
        return Err(Error::Numerical(format!(
            "{what} cases disagree: lower {lower} exceeds upper {upper}"
        )));
    }
    let lower_const = cases
        .iter()
        .filter(|c| c.lower_exp == lower)
        .map(|c| c.lower_const)
        .fold(f64::NEG_INFINITY, f64::max);
    let upper_const = cases
        .iter()
        .filter(|c| c.upper_exp == upper)
        .map(|c| c.upper_const)
        .fold(f64::INFINITY, f64::min);
    let label = cases
        .iter()
        .map(|c| c.case_label.as_str())
        .collect::<Vec<_>>()
        .join(" & ");
    Ok(RateResult::interval(lower, upper, label).with_consts(lower_const, upper_const))
}

/// Volume-ratio bounds for `k ≥ 3` factors: the intersection of every
/// applicable case, constants taken from the cases attaining each end.
pub fn vr_bounds_kfold(exponents: &[ExtExponent]) -> Result<RateResult> {
    let (_, notice) = sorted_exponents(exponents);
    let cases = vr_cases_kfold(exponents)?;
    Ok(noted(intersect(&cases, "k-fold")?, notice))
}

/// Volume ratio of `k` copies of the same `ℓ_p`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamePRates {
    /// Sharp two-regime exponent: `0` for `p ≤ 2k`, else `1/2 − k/p`.
    pub sharp: RateResult,
    /// Weaker bounds obtained from the general `k`-fold estimates.
    pub corollary: RateResult,
}

pub fn vr_same_p(p: ExtExponent, k: usize) -> Result<SamePRates> {
    if k < 2 {
        return Err(Error::InvalidSpec(format!("need k >= 2, got {k}")));
    }
    let h = half();
    let zero = Rational::zero();
    let kr = Rational::from_integer(k as i64);
    let a = p.reciprocal();
    let two_k = ExtExponent::int(2 * k as i64);
    let sharp = if p <= two_k {
        RateResult::exact(zero, "p<=2k")
    } else {
        RateResult::exact(h - kr * a, "p>=2k")
    };
    let kf = k as f64;
    let mut cases = Vec::new();
    let four = ExtExponent::int(4);
    let kk = ExtExponent::int(k as i64);
    if p <= four || (kk <= p && p <= two_k) {
        cases.push(RateResult::exact(zero, "(1) p<=4 or k<=p<=2k").with_consts(1.0, kf));
    }
    if four <= p && p <= kk {
        cases.push(RateResult::interval(zero, h - Rational::from_integer(2) * a, "(2) 4<=p<=k").with_consts(1.0, kf));
    }
    if p >= two_k {
        cases.push(RateResult::exact(h - kr * a, "(3) p>=2k").with_consts(2f64.powf(-kf / 2.0), kf));
    }
    Ok(SamePRates {
        sharp,
        corollary: intersect(&cases, "same-p")?,
    })
}

/// A cotype statement: `C_α = ∞` for every `α` below `alpha_sup`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CotypeThreshold {
    pub label: String,
    #[serde(with = "rational_serde")]
    pub alpha_sup: Rational,
}

fn threshold(label: &str, alpha_sup: Rational) -> CotypeThreshold {
    CotypeThreshold {
        label: label.to_string(),
        alpha_sup,
    }
}

pub fn cotype_thresholds_3fold(p: ExtExponent, q: ExtExponent, r: ExtExponent) -> Vec<CotypeThreshold> {
    let (t, _) = triple(p, q, r);
    let h = half();
    let one = Rational::one();
    let three = Rational::from_integer(3);
    let mut out = Vec::new();
    if t.a >= h && t.b + t.c < h && t.s >= one {
        out.push(threshold("bullet 1", three / (one + t.b + t.c)));
    }
    if t.a > h && t.s <= one {
        out.push(threshold("bullet 2", three / (Rational::from_integer(2) - t.a)));
    }
    if t.s < h {
        out.push(threshold("bullet 3", three / (one + t.s)));
    }
    out
}

pub fn cotype_thresholds_kfold(exponents: &[ExtExponent]) -> Vec<CotypeThreshold> {
    let (sorted, _) = sorted_exponents(exponents);
    let k = sorted.len() as i64;
    let a: Vec<Rational> = sorted.iter().map(|p| p.reciprocal()).collect();
    let s: Rational = a.iter().copied().fold(Rational::zero(), |x, y| x + y);
    let s2 = s - a[0];
    let h = half();
    let one = Rational::one();
    let kr = Rational::from_integer(k);
    let mut out = Vec::new();
    if s >= one && s2 < h {
        out.push(threshold("bullet 1", kr / (rat(k - 1, 2) + s2)));
    }
    if s <= one && a[0] > h {
        out.push(threshold("bullet 2", kr / (rat(k + 1, 2) - a[0])));
    }
    if s < h {
        out.push(threshold("bullet 3", kr / (rat(k - 1, 2) + s)));
    }
    out
}

/// Exponent of the expected injective norm of a random sign tensor with
/// standard-basis families, for the product whose primal exponents are given.
///
/// With `d_j = 1/p_j*` this is `Σ_j (max(d_j, 1/2) − 1/2) + max_j min(d_j, 1/2)`,
/// the largest of the `k` terms in the Chevet sum.
pub fn chevet_exponent(exponents: &[ExtExponent]) -> Rational {
    let h = half();
    let d: Vec<Rational> = exponents.iter().map(|p| p.dual().reciprocal()).collect();
    let weak: Rational = d.iter().fold(Rational::zero(), |acc, &x| acc + max(x, h) - h);
    let best = d.iter().map(|&x| min(x, h)).max().unwrap_or_else(Rational::zero);
    weak + best
}

/// Smallest `C ≥ 1` with `C·ln(2C) ≥ vr`: the cotype-2 constant floor implied
/// by a volume-ratio lower bound, ignoring the absolute constant.
pub fn bourgain_milman_floor(vr_lower: f64) -> f64 {
    let f = |c: f64| c * (2.0 * c).ln();
    if vr_lower <= f(1.0) {
        return 1.0;
    }
    let (mut lo, mut hi) = (1.0, 2.0);
    while f(hi) < vr_lower {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < vr_lower {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// True when a volume-ratio rate grows with `n`, so the cotype-2 constant of
/// the infinite-dimensional product is unbounded.
pub fn cotype2_unbounded(vr: &RateResult) -> bool {
    vr.lower_exp > Rational::zero()
}
