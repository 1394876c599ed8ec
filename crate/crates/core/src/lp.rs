//! ℓp vector norms and the closed-form maximizer of a linear functional over
//! an ℓp unit ball.

use crate::exponent::ExtExponent;

pub fn lp_norm(x: &[f64], p: ExtExponent) -> f64 {
    match p {
        ExtExponent::Infinite => linf_norm(x),
        ExtExponent::Finite(_) => lp_norm_f64(x, p.to_f64()),
    }
}

pub fn lp_norm_f64(x: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return linf_norm(x);
    }
    if p == 1.0 {
        return x.iter().map(|v| v.abs()).sum();
    }
    if p == 2.0 {
        return l2_norm(x);
    }
    let m = linf_norm(x);
    if m == 0.0 {
        return 0.0;
    }
    m * x.iter().map(|v| (v.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

pub fn l2_norm(x: &[f64]) -> f64 {
    let m = linf_norm(x);
    if m == 0.0 {
        return 0.0;
    }
    m * x.iter().map(|v| (v / m) * (v / m)).sum::<f64>().sqrt()
}

pub fn linf_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Maximizes `⟨g, x⟩` over the unit ball of `ℓ_ball`.
///
/// Returns `(‖g‖_{ball*}, x)` with `‖x‖_ball = 1`. The maximizer is the
/// normalized signed `(ball* − 1)`-power of `g`; on the ℓ1 ball ties between
/// maximal coordinates go to the lowest index. For `g = 0` the first basis
/// vector is returned.
pub fn maximize_on_ball(g: &[f64], ball: ExtExponent) -> (f64, Vec<f64>) {
    let n = g.len();
    let mut x = vec![0.0; n];
    if n == 0 {
        return (0.0, x);
    }
    if ball.is_one() {
        let (imax, vmax) = g.iter().enumerate().fold(
            (0, -1.0),
            |(bi, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bi, bv) },
        );
        x[imax] = if g[imax] < 0.0 { -1.0 } else { 1.0 };
        return (vmax, x);
    }
    if ball.is_infinite() {
        let mut value = 0.0;
        for (xi, gi) in x.iter_mut().zip(g) {
            *xi = if *gi < 0.0 { -1.0 } else { 1.0 };
            value += gi.abs();
        }
        return (value, x);
    }
    let dual = ball.dual().to_f64();
    let value = lp_norm_f64(g, dual);
    if value == 0.0 {
        x[0] = 1.0;
        return (0.0, x);
    }
    let power = dual - 1.0;
    for (xi, gi) in x.iter_mut().zip(g) {
        *xi = gi.signum() * (gi.abs() / value).powf(power);
        if *gi == 0.0 {
            *xi = 0.0;
        }
    }
    // renormalize away rounding so the witness is unit within 1e-12
    let norm = lp_norm(&x, ball);
    x.iter_mut().for_each(|v| *v /= norm);
    (value, x)
}

/// Scales `x` to unit `ℓ_p` norm in place; returns the original norm.
pub fn normalize(x: &mut [f64], p: ExtExponent) -> f64 {
    let norm = lp_norm(x, p);
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    norm
}
