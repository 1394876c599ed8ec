//! Injective norms: multi-start alternating ascent, an exact evaluator for
//! polytope dual balls, a brute-force oracle and the Khintchine witnesses.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::certificate::NormCertificate;
use crate::error::{Error, Result};
use crate::exponent::ExtExponent;
use crate::lp::{lp_norm, maximize_on_ball};
use crate::sampling::{child_seed, gaussian_vector, rng};
use crate::space::SpaceSpec;
use crate::tensor::Tensor;

use super::check_spec;

#[derive(Clone, Debug)]
pub struct AscentOptions {
    pub restarts: usize,
    pub tol: f64,
    pub max_sweeps: usize,
    pub seed: u64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        AscentOptions {
            restarts: 32,
            tol: 1e-10,
            max_sweeps: 500,
            seed: 0,
        }
    }
}

/// Injective norm of `A` in `ℓ_{a₁} ⊗_ε … ⊗_ε ℓ_{a_k}`, the `a_j` being the
/// exponents of `spec`.
#[derive(Clone, Debug, Serialize)]
pub struct EpsilonEstimate {
    pub lower: f64,
    pub witness: NormCertificate,
    pub heuristic: f64,
    pub exact: Option<f64>,
    pub spec: SpaceSpec,
}

impl EpsilonEstimate {
    /// The exact value when known, else the certified lower bound.
    pub fn best(&self) -> f64 {
        self.exact.unwrap_or(self.lower)
    }
}

/// Balls the multilinear form is maximized over: `B_{a_j*}` for factor `a_j`.
pub(crate) fn dual_balls(spec: &SpaceSpec) -> Vec<ExtExponent> {
    spec.mode_exponents().iter().map(|a| a.dual()).collect()
}

pub(crate) fn unit_basis_vectors(order: usize, n: usize) -> Vec<Vec<f64>> {
    (0..order)
        .map(|_| {
            let mut e = vec![0.0; n];
            e[0] = 1.0;
            e
        })
        .collect()
}

fn argmax_index(a: &Tensor) -> Vec<usize> {
    let (offset, _) =
        a.entries().iter().enumerate().fold(
            (0, -1.0),
            |(bo, bv), (o, v)| if v.abs() > bv { (o, v.abs()) } else { (bo, bv) },
        );
    let mut idx = vec![0; a.order()];
    a.unravel_into(offset, &mut idx);
    idx
}

fn starting_point(a: &Tensor, balls: &[ExtExponent], restart: usize, seed: u64) -> Vec<Vec<f64>> {
    let n = a.n();
    match restart {
        0 => argmax_index(a)
            .into_iter()
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect(),
        1 => balls
            .iter()
            .map(|&b| {
                let v = vec![1.0; n];
                let norm = lp_norm(&v, b);
                v.into_iter().map(|x| x / norm).collect()
            })
            .collect(),
        _ => {
            let mut r = rng(child_seed(seed, restart as u64));
            balls
                .iter()
                .map(|&b| {
                    let mut v = gaussian_vector(&mut r, n);
                    let norm = lp_norm(&v, b);
                    v.iter_mut().for_each(|x| *x /= norm);
                    v
                })
                .collect()
        }
    }
}

fn ascend_once(
    a: &Tensor,
    balls: &[ExtExponent],
    mut xs: Vec<Vec<f64>>,
    opts: &AscentOptions,
) -> Result<(f64, Vec<Vec<f64>>)> {
    let mut previous = f64::NEG_INFINITY;
    let mut value = 0.0;
    for _ in 0..opts.max_sweeps {
        for (m, &ball) in balls.iter().enumerate() {
            let g = a.contract_all_but(m, &xs);
            let (v, x) = maximize_on_ball(&g, ball);
            if !v.is_finite() {
                return Err(Error::Numerical(format!("non-finite ascent value in mode {m}")));
            }
            xs[m] = x;
            value = v;
        }
        if value - previous <= opts.tol * value.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        previous = value;
    }
    Ok((value, xs))
}

/// Maximizes `|⟨A, x₁⊗…⊗x_k⟩|` over `x_j ∈ B_{balls[j]}` by block ascent.
///
/// Returns the best ascent value and its vectors; the value reproduced by
/// the vectors is within rounding of the returned value.
pub(crate) fn ascend_balls(a: &Tensor, balls: &[ExtExponent], opts: &AscentOptions) -> Result<(f64, Vec<Vec<f64>>)> {
    if a.is_zero() {
        return Ok((0.0, unit_basis_vectors(a.order(), a.n())));
    }
    let runs: Vec<Result<(f64, Vec<Vec<f64>>)>> = (0..opts.restarts.max(1))
        .into_par_iter()
        .map(|i| ascend_once(a, balls, starting_point(a, balls, i, opts.seed), opts))
        .collect();
    let mut best: Option<(f64, Vec<Vec<f64>>)> = None;
    for run in runs {
        let (v, xs) = run?;
        if best.as_ref().map_or(true, |(bv, _)| v > *bv) {
            best = Some((v, xs));
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Default number of `(vertex combination × tensor entry)` operations the
/// exact evaluator may spend.
pub const EXACT_WORK_BUDGET: u64 = 50_000_000;

enum Plan {
    One(usize),
    Pair(usize, usize),
}

fn vertex_count(ball: ExtExponent, n: usize) -> Option<u64> {
    if n == 1 {
        Some(1)
    } else if ball.is_infinite() {
        Some(1u64 << (n - 1))
    } else if ball.is_one() {
        Some(n as u64)
    } else {
        None
    }
}

/// Vertex number `v` of the ball (sign vectors with a leading `+1` for ℓ∞,
/// basis vectors for ℓ1); sign symmetry makes the rest redundant.
fn vertex(ball: ExtExponent, n: usize, v: u64) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    if ball.is_infinite() {
        let mut x = vec![1.0; n];
        for (i, xi) in x.iter_mut().enumerate().skip(1) {
            if (v >> (i - 1)) & 1 == 1 {
                *xi = -1.0;
            }
        }
        x
    } else {
        let mut x = vec![0.0; n];
        x[v as usize] = 1.0;
        x
    }
}

/// Exact maximum of `|⟨A, x₁⊗…⊗x_k⟩|` over `x_j ∈ B_{balls[j]}`.
///
/// Modes whose ball is a polytope (ℓ1 or ℓ∞) are enumerated over their
/// vertices; what is left must be a single mode (closed-form dual norm) or a
/// pair of ℓ2 modes (spectral norm). Returns `None` when the structure does
/// not allow this or the enumeration exceeds `budget`.
pub fn exact_on_balls(a: &Tensor, balls: &[ExtExponent], budget: u64) -> Option<(f64, Vec<Vec<f64>>)> {
    let k = a.order();
    let n = a.n();
    if a.is_zero() {
        return Some((0.0, unit_basis_vectors(k, n)));
    }
    let counts: Vec<Option<u64>> = balls.iter().map(|&b| vertex_count(b, n)).collect();
    let free: Vec<usize> = (0..k).filter(|&m| counts[m].is_none()).collect();
    let plan = match free.len() {
        0 => {
            let m = (0..k).rev().max_by_key(|&m| counts[m].unwrap()).unwrap();
            Plan::One(m)
        }
        1 => Plan::One(free[0]),
        2 if balls[free[0]] == ExtExponent::two() && balls[free[1]] == ExtExponent::two() => {
            Plan::Pair(free[0], free[1])
        }
        _ => return None,
    };
    let enumerated: Vec<usize> = (0..k)
        .filter(|&m| match plan {
            Plan::One(f) => m != f,
            Plan::Pair(f, g) => m != f && m != g,
        })
        .collect();
    let mut combos: u64 = 1;
    for &m in &enumerated {
        combos = combos.checked_mul(counts[m].unwrap())?;
    }
    if combos.saturating_mul(a.len() as u64) > budget {
        return None;
    }
    let mut xs = unit_basis_vectors(k, n);
    let mut best = (-1.0, xs.clone());
    for c in 0..combos {
        let mut rest = c;
        for &m in &enumerated {
            let cnt = counts[m].unwrap();
            xs[m] = vertex(balls[m], n, rest % cnt);
            rest /= cnt;
        }
        match plan {
            Plan::One(f) => {
                let g = a.contract_all_but(f, &xs);
                let (v, x) = maximize_on_ball(&g, balls[f]);
                if v > best.0 {
                    xs[f] = x;
                    best = (v, xs.clone());
                }
            }
            Plan::Pair(f, g) => {
                let mut t = a.clone();
                for &m in enumerated.iter().rev() {
                    t = t.contract(m, &xs[m]).expect("dimensions agree");
                }
                let mat = DMatrix::from_row_slice(n, n, t.entries());
                let svd = mat.svd(true, true);
                let (top, s) = svd
                    .singular_values
                    .iter()
                    .enumerate()
                    .fold((0, -1.0), |(bi, bs), (i, &s)| if s > bs { (i, s) } else { (bi, bs) });
                if s > best.0 {
                    let u = svd.u.as_ref().unwrap().column(top).iter().copied().collect();
                    let v = svd.v_t.as_ref().unwrap().row(top).iter().copied().collect();
                    xs[f] = u;
                    xs[g] = v;
                    best = (s, xs.clone());
                }
            }
        }
    }
    Some(best)
}

/// Exact injective norm when [`exact_on_balls`] applies.
pub fn eps_norm_exact(a: &Tensor, spec: &SpaceSpec) -> Result<Option<(f64, Vec<Vec<f64>>)>> {
    check_spec(a, spec)?;
    Ok(exact_on_balls(a, &dual_balls(spec), EXACT_WORK_BUDGET))
}

/// Multi-start block ascent for the injective norm; also runs the exact
/// evaluator when the dual balls allow it.
pub fn eps_norm_ascend(a: &Tensor, spec: &SpaceSpec, restarts: usize, tol: f64) -> Result<EpsilonEstimate> {
    eps_norm_ascend_with(
        a,
        spec,
        &AscentOptions {
            restarts,
            tol,
            ..AscentOptions::default()
        },
    )
}

pub fn eps_norm_ascend_with(a: &Tensor, spec: &SpaceSpec, opts: &AscentOptions) -> Result<EpsilonEstimate> {
    check_spec(a, spec)?;
    if opts.restarts == 0 {
        return Err(Error::Usage("restarts must be at least 1".into()));
    }
    let balls = dual_balls(spec);
    let (value, xs) = ascend_balls(a, &balls, opts)?;
    let achieved = a.multilinear(&xs).abs();
    let exact = exact_on_balls(a, &balls, EXACT_WORK_BUDGET).map(|(v, _)| v.max(achieved));
    Ok(EpsilonEstimate {
        lower: achieved,
        witness: NormCertificate::witness(xs, balls, achieved),
        heuristic: value.max(achieved),
        exact,
        spec: spec.clone(),
    })
}

/// Result of the brute-force oracle: exact when `lower == upper`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BruteForce {
    pub lower: f64,
    pub upper: f64,
    pub exact: bool,
}

fn grid_on_sphere(n: usize, resolution: usize, ball: ExtExponent) -> Vec<Vec<f64>> {
    let step = 2.0 / (resolution - 1) as f64;
    let total = resolution.pow(n as u32);
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    for code in 0..total {
        let mut rest = code;
        for slot in idx.iter_mut() {
            *slot = rest % resolution;
            rest /= resolution;
        }
        if !idx.iter().any(|&t| t == 0 || t == resolution - 1) {
            continue;
        }
        let y: Vec<f64> = idx.iter().map(|&t| -1.0 + step * t as f64).collect();
        // keep one of ±y
        match y.iter().find(|v| v.abs() > 1e-12) {
            Some(&first) if first > 0.0 => {}
            _ => continue,
        }
        let norm = lp_norm(&y, ball);
        out.push(y.into_iter().map(|v| v / norm).collect());
    }
    out
}

fn full_vertices(ball: ExtExponent, n: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    if ball.is_infinite() {
        for code in 0..(1u64 << n) {
            out.push((0..n).map(|i| if (code >> i) & 1 == 1 { -1.0 } else { 1.0 }).collect());
        }
    } else {
        for i in 0..n {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; n];
                e[i] = s;
                out.push(e);
            }
        }
    }
    out
}

/// Independent oracle for order-3 tensors with `n ≤ 4`.
///
/// With polytope dual balls every vertex triple is enumerated. Otherwise the
/// first two modes run over vertices or a grid of `resolution` points per
/// axis on the cube surface (pushed to the sphere), the third mode is solved
/// in closed form, and the grid's Lipschitz error gives the upper end.
pub fn eps_norm_bruteforce(a: &Tensor, spec: &SpaceSpec, resolution: usize) -> Result<BruteForce> {
    check_spec(a, spec)?;
    let n = a.n();
    if a.order() != 3 || n > 4 {
        return Err(Error::ResourceGuard(format!(
            "brute force needs order 3 and n <= 4 (got order {}, n = {n})",
            a.order()
        )));
    }
    let balls = dual_balls(spec);
    if balls.iter().all(|b| b.is_polytope()) {
        let sets: Vec<Vec<Vec<f64>>> = balls.iter().map(|&b| full_vertices(b, n)).collect();
        let mut best: f64 = 0.0;
        for x in &sets[0] {
            for y in &sets[1] {
                for z in &sets[2] {
                    best = best.max(a.multilinear(&[x.clone(), y.clone(), z.clone()]).abs());
                }
            }
        }
        return Ok(BruteForce {
            lower: best,
            upper: best,
            exact: true,
        });
    }
    if resolution < 2 {
        return Err(Error::Usage("grid resolution must be at least 2".into()));
    }
    let mut delta = 0.0;
    let mut sets = Vec::new();
    for &b in &balls[..2] {
        if b.is_polytope() {
            sets.push(full_vertices(b, n));
        } else {
            let h = 2.0 / (resolution - 1) as f64;
            delta += (n as f64).powf(b.reciprocal_f64()) * h;
            sets.push(grid_on_sphere(n, resolution, b));
        }
    }
    let work = (sets[0].len() * sets[1].len()) as u64 * a.len() as u64;
    if work > EXACT_WORK_BUDGET {
        return Err(Error::ResourceGuard(format!(
            "grid of {} x {} points exceeds the brute-force budget",
            sets[0].len(),
            sets[1].len()
        )));
    }
    let mut best: f64 = 0.0;
    let mut xs = unit_basis_vectors(3, n);
    for x in &sets[0] {
        xs[0].clone_from(x);
        for y in &sets[1] {
            xs[1].clone_from(y);
            let g = a.contract_all_but(2, &xs);
            best = best.max(lp_norm(&g, balls[2].dual()));
        }
    }
    let upper = if delta < 1.0 {
        best / (1.0 - delta)
    } else {
        f64::INFINITY
    };
    Ok(BruteForce {
        lower: best,
        upper,
        exact: delta == 0.0,
    })
}

/// Sorted dual exponents `(p, q, r)` of the factors and the exponent
/// `e = min(1/p,1/2) + min(1/q,1/2) + 1/r + 1`.
fn khintchine_exponent(spec: &SpaceSpec) -> f64 {
    let mut duals: Vec<ExtExponent> = spec.mode_exponents().iter().map(|a| a.dual()).collect();
    duals.sort();
    duals[0].reciprocal_f64().min(0.5) + duals[1].reciprocal_f64().min(0.5) + duals[2].reciprocal_f64() + 1.0
}

/// `(1/2)·n^{−e}·Σ|A_{ijk}|`, a lower bound for the injective norm.
pub fn khintchine_lower_bound(a: &Tensor, spec: &SpaceSpec) -> Result<f64> {
    check_spec(a, spec)?;
    if a.order() != 3 {
        return Err(Error::Unsupported(format!("order {} (needs 3)", a.order())));
    }
    let n = a.n() as f64;
    Ok(0.5 * n.powf(-khintchine_exponent(spec)) * a.l1_norm())
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Family {
    /// `n^{−1/d}·ε` for a sign vector `ε`
    Signs(f64),
    Basis,
    /// Both of the above; used on ℓ2 balls, where either kind is admissible.
    Either(f64),
}

fn family_best(g: &[f64], family: Family) -> (f64, Vec<f64>) {
    match family {
        Family::Signs(scale) => {
            let x: Vec<f64> = g.iter().map(|&v| if v < 0.0 { -scale } else { scale }).collect();
            (scale * g.iter().map(|v| v.abs()).sum::<f64>(), x)
        }
        Family::Basis => maximize_on_ball(g, ExtExponent::one()),
        Family::Either(scale) => {
            let signs = family_best(g, Family::Signs(scale));
            let basis = family_best(g, Family::Basis);
            if basis.0 > signs.0 {
                basis
            } else {
                signs
            }
        }
    }
}

fn family_members(family: Family, n: usize) -> Vec<Vec<f64>> {
    match family {
        Family::Signs(scale) => (0..(1u64 << (n - 1)))
            .map(|v| {
                vertex(ExtExponent::Infinite, n, v)
                    .into_iter()
                    .map(|x| x * scale)
                    .collect()
            })
            .collect(),
        Family::Basis => (0..n as u64).map(|v| vertex(ExtExponent::one(), n, v)).collect(),
        Family::Either(scale) => {
            let mut all = family_members(Family::Signs(scale), n);
            all.extend(family_members(Family::Basis, n));
            all
        }
    }
}

/// Largest `n` for which [`khintchine_witness`] searches exhaustively.
pub const KHINTCHINE_EXHAUSTIVE_MAX_N: usize = 6;

/// Witness vectors built like the ℓ1-comparison argument: scaled sign
/// vectors in modes whose dual exponent exceeds 2 (and always in the mode
/// with the largest dual exponent), standard basis vectors in modes below 2,
/// and whichever is better on ℓ2 balls.
///
/// Signs and indices are searched exhaustively for `n ≤ 6`, by alternating
/// family-wise maximization otherwise.
pub fn khintchine_witness(a: &Tensor, spec: &SpaceSpec) -> Result<NormCertificate> {
    check_spec(a, spec)?;
    if a.order() != 3 {
        return Err(Error::Unsupported(format!("order {} (needs 3)", a.order())));
    }
    let n = a.n();
    let balls = dual_balls(spec);
    let last = (0..3).max_by_key(|&m| balls[m]).unwrap();
    let families: Vec<Family> = (0..3)
        .map(|m| {
            let d = balls[m];
            if d == ExtExponent::two() {
                Family::Either((n as f64).powf(-0.5))
            } else if m == last || d > ExtExponent::two() {
                Family::Signs((n as f64).powf(-d.reciprocal_f64()))
            } else {
                Family::Basis
            }
        })
        .collect();
    let others: Vec<usize> = (0..3).filter(|&m| m != last).collect();
    let mut xs = unit_basis_vectors(3, n);
    let mut best = (-1.0, xs.clone());
    if n <= KHINTCHINE_EXHAUSTIVE_MAX_N {
        let first = family_members(families[others[0]], n);
        let second = family_members(families[others[1]], n);
        for x in &first {
            xs[others[0]].clone_from(x);
            for y in &second {
                xs[others[1]].clone_from(y);
                let g = a.contract_all_but(last, &xs);
                let (v, z) = family_best(&g, families[last]);
                if v > best.0 {
                    xs[last] = z;
                    best = (v, xs.clone());
                }
            }
        }
    } else {
        for (m, x) in xs.iter_mut().enumerate() {
            if let Family::Signs(scale) | Family::Either(scale) = families[m] {
                *x = vec![scale; n];
            }
        }
        let mut value = f64::NEG_INFINITY;
        for _ in 0..100 {
            let mut current = 0.0;
            for m in others.iter().copied().chain(std::iter::once(last)) {
                let g = a.contract_all_but(m, &xs);
                let (v, x) = family_best(&g, families[m]);
                xs[m] = x;
                current = v;
            }
            if current <= value {
                break;
            }
            value = current;
        }
        best = (value, xs);
    }
    let achieved = a.multilinear(&best.1).abs();
    Ok(NormCertificate::witness(best.1, balls, achieved))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::sample_gaussian_tensor;

    fn spec(s: &str, n: usize) -> SpaceSpec {
        SpaceSpec::parse(s, n).unwrap()
    }

    #[test]
    fn rank_one_is_product_of_norms() {
        let x = vec![1.0, -2.0, 0.5];
        let y = vec![0.3, 0.0, 1.0];
        let z = vec![2.0, 1.0, -1.0];
        let a = Tensor::rank_one(&[x.clone(), y.clone(), z.clone()]).unwrap();
        for s in ["1,2,inf", "4/3,3,2", "inf,inf,1"] {
            let sp = spec(s, 3);
            let e = eps_norm_ascend(&a, &sp, 8, 1e-12).unwrap();
            let ex = sp.mode_exponents();
            let target = lp_norm(&x, ex[0]) * lp_norm(&y, ex[1]) * lp_norm(&z, ex[2]);
            assert!((e.lower - target).abs() < 1e-9 * target, "{s}: {} vs {target}", e.lower);
        }
    }

    #[test]
    fn diag_examples() {
        let d = Tensor::diagonal(3, 2);
        let e = eps_norm_ascend(&d, &spec("inf,inf,inf", 2), 32, 1e-10).unwrap();
        assert!((e.lower - 1.0).abs() < 1e-12);
        assert_eq!(e.exact, Some(1.0));
        let e = eps_norm_ascend(&d, &spec("1,1,1", 2), 32, 1e-10).unwrap();
        assert!((e.lower - 2.0).abs() < 1e-12);
        assert_eq!(e.exact, Some(2.0));
    }

    #[test]
    fn witness_reproduces_lower() {
        let a = sample_gaussian_tensor(3, 3, 4);
        let e = eps_norm_ascend(&a, &spec("4/3,3,inf", 3), 16, 1e-10).unwrap();
        assert!((e.witness.witness_value(&a).unwrap() - e.lower).abs() < 1e-9);
        assert!(e.witness.witness_unit_error().unwrap() < 1e-12);
        assert!(e.lower <= e.heuristic + 1e-9);
    }

    #[test]
    fn bruteforce_examples() {
        let s = spec("1,1,1", 3);
        assert_eq!(eps_norm_bruteforce(&Tensor::diagonal(3, 3), &s, 0).unwrap().lower, 3.0);
        let ones = Tensor::filled(3, 2, 1.0);
        assert_eq!(
            eps_norm_bruteforce(&ones, &spec("inf,inf,inf", 2), 0).unwrap().upper,
            1.0
        );
        let e = Tensor::basis(3, 3, &[0, 0, 0]);
        for s in ["1,1,1", "2,3,inf", "4/3,4/3,4"] {
            let b = eps_norm_bruteforce(&e, &spec(s, 3), 5).unwrap();
            assert!((b.lower - 1.0).abs() < 1e-12 && b.upper >= 1.0, "{s}");
        }
        assert!(matches!(
            eps_norm_bruteforce(&Tensor::diagonal(3, 5), &spec("1,1,1", 5), 3),
            Err(Error::ResourceGuard(_))
        ));
    }

    #[test]
    fn grid_bracket_contains_ascent() {
        let a = sample_gaussian_tensor(3, 2, 11);
        let s = spec("2,3,1", 2);
        let b = eps_norm_bruteforce(&a, &s, 41).unwrap();
        let e = eps_norm_ascend(&a, &s, 32, 1e-12).unwrap();
        assert!(b.lower <= e.lower + 1e-9);
        assert!(e.lower <= b.upper + 1e-9, "{} {:?}", e.lower, b);
    }

    #[test]
    fn exact_matches_bruteforce_on_polytopes() {
        for seed in 0..20 {
            let a = sample_gaussian_tensor(3, 3, seed);
            for s in ["1,1,1", "1,inf,1", "inf,inf,inf", "inf,1,inf"] {
                let sp = spec(s, 3);
                let exact = eps_norm_exact(&a, &sp).unwrap().unwrap().0;
                let brute = eps_norm_bruteforce(&a, &sp, 0).unwrap().lower;
                assert!((exact - brute).abs() < 1e-12 * brute.max(1.0));
            }
        }
    }

    #[test]
    fn exact_spectral_pair() {
        // ℓ2 ⊗_ε ℓ2 ⊗_ε ℓ∞ reduces to a max of spectral norms over basis slices
        let a = sample_gaussian_tensor(3, 3, 2);
        let (v, xs) = eps_norm_exact(&a, &spec("2,2,inf", 3)).unwrap().unwrap();
        assert!((a.multilinear(&xs).abs() - v).abs() < 1e-10);
        let asc = eps_norm_ascend(&a, &spec("2,2,inf", 3), 32, 1e-12).unwrap();
        assert!(asc.lower <= v + 1e-9);
        assert!((asc.lower - v).abs() < 1e-6);
    }

    #[test]
    fn khintchine_examples() {
        let ones = Tensor::filled(3, 2, 1.0);
        assert_eq!(khintchine_lower_bound(&ones, &spec("inf,inf,inf", 2)).unwrap(), 0.5);
        assert_eq!(khintchine_lower_bound(&ones, &spec("1,1,1", 2)).unwrap(), 2.0);
        assert_eq!(
            khintchine_lower_bound(&Tensor::zeros(3, 3), &spec("1,2,4", 3)).unwrap(),
            0.0
        );
        assert!(khintchine_lower_bound(&Tensor::zeros(2, 3), &spec("1,2", 3)).is_err());
    }

    #[test]
    fn khintchine_witness_examples() {
        let d = Tensor::diagonal(3, 2);
        let s = spec("1,1,1", 2);
        let w = khintchine_witness(&d, &s).unwrap();
        assert_eq!(w.achieved_value, 2.0);
        assert!(w.achieved_value >= khintchine_lower_bound(&d, &s).unwrap());
        let e = Tensor::basis(3, 3, &[0, 0, 0]);
        let w = khintchine_witness(&e, &spec("2,2,inf", 3)).unwrap();
        assert!((w.achieved_value - 1.0).abs() < 1e-12);
        assert!(w.witness_unit_error().unwrap() < 1e-12);
    }

    #[test]
    fn khintchine_witness_beats_bound() {
        for seed in 0..30 {
            for s in ["1,1,1", "2,2,2", "4/3,2,4", "inf,inf,inf", "3,inf,1"] {
                let a = crate::sampling::sample_sign_tensor(3, 3, seed);
                let sp = spec(s, 3);
                let w = khintchine_witness(&a, &sp).unwrap();
                let bound = khintchine_lower_bound(&a, &sp).unwrap();
                assert!(w.achieved_value >= bound, "{s} seed {seed}");
                assert!((w.witness_value(&a).unwrap() - w.achieved_value).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn khintchine_greedy_mode_runs() {
        let a = sample_gaussian_tensor(3, 7, 1);
        let sp = spec("1,2,4", 7);
        let w = khintchine_witness(&a, &sp).unwrap();
        assert!(w.achieved_value > 0.0);
        assert!(w.witness_unit_error().unwrap() < 1e-12);
    }
}
