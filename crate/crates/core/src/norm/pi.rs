//! Projective norms: certified upper bounds from explicit decompositions and
//! certified lower bounds from dual witnesses.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::certificate::{CertificateKind, NormCertificate, Payload, RankOneTerm};
use crate::error::Result;
use crate::exponent::ExtExponent;
use crate::lp::lp_norm;
use crate::rates::diag_s;
use crate::space::SpaceSpec;
use crate::tensor::Tensor;

use super::check_spec;
use super::eps::{ascend_balls, exact_on_balls, AscentOptions, EXACT_WORK_BUDGET};

#[derive(Clone, Debug)]
pub struct PiOptions {
    pub rank_budget: usize,
    pub restarts: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for PiOptions {
    fn default() -> Self {
        PiOptions {
            rank_budget: 32,
            restarts: 8,
            tol: 1e-12,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PiUpper {
    pub value: f64,
    pub certificate: NormCertificate,
    pub method: String,
    /// False when greedy deflation stopped at the rank budget before the
    /// residual tolerance; the folded residual keeps the bound valid.
    pub reached_tolerance: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PiLower {
    pub value: f64,
    pub certificate: NormCertificate,
    pub method: String,
    pub certified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PiEstimate {
    pub upper: PiUpper,
    pub lower: PiLower,
    pub gap: f64,
}

fn exponents(spec: &SpaceSpec) -> Vec<ExtExponent> {
    spec.mode_exponents()
}

fn cost(terms: &[RankOneTerm], exps: &[ExtExponent]) -> f64 {
    terms.iter().map(|t| t.cost(exps)).sum()
}

fn basis_terms(a: &Tensor) -> Vec<RankOneTerm> {
    let n = a.n();
    let mut idx = vec![0; a.order()];
    let mut out = Vec::new();
    for (offset, &v) in a.entries().iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        a.unravel_into(offset, &mut idx);
        let factors = idx
            .iter()
            .enumerate()
            .map(|(m, &i)| {
                let mut e = vec![0.0; n];
                e[i] = if m == 0 { v } else { 1.0 };
                e
            })
            .collect();
        out.push(RankOneTerm { factors });
    }
    out
}

/// A resolution of the identity `I = Σ_t v_t w_tᵀ` used to split one mode.
#[derive(Clone, Debug)]
enum Resolution {
    Basis,
    /// `I = 2^{−(n−1)} Σ_{ε₀ = +1} ε εᵀ`
    Signs,
    /// `I = Σ_t u_t u_tᵀ` for an orthonormal basis (columns of the matrix).
    Orthonormal(DMatrix<f64>),
}

impl Resolution {
    fn len(&self, n: usize) -> usize {
        match self {
            Resolution::Basis | Resolution::Orthonormal(_) => n,
            Resolution::Signs => 1 << (n - 1),
        }
    }

    fn pair(&self, n: usize, t: usize) -> (Vec<f64>, Vec<f64>) {
        match self {
            Resolution::Basis => {
                let mut e = vec![0.0; n];
                e[t] = 1.0;
                (e.clone(), e)
            }
            Resolution::Signs => {
                let w: Vec<f64> = (0..n)
                    .map(|i| if i > 0 && (t >> (i - 1)) & 1 == 1 { -1.0 } else { 1.0 })
                    .collect();
                let scale = 0.5f64.powi(n as i32 - 1);
                (w.iter().map(|x| x * scale).collect(), w)
            }
            Resolution::Orthonormal(u) => {
                let col: Vec<f64> = u.column(t).iter().copied().collect();
                (col.clone(), col)
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Remainder {
    Fiber(usize),
    Matrix(usize, usize),
}

/// Rank-one terms of a rank-revealing split `M = Σ σ_t u_t ⊗ v_t`.
fn svd_terms(m: &DMatrix<f64>) -> Vec<(Vec<f64>, Vec<f64>)> {
    let svd = m.clone().svd(true, true);
    let u = svd.u.as_ref().unwrap();
    let vt = svd.v_t.as_ref().unwrap();
    let mut out = Vec::new();
    for (t, &s) in svd.singular_values.iter().enumerate() {
        if s <= 0.0 {
            continue;
        }
        out.push((
            u.column(t).iter().map(|x| x * s).collect(),
            vt.row(t).iter().copied().collect(),
        ));
    }
    out
}

fn hosvd_basis(a: &Tensor, mode: usize) -> DMatrix<f64> {
    let unfolding = a.unfold(mode);
    let svd = unfolding.svd(true, false);
    let u = svd.u.unwrap();
    if u.ncols() == a.n() {
        u
    } else {
        // complete to a square orthonormal basis
        let mut full = DMatrix::identity(a.n(), a.n());
        full.view_mut((0, 0), (a.n(), u.ncols())).copy_from(&u);
        full.qr().q()
    }
}

const STRUCTURED_WORK_BUDGET: u64 = 20_000_000;

/// Terms of `A = Σ v⊗…⊗remainder` for one plan, or `None` if over budget.
fn structured_terms(a: &Tensor, resolutions: &[Option<Resolution>], remainder: Remainder) -> Option<Vec<RankOneTerm>> {
    let n = a.n();
    let k = a.order();
    let resolved: Vec<usize> = (0..k).filter(|&m| resolutions[m].is_some()).collect();
    let counts: Vec<usize> = resolved
        .iter()
        .map(|&m| resolutions[m].as_ref().unwrap().len(n))
        .collect();
    let combos: u64 = counts.iter().map(|&c| c as u64).product();
    if combos.saturating_mul(a.len() as u64) > STRUCTURED_WORK_BUDGET {
        return None;
    }
    let mut out = Vec::new();
    let mut vs = vec![Vec::new(); k];
    for code in 0..combos {
        let mut rest = code;
        let mut t = a.clone();
        for (slot, &m) in resolved.iter().enumerate() {
            let c = counts[slot] as u64;
            let (v, _) = resolutions[m].as_ref().unwrap().pair(n, (rest % c) as usize);
            vs[m] = v;
            rest /= c;
        }
        rest = code;
        let mut ws = vec![Vec::new(); k];
        for (slot, &m) in resolved.iter().enumerate() {
            let c = counts[slot] as u64;
            ws[m] = resolutions[m].as_ref().unwrap().pair(n, (rest % c) as usize).1;
            rest /= c;
        }
        for &m in resolved.iter().rev() {
            t = t.contract(m, &ws[m]).expect("dimensions agree");
        }
        if t.is_zero() {
            continue;
        }
        match remainder {
            Remainder::Fiber(f) => {
                let mut factors = vs.clone();
                factors[f] = t.entries().to_vec();
                out.push(RankOneTerm { factors });
            }
            Remainder::Matrix(f, g) => {
                let m = DMatrix::from_row_slice(n, n, t.entries());
                for (u, v) in svd_terms(&m) {
                    let mut factors = vs.clone();
                    factors[f] = u;
                    factors[g] = v;
                    out.push(RankOneTerm { factors });
                }
            }
        }
    }
    Some(out)
}

fn resolution_options(a: &Tensor, mode: usize, p: ExtExponent) -> Vec<Resolution> {
    let mut out = vec![Resolution::Basis];
    if a.n() > 1 {
        out.push(Resolution::Signs);
    }
    if p == ExtExponent::two() && a.n() > 1 {
        out.push(Resolution::Orthonormal(hosvd_basis(a, mode)));
    }
    out
}

/// Cheapest structured decomposition over all plans.
fn best_structured(a: &Tensor, exps: &[ExtExponent]) -> Option<(f64, Vec<RankOneTerm>, String)> {
    let k = a.order();
    let options: Vec<Vec<Resolution>> = (0..k).map(|m| resolution_options(a, m, exps[m])).collect();
    let mut remainders: Vec<Remainder> = (0..k).map(Remainder::Fiber).collect();
    for f in 0..k {
        for g in f + 1..k {
            remainders.push(Remainder::Matrix(f, g));
        }
    }
    let mut best: Option<(f64, Vec<RankOneTerm>, String)> = None;
    for remainder in remainders {
        let split: Vec<usize> = (0..k)
            .filter(|&m| match remainder {
                Remainder::Fiber(f) => m != f,
                Remainder::Matrix(f, g) => m != f && m != g,
            })
            .collect();
        let total: usize = split.iter().map(|&m| options[m].len()).product();
        for code in 0..total {
            let mut rest = code;
            let mut resolutions: Vec<Option<Resolution>> = vec![None; k];
            let mut label = Vec::new();
            for &m in &split {
                let r = &options[m][rest % options[m].len()];
                rest /= options[m].len();
                label.push(match r {
                    Resolution::Basis => "basis",
                    Resolution::Signs => "signs",
                    Resolution::Orthonormal(_) => "svd",
                });
                resolutions[m] = Some(r.clone());
            }
            let Some(terms) = structured_terms(a, &resolutions, remainder) else {
                continue;
            };
            let c = cost(&terms, exps);
            if best.as_ref().map_or(true, |(bc, _, _)| c < *bc) {
                best = Some((c, terms, format!("structured[{} | {:?}]", label.join(","), remainder)));
            }
        }
    }
    best
}

fn fold_residual(terms: &mut Vec<RankOneTerm>, a: &Tensor) -> f64 {
    let mut recon = Tensor::zeros(a.order(), a.n());
    for t in terms.iter() {
        recon.add_scaled_rank_one(1.0, &t.factors);
    }
    let residual = a.sub(&recon);
    let before = residual.max_abs();
    terms.extend(basis_terms(&residual));
    before
}

fn atom_gram(atoms: &[Vec<Vec<f64>>]) -> DMatrix<f64> {
    let r = atoms.len();
    DMatrix::from_fn(r, r, |s, t| {
        atoms[s]
            .iter()
            .zip(&atoms[t])
            .map(|(x, y)| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>())
            .product()
    })
}

/// Greedy deflation by unit-norm rank-one atoms, then a joint least-squares
/// refit of all coefficients; the residual is folded in as basis terms.
fn greedy(a: &Tensor, exps: &[ExtExponent], opts: &PiOptions) -> Result<(f64, Vec<RankOneTerm>, bool)> {
    let scale = a.max_abs();
    let mut residual = a.clone();
    let mut atoms: Vec<Vec<Vec<f64>>> = Vec::new();
    let mut coeffs: Vec<f64> = Vec::new();
    let ascent = AscentOptions {
        restarts: opts.restarts.max(1),
        seed: opts.seed,
        ..AscentOptions::default()
    };
    let mut reached = false;
    for _ in 0..opts.rank_budget {
        if residual.max_abs() <= opts.tol * scale {
            reached = true;
            break;
        }
        let (_, xs) = ascend_balls(&residual, exps, &ascent)?;
        let norm2: f64 = xs.iter().map(|x| x.iter().map(|v| v * v).sum::<f64>()).product();
        if norm2 == 0.0 {
            break;
        }
        let c = residual.multilinear(&xs) / norm2;
        residual.add_scaled_rank_one(-c, &xs);
        atoms.push(xs);
        coeffs.push(c);
    }
    reached |= residual.max_abs() <= opts.tol * scale;
    let build = |coeffs: &[f64]| -> (f64, Vec<RankOneTerm>) {
        let mut terms: Vec<RankOneTerm> = atoms
            .iter()
            .zip(coeffs)
            .filter(|(_, &c)| c != 0.0)
            .map(|(xs, &c)| {
                let mut factors = xs.clone();
                factors[0].iter_mut().for_each(|v| *v *= c);
                RankOneTerm { factors }
            })
            .collect();
        fold_residual(&mut terms, a);
        (cost(&terms, exps), terms)
    };
    let (mut best_cost, mut best_terms) = build(&coeffs);
    if !atoms.is_empty() {
        let gram = atom_gram(&atoms);
        let rhs = DVector::from_iterator(atoms.len(), atoms.iter().map(|xs| a.multilinear(xs)));
        if let Some(refit) = gram.lu().solve(&rhs) {
            if refit.iter().all(|v| v.is_finite()) {
                let (c, t) = build(refit.as_slice());
                if c < best_cost {
                    best_cost = c;
                    best_terms = t;
                }
            }
        }
    }
    Ok((best_cost, best_terms, reached))
}

fn decomposition(terms: Vec<RankOneTerm>, a: &Tensor, value: f64) -> NormCertificate {
    let mut recon = Tensor::zeros(a.order(), a.n());
    for t in &terms {
        recon.add_scaled_rank_one(1.0, &t.factors);
    }
    NormCertificate {
        kind: CertificateKind::RankOneDecomposition,
        payload: Payload::Decomposition {
            terms,
            residual: a.sub(&recon).max_abs(),
        },
        achieved_value: value,
    }
}

/// Certified upper bound: the cheapest of the entrywise, structured and greedy
/// decompositions, each reconstructing `A` up to rounding.
pub fn pi_norm_upper(a: &Tensor, spec: &SpaceSpec, rank_budget: usize, restarts: usize, tol: f64) -> Result<PiUpper> {
    pi_norm_upper_with(
        a,
        spec,
        &PiOptions {
            rank_budget,
            restarts,
            tol,
            ..PiOptions::default()
        },
    )
}

pub fn pi_norm_upper_with(a: &Tensor, spec: &SpaceSpec, opts: &PiOptions) -> Result<PiUpper> {
    check_spec(a, spec)?;
    let exps = exponents(spec);
    if a.is_zero() {
        return Ok(PiUpper {
            value: 0.0,
            certificate: decomposition(Vec::new(), a, 0.0),
            method: "zero".into(),
            reached_tolerance: true,
        });
    }
    let basis = basis_terms(a);
    let mut best = (cost(&basis, &exps), basis, "entrywise".to_string());
    if let Some(s) = best_structured(a, &exps) {
        if s.0 < best.0 {
            best = s;
        }
    }
    let mut reached = true;
    if opts.rank_budget > 0 {
        let (c, terms, ok) = greedy(a, &exps, opts)?;
        if c < best.0 {
            best = (c, terms, "greedy".to_string());
            reached = ok;
        }
    }
    let (_, terms, method) = best;
    let value = cost(&terms, &exps);
    Ok(PiUpper {
        value,
        certificate: decomposition(terms, a, value),
        method,
        reached_tolerance: reached,
    })
}

fn peelable(p: ExtExponent, n: usize) -> bool {
    n == 1 || p.is_one() || (p.is_infinite() && n == 2)
}

/// Exact projective norm for products that reduce to `ℓ1(Y)`.
///
/// ℓ1 factors split off slice by slice, two-dimensional ℓ∞ factors do the
/// same after the isometry `ℓ∞² → ℓ1², x ↦ ((x₁+x₂)/2, (x₁−x₂)/2)`; what
/// remains must be empty, one ℓp factor, or two ℓ2 factors (trace norm).
pub fn pi_norm_structural_exact(a: &Tensor, spec: &SpaceSpec) -> Result<Option<f64>> {
    check_spec(a, spec)?;
    let exps = exponents(spec);
    let n = a.n();
    let k = a.order();
    let peel: Vec<usize> = (0..k).filter(|&m| peelable(exps[m], n)).collect();
    let keep: Vec<usize> = (0..k).filter(|&m| !peelable(exps[m], n)).collect();
    let two = ExtExponent::two();
    match keep.len() {
        0 | 1 => {}
        2 if exps[keep[0]] == two && exps[keep[1]] == two => {}
        _ => return Ok(None),
    }
    let mut t = a.clone();
    for &m in &peel {
        if exps[m].is_infinite() && n == 2 {
            let plus = t.contract(m, &[0.5, 0.5])?;
            let minus = t.contract(m, &[0.5, -0.5])?;
            t = Tensor::from_fn(k, n, |idx| {
                let mut rest: Vec<usize> = idx.to_vec();
                let i = rest.remove(m);
                if i == 0 {
                    plus.get(&rest)
                } else {
                    minus.get(&rest)
                }
            });
        }
    }
    let combos = n.pow(peel.len() as u32);
    let mut total = 0.0;
    for code in 0..combos {
        let mut rest = code;
        let mut slice = t.clone();
        let mut picks = vec![0usize; k];
        for &m in &peel {
            picks[m] = rest % n;
            rest /= n;
        }
        for &m in peel.iter().rev() {
            let mut e = vec![0.0; n];
            e[picks[m]] = 1.0;
            slice = slice.contract(m, &e)?;
        }
        total += match keep.len() {
            0 => slice.entries()[0].abs(),
            1 => lp_norm(slice.entries(), exps[keep[0]]),
            _ => DMatrix::from_row_slice(n, n, slice.entries()).singular_values().sum(),
        };
    }
    Ok(Some(total))
}

fn equal_diagonal_value(a: &Tensor) -> Option<f64> {
    let n = a.n();
    let mut idx = vec![0; a.order()];
    let mut c = None;
    for (offset, &v) in a.entries().iter().enumerate() {
        a.unravel_into(offset, &mut idx);
        let on_diagonal = idx.iter().all(|&i| i == idx[0]);
        if on_diagonal {
            match c {
                None => c = Some(v),
                Some(c0) if c0 != v => return None,
                _ => {}
            }
        } else if v != 0.0 {
            return None;
        }
    }
    c.map(|c| c.abs()).filter(|_| n > 0)
}

/// Certified lower bound: the largest of
/// the injective norm with the same exponents (witness vectors),
/// `⟨A, B⟩/‖B‖` for `B ∈ {A, sign A}` when the dual norm of `B` is exact,
/// the closed form for equal-entry diagonals,
/// and [`pi_norm_structural_exact`].
pub fn pi_norm_lower(a: &Tensor, spec: &SpaceSpec) -> Result<PiLower> {
    pi_norm_lower_with(a, spec, &AscentOptions::default())
}

pub fn pi_norm_lower_with(a: &Tensor, spec: &SpaceSpec, opts: &AscentOptions) -> Result<PiLower> {
    check_spec(a, spec)?;
    let exps = exponents(spec);
    let dual_balls: Vec<ExtExponent> = exps.iter().map(|p| p.dual()).collect();
    let (witness_value, xs) = match exact_on_balls(a, &dual_balls, EXACT_WORK_BUDGET) {
        Some(found) => found,
        None => ascend_balls(a, &dual_balls, opts)?,
    };
    let achieved = a.multilinear(&xs).abs();
    let mut best = PiLower {
        value: achieved.min(witness_value.max(achieved)),
        certificate: NormCertificate::witness(xs, dual_balls, achieved),
        method: "injective witness".into(),
        certified: true,
    };
    if a.is_zero() {
        return Ok(best);
    }
    for (name, b) in [("dual: A", a.clone()), ("dual: sign(A)", a.map(f64::signum))] {
        if let Some((dual_norm, _)) = exact_on_balls(&b, &exps, EXACT_WORK_BUDGET) {
            if dual_norm > 0.0 {
                let v = a.dot(&b) / dual_norm;
                if v > best.value {
                    best = PiLower {
                        value: v,
                        certificate: NormCertificate {
                            kind: CertificateKind::Exhaustive,
                            payload: Payload::DualTensor { tensor: b, dual_norm },
                            achieved_value: v,
                        },
                        method: name.into(),
                        certified: true,
                    };
                }
            }
        }
    }
    if let Some(c) = equal_diagonal_value(a) {
        let s = diag_s(&exps);
        let v = c * (a.n() as f64).powf(s.reciprocal_f64());
        if v > best.value {
            best = PiLower {
                value: v,
                certificate: NormCertificate::formula(format!("|c|·n^(1/s), s = {s}"), v),
                method: "diagonal closed form".into(),
                certified: true,
            };
        }
    }
    if let Some(v) = pi_norm_structural_exact(a, spec)? {
        if v > best.value {
            best = PiLower {
                value: v,
                certificate: NormCertificate::formula("l1 slice reduction", v),
                method: "structural exact".into(),
                certified: true,
            };
        }
    }
    Ok(best)
}

pub fn pi_norm(a: &Tensor, spec: &SpaceSpec, opts: &PiOptions) -> Result<PiEstimate> {
    let upper = pi_norm_upper_with(a, spec, opts)?;
    let lower = pi_norm_lower_with(
        a,
        spec,
        &AscentOptions {
            restarts: opts.restarts.max(1),
            seed: opts.seed,
            ..AscentOptions::default()
        },
    )?;
    let gap = if lower.value > 0.0 {
        upper.value / lower.value
    } else {
        1.0
    };
    Ok(PiEstimate { upper, lower, gap })
}
