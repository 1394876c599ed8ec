//! `SpaceSpec` identifies `ℓ_{p₁}ⁿ ⊗ … ⊗ ℓ_{p_k}ⁿ` (the tensor-product kind is
//! chosen by the caller: π, ε, or plain coordinates).

use std::fmt;

use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{parse_exponent_list, ExtExponent, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceSpec {
    /// Exponents in canonical non-decreasing order.
    sorted: Vec<ExtExponent>,
    /// `mode_to_sorted[m]` is the index into `sorted` of mode `m`'s exponent.
    mode_to_sorted: Vec<usize>,
    n: usize,
}

impl SpaceSpec {
    pub fn new(exponents: Vec<ExtExponent>, n: usize) -> Result<Self> {
        if exponents.len() < 2 {
            return Err(Error::InvalidSpec(format!(
                "need at least two factors, got {}",
                exponents.len()
            )));
        }
        if n == 0 {
            return Err(Error::InvalidSpec("dimension n must be positive".into()));
        }
        let mut idx: Vec<usize> = (0..exponents.len()).collect();
        // stable: equal exponents keep their mode order
        idx.sort_by(|&a, &b| exponents[a].cmp(&exponents[b]));
        let mut mode_to_sorted = vec![0; exponents.len()];
        for (pos, &mode) in idx.iter().enumerate() {
            mode_to_sorted[mode] = pos;
        }
        let sorted = idx.iter().map(|&m| exponents[m]).collect();
        Ok(SpaceSpec {
            sorted,
            mode_to_sorted,
            n,
        })
    }

    /// Parses the comma-separated grammar, e.g. `1,4/3,inf`.
    pub fn parse(exponents: &str, n: usize) -> Result<Self> {
        Self::new(parse_exponent_list(exponents)?, n)
    }

    pub fn uniform(p: ExtExponent, k: usize, n: usize) -> Result<Self> {
        Self::new(vec![p; k], n)
    }

    pub fn order(&self) -> usize {
        self.sorted.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Total dimension `n^k`.
    pub fn dim(&self) -> usize {
        self.n.pow(self.order() as u32)
    }

    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(self.mode_exponents(), n)
    }

    pub fn sorted(&self) -> &[ExtExponent] {
        &self.sorted
    }

    /// True when the modes were given in canonical order.
    pub fn is_canonical(&self) -> bool {
        self.mode_to_sorted.iter().enumerate().all(|(m, &s)| m == s)
    }

    pub fn mode_exponent(&self, mode: usize) -> ExtExponent {
        self.sorted[self.mode_to_sorted[mode]]
    }

    /// Exponents in the order of the tensor modes they act on.
    pub fn mode_exponents(&self) -> Vec<ExtExponent> {
        (0..self.order()).map(|m| self.mode_exponent(m)).collect()
    }

    /// Permutation taking mode order to canonical order: `perm[m]` is the
    /// sorted position of mode `m`.
    pub fn permutation(&self) -> &[usize] {
        &self.mode_to_sorted
    }

    /// Exponent-wise conjugates, mode order preserved.
    pub fn dual(&self) -> Self {
        Self::new(self.mode_exponents().iter().map(|p| p.dual()).collect(), self.n)
            .expect("dual of a valid spec is valid")
    }

    /// Reciprocals `1/p_j` of the sorted exponents.
    pub fn reciprocals(&self) -> Vec<Rational> {
        self.sorted.iter().map(|p| p.reciprocal()).collect()
    }

    pub fn reciprocal_sum(&self) -> Rational {
        self.sorted.iter().fold(Ratio::zero(), |acc, p| acc + p.reciprocal())
    }

    /// `j₀`: number of factors with `p_j ≤ 2`.
    pub fn j0(&self) -> usize {
        self.sorted.iter().filter(|p| **p <= ExtExponent::two()).count()
    }

    pub fn all_polytope(&self) -> bool {
        self.sorted.iter().all(|p| p.is_polytope())
    }

    pub fn exponent_label(&self) -> String {
        self.mode_exponents()
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) n={}", self.exponent_label(), self.n)
    }
}
