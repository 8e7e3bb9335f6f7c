//! Bounds derived from log-concave sequences.
//!
//! For a positive log-concave `a_0, …, a_n` and a nonnegative `b_0, …, b_{2n}`
//! with `r^i b_i ≤ max_j r^{2j} a_j` for every `r > 0`, evaluating at
//! `r_k² = a_k / a_{k+1}` gives `b_{2k} ≤ a_k` and `b_{2k+1} ≤ sqrt(a_k a_{k+1})`.
//! Square roots are avoided by storing squared bounds and witnesses.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{input, Error, Result};
use crate::linalg::Rat;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogConcaveBounds {
    pub a: Vec<Rat>,
    /// `r_k² = a_k / a_{k+1}` for `k = 0, …, n − 1`.
    pub witnesses_sq: Vec<Rat>,
    /// `b̂_i²` for `i = 0, …, 2n`.
    pub bounds_sq: Vec<Rat>,
}

impl LogConcaveBounds {
    pub fn n(&self) -> usize {
        self.a.len() - 1
    }

    /// Squared witness radius used for index `i` of `b`.
    pub fn witness_for(&self, i: usize) -> Option<&Rat> {
        if self.witnesses_sq.is_empty() {
            return None;
        }
        Some(&self.witnesses_sq[(i / 2).min(self.n() - 1)])
    }
}

/// First index `k` with `a_k² < a_{k−1} a_{k+1}`.
pub fn log_concavity_violation(a: &[Rat]) -> Option<usize> {
    (1..a.len().saturating_sub(1)).find(|&k| &a[k] * &a[k] < &a[k - 1] * &a[k + 1])
}

pub fn log_concave_bounds(a: &[Rat]) -> Result<LogConcaveBounds> {
    if a.is_empty() {
        return input("sequence must be nonempty");
    }
    if let Some(k) = a.iter().position(|x| !x.is_positive()) {
        return input(format!("a_{k} is not positive"));
    }
    if let Some(k) = log_concavity_violation(a) {
        return Err(Error::NotLogConcave(k));
    }
    let n = a.len() - 1;
    let witnesses_sq = (0..n).map(|k| &a[k] / &a[k + 1]).collect();
    let mut bounds_sq = Vec::with_capacity(2 * n + 1);
    for k in 0..=n {
        bounds_sq.push(&a[k] * &a[k]);
        if k < n {
            bounds_sq.push(&a[k] * &a[k + 1]);
        }
    }
    Ok(LogConcaveBounds { a: a.to_vec(), witnesses_sq, bounds_sq })
}

/// `{2^lo, …, 2^hi}`.
pub fn dyadic_grid(lo: i32, hi: i32) -> Vec<Rat> {
    (lo..=hi)
        .map(|e| {
            if e >= 0 {
                Rat::from_integer(BigInt::one() << e as usize)
            } else {
                Rat::new(BigInt::one(), BigInt::one() << (-e) as usize)
            }
        })
        .collect()
}

/// `max_j s^j a_j` where `s = r²`.
fn envelope(a: &[Rat], s: &Rat) -> Rat {
    let mut pow = Rat::one();
    let mut best = Rat::zero();
    for aj in a {
        best = best.max(&pow * aj);
        pow *= s;
    }
    best
}

/// Premise `r^i b_i ≤ max_j r^{2j} a_j` at `r² = s`, compared after squaring.
fn premise_holds(a: &[Rat], b: &[Rat], s: &Rat) -> bool {
    let env = envelope(a, s);
    let env_sq = &env * &env;
    let mut s_pow = Rat::one();
    b.iter().all(|bi| {
        let ok = &s_pow * bi * bi <= env_sq;
        s_pow *= s;
        ok
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionVerdict {
    pub premise_on_grid: bool,
    pub premise_at_witnesses: bool,
    /// `b_i ≤ b̂_i` for every `i`.
    pub conclusion: bool,
    /// Envelope at each witness reproduces `b̂_i` exactly and the grid
    /// envelope never undercuts it; equal when the witness lies on the grid.
    pub agreement: bool,
    /// `min_r max_j r^{2j−i} a_j` over the grid, squared.
    pub grid_envelope_sq: Vec<Rat>,
}

impl ReductionVerdict {
    /// Premise holds, conclusion follows, and grid and witnesses agree.
    pub fn passed(&self) -> bool {
        self.premise_on_grid && self.premise_at_witnesses && self.conclusion && self.agreement
    }

    /// The implication premise ⇒ conclusion is respected.
    pub fn consistent(&self) -> bool {
        (!self.premise_at_witnesses || self.conclusion) && self.agreement
    }
}

/// Checks the premise on the grid and at the witnesses, the conclusion
/// `b ≤ b̂`, and the agreement of the grid scan with the witness evaluation.
pub fn reduction_oracle(a: &[Rat], b: &[Rat], grid: &[Rat]) -> Result<ReductionVerdict> {
    let bounds = log_concave_bounds(a)?;
    let n = bounds.n();
    if b.len() != 2 * n + 1 {
        return input(format!("b must have length {}", 2 * n + 1));
    }
    if b.iter().any(Signed::is_negative) {
        return input("b must be nonnegative");
    }
    if grid.iter().any(|r| !r.is_positive()) {
        return input("grid radii must be positive");
    }
    let squares: Vec<Rat> = grid.iter().map(|r| r * r).collect();
    let premise_on_grid = squares.iter().all(|s| premise_holds(a, b, s));
    let premise_at_witnesses = bounds.witnesses_sq.iter().all(|s| premise_holds(a, b, s)) && (n > 0 || b[0] <= a[0]);
    let conclusion = b.iter().zip(&bounds.bounds_sq).all(|(bi, bound)| bi * bi <= *bound);

    // squared best bound at r² = s: max_j (s^j a_j)² / s^i
    let bound_at = |s: &Rat, i: usize| -> Rat {
        let env = envelope(a, s);
        &env * &env / num_traits::pow(s.clone(), i)
    };
    let grid_envelope_sq: Vec<Rat> =
        (0..=2 * n).map(|i| squares.iter().map(|s| bound_at(s, i)).min().unwrap_or_else(Rat::zero)).collect();
    let agreement = (0..=2 * n).all(|i| {
        let exact = &bounds.bounds_sq[i];
        let witness_ok = match bounds.witness_for(i) {
            Some(s) => &bound_at(s, i) == exact,
            None => true,
        };
        let grid_ok = grid.is_empty() || &grid_envelope_sq[i] >= exact;
        let on_grid = bounds.witness_for(i).is_some_and(|s| squares.contains(s));
        witness_ok && grid_ok && (!on_grid || &grid_envelope_sq[i] == exact)
    });
    Ok(ReductionVerdict { premise_on_grid, premise_at_witnesses, conclusion, agreement, grid_envelope_sq })
}
