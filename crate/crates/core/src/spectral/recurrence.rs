//! Minimal linear recurrences of exact sequences.

use num_traits::{One, Zero};

use crate::linalg::Rat;
use crate::poly::Poly;

/// `s_m = Σ_{j=1}^{L} c_j · s_{m−j}` for all `m ≥ L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearRecurrence {
    pub coeffs: Vec<Rat>,
}

impl LinearRecurrence {
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// `x^L − Σ c_j x^{L−j}`.
    pub fn characteristic_poly(&self) -> Poly {
        let l = self.order();
        let mut c = vec![Rat::zero(); l + 1];
        c[l] = Rat::one();
        for (j, cj) in self.coeffs.iter().enumerate() {
            c[l - j - 1] = -cj.clone();
        }
        Poly::new(c)
    }

    /// Runs the recurrence forward from the first `L` terms of `seq` and
    /// checks every later term.
    pub fn reproduces(&self, seq: &[Rat]) -> bool {
        let l = self.order();
        if seq.len() <= l {
            return true;
        }
        let mut generated: Vec<Rat> = seq[..l].to_vec();
        for m in l..seq.len() {
            let next = (1..=l).fold(Rat::zero(), |acc, j| acc + &self.coeffs[j - 1] * &generated[m - j]);
            generated.push(next);
        }
        generated == seq
    }
}

/// Berlekamp–Massey over the rationals: the shortest recurrence generating `seq`.
pub fn berlekamp_massey(seq: &[Rat]) -> LinearRecurrence {
    let mut c: Vec<Rat> = vec![Rat::one()];
    let mut b: Vec<Rat> = vec![Rat::one()];
    let mut l = 0usize;
    let mut shift = 1usize;
    let mut last = Rat::one();
    for n in 0..seq.len() {
        let mut d = seq[n].clone();
        for i in 1..=l.min(c.len() - 1) {
            d += &c[i] * &seq[n - i];
        }
        if d.is_zero() {
            shift += 1;
            continue;
        }
        let factor = &d / &last;
        let mut next = c.clone();
        if next.len() < b.len() + shift {
            next.resize(b.len() + shift, Rat::zero());
        }
        for (i, bi) in b.iter().enumerate() {
            next[i + shift] -= &factor * bi;
        }
        if 2 * l <= n {
            l = n + 1 - l;
            b = c;
            last = d;
            shift = 1;
        } else {
            shift += 1;
        }
        c = next;
    }
    c.resize(l + 1, Rat::zero());
    LinearRecurrence { coeffs: c[1..].iter().map(|x| -x.clone()).collect() }
}
