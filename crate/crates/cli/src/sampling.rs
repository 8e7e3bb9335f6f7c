//! Seeded generators for endomorphisms and correspondences.
//!
//! Every sample draws from its own ChaCha stream, `(seed, stream = sample id)`,
//! so a sample is reproducible on its own and independent of evaluation order.

use std::collections::BTreeMap;

use corrdyn::abelian::OrderElement;
use corrdyn::correspondence::Atom;
use corrdyn::{rat, AbelianVariety, Correspondence, EndomorphismMatrix, Rat};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::suite::SuiteParams;

/// Cap on rejection-sampling attempts before giving up on a draw.
const MAX_ATTEMPTS: usize = 10_000;

pub fn sample_rng(seed: u64, sample_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample_id);
    rng
}

pub struct Sampler<'a> {
    pub x: &'a AbelianVariety,
    pub params: &'a SuiteParams,
    pub rng: ChaCha8Rng,
}

impl<'a> Sampler<'a> {
    pub fn new(x: &'a AbelianVariety, params: &'a SuiteParams, seed: u64, sample_id: u64) -> Self {
        Sampler { x, params, rng: sample_rng(seed, sample_id) }
    }

    fn element(&mut self, coord: usize, bound: i64) -> OrderElement {
        let u = self.rng.gen_range(-bound..=bound);
        let v = if self.x.order_of(coord).is_cm() { self.rng.gen_range(-bound..=bound) } else { 0 };
        OrderElement::new(u, v)
    }

    /// Entries bounded by `entry_bound`, zero across different curves.
    pub fn endomorphism(&mut self) -> EndomorphismMatrix {
        let n = self.x.n();
        let bound = self.params.entry_bound;
        let entries = (0..n)
            .map(|p| {
                (0..n)
                    .map(|q| if self.x.same_curve(p, q) { self.element(p, bound) } else { OrderElement::zero() })
                    .collect()
            })
            .collect();
        EndomorphismMatrix::new(self.x, entries).expect("entries respect the block structure")
    }

    /// Rejection sampling until the determinant is nonzero.
    pub fn isogeny(&mut self) -> EndomorphismMatrix {
        for _ in 0..MAX_ATTEMPTS {
            let f = self.endomorphism();
            if f.is_isogeny(self.x) {
                return f;
            }
        }
        self.x.identity()
    }

    pub fn coefficient(&mut self) -> Rat {
        self.params.coeff_set.choose(&mut self.rng).cloned().unwrap_or_else(|| rat(1))
    }

    /// A word of isogeny graphs and transposed graphs.
    pub fn word(&mut self) -> Vec<Atom> {
        let len = self.rng.gen_range(1..=self.params.word_len);
        (0..len)
            .map(|_| {
                let f = self.isogeny();
                if self.rng.gen_bool(0.5) {
                    Atom::Graph(f)
                } else {
                    Atom::TransposeGraph(f)
                }
            })
            .collect()
    }

    pub fn single_word(&mut self) -> Correspondence {
        let w = self.word();
        let c = self.coefficient();
        Correspondence::word(self.x, w, c).expect("isogeny words are finite")
    }

    /// A nonnegative combination of up to `max_terms` isogeny words.
    pub fn effective(&mut self) -> Correspondence {
        let terms = self.rng.gen_range(1..=self.params.max_terms);
        (0..terms).fold(Correspondence::zero(), |acc, _| acc.add(&self.single_word()))
    }

    /// A polarized endomorphism `f^*θ = qθ` with `q ≥ 2`: a diagonal of
    /// equal-norm elements followed by a permutation within each curve.
    pub fn polarized(&mut self) -> Option<(EndomorphismMatrix, Rat)> {
        let n = self.x.n();
        let bound = self.params.entry_bound;
        let by_norm: Vec<BTreeMap<BigInt, Vec<OrderElement>>> = (0..n)
            .map(|p| {
                let order = self.x.order_of(p);
                let mut m: BTreeMap<BigInt, Vec<OrderElement>> = BTreeMap::new();
                let vs = if order.is_cm() { -bound..=bound } else { 0..=0 };
                for u in -bound..=bound {
                    for v in vs.clone() {
                        let e = OrderElement::new(u, v);
                        m.entry(order.norm(&e)).or_default().push(e);
                    }
                }
                m
            })
            .collect();
        let common: Vec<&BigInt> = by_norm[0]
            .keys()
            .filter(|q| **q >= BigInt::from(2) && by_norm.iter().all(|m| m.contains_key(*q)))
            .collect();
        let q = (*common.choose(&mut self.rng)?).clone();
        let diag: Vec<OrderElement> =
            (0..n).map(|p| by_norm[p][&q].choose(&mut self.rng).expect("nonempty").clone()).collect();
        let mut perm: Vec<usize> = (0..n).collect();
        for f in self.x.factors() {
            let coords = self.x.coords_of(&f.curve_id).expect("factor curve");
            let mut shuffled = coords.clone();
            shuffled.shuffle(&mut self.rng);
            for (a, b) in coords.iter().zip(shuffled) {
                perm[*a] = b;
            }
        }
        let entries = (0..n)
            .map(|p| (0..n).map(|c| if c == perm[p] { diag[p].clone() } else { OrderElement::zero() }).collect())
            .collect();
        let f = EndomorphismMatrix::new(self.x, entries).expect("permutation within curves");
        let got = f.is_polarized(self.x)?;
        Some((f, got))
    }
}

/// `f(x, y) = (x + y, y)` on the first curve appearing with multiplicity at
/// least two; unipotent and not polarized.
pub fn unipotent_control(x: &AbelianVariety) -> Option<EndomorphismMatrix> {
    let f = x.factors().iter().find(|f| f.multiplicity >= 2)?;
    let coords = x.coords_of(&f.curve_id)?;
    let n = x.n();
    let mut entries: Vec<Vec<OrderElement>> =
        (0..n).map(|p| (0..n).map(|q| OrderElement::integer((p == q) as i64)).collect()).collect();
    entries[coords[0]][coords[1]] = OrderElement::integer(1);
    EndomorphismMatrix::new(x, entries).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use corrdyn::abelian::EndOrder;

    fn e2() -> AbelianVariety {
        AbelianVariety::power("E", 2, EndOrder::Quadratic { t: 0, d: 1 }).unwrap()
    }

    #[test]
    fn streams_are_reproducible() {
        let x = e2();
        let p = SuiteParams::default();
        let a = Sampler::new(&x, &p, 42, 3).effective();
        let b = Sampler::new(&x, &p, 42, 3).effective();
        let c = Sampler::new(&x, &p, 42, 4).effective();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn polarized_samples_are_polarized() {
        let x = e2();
        let p = SuiteParams::default();
        for id in 0..20 {
            let (f, q) = Sampler::new(&x, &p, 7, id).polarized().unwrap();
            assert_eq!(f.is_polarized(&x), Some(q.clone()));
            assert!(q >= rat(2));
        }
    }

    #[test]
    fn unipotent_control_is_not_polarized() {
        let x = e2();
        let f = unipotent_control(&x).unwrap();
        assert_eq!(f.is_polarized(&x), None);
        assert!(f.is_isogeny(&x));
        let curve = AbelianVariety::power("E", 1, EndOrder::Integers).unwrap();
        assert!(unipotent_control(&curve).is_none());
    }
}
