#![allow(dead_code)]

use corrdyn::abelian::{AbelianVariety, EndOrder, EndomorphismMatrix, Factor, OrderElement};
use corrdyn::correspondence::{Atom, Correspondence};
use corrdyn::linalg::{ratio, Rat};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn variety(i: usize) -> AbelianVariety {
    match i % 6 {
        0 => AbelianVariety::power("E", 1, EndOrder::Integers).unwrap(),
        1 => AbelianVariety::power("E", 1, EndOrder::Quadratic { t: 0, d: 1 }).unwrap(),
        2 => AbelianVariety::power("E", 2, EndOrder::Integers).unwrap(),
        3 => AbelianVariety::power("E", 2, EndOrder::Quadratic { t: 0, d: 1 }).unwrap(),
        4 => AbelianVariety::new(vec![
            Factor { curve_id: "E1".into(), multiplicity: 1, order: EndOrder::Integers },
            Factor { curve_id: "E2".into(), multiplicity: 1, order: EndOrder::Quadratic { t: 1, d: 1 } },
        ])
        .unwrap(),
        _ => AbelianVariety::power("E", 2, EndOrder::Quadratic { t: 1, d: 2 }).unwrap(),
    }
}

pub fn random_endo(rng: &mut ChaCha8Rng, x: &AbelianVariety, bound: i64, isogeny: bool) -> EndomorphismMatrix {
    let n = x.n();
    loop {
        let entries: Vec<Vec<OrderElement>> = (0..n)
            .map(|p| {
                (0..n)
                    .map(|q| {
                        if !x.same_curve(p, q) {
                            return OrderElement::zero();
                        }
                        let u = rng.gen_range(-bound..=bound);
                        let v = if x.order_of(p).is_cm() { rng.gen_range(-bound..=bound) } else { 0 };
                        OrderElement::new(u, v)
                    })
                    .collect()
            })
            .collect();
        let f = EndomorphismMatrix::new(x, entries).unwrap();
        if !isogeny || f.is_isogeny(x) {
            return f;
        }
    }
}

pub fn random_word(rng: &mut ChaCha8Rng, x: &AbelianVariety, max_len: usize) -> Vec<Atom> {
    let len = rng.gen_range(1..=max_len);
    (0..len)
        .map(|_| {
            let f = random_endo(rng, x, 2, true);
            if rng.gen_bool(0.5) {
                Atom::Graph(f)
            } else {
                Atom::TransposeGraph(f)
            }
        })
        .collect()
}

pub fn coefficient(rng: &mut ChaCha8Rng) -> Rat {
    [ratio(1, 1), ratio(2, 1), ratio(1, 2)][rng.gen_range(0..3)].clone()
}

/// A nonnegative combination of up to `terms` random isogeny words.
pub fn random_corr(rng: &mut ChaCha8Rng, x: &AbelianVariety, max_len: usize, terms: usize) -> Correspondence {
    let count = rng.gen_range(1..=terms);
    (0..count).fold(Correspondence::zero(), |acc, _| {
        let w = random_word(rng, x, max_len);
        let c = coefficient(rng);
        acc.add(&Correspondence::word(x, w, c).unwrap())
    })
}
