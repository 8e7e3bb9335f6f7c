//! Divisor-generated numerical cycle groups `N^k` and the pullback action of
//! correspondences on them.
//!
//! `N^k` is modelled by the span of `k`-fold products of divisor classes in
//! `H^{2k}`, modulo the kernel of the cup pairing against `(n−k)`-fold
//! products. Classes are coefficient vectors in the monomial basis of the
//! relevant degree.

use num_traits::{One, Zero};

use crate::abelian::{AbelianVariety, OrderElement};
use crate::correspondence::{Correspondence, GradedAction};
use crate::error::{input, Result};
use crate::exterior::{CohomologyModel, GradedClass};
use crate::linalg::{Echelon, Matrix, Rat};

/// Fiber classes `a_j ∧ b_j` and the kernel divisors `{x_p = φ(x_q)}` for
/// coordinates `p ≠ q` on the same curve and `φ ∈ {1, ω}`.
pub fn divisor_generators(x: &AbelianVariety) -> Vec<GradedClass> {
    let model = x.model();
    let n = x.n();
    let rank = model.rank();
    let mut out = Vec::new();
    for j in 1..=n {
        out.push(model.wedge(&model.a(j), &model.b(j)).expect("same model"));
    }
    for p in 0..n {
        for q in 0..n {
            if p == q || !x.same_curve(p, q) {
                continue;
            }
            let order = x.order_of(p);
            let phis: Vec<OrderElement> = if order.is_cm() {
                vec![OrderElement::integer(1), OrderElement::new(0, 1)]
            } else {
                vec![OrderElement::integer(1)]
            };
            for phi in phis {
                // pullback of H^1(E) along x ↦ x_p − φ(x_q)
                let rep = order.represent(&phi.neg());
                let pull = |j: usize| -> GradedClass {
                    let mut v = vec![Rat::zero(); rank];
                    v[2 * p + j] = Rat::one();
                    for i in 0..2 {
                        v[2 * q + i] = rep[(i, j)].clone();
                    }
                    GradedClass::homogeneous(rank, 1, v).expect("degree-one vector")
                };
                out.push(model.wedge(&pull(0), &pull(1)).expect("same model"));
            }
        }
    }
    out
}

fn independent(vectors: impl IntoIterator<Item = Vec<Rat>>, dim: usize) -> Vec<Vec<Rat>> {
    let mut ech = Echelon::new(dim);
    vectors.into_iter().filter(|v| ech.insert(v)).collect()
}

/// A basis of the span of all `k`-fold products of the given degree-2 vectors.
fn products(model: &CohomologyModel, gens: &[Vec<Rat>], k: usize) -> Vec<Vec<Rat>> {
    let mut level: Vec<Vec<Rat>> = vec![vec![Rat::one()]];
    for step in 0..k {
        let mut ech = Echelon::new(model.dim(2 * step + 2));
        let mut next = Vec::new();
        for v in &level {
            for g in gens {
                let w = model.wedge_vectors(2 * step, v, 2, g);
                if ech.insert(&w) {
                    next.push(w);
                }
            }
        }
        level = next;
    }
    level
}

#[derive(Clone, Debug)]
pub struct NumericalLattice {
    pub k: usize,
    /// Independent classes in `H^{2k}`.
    pub spanning: Vec<Vec<Rat>>,
    /// Independent classes in `H^{2n−2k}`.
    pub dual: Vec<Vec<Rat>>,
    /// `gram[(a, b)] = ∫ spanning[a] ∧ dual[b]`.
    pub gram: Matrix,
    /// Spanning classes whose pairing rows are independent.
    pub quotient_basis: Vec<usize>,
    pub dimension: usize,
    /// Number of classes appended because an image left the span.
    pub saturation_events: usize,
}

impl NumericalLattice {
    fn assemble(
        model: &CohomologyModel,
        k: usize,
        spanning: Vec<Vec<Rat>>,
        dual: Vec<Vec<Rat>>,
        events: usize,
    ) -> Self {
        let gram = Matrix::from_rows(
            spanning.iter().map(|s| dual.iter().map(|d| model.pair_vectors(2 * k, s, d)).collect()).collect(),
        );
        let mut ech = Echelon::new(dual.len());
        let quotient_basis: Vec<usize> = (0..spanning.len()).filter(|&a| ech.insert(gram.row(a))).collect();
        let dimension = quotient_basis.len();
        NumericalLattice { k, spanning, dual, gram, quotient_basis, dimension, saturation_events: events }
    }

    /// Gram matrix restricted to the quotient basis rows.
    pub fn quotient_gram(&self) -> Matrix {
        let cols: Vec<usize> = (0..self.dual.len()).collect();
        self.gram.submatrix(&self.quotient_basis, &cols)
    }

    /// Coordinates in the quotient basis of the numerical class of `v ∈ H^{2k}`.
    pub fn coordinates(&self, model: &CohomologyModel, v: &[Rat]) -> Vec<Rat> {
        let pairing: Vec<Rat> = self.dual.iter().map(|d| model.pair_vectors(2 * self.k, v, d)).collect();
        self.quotient_gram().transpose().solve(&pairing).expect("quotient pairing is nondegenerate on the dual side")
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        let mut ech = Echelon::new(v.len());
        for s in &self.spanning {
            ech.insert(s);
        }
        ech.contains(v)
    }
}

/// The lattice `N^k` of the divisor-generated model.
pub fn build_nk(x: &AbelianVariety, k: usize) -> Result<NumericalLattice> {
    let n = x.n();
    if k > n {
        return input(format!("codimension {k} exceeds dimension {n}"));
    }
    let model = x.model();
    let gens = independent(divisor_generators(x).into_iter().map(|g| g.component(2)), model.dim(2));
    let spanning = products(model, &gens, k);
    let dual = products(model, &gens, n - k);
    Ok(NumericalLattice::assemble(model, k, spanning, dual, 0))
}

#[derive(Clone, Debug)]
pub struct InducedAction {
    pub matrix: Matrix,
    pub lattice: NumericalLattice,
    pub saturation_events: usize,
}

/// Pullback by `c` on `N^k`, saturating the lattice when an image leaves its span.
pub fn induced_action(x: &AbelianVariety, c: &Correspondence, lattice: &NumericalLattice) -> InducedAction {
    induced_action_from(x.model(), &c.graded_action(x), lattice)
}

pub fn induced_action_from(
    model: &CohomologyModel,
    action: &GradedAction,
    lattice: &NumericalLattice,
) -> InducedAction {
    let k = lattice.k;
    let a = action.degree(2 * k);
    let mut lat = lattice.clone();
    let mut events = 0;
    loop {
        let images: Vec<Vec<Rat>> = lat.spanning.iter().map(|s| a.mul_vec(s)).collect();
        let mut ech = Echelon::new(model.dim(2 * k));
        for s in &lat.spanning {
            ech.insert(s);
        }
        let mut grew = false;
        let mut spanning = lat.spanning.clone();
        // fixed order: first spanning class first
        for img in images {
            if ech.insert(&img) {
                spanning.push(img);
                events += 1;
                grew = true;
            }
        }
        if !grew {
            break;
        }
        lat = NumericalLattice::assemble(model, k, spanning, lat.dual.clone(), lattice.saturation_events + events);
    }
    let cols: Vec<Vec<Rat>> =
        lat.quotient_basis.iter().map(|&b| lat.coordinates(model, &a.mul_vec(&lat.spanning[b]))).collect();
    let matrix = Matrix::from_columns(&cols, lat.dimension);
    InducedAction { matrix, lattice: lat, saturation_events: events }
}

/// `deg_k` computed inside the lattice: the induced image of `θ^k` paired with `θ^{n−k}`.
pub fn lattice_degree(model: &CohomologyModel, induced: &InducedAction) -> Rat {
    let lat = &induced.lattice;
    let k = lat.k;
    let n = model.n();
    let theta_k = model.theta_power(k).component(2 * k);
    let theta_rest = model.theta_power(n - k).component(2 * n - 2 * k);
    let t = lat.coordinates(model, &theta_k);
    let image = induced.matrix.mul_vec(&t);
    lat.quotient_basis
        .iter()
        .zip(&image)
        .fold(Rat::zero(), |acc, (&b, c)| acc + c * model.pair_vectors(2 * k, &lat.spanning[b], &theta_rest))
}

#[derive(Clone, Debug)]
pub struct AlgTrSplit {
    pub algebraic: Vec<Vec<Rat>>,
    pub transcendental: Vec<Vec<Rat>>,
    /// The two subspaces meet trivially and fill `H^{2k}`.
    pub direct: bool,
}

/// `H^{2k} = H^{2k}_alg ⊕ H^{2k}_tr` with the transcendental part the
/// orthogonal of the complementary algebraic classes.
pub fn alg_tr_split(x: &AbelianVariety, k: usize) -> Result<AlgTrSplit> {
    let lat = build_nk(x, k)?;
    let model = x.model();
    let dim = model.dim(2 * k);
    let functionals = Matrix::from_rows(
        lat.dual
            .iter()
            .map(|d| {
                (0..dim)
                    .map(|i| {
                        let mut e = vec![Rat::zero(); dim];
                        e[i] = Rat::one();
                        model.pair_vectors(2 * k, &e, d)
                    })
                    .collect()
            })
            .collect(),
    );
    let transcendental = if lat.dual.is_empty() {
        (0..dim)
            .map(|i| {
                let mut e = vec![Rat::zero(); dim];
                e[i] = Rat::one();
                e
            })
            .collect()
    } else {
        functionals.nullspace()
    };
    let mut ech = Echelon::new(dim);
    let total = lat.spanning.iter().chain(&transcendental).filter(|v| ech.insert(v)).count();
    let direct = total == lat.spanning.len() + transcendental.len() && total == dim;
    Ok(AlgTrSplit { algebraic: lat.spanning, transcendental, direct })
}
