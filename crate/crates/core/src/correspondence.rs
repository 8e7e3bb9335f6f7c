//! Effective finite correspondences as nonnegative combinations of words in
//! graphs and transposed graphs of endomorphisms.
//!
//! A word `[a_1, …, a_m]` denotes `a_1 ∘ … ∘ a_m`, so `a_m` is applied first.
//! Its pullback on `H^i` is the matrix product `A(a_m) · … · A(a_1)`, where a
//! graph contributes `Λ^i` of the `H^1` pullback and a transposed graph the
//! pushforward along the isogeny.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::abelian::{AbelianVariety, EndomorphismMatrix};
use crate::error::{input, Error, Result};
use crate::exterior::{exterior_powers, pushforward_matrices, CohomologyModel};
use crate::linalg::{binomial, rat, Matrix, Rat};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Graph(EndomorphismMatrix),
    /// Transposed graph of an isogeny.
    TransposeGraph(EndomorphismMatrix),
}

impl Atom {
    fn endomorphism(&self) -> &EndomorphismMatrix {
        match self {
            Atom::Graph(f) | Atom::TransposeGraph(f) => f,
        }
    }

    /// Pullback matrices of the atom in every degree.
    pub fn action(&self, x: &AbelianVariety) -> Vec<Matrix> {
        match self {
            Atom::Graph(f) => exterior_powers(&f.realize(x)),
            Atom::TransposeGraph(g) => {
                pushforward_matrices(&g.realize(x)).expect("transposed graph atoms are isogenies")
            }
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Graph(m) => write!(f, "graph({m})"),
            Atom::TransposeGraph(m) => write!(f, "transpose_graph({m})"),
        }
    }
}

/// A composite `a_1 ∘ … ∘ a_m`; the empty word is the diagonal.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Atom>);

impl Word {
    pub fn atoms(&self) -> &[Atom] {
        &self.0
    }

    pub fn is_diagonal(&self) -> bool {
        self.0.is_empty()
    }

    /// Applies the fusion rules, returning the canonical word and the scalar
    /// produced by `Γ_g^T ∘ Γ_g = deg(g)·Δ`.
    fn normalize(x: &AbelianVariety, atoms: Vec<Atom>) -> (Word, Rat) {
        let mut stack: Vec<Atom> = Vec::with_capacity(atoms.len());
        let mut scalar = Rat::one();
        for atom in atoms {
            if atom.endomorphism().is_identity() {
                continue;
            }
            stack.push(atom);
            while stack.len() >= 2 {
                let right = &stack[stack.len() - 1];
                let left = &stack[stack.len() - 2];
                match (left, right) {
                    (Atom::Graph(psi), Atom::Graph(phi)) => {
                        let fused = psi.compose(x, phi);
                        stack.truncate(stack.len() - 2);
                        if !fused.is_identity() {
                            stack.push(Atom::Graph(fused));
                        }
                    }
                    (Atom::TransposeGraph(g), Atom::Graph(h)) if g == h => {
                        scalar *= g.isogeny_degree(x);
                        stack.truncate(stack.len() - 2);
                    }
                    _ => break,
                }
            }
        }
        (Word(stack), scalar)
    }

    pub fn action(&self, x: &AbelianVariety) -> Vec<Matrix> {
        let model = x.model();
        let mut acc: Vec<Matrix> = (0..=model.rank()).map(|i| Matrix::identity(model.dim(i))).collect();
        for atom in &self.0 {
            let a = atom.action(x);
            acc = a.iter().zip(&acc).map(|(m, prev)| m.mul(prev)).collect();
        }
        acc
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "diagonal");
        }
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "{}", parts.join(" o "))
    }
}

/// `Σ c_w · w` with every `c_w > 0`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Correspondence {
    terms: BTreeMap<Word, Rat>,
}

impl Correspondence {
    pub fn zero() -> Self {
        Correspondence { terms: BTreeMap::new() }
    }

    pub fn diagonal() -> Self {
        Correspondence { terms: BTreeMap::from([(Word::default(), Rat::one())]) }
    }

    pub fn graph(x: &AbelianVariety, f: &EndomorphismMatrix) -> Self {
        Self::from_atoms(x, vec![Atom::Graph(f.clone())], Rat::one())
    }

    pub fn transpose_graph(x: &AbelianVariety, g: &EndomorphismMatrix) -> Result<Self> {
        if !g.is_isogeny(x) {
            return Err(Error::NotFinite);
        }
        Ok(Self::from_atoms(x, vec![Atom::TransposeGraph(g.clone())], Rat::one()))
    }

    /// `coeff · (a_1 ∘ … ∘ a_m)`; transposed atoms must be isogenies.
    pub fn word(x: &AbelianVariety, atoms: Vec<Atom>, coeff: Rat) -> Result<Self> {
        if coeff.is_negative() {
            return input("correspondence coefficients must be nonnegative");
        }
        for a in &atoms {
            if let Atom::TransposeGraph(g) = a {
                if !g.is_isogeny(x) {
                    return Err(Error::NotFinite);
                }
            }
        }
        Ok(Self::from_atoms(x, atoms, coeff))
    }

    fn from_atoms(x: &AbelianVariety, atoms: Vec<Atom>, coeff: Rat) -> Self {
        let mut out = Self::zero();
        let (w, s) = Word::normalize(x, atoms);
        out.add_term(w, coeff * s);
        out
    }

    fn add_term(&mut self, w: Word, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(w).or_insert_with(Rat::zero);
        *entry += c;
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Rat)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// A single word with any positive coefficient.
    pub fn is_single_word(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn add(&self, other: &Correspondence) -> Correspondence {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Rat) -> Result<Correspondence> {
        if s.is_negative() {
            return input("correspondences may only be scaled by nonnegative rationals");
        }
        let mut out = Self::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c * s);
        }
        Ok(out)
    }

    /// `self ∘ other`, with `other` applied first.
    pub fn compose(&self, x: &AbelianVariety, other: &Correspondence) -> Correspondence {
        let mut out = Self::zero();
        for (wg, cg) in &self.terms {
            for (wf, cf) in &other.terms {
                let atoms: Vec<Atom> = wg.0.iter().chain(&wf.0).cloned().collect();
                let (w, s) = Word::normalize(x, atoms);
                out.add_term(w, cg * cf * s);
            }
        }
        out
    }

    /// `self^{∘m}`; the zeroth power is the diagonal.
    pub fn power(&self, x: &AbelianVariety, m: u32) -> Correspondence {
        let mut acc = Self::diagonal();
        for _ in 0..m {
            acc = self.compose(x, &acc);
        }
        acc
    }

    /// Reverses every word and swaps graphs with transposed graphs.
    pub fn transpose(&self, x: &AbelianVariety) -> Result<Correspondence> {
        let mut out = Self::zero();
        for (w, c) in &self.terms {
            let mut atoms = Vec::with_capacity(w.0.len());
            for a in w.0.iter().rev() {
                atoms.push(match a {
                    Atom::Graph(f) => {
                        if !f.is_isogeny(x) {
                            return Err(Error::TransposeNotFinite);
                        }
                        Atom::TransposeGraph(f.clone())
                    }
                    Atom::TransposeGraph(g) => Atom::Graph(g.clone()),
                });
            }
            let (w, s) = Word::normalize(x, atoms);
            out.add_term(w, c * s);
        }
        Ok(out)
    }

    pub fn graded_action(&self, x: &AbelianVariety) -> GradedAction {
        let model = x.model();
        let mut acc = GradedAction::zero(model);
        for (w, c) in &self.terms {
            let a = w.action(x);
            for (i, m) in a.iter().enumerate() {
                acc.degrees[i] = acc.degrees[i].add(&m.scale(c));
            }
        }
        acc
    }

    pub fn degree_sequence(&self, x: &AbelianVariety) -> DegreeSequence {
        self.graded_action(x).degree_sequence(x.model())
    }

    pub fn total_degree(&self, x: &AbelianVariety) -> Rat {
        self.degree_sequence(x).total(x.n())
    }

    pub fn lefschetz_number(&self, x: &AbelianVariety) -> Rat {
        self.graded_action(x).lefschetz_number()
    }
}

impl fmt::Display for Correspondence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.terms.iter().map(|(w, c)| if c.is_one() { w.to_string() } else { format!("{c}*{w}") }).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// One pullback matrix per cohomological degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedAction {
    pub degrees: Vec<Matrix>,
}

impl GradedAction {
    pub fn zero(model: &CohomologyModel) -> Self {
        GradedAction { degrees: (0..=model.rank()).map(|i| Matrix::zeros(model.dim(i), model.dim(i))).collect() }
    }

    pub fn identity(model: &CohomologyModel) -> Self {
        Self::gamma(model, &Rat::one())
    }

    /// `γ_r`: multiplication by `r^i` on `H^i`.
    pub fn gamma(model: &CohomologyModel, r: &Rat) -> Self {
        GradedAction {
            degrees: (0..=model.rank()).map(|i| Matrix::scalar(model.dim(i), &num_traits::pow(r.clone(), i))).collect(),
        }
    }

    pub fn degree(&self, i: usize) -> &Matrix {
        &self.degrees[i]
    }

    pub fn add(&self, other: &GradedAction) -> GradedAction {
        GradedAction { degrees: self.degrees.iter().zip(&other.degrees).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn scale(&self, s: &Rat) -> GradedAction {
        GradedAction { degrees: self.degrees.iter().map(|a| a.scale(s)).collect() }
    }

    /// Degree-wise product `self_i · other_i`.
    pub fn mul(&self, other: &GradedAction) -> GradedAction {
        GradedAction { degrees: self.degrees.iter().zip(&other.degrees).map(|(a, b)| a.mul(b)).collect() }
    }

    pub fn lefschetz_number(&self) -> Rat {
        self.degrees.iter().enumerate().fold(
            Rat::zero(),
            |acc, (i, m)| {
                if i % 2 == 0 {
                    acc + m.trace()
                } else {
                    acc - m.trace()
                }
            },
        )
    }

    /// `deg_i = ∫ A_{2i}(θ^i) ∧ θ^{n−i}`.
    pub fn degree_sequence(&self, model: &CohomologyModel) -> DegreeSequence {
        let n = model.n();
        let values = (0..=n)
            .map(|i| {
                let img = self.degrees[2 * i].mul_vec(&model.theta_power(i).component(2 * i));
                model.pair_vectors(2 * i, &img, &model.theta_power(n - i).component(2 * n - 2 * i))
            })
            .collect();
        DegreeSequence { values }
    }
}

/// `(deg_0, …, deg_n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeSequence {
    pub values: Vec<Rat>,
}

impl DegreeSequence {
    /// `Σ C(n, i)·deg_i`.
    pub fn total(&self, n: usize) -> Rat {
        self.values.iter().enumerate().fold(Rat::zero(), |acc, (i, d)| acc + d * rat(binomial(n, i) as i64))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|d| !d.is_negative())
    }

    /// First index `k` with `deg_k² < deg_{k−1}·deg_{k+1}`, if any.
    pub fn log_concavity_violation(&self) -> Option<usize> {
        (1..self.values.len().saturating_sub(1))
            .find(|&k| &self.values[k] * &self.values[k] < &self.values[k - 1] * &self.values[k + 1])
    }
}

impl fmt::Display for DegreeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Intersection number `f · g`, computed as the Lefschetz number of `g^T ∘ f`.
pub fn intersect(x: &AbelianVariety, f: &Correspondence, g: &Correspondence) -> Result<Rat> {
    Ok(g.transpose(x)?.compose(x, f).lefschetz_number(x))
}

/// Intersection number from graded actions alone, realizing the transpose of
/// `g` as the Poincaré adjoint of its action; works for any `g`.
pub fn intersect_actions(model: &CohomologyModel, f: &GradedAction, g: &GradedAction) -> Rat {
    let gt = GradedAction { degrees: model.poincare_adjoint(&g.degrees) };
    f.mul(&gt).lefschetz_number()
}

/// Splits a positive rational into `(n_1, n_2)` in lowest terms.
fn positive_parts(r: &Rat) -> Result<(i64, i64)> {
    if !r.is_positive() {
        return input("r must be a positive rational");
    }
    let n1 = r.numer().to_i64();
    let n2 = r.denom().to_i64();
    match (n1, n2) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => input("r has a numerator or denominator too large for a multiplication map"),
    }
}

/// `G_r = n_2^{-2n} · Γ_{[n_1]} ∘ Γ_{[n_2]}^T` for `r = n_1 / n_2`.
pub fn gr_correspondence(x: &AbelianVariety, r: &Rat) -> Result<Correspondence> {
    let (n1, n2) = positive_parts(r)?;
    let g1 = Correspondence::graph(x, &x.multiplication_map(n1));
    let t2 = Correspondence::transpose_graph(x, &x.multiplication_map(n2))?;
    let scale = Rat::new(BigInt::one(), num_traits::pow(BigInt::from(n2), 2 * x.n()));
    g1.compose(x, &t2).scale(&scale)
}

/// Graded action of `G_r ∘ c`.
pub fn apply_gr(x: &AbelianVariety, c: &Correspondence, r: &Rat) -> Result<GradedAction> {
    Ok(gr_correspondence(x, r)?.compose(x, c).graded_action(x))
}

/// The `2n + 1` Künneth projectors `π_0, …, π_{2n}` obtained by inverting
/// the Vandermonde system `γ_{r_j} = Σ_k r_j^k π_k`.
pub fn kunneth_projectors(x: &AbelianVariety, radii: &[Rat]) -> Result<Vec<GradedAction>> {
    let model = x.model();
    let count = model.rank() + 1;
    if radii.len() != count {
        return input(format!("expected {count} radii, got {}", radii.len()));
    }
    for (i, r) in radii.iter().enumerate() {
        if !r.is_positive() {
            return input("radii must be positive");
        }
        if radii[..i].contains(r) {
            return Err(Error::Singular(format!("radius {r} repeated")));
        }
    }
    let gammas: Vec<GradedAction> =
        radii.iter().map(|r| Ok(gr_correspondence(x, r)?.graded_action(x))).collect::<Result<_>>()?;
    let v =
        Matrix::from_rows(radii.iter().map(|r| (0..count).map(|k| num_traits::pow(r.clone(), k)).collect()).collect());
    let c = v.inverse().ok_or_else(|| Error::Singular("Vandermonde system".into()))?;
    Ok((0..count)
        .map(|i| gammas.iter().enumerate().fold(GradedAction::zero(model), |acc, (j, g)| acc.add(&g.scale(&c[(i, j)]))))
        .collect())
}

/// `(φ × ψ)_*(f) = Γ_ψ ∘ f ∘ Γ_φ^T`, whose pullback is `φ_* ∘ f^* ∘ ψ^*`.
pub fn lieberman_pushforward(
    x: &AbelianVariety,
    phi: &EndomorphismMatrix,
    psi: &EndomorphismMatrix,
    f: &Correspondence,
) -> Result<Correspondence> {
    if !psi.is_isogeny(x) {
        return Err(Error::NotIsogeny);
    }
    let tphi = Correspondence::transpose_graph(x, phi).map_err(|_| Error::NotIsogeny)?;
    Ok(Correspondence::graph(x, psi).compose(x, &f.compose(x, &tphi)))
}
