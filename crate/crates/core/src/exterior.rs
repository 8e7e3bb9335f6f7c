//! Exterior algebra on a rank-`2n` lattice, standing in for the cohomology
//! ring of an `n`-dimensional abelian variety.
//!
//! Basis vectors of degree one are numbered `1..=2n` with `a_j = 2j - 1` and
//! `b_j = 2j`. Internally a basis monomial is a bitmask where index `j` sets
//! bit `j - 1`; monomials of a fixed degree are listed in lexicographic order
//! of their sorted index lists.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::error::{input, Error, Result};
use crate::linalg::{binomial, rat, Matrix, Rat};

/// Largest dimension accepted without [`CohomologyModel::with_limit`].
pub const DEFAULT_MAX_DIM: usize = 4;

/// All `i`-element subsets of `{0, .., rank - 1}` as bitmasks, in lexicographic order.
pub fn subsets_lex(rank: usize, i: usize) -> Vec<u32> {
    fn go(start: usize, rank: usize, left: usize, acc: u32, out: &mut Vec<u32>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for j in start..=rank - left {
            go(j + 1, rank, left - 1, acc | (1 << j), out);
        }
    }
    let mut out = Vec::with_capacity(binomial(rank, i));
    if i <= rank {
        go(0, rank, i, 0, &mut out);
    }
    out
}

fn bits(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |b| mask & (1 << b) != 0)
}

/// Sign of `e_I ∧ e_J` relative to the sorted monomial, `None` when they share an index.
pub fn wedge_sign(i_mask: u32, j_mask: u32) -> Option<bool> {
    if i_mask & j_mask != 0 {
        return None;
    }
    let inversions: u32 = bits(j_mask).map(|y| (i_mask >> (y + 1)).count_ones()).sum();
    Some(inversions % 2 == 1)
}

/// A basis monomial `e_{i_1} ∧ … ∧ e_{i_k}` with `1 <= i_1 < … < i_k <= rank`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisIndex {
    subset: Vec<usize>,
}

impl BasisIndex {
    pub fn new(subset: Vec<usize>, rank: usize) -> Result<Self> {
        if subset.iter().any(|&j| j == 0 || j > rank) {
            return input(format!("basis index out of range 1..={rank}: {subset:?}"));
        }
        if subset.windows(2).any(|w| w[0] >= w[1]) {
            return input(format!("basis index not strictly increasing: {subset:?}"));
        }
        Ok(BasisIndex { subset })
    }

    pub fn from_mask(mask: u32) -> Self {
        BasisIndex { subset: bits(mask).map(|b| b + 1).collect() }
    }

    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    pub fn degree(&self) -> usize {
        self.subset.len()
    }

    pub fn mask(&self) -> u32 {
        self.subset.iter().fold(0, |m, &j| m | (1 << (j - 1)))
    }
}

/// A cohomology class stored degree by degree; missing degrees are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedClass {
    rank: usize,
    parts: BTreeMap<usize, Vec<Rat>>,
}

impl GradedClass {
    pub fn zero(rank: usize) -> Self {
        GradedClass { rank, parts: BTreeMap::new() }
    }

    pub fn homogeneous(rank: usize, degree: usize, coeffs: Vec<Rat>) -> Result<Self> {
        if degree > rank {
            return input(format!("degree {degree} exceeds rank {rank}"));
        }
        let expected = binomial(rank, degree);
        if coeffs.len() != expected {
            return input(format!("degree {degree} vector has length {}, expected {expected}", coeffs.len()));
        }
        let mut parts = BTreeMap::new();
        if coeffs.iter().any(|c| !c.is_zero()) {
            parts.insert(degree, coeffs);
        }
        Ok(GradedClass { rank, parts })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn part(&self, degree: usize) -> Option<&[Rat]> {
        self.parts.get(&degree).map(Vec::as_slice)
    }

    /// Degree-`i` component, filled with zeros when absent.
    pub fn component(&self, degree: usize) -> Vec<Rat> {
        self.parts.get(&degree).cloned().unwrap_or_else(|| vec![Rat::zero(); binomial(self.rank, degree)])
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.parts.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn add(&self, other: &GradedClass) -> Result<GradedClass> {
        if self.rank != other.rank {
            return input("classes belong to models of different rank");
        }
        let mut out = self.clone();
        for (&d, v) in &other.parts {
            let entry = out.parts.entry(d).or_insert_with(|| vec![Rat::zero(); v.len()]);
            for (x, y) in entry.iter_mut().zip(v) {
                *x += y;
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn scale(&self, s: &Rat) -> GradedClass {
        let mut out = GradedClass { rank: self.rank, parts: BTreeMap::new() };
        for (&d, v) in &self.parts {
            out.parts.insert(d, v.iter().map(|x| x * s).collect());
        }
        out.prune();
        out
    }

    fn prune(&mut self) {
        self.parts.retain(|_, v| v.iter().any(|c| !c.is_zero()));
    }
}

/// The exterior algebra `Λ^•(Q^{2n})` with its orientation and the class `θ = Σ a_j ∧ b_j`.
#[derive(Clone, Debug)]
pub struct CohomologyModel {
    n: usize,
    rank: usize,
    basis: Vec<Vec<u32>>,
    lookup: Vec<HashMap<u32, usize>>,
    theta_powers: Vec<GradedClass>,
}

impl CohomologyModel {
    /// Model for dimension `1 <= n <= 4`.
    pub fn new(n: usize) -> Result<Self> {
        Self::with_limit(n, DEFAULT_MAX_DIM)
    }

    /// Model with an explicit dimension cap; bitmask storage limits `n` to 15.
    pub fn with_limit(n: usize, max_dim: usize) -> Result<Self> {
        if n == 0 {
            return input("dimension must be at least 1");
        }
        if n > max_dim {
            return input(format!("dimension {n} exceeds the cap of {max_dim}"));
        }
        if n > 15 {
            return input("dimension above 15 is not representable");
        }
        let rank = 2 * n;
        let basis: Vec<Vec<u32>> = (0..=rank).map(|i| subsets_lex(rank, i)).collect();
        let lookup = basis.iter().map(|b| b.iter().enumerate().map(|(k, &m)| (m, k)).collect()).collect();
        let mut model = CohomologyModel { n, rank, basis, lookup, theta_powers: Vec::new() };
        let mut theta = vec![Rat::zero(); binomial(rank, 2)];
        for j in 0..n {
            theta[model.index_of(0b11 << (2 * j))] = Rat::one();
        }
        let theta = GradedClass::homogeneous(rank, 2, theta)?;
        let mut powers = vec![model.unit()];
        for i in 1..=n {
            let next = model.wedge(&powers[i - 1], &theta)?;
            powers.push(next);
        }
        model.theta_powers = powers;
        Ok(model)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Dimension `C(2n, i)` of the degree-`i` piece.
    pub fn dim(&self, i: usize) -> usize {
        self.basis.get(i).map_or(0, Vec::len)
    }

    pub fn basis(&self, i: usize) -> &[u32] {
        &self.basis[i]
    }

    pub fn basis_index(&self, i: usize, pos: usize) -> BasisIndex {
        BasisIndex::from_mask(self.basis[i][pos])
    }

    pub fn index_of(&self, mask: u32) -> usize {
        self.lookup[mask.count_ones() as usize][&mask]
    }

    pub fn monomial(&self, idx: &BasisIndex) -> Result<GradedClass> {
        let d = idx.degree();
        if idx.subset().iter().any(|&j| j > self.rank) {
            return input("basis index outside the model");
        }
        let mut v = vec![Rat::zero(); self.dim(d)];
        v[self.index_of(idx.mask())] = Rat::one();
        GradedClass::homogeneous(self.rank, d, v)
    }

    /// The degree-one generator `e_j`, `1 <= j <= 2n`.
    pub fn generator(&self, j: usize) -> GradedClass {
        self.monomial(&BasisIndex { subset: vec![j] }).expect("generator index in range")
    }

    pub fn a(&self, j: usize) -> GradedClass {
        self.generator(2 * j - 1)
    }

    pub fn b(&self, j: usize) -> GradedClass {
        self.generator(2 * j)
    }

    pub fn unit(&self) -> GradedClass {
        GradedClass::homogeneous(self.rank, 0, vec![Rat::one()]).expect("unit")
    }

    /// The top monomial `a_1 ∧ b_1 ∧ … ∧ a_n ∧ b_n`, integrating to one.
    pub fn orientation(&self) -> GradedClass {
        GradedClass::homogeneous(self.rank, self.rank, vec![Rat::one()]).expect("orientation")
    }

    pub fn theta(&self) -> &GradedClass {
        &self.theta_powers[1]
    }

    /// `θ^i`, for `0 <= i <= n`.
    pub fn theta_power(&self, i: usize) -> &GradedClass {
        &self.theta_powers[i]
    }

    fn check(&self, c: &GradedClass) -> Result<()> {
        if c.rank != self.rank {
            return input(format!("class of rank {} used in a model of rank {}", c.rank, self.rank));
        }
        Ok(())
    }

    /// Product of homogeneous coefficient vectors of degrees `p` and `q`.
    pub fn wedge_vectors(&self, p: usize, a: &[Rat], q: usize, b: &[Rat]) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.dim(p + q)];
        if p + q > self.rank {
            return out;
        }
        for (ia, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let ma = self.basis[p][ia];
            for (ib, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let mb = self.basis[q][ib];
                if let Some(neg) = wedge_sign(ma, mb) {
                    let slot = &mut out[self.index_of(ma | mb)];
                    if neg {
                        *slot -= x * y;
                    } else {
                        *slot += x * y;
                    }
                }
            }
        }
        out
    }

    pub fn wedge(&self, a: &GradedClass, b: &GradedClass) -> Result<GradedClass> {
        self.check(a)?;
        self.check(b)?;
        let mut out = GradedClass::zero(self.rank);
        for (&p, va) in &a.parts {
            for (&q, vb) in &b.parts {
                if p + q > self.rank {
                    continue;
                }
                let v = self.wedge_vectors(p, va, q, vb);
                out = out.add(&GradedClass { rank: self.rank, parts: BTreeMap::from([(p + q, v)]) })?;
            }
        }
        out.prune();
        Ok(out)
    }

    /// Coefficient of the orientation monomial.
    pub fn integrate(&self, a: &GradedClass) -> Rat {
        a.part(self.rank).map_or_else(Rat::zero, |v| v[0].clone())
    }

    pub fn poincare_pairing(&self, a: &GradedClass, b: &GradedClass) -> Result<Rat> {
        self.check(a)?;
        self.check(b)?;
        let da: Vec<usize> = a.degrees().collect();
        let db: Vec<usize> = b.degrees().collect();
        if da.len() > 1 || db.len() > 1 {
            return input("pairing requires homogeneous classes");
        }
        match (da.first(), db.first()) {
            (Some(&p), Some(&q)) if p + q == self.rank => {
                Ok(self.pair_vectors(p, a.part(p).unwrap(), b.part(q).unwrap()))
            }
            (Some(&p), Some(&q)) => input(format!("degrees {p} and {q} are not complementary")),
            // a zero class pairs to zero against anything
            _ => Ok(Rat::zero()),
        }
    }

    /// `∫ a ∧ b` for `a` of degree `p` and `b` of degree `2n - p`.
    pub fn pair_vectors(&self, p: usize, a: &[Rat], b: &[Rat]) -> Rat {
        let q = self.rank - p;
        let full = (1u32 << self.rank) - 1;
        let mut acc = Rat::zero();
        for (ia, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let ma = self.basis[p][ia];
            let y = &b[self.lookup[q][&(full ^ ma)]];
            if y.is_zero() {
                continue;
            }
            if wedge_sign(ma, full ^ ma) == Some(true) {
                acc -= x * y;
            } else {
                acc += x * y;
            }
        }
        acc
    }

    /// Gram matrix of the pairing `H^i × H^{2n-i} → Q` in the monomial bases.
    pub fn poincare_gram(&self, i: usize) -> Matrix {
        let q = self.rank - i;
        let full = (1u32 << self.rank) - 1;
        let mut g = Matrix::zeros(self.dim(i), self.dim(q));
        for (r, &m) in self.basis[i].iter().enumerate() {
            let c = self.lookup[q][&(full ^ m)];
            g[(r, c)] = if wedge_sign(m, full ^ m) == Some(true) { rat(-1) } else { rat(1) };
        }
        g
    }

    /// Adjoint of a graded action under the pairing: the returned `X_i` satisfies
    /// `∫ X_i(α) ∧ β = ∫ α ∧ A_{2n-i}(β)`.
    pub fn poincare_adjoint(&self, action: &[Matrix]) -> Vec<Matrix> {
        (0..=self.rank)
            .map(|i| {
                let p = self.poincare_gram(i);
                // signed permutation, so the inverse is the transpose
                p.mul(&action[self.rank - i]).mul(&p.transpose()).transpose()
            })
            .collect()
    }
}

/// The `i`-th compound matrix: entry `(I, J)` is the minor on rows `I` and columns `J`.
pub fn exterior_power_matrix(m: &Matrix, i: usize) -> Matrix {
    assert!(m.is_square(), "exterior power of a non-square matrix");
    let rank = m.rows();
    assert!(i <= rank, "exterior degree out of range");
    let basis = subsets_lex(rank, i);
    let mut out = Matrix::zeros(basis.len(), basis.len());
    for (r, &rm) in basis.iter().enumerate() {
        let rows: Vec<usize> = bits(rm).collect();
        for (c, &cm) in basis.iter().enumerate() {
            let cols: Vec<usize> = bits(cm).collect();
            out[(r, c)] = m.submatrix(&rows, &cols).det();
        }
    }
    out
}

/// All compound matrices `Λ^0 M, …, Λ^{2n} M`, sharing minors between degrees.
pub fn exterior_powers(m: &Matrix) -> Vec<Matrix> {
    assert!(m.is_square(), "exterior power of a non-square matrix");
    let rank = m.rows();
    let mut out = vec![Matrix::identity(1)];
    // minors keyed by (row mask, column mask) of the previous degree
    let mut prev: HashMap<(u32, u32), Rat> = HashMap::from([((0, 0), Rat::one())]);
    for i in 1..=rank {
        let basis = subsets_lex(rank, i);
        let mut cur = HashMap::with_capacity(basis.len() * basis.len());
        let mut mat = Matrix::zeros(basis.len(), basis.len());
        for (c, &cm) in basis.iter().enumerate() {
            // expand along the first column of the column set
            let j0 = cm.trailing_zeros() as usize;
            let rest = cm & !(1 << j0);
            for (r, &rm) in basis.iter().enumerate() {
                let mut acc = Rat::zero();
                for (pos, row) in bits(rm).enumerate() {
                    let x = &m[(row, j0)];
                    if x.is_zero() {
                        continue;
                    }
                    let minor = &prev[&(rm & !(1 << row), rest)];
                    if minor.is_zero() {
                        continue;
                    }
                    if pos % 2 == 0 {
                        acc += x * minor;
                    } else {
                        acc -= x * minor;
                    }
                }
                mat[(r, c)] = acc.clone();
                cur.insert((rm, cm), acc);
            }
        }
        out.push(mat);
        prev = cur;
    }
    out
}

/// `det(M) · (Λ^i M)^{-1}`, the pushforward on `H^i` along an isogeny with `H^1` pullback `M`.
pub fn pushforward_matrix(m: &Matrix, i: usize) -> Result<Matrix> {
    let d = m.det();
    if d.is_zero() {
        return Err(Error::NotIsogeny);
    }
    let inv = m.inverse().ok_or(Error::NotIsogeny)?;
    Ok(exterior_power_matrix(&inv, i).scale(&d))
}

/// Pushforward matrices in every degree.
pub fn pushforward_matrices(m: &Matrix) -> Result<Vec<Matrix>> {
    let d = m.det();
    if d.is_zero() {
        return Err(Error::NotIsogeny);
    }
    let inv = m.inverse().ok_or(Error::NotIsogeny)?;
    Ok(exterior_powers(&inv).into_iter().map(|x| x.scale(&d)).collect())
}
