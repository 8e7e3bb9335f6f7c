//! Products of powers of elliptic curves and their endomorphisms.
//!
//! A variety is a list of factors `E_j^{m_j}` with pairwise non-isogenous
//! curves, each carrying either `Z` or an imaginary quadratic order
//! `Z[ω]`, `ω² = tω − d`. An endomorphism is an `n × n` matrix `F` over these
//! rings acting on points by `f(x)_p = Σ_q F[p][q] x_q`; entries linking
//! different curves must vanish.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{input, Result};
use crate::exterior::CohomologyModel;
use crate::linalg::{Matrix, Rat};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EndOrder {
    Integers,
    /// `Z[ω]` with `ω² = tω − d` and `t² − 4d < 0`.
    Quadratic {
        t: i64,
        d: i64,
    },
}

impl EndOrder {
    pub fn quadratic(t: i64, d: i64) -> Result<Self> {
        let disc = t as i128 * t as i128 - 4 * d as i128;
        if disc >= 0 {
            return input(format!("order with t = {t}, d = {d} is not imaginary quadratic (t^2 - 4d = {disc})"));
        }
        Ok(EndOrder::Quadratic { t, d })
    }

    pub fn is_cm(&self) -> bool {
        matches!(self, EndOrder::Quadratic { .. })
    }

    /// `(t, d)`; the integers are reported as `None`.
    pub fn trace_norm(&self) -> Option<(i64, i64)> {
        match *self {
            EndOrder::Integers => None,
            EndOrder::Quadratic { t, d } => Some((t, d)),
        }
    }

    /// Rank of the order as a Z-module.
    pub fn rank(&self) -> usize {
        if self.is_cm() {
            2
        } else {
            1
        }
    }

    pub fn contains(&self, x: &OrderElement) -> bool {
        self.is_cm() || x.v.is_zero()
    }

    pub fn mul(&self, a: &OrderElement, b: &OrderElement) -> OrderElement {
        match *self {
            EndOrder::Integers => OrderElement { u: &a.u * &b.u, v: BigInt::zero() },
            EndOrder::Quadratic { t, d } => {
                let vv = &a.v * &b.v;
                OrderElement { u: &a.u * &b.u - &vv * d, v: &a.u * &b.v + &b.u * &a.v + vv * t }
            }
        }
    }

    /// Norm `u² + t·u·v + d·v²`, the degree of the endomorphism of the curve.
    pub fn norm(&self, a: &OrderElement) -> BigInt {
        match *self {
            EndOrder::Integers => &a.u * &a.u,
            EndOrder::Quadratic { t, d } => &a.u * &a.u + &a.u * &a.v * t + &a.v * &a.v * d,
        }
    }

    /// Complex conjugate: `ω ↦ t − ω`.
    pub fn conj(&self, a: &OrderElement) -> OrderElement {
        match *self {
            EndOrder::Integers => a.clone(),
            EndOrder::Quadratic { t, .. } => OrderElement { u: &a.u + &a.v * t, v: -a.v.clone() },
        }
    }

    /// Companion matrix of `x² − t x + d`, the action of `ω` on `H^1` of the curve.
    pub fn companion(&self) -> Matrix {
        let (t, d) = self.trace_norm().unwrap_or((0, 0));
        Matrix::from_i64(&[vec![0, -d], vec![1, t]])
    }

    /// `u·I + v·C` on the two-dimensional `H^1` of the curve.
    pub fn represent(&self, a: &OrderElement) -> Matrix {
        let (t, d) = self.trace_norm().unwrap_or((0, 0));
        let u = Rat::from_integer(a.u.clone());
        let v = Rat::from_integer(a.v.clone());
        Matrix::from_rows(vec![
            vec![u.clone(), -&v * Rat::from_integer(d.into())],
            vec![v.clone(), u + v * Rat::from_integer(t.into())],
        ])
    }

    /// The finitely many units of the order.
    pub fn units(&self) -> Vec<OrderElement> {
        let one = BigInt::one();
        let mut out = Vec::new();
        let range = if self.is_cm() { -2i64..=2 } else { 0..=0 };
        for u in -2i64..=2 {
            for v in range.clone() {
                let x = OrderElement::new(u, v);
                if self.norm(&x) == one {
                    out.push(x);
                }
            }
        }
        out
    }
}

impl fmt::Display for EndOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EndOrder::Integers => write!(f, "Z"),
            EndOrder::Quadratic { t, d } => write!(f, "Z[w], w^2 = {t}w - {d}"),
        }
    }
}

/// `u + v·ω` in an order; `v` is zero over `Z`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrderElement {
    pub u: BigInt,
    pub v: BigInt,
}

impl OrderElement {
    pub fn new(u: i64, v: i64) -> Self {
        OrderElement { u: u.into(), v: v.into() }
    }

    pub fn integer(u: i64) -> Self {
        Self::new(u, 0)
    }

    pub fn zero() -> Self {
        Self::new(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    pub fn add(&self, other: &OrderElement) -> OrderElement {
        OrderElement { u: &self.u + &other.u, v: &self.v + &other.v }
    }

    pub fn neg(&self) -> OrderElement {
        OrderElement { u: -self.u.clone(), v: -self.v.clone() }
    }

    pub fn max_abs(&self) -> BigInt {
        self.u.abs().max(self.v.abs())
    }
}

impl fmt::Display for OrderElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.v.is_zero() {
            write!(f, "{}", self.u)
        } else {
            write!(f, "[{}, {}]", self.u, self.v)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub curve_id: String,
    pub multiplicity: usize,
    pub order: EndOrder,
}

/// `Π_j E_j^{m_j}` together with its cohomology model.
#[derive(Clone, Debug)]
pub struct AbelianVariety {
    factors: Vec<Factor>,
    coord_factor: Vec<usize>,
    model: CohomologyModel,
}

impl AbelianVariety {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        Self::with_limit(factors, crate::exterior::DEFAULT_MAX_DIM)
    }

    pub fn with_limit(factors: Vec<Factor>, max_dim: usize) -> Result<Self> {
        let mut coord_factor = Vec::new();
        for (k, f) in factors.iter().enumerate() {
            if f.multiplicity == 0 {
                return input(format!("curve {} has multiplicity zero", f.curve_id));
            }
            if factors[..k].iter().any(|g| g.curve_id == f.curve_id) {
                return input(format!("curve {} listed twice", f.curve_id));
            }
            if let EndOrder::Quadratic { t, d } = f.order {
                EndOrder::quadratic(t, d)?;
            }
            coord_factor.extend(std::iter::repeat_n(k, f.multiplicity));
        }
        let model = CohomologyModel::with_limit(coord_factor.len(), max_dim)?;
        Ok(AbelianVariety { factors, coord_factor, model })
    }

    /// `E^m` with the given order.
    pub fn power(curve_id: &str, multiplicity: usize, order: EndOrder) -> Result<Self> {
        Self::new(vec![Factor { curve_id: curve_id.to_string(), multiplicity, order }])
    }

    pub fn n(&self) -> usize {
        self.coord_factor.len()
    }

    pub fn model(&self) -> &CohomologyModel {
        &self.model
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn factor_index(&self, coord: usize) -> usize {
        self.coord_factor[coord]
    }

    pub fn order_of(&self, coord: usize) -> &EndOrder {
        &self.factors[self.coord_factor[coord]].order
    }

    pub fn same_curve(&self, p: usize, q: usize) -> bool {
        self.coord_factor[p] == self.coord_factor[q]
    }

    /// Coordinates belonging to the named curve.
    pub fn coords_of(&self, curve_id: &str) -> Option<Vec<usize>> {
        let k = self.factors.iter().position(|f| f.curve_id == curve_id)?;
        Some((0..self.n()).filter(|&p| self.coord_factor[p] == k).collect())
    }

    pub fn identity(&self) -> EndomorphismMatrix {
        self.multiplication_map(1)
    }

    /// `[m]`, the diagonal matrix with entries `m`.
    pub fn multiplication_map(&self, m: i64) -> EndomorphismMatrix {
        let n = self.n();
        let entries =
            (0..n).map(|p| (0..n).map(|q| OrderElement::integer(if p == q { m } else { 0 })).collect()).collect();
        EndomorphismMatrix { entries }
    }

    /// Rank of `End(X)` as a Z-module.
    pub fn endomorphism_rank(&self) -> usize {
        self.factors.iter().map(|f| f.multiplicity * f.multiplicity * f.order.rank()).sum()
    }
}

/// An endomorphism as an `n × n` matrix of order elements.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EndomorphismMatrix {
    entries: Vec<Vec<OrderElement>>,
}

impl EndomorphismMatrix {
    /// Validates shape, the block structure across curves, and membership in each order.
    pub fn new(x: &AbelianVariety, entries: Vec<Vec<OrderElement>>) -> Result<Self> {
        let n = x.n();
        if entries.len() != n || entries.iter().any(|r| r.len() != n) {
            return input(format!("endomorphism matrix must be {n} x {n}"));
        }
        for (p, row) in entries.iter().enumerate() {
            for (q, e) in row.iter().enumerate() {
                if !x.same_curve(p, q) && !e.is_zero() {
                    return input(format!("entry ({p}, {q}) links non-isogenous curves and must be zero"));
                }
                if !x.order_of(p).contains(e) {
                    return input(format!("entry ({p}, {q}) has an ω-component on a curve with End = Z"));
                }
            }
        }
        Ok(EndomorphismMatrix { entries })
    }

    pub fn from_i64(x: &AbelianVariety, rows: &[Vec<(i64, i64)>]) -> Result<Self> {
        let entries = rows.iter().map(|r| r.iter().map(|&(u, v)| OrderElement::new(u, v)).collect()).collect();
        Self::new(x, entries)
    }

    /// Assembles the matrix from one square block per curve, keyed by curve id.
    pub fn from_blocks(x: &AbelianVariety, blocks: &BTreeMap<String, Vec<Vec<OrderElement>>>) -> Result<Self> {
        let n = x.n();
        let mut entries = vec![vec![OrderElement::zero(); n]; n];
        for id in blocks.keys() {
            if x.coords_of(id).is_none() {
                return input(format!("unknown curve_id {id}"));
            }
        }
        for f in x.factors() {
            let coords = x.coords_of(&f.curve_id).expect("factor coordinates");
            let Some(block) = blocks.get(&f.curve_id) else {
                return input(format!("missing block for curve_id {}", f.curve_id));
            };
            let m = coords.len();
            if block.len() != m || block.iter().any(|r| r.len() != m) {
                return input(format!("block for curve_id {} must be {m} x {m}", f.curve_id));
            }
            for (i, &p) in coords.iter().enumerate() {
                for (j, &q) in coords.iter().enumerate() {
                    entries[p][q] = block[i][j].clone();
                }
            }
        }
        Self::new(x, entries)
    }

    pub fn entries(&self) -> &[Vec<OrderElement>] {
        &self.entries
    }

    pub fn entry(&self, p: usize, q: usize) -> &OrderElement {
        &self.entries[p][q]
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().enumerate().all(|(p, row)| {
            row.iter().enumerate().all(|(q, e)| e.v.is_zero() && if p == q { e.u.is_one() } else { e.u.is_zero() })
        })
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, x: &AbelianVariety, other: &EndomorphismMatrix) -> EndomorphismMatrix {
        let n = self.n();
        let entries = self
            .entries
            .iter()
            .enumerate()
            .map(|(p, row)| {
                let ord = x.order_of(p);
                (0..n)
                    .map(|r| {
                        row.iter().zip(&other.entries).fold(OrderElement::zero(), |acc, (a, b_row)| {
                            let b = &b_row[r];
                            if a.is_zero() || b.is_zero() {
                                acc
                            } else {
                                acc.add(&ord.mul(a, b))
                            }
                        })
                    })
                    .collect()
            })
            .collect();
        EndomorphismMatrix { entries }
    }

    /// `H^1` pullback: the `(q, p)` block of the result is the representation of `F[p][q]`.
    pub fn realize(&self, x: &AbelianVariety) -> Matrix {
        let n = self.n();
        let mut m = Matrix::zeros(2 * n, 2 * n);
        for p in 0..n {
            for q in 0..n {
                let e = &self.entries[p][q];
                if e.is_zero() {
                    continue;
                }
                let rep = x.order_of(p).represent(e);
                for i in 0..2 {
                    for j in 0..2 {
                        m[(2 * q + i, 2 * p + j)] = rep[(i, j)].clone();
                    }
                }
            }
        }
        m
    }

    /// Degree of the map, `det` of its `H^1` pullback; zero for non-isogenies.
    pub fn isogeny_degree(&self, x: &AbelianVariety) -> Rat {
        self.realize(x).det()
    }

    pub fn is_isogeny(&self, x: &AbelianVariety) -> bool {
        !self.isogeny_degree(x).is_zero()
    }

    /// `Some(q)` when `f^*θ = q·θ` with `q > 0`.
    pub fn is_polarized(&self, x: &AbelianVariety) -> Option<Rat> {
        let model = x.model();
        let m = self.realize(x);
        let l2 = crate::exterior::exterior_power_matrix(&m, 2);
        let theta = model.theta().component(2);
        let image = l2.mul_vec(&theta);
        let first = model.index_of(0b11);
        let q = image[first].clone();
        if !q.is_positive() {
            return None;
        }
        image.iter().zip(&theta).all(|(a, b)| *a == &q * b).then_some(q)
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.entries.iter().flatten().map(OrderElement::max_abs).max().unwrap_or_default()
    }
}

impl fmt::Display for EndomorphismMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (p, row) in self.entries.iter().enumerate() {
            if p > 0 {
                write!(f, ", ")?;
            }
            let cells: Vec<String> = row.iter().map(|e| e.to_string()).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;
    use crate::poly::Poly;
    use crate::spectral::char_poly;

    fn gaussian(m: usize) -> AbelianVariety {
        AbelianVariety::power("E", m, EndOrder::Quadratic { t: 0, d: 1 }).unwrap()
    }

    #[test]
    fn non_cm_orders_are_rejected() {
        assert!(EndOrder::quadratic(0, -1).is_err());
        assert!(EndOrder::quadratic(2, 1).is_err());
        assert!(EndOrder::quadratic(1, 1).is_ok());
    }

    #[test]
    fn one_plus_i_on_curve() {
        let x = gaussian(1);
        let phi = EndomorphismMatrix::from_i64(&x, &[vec![(1, 1)]]).unwrap();
        let m = phi.realize(&x);
        assert_eq!(m, Matrix::from_i64(&[vec![1, -1], vec![1, 1]]));
        assert_eq!(char_poly(&m), Poly::from_i64(&[2, -2, 1]));
        assert_eq!(phi.isogeny_degree(&x), rat(2));
    }

    #[test]
    fn multiplication_maps() {
        let x = gaussian(2);
        let f = x.multiplication_map(3);
        assert_eq!(f.realize(&x), Matrix::scalar(4, &rat(3)));
        assert_eq!(f.isogeny_degree(&x), rat(81));
        assert_eq!(f.is_polarized(&x), Some(rat(9)));
        assert!(x.identity().is_identity());
    }

    #[test]
    fn polarization_examples() {
        let x = gaussian(2);
        let phi = EndomorphismMatrix::from_i64(&x, &[vec![(1, 1), (0, 0)], vec![(0, 0), (1, 1)]]).unwrap();
        assert_eq!(phi.is_polarized(&x), Some(rat(2)));
        let shear = EndomorphismMatrix::from_i64(&x, &[vec![(1, 0), (1, 0)], vec![(0, 0), (1, 0)]]).unwrap();
        assert_eq!(shear.isogeny_degree(&x), rat(1));
        assert_eq!(shear.is_polarized(&x), None);
    }

    #[test]
    fn block_structure_is_enforced() {
        let x = AbelianVariety::new(vec![
            Factor { curve_id: "E1".into(), multiplicity: 1, order: EndOrder::Integers },
            Factor { curve_id: "E2".into(), multiplicity: 1, order: EndOrder::Integers },
        ])
        .unwrap();
        assert!(EndomorphismMatrix::from_i64(&x, &[vec![(1, 0), (1, 0)], vec![(0, 0), (1, 0)]]).is_err());
        assert!(EndomorphismMatrix::from_i64(&x, &[vec![(1, 1), (0, 0)], vec![(0, 0), (1, 0)]]).is_err());
    }

    #[test]
    fn composition_reverses_under_realization() {
        let x = AbelianVariety::power("E", 2, EndOrder::Quadratic { t: 1, d: 2 }).unwrap();
        let f = EndomorphismMatrix::from_i64(&x, &[vec![(1, 2), (0, -1)], vec![(3, 0), (-1, 1)]]).unwrap();
        let g = EndomorphismMatrix::from_i64(&x, &[vec![(2, -1), (1, 1)], vec![(0, 2), (1, 0)]]).unwrap();
        let gf = g.compose(&x, &f);
        assert_eq!(gf.realize(&x), f.realize(&x).mul(&g.realize(&x)));
    }

    #[test]
    fn units_of_gaussian_and_eisenstein_orders() {
        assert_eq!(EndOrder::Quadratic { t: 0, d: 1 }.units().len(), 4);
        assert_eq!(EndOrder::Quadratic { t: 1, d: 1 }.units().len(), 6);
        assert_eq!(EndOrder::Integers.units().len(), 2);
    }
}
