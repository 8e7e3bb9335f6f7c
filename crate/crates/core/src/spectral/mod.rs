//! Characteristic and minimal polynomials, certified spectral radii, and the
//! Weil and semisimplicity checks built on them.

pub mod dynamics;
pub mod logconcave;
pub mod recurrence;
pub mod roots;

use num_traits::{One, Signed, Zero};

use crate::error::{input, Result};
use crate::interval::{sqrt_bounds, Interval};
use crate::linalg::{ratio, Echelon, Matrix, Rat};
use crate::poly::Poly;

pub use roots::{enclose_roots, RootCluster, RootEnclosure};

/// Default absolute tolerance on root moduli, `10^-9`.
pub fn default_tol() -> Rat {
    ratio(1, 1_000_000_000)
}

/// Similarity transform to upper Hessenberg form by elimination with pivoting.
pub fn hessenberg(m: &Matrix) -> Matrix {
    assert!(m.is_square(), "Hessenberg form of a non-square matrix");
    let n = m.rows();
    let mut h = m.clone();
    for col in 0..n.saturating_sub(2) {
        let piv = col + 1;
        let Some(r) = (piv..n).find(|&r| !h[(r, col)].is_zero()) else {
            continue;
        };
        if r != piv {
            h.swap_rows(r, piv);
            h.swap_cols(r, piv);
        }
        for r in piv + 1..n {
            if h[(r, col)].is_zero() {
                continue;
            }
            let u = &h[(r, col)] / &h[(piv, col)];
            for c in 0..n {
                let x = &u * &h[(piv, c)];
                h[(r, c)] -= x;
            }
            for row in 0..n {
                let x = &u * &h[(row, r)];
                h[(row, piv)] += x;
            }
        }
    }
    h
}

/// `det(xI − M)`, via the Hessenberg recurrence.
pub fn char_poly(m: &Matrix) -> Poly {
    let n = m.rows();
    let h = hessenberg(m);
    let mut p: Vec<Poly> = vec![Poly::one()];
    for k in 0..n {
        let mut next = Poly::x().sub(&Poly::constant(h[(k, k)].clone())).mul(&p[k]);
        let mut t = Rat::one();
        for i in 1..=k {
            t *= &h[(k - i + 1, k - i)];
            if t.is_zero() {
                break;
            }
            let coeff = &h[(k - i, k)] * &t;
            if !coeff.is_zero() {
                next = next.sub(&p[k - i].scale(&coeff));
            }
        }
        p.push(next);
    }
    p.pop().unwrap()
}

/// Minimal polynomial, as the least common multiple of the minimal
/// polynomials of the standard basis vectors.
pub fn min_poly(m: &Matrix) -> Poly {
    let n = m.rows();
    let mut acc = Poly::one();
    for j in 0..n {
        let mut e = vec![Rat::zero(); n];
        e[j] = Rat::one();
        let mut ech = Echelon::new(n);
        let mut v = e;
        let local = loop {
            if let Some(coords) = ech.coordinates(&v) {
                let mut c: Vec<Rat> = coords.into_iter().map(|x| -x).collect();
                c.push(Rat::one());
                break Poly::new(c);
            }
            ech.insert(&v);
            v = m.mul_vec(&v);
        };
        if !local.divides(&acc) {
            acc = acc.lcm(&local);
        }
    }
    acc
}

/// Diagonalizable over the algebraic closure, i.e. the minimal polynomial is squarefree.
pub fn is_semisimple(m: &Matrix) -> bool {
    let p = min_poly(m);
    p.degree().unwrap_or(0) == 0 || p.is_squarefree()
}

/// Certified enclosure of the spectral radius, no wider than `tol`.
pub fn spectral_radius(m: &Matrix, tol: &Rat) -> Result<Interval> {
    if !m.is_square() {
        return input("spectral radius of a non-square matrix");
    }
    if m.rows() == 0 {
        return Ok(Interval::point(Rat::zero()));
    }
    Ok(enclose_roots(&char_poly(m), tol)?.max_modulus())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeilVerdict {
    pub q: Rat,
    pub weight: usize,
    pub functional_equation_ok: bool,
    pub moduli_ok: bool,
}

impl WeilVerdict {
    pub fn passed(&self) -> bool {
        self.functional_equation_ok && self.moduli_ok
    }
}

#[derive(Clone, Debug)]
pub struct SpectralReport {
    pub char_poly: Poly,
    pub min_poly: Poly,
    pub radius: Interval,
    pub semisimple: bool,
    pub weil: Option<WeilVerdict>,
}

pub fn spectral_report(m: &Matrix, tol: &Rat, weil: Option<(&Rat, usize)>) -> Result<SpectralReport> {
    let cp = char_poly(m);
    let mp = min_poly(m);
    let radius = if m.rows() == 0 { Interval::point(Rat::zero()) } else { enclose_roots(&cp, tol)?.max_modulus() };
    let semisimple = mp.degree().unwrap_or(0) == 0 || mp.is_squarefree();
    let weil = match weil {
        Some((q, i)) => Some(weil_check_poly(&cp, q, i, tol)?),
        None => None,
    };
    Ok(SpectralReport { char_poly: cp, min_poly: mp, radius, semisimple, weil })
}

/// Exact functional equation `x^b P(q^i / x) = ±q^{ib/2} P(x)`.
pub fn weil_functional_equation(p: &Poly, q: &Rat, i: usize) -> bool {
    let Some(b) = p.degree() else {
        return false;
    };
    let p = p.monic();
    let qi = num_traits::pow(q.clone(), i);
    let p0 = p.coeff(0);
    let twisted = p.twisted_reversal(&qi);
    twisted == p.scale(&p0) && &p0 * &p0 == num_traits::pow(qi, b)
}

pub fn weil_check_poly(p: &Poly, q: &Rat, i: usize, tol: &Rat) -> Result<WeilVerdict> {
    if !q.is_positive() {
        return input("q must be positive");
    }
    let functional_equation_ok = weil_functional_equation(p, q, i);
    let target = num_traits::pow(q.clone(), i);
    let (t_lo, t_hi) = sqrt_bounds(&target, 96);
    let moduli_ok = if p.degree().unwrap_or(0) == 0 {
        true
    } else {
        let enc = enclose_roots(p, tol)?;
        enc.clusters.iter().all(|c| c.modulus.lo >= &t_lo - tol && c.modulus.hi <= &t_hi + tol)
    };
    Ok(WeilVerdict { q: q.clone(), weight: i, functional_equation_ok, moduli_ok })
}

/// Both Weil conditions for the action `m` on `H^i`.
pub fn weil_check(m: &Matrix, q: &Rat, i: usize, tol: &Rat) -> Result<WeilVerdict> {
    weil_check_poly(&char_poly(m), q, i, tol)
}
