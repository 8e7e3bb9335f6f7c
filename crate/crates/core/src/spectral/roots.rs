//! Certified enclosures of the moduli of polynomial roots.
//!
//! Approximations come from Aberth iteration in fixed-point complex
//! arithmetic. They are then certified exactly: with Weierstrass corrections
//! `W_i = P(z_i) / (lc · Π_{j≠i} (z_i − z_j))` the roots of a squarefree `P`
//! are the eigenvalues of `diag(z) − 1·Wᵀ`, so column Gerschgorin disks
//! `D(z_i − W_i, (d − 1)|W_i|)` contain them, and every connected union of
//! `k` disks holds exactly `k` roots.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{input, Error, Result};
use crate::interval::{decimal, sqrt_bounds, sqrt_hi, to_f64, Interval, Rounding};
use crate::linalg::Rat;
use crate::poly::Poly;

pub const START_BITS: u32 = 64;
pub const MAX_BITS: u32 = 4096;

/// A group of overlapping inclusion disks and the moduli it can contain.
#[derive(Clone, Debug)]
pub struct RootCluster {
    pub modulus: Interval,
    /// Number of distinct roots inside the cluster.
    pub size: usize,
    /// Approximate location of the first member, for display only.
    pub center: (f64, f64),
}

#[derive(Clone, Debug)]
pub struct RootEnclosure {
    /// Degree of the squarefree part that was isolated.
    pub distinct_roots: usize,
    pub clusters: Vec<RootCluster>,
    pub precision_bits: u32,
}

impl RootEnclosure {
    /// Enclosure of the largest root modulus; zero when there are no roots.
    pub fn max_modulus(&self) -> Interval {
        let lo = self.clusters.iter().map(|c| c.modulus.lo.clone()).max();
        let hi = self.clusters.iter().map(|c| c.modulus.hi.clone()).max();
        match (lo, hi) {
            (Some(lo), Some(hi)) => Interval::new(lo, hi),
            _ => Interval::point(Rat::zero()),
        }
    }

    /// A single root of the squarefree part is certified to have strictly the largest modulus.
    pub fn strictly_dominant(&self) -> bool {
        let top = self.max_modulus();
        let reaching: Vec<&RootCluster> = self.clusters.iter().filter(|c| c.modulus.hi >= top.lo).collect();
        reaching.len() == 1 && reaching[0].size == 1
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Gauss {
    re: Rat,
    im: Rat,
}

impl Gauss {
    fn zero() -> Self {
        Gauss { re: Rat::zero(), im: Rat::zero() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn sub(&self, o: &Gauss) -> Gauss {
        Gauss { re: &self.re - &o.re, im: &self.im - &o.im }
    }
    fn mul(&self, o: &Gauss) -> Gauss {
        Gauss { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }
    fn norm_sq(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }
    fn div(&self, o: &Gauss) -> Gauss {
        let n = o.norm_sq();
        Gauss { re: (&self.re * &o.re + &self.im * &o.im) / &n, im: (&self.im * &o.re - &self.re * &o.im) / &n }
    }
}

/// Fixed-point complex number with an implicit scale of `2^p`.
#[derive(Clone, Debug)]
struct Fx {
    re: BigInt,
    im: BigInt,
}

impl Fx {
    fn mul(&self, o: &Fx, p: u32) -> Fx {
        Fx {
            re: (&self.re * &o.re - &self.im * &o.im) >> p as usize,
            im: (&self.re * &o.im + &self.im * &o.re) >> p as usize,
        }
    }
    fn div(&self, o: &Fx, p: u32) -> Option<Fx> {
        let den = &o.re * &o.re + &o.im * &o.im;
        if den.is_zero() {
            return None;
        }
        Some(Fx {
            re: ((&self.re * &o.re + &self.im * &o.im) << p as usize) / &den,
            im: ((&self.im * &o.re - &self.re * &o.im) << p as usize) / &den,
        })
    }
    fn sub(&self, o: &Fx) -> Fx {
        Fx { re: &self.re - &o.re, im: &self.im - &o.im }
    }
    fn add(&self, o: &Fx) -> Fx {
        Fx { re: &self.re + &o.re, im: &self.im + &o.im }
    }
    fn bits(&self) -> u64 {
        self.re.abs().max(self.im.abs()).bits()
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn to_gauss(&self, p: u32) -> Gauss {
        let den = BigInt::one() << p as usize;
        Gauss { re: Rat::new(self.re.clone(), den.clone()), im: Rat::new(self.im.clone(), den) }
    }
}

fn log2_abs(x: &BigInt) -> f64 {
    let b = x.bits();
    if b <= 1000 {
        return x.abs().to_f64().unwrap_or(f64::MAX).log2();
    }
    let shift = b - 60;
    let top = (x.abs() >> shift as usize).to_f64().unwrap_or(1.0);
    top.log2() + shift as f64
}

/// Primitive integer coefficients of a nonzero rational polynomial.
fn integer_coeffs(p: &Poly) -> Vec<BigInt> {
    let lcm = p.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p.coeffs().iter().map(|c| (c * Rat::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    ints.into_iter().map(|c| c / &g).collect()
}

fn horner_gauss(c: &[BigInt], z: &Gauss) -> Gauss {
    let mut acc = Gauss::zero();
    for ck in c.iter().rev() {
        acc = acc.mul(z);
        acc.re += Rat::from_integer(ck.clone());
    }
    acc
}

fn aberth(c: &[BigInt], zs: &mut [Fx], p: u32, max_iter: usize) -> bool {
    let d = c.len() - 1;
    let scaled: Vec<BigInt> = c.iter().map(|x| x << p as usize).collect();
    for _ in 0..max_iter {
        let mut converged = true;
        for i in 0..d {
            let z = zs[i].clone();
            let mut val = Fx { re: scaled[d].clone(), im: BigInt::zero() };
            let mut der = Fx { re: BigInt::zero(), im: BigInt::zero() };
            for ck in scaled[..d].iter().rev() {
                der = der.mul(&z, p).add(&val);
                val = val.mul(&z, p);
                val.re += ck;
            }
            if val.is_zero() {
                continue;
            }
            let Some(ratio) = val.div(&der, p) else {
                // nudge off a critical point
                zs[i].re += BigInt::one() << (p as usize / 2);
                converged = false;
                continue;
            };
            let mut sum = Fx { re: BigInt::zero(), im: BigInt::zero() };
            for (j, zj) in zs.iter().enumerate() {
                if j == i {
                    continue;
                }
                let diff = z.sub(zj);
                let one = Fx { re: BigInt::one() << p as usize, im: BigInt::zero() };
                if let Some(inv) = one.div(&diff, p) {
                    sum = sum.add(&inv);
                }
            }
            let one = Fx { re: BigInt::one() << p as usize, im: BigInt::zero() };
            let denom = one.sub(&ratio.mul(&sum, p));
            let step = ratio.div(&denom, p).unwrap_or(ratio);
            let zbits = z.bits().saturating_sub(p as u64);
            if step.bits() > 16 + zbits {
                converged = false;
            }
            zs[i] = z.sub(&step);
        }
        if converged {
            return true;
        }
    }
    false
}

fn initial_points(c: &[BigInt], p: u32) -> Vec<Fx> {
    let d = c.len() - 1;
    let lead = log2_abs(&c[d]);
    let mut log_r = f64::NEG_INFINITY;
    for k in 1..=d {
        if !c[d - k].is_zero() {
            log_r = log_r.max((log2_abs(&c[d - k]) - lead) / k as f64);
        }
    }
    let log_r = (log_r + 1.0).clamp(-60.0, 900.0);
    (0..d)
        .map(|k| {
            let angle = std::f64::consts::TAU * k as f64 / d as f64 + 0.7;
            let scale = 2f64.powf(log_r + 40.0);
            let re = BigInt::from_f64(scale * angle.cos()).unwrap_or_default();
            let im = BigInt::from_f64(scale * angle.sin()).unwrap_or_default();
            let shift = p as i64 - 40;
            if shift >= 0 {
                Fx { re: re << shift as usize, im: im << shift as usize }
            } else {
                Fx { re: re >> (-shift) as usize, im: im >> (-shift) as usize }
            }
        })
        .collect()
}

fn round_div(num: &BigInt, den: &BigInt) -> BigInt {
    let (q, r) = num.div_mod_floor(den);
    if &(r * 2) >= den {
        q + 1
    } else {
        q
    }
}

/// Replaces an approximation by a nearby exact Gaussian-rational root with
/// denominator dividing the leading coefficient, when one exists.
fn snap(c: &[BigInt], z: &Fx, p: u32) -> Gauss {
    let lead = c.last().unwrap().abs();
    let den = (BigInt::one() << p as usize) * &lead;
    let re = round_div(&(&z.re * &lead * &lead), &den);
    let im = round_div(&(&z.im * &lead * &lead), &den);
    let cand = Gauss { re: Rat::new(re, lead.clone()), im: Rat::new(im, lead) };
    if horner_gauss(c, &cand).is_zero() {
        cand
    } else {
        z.to_gauss(p)
    }
}

struct Disk {
    center: Gauss,
    radius: Rat,
}

fn certify(c: &[BigInt], zs: &[Gauss], bits: u32) -> Option<Vec<RootCluster>> {
    let d = c.len() - 1;
    let lead = Rat::from_integer(c[d].clone());
    let mut disks = Vec::with_capacity(d);
    for (i, z) in zs.iter().enumerate() {
        let val = horner_gauss(c, z);
        if val.is_zero() {
            disks.push(Disk { center: z.clone(), radius: Rat::zero() });
            continue;
        }
        let mut prod = Gauss { re: lead.clone(), im: Rat::zero() };
        for (j, zj) in zs.iter().enumerate() {
            if j != i {
                prod = prod.mul(&z.sub(zj));
            }
        }
        if prod.is_zero() {
            return None;
        }
        let w = val.div(&prod);
        let radius = sqrt_hi(&w.norm_sq(), bits) * Rat::from_integer(BigInt::from(d - 1));
        disks.push(Disk { center: z.sub(&w), radius });
    }
    // union-find over overlapping disks
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..d {
        for j in i + 1..d {
            let reach = &disks[i].radius + &disks[j].radius;
            if disks[i].center.sub(&disks[j].center).norm_sq() <= &reach * &reach {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..d {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|(root, _)| *root == r) {
            Some((_, members)) => members.push(i),
            None => groups.push((r, vec![i])),
        }
    }
    let clusters = groups
        .into_iter()
        .map(|(_, members)| {
            let mut lo: Option<Rat> = None;
            let mut hi: Option<Rat> = None;
            for &i in &members {
                let (mlo, mhi) = sqrt_bounds(&disks[i].center.norm_sq(), bits);
                let l = (mlo - &disks[i].radius).max(Rat::zero());
                let h = mhi + &disks[i].radius;
                lo = Some(lo.map_or(l.clone(), |x| x.min(l)));
                hi = Some(hi.map_or(h.clone(), |x| x.max(h)));
            }
            let first = &disks[members[0]].center;
            RootCluster {
                modulus: Interval::new(lo.unwrap(), hi.unwrap()),
                size: members.len(),
                center: (to_f64(&first.re), to_f64(&first.im)),
            }
        })
        .collect();
    Some(clusters)
}

fn tol_bits(tol: &Rat) -> u32 {
    // smallest b with 2^-b <= tol
    let mut b = 0u32;
    let mut x = tol.clone();
    while x < Rat::one() {
        x *= Rat::from_integer(BigInt::from(2));
        b += 1;
    }
    b
}

/// Encloses the moduli of all distinct roots of `poly`, refining until every
/// cluster interval is no wider than `tol`.
pub fn enclose_roots(poly: &Poly, tol: &Rat) -> Result<RootEnclosure> {
    if poly.is_zero() {
        return input("cannot isolate the roots of the zero polynomial");
    }
    if !tol.is_positive() {
        return input("tolerance must be positive");
    }
    let sq = poly.squarefree_part();
    let mut c = integer_coeffs(&sq);
    let mut clusters = Vec::new();
    let distinct = c.len() - 1;
    if distinct > 0 && c[0].is_zero() {
        clusters.push(RootCluster { modulus: Interval::point(Rat::zero()), size: 1, center: (0.0, 0.0) });
        c.remove(0);
    }
    let d = c.len() - 1;
    let bits_needed = tol_bits(tol) + 8;
    if d == 0 {
        return Ok(RootEnclosure { distinct_roots: distinct, clusters, precision_bits: 0 });
    }
    if d == 1 {
        let root = Rat::new(-c[0].clone(), c[1].clone());
        clusters.push(RootCluster { modulus: Interval::point(root.abs()), size: 1, center: (to_f64(&root), 0.0) });
        return Ok(RootEnclosure { distinct_roots: distinct, clusters, precision_bits: 0 });
    }
    let mut p = START_BITS;
    let mut zs = initial_points(&c, p);
    loop {
        let converged = aberth(&c, &mut zs, p, 400 + 20 * d);
        if converged {
            let approx: Vec<Gauss> = zs.iter().map(|z| snap(&c, z, p)).collect();
            let bits = p.max(bits_needed) + 8;
            if let Some(found) = certify(&c, &approx, bits) {
                if found.iter().all(|cl| cl.modulus.width() <= *tol) {
                    clusters.extend(found);
                    return Ok(RootEnclosure { distinct_roots: distinct, clusters, precision_bits: p });
                }
            }
        }
        if p >= MAX_BITS {
            return Err(Error::Precision { bits: MAX_BITS, tol: decimal(tol, 6, Rounding::Nearest) });
        }
        let next = (p * 2).min(MAX_BITS);
        let shift = (next - p) as usize;
        for z in zs.iter_mut() {
            z.re = &z.re << shift;
            z.im = &z.im << shift;
        }
        p = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, ratio};

    fn tol() -> Rat {
        ratio(1, 1_000_000_000)
    }

    #[test]
    fn gaussian_roots_snap_exactly() {
        // x^2 - 2x + 2 = (x - 1 - i)(x - 1 + i)
        let e = enclose_roots(&Poly::from_i64(&[2, -2, 1]), &tol()).unwrap();
        let r = e.max_modulus();
        assert!(&r.lo * &r.lo <= rat(2));
        assert!(&r.hi * &r.hi >= rat(2));
        assert!(r.width() <= tol());
    }

    #[test]
    fn repeated_roots_use_the_squarefree_part() {
        let p = Poly::from_i64(&[-3, 1]).pow(4);
        let e = enclose_roots(&p, &tol()).unwrap();
        assert_eq!(e.max_modulus(), Interval::point(rat(3)));
    }

    #[test]
    fn zero_root_is_exact() {
        let p = Poly::from_i64(&[0, 0, -4, 1]);
        let e = enclose_roots(&p, &tol()).unwrap();
        assert_eq!(e.clusters.len(), 2);
        assert_eq!(e.max_modulus(), Interval::point(rat(4)));
    }

    #[test]
    fn cubic_with_irrational_real_root() {
        // x^3 - 2 has three roots of modulus 2^(1/3)
        let e = enclose_roots(&Poly::from_i64(&[-2, 0, 0, 1]), &tol()).unwrap();
        let r = e.max_modulus();
        let cube = |x: &Rat| x * x * x;
        assert!(cube(&r.lo) <= rat(2) && cube(&r.hi) >= rat(2));
        assert_eq!(e.clusters.iter().map(|c| c.size).sum::<usize>(), 3);
    }

    #[test]
    fn large_degree_cyclotomic() {
        // x^12 - 1: all roots on the unit circle, several exact
        let mut c = vec![0i64; 13];
        c[0] = -1;
        c[12] = 1;
        let e = enclose_roots(&Poly::from_i64(&c), &tol()).unwrap();
        for cl in &e.clusters {
            assert!(cl.modulus.contains(&rat(1)));
        }
        assert_eq!(e.distinct_roots, 12);
    }
}
