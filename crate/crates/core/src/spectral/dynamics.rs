//! Dynamical degrees of correspondences and the checks comparing them.

use num_traits::{Signed, Zero};

use crate::abelian::AbelianVariety;
use crate::correspondence::{Correspondence, GradedAction};
use crate::error::{input, Error, Result};
use crate::exterior::CohomologyModel;
use crate::interval::{sqrt_lo, to_f64, Interval};
use crate::linalg::{ratio, Matrix, Rat};
use crate::numerics::{build_nk, induced_action_from, NumericalLattice};
use crate::spectral::recurrence::{berlekamp_massey, LinearRecurrence};
use crate::spectral::{enclose_roots, spectral_radius};

/// Default relative tolerance when comparing dynamical degrees computed two ways.
pub fn default_rel_tol() -> Rat {
    ratio(1, 1_000_000)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
    /// A deliberate negative control that failed as intended.
    ExpectedFail,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
            Verdict::ExpectedFail => "expected_fail",
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// `χ_i(c)`, the spectral radius of the pullback on `H^i`.
pub fn chi(x: &AbelianVariety, c: &Correspondence, i: usize, tol: &Rat) -> Result<Interval> {
    chi_of_action(&c.graded_action(x), i, tol)
}

pub fn chi_of_action(action: &GradedAction, i: usize, tol: &Rat) -> Result<Interval> {
    if i >= action.degrees.len() {
        return input(format!("cohomological degree {i} out of range"));
    }
    spectral_radius(action.degree(i), tol)
}

#[derive(Clone, Debug)]
pub struct GrowthEstimate {
    /// `deg_k(c^{∘m})` for `m = 1, …, m_max`.
    pub sequence: Vec<Rat>,
    pub recurrence: LinearRecurrence,
    pub dominant_modulus: Interval,
    /// The sequence vanished identically.
    pub degenerate: bool,
    /// `s_{m_max} / s_{m_max − 1}` in floating point, when defined.
    pub ratio_tail: Option<f64>,
    /// One simple characteristic root strictly dominates, so the ratios converge to it.
    pub strictly_dominant: bool,
}

/// `deg_k` of the iterates `c^{∘1}, …, c^{∘m_max}`, from powers of the pullback on `H^{2k}`.
pub fn degree_iterates(model: &CohomologyModel, action: &GradedAction, k: usize, m_max: usize) -> Vec<Rat> {
    let n = model.n();
    let a = action.degree(2 * k);
    let rest = model.theta_power(n - k).component(2 * n - 2 * k);
    let mut v = model.theta_power(k).component(2 * k);
    (0..m_max)
        .map(|_| {
            v = a.mul_vec(&v);
            model.pair_vectors(2 * k, &v, &rest)
        })
        .collect()
}

/// Growth rate of `deg_k(c^{∘m})` from its minimal linear recurrence.
pub fn lambda_growth(
    x: &AbelianVariety,
    c: &Correspondence,
    k: usize,
    m_max: usize,
    tol: &Rat,
) -> Result<GrowthEstimate> {
    lambda_growth_of_action(x.model(), &c.graded_action(x), k, m_max, tol)
}

pub fn lambda_growth_of_action(
    model: &CohomologyModel,
    action: &GradedAction,
    k: usize,
    m_max: usize,
    tol: &Rat,
) -> Result<GrowthEstimate> {
    if m_max < 4 {
        return input("m_max must be at least 4");
    }
    if k > model.n() {
        return input(format!("codimension {k} exceeds dimension {}", model.n()));
    }
    let sequence = degree_iterates(model, action, k, m_max);
    let recurrence = berlekamp_massey(&sequence);
    let order = recurrence.order();
    if 2 * order + 1 > sequence.len() || !recurrence.reproduces(&sequence) {
        return Err(Error::RecurrenceUnstable { order, terms: sequence.len() });
    }
    let degenerate = order == 0;
    let (dominant_modulus, strictly_dominant) = if degenerate {
        (Interval::point(Rat::zero()), false)
    } else {
        let poly = recurrence.characteristic_poly();
        let enc = enclose_roots(&poly, tol)?;
        // repeated roots are merged by the enclosure, so require a squarefree polynomial
        let simple = Some(enc.distinct_roots) == poly.degree();
        (enc.max_modulus(), simple && enc.strictly_dominant())
    };
    let ratio_tail = match &sequence[m_max - 2..] {
        [a, b] if !a.is_zero() => Some(to_f64(&(b / a))),
        _ => None,
    };
    Ok(GrowthEstimate { sequence, recurrence, dominant_modulus, degenerate, ratio_tail, strictly_dominant })
}

#[derive(Clone, Debug)]
pub struct NumericalDegree {
    pub radius: Interval,
    pub matrix: Matrix,
    pub dimension: usize,
    pub saturation_events: usize,
}

/// `λ_k(c)` as the spectral radius of the pullback on `N^k`.
pub fn lambda_numerical(x: &AbelianVariety, c: &Correspondence, k: usize, tol: &Rat) -> Result<NumericalDegree> {
    let lattice = build_nk(x, k)?;
    lambda_numerical_with(x.model(), &c.graded_action(x), &lattice, tol)
}

pub fn lambda_numerical_with(
    model: &CohomologyModel,
    action: &GradedAction,
    lattice: &NumericalLattice,
    tol: &Rat,
) -> Result<NumericalDegree> {
    let induced = induced_action_from(model, action, lattice);
    let radius = spectral_radius(&induced.matrix, tol)?;
    Ok(NumericalDegree {
        radius,
        dimension: induced.lattice.dimension,
        saturation_events: induced.saturation_events,
        matrix: induced.matrix,
    })
}

#[derive(Clone, Debug)]
pub struct DdcOutcome {
    pub k: usize,
    pub chi: Interval,
    pub lambda_numerical: Interval,
    pub lambda_growth: Interval,
    pub saturation_events: usize,
    /// Floating ratio of the last two iterated degrees.
    pub ratio_tail: Option<f64>,
    pub strictly_dominant: bool,
    /// `ρ(N^k) ≤ ρ(H^{2k})` up to tolerance.
    pub easy_direction: bool,
    pub verdict: Verdict,
}

#[derive(Clone, Debug)]
pub struct CheckParams {
    pub tol: Rat,
    pub rel_tol: Rat,
    pub m_max: usize,
}

impl Default for CheckParams {
    fn default() -> Self {
        CheckParams { tol: crate::spectral::default_tol(), rel_tol: default_rel_tol(), m_max: 40 }
    }
}

/// Compares `χ_{2k}`, `λ_k` on `N^k`, and the growth rate of `deg_k`.
pub fn ddc_check(x: &AbelianVariety, c: &Correspondence, k: usize, params: &CheckParams) -> Result<DdcOutcome> {
    let action = c.graded_action(x);
    let lattice = build_nk(x, k)?;
    ddc_check_with(x.model(), &action, &lattice, k, params)
}

pub fn ddc_check_with(
    model: &CohomologyModel,
    action: &GradedAction,
    lattice: &NumericalLattice,
    k: usize,
    params: &CheckParams,
) -> Result<DdcOutcome> {
    let chi = chi_of_action(action, 2 * k, &params.tol)?;
    let num = lambda_numerical_with(model, action, lattice, &params.tol)?;
    let growth = lambda_growth_of_action(model, action, k, params.m_max, &params.tol)?;
    let agree = |a: &Interval, b: &Interval| a.agrees(b, &params.tol, &params.rel_tol);
    let all_agree = agree(&chi, &num.radius)
        && agree(&chi, &growth.dominant_modulus)
        && agree(&num.radius, &growth.dominant_modulus);
    let easy_direction = num.radius.lo <= &chi.hi + &params.tol;
    let verdict = if all_agree && easy_direction {
        Verdict::Pass
    } else if num.saturation_events > 0 {
        Verdict::Inconclusive
    } else {
        Verdict::Fail
    };
    Ok(DdcOutcome {
        k,
        chi,
        lambda_numerical: num.radius,
        lambda_growth: growth.dominant_modulus,
        saturation_events: num.saturation_events,
        ratio_tail: growth.ratio_tail,
        strictly_dominant: growth.strictly_dominant,
        easy_direction,
        verdict,
    })
}

#[derive(Clone, Debug)]
pub struct DinhOutcome {
    pub k: usize,
    pub chi_odd: Interval,
    pub lambda_k: Interval,
    pub lambda_k1: Interval,
    /// Certified lower bound on `sqrt(λ_k λ_{k+1}) − χ_{2k+1}`.
    pub slack: Rat,
    pub verdict: Verdict,
}

/// `χ_{2k+1} ≤ sqrt(λ_k · λ_{k+1})` with certified slack at least `−tol`.
pub fn dinh_check(x: &AbelianVariety, c: &Correspondence, k: usize, tol: &Rat) -> Result<DinhOutcome> {
    if k + 1 > x.n() {
        return input(format!("k must be below the dimension {}", x.n()));
    }
    let action = c.graded_action(x);
    let lk = build_nk(x, k)?;
    let lk1 = build_nk(x, k + 1)?;
    dinh_check_with(x.model(), &action, &lk, &lk1, tol)
}

pub fn dinh_check_with(
    model: &CohomologyModel,
    action: &GradedAction,
    lattice_k: &NumericalLattice,
    lattice_k1: &NumericalLattice,
    tol: &Rat,
) -> Result<DinhOutcome> {
    let k = lattice_k.k;
    // enclosures tighter than the reported tolerance keep equality cases inside it
    let inner = tol / Rat::from_integer(64.into());
    let chi_odd = chi_of_action(action, 2 * k + 1, &inner)?;
    let lambda_k = lambda_numerical_with(model, action, lattice_k, &inner)?.radius;
    let lambda_k1 = lambda_numerical_with(model, action, lattice_k1, &inner)?.radius;
    let product = &lambda_k.lo * &lambda_k1.lo;
    let bits = 64 + crate::interval::floor(&(Rat::from_integer(1.into()) / &inner)).bits() as u32;
    let slack = sqrt_lo(&product, bits) - &chi_odd.hi;
    let verdict = Verdict::from_bool(slack >= -tol.clone());
    Ok(DinhOutcome { k, chi_odd, lambda_k, lambda_k1, slack, verdict })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceRatios {
    /// `|Tr A_{2k}| / deg_k` for `k = 0, …, n`.
    pub even: Vec<Rat>,
    /// `Tr(A_{2k+1})² / (deg_k · deg_{k+1})` for `k = 0, …, n − 1`.
    pub odd_squared: Vec<Rat>,
}

impl TraceRatios {
    /// Largest ratio, odd ratios taken as square roots (lower bound).
    pub fn max_f64(&self) -> f64 {
        let e = self.even.iter().map(to_f64).fold(0.0, f64::max);
        let o = self.odd_squared.iter().map(|x| to_f64(x).sqrt()).fold(0.0, f64::max);
        e.max(o)
    }
}

pub fn trace_bound_ratios(x: &AbelianVariety, c: &Correspondence) -> Result<TraceRatios> {
    trace_bound_ratios_of_action(x.model(), &c.graded_action(x))
}

pub fn trace_bound_ratios_of_action(model: &CohomologyModel, action: &GradedAction) -> Result<TraceRatios> {
    let degs = action.degree_sequence(model).values;
    if let Some(k) = degs.iter().position(|d| !d.is_positive()) {
        return Err(Error::Degenerate(format!("deg_{k} is not positive")));
    }
    let n = model.n();
    let even = (0..=n).map(|k| action.degree(2 * k).trace().abs() / &degs[k]).collect();
    let odd_squared = (0..n)
        .map(|k| {
            let t = action.degree(2 * k + 1).trace();
            &t * &t / (&degs[k] * &degs[k + 1])
        })
        .collect();
    Ok(TraceRatios { even, odd_squared })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormRatios {
    /// `‖A_{2k}‖ / ‖N^k‖`.
    pub even: Rat,
    /// `‖A_{2k+1}‖² / (‖N^k‖ · ‖N^{k+1}‖)`, absent for `k = n`.
    pub odd_squared: Option<Rat>,
}

/// Max-entry norm ratios between cohomological and numerical pullbacks.
pub fn norm_comparison_ratios(x: &AbelianVariety, c: &Correspondence, k: usize) -> Result<NormRatios> {
    let n = x.n();
    if k > n {
        return input(format!("codimension {k} exceeds dimension {n}"));
    }
    let model = x.model();
    let action = c.graded_action(x);
    let norm_n = |j: usize| -> Result<Rat> {
        let lat = build_nk(x, j)?;
        Ok(induced_action_from(model, &action, &lat).matrix.max_abs_entry())
    };
    let nk = norm_n(k)?;
    if nk.is_zero() {
        return Err(Error::Degenerate(format!("pullback on N^{k} vanishes")));
    }
    let even = action.degree(2 * k).max_abs_entry() / &nk;
    let odd_squared = if k < n {
        let nk1 = norm_n(k + 1)?;
        if nk1.is_zero() {
            return Err(Error::Degenerate(format!("pullback on N^{} vanishes", k + 1)));
        }
        let h = action.degree(2 * k + 1).max_abs_entry();
        Some(&h * &h / (&nk * &nk1))
    } else {
        None
    };
    Ok(NormRatios { even, odd_squared })
}
