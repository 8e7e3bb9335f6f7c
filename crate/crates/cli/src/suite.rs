//! Seeded stress suites. Samples are evaluated in parallel and the records
//! assembled in sample-id order.

use std::collections::BTreeMap;
use std::time::Instant;

use corrdyn::correspondence::{apply_gr, gr_correspondence, intersect, lieberman_pushforward};
use corrdyn::exterior::{exterior_powers, pushforward_matrices};
use corrdyn::linalg::binomial;
use corrdyn::numerics::{build_nk, NumericalLattice};
use corrdyn::spectral::dynamics::{
    ddc_check_with, dinh_check_with, norm_comparison_ratios, trace_bound_ratios_of_action, CheckParams,
};
use corrdyn::spectral::logconcave::{dyadic_grid, reduction_oracle};
use corrdyn::spectral::{default_tol, is_semisimple, weil_check};
use corrdyn::{rat, ratio, AbelianVariety, Correspondence, GradedAction, Rat, Verdict};
use num_traits::{Signed, Zero};
use rand::Rng;
use rayon::prelude::*;

use crate::config::VarietyConfig;
use crate::report::{Record, Report, Value};
use crate::sampling::{unipotent_control, Sampler};

pub const SUITES: [&str; 11] = [
    "ddc",
    "gwrh",
    "semisimple",
    "dinh",
    "logconcave",
    "gr_identity",
    "trace_bounds",
    "boundedness",
    "lieberman",
    "castelnuovo_severi",
    "norm_ratios",
];

/// Radii used by the `G_r` identity suite.
pub fn gr_radii() -> Vec<Rat> {
    vec![ratio(1, 2), rat(2), ratio(3, 5)]
}

/// Iterates compared by the trace-bound suite, and the window split.
pub const TRACE_ITERATES: u32 = 30;
pub const TRACE_SPLIT: u32 = 15;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SuiteError {
    #[error("unknown suite '{0}'; expected one of {}", SUITES.join(", "))]
    UnknownSuite(String),
    #[error("parameter out of range: {0}")]
    Param(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteParams {
    pub samples: usize,
    /// Bound on `|u|, |v|` for random entries `u + vω`.
    pub entry_bound: i64,
    pub word_len: usize,
    pub max_terms: usize,
    pub coeff_set: Vec<Rat>,
    pub m_max: usize,
    pub tol: Rat,
    pub rel_tol: Rat,
    /// Record wall-clock runtimes; off gives byte-identical reports.
    pub timing: bool,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            samples: 100,
            entry_bound: 3,
            word_len: 2,
            max_terms: 2,
            coeff_set: vec![rat(1), rat(2), ratio(1, 2)],
            m_max: 40,
            tol: default_tol(),
            rel_tol: corrdyn::spectral::dynamics::default_rel_tol(),
            timing: true,
        }
    }
}

impl SuiteParams {
    pub fn validate(&self) -> Result<(), SuiteError> {
        let p = |m: String| Err(SuiteError::Param(m));
        if self.samples > 100_000 {
            return p(format!("samples = {} exceeds 100000", self.samples));
        }
        if !(1..=10).contains(&self.entry_bound) {
            return p(format!("entry_bound = {} not in 1..=10", self.entry_bound));
        }
        if !(1..=6).contains(&self.word_len) {
            return p(format!("word_len = {} not in 1..=6", self.word_len));
        }
        if !(1..=4).contains(&self.max_terms) {
            return p(format!("max_terms = {} not in 1..=4", self.max_terms));
        }
        if self.coeff_set.is_empty() || self.coeff_set.iter().any(|c| !c.is_positive()) {
            return p("coeff_set must be nonempty and positive".into());
        }
        if !(4..=200).contains(&self.m_max) {
            return p(format!("m_max = {} not in 4..=200", self.m_max));
        }
        if !self.tol.is_positive() || !self.rel_tol.is_positive() {
            return p("tolerances must be positive".into());
        }
        Ok(())
    }

    fn check_params(&self) -> CheckParams {
        CheckParams { tol: self.tol.clone(), rel_tol: self.rel_tol.clone(), m_max: self.m_max }
    }

    /// Parameters as recorded in the report.
    pub fn to_map(&self) -> BTreeMap<String, serde_json::Value> {
        use serde_json::json;
        let mut m = BTreeMap::new();
        m.insert("samples".into(), json!(self.samples));
        m.insert("entry_bound".into(), json!(self.entry_bound));
        m.insert("word_len".into(), json!(self.word_len));
        m.insert("max_terms".into(), json!(self.max_terms));
        m.insert("coeff_set".into(), json!(self.coeff_set.iter().map(|c| c.to_string()).collect::<Vec<_>>()));
        m.insert("m_max".into(), json!(self.m_max));
        m.insert("tol".into(), json!(self.tol.to_string()));
        m.insert("rel_tol".into(), json!(self.rel_tol.to_string()));
        m
    }
}

/// Shared, read-only state for one suite run.
struct Ctx<'a> {
    x: &'a AbelianVariety,
    params: &'a SuiteParams,
    seed: u64,
    lattices: Vec<NumericalLattice>,
}

impl Ctx<'_> {
    fn sampler(&self, id: u64) -> Sampler<'_> {
        Sampler::new(self.x, self.params, self.seed, id)
    }

    fn n(&self) -> usize {
        self.x.n()
    }
}

fn timed<T>(timing: bool, f: impl FnOnce() -> T) -> (T, u64) {
    let start = Instant::now();
    let out = f();
    let ms = if timing { start.elapsed().as_millis() as u64 } else { 0 };
    (out, ms)
}

pub fn run_suite(cfg: &VarietyConfig, suite: &str, seed: u64, params: &SuiteParams) -> Result<Report, SuiteError> {
    if !SUITES.contains(&suite) {
        return Err(SuiteError::UnknownSuite(suite.to_string()));
    }
    params.validate()?;
    let x = &cfg.variety;
    if suite == "castelnuovo_severi" && x.n() != 1 {
        return Err(SuiteError::Param(format!("castelnuovo_severi needs a curve, got dimension {}", x.n())));
    }
    let needs_lattices = matches!(suite, "ddc" | "dinh");
    let lattices = if needs_lattices {
        (0..=x.n()).map(|k| build_nk(x, k).expect("k within range")).collect()
    } else {
        Vec::new()
    };
    let ctx = Ctx { x, params, seed, lattices };
    let per_sample: Vec<Vec<Record>> =
        (0..params.samples as u64).into_par_iter().map(|id| run_sample(&ctx, suite, id)).collect();
    let mut records: Vec<Record> = per_sample.into_iter().flatten().collect();
    records.extend(controls(&ctx, suite, params.samples as u64));
    Ok(Report::new(&cfg.digest, suite, seed, params.to_map(), records))
}

fn run_sample(ctx: &Ctx, suite: &str, id: u64) -> Vec<Record> {
    match suite {
        "ddc" => ddc(ctx, id),
        "gwrh" => gwrh(ctx, id),
        "semisimple" => semisimple(ctx, id),
        "dinh" => dinh(ctx, id),
        "logconcave" => logconcave(ctx, id),
        "gr_identity" => gr_identity(ctx, id),
        "trace_bounds" => trace_bounds(ctx, id),
        "boundedness" => boundedness(ctx, id),
        "lieberman" => lieberman(ctx, id),
        "castelnuovo_severi" => castelnuovo_severi(ctx, id),
        "norm_ratios" => norm_ratios(ctx, id),
        _ => unreachable!("suite validated"),
    }
}

/// Negative controls appended after the random samples.
fn controls(ctx: &Ctx, suite: &str, id: u64) -> Vec<Record> {
    match suite {
        "semisimple" => semisimple_control(ctx, id),
        "logconcave" => logconcave_control(ctx, id),
        _ => Vec::new(),
    }
}

fn ddc(ctx: &Ctx, id: u64) -> Vec<Record> {
    let c = ctx.sampler(id).effective();
    let action = c.graded_action(ctx.x);
    let cp = ctx.params.check_params();
    (0..=ctx.n())
        .map(|k| {
            let rec = Record::new("ddc", id, Some(k)).input("correspondence", &c);
            let (out, ms) =
                timed(ctx.params.timing, || ddc_check_with(ctx.x.model(), &action, &ctx.lattices[k], k, &cp));
            let mut rec = match out {
                Ok(o) => {
                    let mut r = rec;
                    r.value("chi", Value::interval(&o.chi));
                    r.value("lambda_numerical", Value::interval(&o.lambda_numerical));
                    r.value("lambda_growth", Value::interval(&o.lambda_growth));
                    r.value("easy_direction", Value::Flag(o.easy_direction));
                    r.value("strictly_dominant", Value::Flag(o.strictly_dominant));
                    // floating cross-check against the certified growth rate
                    if let (true, Some(t)) = (o.strictly_dominant, o.ratio_tail) {
                        let mid = o.lambda_growth.midpoint_f64();
                        if mid > 0.0 {
                            if let Some(gap) = Rat::from_float(((t - mid) / mid).abs()) {
                                r.ratio("tail_ratio_gap", gap);
                            }
                        }
                    }
                    r.saturation_events = o.saturation_events;
                    r.verdict = o.verdict;
                    r
                }
                Err(e) => rec.failed(e),
            };
            rec.runtime_ms = ms;
            rec
        })
        .collect()
}

fn dinh(ctx: &Ctx, id: u64) -> Vec<Record> {
    let c = ctx.sampler(id).effective();
    let action = c.graded_action(ctx.x);
    (0..ctx.n())
        .map(|k| {
            let rec = Record::new("dinh", id, Some(k)).input("correspondence", &c);
            let (out, ms) = timed(ctx.params.timing, || {
                dinh_check_with(ctx.x.model(), &action, &ctx.lattices[k], &ctx.lattices[k + 1], &ctx.params.tol)
            });
            let mut rec = match out {
                Ok(o) => {
                    let mut r = rec;
                    r.value("chi_odd", Value::interval(&o.chi_odd));
                    r.value("lambda_k", Value::interval(&o.lambda_k));
                    r.value("lambda_k1", Value::interval(&o.lambda_k1));
                    r.value("slack_lower_bound", Value::exact(&o.slack));
                    r.verdict = o.verdict;
                    r
                }
                Err(e) => rec.failed(e),
            };
            rec.runtime_ms = ms;
            rec
        })
        .collect()
}

fn gwrh(ctx: &Ctx, id: u64) -> Vec<Record> {
    let Some((f, q)) = ctx.sampler(id).polarized() else {
        let mut r = Record::new("gwrh", id, None);
        r.verdict = Verdict::Inconclusive;
        return vec![r.input("note", "no polarized endomorphism within entry_bound")];
    };
    let action = Correspondence::graph(ctx.x, &f).graded_action(ctx.x);
    (0..=2 * ctx.n())
        .map(|i| {
            let rec = Record::new("gwrh", id, Some(i)).input("endomorphism", &f).input("q", &q);
            let (out, ms) = timed(ctx.params.timing, || weil_check(action.degree(i), &q, i, &ctx.params.tol));
            let mut rec = match out {
                Ok(w) => {
                    let mut r = rec;
                    r.value("functional_equation", Value::Flag(w.functional_equation_ok));
                    r.value("moduli", Value::Flag(w.moduli_ok));
                    r.verdict = Verdict::from_bool(w.passed());
                    r
                }
                Err(e) => rec.failed(e),
            };
            rec.runtime_ms = ms;
            rec
        })
        .collect()
}

fn semisimple(ctx: &Ctx, id: u64) -> Vec<Record> {
    let Some((f, q)) = ctx.sampler(id).polarized() else {
        let mut r = Record::new("semisimple", id, None);
        r.verdict = Verdict::Inconclusive;
        return vec![r.input("note", "no polarized endomorphism within entry_bound")];
    };
    let action = Correspondence::graph(ctx.x, &f).graded_action(ctx.x);
    (0..=2 * ctx.n())
        .map(|i| {
            let mut rec = Record::new("semisimple", id, Some(i)).input("endomorphism", &f).input("q", &q);
            let (ok, ms) = timed(ctx.params.timing, || is_semisimple(action.degree(i)));
            rec.value("semisimple", Value::Flag(ok));
            rec.verdict = Verdict::from_bool(ok);
            rec.runtime_ms = ms;
            rec
        })
        .collect()
}

/// The unipotent `(x + y, y)` is expected to fail semisimplicity on `H^1`.
fn semisimple_control(ctx: &Ctx, id: u64) -> Vec<Record> {
    let Some(f) = unipotent_control(ctx.x) else {
        return Vec::new();
    };
    let m = &exterior_powers(&f.realize(ctx.x))[1];
    let mut rec = Record::new("semisimple_control", id, Some(1)).input("endomorphism", &f);
    let polarized = f.is_polarized(ctx.x).is_some();
    let (ok, ms) = timed(ctx.params.timing, || is_semisimple(m));
    rec.value("polarized", Value::Flag(polarized));
    rec.value("semisimple", Value::Flag(ok));
    rec.verdict = if !ok && !polarized { Verdict::ExpectedFail } else { Verdict::Fail };
    rec.runtime_ms = ms;
    vec![rec]
}

fn degree_values(r: &mut Record, degs: &[Rat]) {
    for (i, d) in degs.iter().enumerate() {
        r.value(&format!("deg_{i}"), Value::exact(d));
    }
}

fn logconcave(ctx: &Ctx, id: u64) -> Vec<Record> {
    let mut s = ctx.sampler(id);
    let c = s.single_word();
    let mut word = Record::new("logconcave", id, None).input("correspondence", &c);
    let (degs, ms) = timed(ctx.params.timing, || c.degree_sequence(ctx.x));
    degree_values(&mut word, &degs.values);
    let positive = degs.values.iter().all(|d| d.is_positive());
    word.verdict = Verdict::from_bool(positive && degs.log_concavity_violation().is_none());
    word.runtime_ms = ms;

    // a positive log-concave sequence from nonincreasing ratios, and a
    // premise-satisfying b: even entries under a_j, odd ones under min(a_j, a_{j+1})
    let n = s.rng.gen_range(1..=4usize);
    let mut ratios: Vec<Rat> = (0..n).map(|_| ratio(s.rng.gen_range(1..=12), s.rng.gen_range(1..=4))).collect();
    ratios.sort_by(|a, b| b.cmp(a));
    let mut a = vec![rat(s.rng.gen_range(1..=5))];
    for r in &ratios {
        let next = a.last().expect("nonempty") * r;
        a.push(next);
    }
    let b: Vec<Rat> = (0..=2 * n)
        .map(|i| {
            let base = if i % 2 == 0 { a[i / 2].clone() } else { a[i / 2].clone().min(a[i / 2 + 1].clone()) };
            base * ratio(s.rng.gen_range(1..=4), 4)
        })
        .collect();
    let show = |v: &[Rat]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    let rec = Record::new("reduction_oracle", id, None).input("a", show(&a)).input("b", show(&b));
    let (out, ms) = timed(ctx.params.timing, || reduction_oracle(&a, &b, &dyadic_grid(-10, 10)));
    let mut oracle = match out {
        Ok(v) => {
            let mut r = rec;
            r.value("premise_on_grid", Value::Flag(v.premise_on_grid));
            r.value("premise_at_witnesses", Value::Flag(v.premise_at_witnesses));
            r.value("conclusion", Value::Flag(v.conclusion));
            r.value("agreement", Value::Flag(v.agreement));
            r.verdict = Verdict::from_bool(v.passed());
            r
        }
        Err(e) => rec.failed(e),
    };
    oracle.runtime_ms = ms;
    vec![word, oracle]
}

/// `Γ_[1] + Γ_[2]` is a sum of two graphs, outside the single-word scope.
fn logconcave_control(ctx: &Ctx, id: u64) -> Vec<Record> {
    let x = ctx.x;
    let c = Correspondence::graph(x, &x.multiplication_map(1)).add(&Correspondence::graph(x, &x.multiplication_map(2)));
    let mut rec = Record::new("logconcave_control", id, None).input("correspondence", &c);
    let degs = c.degree_sequence(x);
    degree_values(&mut rec, &degs.values);
    rec.verdict = match degs.log_concavity_violation() {
        Some(k) => {
            rec.value("violation_index", Value::Exact(k.to_string()));
            Verdict::ExpectedFail
        }
        None => Verdict::Pass,
    };
    vec![rec]
}

fn gr_identity(ctx: &Ctx, id: u64) -> Vec<Record> {
    let x = ctx.x;
    let f = ctx.sampler(id).effective();
    let action = f.graded_action(x);
    let degs = f.degree_sequence(x).values;
    gr_radii()
        .into_iter()
        .enumerate()
        .map(|(j, r)| {
            let rec = Record::new("gr_identity", id, Some(j)).input("correspondence", &f).input("r", &r);
            let (out, ms) = timed(ctx.params.timing, || -> corrdyn::Result<(bool, Rat, Rat)> {
                let scaled = apply_gr(x, &f, &r)?;
                let action_ok = scaled == action.mul(&GradedAction::gamma(x.model(), &r));
                let total = gr_correspondence(x, &r)?.compose(x, &f).total_degree(x);
                let n = x.n();
                let expected = (0..=n).fold(Rat::zero(), |acc, i| {
                    acc + rat(binomial(n, i) as i64) * num_traits::pow(r.clone(), 2 * i) * &degs[i]
                });
                Ok((action_ok, total, expected))
            });
            let mut rec = match out {
                Ok((action_ok, total, expected)) => {
                    let mut rec = rec;
                    rec.value("action_identity", Value::Flag(action_ok));
                    rec.value("total_degree", Value::exact(&total));
                    rec.value("expected_total_degree", Value::exact(&expected));
                    rec.verdict = Verdict::from_bool(action_ok && total == expected);
                    rec
                }
                Err(e) => rec.failed(e),
            };
            rec.runtime_ms = ms;
            rec
        })
        .collect()
}

/// Largest trace ratio squared: `max(even², odd_squared)`.
fn trace_ratio_sq(model: &corrdyn::CohomologyModel, a: &GradedAction) -> corrdyn::Result<Rat> {
    let t = trace_bound_ratios_of_action(model, a)?;
    let even = t.even.iter().map(|e| e * e);
    Ok(even.chain(t.odd_squared.iter().cloned()).max().unwrap_or_else(Rat::zero))
}

fn trace_bounds(ctx: &Ctx, id: u64) -> Vec<Record> {
    let x = ctx.x;
    let f = ctx.sampler(id).effective();
    let rec = Record::new("trace_bounds", id, None).input("correspondence", &f);
    let (out, ms) = timed(ctx.params.timing, || -> corrdyn::Result<(Rat, Rat)> {
        let a = f.graded_action(x);
        let mut power = a.clone();
        let (mut early, mut late) = (Rat::zero(), Rat::zero());
        for m in 1..=TRACE_ITERATES {
            if m > 1 {
                power = power.mul(&a);
            }
            let r = trace_ratio_sq(x.model(), &power)?;
            if m <= TRACE_SPLIT {
                early = early.max(r.clone());
            }
            if m >= TRACE_SPLIT {
                late = late.max(r);
            }
        }
        Ok((early, late))
    });
    let mut rec = match out {
        Ok((early, late)) => {
            let mut rec = rec;
            let bits = 96;
            let early_max = corrdyn::interval::sqrt_hi(&early, bits);
            let late_max = corrdyn::interval::sqrt_hi(&late, bits);
            rec.ratio("trace_ratio_early", early_max);
            rec.ratio("trace_ratio_late", late_max);
            if early.is_positive() {
                rec.ratio("trace_growth_sq", &late / &early);
            }
            // late ≤ 10·early, compared after squaring
            rec.verdict = Verdict::from_bool(late <= rat(100) * &early);
            rec
        }
        Err(e) => rec.failed(e),
    };
    rec.runtime_ms = ms;
    vec![rec]
}

fn boundedness(ctx: &Ctx, id: u64) -> Vec<Record> {
    let x = ctx.x;
    let mut s = ctx.sampler(id);
    let f = s.effective();
    let g = s.effective();
    let rec = Record::new("boundedness", id, None).input("f", &f).input("g", &g);
    let (out, ms) = timed(ctx.params.timing, || -> corrdyn::Result<(Rat, Rat)> {
        let num = intersect(x, &f, &g)?;
        let df = f.degree_sequence(x).values;
        let dg = g.degree_sequence(x).values;
        let n = x.n();
        let den = (0..=n).fold(Rat::zero(), |acc, i| acc + &df[i] * &dg[n - i]);
        Ok((num, den))
    });
    let mut rec = match out {
        Ok((num, den)) => {
            let mut rec = rec;
            rec.value("intersection", Value::exact(&num));
            rec.value("degree_pairing", Value::exact(&den));
            if den.is_positive() {
                rec.ratio("intersection_ratio", num.abs() / &den);
                rec.verdict = Verdict::Pass;
            } else {
                rec.verdict = Verdict::Fail;
            }
            rec
        }
        Err(e) => rec.failed(e),
    };
    rec.runtime_ms = ms;
    vec![rec]
}

fn lieberman(ctx: &Ctx, id: u64) -> Vec<Record> {
    let x = ctx.x;
    let mut s = ctx.sampler(id);
    let phi = s.isogeny();
    let psi = s.isogeny();
    let f = s.effective();
    let g = s.effective();
    let rec = Record::new("lieberman", id, None).input("phi", &phi).input("psi", &psi).input("f", &f).input("g", &g);
    let (out, ms) = timed(ctx.params.timing, || -> corrdyn::Result<(bool, bool)> {
        let pushed = lieberman_pushforward(x, &phi, &psi, &f)?.graded_action(x);
        let push = pushforward_matrices(&phi.realize(x))?;
        let pull = exterior_powers(&psi.realize(x));
        let af = f.graded_action(x);
        let pushforward_ok = (0..=2 * x.n()).all(|i| pushed.degrees[i] == push[i].mul(&af.degrees[i]).mul(&pull[i]));
        let functorial = g.compose(x, &f).graded_action(x) == af.mul(&g.graded_action(x));
        Ok((pushforward_ok, functorial))
    });
    let mut rec = match out {
        Ok((p, fun)) => {
            let mut rec = rec;
            rec.value("pushforward_identity", Value::Flag(p));
            rec.value("functoriality", Value::Flag(fun));
            rec.verdict = Verdict::from_bool(p && fun);
            rec
        }
        Err(e) => rec.failed(e),
    };
    rec.runtime_ms = ms;
    vec![rec]
}

fn castelnuovo_severi(ctx: &Ctx, id: u64) -> Vec<Record> {
    let x = ctx.x;
    let c = ctx.sampler(id).effective();
    let rec = Record::new("castelnuovo_severi", id, None).input("correspondence", &c);
    let (out, ms) = timed(ctx.params.timing, || -> corrdyn::Result<(Rat, Vec<Rat>)> {
        Ok((intersect(x, &c, &c)?, c.degree_sequence(x).values))
    });
    let mut rec = match out {
        Ok((self_int, degs)) => {
            let mut rec = rec;
            let bound = rat(2) * &degs[0] * &degs[1];
            rec.value("self_intersection", Value::exact(&self_int));
            rec.value("bound", Value::exact(&bound));
            if bound.is_positive() {
                rec.ratio("self_intersection_ratio", &self_int / &bound);
            }
            rec.verdict = Verdict::from_bool(self_int <= bound);
            rec
        }
        Err(e) => rec.failed(e),
    };
    rec.runtime_ms = ms;
    vec![rec]
}

fn norm_ratios(ctx: &Ctx, id: u64) -> Vec<Record> {
    let x = ctx.x;
    let c = ctx.sampler(id).effective();
    (0..=ctx.n())
        .map(|k| {
            let rec = Record::new("norm_ratios", id, Some(k)).input("correspondence", &c);
            let (out, ms) = timed(ctx.params.timing, || norm_comparison_ratios(x, &c, k));
            let mut rec = match out {
                Ok(r) => {
                    let mut rec = rec;
                    rec.ratio("norm_ratio_even", r.even);
                    if let Some(o) = r.odd_squared {
                        rec.ratio("norm_ratio_odd", corrdyn::interval::sqrt_hi(&o, 96));
                    }
                    rec
                }
                Err(e) => rec.failed(e),
            };
            rec.runtime_ms = ms;
            rec
        })
        .collect()
}
