//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the verdict lines are always printed; exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use corrdyn::abelian::EndOrder;
use corrdyn::exterior::CohomologyModel;
use corrdyn::linalg::binomial;
use corrdyn::poly::Poly;
use corrdyn::spectral::dynamics::chi;
use corrdyn::spectral::{char_poly, default_tol, weil_check};
use corrdyn::{rat, AbelianVariety, Correspondence, EndomorphismMatrix, Matrix, Rat, Verdict};
use corrdyn_cli::config::{parse_config, VarietyConfig};
use corrdyn_cli::report::{Format, Report, SCHEMA};
use corrdyn_cli::suite::{run_suite, SuiteParams};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn config(name: &str) -> VarietyConfig {
    let path = format!("{}/../../configs/{name}.toml", env!("CARGO_MANIFEST_DIR"));
    parse_config(&std::fs::read_to_string(path).expect("config file")).expect("config parses")
}

fn params(samples: usize) -> SuiteParams {
    SuiteParams { samples, timing: false, ..SuiteParams::default() }
}

fn suite(name: &str, cfg: &VarietyConfig, seed: u64, samples: usize) -> Result<Report, String> {
    run_suite(cfg, name, seed, &params(samples)).map_err(|e| e.to_string())
}

fn count(report: &Report, check: &str, verdict: Verdict) -> usize {
    report.records.iter().filter(|r| r.check_id == check && r.verdict == verdict).count()
}

/// Every record of `check` passed; returns how many there were.
fn all_pass(report: &Report, check: &str) -> Result<usize, String> {
    let total = report.records.iter().filter(|r| r.check_id == check).count();
    let bad: Vec<String> = report
        .records
        .iter()
        .filter(|r| r.check_id == check && r.verdict != Verdict::Pass)
        .map(|r| format!("#{} k={:?} {}", r.sample_id, r.k, r.verdict.as_str()))
        .take(5)
        .collect();
    if bad.is_empty() {
        Ok(total)
    } else {
        Err(format!("{check}: {}", bad.join(", ")))
    }
}

/// Fixed points of `f` on the real torus `R^{2n}/Z^{2n}`: the kernel of
/// `M − I` lives in `(1/e)Z^{2n}` for `e` the common denominator of
/// `(M − I)^{-1}`, so count residues `v mod e` with `(M − I)v ≡ 0`.
fn torsion_fixed_points(m: &Matrix) -> Option<u64> {
    let a = m.sub(&Matrix::identity(m.rows()));
    let inv = a.inverse()?;
    let e = inv.entries().iter().fold(BigInt::one(), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
    let e = e.to_u64()?;
    let dim = m.rows() as u32;
    let total = e.checked_pow(dim)?;
    if total > 5_000_000 {
        return None;
    }
    let ints: Vec<Vec<i64>> =
        (0..a.rows()).map(|r| a.row(r).iter().map(|x| x.to_integer().to_i64().unwrap()).collect()).collect();
    let e = e as i64;
    let mut fixed = 0;
    let mut v = vec![0i64; dim as usize];
    for _ in 0..total {
        if ints.iter().all(|row| row.iter().zip(&v).map(|(a, b)| a * b).sum::<i64>().rem_euclid(e) == 0) {
            fixed += 1;
        }
        for slot in v.iter_mut() {
            *slot += 1;
            if *slot < e {
                break;
            }
            *slot = 0;
        }
    }
    Some(fixed)
}

fn criterion_1() -> Outcome {
    let mut slowest = Duration::ZERO;
    for n in 1..=3 {
        let x = AbelianVariety::power("E", n, EndOrder::Integers).map_err(|e| e.to_string())?;
        for m in [2i64, 3] {
            let start = Instant::now();
            let f = x.multiplication_map(m);
            let c = Correspondence::graph(&x, &f);
            let action = c.graded_action(&x);
            for (i, a) in action.degrees.iter().enumerate() {
                let expected = Poly::new(vec![-rat(m).pow(i as i32), rat(1)]).pow(binomial(2 * n, i));
                if char_poly(a) != expected {
                    return Err(format!("n={n} m={m}: char poly on H^{i}"));
                }
            }
            let lef = c.lefschetz_number(&x);
            let expected = rat(m - 1).pow(2 * n as i32);
            let oracle = torsion_fixed_points(&f.realize(&x)).ok_or("torsion oracle out of range")?;
            if lef != expected || rat(oracle as i64) != expected {
                return Err(format!("n={n} m={m}: lefschetz {lef}, torsion count {oracle}, expected {expected}"));
            }
            let t = start.elapsed();
            slowest = slowest.max(t);
            if t > Duration::from_secs(1) {
                return Err(format!("n={n} m={m} took {t:?}"));
            }
        }
    }
    Ok(format!("6 cases exact, slowest {slowest:?}"))
}

fn criterion_2() -> Outcome {
    let x = AbelianVariety::power("E", 1, EndOrder::Quadratic { t: 0, d: 1 }).map_err(|e| e.to_string())?;
    let f = EndomorphismMatrix::from_i64(&x, &[vec![(1, 1)]]).map_err(|e| e.to_string())?;
    let c = Correspondence::graph(&x, &f);
    let tol = default_tol();
    let mut shown = Vec::new();
    for (i, square) in [(0usize, 1i64), (1, 2), (2, 4)] {
        let iv = chi(&x, &c, i, &tol).map_err(|e| e.to_string())?;
        // χ_i = sqrt(square), checked without square roots
        let ok = iv.width() <= tol && &iv.lo * &iv.lo <= rat(square) && &iv.hi * &iv.hi >= rat(square);
        if !ok {
            return Err(format!("chi_{i} = {iv}"));
        }
        shown.push(format!("chi_{i} = {iv}"));
    }
    let action = c.graded_action(&x);
    for (i, m) in action.degrees.iter().enumerate() {
        let w = weil_check(m, &rat(2), i, &tol).map_err(|e| e.to_string())?;
        if !w.functional_equation_ok || !w.passed() {
            return Err(format!("weil check on H^{i}: {w:?}"));
        }
    }
    Ok(shown.join(", "))
}

const FAMILY: [&str; 3] = ["e2", "e1xe2", "ecm2"];

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut total = 0;
    let mut inconclusive = 0;
    for name in FAMILY {
        let r = suite("ddc", &config(name), 42, 100)?;
        let fails = count(&r, "ddc", Verdict::Fail);
        if fails > 0 {
            all_pass(&r, "ddc").map_err(|e| format!("{name}: {e}"))?;
        }
        inconclusive += count(&r, "ddc", Verdict::Inconclusive);
        total += r.records.len();
    }
    let t = start.elapsed();
    if t > Duration::from_secs(300) {
        return Err(format!("took {t:?}"));
    }
    Ok(format!("{total} (sample, k) records, 0 fail, {inconclusive} inconclusive, {:.1}s", t.as_secs_f64()))
}

fn criterion_4() -> Outcome {
    let mut total = 0;
    let mut min_slack: Option<Rat> = None;
    for name in FAMILY {
        let r = suite("dinh", &config(name), 42, 100)?;
        total += all_pass(&r, "dinh").map_err(|e| format!("{name}: {e}"))?;
        for rec in &r.records {
            if let Some(corrdyn_cli::report::Value::Exact(s)) = rec.certified_values.get("slack_lower_bound") {
                let v: Rat = s.parse().map_err(|_| "slack parse")?;
                if v < -default_tol() {
                    return Err(format!("slack {v}"));
                }
                min_slack = Some(min_slack.map_or(v.clone(), |m: Rat| m.min(v)));
            }
        }
    }
    let shown = min_slack.map(|s| corrdyn::interval::to_f64(&s)).unwrap_or(0.0);
    Ok(format!("{total} records, min certified slack {shown:.3e}"))
}

fn criterion_5() -> Outcome {
    let mut checked = 0;
    let mut controls = 0;
    for name in ["e", "ecm", "e2", "e1xe2", "ecm2"] {
        let cfg = config(name);
        checked += all_pass(&suite("gwrh", &cfg, 5, 40)?, "gwrh").map_err(|e| format!("{name}: {e}"))?;
        let s = suite("semisimple", &cfg, 5, 40)?;
        checked += all_pass(&s, "semisimple").map_err(|e| format!("{name}: {e}"))?;
        if cfg.variety.factors().iter().any(|f| f.multiplicity >= 2) {
            if count(&s, "semisimple_control", Verdict::ExpectedFail) != 1 {
                return Err(format!("{name}: unipotent control not recorded as expected_fail"));
            }
            controls += 1;
        }
    }
    Ok(format!(
        "{checked} polarized (sample, degree) checks pass, unipotent control expected_fail on {controls} varieties"
    ))
}

fn criterion_6() -> Outcome {
    let mut words = 0;
    for name in ["e", "ecm", "e2", "e1xe2", "ecm2"] {
        let r = suite("logconcave", &config(name), 8, 100)?;
        words += all_pass(&r, "logconcave").map_err(|e| format!("{name}: {e}"))?;
    }
    let r = suite("logconcave", &config("e2"), 8, 0)?;
    let control = r.records.iter().find(|r| r.check_id == "logconcave_control").ok_or("no control")?;
    if control.verdict != Verdict::ExpectedFail {
        return Err("two-graph control is log-concave on E²".into());
    }
    let degs: Vec<String> = (0..=2)
        .filter_map(|i| match control.certified_values.get(&format!("deg_{i}")) {
            Some(corrdyn_cli::report::Value::Exact(s)) => Some(s.clone()),
            _ => None,
        })
        .collect();
    Ok(format!("{words} single words exactly log-concave; Γ[1]+Γ[2] control has degrees ({})", degs.join(", ")))
}

fn criterion_7() -> Outcome {
    let r = suite("logconcave", &config("e"), 2024, 1000)?;
    let n = all_pass(&r, "reduction_oracle")?;
    if n != 1000 {
        return Err(format!("{n} oracle records"));
    }
    Ok("1000 sequences: bounds dominate, grid and witnesses agree exactly".into())
}

fn criterion_8() -> Outcome {
    let mut n = 0;
    for name in ["e", "ecm", "e2", "e1xe2", "ecm2"] {
        n += all_pass(&suite("gr_identity", &config(name), 3, 30)?, "gr_identity")
            .map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!("{n} (sample, r) identities exact for r in {{1/2, 2, 3/5}}"))
}

fn criterion_9() -> Outcome {
    let mut n = 0;
    let mut worst = Rat::zero();
    for name in ["e", "ecm", "e2", "e1xe2", "ecm2"] {
        let r = suite("trace_bounds", &config(name), 9, 20)?;
        n += all_pass(&r, "trace_bounds").map_err(|e| format!("{name}: {e}"))?;
        if let Some(g) = r.supremum("trace_growth_sq") {
            worst = worst.max(g.clone());
        }
    }
    let growth = corrdyn::interval::to_f64(&worst).sqrt();
    Ok(format!("{n} samples, worst late/early ratio {growth:.3} (bound 10)"))
}

fn criterion_10() -> Outcome {
    let mut n = 0;
    for name in ["e2", "e1xe2", "ecm2"] {
        n += all_pass(&suite("lieberman", &config(name), 10, 200)?, "lieberman").map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!("{n} triples: pushforward and functoriality identities exact in every degree"))
}

fn criterion_11() -> Outcome {
    let r = suite("castelnuovo_severi", &config("e"), 11, 200)?;
    let n = all_pass(&r, "castelnuovo_severi")?;
    let sup = r.supremum("self_intersection_ratio").map(corrdyn::interval::to_f64).unwrap_or(0.0);
    Ok(format!("{n} samples on E, max self-intersection / 2·deg_0·deg_1 = {sup:.4}"))
}

fn criterion_12() -> Outcome {
    let mut shown = Vec::new();
    for name in FAMILY {
        let cfg = config(name);
        let a = suite("boundedness", &cfg, 1201, 100)?;
        let b = suite("boundedness", &cfg, 1202, 100)?;
        all_pass(&a, "boundedness")?;
        all_pass(&b, "boundedness")?;
        let sa = a.supremum("intersection_ratio").cloned().ok_or("no ratio")?;
        let sb = b.supremum("intersection_ratio").cloned().ok_or("no ratio")?;
        if !sa.is_positive() || !sb.is_positive() {
            return Err(format!("{name}: zero supremum"));
        }
        let (lo, hi) = if sa <= sb { (&sa, &sb) } else { (&sb, &sa) };
        if *hi > rat(10) * lo {
            return Err(format!("{name}: suprema {sa} and {sb} differ by more than 10x"));
        }
        shown.push(format!("{name} {:.3}/{:.3}", corrdyn::interval::to_f64(&sa), corrdyn::interval::to_f64(&sb)));
    }
    Ok(format!("suprema across seeds: {}", shown.join(", ")))
}

fn criterion_13() -> Outcome {
    for n in 1..=4 {
        let model = CohomologyModel::new(n).map_err(|e| e.to_string())?;
        for i in 0..=2 * n {
            let g = model.poincare_gram(i);
            let signed_perm = (0..g.rows()).all(|r| {
                let nz: Vec<&Rat> = g.row(r).iter().filter(|x| !x.is_zero()).collect();
                nz.len() == 1 && nz[0].abs() == rat(1)
            });
            if !signed_perm || g.det().abs() != rat(1) {
                return Err(format!("Gram matrix n={n} i={i}"));
            }
        }
    }
    let cfg = config("ecm2");
    let a = suite("ddc", &cfg, 42, 10)?;
    let b = suite("ddc", &cfg, 42, 10)?;
    if a.emit(Format::Json) != b.emit(Format::Json) || a.emit(Format::Csv) != b.emit(Format::Csv) {
        return Err("reports differ between reruns".into());
    }
    let schema: serde_json::Value = serde_json::from_str(SCHEMA).map_err(|e| e.to_string())?;
    let compiled = jsonschema::JSONSchema::compile(&schema).map_err(|e| e.to_string())?;
    for name in ["ddc", "semisimple", "logconcave", "boundedness"] {
        let r = suite(name, &cfg, 13, 5)?;
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).map_err(|e| e.to_string())?;
        if !compiled.is_valid(&json) {
            return Err(format!("{name} report fails schema validation"));
        }
    }
    Ok("Gram matrices signed permutations for n ≤ 4; reruns byte-identical; reports validate".into())
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("multiplication maps", criterion_1),
        ("CM exemplar 1+i", criterion_2),
        ("dynamical degree comparison", criterion_3),
        ("Dinh inequality", criterion_4),
        ("Weil numbers and semisimplicity", criterion_5),
        ("log-concavity", criterion_6),
        ("log-concave reduction oracle", criterion_7),
        ("G_r identities", criterion_8),
        ("trace-bound stability", criterion_9),
        ("Lieberman and functoriality", criterion_10),
        ("Castelnuovo-Severi", criterion_11),
        ("intersection boundedness", criterion_12),
        ("infrastructure", criterion_13),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name} [{secs:.1}s]: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} [{secs:.1}s]: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
