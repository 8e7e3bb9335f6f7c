//! Variety configuration files (TOML, format version 1).
//!
//! ```toml
//! version = 1
//!
//! [[factors]]
//! curve_id = "E"
//! multiplicity = 2
//! order = { t = 0, d = 1 }   # or "Z"
//!
//! [endomorphisms.phi]
//! E = [[[1, 1], [0, 0]], [[0, 0], [1, -1]]]   # one block per curve, entries [u, v] = u + vω
//!
//! [correspondences]
//! f = "graph(phi) + 2*transpose(graph(phi))"
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Range;

use corrdyn::abelian::{EndOrder, Factor, OrderElement};
use corrdyn::{AbelianVariety, Correspondence, EndomorphismMatrix};
use serde::Deserialize;
use sha2::{Digest, Sha256};
use toml::Spanned;

use crate::expr::{self, Env, Expr};

pub const FORMAT_VERSION: i64 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct ConfigError {
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lines: Vec<String> = self.diagnostics.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", lines.join("\n"))
    }
}

/// Endomorphism name to per-curve blocks.
type RawEndomorphisms = BTreeMap<Spanned<String>, BTreeMap<Spanned<String>, Spanned<Vec<Vec<RawEntry>>>>>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    version: Option<Spanned<i64>>,
    factors: Vec<Spanned<RawFactor>>,
    #[serde(default)]
    endomorphisms: RawEndomorphisms,
    #[serde(default)]
    correspondences: BTreeMap<Spanned<String>, Spanned<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFactor {
    curve_id: Spanned<String>,
    multiplicity: Spanned<i64>,
    order: Spanned<RawOrder>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawOrder {
    Name(String),
    Quadratic { t: i64, d: i64 },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawEntry {
    Pair([i64; 2]),
    Int(i64),
}

impl RawEntry {
    fn element(&self) -> OrderElement {
        match self {
            RawEntry::Pair([u, v]) => OrderElement::new(*u, *v),
            RawEntry::Int(u) => OrderElement::integer(*u),
        }
    }
}

/// A validated configuration.
#[derive(Clone, Debug)]
pub struct VarietyConfig {
    pub variety: AbelianVariety,
    pub endomorphisms: BTreeMap<String, EndomorphismMatrix>,
    pub correspondences: BTreeMap<String, Correspondence>,
    /// Source text of each correspondence expression.
    pub expressions: BTreeMap<String, String>,
    /// Hex SHA-256 of the configuration text.
    pub digest: String,
}

impl VarietyConfig {
    pub fn correspondence(&self, name: &str) -> Option<&Correspondence> {
        self.correspondences.get(name)
    }

    /// Evaluates an ad hoc expression against the configured names.
    pub fn eval(&self, src: &str) -> Result<Correspondence, String> {
        let e = expr::parse(src).map_err(|e| e.to_string())?;
        expr::eval(&e, self)
    }
}

impl Env for VarietyConfig {
    fn variety(&self) -> &AbelianVariety {
        &self.variety
    }

    fn endomorphism(&self, name: &str) -> Option<&EndomorphismMatrix> {
        self.endomorphisms.get(name)
    }

    fn correspondence(&self, name: &str) -> Option<&Correspondence> {
        self.correspondences.get(name)
    }
}

pub fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// 1-based line and column of a byte offset.
fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

struct Collector<'a> {
    text: &'a str,
    diagnostics: Vec<Diagnostic>,
}

impl Collector<'_> {
    fn at(&mut self, span: Range<usize>, message: impl Into<String>) {
        let (line, column) = position(self.text, span.start);
        self.diagnostics.push(Diagnostic { line, column, message: message.into() });
    }
}

fn parse_order(raw: &RawOrder) -> Result<EndOrder, String> {
    match raw {
        RawOrder::Name(s) if s == "Z" => Ok(EndOrder::Integers),
        RawOrder::Name(s) => Err(format!("unknown order '{s}', expected \"Z\" or {{ t, d }}")),
        RawOrder::Quadratic { t, d } => EndOrder::quadratic(*t, *d)
            .map_err(|_| format!("order t = {t}, d = {d} is not imaginary quadratic: t² − 4d = {} ≥ 0", t * t - 4 * d)),
    }
}

pub fn parse_config(text: &str) -> Result<VarietyConfig, ConfigError> {
    let mut c = Collector { text, diagnostics: Vec::new() };
    let raw: RawConfig = match toml::from_str(text) {
        Ok(r) => r,
        Err(e) => {
            let span = e.span().unwrap_or(0..0);
            c.at(span, e.message().to_string());
            return Err(ConfigError { diagnostics: c.diagnostics });
        }
    };
    if let Some(v) = &raw.version {
        if *v.get_ref() != FORMAT_VERSION {
            c.at(v.span(), format!("unsupported format version {}, expected {FORMAT_VERSION}", v.get_ref()));
        }
    }

    let mut factors = Vec::new();
    let mut seen = BTreeSet::new();
    if raw.factors.is_empty() {
        c.at(0..0, "at least one factor is required");
    }
    for f in &raw.factors {
        let f = f.get_ref();
        let id = f.curve_id.get_ref().clone();
        if !seen.insert(id.clone()) {
            c.at(f.curve_id.span(), format!("curve_id '{id}' listed twice"));
        }
        let mult = *f.multiplicity.get_ref();
        if mult < 1 {
            c.at(f.multiplicity.span(), "multiplicity must be positive");
        }
        match parse_order(f.order.get_ref()) {
            Ok(order) => factors.push(Factor { curve_id: id, multiplicity: mult.max(1) as usize, order }),
            Err(m) => c.at(f.order.span(), m),
        }
    }
    if !c.diagnostics.is_empty() {
        return Err(ConfigError { diagnostics: c.diagnostics });
    }
    let first_span = raw.factors[0].span();
    let variety = match AbelianVariety::new(factors) {
        Ok(x) => x,
        Err(e) => {
            c.at(first_span, e.to_string());
            return Err(ConfigError { diagnostics: c.diagnostics });
        }
    };

    let mut endomorphisms = BTreeMap::new();
    for (name, blocks) in &raw.endomorphisms {
        let mut parsed = BTreeMap::new();
        let mut ok = true;
        for (curve, block) in blocks {
            let Some(coords) = variety.coords_of(curve.get_ref()) else {
                c.at(curve.span(), format!("unknown curve_id '{}'", curve.get_ref()));
                ok = false;
                continue;
            };
            let rows = block.get_ref();
            if rows.len() != coords.len() || rows.iter().any(|r| r.len() != coords.len()) {
                c.at(block.span(), format!("block for '{}' must be {m}×{m}", curve.get_ref(), m = coords.len()));
                ok = false;
                continue;
            }
            parsed.insert(
                curve.get_ref().clone(),
                rows.iter().map(|r| r.iter().map(RawEntry::element).collect()).collect(),
            );
        }
        if !ok {
            continue;
        }
        match EndomorphismMatrix::from_blocks(&variety, &parsed) {
            Ok(m) => {
                endomorphisms.insert(name.get_ref().clone(), m);
            }
            Err(e) => c.at(name.span(), format!("endomorphism '{}': {e}", name.get_ref())),
        }
    }

    // parse every expression, then evaluate in dependency order
    let mut parsed: BTreeMap<String, (Expr, Range<usize>)> = BTreeMap::new();
    let mut expressions = BTreeMap::new();
    for (name, src) in &raw.correspondences {
        let n = name.get_ref().clone();
        if endomorphisms.contains_key(&n) {
            c.at(name.span(), format!("'{n}' names both an endomorphism and a correspondence"));
        }
        match expr::parse(src.get_ref()) {
            Ok(e) => {
                parsed.insert(n.clone(), (e, src.span()));
            }
            Err(e) => {
                // the span includes the opening quote
                let start = src.span().start + e.column;
                c.at(start..start, format!("correspondence '{n}': {}", e.message));
            }
        }
        expressions.insert(n, src.get_ref().clone());
    }

    let mut cfg =
        VarietyConfig { variety, endomorphisms, correspondences: BTreeMap::new(), expressions, digest: digest(text) };
    let mut state: BTreeMap<String, u8> = BTreeMap::new();
    let names: Vec<String> = parsed.keys().cloned().collect();
    for n in names {
        visit(&n, &parsed, &mut state, &mut cfg, &mut c);
    }
    if c.diagnostics.is_empty() {
        Ok(cfg)
    } else {
        c.diagnostics.sort_by_key(|d| (d.line, d.column));
        Err(ConfigError { diagnostics: c.diagnostics })
    }
}

/// Depth-first evaluation; `state` is 1 while a name is on the stack and 2 when done.
fn visit(
    name: &str,
    parsed: &BTreeMap<String, (Expr, Range<usize>)>,
    state: &mut BTreeMap<String, u8>,
    cfg: &mut VarietyConfig,
    c: &mut Collector,
) {
    let Some((e, span)) = parsed.get(name) else {
        return;
    };
    match state.get(name) {
        Some(2) => return,
        Some(_) => {
            c.at(span.clone(), format!("correspondence '{name}' refers to itself"));
            return;
        }
        None => {}
    }
    state.insert(name.to_string(), 1);
    for r in e.references() {
        visit(r, parsed, state, cfg, c);
    }
    state.insert(name.to_string(), 2);
    // a failed dependency has already been reported
    if e.references().iter().any(|r| parsed.contains_key(*r) && !cfg.correspondences.contains_key(*r)) {
        return;
    }
    match expr::eval(e, cfg) {
        Ok(v) => {
            cfg.correspondences.insert(name.to_string(), v);
        }
        Err(m) => c.at(span.clone(), format!("correspondence '{name}': {m}")),
    }
}
