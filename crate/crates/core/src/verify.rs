//! End-to-end verification: both sides of the evaluated functional equation
//! for every irreducible representation, compared up to a p-adic unit.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::charelem::{local_error_eval, EvalValue};
use crate::classify::{assemble_error_term, classify_primes, ErrorTermClass, PrimeClassification};
use crate::cyclotomic::CycElem;
use crate::error::{Error, Result};
use crate::euler::{euler_ratio_product, ClassificationOverride, FormData, TwistConvention};
use crate::padic::{PadicCtx, Valuation, DEFAULT_PRECISION};
use crate::reps::{enumerate_irreps, ArtinRep, RepContext};

#[derive(Deserialize)]
#[serde(untagged)]
enum RawDelta {
    Tagged { delta: i64 },
    Bare(i64),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOverride {
    #[serde(rename = "P1", default)]
    p1: Vec<u64>,
    #[serde(rename = "P2", default)]
    p2: Vec<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawForm {
    label: String,
    weight: i64,
    level: i64,
    #[serde(default)]
    coefficients: BTreeMap<String, i64>,
    #[serde(default)]
    special: BTreeMap<String, RawDelta>,
    #[serde(default)]
    classification_override: Option<RawOverride>,
}

fn parse_prime_key(k: &str) -> Result<u64> {
    k.trim().parse::<u64>().map_err(|_| Error::SchemaViolation(format!("key {k:?} is not a positive integer")))
}

/// Parse and validate a form description in JSON.
pub fn parse_form(text: &str) -> Result<FormData> {
    let raw: RawForm = serde_json::from_str(text).map_err(|e| match e.classify() {
        serde_json::error::Category::Data => Error::SchemaViolation(e.to_string()),
        _ => Error::Parse(e.to_string()),
    })?;
    if raw.weight <= 0 || raw.weight > 1000 {
        return Err(Error::SchemaViolation(format!("weight {} out of range", raw.weight)));
    }
    if raw.level <= 0 {
        return Err(Error::SchemaViolation(format!("level {} must be positive", raw.level)));
    }
    let mut coefficients = BTreeMap::new();
    for (k, v) in raw.coefficients {
        coefficients.insert(parse_prime_key(&k)?, v);
    }
    let mut special = BTreeMap::new();
    for (k, v) in raw.special {
        let d = match v {
            RawDelta::Tagged { delta } | RawDelta::Bare(delta) => delta,
        };
        if d != 1 && d != -1 {
            return Err(Error::SchemaViolation(format!("delta at {k} must be +1 or -1")));
        }
        special.insert(parse_prime_key(&k)?, d as i8);
    }
    let ov = raw.classification_override.map(|o| ClassificationOverride { p1: o.p1, p2: o.p2 });
    FormData::new(raw.label, raw.weight as u32, raw.level as u64, coefficients, special, ov)
}

pub fn ingest_form(path: &Path) -> Result<FormData> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_form(&text)
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub precision: u32,
    pub convention: TwistConvention,
    /// Frobenius representative `(q, c)` used at every prime.
    pub frobenius_shift: i64,
    pub check_inflation: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            precision: DEFAULT_PRECISION,
            convention: TwistConvention::PaperDisplay,
            frobenius_shift: 0,
            check_inflation: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Parameters {
    pub label: String,
    pub p: u64,
    pub a: i64,
    pub level: u32,
    pub precision: u32,
    pub twist_convention: TwistConvention,
    pub frobenius_shift: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Header {
    pub parameters: Parameters,
    pub assumptions: Vec<String>,
    pub classification: PrimeClassification,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SideValue {
    pub value: String,
    pub valuation: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordStatus {
    Pass,
    Fail,
    Indeterminate,
    PrecisionExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RepRecord {
    pub label: String,
    pub dimension: usize,
    pub lhs: Option<SideValue>,
    pub rhs: Option<SideValue>,
    pub ratio_valuation: Option<String>,
    pub exact_ratio_one: bool,
    pub unit_ratio_ok: bool,
    pub status: RecordStatus,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InflationCheck {
    pub to_level: u32,
    pub checked: usize,
    pub consistent: bool,
    pub mismatches: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: bool,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub indeterminate: usize,
    pub precision_exhausted: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub header: Header,
    pub records: Vec<RepRecord>,
    pub inflation: Option<InflationCheck>,
    pub summary: Summary,
}

impl VerificationReport {
    /// 0 pass, 1 identity failure, 2 precision failure.
    pub fn exit_code(&self) -> i32 {
        if self.summary.precision_exhausted > 0 {
            2
        } else if self.summary.pass {
            0
        } else {
            1
        }
    }
}

const ASSUMPTIONS: &[&str] = &[
    "p is odd and does not divide the level N",
    "the Kummer base a is p-power-free and prime to p",
    "the Selmer-theoretic hypotheses of the functional equation hold; they are not checked",
    "a_p is a p-adic unit; the verifier does not use a_p",
    "p-local Euler factors are trivial for non-trivial eta and coincide for eta and eta* when eta is trivial",
];

/// Both sides of the identity for one representation.
pub struct SideValues {
    pub lhs: Option<CycElem>,
    pub rhs: CycElem,
    pub notes: Vec<String>,
}

/// `lhs = Π local_error_eval`, `rhs = Π_{q ∈ P0}` Euler ratios. `lhs` is
/// `None` when a local evaluation is indeterminate.
pub fn evaluate_sides(
    f: &FormData,
    eta: &ArtinRep,
    term: &ErrorTermClass,
    cls: &PrimeClassification,
) -> Result<SideValues> {
    let mut notes = Vec::new();
    let mut lhs = Some(CycElem::one(eta.context().padic(), eta.level()));
    for s in &term.summands {
        let r = local_error_eval(&s.data, eta)?;
        notes.extend(r.cancelled_factors.iter().map(|c| format!("q={} {}: {c}", s.q, s.class)));
        match r.value {
            EvalValue::Finite(v) => {
                lhs = match lhs {
                    Some(acc) => Some(acc.checked_mul(&v)?),
                    None => None,
                }
            }
            EvalValue::Indeterminate => {
                notes.push(format!("q={} {}: indeterminate", s.q, s.class));
                lhs = None;
            }
        }
    }
    let rhs = euler_ratio_product(f, eta, &cls.p0)?;
    Ok(SideValues { lhs, rhs, notes })
}

fn side(v: &CycElem) -> Result<SideValue> {
    Ok(SideValue { value: v.to_string(), valuation: v.valuation()?.to_string() })
}

fn record_for(f: &FormData, eta: &ArtinRep, term: &ErrorTermClass, cls: &PrimeClassification) -> Result<RepRecord> {
    let mut rec = RepRecord {
        label: eta.label().to_string(),
        dimension: eta.dimension(),
        lhs: None,
        rhs: None,
        ratio_valuation: None,
        exact_ratio_one: false,
        unit_ratio_ok: false,
        status: RecordStatus::Fail,
        notes: Vec::new(),
    };
    let inner = |rec: &mut RepRecord| -> Result<()> {
        let sides = evaluate_sides(f, eta, term, cls)?;
        rec.notes = sides.notes;
        rec.rhs = Some(side(&sides.rhs)?);
        let Some(lhs) = sides.lhs else {
            rec.status = RecordStatus::Indeterminate;
            return Ok(());
        };
        rec.lhs = Some(side(&lhs)?);
        let ratio = lhs.checked_mul(&sides.rhs.inv()?)?;
        let rv = ratio.valuation()?;
        rec.ratio_valuation = Some(rv.to_string());
        rec.exact_ratio_one = ratio.is_one();
        rec.unit_ratio_ok = lhs.valuation()? == sides.rhs.valuation()? && rv == Valuation::int(0);
        rec.status = if rec.unit_ratio_ok { RecordStatus::Pass } else { RecordStatus::Fail };
        Ok(())
    };
    match inner(&mut rec) {
        Ok(()) => Ok(rec),
        Err(e @ (Error::PrecisionExhausted(_) | Error::NotInvertible | Error::DivisionByIndeterminate(_))) => {
            rec.status = RecordStatus::PrecisionExhausted;
            rec.notes.push(format!("{e}; rerun with a larger --precision"));
            Ok(rec)
        }
        Err(e) => Err(e),
    }
}

/// Context shared by the verification of all representations at one level.
pub struct LevelSetup {
    pub ctx: Arc<PadicCtx>,
    pub rc: Arc<RepContext>,
    pub classification: PrimeClassification,
    pub term: ErrorTermClass,
}

pub fn setup_level(f: &FormData, a: i64, p: u64, level: u32, opts: &VerifyOptions) -> Result<LevelSetup> {
    if f.level.is_multiple_of(p) {
        return Err(Error::InvalidArgument(format!("p = {p} divides the level {}", f.level)));
    }
    let ctx = PadicCtx::new(p, opts.precision)?;
    let rc = RepContext::new(&ctx, level)?;
    let classification = classify_primes(f, a, p, level, &ctx, opts.convention)?;
    let term = assemble_error_term(&classification, f, &ctx, level, opts.convention)?
        .with_frobenius_shift(opts.frobenius_shift);
    Ok(LevelSetup { ctx, rc, classification, term })
}

pub fn verify_functional_equation(
    f: &FormData,
    a: i64,
    p: u64,
    level: u32,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let setup = setup_level(f, a, p, level, opts)?;
    verify_with_setup(f, a, p, level, opts, &setup)
}

/// Verification against an explicit classification, e.g. an emptied one.
pub fn verify_with_setup(
    f: &FormData,
    a: i64,
    p: u64,
    level: u32,
    opts: &VerifyOptions,
    setup: &LevelSetup,
) -> Result<VerificationReport> {
    let irreps = enumerate_irreps(&setup.rc)?;
    let mut records = Vec::with_capacity(irreps.len());
    for eta in &irreps {
        records.push(record_for(f, eta, &setup.term, &setup.classification)?);
    }
    let inflation = if opts.check_inflation { Some(inflation_check(f, level, opts, setup, &irreps)?) } else { None };
    let count = |s: RecordStatus| records.iter().filter(|r| r.status == s).count();
    let passed = count(RecordStatus::Pass);
    let summary = Summary {
        pass: passed == records.len() && inflation.as_ref().is_none_or(|i| i.consistent),
        total: records.len(),
        passed,
        failed: count(RecordStatus::Fail),
        indeterminate: count(RecordStatus::Indeterminate),
        precision_exhausted: count(RecordStatus::PrecisionExhausted),
    };
    let header = Header {
        parameters: Parameters {
            label: f.label.clone(),
            p,
            a,
            level,
            precision: opts.precision,
            twist_convention: opts.convention,
            frobenius_shift: opts.frobenius_shift,
        },
        assumptions: ASSUMPTIONS.iter().map(|s| s.to_string()).collect(),
        classification: setup.classification.clone(),
    };
    Ok(VerificationReport { header, records, inflation, summary })
}

/// Inflate every representation to level `n + 1` and compare both sides.
fn inflation_check(
    f: &FormData,
    level: u32,
    opts: &VerifyOptions,
    setup: &LevelSetup,
    irreps: &[ArtinRep],
) -> Result<InflationCheck> {
    let next = level + 1;
    let rc = RepContext::new(&setup.ctx, next)?;
    let term = assemble_error_term(&setup.classification, f, &setup.ctx, next, opts.convention)?
        .with_frobenius_shift(opts.frobenius_shift);
    let mut mismatches = Vec::new();
    for eta in irreps {
        let up = eta.inflate(&rc)?;
        let low = evaluate_sides(f, eta, &setup.term, &setup.classification)?;
        let high = evaluate_sides(f, &up, &term, &setup.classification)?;
        let lhs_ok = match (&low.lhs, &high.lhs) {
            (Some(a), Some(b)) => a.embed(next).same_value(b),
            (None, None) => true,
            _ => false,
        };
        let rhs_ok = low.rhs.embed(next).same_value(&high.rhs);
        if !(lhs_ok && rhs_ok) {
            mismatches.push(format!("{} (lhs {lhs_ok}, rhs {rhs_ok})", eta.label()));
        }
    }
    Ok(InflationCheck { to_level: next, checked: irreps.len(), consistent: mismatches.is_empty(), mismatches })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
}

pub fn render_report(r: &VerificationReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(r).map_err(|e| Error::Io(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Text => Ok(render_text(r)),
    }
}

fn render_text(r: &VerificationReport) -> String {
    let mut s = String::new();
    let pr = &r.header.parameters;
    let c = &r.header.classification;
    let _ = writeln!(
        s,
        "form {} | p = {} | a = {} | level n = {} | precision {} | convention {} | frobenius shift {}",
        pr.label, pr.p, pr.a, pr.level, pr.precision, pr.twist_convention, pr.frobenius_shift
    );
    let _ = writeln!(s, "P0 = {:?}  P1 = {:?}  P2 = {:?}", c.p0, c.p1, c.p2);
    for e in &c.evidence {
        let _ = writeln!(s, "  q = {}: {}", e.q, e.reason);
    }
    if let Some(w) = &c.override_warning {
        let _ = writeln!(s, "  warning: {w}");
    }
    for rec in &r.records {
        let v = |x: &Option<SideValue>| x.as_ref().map(|s| s.valuation.clone()).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            s,
            "{:<28} dim {:>3}  v(lhs) = {:>6}  v(rhs) = {:>6}  v(ratio) = {:>6}  {}{}",
            rec.label,
            rec.dimension,
            v(&rec.lhs),
            v(&rec.rhs),
            rec.ratio_valuation.clone().unwrap_or_else(|| "-".into()),
            match rec.status {
                RecordStatus::Pass => "PASS",
                RecordStatus::Fail => "FAIL",
                RecordStatus::Indeterminate => "INDETERMINATE",
                RecordStatus::PrecisionExhausted => "PRECISION",
            },
            if rec.exact_ratio_one { " (ratio exactly 1)" } else { "" }
        );
    }
    if let Some(i) = &r.inflation {
        let _ = writeln!(
            s,
            "inflation to level {}: {} checked, {}",
            i.to_level,
            i.checked,
            if i.consistent { "consistent".to_string() } else { format!("mismatches {:?}", i.mismatches) }
        );
    }
    let sm = &r.summary;
    let _ = writeln!(
        s,
        "summary: {} | {} of {} passed, {} failed, {} indeterminate, {} precision",
        if sm.pass { "PASS" } else { "FAIL" },
        sm.passed,
        sm.total,
        sm.failed,
        sm.indeterminate,
        sm.precision_exhausted
    );
    s
}

/// Write the report to `path`, or to standard output when `path` is `None`.
pub fn emit_report(r: &VerificationReport, format: ReportFormat, path: Option<&Path>) -> Result<()> {
    let text = render_report(r, format)?;
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FORM: &str = r#"{"label": "11a1", "weight": 2, "level": 11,
        "coefficients": {"2": -2, "3": -1, "11": 1}, "special": {"11": {"delta": 1}}}"#;

    #[test]
    fn parse_minimal() {
        let f = parse_form(FORM).unwrap();
        assert_eq!(f.a_q(2).unwrap(), -2);
        assert_eq!(f.delta(11).unwrap(), 1);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_form("{"), Err(Error::Parse(_))));
        let odd = FORM.replace("\"weight\": 2", "\"weight\": 3");
        assert!(matches!(parse_form(&odd), Err(Error::SchemaViolation(_))));
        let bad_level = FORM.replace("\"level\": 11", "\"level\": 12");
        assert!(matches!(parse_form(&bad_level), Err(Error::SchemaViolation(_))));
        let bare = FORM.replace("{\"delta\": 1}", "-1");
        assert!(matches!(parse_form(&bare), Err(Error::InconsistentSpecialData { .. })));
    }

    #[test]
    fn headline_level_one() {
        let f = parse_form(FORM).unwrap();
        let r = verify_functional_equation(&f, 11, 5, 1, &VerifyOptions::default()).unwrap();
        assert!(r.summary.pass, "{}", render_text(&r));
        assert_eq!(r.exit_code(), 0);
    }
}
