//! Verification reports and their JSON, CSV and text renderings.
//!
//! JSON output has sorted keys and every float printed with 17 significant
//! digits, so identical reports always serialize to identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use serde_json::{json, Map, Value};

use crate::error::Result;
use crate::hilbert::Complex;
use crate::steering::ContextTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
            Status::Error => "error",
        }
    }
}

/// One identity check: `lhs` compared with `rhs` at `tolerance`.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckRecord {
    pub id: String,
    pub eq_tag: String,
    pub status: Status,
    pub lhs: Option<Complex>,
    pub rhs: Option<Complex>,
    pub deviation: Option<f64>,
    pub tolerance: f64,
    pub detail: Option<String>,
}

impl CheckRecord {
    /// Pass exactly when `|lhs - rhs| <= tolerance`.
    pub fn compare(id: impl Into<String>, eq_tag: &str, lhs: Complex, rhs: Complex, tolerance: f64) -> Self {
        let deviation = (lhs - rhs).norm();
        let status = if deviation <= tolerance { Status::Pass } else { Status::Fail };
        CheckRecord {
            id: id.into(),
            eq_tag: eq_tag.to_string(),
            status,
            lhs: Some(lhs),
            rhs: Some(rhs),
            deviation: Some(deviation),
            tolerance,
            detail: None,
        }
    }

    pub fn compare_real(id: impl Into<String>, eq_tag: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        CheckRecord::compare(id, eq_tag, Complex::new(lhs, 0.0), Complex::new(rhs, 0.0), tolerance)
    }

    pub fn skipped(id: impl Into<String>, eq_tag: &str, reason: impl Into<String>, tolerance: f64) -> Self {
        CheckRecord::without_values(id, eq_tag, Status::Skipped, reason, tolerance)
    }

    pub fn error(id: impl Into<String>, eq_tag: &str, reason: impl Into<String>, tolerance: f64) -> Self {
        CheckRecord::without_values(id, eq_tag, Status::Error, reason, tolerance)
    }

    fn without_values(id: impl Into<String>, eq_tag: &str, status: Status, reason: impl Into<String>, tolerance: f64) -> Self {
        CheckRecord {
            id: id.into(),
            eq_tag: eq_tag.to_string(),
            status,
            lhs: None,
            rhs: None,
            deviation: None,
            tolerance,
            detail: Some(reason.into()),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
    pub error: usize,
}

impl Summary {
    pub fn total(&self) -> usize {
        self.pass + self.fail + self.skipped + self.error
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub name: String,
    pub checks: Vec<CheckRecord>,
    pub table: Option<ContextTable>,
    /// Named scalar results that are not identity checks.
    pub metrics: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(name: impl Into<String>) -> Self {
        Report { name: name.into(), checks: Vec::new(), table: None, metrics: BTreeMap::new() }
    }

    pub fn summary(&self) -> Summary {
        let mut s = Summary::default();
        for c in &self.checks {
            match c.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::Skipped => s.skipped += 1,
                Status::Error => s.error += 1,
            }
        }
        s
    }

    /// No failed and no errored checks.
    pub fn all_passed(&self) -> bool {
        let s = self.summary();
        s.fail == 0 && s.error == 0
    }

    pub fn check(&self, id: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.id == id)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Text,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "text" => Ok(ReportFormat::Text),
            other => Err(format!("unknown format {other:?} (expected json, csv or text)")),
        }
    }
}

/// Writes `report` to `sink` in the requested format.
pub fn emit_report<W: Write>(report: &Report, format: ReportFormat, sink: &mut W) -> Result<()> {
    sink.write_all(render_report(report, format).as_bytes())?;
    sink.flush()?;
    Ok(())
}

pub fn render_report(report: &Report, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut out = String::new();
            write_json(&report_value(report), 0, &mut out);
            out.push('\n');
            out
        }
        ReportFormat::Csv => render_csv(report),
        ReportFormat::Text => render_text(report),
    }
}

/// Renders a context table with its total variance.
pub fn render_table(table: &ContextTable, total_variance: f64, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut v = table_value(table);
            v["total_variance"] = Value::from(total_variance);
            let mut out = String::new();
            write_json(&v, 0, &mut out);
            out.push('\n');
            out
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["m", "nu", "joint_probability", "conditional_probability", "weak_value_re", "weak_value_im"])
                .expect("in-memory write");
            for c in &table.cells {
                let (wr, wi) = c.weak_value.map_or((String::new(), String::new()), |z| (format_float(z.re), format_float(z.im)));
                w.write_record([
                    c.m.to_string(),
                    c.nu.to_string(),
                    format_float(c.joint_probability),
                    format_float(c.conditional_probability),
                    wr,
                    wi,
                ])
                .expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
        }
        ReportFormat::Text => {
            let mut out = format!("{:>3} {:>3} {:>14} {:>14}  weak value\n", "m", "nu", "P(m,nu)", "P(nu|m)");
            for c in &table.cells {
                let wv = c.weak_value.map_or_else(|| "undefined".to_string(), short);
                let _ = writeln!(out, "{:>3} {:>3} {:>14.10} {:>14.10}  {}", c.m, c.nu, c.joint_probability, c.conditional_probability, wv);
            }
            for (k, o) in table.outcomes.iter().enumerate() {
                let est = o.estimate.map_or_else(|| "undefined".to_string(), short);
                let res = o.residual.map_or_else(|| "undefined".to_string(), |r| short(Complex::new(r, 0.0)));
                let _ = writeln!(out, "outcome m{k}: P = {:.10}, estimate = {est}, residual = {res}", o.probability);
            }
            let _ = writeln!(out, "total variance: {total_variance:.10}");
            out
        }
    }
}

/// `%.17g`: 17 significant digits, trailing zeros trimmed.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let sign = if negative { "-" } else { "" };
    if (-4..17).contains(&exp) {
        let body = if exp >= 0 {
            let split = exp as usize + 1;
            format!("{}.{}", &digits[..split], &digits[split..])
        } else {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
        };
        let body = body.trim_end_matches('0').trim_end_matches('.');
        format!("{sign}{body}")
    } else {
        let frac = digits[1..].trim_end_matches('0');
        let lead = &digits[..1];
        let exp_sign = if exp < 0 { '-' } else { '+' };
        let exp = exp.unsigned_abs();
        if frac.is_empty() {
            format!("{sign}{lead}e{exp_sign}{exp:02}")
        } else {
            format!("{sign}{lead}.{frac}e{exp_sign}{exp:02}")
        }
    }
}

fn complex_value(z: Option<Complex>) -> Value {
    match z {
        Some(z) => json!([z.re, z.im]),
        None => Value::Null,
    }
}

fn basis_value(b: &crate::hilbert::MeasurementBasis) -> Value {
    Value::Array(b.iter().map(|k| Value::Array(k.amps().iter().map(|a| json!([a.re, a.im])).collect())).collect())
}

fn table_value(t: &ContextTable) -> Value {
    let cells: Vec<Value> = t
        .cells
        .iter()
        .map(|c| {
            json!({
                "m": c.m,
                "nu": c.nu,
                "joint_probability": c.joint_probability,
                "conditional_probability": c.conditional_probability,
                "weak_value": complex_value(c.weak_value),
            })
        })
        .collect();
    let outcomes: Vec<Value> = t
        .outcomes
        .iter()
        .map(|o| {
            json!({
                "probability": o.probability,
                "estimate": complex_value(o.estimate),
                "residual": o.residual.map_or(Value::Null, Value::from),
            })
        })
        .collect();
    json!({
        "m_basis": basis_value(&t.m_basis),
        "nu_basis": basis_value(&t.nu_basis),
        "cells": cells,
        "outcomes": outcomes,
    })
}

fn report_value(r: &Report) -> Value {
    let checks: Vec<Value> = r
        .checks
        .iter()
        .map(|c| {
            json!({
                "id": c.id,
                "eq_tag": c.eq_tag,
                "status": c.status.as_str(),
                "lhs": complex_value(c.lhs),
                "rhs": complex_value(c.rhs),
                "deviation": c.deviation.map_or(Value::Null, Value::from),
                "tolerance": c.tolerance,
                "detail": c.detail.as_deref().map_or(Value::Null, Value::from),
            })
        })
        .collect();
    let s = r.summary();
    let mut root = Map::new();
    root.insert("name".into(), Value::from(r.name.clone()));
    root.insert("checks".into(), Value::Array(checks));
    root.insert(
        "summary".into(),
        json!({"pass": s.pass, "fail": s.fail, "skipped": s.skipped, "error": s.error, "total": s.total()}),
    );
    if let Some(t) = &r.table {
        root.insert("table".into(), table_value(t));
    }
    if !r.metrics.is_empty() {
        root.insert("metrics".into(), Value::Object(r.metrics.iter().map(|(k, v)| (k.clone(), Value::from(*v))).collect()));
    }
    Value::Object(root)
}

/// Pretty JSON with sorted keys and `%.17g` floats.
pub(crate) fn write_json(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) if !n.is_f64() => write!(out, "{u}").unwrap(),
            (_, Some(i), _) if !n.is_f64() => write!(out, "{i}").unwrap(),
            (_, _, Some(f)) => out.push_str(&format_float(f)),
            _ => out.push_str(&n.to_string()),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            // Short numeric rows such as [re, im] stay on one line.
            if items.iter().all(|x| x.is_number() || x.is_null()) {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_json(x, indent, out);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_json(x, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_json(&map[*k], indent + 1, out);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

fn render_csv(r: &Report) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let opt = |x: Option<f64>| x.map(format_float).unwrap_or_default();
    w.write_record(["scenario", "check_id", "eq_tag", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "deviation", "status"])
        .expect("in-memory write");
    for c in &r.checks {
        w.write_record([
            r.name.clone(),
            c.id.clone(),
            c.eq_tag.clone(),
            opt(c.lhs.map(|z| z.re)),
            opt(c.lhs.map(|z| z.im)),
            opt(c.rhs.map(|z| z.re)),
            opt(c.rhs.map(|z| z.im)),
            opt(c.deviation),
            c.status.as_str().to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn short(z: Complex) -> String {
    // Keep round-off residue from printing as -0.
    let tidy = |x: f64| if x.abs() < 5e-11 { 0.0 } else { x };
    let z = Complex::new(tidy(z.re), tidy(z.im));
    if z.im == 0.0 {
        format!("{:.10}", z.re)
    } else {
        format!("{:.10}{:+.10}i", z.re, z.im)
    }
}

fn render_text(r: &Report) -> String {
    let mut out = format!("scenario: {}\n", r.name);
    for c in &r.checks {
        let _ = write!(out, "  [{:<7}] {:<5} {}", c.status.as_str(), c.eq_tag, c.id);
        if let (Some(l), Some(rh), Some(d)) = (c.lhs, c.rhs, c.deviation) {
            let _ = write!(out, "  lhs={} rhs={} dev={:.2e} tol={:.0e}", short(l), short(rh), d, c.tolerance);
        }
        if let Some(d) = &c.detail {
            let _ = write!(out, "  ({d})");
        }
        out.push('\n');
    }
    for (k, v) in &r.metrics {
        let _ = writeln!(out, "  {k} = {}", format_float(*v));
    }
    let s = r.summary();
    let _ = writeln!(out, "summary: {} pass, {} fail, {} skipped, {} error", s.pass, s.fail, s.skipped, s.error);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting() {
        assert_eq!(format_float(0.64), "0.64000000000000001");
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(-2.5), "-2.5");
        assert_eq!(format_float(1e-9), "1.0000000000000001e-09");
        assert_eq!(format_float(1e20), "1e+20");
        assert_eq!(format_float(0.000123), "0.00012300000000000001");
        assert_eq!(format_float(0.25), "0.25");
        assert_eq!(format_float(-7.25e-13), "-7.2500000000000004e-13");
        assert_eq!(format_float(6.02e23), "6.02e+23");
        assert_eq!(format_float(0.0), "0");
        for x in [0.1, 1.0 / 3.0, 2.0f64.sqrt(), -7.25e-13, 6.02e23] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
    }

    proptest::proptest! {
        #[test]
        fn float_formatting_round_trips(bits in proptest::prelude::any::<u64>()) {
            let x = f64::from_bits(bits);
            proptest::prop_assume!(x.is_finite());
            let text = format_float(x);
            proptest::prop_assert_eq!(text.parse::<f64>().unwrap().to_bits(), x.to_bits());
            let mantissa: String = text.split('e').next().unwrap().chars().filter(char::is_ascii_digit).collect();
            proptest::prop_assert!(mantissa.trim_start_matches('0').len() <= 17, "{}", text);
        }
    }

    #[test]
    fn empty_report_json() {
        let text = render_report(&Report::new("empty"), ReportFormat::Json);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["checks"], json!([]));
        assert_eq!(v["name"], json!("empty"));
        assert_eq!(v["summary"]["total"], json!(0));
        // keys sorted
        let checks = text.find("\"checks\"").unwrap();
        let name = text.find("\"name\"").unwrap();
        let summary = text.find("\"summary\"").unwrap();
        assert!(checks < name && name < summary);
    }

    #[test]
    fn single_pass_csv() {
        let mut r = Report::new("demo");
        r.checks.push(CheckRecord::compare_real("x", "eq2", 0.64, 0.64, 1e-9));
        let text = render_report(&r, ReportFormat::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "scenario,check_id,eq_tag,lhs_re,lhs_im,rhs_re,rhs_im,deviation,status");
        assert!(lines[1].ends_with(",pass"));
        assert!(lines[1].starts_with("demo,x,eq2,0.64000000000000001,0,"));
    }

    #[test]
    fn pass_iff_within_tolerance() {
        assert_eq!(CheckRecord::compare_real("a", "t", 1.0, 1.0 + 1e-10, 1e-9).status, Status::Pass);
        assert_eq!(CheckRecord::compare_real("a", "t", 1.0, 1.0 + 1e-8, 1e-9).status, Status::Fail);
    }

    #[test]
    fn emission_is_byte_identical() {
        let mut r = Report::new("demo");
        r.checks.push(CheckRecord::compare_real("x", "eq2", 0.1, 0.3, 1e-9));
        r.checks.push(CheckRecord::skipped("y", "eq24", "no", 1e-9));
        r.metrics.insert("s".into(), 2.0f64.sqrt());
        for f in [ReportFormat::Json, ReportFormat::Csv, ReportFormat::Text] {
            let mut a = Vec::new();
            let mut b = Vec::new();
            emit_report(&r, f, &mut a).unwrap();
            emit_report(&r, f, &mut b).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn unwritable_sink_is_io_error() {
        struct Broken;
        impl Write for Broken {
            fn write(&mut self, _: &[u8]) -> std::io::Result<usize> {
                Err(std::io::Error::other("closed"))
            }
            fn flush(&mut self) -> std::io::Result<()> {
                Ok(())
            }
        }
        let err = emit_report(&Report::new("x"), ReportFormat::Text, &mut Broken).unwrap_err();
        assert!(matches!(err, crate::Error::Io(_)));
    }
}
