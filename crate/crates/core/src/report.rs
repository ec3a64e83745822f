//! Rendering of reports as JSON, CSV or aligned text. Floating-point values
//! are printed with 12 significant digits.

use serde_json::{json, Value};

use crate::certify::{CertificateReport, ComparisonRow, LevelRecord, Verdict, CONFIRMATION_CAVEAT};
use crate::linalg::C64;
use crate::models::ValidationReport;
use crate::moments::{to_f64, Rational};
use crate::transfer::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// `x` in scientific notation with 12 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

/// `x` rounded to 12 significant digits, for JSON numbers.
pub fn round_sig(x: f64) -> f64 {
    if x.is_finite() {
        fmt_float(x).parse().unwrap_or(x)
    } else {
        x
    }
}

fn json_float(x: f64) -> Value {
    json!(round_sig(x))
}

fn json_integer(v: &num_bigint::BigInt) -> Value {
    match u64::try_from(v) {
        Ok(x) => json!(x),
        Err(_) => json!(v.to_string()),
    }
}

fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, &w)| format!("{c:>w$}")).collect();
        out.push_str(padded.join("  ").trim_end());
        out.push('\n');
    };
    line(header.to_vec(), &mut out);
    line(widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>().iter().map(String::as_str).collect(), &mut out);
    for row in rows {
        line(row.iter().map(String::as_str).collect(), &mut out);
    }
    out
}

fn verdict_json(v: &Verdict) -> Value {
    match v {
        Verdict::ConfirmedUpTo { k_max, warnings } => {
            json!({"kind": "ConfirmedUpTo", "k_max": k_max, "warnings": warnings})
        }
        Verdict::RefutedAt { k, m_k, c_k } => {
            json!({"kind": "RefutedAt", "k": k, "m_k": m_k, "c_k": json_integer(c_k)})
        }
        Verdict::Inconsistent { k, m_k, c_k } => {
            json!({"kind": "Inconsistent", "k": k, "m_k": m_k, "c_k": json_integer(c_k)})
        }
    }
}

fn level_json(l: &LevelRecord) -> Value {
    json!({
        "k": l.k,
        "m_k": l.m_k,
        "c_k": json_integer(&l.c_k),
        "marginal": l.marginal,
        "kernel_count": l.kernel_count,
        "cesaro_count": l.cesaro_count,
        "cesaro_rounds": l.cesaro_rounds,
        "norm_estimate": json_float(l.norm_estimate),
    })
}

pub fn certificate_json(report: &CertificateReport) -> Value {
    json!({
        "levels": report.levels.iter().map(level_json).collect::<Vec<_>>(),
        "verdict": verdict_json(&report.verdict),
        "summary": report.verdict.label(),
        "caveat": CONFIRMATION_CAVEAT,
        "model_sha256": report.model_digest,
        "oracle_sha256": report.oracle_digest,
        "tolerance": json_float(report.tolerance),
    })
}

pub fn render_certificate(report: &CertificateReport, format: Format) -> String {
    let verdict = report.verdict.label();
    match format {
        Format::Json => pretty(&certificate_json(report)),
        Format::Csv => {
            let mut out = String::from("k,m_k,c_k,marginal,verdict\n");
            for l in &report.levels {
                out.push_str(&format!("{},{},{},{},{}\n", l.k, l.m_k, l.c_k, l.marginal, verdict));
            }
            out
        }
        Format::Text => {
            let rows: Vec<Vec<String>> = report
                .levels
                .iter()
                .map(|l| {
                    vec![
                        l.k.to_string(),
                        l.m_k.to_string(),
                        l.c_k.to_string(),
                        if l.marginal { "yes" } else { "no" }.to_string(),
                        fmt_float(l.norm_estimate),
                    ]
                })
                .collect();
            let mut out = table(&["k", "m_k", "c_k", "marginal", "norm"], &rows);
            out.push_str(&format!("verdict: {verdict}\n"));
            if matches!(report.verdict, Verdict::ConfirmedUpTo { .. }) {
                out.push_str(&format!("note: {CONFIRMATION_CAVEAT}\n"));
            }
            out.push_str(&format!("tolerance: {}\n", fmt_float(report.tolerance)));
            out.push_str(&format!("model sha256: {}\n", report.model_digest));
            out.push_str(&format!("oracle sha256: {}\n", report.oracle_digest));
            out
        }
    }
}

/// Partial levels of a failed run, for diagnostics.
pub fn render_levels(levels: &[LevelRecord]) -> String {
    let rows: Vec<Vec<String>> =
        levels.iter().map(|l| vec![l.k.to_string(), l.m_k.to_string(), l.c_k.to_string()]).collect();
    table(&["k", "m_k", "c_k"], &rows)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

/// Values of `φ̃` alone.
pub fn render_idempotent(rows: &[(Word, C64)], format: Format) -> String {
    match format {
        Format::Json => pretty(&json!({
            "rows": rows.iter().map(|(w, z)| json!({
                "word": w.to_string(),
                "re": json_float(z.re),
                "im": json_float(z.im),
            })).collect::<Vec<_>>()
        })),
        Format::Csv => {
            let mut out = String::from("word,re,im\n");
            for (w, z) in rows {
                out.push_str(&format!("\"{w}\",{},{}\n", fmt_float(z.re), fmt_float(z.im)));
            }
            out
        }
        Format::Text => {
            let body: Vec<Vec<String>> =
                rows.iter().map(|(w, z)| vec![w.to_string(), fmt_float(z.re), fmt_float(z.im)]).collect();
            table(&["word", "re", "im"], &body)
        }
    }
}

pub fn render_comparisons(rows: &[ComparisonRow], format: Format) -> String {
    match format {
        Format::Json => pretty(&json!({
            "rows": rows.iter().map(|r| json!({
                "word": r.word.to_string(),
                "idempotent_re": json_float(r.idempotent.re),
                "idempotent_im": json_float(r.idempotent.im),
                "haar": r.haar.to_string(),
                "haar_value": json_float(to_f64(&r.haar)),
                "difference": json_float(r.difference),
            })).collect::<Vec<_>>(),
            "max_difference": json_float(rows.iter().map(|r| r.difference).fold(0.0, f64::max)),
        })),
        Format::Csv => {
            let mut out = String::from("word,idempotent_re,idempotent_im,haar,difference\n");
            for r in rows {
                out.push_str(&format!(
                    "\"{}\",{},{},{},{}\n",
                    r.word,
                    fmt_float(r.idempotent.re),
                    fmt_float(r.idempotent.im),
                    r.haar,
                    fmt_float(r.difference)
                ));
            }
            out
        }
        Format::Text => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.word.to_string(),
                        fmt_float(r.idempotent.re),
                        fmt_float(r.idempotent.im),
                        r.haar.to_string(),
                        fmt_float(r.difference),
                    ]
                })
                .collect();
            table(&["word", "idempotent re", "idempotent im", "haar", "|difference|"], &body)
        }
    }
}

pub fn render_moments(values: &[(usize, Rational)], format: Format) -> String {
    match format {
        Format::Json => pretty(&json!({
            "moments": values.iter().map(|(k, c)| json!({"k": k, "c_k": c.to_string()})).collect::<Vec<_>>()
        })),
        Format::Csv => {
            let mut out = String::from("k,c_k\n");
            for (k, c) in values {
                out.push_str(&format!("{k},{c}\n"));
            }
            out
        }
        Format::Text => {
            let body: Vec<Vec<String>> = values.iter().map(|(k, c)| vec![k.to_string(), c.to_string()]).collect();
            table(&["k", "c_k"], &body)
        }
    }
}

pub fn render_validation(report: &ValidationReport, format: Format) -> String {
    let messages = report.messages();
    match format {
        Format::Json => pretty(&json!({"valid": report.is_valid(), "violations": messages})),
        Format::Csv => {
            let mut out = String::from("violation\n");
            for m in &messages {
                out.push_str(&format!("\"{m}\"\n"));
            }
            out
        }
        Format::Text => {
            if messages.is_empty() {
                "model is valid\n".to_string()
            } else {
                messages.iter().map(|m| format!("violation: {m}\n")).collect()
            }
        }
    }
}
