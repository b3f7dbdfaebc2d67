use std::fmt::Write as _;

use super::{IterateTrace, TraceRecord};
use crate::problems::fmt_real;

pub const CSV_HEADER: &str = "k,merit_primary,merit_aux,dist_sq,potential,elapsed_ns";

fn opt_csv(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_default()
}

fn json_num(x: f64) -> String {
    if x.is_finite() {
        fmt_real(x)
    } else {
        "null".to_string()
    }
}

fn json_opt(x: Option<f64>) -> String {
    x.map(json_num).unwrap_or_else(|| "null".to_string())
}

/// One header line and one row per record; missing values are empty fields.
pub fn trace_to_csv(trace: &IterateTrace) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &trace.records {
        let TraceRecord {
            k,
            merit_primary,
            merit_aux,
            dist_sq,
            potential,
            elapsed_ns,
        } = *r;
        let _ = writeln!(
            out,
            "{k},{},{},{},{},{elapsed_ns}",
            fmt_real(merit_primary),
            fmt_real(merit_aux),
            opt_csv(dist_sq),
            opt_csv(potential)
        );
    }
    out
}

/// One JSON object per record; missing or non-finite values are `null`.
pub fn trace_to_jsonl(trace: &IterateTrace) -> String {
    let mut out = String::new();
    for r in &trace.records {
        let _ = writeln!(
            out,
            "{{\"k\":{},\"merit_primary\":{},\"merit_aux\":{},\"dist_sq\":{},\"potential\":{},\"elapsed_ns\":{}}}",
            r.k,
            json_num(r.merit_primary),
            json_num(r.merit_aux),
            json_opt(r.dist_sq),
            json_opt(r.potential),
            r.elapsed_ns
        );
    }
    out
}
