//! Human-readable summary, rendered from the serialized report only.

use std::fmt::Write;

use serde_json::Value;

const DETAIL_WIDTH: usize = 96;

fn coeffs(v: &Value) -> String {
    v.get("coeffs").map_or_else(|| "-".into(), |c| c.to_string())
}

fn clip(s: &str) -> String {
    if s.chars().count() <= DETAIL_WIDTH {
        s.to_string()
    } else {
        let head: String = s.chars().take(DETAIL_WIDTH - 1).collect();
        format!("{head}…")
    }
}

fn push_all<'a>(out: &mut Vec<(&'static str, &'a Value)>, section: &'static str, list: Option<&'a Value>) {
    for c in list.and_then(Value::as_array).into_iter().flatten() {
        out.push((section, c));
    }
}

/// Collects `(section, check)` pairs in report order.
fn checks(report: &Value) -> Vec<(&'static str, &Value)> {
    let mut out = Vec::new();
    push_all(&mut out, "validation", report.pointer("/validation/checks"));
    if let Some(b) = report.get("braid") {
        for key in ["global", "internal_sym", "internal_ext"] {
            if let Some(c) = b.get(key) {
                out.push(("braid", c));
            }
        }
        for key in ["count", "braid", "confluence"] {
            if let Some(c) = b.get("pbw").and_then(|p| p.get(key)) {
                out.push(("braid", c));
            }
        }
    }
    push_all(&mut out, "hilbert", report.pointer("/hilbert/checks"));
    push_all(&mut out, "classification", report.pointer("/classification/checks"));
    if let Some(k) = report.get("koszul") {
        for key in ["single", "full"] {
            if let Some(c) = k.get(key).and_then(|p| p.get("check")) {
                out.push(("koszul", c));
            }
        }
    }
    push_all(&mut out, "fock", report.pointer("/fock/checks"));
    out
}

pub fn render(json: &str) -> String {
    let report: Value = match serde_json::from_str(json) {
        Ok(v) => v,
        Err(e) => return format!("unreadable report: {e}\n"),
    };
    let mut s = String::new();
    let name = report.pointer("/model/name").and_then(Value::as_str).unwrap_or("(unnamed)");
    let _ = writeln!(
        s,
        "transtat {} — {} on {name}, degree {}",
        report["tool_version"].as_str().unwrap_or("?"),
        report["command"].as_str().unwrap_or("?"),
        report["degree"]
    );
    if let Some(v) = report.get("validation") {
        let _ = writeln!(
            s,
            "model: d={} k_dim={} dim W_sym={} dim W_ext={} rank P_gen={} (sym {}, ext {})",
            v["d"], v["k_dim"], v["w_sym_dim"], v["w_ext_dim"], v["rank"]["total"], v["rank"]["sym"], v["rank"]["ext"]
        );
    }
    if let Some(h) = report.get("hilbert") {
        if let Some(x) = h.get("single") {
            let _ = writeln!(s, "single-mode series G: {}", coeffs(x));
        }
        if let Some(x) = h.get("full") {
            let _ = writeln!(s, "full series H_F:      {}", coeffs(x));
        }
    }
    if let Some(c) = report.pointer("/classification/classification") {
        let _ = writeln!(
            s,
            "classification: {} {}",
            c["kind"].as_str().unwrap_or("?"),
            c["signature_text"].as_str().unwrap_or("")
        );
    }
    if let Some(k) = report.get("koszul") {
        let _ = writeln!(s, "dual series G!: {}", coeffs(&k["single"]["dual"]));
    }
    if let Some(f) = report.get("fock") {
        let _ = writeln!(s, "Fock level dims: {}", f["dims"]);
        if let Some(sk) = f["skipped"].as_array().filter(|a| !a.is_empty()) {
            let _ = writeln!(s, "skipped (no exchange data): {}", sk.len());
        }
    }
    let list = checks(&report);
    if !list.is_empty() {
        let width = list
            .iter()
            .map(|(sec, c)| sec.len() + 1 + c["name"].as_str().map_or(0, str::len))
            .max()
            .unwrap_or(0);
        let _ = writeln!(s);
        for (sec, c) in &list {
            let label = format!("{sec}.{}", c["name"].as_str().unwrap_or("?"));
            let verdict = if c["passed"].as_bool() == Some(true) { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "  {verdict}  {label:<width$}  {}", clip(c["details"].as_str().unwrap_or("")));
        }
    }
    for a in report["alarms"].as_array().into_iter().flatten() {
        let _ = writeln!(s, "ALARM: {}", a.as_str().unwrap_or(""));
    }
    let sum = &report["summary"];
    let _ = writeln!(
        s,
        "\n{} of {} checks passed{}",
        sum["passed"],
        sum["checks"],
        if sum["all_passed"].as_bool() == Some(true) { "" } else { " — failures carry witnesses in the JSON report" }
    );
    s
}
