//! Full audit of one algebra: structural checks, positivity statements
//! with hypothesis gating, kernel comparison, faithfulness evidence, and
//! the consistency-alarm summary. Pass `--json` for the machine-readable
//! report.
//!
//! Run with: cargo run --example audit_report [-- --json]

use wick::audit::{audit_all, AuditOptions};
use wick::coefficients::preset_tccr;

fn main() {
    let json = std::env::args().any(|a| a == "--json");
    let coeffs = preset_tccr(0.5, 2, false).unwrap();
    let report = audit_all(&coeffs, "tccr(mu = 0.5, d = 2)", 5, &AuditOptions::default())
        .expect("audit runs");
    if json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.render_text());
    }
    std::process::exit(if report.alarm_count() == 0 { 0 } else { 1 });
}
