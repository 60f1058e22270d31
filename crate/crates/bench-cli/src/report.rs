//! Plain-text rendering of a summary for the terminal.

use std::fmt::Write;

use crate::experiment::SummaryReport;

pub fn render(summary: &SummaryReport) -> String {
    let c = &summary.constants;
    let mut out = String::new();
    let _ = writeln!(out, "config {}", &summary.config_hash[..12.min(summary.config_hash.len())]);
    let _ = writeln!(
        out,
        "n = {}  K = {}  alpha = {:.4}  L = {:.4}  mu = {:.4}  rho = {:.4}  max sigma = {:.4e}",
        c.dimension, c.horizon, c.step_size, c.lipschitz, c.strong_convexity, c.rho, c.max_sigma
    );
    for run in &summary.runs {
        let _ = write!(out, "[{}] {} steps", run.label, run.steps);
        if let Some(p) = run.running_average_plateau {
            let _ = write!(out, "  plateau {p:.4e}");
        }
        if let Some(r) = run.final_regret {
            let _ = write!(out, "  regret {r:.4e}");
        }
        out.push('\n');
        if let Some(e) = &run.error {
            let _ = writeln!(out, "  aborted: {e}");
        }
        for b in &run.bounds {
            let status = match (b.applicable, b.violations) {
                (false, _) => "n/a ",
                (true, 0) => "ok  ",
                _ => "FAIL",
            };
            let _ = write!(out, "  {status} {:<24}", b.name);
            if b.applicable {
                let _ = write!(out, " k={}..{} violations={}", b.k_range.0, b.k_range.1, b.violations);
                if let Some(x) = b.max_excess {
                    let _ = write!(out, " max_excess={x:.3e}");
                }
                if b.approximate {
                    out.push_str(" (approximate)");
                }
            } else if let Some(n) = b.notes.first() {
                let _ = write!(out, " {n}");
            }
            out.push('\n');
        }
    }
    out
}
