//! Report files: `reports.json`, `reports.csv` and the human-readable
//! `summary.txt`. No timestamps or host data anywhere, so identical runs
//! produce byte-identical files.

use std::fs;
use std::io::Write;
use std::path::Path;

use czlab_core::verify::EstimateReport;

use crate::config::RunConfig;
use crate::rules::RuleResult;

pub fn write_reports_json(path: &Path, reports: &[EstimateReport]) -> std::io::Result<()> {
    let mut f = fs::File::create(path)?;
    let body = serde_json::to_string_pretty(reports).expect("reports serialize");
    f.write_all(body.as_bytes())?;
    f.write_all(b"\n")?;
    Ok(())
}

pub fn write_reports_csv(path: &Path, reports: &[EstimateReport]) -> std::io::Result<()> {
    let mut f = fs::File::create(path)?;
    writeln!(f, "{}", EstimateReport::csv_header())?;
    for r in reports {
        writeln!(f, "{}", r.csv_row())?;
    }
    Ok(())
}

pub fn render_summary(cfg: &RunConfig, reports: &[EstimateReport], rules: &[RuleResult]) -> String {
    let mut out = String::new();
    out.push_str("regularity estimate lab - run summary\n");
    out.push_str(&format!(
        "seed {} | dimension {} | backend {} | radius ladder {}\n\n",
        cfg.seed, cfg.dimension, cfg.maximal_backend, cfg.radius_ladder
    ));

    out.push_str("measurements:\n");
    out.push_str(&format!(
        "  {:<28} {:<30} {:>10} {:>5} {:>12} {:>12} {:>12}  flags\n",
        "experiment", "label", "grid", "p", "lhs", "rhs", "ratio"
    ));
    for r in reports {
        out.push_str(&format!(
            "  {:<28} {:<30} {:>10} {:>5} {:>12.5e} {:>12.5e} {:>12.5e}  {}\n",
            r.experiment,
            r.label,
            r.grid.describe(),
            r.p.map_or("-".to_string(), |p| format!("{p}")),
            r.lhs,
            r.rhs,
            r.ratio,
            if r.degenerate { "degenerate" } else { "" }
        ));
    }

    out.push_str("\nrules:\n");
    let mut passed = 0usize;
    for rule in rules {
        if rule.pass {
            passed += 1;
        }
        out.push_str(&format!(
            "  {} [{}] {}: {}\n",
            if rule.pass { "PASS" } else { "FAIL" },
            rule.experiment,
            rule.rule,
            rule.detail
        ));
    }
    out.push_str(&format!(
        "\nRESULT: {} ({passed}/{} rules)\n",
        if passed == rules.len() { "PASS" } else { "FAIL" },
        rules.len()
    ));
    out
}

pub fn write_summary(
    path: &Path,
    cfg: &RunConfig,
    reports: &[EstimateReport],
    rules: &[RuleResult],
) -> std::io::Result<()> {
    fs::write(path, render_summary(cfg, reports, rules))
}
