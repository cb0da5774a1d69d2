//! Text, JSON and CSV renderings of a [`RunReport`].

use std::fmt::Write as _;
use std::io::Write;

use ringfactor_core::{Phase, PolyFactor, RingKind};

use crate::error::CliError;
use crate::pipeline::RunReport;

/// Factors shown in reports: the refined list when the pairs could be
/// split off, restricted to labels starting with `block` if given.
pub fn selected_factors<'a>(report: &'a RunReport, block: Option<&str>) -> Vec<&'a PolyFactor> {
    report
        .factorization
        .finest_factors()
        .iter()
        .filter(|f| block.map_or(true, |b| f.block_label.starts_with(b)))
        .collect()
}

pub fn to_json(report: &RunReport) -> Result<String, CliError> {
    serde_json::to_string_pretty(report).map_err(|e| CliError::Output(format!("report serialization: {e}")))
}

pub fn from_json(text: &str) -> Result<RunReport, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Output(format!("report parse: {e}")))
}

/// One row per factor: label, size, degree, coefficients in ascending order.
pub fn write_csv<W: Write>(report: &RunReport, block: Option<&str>, out: W) -> Result<(), CliError> {
    let err = |e: csv::Error| CliError::Output(format!("csv: {e}"));
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    w.write_record(["label", "size", "degree", "coefficients"]).map_err(err)?;
    for f in selected_factors(report, block) {
        let mut row = vec![f.block_label.clone(), f.size.to_string(), f.degree.to_string()];
        row.extend(f.coefficients.iter().map(|c| format!("{c:e}")));
        w.write_record(&row).map_err(err)?;
    }
    w.flush().map_err(|e| CliError::Output(format!("csv: {e}")))
}

fn ring_line(i: usize, kind: &RingKind, mass: f64) -> String {
    match kind {
        RingKind::Center => format!("  [{i}] center       mass {mass}"),
        RingKind::Regular { radius, phase } => {
            let phase = match phase {
                Phase::Aligned => "0",
                Phase::Staggered => "pi/n",
            };
            format!("  [{i}] regular      mass {mass}  radius {radius}  phase {phase}")
        }
        RingKind::Semiregular { radius, half_gap } => {
            format!("  [{i}] semiregular  mass {mass}  radius {radius}  half gap {half_gap:.6}")
        }
    }
}

pub fn render_text(report: &RunReport, block: Option<&str>) -> String {
    let mut s = String::new();
    let sys = &report.system;
    let p = &report.provenance;
    let _ = writeln!(s, "{} {}  config {}", p.tool, p.version, &p.config_hash[..16]);
    let (a, b, c) = sys.type_abc;
    let _ = writeln!(s, "\nsystem: D_{}, type ({a},{b},{c}), {} points", sys.n, sys.points);
    for (i, r) in sys.rings.iter().enumerate() {
        let _ = writeln!(s, "{}", ring_line(i, &r.kind, r.mass));
    }

    let r = &report.releq;
    let _ = writeln!(s, "\npotential: {}", report.potential.describe());
    let source = if r.omega_solved { "solved" } else { "given" };
    let _ = writeln!(s, "omega: {} ({source})", r.omega);
    let _ = writeln!(
        s,
        "relative equilibrium: {} (residual {:.3e}, relative {:.3e})",
        if r.at_relative_equilibrium { "yes" } else { "no" },
        r.residual_norm,
        r.relative_residual
    );
    if let Some(sol) = &r.solver {
        let _ = writeln!(s, "solver: {} iterations, converged {}", sol.iterations, sol.converged);
    }

    let _ = writeln!(s, "\nisotypic components:");
    for c in &report.decomposition {
        let _ = writeln!(s, "  {:<6} V_{}  dim {:>3}  (expected {})", c.label, c.sublabel, c.dimension, c.expected);
    }

    let f = &report.factorization;
    let mut profile = f.degree_profile.clone();
    profile.sort_unstable();
    let _ = writeln!(s, "\nblocks:");
    for bl in &report.blocks {
        let _ = writeln!(
            s,
            "  {:<12} size {:>3}  off-block {:.2e}  J form {:.2e}",
            bl.label, bl.size, bl.off_block_residual, bl.j_residual
        );
    }
    let _ = writeln!(
        s,
        "degree profile {:?} (expected {}), degree sum {} of {}, oracle {:.3e}, {}",
        profile,
        if f.profile_matches { "match" } else { "MISMATCH" },
        f.degree_sum,
        f.expected_degree_sum,
        f.oracle_residual,
        if f.verified { "verified" } else { "UNVERIFIED" }
    );

    let _ = writeln!(s, "\nfactors:");
    for pf in selected_factors(report, block) {
        let _ = writeln!(s, "  {} (size {}, degree {})", pf.block_label, pf.size, pf.degree);
        let coeffs: Vec<String> = pf.coefficients.iter().map(|c| format!("{c:.6e}")).collect();
        let _ = writeln!(s, "    coefficients: [{}]", coeffs.join(", "));
        let roots: Vec<String> = pf.roots.iter().map(|(re, im)| format!("{re:.6}{im:+.6}i")).collect();
        let _ = writeln!(s, "    roots: [{}]", roots.join(", "));
    }

    let _ = writeln!(s, "\ninvariants:");
    for inv in &report.invariants {
        let _ = writeln!(s, "  {}", inv.line());
    }
    if !report.flags.is_empty() {
        let _ = writeln!(s, "\nflags:");
        for fl in &report.flags {
            let _ = writeln!(s, "  - {fl}");
        }
    }
    let _ = writeln!(s, "\nresult: {}", if report.passed { "all gated checks pass" } else { "GATED CHECK FAILED" });
    s
}
