//! Command-line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use ringfactor_core::stability::{chebyshev_samples, dense_oracle_log, sample_scale};
use ringfactor_core::{assemble_global_basis, releq_residual, stability_operator};

use crate::config::{parse_config, JobConfig, OmegaSpec, Tolerances};
use crate::error::{exit, CliError};
use crate::pipeline::{prepare, run_analyze, run_verify, Gates, Status};
use crate::report::{render_text, selected_factors, to_json, write_csv};
use crate::svg::{column_file_name, emit_basis_column};

#[derive(Debug, Parser)]
#[command(name = "ringfactor", version, about = "Symmetry-adapted factorization of ring-system stability polynomials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Debug, clap::Args)]
pub struct Common {
    /// Job configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory for report, CSV and diagram files.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Override every gated threshold.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Restrict factors and diagrams to blocks whose label starts with this.
    #[arg(long)]
    pub block: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full pipeline: solve, decompose, factor, verify and report.
    Analyze(Common),
    /// Run the invariant suite and print one line per invariant.
    Verify(Common),
    /// Solve for (or check) the relative equilibrium.
    Releq(Common),
    /// Write an SVG for each basis column.
    Diagram(Common),
    /// Compare the factor product with the dense determinant.
    Oracle(Common),
}

/// Runs a command, writing normal output to `out`; returns the exit code.
pub fn run<W: Write>(cli: Cli, out: &mut W) -> i32 {
    let result = match cli.command {
        Command::Analyze(c) => analyze(&c, out),
        Command::Verify(c) => verify(&c, out),
        Command::Releq(c) => releq(&c, out),
        Command::Diagram(c) => diagram(&c, out),
        Command::Oracle(c) => oracle(&c, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn load(c: &Common) -> Result<(JobConfig, Gates), CliError> {
    let config = parse_config(&c.config)?;
    if let Some(t) = c.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(crate::error::ConfigErrors(vec![format!("--tol must be positive, found {t}")]).into());
        }
    }
    let tolerances = c.tol.map(Tolerances::uniform).unwrap_or(config.tolerances);
    Ok((config.clone(), Gates::resolve(&tolerances)))
}

fn write_out<W: Write>(out: &mut W, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(|e| CliError::Output(format!("stdout: {e}")))
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn gate_code(passed: bool) -> i32 {
    if passed {
        exit::OK
    } else {
        exit::NUMERICAL
    }
}

fn analyze<W: Write>(c: &Common, out: &mut W) -> Result<i32, CliError> {
    let (config, gates) = load(c)?;
    let report = run_analyze(&config, &gates)?;
    let block = c.block.as_deref();
    let text = render_text(&report, block);
    let json = to_json(&report)?;
    match c.format {
        Format::Text => write_out(out, &text)?,
        Format::Machine => write_out(out, &(json.clone() + "\n"))?,
    }
    if let Some(dir) = &c.out {
        ensure_dir(dir)?;
        if config.outputs.report {
            write_file(&dir.join("report.json"), json.as_bytes())?;
            write_file(&dir.join("report.txt"), text.as_bytes())?;
        }
        if config.outputs.csv {
            let mut buf = Vec::new();
            write_csv(&report, block, &mut buf)?;
            write_file(&dir.join("factors.csv"), &buf)?;
        }
        if config.outputs.diagrams {
            write_diagrams(&config, block, &dir.join("diagrams"))?;
        }
    }
    Ok(gate_code(report.passed))
}

fn verify<W: Write>(c: &Common, out: &mut W) -> Result<i32, CliError> {
    let (config, gates) = load(c)?;
    let ev = run_verify(&config, &gates)?;
    match c.format {
        Format::Text => {
            for inv in &ev.invariants {
                write_out(out, &(inv.line() + "\n"))?;
            }
            let failed = ev.invariants.iter().filter(|i| i.status == Status::Fail).count();
            write_out(out, &format!("{} checks, {failed} failed\n", ev.invariants.len()))?;
        }
        Format::Machine => {
            let json = serde_json::to_string_pretty(&ev.invariants).map_err(|e| CliError::Output(e.to_string()))?;
            write_out(out, &(json + "\n"))?;
        }
    }
    Ok(gate_code(ev.passed()))
}

fn releq<W: Write>(c: &Common, out: &mut W) -> Result<i32, CliError> {
    let (config, gates) = load(c)?;
    let prepared = prepare(&config)?;
    let sys = &prepared.system;
    let residual = releq_residual(sys, &config.kind, prepared.omega).map_err(|e| CliError::core("residual", e))?;
    let op = stability_operator(sys, &config.kind, prepared.omega).map_err(|e| CliError::core("operator", e))?;
    let radii: Vec<f64> = sys.rings().iter().map(|r| r.radius()).collect();
    let value = serde_json::json!({
        "omega": prepared.omega,
        "omega_solved": config.omega == OmegaSpec::Solve,
        "radii": radii,
        "residual_norm": residual.amax(),
        "relative_residual": op.releq_relative_residual,
        "iterations": prepared.solution.as_ref().map(|s| s.iterations),
    });
    match c.format {
        Format::Text => {
            write_out(out, &format!("omega: {}\n", prepared.omega))?;
            write_out(out, &format!("radii: {radii:?}\n"))?;
            write_out(
                out,
                &format!("residual: {:.3e} (relative {:.3e})\n", residual.amax(), op.releq_relative_residual),
            )?;
            if let Some(sol) = &prepared.solution {
                write_out(out, &format!("iterations: {}\n", sol.iterations))?;
            }
        }
        Format::Machine => write_out(out, &format!("{value:#}\n"))?,
    }
    Ok(match prepared.solution {
        Some(_) => gate_code(residual.amax() <= gates.solver),
        None => exit::OK,
    })
}

fn write_diagrams(config: &JobConfig, block: Option<&str>, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let prepared = prepare(config)?;
    let sys = &prepared.system;
    let basis = assemble_global_basis(sys).map_err(|e| CliError::core("symmetry-adapted basis", e))?;
    ensure_dir(dir)?;
    let mut written = Vec::new();
    for plan in &basis.blocks {
        if block.is_some_and(|b| !plan.label.starts_with(b)) {
            continue;
        }
        for i in plan.columns.clone() {
            let path = dir.join(column_file_name(i, &basis.columns[i].label));
            emit_basis_column(sys, &basis, i, &path)?;
            written.push(path);
        }
    }
    Ok(written)
}

fn diagram<W: Write>(c: &Common, out: &mut W) -> Result<i32, CliError> {
    let (config, _) = load(c)?;
    let dir = c.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let written = write_diagrams(&config, c.block.as_deref(), &dir)?;
    if written.is_empty() {
        return Err(CliError::Output(format!("no block matches {:?}", c.block.as_deref().unwrap_or(""))));
    }
    for p in &written {
        write_out(out, &format!("{}\n", p.display()))?;
    }
    Ok(exit::OK)
}

fn oracle<W: Write>(c: &Common, out: &mut W) -> Result<i32, CliError> {
    let (config, gates) = load(c)?;
    let report = run_analyze(&config, &gates)?;
    let o = &report.factorization.oracle;
    let prepared = prepare(&config)?;
    let op = stability_operator(&prepared.system, &config.kind, prepared.omega)
        .map_err(|e| CliError::core("operator", e))?;
    let samples = chebyshev_samples(sample_scale(&op), o.samples.len());
    let dense = dense_oracle_log(&op, &samples);
    let factors = selected_factors(&report, None);
    match c.format {
        Format::Text => {
            write_out(
                out,
                &format!("{:>14} {:>22} {:>22} {:>12}\n", "lambda", "ln|det|", "ln|product|", "rel. error"),
            )?;
            for ((l, (_, dl)), err) in samples.iter().zip(&dense).zip(&o.relative_errors) {
                let pl: f64 = factors.iter().map(|f| f.eval_log(*l).1).sum();
                write_out(out, &format!("{l:>14.6e} {dl:>22.12e} {pl:>22.12e} {err:>12.3e}\n"))?;
            }
            write_out(
                out,
                &format!(
                    "max relative error {:.3e} (threshold {:.1e})\n",
                    report.factorization.oracle_residual, gates.oracle
                ),
            )?;
        }
        Format::Machine => {
            let json = serde_json::to_string_pretty(o).map_err(|e| CliError::Output(e.to_string()))?;
            write_out(out, &(json + "\n"))?;
        }
    }
    Ok(gate_code(report.factorization.oracle_residual <= gates.oracle))
}
