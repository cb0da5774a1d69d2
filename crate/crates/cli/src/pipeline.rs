//! The analysis pipeline and the invariant suite.

use std::time::{SystemTime, UNIX_EPOCH};

use nalgebra::{DMatrix, DVector};
use ringfactor_core::dynamics::gradient_of;
use ringfactor_core::stability::{factorize_with, Transformed, MAX_CONDITION, RELEQ_TOL};
use ringfactor_core::sym_adapt::{multiplicity, operator, summands};
use ringfactor_core::{
    assemble_global_basis, classical_checks, hessian, j_relations_check, solve_releq, stability_operator, transform,
    DihedralElement, Error as CoreError, FactorizationReport, IrrepLabel, PotentialKind, ReleqSolution, RingSpec,
    RingSystem, StabilityOperator, SymBasis,
};
use serde::{Deserialize, Serialize};

use crate::config::{JobConfig, OmegaSpec, Tolerances};
use crate::error::CliError;

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Resolved thresholds of the gated checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gates {
    pub oracle: f64,
    pub off_block: f64,
    pub algebra: f64,
    pub equivariance: f64,
    pub m_orthogonality: f64,
    pub parity: f64,
    /// `None` keeps the per-identity thresholds of the classical checks.
    pub classical: Option<f64>,
    pub solver: f64,
    pub hessian_fd: f64,
}

impl Gates {
    pub fn resolve(t: &Tolerances) -> Self {
        Self {
            oracle: t.oracle.unwrap_or(1e-8),
            off_block: t.off_block.unwrap_or(1e-9),
            algebra: t.algebra.unwrap_or(1e-11),
            equivariance: t.equivariance.unwrap_or(1e-9),
            m_orthogonality: t.m_orthogonality.unwrap_or(1e-10),
            parity: t.parity.unwrap_or(1e-8),
            classical: t.classical,
            solver: t.solver.unwrap_or(1e-10),
            hessian_fd: t.hessian_fd.unwrap_or(1e-5),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The guarantee does not apply (indefinite mass metric); reported only.
    Partial,
    Skipped,
    /// Reported value that is not gated.
    Info,
}

impl Status {
    pub fn tag(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Partial => "PARTIAL",
            Status::Skipped => "SKIP",
            Status::Info => "INFO",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantResult {
    pub name: String,
    pub residual: Option<f64>,
    pub threshold: Option<f64>,
    pub status: Status,
    pub detail: Option<String>,
}

impl InvariantResult {
    fn gated(name: &str, residual: f64, threshold: f64) -> Self {
        let status = if residual <= threshold { Status::Pass } else { Status::Fail };
        Self { name: name.into(), residual: Some(residual), threshold: Some(threshold), status, detail: None }
    }

    fn with_status(name: &str, residual: Option<f64>, threshold: Option<f64>, status: Status, detail: &str) -> Self {
        Self { name: name.into(), residual, threshold, status, detail: Some(detail.into()) }
    }

    fn failed(name: &str, err: &CoreError) -> Self {
        Self::with_status(name, None, None, Status::Fail, &err.to_string())
    }

    fn with_detail(mut self, detail: String) -> Self {
        self.detail = Some(detail);
        self
    }

    /// One line: `[PASS] name: residual 1.2e-15 <= 1.0e-11`.
    pub fn line(&self) -> String {
        let mut s = format!("[{}] {}", self.status.tag(), self.name);
        match (self.residual, self.threshold) {
            (Some(r), Some(t)) => {
                let cmp = if r <= t { "<=" } else { ">" };
                s += &format!(": residual {r:.3e} {cmp} {t:.1e}");
            }
            (Some(r), None) => s += &format!(": {r:.3e}"),
            _ => {}
        }
        if let Some(d) = &self.detail {
            s += &format!(" ({d})");
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub label: String,
    pub sublabel: usize,
    pub dimension: usize,
    pub expected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSummary {
    pub label: String,
    pub size: usize,
    pub columns: (usize, usize),
    pub off_block_residual: f64,
    pub j_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSummary {
    pub n: usize,
    pub type_abc: (usize, usize, usize),
    pub points: usize,
    pub rings: Vec<RingSpec>,
    pub radii: Vec<f64>,
    pub masses: Vec<f64>,
}

impl SystemSummary {
    pub fn of(sys: &RingSystem) -> Self {
        Self {
            n: sys.n(),
            type_abc: sys.type_abc(),
            points: sys.len(),
            rings: sys.rings().to_vec(),
            radii: sys.rings().iter().map(RingSpec::radius).collect(),
            masses: sys.masses().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSummary {
    pub iterations: usize,
    pub converged: bool,
    pub residual_norm: f64,
    pub free_radii: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReleqSummary {
    pub omega: f64,
    pub omega_solved: bool,
    pub residual_norm: f64,
    pub relative_residual: f64,
    pub at_relative_equilibrium: bool,
    pub solver: Option<SolverSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    /// Seconds since the Unix epoch. The only field that differs between
    /// runs of the same configuration.
    pub timestamp: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub provenance: Provenance,
    pub system: SystemSummary,
    pub potential: PotentialKind,
    pub releq: ReleqSummary,
    pub decomposition: Vec<ComponentSummary>,
    pub blocks: Vec<BlockSummary>,
    pub invariants: Vec<InvariantResult>,
    pub factorization: FactorizationReport,
    pub flags: Vec<String>,
    pub passed: bool,
}

/// The system to analyse and its rotation rate, after the optional solve.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub system: RingSystem,
    pub omega: f64,
    pub solution: Option<ReleqSolution>,
}

pub fn prepare(config: &JobConfig) -> Result<Prepared, CliError> {
    let template = config.system()?;
    match config.omega {
        OmegaSpec::Given(omega) => Ok(Prepared { system: template, omega, solution: None }),
        OmegaSpec::Solve => {
            let sol = solve_releq(&template, &config.kind, &config.free_radii, None)
                .map_err(|e| CliError::core("relative equilibrium solver", e))?;
            if !sol.converged {
                return Err(CliError::NotConverged(format!(
                    "{} iterations, residual {:.3e}",
                    sol.iterations, sol.residual_norm
                )));
            }
            Ok(Prepared { system: sol.system.clone(), omega: sol.omega, solution: Some(sol) })
        }
    }
}

/// Everything the suite computes for one system.
pub struct Evaluation {
    pub invariants: Vec<InvariantResult>,
    pub decomposition: Vec<ComponentSummary>,
    pub op: Option<StabilityOperator>,
    pub basis: Option<SymBasis>,
    pub transformed: Option<Transformed>,
    pub factorization: Option<FactorizationReport>,
    /// First module error that stopped part of the pipeline.
    pub error: Option<(String, CoreError)>,
}

impl Evaluation {
    pub fn passed(&self) -> bool {
        self.invariants.iter().all(|i| i.status != Status::Fail)
    }
}

/// Runs every invariant check on `sys` at rotation rate `omega`. Module
/// errors become failed lines; later checks that depend on the failed
/// stage are skipped.
pub fn evaluate(
    sys: &RingSystem,
    kind: &PotentialKind,
    omega: f64,
    gates: &Gates,
    solution: Option<&ReleqSolution>,
) -> Evaluation {
    let mut ev = Evaluation {
        invariants: Vec::new(),
        decomposition: Vec::new(),
        op: None,
        basis: None,
        transformed: None,
        factorization: None,
        error: None,
    };
    let record_error = |ev: &mut Evaluation, stage: &str, e: CoreError| {
        ev.invariants.push(InvariantResult::failed(stage, &e));
        if ev.error.is_none() {
            ev.error = Some((stage.to_string(), e));
        }
    };

    match group_action_residual(sys) {
        Ok(r) => ev.invariants.push(InvariantResult::gated("group action is a homomorphism", r, gates.algebra)),
        Err(e) => record_error(&mut ev, "group action is a homomorphism", e),
    }
    match decomposition(sys) {
        Ok(parts) => {
            let wrong = parts.iter().filter(|c| c.dimension != c.expected).count();
            ev.invariants.push(
                InvariantResult::gated("isotypic multiplicities", wrong as f64, 0.0)
                    .with_detail(format!("{} components", parts.len())),
            );
            ev.decomposition = parts;
        }
        Err(e) => record_error(&mut ev, "isotypic multiplicities", e),
    }
    match projector_algebra(sys) {
        Ok((products, completeness)) => {
            ev.invariants.push(InvariantResult::gated("projector products", products, gates.algebra));
            ev.invariants.push(InvariantResult::gated("projector completeness", completeness, gates.algebra));
        }
        Err(e) => record_error(&mut ev, "projector products", e),
    }
    match j_relations_check(sys) {
        Ok(r) => ev.invariants.push(InvariantResult::gated("J commutation relations", r.max_residual, gates.algebra)),
        Err(e) => record_error(&mut ev, "J commutation relations", e),
    }

    let op = match stability_operator(sys, kind, omega) {
        Ok(op) => op,
        Err(e) => {
            record_error(&mut ev, "stability operator", e);
            return ev;
        }
    };
    match equivariance(sys, &op.a) {
        Ok(r) => ev.invariants.push(InvariantResult::gated("A commutes with the group action", r, gates.equivariance)),
        Err(e) => record_error(&mut ev, "A commutes with the group action", e),
    }
    let m = sys.mass_matrix();
    let ma = &m * &op.a;
    let msym = (op.a.transpose() * &m - &ma).norm() / ma.norm().max(f64::MIN_POSITIVE);
    ev.invariants.push(InvariantResult::gated("A is M-symmetric", msym, gates.equivariance));
    match hessian_vs_fd(sys, kind) {
        Ok(r) => ev.invariants.push(InvariantResult::gated("Hessian vs finite differences", r, gates.hessian_fd)),
        Err(e) => record_error(&mut ev, "Hessian vs finite differences", e),
    }

    let at_releq = op.is_relative_equilibrium(RELEQ_TOL);
    let releq_line = InvariantResult::gated("relative equilibrium residual", op.releq_relative_residual, RELEQ_TOL);
    match solution {
        Some(sol) => {
            ev.invariants.push(releq_line);
            ev.invariants.push(InvariantResult::gated("solver residual", sol.residual_norm, gates.solver));
        }
        None => ev.invariants.push(InvariantResult { status: Status::Info, ..releq_line }),
    }

    let basis = match assemble_global_basis(sys) {
        Ok(b) => b,
        Err(e) => {
            record_error(&mut ev, "symmetry-adapted basis", e);
            ev.op = Some(op);
            return ev;
        }
    };
    ev.invariants.push(m_orthogonality(sys, &basis, gates.m_orthogonality));
    ev.invariants.push(InvariantResult::gated("J pairing of basis columns", basis.pairing_residual(), gates.algebra));
    ev.invariants.push(InvariantResult::gated("basis condition number", basis.condition, MAX_CONDITION));

    match transform(&op, &basis) {
        Ok(t) => {
            ev.invariants.push(InvariantResult::gated("off-block residual", t.off_block_residual, gates.off_block));
            let jr = t.blocks.iter().map(|b| b.j_residual).fold(0.0, f64::max);
            ev.invariants.push(InvariantResult::gated("J in standard form per block", jr, gates.algebra));
            ev.transformed = Some(t);
        }
        Err(e) => record_error(&mut ev, "block transform", e),
    }

    match factorize_with(sys, &op, &basis, gates.oracle) {
        Ok(f) => {
            let sum_gap = f.degree_sum.abs_diff(f.expected_degree_sum) as f64;
            ev.invariants.push(
                InvariantResult::gated("degree sum", sum_gap, 0.0)
                    .with_detail(format!("{} of {}", f.degree_sum, f.expected_degree_sum)),
            );
            ev.invariants.push(
                InvariantResult::gated("degree profile", if f.profile_matches { 0.0 } else { 1.0 }, 0.0)
                    .with_detail(format!("{:?} vs {:?}", sorted(&f.degree_profile), sorted(&f.expected_profile))),
            );
            ev.invariants.push(InvariantResult::gated(
                "factor product vs dense determinant",
                f.oracle_residual,
                gates.oracle,
            ));
            if let Some(p) = f.parity_residual {
                ev.invariants.push(InvariantResult::gated("factors are even in lambda", p, gates.parity));
            }
            if at_releq {
                let worst = f.sub_block_residuals.iter().map(|s| s.1).fold(0.0, f64::max);
                let limit = gates.classical.unwrap_or(1e-8);
                ev.invariants.push(InvariantResult::gated("rotation and translation pairs split off", worst, limit));
            }
            ev.factorization = Some(f);
        }
        Err(e) => record_error(&mut ev, "factorization", e),
    }

    if at_releq {
        for c in classical_checks(sys, &op) {
            let threshold = gates.classical.unwrap_or(c.threshold);
            ev.invariants.push(InvariantResult::gated(&c.name, c.residual, threshold));
        }
    } else {
        ev.invariants.push(InvariantResult::with_status(
            "classical eigenvector checks",
            None,
            None,
            Status::Skipped,
            "not a relative equilibrium",
        ));
    }

    ev.op = Some(op);
    ev.basis = Some(basis);
    ev
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}

fn group_action_residual(sys: &RingSystem) -> Result<f64, CoreError> {
    let n = sys.n();
    let r = sys.sigma_x_matrix(&DihedralElement::rotation(n, 1)?)?;
    let s = sys.sigma_x_matrix(&DihedralElement::reflection(n)?)?;
    let id = DMatrix::identity(sys.dim(), sys.dim());
    let rn = (0..n).fold(id.clone(), |acc, _| &r * acc);
    let braid = &s * &r * &s - r.transpose();
    Ok((rn - &id).amax().max((&s * &s - &id).amax()).max(braid.amax()))
}

fn decomposition(sys: &RingSystem) -> Result<Vec<ComponentSummary>, CoreError> {
    summands(sys.n())?
        .into_iter()
        .map(|(label, sub)| {
            let p = operator(sys, label, sub, sub)?;
            let dimension = ringfactor_core::linalg::rank(&p, ringfactor_core::sym_adapt::RANK_TOL);
            Ok(ComponentSummary {
                label: label.to_string(),
                sublabel: sub,
                dimension,
                expected: multiplicity(sys.n(), sys.type_abc(), label),
            })
        })
        .collect()
}

/// `p_ij p_kl = δ_jk p_il` within an irrep, zero across irreps, and
/// `Σ p_ii = I`.
fn projector_algebra(sys: &RingSystem) -> Result<(f64, f64), CoreError> {
    let mut ops: Vec<(IrrepLabel, usize, usize, DMatrix<f64>)> = Vec::new();
    for label in ringfactor_core::irrep_list(sys.n())? {
        for i in 1..=label.degree() {
            for j in 1..=label.degree() {
                ops.push((label, i, j, operator(sys, label, i, j)?));
            }
        }
    }
    let find = |l: IrrepLabel, i: usize, j: usize| &ops.iter().find(|o| o.0 == l && o.1 == i && o.2 == j).unwrap().3;
    let mut products = 0.0f64;
    for (la, i, j, a) in &ops {
        for (lb, k, l, b) in &ops {
            let ab = a * b;
            let r = if la == lb && j == k { (ab - find(*la, *i, *l)).amax() } else { ab.amax() };
            products = products.max(r);
        }
    }
    let mut total = DMatrix::<f64>::zeros(sys.dim(), sys.dim());
    for (_, i, j, p) in &ops {
        if i == j {
            total += p;
        }
    }
    let completeness = (total - DMatrix::<f64>::identity(sys.dim(), sys.dim())).amax();
    Ok((products, completeness))
}

fn equivariance(sys: &RingSystem, a: &DMatrix<f64>) -> Result<f64, CoreError> {
    let norm = a.norm().max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for g in DihedralElement::all(sys.n())? {
        let s = sys.sigma_x_matrix(&g)?;
        worst = worst.max((a * &s - &s * a).norm() / norm);
    }
    Ok(worst)
}

/// Central differences of the analytic gradient against the Hessian.
fn hessian_vs_fd(sys: &RingSystem, kind: &PotentialKind) -> Result<f64, CoreError> {
    let h = hessian(sys, kind)?;
    let x0: Vec<f64> = sys.config_vector().iter().copied().collect();
    let step = 1e-5 * sys.max_radius().max(1.0);
    let mut fd = DMatrix::zeros(x0.len(), x0.len());
    for i in 0..x0.len() {
        let mut xp = x0.clone();
        let mut xm = x0.clone();
        xp[i] += step;
        xm[i] -= step;
        let col: DVector<f64> =
            (gradient_of(&xp, sys.masses(), kind)? - gradient_of(&xm, sys.masses(), kind)?) / (2.0 * step);
        fd.set_column(i, &col);
    }
    Ok((&h - fd).norm() / h.norm().max(f64::MIN_POSITIVE))
}

/// Normalized Gram entries of column pairs the construction makes
/// M-orthogonal. With masses of both signs the metric is indefinite and
/// the result is reported, not gated.
fn m_orthogonality(sys: &RingSystem, basis: &SymBasis, threshold: f64) -> InvariantResult {
    let gram = basis.m_gram(sys);
    let mut worst = 0.0f64;
    for i in 0..basis.len() {
        for j in 0..i {
            if basis.is_m_orthogonal_pair(i, j) {
                let scale = (gram[(i, i)] * gram[(j, j)]).abs().sqrt().max(f64::MIN_POSITIVE);
                worst = worst.max(gram[(i, j)].abs() / scale);
            }
        }
    }
    let name = "M-orthogonality of the basis";
    if !sys.all_masses_positive() || basis.m_orthogonality_partial {
        let why = if sys.all_masses_positive() { "Euclidean fallback in some block" } else { "masses of both signs" };
        InvariantResult::with_status(name, Some(worst), Some(threshold), Status::Partial, why)
    } else {
        InvariantResult::gated(name, worst, threshold)
    }
}

pub fn timestamp() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Full pipeline: optional solve, invariant suite, factorization report.
pub fn run_analyze(config: &JobConfig, gates: &Gates) -> Result<RunReport, CliError> {
    let prepared = prepare(config)?;
    let sys = &prepared.system;
    let ev = evaluate(sys, &config.kind, prepared.omega, gates, prepared.solution.as_ref());
    let passed = ev.passed();
    let (Some(op), Some(factorization), Some(t)) = (ev.op, ev.factorization, ev.transformed) else {
        let (stage, e) = ev.error.expect("a missing stage records its error");
        return Err(CliError::core(stage, e));
    };

    let mut flags = factorization.flags.clone();
    if let Some(b) = &ev.basis {
        flags.extend(b.notes.iter().cloned());
    }
    if !sys.all_masses_positive() {
        flags.push("M-orthogonality partial".into());
    }

    let releq = ReleqSummary {
        omega: prepared.omega,
        omega_solved: prepared.solution.is_some(),
        residual_norm: op.releq_residual_norm,
        relative_residual: op.releq_relative_residual,
        at_relative_equilibrium: factorization.at_relative_equilibrium,
        solver: prepared.solution.as_ref().map(|s| SolverSummary {
            iterations: s.iterations,
            converged: s.converged,
            residual_norm: s.residual_norm,
            free_radii: config.free_radii.clone(),
        }),
    };
    let blocks = t
        .blocks
        .iter()
        .map(|b| BlockSummary {
            label: b.label.clone(),
            size: b.size,
            columns: (b.columns.start, b.columns.end),
            off_block_residual: b.off_block_residual,
            j_residual: b.j_residual,
        })
        .collect();

    Ok(RunReport {
        provenance: Provenance {
            tool: TOOL.into(),
            version: VERSION.into(),
            config_hash: config.hash(),
            timestamp: timestamp(),
        },
        system: SystemSummary::of(sys),
        potential: config.kind,
        releq,
        decomposition: ev.decomposition,
        blocks,
        invariants: ev.invariants,
        factorization,
        flags,
        passed,
    })
}

/// Runs the invariant suite only.
pub fn run_verify(config: &JobConfig, gates: &Gates) -> Result<Evaluation, CliError> {
    let prepared = prepare(config)?;
    Ok(evaluate(&prepared.system, &config.kind, prepared.omega, gates, prepared.solution.as_ref()))
}
