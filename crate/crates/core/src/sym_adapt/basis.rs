//! Construction of J-paired, symmetry-adapted bases: per orbit, then for
//! the whole ring system with the rotation/scaling and translation
//! refinements.

use std::ops::Range;

use nalgebra::{DMatrix, DVector, Vector2};
use serde::{Deserialize, Serialize};

use super::{apply_operator, multiplicity, Displacement};
use crate::dihedral::{max_rho_index, IrrepLabel};
use crate::dynamics::j_apply;
use crate::error::{Error, Result};
use crate::linalg::{condition_number, weighted_dot, Metric, Orthogonalizer};
use crate::ring_geometry::{OrbitKind, RingSystem};

/// What a sub-block of a block plan represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubBlockRole {
    /// `(Jϰ, ϰ)`: invariant only at a relative equilibrium.
    RotationScaling,
    /// `(Δ_v, Δ_h)`: rigid translations.
    Translation,
    /// Everything in the block after the leading pair.
    Remainder,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubBlock {
    pub label: String,
    pub role: SubBlockRole,
    pub columns: Range<usize>,
    /// The split is only A-invariant at a relative equilibrium.
    pub requires_releq: bool,
    /// False when the leading pair could not be separated (degenerate
    /// mass norm), in which case the sub-block split must not be used.
    pub separable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockPlan {
    pub label: String,
    pub columns: Range<usize>,
    /// Global column indices `(u, Ju)`.
    pub pairing: Vec<(usize, usize)>,
    pub sub_blocks: Vec<SubBlock>,
    /// Within-block orthogonality fell back to the Euclidean metric.
    pub m_orthogonality_partial: bool,
}

impl BlockPlan {
    pub fn size(&self) -> usize {
        self.columns.len()
    }
}

/// Ordered basis of the displacement space (or of one orbit's part of it)
/// with its block plan.
#[derive(Debug, Clone)]
pub struct SymBasis {
    pub columns: Vec<Displacement>,
    pub blocks: Vec<BlockPlan>,
    /// Columns side by side (2N × number of columns).
    pub change_of_basis: DMatrix<f64>,
    /// 2-norm condition number of `change_of_basis`.
    pub condition: f64,
    /// Columns have unit mass norm (positive masses only).
    pub normalized: bool,
    /// Some block had to be orthogonalized in the Euclidean metric.
    pub m_orthogonality_partial: bool,
    /// `(orbit, c_i)` used in `ϰ_i = p^τ(δ_{x_1}) + c_i p^τ(δ_{x_i})`.
    pub tau_constants: Vec<(usize, f64)>,
    /// `(orbit, c_i)` used in `Δ_h^{(i)} = δ_h^{(1)} + c_i δ_h^{(i)}`.
    pub translation_constants: Vec<(usize, f64)>,
    pub notes: Vec<String>,
}

impl SymBasis {
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn block(&self, label: &str) -> Option<&BlockPlan> {
        self.blocks.iter().find(|b| b.label == label)
    }

    /// Index of the block containing column `c`.
    pub fn block_of(&self, c: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.columns.contains(&c))
    }

    /// Gram matrix `Cᵀ M C`.
    pub fn m_gram(&self, sys: &RingSystem) -> DMatrix<f64> {
        let m = sys.mass_diagonal();
        let mc = DMatrix::from_fn(self.change_of_basis.nrows(), self.change_of_basis.ncols(), |r, c| {
            m[r] * self.change_of_basis[(r, c)]
        });
        self.change_of_basis.transpose() * mc
    }

    /// Whether the construction guarantees `⟨c_i, c_j⟩_M = 0`.
    pub fn is_m_orthogonal_pair(&self, i: usize, j: usize) -> bool {
        if i == j {
            return false;
        }
        match (self.block_of(i), self.block_of(j)) {
            (Some(a), Some(b)) if a != b => true,
            (Some(a), Some(_)) => {
                let plan = &self.blocks[a];
                let half = plan.columns.start + plan.size() / 2;
                // The J-half and the u-half lie in different isotypic summands.
                (i < half) != (j < half) || !plan.m_orthogonality_partial
            }
            _ => false,
        }
    }

    /// Largest `|J u − w|` over recorded pairs `(u, w)`.
    pub fn pairing_residual(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.pairing.iter())
            .map(|&(u, w)| (j_apply(&self.columns[u].values) - &self.columns[w].values).amax())
            .fold(0.0, f64::max)
    }
}

type Named = (DVector<f64>, String);

/// Half of a J-paired block: the vectors `u` (their J-images are added
/// when the block is emitted).
struct HalfBlock {
    label: String,
    lead: Option<(Named, SubBlockRole)>,
    rest: Vec<Named>,
    lead_separable: bool,
    partial: bool,
}

/// The per-orbit ingredients of every block.
struct OrbitParts {
    tau: Vec<Named>,
    phi: Vec<Named>,
    /// Entry `k - 2` holds the `V_1` vectors of `Rho(k)`, `k >= 2`.
    rho: Vec<Vec<Named>>,
    translation: DVector<f64>,
    sigma_rest: Vec<Named>,
}

fn unit_at(sys: &RingSystem, point: usize, v: Vector2<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(sys.dim());
    out[2 * point] = v.x;
    out[2 * point + 1] = v.y;
    out
}

fn orbit_parts(sys: &RingSystem, oi: usize) -> Result<OrbitParts> {
    let n = sys.n();
    let orbit = &sys.orbits()[oi];
    let mass = sys.mass_diagonal();
    let ortho = Orthogonalizer { mass: &mass };

    let mut translation = DVector::zeros(sys.dim());
    for p in orbit.points.clone() {
        translation[2 * p] = 1.0;
    }
    let t = max_rho_index(n);
    let mut parts = OrbitParts {
        tau: Vec::new(),
        phi: Vec::new(),
        rho: vec![Vec::new(); t.saturating_sub(1)],
        translation,
        sigma_rest: Vec::new(),
    };
    if orbit.kind == OrbitKind::Center {
        return Ok(parts);
    }

    let tag = |name: &str| format!("{name}[{oi}]");
    let seed = orbit.seed;
    let x = sys.positions()[seed];
    let semi = orbit.kind == OrbitKind::Semiregular;
    let generic = !semi && !orbit.seed_on_axis;
    let scale = if semi { 2.0 * n as f64 } else { n as f64 };
    let dx = unit_at(sys, seed, x * scale);
    let jdx = j_apply(&dx);
    let d1 = unit_at(sys, seed, Vector2::new(1.0, 0.0));
    let d2 = unit_at(sys, seed, Vector2::new(0.0, 1.0));
    let p = |l: IrrepLabel, i: usize, j: usize, v: &DVector<f64>| apply_operator(sys, l, i, j, v);
    let per_orbit = if semi { 2 } else { 1 };
    let short = |got: usize, want: usize, what: &str| -> Result<()> {
        if got == want {
            Ok(())
        } else {
            Err(Error::DecompositionMismatch(format!("orbit {oi}: found {got} {what} vectors, expected {want}")))
        }
    };

    parts.tau.push((p(IrrepLabel::Tau, 1, 1, &dx)?, tag("kappa")));
    if semi {
        parts.tau.push((p(IrrepLabel::Tau, 1, 1, &jdx)?, tag("kappa'")));
    }

    if n == 2 {
        // V^φ of the orbit holds its translation plus, for a semiregular
        // orbit, one more direction.
        if semi {
            let candidates =
                [&dx, &jdx, &d1, &d2].map(|v| p(IrrepLabel::Phi, 1, 1, v)).into_iter().collect::<Result<Vec<_>>>()?;
            let picked = ortho.select(&candidates, std::slice::from_ref(&parts.translation), 1);
            short(picked.len(), 1, "phi")?;
            parts.phi = picked.into_iter().map(|v| (v, tag("phi"))).collect();
        }
        return Ok(parts);
    }

    if n % 2 == 0 {
        if generic {
            let candidates = [&d1, &d2].map(|v| p(IrrepLabel::Phi, 1, 1, v)).into_iter().collect::<Result<Vec<_>>>()?;
            parts.phi = ortho.select(&candidates, &[], 1).into_iter().map(|v| (v, tag("phi"))).collect();
        } else {
            parts.phi.push((p(IrrepLabel::Phi, 1, 1, &dx)?, tag("phi")));
            if semi {
                parts.phi.push((p(IrrepLabel::Phi, 1, 1, &jdx)?, tag("phi'")));
            }
        }
        short(parts.phi.len(), per_orbit, "phi")?;
    }

    let generic_candidates = |l: IrrepLabel| -> Result<Vec<DVector<f64>>> {
        Ok(vec![p(l, 1, 1, &d1)?, p(l, 1, 2, &d2)?, p(l, 1, 1, &d2)?, p(l, 1, 2, &d1)?])
    };

    for k in 2..=t {
        let l = IrrepLabel::Rho(k);
        // For a regular ring the pair (p11 δx, p12 Jδx) works for any seed:
        // the seed always lies on the axis of some reflection, which makes
        // the two M-orthogonal, and J maps them to p21 of each other.
        let vectors: Vec<Named> = if semi {
            vec![
                (p(l, 1, 1, &d1)?, tag(&format!("{l}_p11d1"))),
                (p(l, 1, 2, &d2)?, tag(&format!("{l}_p12d2"))),
                (-p(l, 1, 1, &d2)?, tag(&format!("{l}_-p11d2"))),
                (p(l, 1, 2, &d1)?, tag(&format!("{l}_p12d1"))),
            ]
        } else {
            vec![(p(l, 1, 1, &dx)?, tag(&format!("{l}_delta1"))), (p(l, 1, 2, &jdx)?, tag(&format!("{l}_delta2")))]
        };
        short(vectors.len(), 2 * per_orbit, &l.name())?;
        parts.rho[k - 2] = vectors;
    }

    let s = IrrepLabel::Rho(1);
    parts.sigma_rest = if generic {
        ortho
            .select(&generic_candidates(s)?, std::slice::from_ref(&parts.translation), 1)
            .into_iter()
            .map(|v| (v, tag("eps_h")))
            .collect()
    } else if semi {
        let h = (p(s, 1, 1, &d1)? - p(s, 1, 2, &d2)?) * n as f64;
        vec![(h, tag("eps_h")), (p(s, 1, 1, &d2)?, tag("delta_1")), (p(s, 1, 2, &d1)?, tag("eps_1"))]
    } else {
        let h = (p(s, 1, 1, &d1)? - p(s, 1, 2, &d2)?) * (n as f64 / 2.0);
        vec![(h, tag("eps_h"))]
    };
    short(parts.sigma_rest.len(), 2 * per_orbit - 1, "sigma")?;
    Ok(parts)
}

/// Translation of one orbit as given by the projector formula
/// `δ_h = (n/2)[p₁₁(δ_{1,x}) + p₁₂(δ_{2,x})]` (factor `n` for semiregular
/// orbits). Exposed so the closed form can be checked against `e₁`.
pub fn orbit_translation_from_projectors(sys: &RingSystem, oi: usize) -> Result<DVector<f64>> {
    let orbit = sys.orbits().get(oi).ok_or_else(|| Error::InvalidIndex(format!("orbit {oi}")))?;
    let d1 = unit_at(sys, orbit.seed, Vector2::new(1.0, 0.0));
    let d2 = unit_at(sys, orbit.seed, Vector2::new(0.0, 1.0));
    let n = sys.n() as f64;
    let factor = match orbit.kind {
        OrbitKind::Center => return Ok(d1),
        OrbitKind::Regular => n / 2.0,
        OrbitKind::Semiregular => n,
    };
    let s = IrrepLabel::Rho(1);
    Ok((apply_operator(sys, s, 1, 1, &d1)? + apply_operator(sys, s, 1, 2, &d2)?) * factor)
}

fn finish_half(
    ortho: &Orthogonalizer,
    label: &str,
    lead: Option<(Named, SubBlockRole)>,
    rest: Vec<Named>,
    lead_separable: bool,
) -> HalfBlock {
    let against: Vec<DVector<f64>> = lead.iter().map(|((v, _), _)| v.clone()).collect();
    let (vectors, names): (Vec<_>, Vec<_>) = rest.into_iter().unzip();
    let (vectors, partial) = ortho.orthogonalize(&vectors, &against);
    HalfBlock {
        label: label.to_string(),
        lead,
        rest: vectors.into_iter().zip(names).collect(),
        lead_separable,
        partial,
    }
}

fn emit(sys: &RingSystem, halves: Vec<HalfBlock>, notes: Vec<String>) -> SymBasis {
    let mass = sys.mass_diagonal();
    let normalize = sys.all_masses_positive();
    let unit = |v: DVector<f64>| -> DVector<f64> {
        if normalize {
            let norm = weighted_dot(&mass, &v, &v).sqrt();
            v / norm
        } else {
            v
        }
    };

    let mut columns: Vec<Displacement> = Vec::new();
    let mut blocks = Vec::new();
    let mut any_partial = false;
    for half in halves {
        let start = columns.len();
        let mut pairing = Vec::new();
        let mut sub_blocks = Vec::new();
        let push_group = |group: Vec<Named>, columns: &mut Vec<Displacement>, pairing: &mut Vec<(usize, usize)>| {
            let m = group.len();
            let base = columns.len();
            let us: Vec<(DVector<f64>, String)> = group.into_iter().map(|(v, s)| (unit(v), s)).collect();
            for (u, name) in &us {
                columns.push(Displacement::new(j_apply(u), format!("J {name}")));
            }
            for (u, name) in us {
                columns.push(Displacement::new(u, name));
            }
            for i in 0..m {
                pairing.push((base + m + i, base + i));
            }
        };
        if let Some(((v, name), role)) = half.lead {
            push_group(vec![(v, name)], &mut columns, &mut pairing);
            sub_blocks.push(SubBlock {
                label: match role {
                    SubBlockRole::RotationScaling => "rotation-scaling".into(),
                    SubBlockRole::Translation => "translation".into(),
                    SubBlockRole::Remainder => "remainder".into(),
                },
                role,
                columns: start..start + 2,
                requires_releq: role == SubBlockRole::RotationScaling,
                separable: half.lead_separable,
            });
        }
        let rest_start = columns.len();
        let had_lead = !sub_blocks.is_empty();
        push_group(half.rest, &mut columns, &mut pairing);
        if had_lead && columns.len() > rest_start {
            let lead = &sub_blocks[0];
            sub_blocks.push(SubBlock {
                label: format!("{} remainder", half.label),
                role: SubBlockRole::Remainder,
                columns: rest_start..columns.len(),
                requires_releq: lead.requires_releq,
                separable: lead.separable,
            });
        }
        any_partial |= half.partial;
        blocks.push(BlockPlan {
            label: half.label,
            columns: start..columns.len(),
            pairing,
            sub_blocks,
            m_orthogonality_partial: half.partial,
        });
    }

    let change_of_basis = if columns.is_empty() {
        DMatrix::zeros(sys.dim(), 0)
    } else {
        DMatrix::from_columns(&columns.iter().map(|c| c.values.clone()).collect::<Vec<_>>())
    };
    let condition = if columns.is_empty() { 1.0 } else { condition_number(&change_of_basis) };
    SymBasis {
        columns,
        blocks,
        change_of_basis,
        condition,
        normalized: normalize,
        m_orthogonality_partial: any_partial,
        tau_constants: Vec::new(),
        translation_constants: Vec::new(),
        notes,
    }
}

fn all_parts(sys: &RingSystem) -> Result<Vec<OrbitParts>> {
    (0..sys.orbits().len()).map(|oi| orbit_parts(sys, oi)).collect()
}

/// Basis of the displacements supported on one orbit, grouped into the
/// same blocks as the global basis.
pub fn orbit_basis(sys: &RingSystem, orbit_index: usize) -> Result<SymBasis> {
    if orbit_index >= sys.orbits().len() {
        return Err(Error::InvalidIndex(format!("orbit {orbit_index} of {}", sys.orbits().len())));
    }
    let parts = orbit_parts(sys, orbit_index)?;
    let mass = sys.mass_diagonal();
    let ortho = Orthogonalizer { mass: &mass };
    let n = sys.n();
    let mut halves = Vec::new();
    let translation = ((parts.translation.clone(), format!("delta_h[{orbit_index}]")), SubBlockRole::Translation);
    let mut tau = parts.tau.into_iter();
    if let Some(lead) = tau.next() {
        halves.push(finish_half(&ortho, "tau+alpha", Some((lead, SubBlockRole::RotationScaling)), tau.collect(), true));
    }
    if n == 2 {
        halves.push(finish_half(&ortho, "phi+psi", Some(translation), parts.phi, true));
        return Ok(emit(sys, halves, Vec::new()));
    }
    if !parts.phi.is_empty() {
        halves.push(finish_half(&ortho, "phi+psi", None, parts.phi, true));
    }
    for (i, vectors) in parts.rho.into_iter().enumerate() {
        if !vectors.is_empty() {
            halves.push(finish_half(&ortho, &IrrepLabel::Rho(i + 2).name(), None, vectors, true));
        }
    }
    halves.push(finish_half(&ortho, "sigma", Some(translation), parts.sigma_rest, true));
    Ok(emit(sys, halves, Vec::new()))
}

/// The full symmetry-adapted basis. Block order: `tau+alpha`,
/// `phi+psi` (n even), `rho2..`, `sigma` (n > 2); `tau+alpha`, `phi+psi`
/// for n = 2.
pub fn assemble_global_basis(sys: &RingSystem) -> Result<SymBasis> {
    let n = sys.n();
    let parts = all_parts(sys)?;
    let orbits = sys.orbits();
    let mass = sys.mass_diagonal();
    let ortho = Orthogonalizer { mass: &mass };
    let mut notes = Vec::new();
    let mut halves = Vec::new();

    // tau + alpha with the rotation/scaling pair (Jϰ, ϰ) first.
    let ring_ids: Vec<usize> = (0..orbits.len()).filter(|&i| !parts[i].tau.is_empty()).collect();
    let first = ring_ids[0];
    let kappa = ring_ids.iter().fold(DVector::zeros(sys.dim()), |acc, &i| acc + &parts[i].tau[0].0);
    let weight = |i: usize| orbits[i].mass * orbits[i].radius.powi(2) * orbits[i].size() as f64;
    let tau_ok = ortho.is_regular(Metric::Mass, &kappa);
    let mut tau_constants = Vec::new();
    let mut rest = Vec::new();
    for &i in &ring_ids {
        if i != first {
            let c = -weight(first) / weight(i);
            tau_constants.push((i, c));
            let v = if tau_ok { &parts[first].tau[0].0 + &parts[i].tau[0].0 * c } else { parts[i].tau[0].0.clone() };
            rest.push((v, format!("kappa_{i}")));
        }
        rest.extend(parts[i].tau.iter().skip(1).cloned());
    }
    if !tau_ok {
        notes.push("configuration vector has degenerate mass norm; rotation-scaling pair not separated".into());
    }
    halves.push(finish_half(
        &ortho,
        "tau+alpha",
        Some(((kappa, "kappa".into()), SubBlockRole::RotationScaling)),
        rest,
        tau_ok,
    ));

    // Translations: Δ_h and the M-orthogonal combinations Δ_h^{(i)}.
    let delta_h = parts.iter().fold(DVector::zeros(sys.dim()), |acc, p| acc + &p.translation);
    let trans_ok = ortho.is_regular(Metric::Mass, &delta_h);
    if !trans_ok {
        notes.push("total mass vanishes; translation pair not separated".into());
    }
    let orbit_weight = |i: usize| orbits[i].mass * orbits[i].size() as f64;
    let mut translation_constants = Vec::new();
    let mut trans_rest = Vec::new();
    for i in 1..orbits.len() {
        let c = -orbit_weight(0) / orbit_weight(i);
        translation_constants.push((i, c));
        let v = if trans_ok { &parts[0].translation + &parts[i].translation * c } else { parts[i].translation.clone() };
        trans_rest.push((i, (v, format!("Delta_h_{i}"))));
    }
    let lead_translation = Some(((delta_h, "Delta_h".to_string()), SubBlockRole::Translation));

    let interleave = |extra: &dyn Fn(usize) -> Vec<Named>| -> Vec<Named> {
        let mut out = Vec::new();
        for i in 0..orbits.len() {
            if let Some((_, v)) = trans_rest.iter().find(|(j, _)| *j == i) {
                out.push(v.clone());
            }
            out.extend(extra(i));
        }
        out
    };

    if n == 2 {
        let rest = interleave(&|i| parts[i].phi.clone());
        halves.push(finish_half(&ortho, "phi+psi", lead_translation, rest, trans_ok));
    } else {
        if n % 2 == 0 {
            let rest: Vec<Named> = parts.iter().flat_map(|p| p.phi.iter().cloned()).collect();
            halves.push(finish_half(&ortho, "phi+psi", None, rest, true));
        }
        for k in 2..=max_rho_index(n) {
            let rest: Vec<Named> = parts.iter().flat_map(|p| p.rho[k - 2].iter().cloned()).collect();
            halves.push(finish_half(&ortho, &IrrepLabel::Rho(k).name(), None, rest, true));
        }
        let rest = interleave(&|i| parts[i].sigma_rest.clone());
        halves.push(finish_half(&ortho, "sigma", lead_translation, rest, trans_ok));
    }

    let mut basis = emit(sys, halves, notes);
    basis.tau_constants = tau_constants;
    basis.translation_constants = translation_constants;
    check_counts(sys, &basis)?;
    Ok(basis)
}

/// Block sizes expected from the multiplicity formulas.
pub(crate) fn expected_block_sizes(sys: &RingSystem) -> Vec<(String, usize)> {
    let n = sys.n();
    let abc = sys.type_abc();
    let mu = |l| multiplicity(n, abc, l);
    let mut out = vec![("tau+alpha".to_string(), 2 * mu(IrrepLabel::Tau))];
    if n % 2 == 0 {
        out.push(("phi+psi".into(), 2 * mu(IrrepLabel::Phi)));
    }
    if n > 2 {
        for k in 2..=max_rho_index(n) {
            out.push((IrrepLabel::Rho(k).name(), 2 * mu(IrrepLabel::Rho(k))));
        }
        out.push(("sigma".into(), 2 * mu(IrrepLabel::Rho(1))));
    }
    out
}

fn check_counts(sys: &RingSystem, basis: &SymBasis) -> Result<()> {
    let got: Vec<(String, usize)> = basis.blocks.iter().map(|b| (b.label.clone(), b.size())).collect();
    let want = expected_block_sizes(sys);
    if got != want || basis.len() != sys.dim() {
        return Err(Error::DecompositionMismatch(format!("block sizes {got:?}, expected {want:?}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring_geometry::{Phase, RingSpec};
    use std::f64::consts::PI;

    #[test]
    fn translation_formula_matches_rigid_shift() {
        for (n, ring) in [
            (5, RingSpec::regular(1.3, Phase::Aligned, 1.0)),
            (5, RingSpec::regular(1.3, Phase::Staggered, 1.0)),
            (4, RingSpec::semiregular(0.8, PI / 7.0, 2.0)),
            (3, RingSpec::semiregular(1.1, PI / 5.0, 0.5)),
        ] {
            let sys = RingSystem::build(n, &[ring]).unwrap();
            let t = orbit_translation_from_projectors(&sys, 0).unwrap();
            for p in 0..sys.len() {
                assert!((t[2 * p] - 1.0).abs() < 1e-12 && t[2 * p + 1].abs() < 1e-12, "n={n} {ring:?}");
            }
        }
    }

    #[test]
    fn pentagon_orbit_basis_shape() {
        let sys = RingSystem::build(5, &[RingSpec::regular(1.0, Phase::Aligned, 1.0)]).unwrap();
        let b = orbit_basis(&sys, 0).unwrap();
        assert_eq!(b.len(), 10);
        let sizes: Vec<(String, usize)> = b.blocks.iter().map(|p| (p.label.clone(), p.size())).collect();
        assert_eq!(sizes, vec![("tau+alpha".into(), 2), ("rho2".into(), 4), ("sigma".into(), 4)]);
        assert!(b.pairing_residual() == 0.0);
    }

    #[test]
    fn center_orbit_gives_canonical_pair() {
        let sys = RingSystem::build(4, &[RingSpec::center(2.0), RingSpec::regular(1.0, Phase::Aligned, 1.0)]).unwrap();
        let b = orbit_basis(&sys, 0).unwrap();
        assert_eq!(b.len(), 2);
        let s = 1.0 / 2f64.sqrt();
        assert_eq!(b.columns[1].values[0], s);
        assert_eq!(b.columns[0].values[1], s);
    }
}
