//! Symmetry-adapted block factorization of the linear stability polynomial
//! of D_n-symmetric ring systems in the planar N-body and N-vortex problems.
//!
//! The pipeline is: build a [`RingSystem`], form the [`StabilityOperator`]
//! (optionally after [`solve_releq`]), assemble a [`SymBasis`] and call
//! [`factorize`], which returns per-block polynomial factors checked
//! against a dense determinant.
//!
//! ```
//! use ringfactor_core::*;
//!
//! let sys = RingSystem::build(5, &[RingSpec::regular(1.0, Phase::Aligned, 1.0)]).unwrap();
//! let sol = solve_releq(&sys, &PotentialKind::Vortex, &[], None).unwrap();
//! let op = stability_operator(&sol.system, &PotentialKind::Vortex, sol.omega).unwrap();
//! let basis = assemble_global_basis(&sol.system).unwrap();
//! let report = factorize(&sol.system, &op, &basis).unwrap();
//! assert_eq!(report.degree_profile, vec![2, 4, 4]);
//! assert!(report.verified);
//! ```

pub mod dihedral;
pub mod dynamics;
pub mod error;
mod extended;
pub mod linalg;
pub mod ring_geometry;
pub mod stability;
pub mod sym_adapt;

pub use dihedral::{irrep_list, irrep_matrix, standard_rep, DihedralElement, IrrepLabel};
pub use dynamics::{
    gradient, hessian, j_apply, j_matrix, potential_value, releq_residual, solve_releq, stability_operator,
    PotentialKind, ReleqSolution, StabilityOperator,
};
pub use error::{Error, Result};
pub use ring_geometry::{Orbit, OrbitKind, Phase, RingKind, RingSpec, RingSystem};
pub use stability::{
    block_factor, classical_checks, dense_oracle, factorize, transform, BlockReport, FactorizationReport, PolyFactor,
};
pub use sym_adapt::{
    assemble_global_basis, averaging_operator, isotypic_decomposition, j_relations_check, m_inner, orbit_basis,
    projector, transfer, Displacement, IsotypicComponent, SymBasis,
};
