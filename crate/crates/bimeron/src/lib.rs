//! Numerical laboratory for chiral bimerons in easy-plane chiral magnets.
//!
//! The crate evaluates and minimizes the chiral easy-plane energy
//!
//!   E_{lambda,eps}(m) = int |grad m|^2/2
//!                     + lambda (div m) m3/eps + (m3/eps)^2/2 dx
//!
//! for unit-sphere-valued fields on the disk (Dirichlet rim) and the torus,
//! generates the analytic vortex-antivortex trial fields, and checks the
//! closed-form energies, topological bounds, Pohozaev identities, and
//! asymptotic scalings against independent oracles.

pub mod ansatz;
pub mod cli;
pub mod energy;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod io;
pub mod minimize;
pub mod quad;

pub use ansatz::{
    annulus_bound_check, bimeron_prototype_map, cutoff_field_map, disk_energy_closed_form,
    offset_disk_energy, optimal_upper_bound, stereographic, AnsatzParams, FOUR_PI,
};
pub use energy::{
    el_residual, energy_s1, energy_s2, grad_s1, grad_s2, lattice_degree,
    pohozaev_residual_annulus, pohozaev_residual_disk, stress_trace_sup, winding,
    EnergyBreakdown, EnergyParams, Functional,
};
pub use error::{BimeronError, Result};
pub use experiments::{
    bound_audit, conformal_sweep, core_profile_l2_diff, core_radius, large_domain_sweep,
    neck_energy_profile, CoreReport, SweepRow,
};
pub use grid::{
    make_grid, sample_circle_field, sample_field, CircleField, DomainGrid, DomainKind,
    SphereField,
};
pub use io::{load_circle_field, load_sphere_field, save_circle_field, save_sphere_field};
pub use minimize::{
    distance_to_constant, distance_to_constant_s2, minimize_s1, minimize_s2, perturb,
    random_phase_field, MinimizeReport, SolveConfig, StepRule,
};
