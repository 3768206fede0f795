//! Commuting graphs of matrix rings and matrix groups over Z_m.
//!
//! The crate enumerates the full matrix ring M(n, Z_m), its unit group, and
//! its determinant-one subgroup; builds the commuting graph on the
//! non-central elements; runs exact BFS connectivity, component, and
//! diameter computations; and produces certified constructive witnesses:
//! commuting neighbors, length-at-most-3 paths over composite moduli, the
//! bidiagonal pair realizing the distance lower bound, and the isolated
//! class that disconnects the graph over prime moduli. Randomized, seeded
//! suites re-check the underlying determinant and unit identities.
//!
//! Everything is exact integer arithmetic; there are no floating-point
//! tolerances anywhere. Exhaustive enumerations are bounded by explicit
//! guards and fail loudly when a domain is too large.

pub mod error;
pub mod export;
pub mod graph;
pub mod matrix;
pub mod modulus;
pub mod suites;
pub mod witness;

pub use error::{Error, Result};
pub use export::{export_graph, parse_csv_edges, write_csv, write_dot, ExportFormat};
pub use graph::{
    build_graph, ComponentReport, GraphView, Neighbors, DEFAULT_EXPORT_GUARD,
    DEFAULT_VERTEX_GUARD,
};
pub use matrix::{
    center_of, centralizer, is_central, DomainKind, DomainSpec, ModMatrix, Residue,
};
pub use modulus::{check_units_lemma, classify, factorize, is_prime, ModulusClass};
pub use suites::{
    component_suite, dets_identity_suite, middle_edge_coprime_suite,
    middle_edge_prime_power_suite, path_exhaustive_suite, pmatrix_suite, units_suite,
    TrialOutcome,
};
pub use witness::{
    coprime_neighbor, field_isolated_component, p_matrix, path3, prime_power_neighbor,
    verify_lower_bound, verify_path, NeighborWitness, PathCheck, PathDefect, PathWitness,
    WitnessForm, DEFAULT_SCAN_GUARD,
};
