//! Volumes and lattice-point counts of flow polytopes.

pub mod combin;
pub mod families;
pub mod error;
pub mod graph;
pub mod io;
pub mod kostant;
pub mod lidskii;
pub mod poly;
mod serde_big;
pub mod subdivision;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{DegreeProfile, Edge, MultiDigraph, Netflow};
pub use kostant::{ehrhart_poly, ehrhart_value, kpf, kpf_count_via_flows, volume_oracle, EhrhartPolynomial, FlowAssignment};
pub use poly::ExactPoly;
pub use lidskii::{
    lidskii_points_binomial, lidskii_points_multiset, lidskii_volume, lidskii_volume_poly, points_indegree, unit_volume_identities,
    volume_indegree, LidskiiTable, LidskiiTerm, PointsFormula,
};
