//! Instance transformations. Each returns the new instance together with the data
//! needed to map labelings back.

pub mod cloud;
pub mod clique;
pub mod dks_2csp;
pub mod dksh_to_pred;
pub mod heavy;
pub mod rescale;
pub mod truncate;

pub use cloud::{cloud_expansion, cloud_sizes, CloudExpansion, CLOUD_RESOLUTION};
pub use clique::clique_expansion;
pub use dks_2csp::{dks_to_2csp, DksTo2Csp, Max2Csp, PairConstraint};
pub use dksh_to_pred::{dksh_to_predicate, DkshToPredicate};
pub use heavy::{heavy_set, heavy_vertex_split, restrict, HeavySplit, Restriction};
pub use rescale::{bias_rescale, RescaleDirection};
pub use truncate::predicate_to_dksh;
