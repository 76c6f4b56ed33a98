//! Biased constraint satisfaction: weighted hypergraph instances, predicate analysis,
//! the reductions between densest-subhypergraph and predicate CSPs, approximation
//! solvers, and samplers for the noise-test gadgets.

pub mod error;
pub mod gadget;
pub mod instance;
pub mod io;
pub mod oracle;
pub mod predicate;
pub mod reductions;
pub mod seed;
pub mod solvers;
pub mod verify;

pub use error::{Error, Result};
pub use instance::{BiasMode, CspInstance, Hypergraph, Labeling, ValueReport};
pub use predicate::{Predicate, PredicateProfile};
