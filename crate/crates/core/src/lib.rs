//! Facility location on tree metrics when agents are represented by strategic
//! mediators.
//!
//! The crate computes, exactly, the mechanisms studied for this setting:
//!
//! * the deterministic weighted median mechanism ([`mechanisms::wmm`]),
//! * the randomized two percentiles range mechanism for lines ([`mechanisms::tprm`]),
//! * the randomized tree mechanism ([`mechanisms::trm`]),
//! * the iterative weighted median mechanism for mediation hierarchies
//!   ([`mechanisms::iwmm`]),
//!
//! together with brute-force oracles ([`oracle`]), deviation audits
//! ([`audit`]), an instance file format and generators ([`io`]) and the
//! command line front end ([`cli`]).
//!
//! All lengths, weights, costs and probabilities are exact rationals.
//!
//! ```
//! use facloc::io::families;
//! use facloc::mechanisms::trm;
//!
//! let inst = families::fig1_tree();
//! let outcome = trm(&inst).unwrap();
//! let dist = outcome.distribution().unwrap();
//! let root = inst.metric.vertex("R").unwrap();
//! assert_eq!(dist.probability(&facloc::PointRef::Vertex(root)).to_string(), "12/25");
//! ```

pub mod audit;
pub mod cli;
mod error;
pub mod io;
pub mod mechanisms;
pub mod median;
pub mod oracle;
pub mod rational;
pub mod tree_metric;

pub use error::{Error, Result};
pub use median::{WeightedMultiset, WeightedPoint};
pub use rational::Rational;
pub use tree_metric::{EdgeId, PointRef, TreeMetric, VertexId};
