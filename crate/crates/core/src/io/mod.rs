//! Instance documents, seeded generators and the named instance families.

pub mod document;
pub mod families;
pub mod generate;

pub use document::{digest, parse, serialize, Document};
pub use generate::{gen_hierarchy, gen_random, GeneratorParams};
