//! DL-Lite^H knowledge bases embedded into box geometries.
//!
//! The pipeline: parse a knowledge base (`ontology`), reason over it
//! (`reasoner`), compile TBox axioms into a polyhedron and ABox assertions
//! into a convex objective (`problem`), solve with a projected-subgradient
//! reference method or export a standard-form SOCP (`solver`), construct
//! provably faithful embeddings analytically (`analytic`), and evaluate
//! link prediction with filtered MRR / H@k (`eval`). Dataset utilities
//! (forest-fire sampling, splits) live in `data`.

pub mod analytic;
pub mod data;
pub mod dump;
pub mod eval;
pub mod geometry;
pub mod ontology;
pub mod problem;
pub mod reasoner;
pub mod rng;
pub mod solver;
