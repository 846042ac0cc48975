//! Exact, desk-scale tooling for dp-minimality: formula evaluation over
//! concrete structures, ICT and inp certificates, Δ-type counting,
//! quantifier elimination for a lexicographic group, and the Hahn-series and
//! p-adic models.

pub mod formula;
pub mod ict;
pub mod hahn;
pub mod padic;
pub mod qe;
pub mod rational;
pub mod runner;
pub mod structures;
pub mod value;
pub mod vc;

pub use formula::{Assignment, Formula, Signature, Term};
pub use structures::Structure;
pub use value::Value;
