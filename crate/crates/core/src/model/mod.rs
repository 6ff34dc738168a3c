//! Algebraic data of SU(2)_k and JK_k anyon theories.

mod data;
mod derived;
mod dump;
mod qnum;
mod semion;
mod symbols;
pub mod tables;
mod theory;
mod verify;

pub use data::{AnyonModelData, ModelOptions};
pub use derived::{derived_invariants, s_from_twists, twist_from_r, DerivedInvariants};
pub use dump::{ComplexValue, IndexedValue, ModelDump, SpecDump};
pub use qnum::{q_integer, quantum_dimension};
pub use semion::{gluing_residuals, semion_gluing_check, SemionGluingReport};
pub use symbols::{f_admissible, fusion_multiplicity};
pub use theory::{Charge, Family, TheorySpec, MAX_LEVEL};
pub use verify::{consistency_report, verify_consistency, CheckResult, ConsistencyReport};
