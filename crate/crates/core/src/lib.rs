//! Exact combinatorial machinery for toric resolutions of semistable
//! degenerations.
//!
//! The library models the special fibre of a strictly semi-stable family as an
//! abstract simplicial complex, executes the toric blow-up process that
//! resolves the family after a ramified base change of index `r`, and exposes
//! the resulting refinement of the dual complex together with the exact
//! integer tables (distance `d`, intersection `I`) and symbolic Chow-cycle
//! algebra needed to verify the wall identity and the key formula relating the
//! obstruction maps of the original and resolved models.
//!
//! All arithmetic is exact: coordinates and coefficients are integers, and
//! every linear-algebra kernel runs over arbitrary-precision integers.

pub mod chow;
pub mod complex;
pub mod json;
pub mod lattice;
pub mod obstruction;
pub mod refinement;
pub mod resolution;

pub use chow::{
    CycleExpression, CycleGenerator, KeyFormulaReport, Level, PushedOneCycle, SymbolicOneCycle,
};
pub use complex::{DualComplex, Simplex};
pub use lattice::{LatticeVector, WallRelation};
pub use obstruction::{DistanceTable, IntersectionTable, ObstructionTables, WallIdentityReport};
pub use refinement::{Refinement, RelativeWall};
pub use resolution::{ConeFamilyRecord, LocalFanState, TerminalReport};

/// Library version, embedded in machine-readable reports.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
