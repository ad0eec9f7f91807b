//! Exact computation of the Heegaard Floer d-invariant sliceness obstruction
//! for connected sums of the form `K_{2,k1} # -T_{2,k1} # -K_{2,k2} # T_{2,k2}`
//! where `K` is an L-space knot.
//!
//! The pipeline runs:
//!
//! 1. [`knot`]: parse and normalize knot expressions.
//! 2. [`alexander`]: Alexander polynomials, L-space form, genus and `m(K)`.
//! 3. [`staircase`]: staircase complexes and their doubles (for `K # K^r`).
//! 4. [`dinvariants`]: `V_s`, lens-space correction terms, surgery d-invariants.
//! 5. [`obstruction`]: linking forms, metabolizer enumeration, verdicts.
//! 6. [`signatures`]: Levine–Tristram jump functions and linear independence.
//!
//! [`oracle`] is an independent brute-force layer over truncated bigraded
//! complexes used to cross-check the fast staircase formulas.

pub mod alexander;
pub mod dinvariants;
pub mod exec;
pub mod knot;
pub mod obstruction;
pub mod oracle;
pub mod rational;
pub mod signatures;
pub mod staircase;

pub use alexander::{LSpaceForm, LaurentPoly};
pub use dinvariants::{DTable, VSequence};
pub use exec::Exec;
pub use knot::{parse_knot, KnotExpr};
pub use obstruction::{obstruct, Verdict};
pub use rational::Q;
pub use staircase::{DoubledStaircase, LatticeStaircase, StepVector};
