//! Geometry of the Weyl/Bell "magic simplex" of bipartite qudit states.
//!
//! The crate is organised bottom-up:
//!
//! * [`matcore`]: dense complex matrices, a Jacobi Hermitian eigensolver,
//!   a small dual active-set LP solver and Nelder–Mead.
//! * [`weyl`]: Weyl operators, Bell vectors and Bell projectors for any
//!   local dimension `d`.
//! * [`simplex`]: points of the simplex, the two three-parameter slices,
//!   positivity / PPT margins and the discrete phase space (lines and
//!   affine symmetries).
//! * [`witness`]: the line-witness family, the `M_Φ` feasibility test,
//!   the cutting-plane witness optimizer and the state classifier.
//! * [`scan`]: grid sweeps, boundary tracing, shape diagnostics and
//!   dataset emission.

pub mod error;
pub mod matcore;
pub mod scan;
pub mod seed;
pub mod simplex;
pub mod tolerances;
pub mod weyl;
pub mod witness;

pub use error::{Error, Result};
pub use matcore::{ComplexMatrix, Spectrum, C64};
pub use simplex::{LineSliceCoords, OffLineSliceCoords, PhaseLine, PhasePoint, SimplexPoint, SymmetryMap};
pub use tolerances::Tolerances;
pub use weyl::WeylBasis;
pub use witness::{Classification, LineWitness, PhiAngles, Verdict, WitnessConfig};
