//! Line witnesses `K = (λ/d)·1 + Σ_k κ_k P_{k,0}`, their `M_Φ` feasibility test,
//! the cutting-plane optimizer and the state classifier.

mod classify;
mod family;
mod optimize;
mod product;

pub use classify::{classify, classify_with_margins, margins, product_screen, Classification, ProductScreen, Verdict};
pub use family::{
    cut_coefficients, m_phi, min_mphi_eig, witness_matrix, LineWitness, MphiMinimizer, MphiMinimum, PhiAngles,
};
pub use optimize::{
    optimize_line_witness, optimize_witness, reference_line_coeffs, WitnessConfig, WitnessOutcome, WitnessRecord,
};
pub use product::product_state_min;
