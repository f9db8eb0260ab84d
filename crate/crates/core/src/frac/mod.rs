//! Protocols that answer f on any k distinct indices of an n-bit input,
//! and the machinery to measure their bias exactly or by Monte Carlo.

pub mod block;
pub mod estimate;
pub mod private;
pub mod sequences;

pub use block::BlockProtocol;
pub use estimate::{exact_bias, mc_bias, mc_bias_sequential, BiasReport, EstimateMode};
pub use private::{
    count_parity_agreement, newman_derandomize, parity_agreement_closed_form, FracPr, PermMask,
    XorRacPr, NEWMAN_MAX_RETRIES,
};
pub use sequences::{
    collision_probability, sequence_count, sequences_enumerate, sequences_sample, CollisionMode,
    SequenceIndex,
};

use crate::boolfn::{BitString, BooleanFunction};
use crate::error::Result;
use rand::RngCore;

/// A randomized strategy: Alice sees x, Bob sees S and must output f(x_S).
///
/// `trial` runs one execution with the given randomness source and reports
/// whether Bob's output equals f(x_S). `exact_success` computes the success
/// probability for a fixed (x, S) in closed form when the protocol's
/// randomness is finite and enumerable.
pub trait Protocol: Send + Sync {
    /// Input length n.
    fn input_len(&self) -> usize;

    /// Query length k.
    fn query_len(&self) -> usize;

    /// The function Bob computes on the selected bits.
    fn function(&self) -> &BooleanFunction;

    /// Short name for reports.
    fn name(&self) -> &str;

    fn trial(&self, x: &BitString, s: &SequenceIndex, rng: &mut dyn RngCore) -> Result<bool>;

    fn exact_success(&self, x: &BitString, s: &SequenceIndex) -> Result<f64>;

    /// Number of elementary terms one `exact_success` call sums over, or
    /// None when the protocol has no exact mode (continuous randomness).
    fn exact_cost(&self) -> Option<u128>;
}
