//! A logistic-map colour image cipher (row permutation, column permutation,
//! feedback substitution) together with a chosen-plaintext attack that
//! recovers an equivalent key from `2 + ceil(log2(3MN) / 8)` chosen images.
//!
//! The chaotic part is generic over the floating point type (see
//! [`ChaosFloat`]); the aliases below fix it to `f64`, which is what all
//! pinned test vectors use.

pub mod attack;
pub mod cipher;
mod error;
pub mod image;
pub mod imageio;
pub mod keystream;
pub mod permutation;
pub mod scalar;

pub use attack::{
    break_ciphertext, difference_period, failure_probability_bound, run_attack,
    DifferenceParams, EncryptionOracle, EquivalentKey, KeyedOracle,
};
pub use cipher::{decrypt, encrypt, PermutationTables};
pub use error::{Error, Result};
pub use image::ColourImage;
pub use keystream::{ByteKeystream, ChannelSelector, KeyMaterial, ScanSchedule, Slot};
pub use permutation::RankPermutation;
pub use scalar::ChaosFloat;

/// Secret key with binary64 chaotic parameters.
pub type SecretKey = keystream::SecretKey<f64>;
/// Secret key with binary32 chaotic parameters.
pub type SecretKeyF32 = keystream::SecretKey<f32>;
/// Chaotic state sequence in binary64.
pub type ChaoticSequence = keystream::ChaoticSequence<f64>;
