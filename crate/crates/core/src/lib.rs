//! Differential and coding-theoretic analysis of SHA-256 and its linearised
//! variants.
//!
//! The crate is organised bottom-up:
//!
//! * [`primitives`] and [`variant`]: the compression function with
//!   switchable S-boxes, Boolean functions and message expansion.
//! * [`ring`]: linear algebra over `Z/2^32` for the word-linear expansion.
//! * [`disturbance`]: disturbance vectors, corrective patterns and
//!   collisions for the ADD-linear variant.
//! * [`boolean`]: bit-31 difference accounting for the variant that keeps
//!   Maj and Ch.
//! * [`gf2`], [`codeword`], [`isd`], [`sweep`]: the XOR-linearised expansion
//!   as a binary linear code and low-weight codeword search.

pub mod boolean;
pub mod codeword;
pub mod disturbance;
pub mod error;
pub mod gf2;
pub mod isd;
pub mod primitives;
pub mod ring;
pub mod sweep;
pub mod variant;
pub mod word;

pub use error::{Error, Result};
pub use primitives::{
    compress, expand, step, ExpandedMessage, ExpansionKind, MessageBlock, RegisterState,
};
pub use ring::{BackwardWindow, RingMatrix};
pub use variant::{make_variant, VariantConfig, VariantName};
pub use word::RingWord;

/// Matrices over `Z/2^32`.
pub type WordMatrix = RingMatrix<u32>;
/// Vectors over `Z/2^32`.
pub type WordVector = Vec<u32>;
