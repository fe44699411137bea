//! Significance-aware error-correcting codes.
//!
//! Source symbols are integers, and the cost of a decoding error is a loss
//! on those integers (for example the absolute or squared difference)
//! rather than a count of flipped bits. This crate provides:
//!
//! - symbol spaces and codebooks ([`symbols`], [`codes`]),
//! - loss functions on symbols ([`loss`]),
//! - a BPSK/AWGN channel with blind noise estimation ([`channel`]),
//! - hard, soft and Bayes (minimum expected loss) decoders ([`decode`]),
//! - genetic and hill-climbing codebook search ([`optimize`]),
//! - Monte Carlo error-rate sweeps ([`sim`]).

pub mod channel;
pub mod codes;
pub mod decode;
pub mod error;
pub mod loss;
pub mod optimize;
pub mod par;
pub mod reference;
pub mod sim;
pub mod symbols;

pub use codes::{Codebook, GeneratorMatrix};
pub use error::{Error, Result};
pub use loss::{LossSpec, LossTable};
pub use symbols::{Signedness, SymbolSpace, Word};
