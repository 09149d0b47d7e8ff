//! LDPC codes, short-cycle census and belief-propagation decoders with
//! per-check reweighting.

pub mod channel;
pub mod code;
pub mod construction;
pub mod cycles;
pub mod decoder;
pub mod encoder;
pub mod rng;
pub mod sim;

pub use code::{CodeError, DegreeProfile, ParityCheckMatrix};
pub use cycles::{census, count_cycles_of_length, CycleCensus, CycleError};
pub use decoder::{DecodeResult, Decoder, DecoderConfig, ReweightVector, Variant};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/codes.md")]
    mod codes {}
    #[doc = include_str!("../../../book/src/construction.md")]
    mod construction {}
    #[doc = include_str!("../../../book/src/cycles.md")]
    mod cycles {}
    #[doc = include_str!("../../../book/src/decoding.md")]
    mod decoding {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
