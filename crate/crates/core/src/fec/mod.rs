//! Channel coding: LDPC with soft output for SIC, convolutional code with
//! block interleaving for the radar-communication link.

mod conv;
pub(crate) mod gf2;
mod interleaver;
mod ldpc;
mod soft;

pub use conv::{conv_encode, viterbi_decode, ConvCode};
pub use interleaver::BlockInterleaver;
pub use ldpc::{
    ldpc_decode, ldpc_encode, peg_regular, standard_code_from_seed, LdpcCode, SoftDecoderOutput, LLR_CLIP,
    MIN_SUM_SCALE, STANDARD_SEED,
};
pub(crate) use soft::sigmoid;
pub use soft::{soft_symbols, soft_symbols_with_variance};
