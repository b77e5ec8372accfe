//! Decoders for superposed binary LDPC codewords on a real Gaussian channel.
//!
//! `ℓ` users encode with the same binary LDPC code and transmit BPSK
//! scaled by per-user amplitudes; the receiver sees the sum plus noise and
//! wants a binary linear function `v = τ(c)` of the codewords. Depending on
//! `τ` this covers plain multi-user detection, interference channels,
//! two-way and multiway relaying.
//!
//! Modules, bottom up:
//!
//! - [`gf2`]: symbol packing and binary linear maps.
//! - [`ldpc`]: parity-check matrices, alist I/O, code construction,
//!   systematic encoding and a binary sum-product decoder.
//! - [`channel`]: signaling schedules, SNR conventions and the AWGN channel.
//! - [`likelihood`]: symbol-wise channel likelihoods and their projections.
//! - [`multistage`]: the DC, CD and CDC iterative multistage decoders.
//! - [`joint`]: the nonbinary joint sum-product decoder over `GF(2)^ℓ`.
//! - [`oracle`]: exact marginals by enumeration for small codes.
//! - [`sim`]: configuration files and the Monte-Carlo harness.
//!
//! Symbols pack one bit per user with user 0 in the least significant
//! position.

pub mod channel;
pub mod error;
pub mod exec;
pub mod gf2;
pub mod joint;
pub mod ldpc;
pub mod likelihood;
pub mod multistage;
pub mod oracle;
pub mod sim;

pub use error::{Error, Result};
pub use exec::Execution;
pub use gf2::BinaryLinearMap;
pub use ldpc::{Encoder, SparseParityCheck};
