//! Numerics for a Gaussian time–frequency localization channel: a signal
//! is confined to an effective duration `alpha` and bandwidth `beta/2` by
//! a Gaussian filter pair and observed in white noise of spectral density
//! `theta2` per real dimension.
//!
//! The library covers, in matching discrete and continuous forms:
//!
//! * the filter's Hermite eigensystem, Mehler kernel, and Weyl symbol
//!   ([`channel`], [`specfun`]);
//! * capacity by water-filling and rate–distortion by reverse
//!   water-filling, with their closed-form Lambert-W limits
//!   ([`waterfill`]);
//! * the same quantities as areas in the time–frequency plane, plus
//!   eigenvalue-sum/symbol-integral comparisons for several test
//!   functions ([`tfplane`]);
//! * spectral-efficiency comparisons against the ideal band-limited
//!   channel and a wideband reference curve ([`gallager`]);
//! * a seeded Monte-Carlo testbench for the measurement model and the
//!   estimation quantities (LLSE/MMSE) tied to the capacity derivative
//!   ([`simulate`]).
//!
//! Quantities are returned in nats where the name says `nats` and
//! converted at the boundary with [`nats_to_bits`]/[`bits_to_nats`];
//! energies are in watt-seconds and rates per transmission unless a name
//! says `per_second`.

// Domain guards are written `if !(x > 0.0)` on purpose: the negated form
// rejects NaN in the same comparison, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod gallager;
pub mod quad;
pub mod simulate;
pub mod specfun;
pub mod tfplane;
pub mod waterfill;

pub use error::{Error, Result};

/// Convert an information quantity from nats to bits.
pub fn nats_to_bits(nats: f64) -> f64 {
    nats * std::f64::consts::LOG2_E
}

/// Convert an information quantity from bits to nats.
pub fn bits_to_nats(bits: f64) -> f64 {
    bits * std::f64::consts::LN_2
}
