//! Channel static antenna simulation core.
//!
//! An antenna on a moving device counter-moves so that its absolute position,
//! and with it the wireless channel, stays fixed. The device aperture limits
//! how far it can counter-move; when it runs out of travel it jumps to the
//! other end and holds a new position. The resulting channel is piecewise
//! static.
//!
//! This crate is `no_std` and only needs `alloc`. Float math goes through
//! `num_traits::Float` (libm) on targets whose `core` has none; on hosted
//! targets the inherent methods win, hence the `allow(unused_imports)` on
//! those imports. Positions are in carrier wavelengths throughout.
//!
//! * [`kinematics`] - device trajectories and the counter-movement controller
//! * [`field`] - frozen plane-wave multipath field H(x)
//! * [`experiment`] - regular / CSA / stationary measurement runs
//! * [`model`] - piecewise-static statistical channel model and its fit
//! * [`analysis`] - fade depth, phase, segmentation, K estimation, comparison

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod error;
pub mod experiment;
pub mod field;
pub mod kinematics;
pub mod model;
mod rng;
pub mod trace;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use trace::{ChannelTrace, Mode, TraceMeta, TraceSample};
