//! Phonon-limited optical linewidths of group-IV vacancy centers in diamond.
//!
//! The crate is organised around four layers:
//!
//! * [`physics`]: closed-form single-phonon relaxation model (occupation
//!   numbers, absorption/emission rates, C/D linewidths, transform limits,
//!   temperature thresholds).
//! * [`fitting`]: weighted least-squares estimation for PLE lines, lifetime
//!   traces, the cubic coupling law and temperature series.
//! * [`simulate`]: seeded synthetic experiments (PLE scans with spectral
//!   diffusion and charge blinking, TRPL histograms, HBT correlations).
//! * [`registry`] and [`io`]: presets and the on-disk data formats.
//!
//! The `vacancy` binary wraps these behind a small command line, see [`cli`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod fitting;
pub mod io;
pub mod physics;
pub mod registry;
pub mod simulate;

pub use error::{Error, Result};
pub use physics::EmitterParams;

/// Version string recorded in reports and manifests.
pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");
