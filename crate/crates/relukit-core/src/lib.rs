//! Constructive ReLU-network toolkit.
//!
//! The crate builds, verbatim, a family of explicit ReLU network
//! constructions (a logarithm-approximation network, partition-of-unity
//! networks, softmax conditional-probability networks) and provides the
//! statistical functionals needed to verify their quantitative guarantees
//! numerically: truncated Kullback-Leibler risk, Hellinger distance,
//! small-value-bound diagnostics and covering-number bounds.
//!
//! The crate is `no_std`-compatible (with `alloc`); the default `std`
//! feature turns on the standard library for convenience. File formats,
//! CSV reports and the command-line driver live in the companion `relukit`
//! crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod algebra;
pub mod divergence;
pub mod entropy;
pub mod error;
pub mod infinite_risk;
pub mod logapprox;
pub mod network;
pub mod numeric;
pub mod probnet;
pub mod simplex;
pub mod svb;

pub use error::{CoreError, Result};
pub use network::{ArchitectureSpec, Network, OutputActivation, ValidationReport};
