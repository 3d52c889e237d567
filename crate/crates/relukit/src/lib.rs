//! Companion crate of `relukit-core`: the dense JSON network format, CSV
//! check reports, the named verification suites, the rate-study and
//! infinite-risk drivers, and the `relukit` command-line binary.

pub mod json;
pub mod report;
pub mod study;
pub mod suites;

pub use relukit_core as core;
