//! The chapters of the guide in `book/`, compiled as doc-tests so their Rust
//! listings keep running against the current API.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/parents-and-norming.md")]
pub mod parents_and_norming {}

#[doc = include_str!("../../../book/src/finite-sample-laws.md")]
pub mod finite_sample_laws {}

#[doc = include_str!("../../../book/src/limit-laws.md")]
pub mod limit_laws {}

#[doc = include_str!("../../../book/src/entropy-and-divergence.md")]
pub mod entropy_and_divergence {}

#[doc = include_str!("../../../book/src/domains-of-attraction.md")]
pub mod domains_of_attraction {}

#[doc = include_str!("../../../book/src/simulation.md")]
pub mod simulation {}

#[doc = include_str!("../../../book/src/command-line.md")]
pub mod command_line {}

#[doc = include_str!("../../../book/src/numerical-notes.md")]
pub mod numerical_notes {}
