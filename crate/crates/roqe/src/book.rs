//! Doc-test anchors for the guide: each chapter of book/src is included as
//! module documentation so its code blocks run under `cargo test --doc`.
//! One module per chapter keeps test failures traceable to their source.
#![allow(unused)]

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/data-model.md")]
pub mod data_model {}

#[doc = include_str!("../../../book/src/queries-and-plans.md")]
pub mod queries_and_plans {}

#[doc = include_str!("../../../book/src/provenance.md")]
pub mod provenance {}

#[doc = include_str!("../../../book/src/cooccurrence.md")]
pub mod cooccurrence {}

#[doc = include_str!("../../../book/src/factorization.md")]
pub mod factorization {}
