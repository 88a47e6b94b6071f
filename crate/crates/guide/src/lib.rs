//! The chapters of the guide in `book/`, compiled as doc comments so that
//! `cargo test` runs every snippet in them.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/problems.md")]
pub mod problems {}
#[doc = include_str!("../../../book/src/neighbourhood.md")]
pub mod neighbourhood {}
#[doc = include_str!("../../../book/src/leh.md")]
pub mod leh {}
#[doc = include_str!("../../../book/src/voronoi.md")]
pub mod voronoi {}
#[doc = include_str!("../../../book/src/comparators.md")]
pub mod comparators {}
#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
