//! Compiles and runs the guide's Rust listings as doctests.

#[doc = include_str!("src/overview.md")]
pub mod overview {}

#[doc = include_str!("src/games.md")]
pub mod games {}

#[doc = include_str!("src/decomposition.md")]
pub mod decomposition {}

#[doc = include_str!("src/solving.md")]
pub mod solving {}

#[doc = include_str!("src/cli.md")]
pub mod cli {}
