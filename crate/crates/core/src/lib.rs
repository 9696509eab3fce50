//! Finite categorical universal algebra: finite categories and presheaves,
//! finitely presented theories, their models in finite sets, and the
//! theory/monad correspondence at bounded term depth.

// index loops mirror the mathematics; keep them
#![allow(clippy::needless_range_loop, clippy::type_complexity)]

pub mod fincat;
pub mod files;
pub mod finset;
pub mod presheaf;
pub mod rewrite;
pub mod suite;
pub mod models;
pub mod monadic;
pub mod theory;
