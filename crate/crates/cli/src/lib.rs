//! Library surface of the sandlab CLI: rendering, figure reproduction,
//! and the acceptance suite. The binary in `main.rs` is a thin wrapper.

pub mod commands;
pub mod figures;
pub mod render;
pub mod suite;
