//! Geometry-aware pattern features for board games: walks over arbitrary
//! tilings, a textual feature language, bit-parallel matching, and
//! feature-biased Monte Carlo tree search.

pub mod chunkset;
pub mod cli;
pub mod dsl;
pub mod game;
pub mod gen;
pub mod instance;
pub mod render;
pub mod search;
pub mod topology;
pub mod walk;
