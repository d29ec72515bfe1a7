//! Extensive-form games as sets of quintuples, with subgame-perfection
//! checks built from value functions and piece-by-piece equilibrium tests.

pub mod convergence;
pub mod error;
pub mod fixtures;
pub mod form;
pub mod game;
pub mod io;
pub mod partition;
pub mod stationary;
pub mod strategy;

pub use error::{Error, Result};
