pub mod analysis;
pub mod bootstrap;
pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod parser;
pub mod pipeline;
pub mod stats;
pub mod synthetic;
pub mod templates;
pub mod tuning;

pub use error::{Error, Result};
