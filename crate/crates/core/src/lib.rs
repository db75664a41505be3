pub mod builder;
pub mod error;
pub mod evaluate;
pub mod exec;
pub mod graph;
pub mod last;
pub mod layers;
pub mod routing;
pub mod spanning;
pub mod ssrob;
pub mod unionfind;

pub use error::{Error, Result};
pub mod generate;
pub mod pipeline;
pub mod cli;
