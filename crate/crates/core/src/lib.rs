pub mod cli;
pub mod construction2;
pub mod construction8;
pub mod engine;
pub mod error;
pub mod iso;
pub mod order;
pub mod reduction;
pub mod report;
pub mod sampling;
pub mod spec;
pub mod synth;
pub mod word;

pub use error::{Error, Result};
