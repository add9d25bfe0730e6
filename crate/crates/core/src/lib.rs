pub mod analysis;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod montecarlo;
pub mod optimizer;
pub mod protocol;
pub mod qcore;
pub mod reference_data;

mod numeric;

pub use error::{Error, Result};
