pub mod cli;
pub mod coherent_bounds;
pub mod cvcore;
pub mod error;
pub mod optimize;
pub mod oracle;
pub mod quad;
pub mod specfun;
pub mod state_bounds;

pub use error::{Error, Result};
