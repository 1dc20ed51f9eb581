pub mod bounds;
pub mod cli;
pub mod error;
pub mod gap;
pub mod model;
pub mod montecarlo;
pub mod tolerance;

pub use error::{Error, Result};
pub use model::{ChannelParams, StateCovariance, StateDecomposition};
