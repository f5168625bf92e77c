pub mod amplify;
pub mod analysis;
pub mod baselines;
pub mod error;
pub mod experiment;
pub mod io;
pub mod ising;
pub mod simcore;
pub mod transduce;

pub use error::{Error, Result};
