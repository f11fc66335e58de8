pub mod bpsk;
pub mod cli;
pub mod error;
pub mod fmt;
pub mod opalg;
pub mod renyi;
pub mod secbound;
pub mod verify;
pub mod wiretap;

pub use error::{Error, Result};
