pub mod cli;
pub mod dense;
pub mod error;
pub mod ksverify;
pub mod meanking;
pub mod oracle;
pub mod orbit;
pub mod pauli;
pub mod ppsengine;
pub mod stabilizer;

pub use error::{Error, Result};
