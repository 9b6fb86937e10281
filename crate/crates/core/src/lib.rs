//! Substring-query adversary bounds for parity.
//!
//! Functions on `{-1,1}^n` are stored densely; index bit `j` set means
//! coordinate `j+1` is `-1`.

pub mod adversary;
pub mod cube;
pub mod dictator;
pub mod error;
pub mod family;
pub mod suite;
pub mod table;
pub mod valq;
pub mod witness;

pub use cube::{CubeFunction, FourierSpectrum, Moments};
pub use error::{Error, Result};
pub use family::{FamilyKind, FamilySpec, QueryFamily, Subcube};
pub use valq::{ValqReport, ValqValue};
pub use witness::WitnessKind;
