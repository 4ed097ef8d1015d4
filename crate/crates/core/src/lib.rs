//! Stability conditions on the derived category of the Kronecker quiver with
//! `n` arrows, studied through local charts `(z, w)` and the quotient map
//! `chi_n` to the projective line.

pub mod atlas;
pub mod error;
pub mod ksequence;
pub mod mutation;
pub mod precise;
pub mod projective;
pub mod lifting;
pub mod stability;

pub use error::{Error, Result};
