//! Quantum channels between matrix algebras and their factorizations through
//! finite-dimensional von Neumann algebras.
//!
//! Kraus operators K_i are dim_out×dim_in. `vec` stacks columns and `kron` is
//! left-factor-major throughout. The complement of a channel with p Kraus
//! operators acts into M_p.

pub mod channel;
pub mod cli;
pub mod complement;
pub mod error;
pub mod factorization;
pub mod io;
pub mod lmi;
pub mod numerics;
pub mod schur;

pub use error::{Error, Result};
