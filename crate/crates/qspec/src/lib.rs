//! Numerical toolkit for the q-spectrum of the Dirichlet-Laplacian: nontrivial
//! solutions of the Lane-Emden eigenvalue equation
//! `-Delta u = lambda |u|^(q-2) u` with homogeneous Dirichlet conditions,
//! computed, composed across disconnected domains, and verified against
//! independent identities.

pub mod compose;
pub mod core;
pub mod error;
pub mod grid2d;
pub mod radial;
pub mod verify;

pub mod cli;

pub use error::{Error, Result};
