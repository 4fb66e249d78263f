//! Exact local endoscopy computations for `SL(2)` over non-archimedean local
//! fields: quadratic extensions and their characters, orbital and
//! `κ`-orbital integrals, transfer factors, germ expansions and spectral
//! character identities, with finite oracles to cross-check them.

pub mod arith;
pub mod cyclo;
pub mod matrix;
pub mod oracle;
pub mod orbital;
pub mod quad_ext;
pub mod spectral;
pub mod suite;
pub mod torus;
pub mod transfer;
pub mod error;
pub mod germs;

pub use error::{Error, Result};
