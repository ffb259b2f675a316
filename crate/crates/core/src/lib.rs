//! Exact computation of the resultant valuation `ordRes` of a rational map over the
//! Berkovich projective line, its crucial set and measure, and the minimal resultant locus.

pub mod error;
pub mod berktree;
pub mod cli;
pub mod crucial;
pub mod dynamics;
pub mod forms;
pub mod minresloc;
pub mod oracle;
pub mod ordres;
pub mod ring;

pub use error::{Error, Result};
