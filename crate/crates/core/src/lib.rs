//! Finitely presented groups, coset enumeration, iterated centralizer
//! extensions and semi-decision procedures for limit groups.

pub mod amalgam;
pub mod corpus;
pub mod coset;
pub mod engines;
pub mod error;
pub mod hom;
pub mod ice;
pub mod oracle;
pub mod presentation;
pub mod recognize;
pub mod retracts;
pub mod stallings;
pub mod syntax;
pub mod tietze;
pub mod word;

pub use error::{Error, Result};
pub use word::{FreeGroup, Letter, Word};
