//! Desk-scale computational companion to the compactness / finitely
//! satisfiable generics correspondence for groups over the p-adics.
//!
//! * [`padic`]: finite-precision p-adic numbers, valuations and balls.
//! * [`sets`]: cylinder-based definable subsets of `Q_p^n`, their exact
//!   measure, and the closed-and-bounded compactness decision.
//! * [`groups`]: compact p-adic groups reduced modulo `p^m`, exact Haar
//!   measure, Haar sampling and translation of sets.
//! * [`vc`]: shattering, VC dimension, Sauer–Shelah, the sample-size
//!   search `N(k, eps)` and randomized epsilon-net experiments.
//! * [`fsg`]: translate covers, finite-satisfiability witnesses and the
//!   batch pipeline behind the CLI.

pub mod error;
pub mod fsg;
pub mod groups;
pub mod padic;
pub mod rational;
pub mod sets;
pub mod vc;

pub use error::{Error, Result};
pub use padic::{Ball, PadicApprox, Valuation};
pub use rational::Rational;
