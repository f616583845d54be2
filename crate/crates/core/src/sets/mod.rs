//! Definable subsets of `Q_p^n`: cylinders, window sets with finitely many
//! corrections and an optional unbounded tail, and box exhaustions.

mod cylinder;
mod exhaustion;
mod window;

pub use cylinder::{CylinderSet, Residue, ENUMERATION_CAP};
pub use exhaustion::{GammaExhaustion, GAMMA_FLOOR};
pub use window::{compact_locus, BoolOp, Point, WindowSet};

pub(crate) use cylinder::{all_digits, checked_pow};
