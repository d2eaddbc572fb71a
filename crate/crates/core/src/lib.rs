//! Exact degenerate Bernoulli, Euler and Sheffer-type polynomials.
//!
//! Everything is computed over ℚ with λ and the family parameters kept as
//! polynomial indeterminates, so identities between these families can be
//! checked coefficient by coefficient.

pub mod cli;
pub mod error;
pub mod exactalg;
pub mod families;
pub mod fps;
pub mod identities;
pub mod randvar;

pub use error::{Error, Result};
pub use exactalg::{Poly, Rational, Var};
pub use families::{Families, FamilyId};
pub use fps::Series;
pub use randvar::{MomentProvider, ShefferY};
