//! Exact-arithmetic expansions of GJMS operators and Q-curvatures in terms of
//! the second-order building blocks `M_{2N}` and the scalars `W_{2N}`, with
//! suites that cross-check every closed-form coefficient against direct
//! iteration of the underlying differential operators.

pub mod backends;
pub mod error;
pub mod exact;
pub mod formulae;
pub mod free_algebra;
pub mod frobenius;
pub mod matrix;
pub mod nc_series;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
pub use exact::{compositions_of, m_coeff, n_coeff, nbar_coeff, Composition, Rational};
pub use formulae::{
    expand_p_explicit, expand_p_recursive, expand_q_explicit, expand_q_recursive, MExpansion, QExpansion, QKey,
};
pub use free_algebra::{NCPoly, Word};
pub use matrix::{RatMatrix, RatVector};
