//! Exact truncated-series arithmetic.

pub mod alpha;
pub mod coord;
pub mod hvec;
pub mod monomial;
pub mod rational;
pub mod tpoly;

pub use alpha::{alpha_inverse, alpha_mul, AlphaPoly};
pub use coord::{invert_coord_map, CoordMap, Substitution};
pub use hvec::{HVec, HbarWindow, SlotDifference};
pub use monomial::Monomial;
pub use rational::Rational;
pub use tpoly::TPoly;
