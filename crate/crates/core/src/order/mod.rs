//! Exact rationals, star-adjoined values and lexicographic universes.

pub mod point;
pub mod rational;
pub mod universe;

pub use point::{compare, o3, o4, q, Point, Star};
pub use rational::{fmt_rational, int, parse_rational, rat, Rational};
pub use universe::Universe;
