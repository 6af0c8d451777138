//! Bipartition combinatorics, point-count polynomials and finite-field
//! orbit censuses for the symplectic, odd orthogonal and exotic nilpotent
//! cones.

pub mod combinatorics;
pub mod maps;
pub mod polycount;
pub mod finitefield;
pub mod cones;
pub mod cli;
