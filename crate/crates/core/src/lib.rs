//! Bound states of the Dirac equation with spin (`S = V`) and pseudo-spin
//! (`S = -V`) symmetry, in one dimension and in `d > 1` dimensions, and
//! integral-transform criteria that order the eigenvalues of two problems
//! whose potentials cross.

pub mod numerics;
pub mod potentials;
pub mod shooting;
pub mod dirac1d;
pub mod diracd;
pub mod problem;
pub mod reduction;
pub mod theorems;
