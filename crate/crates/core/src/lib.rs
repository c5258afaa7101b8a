//! Local block models for blocks with abelian defect group of rank 2 and
//! inertial quotient `C_l × C_l`: exact character theory, character lattices,
//! and the case-by-case extension of isometries between them.

#![no_std]

extern crate alloc;

pub mod charlattice;
pub mod cyclotomic;
pub mod engine;
pub mod groups;
pub mod isometry;
pub mod linalg;
pub mod localmodel;
