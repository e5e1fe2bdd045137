//! Exact lattice computations for symplectic 4-manifolds with a
//! codimension-2 symplectic submanifold, and for their fiber sums along
//! spheres.
//!
//! Everything is integer (or exact rational) arithmetic on intersection
//! lattices: no representability of classes by actual surfaces is decided,
//! so "exceptional" always means the lattice conditions `E^2 = -1`,
//! `K.E = -1`.

#![allow(clippy::needless_range_loop)]

pub mod enumerate;
pub mod error;
pub mod fibersum;
pub mod gw;
pub mod lattice;
pub mod library;

pub use error::{Error, Result};
pub use lattice::{
    adjunction_genus, embedded_genus, validate_model, HomologyClass, IntersectionLattice, LatticeId, ManifoldModel,
    ModelFlags, SymplecticPair, Violation,
};
pub use library::{CapKind, StandardCap};
