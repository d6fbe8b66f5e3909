//! Multicolor size Ramsey numbers of paths: adversarial colorings from affine
//! planes for the lower bound, and first-moment constants of the bipartite
//! pairing model for the upper bound.

pub mod adversary;
pub mod affine_plane;
pub mod arrowing;
pub mod bounds;
pub mod finite_field;
pub mod first_moment;
pub mod graphs;
pub mod pairing_model;
