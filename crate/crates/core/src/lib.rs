//! Gap statistics of the Farey fractions whose denominators are prime to a
//! fixed prime `p`.
//!
//! The crate has two independent sides that meet in the tests:
//!
//! * an empirical side that streams the Farey sequence ([`farey`]) and
//!   tabulates the gap signatures of consecutive windows ([`gaps`]);
//! * a theoretical side that builds the regions of the Farey triangle cut out
//!   by prescribed index sequences with exact rational arithmetic ([`geom`]),
//!   enumerates the residue/index families that contribute to a given gap
//!   signature ([`residue`]) and sums their areas into a limiting density
//!   ([`density`]).
//!
//! [`lattice`] counts coprime lattice points with congruence conditions, both
//! by brute force and through a Möbius sum, and ties the two sides together at
//! finite order.
//!
//! With the default `parallel` feature the heavy loops run on rayon; without
//! it every entry point falls back to a sequential implementation that
//! produces identical output.

pub mod arith;
pub mod density;
pub mod error;
pub mod farey;
pub mod gaps;
pub mod geom;
pub mod lattice;
pub mod residue;

pub use density::{
    compare, corollary_closed_form, finite_identity_check, theoretical_density,
    ComparisonRow, DensityEstimate, IdentityReport,
};
pub use error::{Error, Result};
pub use farey::{enumerate_farey, farey_size, next_pair, size_main_term, FareyFraction, FareyStream};
pub use gaps::{delta_of_pair, empirical_density, triple_index_counts, tuple_counts, DeltaTuple, GapHistogram};
pub use geom::{HalfPlane, Point, Rational, RationalPolygon};
pub use lattice::{CongruenceClass, LatticeRegion};
pub use residue::{enumerate_members, IndexSlot, IndexTemplate, MemberFamily, NConstraint, ResiduePattern};
