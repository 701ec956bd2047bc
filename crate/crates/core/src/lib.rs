//! Exact-arithmetic computation of geometric motivic Poincaré series.
//!
//! Given the characteristic exponents of an irreducible quasi-ordinary
//! hypersurface germ (or the semigroup generators of an affine toric germ),
//! this crate computes, in exact rational arithmetic:
//!
//! - the logarithmic jacobian ideals, their Newton polyhedra and dual fans;
//! - the auxiliary interior series `P(S)` and the full geometric motivic
//!   Poincaré series as rational functions in the two symbols `L` and `T`;
//! - the finite candidate-pole set `B(S)`;
//! - the motivic volume of the arc space;
//! - a brute-force jet-class oracle that independently recomputes every
//!   series coefficient for cross-checking the closed forms.
//!
//! Modules follow the pipeline order: [`numlin`] (lattice linear algebra),
//! [`polyhedra`] (cones, fans, dual fans), [`genfun`] (lattice-point
//! generating functions), [`ltseries`] (rational functions in `L`, `T`),
//! [`qocore`] (characteristic data and the minimizer combinatorics),
//! [`motivic`] (series assembly), [`oracle`] (brute-force enumeration).

pub mod error;
pub mod genfun;
pub mod ltseries;
pub mod motivic;
pub mod numlin;
pub mod oracle;
pub mod polyhedra;
pub mod qocore;

pub use error::{Error, Result};
pub use genfun::{ConeSeries, MonomialSum};
pub use ltseries::{BivRat, LPoly, LRat, LVolRat, TPoly};
pub use motivic::AssemblyReport;
pub use numlin::{rat, rat_int, Lattice, Rat, RatVec};
pub use polyhedra::{Cone, Fan, NewtonData};
pub use qocore::{CharData, LatticeChain, Mode, QoSystem, SectionData, WkResult};
