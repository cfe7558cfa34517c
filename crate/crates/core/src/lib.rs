//! Group structure, Haar measure, and isometry dynamics on `p`-adic balls
//! and spheres, in exact finite-precision arithmetic.
//!
//! The crate is `no_std` and needs only `alloc`. IO, JSON reports, and the
//! command-line front end live in the companion `padic-cli` crate.

#![no_std]

extern crate alloc;

pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod groups;
pub mod measure;
pub mod padic;

pub use dynamics::{ErgodicityVerdict, RationalMap};
pub use error::{Error, Result};
pub use geometry::{canonical_ball, Ball, CellIndex, ClopenSet, Region, Sphere};
pub use padic::{parse_rational, ExactRational, PAdic, Prime, Radius};
