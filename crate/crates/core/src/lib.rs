//! Finite-dimensional evaluation of Chern-Simons invariants of circle
//! bundles M(g,p) over genus-g surfaces.
//!
//! The crate evaluates, exactly or to certified precision, the formulas
//! that make up the invariant and cross-checks each against an independent
//! route:
//!
//! * [`lie`]: root systems, Weyl groups, Casimirs, dimensions, characters.
//! * [`genera`]: the Cartan-valued j, A-hat and Todd point functions.
//! * [`orbits`]: coadjoint-orbit Fourier transforms and the Kirillov identity.
//! * [`cft`]: level-k modular data (S and T matrices) with certification.
//! * [`verlinde`]: dimensions of spaces of conformal blocks.
//! * [`seifert`]: the Chern-Simons partition function with fibre Wilson lines.
//! * [`ym2`]: heat-kernel sums of 2D Yang-Mills with truncation certificates.
//! * [`pairings`]: exact quasi-polynomial fits of Verlinde tables in k.
//! * [`crosscheck`]: the consistency suite run by the CLI.

pub mod cft;
pub mod cli;
pub mod crosscheck;
pub mod error;
pub mod genera;
pub mod hp;
pub mod lie;
pub mod orbits;
pub mod pairings;
pub mod seifert;
pub mod sum;
pub mod verlinde;
pub mod ym2;

pub use error::{Error, Result};
pub use lie::{build_root_system, CartanElement, RootSystem, Series, Weight};
