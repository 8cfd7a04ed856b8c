//! Direct and inverse resonance problems for Jacobi operators on the
//! half-lattice that coincide with a q-periodic operator beyond a finite
//! site.

pub mod background;
pub mod error;
pub mod inverse;
pub mod jost;
pub mod oracle;
pub mod poly;
pub mod sample;
pub mod states;

pub use background::{Background, BandStructure, Sheet, SheetPoint};
pub use error::{Error, Result};
pub use inverse::{Candidate, GlmOptions, Inversion, Kernel};
pub use jost::{Constants, JostData, JostPair, Operator, Perturbation};
pub use poly::{Poly, Root, RootSet};
pub use states::{State, StateKind, Tolerances};
