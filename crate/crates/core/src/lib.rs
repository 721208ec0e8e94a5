//! Thermodynamic formalism at desk scale.
//!
//! The crate works with three kinds of dynamical systems:
//!
//! * centered finite Blaschke products acting on the unit circle
//!   ([`blaschke`], [`markov`], [`transfer`], [`orbit`], [`stochastic`]),
//! * countable-alphabet subshifts of finite type, truncated to finitely many
//!   letters, with locally constant potentials ([`shift`]),
//! * doubly parabolic self-maps of the upper half-plane of the form
//!   `F(z) = z - Σ t_i / (z - b_i)` and their first-return maps ([`parabolic`]).
//!
//! For each it computes transfer-operator spectra, pressure and its
//! derivatives, conformal and equilibrium measures, Poincaré series and exact
//! backward-orbit counts.

pub mod blaschke;
pub mod circle;
pub mod config;
pub mod counting;
pub mod error;
pub mod linalg;
pub mod markov;
pub mod observable;
pub mod orbit;
pub mod parabolic;
pub mod poly;
pub mod quadrature;
pub mod shift;
pub mod stochastic;
pub mod transfer;

mod par;

pub use blaschke::{BlaschkeMap, ClarkMeasure};
pub use circle::{Arc, ArcSet, CirclePoint};
pub use counting::CountingLedger;
pub use error::{Error, Result};
pub use linalg::SpectralData;
pub use observable::Observable;
