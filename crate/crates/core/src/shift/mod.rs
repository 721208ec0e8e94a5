//! Subshifts of finite type over a finite (truncated) alphabet with locally
//! constant potentials.
//!
//! A potential `ψ` of depth `k` is a value on every admissible word of length
//! `k`; the transfer operator `L_{sψ,p} g(ω) = Σ_a ψ^p e^{sψ}(aω) g(aω)` then
//! maps functions that are constant on depth-`k` cylinders into themselves
//! and is represented exactly by a square matrix.

mod lattice;
mod operator;
mod system;
mod words;

pub use lattice::{d_genericity, lattice_test, DGenericity, Lattice};
pub use operator::{
    cylinder_operator, holder_modulus_in_s, poincare_eta, pressure_derivs_shift, spectral_data, spectral_radius,
    summability_stats, CylinderMatrix, EtaReport, HolderFit, ShiftPressure, Summability,
};
pub use system::{PotentialSpec, ShiftModel, SymbolicSystem};
pub use words::{count_words, CylinderSet};

/// A symbolic system seen through its inverse branches: prepending `letter`
/// to the current word is admissible when `step` returns the increment of the
/// Birkhoff sum of `-ψ` together with the new state.
pub trait ShiftPotential: Sync {
    type State: Clone + Send + Sync;

    fn alphabet_size(&self) -> usize;

    /// Letters are `1..=alphabet_size()`.
    fn step(&self, letter: usize, state: &Self::State) -> Option<(f64, Self::State)>;

    /// A positive lower bound on every increment.
    fn min_increment(&self) -> f64;
}
