//! Two-mode model of two Bose-Einstein condensates merged by moving their
//! traps together.
//!
//! The system is `H(t) = U(t) S_z² − J(t) S_x` in the collective-spin
//! (Schwinger) representation of the two trap modes. Starting from Fock or
//! Fock×coherent product states, the crate evolves the state through a
//! calibrated merge schedule and reports the largest condensate fraction η
//! and the mode angles (θ, φ) of the one-body density matrix.
//!
//! Units: ħ = 1, energies in units of the initial interaction `U₀ = 1`, time
//! in units of `1/U₀`.

pub mod error;
pub mod observables;
pub mod propagator;
pub mod schedule;
pub mod spectrum;
pub mod spin;
pub mod states;
pub mod tridiag;

pub use error::{Error, Result};
pub use observables::{
    condensate_reading, density_matrix, energy, level_populations, mixture_density_matrix, CondensateReading,
    LevelPopulations, OneBodyDensityMatrix,
};
pub use propagator::{
    dense_reference_evolve, evolve_mixture, evolve_sector, Coefficients, EvolutionConfig, FrozenSchedule,
    SampleRecord, SectorEvolution, Trajectory,
};
pub use schedule::{Direction, MergeSchedule, TrapGeometry};
pub use spectrum::{eigenvalues, regime_classify, spectrum_sweep, Regime, RegimeBounds, SpectrumTable};
pub use spin::{build_hamiltonian, spin_expectations, SectorBasis, SpinExpectation, TridiagonalHamiltonian};
pub use states::{fock_coherent, fock_fock, MixtureState, SectorState};
