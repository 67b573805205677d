//! Simulation of single-photon polarization measurement with state reduction.
//!
//! - [`qstate`]: Bloch vectors, density matrices, observables, Born
//!   probabilities and the reduction unitaries.
//! - [`detector`]: joint photon + detector evolution, branch decomposition,
//!   coherence revivals and the per-event reduction sampler.
//! - [`strategy`]: measurement plans, outcome sequences and frequency
//!   estimators.
//! - [`epr`]: singlet/triplet pair states, joint measurements, correlation
//!   and CHSH experiments.
//! - [`qkd`]: key duplication over singlet pairs with basis sifting and
//!   error-rate estimation.
//! - [`experiment`]: JSON configs, presets and the artifact-writing runner
//!   behind the `qreduce` binary.
//!
//! Runnable examples live in `examples/`:
//!
//! | example | shows |
//! |---|---|
//! | `bloch_born` | density matrices, purity, Born probabilities, commutators |
//! | `reduction_event` | reduction unitaries and seeded single events |
//! | `detector_dynamics` | coherence loss, revivals, a finite coupling pulse |
//! | `strategies` | measurement plans and average densities per observable |
//! | `epr_correlations` | joint probabilities, sampled covariances, bounds |
//! | `chsh` | CHSH value against the local deterministic maximum |
//! | `qkd` | sessions with and without bit-flip noise |
//! | `run_preset` | a named preset written to disk |
//!
//! ```
//! use qreduce::qstate::{born_probabilities, BlochVector};
//!
//! let (pv, ph) = born_probabilities(BlochVector::X, BlochVector::Z).unwrap();
//! assert!((pv - 0.5).abs() < 1e-12 && (ph - 0.5).abs() < 1e-12);
//! ```

pub mod detector;
pub mod epr;
pub mod error;
pub mod experiment;
pub mod qkd;
pub mod qstate;
pub mod seed;
pub mod strategy;

pub use error::{Error, Result};
pub use qstate::{BlochVector, PolarizationDensity, PureKet};
