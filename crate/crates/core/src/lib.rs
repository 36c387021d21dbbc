//! Quantum-jump monitoring of a driven, damped two-level atom.
//!
//! * [`algebra`]: two-level states, operators, and density matrices.
//! * [`dynamics`]: the master equation, its steady state, and the
//!   local-oscillator-dependent measurement operators.
//! * [`scheme`]: closed-form adaptive schemes under which the atom jumps
//!   between exactly two pure states, with their occupation entropy.
//! * [`trajectory`]: seeded waiting-time Monte Carlo of the monitored atom.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod dynamics;
pub mod error;
pub mod scheme;
pub mod trajectory;

pub use algebra::{
    bloch_of, fidelity, normalize, project, BlochVector, Complex, DensityMatrix, Operator2,
    PureState,
};
pub use dynamics::{
    apply_jump, evolve_nojump, integrate_master, jump_rate, lindblad_rhs, measurement_ops,
    steady_state, LocalOscillator, MeasurementOps, SystemParams,
};
pub use error::{Error, Result};
pub use scheme::{
    entropy_curve, enumerate_pairs, f_of_mu, find_schemes, fixed_states, mu_candidates,
    rate_based_occupation, shannon_entropy, solve_occupation, verify_mu, Branch, EntropyRow,
    Family, FixedStatePair, JumpingScheme, MuCandidate, Sign,
};
pub use trajectory::{
    simulate_batch, simulate_ensemble, simulate_one, time_average_rho, EnsembleStats, Policy,
    SimConfig, TrajectoryRecord,
};
