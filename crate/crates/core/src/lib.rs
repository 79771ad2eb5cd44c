//! Quantitative wave-particle duality for generic two-way interferometers.
//!
//! A two-level quanton passes a beam splitter whose action is entangled with
//! an N-level which-way marker (WWM), then a phase shifter and a beam merger.
//! This crate evolves that joint state with dense complex linear algebra and
//! evaluates the duality measures built on top of it:
//!
//! * visibility `V = |C|` of the output fringes,
//! * predictability `P = |w+ - w-|`,
//! * quality `Q`, the trace distance between the marker's conditional states,
//! * distinguishability `D`, the trace norm of `w+ rho+ - w- rho-`,
//! * the composite `Xi = sqrt(Q^2 + P^2 - Q^2 P^2)`,
//!
//! together with the inequalities that bound `V` by each of them, the proof
//! identities behind those inequalities, and a closed-form model of two
//! qubits acting as each other's marker (`sqds`).
//!
//! Module map:
//!
//! * [`linalg`]: `ComplexMatrix`, Jacobi Hermitian eigensolver, trace norm,
//!   partial traces, Haar unitaries and random density matrices.
//! * [`interferometer`]: block operators, joint evolution, way probabilities,
//!   contrast factors and conditional marker states.
//! * [`measures`]: `D`, `Q`, `Xi`, `R`, `chi`, visibility bounds and the
//!   full inequality report.
//! * [`sqds`]: symmetric quanton-detecton closed forms, the bridge to the
//!   generic engine and figure data.
//! * [`sampling`]: seeded generators for random interferometer instances.

pub mod error;
pub mod format;
pub mod interferometer;
pub mod linalg;
pub mod measures;
pub mod rng;
pub mod sampling;
pub mod sqds;

pub use error::{Error, Result};
pub use interferometer::{EvolutionResult, InterferometerInstance, QuantonPrep, WwmBlocks};
pub use linalg::{ComplexMatrix, HermitianEigen};
pub use measures::DualityReport;
pub use sqds::{SqdsConfig, SqdsReport};

/// Slack tolerance applied to every inequality check.
pub const SLACK_TOL: f64 = 1e-9;
/// Tolerance for validating unitarity, reconstruction and derived identities.
pub const VALIDATE_TOL: f64 = 1e-10;
/// Tolerance for construction-time checks (Hermiticity, normalization).
pub const CONSTRUCT_TOL: f64 = 1e-12;
