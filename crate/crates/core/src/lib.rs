//! Discrete-event simulator and analysis toolkit for a relativistic
//! quantum bit-commitment protocol.
//!
//! Bob sends random BB84 qubits to Alice at a spacetime point P. Alice
//! commits to a bit by measuring every detected qubit in the basis
//! encoding it (Z for 0, X for 1) and relaying the outcomes over
//! pad-encrypted classical channels at light speed to her agents at the
//! lightlike-separated wings Q0 and Q1, who unveil by handing the
//! plaintext to Bob's adjacent agents. Bob accepts only when both
//! unveilings agree, arrive on time, and are statistically consistent
//! with his preparation record in the claimed basis while inconsistent in
//! the conjugate one.
//!
//! The crate provides:
//!
//! - [`spacetime`]: Minkowski events, intervals, causal order, protocol
//!   geometry, and the latest-binding-time computation.
//! - [`qubits`]: BB84 states, Born-rule projective measurement, noise and
//!   detection efficiency.
//! - [`channels`]: one-time pads, the message envelope, and the bit-exact
//!   outcome report wire format.
//! - [`sched`]: a causality-enforcing discrete-event scheduler that
//!   refuses physically impossible deliveries.
//! - [`protocol`]: honest agents, the end-to-end run driver, transcripts,
//!   and Bob's verifier.
//! - [`adversary`]: cheating strategies constrained to a single
//!   measurement at P, plus Monte Carlo attack estimation.
//! - [`analysis`]: exact binomial tails, threshold planning, and analytic
//!   soundness curves.
//!
//! Every randomized component is driven by seeded ChaCha streams, so runs,
//! attacks and sweeps are reproducible bit for bit.

pub mod adversary;
pub mod analysis;
pub mod channels;
pub mod protocol;
pub mod qubits;
pub mod rng;
pub mod sched;
pub mod spacetime;

pub use adversary::{
    estimate_success, estimate_success_parallel, execute_attack, per_qubit_monte_carlo,
    per_qubit_success_analytic, sweep_projective_angle, sweep_projective_angle_parallel,
    AttackReport, AttackStrategy,
};
pub use analysis::{
    binomial_tail, honest_acceptance_prob, plan_thresholds, soundness_curve, wilson_interval,
    ThresholdPlan, BREIDBART_RATE,
};
pub use channels::{encode_outcomes, decode_outcomes, Bits, Message, OneTimePad};
pub use protocol::{
    run_honest, run_honest_with, verify, ProtocolConfig, Transcript, Verdict, VerificationReport,
};
pub use qubits::{BB84State, Basis, QubitRecord};
pub use sched::Scheduler;
pub use spacetime::{
    causally_precedes, interval_squared, latest_binding_time, offset_geometry, standard_geometry,
    Event, Geometry, LabOffset, LabOffsets, Wing,
};
