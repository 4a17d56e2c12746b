//! Simulator for a blind three-party quantum key distribution protocol in
//! which Bob owns the measurement basis, Alice encodes the key, and a
//! third party (the eavesdropper pair Eve1/Eve2) attempts to intercept it
//! by tagging photons with a wavelength label.
//!
//! The crate is organized bottom-up:
//!
//! * [`quantum`]: polarization qubits, planar rotations, Born-rule
//!   measurement, and the seeded random stream everything draws from.
//! * [`photon`]: photons as polarization plus classical labels
//!   (wavelength, time slot, intensity), label edits, and intensity checks.
//! * [`parties`]: honest Alice/Bob round operations for the basic and
//!   strong protocol variants, classical messages, and key sampling.
//! * [`adversary`]: the channel-strategy trait and the labeling /
//!   impersonation attack implementations.
//! * [`harness`]: full-session scheduling, per-round traces, detection
//!   statistics, and the machine-readable session report.

pub mod adversary;
pub mod harness;
pub mod parties;
pub mod photon;
pub mod quantum;
