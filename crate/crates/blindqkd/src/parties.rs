//! Honest Alice and Bob: secret draws, the quantum round operations for
//! both protocol variants, classical-channel messages, and key-sample
//! error estimation.
//!
//! Round shape (strong variant): Alice emits two photons prepared at
//! private angles `theta1`, `theta2`. Bob rotates pulse `i` by
//! `phi + (-1)^{s_i} * pi/4` with a private basis angle `phi` and private
//! shuffle bits `s_i`, and returns both. Alice rotates pulse `i` by
//! `-theta_i + (-1)^k * pi/4` (undoing her preparation and encoding the
//! key bit `k`), blocks the pulse selected by her private blocking choice
//! `b`, scrubs the survivor's temporal label, and forwards it. Bob undoes
//! `phi` and measures; once Alice discloses `b` he recovers `k` via the
//! shuffle bit of the surviving pulse. The basic variant is the one-pulse
//! version without shuffle bits or blocking.
//!
//! All secret draws go through the `draw` constructors so the per-round
//! draw order is fixed in one place.

use crate::photon::{LabelSet, Photon, PhotonIds, PulseIndex, PulsePair};
use crate::quantum::{measure, prepare, rotate, BasisAngle, QuantumError, RngStream};
use std::f64::consts::FRAC_PI_4;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PartiesError {
    #[error("key length mismatch: {a} vs {b}")]
    KeyLengthMismatch { a: usize, b: usize },
    #[error("cannot sample an empty key")]
    EmptyKey,
    #[error("sample fraction {0} outside (0, 1]")]
    InvalidSampleFraction(f64),
    #[error("expected {expected}, got {got}")]
    UnexpectedMessage {
        expected: &'static str,
        got: &'static str,
    },
}

/// `(-1)^bit` as a rotation-sign factor.
pub fn key_sign(bit: bool) -> f64 {
    if bit {
        -1.0
    } else {
        1.0
    }
}

/// Bob's per-pulse rotation angle `phi + (-1)^s * pi/4`.
pub fn shuffle_angle(phi: f64, s: bool) -> f64 {
    phi + key_sign(s) * FRAC_PI_4
}

/// Alice's encoding angle `-theta + (-1)^k * pi/4`.
pub fn encode_angle(theta: f64, k: bool) -> f64 {
    -theta + key_sign(k) * FRAC_PI_4
}

/// Alice's per-round private values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AliceRoundSecrets {
    /// Preparation angle of the first pulse, in `[0, 2*pi)`.
    pub theta1: f64,
    /// Preparation angle of the second pulse, in `[0, 2*pi)`.
    pub theta2: f64,
    /// Key bit for this round.
    pub k: bool,
    /// Which pulse she will block.
    pub b: PulseIndex,
}

impl AliceRoundSecrets {
    /// Draw order: `theta1`, `theta2`, `k`, `b`.
    pub fn draw(rng: &mut RngStream) -> Self {
        Self {
            theta1: rng.angle(),
            theta2: rng.angle(),
            k: rng.bit(),
            b: PulseIndex::from_bit(rng.bit()),
        }
    }

    pub fn theta(&self, index: PulseIndex) -> f64 {
        match index {
            PulseIndex::First => self.theta1,
            PulseIndex::Second => self.theta2,
        }
    }

    /// The pulse that survives blocking.
    pub fn kept(&self) -> PulseIndex {
        self.b.other()
    }
}

/// Bob's per-round private values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BobRoundSecrets {
    /// Basis angle, in `[0, 2*pi)`.
    pub phi: f64,
    /// Shuffle bit applied to the first pulse.
    pub s1: bool,
    /// Shuffle bit applied to the second pulse.
    pub s2: bool,
}

impl BobRoundSecrets {
    /// Draw order: `phi`, `s1`, `s2`.
    pub fn draw(rng: &mut RngStream) -> Self {
        Self {
            phi: rng.angle(),
            s1: rng.bit(),
            s2: rng.bit(),
        }
    }

    pub fn shuffle_bit(&self, index: PulseIndex) -> bool {
        match index {
            PulseIndex::First => self.s1,
            PulseIndex::Second => self.s2,
        }
    }
}

/// Who (claims to have) sent a classical message.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    Alice,
    Bob,
}

/// Messages on the authenticated-in-appearance classical channel.
///
/// `BlockDisclosure` is ordering-sensitive: Alice sends it only after Bob
/// reports his final measurement is done, which the session harness
/// enforces as a trace invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassicalMessage {
    /// Acknowledges receipt of the expected photons at a hop.
    Receipt { round: u64, from: Party },
    /// Alice reveals which pulse she blocked.
    BlockDisclosure { round: u64, blocked: PulseIndex },
    /// Bob asks Alice for the key bits at `indices`.
    SampleRequest { indices: Vec<usize> },
    /// Alice answers a [`ClassicalMessage::SampleRequest`].
    SampleResponse { bits: Vec<bool> },
    /// Either party tears the session down.
    Abort { reason: String },
}

impl ClassicalMessage {
    pub fn kind(&self) -> &'static str {
        match self {
            ClassicalMessage::Receipt { .. } => "receipt",
            ClassicalMessage::BlockDisclosure { .. } => "block-disclosure",
            ClassicalMessage::SampleRequest { .. } => "sample-request",
            ClassicalMessage::SampleResponse { .. } => "sample-response",
            ClassicalMessage::Abort { .. } => "abort",
        }
    }
}

/// Alice emits the round's two photons at time slots 1 and 2, polarized
/// at her private angles; all other labels are canonical.
pub fn alice_prepare_pair(
    secrets: &AliceRoundSecrets,
    canonical: LabelSet,
    ids: &mut PhotonIds,
) -> PulsePair {
    let first = Photon::new(prepare(secrets.theta1), canonical.with_time_slot(1.0), ids);
    let second = Photon::new(prepare(secrets.theta2), canonical.with_time_slot(2.0), ids);
    PulsePair::new(first, second)
}

/// Bob rotates pulse `i` by `phi + (-1)^{s_i} * pi/4`.
pub fn bob_shuffle_rotate(
    pair: PulsePair,
    secrets: &BobRoundSecrets,
) -> Result<PulsePair, QuantumError> {
    pair.try_map_pols(|index, pol| {
        rotate(pol, shuffle_angle(secrets.phi, secrets.shuffle_bit(index)))
    })
}

/// Alice rotates pulse `i` by `-theta_i + (-1)^k * pi/4`, blocks pulse
/// `b`, and scrubs the survivor's temporal label before forwarding it.
pub fn alice_encode_block(
    pair: PulsePair,
    secrets: &AliceRoundSecrets,
    canonical_slot: f64,
) -> Result<Photon, QuantumError> {
    let encoded =
        pair.try_map_pols(|index, pol| rotate(pol, encode_angle(secrets.theta(index), secrets.k)))?;
    let kept = *encoded.get(secrets.kept());
    Ok(crate::photon::scrub_temporal(kept, canonical_slot))
}

/// Bob undoes `phi` and measures in the rectilinear basis. Returns the
/// outcome bit `m`.
pub fn bob_final_measure(
    photon: &Photon,
    secrets: &BobRoundSecrets,
    rng: &mut RngStream,
) -> Result<bool, QuantumError> {
    let compensated = rotate(photon.pol(), -secrets.phi)?;
    let (m, _) = measure(&compensated, BasisAngle::new(0.0), rng)?;
    Ok(m)
}

/// Bob recovers the key bit from his outcome `m` and Alice's disclosure:
/// with `j` the surviving pulse, `k = 1 XOR m XOR s_j`.
pub fn bob_decode(
    m: bool,
    disclosure: &ClassicalMessage,
    secrets: &BobRoundSecrets,
) -> Result<bool, PartiesError> {
    let ClassicalMessage::BlockDisclosure { blocked, .. } = disclosure else {
        return Err(PartiesError::UnexpectedMessage {
            expected: "block-disclosure",
            got: disclosure.kind(),
        });
    };
    let survivor = blocked.other();
    Ok(!m ^ secrets.shuffle_bit(survivor))
}

/// Basic-variant encoding: rotate the single returned photon by
/// `-theta + (-1)^k * pi/4`.
pub fn alice_encode_basic(photon: Photon, theta: f64, k: bool) -> Result<Photon, QuantumError> {
    let pol = rotate(photon.pol(), encode_angle(theta, k))?;
    Ok(photon.with_pol(pol))
}

/// Basic-variant readout: undo `phi` and measure in the basis at `pi/4`.
/// The outcome bit is the key bit directly.
pub fn bob_measure_basic(
    photon: &Photon,
    phi: f64,
    rng: &mut RngStream,
) -> Result<bool, QuantumError> {
    let compensated = rotate(photon.pol(), -phi)?;
    let (m, _) = measure(&compensated, BasisAngle::new(FRAC_PI_4), rng)?;
    Ok(m)
}

/// Result of comparing a random key sample over the classical channel.
#[derive(Debug, Clone, PartialEq)]
pub struct QberSample {
    /// Fraction of sampled positions that disagreed.
    pub qber: f64,
    /// Sampled positions, ascending. These bits are burned: both parties
    /// drop them from the final key.
    pub sampled_indices: Vec<usize>,
    pub mismatches: usize,
}

/// Samples `ceil(fraction * n)` positions without replacement and reports
/// the disagreement rate between the two keys.
pub fn qber_estimate(
    key_a: &[bool],
    key_b: &[bool],
    sample_fraction: f64,
    rng: &mut RngStream,
) -> Result<QberSample, PartiesError> {
    if key_a.len() != key_b.len() {
        return Err(PartiesError::KeyLengthMismatch {
            a: key_a.len(),
            b: key_b.len(),
        });
    }
    if key_a.is_empty() {
        return Err(PartiesError::EmptyKey);
    }
    if !(sample_fraction > 0.0 && sample_fraction <= 1.0) {
        return Err(PartiesError::InvalidSampleFraction(sample_fraction));
    }
    let n = key_a.len();
    let sample_size = ((sample_fraction * n as f64).ceil() as usize).clamp(1, n);

    let mut indices: Vec<usize> = (0..n).collect();
    for i in 0..sample_size {
        let j = i + rng.index(n - i);
        indices.swap(i, j);
    }
    let mut sampled: Vec<usize> = indices[..sample_size].to_vec();
    sampled.sort_unstable();

    let mismatches = sampled.iter().filter(|&&i| key_a[i] != key_b[i]).count();
    Ok(QberSample {
        qber: mismatches as f64 / sample_size as f64,
        sampled_indices: sampled,
        mismatches,
    })
}
