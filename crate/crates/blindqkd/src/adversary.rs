//! Channel adversaries: a strategy trait giving an interceptor control of
//! both quantum hops and a read on the classical channel, plus the
//! implementations used by the scenario matrix.
//!
//! Isolation contract: a strategy sees exactly what is physically in
//! transit (photons and classical messages) together with the public
//! channel parameters in [`ChannelContext`]. Party secrets never reach a
//! hook, so any knowledge a strategy reports was genuinely extracted from
//! the channel.
//!
//! The interceptor of interest, [`LabelAndMeasure`], runs a two-agent
//! intercept-resend: the agent near Alice stores her pulse pair (optionally
//! wavelength-tagging one pulse first) while the agent near Bob feeds him a
//! locally generated fake pair. When Bob returns the fakes, the stored
//! originals are released to Alice on schedule, so every receipt she or Bob
//! expects arrives on time and every pulse count and intensity looks
//! nominal. Alice then unknowingly applies her key encoding and blocking to
//! her own original pair; the photon she forwards reveals the key bit to a
//! polarization measurement and, through the wavelength tag, which pulse
//! she blocked. The interceptor finishes by replaying Alice's transform
//! onto the surviving fake so Bob's readout stays error-free.

use crate::parties::{encode_angle, ClassicalMessage};
use crate::photon::{
    read_labels, scrub_temporal, shift_wavelength, LabelSet, Photon, PhotonError, PhotonIds,
    PulseIndex, PulsePair,
};
use crate::quantum::{measure, prepare, rotate, BasisAngle, QuantumError, RngStream};
use std::f64::consts::FRAC_PI_4;
use std::mem::take;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdversaryError {
    #[error("interception desynchronized: {0}")]
    Desynchronized(&'static str),
    #[error("final photon at {observed} nm matches neither {base} nm nor {labeled} nm")]
    InconsistentFinalWavelength {
        observed: f64,
        base: f64,
        labeled: f64,
    },
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Photon(#[from] PhotonError),
}

/// Public channel-side resources available to a strategy.
pub struct ChannelContext<'a> {
    pub rng: &'a mut RngStream,
    pub ids: &'a mut PhotonIds,
    /// The label set honest photons are expected to carry.
    pub canonical: LabelSet,
}

/// What an adversary worked out during one round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EveRoundKnowledge {
    /// Alice's key bit as inferred from the forwarded photon.
    pub k_inferred: bool,
    /// Alice's blocking choice as inferred (or guessed).
    pub b_inferred: PulseIndex,
    /// True iff `b_inferred` did not come from a label readout.
    pub b_was_guess: bool,
}

/// Result of the hook at Alice's pair emission.
#[derive(Debug)]
pub struct EmitOutcome {
    /// The pair travelling onward to Bob.
    pub delivered: PulsePair,
    /// True iff the original pair was captured and a substitute sent.
    pub intercepted: bool,
    /// Which stored pulse received a wavelength tag, if any.
    pub labeled: Option<PulseIndex>,
}

/// Result of the hook at Bob's pair return.
#[derive(Debug)]
pub struct ReturnOutcome {
    /// The pair travelling onward to Alice.
    pub delivered: PulsePair,
    /// True iff a previously stored pair was released in place of the input.
    pub released_stored: bool,
}

/// Result of the hook at Alice's final forward.
#[derive(Debug)]
pub struct FinalOutcome {
    /// The photon travelling onward to Bob.
    pub delivered: Photon,
    /// Present iff the adversary extracted round knowledge here.
    pub knowledge: Option<EveRoundKnowledge>,
}

/// A man-in-the-middle positioned on both quantum hops and the classical
/// channel. Hooks are called in channel order once per round; each hook
/// decides what continues downstream.
pub trait AttackStrategy {
    /// Alice's pulse pair enters the channel toward Bob.
    fn on_alice_emits(
        &mut self,
        pair: PulsePair,
        ctx: &mut ChannelContext<'_>,
    ) -> Result<EmitOutcome, AdversaryError>;

    /// Last touch point before Bob receives the pair.
    fn on_bob_turn(
        &mut self,
        pair: PulsePair,
        _ctx: &mut ChannelContext<'_>,
    ) -> Result<PulsePair, AdversaryError> {
        Ok(pair)
    }

    /// Bob's rotated pair enters the channel back toward Alice.
    fn on_bob_returns(
        &mut self,
        pair: PulsePair,
        ctx: &mut ChannelContext<'_>,
    ) -> Result<ReturnOutcome, AdversaryError>;

    /// Alice's final encoded photon enters the channel toward Bob.
    fn on_alice_final(
        &mut self,
        photon: Photon,
        ctx: &mut ChannelContext<'_>,
    ) -> Result<FinalOutcome, AdversaryError>;

    /// A classical message passes by; it is relayed verbatim.
    fn on_classical(&mut self, _message: &ClassicalMessage) {}
}

/// The honest channel: everything passes through untouched.
#[derive(Debug, Default)]
pub struct PassThrough;

impl AttackStrategy for PassThrough {
    fn on_alice_emits(
        &mut self,
        pair: PulsePair,
        _ctx: &mut ChannelContext<'_>,
    ) -> Result<EmitOutcome, AdversaryError> {
        Ok(EmitOutcome {
            delivered: pair,
            intercepted: false,
            labeled: None,
        })
    }

    fn on_bob_returns(
        &mut self,
        pair: PulsePair,
        _ctx: &mut ChannelContext<'_>,
    ) -> Result<ReturnOutcome, AdversaryError> {
        Ok(ReturnOutcome {
            delivered: pair,
            released_stored: false,
        })
    }

    fn on_alice_final(
        &mut self,
        photon: Photon,
        _ctx: &mut ChannelContext<'_>,
    ) -> Result<FinalOutcome, AdversaryError> {
        Ok(FinalOutcome {
            delivered: photon,
            knowledge: None,
        })
    }
}

/// How [`LabelAndMeasure`] resolves Alice's blocking choice at the end of
/// a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResolveB {
    /// Compare the final photon's wavelength against the tag. Requires a
    /// nonzero shift.
    ReadWavelength,
    /// Draw a uniform guess. Used when no tag was planted, or when the
    /// interceptor expects Alice to scrub labels and so distrusts them.
    Guess,
}

#[derive(Debug, Default)]
enum RoundState {
    #[default]
    Idle,
    StoredAndFaked {
        stored: PulsePair,
        fake_thetas: [f64; 2],
        labeled: Option<PulseIndex>,
    },
    AwaitingFinal {
        shuffled_fakes: PulsePair,
        fake_thetas: [f64; 2],
        labeled: Option<PulseIndex>,
    },
}

/// The store-and-substitute interceptor described in the module notes.
///
/// With `delta != 0` one stored pulse (chosen uniformly) is tagged by a
/// wavelength shift of `delta` nanometres. With `delta == 0` the same
/// interception runs without a tag, and the blocking choice can only be
/// guessed: this is the plain impersonation attack.
///
/// Per-round draw order: pulse choice (if tagging), two fake preparation
/// angles, then at the final hook the key-bit measurement and (in guess
/// mode) the blocking-choice guess.
#[derive(Debug)]
pub struct LabelAndMeasure {
    delta: f64,
    resolve_b: ResolveB,
    round: RoundState,
}

impl LabelAndMeasure {
    pub fn new(delta: f64, resolve_b: ResolveB) -> Self {
        assert!(
            resolve_b != ResolveB::ReadWavelength || delta != 0.0,
            "wavelength readout requires a nonzero shift"
        );
        Self {
            delta,
            resolve_b,
            round: RoundState::Idle,
        }
    }

    fn fake_theta(thetas: [f64; 2], index: PulseIndex) -> f64 {
        match index {
            PulseIndex::First => thetas[0],
            PulseIndex::Second => thetas[1],
        }
    }
}

impl AttackStrategy for LabelAndMeasure {
    fn on_alice_emits(
        &mut self,
        pair: PulsePair,
        ctx: &mut ChannelContext<'_>,
    ) -> Result<EmitOutcome, AdversaryError> {
        let RoundState::Idle = take(&mut self.round) else {
            return Err(AdversaryError::Desynchronized(
                "pair emitted while a round was still in flight",
            ));
        };

        let labeled = if self.delta != 0.0 {
            Some(PulseIndex::from_bit(ctx.rng.index(2) == 1))
        } else {
            None
        };
        let (first, second) = pair.into_photons();
        let stored = match labeled {
            Some(PulseIndex::First) => PulsePair::new(shift_wavelength(first, self.delta)?, second),
            Some(PulseIndex::Second) => {
                PulsePair::new(first, shift_wavelength(second, self.delta)?)
            }
            None => PulsePair::new(first, second),
        };

        let fake_thetas = [ctx.rng.angle(), ctx.rng.angle()];
        let fakes = PulsePair::new(
            Photon::new(
                prepare(fake_thetas[0]),
                ctx.canonical.with_time_slot(1.0),
                ctx.ids,
            ),
            Photon::new(
                prepare(fake_thetas[1]),
                ctx.canonical.with_time_slot(2.0),
                ctx.ids,
            ),
        );

        self.round = RoundState::StoredAndFaked {
            stored,
            fake_thetas,
            labeled,
        };
        Ok(EmitOutcome {
            delivered: fakes,
            intercepted: true,
            labeled,
        })
    }

    fn on_bob_returns(
        &mut self,
        pair: PulsePair,
        _ctx: &mut ChannelContext<'_>,
    ) -> Result<ReturnOutcome, AdversaryError> {
        let RoundState::StoredAndFaked {
            stored,
            fake_thetas,
            labeled,
        } = take(&mut self.round)
        else {
            return Err(AdversaryError::Desynchronized(
                "pair returned with nothing stored",
            ));
        };

        self.round = RoundState::AwaitingFinal {
            shuffled_fakes: pair,
            fake_thetas,
            labeled,
        };
        Ok(ReturnOutcome {
            delivered: stored,
            released_stored: true,
        })
    }

    fn on_alice_final(
        &mut self,
        photon: Photon,
        ctx: &mut ChannelContext<'_>,
    ) -> Result<FinalOutcome, AdversaryError> {
        let RoundState::AwaitingFinal {
            shuffled_fakes,
            fake_thetas,
            labeled,
        } = take(&mut self.round)
        else {
            return Err(AdversaryError::Desynchronized(
                "final photon before the stored pair was released",
            ));
        };

        let (k_inferred, _) = measure(photon.pol(), BasisAngle::new(FRAC_PI_4), ctx.rng)?;

        let (b_inferred, b_was_guess) = match self.resolve_b {
            ResolveB::Guess => (PulseIndex::from_bit(ctx.rng.bit()), true),
            ResolveB::ReadWavelength => {
                let labeled = labeled.ok_or(AdversaryError::Desynchronized(
                    "wavelength readout without a planted tag",
                ))?;
                let observed = read_labels(&photon).wavelength;
                let base = ctx.canonical.wavelength;
                let tagged = base + self.delta;
                // Exact comparison is sound: both sides are the same two
                // operands combined by the same addition.
                if observed == tagged {
                    (labeled.other(), false)
                } else if observed == base {
                    (labeled, false)
                } else {
                    return Err(AdversaryError::InconsistentFinalWavelength {
                        observed,
                        base,
                        labeled: tagged,
                    });
                }
            }
        };

        let survivor = b_inferred.other();
        let fake = *shuffled_fakes.get(survivor);
        let pol = rotate(
            fake.pol(),
            encode_angle(Self::fake_theta(fake_thetas, survivor), k_inferred),
        )?;
        let delivered = scrub_temporal(fake.with_pol(pol), ctx.canonical.time_slot);

        Ok(FinalOutcome {
            delivered,
            knowledge: Some(EveRoundKnowledge {
                k_inferred,
                b_inferred,
                b_was_guess,
            }),
        })
    }
}
