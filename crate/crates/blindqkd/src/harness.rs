//! Session orchestration: runs whole protocol sessions under a chosen
//! scenario, records per-round traces, audits them against the scheduled
//! event order, and condenses everything into a deterministic report.
//!
//! One [`RngStream`] seeded from [`ProtocolParams::seed`] supplies every
//! random choice in a session. The per-round draw order is fixed: Alice's
//! secrets, Bob's secrets, the adversary's channel draws in hook order,
//! one intensity-check decision per receive point (always consumed, even
//! when the check probability is 0 or 1), and finally Bob's measurement;
//! after the last round the key-sample selection draws follow. The session
//! report echoes this order in `rng_draw_order`, and identical parameters
//! produce bit-identical reports.
//!
//! Detection model: the parties abort when the sampled disagreement rate
//! exceeds the threshold, when any intensity check fails, or when receipts
//! arrive out of order. These are the only instruments the protocol gives
//! them; the interesting scenarios are the ones where every instrument
//! stays green while the key leaks.
//!
//! The trace audit is a separate concern from detection: it compares each
//! round's recorded protocol events against [`schedule_events`] and
//! reports [`SimError::Invariant`] on any mismatch. Honest parties could
//! never see this view; it exists so that a broken simulation (or one
//! deliberately broken through [`FaultInjection`]) cannot masquerade as a
//! result.

use crate::adversary::{AttackStrategy, ChannelContext, LabelAndMeasure, PassThrough, ResolveB};
use crate::parties::{
    alice_encode_basic, alice_encode_block, alice_prepare_pair, bob_decode, bob_final_measure,
    bob_measure_basic, bob_shuffle_rotate, qber_estimate, AliceRoundSecrets, BobRoundSecrets,
    ClassicalMessage, Party,
};
use crate::photon::{
    intensity_check, read_labels, scrub_all_labels, LabelSet, Photon, PhotonIds, PulseIndex,
    PulsePair,
};
use crate::quantum::{prepare, rotate, PolarizationState, RngStream};
use num_complex::Complex64;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("internal invariant violated in round {round}: {message}")]
    Invariant {
        round: u64,
        message: String,
        trace: Vec<EventKind>,
    },
}

/// Protocol variant under simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// One pulse per round, no shuffle bits, no blocking.
    Basic,
    /// Two pulses per round with shuffle bits and blocking.
    Strong,
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "basic" => Ok(Variant::Basic),
            "strong" => Ok(Variant::Strong),
            other => Err(format!("unknown variant '{other}' (basic, strong)")),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Basic => "basic",
            Variant::Strong => "strong",
        })
    }
}

/// Channel condition for the session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// No adversary.
    Honest,
    /// Intercept-and-substitute without a wavelength tag; the blocking
    /// choice must be guessed.
    Impersonation,
    /// Intercept-and-substitute with a wavelength tag on one stored pulse;
    /// the tag reveals the blocking choice.
    Labeling,
    /// The labeling attack against an Alice who scrubs every label from
    /// her outgoing photon.
    LabelingVsScrub,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::Honest,
        Scenario::Impersonation,
        Scenario::Labeling,
        Scenario::LabelingVsScrub,
    ];

    pub fn has_adversary(self) -> bool {
        self != Scenario::Honest
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "honest" => Ok(Scenario::Honest),
            "impersonation" => Ok(Scenario::Impersonation),
            "labeling" => Ok(Scenario::Labeling),
            "labeling_vs_scrub" | "labeling-vs-scrub" => Ok(Scenario::LabelingVsScrub),
            other => Err(format!(
                "unknown scenario '{other}' (honest, impersonation, labeling, labeling_vs_scrub)"
            )),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::Honest => "honest",
            Scenario::Impersonation => "impersonation",
            Scenario::Labeling => "labeling",
            Scenario::LabelingVsScrub => "labeling_vs_scrub",
        })
    }
}

/// Deliberate breakage for exercising the internal-invariant path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum FaultInjection {
    #[default]
    None,
    /// Emit an unnormalized polarization state in the first round.
    CorruptNorm,
    /// Swap two protocol events in the first round's recorded trace.
    ReorderTrace,
}

impl FromStr for FaultInjection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(FaultInjection::None),
            "corrupt-norm" => Ok(FaultInjection::CorruptNorm),
            "reorder-trace" => Ok(FaultInjection::ReorderTrace),
            other => Err(format!(
                "unknown fault '{other}' (none, corrupt-norm, reorder-trace)"
            )),
        }
    }
}

impl fmt::Display for FaultInjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FaultInjection::None => "none",
            FaultInjection::CorruptNorm => "corrupt-norm",
            FaultInjection::ReorderTrace => "reorder-trace",
        })
    }
}

/// Full configuration of one session.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolParams {
    pub variant: Variant,
    pub scenario: Scenario,
    pub rounds: u64,
    pub seed: u64,
    /// Wavelength tag offset in nanometres. Forced to 0 by the
    /// impersonation scenario; 0 in a labeling scenario degrades the
    /// attack to impersonation.
    pub delta: f64,
    /// Labels every honest photon is emitted (and scrubbed) with.
    pub canonical: LabelSet,
    /// Fraction of the key sampled for disagreement, in `(0, 1]`.
    pub sample_fraction: f64,
    /// Abort when the sampled disagreement rate strictly exceeds this.
    pub qber_threshold: f64,
    /// Intensity check tolerance around the canonical intensity.
    pub intensity_tol: f64,
    /// Probability that a receive point runs an intensity check.
    pub intensity_check_prob: f64,
    pub fault: FaultInjection,
}

impl ProtocolParams {
    /// Defaults shared with the command-line tool.
    pub fn new(variant: Variant, scenario: Scenario) -> Self {
        Self {
            variant,
            scenario,
            rounds: 10_000,
            seed: 42,
            delta: 0.1,
            canonical: LabelSet::default(),
            sample_fraction: 0.2,
            qber_threshold: 0.05,
            intensity_tol: 0.01,
            intensity_check_prob: 0.25,
            fault: FaultInjection::None,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let fail = |message: String| Err(SimError::Config(message));
        if self.rounds == 0 {
            return fail("rounds must be at least 1".into());
        }
        if !self.delta.is_finite() {
            return fail(format!("delta must be finite, got {}", self.delta));
        }
        if let Err(e) = self.canonical.validate() {
            return fail(e.to_string());
        }
        if !(self.sample_fraction > 0.0 && self.sample_fraction <= 1.0) {
            return fail(format!(
                "sample fraction {} outside (0, 1]",
                self.sample_fraction
            ));
        }
        if !(self.qber_threshold >= 0.0 && self.qber_threshold < 1.0) {
            return fail(format!(
                "qber threshold {} outside [0, 1)",
                self.qber_threshold
            ));
        }
        if self.intensity_tol <= 0.0 || self.intensity_tol.is_nan() {
            return fail(format!(
                "intensity tolerance {} must be positive",
                self.intensity_tol
            ));
        }
        if !(0.0..=1.0).contains(&self.intensity_check_prob) {
            return fail(format!(
                "intensity check probability {} outside [0, 1]",
                self.intensity_check_prob
            ));
        }
        if self.variant == Variant::Basic && self.scenario.has_adversary() {
            return fail(format!(
                "scenario '{}' requires the strong variant; the interception \
                 is defined over the two-pulse round",
                self.scenario
            ));
        }
        if self.scenario.has_adversary() && self.canonical.wavelength + self.delta <= 0.0 {
            return fail(format!(
                "delta {} nm would shift the {} nm carrier out of the physical domain",
                self.delta, self.canonical.wavelength
            ));
        }
        Ok(())
    }

    /// The parameters the session actually runs with: impersonation never
    /// tags, so its delta is pinned to 0.
    fn effective(&self) -> Self {
        let mut params = self.clone();
        if params.scenario == Scenario::Impersonation {
            params.delta = 0.0;
        }
        params
    }

    fn tags_a_pulse(&self) -> bool {
        matches!(
            self.scenario,
            Scenario::Labeling | Scenario::LabelingVsScrub
        ) && self.delta != 0.0
    }
}

/// Everything that happens in one round, in order. Receipt and
/// intensity-check entries are observations layered over the core
/// protocol events; [`EventKind::is_core`] separates the two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    AliceEmitsPair,
    AliceEmitsPhoton,
    EveLabelsAndStores,
    EveStoresPair,
    EveSendsFakePair,
    BobReceivesPair,
    BobReceivesPhoton,
    BobShuffleRotate,
    BobRotates,
    BobReturnsPair,
    BobReturnsPhoton,
    EveReceivesFakesBack,
    EveReleasesStored,
    AliceReceivesPair,
    AliceReceivesPhoton,
    AliceEncodesAndBlocks,
    AliceEncodes,
    AliceScrubsLabels,
    AliceForwardsFinal,
    EveReadsFinal,
    EveFinalizesFake,
    BobReceivesFinal,
    BobMeasures,
    AliceDisclosesBlock,
    BobDecodes,
    ReceiptEmitted(Party),
    IntensityCheckRun { party: Party, passed: bool },
}

impl EventKind {
    pub fn is_core(self) -> bool {
        !matches!(
            self,
            EventKind::ReceiptEmitted(_) | EventKind::IntensityCheckRun { .. }
        )
    }
}

/// The core protocol events of one round, in the order the scenario
/// requires them. Every recorded round trace must project onto exactly
/// this sequence.
pub fn schedule_events(params: &ProtocolParams) -> Vec<EventKind> {
    use EventKind::*;
    let params = params.effective();
    match params.variant {
        Variant::Basic => vec![
            AliceEmitsPhoton,
            BobReceivesPhoton,
            BobRotates,
            BobReturnsPhoton,
            AliceReceivesPhoton,
            AliceEncodes,
            AliceForwardsFinal,
            BobReceivesFinal,
            BobMeasures,
            BobDecodes,
        ],
        Variant::Strong => {
            let attack = params.scenario.has_adversary();
            let mut events = vec![AliceEmitsPair];
            if attack {
                events.push(if params.tags_a_pulse() {
                    EveLabelsAndStores
                } else {
                    EveStoresPair
                });
                events.push(EveSendsFakePair);
            }
            events.extend([BobReceivesPair, BobShuffleRotate, BobReturnsPair]);
            if attack {
                events.extend([EveReceivesFakesBack, EveReleasesStored]);
            }
            events.extend([AliceReceivesPair, AliceEncodesAndBlocks]);
            if params.scenario == Scenario::LabelingVsScrub {
                events.push(AliceScrubsLabels);
            }
            events.push(AliceForwardsFinal);
            if attack {
                events.extend([EveReadsFinal, EveFinalizesFake]);
            }
            events.extend([
                BobReceivesFinal,
                BobMeasures,
                AliceDisclosesBlock,
                BobDecodes,
            ]);
            events
        }
    }
}

/// Checks the party-visible receipt discipline: every arrival event is
/// acknowledged immediately, and no receipt appears unprompted.
pub fn receipts_follow_arrivals(events: &[EventKind]) -> bool {
    use EventKind::*;
    let mut expected_receipts = 0usize;
    let mut seen_receipts = 0usize;
    for (i, event) in events.iter().enumerate() {
        let expecting = match event {
            BobReceivesPair | BobReceivesPhoton | BobReceivesFinal => Some(Party::Bob),
            AliceReceivesPair | AliceReceivesPhoton => Some(Party::Alice),
            _ => None,
        };
        if let Some(party) = expecting {
            expected_receipts += 1;
            if events.get(i + 1) != Some(&ReceiptEmitted(party)) {
                return false;
            }
        }
        if matches!(event, ReceiptEmitted(_)) {
            seen_receipts += 1;
        }
    }
    expected_receipts == seen_receipts
}

fn audit_round_trace(events: &[EventKind], expected: &[EventKind]) -> Result<(), String> {
    let core: Vec<EventKind> = events.iter().copied().filter(|e| e.is_core()).collect();
    if core != expected {
        return Err(format!(
            "round trace does not match the scheduled event order: \
             expected {expected:?}, recorded {core:?}"
        ));
    }
    Ok(())
}

/// What one round contributed, for audits and debugging.
#[derive(Debug, Clone)]
pub struct RoundRecord {
    pub index: u64,
    pub theta1: f64,
    pub theta2: Option<f64>,
    pub phi: f64,
    pub s1: Option<bool>,
    pub s2: Option<bool>,
    pub k_alice: bool,
    pub b: Option<PulseIndex>,
    pub m_bob: bool,
    pub k_bob: bool,
    pub eve_k: Option<bool>,
    pub eve_b: Option<PulseIndex>,
    pub b_was_guess: bool,
    /// Which stored pulse the adversary tagged, if any.
    pub eve_labeled: Option<PulseIndex>,
    /// Polarization of the photon as it left Alice on the final hop.
    pub final_pol: PolarizationState,
    /// Wavelength of that photon in nanometres.
    pub final_wavelength: f64,
    pub intensity_checks_run: u32,
    pub intensity_checks_passed: bool,
    pub events: Vec<EventKind>,
}

/// Why a session was torn down.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectionChannel {
    Qber,
    Intensity,
    ReceiptOrder,
}

impl DetectionChannel {
    fn name(self) -> &'static str {
        match self {
            DetectionChannel::Qber => "qber",
            DetectionChannel::Intensity => "intensity",
            DetectionChannel::ReceiptOrder => "receipt-order",
        }
    }
}

/// The parties' session-level accept/abort decision.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Accepted,
    Aborted { reasons: Vec<DetectionChannel> },
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accepted => f.write_str("accepted"),
            Verdict::Aborted { reasons } => {
                let joined: Vec<&str> = reasons.iter().map(|r| r.name()).collect();
                write!(f, "aborted({})", joined.join("+"))
            }
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Everything the honest parties can see at the end of a session.
#[derive(Debug, Clone, Copy)]
pub struct DetectionInputs {
    pub qber_sampled: f64,
    pub any_intensity_failure: bool,
    pub receipt_order_violation: bool,
}

/// Applies the abort policy: sampled disagreement strictly above the
/// threshold, any failed intensity check, or any receipt out of order.
pub fn detection_decision(inputs: &DetectionInputs, params: &ProtocolParams) -> Verdict {
    let mut reasons = Vec::new();
    if inputs.qber_sampled > params.qber_threshold {
        reasons.push(DetectionChannel::Qber);
    }
    if inputs.any_intensity_failure {
        reasons.push(DetectionChannel::Intensity);
    }
    if inputs.receipt_order_violation {
        reasons.push(DetectionChannel::ReceiptOrder);
    }
    if reasons.is_empty() {
        Verdict::Accepted
    } else {
        Verdict::Aborted { reasons }
    }
}

/// Deterministic summary of one session.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionReport {
    pub params: ProtocolParams,
    pub n_rounds: u64,
    /// Fraction of rounds where Bob's decoded bit equals Alice's key bit.
    pub agreement_rate: f64,
    /// Disagreement rate over the sampled key positions.
    pub qber_sampled: f64,
    pub qber_sample_size: u64,
    /// Fraction of rounds where the adversary's inferred key bit equals
    /// Alice's; 0 when no adversary runs.
    pub eve_k_rate: f64,
    /// Fraction of rounds where the adversary's inferred blocking choice
    /// equals Alice's; 0 when no adversary runs.
    pub eve_b_rate: f64,
    /// Fraction of executed intensity checks that passed; 1 when none ran.
    pub intensity_pass_rate: f64,
    pub intensity_checks_run: u64,
    pub receipt_order_ok: bool,
    pub verdict: Verdict,
    /// Post-sampling key bits as a `0`/`1` string.
    pub final_key_bits_a: String,
    pub final_key_bits_b: String,
    /// Names of the per-round draws in consumption order, then the
    /// session-tail draws.
    pub rng_draw_order: Vec<String>,
}

fn draw_order(params: &ProtocolParams) -> Vec<String> {
    let mut order: Vec<&str> = Vec::new();
    match params.variant {
        Variant::Basic => {
            order.extend(["theta", "k", "phi"]);
            order.extend([
                "intensity_decision_bob_photon",
                "intensity_decision_alice_return",
            ]);
        }
        Variant::Strong => {
            order.extend(["theta1", "theta2", "k", "b", "phi", "s1", "s2"]);
            if params.scenario.has_adversary() {
                if params.tags_a_pulse() {
                    order.push("eve_tag_choice");
                }
                order.extend(["eve_fake_theta1", "eve_fake_theta2"]);
            }
            order.extend([
                "intensity_decision_bob_pair",
                "intensity_decision_alice_return",
            ]);
            if params.scenario.has_adversary() {
                order.push("eve_key_measure");
                if params.scenario != Scenario::Labeling || !params.tags_a_pulse() {
                    order.push("eve_block_guess");
                }
            }
        }
    }
    order.extend(["intensity_decision_bob_final", "bob_measure"]);
    let mut order: Vec<String> = order.into_iter().map(str::to_owned).collect();
    order.push("qber_sample_selection_after_all_rounds".to_owned());
    order
}

fn build_strategy(params: &ProtocolParams) -> Box<dyn AttackStrategy> {
    match params.scenario {
        Scenario::Honest => Box::new(PassThrough),
        Scenario::Impersonation => Box::new(LabelAndMeasure::new(0.0, ResolveB::Guess)),
        Scenario::Labeling => {
            if params.delta != 0.0 {
                Box::new(LabelAndMeasure::new(params.delta, ResolveB::ReadWavelength))
            } else {
                Box::new(LabelAndMeasure::new(0.0, ResolveB::Guess))
            }
        }
        Scenario::LabelingVsScrub => Box::new(LabelAndMeasure::new(params.delta, ResolveB::Guess)),
    }
}

fn invariant(round: u64, events: &[EventKind], message: impl fmt::Display) -> SimError {
    SimError::Invariant {
        round,
        message: message.to_string(),
        trace: events.to_vec(),
    }
}

struct RoundOutput {
    record: RoundRecord,
}

struct SessionState {
    rng: RngStream,
    ids: PhotonIds,
    strategy: Box<dyn AttackStrategy>,
}

impl SessionState {
    /// Runs one intensity-check decision point. The decision draw is
    /// always consumed so the stream position is independent of the
    /// check probability.
    fn maybe_intensity_check(
        &mut self,
        params: &ProtocolParams,
        party: Party,
        photons: &[Photon],
        events: &mut Vec<EventKind>,
        runs: &mut u32,
        all_passed: &mut bool,
    ) {
        let decision = self.rng.uniform();
        if decision < params.intensity_check_prob {
            let passed = intensity_check(
                photons,
                photons.len(),
                params.canonical.intensity,
                params.intensity_tol,
            );
            events.push(EventKind::IntensityCheckRun { party, passed });
            *runs += 1;
            *all_passed &= passed;
        }
    }

    fn receipt(&mut self, round: u64, from: Party, events: &mut Vec<EventKind>) {
        let message = ClassicalMessage::Receipt { round, from };
        self.strategy.on_classical(&message);
        events.push(EventKind::ReceiptEmitted(from));
    }
}

fn corrupt_first_pol(pair: PulsePair) -> PulsePair {
    let (first, second) = pair.into_photons();
    let bad = PolarizationState::new_unchecked(Complex64::new(2.0, 0.0), Complex64::ZERO);
    PulsePair::new(first.with_pol(bad), second)
}

/// Swaps one adjacent pair of core events so the trace audit must reject
/// the round. Prefers the store-release handshake when present; otherwise
/// the final two events.
fn reorder_trace(events: &mut [EventKind]) {
    let release = events
        .iter()
        .position(|e| *e == EventKind::EveReleasesStored);
    if let Some(i) = release {
        events.swap(i - 1, i);
    } else {
        let len = events.len();
        events.swap(len - 2, len - 1);
    }
}

fn run_round_strong(
    round: u64,
    params: &ProtocolParams,
    state: &mut SessionState,
    expected: &[EventKind],
) -> Result<RoundOutput, SimError> {
    let canonical = params.canonical;
    let mut events: Vec<EventKind> = Vec::with_capacity(expected.len() + 6);
    let mut checks_run = 0u32;
    let mut checks_passed = true;

    let alice = AliceRoundSecrets::draw(&mut state.rng);
    let bob = BobRoundSecrets::draw(&mut state.rng);

    let mut pair = alice_prepare_pair(&alice, canonical, &mut state.ids);
    if params.fault == FaultInjection::CorruptNorm && round == 0 {
        pair = corrupt_first_pol(pair);
    }
    events.push(EventKind::AliceEmitsPair);

    let emit = {
        let mut ctx = ChannelContext {
            rng: &mut state.rng,
            ids: &mut state.ids,
            canonical,
        };
        state.strategy.on_alice_emits(pair, &mut ctx)
    }
    .map_err(|e| invariant(round, &events, e))?;
    if emit.intercepted {
        events.push(if emit.labeled.is_some() {
            EventKind::EveLabelsAndStores
        } else {
            EventKind::EveStoresPair
        });
        events.push(EventKind::EveSendsFakePair);
    }

    let to_bob = {
        let mut ctx = ChannelContext {
            rng: &mut state.rng,
            ids: &mut state.ids,
            canonical,
        };
        state.strategy.on_bob_turn(emit.delivered, &mut ctx)
    }
    .map_err(|e| invariant(round, &events, e))?;
    events.push(EventKind::BobReceivesPair);
    state.receipt(round, Party::Bob, &mut events);
    state.maybe_intensity_check(
        params,
        Party::Bob,
        &[*to_bob.first(), *to_bob.second()],
        &mut events,
        &mut checks_run,
        &mut checks_passed,
    );

    let shuffled = bob_shuffle_rotate(to_bob, &bob).map_err(|e| invariant(round, &events, e))?;
    events.push(EventKind::BobShuffleRotate);
    events.push(EventKind::BobReturnsPair);

    let back = {
        let mut ctx = ChannelContext {
            rng: &mut state.rng,
            ids: &mut state.ids,
            canonical,
        };
        state.strategy.on_bob_returns(shuffled, &mut ctx)
    }
    .map_err(|e| invariant(round, &events, e))?;
    if back.released_stored {
        events.push(EventKind::EveReceivesFakesBack);
        events.push(EventKind::EveReleasesStored);
    }
    events.push(EventKind::AliceReceivesPair);
    state.receipt(round, Party::Alice, &mut events);
    state.maybe_intensity_check(
        params,
        Party::Alice,
        &[*back.delivered.first(), *back.delivered.second()],
        &mut events,
        &mut checks_run,
        &mut checks_passed,
    );

    let mut kept = alice_encode_block(back.delivered, &alice, canonical.time_slot)
        .map_err(|e| invariant(round, &events, e))?;
    events.push(EventKind::AliceEncodesAndBlocks);
    if params.scenario == Scenario::LabelingVsScrub {
        kept = scrub_all_labels(kept, canonical, &mut state.ids);
        events.push(EventKind::AliceScrubsLabels);
    }
    let final_pol = *kept.pol();
    let final_wavelength = read_labels(&kept).wavelength;
    events.push(EventKind::AliceForwardsFinal);

    let final_hop = {
        let mut ctx = ChannelContext {
            rng: &mut state.rng,
            ids: &mut state.ids,
            canonical,
        };
        state.strategy.on_alice_final(kept, &mut ctx)
    }
    .map_err(|e| invariant(round, &events, e))?;
    if final_hop.knowledge.is_some() {
        events.push(EventKind::EveReadsFinal);
        events.push(EventKind::EveFinalizesFake);
    }
    events.push(EventKind::BobReceivesFinal);
    state.receipt(round, Party::Bob, &mut events);
    state.maybe_intensity_check(
        params,
        Party::Bob,
        &[final_hop.delivered],
        &mut events,
        &mut checks_run,
        &mut checks_passed,
    );

    let m = bob_final_measure(&final_hop.delivered, &bob, &mut state.rng)
        .map_err(|e| invariant(round, &events, e))?;
    events.push(EventKind::BobMeasures);

    let disclosure = ClassicalMessage::BlockDisclosure {
        round,
        blocked: alice.b,
    };
    state.strategy.on_classical(&disclosure);
    events.push(EventKind::AliceDisclosesBlock);
    let k_bob = bob_decode(m, &disclosure, &bob).map_err(|e| invariant(round, &events, e))?;
    events.push(EventKind::BobDecodes);

    if params.fault == FaultInjection::ReorderTrace && round == 0 {
        reorder_trace(&mut events);
    }
    audit_round_trace(&events, expected).map_err(|message| invariant(round, &events, message))?;

    let knowledge = final_hop.knowledge;
    Ok(RoundOutput {
        record: RoundRecord {
            index: round,
            theta1: alice.theta1,
            theta2: Some(alice.theta2),
            phi: bob.phi,
            s1: Some(bob.s1),
            s2: Some(bob.s2),
            k_alice: alice.k,
            b: Some(alice.b),
            m_bob: m,
            k_bob,
            eve_k: knowledge.map(|k| k.k_inferred),
            eve_b: knowledge.map(|k| k.b_inferred),
            b_was_guess: knowledge.map(|k| k.b_was_guess).unwrap_or(false),
            eve_labeled: emit.labeled,
            final_pol,
            final_wavelength,
            intensity_checks_run: checks_run,
            intensity_checks_passed: checks_passed,
            events,
        },
    })
}

fn run_round_basic(
    round: u64,
    params: &ProtocolParams,
    state: &mut SessionState,
    expected: &[EventKind],
) -> Result<RoundOutput, SimError> {
    let canonical = params.canonical;
    let mut events: Vec<EventKind> = Vec::with_capacity(expected.len() + 5);
    let mut checks_run = 0u32;
    let mut checks_passed = true;

    let theta = state.rng.angle();
    let k = state.rng.bit();
    let phi = state.rng.angle();

    let mut photon = Photon::new(
        prepare(theta),
        canonical.with_time_slot(1.0),
        &mut state.ids,
    );
    if params.fault == FaultInjection::CorruptNorm && round == 0 {
        photon = photon.with_pol(PolarizationState::new_unchecked(
            Complex64::new(2.0, 0.0),
            Complex64::ZERO,
        ));
    }
    events.push(EventKind::AliceEmitsPhoton);
    events.push(EventKind::BobReceivesPhoton);
    state.receipt(round, Party::Bob, &mut events);
    state.maybe_intensity_check(
        params,
        Party::Bob,
        &[photon],
        &mut events,
        &mut checks_run,
        &mut checks_passed,
    );

    let rotated_pol = rotate(photon.pol(), phi).map_err(|e| invariant(round, &events, e))?;
    let rotated = photon.with_pol(rotated_pol);
    events.push(EventKind::BobRotates);
    events.push(EventKind::BobReturnsPhoton);
    events.push(EventKind::AliceReceivesPhoton);
    state.receipt(round, Party::Alice, &mut events);
    state.maybe_intensity_check(
        params,
        Party::Alice,
        &[rotated],
        &mut events,
        &mut checks_run,
        &mut checks_passed,
    );

    let encoded =
        alice_encode_basic(rotated, theta, k).map_err(|e| invariant(round, &events, e))?;
    events.push(EventKind::AliceEncodes);
    let final_pol = *encoded.pol();
    let final_wavelength = read_labels(&encoded).wavelength;
    events.push(EventKind::AliceForwardsFinal);
    events.push(EventKind::BobReceivesFinal);
    state.receipt(round, Party::Bob, &mut events);
    state.maybe_intensity_check(
        params,
        Party::Bob,
        &[encoded],
        &mut events,
        &mut checks_run,
        &mut checks_passed,
    );

    let m = bob_measure_basic(&encoded, phi, &mut state.rng)
        .map_err(|e| invariant(round, &events, e))?;
    events.push(EventKind::BobMeasures);
    events.push(EventKind::BobDecodes);

    if params.fault == FaultInjection::ReorderTrace && round == 0 {
        reorder_trace(&mut events);
    }
    audit_round_trace(&events, expected).map_err(|message| invariant(round, &events, message))?;

    Ok(RoundOutput {
        record: RoundRecord {
            index: round,
            theta1: theta,
            theta2: None,
            phi,
            s1: None,
            s2: None,
            k_alice: k,
            b: None,
            m_bob: m,
            k_bob: m,
            eve_k: None,
            eve_b: None,
            b_was_guess: false,
            eve_labeled: None,
            final_pol,
            final_wavelength,
            intensity_checks_run: checks_run,
            intensity_checks_passed: checks_passed,
            events,
        },
    })
}

/// Runs a session and returns the report plus every round record.
pub fn run_session_detailed(
    params: &ProtocolParams,
) -> Result<(SessionReport, Vec<RoundRecord>), SimError> {
    params.validate()?;
    let effective = params.effective();
    let expected = schedule_events(&effective);
    let mut state = SessionState {
        rng: RngStream::new(effective.seed),
        ids: PhotonIds::new(),
        strategy: build_strategy(&effective),
    };

    let rounds = effective.rounds;
    let mut records = Vec::with_capacity(rounds as usize);
    let mut key_a: Vec<bool> = Vec::with_capacity(rounds as usize);
    let mut key_b: Vec<bool> = Vec::with_capacity(rounds as usize);
    let mut agreements = 0u64;
    let mut eve_k_hits = 0u64;
    let mut eve_b_hits = 0u64;
    let mut checks_run_total = 0u64;
    let mut any_intensity_failure = false;
    let mut receipt_order_ok = true;

    for round in 0..rounds {
        let output = match effective.variant {
            Variant::Strong => run_round_strong(round, &effective, &mut state, &expected)?,
            Variant::Basic => run_round_basic(round, &effective, &mut state, &expected)?,
        };
        let record = output.record;
        key_a.push(record.k_alice);
        key_b.push(record.k_bob);
        if record.k_alice == record.k_bob {
            agreements += 1;
        }
        if record.eve_k == Some(record.k_alice) {
            eve_k_hits += 1;
        }
        if record.eve_b.is_some() && record.eve_b == record.b {
            eve_b_hits += 1;
        }
        checks_run_total += u64::from(record.intensity_checks_run);
        if record.intensity_checks_run > 0 && !record.intensity_checks_passed {
            any_intensity_failure = true;
        }
        receipt_order_ok &= receipts_follow_arrivals(&record.events);
        records.push(record);
    }

    let sample = qber_estimate(&key_a, &key_b, effective.sample_fraction, &mut state.rng)
        .map_err(|e| invariant(rounds, &[], e))?;

    let mut sampled = sample.sampled_indices.iter().copied().peekable();
    let mut final_a = String::with_capacity(key_a.len());
    let mut final_b = String::with_capacity(key_b.len());
    for i in 0..key_a.len() {
        if sampled.peek() == Some(&i) {
            sampled.next();
            continue;
        }
        final_a.push(if key_a[i] { '1' } else { '0' });
        final_b.push(if key_b[i] { '1' } else { '0' });
    }

    let inputs = DetectionInputs {
        qber_sampled: sample.qber,
        any_intensity_failure,
        receipt_order_violation: !receipt_order_ok,
    };
    let verdict = detection_decision(&inputs, &effective);

    let n = rounds as f64;
    let report = SessionReport {
        params: effective.clone(),
        n_rounds: rounds,
        agreement_rate: agreements as f64 / n,
        qber_sampled: sample.qber,
        qber_sample_size: sample.sampled_indices.len() as u64,
        eve_k_rate: eve_k_hits as f64 / n,
        eve_b_rate: eve_b_hits as f64 / n,
        intensity_pass_rate: if checks_run_total == 0 || !any_intensity_failure {
            1.0
        } else {
            let failed: u64 = records
                .iter()
                .map(|r| {
                    if r.intensity_checks_run > 0 && !r.intensity_checks_passed {
                        1u64
                    } else {
                        0
                    }
                })
                .sum();
            (checks_run_total - failed) as f64 / checks_run_total as f64
        },
        intensity_checks_run: checks_run_total,
        receipt_order_ok,
        verdict,
        final_key_bits_a: final_a,
        final_key_bits_b: final_b,
        rng_draw_order: draw_order(&effective),
    };
    Ok((report, records))
}

/// Runs a session and returns just the report.
pub fn run_session(params: &ProtocolParams) -> Result<SessionReport, SimError> {
    run_session_detailed(params).map(|(report, _)| report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn params(variant: Variant, scenario: Scenario, rounds: u64, seed: u64) -> ProtocolParams {
        ProtocolParams {
            rounds,
            seed,
            ..ProtocolParams::new(variant, scenario)
        }
    }

    #[test]
    fn schedule_for_honest_strong_has_no_adversary_events() {
        use EventKind::*;
        let p = params(Variant::Strong, Scenario::Honest, 1, 1);
        assert_eq!(
            schedule_events(&p),
            vec![
                AliceEmitsPair,
                BobReceivesPair,
                BobShuffleRotate,
                BobReturnsPair,
                AliceReceivesPair,
                AliceEncodesAndBlocks,
                AliceForwardsFinal,
                BobReceivesFinal,
                BobMeasures,
                AliceDisclosesBlock,
                BobDecodes,
            ]
        );
    }

    #[test]
    fn schedule_for_labeling_interleaves_the_interceptor() {
        use EventKind::*;
        let p = params(Variant::Strong, Scenario::Labeling, 1, 1);
        assert_eq!(
            schedule_events(&p),
            vec![
                AliceEmitsPair,
                EveLabelsAndStores,
                EveSendsFakePair,
                BobReceivesPair,
                BobShuffleRotate,
                BobReturnsPair,
                EveReceivesFakesBack,
                EveReleasesStored,
                AliceReceivesPair,
                AliceEncodesAndBlocks,
                AliceForwardsFinal,
                EveReadsFinal,
                EveFinalizesFake,
                BobReceivesFinal,
                BobMeasures,
                AliceDisclosesBlock,
                BobDecodes,
            ]
        );
    }

    #[test]
    fn schedule_for_scrub_scenario_adds_the_scrub_step() {
        let p = params(Variant::Strong, Scenario::LabelingVsScrub, 1, 1);
        let events = schedule_events(&p);
        let scrub = events
            .iter()
            .position(|e| *e == EventKind::AliceScrubsLabels)
            .unwrap();
        assert_eq!(events[scrub - 1], EventKind::AliceEncodesAndBlocks);
        assert_eq!(events[scrub + 1], EventKind::AliceForwardsFinal);
    }

    #[test]
    fn schedule_for_impersonation_stores_without_tagging() {
        let p = params(Variant::Strong, Scenario::Impersonation, 1, 1);
        let events = schedule_events(&p);
        assert!(events.contains(&EventKind::EveStoresPair));
        assert!(!events.contains(&EventKind::EveLabelsAndStores));
        assert!(!events.contains(&EventKind::AliceScrubsLabels));
    }

    #[test]
    fn validation_rejects_each_bad_knob() {
        let good = params(Variant::Strong, Scenario::Honest, 10, 1);
        assert!(good.validate().is_ok());

        let mut p = good.clone();
        p.rounds = 0;
        assert!(p.validate().is_err());

        let mut p = good.clone();
        p.sample_fraction = 0.0;
        assert!(p.validate().is_err());
        p.sample_fraction = 1.5;
        assert!(p.validate().is_err());

        let mut p = good.clone();
        p.qber_threshold = 1.0;
        assert!(p.validate().is_err());
        p.qber_threshold = -0.1;
        assert!(p.validate().is_err());

        let mut p = good.clone();
        p.intensity_tol = 0.0;
        assert!(p.validate().is_err());

        let mut p = good.clone();
        p.intensity_check_prob = 1.1;
        assert!(p.validate().is_err());

        let mut p = good.clone();
        p.canonical.wavelength = -1.0;
        assert!(p.validate().is_err());

        let mut p = good.clone();
        p.delta = f64::NAN;
        assert!(p.validate().is_err());

        let mut p = params(Variant::Strong, Scenario::Labeling, 10, 1);
        p.delta = -2000.0;
        assert!(p.validate().is_err());

        let p = params(Variant::Basic, Scenario::Labeling, 10, 1);
        let err = p.validate().unwrap_err();
        assert!(err.to_string().contains("strong"));
    }

    #[test]
    fn detection_boundary_is_strictly_greater_than_threshold() {
        let p = params(Variant::Strong, Scenario::Honest, 10, 1);
        let at_threshold = DetectionInputs {
            qber_sampled: p.qber_threshold,
            any_intensity_failure: false,
            receipt_order_violation: false,
        };
        assert_eq!(detection_decision(&at_threshold, &p), Verdict::Accepted);

        let above = DetectionInputs {
            qber_sampled: p.qber_threshold + 1e-9,
            ..at_threshold
        };
        assert!(matches!(
            detection_decision(&above, &p),
            Verdict::Aborted { .. }
        ));
    }

    #[test]
    fn detection_reasons_render_in_fixed_order() {
        let p = params(Variant::Strong, Scenario::Honest, 10, 1);
        let verdict = detection_decision(
            &DetectionInputs {
                qber_sampled: 0.5,
                any_intensity_failure: true,
                receipt_order_violation: true,
            },
            &p,
        );
        assert_eq!(verdict.to_string(), "aborted(qber+intensity+receipt-order)");
        assert_eq!(Verdict::Accepted.to_string(), "accepted");
    }

    #[test]
    fn receipt_rule_catches_missing_and_stray_receipts() {
        use EventKind::*;
        let good = [
            BobReceivesPair,
            ReceiptEmitted(Party::Bob),
            AliceReceivesPair,
            ReceiptEmitted(Party::Alice),
        ];
        assert!(receipts_follow_arrivals(&good));

        let missing = [BobReceivesPair, BobShuffleRotate];
        assert!(!receipts_follow_arrivals(&missing));

        let wrong_party = [BobReceivesPair, ReceiptEmitted(Party::Alice)];
        assert!(!receipts_follow_arrivals(&wrong_party));

        let stray = [
            BobReceivesPair,
            ReceiptEmitted(Party::Bob),
            ReceiptEmitted(Party::Bob),
        ];
        assert!(!receipts_follow_arrivals(&stray));
    }

    #[test]
    fn honest_strong_session_agrees_and_is_accepted() {
        let p = params(Variant::Strong, Scenario::Honest, 256, 7);
        let (report, records) = run_session_detailed(&p).unwrap();
        assert_eq!(report.agreement_rate, 1.0);
        assert_eq!(report.qber_sampled, 0.0);
        assert_eq!(report.eve_k_rate, 0.0);
        assert_eq!(report.eve_b_rate, 0.0);
        assert_eq!(report.verdict, Verdict::Accepted);
        assert!(report.receipt_order_ok);
        assert_eq!(report.qber_sample_size, 52);
        assert_eq!(
            report.final_key_bits_a.len(),
            256 - report.qber_sample_size as usize
        );
        assert_eq!(report.final_key_bits_a, report.final_key_bits_b);
        assert_eq!(records.len(), 256);
        assert!(records.iter().all(|r| r.eve_k.is_none()));
    }

    #[test]
    fn honest_basic_session_agrees_and_is_accepted() {
        let p = params(Variant::Basic, Scenario::Honest, 200, 9);
        let report = run_session(&p).unwrap();
        assert_eq!(report.agreement_rate, 1.0);
        assert_eq!(report.qber_sampled, 0.0);
        assert_eq!(report.verdict, Verdict::Accepted);
    }

    #[test]
    fn labeling_session_leaks_everything_and_stays_undetected() {
        let p = params(Variant::Strong, Scenario::Labeling, 256, 11);
        let (report, records) = run_session_detailed(&p).unwrap();
        assert_eq!(report.agreement_rate, 1.0);
        assert_eq!(report.qber_sampled, 0.0);
        assert_eq!(report.eve_k_rate, 1.0);
        assert_eq!(report.eve_b_rate, 1.0);
        assert_eq!(report.intensity_pass_rate, 1.0);
        assert_eq!(report.verdict, Verdict::Accepted);
        assert!(records.iter().all(|r| !r.b_was_guess));
        assert!(records.iter().all(|r| r.eve_labeled.is_some()));
    }

    #[test]
    fn labeling_rounds_that_keep_the_tagged_pulse_show_the_tag() {
        let p = params(Variant::Strong, Scenario::Labeling, 256, 13);
        let (_, records) = run_session_detailed(&p).unwrap();
        let mut kept_tagged = 0;
        for record in &records {
            let tagged = record.eve_labeled.unwrap();
            let blocked = record.b.unwrap();
            let expected_angle = key_sign_angle(record.k_alice);
            if blocked == tagged.other() {
                kept_tagged += 1;
                assert_eq!(record.final_wavelength, 1550.0 + 0.1);
                let reference = prepare(expected_angle);
                assert!(crate::quantum::overlap(&record.final_pol, &reference) > 1.0 - 1e-12);
            } else {
                assert_eq!(record.final_wavelength, 1550.0);
            }
        }
        assert!(kept_tagged > 64);
    }

    fn key_sign_angle(k: bool) -> f64 {
        if k {
            -FRAC_PI_4
        } else {
            FRAC_PI_4
        }
    }

    #[test]
    fn impersonation_session_aborts_on_qber_but_key_leaks() {
        let p = params(Variant::Strong, Scenario::Impersonation, 512, 17);
        let report = run_session(&p).unwrap();
        assert_eq!(report.eve_k_rate, 1.0);
        assert!(report.qber_sampled > 0.1 && report.qber_sampled < 0.4);
        assert_eq!(
            report.verdict,
            Verdict::Aborted {
                reasons: vec![DetectionChannel::Qber]
            }
        );
        assert!(report.agreement_rate < 1.0);
    }

    #[test]
    fn scrub_session_reduces_the_adversary_to_guessing() {
        let p = params(Variant::Strong, Scenario::LabelingVsScrub, 512, 19);
        let (report, records) = run_session_detailed(&p).unwrap();
        assert_eq!(report.eve_k_rate, 1.0);
        assert!(report.eve_b_rate > 0.35 && report.eve_b_rate < 0.65);
        assert!(report.qber_sampled > 0.1 && report.qber_sampled < 0.4);
        assert!(matches!(report.verdict, Verdict::Aborted { .. }));
        assert!(records.iter().all(|r| r.b_was_guess));
        assert!(records.iter().all(|r| r.final_wavelength == 1550.0));
    }

    #[test]
    fn impersonation_pins_delta_to_zero() {
        let mut p = params(Variant::Strong, Scenario::Impersonation, 64, 3);
        p.delta = 0.7;
        let report = run_session(&p).unwrap();
        assert_eq!(report.params.delta, 0.0);
        let events = schedule_events(&p);
        assert!(events.contains(&EventKind::EveStoresPair));
    }

    #[test]
    fn identical_params_produce_identical_reports() {
        let p = params(Variant::Strong, Scenario::LabelingVsScrub, 128, 23);
        let a = run_session(&p).unwrap();
        let b = run_session(&p).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_produce_different_keys() {
        let a = run_session(&params(Variant::Strong, Scenario::Honest, 64, 1)).unwrap();
        let b = run_session(&params(Variant::Strong, Scenario::Honest, 64, 2)).unwrap();
        assert_ne!(a.final_key_bits_a, b.final_key_bits_a);
    }

    #[test]
    fn corrupt_norm_fault_is_an_internal_invariant_violation() {
        for scenario in [Scenario::Honest, Scenario::Labeling] {
            let mut p = params(Variant::Strong, scenario, 16, 5);
            p.fault = FaultInjection::CorruptNorm;
            let err = run_session(&p).unwrap_err();
            assert!(
                matches!(err, SimError::Invariant { round: 0, .. }),
                "{scenario}"
            );
            assert!(err.to_string().contains("not normalized"), "{err}");
        }
        let mut p = params(Variant::Basic, Scenario::Honest, 16, 5);
        p.fault = FaultInjection::CorruptNorm;
        assert!(run_session(&p).is_err());
    }

    #[test]
    fn reorder_fault_is_rejected_by_the_trace_audit() {
        for (variant, scenario) in [
            (Variant::Strong, Scenario::Honest),
            (Variant::Strong, Scenario::Labeling),
            (Variant::Basic, Scenario::Honest),
        ] {
            let mut p = params(variant, scenario, 16, 5);
            p.fault = FaultInjection::ReorderTrace;
            let err = run_session(&p).unwrap_err();
            let SimError::Invariant {
                round,
                message,
                trace,
            } = err
            else {
                panic!("expected invariant violation");
            };
            assert_eq!(round, 0);
            assert!(message.contains("scheduled event order"), "{message}");
            assert!(!trace.is_empty());
        }
    }

    #[test]
    fn reorder_fault_breaks_the_store_release_handshake() {
        let mut p = params(Variant::Strong, Scenario::Labeling, 4, 5);
        p.fault = FaultInjection::ReorderTrace;
        let err = run_session(&p).unwrap_err();
        let SimError::Invariant { trace, .. } = err else {
            panic!("expected invariant violation");
        };
        let release = trace
            .iter()
            .position(|e| *e == EventKind::EveReleasesStored)
            .unwrap();
        let fakes_back = trace
            .iter()
            .position(|e| *e == EventKind::EveReceivesFakesBack)
            .unwrap();
        assert!(release < fakes_back);
    }

    #[test]
    fn intensity_probability_bounds_are_respected() {
        let mut p = params(Variant::Strong, Scenario::Honest, 64, 29);
        p.intensity_check_prob = 0.0;
        let report = run_session(&p).unwrap();
        assert_eq!(report.intensity_checks_run, 0);
        assert_eq!(report.intensity_pass_rate, 1.0);

        p.intensity_check_prob = 1.0;
        let report = run_session(&p).unwrap();
        assert_eq!(report.intensity_checks_run, 3 * 64);
        assert_eq!(report.intensity_pass_rate, 1.0);
    }

    #[test]
    fn draw_order_is_reported_per_scenario() {
        let honest = run_session(&params(Variant::Strong, Scenario::Honest, 4, 1)).unwrap();
        assert!(honest.rng_draw_order.iter().any(|s| s == "bob_measure"));
        assert!(!honest.rng_draw_order.iter().any(|s| s.starts_with("eve")));

        let labeling = run_session(&params(Variant::Strong, Scenario::Labeling, 4, 1)).unwrap();
        assert!(labeling
            .rng_draw_order
            .iter()
            .any(|s| s == "eve_tag_choice"));
        assert!(!labeling
            .rng_draw_order
            .iter()
            .any(|s| s == "eve_block_guess"));

        let impersonation =
            run_session(&params(Variant::Strong, Scenario::Impersonation, 4, 1)).unwrap();
        assert!(!impersonation
            .rng_draw_order
            .iter()
            .any(|s| s == "eve_tag_choice"));
        assert!(impersonation
            .rng_draw_order
            .iter()
            .any(|s| s == "eve_block_guess"));

        let scrub = run_session(&params(Variant::Strong, Scenario::LabelingVsScrub, 4, 1)).unwrap();
        assert!(scrub.rng_draw_order.iter().any(|s| s == "eve_tag_choice"));
        assert!(scrub.rng_draw_order.iter().any(|s| s == "eve_block_guess"));
    }

    #[test]
    fn sampled_bits_are_withheld_from_the_final_key() {
        let p = ProtocolParams {
            sample_fraction: 1.0,
            ..params(Variant::Strong, Scenario::Honest, 32, 31)
        };
        let report = run_session(&p).unwrap();
        assert_eq!(report.qber_sample_size, 32);
        assert!(report.final_key_bits_a.is_empty());
        assert!(report.final_key_bits_b.is_empty());
    }
}
