//! Agent state machines for honest Alice and Bob, Bob's verifier, and the
//! transcript of one full run.
//!
//! A run commits Alice to a bit by the basis she measures in: Z for 0, X
//! for 1. The outcomes travel pad-encrypted at light speed to her wing
//! agents, who unveil by handing the plaintext to Bob's adjacent agents.
//! Bob accepts only if the two unveilings are identical, arrive where and
//! when they should, are statistically consistent with his preparation
//! record under the claimed basis, and statistically inconsistent with the
//! conjugate one.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channels::{
    decode_detection, decode_outcomes, encode_detection, encode_outcomes, AgentId, Bits,
    ChannelError, Message, OneTimePad, OutcomeReport, Payload,
};
use crate::qubits::{
    apply_noise, measure_projective, random_bb84, sample_detection, BB84State, Basis, QubitError,
    QubitRecord,
};
use crate::rng::{stream_rng, Stream};
use crate::sched::{audit_messages, Agent, SchedError, Scheduler};
use crate::spacetime::{
    causally_precedes, light_arrival, standard_geometry, Event, Geometry, GeometryError, Wing,
};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("invalid config field {field}: {reason}")]
    Invalid { field: &'static str, reason: String },
}

impl ConfigError {
    fn new(field: &'static str, reason: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field,
            reason: reason.into(),
        }
    }

    pub fn field(&self) -> &'static str {
        match self {
            ConfigError::Invalid { field, .. } => field,
        }
    }
}

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Qubit(#[from] QubitError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Sched(#[from] SchedError),
}

/// Run parameters. `n` is the security parameter: the number of BB84
/// qubits Bob transmits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    #[serde(rename = "N")]
    pub n: u32,
    /// Geometry scale: the wings sit at (±x, 0, 0, x).
    pub x: f64,
    /// Aggregate bit-flip error rate on measured outcomes.
    pub e: f64,
    /// Detection efficiency.
    pub eta: f64,
    /// Maximum mismatch fraction accepted on same-basis qubits.
    #[serde(rename = "tauAccept")]
    pub tau_accept: f64,
    /// Minimum mismatch fraction required on conjugate-basis qubits.
    #[serde(rename = "rhoReject")]
    pub rho_reject: f64,
    /// Coordinate distance allowed between a wing reception and its anchor.
    #[serde(rename = "timingTolerance")]
    pub timing_tolerance: f64,
    /// Below this many same-basis qubits the verdict is an abort, not a
    /// decision.
    #[serde(rename = "minSameBasisCount")]
    pub min_same_basis_count: u32,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            n: 100,
            x: 1.0,
            e: 0.0,
            eta: 1.0,
            tau_accept: 0.15,
            rho_reject: 0.3,
            timing_tolerance: 0.0,
            min_same_basis_count: 16,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n < 1 {
            return Err(ConfigError::new("N", "must be at least 1"));
        }
        if !(self.x.is_finite() && self.x > 0.0) {
            return Err(ConfigError::new("x", format!("must be positive, got {}", self.x)));
        }
        if !(self.e.is_finite() && (0.0..0.5).contains(&self.e)) {
            return Err(ConfigError::new(
                "e",
                format!("must lie in [0, 0.5), got {}", self.e),
            ));
        }
        if !(self.eta.is_finite() && self.eta > 0.0 && self.eta <= 1.0) {
            return Err(ConfigError::new(
                "eta",
                format!("must lie in (0, 1], got {}", self.eta),
            ));
        }
        if !(self.tau_accept.is_finite() && (0.0..0.5).contains(&self.tau_accept)) {
            return Err(ConfigError::new(
                "tauAccept",
                format!("must lie in [0, 0.5), got {}", self.tau_accept),
            ));
        }
        if !(self.rho_reject.is_finite() && self.rho_reject > 0.0 && self.rho_reject < 0.5) {
            return Err(ConfigError::new(
                "rhoReject",
                format!("must lie in (0, 0.5), got {}", self.rho_reject),
            ));
        }
        if self.tau_accept >= self.rho_reject {
            return Err(ConfigError::new(
                "tauAccept",
                format!(
                    "must be below rhoReject so one dataset cannot pass as both commitments \
                     (tauAccept {} >= rhoReject {})",
                    self.tau_accept, self.rho_reject
                ),
            ));
        }
        if !(self.timing_tolerance.is_finite() && self.timing_tolerance >= 0.0) {
            return Err(ConfigError::new(
                "timingTolerance",
                format!("must be non-negative, got {}", self.timing_tolerance),
            ));
        }
        if self.min_same_basis_count < 1 {
            return Err(ConfigError::new("minSameBasisCount", "must be at least 1"));
        }
        Ok(())
    }

    /// Upper bound on the encoded outcome report length for this `n`;
    /// pads at least this long are guaranteed sufficient.
    pub fn max_report_bits(&self) -> usize {
        33 + 2 * self.n as usize
    }

    /// Noiseless, fully detected configuration judged at exact same-basis
    /// consistency; the setting under which cheating statistics have
    /// closed-form per-qubit rates.
    pub fn strict_game(n: u32) -> Self {
        ProtocolConfig {
            n,
            e: 0.0,
            eta: 1.0,
            tau_accept: 0.0,
            ..ProtocolConfig::default()
        }
    }
}

/// Everything Bob's wing agent ends up holding for one wing.
#[derive(Debug, Clone, PartialEq)]
pub struct WingUnveiling {
    /// Plaintext handed over at the unveiling.
    pub payload: Bits,
    /// Where and when Bob's agent received it.
    pub reception: Event,
}

impl WingUnveiling {
    /// Parsed report, or `None` when the payload is malformed.
    pub fn report(&self) -> Option<OutcomeReport> {
        decode_outcomes(&self.payload).ok()
    }
}

/// Full ordered record of one protocol run.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub config: ProtocolConfig,
    pub geometry: Geometry,
    pub qubit_records: Vec<QubitRecord>,
    /// The bit honest Alice committed to; `None` for adversarial runs.
    pub committed_bit: Option<bool>,
    pub wing_unveilings: [Option<WingUnveiling>; 2],
    /// Delivered messages, in delivery order.
    pub messages: Vec<Message>,
}

impl Transcript {
    /// Re-check every message against the causal gate, independently of
    /// the scheduler's insertion-time enforcement.
    pub fn audit_causality(&self) -> Result<(), SchedError> {
        audit_messages(self.messages.iter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accept(bool),
    RejectCheat,
    AbortInsufficientData,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accept(bit) => write!(f, "accept({})", *bit as u8),
            Verdict::RejectCheat => write!(f, "reject-cheat"),
            Verdict::AbortInsufficientData => write!(f, "abort-insufficient-data"),
        }
    }
}

/// Bob's per-check verdict over one transcript.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub timing_ok: bool,
    pub wings_equal: bool,
    pub claimed_bits_equal: bool,
    pub statistical_ok_for_claim: bool,
    pub other_hypothesis_rejected: bool,
    pub mismatch_same: f64,
    pub mismatch_conj: f64,
    pub same_basis_count: usize,
    pub conjugate_count: usize,
    /// Earliest event on the comparison worldline where both unveilings
    /// can be compared.
    pub comparison_event: Option<Event>,
    pub verdict: Verdict,
}

impl VerificationReport {
    fn insufficient() -> Self {
        VerificationReport {
            timing_ok: false,
            wings_equal: false,
            claimed_bits_equal: false,
            statistical_ok_for_claim: false,
            other_hypothesis_rejected: false,
            mismatch_same: 0.0,
            mismatch_conj: 0.0,
            same_basis_count: 0,
            conjugate_count: 0,
            comparison_event: None,
            verdict: Verdict::AbortInsufficientData,
        }
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict                  {}", self.verdict)?;
        writeln!(f, "timingOk                 {}", self.timing_ok)?;
        writeln!(f, "wingsEqual               {}", self.wings_equal)?;
        writeln!(f, "claimedBitsEqual         {}", self.claimed_bits_equal)?;
        writeln!(f, "statisticalOkForClaim    {}", self.statistical_ok_for_claim)?;
        writeln!(f, "otherHypothesisRejected  {}", self.other_hypothesis_rejected)?;
        writeln!(
            f,
            "mismatchSame             {:.3} ({} qubits)",
            self.mismatch_same, self.same_basis_count
        )?;
        writeln!(
            f,
            "mismatchConj             {:.3} ({} qubits)",
            self.mismatch_conj, self.conjugate_count
        )?;
        match self.comparison_event {
            Some(e) => write!(f, "comparisonEvent          {e}"),
            None => write!(f, "comparisonEvent          -"),
        }
    }
}

/// Bob's full acceptance check over a finished transcript.
///
/// The thresholds are taken from `config` rather than the transcript so a
/// fixed transcript can be re-judged under different thresholds.
pub fn verify(transcript: &Transcript, config: &ProtocolConfig) -> VerificationReport {
    let (u0, u1) = match (&transcript.wing_unveilings[0], &transcript.wing_unveilings[1]) {
        (Some(u0), Some(u1)) => (u0, u1),
        _ => return VerificationReport::insufficient(),
    };
    if transcript.qubit_records.is_empty() {
        return VerificationReport::insufficient();
    }

    let geometry = &transcript.geometry;
    let n = transcript.qubit_records.len();

    let parse = |u: &WingUnveiling| -> Option<OutcomeReport> {
        u.report().filter(|r| r.detected.len() == n)
    };
    let r0 = parse(u0);
    let r1 = parse(u1);
    let malformed = r0.is_none() || r1.is_none();

    let wings_equal = u0.payload == u1.payload;
    let claimed_bits_equal = match (&r0, &r1) {
        (Some(a), Some(b)) => a.claimed_bit == b.claimed_bit,
        _ => false,
    };

    let comparison_event = Some(geometry.comparison_event(u0.reception, u1.reception));
    let timing_ok = Wing::BOTH.iter().zip([u0, u1]).all(|(&w, u)| {
        u.reception.coordinate_distance(&geometry.bob_wing(w)) <= config.timing_tolerance
            && causally_precedes(geometry.p, u.reception)
    });

    // Statistics are computed against whichever wing parsed, preferring
    // wing 0; when both are malformed the verdict is already fixed.
    let mut stats = StatCheck::default();
    let mut claim = None;
    if let Some(report) = r0.as_ref().or(r1.as_ref()) {
        claim = Some(report.claimed_bit);
        stats = statistical_checks(&transcript.qubit_records, report, config);
    }

    let verdict = if malformed || !wings_equal || !claimed_bits_equal || !timing_ok {
        Verdict::RejectCheat
    } else if !stats.sufficient(config) {
        Verdict::AbortInsufficientData
    } else if !stats.statistical_ok || !stats.other_rejected {
        Verdict::RejectCheat
    } else {
        Verdict::Accept(claim.expect("claim present when reports parsed"))
    };

    VerificationReport {
        timing_ok,
        wings_equal,
        claimed_bits_equal,
        statistical_ok_for_claim: stats.statistical_ok,
        other_hypothesis_rejected: stats.other_rejected,
        mismatch_same: stats.mismatch_same,
        mismatch_conj: stats.mismatch_conj,
        same_basis_count: stats.same_count,
        conjugate_count: stats.conj_count,
        comparison_event,
        verdict,
    }
}

/// Outcome of the two statistical consistency checks for one claimed bit.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StatCheck {
    pub mismatch_same: f64,
    pub mismatch_conj: f64,
    pub same_count: usize,
    pub conj_count: usize,
    /// Same-basis mismatch fraction within `tauAccept`.
    pub statistical_ok: bool,
    /// Conjugate-basis mismatch fraction at or above `rhoReject`.
    pub other_rejected: bool,
}

impl StatCheck {
    /// Whether the sample is large enough to decide at all.
    pub fn sufficient(&self, config: &ProtocolConfig) -> bool {
        self.same_count >= config.min_same_basis_count as usize && self.conj_count > 0
    }
}

/// Compare one declared outcome report against the preparation record:
/// mismatch fraction on qubits prepared in the claimed basis (must be
/// small) and on conjugate preparations (must be large). Shared by the
/// verifier and the attack harness so both judge by the same rule.
pub fn statistical_checks(
    records: &[QubitRecord],
    report: &OutcomeReport,
    config: &ProtocolConfig,
) -> StatCheck {
    let same_basis = Basis::for_commitment(report.claimed_bit);
    let mut same_count = 0usize;
    let mut conj_count = 0usize;
    let mut same_bad = 0usize;
    let mut conj_bad = 0usize;
    for (index, outcome) in report.declared() {
        let record = &records[index];
        if record.prepared.basis == same_basis {
            same_count += 1;
            same_bad += (outcome != record.prepared.bit) as usize;
        } else {
            conj_count += 1;
            conj_bad += (outcome != record.prepared.bit) as usize;
        }
    }
    let mismatch_same = if same_count > 0 {
        same_bad as f64 / same_count as f64
    } else {
        0.0
    };
    let mismatch_conj = if conj_count > 0 {
        conj_bad as f64 / conj_count as f64
    } else {
        0.0
    };
    StatCheck {
        mismatch_same,
        mismatch_conj,
        same_count,
        conj_count,
        statistical_ok: mismatch_same <= config.tau_accept,
        other_rejected: conj_count > 0 && mismatch_conj >= config.rho_reject,
    }
}

/// Per-agent internal processing delays; zero in the idealized protocol.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProcessingDelays {
    pub alice_p: f64,
    pub alice_wings: [f64; 2],
}

/// Bob's preparation step: `n` uniformly random BB84 states, recorded and
/// sent from his preparation lab to arrive at P.
pub fn bob_prepare<R: rand::Rng>(
    config: &ProtocolConfig,
    geometry: &Geometry,
    rng: &mut R,
) -> Result<(Vec<QubitRecord>, Message), ProtocolError> {
    config.validate()?;
    let states = random_bb84(config.n as usize, rng)?;
    let records = states
        .iter()
        .enumerate()
        .map(|(i, &s)| QubitRecord::prepared_only(i as u32, s))
        .collect();
    let message = Message {
        sender: AgentId::BobP,
        receiver: AgentId::AliceP,
        emission: geometry.bob_prep,
        reception: light_arrival(geometry.bob_prep, geometry.p.position()),
        payload: Payload::QubitBatch(states),
    };
    Ok((records, message))
}

/// What Alice's P agent produces when committing.
#[derive(Debug, Clone)]
pub struct AliceCommit {
    pub detected: Vec<bool>,
    /// Outcomes of detected qubits, in index order, after noise.
    pub outcomes: Vec<bool>,
    /// The plaintext outcome report relayed to both wings.
    pub report: Bits,
    pub detection_message: Message,
    pub relay_messages: [Message; 2],
}

/// Alice's commitment step at P: sample detection, measure every detected
/// state at the honest angle for `bit`, apply noise, and emit the
/// detection report toward Bob plus one pad-encrypted outcome relay per
/// wing. Both relays carry the same plaintext.
#[allow(clippy::too_many_arguments)]
pub fn alice_commit<R: rand::Rng>(
    config: &ProtocolConfig,
    geometry: &Geometry,
    bit: bool,
    states: &[BB84State],
    pads: &mut [OneTimePad; 2],
    commit_time: f64,
    detect_rng: &mut R,
    measure_rng: &mut R,
    noise_rng: &mut R,
) -> Result<AliceCommit, ProtocolError> {
    let detected = sample_detection(states.len(), config.eta, detect_rng)?;
    let angle = Basis::for_commitment(bit).angle_degrees();
    let mut outcomes = Vec::with_capacity(states.len());
    for (state, &flag) in states.iter().zip(&detected) {
        if flag {
            let raw = measure_projective(*state, angle, measure_rng);
            outcomes.push(apply_noise(raw, config.e, noise_rng)?);
        }
    }
    let report = encode_outcomes(bit, &outcomes, &detected)?;

    let at_p = Event::new(
        geometry.p.x,
        geometry.p.y,
        geometry.p.z,
        geometry.p.t + commit_time,
    );
    let detection_message = Message {
        sender: AgentId::AliceP,
        receiver: AgentId::BobP,
        emission: at_p,
        reception: light_arrival(at_p, geometry.bob_prep.position()),
        payload: Payload::DetectionReport(encode_detection(&detected)),
    };
    let mut relays = Vec::with_capacity(2);
    for wing in Wing::BOTH {
        let ciphertext = pads[wing.index()].encrypt(&report)?;
        relays.push(Message {
            sender: AgentId::AliceP,
            receiver: AgentId::AliceWing(wing),
            emission: at_p,
            reception: light_arrival(at_p, geometry.q(wing).position()),
            payload: Payload::OutcomeRelay(ciphertext),
        });
    }
    let relay_messages = [relays.remove(0), relays.remove(0)];
    Ok(AliceCommit {
        detected,
        outcomes,
        report,
        detection_message,
        relay_messages,
    })
}

/// Alice's unveiling step at a wing: decrypt the relayed report and hand
/// the plaintext to Bob's adjacent agent.
///
/// The handover targets the designated anchor Q'i when the emission can
/// still reach it; a late unveiling falls back to the light-speed arrival
/// at the anchor's position, which the timing check will then flag.
pub fn alice_unveil(
    geometry: &Geometry,
    wing: Wing,
    ciphertext: &Bits,
    pad: &mut OneTimePad,
    unveil_time: f64,
) -> Result<Message, ProtocolError> {
    let plaintext = pad.decrypt(ciphertext)?;
    let q = geometry.q(wing);
    let emission = Event::new(q.x, q.y, q.z, unveil_time);
    let anchor = geometry.bob_wing(wing);
    let reception = if causally_precedes(emission, anchor) {
        anchor
    } else {
        light_arrival(emission, anchor.position())
    };
    Ok(Message {
        sender: AgentId::AliceWing(wing),
        receiver: AgentId::BobWing(wing),
        emission,
        reception,
        payload: Payload::Unveil(plaintext),
    })
}

// ---------------------------------------------------------------------------
// Honest agents
// ---------------------------------------------------------------------------

struct HonestAliceP {
    config: ProtocolConfig,
    geometry: Geometry,
    bit: bool,
    pads: [OneTimePad; 2],
    delay: f64,
    detect_rng: rand_chacha::ChaCha8Rng,
    measure_rng: rand_chacha::ChaCha8Rng,
    noise_rng: rand_chacha::ChaCha8Rng,
    committed: Option<AliceCommit>,
}

impl Agent for HonestAliceP {
    fn id(&self) -> AgentId {
        AgentId::AliceP
    }

    fn on_message(&mut self, message: &Message, now: f64) -> Result<Vec<Message>, String> {
        match &message.payload {
            Payload::QubitBatch(states) => {
                let commit = alice_commit(
                    &self.config,
                    &self.geometry,
                    self.bit,
                    states,
                    &mut self.pads,
                    now + self.delay,
                    &mut self.detect_rng,
                    &mut self.measure_rng,
                    &mut self.noise_rng,
                )
                .map_err(|e| e.to_string())?;
                let messages = vec![
                    commit.detection_message.clone(),
                    commit.relay_messages[0].clone(),
                    commit.relay_messages[1].clone(),
                ];
                self.committed = Some(commit);
                Ok(messages)
            }
            other => Err(format!("unexpected {:?} at Alice's P agent", other.kind())),
        }
    }
}

pub(crate) struct HonestAliceWing {
    pub(crate) wing: Wing,
    pub(crate) geometry: Geometry,
    pub(crate) pad: OneTimePad,
    pub(crate) delay: f64,
}

impl Agent for HonestAliceWing {
    fn id(&self) -> AgentId {
        AgentId::AliceWing(self.wing)
    }

    fn on_message(&mut self, message: &Message, now: f64) -> Result<Vec<Message>, String> {
        match &message.payload {
            Payload::OutcomeRelay(ciphertext) => {
                let unveil = alice_unveil(
                    &self.geometry,
                    self.wing,
                    ciphertext,
                    &mut self.pad,
                    now + self.delay,
                )
                .map_err(|e| e.to_string())?;
                Ok(vec![unveil])
            }
            other => Err(format!(
                "unexpected {:?} at Alice's wing-{} agent",
                other.kind(),
                self.wing
            )),
        }
    }
}

pub(crate) struct BobPAgent {
    pub(crate) detection: Option<Vec<bool>>,
}

impl Agent for BobPAgent {
    fn id(&self) -> AgentId {
        AgentId::BobP
    }

    fn on_message(&mut self, message: &Message, _now: f64) -> Result<Vec<Message>, String> {
        match &message.payload {
            Payload::DetectionReport(bits) => {
                self.detection = Some(decode_detection(bits).map_err(|e| e.to_string())?);
                Ok(Vec::new())
            }
            other => Err(format!("unexpected {:?} at Bob's P agent", other.kind())),
        }
    }
}

pub(crate) struct BobWingAgent {
    pub(crate) wing: Wing,
    pub(crate) unveiling: Option<WingUnveiling>,
}

impl Agent for BobWingAgent {
    fn id(&self) -> AgentId {
        AgentId::BobWing(self.wing)
    }

    fn on_message(&mut self, message: &Message, _now: f64) -> Result<Vec<Message>, String> {
        match &message.payload {
            Payload::Unveil(plaintext) => {
                self.unveiling = Some(WingUnveiling {
                    payload: plaintext.clone(),
                    reception: message.reception,
                });
                Ok(Vec::new())
            }
            other => Err(format!(
                "unexpected {:?} at Bob's wing-{} agent",
                other.kind(),
                self.wing
            )),
        }
    }
}

/// Drive one honest run end to end through the causality-enforcing
/// scheduler. The result is a pure function of `(config, geometry, bit,
/// seed, delays)`.
pub fn run_honest_with(
    config: &ProtocolConfig,
    geometry: &Geometry,
    bit: bool,
    seed: u64,
    delays: &ProcessingDelays,
) -> Result<Transcript, ProtocolError> {
    config.validate()?;

    let mut pad_rng = stream_rng(seed, Stream::Pads);
    let pad_len = config.max_report_bits();
    let pad0 = OneTimePad::from_rng(0, pad_len, &mut pad_rng);
    let pad1 = OneTimePad::from_rng(1, pad_len, &mut pad_rng);

    let mut prep_rng = stream_rng(seed, Stream::Preparation);
    let (mut records, batch) = bob_prepare(config, geometry, &mut prep_rng)?;

    let mut alice_p = HonestAliceP {
        config: config.clone(),
        geometry: geometry.clone(),
        bit,
        pads: [pad0.clone(), pad1.clone()],
        delay: delays.alice_p,
        detect_rng: stream_rng(seed, Stream::Detection),
        measure_rng: stream_rng(seed, Stream::Measurement),
        noise_rng: stream_rng(seed, Stream::Noise),
        committed: None,
    };
    let mut alice_w0 = HonestAliceWing {
        wing: Wing::Q0,
        geometry: geometry.clone(),
        pad: pad0,
        delay: delays.alice_wings[0],
    };
    let mut alice_w1 = HonestAliceWing {
        wing: Wing::Q1,
        geometry: geometry.clone(),
        pad: pad1,
        delay: delays.alice_wings[1],
    };
    let mut bob_p = BobPAgent { detection: None };
    let mut bob_w0 = BobWingAgent {
        wing: Wing::Q0,
        unveiling: None,
    };
    let mut bob_w1 = BobWingAgent {
        wing: Wing::Q1,
        unveiling: None,
    };

    let mut scheduler = Scheduler::new();
    scheduler.schedule(batch)?;
    let messages = scheduler.run(&mut [
        &mut alice_p,
        &mut alice_w0,
        &mut alice_w1,
        &mut bob_p,
        &mut bob_w0,
        &mut bob_w1,
    ])?;

    if let Some(commit) = &alice_p.committed {
        let mut outcomes = commit.outcomes.iter();
        for (record, &flag) in records.iter_mut().zip(&commit.detected) {
            record.detected = flag;
            record.outcome = if flag { outcomes.next().copied() } else { None };
        }
    }

    Ok(Transcript {
        config: config.clone(),
        geometry: geometry.clone(),
        qubit_records: records,
        committed_bit: Some(bit),
        wing_unveilings: [bob_w0.unveiling, bob_w1.unveiling],
        messages,
    })
}

/// Honest run over the standard geometry for `config.x`.
pub fn run_honest(
    config: &ProtocolConfig,
    bit: bool,
    seed: u64,
) -> Result<Transcript, ProtocolError> {
    let geometry = standard_geometry(config.x)?;
    run_honest_with(config, &geometry, bit, seed, &ProcessingDelays::default())
}

// ---------------------------------------------------------------------------
// Transcript serialization
// ---------------------------------------------------------------------------

#[derive(Debug, Error, PartialEq)]
#[error("transcript parse error at line {line}: {reason}")]
pub struct TranscriptParseError {
    pub line: usize,
    pub reason: String,
}

fn fmt_event(e: Event) -> String {
    format!("{} {} {} {}", e.x, e.y, e.z, e.t)
}

fn fmt_offset(o: crate::spacetime::LabOffset) -> String {
    format!(
        "{} {} {} {}",
        o.displacement[0], o.displacement[1], o.displacement[2], o.delay
    )
}

fn fmt_payload(p: &Payload) -> String {
    match p {
        Payload::QubitBatch(states) => {
            if states.is_empty() {
                "-".to_string()
            } else {
                states
                    .iter()
                    .map(|s| format!("{}{}", s.basis.label(), s.bit as u8))
                    .collect()
            }
        }
        other => {
            let bits = other.bits().expect("classical payload");
            if bits.is_empty() {
                "-".to_string()
            } else {
                bits.to_binary_string()
            }
        }
    }
}

impl Transcript {
    /// Line-delimited structured text log: one record per line, fields
    /// tab-separated, events as four decimal reals.
    pub fn to_log(&self) -> String {
        let c = &self.config;
        let g = &self.geometry;
        let mut out = String::new();
        out.push_str(&format!(
            "config\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            c.n,
            c.x,
            c.e,
            c.eta,
            c.tau_accept,
            c.rho_reject,
            c.timing_tolerance,
            c.min_same_basis_count
        ));
        out.push_str(&format!(
            "geometry\t{}\t{}\t{}\t{}\t{} {} {}\n",
            g.x,
            fmt_offset(g.offsets.prep),
            fmt_offset(g.offsets.wings[0]),
            fmt_offset(g.offsets.wings[1]),
            g.comparison_position[0],
            g.comparison_position[1],
            g.comparison_position[2],
        ));
        out.push_str(&format!(
            "commit\t{}\n",
            match self.committed_bit {
                Some(b) => (b as u8).to_string(),
                None => "-".to_string(),
            }
        ));
        for r in &self.qubit_records {
            out.push_str(&format!(
                "qubit\t{}\t{}\t{}\t{}\t{}\n",
                r.index,
                r.prepared.basis.label(),
                r.prepared.bit as u8,
                r.detected as u8,
                match r.outcome {
                    Some(o) => (o as u8).to_string(),
                    None => "-".to_string(),
                }
            ));
        }
        for m in &self.messages {
            out.push_str(&format!(
                "message\t{}\t{}\t{}\t{}\t{}\t{}\n",
                m.kind().label(),
                m.sender,
                m.receiver,
                fmt_event(m.emission),
                fmt_event(m.reception),
                fmt_payload(&m.payload),
            ));
        }
        for (i, u) in self.wing_unveilings.iter().enumerate() {
            if let Some(u) = u {
                out.push_str(&format!(
                    "wing\t{}\t{}\t{}\n",
                    i,
                    fmt_event(u.reception),
                    if u.payload.is_empty() {
                        "-".to_string()
                    } else {
                        u.payload.to_binary_string()
                    }
                ));
            }
        }
        out
    }

    pub fn from_log(text: &str) -> Result<Transcript, TranscriptParseError> {
        let fail = |line: usize, reason: &str| TranscriptParseError {
            line,
            reason: reason.to_string(),
        };
        let parse_f64 = |line: usize, s: &str| {
            s.parse::<f64>()
                .map_err(|_| fail(line, &format!("bad real {s:?}")))
        };
        let parse_event = |line: usize, s: &str| -> Result<Event, TranscriptParseError> {
            let parts: Vec<&str> = s.split(' ').collect();
            if parts.len() != 4 {
                return Err(fail(line, "event needs four reals"));
            }
            Ok(Event::new(
                parse_f64(line, parts[0])?,
                parse_f64(line, parts[1])?,
                parse_f64(line, parts[2])?,
                parse_f64(line, parts[3])?,
            ))
        };
        let parse_offset =
            |line: usize, s: &str| -> Result<crate::spacetime::LabOffset, TranscriptParseError> {
                let parts: Vec<&str> = s.split(' ').collect();
                if parts.len() != 4 {
                    return Err(fail(line, "offset needs four reals"));
                }
                Ok(crate::spacetime::LabOffset::new(
                    [
                        parse_f64(line, parts[0])?,
                        parse_f64(line, parts[1])?,
                        parse_f64(line, parts[2])?,
                    ],
                    parse_f64(line, parts[3])?,
                ))
            };

        let mut config: Option<ProtocolConfig> = None;
        let mut geometry: Option<Geometry> = None;
        let mut committed_bit: Option<bool> = None;
        let mut records: Vec<QubitRecord> = Vec::new();
        let mut messages: Vec<Message> = Vec::new();
        let mut unveilings: [Option<WingUnveiling>; 2] = [None, None];

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            if raw.is_empty() {
                continue;
            }
            let fields: Vec<&str> = raw.split('\t').collect();
            match fields[0] {
                "config" => {
                    if fields.len() != 9 {
                        return Err(fail(line, "config needs 8 fields"));
                    }
                    config = Some(ProtocolConfig {
                        n: fields[1].parse().map_err(|_| fail(line, "bad N"))?,
                        x: parse_f64(line, fields[2])?,
                        e: parse_f64(line, fields[3])?,
                        eta: parse_f64(line, fields[4])?,
                        tau_accept: parse_f64(line, fields[5])?,
                        rho_reject: parse_f64(line, fields[6])?,
                        timing_tolerance: parse_f64(line, fields[7])?,
                        min_same_basis_count: fields[8]
                            .parse()
                            .map_err(|_| fail(line, "bad minSameBasisCount"))?,
                    });
                }
                "geometry" => {
                    if fields.len() != 6 {
                        return Err(fail(line, "geometry needs 5 fields"));
                    }
                    let x = parse_f64(line, fields[1])?;
                    let offsets = crate::spacetime::LabOffsets {
                        prep: parse_offset(line, fields[2])?,
                        wings: [
                            parse_offset(line, fields[3])?,
                            parse_offset(line, fields[4])?,
                        ],
                    };
                    let cmp: Vec<&str> = fields[5].split(' ').collect();
                    if cmp.len() != 3 {
                        return Err(fail(line, "comparison position needs three reals"));
                    }
                    let mut g = crate::spacetime::offset_geometry(x, offsets)
                        .map_err(|e| fail(line, &e.to_string()))?;
                    g.comparison_position = [
                        parse_f64(line, cmp[0])?,
                        parse_f64(line, cmp[1])?,
                        parse_f64(line, cmp[2])?,
                    ];
                    geometry = Some(g);
                }
                "commit" => {
                    committed_bit = match fields.get(1) {
                        Some(&"0") => Some(false),
                        Some(&"1") => Some(true),
                        Some(&"-") => None,
                        _ => return Err(fail(line, "bad commit bit")),
                    };
                }
                "qubit" => {
                    if fields.len() != 6 {
                        return Err(fail(line, "qubit needs 5 fields"));
                    }
                    let basis = match fields[2] {
                        "Z" => Basis::Z,
                        "X" => Basis::X,
                        _ => return Err(fail(line, "bad basis")),
                    };
                    records.push(QubitRecord {
                        index: fields[1].parse().map_err(|_| fail(line, "bad index"))?,
                        prepared: BB84State::new(basis, fields[3] == "1"),
                        detected: fields[4] == "1",
                        outcome: match fields[5] {
                            "0" => Some(false),
                            "1" => Some(true),
                            "-" => None,
                            _ => return Err(fail(line, "bad outcome")),
                        },
                    });
                }
                "message" => {
                    if fields.len() != 7 {
                        return Err(fail(line, "message needs 6 fields"));
                    }
                    let kind = fields[1];
                    let sender = AgentId::from_label(fields[2])
                        .ok_or_else(|| fail(line, "bad sender"))?;
                    let receiver = AgentId::from_label(fields[3])
                        .ok_or_else(|| fail(line, "bad receiver"))?;
                    let emission = parse_event(line, fields[4])?;
                    let reception = parse_event(line, fields[5])?;
                    let body = fields[6];
                    let classical = || {
                        if body == "-" {
                            Ok(Bits::new())
                        } else {
                            Bits::from_binary_string(body).map_err(|e| fail(line, &e.to_string()))
                        }
                    };
                    let payload = match kind {
                        "qubit-batch" => {
                            let mut states = Vec::new();
                            if body != "-" {
                                let chars: Vec<char> = body.chars().collect();
                                if !chars.len().is_multiple_of(2) {
                                    return Err(fail(line, "odd qubit batch encoding"));
                                }
                                for pair in chars.chunks(2) {
                                    let basis = match pair[0] {
                                        'Z' => Basis::Z,
                                        'X' => Basis::X,
                                        _ => return Err(fail(line, "bad state basis")),
                                    };
                                    let bit = match pair[1] {
                                        '0' => false,
                                        '1' => true,
                                        _ => return Err(fail(line, "bad state bit")),
                                    };
                                    states.push(BB84State::new(basis, bit));
                                }
                            }
                            Payload::QubitBatch(states)
                        }
                        "detection-report" => Payload::DetectionReport(classical()?),
                        "outcome-relay" => Payload::OutcomeRelay(classical()?),
                        "unveil" => Payload::Unveil(classical()?),
                        _ => return Err(fail(line, "unknown message kind")),
                    };
                    messages.push(Message {
                        sender,
                        receiver,
                        emission,
                        reception,
                        payload,
                    });
                }
                "wing" => {
                    if fields.len() != 4 {
                        return Err(fail(line, "wing needs 3 fields"));
                    }
                    let index: usize = fields[1].parse().map_err(|_| fail(line, "bad wing"))?;
                    if index > 1 {
                        return Err(fail(line, "wing index out of range"));
                    }
                    let reception = parse_event(line, fields[2])?;
                    let payload = if fields[3] == "-" {
                        Bits::new()
                    } else {
                        Bits::from_binary_string(fields[3])
                            .map_err(|e| fail(line, &e.to_string()))?
                    };
                    unveilings[index] = Some(WingUnveiling { payload, reception });
                }
                other => return Err(fail(line, &format!("unknown record {other:?}"))),
            }
        }

        Ok(Transcript {
            config: config.ok_or_else(|| fail(0, "missing config line"))?,
            geometry: geometry.ok_or_else(|| fail(0, "missing geometry line"))?,
            qubit_records: records,
            committed_bit,
            wing_unveilings: unveilings,
            messages,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::MessageKind;
    use crate::rng::seeded_rng;
    use proptest::prelude::*;

    fn config(n: u32) -> ProtocolConfig {
        ProtocolConfig {
            n,
            ..ProtocolConfig::default()
        }
    }

    #[test]
    fn default_config_is_valid() {
        ProtocolConfig::default().validate().unwrap();
    }

    #[test]
    fn config_rejections_name_the_field() {
        let mut c = config(0);
        assert_eq!(c.validate().unwrap_err().field(), "N");
        c = config(10);
        c.e = 0.5;
        assert_eq!(c.validate().unwrap_err().field(), "e");
        c = config(10);
        c.tau_accept = 0.4;
        c.rho_reject = 0.3;
        assert_eq!(c.validate().unwrap_err().field(), "tauAccept");
        c = config(10);
        c.eta = 0.0;
        assert_eq!(c.validate().unwrap_err().field(), "eta");
    }

    #[test]
    fn strict_zero_tau_is_allowed() {
        let c = ProtocolConfig {
            tau_accept: 0.0,
            ..ProtocolConfig::default()
        };
        c.validate().unwrap();
    }

    #[test]
    fn bob_prepare_records_everything_undetected() {
        let c = config(100);
        let g = standard_geometry(1.0).unwrap();
        let mut rng = seeded_rng(1);
        let (records, batch) = bob_prepare(&c, &g, &mut rng).unwrap();
        assert_eq!(records.len(), 100);
        assert!(records.iter().all(|r| !r.detected && r.outcome.is_none()));
        assert_eq!(batch.reception, Event::origin());
        assert_eq!(batch.kind(), MessageKind::QubitBatch);
    }

    #[test]
    fn bob_prepare_is_reproducible() {
        let c = config(50);
        let g = standard_geometry(1.0).unwrap();
        let mut a = seeded_rng(7);
        let mut b = seeded_rng(7);
        let (ra, _) = bob_prepare(&c, &g, &mut a).unwrap();
        let (rb, _) = bob_prepare(&c, &g, &mut b).unwrap();
        assert_eq!(ra, rb);
    }

    fn run_commit(bit: bool, n: u32, e: f64, seed: u64) -> (Vec<BB84State>, AliceCommit) {
        let c = ProtocolConfig {
            n,
            e,
            ..ProtocolConfig::default()
        };
        let g = standard_geometry(1.0).unwrap();
        let mut prep = stream_rng(seed, Stream::Preparation);
        let states = random_bb84(n as usize, &mut prep).unwrap();
        let mut pad_rng = stream_rng(seed, Stream::Pads);
        let mut pads = [
            OneTimePad::from_rng(0, c.max_report_bits(), &mut pad_rng),
            OneTimePad::from_rng(1, c.max_report_bits(), &mut pad_rng),
        ];
        let commit = alice_commit(
            &c,
            &g,
            bit,
            &states,
            &mut pads,
            0.0,
            &mut stream_rng(seed, Stream::Detection),
            &mut stream_rng(seed, Stream::Measurement),
            &mut stream_rng(seed, Stream::Noise),
        )
        .unwrap();
        (states, commit)
    }

    #[test]
    fn commitment_outcomes_match_same_basis_preparations_exactly() {
        let (states, commit) = run_commit(false, 2000, 0.0, 3);
        let mut outcomes = commit.outcomes.iter();
        for state in &states {
            let out = *outcomes.next().unwrap();
            if state.basis == Basis::Z {
                assert_eq!(out, state.bit);
            }
        }
    }

    #[test]
    fn conjugate_outcomes_are_coin_flips() {
        let (states, commit) = run_commit(false, 10_000, 0.0, 4);
        let mut outcomes = commit.outcomes.iter();
        let mut matches = 0usize;
        let mut total = 0usize;
        for state in &states {
            let out = *outcomes.next().unwrap();
            if state.basis == Basis::X {
                total += 1;
                matches += (out == state.bit) as usize;
            }
        }
        let freq = matches as f64 / total as f64;
        assert!((freq - 0.5).abs() < 0.02, "match frequency {freq}");
    }

    #[test]
    fn both_wing_relays_decrypt_to_the_same_plaintext() {
        let seed = 11;
        let (_, commit) = run_commit(true, 64, 0.0, seed);
        let c = config(64);
        let mut pad_rng = stream_rng(seed, Stream::Pads);
        let mut mirror0 = OneTimePad::from_rng(0, c.max_report_bits(), &mut pad_rng);
        let mut mirror1 = OneTimePad::from_rng(1, c.max_report_bits(), &mut pad_rng);
        let ct0 = commit.relay_messages[0].payload.bits().unwrap();
        let ct1 = commit.relay_messages[1].payload.bits().unwrap();
        assert_ne!(ct0, ct1, "independent pads give distinct ciphertexts");
        let pt0 = mirror0.decrypt(ct0).unwrap();
        let pt1 = mirror1.decrypt(ct1).unwrap();
        assert_eq!(pt0, pt1);
        assert_eq!(pt0, commit.report);
    }

    #[test]
    fn honest_run_accepts_the_committed_bit() {
        let c = config(100);
        for bit in [false, true] {
            let t = run_honest(&c, bit, 42).unwrap();
            let report = verify(&t, &c);
            assert_eq!(report.verdict, Verdict::Accept(bit));
            assert_eq!(report.mismatch_same, 0.0);
            assert!((report.mismatch_conj - 0.5).abs() < 0.2);
            t.audit_causality().unwrap();
        }
    }

    #[test]
    fn honest_unveilings_arrive_exactly_at_the_wing_anchors() {
        let c = config(40);
        let t = run_honest(&c, false, 5).unwrap();
        let g = &t.geometry;
        assert_eq!(t.wing_unveilings[0].as_ref().unwrap().reception, g.q0);
        assert_eq!(t.wing_unveilings[1].as_ref().unwrap().reception, g.q1);
    }

    #[test]
    fn offset_geometry_unveiling_lands_on_the_displaced_anchor() {
        let c = config(40);
        let offsets = crate::spacetime::LabOffsets {
            wings: [
                crate::spacetime::LabOffset::new([0.01, 0.0, 0.0], 0.02),
                crate::spacetime::LabOffset::none(),
            ],
            ..Default::default()
        };
        let g = crate::spacetime::offset_geometry(1.0, offsets).unwrap();
        let t = run_honest_with(&c, &g, false, 5, &ProcessingDelays::default()).unwrap();
        let r = t.wing_unveilings[0].as_ref().unwrap().reception;
        assert!((r.x - 1.01).abs() < 1e-12);
        assert!((r.t - 1.02).abs() < 1e-12);
        assert_eq!(verify(&t, &c).verdict, Verdict::Accept(false));
        t.audit_causality().unwrap();
    }

    #[test]
    fn fully_offset_geometry_still_accepts() {
        // Bob prepares early at a displaced lab and receives both
        // unveilings at displaced anchors; the run stays causal and the
        // verdict is unchanged.
        let c = config(64);
        let offsets = crate::spacetime::LabOffsets {
            prep: crate::spacetime::LabOffset::new([0.01, 0.0, 0.0], 0.02),
            wings: [
                crate::spacetime::LabOffset::new([0.01, 0.0, 0.0], 0.02),
                crate::spacetime::LabOffset::new([-0.02, 0.0, 0.0], 0.03),
            ],
        };
        let g = crate::spacetime::offset_geometry(1.0, offsets).unwrap();
        let t = run_honest_with(&c, &g, true, 77, &ProcessingDelays::default()).unwrap();
        t.audit_causality().unwrap();
        let report = verify(&t, &c);
        assert_eq!(report.verdict, Verdict::Accept(true));
        // The batch arrives at P's position before t = 0, since the
        // displaced preparation lab emitted early.
        let batch = &t.messages[0];
        assert_eq!(batch.kind(), MessageKind::QubitBatch);
        assert_eq!(batch.emission, Event::new(0.01, 0.0, 0.0, -0.02));
        assert_eq!(batch.reception.position(), [0.0, 0.0, 0.0]);
        assert!((batch.reception.t - (-0.01)).abs() < 1e-12);
        assert_eq!(
            t.wing_unveilings[0].as_ref().unwrap().reception,
            g.bob_wing(Wing::Q0)
        );
        assert_eq!(
            t.wing_unveilings[1].as_ref().unwrap().reception,
            g.bob_wing(Wing::Q1)
        );
    }

    #[test]
    fn runs_are_deterministic_per_seed() {
        let c = config(64);
        let a = run_honest(&c, true, 123).unwrap();
        let b = run_honest(&c, true, 123).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_log(), b.to_log());
        let other = run_honest(&c, true, 124).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn differing_wing_payloads_are_detected_as_cheating() {
        let c = config(64);
        let mut t = run_honest(&c, false, 9).unwrap();
        let u1 = t.wing_unveilings[1].as_mut().unwrap();
        let mut bits: Vec<bool> = u1.payload.iter().collect();
        let last = bits.len() - 1;
        bits[last] = !bits[last];
        u1.payload = Bits::from_bools(&bits);
        let report = verify(&t, &c);
        assert!(!report.wings_equal);
        assert_eq!(report.verdict, Verdict::RejectCheat);
    }

    #[test]
    fn knowing_every_encoded_bit_fails_the_conjugate_check() {
        // White-box injection: declared outcomes equal the encoded bits of
        // all qubits in both bases, which no honest basis choice produces.
        let c = config(64);
        let mut t = run_honest(&c, false, 10).unwrap();
        let detected: Vec<bool> = t.qubit_records.iter().map(|r| r.detected).collect();
        let outcomes: Vec<bool> = t
            .qubit_records
            .iter()
            .filter(|r| r.detected)
            .map(|r| r.prepared.bit)
            .collect();
        let payload = encode_outcomes(false, &outcomes, &detected).unwrap();
        for u in t.wing_unveilings.iter_mut() {
            u.as_mut().unwrap().payload = payload.clone();
        }
        let report = verify(&t, &c);
        assert!(report.statistical_ok_for_claim);
        assert!(!report.other_hypothesis_rejected);
        assert_eq!(report.mismatch_conj, 0.0);
        assert_eq!(report.verdict, Verdict::RejectCheat);
    }

    #[test]
    fn missing_unveiling_aborts() {
        let c = config(64);
        let mut t = run_honest(&c, false, 11).unwrap();
        t.wing_unveilings[1] = None;
        assert_eq!(verify(&t, &c).verdict, Verdict::AbortInsufficientData);
    }

    #[test]
    fn malformed_unveiling_is_treated_as_cheating() {
        let c = config(64);
        let mut t = run_honest(&c, false, 12).unwrap();
        let u = t.wing_unveilings[0].as_mut().unwrap();
        u.payload = Bits::from_binary_string("010101").unwrap();
        assert_eq!(verify(&t, &c).verdict, Verdict::RejectCheat);
    }

    #[test]
    fn tiny_same_basis_samples_abort() {
        let c = ProtocolConfig {
            n: 8,
            min_same_basis_count: 16,
            ..ProtocolConfig::default()
        };
        let t = run_honest(&c, false, 13).unwrap();
        assert_eq!(verify(&t, &c).verdict, Verdict::AbortInsufficientData);
    }

    #[test]
    fn late_unveiling_fails_the_timing_check() {
        let c = config(64);
        let g = standard_geometry(1.0).unwrap();
        let delays = ProcessingDelays {
            alice_wings: [0.5, 0.0],
            ..Default::default()
        };
        let t = run_honest_with(&c, &g, false, 14, &delays).unwrap();
        let report = verify(&t, &c);
        assert!(!report.timing_ok);
        assert_eq!(report.verdict, Verdict::RejectCheat);
        // The late handover still lands on the anchor's worldline.
        let r = t.wing_unveilings[0].as_ref().unwrap().reception;
        assert_eq!(r.position(), g.q0.position());
        assert!(r.t > g.q0.t);
    }

    #[test]
    fn transcript_log_round_trips() {
        let c = config(32);
        let t = run_honest(&c, true, 15).unwrap();
        let log = t.to_log();
        let parsed = Transcript::from_log(&log).unwrap();
        assert_eq!(parsed, t);
        assert_eq!(parsed.to_log(), log);
    }

    #[test]
    fn transcript_log_rejects_garbage() {
        assert!(Transcript::from_log("nonsense\t1\n").is_err());
        assert!(Transcript::from_log("config\t1\n").is_err());
    }

    #[test]
    fn transcript_log_matches_the_golden_run() {
        let c = ProtocolConfig {
            n: 2,
            min_same_basis_count: 1,
            ..ProtocolConfig::default()
        };
        let t = run_honest(&c, false, 1).unwrap();
        let golden = "\
config\t2\t1\t0\t1\t0.15\t0.3\t0\t1
geometry\t1\t0 0 0 0\t0 0 0 0\t0 0 0 0\t0 0 0
commit\t0
qubit\t0\tX\t0\t1\t1
qubit\t1\tX\t0\t1\t0
message\tqubit-batch\tbobP\taliceP\t0 0 0 0\t0 0 0 0\tX0X0
message\tdetection-report\taliceP\tbobP\t0 0 0 0\t0 0 0 0\t0000000000000000000000000000001011
message\toutcome-relay\taliceP\taliceQ0\t0 0 0 0\t1 0 0 1\t0111011111010111101010001010110111100
message\toutcome-relay\taliceP\taliceQ1\t0 0 0 0\t-1 0 0 1\t1001011000111101000000010011111001110
message\tunveil\taliceQ0\tbobQ0\t1 0 0 1\t1 0 0 1\t0000000000000000000000000000000101110
message\tunveil\taliceQ1\tbobQ1\t-1 0 0 1\t-1 0 0 1\t0000000000000000000000000000000101110
wing\t0\t1 0 0 1\t0000000000000000000000000000000101110
wing\t1\t-1 0 0 1\t0000000000000000000000000000000101110
";
        assert_eq!(t.to_log(), golden);
    }

    #[test]
    fn tampered_relay_still_unveils_and_is_rejected_as_cheat() {
        // A ciphertext of the wrong length decrypts to garbage of that
        // length; the wing hands it over and the verifier flags it.
        let c = config(64);
        let g = standard_geometry(1.0).unwrap();
        let mut rng = seeded_rng(31);
        let mut pad = OneTimePad::from_rng(0, c.max_report_bits(), &mut rng);
        let tampered = Bits::random(40, &mut rng);
        let unveil = alice_unveil(&g, Wing::Q0, &tampered, &mut pad, 1.0).unwrap();
        let plaintext = unveil.payload.bits().unwrap();
        assert_eq!(plaintext.len(), 40);

        let mut t = run_honest(&c, false, 31).unwrap();
        t.wing_unveilings[0] = Some(WingUnveiling {
            payload: plaintext.clone(),
            reception: unveil.reception,
        });
        assert_eq!(verify(&t, &c).verdict, Verdict::RejectCheat);
    }

    #[test]
    fn hiding_bob_sees_identical_views_for_both_bits() {
        // Everything Bob observes before the unveiling must not depend on
        // the committed bit: same states, same detection report, same
        // message timings, same ciphertext lengths.
        let c = ProtocolConfig {
            n: 32,
            eta: 0.8,
            ..ProtocolConfig::default()
        };
        for seed in 0..50 {
            let t0 = run_honest(&c, false, seed).unwrap();
            let t1 = run_honest(&c, true, seed).unwrap();
            let pre = |t: &Transcript| {
                t.messages
                    .iter()
                    .filter(|m| m.kind() != MessageKind::Unveil)
                    .map(|m| {
                        (
                            m.kind(),
                            m.emission,
                            m.reception,
                            m.payload.bits().map(Bits::len),
                        )
                    })
                    .collect::<Vec<_>>()
            };
            assert_eq!(pre(&t0), pre(&t1));
            let detection = |t: &Transcript| {
                t.messages
                    .iter()
                    .find(|m| m.kind() == MessageKind::DetectionReport)
                    .and_then(|m| m.payload.bits().cloned())
            };
            assert_eq!(detection(&t0), detection(&t1));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn honest_completeness_at_zero_noise(
            n in 100u32..300,
            bit in any::<bool>(),
            seed in any::<u64>(),
            eta in 0.8..=1.0f64,
        ) {
            // rho = 0.05 keeps the conjugate-mismatch concentration bound
            // astronomically safe at these sample sizes, so acceptance is
            // deterministic in practice for any seed.
            let c = ProtocolConfig {
                n,
                eta,
                tau_accept: 0.0,
                rho_reject: 0.05,
                ..ProtocolConfig::default()
            };
            let t = run_honest(&c, bit, seed).unwrap();
            prop_assert_eq!(verify(&t, &c).verdict, Verdict::Accept(bit));
        }

        #[test]
        fn verifier_is_monotone_in_thresholds(
            seed in any::<u64>(),
            e in 0.0..0.2f64,
            tau in 0.0..0.4f64,
            bump in 0.0..0.09f64,
        ) {
            let base = ProtocolConfig {
                n: 128,
                e,
                tau_accept: tau,
                rho_reject: 0.45,
                ..ProtocolConfig::default()
            };
            prop_assume!(base.validate().is_ok());
            let t = run_honest(&base, false, seed).unwrap();

            // Raising tauAccept never flips accept into reject.
            let looser = ProtocolConfig { tau_accept: tau + bump, ..base.clone() };
            let before = verify(&t, &base);
            let after = verify(&t, &looser);
            if matches!(before.verdict, Verdict::Accept(_)) {
                prop_assert!(matches!(after.verdict, Verdict::Accept(_)));
            }

            // Raising rhoReject never flips the conjugate check from fail
            // to pass.
            let stricter = ProtocolConfig {
                rho_reject: 0.45 + 0.04,
                ..base.clone()
            };
            let loose_report = verify(&t, &base);
            let strict_report = verify(&t, &stricter);
            if strict_report.other_hypothesis_rejected {
                prop_assert!(loose_report.other_hypothesis_rejected);
            }
        }
    }
}
