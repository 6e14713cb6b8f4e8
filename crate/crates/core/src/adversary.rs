//! Catalog of cheating strategies for Alice and the harness measuring how
//! often they unveil bit 0 at wing 0 and bit 1 at wing 1 simultaneously.
//!
//! Every strategy measures each detected qubit at most once, at P, and
//! derives both wing declarations classically from that single record plus
//! per-wing private randomness. Wing 0's declarations never read wing 1's
//! randomness or rule, mirroring the cut the geometry enforces between the
//! two relay segments.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::analysis::{dec6, wilson_interval};
use crate::channels::{decode_outcomes, encode_outcomes, AgentId, Message, OneTimePad, Payload};
use crate::protocol::{
    bob_prepare, statistical_checks, BobPAgent, BobWingAgent, HonestAliceWing, ProtocolConfig,
    ProtocolError, Transcript, WingUnveiling,
};
use crate::qubits::{
    apply_noise, born_probability_zero, measure_projective, sample_detection, BB84State, Basis,
};
use crate::rng::{stream_rng, trial_seed, Stream};
use crate::sched::{Agent, Scheduler};
use crate::spacetime::{light_arrival, standard_geometry, Event, Geometry, Wing};

#[derive(Debug, Error, PartialEq)]
pub enum AdversaryError {
    #[error("projective angle must lie in [0°, 90°], got {0}")]
    AngleOutOfRange(f64),
    #[error("invalid strategy: {0}")]
    InvalidStrategy(&'static str),
    #[error("at least one trial is required")]
    NoTrials,
    #[error("sweep step {0}° must positively divide 90°")]
    BadSweepStep(f64),
}

#[derive(Debug, Error)]
pub enum AttackError {
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

/// The single quantum measurement a strategy performs at P.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasurementPlan {
    /// No measurement at all; only classical guessing downstream.
    Skip,
    /// One projective measurement per detected qubit at this angle on the
    /// X–Z circle.
    Angle(f64),
}

/// Classical declaration rule one wing applies to the measurement record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WingRule {
    /// Declare the recorded outcome.
    DeclareMeasured,
    /// Declare a fresh uniform bit from the wing's private randomness.
    DeclareUniform,
}

/// A cheating strategy: what to measure at P and what each wing declares.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttackStrategy {
    /// Measure nothing, declare uniform guesses on both wings.
    BlindGuess,
    /// Measure every qubit in one fixed BB84 basis and declare the
    /// outcomes on both wings.
    FixedBasis(Basis),
    /// Measure every qubit at an intermediate angle θ ∈ [0°, 90°] and
    /// declare the outcomes on both wings.
    ProjectiveAngle(f64),
    /// Fully split strategy: one declaration rule per wing over a shared
    /// measurement plan.
    PerWingPair {
        plan: MeasurementPlan,
        rules: [WingRule; 2],
    },
}

impl AttackStrategy {
    pub fn validate(&self) -> Result<(), AdversaryError> {
        match *self {
            AttackStrategy::BlindGuess | AttackStrategy::FixedBasis(_) => Ok(()),
            AttackStrategy::ProjectiveAngle(theta) => {
                if theta.is_finite() && (0.0..=90.0).contains(&theta) {
                    Ok(())
                } else {
                    Err(AdversaryError::AngleOutOfRange(theta))
                }
            }
            AttackStrategy::PerWingPair { plan, rules } => {
                if let MeasurementPlan::Angle(theta) = plan {
                    if !theta.is_finite() {
                        return Err(AdversaryError::AngleOutOfRange(theta));
                    }
                }
                let needs_record = rules.contains(&WingRule::DeclareMeasured);
                if needs_record && plan == MeasurementPlan::Skip {
                    // Declaring outcomes that were never produced would
                    // require a second look at the qubits.
                    return Err(AdversaryError::InvalidStrategy(
                        "a wing declares measured outcomes but the plan never measures",
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn plan(&self) -> MeasurementPlan {
        match *self {
            AttackStrategy::BlindGuess => MeasurementPlan::Skip,
            AttackStrategy::FixedBasis(basis) => MeasurementPlan::Angle(basis.angle_degrees()),
            AttackStrategy::ProjectiveAngle(theta) => MeasurementPlan::Angle(theta),
            AttackStrategy::PerWingPair { plan, .. } => plan,
        }
    }

    pub fn rule(&self, wing: Wing) -> WingRule {
        match *self {
            AttackStrategy::BlindGuess => WingRule::DeclareUniform,
            AttackStrategy::FixedBasis(_) | AttackStrategy::ProjectiveAngle(_) => {
                WingRule::DeclareMeasured
            }
            AttackStrategy::PerWingPair { rules, .. } => rules[wing.index()],
        }
    }

    pub fn theta(&self) -> Option<f64> {
        match self.plan() {
            MeasurementPlan::Skip => None,
            MeasurementPlan::Angle(theta) => Some(theta),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            AttackStrategy::BlindGuess => "blindGuess".to_string(),
            AttackStrategy::FixedBasis(basis) => format!("fixedBasis({})", basis.label()),
            AttackStrategy::ProjectiveAngle(theta) => format!("projectiveAngle({theta})"),
            AttackStrategy::PerWingPair { .. } => "perWingPair".to_string(),
        }
    }
}

/// Probability that the plan's measurement outcome equals the encoded bit
/// of `state`.
fn p_correct(state: BB84State, angle: f64) -> f64 {
    let p0 = born_probability_zero(state, angle);
    if state.bit {
        1.0 - p0
    } else {
        p0
    }
}

fn rule_success(rule: WingRule, plan: MeasurementPlan, state: BB84State) -> f64 {
    match rule {
        WingRule::DeclareUniform => 0.5,
        WingRule::DeclareMeasured => match plan {
            MeasurementPlan::Angle(theta) => p_correct(state, theta),
            MeasurementPlan::Skip => unreachable!("rejected at validation"),
        },
    }
}

/// The wing whose statistical check a preparation in `basis` constrains:
/// wing 0 claims bit 0 (Z), wing 1 claims bit 1 (X).
fn relevant_wing(basis: Basis) -> Wing {
    match basis {
        Basis::Z => Wing::Q0,
        Basis::X => Wing::Q1,
    }
}

/// Closed-form per-qubit dual success: the probability that the wing
/// constrained by a uniformly random BB84 state declares its encoded bit.
pub fn per_qubit_success_analytic(strategy: &AttackStrategy) -> Result<f64, AdversaryError> {
    strategy.validate()?;
    let plan = strategy.plan();
    let total: f64 = BB84State::ALL
        .iter()
        .map(|&state| rule_success(strategy.rule(relevant_wing(state.basis)), plan, state))
        .sum();
    Ok(total / 4.0)
}

/// Closed-form per-qubit marginal for one wing: a qubit passes the wing
/// unless it is relevant to it and the declaration misses.
pub fn per_wing_success_analytic(
    strategy: &AttackStrategy,
    wing: Wing,
) -> Result<f64, AdversaryError> {
    strategy.validate()?;
    let plan = strategy.plan();
    let total: f64 = BB84State::ALL
        .iter()
        .map(|&state| {
            if relevant_wing(state.basis) == wing {
                rule_success(strategy.rule(wing), plan, state)
            } else {
                1.0
            }
        })
        .sum();
    Ok(total / 4.0)
}

// ---------------------------------------------------------------------------
// Attack execution through the scheduler
// ---------------------------------------------------------------------------

struct CheatingAliceP {
    config: ProtocolConfig,
    geometry: Geometry,
    strategy: AttackStrategy,
    pads: [OneTimePad; 2],
    detect_rng: ChaCha8Rng,
    measure_rng: ChaCha8Rng,
    noise_rng: ChaCha8Rng,
    wing_rngs: [ChaCha8Rng; 2],
    detected: Option<Vec<bool>>,
    measured: Option<Vec<Option<bool>>>,
}

impl Agent for CheatingAliceP {
    fn id(&self) -> AgentId {
        AgentId::AliceP
    }

    fn on_message(&mut self, message: &Message, now: f64) -> Result<Vec<Message>, String> {
        let states = match &message.payload {
            Payload::QubitBatch(states) => states,
            other => return Err(format!("unexpected {:?} at cheating Alice", other.kind())),
        };
        let detected = sample_detection(states.len(), self.config.eta, &mut self.detect_rng)
            .map_err(|e| e.to_string())?;

        // The single measurement pass: one projective measurement per
        // detected qubit, then classical data only.
        let measured: Vec<Option<bool>> = match self.strategy.plan() {
            MeasurementPlan::Skip => vec![None; states.len()],
            MeasurementPlan::Angle(theta) => states
                .iter()
                .zip(&detected)
                .map(|(&state, &flag)| {
                    if flag {
                        let raw = measure_projective(state, theta, &mut self.measure_rng);
                        apply_noise(raw, self.config.e, &mut self.noise_rng).map(Some)
                    } else {
                        Ok(None)
                    }
                })
                .collect::<Result<_, _>>()
                .map_err(|e: crate::qubits::QubitError| e.to_string())?,
        };

        let emission = Event::new(0.0, 0.0, 0.0, now);
        let mut out = vec![Message {
            sender: AgentId::AliceP,
            receiver: AgentId::BobP,
            emission,
            reception: light_arrival(emission, self.geometry.bob_prep.position()),
            payload: Payload::DetectionReport(crate::channels::encode_detection(&detected)),
        }];
        for wing in Wing::BOTH {
            let rule = self.strategy.rule(wing);
            let rng = &mut self.wing_rngs[wing.index()];
            let declared: Vec<bool> = measured
                .iter()
                .zip(&detected)
                .filter(|(_, &flag)| flag)
                .map(|(&outcome, _)| match rule {
                    WingRule::DeclareMeasured => {
                        outcome.expect("measured outcome present for detected qubit")
                    }
                    WingRule::DeclareUniform => rng.random(),
                })
                .collect();
            let claimed_bit = wing.index() == 1;
            let report =
                encode_outcomes(claimed_bit, &declared, &detected).map_err(|e| e.to_string())?;
            let ciphertext = self.pads[wing.index()]
                .encrypt(&report)
                .map_err(|e| e.to_string())?;
            out.push(Message {
                sender: AgentId::AliceP,
                receiver: AgentId::AliceWing(wing),
                emission,
                reception: light_arrival(emission, self.geometry.q(wing).position()),
                payload: Payload::OutcomeRelay(ciphertext),
            });
        }
        self.detected = Some(detected);
        self.measured = Some(measured);
        Ok(out)
    }
}

/// Per-qubit tallies across one or more attack runs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PerQubitTally {
    pub detected: u64,
    /// Relevant-wing declaration equals the encoded bit.
    pub relevant_ok: u64,
    /// Qubits not failing wing w's constraint.
    pub wing_ok: [u64; 2],
}

impl PerQubitTally {
    fn merge(&mut self, other: &PerQubitTally) {
        self.detected += other.detected;
        self.relevant_ok += other.relevant_ok;
        self.wing_ok[0] += other.wing_ok[0];
        self.wing_ok[1] += other.wing_ok[1];
    }
}

/// One executed attack run.
#[derive(Debug, Clone)]
pub struct AttackRun {
    pub transcript: Transcript,
    /// Exact-consistency pass per wing: zero mismatches on the qubits
    /// prepared in the wing's claimed basis.
    pub strict_pass: [bool; 2],
    /// Pass under the configured verifier thresholds, including the
    /// minimum sample size and the conjugate rejection bound.
    pub threshold_pass: [bool; 2],
    pub per_qubit: PerQubitTally,
}

/// Run one full attack through the causality-enforcing scheduler: Bob
/// prepares honestly, cheating Alice measures once at P and relays
/// different reports to the two wings, and each wing is judged by the
/// verifier's statistical checks for its claimed bit.
pub fn execute_attack(
    strategy: &AttackStrategy,
    config: &ProtocolConfig,
    seed: u64,
) -> Result<AttackRun, AttackError> {
    strategy.validate()?;
    config.validate().map_err(ProtocolError::from)?;
    let geometry = standard_geometry(config.x).map_err(ProtocolError::from)?;

    let mut pad_rng = stream_rng(seed, Stream::Pads);
    let pad_len = config.max_report_bits();
    let pad0 = OneTimePad::from_rng(0, pad_len, &mut pad_rng);
    let pad1 = OneTimePad::from_rng(1, pad_len, &mut pad_rng);

    let mut prep_rng = stream_rng(seed, Stream::Preparation);
    let (mut records, batch) = bob_prepare(config, &geometry, &mut prep_rng)?;

    let mut alice = CheatingAliceP {
        config: config.clone(),
        geometry: geometry.clone(),
        strategy: *strategy,
        pads: [pad0.clone(), pad1.clone()],
        detect_rng: stream_rng(seed, Stream::Detection),
        measure_rng: stream_rng(seed, Stream::Measurement),
        noise_rng: stream_rng(seed, Stream::Noise),
        wing_rngs: [stream_rng(seed, Stream::Wing(0)), stream_rng(seed, Stream::Wing(1))],
        detected: None,
        measured: None,
    };
    let mut alice_w0 = HonestAliceWing {
        wing: Wing::Q0,
        geometry: geometry.clone(),
        pad: pad0,
        delay: 0.0,
    };
    let mut alice_w1 = HonestAliceWing {
        wing: Wing::Q1,
        geometry: geometry.clone(),
        pad: pad1,
        delay: 0.0,
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
    scheduler.schedule(batch).map_err(ProtocolError::from)?;
    let messages = scheduler
        .run(&mut [
            &mut alice,
            &mut alice_w0,
            &mut alice_w1,
            &mut bob_p,
            &mut bob_w0,
            &mut bob_w1,
        ])
        .map_err(ProtocolError::from)?;

    if let (Some(detected), Some(measured)) = (&alice.detected, &alice.measured) {
        for ((record, &flag), &outcome) in records.iter_mut().zip(detected).zip(measured) {
            record.detected = flag;
            record.outcome = outcome;
        }
    }

    let transcript = Transcript {
        config: config.clone(),
        geometry,
        qubit_records: records,
        committed_bit: None,
        wing_unveilings: [bob_w0.unveiling, bob_w1.unveiling],
        messages,
    };

    let mut strict_pass = [false; 2];
    let mut threshold_pass = [false; 2];
    let mut declared_by_wing: [Vec<Option<bool>>; 2] = [Vec::new(), Vec::new()];
    for wing in Wing::BOTH {
        let unveiling: &WingUnveiling = transcript.wing_unveilings[wing.index()]
            .as_ref()
            .expect("attack run produced both unveilings");
        let report = decode_outcomes(&unveiling.payload).map_err(ProtocolError::from)?;
        let stats = statistical_checks(&transcript.qubit_records, &report, config);
        strict_pass[wing.index()] = stats.mismatch_same == 0.0;
        threshold_pass[wing.index()] =
            stats.sufficient(config) && stats.statistical_ok && stats.other_rejected;
        let mut by_index = vec![None; transcript.qubit_records.len()];
        for (index, outcome) in report.declared() {
            by_index[index] = Some(outcome);
        }
        declared_by_wing[wing.index()] = by_index;
    }

    let mut per_qubit = PerQubitTally::default();
    for record in &transcript.qubit_records {
        if !record.detected {
            continue;
        }
        per_qubit.detected += 1;
        let relevant = relevant_wing(record.prepared.basis);
        let declared = declared_by_wing[relevant.index()][record.index as usize]
            .expect("detected qubit has a declaration");
        let ok = declared == record.prepared.bit;
        per_qubit.relevant_ok += ok as u64;
        for wing in Wing::BOTH {
            let fails_wing = wing == relevant && !ok;
            per_qubit.wing_ok[wing.index()] += (!fails_wing) as u64;
        }
    }

    Ok(AttackRun {
        transcript,
        strict_pass,
        threshold_pass,
        per_qubit,
    })
}

/// Monte Carlo estimate of a strategy's success statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackReport {
    pub strategy: String,
    pub theta: Option<f64>,
    pub n: u32,
    pub trials: u64,
    /// Runs in which both wings passed exact same-basis consistency.
    pub successes: u64,
    pub success_rate: f64,
    pub wilson: (f64, f64),
    /// Per-qubit marginal success of each wing.
    pub p0_hat: f64,
    pub p1_hat: f64,
    /// p0_hat + p1_hat − 1; per qubit exactly one wing is constrained, so
    /// this equals the per-qubit dual success rate.
    pub delta_hat: f64,
    /// Per-qubit dual success rate.
    pub per_qubit_rate: f64,
    /// Runs in which both wings also passed the configured verifier
    /// thresholds (the realistic, easier game).
    pub threshold_successes: u64,
    pub threshold_rate: f64,
}

impl AttackReport {
    pub const CSV_HEADER: &'static str =
        "strategy,theta,N,trials,successes,rate,lo,hi,p0Hat,p1Hat,deltaHat";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.strategy,
            self.theta.map_or_else(|| "-".to_string(), dec6),
            self.n,
            self.trials,
            self.successes,
            dec6(self.success_rate),
            dec6(self.wilson.0),
            dec6(self.wilson.1),
            dec6(self.p0_hat),
            dec6(self.p1_hat),
            dec6(self.delta_hat),
        )
    }
}

#[derive(Default, Clone, Copy)]
struct TrialTally {
    successes: u64,
    threshold_successes: u64,
    per_qubit: PerQubitTally,
}

fn run_trials(
    strategy: &AttackStrategy,
    config: &ProtocolConfig,
    base_seed: u64,
    range: std::ops::Range<u64>,
) -> Result<TrialTally, AttackError> {
    let mut tally = TrialTally::default();
    for trial in range {
        let run = execute_attack(strategy, config, trial_seed(base_seed, trial))?;
        run.transcript
            .audit_causality()
            .map_err(ProtocolError::from)?;
        tally.successes += (run.strict_pass[0] && run.strict_pass[1]) as u64;
        tally.threshold_successes += (run.threshold_pass[0] && run.threshold_pass[1]) as u64;
        tally.per_qubit.merge(&run.per_qubit);
    }
    Ok(tally)
}

fn report_from_tally(
    strategy: &AttackStrategy,
    config: &ProtocolConfig,
    trials: u64,
    tally: TrialTally,
) -> AttackReport {
    let rate = tally.successes as f64 / trials as f64;
    let detected = tally.per_qubit.detected.max(1) as f64;
    let p0 = tally.per_qubit.wing_ok[0] as f64 / detected;
    let p1 = tally.per_qubit.wing_ok[1] as f64 / detected;
    AttackReport {
        strategy: strategy.label(),
        theta: strategy.theta(),
        n: config.n,
        trials,
        successes: tally.successes,
        success_rate: rate,
        wilson: wilson_interval(tally.successes, trials, 1.96),
        p0_hat: p0,
        p1_hat: p1,
        delta_hat: p0 + p1 - 1.0,
        per_qubit_rate: tally.per_qubit.relevant_ok as f64 / detected,
        threshold_successes: tally.threshold_successes,
        threshold_rate: tally.threshold_successes as f64 / trials as f64,
    }
}

/// Run `trials` independent attacks and report dual-unveiling success with
/// a Wilson 95% interval, per-wing per-qubit marginals, and the realistic
/// threshold-game rate.
pub fn estimate_success(
    strategy: &AttackStrategy,
    config: &ProtocolConfig,
    trials: u64,
    seed: u64,
) -> Result<AttackReport, AttackError> {
    if trials == 0 {
        return Err(AdversaryError::NoTrials.into());
    }
    let tally = run_trials(strategy, config, seed, 0..trials)?;
    Ok(report_from_tally(strategy, config, trials, tally))
}

/// `estimate_success` fanned over a worker pool. Per-trial seeds derive
/// from the global trial index and partial tallies are summed, so the
/// report is identical to the sequential one regardless of `jobs`.
pub fn estimate_success_parallel(
    strategy: &AttackStrategy,
    config: &ProtocolConfig,
    trials: u64,
    seed: u64,
    jobs: usize,
) -> Result<AttackReport, AttackError> {
    if trials == 0 {
        return Err(AdversaryError::NoTrials.into());
    }
    let jobs = jobs.clamp(1, 128).min(trials as usize);
    if jobs == 1 {
        return estimate_success(strategy, config, trials, seed);
    }
    let chunk = trials.div_ceil(jobs as u64);
    let results: Vec<Result<TrialTally, AttackError>> = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for worker in 0..jobs as u64 {
            let start = worker * chunk;
            let end = (start + chunk).min(trials);
            handles.push(scope.spawn(move || run_trials(strategy, config, seed, start..end)));
        }
        handles
            .into_iter()
            .map(|h| h.join().expect("attack worker panicked"))
            .collect()
    });
    let mut tally = TrialTally::default();
    for partial in results {
        let partial = partial?;
        tally.successes += partial.successes;
        tally.threshold_successes += partial.threshold_successes;
        tally.per_qubit.merge(&partial.per_qubit);
    }
    Ok(report_from_tally(strategy, config, trials, tally))
}

/// Per-qubit Monte Carlo of the strict game: one random BB84 state per
/// trial, one measurement per the plan, both wing declarations, and the
/// relevant-wing comparison. Independent of the full run machinery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerQubitEstimate {
    pub trials: u64,
    pub dual_rate: f64,
    pub p0: f64,
    pub p1: f64,
}

pub fn per_qubit_monte_carlo(
    strategy: &AttackStrategy,
    trials: u64,
    seed: u64,
) -> Result<PerQubitEstimate, AdversaryError> {
    strategy.validate()?;
    if trials == 0 {
        return Err(AdversaryError::NoTrials);
    }
    let mut state_rng = stream_rng(seed, Stream::Preparation);
    let mut meas_rng = stream_rng(seed, Stream::Measurement);
    let mut wing_rngs = [stream_rng(seed, Stream::Wing(0)), stream_rng(seed, Stream::Wing(1))];
    let plan = strategy.plan();
    let mut relevant_ok = 0u64;
    let mut wing_ok = [0u64; 2];
    for _ in 0..trials {
        let state = BB84State::ALL[state_rng.random_range(0..4)];
        let measured = match plan {
            MeasurementPlan::Skip => None,
            MeasurementPlan::Angle(theta) => Some(measure_projective(state, theta, &mut meas_rng)),
        };
        let relevant = relevant_wing(state.basis);
        let declared = match strategy.rule(relevant) {
            WingRule::DeclareMeasured => measured.expect("plan measures"),
            WingRule::DeclareUniform => wing_rngs[relevant.index()].random(),
        };
        let ok = declared == state.bit;
        relevant_ok += ok as u64;
        for wing in Wing::BOTH {
            let fails = wing == relevant && !ok;
            wing_ok[wing.index()] += (!fails) as u64;
        }
    }
    Ok(PerQubitEstimate {
        trials,
        dual_rate: relevant_ok as f64 / trials as f64,
        p0: wing_ok[0] as f64 / trials as f64,
        p1: wing_ok[1] as f64 / trials as f64,
    })
}

/// One row of a projective-angle sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub theta: f64,
    pub per_qubit_analytic: f64,
    pub per_qubit_mc: f64,
    pub dual_rate_mc: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub points: Vec<SweepPoint>,
    /// Angle maximizing the analytic per-qubit success on the grid.
    pub maximizer_theta: f64,
    pub maximizer_value: f64,
}

impl Sweep {
    pub const CSV_HEADER: &'static str = "theta,perQubitAnalytic,perQubitMC,dualRateMC";

    pub fn csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{}\n",
                dec6(p.theta),
                dec6(p.per_qubit_analytic),
                dec6(p.per_qubit_mc),
                dec6(p.dual_rate_mc),
            ));
        }
        out
    }
}

/// Sweep single-angle projective strategies over [0°, 90°] on a grid.
/// Per-qubit success is computed both in closed form and by Monte Carlo;
/// the dual-unveiling rate comes from full runs at the configured N. The
/// reported maximizer uses the analytic column, which resolves the flat
/// optimum that Monte Carlo noise cannot.
pub fn sweep_projective_angle(
    step_degrees: f64,
    config: &ProtocolConfig,
    trials_per_point: u64,
    seed: u64,
) -> Result<Sweep, AttackError> {
    sweep_projective_angle_parallel(step_degrees, config, trials_per_point, seed, 1)
}

fn sweep_point(
    j: u64,
    step_degrees: f64,
    config: &ProtocolConfig,
    trials_per_point: u64,
    seed: u64,
) -> Result<SweepPoint, AttackError> {
    let theta = (j as f64 * step_degrees).min(90.0);
    let strategy = AttackStrategy::ProjectiveAngle(theta);
    let analytic = per_qubit_success_analytic(&strategy)?;
    let point_seed = trial_seed(seed, j);
    let mc = per_qubit_monte_carlo(&strategy, trials_per_point, point_seed)?;
    let full = estimate_success(&strategy, config, trials_per_point, point_seed)?;
    Ok(SweepPoint {
        theta,
        per_qubit_analytic: analytic,
        per_qubit_mc: mc.dual_rate,
        dual_rate_mc: full.success_rate,
    })
}

/// `sweep_projective_angle` fanned over a worker pool. Grid points carry
/// index-derived seeds, so the table is identical for any `jobs`.
pub fn sweep_projective_angle_parallel(
    step_degrees: f64,
    config: &ProtocolConfig,
    trials_per_point: u64,
    seed: u64,
    jobs: usize,
) -> Result<Sweep, AttackError> {
    if !(step_degrees.is_finite() && step_degrees > 0.0 && step_degrees <= 90.0) {
        return Err(AdversaryError::BadSweepStep(step_degrees).into());
    }
    let steps = (90.0 / step_degrees).round();
    if (steps * step_degrees - 90.0).abs() > 1e-9 {
        return Err(AdversaryError::BadSweepStep(step_degrees).into());
    }
    if trials_per_point == 0 {
        return Err(AdversaryError::NoTrials.into());
    }
    let count = steps as u64 + 1;
    let jobs = jobs.clamp(1, 128).min(count as usize);
    let mut points: Vec<SweepPoint>;
    if jobs == 1 {
        points = Vec::with_capacity(count as usize);
        for j in 0..count {
            points.push(sweep_point(j, step_degrees, config, trials_per_point, seed)?);
        }
    } else {
        let chunk = count.div_ceil(jobs as u64);
        let results: Vec<Result<Vec<SweepPoint>, AttackError>> = std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for worker in 0..jobs as u64 {
                let start = worker * chunk;
                let end = (start + chunk).min(count);
                handles.push(scope.spawn(move || {
                    (start..end)
                        .map(|j| sweep_point(j, step_degrees, config, trials_per_point, seed))
                        .collect()
                }));
            }
            handles
                .into_iter()
                .map(|h| h.join().expect("sweep worker panicked"))
                .collect()
        });
        points = Vec::with_capacity(count as usize);
        for part in results {
            points.extend(part?);
        }
    }
    let best = points
        .iter()
        .cloned()
        .reduce(|a, b| if b.per_qubit_analytic > a.per_qubit_analytic { b } else { a })
        .expect("sweep has at least one point");
    Ok(Sweep {
        points,
        maximizer_theta: best.theta,
        maximizer_value: best.per_qubit_analytic,
    })
}
