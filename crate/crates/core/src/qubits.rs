//! BB84 state preparation and Born-rule projective measurement.
//!
//! All protocol states and every relevant projective measurement live on
//! the X–Z great circle of the Bloch sphere, so states are represented by
//! their angle on that circle instead of amplitude vectors: |0⟩ = 0°,
//! |+⟩ = 90°, |1⟩ = 180°, |−⟩ = 270°. A projective measurement at angle θ
//! yields outcome 0 with probability (1 + cos(α − θ))/2 for a state at
//! angle α.

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum QubitError {
    #[error("at least one qubit is required")]
    EmptyBatch,
    #[error("noise rate must lie in [0, 0.5), got {0}")]
    NoiseOutOfRange(f64),
    #[error("detection efficiency must lie in (0, 1], got {0}")]
    EfficiencyOutOfRange(f64),
}

/// Measurement/preparation basis: Z = {|0⟩, |1⟩}, X = {|+⟩, |−⟩}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    pub fn conjugate(self) -> Basis {
        match self {
            Basis::Z => Basis::X,
            Basis::X => Basis::Z,
        }
    }

    /// Bloch angle of this basis's bit-0 eigenstate, in degrees.
    pub fn angle_degrees(self) -> f64 {
        match self {
            Basis::Z => 0.0,
            Basis::X => 90.0,
        }
    }

    /// Honest measurement basis encoding a commitment bit: Z for 0, X for 1.
    pub fn for_commitment(bit: bool) -> Basis {
        if bit {
            Basis::X
        } else {
            Basis::Z
        }
    }

    pub fn label(self) -> char {
        match self {
            Basis::Z => 'Z',
            Basis::X => 'X',
        }
    }
}

/// One of the four BB84 states, identified by basis and encoded bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BB84State {
    pub basis: Basis,
    pub bit: bool,
}

impl BB84State {
    pub const ALL: [BB84State; 4] = [
        BB84State { basis: Basis::Z, bit: false },
        BB84State { basis: Basis::Z, bit: true },
        BB84State { basis: Basis::X, bit: false },
        BB84State { basis: Basis::X, bit: true },
    ];

    pub fn new(basis: Basis, bit: bool) -> Self {
        BB84State { basis, bit }
    }

    /// Angle on the X–Z great circle: |0⟩ = 0°, |+⟩ = 90°, |1⟩ = 180°,
    /// |−⟩ = 270°.
    pub fn bloch_angle_degrees(self) -> f64 {
        self.basis.angle_degrees() + if self.bit { 180.0 } else { 0.0 }
    }
}

/// Bob's per-qubit record of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitRecord {
    pub index: u32,
    pub prepared: BB84State,
    pub detected: bool,
    /// Alice's declared measurement outcome; present only when detected.
    pub outcome: Option<bool>,
}

impl QubitRecord {
    pub fn prepared_only(index: u32, prepared: BB84State) -> Self {
        QubitRecord {
            index,
            prepared,
            detected: false,
            outcome: None,
        }
    }
}

/// Probability that a projective measurement at `angle_degrees` on `state`
/// yields outcome 0.
pub fn born_probability_zero(state: BB84State, angle_degrees: f64) -> f64 {
    let delta = (state.bloch_angle_degrees() - angle_degrees).to_radians();
    (1.0 + delta.cos()) / 2.0
}

/// Draw `n` independent uniform BB84 states.
pub fn random_bb84<R: Rng>(n: usize, rng: &mut R) -> Result<Vec<BB84State>, QubitError> {
    if n == 0 {
        return Err(QubitError::EmptyBatch);
    }
    Ok((0..n)
        .map(|_| BB84State::ALL[rng.random_range(0..4)])
        .collect())
}

/// Projective measurement at an arbitrary angle on the X–Z circle.
///
/// Returns the outcome bit: `false` (outcome 0, projection onto the state
/// at the measurement angle) with the Born probability, `true` otherwise.
/// Honest Z measurement is angle 0° and honest X is 90°, in which case the
/// outcome bit equals the encoded bit for same-basis states.
pub fn measure_projective<R: Rng>(state: BB84State, angle_degrees: f64, rng: &mut R) -> bool {
    let p0 = born_probability_zero(state, angle_degrees);
    rng.random::<f64>() >= p0
}

/// Flip an outcome with probability `e`; models aggregate preparation,
/// channel and measurement error as one classical bit-flip rate.
pub fn apply_noise<R: Rng>(outcome: bool, e: f64, rng: &mut R) -> Result<bool, QubitError> {
    if !(e.is_finite() && (0.0..0.5).contains(&e)) {
        return Err(QubitError::NoiseOutOfRange(e));
    }
    if e > 0.0 && rng.random::<f64>() < e {
        Ok(!outcome)
    } else {
        Ok(outcome)
    }
}

/// Independent Bernoulli(eta) detection flags for `n` transmitted qubits.
pub fn sample_detection<R: Rng>(n: usize, eta: f64, rng: &mut R) -> Result<Vec<bool>, QubitError> {
    if !(eta.is_finite() && eta > 0.0 && eta <= 1.0) {
        return Err(QubitError::EfficiencyOutOfRange(eta));
    }
    Ok((0..n).map(|_| rng.random::<f64>() < eta).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;

    #[test]
    fn bloch_angles_follow_the_fixed_table() {
        assert_eq!(BB84State::new(Basis::Z, false).bloch_angle_degrees(), 0.0);
        assert_eq!(BB84State::new(Basis::X, false).bloch_angle_degrees(), 90.0);
        assert_eq!(BB84State::new(Basis::Z, true).bloch_angle_degrees(), 180.0);
        assert_eq!(BB84State::new(Basis::X, true).bloch_angle_degrees(), 270.0);
    }

    #[test]
    fn conjugate_swaps_bases() {
        assert_eq!(Basis::Z.conjugate(), Basis::X);
        assert_eq!(Basis::X.conjugate(), Basis::Z);
    }

    #[test]
    fn random_bb84_rejects_empty_batch() {
        let mut rng = seeded_rng(1);
        assert_eq!(random_bb84(0, &mut rng), Err(QubitError::EmptyBatch));
    }

    #[test]
    fn random_bb84_single_draw_is_a_bb84_state() {
        let mut rng = seeded_rng(2);
        let states = random_bb84(1, &mut rng).unwrap();
        assert!(BB84State::ALL.contains(&states[0]));
    }

    #[test]
    fn random_bb84_is_deterministic_for_a_seed() {
        let mut a = seeded_rng(99);
        let mut b = seeded_rng(99);
        assert_eq!(
            random_bb84(1000, &mut a).unwrap(),
            random_bb84(1000, &mut b).unwrap()
        );
    }

    #[test]
    fn random_bb84_is_close_to_uniform() {
        let n = 400_000;
        let mut rng = seeded_rng(3);
        let states = random_bb84(n, &mut rng).unwrap();
        for s in BB84State::ALL {
            let freq = states.iter().filter(|&&q| q == s).count() as f64 / n as f64;
            assert!((freq - 0.25).abs() < 0.005, "state {s:?} frequency {freq}");
        }
    }

    #[test]
    fn eigenstate_measurement_is_deterministic() {
        let mut rng = seeded_rng(4);
        for s in BB84State::ALL {
            let angle = s.basis.angle_degrees();
            for _ in 0..200 {
                assert_eq!(measure_projective(s, angle, &mut rng), s.bit);
            }
        }
    }

    #[test]
    fn conjugate_basis_measurement_is_a_coin_flip() {
        let mut rng = seeded_rng(5);
        let plus = BB84State::new(Basis::X, false);
        let trials = 10_000;
        let zeros = (0..trials)
            .filter(|_| !measure_projective(plus, 0.0, &mut rng))
            .count();
        let freq = zeros as f64 / trials as f64;
        assert!((freq - 0.5).abs() < 0.01, "frequency {freq}");
    }

    #[test]
    fn intermediate_angle_follows_the_born_rule() {
        let mut rng = seeded_rng(6);
        let zero = BB84State::new(Basis::Z, false);
        let trials = 10_000;
        let zeros = (0..trials)
            .filter(|_| !measure_projective(zero, 45.0, &mut rng))
            .count();
        let freq = zeros as f64 / trials as f64;
        let want = (std::f64::consts::FRAC_PI_8).cos().powi(2);
        assert!((freq - want).abs() < 0.01, "frequency {freq}, want {want}");
    }

    #[test]
    fn born_statistics_hold_on_a_15_degree_grid() {
        let trials = 100_000;
        let mut rng = seeded_rng(7);
        for s in BB84State::ALL {
            for step in 0..24 {
                let angle = 15.0 * step as f64;
                let p = born_probability_zero(s, angle);
                let zeros = (0..trials)
                    .filter(|_| !measure_projective(s, angle, &mut rng))
                    .count();
                let freq = zeros as f64 / trials as f64;
                let sigma = (p * (1.0 - p) / trials as f64).sqrt();
                assert!(
                    (freq - p).abs() <= 3.0 * sigma + 1e-9,
                    "state {s:?} angle {angle}: freq {freq}, born {p}"
                );
            }
        }
    }

    #[test]
    fn conjugate_outcomes_are_uncorrelated_with_encoded_bits() {
        let trials = 100_000;
        let mut state_rng = seeded_rng(8);
        let mut meas_rng = seeded_rng(9);
        let mut xy = 0.0;
        let mut xs = 0.0;
        let mut ys = 0.0;
        let mut xx = 0.0;
        let mut yy = 0.0;
        for _ in 0..trials {
            let bit = state_rng.random::<bool>();
            let state = BB84State::new(Basis::X, bit);
            // Conjugate (Z) measurement of an X eigenstate.
            let out = measure_projective(state, 0.0, &mut meas_rng);
            let x = bit as u8 as f64;
            let y = out as u8 as f64;
            xy += x * y;
            xs += x;
            ys += y;
            xx += x * x;
            yy += y * y;
        }
        let n = trials as f64;
        let cov = xy / n - (xs / n) * (ys / n);
        let vx = xx / n - (xs / n).powi(2);
        let vy = yy / n - (ys / n).powi(2);
        let r = cov / (vx * vy).sqrt();
        assert!(r.abs() < 0.02, "correlation {r}");
    }

    #[test]
    fn noise_zero_is_identity() {
        let mut rng = seeded_rng(10);
        for _ in 0..100 {
            assert!(!apply_noise(false, 0.0, &mut rng).unwrap());
            assert!(apply_noise(true, 0.0, &mut rng).unwrap());
        }
    }

    #[test]
    fn noise_flips_at_the_configured_rate() {
        let mut rng = seeded_rng(11);
        let trials = 100_000;
        let flips = (0..trials)
            .filter(|_| apply_noise(false, 0.05, &mut rng).unwrap())
            .count();
        let freq = flips as f64 / trials as f64;
        assert!((freq - 0.05).abs() < 0.005, "flip frequency {freq}");
    }

    #[test]
    fn noise_range_boundary() {
        let mut rng = seeded_rng(12);
        assert!(apply_noise(false, 0.49, &mut rng).is_ok());
        assert_eq!(
            apply_noise(false, 0.5, &mut rng),
            Err(QubitError::NoiseOutOfRange(0.5))
        );
        assert!(apply_noise(false, -0.01, &mut rng).is_err());
        assert!(apply_noise(false, f64::NAN, &mut rng).is_err());
    }

    #[test]
    fn full_efficiency_detects_everything() {
        let mut rng = seeded_rng(13);
        assert!(sample_detection(1000, 1.0, &mut rng)
            .unwrap()
            .iter()
            .all(|&d| d));
    }

    #[test]
    fn detection_rate_matches_eta() {
        let mut rng = seeded_rng(14);
        let flags = sample_detection(100_000, 0.3, &mut rng).unwrap();
        let freq = flags.iter().filter(|&&d| d).count() as f64 / flags.len() as f64;
        assert!((freq - 0.3).abs() < 0.01, "detected fraction {freq}");
    }

    #[test]
    fn detection_is_reproducible_and_validates_eta() {
        let mut a = seeded_rng(15);
        let mut b = seeded_rng(15);
        assert_eq!(
            sample_detection(10, 0.3, &mut a).unwrap(),
            sample_detection(10, 0.3, &mut b).unwrap()
        );
        assert_eq!(
            sample_detection(10, 0.0, &mut a),
            Err(QubitError::EfficiencyOutOfRange(0.0))
        );
        assert!(sample_detection(10, 1.1, &mut a).is_err());
    }
}
