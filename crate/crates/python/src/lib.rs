//! Python bindings: the simulator's main types and operations exposed as
//! plain functions over tuples and dicts.
//!
//! Spacetime events are 4-tuples `(x, y, z, t)`; reports come back as
//! dicts. Build with `cargo build -p relbc-python` and import the
//! resulting `librelbc.so` as module `relbc` (see `python/smoke_test.py`).

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use relbc_core::adversary::{
    estimate_success_parallel, per_qubit_monte_carlo, per_qubit_success_analytic,
    sweep_projective_angle_parallel, AttackStrategy,
};
use relbc_core::analysis;
use relbc_core::protocol::{run_honest, verify, ProtocolConfig, Verdict};
use relbc_core::qubits::Basis;
use relbc_core::spacetime::{self, Event, LabOffset, LabOffsets, Wing};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn event(t: (f64, f64, f64, f64)) -> Event {
    Event::new(t.0, t.1, t.2, t.3)
}

fn event_tuple(e: Event) -> (f64, f64, f64, f64) {
    (e.x, e.y, e.z, e.t)
}

/// Squared Minkowski interval between two events, signature (+,−,−,−).
#[pyfunction]
fn interval_squared(a: (f64, f64, f64, f64), b: (f64, f64, f64, f64)) -> f64 {
    spacetime::interval_squared(event(a), event(b))
}

/// Closed-future-light-cone causal order; light-speed delivery counts.
#[pyfunction]
fn causally_precedes(a: (f64, f64, f64, f64), b: (f64, f64, f64, f64)) -> bool {
    spacetime::causally_precedes(event(a), event(b))
}

/// Boost an event along x with the given rapidity.
#[pyfunction]
fn boost_x(e: (f64, f64, f64, f64), rapidity: f64) -> (f64, f64, f64, f64) {
    event_tuple(spacetime::boost_x(event(e), rapidity))
}

fn geometry_dict<'py>(
    py: Python<'py>,
    g: &spacetime::Geometry,
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("x", g.x)?;
    d.set_item("p", event_tuple(g.p))?;
    d.set_item("q0", event_tuple(g.q0))?;
    d.set_item("q1", event_tuple(g.q1))?;
    d.set_item("bob_prep", event_tuple(g.bob_prep))?;
    d.set_item("bob_q0", event_tuple(g.bob_wing(Wing::Q0)))?;
    d.set_item("bob_q1", event_tuple(g.bob_wing(Wing::Q1)))?;
    Ok(d)
}

/// Ideal protocol layout: P at the origin, wings at (±x, 0, 0, x).
#[pyfunction]
fn standard_geometry(py: Python<'_>, x: f64) -> PyResult<Bound<'_, PyDict>> {
    let g = spacetime::standard_geometry(x).map_err(value_err)?;
    geometry_dict(py, &g)
}

fn offset_from_tuple(t: Option<(f64, f64, f64, f64)>) -> LabOffset {
    match t {
        Some((dx, dy, dz, delay)) => LabOffset::new([dx, dy, dz], delay),
        None => LabOffset::none(),
    }
}

/// Non-ideal layout with Bob's labs displaced by (dx, dy, dz, delay)
/// offsets; offsets breaking the causal ordering are rejected.
#[pyfunction]
#[pyo3(signature = (x, offset_p=None, offset_q0=None, offset_q1=None))]
fn offset_geometry<'py>(
    py: Python<'py>,
    x: f64,
    offset_p: Option<(f64, f64, f64, f64)>,
    offset_q0: Option<(f64, f64, f64, f64)>,
    offset_q1: Option<(f64, f64, f64, f64)>,
) -> PyResult<Bound<'py, PyDict>> {
    let offsets = LabOffsets {
        prep: offset_from_tuple(offset_p),
        wings: [offset_from_tuple(offset_q0), offset_from_tuple(offset_q1)],
    };
    let g = spacetime::offset_geometry(x, offsets).map_err(value_err)?;
    geometry_dict(py, &g)
}

/// Latest time on the static worldline at `position` from which both
/// reception events are still causally reachable.
#[pyfunction]
fn latest_binding_time(
    q0b: (f64, f64, f64, f64),
    q1b: (f64, f64, f64, f64),
    position: (f64, f64, f64),
) -> PyResult<f64> {
    spacetime::latest_binding_time(event(q0b), event(q1b), [position.0, position.1, position.2])
        .map_err(value_err)
}

#[allow(clippy::too_many_arguments)]
fn build_config(
    n: u32,
    x: f64,
    e: f64,
    eta: f64,
    tau_accept: f64,
    rho_reject: f64,
    timing_tolerance: f64,
    min_same_basis_count: u32,
) -> PyResult<ProtocolConfig> {
    let config = ProtocolConfig {
        n,
        x,
        e,
        eta,
        tau_accept,
        rho_reject,
        timing_tolerance,
        min_same_basis_count,
    };
    config.validate().map_err(value_err)?;
    Ok(config)
}

/// One honest end-to-end run plus Bob's verification report.
#[pyfunction]
#[pyo3(signature = (bit, n=100, seed=0xB1C0FFEE, x=1.0, e=0.0, eta=1.0,
                    tau_accept=0.15, rho_reject=0.3, timing_tolerance=0.0,
                    min_same_basis_count=16))]
#[allow(clippy::too_many_arguments)]
fn honest_run<'py>(
    py: Python<'py>,
    bit: u8,
    n: u32,
    seed: u64,
    x: f64,
    e: f64,
    eta: f64,
    tau_accept: f64,
    rho_reject: f64,
    timing_tolerance: f64,
    min_same_basis_count: u32,
) -> PyResult<Bound<'py, PyDict>> {
    if bit > 1 {
        return Err(value_err("bit must be 0 or 1"));
    }
    let config = build_config(
        n,
        x,
        e,
        eta,
        tau_accept,
        rho_reject,
        timing_tolerance,
        min_same_basis_count,
    )?;
    let transcript = run_honest(&config, bit == 1, seed).map_err(value_err)?;
    transcript.audit_causality().map_err(value_err)?;
    let report = verify(&transcript, &config);

    let d = PyDict::new(py);
    d.set_item("verdict", report.verdict.to_string())?;
    d.set_item(
        "accepted_bit",
        match report.verdict {
            Verdict::Accept(b) => Some(b as u8),
            _ => None,
        },
    )?;
    d.set_item("timing_ok", report.timing_ok)?;
    d.set_item("wings_equal", report.wings_equal)?;
    d.set_item("claimed_bits_equal", report.claimed_bits_equal)?;
    d.set_item("statistical_ok_for_claim", report.statistical_ok_for_claim)?;
    d.set_item("other_hypothesis_rejected", report.other_hypothesis_rejected)?;
    d.set_item("mismatch_same", report.mismatch_same)?;
    d.set_item("mismatch_conj", report.mismatch_conj)?;
    d.set_item("same_basis_count", report.same_basis_count)?;
    d.set_item("conjugate_count", report.conjugate_count)?;
    d.set_item("comparison_event", report.comparison_event.map(event_tuple))?;
    d.set_item("messages", transcript.messages.len())?;
    Ok(d)
}

/// The transcript of one honest run as the line-delimited text log.
#[pyfunction]
#[pyo3(signature = (bit, n=100, seed=0xB1C0FFEE, x=1.0, e=0.0, eta=1.0))]
fn honest_transcript_log(
    bit: u8,
    n: u32,
    seed: u64,
    x: f64,
    e: f64,
    eta: f64,
) -> PyResult<String> {
    if bit > 1 {
        return Err(value_err("bit must be 0 or 1"));
    }
    let config = ProtocolConfig {
        n,
        x,
        e,
        eta,
        ..ProtocolConfig::default()
    };
    config.validate().map_err(value_err)?;
    let transcript = run_honest(&config, bit == 1, seed).map_err(value_err)?;
    Ok(transcript.to_log())
}

fn parse_strategy(name: &str, theta: Option<f64>) -> PyResult<AttackStrategy> {
    match name {
        "blind" => Ok(AttackStrategy::BlindGuess),
        "fixed-z" => Ok(AttackStrategy::FixedBasis(Basis::Z)),
        "fixed-x" => Ok(AttackStrategy::FixedBasis(Basis::X)),
        "projective" => {
            let theta = theta.ok_or_else(|| value_err("projective strategy needs theta"))?;
            Ok(AttackStrategy::ProjectiveAngle(theta))
        }
        other => Err(value_err(format!(
            "unknown strategy {other:?}; expected blind, fixed-z, fixed-x or projective"
        ))),
    }
}

/// Monte Carlo estimate of a cheating strategy's dual-unveiling success.
/// Defaults judge the strict game (tau = 0, e = 0, eta = 1).
#[pyfunction]
#[pyo3(signature = (strategy, n, trials=10_000, seed=0xB1C0FFEE, theta=None,
                    e=0.0, eta=1.0, tau_accept=0.0, rho_reject=0.3, jobs=1))]
#[allow(clippy::too_many_arguments)]
fn estimate_attack<'py>(
    py: Python<'py>,
    strategy: &str,
    n: u32,
    trials: u64,
    seed: u64,
    theta: Option<f64>,
    e: f64,
    eta: f64,
    tau_accept: f64,
    rho_reject: f64,
    jobs: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let strategy = parse_strategy(strategy, theta)?;
    let config = build_config(n, 1.0, e, eta, tau_accept, rho_reject, 0.0, 16)?;
    let report =
        estimate_success_parallel(&strategy, &config, trials, seed, jobs).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("strategy", &report.strategy)?;
    d.set_item("theta", report.theta)?;
    d.set_item("n", report.n)?;
    d.set_item("trials", report.trials)?;
    d.set_item("successes", report.successes)?;
    d.set_item("success_rate", report.success_rate)?;
    d.set_item("wilson", report.wilson)?;
    d.set_item("p0_hat", report.p0_hat)?;
    d.set_item("p1_hat", report.p1_hat)?;
    d.set_item("delta_hat", report.delta_hat)?;
    d.set_item("per_qubit_rate", report.per_qubit_rate)?;
    d.set_item("threshold_rate", report.threshold_rate)?;
    d.set_item("csv", report.csv_row())?;
    Ok(d)
}

/// Per-qubit strict-game Monte Carlo for one strategy.
#[pyfunction]
#[pyo3(signature = (strategy, trials=100_000, seed=0xB1C0FFEE, theta=None))]
fn per_qubit_attack<'py>(
    py: Python<'py>,
    strategy: &str,
    trials: u64,
    seed: u64,
    theta: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let strategy = parse_strategy(strategy, theta)?;
    let est = per_qubit_monte_carlo(&strategy, trials, seed).map_err(value_err)?;
    let analytic = per_qubit_success_analytic(&strategy).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("trials", est.trials)?;
    d.set_item("dual_rate", est.dual_rate)?;
    d.set_item("p0", est.p0)?;
    d.set_item("p1", est.p1)?;
    d.set_item("analytic", analytic)?;
    Ok(d)
}

/// Sweep projective angles over [0°, 90°]; returns one dict per grid
/// point plus the analytic maximizer.
#[pyfunction]
#[pyo3(signature = (step=1.0, n=20, trials_per_point=1000, seed=0xB1C0FFEE, jobs=1))]
fn sweep_projective<'py>(
    py: Python<'py>,
    step: f64,
    n: u32,
    trials_per_point: u64,
    seed: u64,
    jobs: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let config = ProtocolConfig::strict_game(n);
    let sweep = sweep_projective_angle_parallel(step, &config, trials_per_point, seed, jobs)
        .map_err(value_err)?;
    let points: Vec<Bound<'py, PyDict>> = sweep
        .points
        .iter()
        .map(|p| {
            let d = PyDict::new(py);
            d.set_item("theta", p.theta)?;
            d.set_item("per_qubit_analytic", p.per_qubit_analytic)?;
            d.set_item("per_qubit_mc", p.per_qubit_mc)?;
            d.set_item("dual_rate_mc", p.dual_rate_mc)?;
            Ok(d)
        })
        .collect::<PyResult<_>>()?;
    let d = PyDict::new(py);
    d.set_item("points", points)?;
    d.set_item("maximizer_theta", sweep.maximizer_theta)?;
    d.set_item("maximizer_value", sweep.maximizer_value)?;
    d.set_item("csv", sweep.csv())?;
    Ok(d)
}

/// Exact binomial upper tail P[X ≥ k] for X ~ Binomial(n, p).
#[pyfunction]
fn binomial_tail(n: u64, k: u64, p: f64) -> PyResult<f64> {
    analysis::binomial_tail(n, k, p).map_err(value_err)
}

/// Exact acceptance probability of an honest run under the full verifier.
#[pyfunction]
#[pyo3(signature = (n, e, eta=1.0, tau_accept=0.15, rho_reject=0.3, min_same_basis_count=16))]
fn honest_acceptance_prob(
    n: u32,
    e: f64,
    eta: f64,
    tau_accept: f64,
    rho_reject: f64,
    min_same_basis_count: u32,
) -> PyResult<f64> {
    analysis::honest_acceptance_prob(n, e, eta, tau_accept, rho_reject, min_same_basis_count)
        .map_err(value_err)
}

/// Smallest grid tauAccept meeting a completeness target, with rhoReject
/// midway to 1/2 and the strict soundness bound.
#[pyfunction]
#[pyo3(signature = (n, e, eta=1.0, target=0.99))]
fn plan_thresholds<'py>(
    py: Python<'py>,
    n: u32,
    e: f64,
    eta: f64,
    target: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let plan = analysis::plan_thresholds(n, e, eta, target).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("n", plan.n)?;
    d.set_item("e", plan.e)?;
    d.set_item("eta", plan.eta)?;
    d.set_item("tau_accept", plan.tau_accept)?;
    d.set_item("rho_reject", plan.rho_reject)?;
    d.set_item("completeness_failure_prob", plan.completeness_failure_prob)?;
    d.set_item("strict_soundness_bound", plan.strict_soundness_bound)?;
    Ok(d)
}

/// Cheating-bound decay in N, in both counting conventions.
#[pyfunction]
fn soundness_curve<'py>(
    py: Python<'py>,
    n_values: Vec<u32>,
    per_qubit_rate: f64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let points = analysis::soundness_curve(&n_values, per_qubit_rate).map_err(value_err)?;
    points
        .iter()
        .map(|p| {
            let d = PyDict::new(py);
            d.set_item("n", p.n)?;
            d.set_item("per_relevant_bound", p.per_relevant_bound)?;
            d.set_item("strict_bound", p.strict_bound)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn relbc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(interval_squared, m)?)?;
    m.add_function(wrap_pyfunction!(causally_precedes, m)?)?;
    m.add_function(wrap_pyfunction!(boost_x, m)?)?;
    m.add_function(wrap_pyfunction!(standard_geometry, m)?)?;
    m.add_function(wrap_pyfunction!(offset_geometry, m)?)?;
    m.add_function(wrap_pyfunction!(latest_binding_time, m)?)?;
    m.add_function(wrap_pyfunction!(honest_run, m)?)?;
    m.add_function(wrap_pyfunction!(honest_transcript_log, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_attack, m)?)?;
    m.add_function(wrap_pyfunction!(per_qubit_attack, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_projective, m)?)?;
    m.add_function(wrap_pyfunction!(binomial_tail, m)?)?;
    m.add_function(wrap_pyfunction!(honest_acceptance_prob, m)?)?;
    m.add_function(wrap_pyfunction!(plan_thresholds, m)?)?;
    m.add_function(wrap_pyfunction!(soundness_curve, m)?)?;
    m.add("BREIDBART_RATE", analysis::BREIDBART_RATE)?;
    m.add("DEFAULT_SEED", 0xB1C0_FFEEu64)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
