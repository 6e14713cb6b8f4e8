//! The exact verifier model in `analysis` against the simulator itself,
//! at parameters where acceptance is genuinely fractional so any modeling
//! slip (category split, threshold cutoffs, conjugate uniformity, minimum
//! sample gate) would show.

use relbc_core::analysis::honest_acceptance_prob;
use relbc_core::protocol::{run_honest, verify, ProtocolConfig, Verdict};
use relbc_core::rng::trial_seed;

#[test]
fn exact_acceptance_matches_monte_carlo_in_the_fractional_regime() {
    let config = ProtocolConfig {
        n: 60,
        e: 0.12,
        eta: 0.9,
        tau_accept: 0.15,
        rho_reject: 0.3,
        min_same_basis_count: 16,
        ..ProtocolConfig::default()
    };
    let exact = honest_acceptance_prob(
        config.n,
        config.e,
        config.eta,
        config.tau_accept,
        config.rho_reject,
        config.min_same_basis_count,
    )
    .unwrap();
    assert!(
        (0.2..0.95).contains(&exact),
        "regime not fractional: exact acceptance {exact}"
    );

    let runs = 4000u64;
    let mut accepted = 0u64;
    for i in 0..runs {
        let bit = i % 2 == 0;
        let t = run_honest(&config, bit, trial_seed(0xACCE97, i)).unwrap();
        if verify(&t, &config).verdict == Verdict::Accept(bit) {
            accepted += 1;
        }
    }
    let rate = accepted as f64 / runs as f64;
    let sigma = (exact * (1.0 - exact) / runs as f64).sqrt();
    assert!(
        (rate - exact).abs() <= 3.0 * sigma,
        "monte carlo {rate} vs exact {exact} (3σ = {})",
        3.0 * sigma
    );
}
