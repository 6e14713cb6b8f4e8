//! Command-line front end: honest runs, attack estimation, projective
//! sweeps, geometry inspection and threshold planning.
//!
//! Exit codes: 0 on success, 2 on configuration errors (with a diagnostic
//! naming the offending field), 3 when a causality violation surfaces in
//! an honest run.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use relbc_core::adversary::{
    estimate_success_parallel, sweep_projective_angle_parallel, AttackError, AttackReport,
    AttackStrategy, Sweep,
};
use relbc_core::analysis::{dec6, plan_thresholds, AnalysisError, ThresholdPlan};
use relbc_core::protocol::{run_honest_with, verify, ProcessingDelays, ProtocolConfig, ProtocolError};
use relbc_core::qubits::Basis;
use relbc_core::sched::SchedError;
use relbc_core::spacetime::{
    interval_squared, latest_binding_time, offset_geometry, Geometry, LabOffset, LabOffsets, Wing,
};

/// Default seed so bare invocations reproduce; pass --entropy for OS
/// randomness.
const DEFAULT_SEED: u64 = 0xB1C0_FFEE;

struct AppError {
    code: u8,
    message: String,
}

impl AppError {
    fn config(message: impl Into<String>) -> Self {
        AppError {
            code: 2,
            message: message.into(),
        }
    }

    fn causality(message: impl Into<String>) -> Self {
        AppError {
            code: 3,
            message: message.into(),
        }
    }

    fn other(message: impl Into<String>) -> Self {
        AppError {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<ProtocolError> for AppError {
    fn from(err: ProtocolError) -> Self {
        match &err {
            ProtocolError::Config(c) => AppError::config(format!("config error: {c}")),
            ProtocolError::Geometry(_) => AppError::config(format!("config error: {err}")),
            ProtocolError::Sched(SchedError::CausalityViolation { .. }) => {
                AppError::causality(format!("causality violation: {err}"))
            }
            _ => AppError::other(err.to_string()),
        }
    }
}

impl From<AttackError> for AppError {
    fn from(err: AttackError) -> Self {
        match err {
            AttackError::Adversary(e) => AppError::config(format!("config error: {e}")),
            AttackError::Protocol(e) => e.into(),
        }
    }
}

impl From<AnalysisError> for AppError {
    fn from(err: AnalysisError) -> Self {
        AppError::config(format!("config error: {err}"))
    }
}

#[derive(Parser)]
#[command(
    name = "relbc",
    version,
    about = "Relativistic quantum bit-commitment simulator",
    long_about = "Simulates a bit commitment in which the committed bit is the BB84 basis \
                  Alice measures Bob's qubits in, with outcomes relayed at light speed to two \
                  spacelike-separated unveiling wings under Minkowski-causality enforcement."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one honest commitment end to end and verify it
    Honest(HonestCmd),
    /// Estimate a cheating strategy's dual-unveiling success rate
    Attack(AttackCmd),
    /// Sweep single-angle projective strategies over [0°, 90°]
    Sweep(SweepCmd),
    /// Inspect protocol geometry, anchors and binding times
    Geometry(GeometryCmd),
    /// Select acceptance thresholds for a completeness target
    Plan(PlanCmd),
}

/// Config file plus per-field overrides; flag names are the config keys
/// with dashes.
#[derive(Args, Clone)]
struct ConfigArgs {
    /// JSON config file: a flat object with exactly the config field names
    /// (unknown keys are rejected)
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Security parameter N: number of transmitted qubits
    #[arg(long)]
    n: Option<u32>,
    /// Geometry scale: wings at (±x, 0, 0, x)
    #[arg(long)]
    x: Option<f64>,
    /// Aggregate bit-flip error rate in [0, 0.5)
    #[arg(long)]
    e: Option<f64>,
    /// Detection efficiency in (0, 1]
    #[arg(long)]
    eta: Option<f64>,
    /// Max mismatch fraction accepted on same-basis qubits
    #[arg(long)]
    tau_accept: Option<f64>,
    /// Min mismatch fraction required on conjugate-basis qubits
    #[arg(long)]
    rho_reject: Option<f64>,
    /// Coordinate distance allowed between a reception and its anchor
    #[arg(long)]
    timing_tolerance: Option<f64>,
    /// Below this many same-basis qubits the verdict is an abort
    #[arg(long)]
    min_same_basis_count: Option<u32>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<ProtocolConfig, AppError> {
        let mut config = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    AppError::config(format!("config error: cannot read {}: {e}", path.display()))
                })?;
                serde_json::from_str::<ProtocolConfig>(&text)
                    .map_err(|e| AppError::config(format!("config error: {e}")))?
            }
            None => ProtocolConfig::default(),
        };
        if let Some(n) = self.n {
            config.n = n;
        }
        if let Some(x) = self.x {
            config.x = x;
        }
        if let Some(e) = self.e {
            config.e = e;
        }
        if let Some(eta) = self.eta {
            config.eta = eta;
        }
        if let Some(tau) = self.tau_accept {
            config.tau_accept = tau;
        }
        if let Some(rho) = self.rho_reject {
            config.rho_reject = rho;
        }
        if let Some(t) = self.timing_tolerance {
            config.timing_tolerance = t;
        }
        if let Some(m) = self.min_same_basis_count {
            config.min_same_basis_count = m;
        }
        config
            .validate()
            .map_err(|e| AppError::config(format!("config error: {e}")))?;
        Ok(config)
    }
}

#[derive(Args, Clone)]
struct SeedArgs {
    /// Run seed (default 0xB1C0FFEE so bare invocations reproduce)
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Draw the seed from OS randomness instead
    #[arg(long)]
    entropy: bool,
}

impl SeedArgs {
    fn value(&self) -> u64 {
        if self.entropy {
            rand::random()
        } else {
            self.seed
        }
    }
}

#[derive(Args)]
struct HonestCmd {
    #[command(flatten)]
    config: ConfigArgs,
    /// Bit to commit to
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    bit: u8,
    #[command(flatten)]
    seed: SeedArgs,
    /// Append a CSV summary row here
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Write the full transcript log here
    #[arg(long, value_name = "FILE")]
    transcript: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    /// No measurement, uniform declarations on both wings
    Blind,
    /// Measure everything in Z, declare the outcomes on both wings
    FixedZ,
    /// Measure everything in X, declare the outcomes on both wings
    FixedX,
    /// Measure everything at --theta degrees on the X–Z circle
    Projective,
}

#[derive(Args)]
struct AttackCmd {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, value_enum)]
    strategy: StrategyArg,
    /// Measurement angle in degrees for --strategy projective
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Worker pool size; the report is identical for any value
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    seed: SeedArgs,
    /// Append one CSV row here (header written on first use)
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepCmd {
    #[command(flatten)]
    config: ConfigArgs,
    /// Grid step in degrees; must divide 90
    #[arg(long, default_value_t = 1.0)]
    step: f64,
    #[arg(long, default_value_t = 1000)]
    trials_per_point: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    seed: SeedArgs,
    /// Write the full CSV table here
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GeometryCmd {
    /// Geometry scale: wings at (±x, 0, 0, x)
    #[arg(long, default_value_t = 1.0)]
    x: f64,
    /// Bob's preparation-lab offset: dx,delay or dx,dy,dz,delay
    #[arg(long, value_parser = parse_offset, value_name = "OFFSET")]
    offset_p: Option<LabOffset>,
    /// Bob's wing-0 lab offset: dx,delay or dx,dy,dz,delay
    #[arg(long, value_parser = parse_offset, value_name = "OFFSET")]
    offset_q0: Option<LabOffset>,
    /// Bob's wing-1 lab offset: dx,delay or dx,dy,dz,delay
    #[arg(long, value_parser = parse_offset, value_name = "OFFSET")]
    offset_q1: Option<LabOffset>,
    /// Static worldline x,y,z for the binding-time report
    #[arg(long, value_parser = parse_worldline, value_name = "X,Y,Z")]
    worldline: Option<Point>,
}

#[derive(Clone, Copy)]
struct Point([f64; 3]);

#[derive(Args)]
struct PlanCmd {
    /// Security parameter N
    #[arg(long)]
    n: u32,
    /// Aggregate bit-flip error rate
    #[arg(long, default_value_t = 0.05)]
    e: f64,
    /// Detection efficiency
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    /// Target completeness (probability an honest run is accepted)
    #[arg(long, default_value_t = 0.99)]
    target: f64,
    /// Also print the soundness curve at these N values (comma-separated)
    #[arg(long, value_parser = parse_n_list, value_name = "N,N,...")]
    curve: Option<NList>,
    /// Append one CSV row here (header written on first use)
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Clone)]
struct NList(Vec<u32>);

fn parse_n_list(s: &str) -> Result<NList, String> {
    let ns: Vec<u32> = s
        .split(',')
        .map(|p| p.trim().parse::<u32>().map_err(|e| format!("bad N {p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if ns.is_empty() {
        return Err("expected at least one N".to_string());
    }
    Ok(NList(ns))
}

fn parse_offset(s: &str) -> Result<LabOffset, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("bad offset component {p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [dx, delay] => Ok(LabOffset::new([*dx, 0.0, 0.0], *delay)),
        [dx, dy, dz, delay] => Ok(LabOffset::new([*dx, *dy, *dz], *delay)),
        _ => Err("expected dx,delay or dx,dy,dz,delay".to_string()),
    }
}

fn parse_worldline(s: &str) -> Result<Point, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("bad coordinate {p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [x, y, z] => Ok(Point([*x, *y, *z])),
        _ => Err("expected x,y,z".to_string()),
    }
}

fn append_csv(path: &Path, header: &str, row: &str) -> Result<(), AppError> {
    let needs_header = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| AppError::other(format!("cannot open {}: {e}", path.display())))?;
    if needs_header {
        writeln!(file, "{header}").map_err(|e| AppError::other(e.to_string()))?;
    }
    writeln!(file, "{row}").map_err(|e| AppError::other(e.to_string()))?;
    Ok(())
}

fn run_honest_cmd(cmd: &HonestCmd) -> Result<(), AppError> {
    let config = cmd.config.resolve()?;
    let seed = cmd.seed.value();
    let bit = cmd.bit == 1;
    let geometry = relbc_core::spacetime::standard_geometry(config.x).map_err(ProtocolError::from)?;
    let transcript = run_honest_with(&config, &geometry, bit, seed, &ProcessingDelays::default())?;
    transcript.audit_causality().map_err(ProtocolError::from)?;
    let report = verify(&transcript, &config);

    println!("seed                     {seed}");
    println!("N                        {}", config.n);
    println!("committedBit             {}", bit as u8);
    println!("{report}");

    if let Some(path) = &cmd.transcript {
        fs::write(path, transcript.to_log())
            .map_err(|e| AppError::other(format!("cannot write {}: {e}", path.display())))?;
        println!("transcript               {}", path.display());
    }
    if let Some(path) = &cmd.output {
        let header = "verdict,bit,N,seed,mismatchSame,mismatchConj,sameCount,conjCount";
        let row = format!(
            "{},{},{},{},{},{},{},{}",
            report.verdict,
            bit as u8,
            config.n,
            seed,
            dec6(report.mismatch_same),
            dec6(report.mismatch_conj),
            report.same_basis_count,
            report.conjugate_count,
        );
        append_csv(path, header, &row)?;
    }
    Ok(())
}

fn build_strategy(cmd: &AttackCmd) -> Result<AttackStrategy, AppError> {
    match cmd.strategy {
        StrategyArg::Blind => Ok(AttackStrategy::BlindGuess),
        StrategyArg::FixedZ => Ok(AttackStrategy::FixedBasis(Basis::Z)),
        StrategyArg::FixedX => Ok(AttackStrategy::FixedBasis(Basis::X)),
        StrategyArg::Projective => {
            let theta = cmd.theta.ok_or_else(|| {
                AppError::config("config error: field theta: --strategy projective needs --theta")
            })?;
            Ok(AttackStrategy::ProjectiveAngle(theta))
        }
    }
}

fn print_attack_report(report: &AttackReport) {
    println!("strategy                 {}", report.strategy);
    match report.theta {
        Some(theta) => println!("theta                    {theta}°"),
        None => println!("theta                    -"),
    }
    println!("N                        {}", report.n);
    println!("trials                   {}", report.trials);
    println!("dualSuccesses            {}", report.successes);
    println!("dualSuccessRate          {}", dec6(report.success_rate));
    println!(
        "wilson95                 [{}, {}]",
        dec6(report.wilson.0),
        dec6(report.wilson.1)
    );
    println!("p0Hat (per qubit)        {}", dec6(report.p0_hat));
    println!("p1Hat (per qubit)        {}", dec6(report.p1_hat));
    println!("deltaHat                 {}", dec6(report.delta_hat));
    println!("perQubitRate             {}", dec6(report.per_qubit_rate));
    println!("thresholdGameRate        {}", dec6(report.threshold_rate));
}

fn run_attack_cmd(cmd: &AttackCmd) -> Result<(), AppError> {
    let config = cmd.config.resolve()?;
    let strategy = build_strategy(cmd)?;
    let seed = cmd.seed.value();
    let report = estimate_success_parallel(&strategy, &config, cmd.trials, seed, cmd.jobs)?;
    print_attack_report(&report);
    if let Some(path) = &cmd.output {
        append_csv(path, AttackReport::CSV_HEADER, &report.csv_row())?;
    }
    Ok(())
}

fn run_sweep_cmd(cmd: &SweepCmd) -> Result<(), AppError> {
    let config = cmd.config.resolve()?;
    let seed = cmd.seed.value();
    let sweep =
        sweep_projective_angle_parallel(cmd.step, &config, cmd.trials_per_point, seed, cmd.jobs)?;
    println!("points                   {}", sweep.points.len());
    println!("maximizerTheta           {}°", sweep.maximizer_theta);
    println!("maximizerPerQubit        {}", dec6(sweep.maximizer_value));
    match &cmd.output {
        Some(path) => {
            fs::write(path, sweep.csv())
                .map_err(|e| AppError::other(format!("cannot write {}: {e}", path.display())))?;
            println!("csv                      {}", path.display());
        }
        None => {
            println!("{}", Sweep::CSV_HEADER);
            for p in &sweep.points {
                println!(
                    "{},{},{},{}",
                    dec6(p.theta),
                    dec6(p.per_qubit_analytic),
                    dec6(p.per_qubit_mc),
                    dec6(p.dual_rate_mc)
                );
            }
        }
    }
    Ok(())
}

fn geometry_error(flag: &str, err: impl std::fmt::Display) -> AppError {
    AppError::config(format!("config error: field {flag}: {err}"))
}

fn run_geometry_cmd(cmd: &GeometryCmd) -> Result<(), AppError> {
    let offsets = LabOffsets {
        prep: cmd.offset_p.unwrap_or_else(LabOffset::none),
        wings: [
            cmd.offset_q0.unwrap_or_else(LabOffset::none),
            cmd.offset_q1.unwrap_or_else(LabOffset::none),
        ],
    };
    let geometry: Geometry = offset_geometry(cmd.x, offsets).map_err(|e| {
        let flag = match &e {
            relbc_core::spacetime::GeometryError::AcausalOffset { anchor, .. } => match *anchor {
                "P'" => "offset-p",
                "Q0'" => "offset-q0",
                _ => "offset-q1",
            },
            _ => "x",
        };
        geometry_error(flag, e)
    })?;
    let worldline = cmd.worldline.map(|p| p.0).unwrap_or([0.0, 0.0, 0.0]);

    println!("P                        {}", geometry.p);
    println!("Q0                       {}", geometry.q0);
    println!("Q1                       {}", geometry.q1);
    println!("P'                       {}", geometry.bob_prep);
    println!("Q0'                      {}", geometry.bob_wing(Wing::Q0));
    println!("Q1'                      {}", geometry.bob_wing(Wing::Q1));
    println!(
        "interval²(P,Q0)          {}",
        interval_squared(geometry.p, geometry.q0)
    );
    println!(
        "interval²(P,Q1)          {}",
        interval_squared(geometry.p, geometry.q1)
    );
    println!(
        "interval²(Q0,Q1)         {}",
        interval_squared(geometry.q0, geometry.q1)
    );
    let binding = latest_binding_time(
        geometry.bob_wing(Wing::Q0),
        geometry.bob_wing(Wing::Q1),
        worldline,
    )
    .map_err(|e| geometry_error("worldline", e))?;
    println!(
        "latestBindingTime        {} at worldline ({}, {}, {})",
        binding, worldline[0], worldline[1], worldline[2]
    );
    Ok(())
}

fn run_plan_cmd(cmd: &PlanCmd) -> Result<(), AppError> {
    let plan: ThresholdPlan = plan_thresholds(cmd.n, cmd.e, cmd.eta, cmd.target)?;
    println!("N                        {}", plan.n);
    println!("e                        {}", plan.e);
    println!("eta                      {}", plan.eta);
    println!("tauAccept                {}", dec6(plan.tau_accept));
    println!("rhoReject                {}", dec6(plan.rho_reject));
    println!(
        "completenessFailure      {:e}",
        plan.completeness_failure_prob
    );
    println!(
        "strictSoundnessBound     {:e}",
        plan.strict_soundness_bound
    );
    if let Some(ns) = &cmd.curve {
        let points = relbc_core::analysis::soundness_curve(&ns.0, relbc_core::analysis::BREIDBART_RATE)?;
        print!("{}", relbc_core::analysis::soundness_curve_csv(&points));
    }
    if let Some(path) = &cmd.output {
        let header = "N,e,eta,tauAccept,rhoReject,completenessFailure,strictSoundnessBound";
        let row = format!(
            "{},{},{},{},{},{:e},{:e}",
            plan.n,
            plan.e,
            plan.eta,
            dec6(plan.tau_accept),
            dec6(plan.rho_reject),
            plan.completeness_failure_prob,
            plan.strict_soundness_bound,
        );
        append_csv(path, header, &row)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), AppError> {
    match &cli.command {
        Command::Honest(cmd) => run_honest_cmd(cmd),
        Command::Attack(cmd) => run_attack_cmd(cmd),
        Command::Sweep(cmd) => run_sweep_cmd(cmd),
        Command::Geometry(cmd) => run_geometry_cmd(cmd),
        Command::Plan(cmd) => run_plan_cmd(cmd),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.message);
            ExitCode::from(err.code)
        }
    }
}
