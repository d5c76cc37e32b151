//! Command-line front end: binds games, sources, simulation, scans, and the
//! equilibrium machinery into reproducible runs.
//!
//! Every run resolves to an explicit configuration (the seed always
//! included) which is echoed into the artifact together with the tool
//! version. Identical flags and seed produce byte-identical artifacts; the
//! `--workers` flag only controls the thread pool and never changes
//! results, so it is not part of the echoed configuration.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bell::{
    bell_check, correlation_payoffs, epsilon_sigma, pq_map, BellConvention, CorrelationTriple,
};
use crate::equilibrium::{
    direction_at, grid_phi, grid_theta, ne_search, pd_disappearance_experiment, triple_of,
    DirectionalProfile, EquilibriumCertificate, PdDemoReport, RegionSummary,
};
use crate::error::{Error, Result};
use crate::game::{parse_game_json, SymmetricGame};
use crate::geometry::{Direction, SphericalAngles};
use crate::sources::{estimate_triple, simulate_session, SessionTally, SettingPair, SourceKind};

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Fallback seed when `--seed` is not given; documented in the help text.
const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

impl OutputFormat {
    fn as_str(&self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "correlation-games",
    version,
    about = "Correlation-form bi-matrix games: Bell checks, measurement simulation, and directional equilibrium search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for every randomized stage (sessions, search starts). Defaults
    /// to 0; environment variables are never consulted.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Size of the worker thread pool (default: all cores). Results never
    /// depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Write the machine-readable artifact to this path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Artifact format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the Bell bound and the (p, q) image of a correlation triple.
    BellCheck {
        /// Correlations as "ab,ac,bc", each in [-1, 1].
        #[arg(long)]
        triple: String,
        /// Bound convention: "main" (rhs 1 - bc) or "anti" (rhs 1 + bc).
        #[arg(long, default_value = "main")]
        convention: String,
    },
    /// Simulate a measurement session and estimate the correlations.
    Simulate {
        /// Pair source: quantum, quantum-anti, lhv, lhv-anti.
        #[arg(long)]
        source: String,
        /// Alice's move as "theta,phi" in degrees.
        #[arg(long)]
        alpha: String,
        /// Bob's move as "theta,phi" in degrees.
        #[arg(long)]
        beta: String,
        /// Number of shared pairs.
        #[arg(long)]
        pairs: u64,
    },
    /// Correlation payoffs of a game at a given triple.
    Payoff {
        /// Game: "pd", inline "r,s,t,u", or a JSON file path.
        #[arg(long)]
        game: String,
        /// Correlations as "ab,ac,bc", each in [-1, 1].
        #[arg(long)]
        triple: String,
    },
    /// Tabulate correlations, (p, q), and payoffs over the direction grid.
    Scan {
        #[arg(long)]
        game: String,
        #[arg(long)]
        source: String,
        /// Grid resolution per angle.
        #[arg(long, default_value_t = 12)]
        grid: usize,
        #[arg(long, default_value = "main")]
        convention: String,
    },
    /// Scan the attainable (p, q) region of a source.
    Region {
        #[arg(long)]
        source: String,
        #[arg(long, default_value_t = 12)]
        grid: usize,
    },
    /// Search for directional Nash equilibria.
    NeSearch {
        #[arg(long)]
        game: String,
        #[arg(long)]
        source: String,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        /// Certification tolerance on unilateral improvements.
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
    /// Run the Prisoners' Dilemma demonstration.
    PdDemo {
        #[arg(long, default_value_t = 48)]
        grid: usize,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
}

/// The resolved, result-defining configuration echoed into artifacts.
#[derive(Debug, Clone, Serialize)]
struct RunConfig {
    command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    game: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    triple: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    convention: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha_deg: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta_deg: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pairs: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
    seed: u64,
}

impl RunConfig {
    fn new(command: &str, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            game: None,
            source: None,
            triple: None,
            convention: None,
            alpha_deg: None,
            beta_deg: None,
            pairs: None,
            grid: None,
            tol: None,
            seed,
        }
    }
}

/// Runs the CLI; returns the process exit status (0 success, 1 runtime
/// error, 2 usage error).
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.exit_code() == 0 { 0 } else { 2 };
            let _ = err.print();
            return code;
        }
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers.unwrap_or(0))
        .build();
    let pool = match pool {
        Ok(pool) => pool,
        Err(err) => {
            eprintln!("error: could not build worker pool: {err}");
            return 1;
        }
    };

    match pool.install(|| execute(&cli)) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            1
        }
    }
}

fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::BellCheck { triple, convention } => run_bell_check(cli, triple, convention),
        Command::Simulate {
            source,
            alpha,
            beta,
            pairs,
        } => run_simulate(cli, source, alpha, beta, *pairs),
        Command::Payoff { game, triple } => run_payoff(cli, game, triple),
        Command::Scan {
            game,
            source,
            grid,
            convention,
        } => run_scan(cli, game, source, *grid, convention),
        Command::Region { source, grid } => run_region(cli, source, *grid),
        Command::NeSearch {
            game,
            source,
            grid,
            tol,
        } => run_ne_search(cli, game, source, *grid, *tol),
        Command::PdDemo { grid, tol } => run_pd_demo(cli, *grid, *tol),
    }
}

// ---------------------------------------------------------------------------
// Flag parsing helpers
// ---------------------------------------------------------------------------

fn parse_floats(flag: &'static str, text: &str, n: usize) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != n {
        return Err(Error::InvalidFlag {
            flag,
            message: format!("expected {n} comma-separated numbers, got '{text}'"),
        });
    }
    parts
        .iter()
        .map(|p| {
            p.trim().parse::<f64>().map_err(|_| Error::InvalidFlag {
                flag,
                message: format!("'{p}' is not a number"),
            })
        })
        .collect()
}

fn parse_triple(flag: &'static str, text: &str) -> Result<CorrelationTriple> {
    let v = parse_floats(flag, text, 3)?;
    CorrelationTriple::new(v[0], v[1], v[2]).map_err(|e| Error::InvalidFlag {
        flag,
        message: e.to_string(),
    })
}

fn parse_direction(flag: &'static str, text: &str) -> Result<Direction> {
    let v = parse_floats(flag, text, 2)?;
    let angles = SphericalAngles::from_degrees(v[0], v[1]).map_err(|_| Error::InvalidFlag {
        flag,
        message: format!(
            "angles '{text}' out of range (theta in [0, 180], phi in [0, 360) degrees)"
        ),
    })?;
    Ok(Direction::from_spherical(angles))
}

fn parse_convention(flag: &'static str, text: &str) -> Result<BellConvention> {
    match text {
        "main" => Ok(BellConvention::Correlated),
        "anti" => Ok(BellConvention::Anticorrelated),
        other => Err(Error::InvalidFlag {
            flag,
            message: format!("unknown convention '{other}' (expected main or anti)"),
        }),
    }
}

fn parse_source(flag: &'static str, text: &str) -> Result<SourceKind> {
    text.parse::<SourceKind>().map_err(|e| match e {
        Error::InvalidFlag { message, .. } => Error::InvalidFlag { flag, message },
        other => other,
    })
}

/// Resolves `--game`: the built-in alias "pd", an inline "r,s,t,u" list, or
/// a JSON file path.
fn resolve_game(flag: &'static str, arg: &str) -> Result<SymmetricGame> {
    if arg == "pd" {
        return Ok(SymmetricGame::prisoners_dilemma());
    }
    if arg.contains(',') {
        let v = parse_floats(flag, arg, 4)?;
        return SymmetricGame::new(v[0], v[1], v[2], v[3]).map_err(|e| Error::InvalidFlag {
            flag,
            message: e.to_string(),
        });
    }
    let text = std::fs::read_to_string(arg).map_err(|e| Error::InvalidFlag {
        flag,
        message: format!("cannot read game file '{arg}': {e}"),
    })?;
    parse_game_json(&text)
}

// ---------------------------------------------------------------------------
// Artifact rendering
// ---------------------------------------------------------------------------

/// Renders a float with nine significant digits, byte-stable across runs.
fn sig9(x: f64) -> String {
    format!("{x:.8e}")
}

fn csv_header(config: &RunConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# correlation-games {VERSION}");
    let _ = writeln!(
        out,
        "# config {}",
        serde_json::to_string(config).expect("config serializes")
    );
    out
}

#[derive(Serialize)]
struct JsonArtifact<'a, P: Serialize> {
    version: &'static str,
    config: &'a RunConfig,
    results: P,
}

fn emit<P: Serialize>(
    cli: &Cli,
    config: &RunConfig,
    payload: &P,
    csv_body: impl FnOnce() -> String,
) -> Result<()> {
    let Some(path) = &cli.out else {
        return Ok(());
    };
    let bytes = match cli.format {
        OutputFormat::Json => {
            let artifact = JsonArtifact {
                version: VERSION,
                config,
                results: payload,
            };
            let mut text = serde_json::to_string_pretty(&artifact)?;
            text.push('\n');
            text
        }
        OutputFormat::Csv => format!("{}{}", csv_header(config), csv_body()),
    };
    std::fs::write(path, bytes)?;
    println!("wrote {} artifact: {}", cli.format.as_str(), path.display());
    Ok(())
}

fn profile_degrees(profile: &DirectionalProfile) -> (f64, f64, f64, f64) {
    let a = profile.alice.spherical();
    let b = profile.bob.spherical();
    (
        a.theta_degrees(),
        a.phi_degrees(),
        b.theta_degrees(),
        b.phi_degrees(),
    )
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct BellCheckResults {
    ab: f64,
    ac: f64,
    bc: f64,
    convention: String,
    lhs: f64,
    rhs: f64,
    holds: bool,
    epsilon: f64,
    sigma: f64,
    p: f64,
    q: f64,
}

fn run_bell_check(cli: &Cli, triple_text: &str, convention_text: &str) -> Result<()> {
    let triple = parse_triple("--triple", triple_text)?;
    let convention = parse_convention("--convention", convention_text)?;
    let check = bell_check(&triple, convention);
    let es = epsilon_sigma(&triple);
    let pq = pq_map(&triple);

    let mut config = RunConfig::new("bell-check", cli.seed);
    config.triple = Some(triple_text.to_string());
    config.convention = Some(convention_text.to_string());

    println!(
        "triple: ab={} ac={} bc={}",
        triple.ab(),
        triple.ac(),
        triple.bc()
    );
    println!(
        "convention: {} (rhs = 1 {} bc)",
        convention_text,
        if convention == BellConvention::Correlated {
            "-"
        } else {
            "+"
        }
    );
    println!("lhs = |ab - ac| = {:.6}", check.lhs);
    println!("rhs = {:.6}", check.rhs);
    println!(
        "bell bound: {}",
        if check.holds { "holds" } else { "violated" }
    );
    println!("epsilon = {:.6}  sigma = {:.6}", es.epsilon, es.sigma);
    println!("p = {:.6}  q = {:.6}", pq.p, pq.q);

    let results = BellCheckResults {
        ab: triple.ab(),
        ac: triple.ac(),
        bc: triple.bc(),
        convention: convention_text.to_string(),
        lhs: check.lhs,
        rhs: check.rhs,
        holds: check.holds,
        epsilon: es.epsilon,
        sigma: es.sigma,
        p: pq.p,
        q: pq.q,
    };
    emit(cli, &config, &results, || {
        let mut body = String::from("ab,ac,bc,lhs,rhs,holds,epsilon,sigma,p,q\n");
        let _ = writeln!(
            body,
            "{},{},{},{},{},{},{},{},{},{}",
            sig9(triple.ab()),
            sig9(triple.ac()),
            sig9(triple.bc()),
            sig9(check.lhs),
            sig9(check.rhs),
            check.holds,
            sig9(es.epsilon),
            sig9(es.sigma),
            sig9(pq.p),
            sig9(pq.q)
        );
        body
    })
}

#[derive(Serialize)]
struct BucketResults {
    setting_pair: String,
    pairs: u64,
    product_sum: i64,
    estimate: f64,
    std_error: f64,
}

#[derive(Serialize)]
struct SimulateResults {
    source: String,
    total_pairs: u64,
    buckets: Vec<BucketResults>,
    ab: f64,
    ac: f64,
    bc: f64,
    se_ab: f64,
    se_ac: f64,
    se_bc: f64,
    cc: f64,
}

fn bucket_rows(tally: &SessionTally) -> Vec<BucketResults> {
    SettingPair::ALL
        .iter()
        .map(|&pair| {
            let count = tally.count(pair);
            let sum = tally.product_sum(pair);
            let estimate = if count > 0 {
                sum as f64 / count as f64
            } else {
                0.0
            };
            let std_error = if count > 0 {
                ((1.0 - estimate * estimate).max(0.0) / count as f64).sqrt()
            } else {
                0.0
            };
            BucketResults {
                setting_pair: pair.as_str().to_string(),
                pairs: count,
                product_sum: sum,
                estimate,
                std_error,
            }
        })
        .collect()
}

fn run_simulate(
    cli: &Cli,
    source_text: &str,
    alpha_text: &str,
    beta_text: &str,
    pairs: u64,
) -> Result<()> {
    let kind = parse_source("--source", source_text)?;
    let alpha = parse_direction("--alpha", alpha_text)?;
    let beta = parse_direction("--beta", beta_text)?;
    let tally = simulate_session(kind, &alpha, &beta, pairs, cli.seed)?;
    let estimate = estimate_triple(&tally)?;

    let mut config = RunConfig::new("simulate", cli.seed);
    config.source = Some(source_text.to_string());
    config.alpha_deg = Some(alpha_text.to_string());
    config.beta_deg = Some(beta_text.to_string());
    config.pairs = Some(pairs);

    println!("source: {}  pairs: {}  seed: {}", kind, pairs, cli.seed);
    println!(
        "{:<11} {:>10} {:>12} {:>11} {:>11}",
        "bucket", "pairs", "product_sum", "estimate", "std_error"
    );
    for row in bucket_rows(&tally) {
        println!(
            "{:<11} {:>10} {:>12} {:>11.6} {:>11.6}",
            row.setting_pair, row.pairs, row.product_sum, row.estimate, row.std_error
        );
    }
    println!(
        "estimates: ab = {:.6} ({:.6})  ac = {:.6} ({:.6})  bc = {:.6} ({:.6})",
        estimate.ab, estimate.se_ab, estimate.ac, estimate.se_ac, estimate.bc, estimate.se_bc
    );
    println!("shared-axis calibration cc = {:.6}", estimate.cc);

    let results = SimulateResults {
        source: kind.as_str().to_string(),
        total_pairs: tally.total_pairs(),
        buckets: bucket_rows(&tally),
        ab: estimate.ab,
        ac: estimate.ac,
        bc: estimate.bc,
        se_ab: estimate.se_ab,
        se_ac: estimate.se_ac,
        se_bc: estimate.se_bc,
        cc: estimate.cc,
    };
    emit(cli, &config, &results, || {
        let mut body = String::from("setting_pair,pairs,product_sum,estimate,std_error\n");
        for row in bucket_rows(&tally) {
            let _ = writeln!(
                body,
                "{},{},{},{},{}",
                row.setting_pair,
                row.pairs,
                row.product_sum,
                sig9(row.estimate),
                sig9(row.std_error)
            );
        }
        body
    })
}

#[derive(Serialize)]
struct PayoffResults {
    game: SymmetricGame,
    ab: f64,
    ac: f64,
    bc: f64,
    epsilon: f64,
    sigma: f64,
    p: f64,
    q: f64,
    payoff_a: f64,
    payoff_b: f64,
}

fn run_payoff(cli: &Cli, game_text: &str, triple_text: &str) -> Result<()> {
    let game = resolve_game("--game", game_text)?;
    let triple = parse_triple("--triple", triple_text)?;
    let coefficients = game.coefficients();
    let es = epsilon_sigma(&triple);
    let pq = pq_map(&triple);
    let (payoff_a, payoff_b) = correlation_payoffs(&coefficients, &triple);

    let mut config = RunConfig::new("payoff", cli.seed);
    config.game = Some(game_text.to_string());
    config.triple = Some(triple_text.to_string());

    println!(
        "triple: ab={} ac={} bc={}",
        triple.ab(),
        triple.ac(),
        triple.bc()
    );
    println!(
        "epsilon = {:.6}  sigma = {:.6}  p = {:.6}  q = {:.6}",
        es.epsilon, es.sigma, pq.p, pq.q
    );
    println!("payoffs: alice = {payoff_a:.6}  bob = {payoff_b:.6}");

    let results = PayoffResults {
        game,
        ab: triple.ab(),
        ac: triple.ac(),
        bc: triple.bc(),
        epsilon: es.epsilon,
        sigma: es.sigma,
        p: pq.p,
        q: pq.q,
        payoff_a,
        payoff_b,
    };
    emit(cli, &config, &results, || {
        let mut body = String::from("ab,ac,bc,epsilon,sigma,p,q,payoff_a,payoff_b\n");
        let _ = writeln!(
            body,
            "{},{},{},{},{},{},{},{},{}",
            sig9(triple.ab()),
            sig9(triple.ac()),
            sig9(triple.bc()),
            sig9(es.epsilon),
            sig9(es.sigma),
            sig9(pq.p),
            sig9(pq.q),
            sig9(payoff_a),
            sig9(payoff_b)
        );
        body
    })
}

#[derive(Serialize)]
struct ScanRow {
    theta_a: f64,
    phi_a: f64,
    theta_b: f64,
    phi_b: f64,
    ab: f64,
    ac: f64,
    bc: f64,
    epsilon: f64,
    sigma: f64,
    p: f64,
    q: f64,
    bell_holds: bool,
    payoff_a: f64,
    payoff_b: f64,
}

#[derive(Serialize)]
struct ScanResults {
    source: String,
    grid: usize,
    rows: Vec<ScanRow>,
}

fn scan_rows(
    game: &SymmetricGame,
    kind: SourceKind,
    grid: usize,
    convention: BellConvention,
) -> Vec<ScanRow> {
    let coefficients = game.coefficients();
    let mut rows = Vec::with_capacity(grid * grid * grid * grid);
    for i in 0..grid {
        for j in 0..grid {
            let alice = direction_at(grid_theta(i, grid), grid_phi(j, grid));
            for k in 0..grid {
                for l in 0..grid {
                    let bob = direction_at(grid_theta(k, grid), grid_phi(l, grid));
                    let profile = DirectionalProfile::new(alice, bob);
                    let triple = triple_of(kind, &profile);
                    let es = epsilon_sigma(&triple);
                    let pq = pq_map(&triple);
                    let check = bell_check(&triple, convention);
                    let (payoff_a, payoff_b) = correlation_payoffs(&coefficients, &triple);
                    let (theta_a, phi_a, theta_b, phi_b) = profile_degrees(&profile);
                    rows.push(ScanRow {
                        theta_a,
                        phi_a,
                        theta_b,
                        phi_b,
                        ab: triple.ab(),
                        ac: triple.ac(),
                        bc: triple.bc(),
                        epsilon: es.epsilon,
                        sigma: es.sigma,
                        p: pq.p,
                        q: pq.q,
                        bell_holds: check.holds,
                        payoff_a,
                        payoff_b,
                    });
                }
            }
        }
    }
    rows
}

fn run_scan(
    cli: &Cli,
    game_text: &str,
    source_text: &str,
    grid: usize,
    convention_text: &str,
) -> Result<()> {
    let game = resolve_game("--game", game_text)?;
    let kind = parse_source("--source", source_text)?;
    let convention = parse_convention("--convention", convention_text)?;
    if grid < 2 {
        return Err(Error::InvalidFlag {
            flag: "--grid",
            message: "grid must be at least 2".into(),
        });
    }
    let rows = scan_rows(&game, kind, grid, convention);

    let mut config = RunConfig::new("scan", cli.seed);
    config.game = Some(game_text.to_string());
    config.source = Some(source_text.to_string());
    config.grid = Some(grid);
    config.convention = Some(convention_text.to_string());

    let violations = rows.iter().filter(|r| !r.bell_holds).count();
    println!(
        "scanned {} direction pairs (grid {}): {} violate the bound ({:.3}%)",
        rows.len(),
        grid,
        violations,
        100.0 * violations as f64 / rows.len() as f64
    );

    let results = ScanResults {
        source: kind.as_str().to_string(),
        grid,
        rows,
    };
    emit(cli, &config, &results, || {
        let mut body = String::from(
            "theta_a,phi_a,theta_b,phi_b,ab,ac,bc,epsilon,sigma,p,q,bell_holds,payoff_a,payoff_b\n",
        );
        for r in &results.rows {
            let _ = writeln!(
                body,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                sig9(r.theta_a),
                sig9(r.phi_a),
                sig9(r.theta_b),
                sig9(r.phi_b),
                sig9(r.ab),
                sig9(r.ac),
                sig9(r.bc),
                sig9(r.epsilon),
                sig9(r.sigma),
                sig9(r.p),
                sig9(r.q),
                r.bell_holds,
                sig9(r.payoff_a),
                sig9(r.payoff_b)
            );
        }
        body
    })
}

#[derive(Serialize)]
struct RegionRow {
    theta_a: f64,
    phi_a: f64,
    theta_b: f64,
    phi_b: f64,
    p: f64,
    q: f64,
    bell_holds: bool,
}

#[derive(Serialize)]
struct RegionResults {
    source: String,
    summary: RegionSummary,
    rows: Vec<RegionRow>,
}

fn run_region(cli: &Cli, source_text: &str, grid: usize) -> Result<()> {
    let kind = parse_source("--source", source_text)?;
    if grid < 8 {
        return Err(Error::InvalidFlag {
            flag: "--grid",
            message: "grid must be at least 8".into(),
        });
    }
    let scan = crate::equilibrium::region_scan(kind, grid);
    let rows: Vec<RegionRow> = scan
        .samples
        .iter()
        .map(|s| {
            let (theta_a, phi_a, theta_b, phi_b) = profile_degrees(&s.profile);
            RegionRow {
                theta_a,
                phi_a,
                theta_b,
                phi_b,
                p: s.pq.p,
                q: s.pq.q,
                bell_holds: s.bell_holds,
            }
        })
        .collect();
    let summary = scan.summary;

    let mut config = RunConfig::new("region", cli.seed);
    config.source = Some(source_text.to_string());
    config.grid = Some(grid);

    println!("source: {kind}  grid: {grid}  samples: {}", summary.samples);
    println!(
        "p in [{:.6}, {:.6}]  q in [{:.6}, {:.6}]",
        summary.min_p, summary.max_p, summary.min_q, summary.max_q
    );
    println!(
        "bell bound holds for {:.3}% of profiles",
        100.0 * summary.bell_holds_fraction
    );

    let results = RegionResults {
        source: kind.as_str().to_string(),
        summary,
        rows,
    };
    emit(cli, &config, &results, || {
        let mut body = String::new();
        let _ = writeln!(
            body,
            "# summary samples={} min_p={} max_p={} min_q={} max_q={} bell_holds_fraction={}",
            summary.samples,
            sig9(summary.min_p),
            sig9(summary.max_p),
            sig9(summary.min_q),
            sig9(summary.max_q),
            sig9(summary.bell_holds_fraction)
        );
        body.push_str("theta_a,phi_a,theta_b,phi_b,p,q,bell_holds\n");
        for r in &results.rows {
            let _ = writeln!(
                body,
                "{},{},{},{},{},{},{}",
                sig9(r.theta_a),
                sig9(r.phi_a),
                sig9(r.theta_b),
                sig9(r.phi_b),
                sig9(r.p),
                sig9(r.q),
                r.bell_holds
            );
        }
        body
    })
}

#[derive(Serialize)]
struct CertificateRow {
    theta_a: f64,
    phi_a: f64,
    theta_b: f64,
    phi_b: f64,
    payoff_a: f64,
    payoff_b: f64,
    alice_improvement: f64,
    bob_improvement: f64,
    tolerance: f64,
    verified_grid: usize,
}

impl CertificateRow {
    fn from(cert: &EquilibriumCertificate) -> Self {
        let (theta_a, phi_a, theta_b, phi_b) = profile_degrees(&cert.profile);
        Self {
            theta_a,
            phi_a,
            theta_b,
            phi_b,
            payoff_a: cert.payoffs.0,
            payoff_b: cert.payoffs.1,
            alice_improvement: cert.alice_improvement,
            bob_improvement: cert.bob_improvement,
            tolerance: cert.tolerance,
            verified_grid: cert.verified_grid_resolution,
        }
    }
}

#[derive(Serialize)]
struct NeSearchResults {
    source: String,
    grid: usize,
    tol: f64,
    all_profiles: bool,
    unconverged_starts: usize,
    rejected_fixed_points: usize,
    certificates: Vec<CertificateRow>,
}

fn certificate_csv(rows: &[CertificateRow]) -> String {
    let mut body = String::from(
        "theta_a,phi_a,theta_b,phi_b,payoff_a,payoff_b,alice_improvement,bob_improvement,tolerance,verified_grid\n",
    );
    for r in rows {
        let _ = writeln!(
            body,
            "{},{},{},{},{},{},{},{},{},{}",
            sig9(r.theta_a),
            sig9(r.phi_a),
            sig9(r.theta_b),
            sig9(r.phi_b),
            sig9(r.payoff_a),
            sig9(r.payoff_b),
            sig9(r.alice_improvement),
            sig9(r.bob_improvement),
            sig9(r.tolerance),
            r.verified_grid
        );
    }
    body
}

fn run_ne_search(
    cli: &Cli,
    game_text: &str,
    source_text: &str,
    grid: usize,
    tol: f64,
) -> Result<()> {
    let game = resolve_game("--game", game_text)?;
    let kind = parse_source("--source", source_text)?;
    if grid < 8 {
        return Err(Error::InvalidFlag {
            flag: "--grid",
            message: "grid must be at least 8".into(),
        });
    }
    let result = ne_search(&game.coefficients(), kind, grid, tol, cli.seed);

    let mut config = RunConfig::new("ne-search", cli.seed);
    config.game = Some(game_text.to_string());
    config.source = Some(source_text.to_string());
    config.grid = Some(grid);
    config.tol = Some(tol);

    if result.all_profiles {
        println!("payoffs are constant: every directional profile is an equilibrium");
    } else {
        println!(
            "found {} equilibria ({} unconverged starts, {} rejected fixed points)",
            result.certificates.len(),
            result.unconverged_starts,
            result.rejected_fixed_points
        );
        for (i, cert) in result.certificates.iter().enumerate() {
            let (ta, pa, tb, pb) = profile_degrees(&cert.profile);
            println!(
                "#{:<2} alice (theta={ta:.3}, phi={pa:.3})  bob (theta={tb:.3}, phi={pb:.3})  \
                 payoffs ({:.6}, {:.6})  improvements ({:.2e}, {:.2e})",
                i + 1,
                cert.payoffs.0,
                cert.payoffs.1,
                cert.alice_improvement,
                cert.bob_improvement
            );
        }
    }

    let results = NeSearchResults {
        source: kind.as_str().to_string(),
        grid,
        tol,
        all_profiles: result.all_profiles,
        unconverged_starts: result.unconverged_starts,
        rejected_fixed_points: result.rejected_fixed_points,
        certificates: result
            .certificates
            .iter()
            .map(CertificateRow::from)
            .collect(),
    };
    emit(cli, &config, &results, || {
        certificate_csv(&results.certificates)
    })
}

fn run_pd_demo(cli: &Cli, grid: usize, tol: f64) -> Result<()> {
    if grid < 8 {
        return Err(Error::InvalidFlag {
            flag: "--grid",
            message: "grid must be at least 8".into(),
        });
    }
    let report = pd_disappearance_experiment(grid, tol, cli.seed);

    let mut config = RunConfig::new("pd-demo", cli.seed);
    config.grid = Some(grid);
    config.tol = Some(tol);

    print_pd_demo(&report);
    emit(cli, &config, &report, || pd_demo_csv(&report))
}

fn print_pd_demo(report: &PdDemoReport) {
    println!(
        "prisoners' dilemma demonstration (grid {}, tol {:.1e})",
        report.grid_n, report.tolerance
    );
    println!(
        "classical: unique equilibrium (p, q) = ({}, {}), payoffs ({}, {})",
        report.classical_equilibrium.p(),
        report.classical_equilibrium.q(),
        report.classical_payoffs.0,
        report.classical_payoffs.1
    );
    println!(
        "hidden-variable source: {} directional equilibria ({} unconverged starts)",
        report.lhv_certificates.len(),
        report.lhv_unconverged_starts
    );
    for (i, check) in report.quantum_recheck.iter().enumerate() {
        let (ta, pa, tb, pb) = profile_degrees(&check.profile);
        println!(
            "#{:<2} alice (theta={ta:.2}, phi={pa:.2}) bob (theta={tb:.2}, phi={pb:.2}): \
             lhv improvements ({:.2e}, {:.2e}) -> quantum improvements ({:.2e}, {:.2e}){}",
            i + 1,
            check.lhv_improvements.0,
            check.lhv_improvements.1,
            check.quantum_improvements.0,
            check.quantum_improvements.1,
            if check.remains_equilibrium {
                " (still an equilibrium)"
            } else {
                " (destabilized)"
            }
        );
    }
    println!(
        "quantum region (grid {}): min p = {:.6}, violation fraction = {:.4}",
        report.region.grid_n, report.region.min_p, report.violation_fraction
    );
    println!(
        "attainable q is at least {:.6}; the classical equilibrium (q = {}) is {}",
        report.q_lower_bound,
        report.classical_equilibrium.q(),
        if report.classical_equilibrium_attainable {
            "attainable"
        } else {
            "not attainable by any direction pair"
        }
    );
    println!(
        "symmetric reconstruction of the violating-regime payoffs: {}",
        if report.symmetric_reconstruction_possible {
            "possible"
        } else {
            "impossible"
        }
    );
}

fn pd_demo_csv(report: &PdDemoReport) -> String {
    let mut body = String::from(
        "theta_a,phi_a,theta_b,phi_b,lhv_payoff_a,lhv_payoff_b,lhv_improvement_a,lhv_improvement_b,quantum_improvement_a,quantum_improvement_b,remains_equilibrium\n",
    );
    for check in &report.quantum_recheck {
        let (ta, pa, tb, pb) = profile_degrees(&check.profile);
        let _ = writeln!(
            body,
            "{},{},{},{},{},{},{},{},{},{},{}",
            sig9(ta),
            sig9(pa),
            sig9(tb),
            sig9(pb),
            sig9(check.lhv_payoffs.0),
            sig9(check.lhv_payoffs.1),
            sig9(check.lhv_improvements.0),
            sig9(check.lhv_improvements.1),
            sig9(check.quantum_improvements.0),
            sig9(check.quantum_improvements.1),
            check.remains_equilibrium
        );
    }
    body
}
