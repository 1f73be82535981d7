use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use threeqb::canonical::{curve_family, maximize, CurveFamily, Objective};
use threeqb::classify::{classify, Witness as ClassWitness, DEFAULT_TOL, WITNESS_NAMES};
use threeqb::io::{curve_csv, format_f64, StateFile};
use threeqb::locc::{find_counterexample, run_monotonicity_suite, CounterexampleTarget, Measure};
use threeqb::measures::lu_invariants;
use threeqb::rng::{sample_haar_state, RngStream};
use threeqb::verify::{ckw_suite, identities_suite, ordering_suite};
use threeqb::{Error, InvariantReport, PureState};

/// Polynomial entanglement measures of three-qubit pure states.
#[derive(Parser)]
#[command(name = "threeqb", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// LU invariants and the measures τ, ω, c_{a|bc} of a state.
    Compute {
        /// State file path or `builtin:<name>`.
        #[arg(long)]
        state: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// SLOCC class and FTS rank.
    Classify {
        #[arg(long)]
        state: String,
        /// Relative tolerance for treating a measure as zero.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Runs a verification suite: ordering, ckw, identities,
    /// monotonicity:<measure> or counterexample:<target>.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the JSON summary here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the witness or worst-case state file here.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Measures along a one-parameter family of states.
    Curve {
        #[arg(long, value_parser = parse_family)]
        family: CurveFamily,
        #[arg(long, default_value_t = 201)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Multi-start maximization over the canonical form.
    Maximize {
        #[arg(long, value_parser = parse_objective)]
        objective: Objective,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes Haar-random state files.
    Random {
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn parse_family(s: &str) -> Result<CurveFamily, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_objective(s: &str) -> Result<Objective, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::PatternInconsistent(_)) { 3 } else { 2 };
        Self { code, message: e.to_string() }
    }
}

type CliResult = Result<ExitCode, Failure>;

fn load_state(arg: &str) -> Result<(PureState, Option<String>), Failure> {
    if let Some(name) = arg.strip_prefix("builtin:") {
        let psi = PureState::named(name)
            .ok_or_else(|| Failure::usage(format!("unknown builtin state '{name}' (known: {})", PureState::NAMES.join(", "))))?;
        return Ok((psi, Some(name.to_string())));
    }
    let file = StateFile::read(Path::new(arg))?;
    Ok((file.to_state()?, file.label))
}

fn pretty(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    if let Some(path) = out {
        std::fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    }
    print!("{text}");
    Ok(())
}

fn report_csv(r: &InvariantReport) -> String {
    let fields = [r.n2, r.i1, r.i2, r.i3, r.i4, r.i5, r.tau, r.omega, r.c1_23, r.c2_13, r.c3_12];
    let row: Vec<String> = fields.iter().map(|&x| format_f64(x)).collect();
    format!("n2,i1,i2,i3,i4,i5,tau,omega,c1_23,c2_13,c3_12\n{}\n", row.join(","))
}

fn cmd_compute(state: &str, format: Format) -> CliResult {
    let (psi, label) = load_state(state)?;
    let report = lu_invariants(&psi);
    let text = match format {
        Format::Csv => report_csv(&report),
        Format::Json => {
            let class = classify(&psi, DEFAULT_TOL).ok().map(|c| (c.class.to_string(), c.fts_rank));
            let mut v = serde_json::to_value(report).expect("report serializes");
            v["label"] = json!(label);
            v["class"] = json!(class.as_ref().map(|c| &c.0));
            v["fts_rank"] = json!(class.map(|c| c.1));
            pretty(&v)
        }
    };
    emit(&text, None)?;
    Ok(ExitCode::SUCCESS)
}

fn witness_json(w: &ClassWitness) -> Value {
    let entries = WITNESS_NAMES
        .iter()
        .zip(w.values.iter().zip(w.marginal))
        .map(|(name, (value, marginal))| json!({ "quantity": name, "value": value, "marginal": marginal }));
    Value::Array(entries.collect())
}

fn cmd_classify(state: &str, tol: f64) -> CliResult {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Failure::usage(format!("--tol must be positive, got {tol}")));
    }
    let (psi, _) = load_state(state)?;
    let c = classify(&psi, tol)?;
    let v = json!({
        "class": c.class.to_string(),
        "fts_rank": c.fts_rank,
        "tol": tol,
        "witness": witness_json(&c.witness),
    });
    emit(&pretty(&v), None)?;
    if c.witness.marginal.iter().any(|&m| m) {
        eprintln!("warning: some quantities lie within a factor 10 of the tolerance; the class is poorly conditioned");
    }
    Ok(ExitCode::SUCCESS)
}

fn state_file_json(psi: &PureState, label: String) -> Value {
    serde_json::to_value(StateFile::from_state(psi, Some(label))).expect("state file serializes")
}

fn cmd_verify(suite: &str, trials: u64, seed: u64, out: Option<&Path>, witness: Option<&Path>) -> CliResult {
    if trials == 0 {
        return Err(Failure::usage("--trials must be at least 1"));
    }
    let (kind, arg) = suite.split_once(':').unwrap_or((suite, ""));
    let (passed, mut summary, dump): (bool, Value, Option<(PureState, String)>) = match (kind, arg) {
        ("ordering" | "ckw" | "identities", "") => {
            let report = match kind {
                "ordering" => ordering_suite(trials, seed)?,
                "ckw" => ckw_suite(trials, seed)?,
                _ => identities_suite(trials, seed)?,
            };
            let dump = report.failure().map(|w| (w.state, format!("{kind} worst case, seed {seed}, trial {}", w.trial)));
            (report.passed, serde_json::to_value(&report).expect("report serializes"), dump)
        }
        ("monotonicity", name) => {
            let measure: Measure = name.parse()?;
            let stats = run_monotonicity_suite(&measure, trials, seed)?;
            // Monotones must show no violation; the known non-monotones must show one.
            let expect_monotone = measure.is_monotone().unwrap_or(true);
            let passed = (stats.violations == 0) == expect_monotone;
            let dump = stats
                .worst
                .as_ref()
                .filter(|_| !passed || !expect_monotone)
                .map(|w| (w.state, format!("monotonicity:{} worst case, seed {seed}, trial {}", measure.name(), w.trial)));
            let mut v = serde_json::to_value(&stats).expect("stats serialize");
            v["expect_monotone"] = json!(expect_monotone);
            (passed, v, dump)
        }
        ("counterexample", name) => {
            let target: CounterexampleTarget = name.parse()?;
            let found = find_counterexample(target, trials, seed)?;
            // τ is a monotone, so for it the search is a negative control.
            let expect_found = target != CounterexampleTarget::Tau;
            let passed = found.is_some() == expect_found;
            let dump =
                found.map(|w| (w.state, format!("counterexample:{} witness, seed {seed}, trial {}", target.name(), w.trial)));
            let v = json!({
                "suite": suite,
                "target": target.name(),
                "max_trials": trials,
                "seed": seed,
                "expect_found": expect_found,
                "found": found.is_some(),
                "witness": found,
                "verified": found.map(|w| w.verify()),
            });
            (passed, v, dump)
        }
        _ => return Err(Failure::usage(format!("unknown suite '{suite}'"))),
    };
    summary["suite"] = json!(suite);
    summary["passed"] = json!(passed);
    if let Some((psi, label)) = &dump {
        summary["witness_state"] = state_file_json(psi, label.clone());
        if let Some(path) = witness {
            StateFile::from_state(psi, Some(label.clone())).write(path)?;
        }
    }
    emit(&pretty(&summary), out)?;
    if passed {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("verify {suite}: FAILED");
        Ok(ExitCode::from(1))
    }
}

fn cmd_curve(family: CurveFamily, samples: usize, out: Option<&Path>, format: Format) -> CliResult {
    let rows = curve_family(family, samples)?;
    let bad = rows
        .iter()
        .filter(|r| {
            let tol = 1e-10;
            let cs = [r.c1_23, r.c2_13, r.c3_12];
            r.tau < -tol || r.omega < r.tau - tol || cs.iter().any(|&c| c < r.omega - tol || c > 1.0 + tol)
        })
        .count();
    if bad > 0 {
        eprintln!("warning: {bad} rows violate 0 ≤ τ ≤ ω ≤ c ≤ 1");
    }
    let text = match format {
        Format::Csv => curve_csv(&rows),
        Format::Json => pretty(&json!({ "family": family.name(), "rows": rows })),
    };
    emit(&text, out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_maximize(objective: Objective, restarts: usize, seed: u64, out: Option<&Path>) -> CliResult {
    let m = maximize(objective, restarts, seed)?;
    let (known, _) = objective.known_optimum();
    let mut v = serde_json::to_value(&m).expect("maximum serializes");
    v["known_optimum"] = json!(known);
    emit(&pretty(&v), out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_random(count: usize, seed: u64, out: &Path) -> CliResult {
    if count == 0 {
        return Err(Failure::usage("--count must be at least 1"));
    }
    std::fs::create_dir_all(out).map_err(|e| Failure::usage(format!("{}: {e}", out.display())))?;
    let width = count.to_string().len().max(4);
    let mut files = Vec::with_capacity(count);
    for k in 0..count {
        let psi = sample_haar_state(&mut RngStream::derive(seed, k as u64));
        let path = out.join(format!("state_{k:0width$}.json"));
        StateFile::from_state(&psi, Some(format!("haar seed {seed} index {k}"))).write(&path)?;
        files.push(path.display().to_string());
    }
    emit(&pretty(&json!({ "count": count, "seed": seed, "files": files })), None)?;
    Ok(ExitCode::SUCCESS)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("THREEQB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::usage(format!("THREEQB_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::usage(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> CliResult {
    configure_threads()?;
    match cli.command {
        Command::Compute { state, format } => cmd_compute(&state, format),
        Command::Classify { state, tol } => cmd_classify(&state, tol),
        Command::Verify { suite, trials, seed, out, witness } => {
            cmd_verify(&suite, trials, seed, out.as_deref(), witness.as_deref())
        }
        Command::Curve { family, samples, out, format } => cmd_curve(family, samples, out.as_deref(), format),
        Command::Maximize { objective, restarts, seed, out } => cmd_maximize(objective, restarts, seed, out.as_deref()),
        Command::Random { count, seed, out } => cmd_random(count, seed, &out),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
