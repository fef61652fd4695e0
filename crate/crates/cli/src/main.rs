use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use qsp_core::baa::{baa_search, synth_plan, ApproxPlan, CostFn};
use qsp_core::circuit::qasm::{emit_qasm, parse_qasm};
use qsp_core::circuit::sampling::{mae, sample, simulate_noisy, ShotCounts};
use qsp_core::cost::lrsp_estimate;
use qsp_core::measures::{fidelity, measure};
use qsp_core::state::StateVector;
use qsp_core::synthesis::{lrsp, LrspConfig};
use qsp_core::{Bipartition, Circuit64, Error, StateVector64};

#[derive(Parser)]
#[command(name = "qsp", version, about = "Schmidt-rank state preparation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entanglement measures of a state file
    Measure {
        /// State file: {"n": int, "amplitudes": [[re, im], ...]}
        #[arg(long)]
        state: PathBuf,
        /// Comma-separated qubits on side A (default: first half)
        #[arg(long, value_delimiter = ',')]
        subset_a: Option<Vec<usize>>,
    },
    /// Synthesize a preparation circuit for a state file
    Synth {
        #[arg(long)]
        state: PathBuf,
        /// Keep at most this many Schmidt coefficients
        #[arg(long)]
        rank: Option<usize>,
        /// Write OPENQASM 2.0 here
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the JSON report here
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Search for a product plan within a fidelity-loss budget
    Baa {
        #[arg(long)]
        state: PathBuf,
        /// Total fidelity loss budget in [0, 1]
        #[arg(long)]
        max_loss: f64,
        #[arg(long, value_enum, default_value_t = CostArg::Model)]
        cost: CostArg,
        /// Write the synthesized OPENQASM here
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the plan JSON here
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// Sample an OPENQASM circuit, optionally with CNOT depolarizing noise
    Simulate {
        #[arg(long)]
        qasm: PathBuf,
        #[arg(long, default_value_t = 8192)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Two-qubit depolarizing probability per CNOT
        #[arg(long)]
        noise_cnot: Option<f64>,
        /// State file to score MAE (and fidelity when noiseless) against
        #[arg(long)]
        target: Option<PathBuf>,
    },
    /// CSV over m = 0..k: rank cap 2^m against the analytic estimate
    Sweep {
        #[arg(long, conflicts_with = "random")]
        state: Option<PathBuf>,
        /// Draw a random n-qubit state instead of reading a file
        #[arg(long, value_name = "N_QUBITS")]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CostArg {
    Model,
    Realized,
}

enum CliError {
    /// exit 2: unreadable or invalid input files
    Input(String),
    /// exit 3: invalid argument values
    Arg(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::ParseError { .. } => CliError::Input(e.to_string()),
            Error::InvalidInput(_) | Error::ResourceLimit(_) => CliError::Arg(e.to_string()),
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code =
                if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                    0
                } else {
                    3
                };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(()) => {}
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
        Err(CliError::Arg(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(3);
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let started = Instant::now();
    match cli.command {
        Command::Measure { state, subset_a } => cmd_measure(&state, subset_a, started),
        Command::Synth { state, rank, out, report } => {
            cmd_synth(&state, rank, out.as_deref(), report.as_deref(), started)
        }
        Command::Baa { state, max_loss, cost, out, plan } => {
            cmd_baa(&state, max_loss, cost, out.as_deref(), plan.as_deref(), started)
        }
        Command::Simulate { qasm, shots, seed, noise_cnot, target } => {
            cmd_simulate(&qasm, shots, seed, noise_cnot, target.as_deref(), started)
        }
        Command::Sweep { state, random, seed, out } => {
            cmd_sweep(state.as_deref(), random, seed, out.as_deref(), started)
        }
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(serde::Deserialize)]
struct StateFile {
    n: usize,
    amplitudes: Vec<[f64; 2]>,
}

fn input_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn load_state(path: &Path) -> Result<(StateVector64, String), CliError> {
    let bytes = std::fs::read(path).map_err(|e| input_err(path, e))?;
    let digest = hex_digest(&bytes);
    let sf: StateFile = serde_json::from_slice(&bytes).map_err(|e| input_err(path, e))?;
    if sf.n < 1 || sf.n > 26 {
        return Err(input_err(path, format!("qubit count {} unsupported", sf.n)));
    }
    if sf.amplitudes.len() != 1usize << sf.n {
        return Err(input_err(
            path,
            format!("expected {} amplitudes, found {}", 1usize << sf.n, sf.amplitudes.len()),
        ));
    }
    let amps: Vec<Complex<f64>> =
        sf.amplitudes.iter().map(|&[re, im]| Complex::new(re, im)).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if !norm.is_finite() || (norm - 1.0).abs() > 1e-3 {
        return Err(input_err(path, format!("state norm {norm} too far from 1")));
    }
    if (norm - 1.0).abs() > 1e-6 {
        eprintln!("warning: {}: norm {norm} deviates from 1, renormalizing", path.display());
    }
    Ok((StateVector::new_unchecked(sf.n, amps).normalized(), digest))
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content).map_err(|e| input_err(path, e))
}

fn envelope(
    command: &str,
    digest: Option<&str>,
    seed: Option<u64>,
    mut body: Value,
    started: Instant,
) -> Value {
    let obj = body.as_object_mut().expect("body is an object");
    obj.insert("schema".into(), json!("v1"));
    obj.insert("command".into(), json!(command));
    obj.insert("inputDigest".into(), json!(digest));
    obj.insert("seed".into(), json!(seed));
    obj.insert(
        "timings".into(),
        json!({"totalMs": started.elapsed().as_secs_f64() * 1e3}),
    );
    body
}

/// Analytic estimates are displayed rounded up to whole CNOTs.
fn display_estimate(est: f64) -> i64 {
    est.ceil() as i64
}

fn model_estimate_for(n: usize, m: usize) -> Result<f64, CliError> {
    if n < 2 {
        return Ok(0.0);
    }
    Ok(lrsp_estimate(n, m).map(|e| e.total_f64())?)
}

fn cmd_measure(
    state: &Path,
    subset_a: Option<Vec<usize>>,
    started: Instant,
) -> Result<(), CliError> {
    let (psi, digest) = load_state(state)?;
    if psi.n < 2 {
        return Err(CliError::Arg("measures need at least 2 qubits".into()));
    }
    let universe: Vec<usize> = (0..psi.n).collect();
    let bp = match subset_a {
        Some(a) => Bipartition::split(&universe, &a)?,
        None => Bipartition::half_split(psi.n)?,
    };
    let rep = measure(&psi, &bp)?;
    let body = json!({
        "bipartition": {"subsetA": bp.a(), "subsetB": bp.b()},
        "measures": {
            "purity": rep.purity,
            "schmidtRank": rep.schmidt_rank,
            "schmidtMeasure": rep.schmidt_measure,
            "mQubits": rep.m_qubits,
            "meyerWallach": rep.meyer_wallach,
        },
    });
    println!("{}", envelope("measure", Some(&digest), None, body, started));
    Ok(())
}

fn cmd_synth(
    state: &Path,
    rank: Option<usize>,
    out: Option<&Path>,
    report: Option<&Path>,
    started: Instant,
) -> Result<(), CliError> {
    if let Some(r) = rank {
        if r < 1 {
            return Err(CliError::Arg("rank cap must be at least 1".into()));
        }
    }
    let (psi, digest) = load_state(state)?;
    let cfg = LrspConfig { r: rank, ..LrspConfig::default() };
    let (circ, rep) = lrsp(&psi, &cfg)?;
    if let Some(path) = out {
        write_file(path, &emit_qasm(&circ))?;
    }
    let body = json!({
        "report": {
            "n": rep.n,
            "rank": rep.rank,
            "m": rep.m,
            "predictedLoss": rep.predicted_loss,
            "cnots": rep.cnots,
            "depth": rep.depth,
            "modelEstimate": display_estimate(rep.model_estimate),
            "phaseBreakdown": rep.phase_breakdown,
        },
    });
    let text = envelope("synth", Some(&digest), None, body, started).to_string();
    if let Some(path) = report {
        write_file(path, &text)?;
    }
    println!("{text}");
    Ok(())
}

fn plan_json(plan: &ApproxPlan<f64>) -> Value {
    json!({
        "costFn": match plan.cost_fn {
            CostFn::Model => "model",
            CostFn::Realized => "realized",
        },
        "totalLoss": plan.total_loss,
        "predictedCnots": plan.predicted_cnots,
        "savedCnots": plan.saved_cnots,
        "steps": plan.steps.iter().map(|s| json!({
            "factorQubits": s.factor_qubits,
            "subsetA": s.bipartition.a(),
            "stepLoss": s.step_loss,
        })).collect::<Vec<_>>(),
        "factors": plan.factors.iter().map(|f| json!({
            "qubits": f.qubits,
            "amplitudes": f.state.amplitudes.iter().map(|a| [a.re, a.im]).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

fn cmd_baa(
    state: &Path,
    max_loss: f64,
    cost: CostArg,
    out: Option<&Path>,
    plan_path: Option<&Path>,
    started: Instant,
) -> Result<(), CliError> {
    if !(0.0..=1.0).contains(&max_loss) {
        return Err(CliError::Arg(format!("loss budget {max_loss} outside [0, 1]")));
    }
    let (psi, digest) = load_state(state)?;
    let cost_fn = match cost {
        CostArg::Model => CostFn::Model,
        CostArg::Realized => CostFn::Realized,
    };
    let plan = baa_search(&psi, max_loss, cost_fn)?;
    if let Some(path) = out {
        let circ = synth_plan(&plan)?;
        write_file(path, &emit_qasm(&circ))?;
    }
    let body = json!({"plan": plan_json(&plan)});
    let text = envelope("baa", Some(&digest), None, body, started).to_string();
    if let Some(path) = plan_path {
        write_file(path, &text)?;
    }
    println!("{text}");
    Ok(())
}

fn histogram_json(counts: &ShotCounts) -> Value {
    let map: serde_json::Map<String, Value> = counts
        .histogram
        .iter()
        .map(|(&x, &c)| (x.to_string(), json!(c)))
        .collect();
    json!({"shots": counts.shots, "counts": map})
}

fn cmd_simulate(
    qasm: &Path,
    shots: u64,
    seed: u64,
    noise_cnot: Option<f64>,
    target: Option<&Path>,
    started: Instant,
) -> Result<(), CliError> {
    if shots < 1 {
        return Err(CliError::Arg("shots must be at least 1".into()));
    }
    let p = noise_cnot.unwrap_or(0.0);
    if !(0.0..=1.0).contains(&p) {
        return Err(CliError::Arg(format!("noise probability {p} outside [0, 1]")));
    }
    let text = std::fs::read_to_string(qasm).map_err(|e| input_err(qasm, e))?;
    let digest = hex_digest(text.as_bytes());
    let circ: Circuit64 = parse_qasm(&text).map_err(|e| input_err(qasm, e))?;

    let target_state = match target {
        Some(path) => {
            let (t, _) = load_state(path)?;
            if t.n != circ.n {
                return Err(input_err(
                    path,
                    format!("target has {} qubits, circuit has {}", t.n, circ.n),
                ));
            }
            Some(t)
        }
        None => None,
    };

    let counts =
        if p > 0.0 { simulate_noisy(&circ, p, shots, seed) } else { sample(&circ.simulate(), shots, seed) };

    let mut body = json!({
        "n": circ.n,
        "shots": shots,
        "noiseCnot": p,
        "histogram": histogram_json(&counts),
    });
    if let Some(t) = &target_state {
        let obj = body.as_object_mut().unwrap();
        obj.insert("mae".into(), json!(mae(&counts, t)));
        if p == 0.0 {
            obj.insert("fidelity".into(), json!(fidelity(&circ.simulate(), t)?));
        }
    }
    println!("{}", envelope("simulate", Some(&digest), Some(seed), body, started));
    Ok(())
}

fn cmd_sweep(
    state: Option<&Path>,
    random: Option<usize>,
    seed: u64,
    out: Option<&Path>,
    started: Instant,
) -> Result<(), CliError> {
    let _ = started;
    let (psi, _digest) = match (state, random) {
        (Some(path), None) => load_state(path)?,
        (None, Some(n)) => {
            if !(1..=26).contains(&n) {
                return Err(CliError::Arg(format!("random qubit count {n} unsupported")));
            }
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            (StateVector::random_uniform(n, &mut rng), String::new())
        }
        _ => {
            return Err(CliError::Arg("provide exactly one of --state or --random".into()));
        }
    };

    let k = psi.n / 2;
    let mut csv = String::from("m,cnots,depth,predicted_loss,model_estimate\n");
    for m in 0..=k {
        let cfg = LrspConfig { r: Some(1usize << m), ..LrspConfig::default() };
        let (_, rep) = lrsp(&psi, &cfg)?;
        let est = display_estimate(model_estimate_for(psi.n, m)?);
        csv.push_str(&format!(
            "{m},{},{},{},{est}\n",
            rep.cnots, rep.depth, rep.predicted_loss
        ));
    }
    match out {
        Some(path) => write_file(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}
