// Copyright 2026 The ghzdist developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Command-line front-end: constructs bases, lists block decompositions,
//! analyzes distinguishability, simulates protocols, and runs the PPT
//! SDP, all with JSON input/output.
//!
//! Every command prints a report envelope to stdout; `--out` additionally
//! writes the bare results payload to a file so outputs feed back into
//! other commands (e.g. `basis --out b.json` then `analyze --basis
//! b.json`). Output is byte-identical for identical inputs and seeds;
//! wall-clock timing is only attached with `--timings`.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use ghzdist::blocks::{blocks_for, Bipartition};
use ghzdist::bounds::{analyze_set, hayashi_bound, max_perfect_set_with_signs, structural_bound};
use ghzdist::error::Error;
use ghzdist::ghz::{bitstring, Basis, Sign, StateLabel, StateSet};
use ghzdist::locc::{
    build_block_protocol, build_pair_id_protocol, run_report, SpatialConfiguration,
};
use ghzdist::qla::{CMatrix, DensityOperator, C64};
use ghzdist::sdp::{global_success_bound, ppt_success_bound, DiscriminationInstance};

#[derive(Parser)]
#[command(
    name = "ghzdist",
    version,
    about = "Multiqubit conjugate-pair bases: construction, LOCC distinguishability analysis, \
             protocol simulation and PPT certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit compact single-line JSON instead of pretty-printed.
    #[arg(long, global = true)]
    json: bool,
    /// Attach wall-clock timing to the envelope (breaks byte-for-byte
    /// reproducibility of the output).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a basis and emit it as JSON.
    Basis(BasisArgs),
    /// List the two-pair blocks induced by bipartitions of the qubits.
    Blocks(BlocksArgs),
    /// Analyze a state set: bounds, block witnesses, verdict.
    Analyze(AnalyzeArgs),
    /// Emit the maximal perfectly distinguishable set construction.
    Construct(ConstructArgs),
    /// Simulate an LOCC protocol on a state set and report per-state
    /// outcome probabilities.
    Simulate(SimulateArgs),
    /// Solve the discrimination SDP (PPT-constrained or collective).
    Sdp(SdpArgs),
}

#[derive(Args)]
struct BasisArgs {
    /// Number of qubits (N >= 2).
    #[arg(long)]
    n: usize,
    /// One of: maximal, computational, hybrid:<K>, random[:<seed>].
    #[arg(long, conflicts_with = "alpha_sq")]
    preset: Option<String>,
    /// Seed for the random preset (alternative to random:<seed>).
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated alpha^2 values, one per pair in canonical order.
    #[arg(long)]
    alpha_sq: Option<String>,
    /// Write the bare basis JSON here as well.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BlocksArgs {
    /// Basis JSON file.
    #[arg(long)]
    basis: PathBuf,
    /// Restrict to one bipartition, e.g. "0|12"; default: all canonical
    /// bipartitions.
    #[arg(long)]
    bipartition: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Basis JSON file.
    #[arg(long)]
    basis: PathBuf,
    /// Set spec, e.g. "all", "all-plus", "pair:0:both,prod:2:k",
    /// "all,!pair:1:-".
    #[arg(long)]
    set: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConstructArgs {
    /// Basis JSON file.
    #[arg(long)]
    basis: PathBuf,
    /// One sign character (+ or -) per pair; degenerate pairs ignore
    /// theirs. Default: all '+'.
    #[arg(long)]
    signs: Option<String>,
    /// Verify the construction with the pair-identification protocol
    /// under full separation.
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Basis JSON file.
    #[arg(long)]
    basis: PathBuf,
    /// Set spec (see `analyze`).
    #[arg(long)]
    set: String,
    /// Spatial configuration, party groups separated by '|', e.g.
    /// "0|1|2" or "0|12".
    #[arg(long)]
    config: String,
    /// Protocol: "pair-id" (computational measurements, any
    /// configuration) or "block" (two-round pair projection + sign
    /// resolution; needs a two-party configuration).
    #[arg(long, default_value = "pair-id")]
    protocol: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SdpArgs {
    /// Instance JSON file: {"states": [...], "priors": [...], "cut":
    /// "0|1"} or {"basis": {...}, "labels": [...], ...}.
    #[arg(long, conflicts_with_all = ["basis", "labels"])]
    instance: Option<PathBuf>,
    /// Basis JSON file (with --labels).
    #[arg(long, requires = "labels")]
    basis: Option<PathBuf>,
    /// Set spec selecting the ensemble members.
    #[arg(long)]
    labels: Option<String>,
    /// Cut for the PPT constraint, e.g. "0|1".
    #[arg(long)]
    cut: Option<String>,
    /// Comma-separated priors; default uniform.
    #[arg(long)]
    priors: Option<String>,
    /// Drop the PPT constraint (collective measurements).
    #[arg(long)]
    global: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Envelope {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    inputs: Value,
    results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing_ms: Option<u128>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let outcome = match &cli.command {
        Command::Basis(args) => cmd_basis(args),
        Command::Blocks(args) => cmd_blocks(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Construct(args) => cmd_construct(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Sdp(args) => cmd_sdp(args),
    };
    match outcome {
        Ok((command, inputs, results, out)) => {
            if let Some(path) = out {
                let payload = render(&results, cli.json);
                if let Err(e) = fs::write(&path, payload + "\n") {
                    eprintln!("ghzdist: cannot write {}: {e}", path.display());
                    return ExitCode::FAILURE;
                }
            }
            let envelope = Envelope {
                tool: "ghzdist",
                version: env!("CARGO_PKG_VERSION"),
                command,
                inputs,
                results,
                timing_ms: cli.timings.then(|| started.elapsed().as_millis()),
            };
            println!("{}", render_envelope(&envelope, cli.json));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("ghzdist: {e}");
            ExitCode::FAILURE
        }
    }
}

fn render(value: &Value, compact: bool) -> String {
    if compact {
        serde_json::to_string(value).expect("serialization cannot fail")
    } else {
        serde_json::to_string_pretty(value).expect("serialization cannot fail")
    }
}

fn render_envelope(envelope: &Envelope, compact: bool) -> String {
    if compact {
        serde_json::to_string(envelope).expect("serialization cannot fail")
    } else {
        serde_json::to_string_pretty(envelope).expect("serialization cannot fail")
    }
}

type CommandOutput = Result<(&'static str, Value, Value, Option<PathBuf>), Error>;

fn load_basis(path: &PathBuf) -> Result<Basis, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
    Basis::from_json(&text)
}

fn cmd_basis(args: &BasisArgs) -> CommandOutput {
    let basis = if let Some(list) = &args.alpha_sq {
        let alpha_sqs: Vec<f64> = list
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad alpha^2 value '{s}'")))
            })
            .collect::<Result<_, _>>()?;
        Basis::from_alpha_sq(args.n, &alpha_sqs)?
    } else {
        let preset = args.preset.as_deref().unwrap_or("maximal");
        match preset {
            "maximal" => Basis::maximal(args.n)?,
            "computational" => Basis::computational(args.n)?,
            _ => {
                if let Some(k) = preset.strip_prefix("hybrid:") {
                    let k: usize = k
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad hybrid preset '{preset}'")))?;
                    Basis::hybrid(args.n, k)?
                } else if preset == "random" || preset.starts_with("random:") {
                    let seed = match preset.strip_prefix("random:") {
                        Some(s) => s
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad seed in '{preset}'")))?,
                        None => args.seed.ok_or_else(|| {
                            Error::invalid("random preset needs --seed or random:<seed>")
                        })?,
                    };
                    Basis::random(args.n, seed)?
                } else {
                    return Err(Error::Parse(format!(
                        "unknown preset '{preset}' (maximal, computational, hybrid:<K>, \
                         random:<seed>)"
                    )));
                }
            }
        }
    };
    let inputs = json!({
        "n": args.n,
        "preset": args.preset,
        "seed": args.seed,
        "alpha_sq": args.alpha_sq,
    });
    let results = serde_json::to_value(&basis).expect("basis serializes");
    Ok(("basis", inputs, results, args.out.clone()))
}

fn cmd_blocks(args: &BlocksArgs) -> CommandOutput {
    let basis = load_basis(&args.basis)?;
    let n = basis.num_qubits();
    let cuts = match &args.bipartition {
        Some(s) => vec![Bipartition::from_str(s)?],
        None => Bipartition::enumerate(n)?,
    };
    let mut rows = Vec::new();
    for cut in &cuts {
        let blocks: Vec<Value> = blocks_for(&basis, cut)?
            .iter()
            .map(|b| {
                json!({
                    "pair_i_k": bitstring(b.pair_i, n),
                    "pair_j_k": bitstring(b.pair_j, n),
                    "kind": b.kind.to_string(),
                })
            })
            .collect();
        rows.push(json!({ "bipartition": cut.to_string(), "blocks": blocks }));
    }
    let inputs = json!({
        "basis": args.basis.display().to_string(),
        "bipartition": args.bipartition,
    });
    Ok((
        "blocks",
        inputs,
        json!({ "bipartitions": rows }),
        args.out.clone(),
    ))
}

fn witnesses_json(witnesses: &[ghzdist::bounds::Witness], n: usize) -> Vec<Value> {
    witnesses
        .iter()
        .map(|w| {
            json!({
                "bipartition": w.bipartition.to_string(),
                "pair_i_k": bitstring(w.pair_i, n),
                "pair_j_k": bitstring(w.pair_j, n),
                "kind": w.kind,
                "labels": w.labels,
            })
        })
        .collect()
}

fn cmd_analyze(args: &AnalyzeArgs) -> CommandOutput {
    let basis = load_basis(&args.basis)?;
    let set = StateSet::parse(&basis, &args.set)?;
    let verdict = analyze_set(&set)?;
    let results = json!({
        "status": verdict.status,
        "set_size": set.cardinality(),
        "hayashi_bound": verdict.bounds.hayashi,
        "structural_bound": verdict.bounds.structural,
        "avg_entanglement": set.average_entanglement()?,
        "conclusive_labels": verdict.conclusive_labels,
        "witnesses": witnesses_json(&verdict.witnesses, basis.num_qubits()),
    });
    let inputs = json!({
        "basis": args.basis.display().to_string(),
        "set": args.set,
    });
    Ok(("analyze", inputs, results, args.out.clone()))
}

fn cmd_construct(args: &ConstructArgs) -> CommandOutput {
    let basis = load_basis(&args.basis)?;
    let signs: Vec<Sign> = match &args.signs {
        Some(s) => {
            if s.chars().count() != basis.pair_count() {
                return Err(Error::invalid(format!(
                    "--signs needs {} characters, one per pair",
                    basis.pair_count()
                )));
            }
            s.chars()
                .map(|c| match c {
                    '+' => Ok(Sign::Plus),
                    '-' => Ok(Sign::Minus),
                    _ => Err(Error::Parse(format!("bad sign character '{c}'"))),
                })
                .collect::<Result<_, _>>()?
        }
        None => vec![Sign::Plus; basis.pair_count()],
    };
    let set = max_perfect_set_with_signs(&basis, |p| signs[p]);
    let mut results = json!({
        "labels": set.labels(),
        "size": set.cardinality(),
        "hayashi_bound": hayashi_bound(&set)?,
        "structural_bound": structural_bound(&basis),
    });
    if args.verify {
        let config = SpatialConfiguration::fully_separated(basis.num_qubits());
        let tree = build_pair_id_protocol(&basis, &config, &set)?;
        let (ok, report) = ghzdist::locc::verify_perfect(&tree, &set)?;
        results["verified_perfect"] = json!(ok);
        results["min_success"] = json!(report.min_success());
    }
    let inputs = json!({
        "basis": args.basis.display().to_string(),
        "signs": args.signs,
        "verify": args.verify,
    });
    Ok(("construct", inputs, results, args.out.clone()))
}

fn cmd_simulate(args: &SimulateArgs) -> CommandOutput {
    let basis = load_basis(&args.basis)?;
    let set = StateSet::parse(&basis, &args.set)?;
    let tree = match args.protocol.as_str() {
        "pair-id" => {
            let config = SpatialConfiguration::from_str(&args.config)?;
            build_pair_id_protocol(&basis, &config, &set)?
        }
        "block" => {
            let cut = Bipartition::from_str(&args.config)?;
            build_block_protocol(&set, &cut)?
        }
        other => {
            return Err(Error::Parse(format!(
                "unknown protocol '{other}' (pair-id, block)"
            )));
        }
    };
    let report = run_report(&tree, &set)?;
    let results = json!({
        "protocol": args.protocol,
        "config": args.config,
        "entries": report.entries,
        "min_success": report.min_success(),
    });
    let inputs = json!({
        "basis": args.basis.display().to_string(),
        "set": args.set,
        "config": args.config,
        "protocol": args.protocol,
    });
    Ok(("simulate", inputs, results, args.out.clone()))
}

fn parse_priors(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad prior '{p}'")))
        })
        .collect()
}

/// Parse a complex matrix serialized as rows of [re, im] pairs.
fn matrix_from_value(value: &Value) -> Result<CMatrix, Error> {
    let rows = value
        .as_array()
        .ok_or_else(|| Error::Parse("state matrix must be an array of rows".into()))?;
    let dim = rows.len();
    let mut m = CMatrix::zeros(dim, dim);
    for (r, row) in rows.iter().enumerate() {
        let cols = row
            .as_array()
            .filter(|c| c.len() == dim)
            .ok_or_else(|| Error::Parse(format!("row {r} must have {dim} entries")))?;
        for (c, entry) in cols.iter().enumerate() {
            let pair = entry
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| Error::Parse("matrix entries are [re, im] pairs".into()))?;
            let re = pair[0]
                .as_f64()
                .ok_or_else(|| Error::Parse("bad re".into()))?;
            let im = pair[1]
                .as_f64()
                .ok_or_else(|| Error::Parse("bad im".into()))?;
            m[(r, c)] = C64::new(re, im);
        }
    }
    Ok(m)
}

fn matrix_to_value(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|r| {
                Value::Array(
                    (0..m.cols())
                        .map(|c| json!([m[(r, c)].re, m[(r, c)].im]))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn instance_from_file(
    path: &PathBuf,
    cut_flag: Option<&str>,
) -> Result<DiscriminationInstance, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
    let doc: Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("bad instance JSON: {e}")))?;

    let cut = match doc.get("cut").and_then(|c| c.as_str()).or(cut_flag) {
        Some(s) => Some(Bipartition::from_str(s)?),
        None => None,
    };

    let states: Vec<DensityOperator> = if let Some(list) = doc.get("states") {
        let list = list
            .as_array()
            .ok_or_else(|| Error::Parse("'states' must be an array".into()))?;
        list.iter()
            .map(|v| {
                let m = matrix_from_value(v)?;
                let dim = m.rows();
                if !dim.is_power_of_two() || dim < 2 {
                    return Err(Error::invalid(format!(
                        "state dimension {dim} is not a power of two"
                    )));
                }
                DensityOperator::from_matrix(dim.trailing_zeros() as usize, m)
            })
            .collect::<Result<_, _>>()?
    } else if let Some(basis_doc) = doc.get("basis") {
        let basis: Basis = serde_json::from_value(basis_doc.clone())
            .map_err(|e| Error::Parse(format!("bad basis in instance: {e}")))?;
        let labels = doc
            .get("labels")
            .and_then(|l| l.as_array())
            .ok_or_else(|| Error::Parse("instance with 'basis' needs 'labels'".into()))?;
        labels
            .iter()
            .map(|l| {
                let s = l
                    .as_str()
                    .ok_or_else(|| Error::Parse("labels must be strings".into()))?;
                let label: StateLabel = s.parse()?;
                Ok(DensityOperator::from_state(&basis.state_vector(&label)?))
            })
            .collect::<Result<_, Error>>()?
    } else {
        return Err(Error::Parse(
            "instance needs either 'states' or 'basis' + 'labels'".into(),
        ));
    };

    match doc.get("priors") {
        Some(p) => {
            let priors: Vec<f64> = p
                .as_array()
                .ok_or_else(|| Error::Parse("'priors' must be an array".into()))?
                .iter()
                .map(|v| v.as_f64().ok_or_else(|| Error::Parse("bad prior".into())))
                .collect::<Result<_, _>>()?;
            DiscriminationInstance::new(states, priors, cut)
        }
        None => DiscriminationInstance::uniform(states, cut),
    }
}

fn cmd_sdp(args: &SdpArgs) -> CommandOutput {
    let instance = if let Some(path) = &args.instance {
        instance_from_file(path, args.cut.as_deref())?
    } else if let (Some(basis_path), Some(labels)) = (&args.basis, &args.labels) {
        let basis = load_basis(basis_path)?;
        let set = StateSet::parse(&basis, labels)?;
        let cut = match &args.cut {
            Some(s) => Some(Bipartition::from_str(s)?),
            None => None,
        };
        let states: Vec<DensityOperator> = set
            .labels()
            .iter()
            .map(|l| Ok(DensityOperator::from_state(&basis.state_vector(l)?)))
            .collect::<Result<_, Error>>()?;
        match &args.priors {
            Some(p) => DiscriminationInstance::new(states, parse_priors(p)?, cut)?,
            None => DiscriminationInstance::uniform(states, cut)?,
        }
    } else {
        return Err(Error::invalid(
            "sdp needs --instance FILE or --basis FILE --labels SPEC",
        ));
    };

    let solution = if args.global {
        global_success_bound(&instance)?
    } else {
        ppt_success_bound(&instance)?
    };
    let mut results = json!({
        "mode": if args.global { "global" } else { "ppt" },
        "primal": solution.primal_value,
        "dual": solution.dual_value,
        "gap": solution.gap,
        "iterations": solution.iterations,
        "converged": solution.converged,
        "completeness_residual": solution.completeness_residual,
        "min_measurement_eigenvalue": solution.min_measurement_eigenvalue,
        "measurements": solution.measurements.iter().map(matrix_to_value).collect::<Vec<_>>(),
    });
    if !args.global {
        results["verdict"] = json!(solution.verdict());
        results["ppt_min_eigenvalue"] = json!(solution.ppt_min_eigenvalue);
    }
    let inputs = json!({
        "instance": args.instance.as_ref().map(|p| p.display().to_string()),
        "basis": args.basis.as_ref().map(|p| p.display().to_string()),
        "labels": args.labels,
        "cut": args.cut,
        "priors": args.priors,
        "global": args.global,
    });
    Ok(("sdp", inputs, results, args.out.clone()))
}
