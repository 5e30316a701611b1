use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use discard_core::axioms::{verify_library, SoundnessReport, VerifyOptions};
use discard_core::cpm::{cp_residual, interpret_cpm, interpret_cpm_doubled, interpret_cpm_with, CpmError};
use discard_core::json::{
    choi_to_json, diagram_to_json, float_matrix_from_json, parse_diagram, parse_json, parse_proof, tensor_to_json,
};
use discard_core::proof::{verify_proof, ProofOptions};
use discard_core::properties::{
    cliffordt_counterexample, is_causal, is_isometry, iso_residual, iso_witness_qubit, purify,
};
use discard_core::semantics::{is_exact_representable, SemanticsError};
use discard_core::stab::{stab_conjugate_witness, stabilizer_states};
use discard_core::{interp, AnyTensor, Backend, Complex64, Diagram, ExactScalar, FloatTensor};

/// Discard construction over the ZX, ZW and ZH calculi.
///
/// Every option can also be set through an environment variable with the
/// DISCARD_ prefix, e.g. DISCARD_TOL=1e-12.
#[derive(Parser)]
#[command(name = "discard", version)]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Config {
    /// Scalar backend; defaults to exact when every parameter is representable.
    #[arg(long, global = true, env = "DISCARD_BACKEND", value_parser = parse_backend)]
    backend: Option<Backend>,
    /// Numerical tolerance.
    #[arg(long, global = true, env = "DISCARD_TOL", default_value_t = 1e-9, value_parser = parse_tol)]
    tol: f64,
    /// Seed for sampled parameters.
    #[arg(long, global = true, env = "DISCARD_SEED", default_value_t = 0)]
    seed: u64,
    /// Random float samples per parameter slot.
    #[arg(long, global = true, env = "DISCARD_SAMPLES", default_value_t = 25,
          value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    /// Upper bound on variadic leg counts.
    #[arg(long, global = true, env = "DISCARD_LEGS", default_value_t = 3)]
    legs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Matrix of a ground-free diagram.
    Interp { file: PathBuf },
    /// Choi matrix of a diagram's completely positive map.
    CpmInterp { file: PathBuf },
    /// Whether two ground-free diagrams have the same matrix.
    CheckEqual { a: PathBuf, b: PathBuf },
    /// Whether two diagrams give the same CP map, discarding the last x
    /// outputs of the first and the last y outputs of the second.
    CpEqual {
        f: PathBuf,
        g: PathBuf,
        #[arg(long, default_value_t = 0)]
        x: usize,
        #[arg(long, default_value_t = 0)]
        y: usize,
    },
    /// Whether a ground-free diagram is an isometry.
    Isometry { file: PathBuf },
    /// Whether discarding the outputs equals discarding the inputs.
    Causal { file: PathBuf },
    /// Replace every ground by an extra output.
    Purify { file: PathBuf },
    /// Isometries on the environments relating two purifications. Diagrams
    /// with grounds are purified first and their ancillas become X and Y.
    IsoWitness {
        f: PathBuf,
        g: PathBuf,
        #[arg(long, default_value_t = 0)]
        x: usize,
        #[arg(long, default_value_t = 0)]
        y: usize,
    },
    /// Check every rule of a library against the semantics.
    VerifyAxioms { library: String },
    /// Replay a proof script.
    VerifyProof {
        file: PathBuf,
        /// Also compare CPM semantics before and after every step.
        #[arg(long)]
        semantic_check: bool,
    },
    /// The scalar 1+2i is CP-equal to its conjugate but no ring element
    /// relates them.
    CounterexampleCliffordt,
    /// Clifford U with Uφ = conj(φ) up to phase, for bundled stabilizer states.
    StabWitness {
        /// Restrict to 1 or 2 qubits.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        qubits: Option<u8>,
        /// A single state vector (JSON list of numbers or [re, im] pairs).
        #[arg(long)]
        state: Option<PathBuf>,
    },
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    Backend::parse(s).ok_or_else(|| format!("unknown backend `{s}` (expected exact or float)"))
}

fn parse_tol(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
        _ => Err(format!("tolerance must be a positive number, got `{s}`")),
    }
}

/// Why a command stopped: a failed check (exit 1) or bad input (exit 2).
enum Failure {
    Check(String),
    Usage(String),
}

type Outcome = Result<(Value, bool), Failure>;

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn semantic(e: SemanticsError) -> Failure {
    match e {
        SemanticsError::GroundPresent => Failure::Check(format!("{e}")),
        other => usage(other),
    }
}

fn cpm_failure(e: CpmError) -> Failure {
    match e {
        CpmError::Semantics(s) => semantic(s),
        other => usage(other),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Diagram, Failure> {
    parse_diagram(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn backend_for(cfg: &Config, ds: &[&Diagram]) -> Result<Backend, Failure> {
    let exact = ds.iter().all(|d| is_exact_representable(d));
    match cfg.backend {
        Some(Backend::Exact) if !exact => Err(usage("parameters are not exactly representable; use --backend float")),
        Some(b) => Ok(b),
        None if exact => Ok(Backend::Exact),
        None => Ok(Backend::Float),
    }
}

fn matrix(t: &FloatTensor) -> Value {
    let rows: Vec<Value> =
        (0..t.rows()).map(|r| (0..t.cols()).map(|c| json!([t.get(r, c).re, t.get(r, c).im])).collect()).collect();
    Value::Array(rows)
}

fn cmd_interp(cfg: &Config, file: &Path) -> Outcome {
    let d = load(file)?;
    if d.contains_ground() {
        return Err(Failure::Check("diagram contains a ground; use cpm-interp".into()));
    }
    let b = backend_for(cfg, &[&d])?;
    let t = interp(&d, b).map_err(semantic)?;
    Ok((tensor_to_json(&t), true))
}

fn cmd_cpm_interp(cfg: &Config, file: &Path) -> Outcome {
    let d = load(file)?;
    let v = match backend_for(cfg, &[&d])? {
        Backend::Exact => {
            let s = interpret_cpm_with::<ExactScalar>(&d).map_err(cpm_failure)?;
            choi_to_json(&s, AnyTensor::Exact(s.choi().clone()))
        }
        Backend::Float => {
            let s = interpret_cpm(&d).map_err(cpm_failure)?;
            choi_to_json(&s, AnyTensor::Float(s.choi().clone()))
        }
    };
    Ok((v, true))
}

fn cmd_check_equal(cfg: &Config, a: &Path, b: &Path) -> Outcome {
    let (da, db) = (load(a)?, load(b)?);
    if da.contains_ground() || db.contains_ground() {
        return Err(Failure::Check("diagram contains a ground; use cp-equal".into()));
    }
    let backend = backend_for(cfg, &[&da, &db])?;
    let ta = interp(&da, backend).map_err(semantic)?;
    let tb = interp(&db, backend).map_err(semantic)?;
    let same_shape = ta.rows() == tb.rows() && ta.cols() == tb.cols();
    let residual = same_shape.then(|| ta.to_float().max_abs_diff(&tb.to_float()));
    let equal = same_shape && ta.equal(&tb, cfg.tol);
    Ok((json!({ "equal": equal, "backend": backend, "residual": residual, "tol": cfg.tol }), equal))
}

fn cmd_cp_equal(cfg: &Config, f: &Path, g: &Path, x: usize, y: usize) -> Outcome {
    let (df, dg) = (load(f)?, load(g)?);
    let residual = if df.contains_ground() || dg.contains_ground() {
        if x != 0 || y != 0 {
            return Err(usage("--x/--y apply to ground-free diagrams; grounds already discard"));
        }
        let sf = interpret_cpm(&df).map_err(cpm_failure)?;
        let sg = interpret_cpm(&dg).map_err(cpm_failure)?;
        let same = sf.in_qubits() == sg.in_qubits() && sf.out_qubits() == sg.out_qubits();
        same.then(|| sf.max_abs_diff(&sg))
    } else {
        cp_residual(&df, &dg, x, y).map_err(cpm_failure)?
    };
    let equal = residual.is_some_and(|r| r <= cfg.tol);
    Ok((json!({ "cp_equal": equal, "residual": residual, "x": x, "y": y, "tol": cfg.tol }), equal))
}

fn cmd_isometry(cfg: &Config, file: &Path) -> Outcome {
    let d = load(file)?;
    let ok = is_isometry(&d, cfg.tol).map_err(semantic)?;
    Ok((json!({ "isometry": ok, "tol": cfg.tol }), ok))
}

fn cmd_causal(cfg: &Config, file: &Path) -> Outcome {
    let d = load(file)?;
    let ok = is_causal(&d, cfg.tol).map_err(cpm_failure)?;
    Ok((json!({ "causal": ok, "tol": cfg.tol }), ok))
}

fn cmd_purify(cfg: &Config, file: &Path) -> Outcome {
    let d = load(file)?;
    let p = purify(&d);
    // Cross-check against the doubled-diagram route, which never purifies.
    let traced = interpret_cpm(&p.pure).map_err(cpm_failure)?.trace_outputs(p.ancilla_count);
    let oracle = interpret_cpm_doubled::<Complex64>(&d).map_err(cpm_failure)?;
    let residual = traced.max_abs_diff(&oracle);
    let placement: Vec<Value> = p.placement.iter().map(|(g, o)| json!({ "ground": g, "output": o })).collect();
    let ok = residual <= cfg.tol;
    let v = json!({
        "pure": diagram_to_json(&p.pure),
        "ancilla_count": p.ancilla_count,
        "placement": placement,
        "residual": residual,
    });
    Ok((v, ok))
}

fn cmd_iso_witness(cfg: &Config, f: &Path, g: &Path, x: usize, y: usize) -> Outcome {
    let (mut df, mut dg) = (load(f)?, load(g)?);
    let (mut x, mut y) = (x, y);
    if df.contains_ground() || dg.contains_ground() {
        let (pf, pg) = (purify(&df), purify(&dg));
        (x, y) = (x + pf.ancilla_count, y + pg.ancilla_count);
        (df, dg) = (pf.pure, pg.pure);
    }
    let w = iso_witness_qubit(&df, &dg, x, y, cfg.tol).map_err(cpm_failure)?;
    let v = match &w {
        Some(w) => {
            let mf = discard_core::interp_float(&df).map_err(semantic)?;
            let mg = discard_core::interp_float(&dg).map_err(semantic)?;
            json!({
                "related": true,
                "x": x,
                "y": y,
                "residual": iso_residual(&mf, &mg, w),
                "u": matrix(&w.u),
                "v": matrix(&w.v),
            })
        }
        None => json!({ "related": false, "x": x, "y": y }),
    };
    Ok((v, w.is_some()))
}

fn table(r: &SoundnessReport) -> String {
    let mut s = format!(
        "library {} (samples {}, tol {:e}, seed {}, legs <= {})\n",
        r.library, r.samples, r.tol, r.seed, r.max_legs
    );
    s += &format!("{:<22} {:<5} {:>6}  {:<11} {:>10}\n", "rule", "mode", "cases", "verdict", "residual");
    for x in &r.rules {
        let mode = serde_json::to_value(x.mode).unwrap();
        let verdict = serde_json::to_value(x.verdict).unwrap();
        s += &format!(
            "{:<22} {:<5} {:>6}  {:<11} {:>10.2e}\n",
            x.rule,
            mode.as_str().unwrap_or(""),
            x.instantiations,
            verdict.as_str().unwrap_or(""),
            x.max_residual
        );
        if let Some(n) = &x.note {
            s += &format!("    {n}\n");
        }
    }
    let sound = r.rules.iter().filter(|x| x.sound()).count();
    s += &format!("sound: {sound}/{}\n", r.rules.len());
    s
}

fn cmd_verify_axioms(cfg: &Config, lib: &str) -> Outcome {
    let opts = VerifyOptions {
        samples: cfg.samples as usize,
        tol: cfg.tol,
        backend: cfg.backend.unwrap_or(Backend::Exact),
        seed: cfg.seed,
        max_legs: cfg.legs,
    };
    let report = verify_library(lib, &opts).map_err(usage)?;
    eprint!("{}", table(&report));
    let ok = report.all_sound();
    Ok((serde_json::to_value(&report).expect("report serializes"), ok))
}

fn cmd_verify_proof(cfg: &Config, file: &Path, semantic_check: bool) -> Outcome {
    let script = parse_proof(&read(file)?).map_err(|e| usage(format!("{}: {e}", file.display())))?;
    let opts = ProofOptions { semantic_check, tol: cfg.tol, ..Default::default() };
    let report = verify_proof(&script, &opts);
    if let (Some(i), Some(e)) = (report.failed_step, &report.error) {
        eprintln!("step {i} failed: {e}");
    } else if let Some(e) = &report.error {
        eprintln!("{e}");
    }
    let ok = report.valid;
    Ok((serde_json::to_value(&report).expect("report serializes"), ok))
}

fn cmd_counterexample() -> Outcome {
    let r = cliffordt_counterexample();
    let ok = r.passed;
    Ok((serde_json::to_value(&r).expect("report serializes"), ok))
}

fn witness_json(phi: &FloatTensor) -> Result<(Value, bool), Failure> {
    match stab_conjugate_witness(phi).map_err(usage)? {
        Some(w) => Ok((
            json!({
                "found": true,
                "word": w.word,
                "phase": [w.phase.re, w.phase.im],
                "residual": w.residual,
            }),
            w.residual <= 1e-10,
        )),
        None => Ok((json!({ "found": false }), false)),
    }
}

fn cmd_stab_witness(qubits: Option<u8>, state: Option<&Path>) -> Outcome {
    if let Some(path) = state {
        let v = parse_json(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let phi = float_matrix_from_json(&v, "state").map_err(|e| usage(format!("{}: {e}", path.display())))?;
        return witness_json(&phi);
    }
    let sizes: Vec<usize> = match qubits {
        Some(q) => vec![q as usize],
        None => vec![1, 2],
    };
    let mut groups = Vec::new();
    let mut all = true;
    for q in sizes {
        let mut list = Vec::new();
        let mut max_residual = 0.0f64;
        for phi in stabilizer_states(q) {
            let (v, ok) = witness_json(phi)?;
            all &= ok;
            if let Some(r) = v["residual"].as_f64() {
                max_residual = max_residual.max(r);
            }
            list.push(json!({ "state": matrix(phi), "witness": v }));
        }
        groups.push(json!({ "qubits": q, "states": list.len(), "max_residual": max_residual, "witnesses": list }));
    }
    Ok((json!({ "all_found": all, "groups": groups }), all))
}

fn run(cli: &Cli) -> Outcome {
    let cfg = &cli.config;
    match &cli.command {
        Command::Interp { file } => cmd_interp(cfg, file),
        Command::CpmInterp { file } => cmd_cpm_interp(cfg, file),
        Command::CheckEqual { a, b } => cmd_check_equal(cfg, a, b),
        Command::CpEqual { f, g, x, y } => cmd_cp_equal(cfg, f, g, *x, *y),
        Command::Isometry { file } => cmd_isometry(cfg, file),
        Command::Causal { file } => cmd_causal(cfg, file),
        Command::Purify { file } => cmd_purify(cfg, file),
        Command::IsoWitness { f, g, x, y } => cmd_iso_witness(cfg, f, g, *x, *y),
        Command::VerifyAxioms { library } => cmd_verify_axioms(cfg, library),
        Command::VerifyProof { file, semantic_check } => cmd_verify_proof(cfg, file, *semantic_check),
        Command::CounterexampleCliffordt => cmd_counterexample(),
        Command::StabWitness { qubits, state } => cmd_stab_witness(*qubits, state.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((v, ok)) => {
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(&v).expect("values serialize"));
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Check(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
