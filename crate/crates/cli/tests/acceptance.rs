//! Acceptance run: one PASS/FAIL line per criterion, then a single assertion.

use std::io::Write;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use discard_core::axioms::LIBRARY_NAMES;
use discard_core::cpm::{apply_kraus, cp_equal, discard_outputs, double, interpret_cpm, kraus_from_choi};
use discard_core::param::{Coeff, Phase};
use discard_core::properties::{check_iso_related, cliffordt_counterexample, iso_witness_qubit, purify};
use discard_core::random::{random_density, random_diagram, random_diagram_with_boundary, random_isometric_circuit, random_isometry, Shape};
use discard_core::stab::{stab_conjugate_witness, stabilizer_states};
use discard_core::{builders, interp_exact, interp_float, Calculus, Diagram, ExactScalar, ExactTensor, Generator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_discard"));
    for var in ["DISCARD_BACKEND", "DISCARD_TOL", "DISCARD_SEED", "DISCARD_SAMPLES", "DISCARD_LEGS"] {
        cmd.env_remove(var);
    }
    cmd
}

fn fixture(rel: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", rel].iter().collect();
    p.to_string_lossy().into_owned()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ints(rows: usize, cols: usize, v: &[i64]) -> ExactTensor {
    ExactTensor::from_ints(rows, cols, v)
}

fn kron_pow(m: &ExactTensor, k: usize) -> ExactTensor {
    (0..k).fold(ExactTensor::identity(1), |acc, _| acc.kron(m))
}

/// Z-type tensor: 1 at the all-zero corner plus `last` at the all-one corner.
fn corner(n: usize, m: usize, last: &ExactScalar) -> ExactTensor {
    let mut t = ExactTensor::zeros(1 << m, 1 << n);
    t.set(0, 0, ExactScalar::one());
    let (r, c) = ((1 << m) - 1, (1 << n) - 1);
    let prev = t.get(r, c).clone();
    t.set(r, c, prev.add(last));
    t
}

fn golden_table() -> Vec<(String, Diagram, ExactTensor)> {
    let zx = Calculus::ZX;
    let h = ints(2, 2, &[1, 1, 1, -1]);
    let hn = h.scale(&ExactScalar::sqrt2_pow(-1));
    let swap = ints(4, 4, &[1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1]);
    let diag = |a: ExactScalar| ExactTensor::from_vec(2, 2, vec![ExactScalar::one(), ExactScalar::zero(), ExactScalar::zero(), a]);
    let mut rows = vec![
        ("H".to_string(), builders::h(zx).unwrap(), hn.clone()),
        ("S".into(), builders::s(zx).unwrap(), diag(ExactScalar::i())),
        ("T".into(), builders::t(zx).unwrap(), diag(ExactScalar::omega_pow(1))),
        ("CNot".into(), builders::cnot(zx).unwrap(), ints(4, 4, &[1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0])),
        ("ket0".into(), builders::ket0(zx).unwrap(), ints(2, 1, &[1, 0])),
    ];
    for c in [Calculus::ZX, Calculus::ZW, Calculus::ZH] {
        rows.push((format!("cup {c}"), builders::cup(c), ints(1, 4, &[1, 0, 0, 1])));
        rows.push((format!("cap {c}"), builders::cap(c), ints(4, 1, &[1, 0, 0, 1])));
        rows.push((format!("swap {c}"), builders::swap(c), swap.clone()));
    }
    for n in 0..=2 {
        for m in 0..=2 {
            for k in 0..8 {
                let z = corner(n, m, &ExactScalar::omega_pow(k));
                let x = kron_pow(&hn, m).matmul(&z).unwrap().matmul(&kron_pow(&hn, n)).unwrap();
                let a = Phase::pi_frac(k, 4);
                rows.push((format!("Z({n},{m},{k}π/4)"), Diagram::node(zx, Generator::ZxZ(a.clone()), n, m), z));
                rows.push((format!("X({n},{m},{k}π/4)"), Diagram::node(zx, Generator::ZxX(a), n, m), x));
            }
            let r = ExactScalar::from_int(-2);
            let zw = Diagram::node(Calculus::ZW, Generator::ZwZ(Coeff::Exact(r.clone())), n, m);
            rows.push((format!("ZW Z({n},{m})"), zw, corner(n, m, &r)));
            let w = ExactTensor::from_fn(1 << m, 1 << n, |i, j| {
                if i.count_ones() + j.count_ones() == 1 { ExactScalar::one() } else { ExactScalar::zero() }
            });
            rows.push((format!("W({n},{m})"), Diagram::node(Calculus::ZW, Generator::ZwW, n, m), w));
            let a = ExactScalar::omega_pow(3);
            let mut hbox = ExactTensor::from_fn(1 << m, 1 << n, |_, _| ExactScalar::one());
            hbox.set((1 << m) - 1, (1 << n) - 1, a.clone());
            rows.push((format!("H-box({n},{m})"), Diagram::node(Calculus::ZH, Generator::HBox(Coeff::Exact(a)), n, m), hbox));
        }
    }
    rows.push(("fermionic swap".into(), Diagram::node(Calculus::ZW, Generator::FSwap, 2, 2), ints(4, 4, &[1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, -1])));
    rows.push(("negation".into(), Diagram::node(Calculus::ZH, Generator::Not, 1, 1), ints(2, 2, &[0, 1, 1, 0])));
    rows
}

fn golden() -> Outcome {
    let table = golden_table();
    for (name, d, expected) in &table {
        let e = interp_exact(d).map_err(|e| format!("{name}: {e}"))?;
        ensure(&e == expected, || format!("{name}: exact mismatch"))?;
        let r = interp_float(d).unwrap().max_abs_diff(&expected.to_float());
        ensure(r <= 1e-12, || format!("{name}: float residual {r:e}"))?;
    }
    Ok(format!("{} matrices", table.len()))
}

fn axioms() -> Outcome {
    let mut rules = 0;
    for lib in LIBRARY_NAMES {
        let out = bin().args(["--tol", "1e-9", "verify-axioms", lib]).output().map_err(|e| e.to_string())?;
        let v: Value = serde_json::from_slice(&out.stdout).map_err(|e| format!("{lib}: {e}"))?;
        let rs = v["rules"].as_array().cloned().unwrap_or_default();
        let bad: Vec<&str> = rs.iter().filter(|r| r["verdict"] == "unsound").filter_map(|r| r["rule"].as_str()).collect();
        ensure(out.status.code() == Some(0) && bad.is_empty(), || format!("{lib}: unsound {bad:?}"))?;
        let cpm = lib.ends_with("ground");
        ensure(rs.iter().all(|r| (r["mode"] == "cpm") == cpm), || format!("{lib}: wrong mode"))?;
        if lib == "zx-pi2" {
            ensure(rs.iter().all(|r| r["verdict"] == "exact"), || "zx-pi2 is not fully exact".into())?;
        }
        rules += rs.len();
    }
    Ok(format!("{rules} rules in {} libraries", LIBRARY_NAMES.len()))
}

fn counterexample() -> Outcome {
    let r = cliffordt_counterexample();
    ensure(r.cp_equal, || "cp_equal is false".into())?;
    ensure(r.exact_quotient.is_none(), || "exact quotient exists".into())?;
    let [re, im] = r.float_quotient;
    ensure((re + 0.6).abs() <= 1e-12 && (im - 0.8).abs() <= 1e-12, || format!("quotient {re}+{im}i"))?;
    Ok(format!("quotient {re:.3}{im:+.3}i"))
}

fn purification() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cs = [Calculus::ZX, Calculus::ZW, Calculus::ZH];
    let (mut worst, mut grounded) = (0.0f64, 0);
    for i in 0..200 {
        let d = random_diagram(&mut rng, cs[i % 3], Shape { max_wires: 4, max_nodes: 15, max_grounds: 3 });
        let p = purify(&d);
        grounded += (p.ancilla_count > 0) as usize;
        let traced = double(&interp_float(&p.pure).unwrap()).trace_outputs(p.ancilla_count);
        worst = worst.max(traced.max_abs_diff(&interpret_cpm(&d).unwrap()));
    }
    ensure(worst <= 1e-9, || format!("max residual {worst:e}"))?;
    ensure(grounded >= 100, || format!("only {grounded} diagrams carry a ground"))?;
    Ok(format!("{grounded} with grounds, max residual {worst:.1e}"))
}

struct Pair {
    f: Diagram,
    g: Diagram,
    x: usize,
    y: usize,
}

/// g = (1 ⊗ u)∘f with an isometry u into at most two environment qubits.
fn related_pairs() -> Vec<Pair> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cs = [Calculus::ZX, Calculus::ZW, Calculus::ZH];
    (0..100)
        .map(|i| {
            let c = cs[i % 3];
            let a = rng.gen_range(0..=1);
            let b = rng.gen_range(0..=1);
            let x = rng.gen_range(0..=2usize.min(3 - a - b));
            let y = rng.gen_range(x..=2);
            let f = random_diagram_with_boundary(&mut rng, c, a, b + x, 8);
            let u = random_isometry(&mut rng, c, x, y, 4);
            let g = Diagram::identity(c, b).tensor(&u).unwrap().compose(&f).unwrap();
            Pair { f, g, x, y }
        })
        .collect()
}

fn unrelated_pairs() -> Vec<Pair> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut out = Vec::new();
    while out.len() < 100 {
        let c = [Calculus::ZX, Calculus::ZW, Calculus::ZH][out.len() % 3];
        let (n, m, x) = (rng.gen_range(0..=1), rng.gen_range(0..=1), rng.gen_range(0..=1));
        let f = random_diagram_with_boundary(&mut rng, c, n, m + x, 8);
        let g = random_diagram_with_boundary(&mut rng, c, n, m + x, 8);
        if cp_equal(&f, &g, x, x, 1e-9).unwrap() {
            continue;
        }
        out.push(Pair { f, g, x, y: x });
    }
    out
}

fn witnesses() -> Outcome {
    for (i, p) in related_pairs().iter().enumerate() {
        let w = iso_witness_qubit(&p.f, &p.g, p.x, p.y, 1e-9).unwrap().ok_or(format!("pair {i}: no witness"))?;
        ensure(check_iso_related(&p.f, &p.g, &w, 1e-8).unwrap(), || format!("pair {i}: witness fails"))?;
    }
    for (i, p) in unrelated_pairs().iter().enumerate() {
        let w = iso_witness_qubit(&p.f, &p.g, p.x, p.y, 1e-9).unwrap();
        ensure(w.is_none(), || format!("unrelated pair {i}: spurious witness"))?;
    }
    Ok("100 witnessed, 100 rejected".into())
}

fn causality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let c = if i % 2 == 0 { Calculus::ZX } else { Calculus::ZH };
        let n = rng.gen_range(0..=3);
        let d = random_isometric_circuit(&mut rng, c, n, 3, 10);
        let lhs = interpret_cpm(&discard_outputs(&d)).unwrap();
        let rhs = interpret_cpm(&builders::ground(c, d.num_inputs())).unwrap();
        worst = worst.max(lhs.max_abs_diff(&rhs));
    }
    ensure(worst <= 1e-9, || format!("max residual {worst:e}"))?;
    Ok(format!("max residual {worst:.1e}"))
}

fn witness_implies_cp_equal() -> Outcome {
    let mut witnessed = 0;
    for (i, p) in related_pairs().iter().enumerate() {
        if iso_witness_qubit(&p.f, &p.g, p.x, p.y, 1e-9).unwrap().is_some() {
            witnessed += 1;
            ensure(cp_equal(&p.f, &p.g, p.x, p.y, 1e-9).unwrap(), || format!("pair {i}: violation"))?;
        }
    }
    Ok(format!("{witnessed} witnessed, 0 violations"))
}

fn stabilizers() -> Outcome {
    let mut worst = 0.0f64;
    for q in [1, 2] {
        let states = stabilizer_states(q);
        let want = if q == 1 { 6 } else { 60 };
        ensure(states.len() == want, || format!("{q} qubits: {} states", states.len()))?;
        for (i, phi) in states.iter().enumerate() {
            let w = stab_conjugate_witness(phi).unwrap().ok_or(format!("{q} qubits, state {i}: no witness"))?;
            worst = worst.max(w.residual);
        }
    }
    ensure(worst <= 1e-10, || format!("max residual {worst:e}"))?;
    Ok(format!("66 states, max residual {worst:.1e}"))
}

fn kraus_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let cs = [Calculus::ZX, Calculus::ZW, Calculus::ZH];
    let mut worst = 0.0f64;
    for i in 0..50 {
        let d = random_diagram(&mut rng, cs[i % 3], Shape { max_wires: 4, max_nodes: 12, max_grounds: 3 });
        let s = interpret_cpm(&d).unwrap();
        let rho = random_density(&mut rng, s.in_qubits());
        let oracle = apply_kraus(&kraus_from_choi(&s, 1e-13), &rho).unwrap();
        let scale = s.choi().data().iter().fold(1.0f64, |m, z| m.max(z.norm()));
        worst = worst.max(s.apply(&rho).unwrap().max_abs_diff(&oracle) / scale);
    }
    ensure(worst <= 1e-9, || format!("max relative residual {worst:e}"))?;
    Ok(format!("max relative residual {worst:.1e}"))
}

fn proofs() -> Outcome {
    for p in ["h2_cancellation", "spider_fusion_chain", "ground_cnot_absorption"] {
        let out = bin().args(["verify-proof", &fixture(&format!("proofs/{p}.json"))]).output().unwrap();
        ensure(out.status.code() == Some(0), || format!("{p}: exit {:?}", out.status.code()))?;
    }
    let out = bin().args(["verify-proof", &fixture("proofs/corrupted.json")]).output().unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(1) && v["failed_step"] == 1, || format!("corrupted: {v}"))?;
    Ok("3 valid, corrupted fails at step 1".into())
}

#[test]
fn acceptance() {
    let limit = |s| Some(Duration::from_secs(s));
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 10] = [
        ("generator golden matrices", golden, limit(5)),
        ("axiom soundness", axioms, limit(60)),
        ("Clifford+T counterexample", counterexample, limit(1)),
        ("purification round-trip", purification, None),
        ("Stinespring witnesses", witnesses, None),
        ("causality of isometries", causality, None),
        ("witness implies cp-equal", witness_implies_cp_equal, None),
        ("stabilizer conjugate witnesses", stabilizers, limit(60)),
        ("CPM Kraus oracle", kraus_oracle, None),
        ("proof checker", proofs, None),
    ];
    // Written to the raw handle so the lines survive libtest's output capture.
    let mut log = std::io::stderr().lock();
    let mut failed = Vec::new();
    for (i, (name, run, max)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let mut result = run();
        let took = start.elapsed();
        if let (Ok(_), Some(max)) = (&result, max) {
            if took > max {
                result = Err(format!("took {took:.2?}, limit {max:?}"));
            }
        }
        match result {
            Ok(detail) => writeln!(log, "PASS {:>2} {name}: {detail} ({took:.2?})", i + 1).unwrap(),
            Err(why) => {
                writeln!(log, "FAIL {:>2} {name}: {why} ({took:.2?})", i + 1).unwrap();
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
