//! JSON encoding of diagrams, parameters, tensors and proof scripts.
//!
//! A diagram is `{calculus, nodes, wires, inputs, outputs}`. Nodes are
//! `{id, kind, params, in_ports, out_ports}`; `wires` lists node-to-node
//! wires as pairs of port references; `inputs[i]` and `outputs[j]` give the
//! port each boundary slot is wired to. A port reference is
//! `{"node": id, "side": "in"|"out", "index": k}` or
//! `{"boundary": "in"|"out", "index": i}`.
//!
//! Phases are `{"pi": "p/q"}` (exact multiple of π) or `{"rad": x}`;
//! coefficients are `{"exact": "((a0,a1,a2,a3),k)"}` or `{"re": x, "im": y}`.

use num_complex::Complex64;
use num_rational::Rational64;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::axioms::Direction;
use crate::cpm::{Superoperator, CHOI_CONVENTION};
use crate::diagram::{Calculus, Diagram, Generator, Node, Port, Side};
use crate::param::{self, Bindings, Coeff, Phase};
use crate::proof::{ProofScript, ProofStep};
use crate::ring::{ExactScalar, Scalar};
use crate::tensor::{AnyTensor, Tensor};

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{path}: {message}")]
pub struct ParseError {
    pub path: String,
    pub message: String,
}

fn err<T>(path: &str, message: impl Into<String>) -> Result<T> {
    Err(ParseError { path: path.to_string(), message: message.into() })
}

type Result<T> = std::result::Result<T, ParseError>;

/// Parses JSON text, reporting syntax errors by line and column.
pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| ParseError {
        path: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })
}

fn field<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    match v.get(key) {
        Some(x) => Ok(x),
        None => err(path, format!("missing field `{key}`")),
    }
}

fn as_usize(v: &Value, path: &str) -> Result<usize> {
    match v.as_u64() {
        Some(n) => Ok(n as usize),
        None => err(path, "expected a non-negative integer"),
    }
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    match v.as_str() {
        Some(s) => Ok(s),
        None => err(path, "expected a string"),
    }
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    match v.as_array() {
        Some(a) => Ok(a),
        None => err(path, "expected an array"),
    }
}

fn as_f64(v: &Value, path: &str) -> Result<f64> {
    match v.as_f64() {
        Some(x) => Ok(x),
        None => err(path, "expected a number"),
    }
}

// Parameters.

pub fn phase_to_json(p: &Phase) -> Value {
    match p {
        Phase::Exact(r) if *r.denom() == 1 => json!({ "pi": r.numer().to_string() }),
        Phase::Exact(r) => json!({ "pi": format!("{}/{}", r.numer(), r.denom()) }),
        Phase::Float(x) => json!({ "rad": x }),
        Phase::Sym(_) => json!({ "symbolic": p.to_string() }),
    }
}

pub fn phase_from_json(v: &Value, path: &str) -> Result<Phase> {
    if let Some(pi) = v.get("pi") {
        let text = match pi {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            _ => return err(&format!("{path}.pi"), "expected a fraction such as \"1/4\""),
        };
        let (num, den) = match text.split_once('/') {
            Some((a, b)) => (a.trim().parse::<i64>(), b.trim().parse::<i64>()),
            None => (text.trim().parse::<i64>(), Ok(1)),
        };
        return match (num, den) {
            (Ok(n), Ok(d)) if d != 0 => {
                let r = Rational64::new(n, d);
                Ok(Phase::pi_frac(*r.numer(), *r.denom()))
            }
            _ => err(&format!("{path}.pi"), format!("`{text}` is not a fraction p/q")),
        };
    }
    if let Some(x) = v.get("rad") {
        return Ok(Phase::radians(as_f64(x, &format!("{path}.rad"))?));
    }
    err(path, "expected a phase {\"pi\": \"p/q\"} or {\"rad\": x}")
}

pub fn coeff_to_json(c: &Coeff) -> Value {
    match c {
        Coeff::Exact(x) => json!({ "exact": x.to_string() }),
        Coeff::Float(z) => json!({ "re": z.re, "im": z.im }),
        Coeff::Sym(e) => json!({ "symbolic": format!("{e:?}") }),
    }
}

pub fn coeff_from_json(v: &Value, path: &str) -> Result<Coeff> {
    if let Some(n) = v.as_i64() {
        return Ok(Coeff::int(n));
    }
    if let Some(x) = v.get("exact") {
        let s = as_str(x, &format!("{path}.exact"))?;
        return match s.parse::<ExactScalar>() {
            Ok(e) => Ok(Coeff::Exact(e)),
            Err(e) => err(&format!("{path}.exact"), e.to_string()),
        };
    }
    if let Some(re) = v.get("re") {
        let re = as_f64(re, &format!("{path}.re"))?;
        let im = match v.get("im") {
            Some(x) => as_f64(x, &format!("{path}.im"))?,
            None => 0.0,
        };
        return Ok(Coeff::Float(Complex64::new(re, im)));
    }
    err(path, "expected a coefficient {\"exact\": \"((a0,a1,a2,a3),k)\"} or {\"re\": x, \"im\": y}")
}

pub fn bindings_to_json(b: &Bindings) -> Value {
    let mut m = Map::new();
    for (k, v) in &b.0 {
        let x = match v {
            param::Value::Phase(p) => phase_to_json(p),
            param::Value::Coeff(c) => coeff_to_json(c),
        };
        m.insert(k.clone(), x);
    }
    Value::Object(m)
}

pub fn bindings_from_json(v: &Value, path: &str) -> Result<Bindings> {
    let Some(obj) = v.as_object() else {
        return err(path, "expected an object of variable bindings");
    };
    let mut b = Bindings::new();
    for (k, x) in obj {
        let p = format!("{path}.{k}");
        let is_phase = x.get("pi").is_some() || x.get("rad").is_some();
        let val = if is_phase {
            param::Value::Phase(phase_from_json(x, &p)?)
        } else {
            param::Value::Coeff(coeff_from_json(x, &p)?)
        };
        b.0.insert(k.clone(), val);
    }
    Ok(b)
}

// Diagrams.

fn side_name(s: Side) -> &'static str {
    match s {
        Side::In => "in",
        Side::Out => "out",
    }
}

fn parse_side(v: &Value, path: &str) -> Result<Side> {
    match as_str(v, path)? {
        "in" => Ok(Side::In),
        "out" => Ok(Side::Out),
        other => err(path, format!("side must be \"in\" or \"out\", got `{other}`")),
    }
}

pub fn port_to_json(p: Port) -> Value {
    match p {
        Port::Node { node, side, index } => json!({ "node": node, "side": side_name(side), "index": index }),
        Port::Boundary { side, index } => json!({ "boundary": side_name(side), "index": index }),
    }
}

pub fn port_from_json(v: &Value, path: &str) -> Result<Port> {
    let index = as_usize(field(v, "index", path)?, &format!("{path}.index"))?;
    if let Some(b) = v.get("boundary") {
        let side = parse_side(b, &format!("{path}.boundary"))?;
        return Ok(Port::Boundary { side, index });
    }
    if let Some(n) = v.get("node") {
        let node = as_usize(n, &format!("{path}.node"))?;
        let side = parse_side(field(v, "side", path)?, &format!("{path}.side"))?;
        return Ok(Port::Node { node, side, index });
    }
    err(path, "a port reference needs `node` (with `side`) or `boundary`")
}

/// Generator kinds accepted in each calculus.
pub fn valid_kinds(c: Calculus) -> &'static [&'static str] {
    match c {
        Calculus::ZX => &["Z", "X", "H", "Swap", "Cup", "Cap", "Ground"],
        Calculus::ZW => &["Z", "W", "FSwap", "Swap", "Cup", "Cap", "Ground"],
        Calculus::ZH => &["Z", "X", "H", "NOT", "Swap", "Cup", "Cap", "Ground"],
    }
}

fn params_to_json(g: &Generator) -> Option<Value> {
    match g {
        Generator::ZxZ(p) | Generator::ZxX(p) => Some(json!({ "phase": phase_to_json(p) })),
        Generator::ZwZ(r) => Some(json!({ "r": coeff_to_json(r) })),
        Generator::HBox(a) => Some(json!({ "a": coeff_to_json(a) })),
        _ => None,
    }
}

fn generator_from_json(c: Calculus, kind: &str, params: Option<&Value>, path: &str) -> Result<Generator> {
    let phase = |key: &str| -> Result<Phase> {
        match params.and_then(|p| p.get(key)) {
            Some(v) => phase_from_json(v, &format!("{path}.params.{key}")),
            None => Ok(Phase::zero()),
        }
    };
    let coeff = |key: &str, default: i64| -> Result<Coeff> {
        match params.and_then(|p| p.get(key)) {
            Some(v) => coeff_from_json(v, &format!("{path}.params.{key}")),
            None => Ok(Coeff::int(default)),
        }
    };
    let g = match (c, kind) {
        (Calculus::ZX, "Z") => Generator::ZxZ(phase("phase")?),
        (Calculus::ZX, "X") => Generator::ZxX(phase("phase")?),
        (Calculus::ZX, "H") => Generator::ZxH,
        (Calculus::ZW, "Z") => Generator::ZwZ(coeff("r", 1)?),
        (Calculus::ZW, "W") => Generator::ZwW,
        (Calculus::ZW, "FSwap") => Generator::FSwap,
        (Calculus::ZH, "Z") => Generator::ZhZ,
        (Calculus::ZH, "X") => Generator::ZhX,
        (Calculus::ZH, "H") => Generator::HBox(coeff("a", -1)?),
        (Calculus::ZH, "NOT") => Generator::Not,
        (_, "Swap") => Generator::Swap,
        (_, "Cup") => Generator::Cup,
        (_, "Cap") => Generator::Cap,
        (_, "Ground") => Generator::Ground,
        _ => {
            return err(
                &format!("{path}.kind"),
                format!("unknown generator `{kind}` for {c} (valid kinds: {})", valid_kinds(c).join(", ")),
            )
        }
    };
    Ok(g)
}

/// Deterministic encoding: nodes by ascending id, wires in port order.
pub fn diagram_to_json(d: &Diagram) -> Value {
    let nodes: Vec<Value> = d
        .nodes()
        .iter()
        .map(|(id, n)| {
            let mut o = Map::new();
            o.insert("id".into(), json!(id));
            o.insert("kind".into(), json!(n.gen.kind_name()));
            if let Some(p) = params_to_json(&n.gen) {
                o.insert("params".into(), p);
            }
            o.insert("in_ports".into(), json!(n.n_in));
            o.insert("out_ports".into(), json!(n.n_out));
            Value::Object(o)
        })
        .collect();
    let wires: Vec<Value> = d
        .wires()
        .into_iter()
        .filter(|(a, b)| a.node().is_some() && b.node().is_some())
        .map(|(a, b)| json!([port_to_json(a), port_to_json(b)]))
        .collect();
    let slot = |p: Port| d.partner(p).map(port_to_json).unwrap_or(Value::Null);
    let inputs: Vec<Value> = (0..d.num_inputs()).map(|i| slot(Port::b_in(i))).collect();
    let outputs: Vec<Value> = (0..d.num_outputs()).map(|j| slot(Port::b_out(j))).collect();
    json!({
        "calculus": d.calculus().name(),
        "nodes": nodes,
        "wires": wires,
        "inputs": inputs,
        "outputs": outputs,
    })
}

pub fn print_diagram(d: &Diagram) -> String {
    serde_json::to_string_pretty(&diagram_to_json(d)).expect("serializable")
}

fn port_exists(d: &Diagram, p: Port) -> bool {
    match p {
        Port::Node { node, side, index } => d.get(node).is_some_and(|n| match side {
            Side::In => index < n.n_in,
            Side::Out => index < n.n_out,
        }),
        Port::Boundary { side: Side::In, index } => index < d.num_inputs(),
        Port::Boundary { side: Side::Out, index } => index < d.num_outputs(),
    }
}

fn link(d: &mut Diagram, a: Port, b: Port, path: &str) -> Result<()> {
    for p in [a, b] {
        if !port_exists(d, p) {
            return err(path, format!("port {p} does not exist"));
        }
    }
    if a == b {
        return err(path, format!("port {a} is wired to itself"));
    }
    match (d.partner(a), d.partner(b)) {
        (Some(x), _) if x == b => Ok(()),
        (Some(x), _) => err(path, format!("port {a} is already wired to {x}")),
        (_, Some(y)) => err(path, format!("port {b} is already wired to {y}")),
        _ => {
            d.connect(a, b);
            Ok(())
        }
    }
}

pub fn diagram_from_json(v: &Value, path: &str) -> Result<Diagram> {
    let cpath = format!("{path}.calculus");
    let cname = as_str(field(v, "calculus", path)?, &cpath)?;
    let Some(c) = Calculus::parse(cname) else {
        return err(&cpath, format!("unknown calculus `{cname}` (expected ZX, ZW or ZH)"));
    };
    let inputs = as_array(field(v, "inputs", path)?, &format!("{path}.inputs"))?;
    let outputs = as_array(field(v, "outputs", path)?, &format!("{path}.outputs"))?;
    let mut d = Diagram::with_boundary(c, inputs.len(), outputs.len());
    let nodes = as_array(field(v, "nodes", path)?, &format!("{path}.nodes"))?;
    for (k, n) in nodes.iter().enumerate() {
        let np = format!("{path}.nodes[{k}]");
        let id = as_usize(field(n, "id", &np)?, &format!("{np}.id"))?;
        if d.get(id).is_some() {
            return err(&format!("{np}.id"), format!("duplicate node id {id}"));
        }
        let kind = as_str(field(n, "kind", &np)?, &format!("{np}.kind"))?;
        let gen = generator_from_json(c, kind, n.get("params"), &np)?;
        let fixed = gen.fixed_arity();
        let arity = |key: &str, dflt: Option<usize>| -> Result<usize> {
            match (n.get(key), dflt) {
                (Some(x), _) => as_usize(x, &format!("{np}.{key}")),
                (None, Some(a)) => Ok(a),
                (None, None) => err(&np, format!("missing field `{key}`")),
            }
        };
        let n_in = arity("in_ports", fixed.map(|f| f.0))?;
        let n_out = arity("out_ports", fixed.map(|f| f.1))?;
        if let Some((fi, fo)) = fixed {
            if (fi, fo) != (n_in, n_out) {
                return err(&np, format!("{kind} has arity {fi} -> {fo}, got {n_in} -> {n_out}"));
            }
        }
        d.insert_node(id, Node { gen, n_in, n_out });
    }
    let wires = as_array(field(v, "wires", path)?, &format!("{path}.wires"))?;
    for (k, w) in wires.iter().enumerate() {
        let wp = format!("{path}.wires[{k}]");
        let ends = match w.as_array() {
            Some(e) if e.len() == 2 => e,
            _ => return err(&wp, format!("wire {k} needs exactly two endpoints")),
        };
        let a = port_from_json(&ends[0], &format!("{wp}[0]"))?;
        let b = port_from_json(&ends[1], &format!("{wp}[1]"))?;
        link(&mut d, a, b, &wp)?;
    }
    for (side, list, name) in [(Side::In, inputs, "inputs"), (Side::Out, outputs, "outputs")] {
        for (i, r) in list.iter().enumerate() {
            let rp = format!("{path}.{name}[{i}]");
            let q = port_from_json(r, &rp)?;
            link(&mut d, Port::Boundary { side, index: i }, q, &rp)?;
        }
    }
    let violations = d.validate();
    if !violations.is_empty() {
        return err(path, format!("invalid diagram: {violations:?}"));
    }
    Ok(d)
}

pub fn parse_diagram(text: &str) -> Result<Diagram> {
    diagram_from_json(&parse_json(text)?, "diagram")
}

// Tensors.

fn entries<S: Scalar>(t: &Tensor<S>, f: impl Fn(&S) -> Value) -> Value {
    let rows: Vec<Value> = (0..t.rows())
        .map(|r| Value::Array((0..t.cols()).map(|c| f(t.get(r, c))).collect()))
        .collect();
    Value::Array(rows)
}

pub fn tensor_to_json(t: &AnyTensor) -> Value {
    match t {
        AnyTensor::Exact(m) => json!({
            "backend": "exact",
            "rows": m.rows(),
            "cols": m.cols(),
            "entries": entries(m, |x| json!(x.to_string())),
        }),
        AnyTensor::Float(m) => json!({
            "backend": "float",
            "rows": m.rows(),
            "cols": m.cols(),
            "entries": entries(m, |z| json!([z.re, z.im])),
        }),
    }
}

pub fn choi_to_json<S: Scalar>(s: &Superoperator<S>, t: AnyTensor) -> Value {
    json!({
        "convention": CHOI_CONVENTION,
        "in_qubits": s.in_qubits(),
        "out_qubits": s.out_qubits(),
        "choi": tensor_to_json(&t),
    })
}

/// Reads a state vector or matrix of float entries `[re, im]` (or plain
/// numbers) given as a list of rows, or a flat list for a column vector.
pub fn float_matrix_from_json(v: &Value, path: &str) -> Result<crate::tensor::FloatTensor> {
    let entry = |x: &Value, p: &str| -> Result<Complex64> {
        if let Some(r) = x.as_f64() {
            return Ok(Complex64::new(r, 0.0));
        }
        match x.as_array().map(|a| a.as_slice()) {
            Some([re, im]) => Ok(Complex64::new(as_f64(re, p)?, as_f64(im, p)?)),
            _ => err(p, "expected a number or [re, im]"),
        }
    };
    let rows = as_array(v, path)?;
    let nested = rows.first().is_some_and(|r| r.as_array().is_some_and(|a| a.iter().all(|x| x.is_array())));
    if !nested {
        let data = rows.iter().enumerate().map(|(i, x)| entry(x, &format!("{path}[{i}]"))).collect::<Result<Vec<_>>>()?;
        return Ok(Tensor::from_vec(data.len(), 1, data));
    }
    let mut data = Vec::new();
    let mut cols = None;
    for (i, r) in rows.iter().enumerate() {
        let rp = format!("{path}[{i}]");
        let row = as_array(r, &rp)?;
        if *cols.get_or_insert(row.len()) != row.len() {
            return err(&rp, "rows have different lengths");
        }
        for (j, x) in row.iter().enumerate() {
            data.push(entry(x, &format!("{rp}[{j}]"))?);
        }
    }
    Ok(Tensor::from_vec(rows.len(), cols.unwrap_or(0), data))
}

// Proof scripts.

fn dir_name(d: Direction) -> &'static str {
    match d {
        Direction::LeftToRight => "lr",
        Direction::RightToLeft => "rl",
    }
}

pub fn proof_to_json(s: &ProofScript) -> Value {
    let steps: Vec<Value> = s
        .steps
        .iter()
        .map(|st| {
            let mut o = json!({
                "rule": st.rule,
                "library": st.library,
                "dir": dir_name(st.dir),
                "index": st.index,
                "legs": st.legs,
            });
            if !st.bindings.0.is_empty() {
                o["bindings"] = bindings_to_json(&st.bindings);
            }
            o
        })
        .collect();
    json!({
        "initial": diagram_to_json(&s.initial),
        "steps": steps,
        "final": diagram_to_json(&s.final_diagram),
    })
}

pub fn proof_from_json(v: &Value) -> Result<ProofScript> {
    let initial = diagram_from_json(field(v, "initial", "proof")?, "proof.initial")?;
    let final_diagram = diagram_from_json(field(v, "final", "proof")?, "proof.final")?;
    let list = as_array(field(v, "steps", "proof")?, "proof.steps")?;
    let mut steps = Vec::new();
    for (k, s) in list.iter().enumerate() {
        let sp = format!("proof.steps[{k}]");
        let rule = as_str(field(s, "rule", &sp)?, &format!("{sp}.rule"))?.to_string();
        let library = as_str(field(s, "library", &sp)?, &format!("{sp}.library"))?.to_string();
        let dtext = match s.get("dir") {
            Some(x) => as_str(x, &format!("{sp}.dir"))?,
            None => "lr",
        };
        let Some(dir) = Direction::parse(dtext) else {
            return err(&format!("{sp}.dir"), format!("direction must be \"lr\" or \"rl\", got `{dtext}`"));
        };
        let index = match s.get("index") {
            Some(x) => as_usize(x, &format!("{sp}.index"))?,
            None => 0,
        };
        let legs = match s.get("legs") {
            Some(x) => as_array(x, &format!("{sp}.legs"))?
                .iter()
                .enumerate()
                .map(|(i, l)| as_usize(l, &format!("{sp}.legs[{i}]")))
                .collect::<Result<Vec<_>>>()?,
            None => vec![],
        };
        let bindings = match s.get("bindings") {
            Some(x) => bindings_from_json(x, &format!("{sp}.bindings"))?,
            None => Bindings::new(),
        };
        steps.push(ProofStep { rule, library, dir, index, legs, bindings });
    }
    Ok(ProofScript { initial, steps, final_diagram })
}

pub fn parse_proof(text: &str) -> Result<ProofScript> {
    proof_from_json(&parse_json(text)?)
}
