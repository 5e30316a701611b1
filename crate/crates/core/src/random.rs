//! Seeded random diagrams, circuits and density matrices for fuzzing.

use num_complex::Complex64;
use rand::Rng;

use crate::builders;
use crate::diagram::{Calculus, Diagram, Generator, Port};
use crate::param::{Coeff, Phase};
use crate::ring::ExactScalar;
use crate::tensor::FloatTensor;

/// Size bounds for [`random_diagram`].
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    /// Bound on inputs plus outputs.
    pub max_wires: usize,
    /// Bound on the number of nodes.
    pub max_nodes: usize,
    /// Bound on the number of grounds.
    pub max_grounds: usize,
}

impl Default for Shape {
    fn default() -> Self {
        Shape { max_wires: 4, max_nodes: 15, max_grounds: 0 }
    }
}

/// A multiple of π/4.
pub fn phase_pi4<R: Rng>(rng: &mut R) -> Phase {
    Phase::pi_frac(rng.gen_range(0..8), 4)
}

fn coeff<R: Rng>(rng: &mut R) -> Coeff {
    let pool = [
        ExactScalar::from_int(1),
        ExactScalar::from_int(-1),
        ExactScalar::from_int(0),
        ExactScalar::from_int(2),
        ExactScalar::i(),
        ExactScalar::omega_pow(1),
        ExactScalar::omega_pow(3),
        ExactScalar::sqrt2_pow(-1),
    ];
    Coeff::Exact(pool[rng.gen_range(0..pool.len())].clone())
}

/// A random spider-like generator of the calculus, with its arity.
fn pick<R: Rng>(rng: &mut R, c: Calculus, width: usize, room: usize) -> (Generator, usize, usize) {
    let k = rng.gen_range(0..=width.min(3));
    let m = rng.gen_range(0..=(room + k).min(3));
    let fixed = |g: Generator, n: usize, m: usize| (g, n, m);
    let r = rng.gen_range(0..10);
    match c {
        Calculus::ZX => match r {
            0..=3 => (Generator::ZxZ(phase_pi4(rng)), k, m),
            4..=7 => (Generator::ZxX(phase_pi4(rng)), k, m),
            _ if width >= 1 => fixed(Generator::ZxH, 1, 1),
            _ => (Generator::ZxZ(Phase::zero()), k, m),
        },
        Calculus::ZW => match r {
            0..=3 => (Generator::ZwZ(coeff(rng)), k, m),
            4..=7 => (Generator::ZwW, k, m),
            _ if width >= 2 => fixed(Generator::FSwap, 2, 2),
            _ => (Generator::ZwW, k, m),
        },
        Calculus::ZH => match r {
            0..=2 => (Generator::ZhZ, k, m),
            3..=5 => (Generator::ZhX, k, m),
            6..=8 => (Generator::HBox(coeff(rng)), k, m),
            _ if width >= 1 => fixed(Generator::Not, 1, 1),
            _ => (Generator::ZhZ, k, m),
        },
    }
}

/// A random diagram grown node by node from a frontier of open wires, with
/// the occasional swap, cup, cap and ground. Phases are multiples of π/4 and
/// coefficients exact.
pub fn random_diagram<R: Rng>(rng: &mut R, c: Calculus, shape: Shape) -> Diagram {
    let n_in = rng.gen_range(0..=shape.max_wires / 2);
    let limit = shape.max_wires - n_in;
    let mut d = Diagram::with_boundary(c, n_in, 0);
    let mut frontier: Vec<Port> = (0..n_in).map(Port::b_in).collect();
    let mut grounds = 0;
    let nodes = rng.gen_range(1..=shape.max_nodes.max(1));
    for _ in 0..nodes {
        let roll = rng.gen_range(0..20);
        let (gen, k, m) = if roll == 0 && frontier.len() >= 2 {
            (Generator::Swap, 2, 2)
        } else if roll == 1 && frontier.len() >= 2 {
            (Generator::Cup, 2, 0)
        } else if roll == 2 && frontier.len() + 2 <= limit {
            (Generator::Cap, 0, 2)
        } else if roll <= 5 && grounds < shape.max_grounds && !frontier.is_empty() {
            grounds += 1;
            (Generator::Ground, 1, 0)
        } else {
            let room = limit.saturating_sub(frontier.len());
            pick(rng, c, frontier.len(), room)
        };
        let id = d.add_node(gen, k, m);
        for i in 0..k {
            let p = frontier.remove(rng.gen_range(0..frontier.len()));
            d.connect(p, Port::input(id, i));
        }
        for j in 0..m {
            let at = rng.gen_range(0..=frontier.len());
            frontier.insert(at, Port::output(id, j));
        }
    }
    // Every step keeps the frontier within the limit; this only guards it.
    while frontier.len() > limit {
        let gen = if grounds < shape.max_grounds {
            grounds += 1;
            Generator::Ground
        } else {
            match c {
                Calculus::ZX => Generator::ZxZ(phase_pi4(rng)),
                Calculus::ZW => Generator::ZwW,
                Calculus::ZH => Generator::ZhZ,
            }
        };
        let id = d.add_node(gen, 1, 0);
        let p = frontier.remove(rng.gen_range(0..frontier.len()));
        d.connect(p, Port::input(id, 0));
    }
    d.set_boundary(n_in, frontier.len());
    for (j, p) in frontier.into_iter().enumerate() {
        d.connect(p, Port::b_out(j));
    }
    debug_assert!(d.is_valid(), "{:?}", d.validate());
    d
}

/// A random diagram with the given boundary, built like [`random_diagram`]
/// and then padded or trimmed with phase-free spiders.
pub fn random_diagram_with_boundary<R: Rng>(
    rng: &mut R,
    c: Calculus,
    n_in: usize,
    n_out: usize,
    max_nodes: usize,
) -> Diagram {
    let core = random_diagram(rng, c, Shape { max_wires: 4, max_nodes, max_grounds: 0 });
    let spider = |n, m| match c {
        Calculus::ZX => Diagram::node(c, Generator::ZxZ(Phase::zero()), n, m),
        Calculus::ZW => Diagram::node(c, Generator::ZwW, n, m),
        Calculus::ZH => Diagram::node(c, Generator::ZhZ, n, m),
    };
    // Feed the requested inputs into the core's inputs through one spider.
    let pre = spider(n_in, core.num_inputs());
    let post = spider(core.num_outputs(), n_out);
    Diagram::sequence(&[pre, core, post]).expect("arities agree")
}

/// A word in h, s, t, cnot, rz and ket0 on at most `max_qubits` wires
/// (cz in place of cnot for ZW).
/// Every letter is an isometry, so the whole circuit is one.
pub fn random_isometric_circuit<R: Rng>(
    rng: &mut R,
    c: Calculus,
    n_in: usize,
    max_qubits: usize,
    max_gates: usize,
) -> Diagram {
    let mut d = Diagram::identity(c, n_in);
    let gates = rng.gen_range(1..=max_gates.max(1));
    for _ in 0..gates {
        d = apply_random_gate(rng, c, &d, max_qubits);
    }
    d
}

/// An isometry from `n_in` to exactly `n_out` qubits (`n_out ≥ n_in`).
pub fn random_isometry<R: Rng>(rng: &mut R, c: Calculus, n_in: usize, n_out: usize, max_gates: usize) -> Diagram {
    let mut d = random_isometric_circuit(rng, c, n_in, n_in, max_gates);
    while d.num_outputs() < n_out {
        let w = d.num_outputs();
        let at = rng.gen_range(0..=w);
        let layer = layer(c, w, at, &builders::ket0(c).expect("ket0 exists"));
        d = layer.compose(&d).expect("arities agree");
    }
    for _ in 0..max_gates {
        d = apply_gate_only(rng, c, &d);
    }
    d
}

fn layer(c: Calculus, width: usize, at: usize, gate: &Diagram) -> Diagram {
    let after = width - at - gate.num_inputs();
    Diagram::tensor_all(c, &[Diagram::identity(c, at), gate.clone(), Diagram::identity(c, after)])
        .expect("same calculus")
}

fn apply_random_gate<R: Rng>(rng: &mut R, c: Calculus, d: &Diagram, max_qubits: usize) -> Diagram {
    let w = d.num_outputs();
    if w < max_qubits && (w == 0 || rng.gen_range(0..6) == 0) {
        let at = rng.gen_range(0..=w);
        return layer(c, w, at, &builders::ket0(c).expect("ket0 exists")).compose(d).expect("arities agree");
    }
    apply_gate_only(rng, c, d)
}

fn apply_gate_only<R: Rng>(rng: &mut R, c: Calculus, d: &Diagram) -> Diagram {
    let w = d.num_outputs();
    if w == 0 {
        return d.clone();
    }
    let choice = rng.gen_range(0..if w >= 2 { 5 } else { 4 });
    let gate = match choice {
        0 => builders::h(c),
        1 => builders::s(c),
        2 => builders::t(c),
        3 => builders::rz(c, &phase_pi4(rng)),
        _ => {
            // ZW has no CNOT builder; CZ is the entangling letter there.
            let g = builders::cnot(c).or_else(|_| builders::cz(c)).expect("entangling gate exists");
            if rng.gen_bool(0.5) {
                let sw = builders::swap(c);
                Diagram::sequence(&[sw.clone(), g, sw])
            } else {
                Ok(g)
            }
        }
    }
    .expect("gate exists in this calculus");
    let at = rng.gen_range(0..=w - gate.num_inputs());
    layer(c, w, at, &gate).compose(d).expect("arities agree")
}

/// A random density matrix on `qubits` qubits: A·A†/tr(A·A†) for a
/// Gaussian-ish A.
pub fn random_density<R: Rng>(rng: &mut R, qubits: usize) -> FloatTensor {
    let n = 1 << qubits;
    let a = FloatTensor::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let rho = a.matmul(&a.dagger()).expect("square");
    let tr = rho.trace();
    rho.scale(&(Complex64::new(1.0, 0.0) / tr))
}
