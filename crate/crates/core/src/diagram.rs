//! Open string diagrams: generator nodes, wires between ports, and ordered
//! input/output boundaries.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::param::{Coeff, Phase};

pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Calculus {
    ZX,
    ZW,
    ZH,
}

impl Calculus {
    pub const ALL: [Calculus; 3] = [Calculus::ZX, Calculus::ZW, Calculus::ZH];

    pub fn name(self) -> &'static str {
        match self {
            Calculus::ZX => "ZX",
            Calculus::ZW => "ZW",
            Calculus::ZH => "ZH",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "ZX" => Some(Calculus::ZX),
            "ZW" => Some(Calculus::ZW),
            "ZH" => Some(Calculus::ZH),
            _ => None,
        }
    }
}

impl fmt::Display for Calculus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A generator of one of the calculi, without its arity.
#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    /// ZX green spider.
    ZxZ(Phase),
    /// ZX red spider.
    ZxX(Phase),
    /// ZX Hadamard box, 1 → 1.
    ZxH,
    /// ZW black (GHZ) node with weight r.
    ZwZ(Coeff),
    /// ZW white (W) node.
    ZwW,
    /// ZW fermionic crossing, 2 → 2.
    FSwap,
    /// ZH white spider.
    ZhZ,
    /// ZH grey spider.
    ZhX,
    /// ZH H-box with label a.
    HBox(Coeff),
    /// ZH negation, 1 → 1.
    Not,
    Swap,
    /// ε: 2 → 0.
    Cup,
    /// η: 0 → 2.
    Cap,
    /// Discard, 1 → 0.
    Ground,
}

impl Generator {
    /// The calculus this generator belongs to; `None` for structural ones.
    pub fn calculus(&self) -> Option<Calculus> {
        use Generator::*;
        match self {
            ZxZ(_) | ZxX(_) | ZxH => Some(Calculus::ZX),
            ZwZ(_) | ZwW | FSwap => Some(Calculus::ZW),
            ZhZ | ZhX | HBox(_) | Not => Some(Calculus::ZH),
            Swap | Cup | Cap | Ground => None,
        }
    }

    pub fn allowed_in(&self, c: Calculus) -> bool {
        self.calculus().is_none_or(|k| k == c)
    }

    /// Fixed arity (inputs, outputs) when the generator is not variadic.
    pub fn fixed_arity(&self) -> Option<(usize, usize)> {
        use Generator::*;
        match self {
            ZxH | Not => Some((1, 1)),
            FSwap | Swap => Some((2, 2)),
            Cup => Some((2, 0)),
            Cap => Some((0, 2)),
            Ground => Some((1, 0)),
            _ => None,
        }
    }

    /// Short kind name used in JSON and reports.
    pub fn kind_name(&self) -> &'static str {
        use Generator::*;
        match self {
            ZxZ(_) | ZwZ(_) | ZhZ => "Z",
            ZxX(_) | ZhX => "X",
            ZxH => "H",
            ZwW => "W",
            FSwap => "FSwap",
            HBox(_) => "H",
            Not => "NOT",
            Swap => "Swap",
            Cup => "Cup",
            Cap => "Cap",
            Ground => "Ground",
        }
    }

    /// Legs may be permuted freely within each side without changing
    /// the interpretation.
    pub fn symmetric_legs(&self) -> bool {
        use Generator::*;
        matches!(self, ZxZ(_) | ZxX(_) | ZwZ(_) | ZwW | ZhZ | ZhX | HBox(_))
    }

    /// Inputs and outputs are interchangeable (flexsymmetric generators).
    pub fn flexible(&self) -> bool {
        use Generator::*;
        matches!(self, ZxZ(_) | ZxX(_) | ZwZ(_) | ZwW | ZhZ | ZhX | HBox(_))
    }

    pub fn dagger(&self) -> Generator {
        use Generator::*;
        match self {
            ZxZ(p) => ZxZ(p.neg()),
            ZxX(p) => ZxX(p.neg()),
            ZwZ(r) => ZwZ(r.conj()),
            HBox(a) => HBox(a.conj()),
            Cup => Cap,
            Cap => Cup,
            g => g.clone(),
        }
    }

    pub fn conjugate(&self) -> Generator {
        use Generator::*;
        match self {
            ZxZ(p) => ZxZ(p.neg()),
            ZxX(p) => ZxX(p.neg()),
            ZwZ(r) => ZwZ(r.conj()),
            HBox(a) => HBox(a.conj()),
            g => g.clone(),
        }
    }

    pub fn has_symbolic_param(&self) -> bool {
        match self {
            Generator::ZxZ(p) | Generator::ZxX(p) => p.is_symbolic(),
            Generator::ZwZ(c) | Generator::HBox(c) => c.is_symbolic(),
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub gen: Generator,
    pub n_in: usize,
    pub n_out: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    In,
    Out,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::In => Side::Out,
            Side::Out => Side::In,
        }
    }
}

/// One end of a wire: a node port or a boundary slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Port {
    Node { node: NodeId, side: Side, index: usize },
    Boundary { side: Side, index: usize },
}

impl Port {
    pub fn input(node: NodeId, index: usize) -> Port {
        Port::Node { node, side: Side::In, index }
    }
    pub fn output(node: NodeId, index: usize) -> Port {
        Port::Node { node, side: Side::Out, index }
    }
    pub fn b_in(index: usize) -> Port {
        Port::Boundary { side: Side::In, index }
    }
    pub fn b_out(index: usize) -> Port {
        Port::Boundary { side: Side::Out, index }
    }

    pub fn node(&self) -> Option<NodeId> {
        match self {
            Port::Node { node, .. } => Some(*node),
            Port::Boundary { .. } => None,
        }
    }

    fn renumber(self, f: impl Fn(NodeId) -> NodeId) -> Port {
        match self {
            Port::Node { node, side, index } => Port::Node { node: f(node), side, index },
            b => b,
        }
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Port::Node { node, side, index } => write!(f, "n{node}.{side:?}{index}"),
            Port::Boundary { side, index } => write!(f, "b.{side:?}{index}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagramError {
    #[error("arity mismatch: {0} outputs composed into {1} inputs")]
    Arity(usize, usize),
    #[error("calculus mismatch: {0} vs {1}")]
    CalculusMismatch(Calculus, Calculus),
    #[error("diagram contains a ground; the dagger is only defined on pure diagrams")]
    GroundPresent,
    #[error("{0} is not available in the {1} calculus")]
    Unavailable(&'static str, Calculus),
    #[error("invalid diagram: {0:?}")]
    Invalid(Vec<Violation>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    DanglingPort(Port),
    SelfWire(Port),
    AsymmetricWire(Port, Port),
    UnknownPort(Port),
    CalculusMismatch(NodeId),
    ArityMismatch(NodeId),
}

/// An open graph of generator nodes.
///
/// Wires are stored as a symmetric port-to-port map, so every port has at
/// most one partner and structural equality is map equality.
#[derive(Clone, Debug)]
pub struct Diagram {
    calculus: Calculus,
    nodes: BTreeMap<NodeId, Node>,
    links: BTreeMap<Port, Port>,
    n_in: usize,
    n_out: usize,
    next_id: NodeId,
}

impl PartialEq for Diagram {
    fn eq(&self, other: &Self) -> bool {
        self.calculus == other.calculus
            && self.n_in == other.n_in
            && self.n_out == other.n_out
            && self.nodes == other.nodes
            && self.links == other.links
    }
}

/// Endpoint in a splice: a real port or a junction to be fused away.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum End {
    P(Port),
    J(usize),
}

/// Fuse chains of half-edges through degree-2 junctions. Returns the
/// resulting wires and the number of closed loops made only of junctions.
pub(crate) fn splice(edges: &[(End, End)]) -> (Vec<(Port, Port)>, usize) {
    let mut at: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, (a, b)) in edges.iter().enumerate() {
        for e in [a, b] {
            if let End::J(j) = e {
                at.entry(*j).or_default().push(i);
            }
        }
    }
    let other = |i: usize, from: End| -> End {
        let (a, b) = edges[i];
        if a == from {
            b
        } else {
            a
        }
    };
    let mut used = vec![false; edges.len()];
    let mut wires = Vec::new();
    for i in 0..edges.len() {
        if used[i] {
            continue;
        }
        let (a, _) = edges[i];
        let (start, mut cur_edge) = match (edges[i].0, edges[i].1) {
            (End::P(_), _) => (a, i),
            (_, End::P(p)) => (End::P(p), i),
            _ => continue,
        };
        let mut from = start;
        loop {
            used[cur_edge] = true;
            let next = other(cur_edge, from);
            match next {
                End::P(q) => {
                    let End::P(p) = start else { unreachable!() };
                    wires.push((p, q));
                    break;
                }
                End::J(j) => {
                    let list = &at[&j];
                    let nxt = if list[0] == cur_edge { list[1] } else { list[0] };
                    from = End::J(j);
                    cur_edge = nxt;
                }
            }
        }
    }
    // Whatever is left is a union of cycles through junctions only.
    let mut loops = 0;
    for i in 0..edges.len() {
        if used[i] {
            continue;
        }
        loops += 1;
        let mut from = edges[i].0;
        let mut cur = i;
        while !used[cur] {
            used[cur] = true;
            let next = other(cur, from);
            let End::J(j) = next else { unreachable!() };
            let list = &at[&j];
            cur = if list[0] == cur { list[1] } else { list[0] };
            from = next;
        }
    }
    (wires, loops)
}

impl Diagram {
    /// The empty diagram 0 → 0.
    pub fn empty(calculus: Calculus) -> Self {
        Diagram {
            calculus,
            nodes: BTreeMap::new(),
            links: BTreeMap::new(),
            n_in: 0,
            n_out: 0,
            next_id: 0,
        }
    }

    /// A diagram with the given boundary sizes and no wires yet.
    pub fn with_boundary(calculus: Calculus, n_in: usize, n_out: usize) -> Self {
        Diagram { n_in, n_out, ..Self::empty(calculus) }
    }

    pub fn identity(calculus: Calculus, n: usize) -> Self {
        let mut d = Self::with_boundary(calculus, n, n);
        for i in 0..n {
            d.connect(Port::b_in(i), Port::b_out(i));
        }
        d
    }

    /// A pure wiring n → n sending input i to output perm[i].
    pub fn permutation(calculus: Calculus, perm: &[usize]) -> Self {
        let mut d = Self::with_boundary(calculus, perm.len(), perm.len());
        for (i, &j) in perm.iter().enumerate() {
            d.connect(Port::b_in(i), Port::b_out(j));
        }
        d
    }

    /// A single generator with its inputs and outputs on the boundary.
    pub fn node(calculus: Calculus, gen: Generator, n_in: usize, n_out: usize) -> Self {
        let mut d = Self::with_boundary(calculus, n_in, n_out);
        let id = d.add_node(gen, n_in, n_out);
        for i in 0..n_in {
            d.connect(Port::b_in(i), Port::input(id, i));
        }
        for j in 0..n_out {
            d.connect(Port::output(id, j), Port::b_out(j));
        }
        d
    }

    pub fn calculus(&self) -> Calculus {
        self.calculus
    }

    pub fn num_inputs(&self) -> usize {
        self.n_in
    }

    pub fn num_outputs(&self) -> usize {
        self.n_out
    }

    pub fn contains_ground(&self) -> bool {
        self.nodes.values().any(|n| n.gen == Generator::Ground)
    }

    pub fn nodes(&self) -> &BTreeMap<NodeId, Node> {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn get(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(&id)
    }

    pub fn next_id(&self) -> NodeId {
        self.next_id
    }

    /// Partner of a port, if wired.
    pub fn partner(&self, p: Port) -> Option<Port> {
        self.links.get(&p).copied()
    }

    /// Every wire once, as an ordered pair (smaller port first).
    pub fn wires(&self) -> Vec<(Port, Port)> {
        self.links.iter().filter(|(a, b)| a <= b).map(|(a, b)| (*a, *b)).collect()
    }

    pub fn add_node(&mut self, gen: Generator, n_in: usize, n_out: usize) -> NodeId {
        let id = self.next_id;
        self.insert_node(id, Node { gen, n_in, n_out });
        id
    }

    pub(crate) fn insert_node(&mut self, id: NodeId, node: Node) {
        self.nodes.insert(id, node);
        self.next_id = self.next_id.max(id + 1);
    }

    pub(crate) fn set_boundary(&mut self, n_in: usize, n_out: usize) {
        self.n_in = n_in;
        self.n_out = n_out;
    }

    pub fn connect(&mut self, p: Port, q: Port) {
        self.links.insert(p, q);
        self.links.insert(q, p);
    }

    pub(crate) fn disconnect(&mut self, p: Port) -> Option<Port> {
        let q = self.links.remove(&p)?;
        self.links.remove(&q);
        Some(q)
    }

    pub(crate) fn remove_node(&mut self, id: NodeId) -> Option<Node> {
        let node = self.nodes.remove(&id)?;
        for i in 0..node.n_in {
            self.disconnect(Port::input(id, i));
        }
        for j in 0..node.n_out {
            self.disconnect(Port::output(id, j));
        }
        Some(node)
    }

    /// All ports of a node, inputs first.
    pub fn ports_of(&self, id: NodeId) -> Vec<Port> {
        let n = &self.nodes[&id];
        (0..n.n_in)
            .map(|i| Port::input(id, i))
            .chain((0..n.n_out).map(|j| Port::output(id, j)))
            .collect()
    }

    /// Adds a closed wire loop (the scalar 2) as a self-wired node.
    pub(crate) fn add_loop(&mut self) {
        let gen = match self.calculus {
            Calculus::ZX => Generator::ZxZ(Phase::zero()),
            Calculus::ZW => Generator::ZwZ(Coeff::int(1)),
            Calculus::ZH => Generator::ZhZ,
        };
        let id = self.add_node(gen, 1, 1);
        self.connect(Port::input(id, 0), Port::output(id, 0));
    }

    /// Renumbers nodes to 0..k in ascending order of current ids.
    pub fn compact(&self) -> Diagram {
        let map: BTreeMap<NodeId, NodeId> =
            self.nodes.keys().enumerate().map(|(i, k)| (*k, i)).collect();
        self.renumbered(|id| map[&id], self.nodes.len())
    }

    fn renumbered(&self, f: impl Fn(NodeId) -> NodeId, next_id: NodeId) -> Diagram {
        Diagram {
            calculus: self.calculus,
            nodes: self.nodes.iter().map(|(k, v)| (f(*k), v.clone())).collect(),
            links: self
                .links
                .iter()
                .map(|(a, b)| (a.renumber(&f), b.renumber(&f)))
                .collect(),
            n_in: self.n_in,
            n_out: self.n_out,
            next_id,
        }
    }

    /// Sequential composition: `self` after `first`.
    pub fn compose(&self, first: &Diagram) -> Result<Diagram, DiagramError> {
        if self.calculus != first.calculus {
            return Err(DiagramError::CalculusMismatch(first.calculus, self.calculus));
        }
        if first.n_out != self.n_in {
            return Err(DiagramError::Arity(first.n_out, self.n_in));
        }
        let offset = first.next_id;
        let second = self.renumbered(|id| id + offset, offset + self.next_id);
        let mut out = Diagram::with_boundary(self.calculus, first.n_in, self.n_out);
        out.nodes = first.nodes.clone();
        out.nodes.extend(second.nodes.iter().map(|(k, v)| (*k, v.clone())));
        out.next_id = second.next_id;
        let mut edges = Vec::new();
        for (a, b) in first.wires() {
            let map = |p: Port| match p {
                Port::Boundary { side: Side::Out, index } => End::J(index),
                p => End::P(p),
            };
            edges.push((map(a), map(b)));
        }
        for (a, b) in second.wires() {
            let map = |p: Port| match p {
                Port::Boundary { side: Side::In, index } => End::J(index),
                p => End::P(p),
            };
            edges.push((map(a), map(b)));
        }
        let (wires, loops) = splice(&edges);
        for (p, q) in wires {
            out.connect(p, q);
        }
        for _ in 0..loops {
            out.add_loop();
        }
        Ok(out)
    }

    /// Parallel composition with `self` on the left (most significant).
    pub fn tensor(&self, right: &Diagram) -> Result<Diagram, DiagramError> {
        if self.calculus != right.calculus {
            return Err(DiagramError::CalculusMismatch(self.calculus, right.calculus));
        }
        let offset = self.next_id;
        let (di, do_) = (self.n_in, self.n_out);
        let shift = |p: Port| match p {
            Port::Node { node, side, index } => Port::Node { node: node + offset, side, index },
            Port::Boundary { side: Side::In, index } => Port::b_in(index + di),
            Port::Boundary { side: Side::Out, index } => Port::b_out(index + do_),
        };
        let mut out = self.clone();
        out.n_in += right.n_in;
        out.n_out += right.n_out;
        for (k, v) in &right.nodes {
            out.nodes.insert(k + offset, v.clone());
        }
        for (a, b) in &right.links {
            out.links.insert(shift(*a), shift(*b));
        }
        out.next_id = offset + right.next_id;
        Ok(out)
    }

    /// Tensor product of a list, left to right. The empty list gives the
    /// empty diagram.
    pub fn tensor_all(calculus: Calculus, parts: &[Diagram]) -> Result<Diagram, DiagramError> {
        parts
            .iter()
            .try_fold(Diagram::empty(calculus), |acc, d| acc.tensor(d))
    }

    /// Composes a list in application order: `parts[0]` is applied first.
    pub fn sequence(parts: &[Diagram]) -> Result<Diagram, DiagramError> {
        let (first, rest) = parts.split_first().expect("sequence needs at least one diagram");
        rest.iter().try_fold(first.clone(), |acc, d| d.compose(&acc))
    }

    /// Mirror image with every generator replaced by its adjoint.
    pub fn dagger(&self) -> Result<Diagram, DiagramError> {
        if self.contains_ground() {
            return Err(DiagramError::GroundPresent);
        }
        let flip = |p: Port| match p {
            Port::Node { node, side, index } => Port::Node { node, side: side.flip(), index },
            Port::Boundary { side, index } => Port::Boundary { side: side.flip(), index },
        };
        Ok(Diagram {
            calculus: self.calculus,
            nodes: self
                .nodes
                .iter()
                .map(|(k, n)| {
                    let node = Node { gen: n.gen.dagger(), n_in: n.n_out, n_out: n.n_in };
                    (*k, node)
                })
                .collect(),
            links: self.links.iter().map(|(a, b)| (flip(*a), flip(*b))).collect(),
            n_in: self.n_out,
            n_out: self.n_in,
            next_id: self.next_id,
        })
    }

    /// Same shape with every parameter conjugated: the interpretation is the
    /// entrywise complex conjugate.
    pub fn conjugate(&self) -> Diagram {
        let mut d = self.clone();
        for n in d.nodes.values_mut() {
            n.gen = n.gen.conjugate();
        }
        d
    }

    /// Maps every node's generator, keeping the wiring.
    pub fn map_generators<E>(
        &self,
        mut f: impl FnMut(&Generator) -> Result<Generator, E>,
    ) -> Result<Diagram, E> {
        let mut d = self.clone();
        for n in d.nodes.values_mut() {
            n.gen = f(&n.gen)?;
        }
        Ok(d)
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut v = BTreeSet::new();
        let exists = |p: &Port| match p {
            Port::Node { node, side, index } => self.nodes.get(node).is_some_and(|n| match side {
                Side::In => *index < n.n_in,
                Side::Out => *index < n.n_out,
            }),
            Port::Boundary { side: Side::In, index } => *index < self.n_in,
            Port::Boundary { side: Side::Out, index } => *index < self.n_out,
        };
        for (id, n) in &self.nodes {
            if !n.gen.allowed_in(self.calculus) {
                v.insert(Violation::CalculusMismatch(*id));
            }
            if let Some(a) = n.gen.fixed_arity() {
                if a != (n.n_in, n.n_out) {
                    v.insert(Violation::ArityMismatch(*id));
                }
            }
            for p in self.ports_of(*id) {
                if !self.links.contains_key(&p) {
                    v.insert(Violation::DanglingPort(p));
                }
            }
        }
        for i in 0..self.n_in {
            if !self.links.contains_key(&Port::b_in(i)) {
                v.insert(Violation::DanglingPort(Port::b_in(i)));
            }
        }
        for j in 0..self.n_out {
            if !self.links.contains_key(&Port::b_out(j)) {
                v.insert(Violation::DanglingPort(Port::b_out(j)));
            }
        }
        for (a, b) in &self.links {
            if a == b {
                v.insert(Violation::SelfWire(*a));
            }
            if self.links.get(b) != Some(a) {
                v.insert(Violation::AsymmetricWire(*a, *b));
            }
            for p in [a, b] {
                if !exists(p) {
                    v.insert(Violation::UnknownPort(*p));
                }
            }
        }
        v.into_iter().collect()
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Ids of the ground nodes, ascending.
    pub fn grounds(&self) -> Vec<NodeId> {
        self.nodes
            .iter()
            .filter(|(_, n)| n.gen == Generator::Ground)
            .map(|(k, _)| *k)
            .collect()
    }

    pub fn has_symbolic_params(&self) -> bool {
        self.nodes.values().any(|n| n.gen.has_symbolic_param())
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} diagram {} -> {}", self.calculus, self.n_in, self.n_out)?;
        for (id, n) in &self.nodes {
            writeln!(f, "  n{id}: {:?} ({} -> {})", n.gen, n.n_in, n.n_out)?;
        }
        for (a, b) in self.wires() {
            writeln!(f, "  {a} -- {b}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: usize, m: usize, num: i64, den: i64) -> Diagram {
        Diagram::node(Calculus::ZX, Generator::ZxZ(Phase::pi_frac(num, den)), n, m)
    }

    #[test]
    fn identity_composes_to_identity() {
        let id = Diagram::identity(Calculus::ZX, 1);
        assert_eq!(id.compose(&id).unwrap(), id);
        let two = id.tensor(&id).unwrap();
        assert_eq!(two, Diagram::identity(Calculus::ZX, 2));
    }

    #[test]
    fn compose_checks_arity_and_calculus() {
        let a = z(1, 2, 0, 1);
        assert_eq!(a.compose(&a), Err(DiagramError::Arity(2, 1)));
        let w = Diagram::identity(Calculus::ZW, 1);
        assert!(matches!(w.compose(&Diagram::identity(Calculus::ZX, 1)), Err(DiagramError::CalculusMismatch(..))));
    }

    #[test]
    fn dagger_flips_spider() {
        let d = z(1, 2, 1, 4).dagger().unwrap();
        assert_eq!(d, z(2, 1, -1, 4));
        let g = Diagram::node(Calculus::ZX, Generator::Ground, 1, 0);
        assert_eq!(g.dagger(), Err(DiagramError::GroundPresent));
    }

    #[test]
    fn validate_reports_problems() {
        assert!(Diagram::identity(Calculus::ZX, 2).validate().is_empty());
        let mut d = Diagram::with_boundary(Calculus::ZX, 1, 0);
        let id = d.add_node(Generator::Ground, 1, 0);
        assert_eq!(d.validate(), vec![Violation::DanglingPort(Port::input(id, 0)), Violation::DanglingPort(Port::b_in(0))]);
        let h = Diagram::node(Calculus::ZX, Generator::HBox(Coeff::int(-1)), 1, 1);
        assert_eq!(h.validate(), vec![Violation::CalculusMismatch(0)]);
    }

    #[test]
    fn closing_a_loop_adds_a_loop_node() {
        // cap then cup: a closed circle.
        let cap = Diagram::node(Calculus::ZH, Generator::Cap, 0, 2);
        let cup = Diagram::node(Calculus::ZH, Generator::Cup, 2, 0);
        let d = cup.compose(&cap).unwrap();
        assert_eq!(d.node_count(), 2);
        let id_cup = Diagram::identity(Calculus::ZH, 2);
        let through = id_cup.compose(&id_cup).unwrap();
        assert_eq!(through, id_cup);
    }

    #[test]
    fn splice_counts_pure_cycles() {
        let edges = [(End::J(0), End::J(1)), (End::J(1), End::J(0))];
        let (w, loops) = splice(&edges);
        assert!(w.is_empty());
        assert_eq!(loops, 1);
        let p = Port::b_in(0);
        let q = Port::b_out(0);
        let edges = [(End::P(p), End::J(0)), (End::J(0), End::J(1)), (End::J(1), End::P(q))];
        assert_eq!(splice(&edges), (vec![(p, q)], 0));
    }
}
