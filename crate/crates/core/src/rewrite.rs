//! Subgraph matching of rule sides inside host diagrams, rewriting, and
//! structural isomorphism.
//!
//! A match is an injective map from pattern nodes to host nodes that
//! respects generator kinds, arities and every internal pattern wire. Legs
//! of symmetric generators may be matched in any order. Pattern wires that
//! run straight from boundary to boundary are matched to host wires that do
//! not touch the image. Parameters are solved after the structural match.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use thiserror::Error;

use crate::diagram::{splice, Diagram, End, Generator, Node, NodeId, Port, Side};
use crate::param::{Bindings, Coeff, CoeffExpr, ParamError, Phase, Value};

/// Tolerance for comparing floating parameters during matching.
pub const PARAM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RewriteError {
    #[error("stale match: the host no longer contains the matched subgraph")]
    StaleMatch,
    #[error("replacement is {0} -> {1} but the match has {2} -> {3} boundary wires")]
    Boundary(usize, usize, usize, usize),
    #[error("replacement is in a different calculus from the host")]
    Calculus,
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// One occurrence of a pattern inside a host.
#[derive(Clone, Debug, PartialEq)]
pub struct Match {
    /// Pattern node id to host node id.
    pub node_map: BTreeMap<NodeId, NodeId>,
    /// Host port seen by each pattern input from outside the image.
    pub inputs: Vec<Port>,
    pub outputs: Vec<Port>,
    /// Template variables solved from the host parameters.
    pub bindings: Bindings,
    snapshot: Vec<(NodeId, Node)>,
    expected: Vec<(Port, Port)>,
    passthrough: Vec<(Port, Port)>,
}

impl Match {
    /// Host nodes covered by the match, ascending.
    pub fn image(&self) -> Vec<NodeId> {
        let mut v: Vec<NodeId> = self.node_map.values().copied().collect();
        v.sort_unstable();
        v
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct MatchOptions {
    /// Pin pattern boundary slot i to host boundary slot i.
    pub anchored: bool,
    /// Stop after this many matches.
    pub limit: Option<usize>,
}

enum Task {
    Root(NodeId),
    Wire(Port, Port),
}

#[derive(Default, Clone)]
struct State {
    nmap: BTreeMap<NodeId, NodeId>,
    used: BTreeSet<NodeId>,
    pmap: BTreeMap<Port, Port>,
    hused: BTreeSet<Port>,
}

type Key = (Vec<(NodeId, NodeId)>, Vec<Port>, Vec<Port>);

struct Matcher<'a> {
    pat: &'a Diagram,
    host: &'a Diagram,
    pre: &'a Bindings,
    opts: MatchOptions,
    tasks: Vec<Task>,
    boundary_wires: Vec<(Port, Port)>,
    seen: BTreeSet<Key>,
    out: Vec<Match>,
}

fn same_kind(p: &Node, h: &Node) -> bool {
    p.n_in == h.n_in
        && p.n_out == h.n_out
        && std::mem::discriminant(&p.gen) == std::mem::discriminant(&h.gen)
}

fn arity(n: &Node, side: Side) -> usize {
    match side {
        Side::In => n.n_in,
        Side::Out => n.n_out,
    }
}

fn port_parts(p: Port) -> (NodeId, Side, usize) {
    match p {
        Port::Node { node, side, index } => (node, side, index),
        Port::Boundary { .. } => unreachable!("node port expected"),
    }
}

/// Tasks in breadth-first order per connected component of the pattern.
fn plan(pat: &Diagram) -> Vec<Task> {
    let mut tasks = Vec::new();
    let mut visited = BTreeSet::new();
    let mut scheduled: BTreeSet<(Port, Port)> = BTreeSet::new();
    for &root in pat.nodes().keys() {
        if !visited.insert(root) {
            continue;
        }
        tasks.push(Task::Root(root));
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(n) = queue.pop_front() {
            for p in pat.ports_of(n) {
                let Some(q) = pat.partner(p) else { continue };
                let Some(qn) = q.node() else { continue };
                let key = if p <= q { (p, q) } else { (q, p) };
                if !scheduled.insert(key) {
                    continue;
                }
                tasks.push(Task::Wire(p, q));
                if visited.insert(qn) {
                    queue.push_back(qn);
                }
            }
        }
    }
    tasks
}

impl<'a> Matcher<'a> {
    fn done(&self) -> bool {
        self.opts.limit.is_some_and(|l| self.out.len() >= l)
    }

    fn candidates(&self, st: &State, p: Port) -> Vec<Port> {
        if let Some(h) = st.pmap.get(&p) {
            return vec![*h];
        }
        let (pn, side, index) = port_parts(p);
        let hn = st.nmap[&pn];
        let pnode = &self.pat.nodes()[&pn];
        let hnode = &self.host.nodes()[&hn];
        let idxs: Vec<usize> = if pnode.gen.symmetric_legs() {
            (0..arity(hnode, side)).collect()
        } else {
            vec![index]
        };
        idxs.into_iter()
            .map(|k| Port::Node { node: hn, side, index: k })
            .filter(|h| !st.hused.contains(h))
            .collect()
    }

    fn search(&mut self, k: usize, st: &mut State) {
        if self.done() {
            return;
        }
        if k == self.tasks.len() {
            self.finish(st);
            return;
        }
        match self.tasks[k] {
            Task::Root(pn) => {
                let pnode = &self.pat.nodes()[&pn];
                let hosts: Vec<NodeId> = self
                    .host
                    .nodes()
                    .iter()
                    .filter(|(h, n)| !st.used.contains(h) && same_kind(pnode, n))
                    .map(|(h, _)| *h)
                    .collect();
                for h in hosts {
                    st.nmap.insert(pn, h);
                    st.used.insert(h);
                    self.search(k + 1, st);
                    st.nmap.remove(&pn);
                    st.used.remove(&h);
                }
            }
            Task::Wire(a, b) => {
                let (bn, bside, bindex) = port_parts(b);
                for ha in self.candidates(st, a) {
                    let Some(hb) = self.host.partner(ha) else { continue };
                    let Port::Node { node: hbn, side: hside, index: hindex } = hb else { continue };
                    if hside != bside || hb == ha || st.hused.contains(&hb) {
                        continue;
                    }
                    let bnode = &self.pat.nodes()[&bn];
                    let fresh = match st.nmap.get(&bn) {
                        Some(&mapped) => {
                            if mapped != hbn || !self.candidates(st, b).contains(&hb) {
                                continue;
                            }
                            false
                        }
                        None => {
                            let hnode = &self.host.nodes()[&hbn];
                            if st.used.contains(&hbn) || !same_kind(bnode, hnode) {
                                continue;
                            }
                            if !bnode.gen.symmetric_legs() && hindex != bindex {
                                continue;
                            }
                            true
                        }
                    };
                    if fresh {
                        st.nmap.insert(bn, hbn);
                        st.used.insert(hbn);
                    }
                    st.pmap.insert(a, ha);
                    st.pmap.insert(b, hb);
                    st.hused.insert(ha);
                    st.hused.insert(hb);
                    self.search(k + 1, st);
                    st.pmap.remove(&a);
                    st.pmap.remove(&b);
                    st.hused.remove(&ha);
                    st.hused.remove(&hb);
                    if fresh {
                        st.nmap.remove(&bn);
                        st.used.remove(&hbn);
                    }
                }
            }
        }
    }

    fn finish(&mut self, st: &State) {
        let mut pmap = st.pmap.clone();
        // Ports facing the pattern boundary take the remaining host ports in order.
        for (&pn, pnode) in self.pat.nodes() {
            let hn = st.nmap[&pn];
            for side in [Side::In, Side::Out] {
                let free_p = (0..arity(pnode, side))
                    .map(|i| Port::Node { node: pn, side, index: i })
                    .filter(|p| !pmap.contains_key(p));
                let free_h: Vec<Port> = (0..arity(pnode, side))
                    .map(|i| Port::Node { node: hn, side, index: i })
                    .filter(|h| !st.hused.contains(h))
                    .collect();
                if !self.opts.anchored {
                    for (p, h) in free_p.collect::<Vec<_>>().into_iter().zip(free_h) {
                        pmap.insert(p, h);
                    }
                    continue;
                }
                // Anchored: each leg goes to the host port wired to the same slot.
                for p in free_p.collect::<Vec<_>>() {
                    let Some(q) = self.pat.partner(p) else { return };
                    let Some(h) = self.host.partner(q) else { return };
                    let ok = free_h.contains(&h)
                        && (pnode.gen.symmetric_legs() || port_parts(h).2 == port_parts(p).2);
                    if !ok || q.node().is_some() {
                        return;
                    }
                    pmap.insert(p, h);
                }
            }
        }
        let image: BTreeSet<NodeId> = st.used.clone();
        let mut inputs = vec![None; self.pat.num_inputs()];
        let mut outputs = vec![None; self.pat.num_outputs()];
        let mut expected = Vec::new();
        for (&p, &h) in &pmap {
            let Some(q @ Port::Boundary { side, index }) = self.pat.partner(p) else {
                if let Some(q) = self.pat.partner(p) {
                    expected.push((h, pmap[&q]));
                }
                continue;
            };
            let Some(ext) = self.host.partner(h) else { return };
            if ext.node().is_some_and(|n| image.contains(&n)) {
                return;
            }
            if self.opts.anchored && ext != q {
                return;
            }
            expected.push((h, ext));
            match side {
                Side::In => inputs[index] = Some(ext),
                Side::Out => outputs[index] = Some(ext),
            }
        }
        let mut constraints = Vec::new();
        for (pn, pnode) in self.pat.nodes() {
            let hnode = &self.host.nodes()[&st.nmap[pn]];
            constraints.push((pnode.gen.clone(), hnode.gen.clone()));
        }
        let Some(bindings) = solve(&constraints, self.pre.clone()) else { return };
        let base = Partial { inputs, outputs, expected, passthrough: Vec::new() };
        self.passthroughs(0, base, &image, st, &bindings);
    }

    fn passthroughs(&mut self, k: usize, cur: Partial, image: &BTreeSet<NodeId>, st: &State, b: &Bindings) {
        if self.done() {
            return;
        }
        if k == self.boundary_wires.len() {
            self.record(cur, st, b);
            return;
        }
        let (q1, q2) = self.boundary_wires[k];
        let options: Vec<(Port, Port)> = if self.opts.anchored {
            if self.host.partner(q1) == Some(q2) {
                vec![(q1, q2)]
            } else {
                vec![]
            }
        } else {
            let touches = |p: &Port| p.node().is_some_and(|n| image.contains(&n));
            let taken: BTreeSet<Port> = cur.passthrough.iter().flat_map(|(a, b)| [*a, *b]).collect();
            self.host
                .wires()
                .into_iter()
                .filter(|(a, b)| !touches(a) && !touches(b) && !taken.contains(a))
                .flat_map(|(a, b)| [(a, b), (b, a)])
                .collect()
        };
        for (h1, h2) in options {
            let mut next = cur.clone();
            for (q, h) in [(q1, h1), (q2, h2)] {
                let Port::Boundary { side, index } = q else { unreachable!() };
                match side {
                    Side::In => next.inputs[index] = Some(h),
                    Side::Out => next.outputs[index] = Some(h),
                }
            }
            next.passthrough.push((h1, h2));
            next.expected.push((h1, h2));
            self.passthroughs(k + 1, next, image, st, b);
        }
    }

    fn record(&mut self, cur: Partial, st: &State, b: &Bindings) {
        let (Some(inputs), Some(outputs)) = (
            cur.inputs.into_iter().collect::<Option<Vec<_>>>(),
            cur.outputs.into_iter().collect::<Option<Vec<_>>>(),
        ) else {
            return;
        };
        let key: Key = (st.nmap.iter().map(|(a, b)| (*a, *b)).collect(), inputs.clone(), outputs.clone());
        if !self.seen.insert(key) {
            return;
        }
        let snapshot = st.nmap.values().map(|h| (*h, self.host.nodes()[h].clone())).collect();
        self.out.push(Match {
            node_map: st.nmap.clone(),
            inputs,
            outputs,
            bindings: b.clone(),
            snapshot,
            expected: cur.expected,
            passthrough: cur.passthrough,
        });
    }
}

#[derive(Clone)]
struct Partial {
    inputs: Vec<Option<Port>>,
    outputs: Vec<Option<Port>>,
    expected: Vec<(Port, Port)>,
    passthrough: Vec<(Port, Port)>,
}

/// All matches of `pattern` in `host`, in a deterministic order (by the
/// smallest host node in the image, then by the node map).
pub fn find_matches(pattern: &Diagram, host: &Diagram, pre: &Bindings, opts: MatchOptions) -> Vec<Match> {
    if pattern.calculus() != host.calculus() {
        return Vec::new();
    }
    let boundary_wires = pattern
        .wires()
        .into_iter()
        .filter(|(a, b)| a.node().is_none() && b.node().is_none())
        .collect();
    let mut m = Matcher {
        pat: pattern,
        host,
        pre,
        opts,
        tasks: plan(pattern),
        boundary_wires,
        seen: BTreeSet::new(),
        out: Vec::new(),
    };
    m.search(0, &mut State::default());
    let mut out = m.out;
    out.sort_by(|a, b| {
        let ka = (a.image().first().copied(), a.node_map.values().copied().collect::<Vec<_>>(), &a.inputs, &a.outputs);
        let kb = (b.image().first().copied(), b.node_map.values().copied().collect::<Vec<_>>(), &b.inputs, &b.outputs);
        ka.cmp(&kb)
    });
    out
}

/// Replaces the matched subgraph by `replacement`, whose boundary must have
/// as many inputs and outputs as the match.
pub fn apply_rewrite(host: &Diagram, m: &Match, replacement: &Diagram) -> Result<Diagram, RewriteError> {
    if replacement.calculus() != host.calculus() {
        return Err(RewriteError::Calculus);
    }
    let (ri, ro) = (replacement.num_inputs(), replacement.num_outputs());
    if ri != m.inputs.len() || ro != m.outputs.len() {
        return Err(RewriteError::Boundary(ri, ro, m.inputs.len(), m.outputs.len()));
    }
    let fresh = m.snapshot.iter().all(|(id, n)| host.get(*id) == Some(n))
        && m.expected.iter().all(|(a, b)| host.partner(*a) == Some(*b));
    if !fresh {
        return Err(RewriteError::StaleMatch);
    }
    let mut out = host.clone();
    for (a, _) in &m.passthrough {
        out.disconnect(*a);
    }
    for id in m.node_map.values() {
        out.remove_node(*id);
    }
    let offset = out.next_id();
    for (id, n) in replacement.nodes() {
        out.insert_node(id + offset, n.clone());
    }
    let end = |p: Port| match p {
        Port::Node { node, side, index } => End::P(Port::Node { node: node + offset, side, index }),
        Port::Boundary { side: Side::In, index } => End::J(index),
        Port::Boundary { side: Side::Out, index } => End::J(ri + index),
    };
    let mut edges: Vec<(End, End)> = replacement.wires().into_iter().map(|(a, b)| (end(a), end(b))).collect();
    edges.extend(m.inputs.iter().enumerate().map(|(i, p)| (End::P(*p), End::J(i))));
    edges.extend(m.outputs.iter().enumerate().map(|(j, p)| (End::P(*p), End::J(ri + j))));
    let (wires, loops) = splice(&edges);
    for (p, q) in wires {
        out.connect(p, q);
    }
    for _ in 0..loops {
        out.add_loop();
    }
    Ok(out)
}

/// Equal up to renaming nodes and reordering legs of symmetric generators,
/// with boundary slots fixed. Parameters compare exactly, or within
/// [`PARAM_TOL`] when floating.
pub fn isomorphic(a: &Diagram, b: &Diagram) -> bool {
    if a.calculus() != b.calculus()
        || a.num_inputs() != b.num_inputs()
        || a.num_outputs() != b.num_outputs()
        || a.node_count() != b.node_count()
        || a.wires().len() != b.wires().len()
        || a.has_symbolic_params()
        || b.has_symbolic_params()
    {
        return false;
    }
    let opts = MatchOptions { anchored: true, limit: Some(1) };
    !find_matches(a, b, &Bindings::new(), opts).is_empty()
}

enum Step {
    Done,
    Wait,
    Fail,
}

fn phase_eq(a: &Phase, b: &Phase) -> bool {
    match (a, b) {
        (Phase::Exact(x), Phase::Exact(y)) => x == y,
        _ => a.distance(b).is_some_and(|d| d <= PARAM_TOL),
    }
}

fn coeff_eq(a: &Coeff, b: &Coeff) -> bool {
    match (a, b) {
        (Coeff::Exact(x), Coeff::Exact(y)) => x == y,
        _ => a.distance(b).is_some_and(|d| d <= PARAM_TOL),
    }
}

fn check(ok: bool) -> Step {
    if ok {
        Step::Done
    } else {
        Step::Fail
    }
}

fn solve_phase(t: &Phase, h: &Phase, b: &mut Bindings) -> Step {
    match t.bind_partial(b) {
        Phase::Sym(e) => {
            if e.terms.len() != 1 {
                return Step::Wait;
            }
            let (v, c) = e.terms.iter().next().expect("one term");
            let val = h.sub(&e.constant);
            let val = match c {
                1 => val,
                -1 => val.neg(),
                _ => return Step::Wait,
            };
            if b.contains(v) {
                return Step::Fail;
            }
            b.0.insert(v.clone(), Value::Phase(val));
            Step::Done
        }
        t => check(phase_eq(&t, h)),
    }
}

fn coeff_div(h: &Coeff, k: &Coeff) -> Option<Coeff> {
    if let (Coeff::Exact(x), Coeff::Exact(y)) = (h, k) {
        return match x.divide_exact(y) {
            Ok(Some(q)) => Some(Coeff::Exact(q)),
            Ok(None) => Some(Coeff::Float(x.to_complex() / y.to_complex())),
            Err(_) => None,
        };
    }
    let (x, y) = (h.to_complex()?, k.to_complex()?);
    (y.norm() > PARAM_TOL).then(|| Coeff::Float(x / y))
}

/// The angle of a unit-modulus coefficient.
fn unit_angle(h: &Coeff) -> Option<Phase> {
    if let Some(j) = h.as_exact().and_then(|x| x.as_omega_power()) {
        return Some(Phase::pi_frac(j, 4));
    }
    let z: Complex64 = h.to_complex()?;
    ((z.norm() - 1.0).abs() <= 1e-9).then(|| Phase::radians(z.arg()))
}

fn solve_coeff(t: &Coeff, h: &Coeff, b: &mut Bindings) -> Step {
    let Coeff::Sym(e) = t else {
        return check(coeff_eq(t, h));
    };
    match t.bind(b) {
        Ok(v) => return check(coeff_eq(&v, h)),
        Err(ParamError::WrongKind(_)) => return Step::Fail,
        Err(ParamError::Unbound(_)) => {}
    }
    match e {
        CoeffExpr::Var(v) => {
            b.0.insert(v.clone(), Value::Coeff(h.clone()));
            Step::Done
        }
        CoeffExpr::Const(c) => solve_coeff(c, h, b),
        CoeffExpr::Neg(x) => solve_coeff(x, &h.neg(), b),
        CoeffExpr::Conj(x) => solve_coeff(x, &h.conj(), b),
        CoeffExpr::Add(x, y) => match (x.bind(b), y.bind(b)) {
            (_, Ok(yv)) => solve_coeff(x, &h.sub(&yv), b),
            (Ok(xv), _) => solve_coeff(y, &h.sub(&xv), b),
            _ => Step::Wait,
        },
        CoeffExpr::Mul(x, y) => {
            let (unknown, known) = match (x.bind(b), y.bind(b)) {
                (_, Ok(yv)) => (x, yv),
                (Ok(xv), _) => (y, xv),
                _ => return Step::Wait,
            };
            match coeff_div(h, &known) {
                Some(q) => solve_coeff(unknown, &q, b),
                None => Step::Wait,
            }
        }
        CoeffExpr::ExpI(p) => match unit_angle(h) {
            Some(angle) => solve_phase(p, &angle, b),
            None => Step::Fail,
        },
    }
}

fn solve_one(t: &Generator, h: &Generator, b: &mut Bindings) -> Step {
    use Generator::*;
    match (t, h) {
        (ZxZ(p), ZxZ(q)) | (ZxX(p), ZxX(q)) => solve_phase(p, q, b),
        (ZwZ(p), ZwZ(q)) | (HBox(p), HBox(q)) => solve_coeff(p, q, b),
        _ => check(std::mem::discriminant(t) == std::mem::discriminant(h)),
    }
}

/// Solves template parameters against concrete host parameters, starting
/// from `b`. Returns `None` when the parameters disagree or some variable
/// cannot be determined.
pub fn solve(constraints: &[(Generator, Generator)], mut b: Bindings) -> Option<Bindings> {
    let mut pending: Vec<&(Generator, Generator)> = constraints.iter().collect();
    loop {
        let mut progress = false;
        let mut rest = Vec::new();
        for c in pending {
            match solve_one(&c.0, &c.1, &mut b) {
                Step::Done => progress = true,
                Step::Fail => return None,
                Step::Wait => rest.push(c),
            }
        }
        if rest.is_empty() {
            return Some(b);
        }
        if !progress {
            return None;
        }
        pending = rest;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::Calculus;

    fn zx(g: Generator, n: usize, m: usize) -> Diagram {
        Diagram::node(Calculus::ZX, g, n, m)
    }

    fn h() -> Diagram {
        zx(Generator::ZxH, 1, 1)
    }

    #[test]
    fn hadamard_pair_matches_twice_in_a_triple() {
        let host = Diagram::sequence(&[h(), h(), h()]).unwrap();
        let pat = h().compose(&h()).unwrap();
        let ms = find_matches(&pat, &host, &Bindings::new(), MatchOptions::default());
        assert_eq!(ms.len(), 2);
        let out = apply_rewrite(&host, &ms[0], &Diagram::identity(Calculus::ZX, 1)).unwrap();
        assert!(isomorphic(&out, &h()));
        // The other match now overlaps removed nodes.
        assert_eq!(apply_rewrite(&out, &ms[1], &Diagram::identity(Calculus::ZX, 1)), Err(RewriteError::StaleMatch));
    }

    #[test]
    fn phases_are_solved() {
        let a = zx(Generator::ZxZ(Phase::var("a")), 1, 1);
        let b = zx(Generator::ZxZ(Phase::var("b")), 1, 1);
        let pat = b.compose(&a).unwrap();
        let z = |k| zx(Generator::ZxZ(Phase::pi_frac(k, 4)), 1, 1);
        let host = z(1).compose(&z(2)).unwrap();
        let ms = find_matches(&pat, &host, &Bindings::new(), MatchOptions::default());
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].bindings.phase("a").unwrap(), Phase::pi_frac(2, 4));
        assert_eq!(ms[0].bindings.phase("b").unwrap(), Phase::pi_frac(1, 4));
        let pre = Bindings::new().with_phase("a", Phase::pi_frac(1, 4));
        assert!(find_matches(&pat, &host, &pre, MatchOptions::default()).is_empty());
    }

    #[test]
    fn isomorphism_ignores_ids_and_symmetric_legs() {
        let mut a = Diagram::with_boundary(Calculus::ZX, 2, 1);
        let s = a.add_node(Generator::ZxZ(Phase::zero()), 2, 1);
        a.connect(Port::b_in(0), Port::input(s, 0));
        a.connect(Port::b_in(1), Port::input(s, 1));
        a.connect(Port::output(s, 0), Port::b_out(0));
        let mut b = Diagram::with_boundary(Calculus::ZX, 2, 1);
        let _spare = b.add_node(Generator::ZxH, 1, 1);
        b.remove_node(0);
        let t = b.add_node(Generator::ZxZ(Phase::zero()), 2, 1);
        b.connect(Port::b_in(0), Port::input(t, 1));
        b.connect(Port::b_in(1), Port::input(t, 0));
        b.connect(Port::output(t, 0), Port::b_out(0));
        assert!(isomorphic(&a, &b));
        let c = zx(Generator::ZxX(Phase::zero()), 2, 1);
        assert!(!isomorphic(&a, &c));
    }

    #[test]
    fn wire_pattern_matches_every_wire_both_ways() {
        let host = h();
        let pat = Diagram::identity(Calculus::ZX, 1);
        let ms = find_matches(&pat, &host, &Bindings::new(), MatchOptions::default());
        assert_eq!(ms.len(), 4);
        let out = apply_rewrite(&host, &ms[0], &h().compose(&h()).unwrap()).unwrap();
        assert_eq!(out.node_count(), 3);
        assert!(out.is_valid());
    }

    #[test]
    fn coefficient_expressions_invert() {
        let t = Generator::ZwZ(Coeff::var("r").sub(&Coeff::int(1)));
        let hgen = Generator::ZwZ(Coeff::int(4));
        let b = solve(&[(t, hgen)], Bindings::new()).unwrap();
        assert_eq!(b.coeff("r").unwrap(), Coeff::int(5));
        let t = Generator::HBox(Phase::var("a").exp_i());
        let hgen = Generator::HBox(Phase::pi_frac(3, 4).exp_i());
        let b = solve(&[(t, hgen)], Bindings::new()).unwrap();
        assert_eq!(b.phase("a").unwrap(), Phase::pi_frac(3, 4));
    }
}
