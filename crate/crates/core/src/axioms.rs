//! Rule libraries for ZX, its π/2 fragment, ZW and ZH, the discard axioms
//! for each calculus, and a semantic soundness verifier.
//!
//! Rules are templates: a builder takes the variadic leg counts and returns
//! both sides with symbolic parameters, which [`instantiate`] then binds.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::builders;
use crate::cpm::{interpret_cpm_with, CpmError};
use crate::diagram::{Calculus, Diagram, Generator, Port};
use crate::param::{Bindings, Coeff, ParamError, Phase};
use crate::ring::ExactScalar;
use crate::semantics::{interp_with, is_exact_representable, Backend, SemanticsError};
use crate::tensor::{equal_up_to_global_phase, AnyTensor, Schedule};

pub const LIBRARY_NAMES: [&str; 7] = ["zx-full", "zx-pi2", "zw", "zh", "zx-ground", "zw-ground", "zh-ground"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AxiomError {
    #[error("unknown library `{0}` (expected one of: {list})", list = LIBRARY_NAMES.join(", "))]
    UnknownLibrary(String),
    #[error("unknown rule `{0}` in library `{1}`")]
    UnknownRule(String, String),
    #[error("rule `{rule}` takes {expected} leg counts, got {got}")]
    LegCount { rule: String, expected: usize, got: usize },
    #[error("leg count {value} for `{slot}` is outside {min}..={max}")]
    LegBound { slot: String, value: usize, min: usize, max: usize },
    #[error("incomplete bindings: {0}")]
    Incomplete(#[from] ParamError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Pure,
    Cpm,
}

/// Values a parameter slot ranges over during verification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// Multiples of π/4 exactly, plus random float angles.
    Phase4,
    /// Multiples of π/2 only.
    Phase2,
    /// A grid of ring elements exactly, plus random complex floats.
    Coeff,
}

#[derive(Clone, Debug)]
pub struct ParamSlot {
    pub name: &'static str,
    pub domain: Domain,
}

#[derive(Clone, Debug)]
pub struct LegSlot {
    pub name: &'static str,
    pub min: usize,
    pub max: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    LeftToRight,
    RightToLeft,
}

impl Direction {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "lr" | "LR" | "l2r" | "->" => Some(Direction::LeftToRight),
            "rl" | "RL" | "r2l" | "<-" => Some(Direction::RightToLeft),
            _ => None,
        }
    }
}

type Build = fn(&[usize]) -> (Diagram, Diagram);

#[derive(Clone)]
pub struct RewriteRule {
    pub name: &'static str,
    pub calculus: Calculus,
    pub mode: Mode,
    /// The source figure is ambiguous; the rule is checked semantically only.
    pub provisional: bool,
    pub legs: Vec<LegSlot>,
    pub params: Vec<ParamSlot>,
    build: Build,
}

impl std::fmt::Debug for RewriteRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RewriteRule")
            .field("name", &self.name)
            .field("calculus", &self.calculus)
            .field("mode", &self.mode)
            .finish_non_exhaustive()
    }
}

impl RewriteRule {
    pub fn new(name: &'static str, calculus: Calculus, mode: Mode, build: Build) -> Self {
        RewriteRule { name, calculus, mode, provisional: false, legs: vec![], params: vec![], build }
    }

    pub fn legs(mut self, names: &[&'static str], min: usize, max: usize) -> Self {
        self.legs.extend(names.iter().map(|&name| LegSlot { name, min, max }));
        self
    }

    pub fn params(mut self, names: &[&'static str], domain: Domain) -> Self {
        self.params.extend(names.iter().map(|&name| ParamSlot { name, domain }));
        self
    }

    pub fn provisional(mut self) -> Self {
        self.provisional = true;
        self
    }

    fn check_legs(&self, legs: &[usize]) -> Result<(), AxiomError> {
        if legs.len() != self.legs.len() {
            return Err(AxiomError::LegCount {
                rule: self.name.to_string(),
                expected: self.legs.len(),
                got: legs.len(),
            });
        }
        for (slot, &v) in self.legs.iter().zip(legs) {
            if v < slot.min || v > slot.max {
                return Err(AxiomError::LegBound { slot: slot.name.to_string(), value: v, min: slot.min, max: slot.max });
            }
        }
        Ok(())
    }

    /// Both sides with symbolic parameters.
    pub fn templates(&self, legs: &[usize]) -> Result<(Diagram, Diagram), AxiomError> {
        self.check_legs(legs)?;
        Ok((self.build)(legs))
    }

    /// The side to match and the side to insert for a direction.
    pub fn oriented(&self, legs: &[usize], dir: Direction) -> Result<(Diagram, Diagram), AxiomError> {
        let (l, r) = self.templates(legs)?;
        Ok(match dir {
            Direction::LeftToRight => (l, r),
            Direction::RightToLeft => (r, l),
        })
    }
}

/// Substitutes every template variable.
pub fn bind_diagram(d: &Diagram, b: &Bindings) -> Result<Diagram, ParamError> {
    d.map_generators(|g| {
        Ok(match g {
            Generator::ZxZ(p) => Generator::ZxZ(p.bind(b)?),
            Generator::ZxX(p) => Generator::ZxX(p.bind(b)?),
            Generator::ZwZ(c) => Generator::ZwZ(c.bind(b)?),
            Generator::HBox(c) => Generator::HBox(c.bind(b)?),
            g => g.clone(),
        })
    })
}

/// Concrete left and right sides for the given leg counts and bindings.
pub fn instantiate(rule: &RewriteRule, legs: &[usize], b: &Bindings) -> Result<(Diagram, Diagram), AxiomError> {
    let (l, r) = rule.templates(legs)?;
    Ok((bind_diagram(&l, b)?, bind_diagram(&r, b)?))
}

#[derive(Clone, Debug)]
pub struct RuleLibrary {
    pub name: &'static str,
    pub rules: Vec<RewriteRule>,
}

impl RuleLibrary {
    pub fn get(&self, rule: &str) -> Result<&RewriteRule, AxiomError> {
        self.rules
            .iter()
            .find(|r| r.name == rule)
            .ok_or_else(|| AxiomError::UnknownRule(rule.to_string(), self.name.to_string()))
    }
}

pub fn library(name: &str) -> Result<RuleLibrary, AxiomError> {
    let (name, rules) = match name {
        "zx-full" => ("zx-full", zx_rules(Domain::Phase4)),
        "zx-pi2" => ("zx-pi2", zx_rules(Domain::Phase2)),
        "zw" => ("zw", zw_rules()),
        "zh" => ("zh", zh_rules()),
        "zx-ground" => ("zx-ground", zx_ground_rules()),
        "zw-ground" => ("zw-ground", zw_ground_rules()),
        "zh-ground" => ("zh-ground", zh_ground_rules()),
        other => return Err(AxiomError::UnknownLibrary(other.to_string())),
    };
    Ok(RuleLibrary { name, rules })
}

// Template helpers.

fn id(c: Calculus, n: usize) -> Diagram {
    Diagram::identity(c, n)
}

fn par(c: Calculus, parts: &[Diagram]) -> Diagram {
    Diagram::tensor_all(c, parts).expect("same calculus")
}

fn seq(parts: &[Diagram]) -> Diagram {
    Diagram::sequence(parts).expect("template arities agree")
}

fn rep(c: Calculus, d: &Diagram, k: usize) -> Diagram {
    par(c, &vec![d.clone(); k])
}

fn var(name: &str) -> Phase {
    Phase::var(name)
}

fn zxz(n: usize, m: usize, p: Phase) -> Diagram {
    Diagram::node(Calculus::ZX, Generator::ZxZ(p), n, m)
}

fn zxx(n: usize, m: usize, p: Phase) -> Diagram {
    Diagram::node(Calculus::ZX, Generator::ZxX(p), n, m)
}

fn zxh() -> Diagram {
    Diagram::node(Calculus::ZX, Generator::ZxH, 1, 1)
}

fn pi() -> Phase {
    Phase::pi_frac(1, 1)
}

/// Two spiders joined by one wire: the last output of `a` feeds the first
/// input of `b`, with `mid` spliced in between.
fn fused(c: Calculus, a: Generator, b: Generator, mid: Option<Diagram>, l: &[usize]) -> Diagram {
    let (n1, m1, n2, m2) = (l[0], l[1], l[2], l[3]);
    let first = par(c, &[Diagram::node(c, a, n1, m1 + 1), id(c, n2)]);
    let last = par(c, &[id(c, m1), Diagram::node(c, b, 1 + n2, m2)]);
    match mid {
        Some(m) => seq(&[first, par(c, &[id(c, m1), m, id(c, n2)]), last]),
        None => seq(&[first, last]),
    }
}

/// (b ⊗ b) ∘ (1 ⊗ swap ⊗ 1) ∘ (a ⊗ a) for copy-like a: 1 → 2, b: 2 → 1.
fn bialgebra_lhs(c: Calculus, a: &Diagram, b: &Diagram) -> Diagram {
    let cross = par(c, &[id(c, 1), builders::swap(c), id(c, 1)]);
    seq(&[par(c, &[a.clone(), a.clone()]), cross, par(c, &[b.clone(), b.clone()])])
}

fn zx_inv2() -> Diagram {
    par(Calculus::ZX, &[builders::zx_inv_sqrt2(), builders::zx_inv_sqrt2()])
}

fn zx_rules(dom: Domain) -> Vec<RewriteRule> {
    use Calculus::ZX;
    let r = |name, build| RewriteRule::new(name, ZX, Mode::Pure, build);
    let mut rules = vec![
        r("spider-z", |l| {
            let lhs = fused(ZX, Generator::ZxZ(var("a")), Generator::ZxZ(var("b")), None, l);
            (lhs, zxz(l[0] + l[2], l[1] + l[3], var("a").add(&var("b"))))
        })
        .legs(&["n1", "m1", "n2", "m2"], 0, 3)
        .params(&["a", "b"], dom),
        r("spider-x", |l| {
            let lhs = fused(ZX, Generator::ZxX(var("a")), Generator::ZxX(var("b")), None, l);
            (lhs, zxx(l[0] + l[2], l[1] + l[3], var("a").add(&var("b"))))
        })
        .legs(&["n1", "m1", "n2", "m2"], 0, 3)
        .params(&["a", "b"], dom),
        r("identity-z", |_| (zxz(1, 1, Phase::zero()), id(ZX, 1))),
        r("identity-x", |_| (zxx(1, 1, Phase::zero()), id(ZX, 1))),
        r("h2", |_| (seq(&[zxh(), zxh()]), id(ZX, 1))),
        r("color-change", |l| {
            let (n, m) = (l[0], l[1]);
            let lhs = seq(&[rep(ZX, &zxh(), n), zxz(n, m, var("a")), rep(ZX, &zxh(), m)]);
            (lhs, zxx(n, m, var("a")))
        })
        .legs(&["n", "m"], 0, 3)
        .params(&["a"], dom),
        r("pi-commute", |l| {
            let (n, m) = (l[0], l[1]);
            let not = zxx(1, 1, pi());
            let lhs = seq(&[rep(ZX, &not, n), zxz(n, m, var("a"))]);
            let body = seq(&[zxz(n, m, var("a").neg()), rep(ZX, &not, m)]);
            let phase = builders::global_phase(ZX, &var("a")).expect("zx phase");
            (lhs, par(ZX, &[body, phase]))
        })
        .legs(&["n", "m"], 0, 3)
        .params(&["a"], dom),
        r("copy", |l| {
            let m = l[0];
            let lhs = seq(&[zxz(0, 1, Phase::zero()), zxx(1, m, Phase::zero())]);
            let rhs = par(ZX, &[rep(ZX, &zxz(0, 1, Phase::zero()), m), builders::zx_sqrt2_pow(1 - m as i32)]);
            (lhs, rhs)
        })
        .legs(&["m"], 0, 3),
        r("bialgebra", |_| {
            let lhs = bialgebra_lhs(ZX, &zxz(1, 2, Phase::zero()), &zxx(2, 1, Phase::zero()));
            let rhs = seq(&[zxx(2, 1, Phase::zero()), zxz(1, 2, Phase::zero())]);
            (lhs, par(ZX, &[rhs, builders::zx_inv_sqrt2()]))
        }),
        r("hopf", |_| {
            let lhs = seq(&[zxz(1, 2, Phase::zero()), zxx(2, 1, Phase::zero())]);
            let rhs = seq(&[zxz(1, 0, Phase::zero()), zxx(0, 1, Phase::zero())]);
            (lhs, par(ZX, &[rhs, zx_inv2()]))
        }),
        r("euler", |_| {
            let q = Phase::pi_frac(1, 2);
            let rhs = seq(&[zxz(1, 1, q.clone()), zxx(1, 1, q.clone()), zxz(1, 1, q)]);
            // e^{−iπ/4} = (1 + e^{3iπ/2})/√2 keeps every phase on the π/2 grid.
            let phase = par(ZX, &[zxz(0, 0, Phase::pi_frac(3, 2)), builders::zx_inv_sqrt2()]);
            (zxh(), par(ZX, &[rhs, phase]))
        }),
        r("scalar-inverse", |_| {
            (par(ZX, &[builders::zx_sqrt2(), builders::zx_inv_sqrt2()]), Diagram::empty(ZX))
        }),
    ];
    if dom == Domain::Phase4 {
        rules.push(
            r("pi-copy", |l| {
                let m = l[0];
                let lhs = seq(&[zxx(0, 1, pi()), zxz(1, m, var("a"))]);
                let phase = builders::global_phase(ZX, &var("a")).expect("zx phase");
                let rhs = par(ZX, &[rep(ZX, &zxx(0, 1, pi()), m), phase, builders::zx_sqrt2_pow(1 - m as i32)]);
                (lhs, rhs)
            })
            .legs(&["m"], 0, 3)
            .params(&["a"], dom),
        );
        rules.push(
            r("supplementarity", |_| {
                let states = par(ZX, &[zxz(0, 1, var("a")), zxz(0, 1, var("a").add(&pi()))]);
                let lhs = seq(&[states, zxx(2, 1, Phase::zero())]);
                let rhs = par(ZX, &[zxx(0, 1, Phase::zero()), zxz(0, 0, var("a").scale(2).add(&pi())), zx_inv2()]);
                (lhs, rhs)
            })
            .params(&["a"], dom),
        );
    } else {
        rules.push(
            r("zero", |l| {
                let (n, m) = (l[0], l[1]);
                let lhs = par(ZX, &[zxz(0, 0, pi()), zxz(n, m, var("a"))]);
                let rhs = par(ZX, &[zxz(0, 0, pi()), zxz(n, 0, Phase::zero()), zxz(0, m, Phase::zero())]);
                (lhs, rhs)
            })
            .legs(&["n", "m"], 0, 3)
            .params(&["a"], dom),
        );
    }
    rules
}

fn zwz(n: usize, m: usize, r: Coeff) -> Diagram {
    Diagram::node(Calculus::ZW, Generator::ZwZ(r), n, m)
}

fn zww(n: usize, m: usize) -> Diagram {
    Diagram::node(Calculus::ZW, Generator::ZwW, n, m)
}

fn fswap() -> Diagram {
    Diagram::node(Calculus::ZW, Generator::FSwap, 2, 2)
}

fn zw_rules() -> Vec<RewriteRule> {
    use Calculus::ZW;
    let r = |name, build| RewriteRule::new(name, ZW, Mode::Pure, build);
    vec![
        r("z-fusion", |l| {
            let lhs = fused(ZW, Generator::ZwZ(Coeff::var("r")), Generator::ZwZ(Coeff::var("s")), None, l);
            (lhs, zwz(l[0] + l[2], l[1] + l[3], Coeff::var("r").mul(&Coeff::var("s"))))
        })
        .legs(&["n1", "m1", "n2", "m2"], 0, 3)
        .params(&["r", "s"], Domain::Coeff),
        r("z-identity", |_| (zwz(1, 1, Coeff::int(1)), id(ZW, 1))),
        r("w-fusion", |l| {
            let lhs = fused(ZW, Generator::ZwW, Generator::ZwW, Some(zww(1, 1)), l);
            (lhs, zww(l[0] + l[2], l[1] + l[3]))
        })
        .legs(&["n1", "m1", "n2", "m2"], 0, 3),
        r("not-involution", |_| (seq(&[zww(1, 1), zww(1, 1)]), id(ZW, 1))),
        r("fswap-involution", |_| (seq(&[fswap(), fswap()]), id(ZW, 2))),
        r("z-copy-one", |l| {
            let m = l[0];
            let lhs = seq(&[zww(0, 1), zwz(1, m, Coeff::var("r"))]);
            let rhs = par(ZW, &[rep(ZW, &zww(0, 1), m), zwz(0, 0, Coeff::var("r").sub(&Coeff::int(1)))]);
            (lhs, rhs)
        })
        .legs(&["m"], 0, 3)
        .params(&["r"], Domain::Coeff),
        r("z-zero", |l| {
            let m = l[0];
            let zero = zwz(0, 1, Coeff::int(0));
            (seq(&[zero.clone(), zwz(1, m, Coeff::var("r"))]), rep(ZW, &zero, m))
        })
        .legs(&["m"], 0, 3)
        .params(&["r"], Domain::Coeff),
        r("w-zero", |l| {
            let (n, m) = (l[0], l[1]);
            let lhs = seq(&[par(ZW, &[zwz(0, 1, Coeff::int(0)), id(ZW, n)]), zww(n + 1, m)]);
            (lhs, zww(n, m))
        })
        .legs(&["n", "m"], 0, 3),
        r("fswap-yang-baxter", |_| {
            let a = par(ZW, &[fswap(), id(ZW, 1)]);
            let b = par(ZW, &[id(ZW, 1), fswap()]);
            (seq(&[a.clone(), b.clone(), a.clone()]), seq(&[b.clone(), a, b]))
        }),
        r("fswap-natural", |_| {
            let lhs = seq(&[par(ZW, &[zwz(1, 1, Coeff::var("r")), id(ZW, 1)]), fswap()]);
            let rhs = seq(&[fswap(), par(ZW, &[id(ZW, 1), zwz(1, 1, Coeff::var("r"))])]);
            (lhs, rhs)
        })
        .params(&["r"], Domain::Coeff),
    ]
}

fn zhz(n: usize, m: usize) -> Diagram {
    Diagram::node(Calculus::ZH, Generator::ZhZ, n, m)
}

fn zhx(n: usize, m: usize) -> Diagram {
    Diagram::node(Calculus::ZH, Generator::ZhX, n, m)
}

fn hbox(n: usize, m: usize, a: Coeff) -> Diagram {
    Diagram::node(Calculus::ZH, Generator::HBox(a), n, m)
}

fn zh_had() -> Diagram {
    hbox(1, 1, Coeff::int(-1))
}

fn zh_rules() -> Vec<RewriteRule> {
    use Calculus::ZH;
    let r = |name, build| RewriteRule::new(name, ZH, Mode::Pure, build);
    vec![
        r("z-fusion", |l| (fused(ZH, Generator::ZhZ, Generator::ZhZ, None, l), zhz(l[0] + l[2], l[1] + l[3])))
            .legs(&["n1", "m1", "n2", "m2"], 0, 3),
        r("x-fusion", |l| (fused(ZH, Generator::ZhX, Generator::ZhX, None, l), zhx(l[0] + l[2], l[1] + l[3])))
            .legs(&["n1", "m1", "n2", "m2"], 0, 3),
        r("z-identity", |_| (zhz(1, 1), id(ZH, 1))),
        r("x-identity", |_| (zhx(1, 1), id(ZH, 1))),
        r("hbox-pair", |_| (seq(&[zh_had(), zh_had()]), par(ZH, &[id(ZH, 1), hbox(0, 0, Coeff::int(2))]))),
        r("x-definition", |l| {
            let (n, m) = (l[0], l[1]);
            let half = hbox(0, 0, Coeff::Exact(ExactScalar::sqrt2_pow(-2)));
            let body = seq(&[rep(ZH, &zh_had(), n), zhz(n, m), rep(ZH, &zh_had(), m)]);
            (zhx(n, m), par(ZH, &[body, half]))
        })
        .legs(&["n", "m"], 0, 3),
        r("hbox-unit", |l| {
            let (n, m) = (l[0], l[1]);
            (hbox(n, m, Coeff::int(1)), par(ZH, &[rep(ZH, &zhz(1, 0), n), rep(ZH, &zhz(0, 1), m)]))
        })
        .legs(&["n", "m"], 0, 3),
        r("multiply", |l| {
            let k = l[0];
            let mut d = Diagram::with_boundary(ZH, k, 0);
            let ha = d.add_node(Generator::HBox(Coeff::var("a")), k, 0);
            let hb = d.add_node(Generator::HBox(Coeff::var("b")), k, 0);
            for i in 0..k {
                let z = d.add_node(Generator::ZhZ, 1, 2);
                d.connect(Port::b_in(i), Port::input(z, 0));
                d.connect(Port::output(z, 0), Port::input(ha, i));
                d.connect(Port::output(z, 1), Port::input(hb, i));
            }
            (d, hbox(k, 0, Coeff::var("a").mul(&Coeff::var("b"))))
        })
        .legs(&["k"], 0, 3)
        .params(&["a", "b"], Domain::Coeff),
        r("not-commute", |l| {
            let (n, m) = (l[0], l[1]);
            let not = Diagram::node(ZH, Generator::Not, 1, 1);
            (seq(&[rep(ZH, &not, n), zhz(n, m)]), seq(&[zhz(n, m), rep(ZH, &not, m)]))
        })
        .legs(&["n", "m"], 0, 3),
        r("copy", |l| {
            let m = l[0];
            (seq(&[zhx(0, 1), zhz(1, m)]), rep(ZH, &zhx(0, 1), m))
        })
        .legs(&["m"], 0, 3),
        r("bialgebra", |_| (bialgebra_lhs(ZH, &zhz(1, 2), &zhx(2, 1)), seq(&[zhx(2, 1), zhz(1, 2)]))),
    ]
}

fn ground_rule(name: &'static str, c: Calculus, build: Build) -> RewriteRule {
    RewriteRule::new(name, c, Mode::Cpm, build)
}

/// ground^{⊗out} ∘ g, and ground^{⊗in} on the right.
fn discard_pair(g: Diagram) -> (Diagram, Diagram) {
    let c = g.calculus();
    let lhs = builders::ground(c, g.num_outputs()).compose(&g).expect("arity");
    (lhs, builders::ground(c, g.num_inputs()))
}

fn zx_ground_rules() -> Vec<RewriteRule> {
    use Calculus::ZX;
    vec![
        ground_rule("phase", ZX, |_| discard_pair(builders::global_phase(ZX, &var("a")).unwrap()))
            .params(&["a"], Domain::Phase4),
        ground_rule("ket0", ZX, |_| discard_pair(builders::ket0(ZX).unwrap())),
        ground_rule("h", ZX, |_| discard_pair(zxh())),
        ground_rule("rz", ZX, |l| discard_pair(zxz(1, l[0], var("a"))))
            .legs(&["m"], 1, 3)
            .params(&["a"], Domain::Phase4),
        ground_rule("cnot", ZX, |_| discard_pair(builders::cnot(ZX).unwrap())),
    ]
}

fn zw_ground_rules() -> Vec<RewriteRule> {
    use Calculus::ZW;
    vec![
        ground_rule("phase", ZW, |_| discard_pair(builders::global_phase(ZW, &var("a")).unwrap()))
            .params(&["a"], Domain::Phase4),
        ground_rule("ket1", ZW, |_| discard_pair(zww(0, 1))),
        ground_rule("ghz", ZW, |l| discard_pair(zwz(1, l[0], var("a").exp_i())))
            .legs(&["m"], 1, 3)
            .params(&["a"], Domain::Phase4),
        ground_rule("h", ZW, |_| discard_pair(builders::h(ZW).unwrap())),
        ground_rule("fswap", ZW, |_| discard_pair(fswap())),
    ]
}

fn zh_ground_rules() -> Vec<RewriteRule> {
    use Calculus::ZH;
    vec![
        ground_rule("phase", ZH, |_| discard_pair(builders::global_phase(ZH, &var("a")).unwrap()))
            .params(&["a"], Domain::Phase4),
        ground_rule("ket0", ZH, |_| discard_pair(builders::ket0(ZH).unwrap())),
        ground_rule("h", ZH, |_| discard_pair(builders::h(ZH).unwrap())),
        ground_rule("rz", ZH, |_| discard_pair(builders::rz(ZH, &var("a")).unwrap()))
            .params(&["a"], Domain::Phase4),
        ground_rule("cz", ZH, |_| discard_pair(builders::cz(ZH).unwrap())),
    ]
}

// Verification.

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Exact,
    Tolerance,
    Projective,
    Unsound,
}

#[derive(Clone, Debug, Serialize)]
pub struct RuleReport {
    pub rule: String,
    pub mode: Mode,
    pub provisional: bool,
    pub instantiations: usize,
    pub max_residual: f64,
    pub verdict: Verdict,
    /// The global phase λ with lhs = λ·rhs, when equality is only projective.
    pub phase_factor: Option<[f64; 2]>,
    pub note: Option<String>,
}

impl RuleReport {
    pub fn sound(&self) -> bool {
        self.verdict != Verdict::Unsound
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SoundnessReport {
    pub library: String,
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
    pub backend: Backend,
    pub max_legs: usize,
    pub rules: Vec<RuleReport>,
}

impl SoundnessReport {
    pub fn all_sound(&self) -> bool {
        self.rules.iter().all(RuleReport::sound)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub samples: usize,
    pub tol: f64,
    pub backend: Backend,
    pub seed: u64,
    /// Upper bound on every variadic leg count.
    pub max_legs: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { samples: 25, tol: 1e-9, backend: Backend::Exact, seed: 0, max_legs: 3 }
    }
}

fn exact_grid(d: Domain) -> Vec<crate::param::Value> {
    use crate::param::Value;
    match d {
        Domain::Phase4 => (0..8).map(|k| Value::Phase(Phase::pi_frac(k, 4))).collect(),
        Domain::Phase2 => (0..4).map(|k| Value::Phase(Phase::pi_frac(k, 2))).collect(),
        Domain::Coeff => [
            ExactScalar::zero(),
            ExactScalar::one(),
            ExactScalar::from_int(-1),
            ExactScalar::i(),
            ExactScalar::from_int(2),
            ExactScalar::one().add(&ExactScalar::i()),
            ExactScalar::omega_pow(1),
            ExactScalar::sqrt2_pow(-1),
        ]
        .into_iter()
        .map(|x| Value::Coeff(Coeff::Exact(x)))
        .collect(),
    }
}

fn random_value(d: Domain, rng: &mut ChaCha8Rng) -> crate::param::Value {
    use crate::param::Value;
    match d {
        Domain::Phase4 => Value::Phase(Phase::radians(rng.gen_range(0.0..TAU))),
        Domain::Phase2 => Value::Phase(Phase::pi_frac(rng.gen_range(0..4), 2)),
        Domain::Coeff => Value::Coeff(Coeff::Float(Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))),
    }
}

fn product<T: Clone>(axes: &[Vec<T>]) -> Vec<Vec<T>> {
    axes.iter().fold(vec![vec![]], |acc, axis| {
        acc.iter()
            .flat_map(|prefix| {
                axis.iter().map(move |x| {
                    let mut v = prefix.clone();
                    v.push(x.clone());
                    v
                })
            })
            .collect()
    })
}

/// Leg configurations and bindings covering every slot: the exact grid
/// paired round-robin with all leg counts, then random float samples.
pub fn instantiations(rule: &RewriteRule, samples: usize, seed: u64, max_legs: usize) -> Vec<(Vec<usize>, Bindings)> {
    let ranges = rule.legs.iter().map(|s| (s.min..=s.max.min(max_legs).max(s.min)).collect()).collect::<Vec<_>>();
    let legs = product(&ranges);
    let grids: Vec<_> = rule.params.iter().map(|p| exact_grid(p.domain)).collect();
    let combos = product(&grids);
    let bind = |vals: Vec<crate::param::Value>| {
        Bindings(rule.params.iter().map(|p| p.name.to_string()).zip(vals).collect())
    };
    let n = legs.len().max(combos.len());
    let mut out: Vec<_> = (0..n).map(|i| (legs[i % legs.len()].clone(), bind(combos[i % combos.len()].clone()))).collect();
    let floats = rule.params.iter().any(|p| p.domain != Domain::Phase2);
    if floats {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..samples * rule.params.len() {
            let vals = rule.params.iter().map(|p| random_value(p.domain, &mut rng)).collect();
            out.push((legs[i % legs.len()].clone(), bind(vals)));
        }
    }
    out
}

#[derive(Debug, Error)]
enum EvalError {
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Cpm(#[from] CpmError),
}

fn evaluate(d: &Diagram, mode: Mode, backend: Backend) -> Result<AnyTensor, EvalError> {
    let exact = backend == Backend::Exact && is_exact_representable(d);
    Ok(match (mode, exact) {
        (Mode::Pure, true) => AnyTensor::Exact(interp_with::<ExactScalar>(d, Schedule::Greedy)?),
        (Mode::Pure, false) => AnyTensor::Float(interp_with::<Complex64>(d, Schedule::Greedy)?),
        (Mode::Cpm, true) => AnyTensor::Exact(interpret_cpm_with::<ExactScalar>(d)?.choi().clone()),
        (Mode::Cpm, false) => AnyTensor::Float(interpret_cpm_with::<Complex64>(d)?.choi().clone()),
    })
}

/// Compares both sides of one instantiation.
fn compare(l: &AnyTensor, r: &AnyTensor, tol: f64) -> (Verdict, f64, Option<Complex64>) {
    if let (AnyTensor::Exact(a), AnyTensor::Exact(b)) = (l, r) {
        if a == b {
            return (Verdict::Exact, 0.0, None);
        }
    }
    let (a, b) = (l.to_float(), r.to_float());
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return (Verdict::Unsound, f64::INFINITY, None);
    }
    let diff = a.max_abs_diff(&b);
    if diff <= tol {
        return (Verdict::Tolerance, diff, None);
    }
    if let Some(lambda) = equal_up_to_global_phase(&a, &b, tol) {
        return (Verdict::Projective, a.max_abs_diff(&b.scale(&lambda)), Some(lambda));
    }
    (Verdict::Unsound, diff, None)
}

pub fn verify_rule(rule: &RewriteRule, opts: &VerifyOptions) -> RuleReport {
    let mut report = RuleReport {
        rule: rule.name.to_string(),
        mode: rule.mode,
        provisional: rule.provisional,
        instantiations: 0,
        max_residual: 0.0,
        verdict: Verdict::Exact,
        phase_factor: None,
        note: rule.provisional.then(|| "provisional: checked semantically only".to_string()),
    };
    let mut notes = Vec::new();
    for (legs, b) in instantiations(rule, opts.samples, opts.seed, opts.max_legs) {
        report.instantiations += 1;
        let result = instantiate(rule, &legs, &b)
            .map_err(|e| e.to_string())
            .and_then(|(l, r)| {
                let el = evaluate(&l, rule.mode, opts.backend).map_err(|e| e.to_string())?;
                let er = evaluate(&r, rule.mode, opts.backend).map_err(|e| e.to_string())?;
                Ok(compare(&el, &er, opts.tol))
            });
        let (verdict, residual, lambda) = match result {
            Ok(v) => v,
            Err(e) => {
                notes.push(format!("legs {legs:?} [{b}]: {e}"));
                (Verdict::Unsound, f64::INFINITY, None)
            }
        };
        if verdict == Verdict::Unsound && notes.is_empty() {
            notes.push(format!("differs at legs {legs:?} [{b}], residual {residual:.3e}"));
        }
        if let Some(z) = lambda {
            match report.phase_factor {
                None => report.phase_factor = Some([z.re, z.im]),
                Some([re, im]) if (Complex64::new(re, im) - z).norm() > opts.tol.max(1e-9) => {
                    if !notes.iter().any(|n| n.starts_with("phase factor varies")) {
                        notes.push("phase factor varies between instantiations".to_string());
                    }
                }
                _ => {}
            }
        }
        report.max_residual = report.max_residual.max(residual);
        report.verdict = report.verdict.max(verdict);
    }
    if report.verdict == Verdict::Projective {
        notes.insert(0, "holds only up to a global phase".to_string());
    }
    if !notes.is_empty() {
        let joined = notes.join("; ");
        report.note = Some(match report.note.take() {
            Some(p) => format!("{p}; {joined}"),
            None => joined,
        });
    }
    report
}

pub fn verify_library(name: &str, opts: &VerifyOptions) -> Result<SoundnessReport, AxiomError> {
    let lib = library(name)?;
    let rules = lib.rules.iter().map(|r| verify_rule(r, opts)).collect();
    Ok(SoundnessReport {
        library: lib.name.to_string(),
        samples: opts.samples,
        tol: opts.tol,
        seed: opts.seed,
        backend: opts.backend,
        max_legs: opts.max_legs,
        rules,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::interp_exact;

    #[test]
    fn spider_fusion_instance() {
        let lib = library("zx-full").unwrap();
        let rule = lib.get("spider-z").unwrap();
        let b = Bindings::new()
            .with_phase("a", Phase::pi_frac(1, 4))
            .with_phase("b", Phase::pi_frac(1, 2));
        let (l, r) = instantiate(rule, &[1, 0, 0, 1], &b).unwrap();
        assert_eq!(l.node_count(), 2);
        assert_eq!(r, zxz(1, 1, Phase::pi_frac(3, 4)));
        assert_eq!(interp_exact(&l).unwrap(), interp_exact(&r).unwrap());
    }

    #[test]
    fn instantiate_reports_problems() {
        let lib = library("zx-full").unwrap();
        let rule = lib.get("spider-z").unwrap();
        assert!(matches!(instantiate(rule, &[1, 0, 0, 1], &Bindings::new()), Err(AxiomError::Incomplete(_))));
        assert!(matches!(instantiate(rule, &[4, 0, 0, 1], &Bindings::new()), Err(AxiomError::LegBound { .. })));
        assert!(matches!(library("zx-nope"), Err(AxiomError::UnknownLibrary(_))));
    }

    #[test]
    fn h2_is_exact() {
        let lib = library("zx-full").unwrap();
        let rep = verify_rule(lib.get("h2").unwrap(), &VerifyOptions::default());
        assert_eq!(rep.verdict, Verdict::Exact);
        assert_eq!(rep.max_residual, 0.0);
    }

    #[test]
    fn corrupted_rule_is_unsound() {
        let bad = RewriteRule::new("bad-h2", Calculus::ZX, Mode::Pure, |_| {
            (seq(&[zxh(), zxh()]), zxz(1, 1, Phase::pi_frac(1, 1)))
        });
        let rep = verify_rule(&bad, &VerifyOptions::default());
        assert_eq!(rep.verdict, Verdict::Unsound);
    }

    #[test]
    fn rule_names_are_unique() {
        for name in LIBRARY_NAMES {
            let lib = library(name).unwrap();
            let mut names: Vec<_> = lib.rules.iter().map(|r| r.name).collect();
            names.sort_unstable();
            names.dedup();
            assert_eq!(names.len(), lib.rules.len(), "{name}");
        }
    }
}
