//! Generator parameters: phases (angles) and complex coefficients.
//!
//! Both come in three flavours: exact (representable in the ring, or a
//! rational multiple of π for phases), floating, and symbolic. Symbolic
//! values only appear in rule templates and are resolved through
//! [`Bindings`] before any semantics is computed.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::ring::ExactScalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("unbound template variable `{0}`")]
    Unbound(String),
    #[error("variable `{0}` is bound to a value of the wrong kind")]
    WrongKind(String),
}

/// An angle, normalized into [0, 2π).
#[derive(Clone, Debug, PartialEq)]
pub enum Phase {
    /// A rational multiple of π, stored reduced in [0, 2).
    Exact(Rational64),
    /// Radians in [0, 2π).
    Float(f64),
    Sym(PhaseExpr),
}

/// A linear form Σ cᵢ·varᵢ + constant over phase variables.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseExpr {
    pub terms: BTreeMap<String, i64>,
    pub constant: Box<Phase>,
}

impl Phase {
    pub fn zero() -> Self {
        Phase::Exact(Rational64::zero())
    }

    /// num/den · π
    pub fn pi_frac(num: i64, den: i64) -> Self {
        let r = Rational64::new(num, den);
        let two = Rational64::from_integer(2);
        let mut r = r % two;
        if r.is_negative() {
            r += two;
        }
        Phase::Exact(r)
    }

    pub fn radians(x: f64) -> Self {
        let y = x.rem_euclid(TAU);
        // rem_euclid can round up to exactly TAU.
        Phase::Float(if y >= TAU { 0.0 } else { y })
    }

    pub fn var(name: &str) -> Self {
        Phase::Sym(PhaseExpr {
            terms: BTreeMap::from([(name.to_string(), 1)]),
            constant: Box::new(Phase::zero()),
        })
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self, Phase::Sym(_))
    }

    /// `Some(j)` when the phase is jπ/4, so that e^{iα} = ω^j.
    pub fn eighths(&self) -> Option<i64> {
        match self {
            Phase::Exact(r) => {
                let q = *r * Rational64::from_integer(4);
                q.is_integer().then(|| q.to_integer().rem_euclid(8))
            }
            _ => None,
        }
    }

    /// True when e^{iα} lies in ℤ[ω, 1/√2].
    pub fn is_exact_representable(&self) -> bool {
        self.eighths().is_some()
    }

    pub fn to_radians(&self) -> Option<f64> {
        match self {
            Phase::Exact(r) => Some(r.to_f64()? * PI),
            Phase::Float(x) => Some(*x),
            Phase::Sym(_) => None,
        }
    }

    /// e^{iα} as a coefficient: exact when representable.
    pub fn exp_i(&self) -> Coeff {
        if let Some(j) = self.eighths() {
            return Coeff::Exact(ExactScalar::omega_pow(j));
        }
        match self.to_radians() {
            Some(x) => Coeff::Float(Complex64::from_polar(1.0, x)),
            None => Coeff::Sym(CoeffExpr::ExpI(self.clone())),
        }
    }

    fn as_expr(&self) -> PhaseExpr {
        match self {
            Phase::Sym(e) => e.clone(),
            c => PhaseExpr {
                terms: BTreeMap::new(),
                constant: Box::new(c.clone()),
            },
        }
    }

    fn from_expr(e: PhaseExpr) -> Phase {
        if e.terms.is_empty() {
            *e.constant
        } else {
            Phase::Sym(e)
        }
    }

    pub fn add(&self, other: &Phase) -> Phase {
        match (self, other) {
            (Phase::Exact(a), Phase::Exact(b)) => {
                let s = *a + *b;
                Phase::pi_frac(*s.numer(), *s.denom())
            }
            (Phase::Sym(_), _) | (_, Phase::Sym(_)) => {
                let (a, b) = (self.as_expr(), other.as_expr());
                let mut terms = a.terms;
                for (v, c) in b.terms {
                    *terms.entry(v).or_insert(0) += c;
                }
                terms.retain(|_, c| *c != 0);
                Phase::from_expr(PhaseExpr {
                    terms,
                    constant: Box::new(a.constant.add(&b.constant)),
                })
            }
            _ => Phase::radians(self.to_radians().unwrap() + other.to_radians().unwrap()),
        }
    }

    pub fn neg(&self) -> Phase {
        match self {
            Phase::Exact(r) => Phase::pi_frac(-*r.numer(), *r.denom()),
            Phase::Float(x) => Phase::radians(-x),
            Phase::Sym(e) => Phase::Sym(PhaseExpr {
                terms: e.terms.iter().map(|(v, c)| (v.clone(), -c)).collect(),
                constant: Box::new(e.constant.neg()),
            }),
        }
    }

    pub fn sub(&self, other: &Phase) -> Phase {
        self.add(&other.neg())
    }

    pub fn scale(&self, n: i64) -> Phase {
        match self {
            Phase::Exact(r) => {
                let s = *r * Rational64::from_integer(n);
                Phase::pi_frac(*s.numer(), *s.denom())
            }
            Phase::Float(x) => Phase::radians(x * n as f64),
            Phase::Sym(e) => Phase::from_expr(PhaseExpr {
                terms: e
                    .terms
                    .iter()
                    .map(|(v, c)| (v.clone(), c * n))
                    .filter(|(_, c)| *c != 0)
                    .collect(),
                constant: Box::new(e.constant.scale(n)),
            }),
        }
    }

    /// Substitute bound variables. Fails when a variable is unbound.
    pub fn bind(&self, b: &Bindings) -> Result<Phase, ParamError> {
        match self {
            Phase::Sym(e) => {
                let mut acc = (*e.constant).clone();
                for (v, c) in &e.terms {
                    acc = acc.add(&b.phase(v)?.scale(*c));
                }
                Ok(acc)
            }
            p => Ok(p.clone()),
        }
    }

    /// Substitute whatever is bound, leaving other variables symbolic.
    pub fn bind_partial(&self, b: &Bindings) -> Phase {
        match self {
            Phase::Sym(e) => {
                let mut acc = Phase::from_expr(PhaseExpr {
                    terms: BTreeMap::new(),
                    constant: e.constant.clone(),
                });
                for (v, c) in &e.terms {
                    let term = match b.phase(v) {
                        Ok(p) => p.scale(*c),
                        Err(_) => Phase::var(v).scale(*c),
                    };
                    acc = acc.add(&term);
                }
                acc
            }
            p => p.clone(),
        }
    }

    /// Angular distance between two concrete phases.
    pub fn distance(&self, other: &Phase) -> Option<f64> {
        if let (Phase::Exact(a), Phase::Exact(b)) = (self, other) {
            if a == b {
                return Some(0.0);
            }
        }
        let d = (self.to_radians()? - other.to_radians()?).rem_euclid(TAU);
        Some(d.min(TAU - d))
    }

    pub fn conj(&self) -> Phase {
        self.neg()
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::Exact(r) => write!(f, "{}/{}·π", r.numer(), r.denom()),
            Phase::Float(x) => write!(f, "{x}"),
            Phase::Sym(e) => {
                for (v, c) in &e.terms {
                    write!(f, "{c:+}{v}")?;
                }
                write!(f, "+({})", e.constant)
            }
        }
    }
}

/// A complex coefficient: the ZW node weight `r` or the ZH H-box label `a`.
#[derive(Clone, Debug, PartialEq)]
pub enum Coeff {
    Exact(ExactScalar),
    Float(Complex64),
    Sym(CoeffExpr),
}

#[derive(Clone, Debug, PartialEq)]
pub enum CoeffExpr {
    Var(String),
    Const(Box<Coeff>),
    Add(Box<Coeff>, Box<Coeff>),
    Mul(Box<Coeff>, Box<Coeff>),
    Neg(Box<Coeff>),
    Conj(Box<Coeff>),
    ExpI(Phase),
}

impl Coeff {
    pub fn int(n: i64) -> Self {
        Coeff::Exact(ExactScalar::from_int(n))
    }

    pub fn var(name: &str) -> Self {
        Coeff::Sym(CoeffExpr::Var(name.to_string()))
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self, Coeff::Sym(_))
    }

    pub fn to_complex(&self) -> Option<Complex64> {
        match self {
            Coeff::Exact(x) => Some(x.to_complex()),
            Coeff::Float(z) => Some(*z),
            Coeff::Sym(_) => None,
        }
    }

    pub fn as_exact(&self) -> Option<&ExactScalar> {
        match self {
            Coeff::Exact(x) => Some(x),
            _ => None,
        }
    }

    pub fn add(&self, other: &Coeff) -> Coeff {
        match (self, other) {
            (Coeff::Exact(a), Coeff::Exact(b)) => Coeff::Exact(a.add(b)),
            (Coeff::Sym(_), _) | (_, Coeff::Sym(_)) => {
                Coeff::Sym(CoeffExpr::Add(Box::new(self.clone()), Box::new(other.clone())))
            }
            _ => Coeff::Float(self.to_complex().unwrap() + other.to_complex().unwrap()),
        }
    }

    pub fn mul(&self, other: &Coeff) -> Coeff {
        match (self, other) {
            (Coeff::Exact(a), Coeff::Exact(b)) => Coeff::Exact(a.mul(b)),
            (Coeff::Sym(_), _) | (_, Coeff::Sym(_)) => {
                Coeff::Sym(CoeffExpr::Mul(Box::new(self.clone()), Box::new(other.clone())))
            }
            _ => Coeff::Float(self.to_complex().unwrap() * other.to_complex().unwrap()),
        }
    }

    pub fn neg(&self) -> Coeff {
        match self {
            Coeff::Exact(a) => Coeff::Exact(a.neg()),
            Coeff::Float(z) => Coeff::Float(-z),
            Coeff::Sym(_) => Coeff::Sym(CoeffExpr::Neg(Box::new(self.clone()))),
        }
    }

    pub fn sub(&self, other: &Coeff) -> Coeff {
        self.add(&other.neg())
    }

    pub fn conj(&self) -> Coeff {
        match self {
            Coeff::Exact(a) => Coeff::Exact(a.conj()),
            Coeff::Float(z) => Coeff::Float(z.conj()),
            Coeff::Sym(_) => Coeff::Sym(CoeffExpr::Conj(Box::new(self.clone()))),
        }
    }

    pub fn bind(&self, b: &Bindings) -> Result<Coeff, ParamError> {
        let Coeff::Sym(e) = self else {
            return Ok(self.clone());
        };
        Ok(match e {
            CoeffExpr::Var(v) => b.coeff(v)?,
            CoeffExpr::Const(c) => (**c).clone(),
            CoeffExpr::Add(x, y) => x.bind(b)?.add(&y.bind(b)?),
            CoeffExpr::Mul(x, y) => x.bind(b)?.mul(&y.bind(b)?),
            CoeffExpr::Neg(x) => x.bind(b)?.neg(),
            CoeffExpr::Conj(x) => x.bind(b)?.conj(),
            CoeffExpr::ExpI(p) => p.bind(b)?.exp_i(),
        })
    }

    /// Distance between two concrete coefficients; exact values compare exactly.
    pub fn distance(&self, other: &Coeff) -> Option<f64> {
        if let (Coeff::Exact(a), Coeff::Exact(b)) = (self, other) {
            return Some(if a == b { 0.0 } else { (a.to_complex() - b.to_complex()).norm().max(f64::MIN_POSITIVE) });
        }
        Some((self.to_complex()? - other.to_complex()?).norm())
    }
}

impl From<ExactScalar> for Coeff {
    fn from(x: ExactScalar) -> Self {
        Coeff::Exact(x)
    }
}

impl From<Complex64> for Coeff {
    fn from(z: Complex64) -> Self {
        Coeff::Float(z)
    }
}

/// A concrete value for a template variable.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Phase(Phase),
    Coeff(Coeff),
}

/// Assignment of template variables to concrete values.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Bindings(pub BTreeMap<String, Value>);

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_phase(mut self, name: &str, p: Phase) -> Self {
        self.0.insert(name.to_string(), Value::Phase(p));
        self
    }

    pub fn with_coeff(mut self, name: &str, c: Coeff) -> Self {
        self.0.insert(name.to_string(), Value::Coeff(c));
        self
    }

    pub fn phase(&self, name: &str) -> Result<Phase, ParamError> {
        match self.0.get(name) {
            Some(Value::Phase(p)) => Ok(p.clone()),
            Some(_) => Err(ParamError::WrongKind(name.to_string())),
            None => Err(ParamError::Unbound(name.to_string())),
        }
    }

    pub fn coeff(&self, name: &str) -> Result<Coeff, ParamError> {
        match self.0.get(name) {
            Some(Value::Coeff(c)) => Ok(c.clone()),
            Some(_) => Err(ParamError::WrongKind(name.to_string())),
            None => Err(ParamError::Unbound(name.to_string())),
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    /// True when every value is exact (phases in (π/4)ℤ, coefficients in the ring).
    pub fn all_exact(&self) -> bool {
        self.0.values().all(|v| match v {
            Value::Phase(p) => p.is_exact_representable(),
            Value::Coeff(c) => matches!(c, Coeff::Exact(_)),
        })
    }
}

impl fmt::Display for Bindings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, v) in &self.0 {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            match v {
                Value::Phase(p) => write!(f, "{k}={p}")?,
                Value::Coeff(Coeff::Exact(x)) => write!(f, "{k}={x}")?,
                Value::Coeff(Coeff::Float(z)) => write!(f, "{k}={z}")?,
                Value::Coeff(c) => write!(f, "{k}={c:?}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_phase_normalizes() {
        assert_eq!(Phase::pi_frac(-1, 4), Phase::pi_frac(7, 4));
        assert_eq!(Phase::pi_frac(9, 4), Phase::pi_frac(1, 4));
        assert_eq!(Phase::pi_frac(2, 4).eighths(), Some(2));
        assert!(Phase::pi_frac(1, 8).eighths().is_none());
        assert!(!Phase::pi_frac(1, 3).is_exact_representable());
    }

    #[test]
    fn phase_addition() {
        let s = Phase::pi_frac(1, 4).add(&Phase::pi_frac(1, 2));
        assert_eq!(s, Phase::pi_frac(3, 4));
        assert_eq!(Phase::pi_frac(1, 2).neg(), Phase::pi_frac(3, 2));
    }

    #[test]
    fn symbolic_phase_binds() {
        let e = Phase::var("a").add(&Phase::var("b")).add(&Phase::pi_frac(1, 1));
        let b = Bindings::new()
            .with_phase("a", Phase::pi_frac(1, 4))
            .with_phase("b", Phase::pi_frac(1, 2));
        assert_eq!(e.bind(&b).unwrap(), Phase::pi_frac(7, 4));
        assert_eq!(
            Phase::var("a").bind(&Bindings::new()),
            Err(ParamError::Unbound("a".into()))
        );
        // a − a collapses to a constant.
        assert_eq!(Phase::var("a").sub(&Phase::var("a")), Phase::zero());
    }

    #[test]
    fn exp_i_exact_when_representable() {
        assert_eq!(Phase::pi_frac(1, 2).exp_i(), Coeff::Exact(ExactScalar::i()));
        assert!(matches!(Phase::pi_frac(1, 3).exp_i(), Coeff::Float(_)));
    }

    #[test]
    fn coeff_expression_binds() {
        let e = Coeff::var("r").mul(&Coeff::var("s")).sub(&Coeff::int(1));
        let b = Bindings::new()
            .with_coeff("r", Coeff::int(2))
            .with_coeff("s", Coeff::Exact(ExactScalar::i()));
        assert_eq!(e.bind(&b).unwrap(), Coeff::Exact(ExactScalar::new([-1, 0, 2, 0], 0)));
    }
}
