//! Standard interpretation of ground-free diagrams as matrices.
//!
//! Index convention: the leftmost wire is the most significant bit, outputs
//! index rows and inputs index columns. A node tensor lists its legs as
//! outputs then inputs, so its flat index is `row · 2ⁿ + col`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::diagram::{Diagram, Generator, Port, Side};
use crate::param::{Coeff, Phase};
use crate::ring::{ExactScalar, Scalar};
use crate::tensor::{contract_network, AnyTensor, ExactTensor, FloatTensor, Labeled, Schedule, Tensor};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SemanticsError {
    #[error("diagram contains a ground; use the CPM interpretation instead")]
    GroundPresent,
    #[error("parameter {0} is not exactly representable; use the float backend")]
    Inexact(String),
    #[error("diagram still has symbolic parameters")]
    Symbolic,
    #[error("invalid diagram: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Exact,
    Float,
}

impl Backend {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "exact" => Some(Backend::Exact),
            "float" => Some(Backend::Float),
            _ => None,
        }
    }
}

/// Converts node parameters to a scalar backend.
pub trait ParamScalar: Scalar {
    fn exp_i(p: &Phase) -> Result<Self, SemanticsError>;
    fn coeff(c: &Coeff) -> Result<Self, SemanticsError>;
    /// (1/√2)^k
    fn inv_sqrt2_pow(k: usize) -> Self;
}

impl ParamScalar for ExactScalar {
    fn exp_i(p: &Phase) -> Result<Self, SemanticsError> {
        if p.is_symbolic() {
            return Err(SemanticsError::Symbolic);
        }
        p.eighths()
            .map(ExactScalar::omega_pow)
            .ok_or_else(|| SemanticsError::Inexact(format!("phase {p}")))
    }

    fn coeff(c: &Coeff) -> Result<Self, SemanticsError> {
        match c {
            Coeff::Exact(x) => Ok(x.clone()),
            Coeff::Float(z) => Err(SemanticsError::Inexact(format!("coefficient {z}"))),
            Coeff::Sym(_) => Err(SemanticsError::Symbolic),
        }
    }

    fn inv_sqrt2_pow(k: usize) -> Self {
        ExactScalar::sqrt2_pow(-(k as i32))
    }
}

impl ParamScalar for Complex64 {
    fn exp_i(p: &Phase) -> Result<Self, SemanticsError> {
        p.to_radians()
            .map(|x| Complex64::from_polar(1.0, x))
            .ok_or(SemanticsError::Symbolic)
    }

    fn coeff(c: &Coeff) -> Result<Self, SemanticsError> {
        c.to_complex().ok_or(SemanticsError::Symbolic)
    }

    fn inv_sqrt2_pow(k: usize) -> Self {
        Complex64::new(std::f64::consts::FRAC_1_SQRT_2.powi(k as i32), 0.0)
    }
}

/// The flat tensor of a generator with `n` inputs and `m` outputs.
pub fn generator_tensor<S: ParamScalar>(
    gen: &Generator,
    n: usize,
    m: usize,
) -> Result<Vec<S>, SemanticsError> {
    let legs = n + m;
    let size = 1usize << legs;
    let last = size - 1;
    let mut data = vec![S::zero(); size];
    let spider = |data: &mut Vec<S>, w: S| {
        data[0] = data[0].add(&S::one());
        data[last] = data[last].add(&w);
    };
    match gen {
        Generator::ZxZ(p) => spider(&mut data, S::exp_i(p)?),
        Generator::ZxX(p) => {
            let e = S::exp_i(p)?;
            let norm = S::inv_sqrt2_pow(legs);
            for (idx, x) in data.iter_mut().enumerate() {
                let sign = if idx.count_ones() % 2 == 0 { e.clone() } else { e.neg() };
                *x = norm.mul(&S::one().add(&sign));
            }
        }
        Generator::ZxH => {
            let h = S::inv_sqrt2_pow(1);
            data = vec![h.clone(), h.clone(), h.clone(), h.neg()];
        }
        Generator::ZwZ(r) => spider(&mut data, S::coeff(r)?),
        Generator::ZwW => {
            for (idx, x) in data.iter_mut().enumerate() {
                if idx.count_ones() == 1 {
                    *x = S::one();
                }
            }
        }
        Generator::FSwap => {
            // rows then cols, each 2 bits
            for c in 0..4 {
                let r = ((c & 1) << 1) | (c >> 1);
                data[r * 4 + c] = if c == 3 { S::one().neg() } else { S::one() };
            }
        }
        Generator::ZhZ => spider(&mut data, S::one()),
        Generator::ZhX => {
            // ½·H^{⊗m}·Z·H^{⊗n} with the two-legged H-box [[1,1],[1,−1]]
            // is the parity indicator.
            for (idx, x) in data.iter_mut().enumerate() {
                if idx.count_ones() % 2 == 0 {
                    *x = S::one();
                }
            }
        }
        Generator::HBox(a) => {
            data.iter_mut().for_each(|x| *x = S::one());
            data[last] = S::coeff(a)?;
        }
        Generator::Not => {
            data[1] = S::one();
            data[2] = S::one();
        }
        Generator::Swap => {
            for c in 0..4 {
                let r = ((c & 1) << 1) | (c >> 1);
                data[r * 4 + c] = S::one();
            }
        }
        Generator::Cup | Generator::Cap => {
            data[0] = S::one();
            data[3] = S::one();
        }
        Generator::Ground => return Err(SemanticsError::GroundPresent),
    }
    Ok(data)
}

/// Generator matrix (2^m × 2^n).
pub fn generator_matrix<S: ParamScalar>(
    gen: &Generator,
    n: usize,
    m: usize,
) -> Result<Tensor<S>, SemanticsError> {
    Ok(Tensor::from_vec(1 << m, 1 << n, generator_tensor(gen, n, m)?))
}

/// Interprets a ground-free diagram in the given scalar backend.
pub fn interp_with<S: ParamScalar>(d: &Diagram, schedule: Schedule) -> Result<Tensor<S>, SemanticsError> {
    if d.contains_ground() {
        return Err(SemanticsError::GroundPresent);
    }
    let violations = d.validate();
    if !violations.is_empty() {
        return Err(SemanticsError::Invalid(format!("{violations:?}")));
    }
    // One label per wire; boundary-to-boundary wires get a delta tensor.
    let mut label_of: BTreeMap<Port, usize> = BTreeMap::new();
    let mut next = 0usize;
    let mut ts: Vec<Labeled<S>> = Vec::new();
    for (a, b) in d.wires() {
        match (a, b) {
            (Port::Boundary { .. }, Port::Boundary { .. }) => {
                label_of.insert(a, next);
                label_of.insert(b, next + 1);
                let delta = vec![S::one(), S::zero(), S::zero(), S::one()];
                ts.push(Labeled::new(vec![next, next + 1], delta));
                next += 2;
            }
            _ => {
                label_of.insert(a, next);
                label_of.insert(b, next);
                next += 1;
            }
        }
    }
    for (id, node) in d.nodes() {
        let data = generator_tensor::<S>(&node.gen, node.n_in, node.n_out)?;
        let labels: Vec<usize> = (0..node.n_out)
            .map(|j| label_of[&Port::output(*id, j)])
            .chain((0..node.n_in).map(|i| label_of[&Port::input(*id, i)]))
            .collect();
        ts.push(Labeled::new(labels, data));
    }
    let open: Vec<usize> = (0..d.num_outputs())
        .map(|j| label_of[&Port::Boundary { side: Side::Out, index: j }])
        .chain((0..d.num_inputs()).map(|i| label_of[&Port::Boundary { side: Side::In, index: i }]))
        .collect();
    let data = contract_network(ts, &open, schedule);
    Ok(Tensor::from_vec(1 << d.num_outputs(), 1 << d.num_inputs(), data))
}

pub fn interp_exact(d: &Diagram) -> Result<ExactTensor, SemanticsError> {
    interp_with(d, Schedule::Greedy)
}

pub fn interp_float(d: &Diagram) -> Result<FloatTensor, SemanticsError> {
    interp_with(d, Schedule::Greedy)
}

/// True when every parameter lies in the exact ring.
pub fn is_exact_representable(d: &Diagram) -> bool {
    d.nodes().values().all(|n| match &n.gen {
        Generator::ZxZ(p) | Generator::ZxX(p) => p.is_exact_representable(),
        Generator::ZwZ(c) | Generator::HBox(c) => matches!(c, Coeff::Exact(_)),
        _ => true,
    })
}

/// Interprets in the requested backend.
pub fn interp(d: &Diagram, backend: Backend) -> Result<AnyTensor, SemanticsError> {
    match backend {
        Backend::Exact => interp_exact(d).map(AnyTensor::Exact),
        Backend::Float => interp_float(d).map(AnyTensor::Float),
    }
}

/// Exact when possible, float otherwise.
pub fn interp_auto(d: &Diagram) -> Result<AnyTensor, SemanticsError> {
    if is_exact_representable(d) {
        interp(d, Backend::Exact)
    } else {
        interp(d, Backend::Float)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::Calculus;

    fn e(v: &[i64], rows: usize, cols: usize) -> ExactTensor {
        ExactTensor::from_ints(rows, cols, v)
    }

    #[test]
    fn z_spider_identity() {
        let d = Diagram::node(Calculus::ZX, Generator::ZxZ(Phase::zero()), 1, 1);
        assert_eq!(interp_exact(&d).unwrap(), ExactTensor::identity(2));
    }

    #[test]
    fn scalar_spider_pi_is_zero() {
        let d = Diagram::node(Calculus::ZX, Generator::ZxZ(Phase::pi_frac(1, 1)), 0, 0);
        assert_eq!(interp_exact(&d).unwrap(), e(&[0], 1, 1));
    }

    #[test]
    fn cup_and_cap() {
        let cup = Diagram::node(Calculus::ZX, Generator::Cup, 2, 0);
        assert_eq!(interp_exact(&cup).unwrap(), e(&[1, 0, 0, 1], 1, 4));
        let cap = Diagram::node(Calculus::ZX, Generator::Cap, 0, 2);
        assert_eq!(interp_exact(&cap).unwrap(), e(&[1, 0, 0, 1], 4, 1));
    }

    #[test]
    fn snake_is_identity() {
        // (1 ⊗ cup) ∘ (cap ⊗ 1)
        let c = Calculus::ZX;
        let cap = Diagram::node(c, Generator::Cap, 0, 2).tensor(&Diagram::identity(c, 1)).unwrap();
        let cup = Diagram::identity(c, 1).tensor(&Diagram::node(c, Generator::Cup, 2, 0)).unwrap();
        let snake = cup.compose(&cap).unwrap();
        assert_eq!(interp_exact(&snake).unwrap(), ExactTensor::identity(2));
    }

    #[test]
    fn boundary_wire_permutation() {
        let d = Diagram::permutation(Calculus::ZX, &[1, 0]);
        let swap = Diagram::node(Calculus::ZX, Generator::Swap, 2, 2);
        assert_eq!(interp_exact(&d).unwrap(), interp_exact(&swap).unwrap());
        assert_eq!(interp_exact(&d).unwrap(), e(&[1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1], 4, 4));
    }

    #[test]
    fn w_node_tables() {
        let w11 = Diagram::node(Calculus::ZW, Generator::ZwW, 1, 1);
        assert_eq!(interp_exact(&w11).unwrap(), e(&[0, 1, 1, 0], 2, 2));
        let w12 = Diagram::node(Calculus::ZW, Generator::ZwW, 1, 2);
        assert_eq!(interp_exact(&w12).unwrap(), e(&[0, 1, 1, 0, 1, 0, 0, 0], 4, 2));
    }

    #[test]
    fn exact_rejects_generic_phase() {
        let d = Diagram::node(Calculus::ZX, Generator::ZxZ(Phase::pi_frac(1, 3)), 1, 1);
        assert!(matches!(interp_exact(&d), Err(SemanticsError::Inexact(_))));
        assert!(interp_float(&d).is_ok());
    }
}
