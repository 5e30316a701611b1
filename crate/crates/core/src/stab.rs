//! One- and two-qubit Clifford groups (modulo global phase), the stabilizer
//! states they reach from |0…0⟩, and the search for a Clifford U with
//! Uφ = φ* up to a global phase.

use std::collections::{HashSet, VecDeque};
use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::OnceLock;

use num_complex::Complex64;
use thiserror::Error;

use crate::tensor::{equal_up_to_global_phase, FloatTensor};

/// Longest generator word explored on one qubit.
pub const WORD_BOUND_1Q: usize = 12;
/// Longest generator word explored on two qubits.
pub const WORD_BOUND_2Q: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StabError {
    #[error("state is not in the bundled {0}-qubit stabilizer table")]
    NotInTable(usize),
    #[error("only 1- and 2-qubit states are supported")]
    Size,
}

/// A Clifford unitary together with the word that produced it.
#[derive(Clone, Debug)]
pub struct Clifford {
    pub word: Vec<&'static str>,
    pub matrix: FloatTensor,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn gate_h() -> FloatTensor {
    let h = FRAC_1_SQRT_2;
    FloatTensor::from_vec(2, 2, vec![c(h, 0.), c(h, 0.), c(h, 0.), c(-h, 0.)])
}

fn gate_s() -> FloatTensor {
    FloatTensor::from_vec(2, 2, vec![c(1., 0.), c(0., 0.), c(0., 0.), c(0., 1.)])
}

fn gate_cnot() -> FloatTensor {
    let mut m = FloatTensor::zeros(4, 4);
    for (r, col) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        m.set(r, col, c(1., 0.));
    }
    m
}

/// Hashable key of a matrix modulo global phase.
fn phase_key(m: &FloatTensor) -> Vec<(i64, i64)> {
    let pivot = m.data().iter().find(|z| z.norm() > 1e-9).copied().unwrap_or(c(1., 0.));
    let fix = pivot.conj() / pivot.norm();
    m.data()
        .iter()
        .map(|z| {
            let w = z * fix;
            ((w.re * 1e8).round() as i64, (w.im * 1e8).round() as i64)
        })
        .collect()
}

/// Breadth-first closure of the generated group, up to `bound` letters.
fn closure(qubits: usize, bound: usize) -> Vec<Clifford> {
    let id2 = FloatTensor::identity(2);
    let gens: Vec<(&'static str, FloatTensor)> = if qubits == 1 {
        vec![("H", gate_h()), ("S", gate_s())]
    } else {
        vec![
            ("H0", gate_h().kron(&id2)),
            ("H1", id2.kron(&gate_h())),
            ("S0", gate_s().kron(&id2)),
            ("S1", id2.kron(&gate_s())),
            ("CNOT", gate_cnot()),
        ]
    };
    let start = Clifford { word: vec![], matrix: FloatTensor::identity(1 << qubits) };
    let mut seen = HashSet::from([phase_key(&start.matrix)]);
    let mut out = vec![start.clone()];
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        if cur.word.len() >= bound {
            continue;
        }
        for (name, g) in &gens {
            let m = g.matmul(&cur.matrix).expect("square");
            if seen.insert(phase_key(&m)) {
                let mut word = cur.word.clone();
                word.push(name);
                let next = Clifford { word, matrix: m };
                out.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    out
}

/// The Clifford group on 1 or 2 qubits, in BFS order (identity first).
pub fn cliffords(qubits: usize) -> &'static [Clifford] {
    static ONE: OnceLock<Vec<Clifford>> = OnceLock::new();
    static TWO: OnceLock<Vec<Clifford>> = OnceLock::new();
    match qubits {
        1 => ONE.get_or_init(|| closure(1, WORD_BOUND_1Q)),
        2 => TWO.get_or_init(|| closure(2, WORD_BOUND_2Q)),
        _ => panic!("only 1 and 2 qubits are bundled"),
    }
}

/// Stabilizer states on 1 or 2 qubits modulo global phase: the orbit of
/// |0…0⟩ under the Clifford group.
pub fn stabilizer_states(qubits: usize) -> &'static [FloatTensor] {
    static ONE: OnceLock<Vec<FloatTensor>> = OnceLock::new();
    static TWO: OnceLock<Vec<FloatTensor>> = OnceLock::new();
    let build = |q: usize| {
        let mut zero = FloatTensor::zeros(1 << q, 1);
        zero.set(0, 0, c(1., 0.));
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for u in cliffords(q) {
            let s = u.matrix.matmul(&zero).expect("shape");
            if seen.insert(phase_key(&s)) {
                out.push(s);
            }
        }
        out
    };
    match qubits {
        1 => ONE.get_or_init(|| build(1)),
        2 => TWO.get_or_init(|| build(2)),
        _ => panic!("only 1 and 2 qubits are bundled"),
    }
}

/// A Clifford U with U·φ = λ·conj(φ), |λ| = 1.
#[derive(Clone, Debug)]
pub struct ConjugateWitness {
    pub word: Vec<&'static str>,
    pub unitary: FloatTensor,
    pub phase: Complex64,
    pub residual: f64,
}

pub fn stab_conjugate_witness(phi: &FloatTensor) -> Result<Option<ConjugateWitness>, StabError> {
    let q = match phi.rows() {
        2 => 1,
        4 => 2,
        _ => return Err(StabError::Size),
    };
    if phi.cols() != 1 {
        return Err(StabError::Size);
    }
    let listed = stabilizer_states(q)
        .iter()
        .any(|s| equal_up_to_global_phase(phi, s, 1e-9).is_some());
    if !listed {
        return Err(StabError::NotInTable(q));
    }
    let target = phi.conj();
    for u in cliffords(q) {
        let image = u.matrix.matmul(phi).expect("shape");
        if let Some(lambda) = equal_up_to_global_phase(&image, &target, 1e-10) {
            let residual = image.max_abs_diff(&target.scale(&lambda));
            return Ok(Some(ConjugateWitness {
                word: u.word.clone(),
                unitary: u.matrix.clone(),
                phase: lambda,
                residual,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_qubit_group() {
        assert_eq!(cliffords(1).len(), 24);
        assert_eq!(stabilizer_states(1).len(), 6);
    }

    #[test]
    fn zero_state_uses_identity() {
        let w = stab_conjugate_witness(&stabilizer_states(1)[0]).unwrap().unwrap();
        assert!(w.word.is_empty());
    }

    #[test]
    fn plus_i_state() {
        let h = FRAC_1_SQRT_2;
        let phi = FloatTensor::from_vec(2, 1, vec![c(h, 0.), c(0., h)]);
        let w = stab_conjugate_witness(&phi).unwrap().unwrap();
        assert!(w.residual <= 1e-10);
        let t = FloatTensor::from_vec(2, 1, vec![c(1., 0.), c(0.3, 0.)]);
        assert_eq!(stab_conjugate_witness(&t).unwrap_err(), StabError::NotInTable(1));
    }

    #[test]
    fn two_qubit_group_within_word_bound() {
        let g = cliffords(2);
        assert_eq!(g.len(), 11520);
        assert!(g.iter().all(|c| c.word.len() <= WORD_BOUND_2Q));
        assert_eq!(stabilizer_states(2).len(), 60);
    }
}
