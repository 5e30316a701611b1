//! Isometry and causality checks, purification, Stinespring witnesses for the
//! relation between purifications, and the Clifford+T counterexample.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::cpm::{cp_residual, interpret_cpm, interpret_cpm_with, CpmError};
use crate::diagram::{Diagram, NodeId, Port};
use crate::ring::{ExactScalar, Scalar};
use crate::semantics::{interp_exact, interp_float, is_exact_representable, SemanticsError};
use crate::tensor::{ExactTensor, FloatTensor};

/// A ground-free diagram whose extra trailing outputs are the discarded
/// wires of the original.
#[derive(Clone, Debug, PartialEq)]
pub struct Purification {
    pub pure: Diagram,
    pub ancilla_count: usize,
    /// (ground node id, ancilla output index), in ancilla order.
    pub placement: Vec<(NodeId, usize)>,
}

/// Removes every ground (ascending node id) and routes its input wire to a
/// fresh output appended on the right.
pub fn purify(d: &Diagram) -> Purification {
    let mut pure = d.clone();
    let base = d.num_outputs();
    let grounds = d.grounds();
    pure.set_boundary(d.num_inputs(), base + grounds.len());
    let mut placement = Vec::new();
    for (k, g) in grounds.into_iter().enumerate() {
        let p = pure.partner(Port::input(g, 0)).expect("ground input must be wired");
        pure.remove_node(g);
        pure.connect(p, Port::b_out(base + k));
        placement.push((g, base + k));
    }
    Purification { ancilla_count: placement.len(), pure, placement }
}

/// ⟦d⟧†⟦d⟧ = I: exactly when the diagram is exact, within `tol` otherwise.
pub fn is_isometry(d: &Diagram, tol: f64) -> Result<bool, SemanticsError> {
    if is_exact_representable(d) {
        let m = interp_exact(d)?;
        let p = m.dagger().matmul(&m).expect("shapes agree");
        return Ok(p == ExactTensor::identity(m.cols()));
    }
    let m = interp_float(d)?;
    let p = m.dagger().matmul(&m).expect("shapes agree");
    Ok(p.equal(&FloatTensor::identity(m.cols()), tol))
}

/// Discarding all outputs equals discarding all inputs.
pub fn is_causal(d: &Diagram, tol: f64) -> Result<bool, CpmError> {
    if is_exact_representable(d) {
        let s = interpret_cpm_with::<ExactScalar>(d)?.trace_outputs(d.num_outputs());
        return Ok(s.choi() == &ExactTensor::identity(1 << d.num_inputs()));
    }
    let s = interpret_cpm(d)?.trace_outputs(d.num_outputs());
    Ok(s.choi().equal(&FloatTensor::identity(1 << d.num_inputs()), tol))
}

/// Isometries u: X → Z and v: Y → Z on the environments.
#[derive(Clone, Debug, PartialEq)]
pub struct IsoWitness {
    pub u: FloatTensor,
    pub v: FloatTensor,
}

/// Relative cutoff for Choi eigenvalues when extracting a purification.
pub const RANK_CUTOFF: f64 = 1e-8;

fn to_matrix(t: &FloatTensor) -> DMatrix<Complex64> {
    t.to_dmatrix()
}

/// Completes orthonormal columns to a unitary of size `dim`.
fn complete_unitary(w: &DMatrix<Complex64>, dim: usize) -> DMatrix<Complex64> {
    let mut cols: Vec<DVector<Complex64>> = (0..w.ncols()).map(|k| w.column(k).into_owned()).collect();
    let mut e = 0;
    while cols.len() < dim && e < dim {
        let mut v = DVector::<Complex64>::zeros(dim);
        v[e] = Complex64::new(1.0, 0.0);
        e += 1;
        for c in &cols {
            let proj = c.dotc(&v);
            v -= c * proj;
        }
        let norm = v.norm();
        if norm > 1e-8 {
            cols.push(v / Complex64::new(norm, 0.0));
        }
    }
    DMatrix::from_columns(&cols)
}

/// Environment isometry W (dim X × r) with M = (1_B ⊗ W)·C, where C is the
/// canonical purification built from the eigenvectors `vecs` and values
/// `vals` of the Choi matrix.
fn environment_map(
    m: &DMatrix<Complex64>,
    env: usize,
    vecs: &[DVector<Complex64>],
    vals: &[f64],
) -> DMatrix<Complex64> {
    let din = m.ncols();
    let dout = m.nrows() / env;
    DMatrix::from_fn(env, vecs.len(), |x, k| {
        // ⟨v_k, vec(F_x)⟩ / √λ_k, with F_x[b,a] = M[(b,x),a]
        let mut acc = Complex64::new(0.0, 0.0);
        for b in 0..dout {
            for a in 0..din {
                acc += vecs[k][b * din + a].conj() * m[(b * env + x, a)];
            }
        }
        acc / vals[k].sqrt()
    })
}

/// 1_B ⊗ u applied after M.
fn apply_env(m: &FloatTensor, u: &FloatTensor) -> FloatTensor {
    let b = m.rows() / u.cols();
    FloatTensor::identity(b).kron(u).matmul(m).expect("environment sizes agree")
}

/// Stinespring witness between two purifications of the same CP map.
///
/// `f: A → B⊗X` and `g: A → B⊗Y`, where X is the last `x` outputs of `f`
/// and Y the last `y` outputs of `g`. Returns `None` when the traced maps
/// differ.
pub fn iso_witness_qubit(
    f: &Diagram,
    g: &Diagram,
    x: usize,
    y: usize,
    tol: f64,
) -> Result<Option<IsoWitness>, CpmError> {
    let r = cp_residual(f, g, x, y)?;
    if r.is_none_or(|r| r > tol) {
        return Ok(None);
    }
    let mf = interp_float(f)?;
    let mg = interp_float(g)?;
    Ok(iso_witness_matrices(&mf, &mg, 1 << x, 1 << y, tol))
}

/// Matrix form of [`iso_witness_qubit`]; the environment factors are the
/// least significant `ex` resp. `ey` rows.
pub fn iso_witness_matrices(
    mf: &FloatTensor,
    mg: &FloatTensor,
    ex: usize,
    ey: usize,
    tol: f64,
) -> Option<IsoWitness> {
    if ex == ey && mf.equal(mg, tol) {
        let id = FloatTensor::identity(ex);
        return Some(IsoWitness { u: id.clone(), v: id });
    }
    let choi = crate::cpm::double(mf).to_float();
    let k = ex.trailing_zeros() as usize;
    let j = choi.trace_outputs(k).choi().to_dmatrix();
    let j = (&j + j.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = j.symmetric_eigen();
    let max = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|a, b| eig.eigenvalues[*b].total_cmp(&eig.eigenvalues[*a]));
    // Directions below tol² move entries by at most about tol, so they count
    // as numerical noise even when the whole map is that small.
    let floor = (RANK_CUTOFF * max).max(tol * tol);
    let keep: Vec<usize> = order.into_iter().filter(|&i| eig.eigenvalues[i] > floor).collect();
    // Fix each eigenvector's phase: its largest entry is real and positive.
    let vecs: Vec<DVector<Complex64>> = keep
        .iter()
        .map(|&i| {
            let v = eig.eigenvectors.column(i).into_owned();
            let big = v.iter().fold(Complex64::new(0.0, 0.0), |a, b| if b.norm() > a.norm() + 1e-12 { *b } else { a });
            let phase = if big.norm() > 0.0 { big.conj() / big.norm() } else { Complex64::new(1.0, 0.0) };
            v * phase
        })
        .collect();
    let vals: Vec<f64> = keep.iter().map(|&i| eig.eigenvalues[i]).collect();
    if vecs.len() > ex.min(ey) {
        return None;
    }
    let wf = environment_map(&to_matrix(mf), ex, &vecs, &vals);
    let wg = environment_map(&to_matrix(mg), ey, &vecs, &vals);
    let z = ex.max(ey);
    let embed = |w: &DMatrix<Complex64>, dim: usize| {
        let full = complete_unitary(w, dim);
        let mut u = DMatrix::<Complex64>::zeros(z, dim);
        u.view_mut((0, 0), (dim, dim)).copy_from(&full.adjoint());
        FloatTensor::from_dmatrix(&u)
    };
    let witness = IsoWitness { u: embed(&wf, ex), v: embed(&wg, ey) };
    check_iso_related_matrices(mf, mg, &witness, tol).then_some(witness)
}

/// Largest deviation among u†u = I, v†v = I and (1⊗u)F = (1⊗v)G; `None`
/// when the shapes do not fit.
pub fn iso_residual(mf: &FloatTensor, mg: &FloatTensor, w: &IsoWitness) -> Option<f64> {
    let (u, v) = (&w.u, &w.v);
    if u.rows() != v.rows() || mf.rows() % u.cols() != 0 || mg.rows() % v.cols() != 0 {
        return None;
    }
    if mf.rows() / u.cols() != mg.rows() / v.cols() || mf.cols() != mg.cols() {
        return None;
    }
    let uu = u.dagger().matmul(u).ok()?.max_abs_diff(&FloatTensor::identity(u.cols()));
    let vv = v.dagger().matmul(v).ok()?.max_abs_diff(&FloatTensor::identity(v.cols()));
    let lhs = apply_env(mf, u);
    let rhs = apply_env(mg, v);
    Some(uu.max(vv).max(lhs.max_abs_diff(&rhs)))
}

pub fn check_iso_related_matrices(mf: &FloatTensor, mg: &FloatTensor, w: &IsoWitness, tol: f64) -> bool {
    iso_residual(mf, mg, w).is_some_and(|r| r <= tol)
}

pub fn check_iso_related(f: &Diagram, g: &Diagram, w: &IsoWitness, tol: f64) -> Result<bool, SemanticsError> {
    Ok(check_iso_related_matrices(&interp_float(f)?, &interp_float(g)?, w, tol))
}

/// The three facts showing that Clifford+T lacks enough isometries.
#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleReport {
    pub phi: String,
    pub phi_conj: String,
    /// Both scalars are ring elements.
    pub in_ring: bool,
    /// The doubled scalars agree.
    pub cp_equal: bool,
    /// Result of exact division φ / φ̄; `None` means not in the ring.
    pub exact_quotient: Option<String>,
    pub float_quotient: [f64; 2],
    pub passed: bool,
}

/// Runs the argument for a given scalar φ (the standard choice is 1 + 2i).
pub fn scalar_quotient_report(phi: &ExactScalar) -> CounterexampleReport {
    use crate::builders::scalar;
    use crate::diagram::Calculus;
    use crate::param::Coeff;
    let conj = phi.conj();
    let f = scalar(Calculus::ZH, &Coeff::Exact(phi.clone())).expect("ZH expresses every scalar");
    let g = scalar(Calculus::ZH, &Coeff::Exact(conj.clone())).expect("ZH expresses every scalar");
    let cp = crate::cpm::cp_equal(&f, &g, 0, 0, 1e-12).unwrap_or(false);
    let in_ring = is_exact_representable(&f) && is_exact_representable(&g);
    let q = phi.divide_exact(&conj).ok().flatten();
    let fq = phi.to_complex() / conj.to_complex();
    CounterexampleReport {
        phi: phi.to_string(),
        phi_conj: conj.to_string(),
        in_ring,
        cp_equal: cp,
        exact_quotient: q.as_ref().map(|x| x.to_string()),
        float_quotient: [fq.re, fq.im],
        passed: in_ring && cp && q.is_none(),
    }
}

pub fn cliffordt_counterexample() -> CounterexampleReport {
    scalar_quotient_report(&ExactScalar::new([1, 0, 2, 0], 0))
}

/// Cheap structural summary used in reports.
pub fn arity_summary(d: &Diagram) -> BTreeMap<&'static str, usize> {
    BTreeMap::from([
        ("inputs", d.num_inputs()),
        ("outputs", d.num_outputs()),
        ("nodes", d.node_count()),
        ("grounds", d.grounds().len()),
    ])
}

/// Converts a matrix to complex floats regardless of backend.
pub fn as_float<S: Scalar>(t: &crate::tensor::Tensor<S>) -> FloatTensor {
    t.to_float()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders;
    use crate::diagram::{Calculus, Generator};
    use crate::param::Phase;

    const C: Calculus = Calculus::ZX;

    #[test]
    fn purify_simple_cases() {
        let p = purify(&builders::ground(C, 1));
        assert_eq!(p.pure, Diagram::identity(C, 1));
        assert_eq!(p.ancilla_count, 1);
        let h = builders::h(C).unwrap();
        let p = purify(&h);
        assert_eq!((p.pure, p.ancilla_count), (h, 0));
    }

    #[test]
    fn isometry_examples() {
        assert!(is_isometry(&builders::h(C).unwrap(), 1e-9).unwrap());
        assert!(is_isometry(&builders::ket0(C).unwrap(), 1e-9).unwrap());
        let copy = Diagram::node(C, Generator::ZxZ(Phase::zero()), 1, 2);
        assert!(is_isometry(&copy, 1e-9).unwrap());
        assert!(!is_isometry(&builders::cup(C), 1e-9).unwrap());
    }

    #[test]
    fn causality_examples() {
        assert!(is_causal(&builders::cnot(C).unwrap(), 1e-9).unwrap());
        assert!(is_causal(&builders::ground(C, 1), 1e-9).unwrap());
        let two = Diagram::node(C, Generator::ZxZ(Phase::zero()), 0, 0);
        assert!(!is_causal(&two, 1e-9).unwrap());
    }

    #[test]
    fn counterexample_facts() {
        let r = cliffordt_counterexample();
        assert!(r.in_ring && r.cp_equal && r.exact_quotient.is_none() && r.passed);
        assert!((r.float_quotient[0] + 0.6).abs() < 1e-12);
        assert!((r.float_quotient[1] - 0.8).abs() < 1e-12);
        let r = scalar_quotient_report(&ExactScalar::new([1, 0, 1, 0], 0));
        assert_eq!(r.exact_quotient, Some(ExactScalar::i().to_string()));
        assert!(!r.passed);
    }

    #[test]
    fn scalar_witness_closed_form() {
        let phi = ExactScalar::new([1, 0, 2, 0], 0);
        let f = builders::scalar(Calculus::ZH, &phi.clone().into()).unwrap();
        let g = builders::scalar(Calculus::ZH, &phi.conj().into()).unwrap();
        let w = iso_witness_qubit(&f, &g, 0, 0, 1e-8).unwrap().unwrap();
        let s5 = 5f64.sqrt();
        let u = *w.u.get(0, 0);
        let v = *w.v.get(0, 0);
        assert!((u - Complex64::new(1.0, -2.0) / s5).norm() < 1e-10);
        assert!((v - Complex64::new(1.0, 2.0) / s5).norm() < 1e-10);
        assert!((Complex64::new(1.0, 2.0) * u - s5).norm() < 1e-10);
    }

    #[test]
    fn witness_for_ancilla_padding() {
        let f = builders::h(C).unwrap();
        let g = f.tensor(&builders::ket0(C).unwrap()).unwrap();
        let w = iso_witness_qubit(&f, &g, 0, 1, 1e-8).unwrap().unwrap();
        assert!(check_iso_related(&f, &g, &w, 1e-8).unwrap());
        assert_eq!((w.u.rows(), w.u.cols()), (2, 1));
        let bad = IsoWitness { u: FloatTensor::identity(1).scale(&Complex64::new(2.0, 0.0)), v: w.v.clone() };
        assert!(!check_iso_related(&f, &g, &bad, 1e-8).unwrap());
    }

    #[test]
    fn identity_witness_for_equal_maps() {
        let f = builders::t(C).unwrap();
        let w = iso_witness_qubit(&f, &f, 0, 0, 1e-8).unwrap().unwrap();
        assert!(w.u.max_abs_diff(&w.v) < 1e-12);
        let g = builders::s(C).unwrap();
        let id = IsoWitness { u: FloatTensor::identity(1), v: FloatTensor::identity(1) };
        assert!(!check_iso_related(&f, &g, &id, 1e-8).unwrap());
        assert!(iso_witness_qubit(&f, &g, 0, 0, 1e-8).unwrap().is_none());
    }
}
