//! Completely positive semantics: discards act as partial traces.
//!
//! A superoperator Φ: n → m is stored as its Choi matrix
//! `J[(b,a),(b',a')] = Φ(|a⟩⟨a'|)[b,b']`, where the row index is
//! `b · 2ⁿ + a` (output bits first, then input bits). For a pure map M this
//! is `vec(M)·vec(M)†` with `vec` the row-major flattening.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::diagram::{Diagram, Port};
use crate::properties::purify;
use crate::ring::Scalar;
use crate::semantics::{interp_with, ParamScalar, SemanticsError};
use crate::tensor::{FloatTensor, Schedule, Tensor, TensorError};

/// Description printed at the head of Choi matrix dumps.
pub const CHOI_CONVENTION: &str = "J[(b,a),(b',a')] = Phi(|a><a'|)[b,b']; row index = b*2^n + a \
(output bits then input bits, leftmost wire most significant); pure M gives vec(M)vec(M)^dagger \
with row-major vec";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CpmError {
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("boundary mismatch: {0}")]
    Boundary(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator<S> {
    n_in: usize,
    n_out: usize,
    choi: Tensor<S>,
}

pub type DensityMatrix<S> = Tensor<S>;

impl<S: Scalar> Superoperator<S> {
    pub fn from_choi(n_in: usize, n_out: usize, choi: Tensor<S>) -> Self {
        let dim = 1 << (n_in + n_out);
        assert!(choi.rows() == dim && choi.cols() == dim, "Choi matrix has the wrong size");
        Superoperator { n_in, n_out, choi }
    }

    pub fn in_qubits(&self) -> usize {
        self.n_in
    }

    pub fn out_qubits(&self) -> usize {
        self.n_out
    }

    pub fn choi(&self) -> &Tensor<S> {
        &self.choi
    }

    /// ρ ↦ Φ(ρ).
    pub fn apply(&self, rho: &DensityMatrix<S>) -> Result<DensityMatrix<S>, CpmError> {
        let (din, dout) = (1usize << self.n_in, 1usize << self.n_out);
        if rho.rows() != din || rho.cols() != din {
            return Err(TensorError::Dims(rho.rows(), rho.cols(), din, din).into());
        }
        Ok(Tensor::from_fn(dout, dout, |b, b2| {
            let mut acc = S::zero();
            for a in 0..din {
                for a2 in 0..din {
                    let r = rho.get(a, a2);
                    if r.is_zero() {
                        continue;
                    }
                    acc = acc.add(&self.choi.get(b * din + a, b2 * din + a2).mul(r));
                }
            }
            acc
        }))
    }

    /// Traces out the last `k` output wires.
    pub fn trace_outputs(&self, k: usize) -> Self {
        assert!(k <= self.n_out);
        let din = 1usize << self.n_in;
        let keep = 1usize << (self.n_out - k);
        let env = 1usize << k;
        let dim = keep * din;
        let choi = Tensor::from_fn(dim, dim, |r, c| {
            let (b, a) = (r / din, r % din);
            let (b2, a2) = (c / din, c % din);
            (0..env).fold(S::zero(), |acc, e| {
                acc.add(self.choi.get((b * env + e) * din + a, (b2 * env + e) * din + a2))
            })
        });
        Superoperator { n_in: self.n_in, n_out: self.n_out - k, choi }
    }

    pub fn equal(&self, other: &Self, tol: f64) -> bool {
        self.n_in == other.n_in && self.n_out == other.n_out && self.choi.equal(&other.choi, tol)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.choi.max_abs_diff(&other.choi)
    }

    pub fn to_float(&self) -> Superoperator<Complex64> {
        Superoperator { n_in: self.n_in, n_out: self.n_out, choi: self.choi.to_float() }
    }
}

/// ρ ↦ MρM†.
pub fn double<S: Scalar>(m: &Tensor<S>) -> Superoperator<S> {
    let n_in = m.cols().trailing_zeros() as usize;
    let n_out = m.rows().trailing_zeros() as usize;
    let v = m.data();
    let dim = v.len();
    let choi = Tensor::from_fn(dim, dim, |r, c| v[r].mul(&v[c].conj()));
    Superoperator { n_in, n_out, choi }
}

/// CPM interpretation via purification: the pure part is doubled and the
/// ancilla outputs are traced out.
pub fn interpret_cpm_with<S: ParamScalar>(d: &Diagram) -> Result<Superoperator<S>, CpmError> {
    let p = purify(d);
    let m = interp_with::<S>(&p.pure, Schedule::Greedy)?;
    Ok(double(&m).trace_outputs(p.ancilla_count))
}

pub fn interpret_cpm(d: &Diagram) -> Result<Superoperator<Complex64>, CpmError> {
    interpret_cpm_with(d)
}

/// Independent route: interpret `d ⊗ conj(d)` with each pair of matching
/// grounds replaced by a wire joining the two discarded legs, then reindex
/// into the Choi convention.
pub fn interpret_cpm_doubled<S: ParamScalar>(d: &Diagram) -> Result<Superoperator<S>, CpmError> {
    let (n, m) = (d.num_inputs(), d.num_outputs());
    let offset = d.next_id();
    let conj = d.conjugate();
    let mut doubled = d.tensor(&conj).map_err(|e| CpmError::Boundary(e.to_string()))?;
    for g in d.grounds() {
        let left = doubled.partner(Port::input(g, 0)).expect("ground input is wired");
        let right = doubled.partner(Port::input(g + offset, 0)).expect("ground input is wired");
        doubled.remove_node(g);
        doubled.remove_node(g + offset);
        doubled.connect(left, right);
    }
    debug_assert!(doubled.grounds().is_empty());
    let t = interp_with::<S>(&doubled, Schedule::Greedy)?;
    let (din, dout) = (1usize << n, 1usize << m);
    // t[(b,b'),(a,a')] → J[(b,a),(b',a')]
    let choi = Tensor::from_fn(dout * din, dout * din, |r, c| {
        let (b, a) = (r / din, r % din);
        let (b2, a2) = (c / din, c % din);
        t.get(b * dout + b2, a * din + a2).clone()
    });
    Ok(Superoperator { n_in: n, n_out: m, choi })
}

/// Kraus operators from the eigendecomposition of a Choi matrix, keeping
/// eigenvalues above `cutoff` relative to the largest.
pub fn kraus_from_choi(s: &Superoperator<Complex64>, cutoff: f64) -> Vec<FloatTensor> {
    let (din, dout) = (1usize << s.n_in, 1usize << s.n_out);
    let j = s.choi.to_dmatrix();
    let j = (&j + j.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = j.symmetric_eigen();
    let max = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b));
    let mut out = Vec::new();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if max <= 0.0 || lambda <= cutoff * max {
            continue;
        }
        let v = eig.eigenvectors.column(k);
        let sq = lambda.sqrt();
        out.push(FloatTensor::from_fn(dout, din, |b, a| v[b * din + a] * sq));
    }
    if out.is_empty() {
        // The zero map still needs one operator to carry its shape.
        out.push(FloatTensor::zeros(dout, din));
    }
    out
}

/// Σ_k K ρ K†.
pub fn apply_kraus(kraus: &[FloatTensor], rho: &FloatTensor) -> Result<FloatTensor, CpmError> {
    let mut acc: Option<FloatTensor> = None;
    for k in kraus {
        let term = k.matmul(rho)?.matmul(&k.dagger())?;
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    Ok(acc.unwrap_or_else(|| FloatTensor::zeros(rho.rows(), rho.cols())))
}

/// Hermitian and positive semidefinite within `tol`.
pub fn is_psd(m: &FloatTensor, tol: f64) -> bool {
    let a = m.to_dmatrix();
    if (&a - a.adjoint()).iter().any(|z| z.norm() > tol) {
        return false;
    }
    let h: DMatrix<Complex64> = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
    h.symmetric_eigen().eigenvalues.iter().all(|&l| l >= -tol)
}

/// Whether two ground-free diagrams f: A → B⊗X and g: A → B⊗Y define the same
/// CP map after tracing out X (last `x` outputs of f) and Y (last `y` of g).
pub fn cp_equal(f: &Diagram, g: &Diagram, x: usize, y: usize, tol: f64) -> Result<bool, CpmError> {
    cp_residual(f, g, x, y).map(|r| r.map_or(false, |r| r <= tol))
}

/// Max entrywise Choi difference; `Some(0.0)` means exactly equal when both
/// sides are exact. `None` when the traced maps differ in shape.
pub fn cp_residual(f: &Diagram, g: &Diagram, x: usize, y: usize) -> Result<Option<f64>, CpmError> {
    if f.contains_ground() || g.contains_ground() {
        return Err(SemanticsError::GroundPresent.into());
    }
    if f.num_inputs() != g.num_inputs() {
        return Err(CpmError::Boundary(format!("inputs {} vs {}", f.num_inputs(), g.num_inputs())));
    }
    if x > f.num_outputs() || y > g.num_outputs() || f.num_outputs() - x != g.num_outputs() - y {
        return Err(CpmError::Boundary(format!(
            "outputs {}-{} vs {}-{}",
            f.num_outputs(),
            x,
            g.num_outputs(),
            y
        )));
    }
    let exact = crate::semantics::is_exact_representable(f) && crate::semantics::is_exact_representable(g);
    if exact {
        let a = double(&interp_with::<crate::ring::ExactScalar>(f, Schedule::Greedy)?).trace_outputs(x);
        let b = double(&interp_with::<crate::ring::ExactScalar>(g, Schedule::Greedy)?).trace_outputs(y);
        return Ok(Some(if a.equal(&b, 0.0) { 0.0 } else { a.max_abs_diff(&b).max(f64::MIN_POSITIVE) }));
    }
    let a = double(&interp_with::<Complex64>(f, Schedule::Greedy)?).trace_outputs(x);
    let b = double(&interp_with::<Complex64>(g, Schedule::Greedy)?).trace_outputs(y);
    Ok(Some(a.max_abs_diff(&b)))
}

/// Discard on every output: the diagram `ground^{⊗m} ∘ d`.
pub fn discard_outputs(d: &Diagram) -> Diagram {
    let g = crate::builders::ground(d.calculus(), d.num_outputs());
    g.compose(d).expect("arity matches by construction")
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders;
    use crate::diagram::Calculus;
    use crate::ring::ExactScalar;
    use crate::tensor::ExactTensor;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ground_is_trace() {
        let g = builders::ground(Calculus::ZX, 1);
        let s = interpret_cpm_with::<ExactScalar>(&g).unwrap();
        assert_eq!(s.choi(), &ExactTensor::identity(2));
        let rho = FloatTensor::from_vec(2, 2, vec![c(0.3, 0.), c(0.1, 0.2), c(0.1, -0.2), c(0.7, 0.)]);
        let out = interpret_cpm(&g).unwrap().apply(&rho).unwrap();
        assert!((out.get(0, 0) - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn ground_after_ket0_is_one() {
        let d = builders::ground(Calculus::ZX, 1).compose(&builders::ket0(Calculus::ZX).unwrap()).unwrap();
        let s = interpret_cpm_with::<ExactScalar>(&d).unwrap();
        assert_eq!(s.choi(), &ExactTensor::identity(1));
    }

    #[test]
    fn identity_choi_has_trace_two() {
        let s = double(&ExactTensor::identity(2));
        assert_eq!(s.choi().trace(), ExactScalar::from_int(2));
    }

    #[test]
    fn hadamard_maps_zero_to_plus() {
        let h = crate::semantics::interp_float(&builders::h(Calculus::ZX).unwrap()).unwrap();
        let rho = FloatTensor::from_vec(2, 2, vec![c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)]);
        let out = double(&h).apply(&rho).unwrap();
        let plus = FloatTensor::from_vec(2, 2, vec![c(0.5, 0.); 4]);
        assert!(out.equal(&plus, 1e-12));
    }

    #[test]
    fn t_on_plus() {
        let t = crate::semantics::interp_float(&builders::t(Calculus::ZX).unwrap()).unwrap();
        let plus = FloatTensor::from_vec(2, 2, vec![c(0.5, 0.); 4]);
        let out = double(&t).apply(&plus).unwrap();
        let expect = Complex64::from_polar(0.5, -std::f64::consts::FRAC_PI_4);
        assert!((out.get(0, 1) - expect).norm() < 1e-12);
    }

    #[test]
    fn both_routes_agree_on_ground_cnot() {
        let c = Calculus::ZX;
        let d = builders::identity(c, 1)
            .tensor(&builders::ground(c, 1))
            .unwrap()
            .compose(&builders::cnot(c).unwrap())
            .unwrap();
        let a = interpret_cpm_with::<ExactScalar>(&d).unwrap();
        let b = interpret_cpm_doubled::<ExactScalar>(&d).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn scalar_counterexample_is_cp_equal() {
        let c = Calculus::ZH;
        let f = builders::scalar(c, &crate::param::Coeff::Exact(ExactScalar::new([1, 0, 2, 0], 0))).unwrap();
        let g = builders::scalar(c, &crate::param::Coeff::Exact(ExactScalar::new([1, 0, -2, 0], 0))).unwrap();
        assert!(cp_equal(&f, &g, 0, 0, 1e-9).unwrap());
        let k0 = builders::ket0(c).unwrap();
        let k1 = builders::ket1(c).unwrap();
        assert!(!cp_equal(&k0, &k1, 0, 0, 1e-9).unwrap());
    }
}
