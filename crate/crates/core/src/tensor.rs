//! Dense matrices over a scalar backend, and labeled tensors for contraction.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::ring::{ExactScalar, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    Dims(usize, usize, usize, usize),
}

/// A dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

pub type ExactTensor = Tensor<ExactScalar>;
pub type FloatTensor = Tensor<Complex64>;

impl<S: Scalar> Tensor<S> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<S>) -> Self {
        assert_eq!(data.len(), rows * cols, "tensor data has the wrong length");
        Tensor { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Tensor { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| S::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { S::one() } else { S::zero() })
    }

    pub fn scalar(x: S) -> Self {
        Tensor { rows: 1, cols: 1, data: vec![x] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> &S {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: S) {
        self.data[r * self.cols + c] = x;
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, TensorError> {
        if self.cols != other.rows {
            return Err(TensorError::Dims(self.rows, self.cols, other.rows, other.cols));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        let idx = r * other.cols + c;
                        out.data[idx] = out.data[idx].add(&a.mul(b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |r, c| {
            self.get(r / other.rows, c / other.cols)
                .mul(other.get(r % other.rows, c % other.cols))
        })
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn conj(&self) -> Self {
        Tensor { rows: self.rows, cols: self.cols, data: self.data.iter().map(S::conj).collect() }
    }

    pub fn scale(&self, s: &S) -> Self {
        Tensor { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.mul(s)).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self, TensorError> {
        self.same_shape(other)?;
        Ok(Tensor {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, TensorError> {
        self.add(&other.scale(&S::one().neg()))
    }

    fn same_shape(&self, other: &Self) -> Result<(), TensorError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(TensorError::Dims(self.rows, self.cols, other.rows, other.cols));
        }
        Ok(())
    }

    /// Exact equality on the exact backend, entrywise |Δ| ≤ tol otherwise.
    pub fn equal(&self, other: &Self, tol: f64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| a.close(b, tol))
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc.add(self.get(i, i)))
    }

    pub fn to_float(&self) -> FloatTensor {
        Tensor { rows: self.rows, cols: self.cols, data: self.data.iter().map(S::to_complex).collect() }
    }

    pub fn to_dmatrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c).to_complex())
    }

    /// Largest entrywise modulus of the difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.to_complex() - b.to_complex()).norm())
            .fold(0.0, f64::max)
    }
}

impl FloatTensor {
    pub fn from_dmatrix(m: &DMatrix<Complex64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
    }
}

impl ExactTensor {
    pub fn from_ints(rows: usize, cols: usize, v: &[i64]) -> Self {
        Self::from_vec(rows, cols, v.iter().map(|x| ExactScalar::from_int(*x)).collect())
    }
}

/// A matrix in either backend.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyTensor {
    Exact(ExactTensor),
    Float(FloatTensor),
}

impl AnyTensor {
    pub fn to_float(&self) -> FloatTensor {
        match self {
            AnyTensor::Exact(t) => t.to_float(),
            AnyTensor::Float(t) => t.clone(),
        }
    }

    pub fn rows(&self) -> usize {
        match self {
            AnyTensor::Exact(t) => t.rows(),
            AnyTensor::Float(t) => t.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            AnyTensor::Exact(t) => t.cols(),
            AnyTensor::Float(t) => t.cols(),
        }
    }

    /// Exact comparison when both sides are exact, tolerance otherwise.
    pub fn equal(&self, other: &AnyTensor, tol: f64) -> bool {
        match (self, other) {
            (AnyTensor::Exact(a), AnyTensor::Exact(b)) => a.equal(b, tol),
            _ => self.to_float().equal(&other.to_float(), tol),
        }
    }
}

impl fmt::Display for FloatTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|c| {
                    let z = self.get(r, c);
                    format!("{:.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Returns λ with |λ| = 1 and a = λ·b, if one exists.
pub fn equal_up_to_global_phase(a: &FloatTensor, b: &FloatTensor, tol: f64) -> Option<Complex64> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return None;
    }
    let (idx, _) = b
        .data()
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))?;
    let lambda = if b.data()[idx].norm() <= tol {
        if a.data().iter().all(|x| x.norm() <= tol) {
            return Some(Complex64::new(1.0, 0.0));
        }
        return None;
    } else {
        a.data()[idx] / b.data()[idx]
    };
    if (lambda.norm() - 1.0).abs() > tol.max(1e-12) * 10.0 {
        return None;
    }
    a.equal(&b.scale(&lambda), tol).then_some(lambda)
}

/// Returns the scalar λ (any modulus) with a = λ·b, if one exists.
pub fn proportional(a: &FloatTensor, b: &FloatTensor, tol: f64) -> Option<Complex64> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return None;
    }
    let (idx, _) = b
        .data()
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))?;
    if b.data()[idx].norm() <= tol {
        return None;
    }
    let lambda = a.data()[idx] / b.data()[idx];
    a.equal(&b.scale(&lambda), tol).then_some(lambda)
}

/// A tensor whose legs are all qubits, each named by a label. Leg 0 is the
/// most significant bit of the flat index.
#[derive(Clone, Debug)]
pub(crate) struct Labeled<S> {
    pub labels: Vec<usize>,
    pub data: Vec<S>,
}

impl<S: Scalar> Labeled<S> {
    pub fn new(labels: Vec<usize>, data: Vec<S>) -> Self {
        debug_assert_eq!(data.len(), 1usize << labels.len());
        let mut t = Labeled { labels, data };
        t.trace_repeated();
        t
    }

    fn rank(&self) -> usize {
        self.labels.len()
    }

    /// Contracts pairs of legs that carry the same label (self-loops).
    fn trace_repeated(&mut self) {
        loop {
            let r = self.rank();
            let mut pair = None;
            'outer: for i in 0..r {
                for j in i + 1..r {
                    if self.labels[i] == self.labels[j] {
                        pair = Some((i, j));
                        break 'outer;
                    }
                }
            }
            let Some((i, j)) = pair else { return };
            let keep: Vec<usize> = (0..r).filter(|&k| k != i && k != j).collect();
            let mut data = vec![S::zero(); 1 << keep.len()];
            for (idx, x) in self.data.iter().enumerate() {
                let bi = (idx >> (r - 1 - i)) & 1;
                let bj = (idx >> (r - 1 - j)) & 1;
                if bi != bj || x.is_zero() {
                    continue;
                }
                let mut out = 0;
                for &k in &keep {
                    out = (out << 1) | ((idx >> (r - 1 - k)) & 1);
                }
                data[out] = data[out].add(x);
            }
            self.labels = keep.iter().map(|&k| self.labels[k]).collect();
            self.data = data;
        }
    }

    /// Labels of the contraction result (own free legs, then the other's).
    fn result_labels(&self, other: &Self) -> Vec<usize> {
        let mut out: Vec<usize> =
            self.labels.iter().filter(|l| !other.labels.contains(l)).copied().collect();
        out.extend(other.labels.iter().filter(|l| !self.labels.contains(l)));
        out
    }

    /// Sums over all shared labels; an outer product when none are shared.
    pub fn contract(&self, other: &Self) -> Self {
        let shared: Vec<usize> =
            self.labels.iter().filter(|l| other.labels.contains(l)).copied().collect();
        let result = self.result_labels(other);
        let (ra, rb) = (self.rank(), other.rank());
        // Bit positions in each operand for result legs and shared legs.
        let pos = |labels: &[usize], l: usize| labels.iter().position(|x| *x == l);
        let a_free: Vec<(usize, usize)> = result
            .iter()
            .enumerate()
            .filter_map(|(k, l)| pos(&self.labels, *l).map(|p| (k, ra - 1 - p)))
            .collect();
        let b_free: Vec<(usize, usize)> = result
            .iter()
            .enumerate()
            .filter_map(|(k, l)| pos(&other.labels, *l).map(|p| (k, rb - 1 - p)))
            .collect();
        let a_sh: Vec<usize> = shared.iter().map(|l| ra - 1 - pos(&self.labels, *l).unwrap()).collect();
        let b_sh: Vec<usize> = shared.iter().map(|l| rb - 1 - pos(&other.labels, *l).unwrap()).collect();
        let rr = result.len();
        let scatter = |v: usize, bits: &[(usize, usize)]| {
            bits.iter().fold(0usize, |acc, (k, b)| acc | (((v >> (rr - 1 - k)) & 1) << b))
        };
        let scatter_sh = |s: usize, bits: &[usize]| {
            let n = bits.len();
            bits.iter().enumerate().fold(0usize, |acc, (k, b)| acc | (((s >> (n - 1 - k)) & 1) << b))
        };
        let mut data = Vec::with_capacity(1 << rr);
        let a_sh_idx: Vec<usize> = (0..1usize << shared.len()).map(|s| scatter_sh(s, &a_sh)).collect();
        let b_sh_idx: Vec<usize> = (0..1usize << shared.len()).map(|s| scatter_sh(s, &b_sh)).collect();
        for v in 0..1usize << rr {
            let ai = scatter(v, &a_free);
            let bi = scatter(v, &b_free);
            let mut acc = S::zero();
            for s in 0..a_sh_idx.len() {
                let x = &self.data[ai | a_sh_idx[s]];
                if x.is_zero() {
                    continue;
                }
                let y = &other.data[bi | b_sh_idx[s]];
                if !y.is_zero() {
                    acc = acc.add(&x.mul(y));
                }
            }
            data.push(acc);
        }
        Labeled { labels: result, data }
    }

    /// Reorders legs to the given label order.
    pub fn permute(&self, order: &[usize]) -> Vec<S> {
        let r = self.rank();
        assert_eq!(order.len(), r);
        let src: Vec<usize> = order
            .iter()
            .map(|l| r - 1 - self.labels.iter().position(|x| x == l).expect("missing label"))
            .collect();
        (0..1usize << r)
            .map(|v| {
                let idx = src
                    .iter()
                    .enumerate()
                    .fold(0usize, |acc, (k, b)| acc | (((v >> (r - 1 - k)) & 1) << b));
                self.data[idx].clone()
            })
            .collect()
    }
}

/// How pairs of tensors are chosen during contraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Schedule {
    /// Repeatedly contract the connected pair with the smallest result.
    #[default]
    Greedy,
    /// Fold tensors in creation order.
    Sequential,
}

/// Contracts a network of labeled tensors into one with the given open
/// labels, in that order.
pub(crate) fn contract_network<S: Scalar>(
    mut ts: Vec<Labeled<S>>,
    open: &[usize],
    schedule: Schedule,
) -> Vec<S> {
    if ts.is_empty() {
        assert!(open.is_empty());
        return vec![S::one()];
    }
    match schedule {
        Schedule::Sequential => {
            let mut acc = ts.remove(0);
            for t in ts {
                acc = acc.contract(&t);
            }
            acc.permute(open)
        }
        Schedule::Greedy => {
            while ts.len() > 1 {
                let mut best: Option<(usize, usize, usize, bool)> = None;
                for i in 0..ts.len() {
                    for j in i + 1..ts.len() {
                        let connected = ts[i].labels.iter().any(|l| ts[j].labels.contains(l));
                        let size = ts[i].result_labels(&ts[j]).len();
                        let better = match best {
                            None => true,
                            Some((_, _, bs, bc)) => (connected && !bc) || (connected == bc && size < bs),
                        };
                        if better {
                            best = Some((i, j, size, connected));
                        }
                    }
                }
                let (i, j, _, _) = best.unwrap();
                let b = ts.remove(j);
                let a = ts.remove(i);
                ts.push(a.contract(&b));
            }
            ts.pop().unwrap().permute(open)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kron_of_identities() {
        let i2 = ExactTensor::identity(2);
        assert_eq!(i2.kron(&i2), ExactTensor::identity(4));
    }

    #[test]
    fn global_phase_detection() {
        let i = FloatTensor::identity(2);
        let m = i.scale(&c(-1.0, 0.0));
        assert_eq!(equal_up_to_global_phase(&i, &m, 1e-12), Some(c(-1.0, 0.0)));
        assert_eq!(equal_up_to_global_phase(&i, &i, 1e-12), Some(c(1.0, 0.0)));
        let twice = i.scale(&c(2.0, 0.0));
        assert_eq!(equal_up_to_global_phase(&twice, &i, 1e-12), None);
        assert_eq!(proportional(&twice, &i, 1e-12), Some(c(2.0, 0.0)));
    }

    #[test]
    fn labeled_matrix_product() {
        // A[a,b]·B[b,c] = (AB)[a,c]
        let a = Labeled::new(vec![0, 1], vec![c(1., 0.), c(2., 0.), c(3., 0.), c(4., 0.)]);
        let b = Labeled::new(vec![1, 2], vec![c(0., 1.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        let ab = contract_network(vec![a.clone(), b.clone()], &[0, 2], Schedule::Greedy);
        let expect = FloatTensor::from_vec(2, 2, vec![c(1., 0.), c(2., 0.), c(3., 0.), c(4., 0.)])
            .matmul(&FloatTensor::from_vec(2, 2, vec![c(0., 1.), c(1., 0.), c(1., 0.), c(0., 0.)]))
            .unwrap();
        assert_eq!(ab, expect.data().to_vec());
        let ba = contract_network(vec![b, a], &[0, 2], Schedule::Sequential);
        assert_eq!(ba, expect.data().to_vec());
    }

    #[test]
    fn repeated_labels_are_traced() {
        let t = Labeled::new(vec![5, 5], vec![c(1., 0.), c(7., 0.), c(7., 0.), c(2., 0.)]);
        assert!(t.labels.is_empty());
        assert_eq!(t.data, vec![c(3., 0.)]);
    }
}
