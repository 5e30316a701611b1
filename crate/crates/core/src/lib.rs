//! Diagrammatic calculi (ZX, ZW, ZH) extended with a discard generator:
//! pure and completely positive semantics, purification, witnesses for the
//! relations between purifications, rule libraries and a proof checker.

pub mod axioms;
pub mod builders;
pub mod cpm;
pub mod diagram;
pub mod json;
pub mod param;
pub mod proof;
pub mod random;
pub mod properties;
pub mod rewrite;
pub mod ring;
pub mod semantics;
pub mod stab;
pub mod tensor;

pub use num_complex::Complex64;
pub use diagram::{Calculus, Diagram, DiagramError, Generator, Node, NodeId, Port, Side, Violation};
pub use param::{Bindings, Coeff, Phase};
pub use ring::{ExactScalar, Scalar};
pub use semantics::{interp, interp_exact, interp_float, Backend};
pub use tensor::{AnyTensor, ExactTensor, FloatTensor, Tensor};
