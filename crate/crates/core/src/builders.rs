//! Named diagrams in each calculus whose interpretation is exactly the
//! corresponding gate matrix. Scalar corrections are built in as explicit
//! scalar sub-diagrams.

use crate::diagram::{Calculus, Diagram, DiagramError, Generator, Port};
use crate::param::{Coeff, Phase};
use crate::ring::ExactScalar;

type Result<T> = std::result::Result<T, DiagramError>;

fn zx_z(n: usize, m: usize, p: Phase) -> Diagram {
    Diagram::node(Calculus::ZX, Generator::ZxZ(p), n, m)
}

fn zx_x(n: usize, m: usize, p: Phase) -> Diagram {
    Diagram::node(Calculus::ZX, Generator::ZxX(p), n, m)
}

/// √2 in ZX: a phase-free Z state plugged into a phase-free X effect.
pub fn zx_sqrt2() -> Diagram {
    zx_x(1, 0, Phase::zero()).compose(&zx_z(0, 1, Phase::zero())).unwrap()
}

/// 1/√2 in ZX: a three-legged X state fully plugged into a Z effect.
pub fn zx_inv_sqrt2() -> Diagram {
    zx_z(3, 0, Phase::zero()).compose(&zx_x(0, 3, Phase::zero())).unwrap()
}

/// (√2)^k in ZX for any integer k.
pub fn zx_sqrt2_pow(k: i32) -> Diagram {
    let unit = if k >= 0 { zx_sqrt2() } else { zx_inv_sqrt2() };
    let parts = vec![unit; k.unsigned_abs() as usize];
    Diagram::tensor_all(Calculus::ZX, &parts).unwrap()
}

/// A scalar diagram equal to `x`, where the calculus can express it.
///
/// ZW and ZH express every coefficient directly. ZX covers ω^j·(√2)^k and
/// 1 + ω^j up to powers of √2.
pub fn scalar(c: Calculus, x: &Coeff) -> Result<Diagram> {
    match c {
        Calculus::ZW => Ok(Diagram::node(c, Generator::ZwZ(x.sub(&Coeff::int(1))), 0, 0)),
        Calculus::ZH => Ok(Diagram::node(c, Generator::HBox(x.clone()), 0, 0)),
        Calculus::ZX => {
            let Coeff::Exact(e) = x else {
                let z = x.to_complex().ok_or(DiagramError::Unavailable("symbolic scalar", c))?;
                return Ok(zx_polar(z.norm(), z.arg()));
            };
            zx_exact_scalar(e).ok_or(DiagramError::Unavailable("this scalar", c))
        }
    }
}

/// r·e^{iθ} for r a power of √2 times (1 + e^{iφ}), or any float via
/// a phase gadget when r = 1.
fn zx_polar(r: f64, theta: f64) -> Diagram {
    // r = 2|cos(φ/2)| for a phase-free-sum spider: 1 + e^{iφ} = 2cos(φ/2)e^{iφ/2}.
    let half = (r / 2.0).clamp(-1.0, 1.0).acos();
    let phi = 2.0 * half;
    let spider = zx_z(0, 0, Phase::radians(phi));
    let rest = global_phase(Calculus::ZX, &Phase::radians(theta - half)).unwrap();
    spider.tensor(&rest).unwrap()
}

fn zx_exact_scalar(e: &ExactScalar) -> Option<Diagram> {
    if e.is_zero() {
        return Some(zx_z(0, 0, Phase::pi_frac(1, 1)));
    }
    // Strip powers of √2 until a unit or 1 + ω^j remains.
    for k in -8i32..=8 {
        let rest = e.mul(&ExactScalar::sqrt2_pow(-k));
        if let Some(j) = rest.as_omega_power() {
            let g = global_phase(Calculus::ZX, &Phase::pi_frac(j, 4)).ok()?;
            return Some(g.tensor(&zx_sqrt2_pow(k)).unwrap());
        }
        for j in 0..8 {
            if rest == ExactScalar::one().add(&ExactScalar::omega_pow(j)) {
                let g = zx_z(0, 0, Phase::pi_frac(j, 4));
                return Some(g.tensor(&zx_sqrt2_pow(k)).unwrap());
            }
        }
    }
    None
}

pub fn identity(c: Calculus, n: usize) -> Diagram {
    Diagram::identity(c, n)
}

pub fn swap(c: Calculus) -> Diagram {
    Diagram::node(c, Generator::Swap, 2, 2)
}

/// ε: 2 → 0, interpreted as (1 0 0 1).
pub fn cup(c: Calculus) -> Diagram {
    Diagram::node(c, Generator::Cup, 2, 0)
}

/// η: 0 → 2.
pub fn cap(c: Calculus) -> Diagram {
    Diagram::node(c, Generator::Cap, 0, 2)
}

/// n parallel discards.
pub fn ground(c: Calculus, n: usize) -> Diagram {
    let g = Diagram::node(c, Generator::Ground, 1, 0);
    Diagram::tensor_all(c, &vec![g; n]).unwrap()
}

/// e^{iα} as a 0 → 0 diagram.
pub fn global_phase(c: Calculus, alpha: &Phase) -> Result<Diagram> {
    match c {
        Calculus::ZX => {
            let pair = zx_x(1, 0, Phase::pi_frac(1, 1)).compose(&zx_z(0, 1, alpha.clone()))?;
            pair.tensor(&zx_inv_sqrt2())
        }
        _ => scalar(c, &alpha.exp_i()),
    }
}

pub fn ket0(c: Calculus) -> Result<Diagram> {
    match c {
        Calculus::ZX => zx_x(0, 1, Phase::zero()).tensor(&zx_inv_sqrt2()),
        Calculus::ZW => Ok(Diagram::node(c, Generator::ZwZ(Coeff::int(0)), 0, 1)),
        Calculus::ZH => Ok(Diagram::node(c, Generator::ZhX, 0, 1)),
    }
}

pub fn ket1(c: Calculus) -> Result<Diagram> {
    match c {
        Calculus::ZX => zx_x(0, 1, Phase::pi_frac(1, 1)).tensor(&zx_inv_sqrt2()),
        Calculus::ZW => Ok(Diagram::node(c, Generator::ZwW, 0, 1)),
        Calculus::ZH => Diagram::node(c, Generator::Not, 1, 1).compose(&ket0(c)?),
    }
}

pub fn h(c: Calculus) -> Result<Diagram> {
    let inv = Coeff::Exact(ExactScalar::sqrt2_pow(-1));
    match c {
        Calculus::ZX => Ok(Diagram::node(c, Generator::ZxH, 1, 1)),
        Calculus::ZW => {
            let w = Diagram::node(c, Generator::ZwW, 1, 1);
            let k = Diagram::identity(c, 1)
                .tensor(&Diagram::node(c, Generator::ZwZ(Coeff::int(1)), 1, 0))?
                .compose(&Diagram::node(c, Generator::ZwW, 1, 2))?;
            let mid = Diagram::node(c, Generator::ZwZ(Coeff::int(-2)), 1, 1);
            Diagram::sequence(&[w.clone(), k.clone(), mid, k, w])?.tensor(&scalar(c, &inv)?)
        }
        Calculus::ZH => {
            Diagram::node(c, Generator::HBox(Coeff::int(-1)), 1, 1).tensor(&scalar(c, &inv)?)
        }
    }
}

pub fn rz(c: Calculus, alpha: &Phase) -> Result<Diagram> {
    match c {
        Calculus::ZX => Ok(zx_z(1, 1, alpha.clone())),
        Calculus::ZW => Ok(Diagram::node(c, Generator::ZwZ(alpha.exp_i()), 1, 1)),
        Calculus::ZH => {
            let effect = Diagram::identity(c, 1)
                .tensor(&Diagram::node(c, Generator::HBox(alpha.exp_i()), 1, 0))?;
            effect.compose(&Diagram::node(c, Generator::ZhZ, 1, 2))
        }
    }
}

pub fn s(c: Calculus) -> Result<Diagram> {
    rz(c, &Phase::pi_frac(1, 2))
}

pub fn t(c: Calculus) -> Result<Diagram> {
    rz(c, &Phase::pi_frac(1, 4))
}

pub fn cnot(c: Calculus) -> Result<Diagram> {
    match c {
        Calculus::ZX => {
            let mut d = Diagram::with_boundary(c, 2, 2);
            let z = d.add_node(Generator::ZxZ(Phase::zero()), 1, 2);
            let x = d.add_node(Generator::ZxX(Phase::zero()), 2, 1);
            d.connect(Port::b_in(0), Port::input(z, 0));
            d.connect(Port::b_in(1), Port::input(x, 1));
            d.connect(Port::output(z, 0), Port::b_out(0));
            d.connect(Port::output(z, 1), Port::input(x, 0));
            d.connect(Port::output(x, 0), Port::b_out(1));
            d.tensor(&zx_sqrt2())
        }
        Calculus::ZW => Err(DiagramError::Unavailable("cnot", c)),
        Calculus::ZH => {
            let hh = Diagram::identity(c, 1).tensor(&h(c)?)?;
            Diagram::sequence(&[hh.clone(), cz(c)?, hh])
        }
    }
}

pub fn cz(c: Calculus) -> Result<Diagram> {
    match c {
        Calculus::ZX => {
            let hh = Diagram::identity(c, 1).tensor(&h(c)?)?;
            Diagram::sequence(&[hh.clone(), cnot(c)?, hh])
        }
        Calculus::ZW => Diagram::node(c, Generator::FSwap, 2, 2).compose(&swap(c)),
        Calculus::ZH => {
            let mut d = Diagram::with_boundary(c, 2, 2);
            let a = d.add_node(Generator::ZhZ, 1, 2);
            let b = d.add_node(Generator::ZhZ, 1, 2);
            let hb = d.add_node(Generator::HBox(Coeff::int(-1)), 2, 0);
            d.connect(Port::b_in(0), Port::input(a, 0));
            d.connect(Port::b_in(1), Port::input(b, 0));
            d.connect(Port::output(a, 0), Port::b_out(0));
            d.connect(Port::output(b, 0), Port::b_out(1));
            d.connect(Port::output(a, 1), Port::input(hb, 0));
            d.connect(Port::output(b, 1), Port::input(hb, 1));
            Ok(d)
        }
    }
}

/// The builders addressable by name (used by the CLI and tests).
pub const NAMES: [&str; 13] = [
    "identity", "swap", "cup", "cap", "ground", "ket0", "ket1", "h", "s", "t", "cnot", "cz", "rz",
];

/// Looks up a builder by name. `rz` and `global_phase` take `alpha`.
pub fn by_name(c: Calculus, name: &str, alpha: &Phase) -> Result<Diagram> {
    Ok(match name {
        "identity" => identity(c, 1),
        "swap" => swap(c),
        "cup" => cup(c),
        "cap" => cap(c),
        "ground" => ground(c, 1),
        "ket0" => ket0(c)?,
        "ket1" => ket1(c)?,
        "h" => h(c)?,
        "s" => s(c)?,
        "t" => t(c)?,
        "cnot" => cnot(c)?,
        "cz" => cz(c)?,
        "rz" => rz(c, alpha)?,
        "global_phase" => global_phase(c, alpha)?,
        _ => return Err(DiagramError::Unavailable("unknown builder", c)),
    })
}
