//! Replaying equational proof scripts.
//!
//! Each step names a rule, its library, a direction, the variadic leg counts
//! and an index into the deterministic match list of the current diagram.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::axioms::{bind_diagram, library, Direction, RuleLibrary};
use crate::cpm::interpret_cpm_with;
use crate::diagram::Diagram;
use crate::param::Bindings;
use crate::rewrite::{apply_rewrite, find_matches, isomorphic, MatchOptions};
use crate::ring::ExactScalar;
use crate::semantics::is_exact_representable;

#[derive(Clone, Debug, PartialEq)]
pub struct ProofStep {
    pub rule: String,
    pub library: String,
    pub dir: Direction,
    pub index: usize,
    pub legs: Vec<usize>,
    /// Values for template variables that the match cannot determine.
    pub bindings: Bindings,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProofScript {
    pub initial: Diagram,
    pub steps: Vec<ProofStep>,
    pub final_diagram: Diagram,
}

#[derive(Clone, Copy, Debug)]
pub struct ProofOptions {
    /// Compare CPM semantics before and after every step.
    pub semantic_check: bool,
    /// Skip the semantic check when a diagram has more boundary wires than this.
    pub max_wires: usize,
    pub tol: f64,
}

impl Default for ProofOptions {
    fn default() -> Self {
        ProofOptions { semantic_check: false, max_wires: 8, tol: 1e-9 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StepReport {
    pub step: usize,
    pub rule: String,
    pub library: String,
    pub matches: usize,
    pub ok: bool,
    pub residual: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProofReport {
    pub valid: bool,
    pub steps: Vec<StepReport>,
    /// Index of the first failing step, if any.
    pub failed_step: Option<usize>,
    pub final_matches: bool,
    pub error: Option<String>,
}

fn cpm_residual(a: &Diagram, b: &Diagram) -> Result<f64, String> {
    if is_exact_representable(a) && is_exact_representable(b) {
        let x = interpret_cpm_with::<ExactScalar>(a).map_err(|e| e.to_string())?;
        let y = interpret_cpm_with::<ExactScalar>(b).map_err(|e| e.to_string())?;
        if x.choi() == y.choi() {
            return Ok(0.0);
        }
        return Ok(x.max_abs_diff(&y));
    }
    let x = interpret_cpm_with::<Complex64>(a).map_err(|e| e.to_string())?;
    let y = interpret_cpm_with::<Complex64>(b).map_err(|e| e.to_string())?;
    if x.choi().rows() != y.choi().rows() || x.choi().cols() != y.choi().cols() {
        return Err("boundary changed".to_string());
    }
    Ok(x.max_abs_diff(&y))
}

/// Applies one step to `cur`, returning the next diagram and the number of
/// matches available.
fn apply_step(
    cur: &Diagram,
    step: &ProofStep,
    libs: &mut BTreeMap<String, RuleLibrary>,
) -> Result<(Diagram, usize), (usize, String)> {
    if !libs.contains_key(&step.library) {
        let lib = library(&step.library).map_err(|e| (0, e.to_string()))?;
        libs.insert(step.library.clone(), lib);
    }
    let rule = libs[&step.library].get(&step.rule).map_err(|e| (0, e.to_string()))?;
    let (pattern, replacement) = rule.oriented(&step.legs, step.dir).map_err(|e| (0, e.to_string()))?;
    let ms = find_matches(&pattern, cur, &step.bindings, MatchOptions::default());
    let Some(m) = ms.get(step.index) else {
        return Err((ms.len(), format!("no match at index {} ({} available)", step.index, ms.len())));
    };
    let mut b = step.bindings.clone();
    b.0.extend(m.bindings.0.iter().map(|(k, v)| (k.clone(), v.clone())));
    let replacement = bind_diagram(&replacement, &b).map_err(|e| (ms.len(), e.to_string()))?;
    let next = apply_rewrite(cur, m, &replacement).map_err(|e| (ms.len(), e.to_string()))?;
    Ok((next, ms.len()))
}

pub fn verify_proof(script: &ProofScript, opts: &ProofOptions) -> ProofReport {
    let mut libs = BTreeMap::new();
    let mut cur = script.initial.clone();
    let mut steps = Vec::new();
    for (i, step) in script.steps.iter().enumerate() {
        let mut report = StepReport {
            step: i,
            rule: step.rule.clone(),
            library: step.library.clone(),
            matches: 0,
            ok: false,
            residual: None,
            error: None,
        };
        match apply_step(&cur, step, &mut libs) {
            Ok((next, n)) => {
                report.matches = n;
                report.ok = true;
                let wires = cur.num_inputs() + cur.num_outputs();
                if opts.semantic_check && wires <= opts.max_wires {
                    match cpm_residual(&cur, &next) {
                        Ok(r) => {
                            report.residual = Some(r);
                            if r > opts.tol {
                                report.ok = false;
                                report.error = Some(format!("semantics changed (residual {r:.3e})"));
                            }
                        }
                        Err(e) => {
                            report.ok = false;
                            report.error = Some(e);
                        }
                    }
                }
                cur = next;
            }
            Err((n, e)) => {
                report.matches = n;
                report.error = Some(e);
            }
        }
        let ok = report.ok;
        steps.push(report);
        if !ok {
            return ProofReport {
                valid: false,
                failed_step: Some(i),
                final_matches: false,
                error: steps[i].error.clone(),
                steps,
            };
        }
    }
    let final_matches = isomorphic(&cur, &script.final_diagram);
    ProofReport {
        valid: final_matches,
        steps,
        failed_step: None,
        final_matches,
        error: (!final_matches).then(|| "final diagram does not match the claim".to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders;
    use crate::diagram::{Calculus, Generator};

    fn step(rule: &str, lib: &str, dir: Direction, index: usize, legs: &[usize]) -> ProofStep {
        ProofStep {
            rule: rule.into(),
            library: lib.into(),
            dir,
            index,
            legs: legs.to_vec(),
            bindings: Bindings::new(),
        }
    }

    #[test]
    fn hadamard_cancellation() {
        let h = builders::h(Calculus::ZX).unwrap();
        let script = ProofScript {
            initial: h.compose(&h).unwrap(),
            steps: vec![step("h2", "zx-full", Direction::LeftToRight, 0, &[])],
            final_diagram: Diagram::identity(Calculus::ZX, 1),
        };
        let opts = ProofOptions { semantic_check: true, ..Default::default() };
        let rep = verify_proof(&script, &opts);
        assert!(rep.valid, "{rep:?}");
        assert_eq!(rep.steps[0].residual, Some(0.0));
    }

    #[test]
    fn ground_absorbs_cnot_and_round_trips() {
        let c = Calculus::ZX;
        let initial = builders::ground(c, 2).compose(&builders::cnot(c).unwrap()).unwrap();
        let script = ProofScript {
            initial,
            steps: vec![
                step("cnot", "zx-ground", Direction::LeftToRight, 0, &[]),
                step("identity-z", "zx-full", Direction::RightToLeft, 0, &[]),
                step("identity-z", "zx-full", Direction::LeftToRight, 0, &[]),
            ],
            final_diagram: builders::ground(c, 2),
        };
        let opts = ProofOptions { semantic_check: true, ..Default::default() };
        let rep = verify_proof(&script, &opts);
        assert!(rep.valid, "{rep:?}");
        assert!(rep.steps.iter().all(|s| s.residual == Some(0.0)));
    }

    #[test]
    fn non_isometry_cannot_be_discarded() {
        let c = Calculus::ZX;
        let effect = Diagram::node(c, Generator::ZxX(crate::param::Phase::zero()), 1, 1);
        let initial = builders::ground(c, 1).compose(&effect).unwrap();
        let script = ProofScript {
            initial,
            steps: vec![step("h", "zx-ground", Direction::LeftToRight, 0, &[])],
            final_diagram: builders::ground(c, 1),
        };
        let rep = verify_proof(&script, &ProofOptions::default());
        assert!(!rep.valid);
        assert_eq!(rep.failed_step, Some(0));
    }
}
