//! Rewriting with library rules: soundness fuzz, determinism and reversal.

use discard_core::axioms::{bind_diagram, library, Direction, Domain, RewriteRule, LIBRARY_NAMES};
use discard_core::cpm::interpret_cpm;
use discard_core::param::{Bindings, Coeff, Value};
use discard_core::random::{phase_pi4, random_diagram, Shape};
use discard_core::rewrite::{apply_rewrite, find_matches, isomorphic, MatchOptions};
use discard_core::{Diagram, ExactScalar};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Step {
    host: Diagram,
    lhs: Diagram,
    rhs: Diagram,
    result: Diagram,
}

/// Fills every rule parameter the match left open with a grid value.
fn complete(rule: &RewriteRule, mut b: Bindings, rng: &mut ChaCha8Rng) -> Bindings {
    for p in &rule.params {
        if b.contains(p.name) {
            continue;
        }
        let v = match p.domain {
            Domain::Phase4 => Value::Phase(phase_pi4(rng)),
            Domain::Phase2 => Value::Phase(discard_core::Phase::pi_frac(rng.gen_range(0..4), 2)),
            Domain::Coeff => Value::Coeff(Coeff::Exact(ExactScalar::omega_pow(rng.gen_range(0..8)))),
        };
        b.0.insert(p.name.to_string(), v);
    }
    b
}

/// Picks a random rule, leg counts, direction and match in a random host;
/// `None` when that rule does not occur.
fn random_step(lib: &str, rng: &mut ChaCha8Rng) -> Option<Step> {
    let lib = library(lib).unwrap();
    let c = lib.rules[0].calculus;
    let grounds = if lib.name.ends_with("ground") { 2 } else { 0 };
    let host = random_diagram(rng, c, Shape { max_wires: 4, max_nodes: 20, max_grounds: grounds });
    let rule = lib.rules.choose(rng).unwrap();
    let legs: Vec<usize> = rule.legs.iter().map(|s| rng.gen_range(s.min..=s.max)).collect();
    let dir = if rng.gen_bool(0.5) { Direction::LeftToRight } else { Direction::RightToLeft };
    let (pattern, replacement) = rule.oriented(&legs, dir).unwrap();
    let ms = find_matches(&pattern, &host, &Bindings::new(), MatchOptions::default());
    let m = ms.choose(rng)?;
    let b = complete(rule, m.bindings.clone(), rng);
    let lhs = bind_diagram(&pattern, &b).unwrap();
    let rhs = bind_diagram(&replacement, &b).unwrap();
    let result = apply_rewrite(&host, m, &rhs).unwrap();
    Some(Step { host, lhs, rhs, result })
}

#[test]
fn rewriting_preserves_cpm_semantics() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for lib in LIBRARY_NAMES {
        let mut applied = 0;
        for _ in 0..400 {
            let Some(s) = random_step(lib, &mut rng) else { continue };
            applied += 1;
            assert!(s.result.is_valid());
            let before = interpret_cpm(&s.host).unwrap();
            let after = interpret_cpm(&s.result).unwrap();
            let r = before.max_abs_diff(&after);
            assert!(r <= 1e-9, "{lib}: residual {r:e}");
        }
        assert!(applied >= 40, "{lib}: only {applied} rewrites applied");
    }
}

#[test]
fn rewriting_back_restores_the_host() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for lib in LIBRARY_NAMES {
        for _ in 0..200 {
            let Some(s) = random_step(lib, &mut rng) else { continue };
            let back = find_matches(&s.rhs, &s.result, &Bindings::new(), MatchOptions::default());
            let restored = back
                .iter()
                .filter_map(|m| apply_rewrite(&s.result, m, &s.lhs).ok())
                .any(|d| isomorphic(&d, &s.host));
            assert!(restored, "{lib}: no reverse match restores the host");
        }
    }
}

#[test]
fn match_lists_are_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let lib = library("zx-full").unwrap();
    for _ in 0..50 {
        let host = random_diagram(&mut rng, lib.rules[0].calculus, Shape { max_wires: 4, max_nodes: 15, max_grounds: 0 });
        for rule in &lib.rules {
            let (p, _) = rule.oriented(&vec![1; rule.legs.len()], Direction::LeftToRight).unwrap();
            let a = find_matches(&p, &host, &Bindings::new(), MatchOptions::default());
            let b = find_matches(&p, &host.clone(), &Bindings::new(), MatchOptions::default());
            assert_eq!(a, b);
        }
    }
}

#[test]
fn isomorphism_is_reflexive_and_sees_changes() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..50 {
        let d = random_diagram(&mut rng, discard_core::Calculus::ZH, Shape::default());
        assert!(isomorphic(&d, &d));
        assert!(isomorphic(&d, &d.compact()));
        let extra = d.tensor(&discard_core::builders::swap(d.calculus()).compose(&discard_core::builders::cap(d.calculus())).unwrap()).unwrap();
        assert!(!isomorphic(&d, &extra));
    }
}
