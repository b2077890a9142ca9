//! Symbolic progression and regression over compiled transition formulas.
//!
//! Both directions are variable forgetting: conjoin the belief (tagged
//! with the appropriate slice) onto the transition formula, forget the
//! atoms of the slice being left behind, and read the result at the other
//! slice.

use std::collections::BTreeSet;

use crate::logic::Formula;

use super::{CompiledActionTheory, LangError, TimedAtom};

/// Forgets the given fluents from a formula: the strongest consequence
/// that does not mention them.
pub fn forget(f: &Formula<String>, vars: &BTreeSet<String>) -> Formula<String> {
    f.forget(vars)
}

fn check_fluents(f: &Formula<String>, th: &CompiledActionTheory) -> Result<(), LangError> {
    for a in f.atoms() {
        if !th.fluents.contains(&a) {
            return Err(LangError::UnknownFluent { fluent: a });
        }
    }
    Ok(())
}

fn slice_atoms(th: &CompiledActionTheory, next: bool) -> BTreeSet<TimedAtom> {
    th.fluents
        .iter()
        .map(|f| TimedAtom {
            fluent: f.clone(),
            next,
        })
        .collect()
}

fn tag(f: &Formula<String>, next: bool) -> Formula<TimedAtom> {
    f.map_atoms(&mut |a| {
        Formula::Atom(TimedAtom {
            fluent: a.clone(),
            next,
        })
    })
}

fn untag(f: &Formula<TimedAtom>) -> Formula<String> {
    f.map_atoms(&mut |a| Formula::Atom(a.fluent.clone()))
}

/// The strongest formula describing the states reachable by the action
/// from some state satisfying `phi`. Errors with
/// [`LangError::Inexecutable`] when no transition starts in `phi`.
pub fn progress_formula(
    phi: &Formula<String>,
    th: &CompiledActionTheory,
) -> Result<Formula<String>, LangError> {
    check_fluents(phi, th)?;
    let combined = Formula::conj(vec![tag(phi, false), th.sigma.clone()]);
    let after = combined.forget(&slice_atoms(th, false));
    debug_assert!(after.atoms().iter().all(|a| a.next));
    let result = untag(&after).simplify();
    if !crate::logic::is_satisfiable(&result, &th.fluents) {
        return Err(LangError::Inexecutable {
            action: th.action.clone(),
        });
    }
    Ok(result)
}

/// The states from which the action can reach a state satisfying `psi`.
/// May be unsatisfiable; that is an answer, not an error.
pub fn regress_weak_formula(
    psi: &Formula<String>,
    th: &CompiledActionTheory,
) -> Result<Formula<String>, LangError> {
    check_fluents(psi, th)?;
    let combined = Formula::conj(vec![tag(psi, true), th.sigma.clone()]);
    let before = combined.forget(&slice_atoms(th, true));
    debug_assert!(before.atoms().iter().all(|a| !a.next));
    Ok(untag(&before).simplify())
}

/// The states from which the action is executable and every outcome
/// satisfies `psi`: executability minus the weak preimage of the
/// complement.
pub fn regress_strong_formula(
    psi: &Formula<String>,
    th: &CompiledActionTheory,
) -> Result<Formula<String>, LangError> {
    check_fluents(psi, th)?;
    let executable = untag(&th.sigma.forget(&slice_atoms(th, true)));
    let can_miss = regress_weak_formula(&Formula::not(psi.clone()), th)?;
    Ok(Formula::conj(vec![executable, Formula::not(can_miss)]).simplify())
}

#[cfg(test)]
mod tests {
    use super::super::testutil::go_out_domain;
    use super::*;
    use crate::lang::{compile, enumerate_transitions, parse_domain};
    use crate::logic::{equivalent, parse_formula};

    fn f(s: &str) -> Formula<String> {
        parse_formula(s).unwrap()
    }

    #[test]
    fn go_out_progress_kept_dry() {
        let th = compile(&go_out_domain(), "Go-out").unwrap();
        let result = progress_formula(&f("Dry & Umbrella"), &th).unwrap();
        assert!(equivalent(&result, &f("Outside & Umbrella & Dry"), &th.fluents));
    }

    #[test]
    fn go_out_progress_no_umbrella() {
        let th = compile(&go_out_domain(), "Go-out").unwrap();
        let result = progress_formula(&f("-Umbrella"), &th).unwrap();
        assert!(equivalent(
            &result,
            &f("Outside & -Umbrella & (Rain -> -Dry)"),
            &th.fluents
        ));
    }

    #[test]
    fn go_out_regress_weak() {
        let th = compile(&go_out_domain(), "Go-out").unwrap();
        let result = regress_weak_formula(&f("Dry & Rain"), &th).unwrap();
        assert!(equivalent(&result, &f("Umbrella & Rain & Dry"), &th.fluents));
    }

    #[test]
    fn progression_of_truth_is_reachable_image() {
        let th = compile(&go_out_domain(), "Go-out").unwrap();
        let result = progress_formula(&Formula::True, &th).unwrap();
        // Everything reachable is outside; rain and umbrella are free, and
        // wetness is constrained by the static rule.
        assert!(equivalent(
            &result,
            &f("Outside & (Rain & -Umbrella -> -Dry)"),
            &th.fluents
        ));
    }

    #[test]
    fn inexecutable_progression_is_an_error() {
        let d = parse_domain(
            "fluents: up broken\naction raise { causes up }\nexecutable raise if -broken",
        )
        .unwrap();
        let th = compile(&d, "raise").unwrap();
        assert!(matches!(
            progress_formula(&f("broken"), &th),
            Err(LangError::Inexecutable { .. })
        ));
        // Regression of truth recovers the executability condition.
        let r = regress_weak_formula(&Formula::True, &th).unwrap();
        assert!(equivalent(&r, &f("-broken"), &th.fluents));
    }

    #[test]
    fn strong_regression_examples() {
        let d = parse_domain("fluents: Heads\naction Toss { causes Heads | causes -Heads }")
            .unwrap();
        let th = compile(&d, "Toss").unwrap();
        // No state guarantees a coin toss outcome.
        let strong = regress_strong_formula(&f("Heads"), &th).unwrap();
        assert!(!crate::logic::is_satisfiable(&strong, &th.fluents));
        // But every state may yield it.
        let weak = regress_weak_formula(&f("Heads"), &th).unwrap();
        assert!(crate::logic::is_valid(&weak, &th.fluents));
        // Strong regression of falsity is falsity.
        let none = regress_strong_formula(&Formula::False, &th).unwrap();
        assert!(!crate::logic::is_satisfiable(&none, &th.fluents));
    }

    #[test]
    fn symbolic_ops_agree_with_enumeration() {
        // Spot-check on a fixed domain; the broad randomized agreement
        // suite lives in the integration tests.
        let d = parse_domain(
            "fluents: a b c\n\
             action go { if a causes b ; if -a & -b causes c ; causes a | if b causes -b }\n\
             executable go if a | b | c\n",
        )
        .unwrap();
        let th = compile(&d, "go").unwrap();
        let (space, rel) = enumerate_transitions(&d, "go").unwrap();
        for phi in ["a", "-a & c", "b | c", "true", "a <-> c"] {
            let phi = f(phi);
            let start = space.models(&phi).unwrap();
            let mut image = std::collections::BTreeSet::new();
            let mut weak = std::collections::BTreeSet::new();
            let mut strong = std::collections::BTreeSet::new();
            for s in space.states() {
                let succ = rel.successors(s);
                if start.contains(&s) {
                    image.extend(succ.iter().copied());
                }
                if succ.iter().any(|t| start.contains(t)) {
                    weak.insert(s);
                }
                if !succ.is_empty() && succ.iter().all(|t| start.contains(t)) {
                    strong.insert(s);
                }
            }
            match progress_formula(&phi, &th) {
                Ok(prog) => assert_eq!(space.models(&prog).unwrap(), image),
                Err(LangError::Inexecutable { .. }) => assert!(image.is_empty()),
                Err(other) => panic!("unexpected error {other}"),
            }
            let rw = regress_weak_formula(&phi, &th).unwrap();
            assert_eq!(space.models(&rw).unwrap(), weak);
            let rs = regress_strong_formula(&phi, &th).unwrap();
            assert_eq!(space.models(&rs).unwrap(), strong);
        }
    }

    #[test]
    fn deterministic_without_branching_has_unique_successors() {
        // Without disjunctive branches, statics, or executability limits,
        // the completion is a function: every state has exactly one
        // successor.
        let d = parse_domain(
            "fluents: a b c d\n\
             action go { if a & -b causes c ; if c causes -a ; causes d ; if d causes -d }\n",
        )
        .unwrap();
        let (space, rel) = enumerate_transitions(&d, "go").unwrap();
        for s in space.states() {
            assert_eq!(rel.successors(s).len(), 1);
        }
        let th = compile(&d, "go").unwrap();
        let weak = regress_weak_formula(&f("c & -a"), &th).unwrap();
        let strong = regress_strong_formula(&f("c & -a"), &th).unwrap();
        assert!(equivalent(&weak, &strong, &th.fluents));
    }
}
