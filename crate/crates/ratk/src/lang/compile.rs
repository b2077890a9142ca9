//! Compilation of actions to two-slice transition formulas.
//!
//! For a basic fluent f, the completion of one branch reads
//!
//! ```text
//! f@t1  <->  gamma(f)  |  (f@t & -gamma(-f))
//! ```
//!
//! where gamma(l) collects the conditions under which some rule causes l:
//! action rules contribute their conditions at slice t, static rules at
//! slice t1 (they describe the successor state reacting to itself). This
//! builds inertia in: a fluent changes only when something causes the
//! change. Derived fluents take no completion conjunct; their values are
//! pinned by static constraints, which are imposed at both slices. The
//! executability condition restricts slice t. Nondeterministic actions
//! compile branch-wise, and the branch formulas are disjoined.


use crate::logic::Formula;
use crate::semantics::{OnticAction, Space, State};

use super::{
    ActionDef, CausalRule, CompiledActionTheory, Domain, LangError, StaticLaw, TimedAtom,
    ENUM_LIMIT,
};

fn at(next: bool) -> impl Fn(&String) -> Formula<TimedAtom> {
    move |f: &String| {
        Formula::Atom(TimedAtom {
            fluent: f.clone(),
            next,
        })
    }
}

fn tag(f: &Formula<String>, next: bool) -> Formula<TimedAtom> {
    f.map_atoms(&mut at(next))
}

/// Conditions under which the branch rules cause the literal
/// `(fluent, positive)`, at slice t.
fn gamma_rules(rules: &[CausalRule], fluent: &str, positive: bool) -> Formula<TimedAtom> {
    Formula::disj(
        rules
            .iter()
            .filter(|r| r.effect.fluent == fluent && r.effect.positive == positive)
            .map(|r| tag(&r.condition, false))
            .collect(),
    )
}

/// Conditions under which static rules cause the literal, at slice t1.
fn gamma_statics(statics: &[StaticLaw], fluent: &str, positive: bool) -> Formula<TimedAtom> {
    Formula::disj(
        statics
            .iter()
            .filter_map(|law| match law {
                StaticLaw::Rule { condition, effect }
                    if effect.fluent == fluent && effect.positive == positive =>
                {
                    Some(tag(condition, true))
                }
                _ => None,
            })
            .collect(),
    )
}

fn branch_completion(domain: &Domain, rules: &[CausalRule]) -> Formula<TimedAtom> {
    let mut conjuncts = Vec::new();
    for f in &domain.basic {
        let cause = Formula::disj(vec![
            gamma_rules(rules, f, true),
            gamma_statics(&domain.statics, f, true),
        ]);
        let cause_not = Formula::disj(vec![
            gamma_rules(rules, f, false),
            gamma_statics(&domain.statics, f, false),
        ]);
        let persist = Formula::conj(vec![at(false)(f), Formula::not(cause_not)]);
        conjuncts.push(Formula::iff(
            at(true)(f),
            Formula::disj(vec![cause, persist]),
        ));
    }
    Formula::conj(conjuncts)
}

/// Compiles an action of the domain to its transition formula.
pub fn compile(domain: &Domain, action: &str) -> Result<CompiledActionTheory, LangError> {
    let def = domain.action(action)?;
    let (branches, strips_pre): (Vec<Vec<CausalRule>>, Formula<String>) = match def {
        ActionDef::Causal { branches } => (branches.clone(), Formula::True),
        ActionDef::Strips(sa) => (
            vec![sa.effects.clone()],
            Formula::conj(sa.precondition.iter().map(|l| l.to_formula()).collect()),
        ),
    };

    let mut conjuncts: Vec<Formula<TimedAtom>> = Vec::new();
    // Executability (including a STRIPS precondition) restricts the
    // current slice.
    let exec = Formula::conj(vec![domain.executability_of(action), strips_pre]);
    conjuncts.push(tag(&exec, false));
    // Static constraints hold at both slices.
    for law in &domain.statics {
        if let StaticLaw::Constraint(f) = law {
            conjuncts.push(tag(f, false));
            conjuncts.push(tag(f, true));
        }
    }
    conjuncts.push(Formula::disj(
        branches
            .iter()
            .map(|rules| branch_completion(domain, rules))
            .collect(),
    ));

    Ok(CompiledActionTheory {
        action: action.to_string(),
        fluents: domain.fluents(),
        sigma: Formula::conj(conjuncts).simplify(),
    })
}

/// Evaluates the transition formula on a concrete pair of states.
pub(crate) fn sigma_holds(
    theory: &CompiledActionTheory,
    space: &Space,
    s: State,
    s1: State,
) -> bool {
    theory.sigma.eval(&mut |a: &TimedAtom| {
        let i = space.index(&a.fluent).expect("fluent of the theory");
        if a.next {
            space.value(s1, i)
        } else {
            space.value(s, i)
        }
    })
}

/// Materialises the compiled theory as an enumerated transition relation.
/// The relation has an edge s -> s1 exactly when (s, s1) satisfies the
/// transition formula. Capped at [`ENUM_LIMIT`] fluents.
pub fn enumerate_transitions(
    domain: &Domain,
    action: &str,
) -> Result<(Space, OnticAction), LangError> {
    let fluents = domain.fluents();
    if fluents.len() > ENUM_LIMIT {
        return Err(LangError::SizeLimit { got: fluents.len() });
    }
    let theory = compile(domain, action)?;
    let space = domain.space()?;
    let ontic = OnticAction::from_fn(action, &space, |s| {
        space
            .states()
            .filter(|s1| sigma_holds(&theory, &space, s, *s1))
            .collect()
    })?;
    Ok((space, ontic))
}

/// Finds pairs of rules of one action that can fire together with
/// complementary effects. Returns the (simplified) conjunction of the two
/// conditions for every such pair whose overlap is satisfiable under the
/// static laws; an empty result means the action's rules cannot conflict.
pub fn detect_inconsistent_rules(
    domain: &Domain,
    action: &str,
) -> Result<Vec<Formula<String>>, LangError> {
    let def = domain.action(action)?;
    let branches: Vec<&[CausalRule]> = match def {
        ActionDef::Causal { branches } => branches.iter().map(|b| b.as_slice()).collect(),
        ActionDef::Strips(sa) => vec![sa.effects.as_slice()],
    };
    // Static laws provide the context: a conflict that only arises in
    // states the laws exclude is no conflict.
    let context = Formula::conj(
        domain
            .statics
            .iter()
            .map(|law| match law {
                StaticLaw::Constraint(f) => f.clone(),
                StaticLaw::Rule { condition, effect } => {
                    Formula::implies(condition.clone(), effect.to_formula())
                }
            })
            .collect(),
    );
    let universe = domain.fluents();
    let mut out: Vec<Formula<String>> = Vec::new();
    for rules in branches {
        for (i, a) in rules.iter().enumerate() {
            for b in rules.iter().skip(i + 1) {
                if a.effect != b.effect.complement() {
                    continue;
                }
                let overlap = Formula::conj(vec![a.condition.clone(), b.condition.clone()]);
                let witness = Formula::conj(vec![overlap.clone(), context.clone()]);
                if crate::logic::is_satisfiable(&witness, &universe) {
                    let simplified = overlap.simplify();
                    if !out.contains(&simplified) {
                        out.push(simplified);
                    }
                }
            }
        }
    }
    Ok(out)
}
