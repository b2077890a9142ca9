//! Direct state-level progression of STRIPS-style operators.
//!
//! Where the compiled route works on belief formulas, this operates on a
//! single complete state: check the precondition and the static laws, fire
//! every effect rule whose condition holds, carry the untouched basic
//! fluents over, and complete the derived fluents from the static laws.

use crate::semantics::{Space, State};

use super::{ActionDef, Domain, LangError, StaticLaw};

fn static_holds(law: &StaticLaw, space: &Space, s: State) -> bool {
    let assign = &mut |a: &String| {
        let i = space.index(a).expect("law over declared fluents");
        space.value(s, i)
    };
    match law {
        StaticLaw::Constraint(f) => f.eval(assign),
        StaticLaw::Rule { condition, effect } => {
            !condition.eval(assign) || effect.to_formula().eval(assign)
        }
    }
}

/// Progresses one state through a STRIPS action of the domain.
pub fn strips_progress(domain: &Domain, action: &str, s: State) -> Result<State, LangError> {
    let def = domain.action(action)?;
    let sa = match def {
        ActionDef::Strips(sa) => sa,
        ActionDef::Causal { .. } => {
            return Err(LangError::NotStrips {
                action: action.to_string(),
            })
        }
    };
    let space = domain.space()?;

    for lit in &sa.precondition {
        if !lit.holds_in(&space, s) {
            return Err(LangError::PreconditionFailure {
                action: action.to_string(),
                state: space.format_state(s),
                reason: format!("`{lit}` does not hold"),
            });
        }
    }
    if let Some(law) = domain.statics.iter().find(|law| !static_holds(law, &space, s)) {
        let _ = law;
        return Err(LangError::PreconditionFailure {
            action: action.to_string(),
            state: space.format_state(s),
            reason: "the state violates the static laws".to_string(),
        });
    }

    // Fire every rule whose condition holds in the current state.
    let fired: Vec<&super::Literal> = sa
        .effects
        .iter()
        .filter(|r| {
            r.condition.eval(&mut |a: &String| {
                let i = space.index(a).expect("rule over declared fluents");
                space.value(s, i)
            })
        })
        .map(|r| &r.effect)
        .collect();
    for (i, lit) in fired.iter().enumerate() {
        if fired[i + 1..].iter().any(|other| **other == lit.complement()) {
            return Err(LangError::UndefinedProgression {
                action: action.to_string(),
                state: space.format_state(s),
                fluent: lit.fluent.clone(),
            });
        }
    }

    // Basic fluents: effects override, everything else persists.
    let mut next = s;
    for lit in fired {
        let i = space.index(&lit.fluent).expect("effects are declared basic fluents");
        next = space.with_value(next, i, lit.positive);
    }

    // Derived fluents: the unique completion consistent with the laws.
    let derived_idx: Vec<usize> = domain
        .derived
        .iter()
        .map(|f| space.index(f).expect("derived fluents are in the space"))
        .collect();
    let mut completions: Vec<State> = Vec::new();
    for mask in 0..(1u32 << derived_idx.len()) {
        let mut candidate = next;
        for (k, i) in derived_idx.iter().enumerate() {
            candidate = space.with_value(candidate, *i, mask & (1 << k) != 0);
        }
        if domain.statics.iter().all(|law| static_holds(law, &space, candidate)) {
            completions.push(candidate);
        }
    }
    match completions.as_slice() {
        [unique] => Ok(*unique),
        other => Err(LangError::IncompleteLaws {
            state: space.format_state(next),
            count: other.len(),
        }),
    }
}
