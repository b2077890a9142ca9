//! Belief progression, regression, filtering, and event abduction.

use std::collections::BTreeSet;

use super::{
    BinaryBelief, EpistemicAction, OnticAction, ProbBelief, SemanticsError, Space,
    StochasticAction,
};

/// Union of successor sets; the raw image of a state set under the
/// transition relation, possibly empty.
pub fn progress_set(states: &BTreeSet<State>, action: &OnticAction) -> BTreeSet<State> {
    let mut out = BTreeSet::new();
    for s in states {
        out.extend(action.successors(*s).iter().copied());
    }
    out
}

use super::State;

/// Progresses a belief through an action: the union of the successors of
/// its states. The result must be a belief again, so an empty image (the
/// action is inexecutable everywhere the agent considers possible) is the
/// error [`SemanticsError::EmptyResult`].
pub fn progress(b: &BinaryBelief, action: &OnticAction) -> Result<BinaryBelief, SemanticsError> {
    let image = progress_set(b.states(), action);
    BinaryBelief::new(image).map_err(|_| SemanticsError::EmptyResult {
        action: action.name().to_string(),
    })
}

/// Progresses a distribution through a stochastic action:
/// `b'(t) = sum_s b(s) * p(t | s)`. Mass on a state without a matrix row is
/// [`SemanticsError::Inexecutable`].
pub fn progress_prob(
    space: &Space,
    b: &ProbBelief,
    action: &StochasticAction,
) -> Result<ProbBelief, SemanticsError> {
    let mut mass = vec![0.0; space.num_states()];
    for s in space.states() {
        let p_s = b.mass(s);
        if p_s == 0.0 {
            continue;
        }
        let row = action.row(s).ok_or_else(|| SemanticsError::Inexecutable {
            action: action.name().to_string(),
            state: space.format_state(s),
        })?;
        for (t, p) in row {
            mass[t.0 as usize] += p_s * p;
        }
    }
    // Rows are distributions, so the total is 1 up to rounding; renormalise
    // the rounding away to keep k-fold iteration inside tolerance.
    let total: f64 = mass.iter().sum();
    for m in &mut mass {
        *m /= total;
    }
    ProbBelief::new(space, mass)
}

/// Weak regression: the states from which `action` may lead into `target`.
/// The preimage can be empty, so the result is a plain state set.
pub fn regress_weak(
    space: &Space,
    target: &BinaryBelief,
    action: &OnticAction,
) -> BTreeSet<State> {
    space
        .states()
        .filter(|s| !action.successors(*s).is_disjoint(target.states()))
        .collect()
}

/// Strong regression: the states from which `action` is executable and
/// certain to lead into `target`. Excludes states where the action is
/// inexecutable; otherwise an unexecutable action would trivially
/// "guarantee" anything.
pub fn regress_strong(
    space: &Space,
    target: &BinaryBelief,
    action: &OnticAction,
) -> BTreeSet<State> {
    space
        .states()
        .filter(|s| {
            let succ = action.successors(*s);
            !succ.is_empty() && succ.is_subset(target.states())
        })
        .collect()
}

/// The states compatible with observing `obs` under the sensing model:
/// those that can produce it.
pub fn compatible_states(
    space: &Space,
    action: &EpistemicAction,
    obs: &str,
) -> Result<BTreeSet<State>, SemanticsError> {
    let o = action.observations().index(obs)?;
    Ok(space
        .states()
        .filter(|s| action.possible_observations(*s).contains(&o))
        .collect())
}

/// Filters a belief through one action occurrence and an observation:
/// progress through the dynamics (identity if `dynamics` is `None`), then
/// keep the states compatible with `obs` under `sensing` (the null sensor
/// if `None`, which only accepts the null observation and filters nothing).
pub fn filter(
    space: &Space,
    b: &BinaryBelief,
    dynamics: Option<&OnticAction>,
    sensing: Option<&EpistemicAction>,
    obs: &str,
) -> Result<BinaryBelief, SemanticsError> {
    let predicted = match dynamics {
        Some(a) => progress(b, a)?,
        None => b.clone(),
    };
    let null;
    let sensor = match sensing {
        Some(e) => e,
        None => {
            null = EpistemicAction::null(space);
            &null
        }
    };
    let compatible = compatible_states(space, sensor, obs)?;
    let filtered: BTreeSet<State> = predicted
        .states()
        .intersection(&compatible)
        .copied()
        .collect();
    BinaryBelief::new(filtered).map_err(|_| SemanticsError::Inconsistent {
        observation: obs.to_string(),
    })
}

/// Bayesian filtering: predict through the stochastic dynamics, weight by
/// the observation likelihood, renormalise. An observation with zero
/// predicted probability is [`SemanticsError::ZeroProbabilityObservation`].
pub fn filter_prob(
    space: &Space,
    b: &ProbBelief,
    dynamics: Option<&StochasticAction>,
    sensing: Option<&EpistemicAction>,
    obs: &str,
) -> Result<ProbBelief, SemanticsError> {
    let predicted = match dynamics {
        Some(a) => progress_prob(space, b, a)?,
        None => b.clone(),
    };
    let null;
    let sensor = match sensing {
        Some(e) => e,
        None => {
            null = EpistemicAction::null(space);
            &null
        }
    };
    let o = sensor.observations().index(obs)?;
    let mut mass: Vec<f64> = Vec::with_capacity(space.num_states());
    for s in space.states() {
        mass.push(predicted.mass(s) * sensor.likelihood(s, o)?);
    }
    let z: f64 = mass.iter().sum();
    if z <= 0.0 {
        return Err(SemanticsError::ZeroProbabilityObservation {
            observation: obs.to_string(),
        });
    }
    for m in &mut mass {
        *m /= z;
    }
    ProbBelief::new(space, mass)
}

/// Offline progression through a sensing action: one successor belief per
/// observation the current belief is consistent with, in observation
/// order. The union of the results covers the input belief, and the
/// results are pairwise disjoint exactly when no state can produce two
/// observations.
pub fn progress_epistemic_offline(
    space: &Space,
    b: &BinaryBelief,
    action: &EpistemicAction,
) -> Vec<(String, BinaryBelief)> {
    let mut out = Vec::new();
    for (o, name) in action.observations().names().iter().enumerate() {
        let compatible: BTreeSet<State> = b
            .states()
            .iter()
            .copied()
            .filter(|s| action.possible_observations(*s).contains(&o))
            .collect();
        if let Ok(belief) = BinaryBelief::new(compatible) {
            out.push((name.clone(), belief));
        }
    }
    debug_assert!(!out.is_empty(), "every state produces some observation");
    let _ = space;
    out
}

/// Event abduction: which candidate actions explain an observed belief
/// change? An action explains `b -> after` when every state of `after` is
/// reachable from `b`, that is `after` is contained in the progression of
/// `b`. Candidates are reported in the given order.
pub fn abduce(
    b: &BinaryBelief,
    after: &BinaryBelief,
    candidates: &[&OnticAction],
) -> Vec<String> {
    candidates
        .iter()
        .filter(|a| after.states().is_subset(&progress_set(b.states(), a)))
        .map(|a| a.name().to_string())
        .collect()
}
