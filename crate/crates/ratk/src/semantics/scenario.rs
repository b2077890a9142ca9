//! Scenario monitoring and extrapolation.
//!
//! A scenario is a timeline: an initial belief, an optional action
//! occurrence per step, and an optional observation per time point
//! (observations are given extensionally as the sets of states compatible
//! with them). Monitoring folds progression and intersection along the
//! timeline and reports the first time point at which nothing the agent
//! considers possible survives, rather than failing. Extrapolation
//! explains such a timeline by inserting exogenous events, changing as
//! little as possible: the fewest insertions, at most one per step that
//! has no recorded action.

use std::collections::{BTreeMap, BTreeSet};

use super::ops::progress_set;
use super::{BinaryBelief, OnticAction, SemanticsError, Space, State};

/// A recorded timeline over `horizon` steps. `actions[t]` happens between
/// time points `t` and `t + 1`; `observations[t]` constrains time point
/// `t`. A step with no action means nothing (relevant) happened: states
/// persist.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub horizon: usize,
    pub init: BinaryBelief,
    pub actions: Vec<Option<String>>,
    pub observations: Vec<Option<BTreeSet<State>>>,
}

impl Scenario {
    fn check(&self) -> Result<(), SemanticsError> {
        if self.actions.len() != self.horizon {
            return Err(SemanticsError::InvalidScenario {
                reason: format!(
                    "horizon {} needs {} action slots, got {}",
                    self.horizon,
                    self.horizon,
                    self.actions.len()
                ),
            });
        }
        if self.observations.len() != self.horizon + 1 {
            return Err(SemanticsError::InvalidScenario {
                reason: format!(
                    "horizon {} needs {} observation slots, got {}",
                    self.horizon,
                    self.horizon + 1,
                    self.observations.len()
                ),
            });
        }
        Ok(())
    }
}

/// The outcome of monitoring: either a belief per time point, or the first
/// time point at which the timeline became inconsistent together with the
/// beliefs computed up to (not including) that point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScenarioOutcome {
    Consistent { trajectory: Vec<BinaryBelief> },
    Inconsistent { at: usize, prefix: Vec<BinaryBelief> },
}

fn run_resolved(
    init: &BinaryBelief,
    observations: &[Option<BTreeSet<State>>],
    acts: &[Option<&OnticAction>],
) -> ScenarioOutcome {
    let mut trajectory: Vec<BinaryBelief> = Vec::with_capacity(acts.len() + 1);
    let mut current: BTreeSet<State> = init.states().clone();
    if let Some(obs) = &observations[0] {
        current = current.intersection(obs).copied().collect();
    }
    match BinaryBelief::new(current.clone()) {
        Ok(b) => trajectory.push(b),
        Err(_) => {
            return ScenarioOutcome::Inconsistent {
                at: 0,
                prefix: trajectory,
            }
        }
    }
    for (t, act) in acts.iter().enumerate() {
        current = match act {
            Some(a) => progress_set(&current, a),
            None => current,
        };
        if let Some(obs) = &observations[t + 1] {
            current = current.intersection(obs).copied().collect();
        }
        match BinaryBelief::new(current.clone()) {
            Ok(b) => trajectory.push(b),
            Err(_) => {
                return ScenarioOutcome::Inconsistent {
                    at: t + 1,
                    prefix: trajectory,
                }
            }
        }
    }
    ScenarioOutcome::Consistent { trajectory }
}

/// Monitors a scenario against a library of named actions. Inconsistency
/// is part of the result, not an error; errors are reserved for scenarios
/// that are malformed or mention unknown actions.
pub fn run_scenario(
    space: &Space,
    scenario: &Scenario,
    actions: &BTreeMap<String, OnticAction>,
) -> Result<ScenarioOutcome, SemanticsError> {
    scenario.check()?;
    let _ = space;
    let resolved: Vec<Option<&OnticAction>> = scenario
        .actions
        .iter()
        .map(|slot| {
            slot.as_deref()
                .map(|name| {
                    actions.get(name).ok_or_else(|| SemanticsError::UnknownAction {
                        action: name.to_string(),
                    })
                })
                .transpose()
        })
        .collect::<Result<_, _>>()?;
    Ok(run_resolved(&scenario.init, &scenario.observations, &resolved))
}

/// One way to make a scenario consistent: the exogenous events inserted
/// (one entry per step, `None` where nothing was inserted) and the
/// resulting trajectory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Explanation {
    pub inserted: Vec<Option<String>>,
    pub trajectory: Vec<BinaryBelief>,
}

/// Explains a scenario by inserting exogenous events from `exo` into steps
/// that have no recorded action, at most one event per step. Returns every
/// explanation with the minimal number of insertions, in a deterministic
/// order (by step, then by the order of `exo`); an already consistent
/// scenario is its own (insertion-free) explanation.
pub fn extrapolate(
    space: &Space,
    scenario: &Scenario,
    actions: &BTreeMap<String, OnticAction>,
    exo: &[&OnticAction],
) -> Result<Vec<Explanation>, SemanticsError> {
    scenario.check()?;
    let _ = space;
    let mut resolved: Vec<Option<&OnticAction>> = scenario
        .actions
        .iter()
        .map(|slot| {
            slot.as_deref()
                .map(|name| {
                    actions.get(name).ok_or_else(|| SemanticsError::UnknownAction {
                        action: name.to_string(),
                    })
                })
                .transpose()
        })
        .collect::<Result<_, _>>()?;
    let free: Vec<usize> = (0..scenario.horizon)
        .filter(|t| resolved[*t].is_none())
        .collect();

    let mut found: Vec<Explanation> = Vec::new();
    for count in 0..=free.len() {
        for slots in combinations(&free, count) {
            let mut choice = vec![0usize; count];
            loop {
                for (i, slot) in slots.iter().enumerate() {
                    resolved[*slot] = Some(exo[choice[i]]);
                }
                if let ScenarioOutcome::Consistent { trajectory } =
                    run_resolved(&scenario.init, &scenario.observations, &resolved)
                {
                    let mut inserted = vec![None; scenario.horizon];
                    for (i, slot) in slots.iter().enumerate() {
                        inserted[*slot] = Some(exo[choice[i]].name().to_string());
                    }
                    found.push(Explanation {
                        inserted,
                        trajectory,
                    });
                }
                for slot in &slots {
                    resolved[*slot] = None;
                }
                // Next assignment of events to the chosen slots.
                let mut i = count;
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    choice[i] += 1;
                    if choice[i] < exo.len() {
                        break;
                    }
                    choice[i] = 0;
                }
                if count == 0 || (i == 0 && choice[0] == 0) {
                    break;
                }
            }
            if count == 0 && !found.is_empty() {
                break;
            }
        }
        if !found.is_empty() {
            return Ok(found);
        }
        if exo.is_empty() {
            break;
        }
    }
    Err(SemanticsError::NoExplanation)
}

/// All `count`-element subsets of `items`, each ascending, in
/// lexicographic order.
fn combinations(items: &[usize], count: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], count: usize, start: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if acc.len() == count {
            out.push(acc.clone());
            return;
        }
        for i in start..items.len() {
            acc.push(items[i]);
            go(items, count, i + 1, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(items, count, 0, &mut Vec::new(), &mut out);
    out
}
