//! Enumerated transition-system semantics: finite boolean state spaces,
//! set-valued and probabilistic beliefs, and actions given extensionally
//! as relations, stochastic matrices, or observation models.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::logic::{self, Formula};

mod ops;
mod scenario;

pub use ops::{
    abduce, compatible_states, filter, filter_prob, progress, progress_epistemic_offline,
    progress_prob, progress_set, regress_strong, regress_weak,
};
pub use scenario::{extrapolate, run_scenario, Explanation, Scenario, ScenarioOutcome};

/// Hard cap on the number of fluents in a state space. Everything in this
/// module enumerates states, so spaces beyond this size are rejected
/// outright instead of failing slowly.
pub const MAX_FLUENTS: usize = 20;

/// Absolute tolerance for probability-mass checks.
pub const PROB_TOL: f64 = 1e-9;

/// Name of the null observation, present in every observation space and
/// reported by actions that sense nothing.
pub const NULL_OBS: &str = "o*";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SemanticsError {
    #[error("progression by `{action}` produced the empty belief")]
    EmptyResult { action: String },
    #[error("action `{action}` is inexecutable in state `{state}`, which carries probability mass")]
    Inexecutable { action: String, state: String },
    #[error("observation `{observation}` is inconsistent with the predicted belief")]
    Inconsistent { observation: String },
    #[error("observation `{observation}` has probability zero under the predicted belief")]
    ZeroProbabilityObservation { observation: String },
    #[error("unknown observation `{observation}`")]
    UnknownObservation { observation: String },
    #[error("unknown action `{action}`")]
    UnknownAction { action: String },
    #[error("unknown fluent `{fluent}`")]
    UnknownFluent { fluent: String },
    #[error("no insertion of exogenous events explains the scenario")]
    NoExplanation,
    #[error("state spaces are capped at {MAX_FLUENTS} fluents, got {got}")]
    SpaceTooLarge { got: usize },
    #[error("a binary belief must contain at least one state")]
    EmptyBelief,
    #[error("invalid distribution: {reason}")]
    InvalidDistribution { reason: String },
    #[error("invalid model: {reason}")]
    InvalidModel { reason: String },
    #[error("action `{action}` has no probabilistic observation model")]
    MissingProbModel { action: String },
    #[error("invalid scenario: {reason}")]
    InvalidScenario { reason: String },
}

impl SemanticsError {
    /// Stable machine-readable tag for this error.
    pub fn kind(&self) -> &'static str {
        match self {
            SemanticsError::EmptyResult { .. } => "EmptyResult",
            SemanticsError::Inexecutable { .. } => "Inexecutable",
            SemanticsError::Inconsistent { .. } => "Inconsistent",
            SemanticsError::ZeroProbabilityObservation { .. } => "ZeroProbabilityObservation",
            SemanticsError::UnknownObservation { .. } => "UnknownObservation",
            SemanticsError::UnknownAction { .. } => "UnknownAction",
            SemanticsError::UnknownFluent { .. } => "UnknownFluent",
            SemanticsError::NoExplanation => "NoExplanation",
            SemanticsError::SpaceTooLarge { .. } => "SpaceTooLarge",
            SemanticsError::EmptyBelief => "EmptyBelief",
            SemanticsError::InvalidDistribution { .. } => "InvalidDistribution",
            SemanticsError::InvalidModel { .. } => "InvalidModel",
            SemanticsError::MissingProbModel { .. } => "MissingProbModel",
            SemanticsError::InvalidScenario { .. } => "InvalidScenario",
        }
    }
}

/// A state: one truth value per declared fluent, encoded as a bit mask
/// using the convention of [`logic::mask_bit`]. Numeric order of states is
/// therefore the canonical order: lexicographic over the declared fluent
/// order with `false` before `true`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State(pub u32);

/// A finite state space: an ordered list of distinct fluent names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Space {
    fluents: Vec<String>,
}

impl Space {
    pub fn new(fluents: Vec<String>) -> Result<Self, SemanticsError> {
        if fluents.len() > MAX_FLUENTS {
            return Err(SemanticsError::SpaceTooLarge { got: fluents.len() });
        }
        let mut seen = BTreeSet::new();
        for f in &fluents {
            if !seen.insert(f.clone()) {
                return Err(SemanticsError::InvalidModel {
                    reason: format!("duplicate fluent `{f}`"),
                });
            }
        }
        Ok(Space { fluents })
    }

    pub fn parse(names: &str) -> Result<Self, SemanticsError> {
        Space::new(names.split_whitespace().map(str::to_string).collect())
    }

    pub fn len(&self) -> usize {
        self.fluents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fluents.is_empty()
    }

    pub fn fluents(&self) -> &[String] {
        &self.fluents
    }

    pub fn index(&self, fluent: &str) -> Result<usize, SemanticsError> {
        self.fluents
            .iter()
            .position(|f| f == fluent)
            .ok_or_else(|| SemanticsError::UnknownFluent {
                fluent: fluent.to_string(),
            })
    }

    pub fn num_states(&self) -> usize {
        1usize << self.fluents.len()
    }

    /// All states in canonical order.
    pub fn states(&self) -> impl Iterator<Item = State> {
        (0..self.num_states() as u32).map(State)
    }

    pub fn value(&self, s: State, fluent_index: usize) -> bool {
        logic::mask_value(s.0, self.fluents.len(), fluent_index)
    }

    pub fn with_value(&self, s: State, fluent_index: usize, value: bool) -> State {
        let bit = logic::mask_bit(self.fluents.len(), fluent_index);
        if value {
            State(s.0 | bit)
        } else {
            State(s.0 & !bit)
        }
    }

    /// The state in which exactly the named fluents hold.
    pub fn state_where(&self, true_fluents: &[&str]) -> Result<State, SemanticsError> {
        let mut s = State(0);
        for f in true_fluents {
            let i = self.index(f)?;
            s = self.with_value(s, i, true);
        }
        Ok(s)
    }

    /// Renders a state as a conjunction of literals in declared order.
    pub fn format_state(&self, s: State) -> String {
        if self.fluents.is_empty() {
            return "true".to_string();
        }
        self.fluents
            .iter()
            .enumerate()
            .map(|(i, f)| {
                if self.value(s, i) {
                    f.clone()
                } else {
                    format!("-{f}")
                }
            })
            .collect::<Vec<_>>()
            .join(" & ")
    }

    /// Checks that every atom of `f` is a declared fluent.
    pub fn check_formula(&self, f: &Formula<String>) -> Result<(), SemanticsError> {
        for a in f.atoms() {
            self.index(&a)?;
        }
        Ok(())
    }

    /// The states satisfying a formula over the declared fluents.
    pub fn models(&self, f: &Formula<String>) -> Result<BTreeSet<State>, SemanticsError> {
        self.check_formula(f)?;
        Ok(self
            .states()
            .filter(|s| logic::holds_in(f, &self.fluents, s.0))
            .collect())
    }

    /// Canonical DNF of a set of states over the declared fluents.
    pub fn to_dnf(&self, states: &BTreeSet<State>) -> Formula<String> {
        let masks: Vec<u32> = states.iter().map(|s| s.0).collect();
        logic::canonical_dnf(&masks, &self.fluents)
    }
}

/// A nonempty set of states: everything the agent considers possible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryBelief {
    states: BTreeSet<State>,
}

impl BinaryBelief {
    pub fn new(states: BTreeSet<State>) -> Result<Self, SemanticsError> {
        if states.is_empty() {
            return Err(SemanticsError::EmptyBelief);
        }
        Ok(BinaryBelief { states })
    }

    pub fn singleton(s: State) -> Self {
        BinaryBelief {
            states: BTreeSet::from([s]),
        }
    }

    /// The belief satisfying a formula; errors if the formula has no models.
    pub fn from_formula(space: &Space, f: &Formula<String>) -> Result<Self, SemanticsError> {
        BinaryBelief::new(space.models(f)?)
    }

    pub fn states(&self) -> &BTreeSet<State> {
        &self.states
    }

    pub fn contains(&self, s: State) -> bool {
        self.states.contains(&s)
    }

    pub fn is_subset(&self, other: &BinaryBelief) -> bool {
        self.states.is_subset(&other.states)
    }
}

/// A probability distribution over the states of a space, dense by state
/// id. Entries are nonnegative and sum to one within [`PROB_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProbBelief {
    mass: Vec<f64>,
}

impl ProbBelief {
    pub fn new(space: &Space, mass: Vec<f64>) -> Result<Self, SemanticsError> {
        if mass.len() != space.num_states() {
            return Err(SemanticsError::InvalidDistribution {
                reason: format!(
                    "expected {} entries, got {}",
                    space.num_states(),
                    mass.len()
                ),
            });
        }
        if let Some(p) = mass.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(SemanticsError::InvalidDistribution {
                reason: format!("negative or non-finite mass {p}"),
            });
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(SemanticsError::InvalidDistribution {
                reason: format!("total mass {total} is not 1"),
            });
        }
        Ok(ProbBelief { mass })
    }

    pub fn from_weights(
        space: &Space,
        weights: &BTreeMap<State, f64>,
    ) -> Result<Self, SemanticsError> {
        let mut mass = vec![0.0; space.num_states()];
        for (s, w) in weights {
            let slot = mass
                .get_mut(s.0 as usize)
                .ok_or_else(|| SemanticsError::InvalidDistribution {
                    reason: format!("state id {} outside the space", s.0),
                })?;
            *slot += w;
        }
        ProbBelief::new(space, mass)
    }

    pub fn point(space: &Space, s: State) -> Self {
        let mut mass = vec![0.0; space.num_states()];
        mass[s.0 as usize] = 1.0;
        ProbBelief { mass }
    }

    pub fn mass(&self, s: State) -> f64 {
        self.mass[s.0 as usize]
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    /// States with strictly positive mass. Exact for the nonnegative
    /// arithmetic used throughout: mass is zero only when every
    /// contributing product is zero.
    pub fn support(&self) -> BTreeSet<State> {
        self.mass
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(i, _)| State(i as u32))
            .collect()
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }
}

/// An action given as a transition relation: for every state, the set of
/// possible successors. An empty successor set means the action is
/// inexecutable in that state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OnticAction {
    name: String,
    rel: Vec<BTreeSet<State>>,
}

impl OnticAction {
    pub fn new(
        name: impl Into<String>,
        space: &Space,
        rel: Vec<BTreeSet<State>>,
    ) -> Result<Self, SemanticsError> {
        let name = name.into();
        if rel.len() != space.num_states() {
            return Err(SemanticsError::InvalidModel {
                reason: format!(
                    "action `{name}`: expected {} successor sets, got {}",
                    space.num_states(),
                    rel.len()
                ),
            });
        }
        for (i, succ) in rel.iter().enumerate() {
            if let Some(t) = succ.iter().find(|t| t.0 as usize >= space.num_states()) {
                return Err(SemanticsError::InvalidModel {
                    reason: format!(
                        "action `{name}`: successor id {} of state {} outside the space",
                        t.0, i
                    ),
                });
            }
        }
        Ok(OnticAction { name, rel })
    }

    pub fn from_fn(
        name: impl Into<String>,
        space: &Space,
        mut f: impl FnMut(State) -> BTreeSet<State>,
    ) -> Result<Self, SemanticsError> {
        let rel = space.states().map(&mut f).collect();
        OnticAction::new(name, space, rel)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn successors(&self, s: State) -> &BTreeSet<State> {
        &self.rel[s.0 as usize]
    }

    pub fn is_executable(&self, s: State) -> bool {
        !self.rel[s.0 as usize].is_empty()
    }

    /// Deterministic means at most one successor everywhere; states where
    /// the action is inexecutable are allowed.
    pub fn is_deterministic(&self) -> bool {
        self.rel.iter().all(|succ| succ.len() <= 1)
    }

    /// The reciprocal relation: t is a successor of s under the inverse
    /// exactly when s is a successor of t under this action.
    pub fn inverse(&self, space: &Space) -> OnticAction {
        let mut rel: Vec<BTreeSet<State>> = vec![BTreeSet::new(); space.num_states()];
        for s in space.states() {
            for t in &self.rel[s.0 as usize] {
                rel[t.0 as usize].insert(s);
            }
        }
        OnticAction {
            name: format!("{}^-1", self.name),
            rel,
        }
    }
}

/// An action given as a stochastic matrix with sparse rows. A state with no
/// row is one where the action is inexecutable; present rows are
/// distributions over successor states.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticAction {
    name: String,
    rows: Vec<Option<Vec<(State, f64)>>>,
}

impl StochasticAction {
    pub fn new(
        name: impl Into<String>,
        space: &Space,
        rows: Vec<Option<Vec<(State, f64)>>>,
    ) -> Result<Self, SemanticsError> {
        let name = name.into();
        if rows.len() != space.num_states() {
            return Err(SemanticsError::InvalidModel {
                reason: format!(
                    "action `{name}`: expected {} rows, got {}",
                    space.num_states(),
                    rows.len()
                ),
            });
        }
        let mut rows = rows;
        for (i, row) in rows.iter_mut().enumerate() {
            if let Some(entries) = row {
                let mut total = 0.0;
                for (t, p) in entries.iter() {
                    if t.0 as usize >= space.num_states() {
                        return Err(SemanticsError::InvalidModel {
                            reason: format!(
                                "action `{name}`: successor id {} of state {i} outside the space",
                                t.0
                            ),
                        });
                    }
                    if !p.is_finite() || *p < 0.0 {
                        return Err(SemanticsError::InvalidDistribution {
                            reason: format!("action `{name}`: probability {p} in row {i}"),
                        });
                    }
                    total += p;
                }
                if (total - 1.0).abs() > PROB_TOL {
                    return Err(SemanticsError::InvalidDistribution {
                        reason: format!("action `{name}`: row {i} sums to {total}"),
                    });
                }
                entries.sort_by_key(|(t, _)| *t);
            }
        }
        Ok(StochasticAction { name, rows })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn row(&self, s: State) -> Option<&[(State, f64)]> {
        self.rows[s.0 as usize].as_deref()
    }

    /// The binary abstraction: successors are the states with positive
    /// transition probability.
    pub fn to_ontic(&self) -> OnticAction {
        let rel = self
            .rows
            .iter()
            .map(|row| match row {
                None => BTreeSet::new(),
                Some(entries) => entries
                    .iter()
                    .filter(|(_, p)| *p > 0.0)
                    .map(|(t, _)| *t)
                    .collect(),
            })
            .collect();
        OnticAction {
            name: self.name.clone(),
            rel,
        }
    }
}

/// A finite set of observation names, always containing [`NULL_OBS`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationSpace {
    names: Vec<String>,
}

impl ObservationSpace {
    /// Builds a space from the full name list, which must contain the null
    /// observation and no duplicates.
    pub fn new(names: Vec<String>) -> Result<Self, SemanticsError> {
        if !names.iter().any(|n| n == NULL_OBS) {
            return Err(SemanticsError::InvalidModel {
                reason: format!("observation space must contain `{NULL_OBS}`"),
            });
        }
        let mut seen = BTreeSet::new();
        for n in &names {
            if !seen.insert(n.clone()) {
                return Err(SemanticsError::InvalidModel {
                    reason: format!("duplicate observation `{n}`"),
                });
            }
        }
        Ok(ObservationSpace { names })
    }

    /// The null observation plus the given extra names.
    pub fn with_null(extra: &[&str]) -> Result<Self, SemanticsError> {
        let mut names = vec![NULL_OBS.to_string()];
        names.extend(extra.iter().map(|s| s.to_string()));
        ObservationSpace::new(names)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, name: &str) -> Result<usize, SemanticsError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| SemanticsError::UnknownObservation {
                observation: name.to_string(),
            })
    }
}

/// An action with a sensing aspect: for every state, the set of
/// observations it may produce (never empty), and optionally a likelihood
/// p(o | s) whose support is exactly the binary model.
#[derive(Debug, Clone, PartialEq)]
pub struct EpistemicAction {
    name: String,
    observations: ObservationSpace,
    binary: Vec<BTreeSet<usize>>,
    prob: Option<Vec<Vec<f64>>>,
}

impl EpistemicAction {
    pub fn new(
        name: impl Into<String>,
        space: &Space,
        observations: ObservationSpace,
        binary: Vec<BTreeSet<usize>>,
    ) -> Result<Self, SemanticsError> {
        let name = name.into();
        if binary.len() != space.num_states() {
            return Err(SemanticsError::InvalidModel {
                reason: format!(
                    "action `{name}`: expected {} observation sets, got {}",
                    space.num_states(),
                    binary.len()
                ),
            });
        }
        for (i, obs) in binary.iter().enumerate() {
            if obs.is_empty() {
                return Err(SemanticsError::InvalidModel {
                    reason: format!("action `{name}`: state {i} can produce no observation"),
                });
            }
            if let Some(o) = obs.iter().find(|o| **o >= observations.len()) {
                return Err(SemanticsError::InvalidModel {
                    reason: format!("action `{name}`: observation index {o} out of range"),
                });
            }
        }
        Ok(EpistemicAction {
            name,
            observations,
            binary,
            prob: None,
        })
    }

    /// Builds the action from a likelihood model; the binary model is its
    /// support, so the two views agree by construction.
    pub fn from_prob(
        name: impl Into<String>,
        space: &Space,
        observations: ObservationSpace,
        prob: Vec<Vec<f64>>,
    ) -> Result<Self, SemanticsError> {
        let name = name.into();
        if prob.len() != space.num_states() {
            return Err(SemanticsError::InvalidModel {
                reason: format!(
                    "action `{name}`: expected {} likelihood rows, got {}",
                    space.num_states(),
                    prob.len()
                ),
            });
        }
        let mut binary = Vec::with_capacity(prob.len());
        for (i, row) in prob.iter().enumerate() {
            if row.len() != observations.len() {
                return Err(SemanticsError::InvalidModel {
                    reason: format!(
                        "action `{name}`: likelihood row {i} has {} entries, expected {}",
                        row.len(),
                        observations.len()
                    ),
                });
            }
            let mut total = 0.0;
            for p in row {
                if !p.is_finite() || *p < 0.0 {
                    return Err(SemanticsError::InvalidDistribution {
                        reason: format!("action `{name}`: likelihood {p} in row {i}"),
                    });
                }
                total += p;
            }
            if (total - 1.0).abs() > PROB_TOL {
                return Err(SemanticsError::InvalidDistribution {
                    reason: format!("action `{name}`: likelihood row {i} sums to {total}"),
                });
            }
            let support: BTreeSet<usize> = row
                .iter()
                .enumerate()
                .filter(|(_, p)| **p > 0.0)
                .map(|(o, _)| o)
                .collect();
            if support.is_empty() {
                return Err(SemanticsError::InvalidModel {
                    reason: format!("action `{name}`: state {i} can produce no observation"),
                });
            }
            binary.push(support);
        }
        Ok(EpistemicAction {
            name,
            observations,
            binary,
            prob: Some(prob),
        })
    }

    /// The trivial sensor: every state reports the null observation.
    pub fn null(space: &Space) -> Self {
        let observations = ObservationSpace::with_null(&[]).expect("null space is valid");
        EpistemicAction {
            name: "null".to_string(),
            observations,
            binary: vec![BTreeSet::from([0]); space.num_states()],
            prob: Some(vec![vec![1.0]; space.num_states()]),
        }
    }

    /// A noiseless sensor for one fluent: states where it holds report
    /// `pos`, the others report `neg`.
    pub fn perfect_sensor(
        name: impl Into<String>,
        space: &Space,
        fluent: &str,
        pos: &str,
        neg: &str,
    ) -> Result<Self, SemanticsError> {
        let i = space.index(fluent)?;
        let observations = ObservationSpace::with_null(&[pos, neg])?;
        let prob = space
            .states()
            .map(|s| {
                if space.value(s, i) {
                    vec![0.0, 1.0, 0.0]
                } else {
                    vec![0.0, 0.0, 1.0]
                }
            })
            .collect();
        EpistemicAction::from_prob(name, space, observations, prob)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn observations(&self) -> &ObservationSpace {
        &self.observations
    }

    pub fn possible_observations(&self, s: State) -> &BTreeSet<usize> {
        &self.binary[s.0 as usize]
    }

    pub fn has_prob_model(&self) -> bool {
        self.prob.is_some()
    }

    /// Likelihood p(o | s); requires the probabilistic model.
    pub fn likelihood(&self, s: State, obs_index: usize) -> Result<f64, SemanticsError> {
        let prob = self
            .prob
            .as_ref()
            .ok_or_else(|| SemanticsError::MissingProbModel {
                action: self.name.clone(),
            })?;
        Ok(prob[s.0 as usize][obs_index])
    }
}

impl fmt::Display for State {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "s{}", self.0)
    }
}
