//! Stochastic dynamics over enumerated states: exponential survival of
//! fluents, event-aware persistence, exact stepping of two-slice
//! dynamic Bayesian networks, and Markov-chain progression.
//!
//! Everything here is desk scale. Networks enumerate their joint state
//! space, so the fluent count is capped at [`DBN_LIMIT`]; stepping is
//! exact, with no factored or approximate inference.

use std::collections::BTreeSet;

use crate::logic::ParseError;
use crate::semantics::{progress_prob, ProbBelief, Space, StochasticAction, PROB_TOL};
use crate::semantics::SemanticsError;

mod text;

pub use text::parse_network;

/// Fluent cap for two-slice networks: stepping enumerates 2^n states
/// on both sides of the step.
pub const DBN_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BayesError {
    #[error("decay rate must be a nonnegative number, got {got}")]
    InvalidRate { got: f64 },
    #[error("time resolution must be a positive number, got {got}")]
    InvalidResolution { got: f64 },
    #[error("{what} must be a probability in [0, 1], got {got}")]
    InvalidProbability { what: String, got: f64 },
    #[error("node `{fluent}`: {reason}")]
    InvalidTable { fluent: String, reason: String },
    #[error("the same-slice dependencies among {} are cyclic", cycle.join(", "))]
    CyclicSlice { cycle: Vec<String> },
    #[error("two-slice networks are capped at {DBN_LIMIT} fluents, got {got}")]
    SizeLimit { got: usize },
    #[error("unknown fluent `{fluent}`")]
    UnknownFluent { fluent: String },
    #[error(transparent)]
    Syntax(#[from] ParseError),
}

impl BayesError {
    pub fn kind(&self) -> &'static str {
        match self {
            BayesError::InvalidRate { .. } => "InvalidRate",
            BayesError::InvalidResolution { .. } => "InvalidResolution",
            BayesError::InvalidProbability { .. } => "InvalidProbability",
            BayesError::InvalidTable { .. } => "InvalidTable",
            BayesError::CyclicSlice { .. } => "CyclicSlice",
            BayesError::SizeLimit { .. } => "SizeLimit",
            BayesError::UnknownFluent { .. } => "UnknownFluent",
            BayesError::Syntax(_) => "Syntax",
        }
    }
}

/// Exponential persistence of a fluent: the chance it still holds
/// after an interval, decaying at rate `lambda`. The resolution is the
/// interval covered by one network step, used when the model is turned
/// into a one-fluent network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurvivalModel {
    lambda: f64,
    resolution: f64,
}

impl SurvivalModel {
    pub fn new(lambda: f64, resolution: f64) -> Result<Self, BayesError> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(BayesError::InvalidRate { got: lambda });
        }
        if !resolution.is_finite() || resolution <= 0.0 {
            return Err(BayesError::InvalidResolution { got: resolution });
        }
        Ok(SurvivalModel { lambda, resolution })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    /// The conditional probability that a fluent true at the start of
    /// an interval of length `delta` is still true at its end.
    pub fn persistence(&self, delta: f64) -> f64 {
        (-self.lambda * delta).exp()
    }
}

/// One survival step: the chance the fluent holds now, given it held
/// with probability `p0` an interval `delta` ago. `revival` is the
/// chance it holds now despite not holding then.
pub fn survive(p0: f64, sm: &SurvivalModel, delta: f64, revival: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p0), "p0 must be a probability");
    assert!((0.0..=1.0).contains(&revival), "revival must be a probability");
    assert!(delta >= 0.0, "delta must be nonnegative");
    sm.persistence(delta) * p0 + revival * (1.0 - p0)
}

/// Chances that some event forces the fluent true, or false, during
/// one step, independently of everything else.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRates {
    p_make_true: f64,
    p_make_false: f64,
}

impl EventRates {
    pub fn new(p_make_true: f64, p_make_false: f64) -> Result<Self, BayesError> {
        for (what, got) in [("p_make_true", p_make_true), ("p_make_false", p_make_false)] {
            if !got.is_finite() || !(0.0..=1.0).contains(&got) {
                return Err(BayesError::InvalidProbability {
                    what: what.to_string(),
                    got,
                });
            }
        }
        Ok(EventRates {
            p_make_true,
            p_make_false,
        })
    }

    pub fn p_make_true(&self) -> f64 {
        self.p_make_true
    }

    pub fn p_make_false(&self) -> f64 {
        self.p_make_false
    }
}

/// Survival adjusted for events that can flip the fluent during the
/// step. One convention among several consistent with treating the
/// event chances as independent inputs: a make-false event wipes the
/// surviving mass, and a make-true event then overrides everything.
pub fn persist_with_events(p_prev: f64, er: &EventRates, sm: &SurvivalModel, delta: f64) -> f64 {
    let kept = survive(p_prev, sm, delta, 0.0);
    er.p_make_true + (1.0 - er.p_make_true) * (1.0 - er.p_make_false) * kept
}

/// Which step a parent's value is read from: the state before the step
/// or the state being produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParentSlice {
    Prev,
    Next,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parent {
    pub fluent: String,
    pub slice: ParentSlice,
}

/// One fluent's conditional probability table: `rows[r]` is the chance
/// the fluent is true after the step, where row `r` encodes the parent
/// values with the first listed parent as the highest bit.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeDef {
    pub fluent: String,
    pub parents: Vec<Parent>,
    pub rows: Vec<f64>,
}

/// A Markovian transition model: every fluent's next value depends on
/// fluents before the step and already-determined fluents after it,
/// never further back. Same-slice dependencies must be acyclic, which
/// is what makes the row products a distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSliceNetwork {
    space: Space,
    nodes: Vec<NodeDef>,
}

impl TwoSliceNetwork {
    pub fn new(nodes: Vec<NodeDef>) -> Result<Self, BayesError> {
        if nodes.len() > DBN_LIMIT {
            return Err(BayesError::SizeLimit { got: nodes.len() });
        }
        let mut names = Vec::new();
        for node in &nodes {
            if names.contains(&node.fluent) {
                return Err(BayesError::InvalidTable {
                    fluent: node.fluent.clone(),
                    reason: "defined twice".to_string(),
                });
            }
            names.push(node.fluent.clone());
        }
        for node in &nodes {
            for p in &node.parents {
                if !names.contains(&p.fluent) {
                    return Err(BayesError::UnknownFluent {
                        fluent: p.fluent.clone(),
                    });
                }
            }
            let expect = 1usize << node.parents.len();
            if node.rows.len() != expect {
                return Err(BayesError::InvalidTable {
                    fluent: node.fluent.clone(),
                    reason: format!(
                        "expected {expect} rows for {} parents, got {}",
                        node.parents.len(),
                        node.rows.len()
                    ),
                });
            }
            for &p in &node.rows {
                if !p.is_finite() || !(-PROB_TOL..=1.0 + PROB_TOL).contains(&p) {
                    return Err(BayesError::InvalidTable {
                        fluent: node.fluent.clone(),
                        reason: format!("row probability {p} outside [0, 1]"),
                    });
                }
            }
        }

        // Kahn's algorithm over the same-slice edges.
        let index_of = |name: &str| names.iter().position(|n| n == name).unwrap();
        let mut pending: BTreeSet<usize> = (0..nodes.len()).collect();
        loop {
            let ready: Vec<usize> = pending
                .iter()
                .copied()
                .filter(|&i| {
                    nodes[i].parents.iter().all(|p| {
                        p.slice == ParentSlice::Prev || !pending.contains(&index_of(&p.fluent))
                    })
                })
                .collect();
            if ready.is_empty() {
                break;
            }
            for i in ready {
                pending.remove(&i);
            }
        }
        if !pending.is_empty() {
            return Err(BayesError::CyclicSlice {
                cycle: pending.into_iter().map(|i| nodes[i].fluent.clone()).collect(),
            });
        }

        let mut nodes = nodes;
        for node in &mut nodes {
            for p in &mut node.rows {
                *p = p.clamp(0.0, 1.0);
            }
        }
        let space = Space::new(names).expect("count and duplicates checked above");
        Ok(TwoSliceNetwork { space, nodes })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn nodes(&self) -> &[NodeDef] {
        &self.nodes
    }

    /// Probability that stepping from `prev` produces exactly `next`:
    /// the product of each node's row entry.
    pub fn transition(&self, prev: crate::semantics::State, next: crate::semantics::State) -> f64 {
        let mut w = 1.0;
        for node in &self.nodes {
            let fi = self.space.index(&node.fluent).expect("own fluent");
            let mut row = 0usize;
            for p in &node.parents {
                let pi = self.space.index(&p.fluent).expect("checked at construction");
                let value = match p.slice {
                    ParentSlice::Prev => self.space.value(prev, pi),
                    ParentSlice::Next => self.space.value(next, pi),
                };
                row = (row << 1) | usize::from(value);
            }
            let p_true = node.rows[row];
            w *= if self.space.value(next, fi) {
                p_true
            } else {
                1.0 - p_true
            };
            if w == 0.0 {
                return 0.0;
            }
        }
        w
    }
}

/// Advances a distribution through one step of the network, exactly,
/// by enumerating both slices. The output is renormalized to absorb
/// rounding.
pub fn dbn_step(b: &ProbBelief, net: &TwoSliceNetwork) -> ProbBelief {
    let space = net.space();
    assert_eq!(
        b.masses().len(),
        space.num_states(),
        "the belief and the network are over different state spaces"
    );
    let mut out = vec![0.0; space.num_states()];
    for prev in space.states() {
        let pu = b.mass(prev);
        if pu == 0.0 {
            continue;
        }
        for next in space.states() {
            let w = net.transition(prev, next);
            if w > 0.0 {
                out[next.0 as usize] += pu * w;
            }
        }
    }
    let total: f64 = out.iter().sum();
    for p in &mut out {
        *p /= total;
    }
    ProbBelief::new(space, out).expect("normalized by construction")
}

/// The one-fluent network encoding a survival model: the fluent
/// persists with the model's per-step probability and revives with
/// `revival`.
pub fn survival_network(
    fluent: &str,
    sm: &SurvivalModel,
    revival: f64,
) -> Result<TwoSliceNetwork, BayesError> {
    if !revival.is_finite() || !(0.0..=1.0).contains(&revival) {
        return Err(BayesError::InvalidProbability {
            what: "revival".to_string(),
            got: revival,
        });
    }
    TwoSliceNetwork::new(vec![NodeDef {
        fluent: fluent.to_string(),
        parents: vec![Parent {
            fluent: fluent.to_string(),
            slice: ParentSlice::Prev,
        }],
        rows: vec![revival, sm.persistence(sm.resolution)],
    }])
}

/// Runs `k` steps of a Markov chain: the k-fold progression of the
/// distribution by one stochastic action.
pub fn chain_progress(
    space: &Space,
    b: &ProbBelief,
    alpha: &StochasticAction,
    k: usize,
) -> Result<ProbBelief, SemanticsError> {
    let mut b = b.clone();
    for _ in 0..k {
        b = progress_prob(space, &b, alpha)?;
    }
    Ok(b)
}
