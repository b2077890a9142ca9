//! Belief update: minimal-change operators over finite vocabularies,
//! the U1..U9 rationality postulates, and the correspondence between
//! operators and families of faithful preorders.
//!
//! An update operator maps a belief base and a formula describing how
//! the world evolved to a new base. The operators here are pointwise:
//! each model of the base moves to its own set of nearest models of the
//! input, and the results are unioned.
//!
//! * `update_pma` ranks candidates by inclusion of the set of fluents
//!   whose value changed.
//! * `update_cardinality` ranks them by the number of changed fluents.
//!   The literature attributes counting-based update to Forbus without
//!   spelling the operator out; this Hamming-distance reading is a
//!   reconstruction, not a citation.
//! * `update_dependence` does no minimization at all: it forgets the
//!   variables the input is about and conjoins the input.
//!
//! All operators take the vocabulary explicitly and emit canonical
//! disjunctive normal form, so equal inputs give byte-equal outputs.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::logic::{canonical_dnf, models_of, AssignmentMask, Formula};

mod check;

pub use check::{
    check_postulates, preorders_of, CheckMode, PostulateEntry, PostulateReport, PreorderOutcome,
    PreorderWitness,
};

/// Vocabulary size cap for the preorder machinery (states are
/// enumerated, and relations are stored per base state).
pub const FAMILY_LIMIT: usize = 3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum UpdateError {
    #[error("preorder families are capped at {FAMILY_LIMIT} fluents, got {got}")]
    SizeLimit { got: usize },
    #[error("invalid preorder family: {reason}")]
    InvalidFamily { reason: String },
}

impl UpdateError {
    pub fn kind(&self) -> &'static str {
        match self {
            UpdateError::SizeLimit { .. } => "SizeLimit",
            UpdateError::InvalidFamily { .. } => "InvalidFamily",
        }
    }
}

/// What an agent believes, as a single formula. No consistency is
/// required: updating an unsatisfiable base yields an unsatisfiable
/// base, a convention the postulates do not constrain.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefBase {
    pub formula: Formula<String>,
}

impl BeliefBase {
    pub fn new(formula: Formula<String>) -> Self {
        BeliefBase { formula }
    }
}

impl fmt::Display for BeliefBase {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "{}", self.formula)
    }
}

pub(crate) fn models_set(f: &Formula<String>, universe: &[String]) -> BTreeSet<AssignmentMask> {
    models_of(f, universe).into_iter().collect()
}

pub(crate) fn form_of(models: &BTreeSet<AssignmentMask>, universe: &[String]) -> Formula<String> {
    let sorted: Vec<AssignmentMask> = models.iter().copied().collect();
    canonical_dnf(&sorted, universe)
}

/// Per-model update selecting the input models whose set of changed
/// fluents is inclusion-minimal.
pub fn update_pma(k: &BeliefBase, phi: &Formula<String>, universe: &[String]) -> BeliefBase {
    let km = models_set(&k.formula, universe);
    let pm = models_set(phi, universe);
    let mut out = BTreeSet::new();
    for &w in &km {
        for &v in &pm {
            let dv = v ^ w;
            let minimal = pm.iter().all(|&u| {
                let du = u ^ w;
                du & dv != du || du == dv
            });
            if minimal {
                out.insert(v);
            }
        }
    }
    BeliefBase::new(form_of(&out, universe))
}

/// Per-model update selecting the input models changing the fewest
/// fluents (Hamming distance). A reconstruction of counting-based
/// update; see the module docs.
pub fn update_cardinality(k: &BeliefBase, phi: &Formula<String>, universe: &[String]) -> BeliefBase {
    let km = models_set(&k.formula, universe);
    let pm = models_set(phi, universe);
    let mut out = BTreeSet::new();
    for &w in &km {
        let best = pm.iter().map(|&v| (v ^ w).count_ones()).min();
        if let Some(best) = best {
            out.extend(pm.iter().filter(|&&v| (v ^ w).count_ones() == best));
        }
    }
    BeliefBase::new(form_of(&out, universe))
}

/// The fluents an input formula is about: its occurring variables.
pub fn default_dependence(phi: &Formula<String>) -> BTreeSet<String> {
    phi.atoms()
}

/// Dependence-based update: forget everything the input is about, then
/// conjoin the input. Consequences of the base over the remaining
/// variables persist untouched; no distance between states is involved.
pub fn update_dependence(
    k: &BeliefBase,
    phi: &Formula<String>,
    dep: &BTreeSet<String>,
    universe: &[String],
) -> BeliefBase {
    let forgotten = k.formula.forget(dep);
    let result = Formula::conj(vec![forgotten, phi.clone()]);
    BeliefBase::new(form_of(&models_set(&result, universe), universe))
}

type OpFn = dyn Fn(&BeliefBase, &Formula<String>, &[String]) -> BeliefBase + Send + Sync;

/// A named update operator, suitable for the postulate checker and the
/// command-line registry.
#[derive(Clone)]
pub struct UpdateOperator {
    name: String,
    func: Arc<OpFn>,
}

impl UpdateOperator {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(&BeliefBase, &Formula<String>, &[String]) -> BeliefBase + Send + Sync + 'static,
    ) -> Self {
        UpdateOperator {
            name: name.into(),
            func: Arc::new(f),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn apply(&self, k: &BeliefBase, phi: &Formula<String>, universe: &[String]) -> BeliefBase {
        (self.func)(k, phi, universe)
    }

    pub fn pma() -> Self {
        UpdateOperator::new("pma", update_pma)
    }

    pub fn cardinality() -> Self {
        UpdateOperator::new("card", update_cardinality)
    }

    pub fn dependence() -> Self {
        UpdateOperator::new("dep", |k, phi, universe| {
            update_dependence(k, phi, &default_dependence(phi), universe)
        })
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "pma" => Some(Self::pma()),
            "card" => Some(Self::cardinality()),
            "dep" => Some(Self::dependence()),
            _ => None,
        }
    }
}

impl fmt::Debug for UpdateOperator {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "UpdateOperator({})", self.name)
    }
}

/// For every state `w`, a preorder over states with `w` strictly first.
/// Stored densely: the vocabulary is capped at [`FAMILY_LIMIT`] fluents.
#[derive(Debug, Clone, PartialEq)]
pub struct FaithfulPreorderFamily {
    universe: Vec<String>,
    states: usize,
    // le[w][a * states + b] says a is at least as close to w as b.
    le: Vec<Vec<bool>>,
    total: bool,
}

impl FaithfulPreorderFamily {
    pub fn new(universe: Vec<String>, le: Vec<Vec<bool>>) -> Result<Self, UpdateError> {
        let n = universe.len();
        if n > FAMILY_LIMIT {
            return Err(UpdateError::SizeLimit { got: n });
        }
        let states = 1usize << n;
        if le.len() != states || le.iter().any(|r| r.len() != states * states) {
            return Err(UpdateError::InvalidFamily {
                reason: format!("expected {states} relations of {} entries", states * states),
            });
        }
        let fam = FaithfulPreorderFamily {
            universe,
            states,
            le,
            total: true,
        };
        for w in 0..states {
            for a in 0..states {
                if !fam.le_idx(w, a, a) {
                    return Err(UpdateError::InvalidFamily {
                        reason: format!("relation at state {w} is not reflexive at {a}"),
                    });
                }
                for b in 0..states {
                    for c in 0..states {
                        if fam.le_idx(w, a, b) && fam.le_idx(w, b, c) && !fam.le_idx(w, a, c) {
                            return Err(UpdateError::InvalidFamily {
                                reason: format!(
                                    "relation at state {w} is not transitive over ({a}, {b}, {c})"
                                ),
                            });
                        }
                    }
                }
            }
            for v in 0..states {
                if v != w && !(fam.le_idx(w, w, v) && !fam.le_idx(w, v, w)) {
                    return Err(UpdateError::InvalidFamily {
                        reason: format!("state {w} is not strictly closest to itself (vs {v})"),
                    });
                }
            }
        }
        let total = (0..states).all(|w| {
            (0..states).all(|a| (0..states).all(|b| fam.le_idx(w, a, b) || fam.le_idx(w, b, a)))
        });
        Ok(FaithfulPreorderFamily { total, ..fam })
    }

    fn le_idx(&self, w: usize, a: usize, b: usize) -> bool {
        self.le[w][a * self.states + b]
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn le(&self, w: AssignmentMask, a: AssignmentMask, b: AssignmentMask) -> bool {
        self.le_idx(w as usize, a as usize, b as usize)
    }

    pub fn lt(&self, w: AssignmentMask, a: AssignmentMask, b: AssignmentMask) -> bool {
        self.le(w, a, b) && !self.le(w, b, a)
    }

    /// Whether every relation in the family is total.
    pub fn is_total(&self) -> bool {
        self.total
    }

    /// The candidates no other candidate is strictly closer than.
    pub fn minimal_models(
        &self,
        w: AssignmentMask,
        candidates: &BTreeSet<AssignmentMask>,
    ) -> BTreeSet<AssignmentMask> {
        candidates
            .iter()
            .copied()
            .filter(|&v| candidates.iter().all(|&u| !self.lt(w, u, v)))
            .collect()
    }

    /// The inclusion-of-changed-fluents family: partial, and the one
    /// behind `update_pma`.
    pub fn diff_inclusion(universe: &[String]) -> Result<Self, UpdateError> {
        Self::from_le(universe, |w, a, b| {
            let da = a ^ w;
            let db = b ^ w;
            da & db == da
        })
    }

    /// The count-of-changed-fluents family: total, and the one behind
    /// `update_cardinality`.
    pub fn hamming(universe: &[String]) -> Result<Self, UpdateError> {
        Self::from_le(universe, |w, a, b| {
            (a ^ w).count_ones() <= (b ^ w).count_ones()
        })
    }

    fn from_le(
        universe: &[String],
        le: impl Fn(u32, u32, u32) -> bool,
    ) -> Result<Self, UpdateError> {
        let n = universe.len();
        if n > FAMILY_LIMIT {
            return Err(UpdateError::SizeLimit { got: n });
        }
        let states = 1usize << n;
        let relations = (0..states)
            .map(|w| {
                let mut row = vec![false; states * states];
                for a in 0..states {
                    for b in 0..states {
                        row[a * states + b] = le(w as u32, a as u32, b as u32);
                    }
                }
                row
            })
            .collect();
        Self::new(universe.to_vec(), relations)
    }
}

/// The operator a family induces: each base model keeps the minimal
/// input models of its own preorder, and the results are unioned. On a
/// total family the minimal models form the unique lowest tier; on a
/// partial one they are the unbeaten candidates, which is what makes
/// the inclusion family reproduce `update_pma`.
pub fn operator_of(fam: &FaithfulPreorderFamily) -> UpdateOperator {
    let fam = fam.clone();
    UpdateOperator::new("induced", move |k, phi, universe| {
        assert_eq!(
            universe,
            fam.universe(),
            "the induced operator is tied to its family's vocabulary"
        );
        let km = models_set(&k.formula, universe);
        let pm = models_set(phi, universe);
        let mut out = BTreeSet::new();
        for &w in &km {
            out.extend(fam.minimal_models(w, &pm));
        }
        BeliefBase::new(form_of(&out, universe))
    })
}
