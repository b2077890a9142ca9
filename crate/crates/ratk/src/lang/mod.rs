//! A propositional action language: causal rules with inertia, static
//! laws, disjunctive effects, and STRIPS-style operators, compiled to
//! two-slice transition formulas.

use std::collections::BTreeMap;
use std::fmt;

use crate::logic::{Formula, ParseError};
use crate::semantics::{SemanticsError, Space};

mod compile;
mod parse;
mod strips;
mod symbolic;

pub use compile::{compile, detect_inconsistent_rules, enumerate_transitions};
pub use parse::parse_domain;
pub use strips::strips_progress;
pub use symbolic::{forget, progress_formula, regress_strong_formula, regress_weak_formula};

/// Fluent count above which transition relations are not enumerated.
pub const ENUM_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LangError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("line {line}, column {col}: undeclared fluent `{fluent}`")]
    UndeclaredFluent { fluent: String, line: u32, col: u32 },
    #[error("line {line}, column {col}: undeclared action `{action}`")]
    UndeclaredAction { action: String, line: u32, col: u32 },
    #[error("line {line}, column {col}: derived fluent `{fluent}` cannot appear in effect position")]
    DerivedEffect { fluent: String, line: u32, col: u32 },
    #[error("unknown action `{action}`")]
    UnknownAction { action: String },
    #[error("formula mentions `{fluent}`, which is not a fluent of the domain")]
    UnknownFluent { fluent: String },
    #[error("action `{action}` is inexecutable everywhere in the given belief")]
    Inexecutable { action: String },
    #[error("precondition of `{action}` fails in state `{state}`: {reason}")]
    PreconditionFailure {
        action: String,
        state: String,
        reason: String,
    },
    #[error("progression of `{action}` is undefined in state `{state}`: rules derive both `{fluent}` and its complement")]
    UndefinedProgression {
        action: String,
        state: String,
        fluent: String,
    },
    #[error("static laws leave the derived fluents underdetermined over `{state}`: {count} completions")]
    IncompleteLaws { state: String, count: usize },
    #[error("transition enumeration is capped at {ENUM_LIMIT} fluents, got {got}")]
    SizeLimit { got: usize },
    #[error("action `{action}` is not a STRIPS action")]
    NotStrips { action: String },
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

impl LangError {
    pub fn kind(&self) -> &'static str {
        match self {
            LangError::Syntax(_) => "SyntaxError",
            LangError::UndeclaredFluent { .. } => "UndeclaredFluent",
            LangError::UndeclaredAction { .. } => "UndeclaredAction",
            LangError::DerivedEffect { .. } => "DerivedEffect",
            LangError::UnknownAction { .. } => "UnknownAction",
            LangError::UnknownFluent { .. } => "UnknownFluent",
            LangError::Inexecutable { .. } => "Inexecutable",
            LangError::PreconditionFailure { .. } => "PreconditionFailure",
            LangError::UndefinedProgression { .. } => "UndefinedProgression",
            LangError::IncompleteLaws { .. } => "IncompleteLaws",
            LangError::SizeLimit { .. } => "SizeLimit",
            LangError::NotStrips { .. } => "NotStrips",
            LangError::Semantics(e) => e.kind(),
        }
    }
}

/// A fluent or its negation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Literal {
    pub fluent: String,
    pub positive: bool,
}

impl Literal {
    pub fn new(fluent: impl Into<String>, positive: bool) -> Self {
        Literal {
            fluent: fluent.into(),
            positive,
        }
    }

    pub fn complement(&self) -> Literal {
        Literal {
            fluent: self.fluent.clone(),
            positive: !self.positive,
        }
    }

    pub fn to_formula(&self) -> Formula<String> {
        Formula::lit(self.fluent.clone(), self.positive)
    }

    pub fn holds_in(&self, space: &Space, s: crate::semantics::State) -> bool {
        let i = space
            .index(&self.fluent)
            .expect("literal over a declared fluent");
        space.value(s, i) == self.positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(out, "{}", self.fluent)
        } else {
            write!(out, "-{}", self.fluent)
        }
    }
}

/// `if condition causes effect`: when the condition holds before the
/// action, the effect holds after it. The condition is a conjunction of
/// literals (the empty conjunction for unconditional effects). Rules are
/// directed: they are never contraposed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalRule {
    pub condition: Formula<String>,
    pub effect: Literal,
}

/// A time-independent law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StaticLaw {
    /// A formula that holds at every time point; typically an equivalence
    /// defining a derived fluent in terms of basic ones.
    Constraint(Formula<String>),
    /// A directed rule `condition causes effect` among fluents of the same
    /// time point. Participates in the causal completion like an action
    /// rule, but evaluated on the successor state; not contraposed.
    Rule {
        condition: Formula<String>,
        effect: Literal,
    },
}

/// A STRIPS-style operator: a precondition that must hold for the action to
/// be applicable and a set of conditional effect rules over basic fluents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StripsAction {
    pub precondition: Vec<Literal>,
    pub effects: Vec<CausalRule>,
}

/// How an action is defined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActionDef {
    /// One list of causal rules per nondeterministic branch; a single
    /// branch is the deterministic case, and an empty rule list is a
    /// no-op.
    Causal { branches: Vec<Vec<CausalRule>> },
    Strips(StripsAction),
}

/// A parsed action domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub basic: Vec<String>,
    pub derived: Vec<String>,
    pub actions: Vec<(String, ActionDef)>,
    pub statics: Vec<StaticLaw>,
    pub executability: BTreeMap<String, Formula<String>>,
}

impl Domain {
    /// All fluents in canonical order: basic first, then derived, each in
    /// declaration order.
    pub fn fluents(&self) -> Vec<String> {
        let mut out = self.basic.clone();
        out.extend(self.derived.iter().cloned());
        out
    }

    pub fn is_derived(&self, fluent: &str) -> bool {
        self.derived.iter().any(|f| f == fluent)
    }

    pub fn action(&self, name: &str) -> Result<&ActionDef, LangError> {
        self.actions
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, d)| d)
            .ok_or_else(|| LangError::UnknownAction {
                action: name.to_string(),
            })
    }

    /// The state space over the domain's fluents in canonical order.
    pub fn space(&self) -> Result<Space, LangError> {
        Ok(Space::new(self.fluents())?)
    }

    /// The declared executability condition, `true` when none was given.
    pub fn executability_of(&self, action: &str) -> Formula<String> {
        self.executability
            .get(action)
            .cloned()
            .unwrap_or(Formula::True)
    }

    pub fn check_formula(&self, f: &Formula<String>) -> Result<(), LangError> {
        let fluents = self.fluents();
        for a in f.atoms() {
            if !fluents.contains(&a) {
                return Err(LangError::UnknownFluent { fluent: a });
            }
        }
        Ok(())
    }
}

/// An atom of a compiled transition formula: a fluent at the current slice
/// (`f@t`) or the successor slice (`f@t1`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimedAtom {
    pub fluent: String,
    pub next: bool,
}

impl TimedAtom {
    pub fn now(fluent: impl Into<String>) -> Self {
        TimedAtom {
            fluent: fluent.into(),
            next: false,
        }
    }

    pub fn next(fluent: impl Into<String>) -> Self {
        TimedAtom {
            fluent: fluent.into(),
            next: true,
        }
    }
}

impl fmt::Display for TimedAtom {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "{}@{}", self.fluent, if self.next { "t1" } else { "t" })
    }
}

/// The compiled transition theory of one action: a formula over timed
/// atoms whose models are exactly the transitions of the action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledActionTheory {
    pub action: String,
    /// All fluents of the domain in canonical order.
    pub fluents: Vec<String>,
    pub sigma: Formula<TimedAtom>,
}

impl CompiledActionTheory {
    /// The timed universe: all `f@t` followed by all `f@t1`, in fluent
    /// order.
    pub fn timed_universe(&self) -> Vec<TimedAtom> {
        let mut out: Vec<TimedAtom> = self
            .fluents
            .iter()
            .map(|f| TimedAtom::now(f.clone()))
            .collect();
        out.extend(self.fluents.iter().map(|f| TimedAtom::next(f.clone())));
        out
    }
}

/// Splits a formula into literals if it is `true`, a literal, or a
/// conjunction of literals.
pub(crate) fn as_literal_conjunction(f: &Formula<String>) -> Option<Vec<Literal>> {
    fn one(f: &Formula<String>) -> Option<Literal> {
        match f {
            Formula::Atom(a) => Some(Literal::new(a.clone(), true)),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Atom(a) => Some(Literal::new(a.clone(), false)),
                _ => None,
            },
            _ => None,
        }
    }
    match f {
        Formula::True => Some(Vec::new()),
        Formula::And(parts) => parts.iter().map(one).collect(),
        _ => one(f).map(|l| vec![l]),
    }
}

pub(crate) fn literals_inconsistent(lits: &[Literal]) -> bool {
    lits.iter().any(|l| lits.contains(&l.complement()))
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;

    /// Two toggle switches and a derived indicator that lights up when
    /// they agree.
    pub fn toggle_domain() -> Domain {
        parse_domain(
            "fluents: U_a U_b\n\
             derived: L\n\
             action T_a { if U_a causes -U_a ; if -U_a causes U_a }\n\
             action T_b { if U_b causes -U_b ; if -U_b causes U_b }\n\
             static: (U_a & U_b | -U_a & -U_b) <-> L\n",
        )
        .unwrap()
    }

    /// Going outside, with rain spoiling unprotected clothes.
    pub fn go_out_domain() -> Domain {
        parse_domain(
            "fluents: Outside Umbrella Rain Dry\n\
             action Go-out { causes Outside }\n\
             static: Outside & -Umbrella & Rain causes -Dry\n",
        )
        .unwrap()
    }

    /// The two-fluent action with interacting rules and an unconditional
    /// effect.
    pub fn pq_domain() -> Domain {
        parse_domain(
            "fluents: p q\n\
             action flip { if p & q causes -p ; if -p & q causes p ; causes q }\n",
        )
        .unwrap()
    }
}
