//! Propositional situation calculus with successor state axioms.
//!
//! A theory declares fluents and action constants and gives one axiom per
//! fluent:
//!
//! ```text
//! P(do(x, s)) <-> gamma_P(x, s)
//! ```
//!
//! where the body `gamma_P` mixes fluent atoms (implicitly at `s`) with
//! equality atoms `x = A` over action constants. Regression rewrites a
//! formula about a future situation into one about `S0` by unfolding the
//! axioms until no `do` remains; validity after an action sequence then
//! reduces to a propositional check over the initial states. The axioms
//! also translate into assignment actions `P := phi` when they are
//! explicit, and effect laws in the style `P1 -> [A] Q` can be checked
//! for modularity: complementary effects whose preconditions overlap
//! imply a static law that was never written down.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::lang::Literal;
use crate::logic::{equivalent, is_satisfiable, is_valid, Formula, ParseError};

mod parse;

pub use parse::{
    parse_effect_laws, parse_regression_query, parse_ssa_theory, parse_validity_query,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SitcalcError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("formula mentions `{fluent}`, which is not a fluent of the theory")]
    UnknownFluent { fluent: String },
    #[error("`{action}` is not an action constant of the theory")]
    UnknownAction { action: String },
    #[error("fluent `{fluent}` has no successor state axiom")]
    MissingSsa { fluent: String },
    #[error("fluent `{fluent}` has more than one successor state axiom")]
    DuplicateSsa { fluent: String },
    #[error("`{name}` is declared both as a fluent and as an action")]
    NameClash { name: String },
    #[error(
        "the axiom for `{fluent}` is not explicit: `{action}` does not occur in its body, \
         so the instantiated body must reduce to `{fluent}` itself"
    )]
    NonExplicitSsa { fluent: String, action: String },
    #[error("state enumeration is capped at 20 fluents, got {got}")]
    SizeLimit { got: usize },
}

impl SitcalcError {
    pub fn kind(&self) -> &'static str {
        match self {
            SitcalcError::Syntax(_) => "SyntaxError",
            SitcalcError::UnknownFluent { .. } => "UnknownFluent",
            SitcalcError::UnknownAction { .. } => "UnknownAction",
            SitcalcError::MissingSsa { .. } => "MissingSsa",
            SitcalcError::DuplicateSsa { .. } => "DuplicateSsa",
            SitcalcError::NameClash { .. } => "NameClash",
            SitcalcError::NonExplicitSsa { .. } => "NonExplicitSSA",
            SitcalcError::SizeLimit { .. } => "SizeLimit",
        }
    }
}

/// A ground situation: `S0` or a finite stack of actions applied to it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum SituationTerm {
    S0,
    Do(String, Box<SituationTerm>),
}

impl SituationTerm {
    pub fn after(self, action: impl Into<String>) -> SituationTerm {
        SituationTerm::Do(action.into(), Box::new(self))
    }

    /// The situation reached from `S0` by performing the actions in order.
    pub fn sequence<S: AsRef<str>>(actions: &[S]) -> SituationTerm {
        actions
            .iter()
            .fold(SituationTerm::S0, |sit, a| sit.after(a.as_ref()))
    }

    pub fn depth(&self) -> usize {
        match self {
            SituationTerm::S0 => 0,
            SituationTerm::Do(_, rest) => 1 + rest.depth(),
        }
    }
}

impl fmt::Display for SituationTerm {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SituationTerm::S0 => write!(out, "S0"),
            SituationTerm::Do(a, rest) => write!(out, "do({a}, {rest})"),
        }
    }
}

/// An atom of an axiom body: a fluent (implicitly at the axiom's
/// situation variable) or an equality `x = A` between the action variable
/// and an action constant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum BodyAtom {
    Fluent(String),
    ActionEq(String),
}

impl fmt::Display for BodyAtom {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodyAtom::Fluent(f) => write!(out, "{f}"),
            BodyAtom::ActionEq(a) => write!(out, "x = {a}"),
        }
    }
}

/// A fluent atom evaluated at a specific situation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SituationAtom {
    pub fluent: String,
    pub sit: SituationTerm,
}

impl SituationAtom {
    pub fn at(fluent: impl Into<String>, sit: SituationTerm) -> Self {
        SituationAtom {
            fluent: fluent.into(),
            sit,
        }
    }
}

impl fmt::Display for SituationAtom {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "{}({})", self.fluent, self.sit)
    }
}

/// One successor state axiom `P(do(x, s)) <-> body`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ssa {
    pub fluent: String,
    pub body: Formula<BodyAtom>,
}

/// A complete theory: one axiom per declared fluent.
#[derive(Debug, Clone, PartialEq)]
pub struct SsaTheory {
    fluents: Vec<String>,
    actions: Vec<String>,
    bodies: BTreeMap<String, Formula<BodyAtom>>,
}

impl SsaTheory {
    pub fn new(
        fluents: Vec<String>,
        actions: Vec<String>,
        axioms: Vec<Ssa>,
    ) -> Result<Self, SitcalcError> {
        if fluents.len() > 20 {
            return Err(SitcalcError::SizeLimit { got: fluents.len() });
        }
        if let Some(name) = fluents.iter().find(|f| actions.contains(f)) {
            return Err(SitcalcError::NameClash { name: name.clone() });
        }
        let mut bodies = BTreeMap::new();
        for ax in axioms {
            if !fluents.contains(&ax.fluent) {
                return Err(SitcalcError::UnknownFluent { fluent: ax.fluent });
            }
            for atom in ax.body.atoms() {
                match atom {
                    BodyAtom::Fluent(f) if !fluents.contains(&f) => {
                        return Err(SitcalcError::UnknownFluent { fluent: f });
                    }
                    BodyAtom::ActionEq(a) if !actions.contains(&a) => {
                        return Err(SitcalcError::UnknownAction { action: a });
                    }
                    _ => {}
                }
            }
            if bodies.insert(ax.fluent.clone(), ax.body).is_some() {
                return Err(SitcalcError::DuplicateSsa { fluent: ax.fluent });
            }
        }
        if let Some(f) = fluents.iter().find(|f| !bodies.contains_key(*f)) {
            return Err(SitcalcError::MissingSsa { fluent: f.clone() });
        }
        Ok(SsaTheory {
            fluents,
            actions,
            bodies,
        })
    }

    pub fn fluents(&self) -> &[String] {
        &self.fluents
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn body(&self, fluent: &str) -> Option<&Formula<BodyAtom>> {
        self.bodies.get(fluent)
    }

    fn check_action(&self, action: &str) -> Result<(), SitcalcError> {
        if self.actions.iter().any(|a| a == action) {
            Ok(())
        } else {
            Err(SitcalcError::UnknownAction {
                action: action.to_string(),
            })
        }
    }

    fn check_fluent_formula(&self, f: &Formula<String>) -> Result<(), SitcalcError> {
        for atom in f.atoms() {
            if !self.fluents.contains(&atom) {
                return Err(SitcalcError::UnknownFluent { fluent: atom });
            }
        }
        Ok(())
    }
}

/// An action described by simultaneous assignments `P := phi`; fluents
/// without an assignment keep their value.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentAction {
    pub action: String,
    pub assignments: Vec<(String, Formula<String>)>,
}

impl fmt::Display for AssignmentAction {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "{{")?;
        for (i, (fluent, phi)) in self.assignments.iter().enumerate() {
            let sep = if i == 0 { " " } else { ", " };
            write!(out, "{sep}{fluent} := {phi}")?;
        }
        write!(out, " }}")
    }
}

/// An effect law `precondition -> [action] effect`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectLaw {
    pub precondition: Formula<String>,
    pub action: String,
    pub effect: Literal,
}

/// Substitutes the action variable by a constant: `x = action` becomes
/// true, equalities with any other constant become false (distinct
/// constants denote distinct actions), and the result is simplified.
pub fn instantiate(body: &Formula<BodyAtom>, action: &str) -> Formula<String> {
    body.map_atoms(&mut |atom| match atom {
        BodyAtom::Fluent(f) => Formula::atom(f.clone()),
        BodyAtom::ActionEq(a) if a == action => Formula::True,
        BodyAtom::ActionEq(_) => Formula::False,
    })
    .simplify()
}

fn check_situation_formula(
    th: &SsaTheory,
    phi: &Formula<SituationAtom>,
) -> Result<(), SitcalcError> {
    for atom in phi.atoms() {
        if !th.fluents.contains(&atom.fluent) {
            return Err(SitcalcError::UnknownFluent { fluent: atom.fluent });
        }
        let mut sit = &atom.sit;
        while let SituationTerm::Do(a, rest) = sit {
            th.check_action(a)?;
            sit = rest;
        }
    }
    Ok(())
}

/// One unfolding pass: every atom `P(do(A, sigma))` is replaced by the
/// axiom body for `P` with `x := A` and the fluent atoms moved to
/// `sigma`. Atoms already at `S0` are left alone.
fn regress_once(th: &SsaTheory, phi: &Formula<SituationAtom>) -> Formula<SituationAtom> {
    phi.map_atoms(&mut |atom| match &atom.sit {
        SituationTerm::S0 => Formula::atom(atom.clone()),
        SituationTerm::Do(action, rest) => {
            let body = th
                .body(&atom.fluent)
                .expect("validated before regression");
            body.map_atoms(&mut |b| match b {
                BodyAtom::Fluent(f) => {
                    Formula::atom(SituationAtom::at(f.clone(), (**rest).clone()))
                }
                BodyAtom::ActionEq(a) if a == action => Formula::True,
                BodyAtom::ActionEq(_) => Formula::False,
            })
        }
    })
}

fn max_depth(phi: &Formula<SituationAtom>) -> usize {
    phi.atoms().iter().map(|a| a.sit.depth()).max().unwrap_or(0)
}

/// Rewrites `phi` into an equivalent formula about `S0` only, by
/// unfolding axiom bodies until no `do` remains. Each pass strictly
/// lowers the deepest situation nesting, so this terminates.
pub fn regress(
    th: &SsaTheory,
    phi: &Formula<SituationAtom>,
) -> Result<Formula<SituationAtom>, SitcalcError> {
    check_situation_formula(th, phi)?;
    let mut cur = phi.simplify();
    while max_depth(&cur) > 0 {
        cur = regress_once(th, &cur).simplify();
    }
    Ok(cur)
}

/// Drops the situation argument from a formula that only mentions `S0`;
/// `None` if some atom still sits under a `do`.
pub fn strip_s0(phi: &Formula<SituationAtom>) -> Option<Formula<String>> {
    if max_depth(phi) > 0 {
        return None;
    }
    Some(phi.map_atoms(&mut |a| Formula::atom(a.fluent.clone())))
}

/// Decides whether `psi` is guaranteed after performing `actions` in
/// order from any initial state satisfying `phi0`: regresses `psi` over
/// the sequence and checks the validity of `phi0 -> regressed` by
/// enumerating initial states.
pub fn holds_after<S: AsRef<str>>(
    th: &SsaTheory,
    phi0: &Formula<String>,
    actions: &[S],
    psi: &Formula<String>,
) -> Result<bool, SitcalcError> {
    th.check_fluent_formula(phi0)?;
    th.check_fluent_formula(psi)?;
    for a in actions {
        th.check_action(a.as_ref())?;
    }
    let sit = SituationTerm::sequence(actions);
    let at_end = psi.map_atoms(&mut |f| Formula::atom(SituationAtom::at(f.clone(), sit.clone())));
    let regressed = regress(th, &at_end)?;
    let psi0 = strip_s0(&regressed).expect("regression eliminates do");
    let claim = Formula::implies(phi0.clone(), psi0);
    Ok(is_valid(&claim, &th.fluents))
}

/// Translates an action constant into assignments `P := simp(gamma_P(A))`,
/// omitting fluents the action leaves alone. Requires the axioms to be
/// explicit for `A`: when `A` does not occur in a body, the instantiated
/// body must reduce to the fluent itself, otherwise the omission would be
/// unsound and the axiom is rejected.
pub fn to_assignments(th: &SsaTheory, action: &str) -> Result<AssignmentAction, SitcalcError> {
    th.check_action(action)?;
    let mut assignments = Vec::new();
    for fluent in &th.fluents {
        let body = th.body(fluent).expect("theory is total");
        let phi = instantiate(body, action);
        let inert = equivalent(&phi, &Formula::atom(fluent.clone()), &th.fluents);
        let mentioned = body
            .atoms()
            .iter()
            .any(|a| matches!(a, BodyAtom::ActionEq(b) if b == action));
        if !mentioned && !inert {
            return Err(SitcalcError::NonExplicitSsa {
                fluent: fluent.clone(),
                action: action.to_string(),
            });
        }
        if !inert {
            assignments.push((fluent.clone(), phi));
        }
    }
    Ok(AssignmentAction {
        action: action.to_string(),
        assignments,
    })
}

/// Finds static laws implied by effect laws: for each action and each
/// pair of complementary effects, if the action can be executed while
/// both preconditions hold (given the static laws), then
/// `-(P1 & P2)` follows and is reported. Actions missing from the
/// executability map are taken to be executable everywhere. An empty
/// result means the description is modular.
pub fn modularity_check(
    laws: &[EffectLaw],
    executability: &BTreeMap<String, Formula<String>>,
    statics: &[Formula<String>],
) -> Vec<Formula<String>> {
    let mut universe = BTreeSet::new();
    for law in laws {
        law.precondition.collect_atoms(&mut universe);
        universe.insert(law.effect.fluent.clone());
    }
    for f in executability.values() {
        f.collect_atoms(&mut universe);
    }
    for f in statics {
        f.collect_atoms(&mut universe);
    }
    let universe: Vec<String> = universe.into_iter().collect();
    let background: Vec<Formula<String>> = statics.to_vec();

    let mut out: Vec<Formula<String>> = Vec::new();
    for (i, a) in laws.iter().enumerate() {
        for b in &laws[i + 1..] {
            if a.action != b.action || a.effect != b.effect.complement() {
                continue;
            }
            let exec = executability
                .get(&a.action)
                .cloned()
                .unwrap_or(Formula::True);
            let mut parts = background.clone();
            parts.push(exec);
            parts.push(a.precondition.clone());
            parts.push(b.precondition.clone());
            if !is_satisfiable(&Formula::conj(parts), &universe) {
                continue;
            }
            let implied = Formula::not(Formula::conj(vec![
                a.precondition.clone(),
                b.precondition.clone(),
            ]))
            .simplify();
            if !out.contains(&implied) {
                out.push(implied);
            }
        }
    }
    out
}
