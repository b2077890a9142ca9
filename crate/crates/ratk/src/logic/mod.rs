//! Propositional formulas generic over the atom type.
//!
//! Atoms are plain fluent names in most of the library, timed atoms in
//! compiled action theories, and situation-tagged atoms in the situation
//! calculus module. Connectives are the usual ones; `And`/`Or` are n-ary.
//!
//! Satisfiability, validity, and equivalence are decided by enumerating
//! assignments over an explicit atom universe. That is deliberate: the
//! state spaces this library targets are capped at 20 fluents, and an
//! enumeration-based core keeps every operation exact and deterministic.

use std::collections::BTreeSet;
use std::fmt;

pub mod text;

pub use text::{parse_formula, ParseError};

/// A propositional formula over atoms of type `A`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula<A> {
    True,
    False,
    Atom(A),
    Not(Box<Formula<A>>),
    And(Vec<Formula<A>>),
    Or(Vec<Formula<A>>),
    Implies(Box<Formula<A>>, Box<Formula<A>>),
    Iff(Box<Formula<A>>, Box<Formula<A>>),
}

impl<A> Formula<A> {
    pub fn atom(a: A) -> Self {
        Formula::Atom(a)
    }

    /// A literal: the atom itself or its negation.
    pub fn lit(a: A, positive: bool) -> Self {
        if positive {
            Formula::Atom(a)
        } else {
            Formula::Not(Box::new(Formula::Atom(a)))
        }
    }

    pub fn not(f: Formula<A>) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula<A>, b: Formula<A>) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula<A>, b: Formula<A>) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    /// Conjunction of `parts`; the empty conjunction is `True`.
    pub fn conj(parts: Vec<Formula<A>>) -> Self {
        match parts.len() {
            0 => Formula::True,
            1 => parts.into_iter().next().unwrap(),
            _ => Formula::And(parts),
        }
    }

    /// Disjunction of `parts`; the empty disjunction is `False`.
    pub fn disj(parts: Vec<Formula<A>>) -> Self {
        match parts.len() {
            0 => Formula::False,
            1 => parts.into_iter().next().unwrap(),
            _ => Formula::Or(parts),
        }
    }

    /// Evaluates under a truth assignment for atoms.
    pub fn eval(&self, assign: &mut impl FnMut(&A) -> bool) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(a) => assign(a),
            Formula::Not(f) => !f.eval(assign),
            Formula::And(fs) => fs.iter().all(|f| f.eval(assign)),
            Formula::Or(fs) => fs.iter().any(|f| f.eval(assign)),
            Formula::Implies(a, b) => !a.eval(assign) || b.eval(assign),
            Formula::Iff(a, b) => a.eval(assign) == b.eval(assign),
        }
    }

    /// Replaces every atom by a formula over a possibly different atom type.
    pub fn map_atoms<B>(&self, f: &mut impl FnMut(&A) -> Formula<B>) -> Formula<B> {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => f(a),
            Formula::Not(g) => Formula::not(g.map_atoms(f)),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.map_atoms(f), b.map_atoms(f)),
            Formula::Iff(a, b) => Formula::iff(a.map_atoms(f), b.map_atoms(f)),
        }
    }

    pub fn collect_atoms(&self, out: &mut BTreeSet<A>)
    where
        A: Clone + Ord,
    {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Not(f) => f.collect_atoms(out),
            Formula::And(fs) | Formula::Or(fs) => {
                for f in fs {
                    f.collect_atoms(out);
                }
            }
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    pub fn atoms(&self) -> BTreeSet<A>
    where
        A: Clone + Ord,
    {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    /// Substitutes a constant for one atom.
    pub fn assign(&self, atom: &A, value: bool) -> Formula<A>
    where
        A: Clone + Eq,
    {
        self.map_atoms(&mut |a| {
            if a == atom {
                if value {
                    Formula::True
                } else {
                    Formula::False
                }
            } else {
                Formula::Atom(a.clone())
            }
        })
    }

    /// Bottom-up simplification with a fixed rewrite set: constant folding,
    /// double negation, flattening of nested `And`/`Or`, and idempotence
    /// (duplicate conjuncts/disjuncts are dropped). Semantics-preserving;
    /// never reorders subformulas.
    ///
    /// After simplification, `True`/`False` occur only as the whole formula.
    pub fn simplify(&self) -> Formula<A>
    where
        A: Clone + Eq,
    {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => Formula::Atom(a.clone()),
            Formula::Not(f) => match f.simplify() {
                Formula::True => Formula::False,
                Formula::False => Formula::True,
                Formula::Not(inner) => *inner,
                g => Formula::not(g),
            },
            Formula::And(fs) => {
                let mut parts: Vec<Formula<A>> = Vec::new();
                for f in fs {
                    match f.simplify() {
                        Formula::True => {}
                        Formula::False => return Formula::False,
                        Formula::And(inner) => {
                            for g in inner {
                                if !parts.contains(&g) {
                                    parts.push(g);
                                }
                            }
                        }
                        g => {
                            if !parts.contains(&g) {
                                parts.push(g);
                            }
                        }
                    }
                }
                Formula::conj(parts)
            }
            Formula::Or(fs) => {
                let mut parts: Vec<Formula<A>> = Vec::new();
                for f in fs {
                    match f.simplify() {
                        Formula::False => {}
                        Formula::True => return Formula::True,
                        Formula::Or(inner) => {
                            for g in inner {
                                if !parts.contains(&g) {
                                    parts.push(g);
                                }
                            }
                        }
                        g => {
                            if !parts.contains(&g) {
                                parts.push(g);
                            }
                        }
                    }
                }
                Formula::disj(parts)
            }
            Formula::Implies(a, b) => match (a.simplify(), b.simplify()) {
                (Formula::False, _) => Formula::True,
                (Formula::True, g) => g,
                (_, Formula::True) => Formula::True,
                (f, Formula::False) => Formula::not(f).simplify(),
                (f, g) => Formula::implies(f, g),
            },
            Formula::Iff(a, b) => match (a.simplify(), b.simplify()) {
                (Formula::True, g) => g,
                (g, Formula::True) => g,
                (Formula::False, g) => Formula::not(g).simplify(),
                (g, Formula::False) => Formula::not(g).simplify(),
                (f, g) => {
                    if f == g {
                        Formula::True
                    } else {
                        Formula::iff(f, g)
                    }
                }
            },
        }
    }

    /// Forgets (existentially projects out) the given atoms by Shannon
    /// expansion: `forget(f, v) = f[v:=true] | f[v:=false]`, folded over
    /// `vars` with simplification after each step.
    ///
    /// The result mentions none of `vars`, is entailed by `self`, and has
    /// exactly the models obtainable from models of `self` by reassigning
    /// the forgotten atoms freely.
    pub fn forget(&self, vars: &BTreeSet<A>) -> Formula<A>
    where
        A: Clone + Ord,
    {
        let mut f = self.simplify();
        for v in vars {
            if !f.atoms().contains(v) {
                continue;
            }
            f = Formula::Or(vec![f.assign(v, true), f.assign(v, false)]).simplify();
        }
        f
    }
}

/// An assignment to `universe` encoded as a bit mask. Atom `universe[i]`
/// holds iff bit `universe.len() - 1 - i` is set, so that the numeric order
/// of masks is the lexicographic order over the universe with `false`
/// before `true` and the first atom most significant.
pub type AssignmentMask = u32;

pub fn mask_bit(universe_len: usize, index: usize) -> AssignmentMask {
    debug_assert!(index < universe_len);
    1 << (universe_len - 1 - index)
}

pub fn mask_value(mask: AssignmentMask, universe_len: usize, index: usize) -> bool {
    mask & mask_bit(universe_len, index) != 0
}

/// Evaluates `f` under the assignment encoded by `mask` over `universe`.
pub fn holds_in<A: Ord>(f: &Formula<A>, universe: &[A], mask: AssignmentMask) -> bool {
    f.eval(&mut |a| {
        let i = universe
            .iter()
            .position(|u| u == a)
            .expect("atom outside universe");
        mask_value(mask, universe.len(), i)
    })
}

/// All satisfying assignments of `f` over `universe`, in increasing mask
/// order. The universe must cover every atom of `f` and hold at most 20
/// entries.
pub fn models_of<A: Ord>(f: &Formula<A>, universe: &[A]) -> Vec<AssignmentMask> {
    assert!(universe.len() <= 20, "model enumeration capped at 20 atoms");
    let n = universe.len() as u32;
    (0..(1u32 << n)).filter(|&m| holds_in(f, universe, m)).collect()
}

pub fn is_satisfiable<A: Ord>(f: &Formula<A>, universe: &[A]) -> bool {
    let n = universe.len() as u32;
    (0..(1u32 << n)).any(|m| holds_in(f, universe, m))
}

pub fn is_valid<A: Ord>(f: &Formula<A>, universe: &[A]) -> bool {
    let n = universe.len() as u32;
    (0..(1u32 << n)).all(|m| holds_in(f, universe, m))
}

/// Semantic equivalence over a shared universe.
pub fn equivalent<A: Ord>(f: &Formula<A>, g: &Formula<A>, universe: &[A]) -> bool {
    let n = universe.len() as u32;
    (0..(1u32 << n)).all(|m| holds_in(f, universe, m) == holds_in(g, universe, m))
}

/// Canonical disjunctive normal form for a set of assignments: one full
/// conjunct per model, atoms in universe order, models in increasing mask
/// order. Empty input yields `False`; the full set yields `True`.
pub fn canonical_dnf<A: Clone + Ord>(models: &[AssignmentMask], universe: &[A]) -> Formula<A> {
    let n = universe.len();
    if models.len() == (1usize << n) {
        return Formula::True;
    }
    let mut sorted: Vec<AssignmentMask> = models.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    Formula::disj(
        sorted
            .into_iter()
            .map(|m| {
                Formula::conj(
                    universe
                        .iter()
                        .enumerate()
                        .map(|(i, a)| Formula::lit(a.clone(), mask_value(m, n, i)))
                        .collect(),
                )
            })
            .collect(),
    )
}

/// Operator precedence for display; higher binds tighter.
fn prec<A>(f: &Formula<A>) -> u8 {
    match f {
        Formula::Iff(_, _) => 1,
        Formula::Implies(_, _) => 2,
        Formula::Or(_) => 3,
        Formula::And(_) => 4,
        _ => 5,
    }
}

fn fmt_at<A: fmt::Display>(f: &Formula<A>, ctx: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let p = prec(f);
    let parens = p < ctx;
    if parens {
        write!(out, "(")?;
    }
    match f {
        Formula::True => write!(out, "true")?,
        Formula::False => write!(out, "false")?,
        Formula::Atom(a) => write!(out, "{a}")?,
        Formula::Not(g) => {
            write!(out, "-")?;
            fmt_at(g, 5, out)?;
        }
        Formula::And(gs) => {
            for (i, g) in gs.iter().enumerate() {
                if i > 0 {
                    write!(out, " & ")?;
                }
                fmt_at(g, p + 1, out)?;
            }
        }
        Formula::Or(gs) => {
            for (i, g) in gs.iter().enumerate() {
                if i > 0 {
                    write!(out, " | ")?;
                }
                fmt_at(g, p + 1, out)?;
            }
        }
        Formula::Implies(a, b) => {
            fmt_at(a, p + 1, out)?;
            write!(out, " -> ")?;
            fmt_at(b, p, out)?;
        }
        Formula::Iff(a, b) => {
            fmt_at(a, p + 1, out)?;
            write!(out, " <-> ")?;
            fmt_at(b, p, out)?;
        }
    }
    if parens {
        write!(out, ")")?;
    }
    Ok(())
}

impl<A: fmt::Display> fmt::Display for Formula<A> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_at(self, 0, out)
    }
}
