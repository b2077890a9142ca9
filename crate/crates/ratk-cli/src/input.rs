//! Input plumbing: file loading plus the text formats the binary accepts
//! for scenarios, explicit transition matrices, and probabilistic beliefs.
//!
//! A scenario file drives the monitoring verbs:
//!
//! ```text
//! horizon: 2
//! init: Alive & -Loaded
//! do 0: load
//! observe 2: -Alive
//! ```
//!
//! `do T: A` fixes the action of step `T` (steps without one are left
//! open), `observe T: F` records an observation at time point `T`; several
//! observations at the same point are conjoined.
//!
//! A matrix file gives a stochastic transition table row by row:
//!
//! ```text
//! fluents: on standby
//! row on & -standby: on & -standby 0.1, -on & -standby 0.9
//! row -on & -standby: -on & -standby 1
//! ```
//!
//! Each row source may denote several states (they share the row); each
//! target must pin down exactly one state. States without a row are
//! inexecutable. A probabilistic belief on the command line is a list of
//! `state-formula: probability` entries separated by commas.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use ratk::logic::text::{lex, parse_name_formula_tokens, Tok, TokStream};
use ratk::logic::{parse_formula, Formula};
use ratk::semantics::{BinaryBelief, ProbBelief, Scenario, Space, State, StochasticAction};

use crate::output::CliError;

pub fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::usage("Io", format!("cannot read `{}`: {e}", path.display())))
}

pub fn formula_arg(src: &str, what: &str) -> Result<Formula<String>, CliError> {
    parse_formula(src).map_err(|e| CliError::usage("SyntaxError", format!("{what}: {e}")))
}

/// Canonical disjunctive normal form of a fluent formula: full cubes over
/// the alphabetically sorted fluents, so equal model sets print equal bytes.
pub fn canonicalize(f: &Formula<String>, fluents: &[String]) -> Result<Formula<String>, CliError> {
    let mut sorted = fluents.to_vec();
    sorted.sort();
    let space = Space::new(sorted)?;
    Ok(space.to_dnf(&space.models(f)?))
}

fn expect_step(ts: &mut TokStream<'_>, what: &str) -> Result<usize, CliError> {
    let (line, col) = ts.here();
    let x = ts.expect_num(what)?;
    if x.fract() != 0.0 || x < 0.0 || x > u32::MAX as f64 {
        return Err(CliError::usage(
            "SyntaxError",
            format!("{line}:{col}: {what} must be a nonnegative integer, got {x}"),
        ));
    }
    Ok(x as usize)
}

pub fn parse_scenario(src: &str, space: &Space) -> Result<Scenario, CliError> {
    let toks = lex(src, 1)?;
    let mut ts = TokStream::new(&toks);
    let mut horizon: Option<usize> = None;
    let mut init: Option<Formula<String>> = None;
    let mut steps: Vec<(usize, String)> = Vec::new();
    let mut observed: Vec<(usize, Formula<String>)> = Vec::new();
    while !ts.at_end() {
        if ts.eat_keyword("horizon") {
            ts.expect(&Tok::Colon)?;
            let n = expect_step(&mut ts, "the horizon")?;
            if horizon.replace(n).is_some() {
                return Err(CliError::usage(
                    "SyntaxError",
                    "the scenario declares `horizon:` twice",
                ));
            }
        } else if ts.eat_keyword("init") {
            ts.expect(&Tok::Colon)?;
            let f = parse_name_formula_tokens(&mut ts)?;
            if init.replace(f).is_some() {
                return Err(CliError::usage(
                    "SyntaxError",
                    "the scenario declares `init:` twice",
                ));
            }
        } else if ts.eat_keyword("do") {
            let t = expect_step(&mut ts, "a step index")?;
            ts.expect(&Tok::Colon)?;
            steps.push((t, ts.expect_ident("an action name")?));
        } else if ts.eat_keyword("observe") {
            let t = expect_step(&mut ts, "a time point")?;
            ts.expect(&Tok::Colon)?;
            observed.push((t, parse_name_formula_tokens(&mut ts)?));
        } else {
            return Err(ts
                .error("expected `horizon`, `init`, `do`, or `observe`".to_string())
                .into());
        }
    }
    let horizon = horizon.ok_or_else(|| {
        CliError::usage("SyntaxError", "the scenario is missing a `horizon:` line")
    })?;
    let init =
        init.ok_or_else(|| CliError::usage("SyntaxError", "the scenario is missing an `init:` line"))?;

    let mut actions: Vec<Option<String>> = vec![None; horizon];
    for (t, a) in steps {
        if t >= horizon {
            return Err(CliError::usage(
                "SyntaxError",
                format!("`do {t}` is outside the horizon of {horizon} steps"),
            ));
        }
        if let Some(prev) = actions[t].replace(a) {
            return Err(CliError::usage(
                "SyntaxError",
                format!("step {t} has two actions (`{prev}` came first)"),
            ));
        }
    }
    let mut observations: Vec<Option<BTreeSet<State>>> = vec![None; horizon + 1];
    for (t, f) in observed {
        if t > horizon {
            return Err(CliError::usage(
                "SyntaxError",
                format!("`observe {t}` is past the horizon of {horizon} steps"),
            ));
        }
        let states = space.models(&f)?;
        observations[t] = Some(match observations[t].take() {
            Some(prev) => prev.intersection(&states).copied().collect(),
            None => states,
        });
    }
    Ok(Scenario {
        horizon,
        init: BinaryBelief::from_formula(space, &init)?,
        actions,
        observations,
    })
}

/// The single state a formula denotes, or an input error naming `what`.
pub fn single_state(space: &Space, f: &Formula<String>, what: &str) -> Result<State, CliError> {
    let models = space.models(f)?;
    if models.len() != 1 {
        return Err(CliError::usage(
            "AmbiguousState",
            format!("{what} `{f}` must denote exactly one state, denotes {}", models.len()),
        ));
    }
    Ok(*models.iter().next().expect("checked length"))
}

pub fn parse_matrix(src: &str) -> Result<(Space, StochasticAction), CliError> {
    let toks = lex(src, 1)?;
    let mut ts = TokStream::new(&toks);
    ts.expect_keyword("fluents")?;
    ts.expect(&Tok::Colon)?;
    let mut fluents = Vec::new();
    while matches!(ts.peek(), Some(Tok::Ident(s)) if s != "row") {
        fluents.push(ts.expect_ident("a fluent name")?);
    }
    let space = Space::new(fluents)?;
    let mut rows: Vec<Option<Vec<(State, f64)>>> = vec![None; space.num_states()];
    while !ts.at_end() {
        ts.expect_keyword("row")?;
        let source = parse_name_formula_tokens(&mut ts)?;
        ts.expect(&Tok::Colon)?;
        let mut entries = Vec::new();
        loop {
            let target = parse_name_formula_tokens(&mut ts)?;
            let p = ts.expect_num("a transition probability")?;
            entries.push((single_state(&space, &target, "a row target")?, p));
            if !ts.eat(&Tok::Comma) {
                break;
            }
        }
        let sources = space.models(&source)?;
        if sources.is_empty() {
            return Err(CliError::usage(
                "AmbiguousState",
                format!("row source `{source}` denotes no state"),
            ));
        }
        for s in sources {
            if rows[s.0 as usize].replace(entries.clone()).is_some() {
                return Err(CliError::usage(
                    "DuplicateRow",
                    format!("state `{}` has two rows", space.format_state(s)),
                ));
            }
        }
    }
    let action = StochasticAction::new("matrix", &space, rows)?;
    Ok((space, action))
}

pub fn parse_prob_belief(space: &Space, src: &str) -> Result<ProbBelief, CliError> {
    let toks = lex(src, 1)?;
    let mut ts = TokStream::new(&toks);
    let mut mass = vec![0.0; space.num_states()];
    let mut seen = BTreeSet::new();
    loop {
        let f = parse_name_formula_tokens(&mut ts)?;
        ts.expect(&Tok::Colon)?;
        let p = ts.expect_num("a probability")?;
        let s = single_state(space, &f, "a belief entry")?;
        if !seen.insert(s) {
            return Err(CliError::usage(
                "DuplicateState",
                format!("the belief lists state `{}` twice", space.format_state(s)),
            ));
        }
        mass[s.0 as usize] = p;
        if !ts.eat(&Tok::Comma) {
            break;
        }
    }
    ts.expect_end()?;
    Ok(ProbBelief::new(space, mass)?)
}

/// Renders a distribution as `state: probability` lines over the support,
/// in state order.
pub fn dist_lines(space: &Space, b: &ProbBelief) -> Vec<(String, f64)> {
    space
        .states()
        .zip(b.masses())
        .filter(|(_, p)| **p > 0.0)
        .map(|(s, p)| (space.format_state(s), *p))
        .collect()
}
