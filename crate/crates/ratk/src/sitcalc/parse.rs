//! Text formats for axiom theories, effect laws, and queries.
//!
//! A theory file:
//!
//! ```text
//! fluents: U_a U_b
//! actions: T_a T_b
//! ssa U_a: (-U_a & x = T_a) | (U_a & x != T_a)
//! ssa U_b: (-U_b & x = T_b) | (U_b & x != T_b)
//! ```
//!
//! Bodies are formulas over fluent atoms and equalities `x = A` /
//! `x != A`; `x` always names the action variable. An effect-law file:
//!
//! ```text
//! law P1 -> [A] Q
//! law P2 -> [A] -Q
//! executable A if true
//! static: -(P1 & P2)
//! ```
//!
//! Queries pair a formula with an action sequence: a regression query
//! reads `U_a after T_a, T_a` (actions performed left to right) and a
//! validity query reads `U_a -> [T_a][T_a] U_a`.

use std::collections::BTreeMap;

use crate::lang::Literal;
use crate::logic::text::{lex, parse_formula_tokens, ParseError, Tok, TokStream, Token};
use crate::logic::Formula;

use super::{BodyAtom, EffectLaw, SitcalcError, Ssa, SsaTheory};

const THEORY_KEYWORDS: [&str; 3] = ["fluents", "actions", "ssa"];
const LAW_KEYWORDS: [&str; 3] = ["law", "executable", "static"];
const RESERVED: [&str; 9] = [
    "fluents",
    "actions",
    "ssa",
    "law",
    "executable",
    "static",
    "x",
    "true",
    "false",
];

/// Splits the token stream into statements, each opened by one of the
/// given keywords.
fn split_statements<'t>(
    toks: &'t [Token],
    keywords: &[&str],
) -> Result<Vec<&'t [Token]>, ParseError> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, t) in toks.iter().enumerate() {
        if matches!(&t.tok, Tok::Ident(s) if keywords.contains(&s.as_str())) {
            if let Some(s0) = start.take() {
                out.push(&toks[s0..i]);
            }
            start = Some(i);
        } else if start.is_none() {
            return Err(ParseError::new(
                t.line,
                t.col,
                format!(
                    "expected a statement ({}), found {}",
                    keywords.join(", "),
                    t.tok
                ),
            ));
        }
    }
    if let Some(s0) = start {
        out.push(&toks[s0..]);
    }
    Ok(out)
}

fn declare(names: &mut Vec<String>, ts: &mut TokStream) -> Result<(), ParseError> {
    while !ts.at_end() {
        let here = ts.here();
        let name = ts.expect_ident("a name")?;
        if RESERVED.contains(&name.as_str()) {
            return Err(ParseError::new(
                here.0,
                here.1,
                format!("`{name}` is a reserved word"),
            ));
        }
        if names.contains(&name) {
            return Err(ParseError::new(
                here.0,
                here.1,
                format!("`{name}` is declared twice"),
            ));
        }
        names.push(name);
    }
    Ok(())
}

/// Parses a body formula; `x = A` and `x != A` become equality atoms,
/// any other identifier a fluent atom. Names are checked against the
/// declarations so errors carry positions.
fn parse_body(
    toks: &[Token],
    fluents: &[String],
    actions: &[String],
) -> Result<Formula<BodyAtom>, ParseError> {
    let mut ts = TokStream::new(toks);
    let f = parse_formula_tokens(&mut ts, &mut |ts| {
        let here = ts.here();
        let name = ts.expect_ident("a fluent or `x`")?;
        if name == "x" {
            let negated = match ts.next() {
                Some(t) if t.tok == Tok::Eq => false,
                Some(t) if t.tok == Tok::Neq => true,
                _ => return Err(ts.error("expected `=` or `!=` after `x`")),
            };
            let at = ts.here();
            let action = ts.expect_ident("an action constant")?;
            if !actions.contains(&action) {
                return Err(ParseError::new(
                    at.0,
                    at.1,
                    format!("`{action}` is not a declared action"),
                ));
            }
            let eq = Formula::atom(BodyAtom::ActionEq(action));
            return Ok(if negated { Formula::not(eq) } else { eq });
        }
        if matches!(ts.peek(), Some(Tok::Eq) | Some(Tok::Neq)) {
            return Err(ts.error("the left-hand side of an equality must be `x`"));
        }
        if !fluents.contains(&name) {
            return Err(ParseError::new(
                here.0,
                here.1,
                format!("`{name}` is not a declared fluent"),
            ));
        }
        Ok(Formula::atom(BodyAtom::Fluent(name)))
    })?;
    ts.expect_end()?;
    Ok(f)
}

pub fn parse_ssa_theory(src: &str) -> Result<SsaTheory, SitcalcError> {
    let toks = lex(src, 1)?;
    let stmts = split_statements(&toks, &THEORY_KEYWORDS)?;

    let mut fluents = Vec::new();
    let mut actions = Vec::new();
    for stmt in &stmts {
        let mut ts = TokStream::new(stmt);
        let kw = ts.expect_ident("a keyword")?;
        match kw.as_str() {
            "fluents" => {
                ts.expect(&Tok::Colon)?;
                declare(&mut fluents, &mut ts)?;
            }
            "actions" => {
                ts.expect(&Tok::Colon)?;
                declare(&mut actions, &mut ts)?;
            }
            _ => {}
        }
    }

    let mut axioms = Vec::new();
    for stmt in &stmts {
        let mut ts = TokStream::new(stmt);
        if ts.expect_ident("a keyword")? != "ssa" {
            continue;
        }
        let here = ts.here();
        let fluent = ts.expect_ident("a fluent")?;
        if !fluents.contains(&fluent) {
            return Err(ParseError::new(
                here.0,
                here.1,
                format!("`{fluent}` is not a declared fluent"),
            )
            .into());
        }
        ts.expect(&Tok::Colon)?;
        let body = parse_body(&stmt[ts.index()..], &fluents, &actions)?;
        axioms.push(Ssa { fluent, body });
    }

    SsaTheory::new(fluents, actions, axioms)
}

fn parse_plain_formula(toks: &[Token]) -> Result<Formula<String>, ParseError> {
    let mut ts = TokStream::new(toks);
    let f = parse_formula_tokens(&mut ts, &mut crate::logic::text::name_atom)?;
    ts.expect_end()?;
    Ok(f)
}

fn parse_literal(ts: &mut TokStream) -> Result<Literal, ParseError> {
    let positive = !ts.eat(&Tok::Neg);
    let fluent = ts.expect_ident("a fluent")?;
    Ok(Literal { fluent, positive })
}

/// Parses an effect-law file into laws, executability conditions, and
/// static laws.
#[allow(clippy::type_complexity)]
pub fn parse_effect_laws(
    src: &str,
) -> Result<
    (
        Vec<EffectLaw>,
        BTreeMap<String, Formula<String>>,
        Vec<Formula<String>>,
    ),
    SitcalcError,
> {
    let toks = lex(src, 1)?;
    let stmts = split_statements(&toks, &LAW_KEYWORDS)?;

    let mut laws = Vec::new();
    let mut executability: BTreeMap<String, Formula<String>> = BTreeMap::new();
    let mut statics = Vec::new();
    for stmt in &stmts {
        let mut ts = TokStream::new(stmt);
        let kw = ts.expect_ident("a keyword")?;
        match kw.as_str() {
            "law" => {
                // law <precondition> -> [Action] <literal>
                let rest = &stmt[ts.index()..];
                let open = rest
                    .iter()
                    .position(|t| t.tok == Tok::LBracket)
                    .ok_or_else(|| ts.error("expected `[action]` in the law"))?;
                if open == 0 || rest[open - 1].tok != Tok::Arrow {
                    let t = &rest[open];
                    return Err(ParseError::new(
                        t.line,
                        t.col,
                        "expected `->` before `[action]`".to_string(),
                    )
                    .into());
                }
                let precondition = parse_plain_formula(&rest[..open - 1])?;
                let mut tail = TokStream::new(&rest[open..]);
                tail.expect(&Tok::LBracket)?;
                let action = tail.expect_ident("an action")?;
                tail.expect(&Tok::RBracket)?;
                let effect = parse_literal(&mut tail)?;
                tail.expect_end()?;
                laws.push(EffectLaw {
                    precondition,
                    action,
                    effect,
                });
            }
            "executable" => {
                let action = ts.expect_ident("an action")?;
                ts.expect_keyword("if")?;
                let cond = parse_plain_formula(&stmt[ts.index()..])?;
                let entry = executability.entry(action).or_insert(Formula::True);
                *entry = Formula::conj(vec![entry.clone(), cond]).simplify();
            }
            "static" => {
                ts.expect(&Tok::Colon)?;
                statics.push(parse_plain_formula(&stmt[ts.index()..])?);
            }
            _ => unreachable!("split_statements only accepts known keywords"),
        }
    }
    Ok((laws, executability, statics))
}

/// Parses `formula after A1, A2, ...`; the action list may be absent.
pub fn parse_regression_query(src: &str) -> Result<(Formula<String>, Vec<String>), SitcalcError> {
    let toks = lex(src, 1)?;
    let split = toks
        .iter()
        .position(|t| matches!(&t.tok, Tok::Ident(s) if s == "after"));
    let (head, tail) = match split {
        Some(i) => (&toks[..i], &toks[i + 1..]),
        None => (&toks[..], &[][..]),
    };
    let formula = parse_plain_formula(head)?;
    let mut actions = Vec::new();
    let mut ts = TokStream::new(tail);
    while !ts.at_end() {
        actions.push(ts.expect_ident("an action")?);
        if !ts.at_end() {
            ts.expect(&Tok::Comma)?;
        }
    }
    Ok((formula, actions))
}

/// Parses `phi0 -> [A1][A2] psi` into the antecedent, the action
/// sequence, and the goal.
#[allow(clippy::type_complexity)]
pub fn parse_validity_query(
    src: &str,
) -> Result<(Formula<String>, Vec<String>, Formula<String>), SitcalcError> {
    let toks = lex(src, 1)?;
    let open = toks
        .iter()
        .position(|t| t.tok == Tok::LBracket)
        .ok_or_else(|| {
            ParseError::new(1, 1, "expected `[action]` in the validity query".to_string())
        })?;
    if open == 0 || toks[open - 1].tok != Tok::Arrow {
        let t = &toks[open];
        return Err(
            ParseError::new(t.line, t.col, "expected `->` before `[action]`".to_string()).into(),
        );
    }
    let phi0 = parse_plain_formula(&toks[..open - 1])?;
    let mut ts = TokStream::new(&toks[open..]);
    let mut actions = Vec::new();
    while ts.eat(&Tok::LBracket) {
        actions.push(ts.expect_ident("an action")?);
        ts.expect(&Tok::RBracket)?;
    }
    let psi = parse_plain_formula(&toks[open + 3 * actions.len()..])?;
    Ok((phi0, actions, psi))
}
