//! Parser for the domain description language.
//!
//! A domain file is a sequence of statements:
//!
//! ```text
//! fluents: U_a U_b            # basic fluents, declaration order matters
//! derived: L                  # fluents defined by static laws
//! action T_a {                # causal rules, `;`-separated,
//!   if U_a causes -U_a ;      # `|` separates nondeterministic branches
//!   if -U_a causes U_a
//! }
//! action Toss { causes Heads | causes -Heads }
//! static: (U_a & U_b | -U_a & -U_b) <-> L
//! static: Outside & -Umbrella & Rain causes -Dry
//! executable T_a if true
//! strips Fix pre: Broken eff: -Broken, if Wet then -Dry
//! ```
//!
//! `#` starts a comment. Rule conditions and STRIPS preconditions are
//! conjunctions of literals; static constraints are arbitrary formulas.

use std::collections::{BTreeMap, BTreeSet};

use crate::logic::text::{lex, ParseError, Tok, TokStream, Token};
use crate::logic::Formula;

use super::{
    as_literal_conjunction, literals_inconsistent, ActionDef, CausalRule, Domain, LangError,
    Literal, StaticLaw, StripsAction,
};

const TOP_KEYWORDS: [&str; 6] = ["fluents", "derived", "action", "static", "executable", "strips"];

const RESERVED: [&str; 14] = [
    "fluents",
    "derived",
    "action",
    "static",
    "executable",
    "strips",
    "if",
    "causes",
    "then",
    "pre",
    "eff",
    "true",
    "false",
    "x",
];

fn is_ident(tok: &Token, name: &str) -> bool {
    matches!(&tok.tok, Tok::Ident(s) if s == name)
}

/// Splits the token stream into statements, each starting with a top-level
/// keyword at brace depth zero.
fn split_statements(toks: &[Token]) -> Result<Vec<&[Token]>, LangError> {
    let mut out = Vec::new();
    let mut depth: i32 = 0;
    let mut start: Option<usize> = None;
    for (i, t) in toks.iter().enumerate() {
        match &t.tok {
            Tok::LBrace => depth += 1,
            Tok::RBrace => depth -= 1,
            Tok::Ident(s) if depth == 0 && TOP_KEYWORDS.contains(&s.as_str()) => {
                if let Some(s0) = start.take() {
                    out.push(&toks[s0..i]);
                }
                start = Some(i);
            }
            _ => {}
        }
        if start.is_none() {
            return Err(ParseError::new(
                t.line,
                t.col,
                format!("expected a declaration ({}), found {}", TOP_KEYWORDS.join(", "), t.tok),
            )
            .into());
        }
    }
    if let Some(s0) = start {
        out.push(&toks[s0..]);
    }
    Ok(out)
}

/// Index of the first occurrence of keyword `kw` at parenthesis depth zero.
fn find_keyword(toks: &[Token], kw: &str) -> Option<usize> {
    let mut depth = 0;
    for (i, t) in toks.iter().enumerate() {
        match &t.tok {
            Tok::LParen => depth += 1,
            Tok::RParen => depth -= 1,
            Tok::Ident(s) if depth == 0 && s == kw => return Some(i),
            _ => {}
        }
    }
    None
}

/// Splits `toks` at every occurrence of `sep` at parenthesis depth zero.
fn split_at(toks: &[Token], sep: &Tok) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    for (i, t) in toks.iter().enumerate() {
        match &t.tok {
            Tok::LParen => depth += 1,
            Tok::RParen => depth -= 1,
            t if depth == 0 && t == sep => {
                out.push(start..i);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(start..toks.len());
    out
}

struct Declarations {
    fluents: BTreeSet<String>,
    derived: BTreeSet<String>,
    actions: BTreeSet<String>,
}

impl Declarations {
    /// Rejects undeclared fluent atoms in a formula slice, with the exact
    /// position of the offending name.
    fn check_atoms(&self, toks: &[Token]) -> Result<(), LangError> {
        for t in toks {
            if let Tok::Ident(s) = &t.tok {
                if s == "true" || s == "false" {
                    continue;
                }
                if !self.fluents.contains(s) {
                    return Err(LangError::UndeclaredFluent {
                        fluent: s.clone(),
                        line: t.line,
                        col: t.col,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Parses a formula from a statement slice, requiring it to span the whole
/// slice and to mention only declared fluents.
fn parse_formula_slice(
    toks: &[Token],
    decls: &Declarations,
    empty_pos: (u32, u32),
    what: &str,
) -> Result<Formula<String>, LangError> {
    if toks.is_empty() {
        return Err(ParseError::new(empty_pos.0, empty_pos.1, format!("expected {what}")).into());
    }
    decls.check_atoms(toks)?;
    let mut ts = TokStream::new(toks);
    let f = crate::logic::text::parse_name_formula_tokens(&mut ts)?;
    ts.expect_end()?;
    Ok(f)
}

/// Parses a condition (a conjunction of literals; empty means `true`).
fn parse_condition(
    toks: &[Token],
    decls: &Declarations,
    empty_pos: (u32, u32),
) -> Result<Formula<String>, LangError> {
    if toks.is_empty() {
        return Ok(Formula::True);
    }
    let f = parse_formula_slice(toks, decls, empty_pos, "a condition")?;
    if as_literal_conjunction(&f).is_none() {
        let (line, col) = (toks[0].line, toks[0].col);
        return Err(ParseError::new(
            line,
            col,
            "a condition must be a conjunction of literals",
        )
        .into());
    }
    Ok(f)
}

/// Parses an effect literal; the fluent must be declared and basic.
fn parse_effect(toks: &[Token], decls: &Declarations, empty_pos: (u32, u32)) -> Result<Literal, LangError> {
    let mut ts = TokStream::new(toks);
    if toks.is_empty() {
        return Err(ParseError::new(empty_pos.0, empty_pos.1, "expected an effect literal").into());
    }
    let positive = !ts.eat(&Tok::Neg);
    let (line, col) = ts.here();
    let name = ts.expect_ident("an effect fluent").map_err(LangError::from)?;
    ts.expect_end().map_err(LangError::from)?;
    if !decls.fluents.contains(&name) {
        return Err(LangError::UndeclaredFluent {
            fluent: name,
            line,
            col,
        });
    }
    if decls.derived.contains(&name) {
        return Err(LangError::DerivedEffect {
            fluent: name,
            line,
            col,
        });
    }
    Ok(Literal::new(name, positive))
}

fn parse_causal_rule(toks: &[Token], decls: &Declarations) -> Result<CausalRule, LangError> {
    if toks.is_empty() {
        return Err(ParseError::new(1, 1, "empty rule").into());
    }
    let pos = (toks[0].line, toks[0].col);
    if is_ident(&toks[0], "if") {
        let k = find_keyword(toks, "causes").ok_or_else(|| {
            ParseError::new(pos.0, pos.1, "expected `causes` after the rule condition")
        })?;
        let condition = parse_condition(&toks[1..k], decls, pos)?;
        let effect = parse_effect(&toks[k + 1..], decls, pos)?;
        Ok(CausalRule { condition, effect })
    } else if is_ident(&toks[0], "causes") {
        let effect = parse_effect(&toks[1..], decls, pos)?;
        Ok(CausalRule {
            condition: Formula::True,
            effect,
        })
    } else {
        Err(ParseError::new(pos.0, pos.1, "a rule starts with `if` or `causes`").into())
    }
}

fn declare_name(
    t: &Token,
    name: &str,
    taken: &mut BTreeSet<String>,
    what: &str,
) -> Result<(), LangError> {
    if RESERVED.contains(&name) {
        return Err(ParseError::new(
            t.line,
            t.col,
            format!("`{name}` is a reserved word and cannot name a {what}"),
        )
        .into());
    }
    if !taken.insert(name.to_string()) {
        return Err(ParseError::new(t.line, t.col, format!("duplicate {what} `{name}`")).into());
    }
    Ok(())
}

/// Parses a complete domain description.
pub fn parse_domain(src: &str) -> Result<Domain, LangError> {
    let toks = lex(src, 1)?;
    let statements = split_statements(&toks)?;

    // First pass: declarations, so that statement order does not matter.
    let mut basic: Vec<String> = Vec::new();
    let mut derived: Vec<String> = Vec::new();
    let mut fluent_names: BTreeSet<String> = BTreeSet::new();
    let mut action_names: BTreeSet<String> = BTreeSet::new();
    for stmt in &statements {
        let head = &stmt[0];
        match &head.tok {
            Tok::Ident(s) if s == "fluents" || s == "derived" => {
                let mut ts = TokStream::new(stmt);
                ts.next();
                ts.expect(&Tok::Colon).map_err(LangError::from)?;
                while !ts.at_end() {
                    let t = &stmt[ts_pos(&ts)];
                    let name = ts.expect_ident("a fluent name").map_err(LangError::from)?;
                    declare_name(t, &name, &mut fluent_names, "fluent")?;
                    if s == "fluents" {
                        basic.push(name);
                    } else {
                        derived.push(name);
                    }
                }
            }
            Tok::Ident(s) if s == "action" || s == "strips" => {
                let mut ts = TokStream::new(stmt);
                ts.next();
                let t = stmt.get(1).unwrap_or(head);
                let name = ts.expect_ident("an action name").map_err(LangError::from)?;
                declare_name(t, &name, &mut action_names, "action")?;
            }
            _ => {}
        }
    }
    let decls = Declarations {
        fluents: fluent_names,
        derived: derived.iter().cloned().collect(),
        actions: action_names,
    };

    // Second pass: bodies.
    let mut actions: Vec<(String, ActionDef)> = Vec::new();
    let mut statics: Vec<StaticLaw> = Vec::new();
    let mut executability: BTreeMap<String, Formula<String>> = BTreeMap::new();
    for stmt in &statements {
        let head = &stmt[0];
        let head_kw = match &head.tok {
            Tok::Ident(s) => s.as_str(),
            _ => unreachable!("statements start with a keyword"),
        };
        match head_kw {
            "fluents" | "derived" => {}
            "action" => {
                let mut ts = TokStream::new(stmt);
                ts.next();
                let name = ts.expect_ident("an action name").map_err(LangError::from)?;
                ts.expect(&Tok::LBrace).map_err(LangError::from)?;
                let body_start = ts_pos(&ts);
                // The matching close brace; bodies contain no nested braces.
                let close = stmt[body_start..]
                    .iter()
                    .position(|t| t.tok == Tok::RBrace)
                    .map(|i| body_start + i)
                    .ok_or_else(|| ParseError::new(head.line, head.col, "unclosed `{`"))?;
                let body = &stmt[body_start..close];
                if close + 1 != stmt.len() {
                    let t = &stmt[close + 1];
                    return Err(ParseError::new(
                        t.line,
                        t.col,
                        format!("unexpected {} after action body", t.tok),
                    )
                    .into());
                }
                let mut branches: Vec<Vec<CausalRule>> = Vec::new();
                if body.is_empty() {
                    branches.push(Vec::new());
                } else {
                    for branch_range in split_at(body, &Tok::Or) {
                        let branch_toks = &body[branch_range];
                        if branch_toks.is_empty() {
                            return Err(ParseError::new(
                                head.line,
                                head.col,
                                format!("empty branch in action `{name}`"),
                            )
                            .into());
                        }
                        let mut rules = Vec::new();
                        for rule_range in split_at(branch_toks, &Tok::Semi) {
                            rules.push(parse_causal_rule(&branch_toks[rule_range], &decls)?);
                        }
                        branches.push(rules);
                    }
                }
                actions.push((name, ActionDef::Causal { branches }));
            }
            "static" => {
                let mut ts = TokStream::new(stmt);
                ts.next();
                ts.expect(&Tok::Colon).map_err(LangError::from)?;
                let rest = &stmt[ts_pos(&ts)..];
                let pos = (head.line, head.col);
                match find_keyword(rest, "causes") {
                    Some(k) => {
                        if k == 0 {
                            return Err(ParseError::new(
                                pos.0,
                                pos.1,
                                "a static rule needs a condition before `causes`",
                            )
                            .into());
                        }
                        let condition = parse_condition(&rest[..k], &decls, pos)?;
                        let effect = parse_effect(&rest[k + 1..], &decls, pos)?;
                        statics.push(StaticLaw::Rule { condition, effect });
                    }
                    None => {
                        let f = parse_formula_slice(rest, &decls, pos, "a static law")?;
                        statics.push(StaticLaw::Constraint(f));
                    }
                }
            }
            "executable" => {
                let mut ts = TokStream::new(stmt);
                ts.next();
                let (line, col) = ts.here();
                let name = ts.expect_ident("an action name").map_err(LangError::from)?;
                if !decls.actions.contains(&name) {
                    return Err(LangError::UndeclaredAction {
                        action: name,
                        line,
                        col,
                    });
                }
                ts.expect_keyword("if").map_err(LangError::from)?;
                let rest = &stmt[ts_pos(&ts)..];
                let f = parse_formula_slice(rest, &decls, (line, col), "an executability condition")?;
                let entry = executability.entry(name).or_insert(Formula::True);
                *entry = Formula::conj(vec![entry.clone(), f]).simplify();
            }
            "strips" => {
                let mut ts = TokStream::new(stmt);
                ts.next();
                let name = ts.expect_ident("an action name").map_err(LangError::from)?;
                let pos = (head.line, head.col);
                let mut precondition: Vec<Literal> = Vec::new();
                if ts.eat_keyword("pre") {
                    ts.expect(&Tok::Colon).map_err(LangError::from)?;
                    let start = ts_pos(&ts);
                    let end = find_keyword(&stmt[start..], "eff")
                        .map(|i| start + i)
                        .unwrap_or(stmt.len());
                    let cond = parse_condition(&stmt[start..end], &decls, pos)?;
                    precondition = as_literal_conjunction(&cond).expect("checked by parse_condition");
                    while ts_pos(&ts) < end {
                        ts.next();
                    }
                }
                ts.expect_keyword("eff").map_err(LangError::from)?;
                ts.expect(&Tok::Colon).map_err(LangError::from)?;
                let rest = &stmt[ts_pos(&ts)..];
                let mut effects = Vec::new();
                for rule_range in split_at(rest, &Tok::Comma) {
                    let rule_toks = &rest[rule_range];
                    if rule_toks.is_empty() {
                        return Err(
                            ParseError::new(pos.0, pos.1, "empty effect in `eff:` list").into()
                        );
                    }
                    let rule = if is_ident(&rule_toks[0], "if") {
                        let k = find_keyword(rule_toks, "then").ok_or_else(|| {
                            ParseError::new(
                                rule_toks[0].line,
                                rule_toks[0].col,
                                "expected `then` after the effect condition",
                            )
                        })?;
                        let condition = parse_condition(&rule_toks[1..k], &decls, pos)?;
                        let lits = as_literal_conjunction(&condition).expect("checked");
                        if literals_inconsistent(&lits) {
                            return Err(ParseError::new(
                                rule_toks[0].line,
                                rule_toks[0].col,
                                "inconsistent effect condition",
                            )
                            .into());
                        }
                        let effect = parse_effect(&rule_toks[k + 1..], &decls, pos)?;
                        CausalRule { condition, effect }
                    } else {
                        CausalRule {
                            condition: Formula::True,
                            effect: parse_effect(rule_toks, &decls, pos)?,
                        }
                    };
                    effects.push(rule);
                }
                actions.push((
                    name,
                    ActionDef::Strips(StripsAction {
                        precondition,
                        effects,
                    }),
                ));
            }
            other => {
                return Err(ParseError::new(
                    head.line,
                    head.col,
                    format!("unknown statement `{other}`"),
                )
                .into())
            }
        }
    }

    Ok(Domain {
        basic,
        derived,
        actions,
        statics,
        executability,
    })
}

/// Current cursor index of a token stream; the streams here are always
/// built from the statement slice itself.
fn ts_pos(ts: &TokStream<'_>) -> usize {
    ts.index()
}
