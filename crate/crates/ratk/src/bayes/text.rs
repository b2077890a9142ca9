//! Text form of two-slice networks:
//!
//! ```text
//! # lamps cool down, warmth follows the new light level
//! dbn {
//!   node Lit parents: Lit@t cpt: 0.05 0.95
//!   node Warm parents: Lit@t1 Warm@t cpt: 0.0 0.6 0.3 0.9
//! }
//! ```
//!
//! `f@t` reads the fluent before the step, `f@t1` after it. Each `cpt:`
//! row is the probability that the node's fluent is true after the
//! step, one row per parent assignment, the first listed parent being
//! the highest bit (the rows above are for 00, 01, 10, 11).

use crate::logic::text::{lex, Tok, TokStream};

use super::{BayesError, NodeDef, Parent, ParentSlice, TwoSliceNetwork};

const RESERVED: [&str; 4] = ["dbn", "node", "parents", "cpt"];

pub fn parse_network(src: &str) -> Result<TwoSliceNetwork, BayesError> {
    let toks = lex(src, 1)?;
    let mut ts = TokStream::new(&toks);
    ts.expect_keyword("dbn")?;
    ts.expect(&Tok::LBrace)?;
    let mut nodes = Vec::new();
    while !ts.eat(&Tok::RBrace) {
        ts.expect_keyword("node")?;
        let pos = ts.here();
        let fluent = ts.expect_ident("a fluent name")?;
        if RESERVED.contains(&fluent.as_str()) {
            return Err(crate::logic::ParseError::new(
                pos.0,
                pos.1,
                format!("`{fluent}` is a reserved word"),
            )
            .into());
        }
        ts.expect_keyword("parents")?;
        ts.expect(&Tok::Colon)?;
        let mut parents = Vec::new();
        while !ts.eat_keyword("cpt") {
            let parent = ts.expect_ident("a parent fluent or `cpt:`")?;
            ts.expect(&Tok::At)?;
            let tag_pos = ts.here();
            let tag = ts.expect_ident("a slice tag `t` or `t1`")?;
            let slice = match tag.as_str() {
                "t" => ParentSlice::Prev,
                "t1" => ParentSlice::Next,
                other => {
                    return Err(crate::logic::ParseError::new(
                        tag_pos.0,
                        tag_pos.1,
                        format!("expected slice tag `t` or `t1`, found `{other}`"),
                    )
                    .into())
                }
            };
            parents.push(Parent {
                fluent: parent,
                slice,
            });
        }
        ts.expect(&Tok::Colon)?;
        let mut rows = Vec::new();
        while matches!(ts.peek(), Some(Tok::Num(_))) {
            rows.push(ts.expect_num("a row probability")?);
        }
        if rows.is_empty() {
            return Err(ts.error("expected at least one row probability").into());
        }
        nodes.push(NodeDef {
            fluent,
            parents,
            rows,
        });
    }
    ts.expect_end()?;
    TwoSliceNetwork::new(nodes)
}
