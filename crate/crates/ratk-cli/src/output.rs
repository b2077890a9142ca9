//! Result records. Every verb reports through exactly one record, printed
//! either as plain text or as one JSON object per line, so batch callers
//! can stream the output.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// Plain text: the payload alone on stdout, errors on stderr.
    Text,
    /// One JSON record per invocation on stdout.
    Structured,
}

/// What a successful verb hands back. The text rendering and the JSON
/// value carry the same information.
pub struct Payload {
    pub text: String,
    pub json: serde_json::Value,
}

impl Payload {
    pub fn formula(f: impl ToString) -> Self {
        let s = f.to_string();
        Payload {
            json: serde_json::Value::String(s.clone()),
            text: s,
        }
    }

    pub fn lines(lines: Vec<String>) -> Self {
        Payload {
            json: serde_json::Value::Array(
                lines
                    .iter()
                    .map(|l| serde_json::Value::String(l.clone()))
                    .collect(),
            ),
            text: lines.join("\n"),
        }
    }
}

/// A failure together with its exit classification: problems with the
/// invocation or its inputs exit with 2, errors raised while evaluating a
/// well-formed problem exit with 1.
#[derive(Debug)]
pub struct CliError {
    pub kind: String,
    pub message: String,
    pub code: i32,
}

/// Error kinds that mean "the problem is well posed but has no answer of
/// the requested shape". Everything else is an input problem.
const EVAL_KINDS: [&str; 9] = [
    "Inexecutable",
    "Inconsistent",
    "EmptyResult",
    "EmptyBelief",
    "NoExplanation",
    "ZeroProbabilityObservation",
    "PreconditionFailure",
    "UndefinedProgression",
    "NonExplicitSSA",
];

impl CliError {
    pub fn usage(kind: &str, message: impl Into<String>) -> Self {
        CliError {
            kind: kind.to_string(),
            message: message.into(),
            code: 2,
        }
    }

    pub fn eval(kind: &str, message: impl Into<String>) -> Self {
        CliError {
            kind: kind.to_string(),
            message: message.into(),
            code: 1,
        }
    }

    fn classified(kind: &'static str, message: String) -> Self {
        if EVAL_KINDS.contains(&kind) {
            Self::eval(kind, message)
        } else {
            Self::usage(kind, message)
        }
    }
}

impl From<ratk::logic::ParseError> for CliError {
    fn from(e: ratk::logic::ParseError) -> Self {
        CliError::usage("SyntaxError", e.to_string())
    }
}

impl From<ratk::lang::LangError> for CliError {
    fn from(e: ratk::lang::LangError) -> Self {
        CliError::classified(e.kind(), e.to_string())
    }
}

impl From<ratk::semantics::SemanticsError> for CliError {
    fn from(e: ratk::semantics::SemanticsError) -> Self {
        CliError::classified(e.kind(), e.to_string())
    }
}

impl From<ratk::sitcalc::SitcalcError> for CliError {
    fn from(e: ratk::sitcalc::SitcalcError) -> Self {
        CliError::classified(e.kind(), e.to_string())
    }
}

impl From<ratk::update::UpdateError> for CliError {
    fn from(e: ratk::update::UpdateError) -> Self {
        CliError::classified(e.kind(), e.to_string())
    }
}

impl From<ratk::bayes::BayesError> for CliError {
    fn from(e: ratk::bayes::BayesError) -> Self {
        CliError::classified(e.kind(), e.to_string())
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: &'a str,
}

#[derive(Serialize)]
struct Record<'a> {
    verb: &'a str,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<ErrorBody<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    payload: Option<&'a serde_json::Value>,
}

/// Prints the record for one invocation and returns the exit code.
pub fn report(format: Format, verb: &str, outcome: Result<Payload, CliError>) -> i32 {
    match outcome {
        Ok(p) => {
            match format {
                Format::Text => println!("{}", p.text),
                Format::Structured => {
                    let rec = Record {
                        verb,
                        status: "ok",
                        error: None,
                        payload: Some(&p.json),
                    };
                    println!("{}", serde_json::to_string(&rec).expect("records serialize"));
                }
            }
            0
        }
        Err(e) => {
            match format {
                Format::Text => eprintln!("error ({}): {}", e.kind, e.message),
                Format::Structured => {
                    let rec = Record {
                        verb,
                        status: "error",
                        error: Some(ErrorBody {
                            kind: &e.kind,
                            message: &e.message,
                        }),
                        payload: None,
                    };
                    println!("{}", serde_json::to_string(&rec).expect("records serialize"));
                }
            }
            e.code
        }
    }
}
