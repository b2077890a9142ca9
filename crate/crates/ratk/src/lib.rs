//! Reasoning about actions and change over finite propositional state spaces.
//!
//! The library is organised around a small number of views of the same
//! dynamics:
//!
//! * [`semantics`]: enumerated transition systems over boolean states, with
//!   binary (set-valued) and probabilistic beliefs, progression, weak and
//!   strong regression, observation filtering, event abduction, and scenario
//!   monitoring.
//! * [`lang`]: a propositional action language with causal rules, static
//!   laws, and STRIPS-style operators, compiled to two-slice transition
//!   formulas; symbolic progression and regression via variable forgetting.
//! * [`sitcalc`]: successor state axioms over situation terms, Reiter-style
//!   regression, and extraction of assignment-style action representations.
//! * [`update`]: model-based belief update operators (minimal-diff,
//!   cardinality, dependence-based) together with a postulate checker and
//!   the correspondence between update operators and faithful preorder
//!   families.
//! * [`bayes`]: two-slice Bayesian networks, exponential survival models,
//!   and event-aware persistence.
//!
//! All state spaces are finite and small by design; operations enumerate
//! models rather than calling a solver, and every public operation is
//! deterministic in its inputs.

pub mod bayes;
pub mod lang;
pub mod logic;
pub mod semantics;
pub mod sitcalc;
pub mod update;
