//! The `ratk` binary: progression, regression, filtering, monitoring,
//! belief update, and probabilistic stepping over the toolkit's text
//! formats.
//!
//! Every invocation prints exactly one result record: plain text by
//! default, or one JSON object per line with `--format structured`. Exit
//! codes: 0 for a result, 1 when a well-formed problem has no answer of
//! the requested shape (inexecutable action, inconsistent observation, no
//! explanation), 2 for usage and input errors.

mod input;
mod output;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use ratk::bayes::{chain_progress, dbn_step, parse_network};
use ratk::lang::{
    compile, enumerate_transitions, parse_domain, progress_formula, regress_strong_formula,
    regress_weak_formula, Domain, ENUM_LIMIT,
};
use ratk::logic::{canonical_dnf, holds_in, Formula};
use ratk::semantics::{
    abduce, extrapolate, progress, run_scenario, BinaryBelief, OnticAction, ScenarioOutcome, Space,
};
use ratk::sitcalc::{
    holds_after, modularity_check, parse_effect_laws, parse_regression_query, parse_ssa_theory,
    parse_validity_query, regress, strip_s0, to_assignments, SituationAtom, SituationTerm,
    SsaTheory,
};
use ratk::update::{
    check_postulates, default_dependence, update_cardinality, update_dependence, update_pma,
    BeliefBase, CheckMode, PostulateReport, UpdateOperator, FAMILY_LIMIT,
};

use crate::input::{
    canonicalize, dist_lines, formula_arg, parse_matrix, parse_prob_belief, parse_scenario,
    read_file,
};
use crate::output::{report, CliError, Format, Payload};

#[derive(Parser)]
#[command(
    name = "ratk",
    version,
    about = "Reasoning about actions: progression, regression, filtering, monitoring, belief update, and probabilistic dynamics"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OpName {
    /// Minimal change by set inclusion of the flipped fluents.
    Pma,
    /// Minimal change by count of flipped fluents.
    Card,
    /// Forget the input's variables, then conjoin the input.
    Dep,
}

impl OpName {
    fn as_str(self) -> &'static str {
        match self {
            OpName::Pma => "pma",
            OpName::Card => "card",
            OpName::Dep => "dep",
        }
    }
}

#[derive(Subcommand)]
enum Verb {
    /// Compile one action of a domain into its transition formula.
    Compile {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        action: String,
        /// Canonicalize the output as a full disjunctive normal form.
        #[arg(long)]
        canonical: bool,
    },
    /// Progress a belief formula through an action.
    Progress {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        action: String,
        #[arg(long, allow_hyphen_values = true)]
        belief: String,
        #[arg(long)]
        canonical: bool,
    },
    /// Weakest condition that makes an action executable with the goal possible after.
    RegressWeak {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        action: String,
        #[arg(long, allow_hyphen_values = true)]
        goal: String,
        #[arg(long)]
        canonical: bool,
    },
    /// Weakest condition that makes an action executable with the goal guaranteed after.
    RegressStrong {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        action: String,
        #[arg(long, allow_hyphen_values = true)]
        goal: String,
        #[arg(long)]
        canonical: bool,
    },
    /// One belief filtering step: an optional action, then an observation.
    Filter {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        belief: String,
        #[arg(long)]
        action: Option<String>,
        /// Observation, as a formula over the domain's fluents.
        #[arg(long, allow_hyphen_values = true)]
        observe: String,
    },
    /// List the declared actions that can explain a belief change.
    Abduce {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        before: String,
        #[arg(long, allow_hyphen_values = true)]
        after: String,
    },
    /// Monitor a scenario file against a domain.
    Scenario {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Explain an inconsistent scenario by inserting exogenous actions.
    Extrapolate {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        scenario: PathBuf,
        /// Actions allowed as insertions (default: all declared actions).
        #[arg(long, value_delimiter = ',')]
        exo: Vec<String>,
    },
    /// Regress `goal after A1, A2, ...` through a successor state theory.
    RegressSsa {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        formula: String,
        #[arg(long)]
        canonical: bool,
    },
    /// Decide a `phi0 -> [A1][A2] psi` validity question.
    Valid {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        formula: String,
    },
    /// Translate one action of a successor state theory into assignments.
    Assignments {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        action: String,
    },
    /// Report the static constraints implied by a set of effect laws.
    Modularity {
        #[arg(long)]
        laws: PathBuf,
    },
    /// Update a belief base by a formula.
    Update {
        #[arg(long)]
        op: OpName,
        #[arg(long, allow_hyphen_values = true)]
        base: String,
        #[arg(long, allow_hyphen_values = true)]
        by: String,
        /// Extra variables for the update universe; for `dep`, also the
        /// dependence set of the input.
        #[arg(long, value_delimiter = ',')]
        vars: Vec<String>,
    },
    /// Check the update postulates for a named operator.
    CheckPostulates {
        #[arg(long)]
        op: OpName,
        /// Number of fluents in the universe (1 to 3).
        #[arg(long)]
        fluents: usize,
        /// Check this many random triples per postulate instead of all.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Advance a probabilistic belief through a two-slice network.
    DbnStep {
        #[arg(long)]
        network: PathBuf,
        /// Belief as `state-formula: probability` entries, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        belief: String,
        #[arg(long, default_value_t = 1)]
        steps: usize,
    },
    /// Advance a probabilistic belief through an explicit transition matrix.
    Chain {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        belief: String,
        #[arg(long, default_value_t = 1)]
        steps: usize,
    },
}

fn verb_name(verb: &Verb) -> &'static str {
    match verb {
        Verb::Compile { .. } => "compile",
        Verb::Progress { .. } => "progress",
        Verb::RegressWeak { .. } => "regress-weak",
        Verb::RegressStrong { .. } => "regress-strong",
        Verb::Filter { .. } => "filter",
        Verb::Abduce { .. } => "abduce",
        Verb::Scenario { .. } => "scenario",
        Verb::Extrapolate { .. } => "extrapolate",
        Verb::RegressSsa { .. } => "regress-ssa",
        Verb::Valid { .. } => "valid",
        Verb::Assignments { .. } => "assignments",
        Verb::Modularity { .. } => "modularity",
        Verb::Update { .. } => "update",
        Verb::CheckPostulates { .. } => "check-postulates",
        Verb::DbnStep { .. } => "dbn-step",
        Verb::Chain { .. } => "chain",
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let verb = verb_name(&cli.verb);
    let outcome = run(cli.verb);
    std::process::exit(report(cli.format, verb, outcome));
}

fn run(verb: Verb) -> Result<Payload, CliError> {
    match verb {
        Verb::Compile {
            domain,
            action,
            canonical,
        } => compile_verb(&domain, &action, canonical),
        Verb::Progress {
            domain,
            action,
            belief,
            canonical,
        } => symbolic_verb(&domain, &action, &belief, canonical, progress_formula),
        Verb::RegressWeak {
            domain,
            action,
            goal,
            canonical,
        } => symbolic_verb(&domain, &action, &goal, canonical, regress_weak_formula),
        Verb::RegressStrong {
            domain,
            action,
            goal,
            canonical,
        } => symbolic_verb(&domain, &action, &goal, canonical, regress_strong_formula),
        Verb::Filter {
            domain,
            belief,
            action,
            observe,
        } => filter_verb(&domain, &belief, action.as_deref(), &observe),
        Verb::Abduce {
            domain,
            before,
            after,
        } => abduce_verb(&domain, &before, &after),
        Verb::Scenario { domain, scenario } => scenario_verb(&domain, &scenario),
        Verb::Extrapolate {
            domain,
            scenario,
            exo,
        } => extrapolate_verb(&domain, &scenario, &exo),
        Verb::RegressSsa {
            theory,
            formula,
            canonical,
        } => regress_ssa_verb(&theory, &formula, canonical),
        Verb::Valid { theory, formula } => valid_verb(&theory, &formula),
        Verb::Assignments { theory, action } => assignments_verb(&theory, &action),
        Verb::Modularity { laws } => modularity_verb(&laws),
        Verb::Update { op, base, by, vars } => update_verb(op, &base, &by, &vars),
        Verb::CheckPostulates {
            op,
            fluents,
            samples,
            seed,
        } => check_postulates_verb(op, fluents, samples, seed),
        Verb::DbnStep {
            network,
            belief,
            steps,
        } => dbn_step_verb(&network, &belief, steps),
        Verb::Chain {
            matrix,
            belief,
            steps,
        } => chain_verb(&matrix, &belief, steps),
    }
}

fn load_domain(path: &Path) -> Result<Domain, CliError> {
    Ok(parse_domain(&read_file(path)?)?)
}

fn load_theory(path: &Path) -> Result<SsaTheory, CliError> {
    Ok(parse_ssa_theory(&read_file(path)?)?)
}

/// The domain's state space together with the transition relation of every
/// declared action. All of them share one fluent order, so state ids agree.
fn action_map(dom: &Domain) -> Result<(Space, BTreeMap<String, OnticAction>), CliError> {
    let space = Space::new(dom.fluents())?;
    let mut map = BTreeMap::new();
    for (name, _) in &dom.actions {
        let (_, act) = enumerate_transitions(dom, name)?;
        map.insert(name.clone(), act);
    }
    Ok((space, map))
}

fn compile_verb(domain: &Path, action: &str, canonical: bool) -> Result<Payload, CliError> {
    let dom = load_domain(domain)?;
    let th = compile(&dom, action)?;
    if !canonical {
        return Ok(Payload::formula(&th.sigma));
    }
    let mut universe = th.timed_universe();
    universe.sort();
    // Two timed copies per fluent; canonicalizing enumerates 2^(2n) rows.
    if universe.len() > 16 {
        return Err(CliError::usage(
            "SizeLimit",
            format!(
                "canonical output enumerates {} timed atoms; the limit is 16",
                universe.len()
            ),
        ));
    }
    let masks: Vec<u32> = (0..1u32 << universe.len())
        .filter(|m| holds_in(&th.sigma, &universe, *m))
        .collect();
    Ok(Payload::formula(canonical_dnf(&masks, &universe)))
}

fn symbolic_verb(
    domain: &Path,
    action: &str,
    formula: &str,
    canonical: bool,
    op: fn(
        &Formula<String>,
        &ratk::lang::CompiledActionTheory,
    ) -> Result<Formula<String>, ratk::lang::LangError>,
) -> Result<Payload, CliError> {
    let dom = load_domain(domain)?;
    let th = compile(&dom, action)?;
    let f = formula_arg(formula, "the input formula")?;
    let out = op(&f, &th)?;
    if canonical {
        return Ok(Payload::formula(canonicalize(&out, &th.fluents)?));
    }
    Ok(Payload::formula(out))
}

fn filter_verb(
    domain: &Path,
    belief: &str,
    action: Option<&str>,
    observe: &str,
) -> Result<Payload, CliError> {
    let dom = load_domain(domain)?;
    let space = Space::new(dom.fluents())?;
    let b = BinaryBelief::from_formula(&space, &formula_arg(belief, "the belief")?)?;
    let predicted = match action {
        Some(name) => {
            let (_, act) = enumerate_transitions(&dom, name)?;
            progress(&b, &act)?
        }
        None => b,
    };
    let obs = formula_arg(observe, "the observation")?;
    let kept: std::collections::BTreeSet<_> = predicted
        .states()
        .intersection(&space.models(&obs)?)
        .copied()
        .collect();
    if kept.is_empty() {
        return Err(CliError::eval(
            "Inconsistent",
            format!("observation `{obs}` is inconsistent with the predicted belief"),
        ));
    }
    Ok(Payload::formula(space.to_dnf(&kept)))
}

fn abduce_verb(domain: &Path, before: &str, after: &str) -> Result<Payload, CliError> {
    let dom = load_domain(domain)?;
    let space = Space::new(dom.fluents())?;
    let b = BinaryBelief::from_formula(&space, &formula_arg(before, "the belief before")?)?;
    let target = BinaryBelief::from_formula(&space, &formula_arg(after, "the belief after")?)?;
    let mut acts = Vec::new();
    for (name, _) in &dom.actions {
        acts.push(enumerate_transitions(&dom, name)?.1);
    }
    let refs: Vec<&OnticAction> = acts.iter().collect();
    let names = abduce(&b, &target, &refs);
    if names.is_empty() {
        return Ok(Payload {
            text: "none".to_string(),
            json: json!([]),
        });
    }
    Ok(Payload::lines(names))
}

fn trajectory_lines(space: &Space, beliefs: &[BinaryBelief], lines: &mut Vec<String>) {
    for (t, b) in beliefs.iter().enumerate() {
        lines.push(format!("t={t}: {}", space.to_dnf(b.states())));
    }
}

fn scenario_verb(domain: &Path, scenario: &Path) -> Result<Payload, CliError> {
    let dom = load_domain(domain)?;
    let (space, actions) = action_map(&dom)?;
    let scn = parse_scenario(&read_file(scenario)?, &space)?;
    match run_scenario(&space, &scn, &actions)? {
        ScenarioOutcome::Consistent { trajectory } => {
            let mut lines = Vec::new();
            trajectory_lines(&space, &trajectory, &mut lines);
            let beliefs: Vec<String> = trajectory
                .iter()
                .map(|b| space.to_dnf(b.states()).to_string())
                .collect();
            Ok(Payload {
                text: lines.join("\n"),
                json: json!({"outcome": "consistent", "trajectory": beliefs}),
            })
        }
        ScenarioOutcome::Inconsistent { at, prefix } => {
            let mut lines = vec![format!("inconsistent at t={at}")];
            trajectory_lines(&space, &prefix, &mut lines);
            let beliefs: Vec<String> = prefix
                .iter()
                .map(|b| space.to_dnf(b.states()).to_string())
                .collect();
            Ok(Payload {
                text: lines.join("\n"),
                json: json!({"outcome": "inconsistent", "at": at, "prefix": beliefs}),
            })
        }
    }
}

fn extrapolate_verb(domain: &Path, scenario: &Path, exo: &[String]) -> Result<Payload, CliError> {
    let dom = load_domain(domain)?;
    let (space, actions) = action_map(&dom)?;
    let scn = parse_scenario(&read_file(scenario)?, &space)?;
    let declared: Vec<String> = dom.actions.iter().map(|(n, _)| n.clone()).collect();
    let chosen = if exo.is_empty() { &declared } else { exo };
    let mut exo_refs = Vec::new();
    for name in chosen {
        exo_refs.push(actions.get(name).ok_or_else(|| {
            CliError::usage(
                "UnknownAction",
                format!("`{name}` is not an action of the domain"),
            )
        })?);
    }
    let explanations = extrapolate(&space, &scn, &actions, &exo_refs)?;
    let mut lines = Vec::new();
    let mut records = Vec::new();
    for (i, ex) in explanations.iter().enumerate() {
        let inserted: Vec<String> = ex
            .inserted
            .iter()
            .enumerate()
            .filter_map(|(t, a)| a.as_ref().map(|a| format!("{a}@{t}")))
            .collect();
        let label = if inserted.is_empty() {
            "nothing".to_string()
        } else {
            inserted.join(", ")
        };
        lines.push(format!("explanation {}: insert {label}", i + 1));
        trajectory_lines(&space, &ex.trajectory, &mut lines);
        let beliefs: Vec<String> = ex
            .trajectory
            .iter()
            .map(|b| space.to_dnf(b.states()).to_string())
            .collect();
        records.push(json!({"inserted": ex.inserted, "trajectory": beliefs}));
    }
    Ok(Payload {
        text: lines.join("\n"),
        json: serde_json::Value::Array(records),
    })
}

fn regress_ssa_verb(theory: &Path, formula: &str, canonical: bool) -> Result<Payload, CliError> {
    let th = load_theory(theory)?;
    let (goal, actions) = parse_regression_query(formula)?;
    let sit = SituationTerm::sequence(&actions);
    let situated = goal.map_atoms(&mut |f| Formula::atom(SituationAtom::at(f.clone(), sit.clone())));
    let regressed = regress(&th, &situated)?;
    let plain = strip_s0(&regressed).expect("regression terminates at the initial situation");
    if canonical {
        return Ok(Payload::formula(canonicalize(&plain, th.fluents())?));
    }
    Ok(Payload::formula(plain))
}

fn valid_verb(theory: &Path, formula: &str) -> Result<Payload, CliError> {
    let th = load_theory(theory)?;
    let (phi0, actions, psi) = parse_validity_query(formula)?;
    let yes = holds_after(&th, &phi0, &actions, &psi)?;
    Ok(Payload {
        text: if yes { "valid" } else { "not valid" }.to_string(),
        json: serde_json::Value::Bool(yes),
    })
}

fn assignments_verb(theory: &Path, action: &str) -> Result<Payload, CliError> {
    let th = load_theory(theory)?;
    Ok(Payload::formula(to_assignments(&th, action)?))
}

fn modularity_verb(laws: &Path) -> Result<Payload, CliError> {
    let (laws, executability, statics) = parse_effect_laws(&read_file(laws)?)?;
    let implied = modularity_check(&laws, &executability, &statics);
    let rendered: Vec<String> = implied.iter().map(|f| f.to_string()).collect();
    Ok(Payload {
        text: if rendered.is_empty() {
            "modular".to_string()
        } else {
            rendered.join("\n")
        },
        json: json!({"modular": rendered.is_empty(), "implied": rendered}),
    })
}

fn update_verb(op: OpName, base: &str, by: &str, vars: &[String]) -> Result<Payload, CliError> {
    let base = formula_arg(base, "the base")?;
    let by = formula_arg(by, "the input")?;
    let mut universe = base.atoms();
    universe.extend(by.atoms());
    universe.extend(vars.iter().cloned());
    if universe.len() > ENUM_LIMIT {
        return Err(CliError::usage(
            "SizeLimit",
            format!(
                "update enumerates interpretations over {} variables; the limit is {ENUM_LIMIT}",
                universe.len()
            ),
        ));
    }
    let universe: Vec<String> = universe.into_iter().collect();
    let k = BeliefBase::new(base);
    let result = match op {
        OpName::Pma => update_pma(&k, &by, &universe),
        OpName::Card => update_cardinality(&k, &by, &universe),
        OpName::Dep => {
            let dep = if vars.is_empty() {
                default_dependence(&by)
            } else {
                vars.iter().cloned().collect()
            };
            update_dependence(&k, &by, &dep, &universe)
        }
    };
    Ok(Payload::formula(result.formula))
}

fn report_json(rep: &PostulateReport) -> serde_json::Value {
    let mode = match rep.mode {
        CheckMode::Exhaustive => json!({"mode": "exhaustive"}),
        CheckMode::Sampled { seed, samples } => {
            json!({"mode": "sampled", "seed": seed, "samples": samples})
        }
    };
    let entries: Vec<serde_json::Value> = rep
        .entries
        .iter()
        .map(|e| {
            let mut obj = serde_json::Map::new();
            obj.insert("id".into(), json!(e.id));
            obj.insert("holds".into(), json!(e.holds));
            if !e.witness.is_empty() {
                let w: Vec<serde_json::Value> = e
                    .witness
                    .iter()
                    .map(|(role, f)| json!({"role": role, "formula": f.to_string()}))
                    .collect();
                obj.insert("witness".into(), serde_json::Value::Array(w));
            }
            if let Some(note) = e.note {
                obj.insert("note".into(), json!(note));
            }
            serde_json::Value::Object(obj)
        })
        .collect();
    json!({
        "operator": rep.operator,
        "universe": rep.universe,
        "check": mode,
        "entries": entries,
    })
}

fn check_postulates_verb(
    op: OpName,
    fluents: usize,
    samples: Option<usize>,
    seed: u64,
) -> Result<Payload, CliError> {
    if fluents == 0 || fluents > FAMILY_LIMIT {
        return Err(CliError::usage(
            "SizeLimit",
            format!("the checker supports 1 to {FAMILY_LIMIT} fluents, got {fluents}"),
        ));
    }
    let universe: Vec<String> = ["a", "b", "c"][..fluents]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mode = match samples {
        Some(samples) => CheckMode::Sampled { seed, samples },
        None => CheckMode::Exhaustive,
    };
    let operator = UpdateOperator::by_name(op.as_str()).expect("registry covers the value enum");
    let rep = check_postulates(&operator, &universe, mode)?;
    Ok(Payload {
        text: rep.to_string().trim_end().to_string(),
        json: report_json(&rep),
    })
}

fn dist_payload(space: &Space, b: &ratk::semantics::ProbBelief) -> Payload {
    let entries = dist_lines(space, b);
    let mut obj = serde_json::Map::new();
    for (state, p) in &entries {
        obj.insert(state.clone(), json!(p));
    }
    Payload {
        text: entries
            .iter()
            .map(|(state, p)| format!("{state}: {p}"))
            .collect::<Vec<_>>()
            .join("\n"),
        json: serde_json::Value::Object(obj),
    }
}

fn dbn_step_verb(network: &Path, belief: &str, steps: usize) -> Result<Payload, CliError> {
    let net = parse_network(&read_file(network)?)?;
    let mut b = parse_prob_belief(net.space(), belief)?;
    for _ in 0..steps {
        b = dbn_step(&b, &net);
    }
    Ok(dist_payload(net.space(), &b))
}

fn chain_verb(matrix: &Path, belief: &str, steps: usize) -> Result<Payload, CliError> {
    let (space, action) = parse_matrix(&read_file(matrix)?)?;
    let b = parse_prob_belief(&space, belief)?;
    let out = chain_progress(&space, &b, &action, steps)?;
    Ok(dist_payload(&space, &out))
}
