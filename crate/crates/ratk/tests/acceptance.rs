//! Acceptance gate: one test per criterion, so the harness prints one
//! pass/fail line for each. Golden values are checked exactly or up to
//! semantic equivalence; the randomized suites use fixed seeds.

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use ratk::bayes::{
    chain_progress, dbn_step, persist_with_events, survival_network, survive, EventRates,
    SurvivalModel,
};
use ratk::lang::{
    compile, enumerate_transitions, parse_domain, progress_formula, regress_strong_formula,
    regress_weak_formula, strips_progress, LangError,
};
use ratk::logic::{canonical_dnf, equivalent, parse_formula, Formula};
use ratk::semantics::{
    filter, filter_prob, regress_strong, regress_weak, BinaryBelief,
    EpistemicAction, OnticAction, ProbBelief, Space, State, StochasticAction, NULL_OBS,
};
use ratk::sitcalc::{
    holds_after, instantiate, parse_ssa_theory, regress, strip_s0, to_assignments, BodyAtom,
    SituationAtom, SituationTerm, Ssa, SsaTheory,
};
use ratk::update::{
    check_postulates, operator_of, preorders_of, update_cardinality, update_dependence,
    update_pma, BeliefBase, CheckMode, PreorderOutcome, UpdateOperator,
};

const GO_OUT: &str = "fluents: Outside Umbrella Rain Dry\n\
     action Go-out { causes Outside }\n\
     static: Outside & -Umbrella & Rain causes -Dry\n";

const PQ: &str = "fluents: p q\n\
     action flip { if p & q causes -p ; if -p & q causes p ; causes q }\n";

const TOGGLE: &str = "fluents: U_a U_b\n\
     actions: T_a T_b\n\
     ssa U_a: (-U_a & x = T_a) | (U_a & x != T_a)\n\
     ssa U_b: (-U_b & x = T_b) | (U_b & x != T_b)\n";

fn f(s: &str) -> Formula<String> {
    parse_formula(s).expect("test formulas parse")
}

#[test]
fn criterion_01_going_out_progression_and_regression_goldens() {
    let th = compile(&parse_domain(GO_OUT).expect("domain parses"), "Go-out").expect("compiles");
    let kept = progress_formula(&f("Dry & Umbrella"), &th).expect("executable");
    assert!(equivalent(&kept, &f("Outside & Umbrella & Dry"), &th.fluents));
    let open = progress_formula(&f("-Umbrella"), &th).expect("executable");
    assert!(equivalent(
        &open,
        &f("Outside & -Umbrella & (Rain -> -Dry)"),
        &th.fluents
    ));
    let need = regress_weak_formula(&f("Dry & Rain"), &th).expect("well-formed");
    assert!(equivalent(&need, &f("Umbrella & Rain & Dry"), &th.fluents));
}

#[test]
fn criterion_02_interacting_rules_compile_to_the_known_transition_formula() {
    let dom = parse_domain(PQ).expect("domain parses");
    let th = compile(&dom, "flip").expect("compiles");
    // The expected formula over timed copies, built without the compiler:
    // q holds afterwards, and p flips exactly when q was true.
    let q1 = Formula::atom(ratk::lang::TimedAtom {
        fluent: "q".to_string(),
        next: true,
    });
    let q0 = Formula::atom(ratk::lang::TimedAtom {
        fluent: "q".to_string(),
        next: false,
    });
    let p1 = Formula::atom(ratk::lang::TimedAtom {
        fluent: "p".to_string(),
        next: true,
    });
    let p0 = Formula::atom(ratk::lang::TimedAtom {
        fluent: "p".to_string(),
        next: false,
    });
    let iff = |a: Formula<_>, b: Formula<_>| {
        Formula::disj(vec![
            Formula::conj(vec![a.clone(), b.clone()]),
            Formula::conj(vec![Formula::not(a), Formula::not(b)]),
        ])
    };
    let expected = Formula::conj(vec![q1, iff(p1, iff(p0, Formula::not(q0)))]);
    assert!(equivalent(&th.sigma, &expected, &th.timed_universe()));

    let (space, rel) = enumerate_transitions(&dom, "flip").expect("small space");
    let s = |names: &[&str]| space.state_where(names).expect("valid state");
    assert_eq!(rel.successors(s(&["p", "q"])), &BTreeSet::from([s(&["q"])]));
    assert_eq!(rel.successors(s(&[])), &BTreeSet::from([s(&["q"])]));
    assert_eq!(rel.successors(s(&["q"])), &BTreeSet::from([s(&["p", "q"])]));
    assert_eq!(rel.successors(s(&["p"])), &BTreeSet::from([s(&["p", "q"])]));
}

#[test]
fn criterion_03_double_toggle_regression_and_assignment_goldens() {
    let th = parse_ssa_theory(TOGGLE).expect("theory parses");
    let sit = SituationTerm::sequence(&["T_a", "T_a"]);
    let goal =
        f("U_a").map_atoms(&mut |a| Formula::atom(SituationAtom::at(a.clone(), sit.clone())));
    let regressed = regress(&th, &goal).expect("well-formed query");
    let plain = strip_s0(&regressed).expect("fully regressed");
    assert!(equivalent(&plain, &f("U_a"), th.fluents()));

    let assigned = to_assignments(&th, "T_a").expect("explicit axiom");
    assert_eq!(assigned.to_string(), "{ U_a := -U_a }");
}

#[test]
fn criterion_04_strips_toggle_progression_golden() {
    let dom = parse_domain(
        "fluents: U_a U_b\n\
         derived: L\n\
         strips T_a eff: if U_a then -U_a, if -U_a then U_a\n\
         static: (U_a & U_b | -U_a & -U_b) <-> L\n",
    )
    .expect("domain parses");
    let space = dom.space().expect("small space");
    let start = space.state_where(&["U_a"]).expect("valid state");
    let next = strips_progress(&dom, "T_a", start).expect("complete laws");
    assert_eq!(next, space.state_where(&["L"]).expect("valid state"));
}

#[test]
fn criterion_05_fruit_update_goldens_and_inclusion_postulates() {
    let base = BeliefBase::new(f("(banana & -apple) | (apple & -banana)"));
    let by = f("-banana");
    let universe = vec!["apple".to_string(), "banana".to_string()];
    for result in [
        update_pma(&base, &by, &universe),
        update_cardinality(&base, &by, &universe),
        update_dependence(&base, &by, &by.atoms(), &universe),
    ] {
        assert!(equivalent(&result.formula, &by, &universe));
    }

    let two = vec!["a".to_string(), "b".to_string()];
    let report = check_postulates(&UpdateOperator::pma(), &two, CheckMode::Exhaustive)
        .expect("within the size limit");
    assert_eq!(report.entries.len(), 9);
    for entry in &report.entries[..8] {
        assert!(entry.holds, "{} should hold: {report}", entry.id);
        assert!(entry.witness.is_empty());
    }
    // The ninth postulate is reported, not asserted.
    println!("U9 verdict for pma at two fluents: holds = {}", report.entries[8].holds);
}

#[test]
fn criterion_06_derived_preorders_reproduce_the_inclusion_update() {
    let universe = vec!["a".to_string(), "b".to_string()];
    let pma = UpdateOperator::pma();
    let fam = match preorders_of(&pma, &universe).expect("within the size limit") {
        PreorderOutcome::Family(fam) => fam,
        PreorderOutcome::Failure(w) => panic!("no family: {}", w.reason),
    };
    let induced = operator_of(&fam);
    let form = |bits: u32| {
        let masks: Vec<u32> = (0..4).filter(|i| bits & (1 << i) != 0).collect();
        canonical_dnf(&masks, &universe)
    };
    for kbits in 0..16u32 {
        for pbits in 0..16u32 {
            let k = BeliefBase::new(form(kbits));
            let phi = form(pbits);
            let direct = pma.apply(&k, &phi, &universe);
            let replayed = induced.apply(&k, &phi, &universe);
            assert_eq!(
                direct.formula.to_string(),
                replayed.formula.to_string(),
                "K = {kbits:04b}, phi = {pbits:04b}"
            );
        }
    }
}

fn random_cube(rng: &mut StdRng, fluents: &[String], keep: f64) -> Vec<String> {
    let mut out = Vec::new();
    for x in fluents {
        if !rng.random_bool(keep) {
            continue;
        }
        out.push(if rng.random_bool(0.5) {
            x.clone()
        } else {
            format!("-{x}")
        });
    }
    out
}

fn random_branch(rng: &mut StdRng, fluents: &[String]) -> String {
    let pick = &fluents[rng.random_range(0..fluents.len())];
    let effect = if rng.random_bool(0.5) {
        pick.clone()
    } else {
        format!("-{pick}")
    };
    let cond = random_cube(rng, fluents, 0.35);
    if cond.is_empty() {
        format!("causes {effect}")
    } else {
        format!("if {} causes {effect}", cond.join(" & "))
    }
}

fn random_domain(rng: &mut StdRng) -> String {
    let n = rng.random_range(1..=6);
    let fluents: Vec<String> = (0..n).map(|i| format!("f{i}")).collect();
    let mut text = format!("fluents: {}\n", fluents.join(" "));
    let rules = rng.random_range(1..=4);
    let mut parts = Vec::new();
    for _ in 0..rules {
        if rng.random_bool(0.2) {
            parts.push(format!(
                "{} | {}",
                random_branch(rng, &fluents),
                random_branch(rng, &fluents)
            ));
        } else {
            parts.push(random_branch(rng, &fluents));
        }
    }
    text.push_str(&format!("action go {{ {} }}\n", parts.join(" ; ")));
    if rng.random_bool(0.25) {
        let guard = random_cube(rng, &fluents, 0.4);
        if !guard.is_empty() {
            text.push_str(&format!("executable go if {}\n", guard.join(" & ")));
        }
    }
    text
}

fn random_fluent_formula(rng: &mut StdRng, fluents: &[String]) -> Formula<String> {
    let cubes: Vec<Formula<String>> = (0..rng.random_range(1..=3))
        .map(|_| {
            Formula::conj(
                random_cube(rng, fluents, 0.4)
                    .into_iter()
                    .map(|l| f(&l))
                    .collect(),
            )
        })
        .collect();
    Formula::disj(cubes)
}

#[test]
fn criterion_07_symbolic_operations_agree_with_enumerated_relations() {
    let mut rng = StdRng::seed_from_u64(0x7_2026);
    for case in 0..200 {
        let text = random_domain(&mut rng);
        let dom = parse_domain(&text).expect("generated domains parse");
        let th = compile(&dom, "go").expect("generated domains compile");
        let (space, rel) = enumerate_transitions(&dom, "go").expect("small space");
        for _ in 0..5 {
            let phi = random_fluent_formula(&mut rng, &th.fluents);
            let start = space.models(&phi).expect("declared fluents");
            let mut image = BTreeSet::new();
            let mut weak = BTreeSet::new();
            let mut strong = BTreeSet::new();
            for s in space.states() {
                let succ = rel.successors(s);
                if start.contains(&s) {
                    image.extend(succ.iter().copied());
                }
                if succ.iter().any(|t| start.contains(t)) {
                    weak.insert(s);
                }
                if !succ.is_empty() && succ.iter().all(|t| start.contains(t)) {
                    strong.insert(s);
                }
            }
            match progress_formula(&phi, &th) {
                Ok(prog) => assert_eq!(
                    space.models(&prog).expect("declared fluents"),
                    image,
                    "case {case}, domain:\n{text}"
                ),
                Err(LangError::Inexecutable { .. }) => {
                    assert!(image.is_empty(), "case {case}, domain:\n{text}")
                }
                Err(other) => panic!("case {case}: unexpected error {other}"),
            }
            let rw = regress_weak_formula(&phi, &th).expect("well-formed");
            assert_eq!(space.models(&rw).expect("declared fluents"), weak);
            let rs = regress_strong_formula(&phi, &th).expect("well-formed");
            assert_eq!(space.models(&rs).expect("declared fluents"), strong);
        }
    }
}

#[test]
fn criterion_08_strong_regression_refines_weak_over_all_two_fluent_relations() {
    let space = Space::new(vec!["p".to_string(), "q".to_string()]).expect("two fluents");
    let states: Vec<State> = space.states().collect();
    let goals: Vec<BinaryBelief> = (1..16u32)
        .map(|bits| {
            BinaryBelief::new(
                states
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| bits & (1 << i) != 0)
                    .map(|(_, s)| *s)
                    .collect(),
            )
            .expect("nonempty goal")
        })
        .collect();
    let subsets: Vec<BTreeSet<State>> = (0..16u32)
        .map(|bits| {
            states
                .iter()
                .enumerate()
                .filter(|(i, _)| bits & (1 << i) != 0)
                .map(|(_, s)| *s)
                .collect()
        })
        .collect();
    for code in 0..65536u32 {
        let rows: Vec<BTreeSet<State>> = (0..4)
            .map(|i| subsets[((code >> (4 * i)) & 0xF) as usize].clone())
            .collect();
        let deterministic = rows.iter().all(|r| r.len() <= 1);
        let action = OnticAction::new("r", &space, rows).expect("well-formed relation");
        for goal in &goals {
            let strong = regress_strong(&space, goal, &action);
            let weak = regress_weak(&space, goal, &action);
            assert!(strong.is_subset(&weak), "relation {code:04x}");
            if deterministic {
                assert_eq!(strong, weak, "relation {code:04x}");
            }
        }
    }
}

#[test]
fn criterion_09_shutdown_chain_golden_and_filter_support_agreement() {
    let space = Space::new(vec!["on".to_string(), "standby".to_string()]).expect("two fluents");
    let c_on = space.state_where(&["on"]).expect("valid state");
    let c_off = space.state_where(&[]).expect("valid state");
    let rows: Vec<Option<Vec<(State, f64)>>> = space
        .states()
        .map(|s| {
            if s == c_on {
                Some(vec![(c_on, 0.1), (c_off, 0.9)])
            } else if s == c_off {
                Some(vec![(c_off, 1.0)])
            } else {
                None
            }
        })
        .collect();
    let shut_down = StochasticAction::new("shut_down", &space, rows).expect("rows are stochastic");
    let mut mass = vec![0.0; space.num_states()];
    mass[c_on.0 as usize] = 1.0;
    let b0 = ProbBelief::new(&space, mass).expect("a point mass");
    let b1 = chain_progress(&space, &b0, &shut_down, 1).expect("executable");
    assert_eq!(b1.mass(c_on), 0.1);
    assert_eq!(b1.mass(c_off), 0.9);

    // Deterministic dynamics, point beliefs, and exact sensors only use
    // probabilities 0 and 1, so probabilistic filtering must keep exactly
    // the states the set-based filter keeps.
    let mut rng = StdRng::seed_from_u64(0x9_2026);
    for case in 0..100 {
        let n = rng.random_range(1..=3usize);
        let fluents: Vec<String> = (0..n).map(|i| format!("g{i}")).collect();
        let space = Space::new(fluents.clone()).expect("small space");
        let m = space.num_states();
        let states: Vec<State> = space.states().collect();
        let (dynamics_set, dynamics_prob) = if rng.random_bool(0.7) {
            let targets: Vec<State> = (0..m).map(|_| states[rng.random_range(0..m)]).collect();
            let rel: Vec<BTreeSet<State>> =
                targets.iter().map(|t| BTreeSet::from([*t])).collect();
            let rows: Vec<Option<Vec<(State, f64)>>> =
                targets.iter().map(|t| Some(vec![(*t, 1.0)])).collect();
            (
                Some(OnticAction::new("det", &space, rel).expect("relation")),
                Some(StochasticAction::new("det", &space, rows).expect("stochastic")),
            )
        } else {
            (None, None)
        };
        let s0 = states[rng.random_range(0..m)];
        let b_set = BinaryBelief::new(BTreeSet::from([s0])).expect("nonempty");
        let mut mass = vec![0.0; m];
        mass[s0.0 as usize] = 1.0;
        let b_prob = ProbBelief::new(&space, mass).expect("a point mass");
        let (sensor, obs) = if rng.random_bool(0.7) {
            let fluent = fluents[rng.random_range(0..n)].clone();
            let sensor = EpistemicAction::perfect_sensor("sense", &space, &fluent, "yes", "no")
                .expect("a sensor");
            let obs = if rng.random_bool(0.5) { "yes" } else { "no" };
            (Some(sensor), obs)
        } else {
            (None, NULL_OBS)
        };
        let filtered_set = filter(&space, &b_set, dynamics_set.as_ref(), sensor.as_ref(), obs);
        let filtered_prob = filter_prob(
            &space,
            &b_prob,
            dynamics_prob.as_ref(),
            sensor.as_ref(),
            obs,
        );
        match (filtered_set, filtered_prob) {
            (Ok(bb), Ok(pb)) => {
                assert_eq!(pb.support(), *bb.states(), "case {case}");
                let total: f64 = pb.masses().iter().sum();
                assert!((total - 1.0).abs() <= 1e-9, "case {case}: total {total}");
            }
            (Err(_), Err(_)) => {}
            (a, b) => panic!("case {case}: set-based {a:?} versus probabilistic {b:?}"),
        }
    }
}

#[test]
fn criterion_10_survival_closed_form_and_event_boundaries() {
    let sm = SurvivalModel::new(0.5, 2.0).expect("valid model");
    assert!((survive(1.0, &sm, 2.0, 0.0) - (-1.0f64).exp()).abs() < 1e-12);

    let net = survival_network("alive", &sm, 0.25).expect("one-fluent network");
    let space = net.space();
    let alive = space.state_where(&["alive"]).expect("valid state");
    for p0 in [0.0, 0.3, 0.8, 1.0] {
        let mass = vec![1.0 - p0, p0];
        let b = ProbBelief::new(space, mass).expect("a distribution");
        let stepped = dbn_step(&b, &net);
        let direct = survive(p0, &sm, sm.resolution(), 0.25);
        assert!((stepped.mass(alive) - direct).abs() < 1e-12, "p0 = {p0}");
    }

    let quiet = EventRates::new(0.0, 0.0).expect("valid rates");
    assert_eq!(
        persist_with_events(0.6, &quiet, &sm, 2.0),
        survive(0.6, &sm, 2.0, 0.0)
    );
    let maker = EventRates::new(1.0, 0.3).expect("valid rates");
    assert_eq!(persist_with_events(0.6, &maker, &sm, 2.0), 1.0);
    let breaker = EventRates::new(0.0, 1.0).expect("valid rates");
    assert_eq!(persist_with_events(0.6, &breaker, &sm, 2.0), 0.0);
}

fn random_body(rng: &mut StdRng, fluents: &[String], actions: &[String], depth: usize) -> Formula<BodyAtom> {
    if depth == 0 || rng.random_bool(0.35) {
        let leaf = if rng.random_bool(0.6) {
            Formula::atom(BodyAtom::Fluent(
                fluents[rng.random_range(0..fluents.len())].clone(),
            ))
        } else {
            Formula::atom(BodyAtom::ActionEq(
                actions[rng.random_range(0..actions.len())].clone(),
            ))
        };
        return if rng.random_bool(0.4) {
            Formula::not(leaf)
        } else {
            leaf
        };
    }
    let left = random_body(rng, fluents, actions, depth - 1);
    let right = random_body(rng, fluents, actions, depth - 1);
    if rng.random_bool(0.5) {
        Formula::conj(vec![left, right])
    } else {
        Formula::disj(vec![left, right])
    }
}

#[test]
fn criterion_11_axiom_regression_agrees_with_state_by_state_simulation() {
    let mut rng = StdRng::seed_from_u64(0xB_2026);
    for case in 0..100 {
        let n = rng.random_range(1..=5usize);
        let fluents: Vec<String> = (0..n).map(|i| format!("h{i}")).collect();
        let k = rng.random_range(1..=3usize);
        let actions: Vec<String> = (0..k).map(|i| format!("A{i}")).collect();
        let axioms: Vec<Ssa> = fluents
            .iter()
            .map(|fl| Ssa {
                fluent: fl.clone(),
                body: random_body(&mut rng, &fluents, &actions, 2),
            })
            .collect();
        let th = SsaTheory::new(fluents.clone(), actions.clone(), axioms)
            .expect("generated theories are well-formed");
        let space = Space::new(fluents.clone()).expect("small space");

        let phi0 = random_fluent_formula(&mut rng, &fluents);
        let psi = random_fluent_formula(&mut rng, &fluents);
        let len = rng.random_range(0..=3usize);
        let seq: Vec<String> = (0..len)
            .map(|_| actions[rng.random_range(0..k)].clone())
            .collect();

        let answer = holds_after(&th, &phi0, &seq, &psi).expect("well-formed query");

        let initial = space.models(&phi0).expect("declared fluents");
        let simulated = initial.iter().all(|s0| {
            let mut cur = *s0;
            for a in &seq {
                let mut next = cur;
                for (i, fl) in space.fluents().iter().enumerate() {
                    let body = th.body(fl).expect("complete theory");
                    let grounded = instantiate(body, a);
                    let value = space
                        .models(&grounded)
                        .expect("declared fluents")
                        .contains(&cur);
                    next = space.with_value(next, i, value);
                }
                cur = next;
            }
            space.models(&psi).expect("declared fluents").contains(&cur)
        });
        assert_eq!(answer, simulated, "case {case}");
    }
}
