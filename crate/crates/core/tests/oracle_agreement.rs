use std::collections::BTreeSet;

use eventb_fdr::model::{CompiledMachine, Value};
use eventb_fdr::oracle::{self, generate_machine_pair, RandomMachineSpec};
use eventb_fdr::refine::{is_event_deterministic, Detail, FailReason, Pair, Verdict};
use eventb_fdr::space::{explore, EventLabel, StateSpace};

const SEEDS: u64 = 400;

fn pairs() -> impl Iterator<Item = (u64, Pair)> {
    (0..SEEDS).filter_map(|seed| {
        let (a, c) = generate_machine_pair(&RandomMachineSpec::from_seed(seed));
        let p = Pair::build(&a, &c, 10_000).ok()?;
        (p.conc.state_count() <= 200).then_some((seed, p))
    })
}

#[test]
fn trace_check_matches_definition_without_determinism_proviso() {
    let mut fails = 0;
    for (seed, p) in pairs() {
        let k = oracle::pair_depth_bound(&p.abs, &p.conc);
        let ours = p.check_trace();
        let def = oracle::oracle_trace_refines(&p.abs, &p.conc, &p.map, k);
        assert_eq!(ours.refines(), def.is_ok(), "seed {seed}");
        if let (Some(cex), Err(v)) = (ours.counterexample(), def) {
            fails += 1;
            // Both searches are breadth first, so the shortest lengths agree.
            assert_eq!(cex.concrete_trace.len(), v.concrete.len(), "seed {seed}");
        }
    }
    assert!(fails > 0);
}

#[test]
fn fd_check_on_nondeterministic_abstract_sides_is_only_logged() {
    let (mut total, mut differ) = (0, 0);
    for (seed, p) in pairs().filter(|(_, p)| !is_event_deterministic(&p.abs).holds()) {
        total += 1;
        let k = oracle::pair_depth_bound(&p.abs, &p.conc);
        let def = oracle::oracle_failure_refines(&p.abs, &p.conc, &p.map, k).is_ok()
            && oracle::oracle_divergence_free(&p.conc, &p.skip_labels()).is_ok();
        if p.check_fd().refines() != def {
            differ += 1;
            eprintln!("seed {seed}: algorithm {} vs definition {def}", p.check_fd().refines());
        }
    }
    eprintln!("{differ} of {total} nondeterministic pairs disagree");
}

#[test]
fn failure_divergence_implies_trace_refinement() {
    for (seed, p) in pairs() {
        if p.check_fd().refines() {
            assert!(p.check_trace().refines(), "seed {seed}");
        }
    }
}

#[test]
fn literal_enumeration_agrees_with_configuration_search() {
    for (seed, p) in pairs().filter(|(_, p)| p.conc.state_count() <= 30).take(120) {
        for k in [0, 1, 3, 5] {
            assert_eq!(
                oracle::oracle_trace_refines_literal(&p.abs, &p.conc, &p.map, k),
                oracle::oracle_trace_refines(&p.abs, &p.conc, &p.map, k).is_ok(),
                "seed {seed}, k {k}"
            );
            assert_eq!(
                oracle::oracle_failure_refines_literal(&p.abs, &p.conc, &p.map, k),
                oracle::oracle_failure_refines(&p.abs, &p.conc, &p.map, k).is_ok(),
                "seed {seed}, k {k}"
            );
        }
    }
}

fn check_counterexample(seed: u64, p: &Pair, v: &Verdict) {
    let Some(cex) = v.counterexample() else { return };
    assert!(p.conc.replays(&cex.concrete_trace), "seed {seed}");
    assert!(p.abs.replays(&cex.abstract_trace), "seed {seed}");
    let mut visible = cex.concrete_trace.labels();
    if cex.reason == FailReason::TraceMismatch {
        visible.pop();
    }
    assert_eq!(p.map.tau(&visible).unwrap(), cex.abstract_trace.labels(), "seed {seed}");
    let (c, a) = (cex.concrete_trace.last(), cex.abstract_trace.last());
    let skip = p.skip_labels();
    match &cex.detail {
        Detail::Divergence { cycle } => {
            assert!(p.conc.divergent_states(&skip).contains(&c), "seed {seed}");
            assert!(!cycle.is_empty() && cycle.iter().all(|l| skip.contains(l)), "seed {seed}");
        }
        Detail::FailureMismatch { concrete_enabled, abstract_enabled, .. } => {
            assert!(p.conc.is_stable(c, &skip), "seed {seed}");
            assert_eq!(concrete_enabled, &p.conc.enabled(c));
            assert_eq!(abstract_enabled, &p.abs.enabled(a));
            assert_ne!(p.map.image(concrete_enabled), *abstract_enabled, "seed {seed}");
        }
        Detail::TraceMismatch { unmatched, image } => {
            assert_eq!(cex.concrete_trace.steps.last().map(|s| &s.0), Some(unmatched));
            assert_eq!(&p.map.psi(unmatched).unwrap(), image);
        }
    }
}

#[test]
fn counterexamples_replay_and_correspond() {
    let mut seen = BTreeSet::new();
    for (seed, p) in pairs() {
        for v in [p.check_fd(), p.check_trace()] {
            if let Some(r) = v.reason() {
                seen.insert(r.as_str());
            }
            check_counterexample(seed, &p, &v);
        }
    }
    assert_eq!(seen.len(), 3, "{seen:?}");
}

#[test]
fn enabled_comparison_is_refusal_comparison() {
    for (seed, p) in pairs().take(150) {
        let skip = p.skip_labels();
        let sigma_c: BTreeSet<EventLabel> = p.map.concrete_alphabet().clone();
        let sigma_a: BTreeSet<EventLabel> = p.map.abstract_alphabet().clone();
        for c in p.conc.stable_states(&skip) {
            let en_c = p.conc.enabled(c);
            let refused: BTreeSet<_> = sigma_c.difference(&en_c).cloned().collect();
            let abs_ref = p.map.abs_refusal(&refused);
            for a in p.abs.state_ids() {
                let en_a = p.abs.enabled(a);
                let ref_a: BTreeSet<_> = sigma_a.difference(&en_a).cloned().collect();
                assert_eq!(p.map.image(&en_c) == en_a, abs_ref == ref_a, "seed {seed}, {c:?} {a:?}");
            }
        }
    }
}

#[test]
fn tarjan_matches_path_enumeration() {
    for (seed, p) in pairs() {
        let skip = p.skip_labels();
        let scc = p.conc.divergent_states(&skip);
        assert_eq!(scc, oracle::oracle_divergent_states(&p.conc, &skip), "seed {seed}");
        match oracle::oracle_divergence_free(&p.conc, &skip) {
            Ok(()) => assert!(scc.is_empty(), "seed {seed}"),
            Err(cycle) => {
                assert!(!scc.is_empty(), "seed {seed}");
                assert!(cycle.iter().all(|l| skip.contains(l)));
            }
        }
    }
}

#[test]
fn event_determinism_implies_deterministic_refusals() {
    for (seed, p) in pairs() {
        if is_event_deterministic(&p.abs).holds() {
            assert!(oracle::oracle_event_deterministic(&p.abs).is_ok(), "seed {seed}");
        }
        if oracle::oracle_event_deterministic(&p.abs).is_err() {
            assert!(!is_event_deterministic(&p.abs).holds(), "seed {seed}");
        }
    }
}

fn brute_matches(ss: &StateSpace, m: &eventb_fdr::model::Machine) {
    let brute = oracle::brute_force_explore(m, 10_000).unwrap();
    let states: BTreeSet<Vec<Value>> = ss.state_ids().map(|s| ss.state(s).0.clone()).collect();
    assert_eq!(states, brute.states, "{}", m.name);
    let transitions: BTreeSet<_> = ss
        .transitions()
        .iter()
        .map(|t| (ss.state(t.src).0.clone(), ss.label(t.label).clone(), ss.state(t.dst).0.clone()))
        .collect();
    assert_eq!(transitions, brute.transitions, "{}", m.name);
    assert_eq!(ss.state(ss.initial()).0, brute.initial);
}

#[test]
fn exploration_matches_brute_force() {
    for seed in 0..200 {
        let (a, c) = generate_machine_pair(&RandomMachineSpec::from_seed(seed));
        for m in [a, c] {
            let ss = explore(&CompiledMachine::new(&m).unwrap(), 10_000).unwrap();
            brute_matches(&ss, &m);
        }
    }
    let dir = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    for entry in std::fs::read_dir(dir).unwrap() {
        let m = eventb_fdr::load(entry.unwrap().path()).unwrap();
        let ss = explore(&CompiledMachine::new(&m).unwrap(), 10_000).unwrap();
        brute_matches(&ss, &m);
    }
}

#[test]
fn exploration_is_reproducible() {
    for seed in 0..50 {
        let (_, c) = generate_machine_pair(&RandomMachineSpec::from_seed(seed));
        let cm = CompiledMachine::new(&c).unwrap();
        let (x, y) = (explore(&cm, 10_000).unwrap(), explore(&cm, 10_000).unwrap());
        assert_eq!(x.transitions(), y.transitions());
        assert!(x.state_ids().all(|s| x.state(s) == y.state(s)));
        assert!(x.labels().eq(y.labels()));
    }
}

#[test]
fn enabled_and_refused_partition_the_alphabet() {
    for (_, p) in pairs().take(100) {
        let skip = p.skip_labels();
        let alphabet: BTreeSet<EventLabel> = p.conc.labels().cloned().collect();
        for s in p.conc.state_ids() {
            let en = p.conc.enabled(s);
            let refused = p.conc.refusal(s, &alphabet);
            assert!(en.is_disjoint(&refused));
            assert_eq!(en.union(&refused).cloned().collect::<BTreeSet<_>>(), alphabet);
            assert_eq!(p.conc.is_stable(s, &skip), en.is_disjoint(&skip));
        }
    }
}
