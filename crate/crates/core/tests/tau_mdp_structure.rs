mod common;

use std::path::Path;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stl_qlearn::experiment::{ExperimentConfig, Prepared};
use stl_qlearn::gridworld::{rollout, Action, QuotientGraph};
use stl_qlearn::stl::{robustness, Signal};
use stl_qlearn::tau_mdp::{
    signed_distances, trace, Class, StateTable, TauState, DEFAULT_STATE_CAP, UNREACHABLE,
};

fn config(name: &str) -> ExperimentConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    ExperimentConfig::from_file(&path).unwrap()
}

#[test]
fn reachable_counts_match_walk_counting() {
    for nx in 1..=4 {
        for ny in 1..=4 {
            let g = QuotientGraph::grid(nx, ny);
            for tau in 1..=4 {
                for c0 in 0..nx * ny {
                    let t = StateTable::enumerate_reachable(&g, tau, &[c0], DEFAULT_STATE_CAP).unwrap();
                    assert_eq!(
                        t.len(),
                        common::reachable_count_oracle(nx, ny, tau, &[c0]),
                        "{nx}x{ny} tau {tau} from {c0}"
                    );
                }
                let all: Vec<usize> = (0..nx * ny).collect();
                let t = StateTable::enumerate_reachable(&g, tau, &all, DEFAULT_STATE_CAP).unwrap();
                assert_eq!(t.len(), common::reachable_count_oracle(nx, ny, tau, &all));
            }
        }
    }
}

#[test]
fn small_grid_examples() {
    let t = StateTable::enumerate_reachable(&QuotientGraph::grid(1, 1), 2, &[0], 10).unwrap();
    assert_eq!(t.len(), 2);
    let t = StateTable::enumerate_reachable(&QuotientGraph::grid(2, 1), 2, &[0, 1], 10).unwrap();
    assert_eq!(t.len(), 6);
    assert_eq!(t.states().iter().filter(|s| s.is_padded()).count(), 2);
}

#[test]
fn trace_cases() {
    let regions = [3, 1, 4, 1, 5];
    assert_eq!(trace(&regions, 0, 3).entries(), &[None, None, Some(3)]);
    assert_eq!(trace(&regions, 1, 3).entries(), &[None, Some(3), Some(1)]);
    assert_eq!(trace(&regions, 2, 3).entries(), &[Some(3), Some(1), Some(4)]);
    assert_eq!(trace(&regions, 4, 3).entries(), &[Some(4), Some(1), Some(5)]);
    assert_eq!(trace(&regions, 4, 1).entries(), &[Some(5)]);
    assert!(trace(&regions, 1, 3).is_padded());
    assert!(!trace(&regions, 2, 3).is_padded());
    // ε only as a prefix
    assert!(TauState::new(vec![Some(0), None]).is_err());
    assert!(TauState::new(vec![None, Some(0)]).is_ok());
    assert!(TauState::new(vec![None, None]).is_err());
}

fn random_graph<R: Rng>(rng: &mut R, n: usize) -> (Vec<Vec<usize>>, Vec<bool>) {
    let p = rng.gen_range(0.5..4.0) / n as f64;
    let succ = (0..n)
        .map(|_| (0..n).filter(|_| rng.gen_bool(p.min(1.0))).collect())
        .collect();
    let mut in_set: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.3)).collect();
    in_set[0] = true;
    in_set[n - 1] = false;
    (succ, in_set)
}

#[test]
fn distances_match_floyd_warshall() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for case in 0..60 {
        let n = if case % 10 == 0 { 200 } else { rng.gen_range(2..60) };
        let (succ, in_set) = random_graph(&mut rng, n);
        assert_eq!(
            signed_distances(&succ, &in_set).unwrap(),
            common::floyd_warshall_signed(&succ, &in_set)
        );
    }
}

#[test]
fn distances_on_tau_tables() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for (nx, ny, tau) in [(2, 2, 2), (3, 3, 2), (3, 2, 3), (2, 2, 3)] {
        let t = StateTable::enumerate_reachable(&QuotientGraph::grid(nx, ny), tau, &[0], 200).unwrap();
        let mut in_set: Vec<bool> = (0..t.len()).map(|_| rng.gen_bool(0.2)).collect();
        in_set[0] = false;
        in_set[t.len() - 1] = true;
        assert_eq!(
            signed_distances(t.successor_lists(), &in_set).unwrap(),
            common::floyd_warshall_signed(t.successor_lists(), &in_set)
        );
    }
}

proptest! {
    #[test]
    fn distance_sign_is_membership(seed in any::<u64>(), n in 2usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (succ, in_set) = random_graph(&mut rng, n);
        let d = signed_distances(&succ, &in_set).unwrap();
        for s in 0..n {
            if in_set[s] { prop_assert!(d[s] <= 0); } else { prop_assert!(d[s] > 0); }
        }
        prop_assert!(d.iter().all(|&v| v != 0 || in_set.iter().any(|&b| b)));
    }
}

#[test]
fn degenerate_sets_rejected() {
    let succ = vec![vec![1], vec![0]];
    assert!(signed_distances(&succ, &[true, true]).is_err());
    assert!(signed_distances(&succ, &[false, false]).is_err());
    let d = signed_distances(&[vec![0], vec![1]], &[true, false]).unwrap();
    assert_eq!(d, vec![-UNREACHABLE, UNREACHABLE]);
}

#[test]
fn simulated_transitions_are_admissible() {
    let prep = Prepared::new(&config("cs1.cfg")).unwrap();
    let (layout, noise) = (&prep.setup.layout, &prep.setup.noise);
    let graph = QuotientGraph::from_layout(layout);
    let tau = prep.table.tau();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut pick = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    while checked < 100_000 {
        let ep = rollout(layout, noise, tau, 25, &mut rng, |_, _| Action::ALL[pick.gen_range(0..4)]);
        for w in ep.states.windows(2) {
            let a = prep.table.id_of(&w[0]).expect("reachable state");
            let b = prep.table.id_of(&w[1]).expect("reachable state");
            assert!(w[0].admits(&w[1], &graph));
            assert!(prep.table.successors(a).contains(&b));
            checked += 1;
        }
    }
}

#[test]
fn classification_is_sound_on_sampled_trajectories() {
    for name in ["cs1.cfg", "cs2.cfg"] {
        let prep = Prepared::new(&config(name)).unwrap();
        let layout = &prep.setup.layout;
        let psi = prep.setup.spec.top_level().unwrap().inner;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let full: Vec<usize> = (0..prep.table.len())
            .filter(|&id| !prep.table.state(id).is_padded())
            .collect();
        let sat: Vec<usize> = full.iter().copied().filter(|&id| prep.classes.class(id) == Class::Sat).collect();
        let unsat: Vec<usize> = full.iter().copied().filter(|&id| prep.classes.class(id) == Class::Unsat).collect();
        assert!(!sat.is_empty());
        let mut picked: Vec<usize> = sat.iter().step_by((sat.len() / 40).max(1)).copied().collect();
        picked.extend(unsat.iter().step_by((unsat.len() / 40).max(1)));
        for id in picked {
            let cells: Vec<usize> = prep.table.state(id).cells().collect();
            for _ in 0..1000 {
                let samples = cells
                    .iter()
                    .map(|&c| {
                        let (lo, hi) = layout.cell_box(layout.cell_at(c));
                        vec![rng.gen_range(lo[0]..hi[0]), rng.gen_range(lo[1]..hi[1])]
                    })
                    .collect();
                let r = robustness(&Signal::from_samples(samples).unwrap(), &psi, 0).unwrap();
                match prep.classes.class(id) {
                    Class::Sat => assert!(r >= 0.0, "{name}: SAT state {id} gave {r}"),
                    Class::Unsat => assert!(r <= 0.0, "{name}: UNSAT state {id} gave {r}"),
                    Class::Mixed => unreachable!(),
                }
            }
        }
    }
}

#[test]
fn case_study_layouts_have_satisfying_states() {
    for name in ["cs1.cfg", "cs2.cfg"] {
        let prep = Prepared::new(&config(name)).unwrap();
        assert!(prep.classes.count(Class::Sat) > 0, "{name}");
        assert_eq!(prep.classes.count(Class::Mixed), 0, "{name}");
    }
}
