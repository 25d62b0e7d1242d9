//! Corner-total and step-D bookkeeping of the recognizer over the dual
//! catalog and random one-sided duals.

use aru_layout::classify::is_one_sided;
use aru_layout::dualgraph::{dual, PlaneGraph};
use aru_layout::enumerate::{dual_catalog, random_instance, random_tree};
use aru_layout::exec::Exec;
use aru_layout::recognize::{recognize_dual_with_stats, RecognizerStats};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn corpus() -> Vec<PlaneGraph> {
    let mut out = vec![];
    for n in 1..=6 {
        let cat = dual_catalog(n, Exec::default()).unwrap();
        out.extend(cat.positive.into_iter().chain(cat.negative).map(|(g, _)| g));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    while out.len() < 300 {
        let l = random_instance(&random_tree(10, &mut rng), &mut rng);
        if l.is_generic() && is_one_sided(&l).one_sided {
            out.push(dual(&l).unwrap());
        }
    }
    out
}

fn all_stats() -> Vec<RecognizerStats> {
    corpus().iter().filter_map(|g| recognize_dual_with_stats(g).ok().map(|(_, s)| s)).collect()
}

#[test]
fn corner_total_never_drops_and_step_d_runs_once() {
    let stats = all_stats();
    let min_child = stats.iter().filter_map(|s| s.min_child_total).min();
    let decreases: usize = stats.iter().map(|s| s.total_decreases).sum();
    let max_d = stats.iter().map(|s| s.max_step_d_on_path).max().unwrap_or(0);
    let step_d_runs = stats.iter().filter(|s| s.step_d > 0).count();
    eprintln!(
        "recognizer over {} graphs: min child C(V) {:?}, C(V) decreases {}, max step-D entries on a path {}, runs reaching step D {}",
        stats.len(),
        min_child,
        decreases,
        max_d,
        step_d_runs
    );
    assert!(stats.len() >= 300);
    assert!(min_child.is_none_or(|c| c >= 2), "a split or remove produced C(V) < 2");
    assert_eq!(decreases, 0, "C(V) dropped along a recursion path");
    assert!(max_d <= 1, "step D entered {max_d} times on one path");
}
