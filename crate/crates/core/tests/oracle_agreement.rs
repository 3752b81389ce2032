use graphfold::oracle::{
    brute_force_decide, random_instance, verify_witness, GenMode, GenParams, DEFAULT_ANGLE_BOUND,
};
use graphfold::{decide, ComponentId, Instance, Verdict};

fn check(instance: &Instance, label: &str) {
    let fast = decide(instance).unwrap_or_else(|e| panic!("{label}: decide failed: {e}"));
    let slow =
        brute_force_decide(instance).unwrap_or_else(|e| panic!("{label}: brute force failed: {e}"));
    assert_eq!(
        fast.is_sat(),
        slow.is_sat(),
        "{label}: decide {fast:?} vs brute {slow:?}"
    );
    if let Verdict::Sat(w) = &fast {
        let g = &instance.graph;
        for (c, &f) in &w.exteriors {
            verify_witness(g, *c, f, &instance.flat_angles, &w.folds)
                .unwrap_or_else(|e| panic!("{label}: {e}"));
        }
        for c in 0..g.components().len() {
            let c = ComponentId(c as u32);
            if !g.components()[c.index()].edges.is_empty() {
                assert!(
                    w.exteriors.contains_key(&c),
                    "{label}: component {c} has no exterior"
                );
            }
        }
    }
}

#[test]
fn random_instances_agree() {
    for mode in [GenMode::Random, GenMode::Closed] {
        for seed in 0..400u64 {
            let size = 1 + (seed % 10) as usize;
            let instance = random_instance(seed, &GenParams::new(size, mode));
            if instance.graph.angle_count() > DEFAULT_ANGLE_BOUND {
                continue;
            }
            check(&instance, &format!("{mode:?} seed {seed}"));
        }
    }
}

#[test]
fn zero_alternating_cycles_agree() {
    for seed in 0..100u64 {
        let instance = random_instance(
            seed,
            &GenParams::new(2 + (seed % 9) as usize, GenMode::Cycle),
        );
        check(&instance, &format!("cycle seed {seed}"));
        assert!(
            decide(&instance).unwrap().is_sat(),
            "cycle seed {seed} should fold"
        );
    }
}
