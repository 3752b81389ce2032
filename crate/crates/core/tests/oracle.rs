use graphfold::oracle::{
    brute_force_decide, crimp_check, crimp_check_by_choice, crimp_check_lengths, stacking_check,
    verify_witness, AssignedCycle,
};
use graphfold::{ComponentId, EmbeddedGraph, FaceId, Fold, Instance, Length, Verdict};

fn closed_cycles(n: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for mut k in 0..3usize.pow(n as u32) {
        let lengths: Vec<i64> = (0..n)
            .map(|_| {
                let d = (k % 3) as i64 + 1;
                k /= 3;
                d
            })
            .collect();
        let alt: i64 = lengths
            .iter()
            .enumerate()
            .map(|(i, &l)| if i % 2 == 0 { l } else { -l })
            .sum();
        if alt == 0 {
            out.push(lengths);
        }
    }
    out
}

fn bits(mask: u32, n: usize) -> Vec<bool> {
    (0..n).map(|i| mask >> i & 1 == 1).collect()
}

#[test]
fn crimp_examples() {
    let cycle = |l: [u32; 4], m: [bool; 4]| {
        crimp_check(&AssignedCycle::new(
            l.map(Length::from).to_vec(),
            m.to_vec(),
            false,
        ))
    };
    assert!(cycle([1, 1, 1, 1], [true, false, false, false]));
    assert!(!cycle([1, 1, 1, 1], [true, true, false, false]));
    // Angles after edges 0 and 1 sit on the short edge.
    assert!(cycle([2, 1, 2, 3], [true, false, false, false]));
    assert!(cycle([2, 1, 2, 3], [false, true, false, false]));
    assert!(!cycle([2, 1, 2, 3], [true, true, false, false]));
}

#[test]
fn crimp_matches_layer_search_up_to_eight_edges() {
    let mut accepted = 0;
    for n in (2..=8).step_by(2) {
        for lengths in closed_cycles(n) {
            for mask in 0..1u32 << n {
                let mv = bits(mask, n);
                for ext in [false, true] {
                    let crimp = crimp_check_lengths(&lengths, &mv, ext);
                    let stack = stacking_check(&lengths, &mv, ext);
                    assert_eq!(crimp, stack, "{lengths:?} {mv:?} exterior={ext}");
                    accepted += crimp as usize;
                }
            }
        }
    }
    assert!(accepted > 1000);
}

#[test]
fn layer_search_rejects_open_cycles() {
    assert!(!stacking_check(
        &[1, 2, 1, 2],
        &[true, false, false, false],
        false
    ));
    assert!(!stacking_check(&[1, 1, 1], &[true, false, false], false));
}

/// Runs the naive crimp under every sequence of run choices.
fn all_choice_outcomes(lengths: &[i64], mv: &[bool], ext: bool) -> Vec<bool> {
    let mut outcomes = Vec::new();
    let mut script: Vec<usize> = Vec::new();
    loop {
        let mut widths = Vec::new();
        let mut step = 0;
        let result = crimp_check_by_choice(lengths, mv, ext, |options| {
            let pick = script.get(step).copied().unwrap_or(0);
            widths.push(options.len());
            step += 1;
            pick
        });
        outcomes.push(result);
        script.resize(widths.len(), 0);
        // Advance the deepest choice that still has alternatives.
        loop {
            match script.len() {
                0 => return outcomes,
                d => {
                    script[d - 1] += 1;
                    if script[d - 1] < widths[d - 1] {
                        break;
                    }
                    script.pop();
                    widths.pop();
                }
            }
        }
    }
}

#[test]
fn crimp_order_does_not_matter() {
    let mut multi = 0;
    for n in (2..=10).step_by(2) {
        for (i, lengths) in closed_cycles(n).into_iter().enumerate() {
            // Every cycle up to eight edges, a stride through the ten-edge ones.
            if n == 10 && i % 7 != 0 {
                continue;
            }
            for mask in 0..1u32 << n {
                let mv = bits(mask, n);
                for ext in [false, true] {
                    let outcomes = all_choice_outcomes(&lengths, &mv, ext);
                    let linear = crimp_check_lengths(&lengths, &mv, ext);
                    assert!(
                        outcomes.iter().all(|&o| o == linear),
                        "{lengths:?} {mv:?} exterior={ext}"
                    );
                    multi += (outcomes.len() > 1) as usize;
                }
            }
        }
    }
    assert!(multi > 0);
}

fn cycle(values: &[u32]) -> Instance {
    let lengths: Vec<Length> = values.iter().map(|&v| Length::from(v)).collect();
    Instance::from_graph(EmbeddedGraph::cycle(&lengths))
}

#[test]
fn unit_square_has_four_witnesses() {
    let instance = cycle(&[1, 1, 1, 1]);
    let g = &instance.graph;
    let n = g.angle_count();
    assert_eq!(n, 8);
    let witnesses = (0..1u32 << n)
        .filter(|&mask| {
            let folds: Vec<Fold> = bits(mask, n)
                .into_iter()
                .map(|m| if m { Fold::Mountain } else { Fold::Valley })
                .collect();
            verify_witness(g, ComponentId(0), FaceId(0), &instance.flat_angles, &folds).is_ok()
        })
        .count();
    assert_eq!(witnesses, 4);
    assert!(brute_force_decide(&instance).unwrap().is_sat());
}

#[test]
fn brute_force_examples() {
    assert!(!brute_force_decide(&cycle(&[1, 2, 1, 2])).unwrap().is_sat());
    let Verdict::Sat(w) = brute_force_decide(&cycle(&[3, 3])).unwrap() else {
        panic!("parallel pair folds")
    };
    assert_eq!(w.folds.iter().filter(|&&f| f == Fold::Mountain).count(), 2);
    let too_big = cycle(&[1; 12]);
    assert!(brute_force_decide(&too_big).is_err());
}
