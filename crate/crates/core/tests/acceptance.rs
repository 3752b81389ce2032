//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p graphfold --test acceptance`.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use graphfold::csp::{VarAllocator, VarId};
use graphfold::document::{ComponentDoc, DartRef};
use graphfold::face_constraints::generate_cycle_constraints;
use graphfold::geometry::{component_diameter, face_diameter};
use graphfold::oracle::generate::zigzag_face_lengths;
use graphfold::oracle::{
    brute_force_decide, crimp_check_lengths, grid_instance, random_instance, unit_grid_instance,
    verify_witness, GenMode, GenParams, DEFAULT_ANGLE_BOUND,
};
use graphfold::{
    assign_coordinates, decide, decide_with, load_instance, ComponentId, DecideOptions,
    EmbeddedGraph, FaceId, Instance, InstanceDocument, Length, UnsatReason, Verdict,
};

type Outcome = Result<String, String>;

/// Every SAT verdict produced anywhere in the suite, re-checked at the end.
#[derive(Default)]
struct WitnessLog {
    checked: usize,
    failures: Vec<String>,
}

impl WitnessLog {
    fn record(&mut self, instance: &Instance, verdict: &Verdict, label: &str) {
        let Verdict::Sat(w) = verdict else { return };
        self.checked += 1;
        let g = &instance.graph;
        for (c, comp) in g.components().iter().enumerate() {
            if comp.edges.is_empty() {
                continue;
            }
            let c = ComponentId(c as u32);
            let result = match w.exteriors.get(&c) {
                None => Err(format!("component {c} has no exterior")),
                Some(&f) => verify_witness(g, c, f, &instance.flat_angles, &w.folds),
            };
            if let Err(e) = result {
                if self.failures.len() < 5 {
                    self.failures.push(format!("{label}: {e}"));
                }
            }
        }
    }
}

fn cycle_instance(lengths: &[u32]) -> Instance {
    let lengths: Vec<Length> = lengths.iter().map(|&l| Length::from(l)).collect();
    Instance::from_graph(EmbeddedGraph::cycle(&lengths))
}

/// Every sequence of `n` values from `1..=max`, in lexicographic order.
fn sequences(n: usize, max: u32) -> impl Iterator<Item = Vec<u32>> {
    let total = (max as usize).pow(n as u32);
    (0..total).map(move |mut k| {
        (0..n)
            .map(|_| {
                let d = (k % max as usize) as u32 + 1;
                k /= max as usize;
                d
            })
            .collect()
    })
}

fn alternating_sum(lengths: &[u32]) -> i64 {
    lengths
        .iter()
        .enumerate()
        .map(|(i, &l)| if i % 2 == 0 { l as i64 } else { -(l as i64) })
        .sum()
}

fn status(v: &Verdict) -> &'static str {
    v.status()
}

fn full_diameter_faces(instance: &Instance, c: ComponentId) -> Vec<FaceId> {
    let g = &instance.graph;
    let coords = assign_coordinates(g, &instance.flat_angles).expect("SAT instances close");
    let full = component_diameter(g, &coords, c);
    g.components()[c.index()]
        .faces
        .iter()
        .copied()
        .filter(|&f| face_diameter(g, &coords, f) == full)
        .collect()
}

/// Criterion 1(a) and 6 share the exhaustive cycle sweep.
struct CycleSweep {
    agreement: Outcome,
    exteriors: Outcome,
}

fn cycle_sweep(log: &mut WitnessLog) -> CycleSweep {
    let mut disagreements = Vec::new();
    let mut counts = BTreeMap::<&str, usize>::new();
    let mut interchange_instances = 0;
    let mut interchange_runs = 0;
    let mut interchange_failures = Vec::new();
    for n in 1..=8 {
        for lengths in sequences(n, 3) {
            let instance = cycle_instance(&lengths);
            let fast = decide(&instance).expect("decide");
            let slow = brute_force_decide(&instance).expect("brute force");
            *counts.entry(status(&fast)).or_default() += 1;
            if fast.is_sat() != slow.is_sat() {
                disagreements.push(format!(
                    "{lengths:?}: decide {} brute {}",
                    status(&fast),
                    status(&slow)
                ));
            }
            log.record(&instance, &fast, &format!("cycle {lengths:?}"));
            if !fast.is_sat() {
                continue;
            }
            let faces = full_diameter_faces(&instance, ComponentId(0));
            if faces.len() < 2 {
                continue;
            }
            interchange_instances += 1;
            for f in faces {
                interchange_runs += 1;
                let options = DecideOptions {
                    exteriors: BTreeMap::from([(ComponentId(0), f)]),
                    ..Default::default()
                };
                let verdict = decide_with(&instance, &options).expect("decide").verdict;
                log.record(
                    &instance,
                    &verdict,
                    &format!("cycle {lengths:?} exterior {f}"),
                );
                if !verdict.is_sat() {
                    interchange_failures.push(format!("{lengths:?} with exterior {f}"));
                }
            }
        }
    }
    let total: usize = counts.values().sum();
    let agreement = if disagreements.is_empty() {
        Ok(format!("{total} cycles, {counts:?}, zero disagreements"))
    } else {
        Err(format!(
            "{} disagreements, first: {}",
            disagreements.len(),
            disagreements[0]
        ))
    };
    let exteriors = if interchange_failures.is_empty() && interchange_instances > 0 {
        Ok(format!(
            "{interchange_instances} SAT cycles, {interchange_runs} exterior designations, all SAT"
        ))
    } else if interchange_instances == 0 {
        Err("no SAT instance with two full-diameter faces".to_string())
    } else {
        Err(format!(
            "{} designations UNSAT, first: {}",
            interchange_failures.len(),
            interchange_failures[0]
        ))
    };
    CycleSweep {
        agreement,
        exteriors,
    }
}

#[derive(Default, Debug)]
struct Coverage {
    multi_edges: usize,
    loops: usize,
    cut_vertices: usize,
    leaves: usize,
    flats: usize,
    several_components: usize,
}

fn observe(g: &EmbeddedGraph, flats: bool, cov: &mut Coverage) {
    let mut pairs = BTreeSet::new();
    let mut multi = false;
    let mut looped = false;
    for e in g.edges() {
        let [a, b] = g.ends(e);
        looped |= a == b;
        multi |= !pairs.insert((a.min(b), a.max(b)));
    }
    let cut = g.faces().any(|f| {
        let vs: Vec<_> = g.face_vertices(f).collect();
        vs.iter().collect::<BTreeSet<_>>().len() < vs.len()
    });
    cov.multi_edges += multi as usize;
    cov.loops += looped as usize;
    cov.cut_vertices += cut as usize;
    cov.leaves += g.vertices().any(|v| g.degree(v) == 1) as usize;
    cov.flats += flats as usize;
    cov.several_components += (g.components().len() > 1) as usize;
}

fn random_sweep(log: &mut WitnessLog) -> Outcome {
    const PER_MODE: u64 = 6000;
    let mut disagreements = Vec::new();
    let mut counts = BTreeMap::<&str, usize>::new();
    let mut cov = Coverage::default();
    let mut checked = 0;
    for mode in [GenMode::Random, GenMode::Closed] {
        for seed in 0..PER_MODE {
            let size = 1 + (seed % 11) as usize;
            let instance = random_instance(seed, &GenParams::new(size, mode));
            let g = &instance.graph;
            if g.angle_count() > DEFAULT_ANGLE_BOUND {
                continue;
            }
            checked += 1;
            observe(g, !instance.flat_angles.is_empty(), &mut cov);
            let fast = decide(&instance).expect("decide");
            let slow = brute_force_decide(&instance).expect("brute force");
            let kind = fast.reason().map(UnsatReason::kind).unwrap_or("SAT");
            *counts.entry(kind).or_default() += 1;
            if fast.is_sat() != slow.is_sat() {
                disagreements.push(format!(
                    "{mode:?} seed {seed}: decide {} brute {}",
                    status(&fast),
                    status(&slow)
                ));
            }
            log.record(&instance, &fast, &format!("{mode:?} seed {seed}"));
        }
    }
    let missing: Vec<&str> = [
        ("multi-edges", cov.multi_edges),
        ("loops", cov.loops),
        ("cut vertices", cov.cut_vertices),
        ("leaves", cov.leaves),
        ("flat angles", cov.flats),
    ]
    .into_iter()
    .filter(|&(_, n)| n == 0)
    .map(|(name, _)| name)
    .collect();
    if !disagreements.is_empty() {
        Err(format!(
            "{} disagreements, first: {}",
            disagreements.len(),
            disagreements[0]
        ))
    } else if checked < 10_000 {
        Err(format!("only {checked} instances within the bound"))
    } else if !missing.is_empty() {
        Err(format!("corpus lacks {missing:?}"))
    } else {
        Ok(format!(
            "{checked} instances, {counts:?}, coverage {cov:?}, zero disagreements"
        ))
    }
}

fn kawasaki_sweep(log: &mut WitnessLog) -> Outcome {
    let mut exceptions = Vec::new();
    let mut total = 0;
    let mut sat = 0;
    for n in (2..=12).step_by(2) {
        for lengths in sequences(n, 3) {
            total += 1;
            let instance = cycle_instance(&lengths);
            let verdict = decide(&instance).expect("decide");
            sat += verdict.is_sat() as usize;
            if verdict.is_sat() != (alternating_sum(&lengths) == 0) {
                exceptions.push(format!("{lengths:?}: {}", status(&verdict)));
            }
            log.record(&instance, &verdict, &format!("even cycle {lengths:?}"));
        }
    }
    if exceptions.is_empty() {
        Ok(format!("{total} even cycles, {sat} SAT, zero exceptions"))
    } else {
        Err(format!(
            "{} exceptions, first: {}",
            exceptions.len(),
            exceptions[0]
        ))
    }
}

fn flow_shortfall_fixture(log: &mut WitnessLog) -> Outcome {
    let text = include_str!("fixtures/pocket.json");
    let instance = load_instance(text).map_err(|e| format!("fixture does not load: {e}"))?;
    let options = DecideOptions {
        keep_artifacts: true,
        ..Default::default()
    };
    let decision = decide_with(&instance, &options).map_err(|e| e.to_string())?;
    log.record(&instance, &decision.verdict, "fixture");
    let (value, required) = match decision.verdict.reason() {
        Some(UnsatReason::FlowShortfall {
            value, required, ..
        }) => (*value, *required),
        other => return Err(format!("expected a flow shortfall, got {other:?}")),
    };
    let brute = brute_force_decide(&instance).map_err(|e| e.to_string())?;
    if brute.is_sat() {
        return Err("brute force finds a folding".to_string());
    }
    let artifacts = decision
        .artifacts
        .first()
        .ok_or("no constraint system kept")?;
    let csp = &artifacts.assembly.csp;
    let dump = csp.to_text();
    let reds = dump.lines().filter(|l| l.starts_with("red")).count();
    let blues = dump.lines().filter(|l| l.starts_with("blue")).count();
    let g = &instance.graph;
    if blues != g.vertex_count() {
        return Err(format!(
            "{blues} blue clauses for {} vertices",
            g.vertex_count()
        ));
    }
    let (red_total, blue_total) = csp.totals();
    if red_total != blue_total || red_total != required {
        return Err(format!(
            "totals {red_total}/{blue_total} against required flow {required}"
        ));
    }
    println!("    constraint system of the fixture:");
    for line in dump.lines() {
        println!("      {line}");
    }
    Ok(format!(
        "UNSAT by flow shortfall ({value} < {required}); {} clauses ({reds} red, {blues} blue), {} variables",
        csp.clauses().len(),
        csp.variable_count()
    ))
}

/// Clause set of one cycle compiled to bitmasks over at most 32 variables.
struct CompiledFace {
    clauses: Vec<(u32, u32)>,
    /// `(red clause mask without y, its target, y bit, z bit)` in order.
    fresh: Vec<(u32, u32, u32, u32)>,
}

impl CompiledFace {
    fn new(lengths: &[i64], is_exterior: bool) -> CompiledFace {
        let n = lengths.len();
        let entries = lengths
            .iter()
            .enumerate()
            .map(|(i, &l)| (Length::from(l as u32), VarId(i as u32)));
        let mut alloc = VarAllocator::starting_at(n as u32);
        let fc = generate_cycle_constraints(FaceId(0), entries, is_exterior, &mut alloc);
        assert!(alloc.peek() <= 32, "too many variables for a bitmask");
        let mask = |vars: &[VarId]| vars.iter().fold(0u32, |m, v| m | 1 << v.0);
        let clauses = fc
            .clauses
            .iter()
            .map(|c| (mask(&c.vars), c.target))
            .collect();
        let fresh = fc
            .fresh
            .iter()
            .map(|p| {
                let red = &fc.clauses[p.red];
                (
                    mask(&red.vars) & !(1 << p.y.0),
                    red.target,
                    1 << p.y.0,
                    1 << p.z.0,
                )
            })
            .collect();
        CompiledFace { clauses, fresh }
    }

    fn accepts(&self, angles: u32) -> bool {
        let mut bits = angles;
        for &(mask, target, y, z) in &self.fresh {
            match target as i64 - (mask & bits).count_ones() as i64 {
                1 => bits |= y,
                0 => bits |= z,
                _ => return false,
            }
        }
        self.clauses
            .iter()
            .all(|&(mask, target)| (mask & bits).count_ones() == target)
    }
}

/// Crimp verdicts are computed once per rotation class (the predicate is a
/// property of the cyclic sequence), then compared against the clauses
/// generated for every rotation separately.
fn face_equivalence() -> Outcome {
    let mut cycles = 0;
    let mut assignments = 0u64;
    let mut accepted = 0u64;
    let mut mismatches = Vec::new();
    let mut mv = Vec::with_capacity(12);
    let mut table = Vec::with_capacity(1 << 12);
    for n in (2..=12).step_by(2) {
        let full = (1u32 << n) - 1;
        for lengths in sequences(n, 3) {
            if alternating_sum(&lengths) != 0 {
                continue;
            }
            let rotated =
                |r: usize| -> Vec<i64> { (0..n).map(|i| lengths[(i + r) % n] as i64).collect() };
            let base = rotated(0);
            if (1..n).any(|r| rotated(r) < base) {
                continue;
            }
            let period = (1..=n)
                .find(|&r| rotated(r) == base)
                .expect("rotation by n is the identity");
            for is_exterior in [false, true] {
                table.clear();
                for angles in 0u32..1 << n {
                    mv.clear();
                    mv.extend((0..n).map(|i| angles >> i & 1 == 1));
                    table.push(crimp_check_lengths(&base, &mv, is_exterior));
                }
                for r in 0..period {
                    let lengths = rotated(r);
                    let face = CompiledFace::new(&lengths, is_exterior);
                    for angles in 0u32..1 << n {
                        // Angle i of the rotation is angle i + r of the base.
                        let original = if r == 0 {
                            angles
                        } else {
                            (angles << r | angles >> (n - r)) & full
                        };
                        let by_crimp = table[original as usize];
                        let by_clauses = face.accepts(angles);
                        assignments += 1;
                        accepted += by_crimp as u64;
                        if by_crimp != by_clauses && mismatches.len() < 5 {
                            mismatches.push(format!(
                                "{lengths:?} exterior={is_exterior} mountains={angles:0n$b}: crimp {by_crimp} clauses {by_clauses}"
                            ));
                        }
                    }
                }
            }
            cycles += period;
        }
    }
    if mismatches.is_empty() {
        Ok(format!("{cycles} closed cycles, {assignments} assignments ({accepted} accepted), identical sets"))
    } else {
        Err(format!("mismatches, first: {}", mismatches[0]))
    }
}

fn median(mut xs: Vec<Duration>) -> Duration {
    xs.sort();
    xs[xs.len() / 2]
}

fn linear_generation(log: &mut WitnessLog) -> Outcome {
    const N: usize = 1_000_000;
    // 2,1,2,1,...,2 closed by one long edge: every crimp of a 1 merges its
    // neighbours into a longer edge next to the following 1, so the
    // reductions cascade around the whole face.
    let mut chain: Vec<u32> = (0..N - 1).map(|i| if i % 2 == 0 { 2 } else { 1 }).collect();
    chain.push((N / 2 + 1) as u32);
    let zigzag: Vec<Length> = zigzag_face_lengths(N, 7);
    let mut notes = Vec::new();
    for (name, lengths) in [
        (
            "cascading chain",
            chain.into_iter().map(Length::from).collect::<Vec<_>>(),
        ),
        ("zigzag", zigzag),
    ] {
        let entries: Vec<(Length, VarId)> = lengths
            .into_iter()
            .enumerate()
            .map(|(i, l)| (l, VarId(i as u32)))
            .collect();
        let mut alloc = VarAllocator::starting_at(N as u32);
        let start = Instant::now();
        let fc = generate_cycle_constraints(FaceId(0), entries, false, &mut alloc);
        let elapsed = start.elapsed();
        let clauses = fc.clauses.len();
        notes.push(format!("{name}: {clauses} clauses in {elapsed:.2?}"));
        if elapsed > Duration::from_secs(5) || clauses > 2 * N {
            return Err(format!("{N}-angle face, {}", notes.join("; ")));
        }
    }

    // End-to-end scaling on grids with about 10^3, 10^4 and 10^5 angles:
    // unit grids fold, grids with mixed lengths fail at the flow stage.
    let families: [(&str, fn(usize) -> Instance); 2] = [
        ("unit grid", |side| unit_grid_instance(side, side)),
        ("mixed grid", |side| grid_instance(side, side, 1)),
    ];
    for (name, build) in families {
        let mut points = Vec::new();
        for side in [16usize, 50, 158] {
            let instance = build(side);
            let angles = instance.graph.angle_count();
            let runs = if angles < 50_000 { 5 } else { 1 };
            let mut times = Vec::new();
            let mut last = None;
            for _ in 0..runs {
                let start = Instant::now();
                let verdict = decide(&instance).map_err(|e| e.to_string())?;
                times.push(start.elapsed());
                last = Some(verdict);
            }
            let verdict = last.expect("at least one run");
            log.record(&instance, &verdict, &format!("{name} {side}x{side}"));
            let t = median(times);
            notes.push(format!(
                "{name} {angles} angles {} in {t:.2?}",
                status(&verdict)
            ));
            points.push((angles as f64, t.as_secs_f64()));
        }
        let (x0, t0) = points[0];
        let (x2, t2) = *points.last().expect("three sizes");
        let slope = (t2 / t0).ln() / (x2 / x0).ln();
        notes.push(format!("{name} growth exponent {slope:.2}"));
        if t2 > 30.0 {
            return Err(format!(
                "largest {name} took {t2:.1}s; {}",
                notes.join("; ")
            ));
        }
        if slope > 1.3 {
            return Err(format!(
                "{name} growth exponent above 1.3; {}",
                notes.join("; ")
            ));
        }
    }
    Ok(notes.join("; "))
}

const THETA: &str = r#"{
  "vertices": ["u", "v", "a", "b", "c", "p", "q"],
  "edges": [
    {"id": "ua", "ends": ["u", "a"], "length": 4},
    {"id": "av", "ends": ["a", "v"], "length": 3},
    {"id": "ub", "ends": ["u", "b"], "length": 3},
    {"id": "bv", "ends": ["b", "v"], "length": 2},
    {"id": "uc", "ends": ["u", "c"], "length": 2},
    {"id": "cv", "ends": ["c", "v"], "length": 1},
    {"id": "pq1", "ends": ["p", "q"], "length": CHILD},
    {"id": "pq2", "ends": ["p", "q"], "length": CHILD}
  ],
  "rotation": {
    "u": [{"edge": "ua", "end": 0}, {"edge": "ub", "end": 0}, {"edge": "uc", "end": 0}],
    "v": [{"edge": "av", "end": 1}, {"edge": "cv", "end": 1}, {"edge": "bv", "end": 1}],
    "a": [{"edge": "av", "end": 0}, {"edge": "ua", "end": 1}],
    "b": [{"edge": "bv", "end": 0}, {"edge": "ub", "end": 1}],
    "c": [{"edge": "cv", "end": 0}, {"edge": "uc", "end": 1}],
    "p": [{"edge": "pq1", "end": 0}, {"edge": "pq2", "end": 0}],
    "q": [{"edge": "pq2", "end": 1}, {"edge": "pq1", "end": 1}]
  }
}"#;

fn nesting(log: &mut WitnessLog) -> Outcome {
    let mut notes = Vec::new();
    for (child, expect_sat) in [(2u32, true), (3, true), (4, false)] {
        let text = THETA.replace("CHILD", &child.to_string());
        let mut doc: InstanceDocument = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        let separate = doc.to_instance().map_err(|e| e.to_string())?;
        // Both components fold on their own.
        let alone = decide(&separate).map_err(|e| e.to_string())?;
        if !alone.is_sat() {
            return Err(format!(
                "child {child}: unlinked components do not fold: {:?}",
                alone.reason()
            ));
        }
        doc.components.push(ComponentDoc {
            root_dart: DartRef {
                edge: "pq1".into(),
                end: 0,
            },
            parent_face: DartRef {
                edge: "ub".into(),
                end: 0,
            },
        });
        let instance = doc.to_instance().map_err(|e| e.to_string())?;
        let g = &instance.graph;
        let link = instance.forest.first().ok_or("no component link")?;
        let on_face: BTreeSet<&str> = g
            .face_vertices(link.parent_face)
            .map(|v| g.vertex_name(v))
            .collect();
        if on_face != BTreeSet::from(["u", "v", "b", "c"]) {
            return Err(format!("parent face runs through {on_face:?}"));
        }
        let coords = assign_coordinates(g, &instance.flat_angles).map_err(|e| e.to_string())?;
        let child_d = component_diameter(g, &coords, link.child);
        let face_d = face_diameter(g, &coords, link.parent_face);
        let verdict = decide(&instance).map_err(|e| e.to_string())?;
        log.record(&instance, &verdict, &format!("nesting child {child}"));
        let ok = match (&verdict, expect_sat) {
            (Verdict::Sat(_), true) => true,
            (Verdict::Unsat(UnsatReason::DiameterViolation { .. }), false) => true,
            _ => false,
        };
        notes.push(format!(
            "child {child_d} in face {face_d}: {}",
            status(&verdict)
        ));
        if !ok {
            return Err(notes.join("; "));
        }
    }
    Ok(notes.join("; "))
}

fn main() -> ExitCode {
    let mut log = WitnessLog::default();
    let mut results: Vec<(u8, &str, Outcome, Duration)> = Vec::new();
    let timed = |f: &mut dyn FnMut(&mut WitnessLog) -> Outcome, log: &mut WitnessLog| {
        let start = Instant::now();
        let out = f(log);
        (out, start.elapsed())
    };

    let start = Instant::now();
    let sweep = cycle_sweep(&mut log);
    let sweep_time = start.elapsed();
    let (random, random_time) = timed(&mut random_sweep, &mut log);
    let oracle = match (&sweep.agreement, &random) {
        (Ok(a), Ok(b)) => Ok(format!("cycles: {a}; random: {b}")),
        (Err(e), _) => Err(format!("cycles: {e}")),
        (_, Err(e)) => Err(format!("random: {e}")),
    };
    results.push((1, "oracle equivalence", oracle, sweep_time + random_time));
    let (out, t) = timed(&mut kawasaki_sweep, &mut log);
    results.push((2, "alternating-sum rule on even cycles", out, t));
    let (out, t) = timed(&mut flow_shortfall_fixture, &mut log);
    results.push((3, "flow-shortfall fixture", out, t));
    let (out, t) = timed(&mut |_| face_equivalence(), &mut log);
    results.push((4, "face-constraint equivalence", out, t));
    let (out, t) = timed(&mut linear_generation, &mut log);
    results.push((5, "linear-time generation and scaling", out, t));
    results.push((
        6,
        "exterior interchangeability",
        sweep.exteriors,
        Duration::ZERO,
    ));
    let (out, t) = timed(&mut nesting, &mut log);
    results.push((7, "component nesting", out, t));
    let soundness = if log.failures.is_empty() {
        Ok(format!("{} SAT verdicts verified", log.checked))
    } else {
        Err(format!(
            "{} failures, first: {}",
            log.failures.len(),
            log.failures[0]
        ))
    };
    results.push((8, "witness soundness", soundness, Duration::ZERO));

    let mut failed = false;
    for (n, name, out, t) in &results {
        match out {
            Ok(detail) => println!("PASS {n} {name} [{t:.1?}]: {detail}"),
            Err(detail) => {
                failed = true;
                println!("FAIL {n} {name} [{t:.1?}]: {detail}");
            }
        }
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
