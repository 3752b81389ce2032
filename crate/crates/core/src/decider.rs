//! The full decision pipeline: flat-angle validation, coordinates and
//! closure, exterior selection, constraint assembly, max-flow, witness
//! verification and the nesting check between components.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;

use crate::csp::{assemble, Assembly, VarId};
use crate::document::Instance;
use crate::error::DecideError;
use crate::flow::{csp_to_flow, extract_assignment, Dinic, FlowNetwork, MaxFlowBackend};
use crate::geometry::{
    component_diameter, face_closure_check, face_diameter, place_component, Coord, CoordinateMap,
};
use crate::graph::{AngleId, ComponentId, EdgeId, EmbeddedGraph, FaceId, VertexId};
use crate::length::format_rational;
use crate::oracle::verify_witness;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fold {
    Mountain,
    Valley,
    Flat,
}

impl Fold {
    pub fn as_str(self) -> &'static str {
        match self {
            Fold::Mountain => "M",
            Fold::Valley => "V",
            Fold::Flat => "F",
        }
    }

    pub fn parse(s: &str) -> Option<Fold> {
        match s {
            "M" => Some(Fold::Mountain),
            "V" => Some(Fold::Valley),
            "F" => Some(Fold::Flat),
            _ => None,
        }
    }
}

/// Why an instance has no flat folding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnsatReason {
    /// Forced coordinates disagree along an edge, or a face fails closure.
    ClosureViolation {
        component: ComponentId,
        edge: Option<EdgeId>,
        face: Option<FaceId>,
        detail: String,
    },
    /// A vertex with a number of flat angles other than 0 or 2.
    FlatCountViolation { vertex: VertexId, count: usize },
    TotalsMismatch {
        component: ComponentId,
        red: u64,
        blue: u64,
    },
    FlowShortfall {
        component: ComponentId,
        value: u64,
        required: u64,
    },
    DiameterViolation {
        child: ComponentId,
        parent_face: FaceId,
        child_diameter: Coord,
        face_diameter: Coord,
    },
    /// Every full-diameter face of the component holds a child component.
    NoAdmissibleExterior { component: ComponentId },
    /// Exhaustive search found nothing; only reported by the brute-force oracle.
    NoValidAssignment { component: ComponentId },
}

impl UnsatReason {
    /// Short machine-readable name.
    pub fn kind(&self) -> &'static str {
        match self {
            UnsatReason::ClosureViolation { .. } => "closure violation",
            UnsatReason::FlatCountViolation { .. } => "flat-angle count violation",
            UnsatReason::TotalsMismatch { .. } => "totals mismatch",
            UnsatReason::FlowShortfall { .. } => "flow shortfall",
            UnsatReason::DiameterViolation { .. } => "diameter nesting violation",
            UnsatReason::NoAdmissibleExterior { .. } => "no admissible exterior face",
            UnsatReason::NoValidAssignment { .. } => "no valid assignment",
        }
    }
}

impl fmt::Display for UnsatReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnsatReason::ClosureViolation {
                component, detail, ..
            } => {
                write!(f, "closure violation in component {component}: {detail}")
            }
            UnsatReason::FlatCountViolation { vertex, count } => {
                write!(
                    f,
                    "vertex {vertex} has {count} flat angles; it needs 0 or 2"
                )
            }
            UnsatReason::TotalsMismatch {
                component,
                red,
                blue,
            } => {
                write!(
                    f,
                    "component {component}: red targets sum to {red}, blue to {blue}"
                )
            }
            UnsatReason::FlowShortfall {
                component,
                value,
                required,
            } => {
                write!(
                    f,
                    "component {component}: max flow {value} is below {required}"
                )
            }
            UnsatReason::DiameterViolation {
                child,
                parent_face,
                child_diameter,
                face_diameter,
            } => write!(
                f,
                "component {child} has folded diameter {} but face {parent_face} only {}",
                format_rational(child_diameter),
                format_rational(face_diameter)
            ),
            UnsatReason::NoAdmissibleExterior { component } => {
                write!(
                    f,
                    "component {component}: every full-diameter face holds a child component"
                )
            }
            UnsatReason::NoValidAssignment { component } => {
                write!(
                    f,
                    "component {component}: no mountain/valley assignment folds flat"
                )
            }
        }
    }
}

/// A verified flat-foldable assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    /// Indexed by angle id.
    pub folds: Vec<Fold>,
    pub coords: CoordinateMap,
    pub exteriors: BTreeMap<ComponentId, FaceId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Sat(Witness),
    Unsat(UnsatReason),
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat(_))
    }

    pub fn status(&self) -> &'static str {
        if self.is_sat() {
            "SAT"
        } else {
            "UNSAT"
        }
    }

    pub fn reason(&self) -> Option<&UnsatReason> {
        match self {
            Verdict::Sat(_) => None,
            Verdict::Unsat(r) => Some(r),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct DecideOptions {
    /// Exterior faces to use instead of the instance's designation or the
    /// automatic choice.
    pub exteriors: BTreeMap<ComponentId, FaceId>,
    /// Keep the constraint system and flow network of every component.
    pub keep_artifacts: bool,
    /// Decide components on the rayon pool.
    pub parallel: bool,
}

/// Intermediate results for one component that reached assembly.
#[derive(Clone, Debug)]
pub struct ComponentArtifacts {
    pub component: ComponentId,
    pub exterior: FaceId,
    pub assembly: Assembly,
    pub network: FlowNetwork,
    pub flow_value: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub angles: usize,
    pub clauses: usize,
    pub variables: usize,
    pub flow_value: u64,
}

#[derive(Clone, Debug)]
pub struct Decision {
    pub verdict: Verdict,
    pub stats: Stats,
    /// Filled when `keep_artifacts` is set, in component order.
    pub artifacts: Vec<ComponentArtifacts>,
}

pub fn decide(instance: &Instance) -> Result<Verdict, DecideError> {
    Ok(decide_with(instance, &DecideOptions::default())?.verdict)
}

/// Flat angles at `v` must number 0 or 2.
pub fn check_flat_counts(g: &EmbeddedGraph, flats: &BTreeSet<AngleId>) -> Result<(), UnsatReason> {
    for v in g.vertices() {
        let count = g
            .rotation(v)
            .iter()
            .filter(|d| flats.contains(&d.angle()))
            .count();
        if count != 0 && count != 2 {
            return Err(UnsatReason::FlatCountViolation { vertex: v, count });
        }
    }
    Ok(())
}

/// Lowest-id face of `component` whose folded diameter equals the
/// component's, skipping `excluded`.
pub fn choose_exterior(
    g: &EmbeddedGraph,
    component: ComponentId,
    coords: &CoordinateMap,
    excluded: &BTreeSet<FaceId>,
) -> Option<FaceId> {
    let full = component_diameter(g, coords, component);
    g.components()[component.index()]
        .faces
        .iter()
        .copied()
        .find(|f| !excluded.contains(f) && face_diameter(g, coords, *f) == full)
}

/// Children must fit inside their parent faces: folded diameter of the
/// child at most that of the face.
pub fn check_component_nesting(
    instance: &Instance,
    coords: &CoordinateMap,
) -> Result<(), UnsatReason> {
    let g = &instance.graph;
    for link in &instance.forest {
        let child_diameter = component_diameter(g, coords, link.child);
        let face_diameter = face_diameter(g, coords, link.parent_face);
        if child_diameter > face_diameter {
            return Err(UnsatReason::DiameterViolation {
                child: link.child,
                parent_face: link.parent_face,
                child_diameter,
                face_diameter,
            });
        }
    }
    Ok(())
}

/// First variable id used for fresh variables of each component. Ranges
/// are disjoint so components can be assembled independently.
fn fresh_bases(g: &EmbeddedGraph) -> Vec<u32> {
    let mut next = g.angle_count() as u32;
    g.components()
        .iter()
        .map(|c| {
            let base = next;
            let darts: usize = c.edges.len() * 2;
            next += darts as u32;
            base
        })
        .collect()
}

struct ComponentOutcome {
    coords: CoordinateMap,
    result: Result<ComponentSat, UnsatReason>,
    artifacts: Option<ComponentArtifacts>,
    clauses: usize,
    variables: usize,
    flow_value: u64,
}

struct ComponentSat {
    exterior: Option<FaceId>,
    /// `(angle, fold)` for every angle of the component.
    folds: Vec<(AngleId, Fold)>,
}

pub fn decide_with(instance: &Instance, options: &DecideOptions) -> Result<Decision, DecideError> {
    let g = &instance.graph;
    let flats = &instance.flat_angles;
    let mut stats = Stats {
        angles: g.angle_count(),
        ..Stats::default()
    };
    if let Err(reason) = check_flat_counts(g, flats) {
        return Ok(Decision {
            verdict: Verdict::Unsat(reason),
            stats,
            artifacts: Vec::new(),
        });
    }
    let mut exteriors = instance.exterior_faces();
    exteriors.extend(options.exteriors.iter().map(|(&c, &f)| (c, f)));
    let parent_faces: BTreeSet<FaceId> = instance.forest.iter().map(|l| l.parent_face).collect();
    let bases = fresh_bases(g);

    let run = |c: usize| {
        let c = ComponentId(c as u32);
        decide_component(
            g,
            c,
            flats,
            exteriors.get(&c).copied(),
            &parent_faces,
            bases[c.index()],
            options.keep_artifacts,
        )
    };
    let outcomes: Vec<Result<ComponentOutcome, DecideError>> = if options.parallel {
        (0..g.components().len()).into_par_iter().map(run).collect()
    } else {
        (0..g.components().len()).map(run).collect()
    };

    let mut coords = CoordinateMap::new(g);
    let mut folds = vec![Fold::Valley; g.angle_count()];
    let mut chosen = BTreeMap::new();
    let mut artifacts = Vec::new();
    let mut failure = None;
    for (c, outcome) in outcomes.into_iter().enumerate() {
        let outcome = outcome?;
        let c = ComponentId(c as u32);
        coords.absorb(g, c, &outcome.coords);
        stats.clauses += outcome.clauses;
        stats.variables += outcome.variables;
        stats.flow_value += outcome.flow_value;
        artifacts.extend(outcome.artifacts);
        match outcome.result {
            Ok(sat) => {
                for (a, fold) in sat.folds {
                    folds[a.index()] = fold;
                }
                if let Some(f) = sat.exterior {
                    chosen.insert(c, f);
                }
            }
            Err(reason) => {
                failure.get_or_insert(reason);
            }
        }
    }
    let verdict = match failure {
        Some(reason) => Verdict::Unsat(reason),
        None => match check_component_nesting(instance, &coords) {
            Err(reason) => Verdict::Unsat(reason),
            Ok(()) => Verdict::Sat(Witness {
                folds,
                coords,
                exteriors: chosen,
            }),
        },
    };
    Ok(Decision {
        verdict,
        stats,
        artifacts,
    })
}

fn decide_component(
    g: &EmbeddedGraph,
    c: ComponentId,
    flats: &BTreeSet<AngleId>,
    designated: Option<FaceId>,
    parent_faces: &BTreeSet<FaceId>,
    fresh_base: u32,
    keep_artifacts: bool,
) -> Result<ComponentOutcome, DecideError> {
    let comp = &g.components()[c.index()];
    let mut coords = CoordinateMap::new(g);
    let outcome = |coords: CoordinateMap, result| ComponentOutcome {
        coords,
        result,
        artifacts: None,
        clauses: 0,
        variables: 0,
        flow_value: 0,
    };
    if let Err(v) = place_component(g, c, flats, &mut coords) {
        let reason = UnsatReason::ClosureViolation {
            component: c,
            edge: Some(v.edge),
            face: None,
            detail: v.detail,
        };
        return Ok(outcome(coords, Err(reason)));
    }
    if comp.edges.is_empty() {
        return Ok(outcome(
            coords,
            Ok(ComponentSat {
                exterior: None,
                folds: Vec::new(),
            }),
        ));
    }
    for &f in &comp.faces {
        if let Err(v) = face_closure_check(&g.face_cycle_with_flats(f, flats, false)) {
            let reason = UnsatReason::ClosureViolation {
                component: c,
                edge: None,
                face: Some(f),
                detail: v.to_string(),
            };
            return Ok(outcome(coords, Err(reason)));
        }
    }
    let exterior = match designated.or_else(|| choose_exterior(g, c, &coords, parent_faces)) {
        Some(f) => f,
        None => {
            return Ok(outcome(
                coords,
                Err(UnsatReason::NoAdmissibleExterior { component: c }),
            ))
        }
    };

    let assembly = assemble(g, c, exterior, flats, fresh_base)
        .map_err(|e| DecideError::Internal(e.to_string()))?;
    let csp = &assembly.csp;
    let (red, blue) = csp.totals();
    let clauses = csp.clauses().len();
    let variables = csp.variable_count();
    let finish = |coords, result, network: Option<FlowNetwork>, flow_value, assembly: Assembly| {
        ComponentOutcome {
            coords,
            result,
            artifacts: match (keep_artifacts, network) {
                (true, Some(network)) => Some(ComponentArtifacts {
                    component: c,
                    exterior,
                    assembly,
                    network,
                    flow_value,
                }),
                _ => None,
            },
            clauses,
            variables,
            flow_value,
        }
    };
    if red != blue {
        let network = keep_artifacts.then(|| csp_to_flow(csp));
        return Ok(finish(
            coords,
            Err(UnsatReason::TotalsMismatch {
                component: c,
                red,
                blue,
            }),
            network,
            0,
            assembly,
        ));
    }
    let network = csp_to_flow(csp);
    let flow = Dinic.max_flow(&network);
    let assignment = match extract_assignment(&network, &flow) {
        Ok(a) => a,
        Err(s) => {
            let reason = UnsatReason::FlowShortfall {
                component: c,
                value: s.value,
                required: s.required,
            };
            return Ok(finish(
                coords,
                Err(reason),
                Some(network),
                flow.value,
                assembly,
            ));
        }
    };
    if let Some(i) = csp.first_violated(&assignment) {
        return Err(DecideError::Internal(format!(
            "extracted assignment violates clause {i} of component {c}"
        )));
    }

    let mut folds = Vec::with_capacity(comp.edges.len() * 2);
    for &v in &comp.vertices {
        for &d in g.rotation(v) {
            let a = d.angle();
            let fold = if flats.contains(&a) {
                Fold::Flat
            } else {
                match assignment.get(VarId::angle(a)) {
                    Some(true) => Fold::Mountain,
                    Some(false) => Fold::Valley,
                    None => return Err(DecideError::Internal(format!("angle {a} has no value"))),
                }
            };
            folds.push((a, fold));
        }
    }
    let mut all = vec![Fold::Valley; g.angle_count()];
    for &(a, fold) in &folds {
        all[a.index()] = fold;
    }
    verify_witness(g, c, exterior, flats, &all).map_err(|e| {
        DecideError::Internal(format!(
            "witness for component {c} failed verification: {e}"
        ))
    })?;
    Ok(finish(
        coords,
        Ok(ComponentSat {
            exterior: Some(exterior),
            folds,
        }),
        Some(network),
        flow.value,
        assembly,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::ComponentLink;
    use crate::graph::{DartId, GraphBuilder};
    use crate::length::Length;
    use crate::oracle::brute_force_decide_with;

    fn cycle(values: &[u32]) -> Instance {
        let lengths: Vec<Length> = values.iter().map(|&v| Length::from(v)).collect();
        Instance::from_graph(EmbeddedGraph::cycle(&lengths))
    }

    fn reason(instance: &Instance) -> UnsatReason {
        match decide(instance).unwrap() {
            Verdict::Unsat(r) => r,
            Verdict::Sat(_) => panic!("expected UNSAT"),
        }
    }

    fn int(v: i64) -> Coord {
        Coord::from_integer(v.into())
    }

    /// Three two-edge paths from u (at 0) to v (at 1) turning at 4, 3 and
    /// 2, optionally followed by a two-edge child cycle of the given length.
    fn theta(child: Option<u32>) -> Instance {
        let mut b = GraphBuilder::new();
        let u = b.add_vertex("u");
        let v = b.add_vertex("v");
        let mut firsts = Vec::new();
        let mut seconds = Vec::new();
        for (name, to_mid, to_v) in [("a", 4, 3), ("b", 3, 2), ("c", 2, 1)] {
            let m = b.add_vertex(name);
            let e1 = b.add_edge(format!("u{name}"), u, m, Length::from(to_mid));
            let e2 = b.add_edge(format!("{name}v"), m, v, Length::from(to_v));
            b.push_rotation(m, DartId::new(e2, 0));
            b.push_rotation(m, DartId::new(e1, 1));
            firsts.push(DartId::new(e1, 0));
            seconds.push(DartId::new(e2, 1));
        }
        for d in firsts {
            b.push_rotation(u, d);
        }
        for i in [0, 2, 1] {
            b.push_rotation(v, seconds[i]);
        }
        if let Some(len) = child {
            let p = b.add_vertex("p");
            let q = b.add_vertex("q");
            let e1 = b.add_edge("pq1", p, q, Length::from(len));
            let e2 = b.add_edge("pq2", p, q, Length::from(len));
            b.push_rotation(p, DartId::new(e1, 0));
            b.push_rotation(p, DartId::new(e2, 0));
            b.push_rotation(q, DartId::new(e2, 1));
            b.push_rotation(q, DartId::new(e1, 1));
        }
        let graph = b.build().unwrap();
        let mut instance = Instance::from_graph(graph);
        if child.is_some() {
            let f = face_through(&instance.graph, &["b", "c"]);
            instance.forest.push(ComponentLink {
                child: ComponentId(1),
                parent: ComponentId(0),
                parent_face: f,
            });
        }
        instance
    }

    /// The face of component 0 passing through exactly the named turning
    /// vertices.
    fn face_through(g: &EmbeddedGraph, names: &[&str]) -> FaceId {
        let mids = ["a", "b", "c"];
        g.components()[0]
            .faces
            .iter()
            .copied()
            .find(|&f| {
                let on: BTreeSet<&str> = g
                    .face_vertices(f)
                    .map(|v| g.vertex_name(v))
                    .filter(|n| mids.contains(n))
                    .collect();
                on == names.iter().copied().collect()
            })
            .unwrap()
    }

    #[test]
    fn square_folds_with_one_mountain_per_vertex() {
        let instance = cycle(&[1, 1, 1, 1]);
        let Verdict::Sat(w) = decide(&instance).unwrap() else {
            panic!("square must fold")
        };
        let g = &instance.graph;
        for v in g.vertices() {
            let m = g
                .rotation(v)
                .iter()
                .filter(|d| w.folds[d.angle().index()] == Fold::Mountain)
                .count();
            assert_eq!(m, 1);
        }
        assert_eq!(w.exteriors, BTreeMap::from([(ComponentId(0), FaceId(0))]));
        let xs: Vec<Coord> = g
            .vertices()
            .map(|v| w.coords.get(v).unwrap().clone())
            .collect();
        assert_eq!(xs, [int(0), int(1), int(0), int(1)]);
    }

    #[test]
    fn parallel_pair_folds_and_mismatched_square_does_not() {
        assert!(decide(&cycle(&[3, 3])).unwrap().is_sat());
        assert_eq!(reason(&cycle(&[1, 2, 1, 2])).kind(), "closure violation");
    }

    #[test]
    fn single_flat_angle_is_rejected() {
        let mut instance = cycle(&[1, 1, 1, 1]);
        instance.flat_angles.insert(AngleId(0));
        assert_eq!(
            reason(&instance),
            UnsatReason::FlatCountViolation {
                vertex: VertexId(0),
                count: 1
            }
        );
    }

    #[test]
    fn straight_vertex_merges_its_edges() {
        // Both angles at v0 flat: faces become [2, 1, 1], which cannot close.
        let mut instance = cycle(&[1, 1, 1, 1]);
        let g = &instance.graph;
        let both: Vec<AngleId> = g.rotation(VertexId(0)).iter().map(|d| d.angle()).collect();
        instance.flat_angles.extend(both);
        assert_eq!(reason(&instance).kind(), "closure violation");

        // [1, 1, 2, 1, 1] straightened at v1 is the closed square [2, 2, 1, 1].
        let mut instance = cycle(&[1, 1, 2, 1, 1]);
        let both: Vec<AngleId> = instance
            .graph
            .rotation(VertexId(1))
            .iter()
            .map(|d| d.angle())
            .collect();
        instance.flat_angles.extend(both.iter().copied());
        let Verdict::Sat(w) = decide(&instance).unwrap() else {
            panic!("straightened cycle must fold")
        };
        for a in both {
            assert_eq!(w.folds[a.index()], Fold::Flat);
        }
        assert_eq!(w.folds.iter().filter(|&&f| f == Fold::Flat).count(), 2);
    }

    #[test]
    fn theta_exterior_is_a_full_diameter_face() {
        let instance = theta(None);
        let g = &instance.graph;
        let coords = assign_for(&instance);
        let ab = face_through(g, &["a", "b"]);
        let ac = face_through(g, &["a", "c"]);
        let bc = face_through(g, &["b", "c"]);
        assert_eq!(component_diameter(g, &coords, ComponentId(0)), int(4));
        assert_eq!(face_diameter(g, &coords, ab), int(4));
        assert_eq!(face_diameter(g, &coords, ac), int(4));
        assert_eq!(face_diameter(g, &coords, bc), int(3));
        let first = ab.min(ac);
        assert_eq!(
            choose_exterior(g, ComponentId(0), &coords, &BTreeSet::new()),
            Some(first)
        );
        assert_eq!(
            choose_exterior(g, ComponentId(0), &coords, &BTreeSet::from([first])),
            Some(ab.max(ac))
        );
        assert_eq!(
            choose_exterior(g, ComponentId(0), &coords, &BTreeSet::from([ab, ac])),
            None
        );

        let Verdict::Sat(w) = decide(&instance).unwrap() else {
            panic!("theta must fold")
        };
        assert_eq!(w.exteriors[&ComponentId(0)], first);
        for f in [ab, ac] {
            let options = DecideOptions {
                exteriors: BTreeMap::from([(ComponentId(0), f)]),
                ..Default::default()
            };
            assert!(decide_with(&instance, &options).unwrap().verdict.is_sat());
        }
    }

    #[test]
    fn narrow_exterior_is_unsat() {
        let instance = theta(None);
        let narrow = face_through(&instance.graph, &["b", "c"]);
        let options = DecideOptions {
            exteriors: BTreeMap::from([(ComponentId(0), narrow)]),
            ..Default::default()
        };
        let decision = decide_with(&instance, &options).unwrap();
        assert!(!decision.verdict.is_sat());
        let brute = brute_force_decide_with(&instance, &options.exteriors, 22).unwrap();
        assert!(!brute.is_sat());
    }

    fn assign_for(instance: &Instance) -> CoordinateMap {
        crate::geometry::assign_coordinates(&instance.graph, &instance.flat_angles).unwrap()
    }

    #[test]
    fn nesting_compares_child_with_parent_face() {
        // Parent face b-c has diameter 3.
        assert!(decide(&theta(Some(2))).unwrap().is_sat());
        assert!(decide(&theta(Some(3))).unwrap().is_sat());
        match reason(&theta(Some(4))) {
            UnsatReason::DiameterViolation {
                child,
                child_diameter,
                face_diameter,
                ..
            } => {
                assert_eq!(child, ComponentId(1));
                assert_eq!((child_diameter, face_diameter), (int(4), int(3)));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn parallel_decision_matches_sequential() {
        let instance = theta(Some(3));
        let options = DecideOptions {
            parallel: true,
            keep_artifacts: true,
            ..Default::default()
        };
        let par = decide_with(&instance, &options).unwrap();
        let seq = decide_with(
            &instance,
            &DecideOptions {
                keep_artifacts: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(par.verdict, seq.verdict);
        assert_eq!(par.stats, seq.stats);
        assert_eq!(par.artifacts.len(), 2);
    }
}
