//! Exhaustive decision over every mountain/valley assignment.

use std::collections::{BTreeMap, BTreeSet};

use num::{BigRational, Zero};

use super::{closure_holds, crimp_check_lengths, fused_face};
use crate::decider::{Fold, UnsatReason, Verdict, Witness};
use crate::document::Instance;
use crate::error::DecideError;
use crate::geometry::CoordinateMap;
use crate::graph::{AngleId, ComponentId, EmbeddedGraph, FaceId, VertexId};
use crate::length::Length;

pub const DEFAULT_ANGLE_BOUND: usize = 22;

pub fn brute_force_decide(instance: &Instance) -> Result<Verdict, DecideError> {
    brute_force_decide_with(instance, &BTreeMap::new(), DEFAULT_ANGLE_BOUND)
}

/// Enumerates, per component, one mountain per vertex (none at vertices
/// with two flats) and accepts the first choice under which every face
/// passes the crimp check.
pub fn brute_force_decide_with(
    instance: &Instance,
    exterior_overrides: &BTreeMap<ComponentId, FaceId>,
    bound: usize,
) -> Result<Verdict, DecideError> {
    let g = &instance.graph;
    let flats = &instance.flat_angles;
    if g.angle_count() > bound {
        return Err(DecideError::TooLarge {
            angles: g.angle_count(),
            limit: bound,
        });
    }
    for v in g.vertices() {
        let count = g
            .rotation(v)
            .iter()
            .filter(|d| flats.contains(&d.angle()))
            .count();
        if count != 0 && count != 2 {
            return Ok(Verdict::Unsat(UnsatReason::FlatCountViolation {
                vertex: v,
                count,
            }));
        }
    }
    let mut designated = instance.exterior_faces();
    designated.extend(exterior_overrides.iter().map(|(&c, &f)| (c, f)));
    let parent_faces: BTreeSet<FaceId> = instance.forest.iter().map(|l| l.parent_face).collect();

    let x = coordinates(g, flats);
    let spread = |vs: &mut dyn Iterator<Item = VertexId>| -> BigRational {
        let xs: Vec<&BigRational> = vs.map(|v| &x[v.index()]).collect();
        let lo = xs
            .iter()
            .min()
            .copied()
            .cloned()
            .unwrap_or_else(BigRational::zero);
        let hi = xs
            .iter()
            .max()
            .copied()
            .cloned()
            .unwrap_or_else(BigRational::zero);
        hi - lo
    };

    let mut folds = vec![Fold::Valley; g.angle_count()];
    let mut exteriors = BTreeMap::new();
    for (ci, comp) in g.components().iter().enumerate() {
        let c = ComponentId(ci as u32);
        if comp.edges.is_empty() {
            continue;
        }
        let mut cycles: Vec<(FaceId, Vec<(Length, AngleId)>)> = Vec::new();
        for &f in &comp.faces {
            let closed = fused_face(g, f, flats).filter(|cy| {
                let lengths: Vec<Length> = cy.iter().map(|(l, _)| l.clone()).collect();
                closure_holds(&lengths)
            });
            match closed {
                Some(cy) => cycles.push((f, cy)),
                None => {
                    return Ok(Verdict::Unsat(UnsatReason::ClosureViolation {
                        component: c,
                        edge: None,
                        face: Some(f),
                        detail: format!("face {f} is not closed"),
                    }))
                }
            }
        }
        let exterior = match designated.get(&c) {
            Some(&f) => f,
            None => {
                let full = spread(&mut comp.vertices.iter().copied());
                let pick = comp.faces.iter().copied().find(|f| {
                    !parent_faces.contains(f) && spread(&mut g.face_vertices(*f)) == full
                });
                match pick {
                    Some(f) => f,
                    None => {
                        return Ok(Verdict::Unsat(UnsatReason::NoAdmissibleExterior {
                            component: c,
                        }))
                    }
                }
            }
        };
        exteriors.insert(c, exterior);

        // Per vertex: the angles that may be the single mountain, or none.
        let choices: Vec<Vec<AngleId>> = comp
            .vertices
            .iter()
            .filter(|&&v| g.degree(v) > 0)
            .map(|&v| {
                let free: Vec<AngleId> = g
                    .rotation(v)
                    .iter()
                    .map(|d| d.angle())
                    .filter(|a| !flats.contains(a))
                    .collect();
                if free.len() == g.degree(v) {
                    free
                } else {
                    Vec::new()
                }
            })
            .collect();
        let mut pick = vec![0usize; choices.len()];
        let mut mountain = vec![false; g.angle_count()];
        let found = loop {
            mountain.fill(false);
            for (opts, &i) in choices.iter().zip(&pick) {
                if let Some(&a) = opts.get(i) {
                    mountain[a.index()] = true;
                }
            }
            let ok = cycles.iter().all(|(f, cy)| {
                let lengths: Vec<Length> = cy.iter().map(|(l, _)| l.clone()).collect();
                let mv: Vec<bool> = cy.iter().map(|(_, a)| mountain[a.index()]).collect();
                crimp_check_lengths(&lengths, &mv, *f == exterior)
            });
            if ok {
                break true;
            }
            // Odometer over the per-vertex choices.
            let mut k = 0;
            loop {
                if k == pick.len() {
                    break;
                }
                pick[k] += 1;
                if pick[k] < choices[k].len().max(1) {
                    break;
                }
                pick[k] = 0;
                k += 1;
            }
            if k == pick.len() {
                break false;
            }
        };
        if !found {
            return Ok(Verdict::Unsat(UnsatReason::NoValidAssignment {
                component: c,
            }));
        }
        for &v in &comp.vertices {
            for &d in g.rotation(v) {
                let a = d.angle();
                folds[a.index()] = if flats.contains(&a) {
                    Fold::Flat
                } else if mountain[a.index()] {
                    Fold::Mountain
                } else {
                    Fold::Valley
                };
            }
        }
    }

    for link in &instance.forest {
        let child = spread(&mut g.components()[link.child.index()].vertices.iter().copied());
        let face = spread(&mut g.face_vertices(link.parent_face));
        if child > face {
            return Ok(Verdict::Unsat(UnsatReason::DiameterViolation {
                child: link.child,
                parent_face: link.parent_face,
                child_diameter: child,
                face_diameter: face,
            }));
        }
    }
    let mut coords = CoordinateMap::new(g);
    for c in 0..g.components().len() {
        let mut one = CoordinateMap::new(g);
        crate::geometry::place_component(g, ComponentId(c as u32), flats, &mut one).map_err(
            |e| DecideError::Internal(format!("closed faces but coordinates failed: {e}")),
        )?;
        coords.absorb(g, ComponentId(c as u32), &one);
    }
    Ok(Verdict::Sat(Witness {
        folds,
        coords,
        exteriors,
    }))
}

/// Breadth-first placement; only meaningful once every face is closed.
fn coordinates(g: &EmbeddedGraph, flats: &BTreeSet<AngleId>) -> Vec<BigRational> {
    let mut x: Vec<Option<BigRational>> = vec![None; g.vertex_count()];
    let mut dir = vec![0i8; g.dart_count()];
    for comp in g.components() {
        let root = comp.vertices[0];
        x[root.index()] = Some(BigRational::zero());
        let mut queue = std::collections::VecDeque::from([(root, 1i8)]);
        while let Some((v, first_dir)) = queue.pop_front() {
            let rot = g.rotation(v);
            let mut s = first_dir;
            for &d in rot {
                dir[d.index()] = s;
                if flats.contains(&d.angle()) {
                    s = -s;
                }
            }
            let xv = x[v.index()].clone().expect("queued vertices are placed");
            for &d in rot {
                let w = g.head(d);
                if x[w.index()].is_some() {
                    continue;
                }
                let len = g.length(d.edge()).as_rational();
                x[w.index()] = Some(if dir[d.index()] > 0 {
                    &xv + len
                } else {
                    &xv - len
                });
                // Orient w so that the twin points back; find the direction of
                // w's first dart that yields it.
                let rot_w = g.rotation(w);
                let mut s = 1i8;
                let mut twin_dir = 0;
                for &e in rot_w {
                    if e == d.twin() {
                        twin_dir = s;
                    }
                    if flats.contains(&e.angle()) {
                        s = -s;
                    }
                }
                let want = -dir[d.index()];
                queue.push_back((w, if twin_dir == want { 1 } else { -1 }));
            }
        }
    }
    x.into_iter()
        .map(|v| v.unwrap_or_else(BigRational::zero))
        .collect()
}
