//! Independent ground truth: direct per-cycle checks, witness verification,
//! exhaustive search and random instance generation.
//!
//! Nothing here goes through the constraint system or the flow network.

mod brute;
mod crimp;
pub mod generate;
mod stacking;

use std::collections::BTreeSet;

pub use brute::{brute_force_decide, brute_force_decide_with, DEFAULT_ANGLE_BOUND};
pub use crimp::{
    closure_holds, crimp_check, crimp_check_by_choice, crimp_check_lengths, AssignedCycle,
};
pub use generate::{grid_instance, random_instance, unit_grid_instance, GenMode, GenParams};
pub use stacking::stacking_check;

use crate::decider::Fold;
use crate::graph::{AngleId, ComponentId, EmbeddedGraph, FaceId};
use crate::length::Length;

/// The face walked with flat angles fused away: `(length, angle after it)`
/// for every non-flat angle. `None` if every angle of the face is flat.
pub fn fused_face(
    g: &EmbeddedGraph,
    f: FaceId,
    flats: &BTreeSet<AngleId>,
) -> Option<Vec<(Length, AngleId)>> {
    let darts = g.face_darts(f);
    let n = darts.len();
    let after = |i: usize| darts[(i + 1) % n].angle();
    let start = (0..n).find(|&i| !flats.contains(&after(i)))?;
    let mut out = Vec::new();
    let mut acc: Option<Length> = None;
    for k in 1..=n {
        let i = (start + k) % n;
        let len = g.length(darts[i].edge()).clone();
        let total = match acc.take() {
            None => len,
            Some(prev) => prev + len,
        };
        if flats.contains(&after(i)) {
            acc = Some(total);
        } else {
            out.push((total, after(i)));
        }
    }
    Some(out)
}

/// Checks a full assignment for one component: flats exactly where
/// specified, one mountain per vertex without flats and none at vertices
/// with two, and every face accepted by the crimp check.
pub fn verify_witness(
    g: &EmbeddedGraph,
    component: ComponentId,
    exterior: FaceId,
    flats: &BTreeSet<AngleId>,
    folds: &[Fold],
) -> Result<(), String> {
    let comp = &g.components()[component.index()];
    for &v in &comp.vertices {
        let mut mountains = 0;
        let mut flat = 0;
        for &d in g.rotation(v) {
            let a = d.angle();
            let fold = folds[a.index()];
            if (fold == Fold::Flat) != flats.contains(&a) {
                return Err(format!(
                    "angle {a} at `{}` is {fold:?} against the flat specification",
                    g.vertex_name(v)
                ));
            }
            match fold {
                Fold::Mountain => mountains += 1,
                Fold::Flat => flat += 1,
                Fold::Valley => {}
            }
        }
        if g.degree(v) == 0 {
            continue;
        }
        let expected = if flat == 0 { 1 } else { 0 };
        if mountains != expected {
            return Err(format!(
                "vertex `{}` has {mountains} mountain folds, expected {expected}",
                g.vertex_name(v)
            ));
        }
    }
    for &f in &comp.faces {
        let cycle =
            fused_face(g, f, flats).ok_or_else(|| format!("face {f} has only flat angles"))?;
        let (lengths, mountain): (Vec<Length>, Vec<bool>) = cycle
            .into_iter()
            .map(|(l, a)| (l, folds[a.index()] == Fold::Mountain))
            .unzip();
        if !crimp_check_lengths(&lengths, &mountain, f == exterior) {
            return Err(format!("face {f} does not fold flat under the assignment"));
        }
    }
    Ok(())
}
