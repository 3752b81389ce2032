//! Checks a result document against its instance without trusting the
//! pipeline that produced it.

use std::collections::BTreeMap;

use graphfold::document::{parse_angle_label, DartRef};
use graphfold::length::parse_rational;
use graphfold::oracle::{brute_force_decide, verify_witness, DEFAULT_ANGLE_BOUND};
use graphfold::{decide, ComponentId, Coord, DartId, EmbeddedGraph, FaceId, Fold, Instance};

use crate::report::ResultDocument;

fn dart(g: &EmbeddedGraph, r: &DartRef) -> Result<DartId, String> {
    let e = g
        .edge_by_name(&r.edge)
        .ok_or_else(|| format!("unknown edge `{}`", r.edge))?;
    if r.end > 1 {
        return Err(format!(
            "dart end {} of edge `{}` is not 0 or 1",
            r.end, r.edge
        ));
    }
    Ok(DartId::new(e, r.end as usize))
}

/// SAT documents are checked directly: one label per angle, flats exactly
/// as specified, one exterior per component, per-face crimp checks, and
/// coordinates that realise every edge length with every non-flat angle
/// folded. UNSAT documents can only be re-derived, so the decision is
/// recomputed (and cross-checked by exhaustive search when small enough).
pub fn verify_document(instance: &Instance, doc: &ResultDocument) -> Result<(), String> {
    match doc.status.as_str() {
        "SAT" => verify_sat(instance, doc),
        "UNSAT" => verify_unsat(instance, doc),
        other => Err(format!("unknown status `{other}`")),
    }
}

fn verify_sat(instance: &Instance, doc: &ResultDocument) -> Result<(), String> {
    let g = &instance.graph;
    let mut folds: Vec<Option<Fold>> = vec![None; g.angle_count()];
    for (label, fold) in &doc.witness {
        let a = parse_angle_label(g, label).ok_or_else(|| format!("`{label}` names no angle"))?;
        let fold =
            Fold::parse(fold).ok_or_else(|| format!("`{fold}` at `{label}` is not M, V or F"))?;
        folds[a.index()] = Some(fold);
    }
    let folds: Vec<Fold> = folds
        .into_iter()
        .enumerate()
        .map(|(i, f)| f.ok_or_else(|| format!("angle after dart {i} has no fold")))
        .collect::<Result<_, _>>()?;

    let mut exteriors = BTreeMap::<ComponentId, FaceId>::new();
    for r in &doc.exteriors {
        let f = g.face_of_dart(dart(g, r)?);
        if exteriors.insert(g.component_of_face(f), f).is_some() {
            return Err(format!(
                "two exterior faces given for the component of edge `{}`",
                r.edge
            ));
        }
    }
    for (c, comp) in g.components().iter().enumerate() {
        if comp.edges.is_empty() {
            continue;
        }
        let c = ComponentId(c as u32);
        let f = exteriors
            .get(&c)
            .ok_or_else(|| format!("component {c} has no exterior face"))?;
        verify_witness(g, c, *f, &instance.flat_angles, &folds)?;
    }

    let mut x: Vec<Option<Coord>> = vec![None; g.vertex_count()];
    for (name, value) in &doc.coords {
        let v = g
            .vertex_by_name(name)
            .ok_or_else(|| format!("unknown vertex `{name}`"))?;
        x[v.index()] =
            Some(parse_rational(value).map_err(|e| format!("coordinate of `{name}`: {e}"))?);
    }
    let x: Vec<Coord> = x
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            c.ok_or_else(|| {
                format!(
                    "vertex `{}` has no coordinate",
                    g.vertex_name(graphfold::VertexId(i as u32))
                )
            })
        })
        .collect::<Result<_, _>>()?;
    let step = |d: DartId| &x[g.head(d).index()] - &x[g.origin(d).index()];
    let zero = Coord::from_integer(0.into());
    for e in g.edges() {
        let d = DartId::new(e, 0);
        let span = step(d);
        let len = g.length(e).as_rational();
        if span != *len && span != -len.clone() {
            return Err(format!(
                "edge `{}` has length {} but its ends are {} apart",
                g.edge_name(e),
                g.length(e),
                span
            ));
        }
    }
    for v in g.vertices() {
        for &d in g.rotation(v) {
            let next = g.rotation_next(d);
            let same_side = (step(d) > zero) == (step(next) > zero);
            let flat = folds[d.index()] == Fold::Flat;
            if same_side == flat {
                return Err(format!(
                    "angle between `{}` and `{}` at `{}` is {} but its edges point {}",
                    g.edge_name(d.edge()),
                    g.edge_name(next.edge()),
                    g.vertex_name(v),
                    if flat { "flat" } else { "folded" },
                    if same_side {
                        "the same way"
                    } else {
                        "opposite ways"
                    }
                ));
            }
        }
    }
    Ok(())
}

fn verify_unsat(instance: &Instance, doc: &ResultDocument) -> Result<(), String> {
    let verdict = decide(instance).map_err(|e| e.to_string())?;
    if verdict.is_sat() {
        return Err("the instance has a flat folding".to_string());
    }
    if let (Some(claimed), Some(found)) = (&doc.reason, verdict.reason()) {
        if claimed.kind() != found.kind() && claimed.kind() != "no valid assignment" {
            return Err(format!(
                "document claims {} but the decision finds {}",
                claimed.kind(),
                found.kind()
            ));
        }
    }
    if instance.graph.angle_count() <= DEFAULT_ANGLE_BOUND {
        let brute = brute_force_decide(instance).map_err(|e| e.to_string())?;
        if brute.is_sat() {
            return Err("exhaustive search finds a flat folding".to_string());
        }
    }
    Ok(())
}
