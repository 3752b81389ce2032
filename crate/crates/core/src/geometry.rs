//! Forced line coordinates, closure checks and folded diameters.
//!
//! With every angle folded (mountain or valley) all darts at a vertex point
//! the same way along the line; a flat angle flips the direction between its
//! two darts. Fixing one dart per component therefore fixes every coordinate.

use std::collections::BTreeSet;

use num::{BigRational, Signed, Zero};
use thiserror::Error;

use crate::graph::{
    AngleId, ComponentId, DartId, EdgeId, EmbeddedGraph, FaceCycle, FaceId, VertexId,
};

pub type Coord = BigRational;

/// A non-tree edge whose forced endpoints disagree with its length or direction.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("edge {edge} violates closure: forced {detail}")]
pub struct ClosureViolation {
    pub edge: EdgeId,
    pub detail: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FaceClosureViolation {
    #[error("face has an odd number of edges ({0})")]
    OddEdgeCount(usize),
    #[error("alternating sum of edge lengths is {0}, not 0")]
    NonZeroAlternatingSum(BigRational),
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("folded diameter of an empty vertex set")]
pub struct EmptySet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateMap {
    coords: Vec<Option<Coord>>,
    /// +1 if the dart points towards larger coordinates.
    direction: Vec<i8>,
    roots: Vec<(ComponentId, VertexId)>,
}

impl CoordinateMap {
    pub fn new(g: &EmbeddedGraph) -> Self {
        CoordinateMap {
            coords: vec![None; g.vertex_count()],
            direction: vec![0; g.dart_count()],
            roots: Vec::new(),
        }
    }

    pub fn get(&self, v: VertexId) -> Option<&Coord> {
        self.coords[v.index()].as_ref()
    }

    pub fn direction(&self, d: DartId) -> i8 {
        self.direction[d.index()]
    }

    /// The DFS root of every component placed so far; its coordinate is 0.
    pub fn roots(&self) -> &[(ComponentId, VertexId)] {
        &self.roots
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, &Coord)> + '_ {
        self.coords
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.as_ref().map(|c| (VertexId(i as u32), c)))
    }

    /// Copies the placement of one component from `other`.
    pub fn absorb(&mut self, g: &EmbeddedGraph, component: ComponentId, other: &CoordinateMap) {
        let comp = &g.components()[component.index()];
        for &v in &comp.vertices {
            self.coords[v.index()] = other.coords[v.index()].clone();
            for &d in g.rotation(v) {
                self.direction[d.index()] = other.direction[d.index()];
            }
        }
        self.roots
            .extend(other.roots.iter().filter(|(c, _)| *c == component));
        self.roots.sort();
    }
}

/// Places every component; fails on the first closure violation.
pub fn assign_coordinates(
    g: &EmbeddedGraph,
    flats: &BTreeSet<AngleId>,
) -> Result<CoordinateMap, ClosureViolation> {
    let mut map = CoordinateMap::new(g);
    for c in 0..g.components().len() {
        place_component(g, ComponentId(c as u32), flats, &mut map)?;
    }
    Ok(map)
}

/// Places a single component into `map`.
///
/// The root is the component's lowest vertex and its first dart points
/// towards +x. Every edge is checked from both ends, in DFS order.
pub fn place_component(
    g: &EmbeddedGraph,
    component: ComponentId,
    flats: &BTreeSet<AngleId>,
    map: &mut CoordinateMap,
) -> Result<(), ClosureViolation> {
    let comp = &g.components()[component.index()];
    let root = comp.vertices[0];
    map.roots.push((component, root));
    map.coords[root.index()] = Some(Coord::zero());
    if let Some(&first) = g.rotation(root).first() {
        orient_vertex(g, first, 1, flats, map);
    }
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        let xv = map.coords[v.index()].clone().expect("placed before pushed");
        for &d in g.rotation(v) {
            let e = d.edge();
            let dir = map.direction[d.index()];
            let len = g.length(e).as_rational();
            let forced = if dir > 0 { &xv + len } else { &xv - len };
            let w = g.head(d);
            match &map.coords[w.index()] {
                None => {
                    map.coords[w.index()] = Some(forced);
                    orient_vertex(g, d.twin(), -dir, flats, map);
                    stack.push(w);
                }
                Some(xw) => {
                    if *xw != forced {
                        return Err(ClosureViolation {
                            edge: e,
                            detail: format!(
                                "x({}) = {} but the path reaches it at {}",
                                g.vertex_name(w),
                                crate::length::format_rational(xw),
                                crate::length::format_rational(&forced)
                            ),
                        });
                    }
                    if map.direction[d.twin().index()] != -dir {
                        return Err(ClosureViolation {
                            edge: e,
                            detail: format!(
                                "both ends of the edge point the same way at `{}`",
                                g.vertex_name(w)
                            ),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

/// Sets directions for every dart at `origin(start)` given `start`'s.
fn orient_vertex(
    g: &EmbeddedGraph,
    start: DartId,
    dir: i8,
    flats: &BTreeSet<AngleId>,
    map: &mut CoordinateMap,
) {
    let mut d = start;
    let mut dir = dir;
    loop {
        map.direction[d.index()] = dir;
        if flats.contains(&d.angle()) {
            dir = -dir;
        }
        d = g.rotation_next(d);
        if d == start {
            break;
        }
    }
}

/// Even edge count and zero alternating length sum.
pub fn face_closure_check(f: &FaceCycle) -> Result<(), FaceClosureViolation> {
    if f.len() % 2 == 1 || f.is_empty() {
        // An all-flat face collapses to a single closed edge.
        return Err(FaceClosureViolation::OddEdgeCount(f.len().max(1)));
    }
    let mut sum = BigRational::zero();
    for (i, len) in f.lengths().enumerate() {
        if i % 2 == 0 {
            sum += len.as_rational();
        } else {
            sum -= len.as_rational();
        }
    }
    if sum.is_zero() {
        Ok(())
    } else {
        Err(FaceClosureViolation::NonZeroAlternatingSum(sum))
    }
}

/// `max - min` of the coordinates of `vertices`.
pub fn folded_diameter(
    coords: &CoordinateMap,
    vertices: impl IntoIterator<Item = VertexId>,
) -> Result<Coord, EmptySet> {
    let mut it = vertices
        .into_iter()
        .map(|v| coords.get(v).expect("vertex has been placed"));
    let first = it.next().ok_or(EmptySet)?;
    let (mut lo, mut hi) = (first, first);
    for x in it {
        if x < lo {
            lo = x;
        }
        if x > hi {
            hi = x;
        }
    }
    let d = hi - lo;
    debug_assert!(!d.is_negative());
    Ok(d)
}

pub fn face_diameter(g: &EmbeddedGraph, coords: &CoordinateMap, f: FaceId) -> Coord {
    folded_diameter(coords, g.face_vertices(f)).expect("faces have at least one vertex")
}

pub fn component_diameter(g: &EmbeddedGraph, coords: &CoordinateMap, c: ComponentId) -> Coord {
    folded_diameter(coords, g.components()[c.index()].vertices.iter().copied())
        .expect("components are non-empty")
}
