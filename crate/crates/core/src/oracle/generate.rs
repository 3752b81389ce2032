//! Seeded random instances for tests and benchmarks.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::document::{ComponentLink, Instance};
use crate::graph::{AngleId, DartId, EdgeId, EmbeddedGraph, GraphBuilder, VertexId};
use crate::length::Length;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenMode {
    /// Lengths drawn independently, occasional flat angles (valid or not).
    Random,
    /// Lengths read off random vertex coordinates, so every face closes;
    /// flat angles are placed wherever the folding direction changes.
    Closed,
    /// A single even cycle with zero alternating sum.
    Cycle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenParams {
    /// Number of edges to aim for.
    pub size: usize,
    pub mode: GenMode,
}

impl GenParams {
    pub fn new(size: usize, mode: GenMode) -> Self {
        GenParams { size, mode }
    }
}

/// Deterministic per `(seed, params)`.
pub fn random_instance(seed: u64, params: &GenParams) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match params.mode {
        GenMode::Cycle => Instance::from_graph(EmbeddedGraph::cycle(&zigzag_cycle(
            params.size.max(2),
            &mut rng,
        ))),
        GenMode::Random => Draft::grow(params.size, false, &mut rng),
        GenMode::Closed => Draft::grow(params.size, true, &mut rng),
    }
}

/// Lengths of an even cycle with zero alternating sum, each in 1..=3 except
/// possibly the closing edge.
fn zigzag_cycle(size: usize, rng: &mut ChaCha8Rng) -> Vec<Length> {
    let n = size + size % 2;
    for _ in 0..1000 {
        let mut lengths: Vec<i64> = (0..n - 1).map(|_| rng.gen_range(1..=3)).collect();
        let alt: i64 = lengths
            .iter()
            .enumerate()
            .map(|(i, &l)| if i % 2 == 0 { l } else { -l })
            .sum();
        if alt >= 1 {
            lengths.push(alt);
            return lengths
                .into_iter()
                .map(|l| Length::from(l as u32))
                .collect();
        }
    }
    vec![Length::from(1); n]
}

/// Lengths around a face whose vertices alternate between a low coordinate
/// in {0, 1} and a high one in {2, 3}, so the face always closes.
pub fn zigzag_face_lengths(n: usize, seed: u64) -> Vec<Length> {
    assert!(
        n >= 2 && n.is_multiple_of(2),
        "faces that close have an even number of edges"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<u32> = (0..n)
        .map(|i| {
            if i % 2 == 0 {
                rng.gen_range(0..=1)
            } else {
                rng.gen_range(2..=3)
            }
        })
        .collect();
    (0..n)
        .map(|i| Length::from(x[i].abs_diff(x[(i + 1) % n])))
        .collect()
}

/// A `rows` x `cols` grid of unit cells. Vertices alternate between low
/// coordinates {0, 1} and high ones {2, 3}, so every face closes with no
/// flat angles. About `4 * rows * cols` angles.
pub fn grid_instance(rows: usize, cols: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    grid_with(rows, cols, |r, c| {
        if (r + c) % 2 == 0 {
            rng.gen_range(0..=1)
        } else {
            rng.gen_range(2..=3)
        }
    })
}

/// The same grid with every edge of length 1.
pub fn unit_grid_instance(rows: usize, cols: usize) -> Instance {
    grid_with(rows, cols, |r, c| ((r + c) % 2) as u32)
}

fn grid_with(rows: usize, cols: usize, mut coord: impl FnMut(usize, usize) -> u32) -> Instance {
    let id = |r: usize, c: usize| VertexId((r * (cols + 1) + c) as u32);
    let mut x = Vec::with_capacity((rows + 1) * (cols + 1));
    let mut b = GraphBuilder::new();
    for r in 0..=rows {
        for c in 0..=cols {
            b.add_vertex(format!("v{r}_{c}"));
            x.push(coord(r, c));
        }
    }
    let mut rotation: Vec<[Option<DartId>; 4]> = vec![[None; 4]; x.len()];
    let (east, north, west, south) = (0, 1, 2, 3);
    let mut add =
        |b: &mut GraphBuilder, u: VertexId, v: VertexId, from_side: usize, to_side: usize| {
            let e = b.add_edge(
                format!("e{}_{}", u.0, v.0),
                u,
                v,
                Length::from(x[u.index()].abs_diff(x[v.index()])),
            );
            rotation[u.index()][from_side] = Some(DartId::new(e, 0));
            rotation[v.index()][to_side] = Some(DartId::new(e, 1));
        };
    for r in 0..=rows {
        for c in 0..=cols {
            if c < cols {
                add(&mut b, id(r, c), id(r, c + 1), east, west);
            }
            if r < rows {
                add(&mut b, id(r, c), id(r + 1, c), north, south);
            }
        }
    }
    for (v, sides) in rotation.iter().enumerate() {
        for d in sides.iter().flatten() {
            b.push_rotation(VertexId(v as u32), *d);
        }
    }
    Instance::from_graph(b.build().expect("grids are planar"))
}

/// A graph under construction, kept as a rotation system.
#[derive(Clone)]
struct Draft {
    ends: Vec<[u32; 2]>,
    lengths: Vec<u32>,
    rotation: Vec<Vec<DartId>>,
    /// Coordinates when lengths are derived from them.
    x: Option<Vec<i64>>,
    flats: BTreeSet<DartId>,
    /// `(dart of the child, dart on the parent face)`.
    links: Vec<(DartId, DartId)>,
}

impl Draft {
    fn grow(size: usize, closed: bool, rng: &mut ChaCha8Rng) -> Instance {
        let mut d = Draft {
            ends: Vec::new(),
            lengths: Vec::new(),
            rotation: Vec::new(),
            x: closed.then(Vec::new),
            flats: BTreeSet::new(),
            links: Vec::new(),
        };
        d.new_component(rng);
        let mut attempts = 0;
        while d.ends.len() < size.max(1) && attempts < 50 * size.max(1) {
            attempts += 1;
            let before = d.clone();
            let roll = rng.gen_range(0..100);
            let ok = match roll {
                0..=29 => d.add_leaf(rng),
                30..=69 => d.add_chord(rng),
                70..=89 => d.subdivide(rng),
                _ => {
                    if d.ends.len() + 1 < size {
                        d.new_component(rng);
                        true
                    } else {
                        false
                    }
                }
            };
            if !ok || !d.directions_valid() {
                d = before;
            }
        }
        if closed {
            d.derive_flats();
        } else {
            d.random_flats(rng);
        }
        d.finish()
    }

    fn add_vertex(&mut self, x: i64) -> u32 {
        self.rotation.push(Vec::new());
        if let Some(xs) = &mut self.x {
            xs.push(x);
        }
        (self.rotation.len() - 1) as u32
    }

    fn length_between(&self, u: u32, v: u32, rng: &mut ChaCha8Rng) -> Option<u32> {
        match &self.x {
            Some(x) => {
                let l = (x[u as usize] - x[v as usize]).unsigned_abs() as u32;
                (l > 0).then_some(l)
            }
            None => Some(rng.gen_range(1..=3)),
        }
    }

    fn fresh_coordinate(&self, near: u32, rng: &mut ChaCha8Rng) -> i64 {
        let base = self.x.as_ref().map_or(0, |x| x[near as usize]);
        let step = rng.gen_range(1..=3);
        if rng.gen_bool(0.5) {
            base + step
        } else {
            base - step
        }
    }

    /// Inserts `new` right after `after` in the rotation at `v`, or as the
    /// only dart if `after` is `None`.
    fn insert_dart(&mut self, v: u32, after: Option<DartId>, new: DartId) {
        let rot = &mut self.rotation[v as usize];
        match after.and_then(|a| rot.iter().position(|&d| d == a)) {
            Some(i) => rot.insert(i + 1, new),
            None => rot.push(new),
        }
    }

    fn push_edge(&mut self, u: u32, v: u32, len: u32) -> EdgeId {
        self.ends.push([u, v]);
        self.lengths.push(len);
        EdgeId((self.ends.len() - 1) as u32)
    }

    fn new_component(&mut self, rng: &mut ChaCha8Rng) {
        let host = (!self.ends.is_empty()).then(|| {
            let e = rng.gen_range(0..self.ends.len());
            DartId::new(EdgeId(e as u32), rng.gen_range(0..2))
        });
        let x0 = rng.gen_range(0..=3);
        let u = self.add_vertex(x0);
        let w = self.fresh_coordinate(u, rng);
        let v = self.add_vertex(w);
        let len = self
            .length_between(u, v, rng)
            .expect("fresh coordinates differ");
        let e = self.push_edge(u, v, len);
        self.insert_dart(u, None, DartId::new(e, 0));
        self.insert_dart(v, None, DartId::new(e, 1));
        if let Some(host) = host {
            if rng.gen_bool(0.5) {
                self.links.push((DartId::new(e, 0), host));
            }
        }
    }

    fn random_dart(&self, rng: &mut ChaCha8Rng) -> DartId {
        DartId(rng.gen_range(0..(2 * self.ends.len()) as u32))
    }

    fn origin(&self, d: DartId) -> u32 {
        self.ends[d.edge().index()][d.end()]
    }

    fn add_leaf(&mut self, rng: &mut ChaCha8Rng) -> bool {
        let corner = self.random_dart(rng);
        let u = self.origin(corner);
        let xw = self.fresh_coordinate(u, rng);
        let w = self.add_vertex(xw);
        let Some(len) = self.length_between(u, w, rng) else {
            return false;
        };
        let e = self.push_edge(u, w, len);
        self.insert_dart(u, Some(corner), DartId::new(e, 0));
        self.insert_dart(w, None, DartId::new(e, 1));
        true
    }

    /// Joins two corners of one face; the corners may coincide or share a
    /// vertex, giving loops and parallel edges.
    fn add_chord(&mut self, rng: &mut ChaCha8Rng) -> bool {
        let g = self.graph();
        let face = g.face_of_dart(self.random_dart(rng));
        let darts = g.face_darts(face);
        let a = *darts.choose(rng).expect("faces are non-empty");
        let b = *darts.choose(rng).expect("faces are non-empty");
        let (u, v) = (self.origin(a), self.origin(b));
        let Some(len) = self.length_between(u, v, rng) else {
            return false;
        };
        let e = self.push_edge(u, v, len);
        self.insert_dart(u, Some(a), DartId::new(e, 0));
        self.insert_dart(v, Some(b), DartId::new(e, 1));
        true
    }

    fn subdivide(&mut self, rng: &mut ChaCha8Rng) -> bool {
        let e = rng.gen_range(0..self.ends.len());
        let [u, v] = self.ends[e];
        let xw = self.fresh_coordinate(u, rng);
        let w = self.add_vertex(xw);
        let (Some(l1), Some(l2)) = (
            self.length_between(u, w, rng),
            self.length_between(w, v, rng),
        ) else {
            return false;
        };
        let old_tail = DartId::new(EdgeId(e as u32), 1);
        self.ends[e][1] = w;
        self.lengths[e] = l1;
        let f = self.push_edge(w, v, l2);
        let rot_v = &mut self.rotation[v as usize];
        let i = rot_v
            .iter()
            .position(|&d| d == old_tail)
            .expect("dart sits at its origin");
        rot_v[i] = DartId::new(f, 1);
        self.rotation[w as usize] = vec![old_tail, DartId::new(f, 0)];
        true
    }

    fn dart_direction(&self, d: DartId) -> i64 {
        let x = self.x.as_ref().expect("coordinates present");
        let [a, b] = self.ends[d.edge().index()];
        let (from, to) = if d.end() == 0 { (a, b) } else { (b, a) };
        (x[to as usize] - x[from as usize]).signum()
    }

    /// With coordinates, each vertex may change direction at most twice
    /// around its rotation (that is, carry at most two flat angles).
    fn directions_valid(&self) -> bool {
        if self.x.is_none() {
            return true;
        }
        self.rotation.iter().all(|rot| {
            let changes = (0..rot.len())
                .filter(|&i| {
                    self.dart_direction(rot[i]) != self.dart_direction(rot[(i + 1) % rot.len()])
                })
                .count();
            changes <= 2
        })
    }

    fn derive_flats(&mut self) {
        for v in 0..self.rotation.len() {
            let rot = &self.rotation[v];
            for i in 0..rot.len() {
                if self.dart_direction(rot[i]) != self.dart_direction(rot[(i + 1) % rot.len()]) {
                    self.flats.insert(rot[i]);
                }
            }
        }
    }

    fn random_flats(&mut self, rng: &mut ChaCha8Rng) {
        while rng.gen_bool(0.3) {
            let v = rng.gen_range(0..self.rotation.len());
            let rot = &self.rotation[v];
            if rot.is_empty() {
                continue;
            }
            let k = rng.gen_range(1..=2).min(rot.len());
            for d in rot.choose_multiple(rng, k) {
                self.flats.insert(*d);
            }
        }
    }

    fn graph(&self) -> EmbeddedGraph {
        let mut b = GraphBuilder::new();
        for v in 0..self.rotation.len() {
            b.add_vertex(format!("v{v}"));
        }
        for (i, (&[u, v], &l)) in self.ends.iter().zip(&self.lengths).enumerate() {
            b.add_edge(format!("e{i}"), VertexId(u), VertexId(v), Length::from(l));
        }
        for (v, rot) in self.rotation.iter().enumerate() {
            for &d in rot {
                b.push_rotation(VertexId(v as u32), d);
            }
        }
        b.build().expect("drafts stay planar")
    }

    fn finish(self) -> Instance {
        let graph = self.graph();
        let flat_angles: BTreeSet<AngleId> = self.flats.iter().map(|d| d.angle()).collect();
        let forest = self
            .links
            .iter()
            .map(|&(child, host)| {
                let parent_face = graph.face_of_dart(host);
                ComponentLink {
                    child: graph.component_of_vertex(graph.origin(child)),
                    parent: graph.component_of_face(parent_face),
                    parent_face,
                }
            })
            .collect();
        Instance {
            graph,
            exteriors: Vec::new(),
            flat_angles,
            forest,
        }
    }
}
