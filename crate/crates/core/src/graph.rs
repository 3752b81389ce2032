//! Combinatorially embedded planar multigraphs.
//!
//! An edge `e` owns two darts, `2e` (end 0, leaving `ends[0]`) and `2e + 1`
//! (end 1, leaving `ends[1]`). Each vertex lists the darts leaving it in
//! counterclockwise order. Faces are traced with the face on the left: from
//! dart `d` the walk continues with the dart preceding `twin(d)` in the
//! rotation at the head of `d`. Interior faces therefore come out
//! counterclockwise and the outer face of a component clockwise. Reversing
//! every rotation swaps the two readings consistently.
//!
//! The angle after dart `d` (between `d` and its rotation successor) is
//! identified with `d` itself, so angle ids and dart ids coincide.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::LoadError;
use crate::length::Length;

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!(stringify!($name), "({})"), self.0)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

id_type!(VertexId);
id_type!(EdgeId);
id_type!(
    /// Half-edge; see the module docs for the numbering.
    DartId
);
id_type!(FaceId);
id_type!(ComponentId);
id_type!(
    /// The angle following a dart in its vertex's rotation.
    AngleId
);

impl DartId {
    pub fn new(edge: EdgeId, end: usize) -> DartId {
        debug_assert!(end < 2);
        DartId(edge.0 * 2 + end as u32)
    }

    #[inline]
    pub fn twin(self) -> DartId {
        DartId(self.0 ^ 1)
    }

    #[inline]
    pub fn edge(self) -> EdgeId {
        EdgeId(self.0 >> 1)
    }

    #[inline]
    pub fn end(self) -> usize {
        (self.0 & 1) as usize
    }

    #[inline]
    pub fn angle(self) -> AngleId {
        AngleId(self.0)
    }
}

impl AngleId {
    /// The dart whose rotation successor closes this angle.
    #[inline]
    pub fn dart(self) -> DartId {
        DartId(self.0)
    }
}

/// An angle between two rotation-consecutive darts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Angle {
    pub id: AngleId,
    pub vertex: VertexId,
    pub darts: (DartId, DartId),
    pub face: FaceId,
}

#[derive(Clone, Debug)]
pub struct Component {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    pub faces: Vec<FaceId>,
}

/// One step of a face cycle: an edge length and the angle that follows it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceEntry {
    pub length: Length,
    pub angle: AngleId,
}

/// The simple cycle obtained by walking a face boundary.
///
/// Vertices and edges visited twice by the walk (cut vertices, bridges)
/// appear twice. Entry `i` holds the `i`-th boundary edge and the angle
/// between it and edge `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceCycle {
    pub face: FaceId,
    pub entries: Vec<FaceEntry>,
    pub is_exterior: bool,
}

impl FaceCycle {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lengths(&self) -> impl Iterator<Item = &Length> + '_ {
        self.entries.iter().map(|e| &e.length)
    }
}

#[derive(Clone, Debug)]
pub struct EmbeddedGraph {
    vertex_names: Vec<String>,
    vertex_lookup: HashMap<String, VertexId>,
    edge_names: Vec<String>,
    edge_lookup: HashMap<String, EdgeId>,
    ends: Vec<[VertexId; 2]>,
    lengths: Vec<Length>,
    rotation: Vec<Vec<DartId>>,
    dart_pos: Vec<u32>,
    faces: Vec<Vec<DartId>>,
    dart_face: Vec<FaceId>,
    components: Vec<Component>,
    vertex_component: Vec<ComponentId>,
}

impl EmbeddedGraph {
    /// A single cycle `v0 - v1 - ... - v(n-1) - v0` with edge `e_i = (v_i, v_(i+1))`.
    ///
    /// One edge gives a loop, two give a pair of parallel edges.
    pub fn cycle(lengths: &[Length]) -> EmbeddedGraph {
        let n = lengths.len();
        assert!(n > 0, "a cycle needs at least one edge");
        let mut b = GraphBuilder::new();
        let vs: Vec<VertexId> = (0..n).map(|i| b.add_vertex(format!("v{i}"))).collect();
        let es: Vec<EdgeId> = (0..n)
            .map(|i| b.add_edge(format!("e{i}"), vs[i], vs[(i + 1) % n], lengths[i].clone()))
            .collect();
        for i in 0..n {
            b.push_rotation(vs[i], DartId::new(es[i], 0));
            b.push_rotation(vs[i], DartId::new(es[(i + n - 1) % n], 1));
        }
        b.build().expect("cycles are planar")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.ends.len()
    }

    pub fn dart_count(&self) -> usize {
        self.ends.len() * 2
    }

    /// Equals the dart count.
    pub fn angle_count(&self) -> usize {
        self.dart_count()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = VertexId> {
        (0..self.vertex_names.len() as u32).map(VertexId)
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = EdgeId> {
        (0..self.ends.len() as u32).map(EdgeId)
    }

    pub fn darts(&self) -> impl ExactSizeIterator<Item = DartId> {
        (0..self.dart_count() as u32).map(DartId)
    }

    pub fn faces(&self) -> impl ExactSizeIterator<Item = FaceId> {
        (0..self.faces.len() as u32).map(FaceId)
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.index()]
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.vertex_lookup.get(name).copied()
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edge_names[e.index()]
    }

    pub fn edge_by_name(&self, name: &str) -> Option<EdgeId> {
        self.edge_lookup.get(name).copied()
    }

    pub fn ends(&self, e: EdgeId) -> [VertexId; 2] {
        self.ends[e.index()]
    }

    pub fn length(&self, e: EdgeId) -> &Length {
        &self.lengths[e.index()]
    }

    #[inline]
    pub fn origin(&self, d: DartId) -> VertexId {
        self.ends[d.edge().index()][d.end()]
    }

    #[inline]
    pub fn head(&self, d: DartId) -> VertexId {
        self.origin(d.twin())
    }

    pub fn rotation(&self, v: VertexId) -> &[DartId] {
        &self.rotation[v.index()]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.rotation[v.index()].len()
    }

    #[inline]
    pub fn rotation_next(&self, d: DartId) -> DartId {
        let rot = &self.rotation[self.origin(d).index()];
        let pos = self.dart_pos[d.index()] as usize;
        rot[(pos + 1) % rot.len()]
    }

    #[inline]
    pub fn rotation_prev(&self, d: DartId) -> DartId {
        let rot = &self.rotation[self.origin(d).index()];
        let pos = self.dart_pos[d.index()] as usize;
        rot[(pos + rot.len() - 1) % rot.len()]
    }

    /// Next dart along the face to the left of `d`.
    #[inline]
    pub fn face_next(&self, d: DartId) -> DartId {
        self.rotation_prev(d.twin())
    }

    /// Boundary darts of a face, starting from its lowest-numbered dart.
    pub fn face_darts(&self, f: FaceId) -> &[DartId] {
        &self.faces[f.index()]
    }

    pub fn face_of_dart(&self, d: DartId) -> FaceId {
        self.dart_face[d.index()]
    }

    pub fn face_of_angle(&self, a: AngleId) -> FaceId {
        self.dart_face[a.dart().index()]
    }

    pub fn angle_vertex(&self, a: AngleId) -> VertexId {
        self.origin(a.dart())
    }

    /// Boundary vertices of a face in walk order, repeats included.
    pub fn face_vertices(&self, f: FaceId) -> impl Iterator<Item = VertexId> + '_ {
        self.faces[f.index()].iter().map(move |&d| self.origin(d))
    }

    pub fn angle(&self, a: AngleId) -> Angle {
        let d = a.dart();
        Angle {
            id: a,
            vertex: self.origin(d),
            darts: (d, self.rotation_next(d)),
            face: self.dart_face[d.index()],
        }
    }

    /// One angle per consecutive dart pair in `v`'s rotation, in rotation order.
    pub fn angles_at_vertex(&self, v: VertexId) -> Result<Vec<Angle>, LoadError> {
        if v.index() >= self.vertex_count() {
            return Err(LoadError::UnknownVertex(v.to_string()));
        }
        Ok(self.rotation[v.index()]
            .iter()
            .map(|&d| self.angle(d.angle()))
            .collect())
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component_of_vertex(&self, v: VertexId) -> ComponentId {
        self.vertex_component[v.index()]
    }

    pub fn component_of_face(&self, f: FaceId) -> ComponentId {
        let d = self.faces[f.index()][0];
        self.vertex_component[self.origin(d).index()]
    }

    /// Face cycle with no angle treated as flat.
    pub fn face_cycle(&self, f: FaceId, is_exterior: bool) -> FaceCycle {
        self.face_cycle_with_flats(f, &BTreeSet::new(), is_exterior)
    }

    /// All faces as plain cycles (no flats, nothing marked exterior).
    pub fn face_cycles(&self) -> Vec<FaceCycle> {
        self.faces().map(|f| self.face_cycle(f, false)).collect()
    }

    /// Face cycle in which the two edges around every flat angle are fused
    /// into one edge of the summed length.
    ///
    /// A face whose angles are all flat degenerates to a single closed edge
    /// and comes back with no entries.
    pub fn face_cycle_with_flats(
        &self,
        f: FaceId,
        flats: &BTreeSet<AngleId>,
        is_exterior: bool,
    ) -> FaceCycle {
        let darts = &self.faces[f.index()];
        let n = darts.len();
        // Entry i: edge of darts[i], followed by the angle at the origin of darts[i + 1].
        let raw_angle = |i: usize| darts[(i + 1) % n].angle();
        let Some(anchor) = (0..n).find(|&i| !flats.contains(&raw_angle(i))) else {
            return FaceCycle {
                face: f,
                entries: Vec::new(),
                is_exterior,
            };
        };
        let mut entries = Vec::with_capacity(n);
        let mut pending: Option<Length> = None;
        for step in 1..=n {
            let i = (anchor + step) % n;
            let len = self.length(darts[i].edge());
            let acc = match pending.take() {
                Some(p) => &p + len,
                None => len.clone(),
            };
            let angle = raw_angle(i);
            if flats.contains(&angle) {
                pending = Some(acc);
            } else {
                entries.push(FaceEntry { length: acc, angle });
            }
        }
        // Start the cycle at the face's first dart when nothing was fused there.
        if flats.is_empty() {
            entries.rotate_right(1);
        }
        FaceCycle {
            face: f,
            entries,
            is_exterior,
        }
    }
}

/// Incremental construction of an [`EmbeddedGraph`]; `build` validates.
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    vertex_names: Vec<String>,
    edge_names: Vec<String>,
    ends: Vec<[VertexId; 2]>,
    lengths: Vec<Length>,
    rotation: Vec<Vec<DartId>>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, name: impl Into<String>) -> VertexId {
        self.vertex_names.push(name.into());
        self.rotation.push(Vec::new());
        VertexId(self.vertex_names.len() as u32 - 1)
    }

    /// Adds an edge without touching any rotation.
    pub fn add_edge(
        &mut self,
        name: impl Into<String>,
        from: VertexId,
        to: VertexId,
        length: Length,
    ) -> EdgeId {
        self.edge_names.push(name.into());
        self.ends.push([from, to]);
        self.lengths.push(length);
        EdgeId(self.ends.len() as u32 - 1)
    }

    /// Appends `d` to the counterclockwise rotation of `v`.
    pub fn push_rotation(&mut self, v: VertexId, d: DartId) {
        self.rotation[v.index()].push(d);
    }

    pub fn build(self) -> Result<EmbeddedGraph, LoadError> {
        let GraphBuilder {
            vertex_names,
            edge_names,
            ends,
            lengths,
            rotation,
        } = self;

        let mut vertex_lookup = HashMap::with_capacity(vertex_names.len());
        for (i, name) in vertex_names.iter().enumerate() {
            if vertex_lookup
                .insert(name.clone(), VertexId(i as u32))
                .is_some()
            {
                return Err(LoadError::malformed(
                    format!("vertices[{i}]"),
                    format!("duplicate vertex id `{name}`"),
                ));
            }
        }
        let mut edge_lookup = HashMap::with_capacity(edge_names.len());
        for (i, name) in edge_names.iter().enumerate() {
            if edge_lookup.insert(name.clone(), EdgeId(i as u32)).is_some() {
                return Err(LoadError::malformed(
                    format!("edges[{i}]"),
                    format!("duplicate edge id `{name}`"),
                ));
            }
        }

        let dart_count = ends.len() * 2;
        let mut dart_pos = vec![u32::MAX; dart_count];
        for (v, rot) in rotation.iter().enumerate() {
            for (pos, &d) in rot.iter().enumerate() {
                let context = format!("rotation.{}[{pos}]", vertex_names[v]);
                if d.index() >= dart_count {
                    return Err(LoadError::malformed(
                        context,
                        "dart refers to an unknown edge",
                    ));
                }
                let edge = &edge_names[d.edge().index()];
                if dart_pos[d.index()] != u32::MAX {
                    return Err(LoadError::malformed(
                        context,
                        format!("dart (edge `{edge}`, end {}) is listed twice", d.end()),
                    ));
                }
                let origin = ends[d.edge().index()][d.end()];
                if origin.index() != v {
                    return Err(LoadError::malformed(
                        context,
                        format!(
                            "dart (edge `{edge}`, end {}) leaves `{}`, not `{}`",
                            d.end(),
                            vertex_names[origin.index()],
                            vertex_names[v]
                        ),
                    ));
                }
                dart_pos[d.index()] = pos as u32;
            }
        }
        if let Some(missing) = dart_pos.iter().position(|&p| p == u32::MAX) {
            let d = DartId(missing as u32);
            return Err(LoadError::malformed(
                format!(
                    "rotation.{}",
                    vertex_names[ends[d.edge().index()][d.end()].index()]
                ),
                format!(
                    "dart (edge `{}`, end {}) is missing from the rotation",
                    edge_names[d.edge().index()],
                    d.end()
                ),
            ));
        }

        let mut g = EmbeddedGraph {
            vertex_names,
            vertex_lookup,
            edge_names,
            edge_lookup,
            ends,
            lengths,
            rotation,
            dart_pos,
            faces: Vec::new(),
            dart_face: Vec::new(),
            components: Vec::new(),
            vertex_component: Vec::new(),
        };
        g.trace_faces();
        g.find_components();
        g.check_euler()?;
        Ok(g)
    }
}

impl EmbeddedGraph {
    fn trace_faces(&mut self) {
        let mut dart_face = vec![FaceId(u32::MAX); self.dart_count()];
        let mut faces = Vec::new();
        for start in 0..self.dart_count() as u32 {
            if dart_face[start as usize].0 != u32::MAX {
                continue;
            }
            let id = FaceId(faces.len() as u32);
            let mut walk = Vec::new();
            let mut d = DartId(start);
            loop {
                dart_face[d.index()] = id;
                walk.push(d);
                d = self.face_next(d);
                if d.0 == start {
                    break;
                }
            }
            faces.push(walk);
        }
        self.faces = faces;
        self.dart_face = dart_face;
    }

    fn find_components(&mut self) {
        let n = self.vertex_count();
        let mut comp = vec![ComponentId(u32::MAX); n];
        let mut components = Vec::new();
        let mut stack = Vec::new();
        for root in 0..n {
            if comp[root].0 != u32::MAX {
                continue;
            }
            let id = ComponentId(components.len() as u32);
            let mut vertices = Vec::new();
            comp[root] = id;
            stack.push(VertexId(root as u32));
            while let Some(v) = stack.pop() {
                vertices.push(v);
                for &d in &self.rotation[v.index()] {
                    let w = self.head(d);
                    if comp[w.index()].0 == u32::MAX {
                        comp[w.index()] = id;
                        stack.push(w);
                    }
                }
            }
            vertices.sort_unstable();
            components.push(Component {
                vertices,
                edges: Vec::new(),
                faces: Vec::new(),
            });
        }
        for e in self.edges() {
            let c = comp[self.ends[e.index()][0].index()];
            components[c.index()].edges.push(e);
        }
        for f in self.faces() {
            let c = comp[self.origin(self.faces[f.index()][0]).index()];
            components[c.index()].faces.push(f);
        }
        self.components = components;
        self.vertex_component = comp;
    }

    /// Per component `V - E + F = 2`, counting an isolated vertex as one face.
    /// Summed over components this is `V - E + F = 1 + C` with the outer
    /// faces identified.
    fn check_euler(&self) -> Result<(), LoadError> {
        for c in &self.components {
            let v = c.vertices.len() as i64;
            let e = c.edges.len() as i64;
            let f = if c.edges.is_empty() {
                1
            } else {
                c.faces.len() as i64
            };
            if v - e + f != 2 {
                return Err(LoadError::NonPlanarEmbedding {
                    vertex: self.vertex_names[c.vertices[0].index()].clone(),
                    vertices: v as usize,
                    edges: e as usize,
                    faces: f as usize,
                });
            }
        }
        Ok(())
    }
}
