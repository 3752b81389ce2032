//! The JSON instance document and its conversion to an [`Instance`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::LoadError;
use crate::graph::{AngleId, ComponentId, DartId, EmbeddedGraph, FaceId, GraphBuilder};
use crate::length::{Length, LengthError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDoc>,
    #[serde(default)]
    pub rotation: BTreeMap<String, Vec<DartRef>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exterior: Option<ExteriorDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flat_angles: Vec<FlatAngleDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<ComponentDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub id: String,
    pub ends: [String; 2],
    #[serde(deserialize_with = "exact_length")]
    pub length: String,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DartRef {
    pub edge: String,
    pub end: u8,
}

/// One dart, or one dart per component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExteriorDoc {
    One(DartRef),
    Many(Vec<DartRef>),
}

/// The angle after dart `(edge, end)` in `vertex`'s rotation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlatAngleDoc {
    pub vertex: String,
    pub edge: String,
    pub end: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentDoc {
    pub root_dart: DartRef,
    pub parent_face: DartRef,
}

/// Accepts a JSON string or integer; floats would lose exactness.
fn exact_length<'de, D: Deserializer<'de>>(deserializer: D) -> Result<String, D::Error> {
    struct ExactLength;

    impl Visitor<'_> for ExactLength {
        type Value = String;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("an integer or a string `p` or `p/q`")
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<String, E> {
            Ok(v.to_owned())
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<String, E> {
            Ok(v.to_string())
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<String, E> {
            Ok(v.to_string())
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<String, E> {
            Err(E::custom(format!(
                "floating-point length {v} is not exact; write it as a string `p/q`"
            )))
        }
    }

    deserializer.deserialize_any(ExactLength)
}

/// A child component placed inside an interior face of its parent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComponentLink {
    pub child: ComponentId,
    pub parent: ComponentId,
    pub parent_face: FaceId,
}

/// A validated instance: the graph plus the optional designations.
#[derive(Clone, Debug)]
pub struct Instance {
    pub graph: EmbeddedGraph,
    /// Designated exterior faces, at most one per component, by a dart on them.
    pub exteriors: Vec<DartId>,
    pub flat_angles: BTreeSet<AngleId>,
    pub forest: Vec<ComponentLink>,
}

impl Instance {
    pub fn from_graph(graph: EmbeddedGraph) -> Self {
        Instance {
            graph,
            exteriors: Vec::new(),
            flat_angles: BTreeSet::new(),
            forest: Vec::new(),
        }
    }

    /// Designated exterior face of each component, if any.
    pub fn exterior_faces(&self) -> BTreeMap<ComponentId, FaceId> {
        self.exteriors
            .iter()
            .map(|&d| {
                let f = self.graph.face_of_dart(d);
                (self.graph.component_of_face(f), f)
            })
            .collect()
    }
}

/// `vertex/edge:end`, the name used for an angle in result documents.
pub fn angle_label(g: &EmbeddedGraph, a: AngleId) -> String {
    let d = a.dart();
    format!(
        "{}/{}:{}",
        g.vertex_name(g.origin(d)),
        g.edge_name(d.edge()),
        d.end()
    )
}

/// Inverse of [`angle_label`].
pub fn parse_angle_label(g: &EmbeddedGraph, label: &str) -> Option<AngleId> {
    let (vertex, rest) = label.split_once('/')?;
    let (edge, end) = rest.rsplit_once(':')?;
    let end: usize = end.parse().ok().filter(|&e| e < 2)?;
    let d = DartId::new(g.edge_by_name(edge)?, end);
    (g.vertex_name(g.origin(d)) == vertex).then(|| d.angle())
}

/// Parses and validates a JSON instance.
pub fn load_instance(text: &str) -> Result<Instance, LoadError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: InstanceDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let inner = e.inner();
        let path = e.path().to_string();
        let context = if path == "." {
            format!("line {}, column {}", inner.line(), inner.column())
        } else {
            format!(
                "`{path}` (line {}, column {})",
                inner.line(),
                inner.column()
            )
        };
        let message = inner.to_string();
        let message = message
            .split(" at line ")
            .next()
            .unwrap_or(&message)
            .to_owned();
        LoadError::malformed(context, message)
    })?;
    doc.to_instance()
}

impl InstanceDocument {
    pub fn to_instance(&self) -> Result<Instance, LoadError> {
        let mut b = GraphBuilder::new();
        let mut vertex_ids = BTreeMap::new();
        for (i, name) in self.vertices.iter().enumerate() {
            if vertex_ids
                .insert(name.as_str(), b.add_vertex(name.clone()))
                .is_some()
            {
                return Err(LoadError::malformed(
                    format!("vertices[{i}]"),
                    format!("duplicate vertex `{name}`"),
                ));
            }
        }
        let vertex = |ctx: String, name: &str| {
            vertex_ids
                .get(name)
                .copied()
                .ok_or_else(|| LoadError::malformed(ctx, format!("unknown vertex `{name}`")))
        };
        let mut edge_ids = BTreeMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            let from = vertex(format!("edges[{i}].ends[0]"), &e.ends[0])?;
            let to = vertex(format!("edges[{i}].ends[1]"), &e.ends[1])?;
            let length = e.length.parse::<Length>().map_err(|err| match err {
                LengthError::NonPositive(_) => LoadError::NonPositiveLength {
                    edge: e.id.clone(),
                    length: e.length.clone(),
                },
                LengthError::Syntax(msg) => LoadError::malformed(format!("edges[{i}].length"), msg),
            })?;
            let id = b.add_edge(e.id.clone(), from, to, length);
            if edge_ids.insert(e.id.as_str(), id).is_some() {
                return Err(LoadError::malformed(
                    format!("edges[{i}].id"),
                    format!("duplicate edge `{}`", e.id),
                ));
            }
        }
        let dart = |ctx: &str, r: &DartRef| -> Result<DartId, LoadError> {
            let e = edge_ids
                .get(r.edge.as_str())
                .ok_or_else(|| LoadError::malformed(ctx, format!("unknown edge `{}`", r.edge)))?;
            if r.end > 1 {
                return Err(LoadError::malformed(
                    ctx,
                    format!("dart end must be 0 or 1, got {}", r.end),
                ));
            }
            Ok(DartId::new(*e, r.end as usize))
        };
        for (name, darts) in &self.rotation {
            let v = vertex(format!("rotation.{name}"), name)?;
            for (j, r) in darts.iter().enumerate() {
                b.push_rotation(v, dart(&format!("rotation.{name}[{j}]"), r)?);
            }
        }
        let graph = b.build()?;

        let exterior_refs: Vec<&DartRef> = match &self.exterior {
            None => Vec::new(),
            Some(ExteriorDoc::One(r)) => vec![r],
            Some(ExteriorDoc::Many(rs)) => rs.iter().collect(),
        };
        let mut exteriors = Vec::new();
        let mut exterior_components = BTreeMap::new();
        for (i, r) in exterior_refs.into_iter().enumerate() {
            let ctx = format!("exterior[{i}]");
            let d = dart(&ctx, r)?;
            let c = graph.component_of_face(graph.face_of_dart(d));
            if let Some(prev) = exterior_components.insert(c, i) {
                return Err(LoadError::malformed(
                    ctx,
                    format!("component already has an exterior face (exterior[{prev}])"),
                ));
            }
            exteriors.push(d);
        }

        let mut flat_angles = BTreeSet::new();
        for (i, fa) in self.flat_angles.iter().enumerate() {
            let ctx = format!("flat_angles[{i}]");
            let d = dart(
                &ctx,
                &DartRef {
                    edge: fa.edge.clone(),
                    end: fa.end,
                },
            )?;
            let v = vertex(ctx.clone(), &fa.vertex)?;
            if graph.origin(d) != v {
                return Err(LoadError::malformed(
                    ctx,
                    format!("dart {}:{} does not leave `{}`", fa.edge, fa.end, fa.vertex),
                ));
            }
            if !flat_angles.insert(d.angle()) {
                return Err(LoadError::malformed(ctx, "angle listed twice"));
            }
        }

        let mut forest = Vec::new();
        let mut children = BTreeSet::new();
        for (i, c) in self.components.iter().enumerate() {
            let ctx = format!("components[{i}]");
            let root = dart(&format!("{ctx}.root_dart"), &c.root_dart)?;
            let parent_dart = dart(&format!("{ctx}.parent_face"), &c.parent_face)?;
            let child = graph.component_of_vertex(graph.origin(root));
            let parent_face = graph.face_of_dart(parent_dart);
            let parent = graph.component_of_face(parent_face);
            if child == parent {
                return Err(LoadError::malformed(
                    ctx,
                    "a component cannot sit inside its own face",
                ));
            }
            if !children.insert(child) {
                return Err(LoadError::malformed(
                    ctx,
                    "component listed twice as a child",
                ));
            }
            forest.push(ComponentLink {
                child,
                parent,
                parent_face,
            });
        }
        let parent_of: BTreeMap<ComponentId, ComponentId> =
            forest.iter().map(|l| (l.child, l.parent)).collect();
        for link in &forest {
            let mut seen = BTreeSet::from([link.child]);
            let mut at = link.parent;
            while let Some(&p) = parent_of.get(&at) {
                if !seen.insert(at) {
                    return Err(LoadError::malformed(
                        "components",
                        "parent links contain a cycle",
                    ));
                }
                at = p;
            }
            if seen.contains(&at) {
                return Err(LoadError::malformed(
                    "components",
                    "parent links contain a cycle",
                ));
            }
        }
        let instance = Instance {
            graph,
            exteriors,
            flat_angles,
            forest,
        };
        let parent_faces: BTreeSet<FaceId> =
            instance.forest.iter().map(|l| l.parent_face).collect();
        for (c, f) in instance.exterior_faces() {
            if parent_faces.contains(&f) {
                return Err(LoadError::malformed(
                    "exterior",
                    format!(
                        "face {f} of component {c} holds a child component and cannot be exterior"
                    ),
                ));
            }
        }
        Ok(instance)
    }

    /// Serializes an instance; loading the result yields the same graph.
    pub fn from_instance(instance: &Instance) -> Self {
        let g = &instance.graph;
        let dart_ref = |d: DartId| DartRef {
            edge: g.edge_name(d.edge()).to_owned(),
            end: d.end() as u8,
        };
        let exterior = match instance.exteriors.as_slice() {
            [] => None,
            [d] => Some(ExteriorDoc::One(dart_ref(*d))),
            ds => Some(ExteriorDoc::Many(ds.iter().map(|&d| dart_ref(d)).collect())),
        };
        InstanceDocument {
            vertices: g.vertices().map(|v| g.vertex_name(v).to_owned()).collect(),
            edges: g
                .edges()
                .map(|e| {
                    let [a, b] = g.ends(e);
                    EdgeDoc {
                        id: g.edge_name(e).to_owned(),
                        ends: [g.vertex_name(a).to_owned(), g.vertex_name(b).to_owned()],
                        length: g.length(e).to_string(),
                    }
                })
                .collect(),
            rotation: g
                .vertices()
                .filter(|&v| g.degree(v) > 0)
                .map(|v| {
                    (
                        g.vertex_name(v).to_owned(),
                        g.rotation(v).iter().map(|&d| dart_ref(d)).collect(),
                    )
                })
                .collect(),
            exterior,
            flat_angles: instance
                .flat_angles
                .iter()
                .map(|&a| {
                    let d = a.dart();
                    FlatAngleDoc {
                        vertex: g.vertex_name(g.origin(d)).to_owned(),
                        edge: g.edge_name(d.edge()).to_owned(),
                        end: d.end() as u8,
                    }
                })
                .collect(),
            components: instance
                .forest
                .iter()
                .map(|l| {
                    let comp = &g.components()[l.child.index()];
                    let root = comp
                        .vertices
                        .iter()
                        .find_map(|&v| g.rotation(v).first().copied());
                    ComponentDoc {
                        root_dart: dart_ref(root.expect("child components have an edge")),
                        parent_face: dart_ref(g.face_darts(l.parent_face)[0]),
                    }
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }
}
