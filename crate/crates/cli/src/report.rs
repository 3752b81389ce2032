//! The result document written by `decide`.

use std::collections::BTreeMap;

use graphfold::decider::Stats;
use graphfold::document::{angle_label, DartRef};
use graphfold::length::format_rational;
use graphfold::{ComponentId, DartId, EmbeddedGraph, FaceId, Instance, UnsatReason, Verdict};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultDocument {
    /// `SAT` or `UNSAT`.
    pub status: String,
    /// Angle label (`vertex/edge:end`) to `M`, `V` or `F`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub witness: BTreeMap<String, String>,
    /// Vertex to exact coordinate.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub coords: BTreeMap<String, String>,
    /// One dart on the exterior face of each component with edges.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exteriors: Vec<DartRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<ReasonDoc>,
    pub stats: StatsDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatsDoc {
    pub angles: usize,
    pub clauses: usize,
    pub variables: usize,
    pub flow_value: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

/// Structured failure cause; `message` is the human-readable summary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum ReasonDoc {
    #[serde(rename = "closure violation")]
    Closure {
        component: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        edge: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        face: Option<DartRef>,
        message: String,
    },
    #[serde(rename = "flat-angle count violation")]
    FlatCount {
        vertex: String,
        count: usize,
        message: String,
    },
    #[serde(rename = "totals mismatch")]
    Totals {
        component: u32,
        red: u64,
        blue: u64,
        message: String,
    },
    #[serde(rename = "flow shortfall")]
    Flow {
        component: u32,
        value: u64,
        required: u64,
        message: String,
    },
    #[serde(rename = "diameter nesting violation")]
    Nesting {
        child: u32,
        parent_face: DartRef,
        child_diameter: String,
        face_diameter: String,
        message: String,
    },
    #[serde(rename = "no admissible exterior face")]
    NoExterior { component: u32, message: String },
    #[serde(rename = "no valid assignment")]
    NoAssignment { component: u32, message: String },
}

impl ReasonDoc {
    pub fn kind(&self) -> &'static str {
        match self {
            ReasonDoc::Closure { .. } => "closure violation",
            ReasonDoc::FlatCount { .. } => "flat-angle count violation",
            ReasonDoc::Totals { .. } => "totals mismatch",
            ReasonDoc::Flow { .. } => "flow shortfall",
            ReasonDoc::Nesting { .. } => "diameter nesting violation",
            ReasonDoc::NoExterior { .. } => "no admissible exterior face",
            ReasonDoc::NoAssignment { .. } => "no valid assignment",
        }
    }
}

pub fn dart_ref(g: &EmbeddedGraph, d: DartId) -> DartRef {
    DartRef {
        edge: g.edge_name(d.edge()).to_string(),
        end: d.end() as u8,
    }
}

/// The first dart of the face's boundary walk.
pub fn face_ref(g: &EmbeddedGraph, f: FaceId) -> DartRef {
    dart_ref(g, g.face_darts(f)[0])
}

fn reason_doc(g: &EmbeddedGraph, reason: &UnsatReason) -> ReasonDoc {
    let message = reason.to_string();
    let id = |c: &ComponentId| c.0;
    match reason {
        UnsatReason::ClosureViolation {
            component,
            edge,
            face,
            ..
        } => ReasonDoc::Closure {
            component: id(component),
            edge: edge.map(|e| g.edge_name(e).to_string()),
            face: face.map(|f| face_ref(g, f)),
            message,
        },
        UnsatReason::FlatCountViolation { vertex, count } => ReasonDoc::FlatCount {
            vertex: g.vertex_name(*vertex).to_string(),
            count: *count,
            message,
        },
        UnsatReason::TotalsMismatch {
            component,
            red,
            blue,
        } => ReasonDoc::Totals {
            component: id(component),
            red: *red,
            blue: *blue,
            message,
        },
        UnsatReason::FlowShortfall {
            component,
            value,
            required,
        } => ReasonDoc::Flow {
            component: id(component),
            value: *value,
            required: *required,
            message,
        },
        UnsatReason::DiameterViolation {
            child,
            parent_face,
            child_diameter,
            face_diameter,
        } => ReasonDoc::Nesting {
            child: id(child),
            parent_face: face_ref(g, *parent_face),
            child_diameter: format_rational(child_diameter),
            face_diameter: format_rational(face_diameter),
            message,
        },
        UnsatReason::NoAdmissibleExterior { component } => ReasonDoc::NoExterior {
            component: id(component),
            message,
        },
        UnsatReason::NoValidAssignment { component } => ReasonDoc::NoAssignment {
            component: id(component),
            message,
        },
    }
}

impl ResultDocument {
    pub fn new(instance: &Instance, verdict: &Verdict, stats: &Stats) -> Self {
        let g = &instance.graph;
        let stats = StatsDoc {
            angles: stats.angles,
            clauses: stats.clauses,
            variables: stats.variables,
            flow_value: stats.flow_value,
            elapsed_ms: None,
        };
        match verdict {
            Verdict::Sat(w) => ResultDocument {
                status: verdict.status().to_string(),
                witness: g
                    .darts()
                    .map(|d| {
                        (
                            angle_label(g, d.angle()),
                            w.folds[d.index()].as_str().to_string(),
                        )
                    })
                    .collect(),
                coords: w
                    .coords
                    .iter()
                    .map(|(v, x)| (g.vertex_name(v).to_string(), format_rational(x)))
                    .collect(),
                exteriors: w.exteriors.values().map(|&f| face_ref(g, f)).collect(),
                reason: None,
                stats,
            },
            Verdict::Unsat(r) => ResultDocument {
                status: verdict.status().to_string(),
                witness: BTreeMap::new(),
                coords: BTreeMap::new(),
                exteriors: Vec::new(),
                reason: Some(reason_doc(g, r)),
                stats,
            },
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("result documents serialize");
        text.push('\n');
        text
    }
}
