//! Decides whether an embedded planar multigraph with exact edge lengths
//! folds flat onto a line, and produces a mountain/valley witness when it
//! does.
//!
//! The pipeline forces vertex coordinates from the lengths, turns every face
//! into exact-count clauses by crimping minimal runs of equal edges, adds one
//! clause per vertex, and solves the result as an integer max-flow problem.

pub mod csp;
pub mod decider;
pub mod document;
pub mod error;
pub mod face_constraints;
pub mod flow;
pub mod geometry;
pub mod graph;
pub mod length;
pub mod oracle;
pub mod runlist;

pub use csp::{Assignment, Clause, Color, CspInstance, VarId};
pub use decider::{
    decide, decide_with, DecideOptions, Decision, Fold, UnsatReason, Verdict, Witness,
};
pub use document::{load_instance, Instance, InstanceDocument};
pub use error::{DecideError, LoadError};
pub use face_constraints::{generate_face_constraints, FaceConstraints};
pub use geometry::{assign_coordinates, Coord, CoordinateMap};
pub use graph::{
    AngleId, ComponentId, DartId, EdgeId, EmbeddedGraph, FaceCycle, FaceId, GraphBuilder, VertexId,
};
pub use length::Length;
