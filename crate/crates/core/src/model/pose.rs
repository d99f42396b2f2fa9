use serde::{Deserialize, Serialize};

use super::{BilliardState, Model, Orientation};
use crate::rational::Rational;

/// A point of the graph: a vertex, or an interior point of an edge given by
/// its offset from the edge's `u` endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Vertex(usize),
    Edge { edge: usize, offset: Rational },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pose {
    /// Strictly inside `edge`, `dir` in canonical coordinates (`Forward` is u -> v).
    OnEdge {
        edge: usize,
        offset: Rational,
        dir: Orientation,
    },
    /// On `vertex`, having come along `incoming` and about to leave along `outgoing`.
    AtVertex {
        vertex: usize,
        incoming: usize,
        outgoing: usize,
    },
}

impl Pose {
    pub fn point(&self) -> Point {
        match *self {
            Pose::OnEdge { edge, offset, .. } => Point::Edge { edge, offset },
            Pose::AtVertex { vertex, .. } => Point::Vertex(vertex),
        }
    }
}

/// Canonical-coordinate view of the current edge: `(edge, offset from u,
/// direction)`, without collapsing the `x == len` boundary onto a vertex.
pub(crate) fn edge_coords(model: &Model, b: &BilliardState) -> (usize, Rational, Orientation) {
    let step = model.step_of(b);
    let e = model.edge(step.edge);
    if model.target_vertex(b) == e.v {
        (step.edge, e.length - b.x, Orientation::Forward)
    } else {
        (step.edge, b.x, Orientation::Backward)
    }
}

pub(super) fn physical_pose(model: &Model, b: &BilliardState) -> Pose {
    let step = model.step_of(b);
    let len = model.edge(step.edge).length;
    if b.x == len {
        let prev = BilliardState {
            step: model.prev_step(b),
            ..*b
        };
        return Pose::AtVertex {
            vertex: model.source_vertex(b),
            incoming: model.step_of(&prev).edge,
            outgoing: step.edge,
        };
    }
    let (edge, offset, dir) = edge_coords(model, b);
    Pose::OnEdge { edge, offset, dir }
}

/// Serializable point with string ids, used in traces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum PointRecord {
    Vertex { vertex: String },
    Edge { edge: String, offset: Rational },
}

impl Point {
    pub fn to_record(&self, model: &Model) -> PointRecord {
        match *self {
            Point::Vertex(v) => PointRecord::Vertex {
                vertex: model.vertex_id(v).to_string(),
            },
            Point::Edge { edge, offset } => PointRecord::Edge {
                edge: model.edge_id(edge).to_string(),
                offset,
            },
        }
    }
}
