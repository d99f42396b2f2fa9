use std::collections::HashMap;

use thiserror::Error;

use super::{CycleData, EdgeData, Instance, Model, Point, Step};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("duplicate {kind} id {id:?}")]
    DuplicateId { kind: &'static str, id: String },
    #[error("edge {edge:?} references unknown vertex {vertex:?}")]
    UnknownEdgeEndpoint { edge: String, vertex: String },
    #[error("edge {edge:?} is a loop at vertex {vertex:?}")]
    LoopEdge { edge: String, vertex: String },
    #[error("edge {edge:?} has non-positive length {length}")]
    NonPositiveLength { edge: String, length: Rational },
    #[error("cycle {cycle:?} has {len} edges; at least 2 are required")]
    CycleTooShort { cycle: String, len: usize },
    #[error("cycle {cycle:?} lists {verts} vertices but {edges} edges")]
    CycleArityMismatch {
        cycle: String,
        verts: usize,
        edges: usize,
    },
    #[error("cycle {cycle:?} references unknown vertex {vertex:?}")]
    UnknownCycleVertex { cycle: String, vertex: String },
    #[error("cycle {cycle:?} references unknown edge {edge:?}")]
    UnknownCycleEdge { cycle: String, edge: String },
    #[error(
        "cycle {cycle:?} position {position}: edge {edge:?} does not join {from:?} and {to:?}"
    )]
    CycleEndpointMismatch {
        cycle: String,
        position: usize,
        edge: String,
        from: String,
        to: String,
    },
    #[error("instance has no billiards")]
    NoBilliards,
    #[error("unknown billiard {billiard:?}")]
    UnknownBilliard { billiard: String },
    #[error("billiard {billiard:?} references unknown cycle {cycle:?}")]
    UnknownCycle { billiard: String, cycle: String },
    #[error("billiard {billiard:?} has edge_index {index} outside 1..={len}")]
    EdgeIndexOutOfRange {
        billiard: String,
        index: usize,
        len: usize,
    },
    #[error("billiard {billiard:?} has x = {x} outside (0, {length}]")]
    PositionOutOfRange {
        billiard: String,
        x: Rational,
        length: Rational,
    },
    #[error("billiards {first:?} and {second:?} occupy the same point at time 0")]
    Coincident { first: String, second: String },
}

fn index_ids<'a>(
    kind: &'static str,
    ids: impl Iterator<Item = &'a String>,
) -> Result<(Vec<String>, HashMap<String, usize>), ValidationError> {
    let mut list = Vec::new();
    let mut map = HashMap::new();
    for id in ids {
        if map.insert(id.clone(), list.len()).is_some() {
            return Err(ValidationError::DuplicateId {
                kind,
                id: id.clone(),
            });
        }
        list.push(id.clone());
    }
    Ok((list, map))
}

pub(super) fn validate(instance: Instance) -> Result<Model, ValidationError> {
    let (vertex_ids, vertex_index) = index_ids("vertex", instance.graph.vertices.iter())?;
    let (edge_ids, edge_index) = index_ids("edge", instance.graph.edges.iter().map(|e| &e.id))?;
    let (cycle_ids, cycle_index) = index_ids("cycle", instance.cycles.iter().map(|c| &c.id))?;

    let mut edges = Vec::with_capacity(instance.graph.edges.len());
    for e in &instance.graph.edges {
        let endpoint = |v: &String| {
            vertex_index
                .get(v)
                .copied()
                .ok_or_else(|| ValidationError::UnknownEdgeEndpoint {
                    edge: e.id.clone(),
                    vertex: v.clone(),
                })
        };
        let (u, v) = (endpoint(&e.u)?, endpoint(&e.v)?);
        if u == v {
            return Err(ValidationError::LoopEdge {
                edge: e.id.clone(),
                vertex: e.u.clone(),
            });
        }
        if !e.length.is_positive() {
            return Err(ValidationError::NonPositiveLength {
                edge: e.id.clone(),
                length: e.length,
            });
        }
        edges.push(EdgeData {
            u,
            v,
            length: e.length,
        });
    }

    let mut cycles = Vec::with_capacity(instance.cycles.len());
    for c in &instance.cycles {
        if c.verts.len() != c.edges.len() {
            return Err(ValidationError::CycleArityMismatch {
                cycle: c.id.clone(),
                verts: c.verts.len(),
                edges: c.edges.len(),
            });
        }
        if c.edges.len() < 2 {
            return Err(ValidationError::CycleTooShort {
                cycle: c.id.clone(),
                len: c.edges.len(),
            });
        }
        let verts =
            c.verts
                .iter()
                .map(|v| {
                    vertex_index.get(v).copied().ok_or_else(|| {
                        ValidationError::UnknownCycleVertex {
                            cycle: c.id.clone(),
                            vertex: v.clone(),
                        }
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
        let n = verts.len();
        let mut steps = Vec::with_capacity(n);
        for (i, eid) in c.edges.iter().enumerate() {
            let edge =
                edge_index
                    .get(eid)
                    .copied()
                    .ok_or_else(|| ValidationError::UnknownCycleEdge {
                        cycle: c.id.clone(),
                        edge: eid.clone(),
                    })?;
            let (from, to) = (verts[i], verts[(i + 1) % n]);
            let ed = &edges[edge];
            if !((ed.u == from && ed.v == to) || (ed.u == to && ed.v == from)) {
                return Err(ValidationError::CycleEndpointMismatch {
                    cycle: c.id.clone(),
                    position: i + 1,
                    edge: eid.clone(),
                    from: vertex_ids[from].clone(),
                    to: vertex_ids[to].clone(),
                });
            }
            steps.push(Step { edge, from, to });
        }
        let length = steps.iter().map(|s| edges[s.edge].length).sum();
        cycles.push(CycleData { steps, length });
    }

    if instance.billiards.is_empty() {
        return Err(ValidationError::NoBilliards);
    }
    let mut order: Vec<usize> = (0..instance.billiards.len()).collect();
    order.sort_by(|&a, &b| instance.billiards[a].id.cmp(&instance.billiards[b].id));
    let (billiard_ids, billiard_index) =
        index_ids("billiard", order.iter().map(|&i| &instance.billiards[i].id))?;

    let hash = instance.hash();
    let mut model = Model {
        instance,
        vertex_ids,
        edge_ids,
        cycle_ids,
        billiard_ids,
        edges,
        cycles,
        initial: Vec::new(),
        cycle_index,
        billiard_index,
        hash,
    };

    let mut initial = Vec::with_capacity(order.len());
    for &i in &order {
        let (_, s) = model.state_from_record(&model.instance.billiards[i])?;
        initial.push(s);
    }
    model.initial = initial;

    let mut seen: HashMap<Point, usize> = HashMap::new();
    for (b, s) in model.initial.iter().enumerate() {
        if let Some(&other) = seen.get(&model.point(s)) {
            return Err(ValidationError::Coincident {
                first: model.billiard_id(other).to_string(),
                second: model.billiard_id(b).to_string(),
            });
        }
        seen.insert(model.point(s), b);
    }
    Ok(model)
}
