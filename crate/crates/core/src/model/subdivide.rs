//! Refinement of a rationally related graph into equal-length edges.
//!
//! With `alpha` the shortest edge length, every edge has length
//! `alpha * p_i / q_i`. Taking `q = lcm(q_i)`, edge `i` becomes a chain of
//! `p_i * q / q_i` edges of length `alpha / q` through fresh degree-2
//! vertices. Directed cycles and billiard coordinates are rewritten so that
//! every physical position is unchanged, and [`Subdivision`] carries the state
//! bijection between the two instances.

use std::collections::HashSet;

use super::{
    BilliardRecord, BilliardState, DirectedCycle, Edge, GraphSpec, Instance, Model, Orientation,
    Point,
};
use crate::rational::{gcd_u, Rational};

#[derive(Clone, Debug)]
pub struct Subdivision {
    pub instance: Instance,
    /// Shortest original edge length.
    pub alpha: Rational,
    /// lcm of the reduced denominators of `length / alpha`.
    pub q: i128,
    /// Common edge length `alpha / q` of the subdivided graph.
    pub piece: Rational,
    counts: Vec<usize>,
    /// Per cycle, index of the first expanded position of each original position.
    offsets: Vec<Vec<usize>>,
    /// Per cycle, expanded position -> (original position, 1-based piece from `v_i`).
    expanded: Vec<Vec<(usize, usize)>>,
    /// Sub edge -> (original edge, 1-based piece number from `u`).
    edge_origin: Vec<(usize, usize)>,
    /// Sub vertex -> original vertex, or (original edge, k) for the fresh
    /// vertex at offset `k * piece` from `u`.
    vertex_origin: Vec<VertexOrigin>,
}

#[derive(Clone, Copy, Debug)]
enum VertexOrigin {
    Original(usize),
    Interior(usize, usize),
}

fn lcm(a: i128, b: i128) -> i128 {
    a / gcd_u(a.unsigned_abs(), b.unsigned_abs()) as i128 * b
}

/// Subdivides every edge of `model` into pieces of a common length.
pub fn subdivide(model: &Model) -> Subdivision {
    let inst = model.instance();
    let alpha = model
        .edges()
        .iter()
        .map(|e| e.length)
        .min()
        .expect("instance has edges");
    let ratios: Vec<Rational> = model.edges().iter().map(|e| e.length / alpha).collect();
    let q = ratios.iter().fold(1i128, |acc, r| lcm(acc, r.denom()));
    let piece = alpha / Rational::from_integer(q);
    let counts: Vec<usize> = ratios
        .iter()
        .map(|r| (r.numer() * (q / r.denom())) as usize)
        .collect();

    let taken: HashSet<&str> = inst
        .graph
        .vertices
        .iter()
        .chain(inst.graph.edges.iter().map(|e| &e.id))
        .map(String::as_str)
        .collect();
    let mut sep = String::from("/");
    let names = loop {
        let names = piece_names(inst, &counts, &sep);
        let mut fresh = HashSet::new();
        let clash = names
            .iter()
            .zip(&counts)
            .filter(|(_, &c)| c > 1)
            .flat_map(|((vs, es), _)| vs.iter().chain(es.iter()))
            .any(|n| taken.contains(n.as_str()) || !fresh.insert(n.as_str()));
        if !clash {
            break names;
        }
        sep.push('/');
    };

    let mut vertices = inst.graph.vertices.clone();
    let mut vertex_origin: Vec<VertexOrigin> =
        (0..vertices.len()).map(VertexOrigin::Original).collect();
    let mut edges = Vec::new();
    let mut edge_origin = Vec::new();
    for (e, orig) in inst.graph.edges.iter().enumerate() {
        let (inner, pieces) = &names[e];
        for (k, v) in inner.iter().enumerate() {
            vertices.push(v.clone());
            vertex_origin.push(VertexOrigin::Interior(e, k + 1));
        }
        // Chain u = p_0, p_1, ..., p_c = v.
        let chain: Vec<&String> = std::iter::once(&orig.u)
            .chain(inner.iter())
            .chain(std::iter::once(&orig.v))
            .collect();
        for (j, id) in pieces.iter().enumerate() {
            edges.push(Edge {
                id: id.clone(),
                u: chain[j].clone(),
                v: chain[j + 1].clone(),
                length: piece,
            });
            edge_origin.push((e, j + 1));
        }
    }

    let mut cycles = Vec::new();
    let mut offsets = Vec::new();
    let mut expanded = Vec::new();
    for (ci, c) in inst.cycles.iter().enumerate() {
        let data = model.cycle(ci);
        let mut verts = Vec::new();
        let mut cedges = Vec::new();
        let mut offs = Vec::new();
        let mut exp = Vec::new();
        for (i, step) in data.steps.iter().enumerate() {
            offs.push(cedges.len());
            let (inner, pieces) = &names[step.edge];
            let cnt = counts[step.edge];
            let forward = model.edge(step.edge).u == step.from;
            verts.push(c.verts[i].clone());
            for j in 1..=cnt {
                // Piece j counted from v_i.
                let from_u = if forward { j } else { cnt - j + 1 };
                cedges.push(pieces[from_u - 1].clone());
                exp.push((i, j));
                if j < cnt {
                    let k = if forward { j } else { cnt - j };
                    verts.push(inner[k - 1].clone());
                }
            }
        }
        cycles.push(DirectedCycle {
            id: c.id.clone(),
            verts,
            edges: cedges,
        });
        offsets.push(offs);
        expanded.push(exp);
    }

    let mut sub = Subdivision {
        instance: Instance {
            graph: GraphSpec { vertices, edges },
            cycles,
            billiards: Vec::new(),
            mode: inst.mode,
        },
        alpha,
        q,
        piece,
        counts,
        offsets,
        expanded,
        edge_origin,
        vertex_origin,
    };
    let billiards = inst
        .billiards
        .iter()
        .map(|rec| {
            let (_, s) = model.state_from_record(rec).expect("validated record");
            let t = sub.to_sub(model, &s);
            BilliardRecord {
                id: rec.id.clone(),
                cycle: rec.cycle.clone(),
                home_cycle: rec.home_cycle.clone(),
                orient: t.orient,
                edge_index: t.step + 1,
                x: t.x,
            }
        })
        .collect();
    sub.instance.billiards = billiards;
    sub
}

type Names = Vec<(Vec<String>, Vec<String>)>;

/// Per original edge: (interior vertex ids, piece edge ids). Unsplit edges
/// keep their id.
fn piece_names(inst: &Instance, counts: &[usize], sep: &str) -> Names {
    inst.graph
        .edges
        .iter()
        .zip(counts)
        .map(|(e, &c)| {
            if c == 1 {
                (Vec::new(), vec![e.id.clone()])
            } else {
                (
                    (1..c).map(|k| format!("{}{sep}v{k}", e.id)).collect(),
                    (1..=c).map(|k| format!("{}{sep}{k}", e.id)).collect(),
                )
            }
        })
        .collect()
}

impl Subdivision {
    /// Number of pieces original edge `e` was split into.
    pub fn count(&self, e: usize) -> usize {
        self.counts[e]
    }

    /// Maps a state of the original instance onto the subdivided one.
    pub fn to_sub(&self, orig: &Model, b: &BilliardState) -> BilliardState {
        let c = self.counts[orig.step_of(b).edge] as i128;
        let d = self.piece;
        let steps_to_target = (b.x / d).ceil();
        let (j, x) = match b.orient {
            Orientation::Forward => {
                let j = c - steps_to_target + 1;
                (j, b.x - d * Rational::from_integer(c - j))
            }
            Orientation::Backward => {
                let j = steps_to_target;
                (j, b.x - d * Rational::from_integer(j - 1))
            }
        };
        BilliardState {
            step: self.offsets[b.cycle][b.step] + j as usize - 1,
            x,
            ..*b
        }
    }

    /// Maps a state of the subdivided instance back onto the original one.
    pub fn from_sub(&self, orig: &Model, b: &BilliardState) -> BilliardState {
        let (i, j) = self.expanded[b.cycle][b.step];
        let c = self.counts[orig.cycle(b.cycle).steps[i].edge] as i128;
        let d = self.piece;
        let x = match b.orient {
            Orientation::Forward => b.x + d * Rational::from_integer(c - j as i128),
            Orientation::Backward => b.x + d * Rational::from_integer(j as i128 - 1),
        };
        BilliardState { step: i, x, ..*b }
    }

    /// Maps a point of the subdivided graph to the same point of the original.
    pub fn point_to_original(&self, p: Point) -> Point {
        match p {
            Point::Vertex(v) => match self.vertex_origin[v] {
                VertexOrigin::Original(w) => Point::Vertex(w),
                VertexOrigin::Interior(e, k) => Point::Edge {
                    edge: e,
                    offset: self.piece * Rational::from_integer(k as i128),
                },
            },
            Point::Edge { edge, offset } => {
                let (e, j) = self.edge_origin[edge];
                Point::Edge {
                    edge: e,
                    offset: self.piece * Rational::from_integer(j as i128 - 1) + offset,
                }
            }
        }
    }
}
