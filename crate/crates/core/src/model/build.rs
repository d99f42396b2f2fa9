//! Instance builders for the standard configurations: balls on an interval,
//! balls on a circle, and one billiard per face of a tetrahedron.

use thiserror::Error;

use super::{
    BilliardRecord, DirectedCycle, Edge, GraphSpec, Instance, Mode, Model, Orientation,
    ValidationError,
};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("at least one billiard is required")]
    NoBalls,
    #[error("a circle needs at least 2 edges, got {0}")]
    CircleTooSmall(usize),
    #[error("position {0} is out of range")]
    OutOfRange(Rational),
    #[error("two balls share position {0}")]
    Duplicate(Rational),
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}

fn unit_edge(id: String, u: String, v: String) -> Edge {
    Edge {
        id,
        u,
        v,
        length: Rational::ONE,
    }
}

/// Balls on the unit interval `[0, 1]`, each given as `(offset, direction)`
/// with `direction = Forward` moving toward 1. Each ball gets its own
/// out-and-back cycle `(u, v), (e, e)`.
pub fn build_interval(balls: &[(Rational, Orientation)]) -> Result<Instance, BuildError> {
    if balls.is_empty() {
        return Err(BuildError::NoBalls);
    }
    let mut cycles = Vec::new();
    let mut billiards = Vec::new();
    for (i, &(s, dir)) in balls.iter().enumerate() {
        if !s.is_positive() || s >= Rational::ONE {
            return Err(BuildError::OutOfRange(s));
        }
        if balls[..i].iter().any(|&(t, _)| t == s) {
            return Err(BuildError::Duplicate(s));
        }
        let cycle = format!("c{}", i + 1);
        cycles.push(DirectedCycle {
            id: cycle.clone(),
            verts: vec!["u".into(), "v".into()],
            edges: vec!["e".into(), "e".into()],
        });
        // Position 1 runs u -> v: forward heads to v, backward heads to u.
        let x = match dir {
            Orientation::Forward => Rational::ONE - s,
            Orientation::Backward => s,
        };
        billiards.push(BilliardRecord {
            id: format!("b{}", i + 1),
            cycle,
            home_cycle: None,
            orient: dir,
            edge_index: 1,
            x,
        });
    }
    let instance = Instance {
        graph: GraphSpec {
            vertices: vec!["u".into(), "v".into()],
            edges: vec![unit_edge("e".into(), "u".into(), "v".into())],
        },
        cycles,
        billiards,
        mode: Mode::Original,
    };
    Model::new(instance.clone())?;
    Ok(instance)
}

/// Balls on the cycle graph `C_m` with unit edges. Vertex `w{k+1}` sits at
/// arc position `k`; `Forward` moves toward increasing arc position. All balls
/// share the single full-circle cycle.
pub fn build_circle(m: usize, balls: &[(Rational, Orientation)]) -> Result<Instance, BuildError> {
    if m < 2 {
        return Err(BuildError::CircleTooSmall(m));
    }
    if balls.is_empty() {
        return Err(BuildError::NoBalls);
    }
    let circumference = Rational::from_integer(m as i128);
    let vertices: Vec<String> = (1..=m).map(|k| format!("w{k}")).collect();
    let edges: Vec<Edge> = (1..=m)
        .map(|k| unit_edge(format!("e{k}"), format!("w{k}"), format!("w{}", k % m + 1)))
        .collect();
    let cycle = DirectedCycle {
        id: "circle".into(),
        verts: vertices.clone(),
        edges: edges.iter().map(|e| e.id.clone()).collect(),
    };
    let mut billiards = Vec::new();
    for (i, &(a, dir)) in balls.iter().enumerate() {
        if a.is_negative() || a >= circumference {
            return Err(BuildError::OutOfRange(a));
        }
        if balls[..i].iter().any(|&(b, _)| b == a) {
            return Err(BuildError::Duplicate(a));
        }
        // Position k (0-based) covers arcs [k, k+1).
        let k = a.floor() as usize;
        let frac = a - Rational::from_integer(k as i128);
        let (step, x) = match dir {
            Orientation::Forward => (k, Rational::ONE - frac),
            Orientation::Backward if frac.is_zero() => ((k + m - 1) % m, Rational::ONE),
            Orientation::Backward => (k, frac),
        };
        billiards.push(BilliardRecord {
            id: format!("b{}", i + 1),
            cycle: "circle".into(),
            home_cycle: None,
            orient: dir,
            edge_index: step + 1,
            x,
        });
    }
    let instance = Instance {
        graph: GraphSpec { vertices, edges },
        cycles: vec![cycle],
        billiards,
        mode: Mode::Original,
    };
    Model::new(instance.clone())?;
    Ok(instance)
}

/// Placement of one face billiard: 1-based position on the face cycle,
/// distance to the next vertex, orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TetraPlacement {
    pub edge_index: usize,
    pub x: Rational,
    pub orient: Orientation,
}

impl TetraPlacement {
    /// Midpoint of the face's first edge, moving forward.
    pub fn midpoint() -> Self {
        TetraPlacement {
            edge_index: 1,
            x: Rational::new(1, 2).unwrap(),
            orient: Orientation::Forward,
        }
    }
}

/// Faces of `K4`, oriented as the boundary of the 3-simplex so each edge is
/// run in opposite directions by its two faces.
const FACES: [[usize; 3]; 4] = [[2, 3, 4], [1, 4, 3], [1, 2, 4], [1, 3, 2]];

/// `K4` with unit edges and one billiard on each triangular face.
pub fn build_tetrahedron(placements: &[TetraPlacement; 4]) -> Result<Instance, BuildError> {
    let vertices: Vec<String> = (1..=4).map(|k| format!("v{k}")).collect();
    let mut edges = Vec::new();
    for a in 1..=4 {
        for b in a + 1..=4 {
            edges.push(unit_edge(
                format!("e{a}{b}"),
                format!("v{a}"),
                format!("v{b}"),
            ));
        }
    }
    let edge_id = |a: usize, b: usize| format!("e{}{}", a.min(b), a.max(b));
    let cycles: Vec<DirectedCycle> = FACES
        .iter()
        .enumerate()
        .map(|(f, face)| DirectedCycle {
            id: format!("f{}", f + 1),
            verts: face.iter().map(|v| format!("v{v}")).collect(),
            edges: (0..3)
                .map(|i| edge_id(face[i], face[(i + 1) % 3]))
                .collect(),
        })
        .collect();
    let billiards = placements
        .iter()
        .enumerate()
        .map(|(f, p)| BilliardRecord {
            id: format!("b{}", f + 1),
            cycle: format!("f{}", f + 1),
            home_cycle: None,
            orient: p.orient,
            edge_index: p.edge_index,
            x: p.x,
        })
        .collect();
    let instance = Instance {
        graph: GraphSpec { vertices, edges },
        cycles,
        billiards,
        mode: Mode::Original,
    };
    Model::new(instance.clone())?;
    Ok(instance)
}

/// The tetrahedron with every billiard at the midpoint of its face's first
/// edge, moving forward.
pub fn default_tetrahedron() -> Instance {
    build_tetrahedron(&[TetraPlacement::midpoint(); 4])
        .expect("midpoints of distinct edges are valid")
}
