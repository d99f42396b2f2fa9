//! Seeded random instances for property sweeps.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{BilliardRecord, DirectedCycle, Edge, GraphSpec, Instance, Mode, Model, Orientation};
use crate::rational::Rational;

/// Size limits for [`random_instance`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_vertices: usize,
    pub max_edges: usize,
    pub max_cycles: usize,
    pub max_cycle_len: usize,
    pub max_billiards: usize,
    /// Largest denominator of edge lengths and positions.
    pub max_denominator: u32,
    /// Edge lengths are drawn from `(0, max_length]`.
    pub max_length: u32,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_vertices: 6,
            max_edges: 10,
            max_cycles: 4,
            max_cycle_len: 8,
            max_billiards: 4,
            max_denominator: 4,
            max_length: 2,
        }
    }
}

impl Limits {
    fn check(&self) -> Result<(), GenerationError> {
        let ok = self.max_vertices >= 2
            && self.max_edges >= 1
            && self.max_cycles >= 1
            && self.max_cycle_len >= 2
            && self.max_billiards >= 1
            && self.max_denominator >= 1
            && self.max_length >= 1;
        if ok {
            Ok(())
        } else {
            Err(GenerationError::BadLimits(*self))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerationError {
    #[error("limits {0:?} admit no instance (need >= 2 vertices, >= 1 edge, cycle length >= 2)")]
    BadLimits(Limits),
    #[error("seed {seed}: no valid instance after {attempts} attempts")]
    Exhausted { seed: u64, attempts: usize },
}

const ATTEMPTS: usize = 64;

/// Deterministic random instance for `seed`. Every returned instance validates.
pub fn random_instance(seed: u64, limits: &Limits) -> Result<Instance, GenerationError> {
    limits.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..ATTEMPTS {
        if let Some(inst) = attempt(&mut rng, limits) {
            if Model::new(inst.clone()).is_ok() {
                return Ok(inst);
            }
        }
    }
    Err(GenerationError::Exhausted {
        seed,
        attempts: ATTEMPTS,
    })
}

fn attempt(rng: &mut ChaCha8Rng, lim: &Limits) -> Option<Instance> {
    let nv = rng.gen_range(2..=lim.max_vertices);
    let ne = rng.gen_range(1..=lim.max_edges);
    let vertices: Vec<String> = (1..=nv).map(|k| format!("v{k}")).collect();

    let mut edges = Vec::with_capacity(ne);
    // incidence[v] = (edge index, other endpoint)
    let mut incidence: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv];
    for k in 0..ne {
        let u = rng.gen_range(0..nv);
        let mut v = rng.gen_range(0..nv - 1);
        if v >= u {
            v += 1;
        }
        let den = rng.gen_range(1..=lim.max_denominator) as i128;
        let num = rng.gen_range(1..=den * lim.max_length as i128);
        edges.push(Edge {
            id: format!("e{}", k + 1),
            u: vertices[u].clone(),
            v: vertices[v].clone(),
            length: Rational::new(num, den).ok()?,
        });
        incidence[u].push((k, v));
        incidence[v].push((k, u));
    }

    let nc = rng.gen_range(1..=lim.max_cycles);
    let starts: Vec<usize> = (0..nv).filter(|&v| !incidence[v].is_empty()).collect();
    let mut cycles = Vec::with_capacity(nc);
    for c in 0..nc {
        let start = *starts.choose(rng)?;
        let (verts, cedges) = random_closed_walk(rng, &incidence, start, lim.max_cycle_len);
        cycles.push(DirectedCycle {
            id: format!("c{}", c + 1),
            verts: verts.iter().map(|&v| vertices[v].clone()).collect(),
            edges: cedges.iter().map(|&e| edges[e].id.clone()).collect(),
        });
    }

    let nb = rng.gen_range(1..=lim.max_billiards);
    let mut instance = Instance {
        graph: GraphSpec { vertices, edges },
        cycles,
        billiards: Vec::with_capacity(nb),
        mode: Mode::Original,
    };
    for b in 0..nb {
        let mut placed = false;
        for _ in 0..ATTEMPTS {
            let ci = rng.gen_range(0..nc);
            let cyc = &instance.cycles[ci];
            let pos = rng.gen_range(0..cyc.len());
            let edge = instance
                .graph
                .edges
                .iter()
                .find(|e| e.id == cyc.edges[pos])?;
            let den = rng.gen_range(1..=lim.max_denominator) as i128;
            // x = j / den with 0 < x <= length
            let top = (edge.length * Rational::from_integer(den)).floor();
            if top < 1 {
                continue;
            }
            let x = Rational::new(rng.gen_range(1..=top), den).ok()?;
            let orient = if rng.gen_bool(0.5) {
                Orientation::Forward
            } else {
                Orientation::Backward
            };
            let rec = BilliardRecord {
                id: format!("b{}", b + 1),
                cycle: cyc.id.clone(),
                home_cycle: None,
                orient,
                edge_index: pos + 1,
                x,
            };
            instance.billiards.push(rec);
            if Model::new(instance.clone()).is_ok() {
                placed = true;
                break;
            }
            instance.billiards.pop();
        }
        if !placed {
            return None;
        }
    }
    Some(instance)
}

/// Random closed walk from `start` with 2..=max_len edges. Tries a free walk
/// that happens to return; falls back to walking out and retracing.
fn random_closed_walk(
    rng: &mut ChaCha8Rng,
    incidence: &[Vec<(usize, usize)>],
    start: usize,
    max_len: usize,
) -> (Vec<usize>, Vec<usize>) {
    for _ in 0..8 {
        let mut verts = vec![start];
        let mut edges = Vec::new();
        let mut at = start;
        while edges.len() < max_len {
            let &(e, next) = incidence[at]
                .choose(rng)
                .expect("walk stays on non-isolated vertices");
            edges.push(e);
            at = next;
            if at == start && edges.len() >= 2 && rng.gen_bool(0.5) {
                return (verts, edges);
            }
            verts.push(at);
        }
    }
    let out = rng.gen_range(1..=max_len / 2);
    let mut verts = vec![start];
    let mut edges = Vec::new();
    let mut at = start;
    for _ in 0..out {
        let &(e, next) = incidence[at]
            .choose(rng)
            .expect("walk stays on non-isolated vertices");
        edges.push(e);
        at = next;
        verts.push(at);
    }
    // Retrace: vertices back down to (excluding) start, edges reversed.
    let back_verts: Vec<usize> = verts[1..verts.len() - 1].iter().rev().copied().collect();
    let back_edges: Vec<usize> = edges.iter().rev().copied().collect();
    verts.extend(back_verts);
    edges.extend(back_edges);
    (verts, edges)
}
