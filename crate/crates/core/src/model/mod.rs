//! Static problem description: graphs, directed cycles and billiard placements.
//!
//! [`Instance`] is the serializable form read from and written to instance
//! files. [`Model`] is a validated instance with ids resolved to indices; the
//! engine and every analysis work on a `Model`.

mod build;
mod pose;
mod random;
mod subdivide;
mod validate;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rational::Rational;

pub use build::{
    build_circle, build_interval, build_tetrahedron, default_tetrahedron, BuildError,
    TetraPlacement,
};
pub(crate) use pose::edge_coords;
pub use pose::{Point, PointRecord, Pose};
pub use random::{random_instance, GenerationError, Limits};
pub use subdivide::{subdivide, Subdivision};
pub use validate::ValidationError;

/// Travel direction along a directed cycle (`+1` forward, `-1` backward).
///
/// The same type doubles as the canonical direction along an edge
/// (`Forward` means from endpoint `u` toward `v`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Backward,
    Forward,
}

impl Orientation {
    pub fn sign(self) -> i8 {
        match self {
            Orientation::Forward => 1,
            Orientation::Backward => -1,
        }
    }

    pub fn from_sign(s: i64) -> Option<Self> {
        match s {
            1 => Some(Orientation::Forward),
            -1 => Some(Orientation::Backward),
            _ => None,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Orientation::Forward => Orientation::Backward,
            Orientation::Backward => Orientation::Forward,
        }
    }
}

impl std::ops::Neg for Orientation {
    type Output = Orientation;
    fn neg(self) -> Orientation {
        self.flip()
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Forward => "+1",
            Orientation::Backward => "-1",
        })
    }
}

impl Serialize for Orientation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i8(self.sign())
    }
}

impl<'de> Deserialize<'de> for Orientation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Orientation::from_sign(v).ok_or_else(|| {
            serde::de::Error::custom(format!("orientation must be 1 or -1, got {v}"))
        })
    }
}

/// Collision rule in force.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Every collider reverses on its own cycle.
    #[default]
    Original,
    /// Pairwise colliders exchange cycles; larger groups reverse in place.
    Modified,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Original => "original",
            Mode::Modified => "modified",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub id: String,
    pub u: String,
    pub v: String,
    pub length: Rational,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphSpec {
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
}

/// Closed walk `v_1 e_1 v_2 ... v_n e_n v_1`; edge `e_i` joins `v_i` and `v_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectedCycle {
    pub id: String,
    pub verts: Vec<String>,
    pub edges: Vec<String>,
}

impl DirectedCycle {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// A billiard in file form. `edge_index` is 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BilliardRecord {
    pub id: String,
    pub cycle: String,
    /// Omitted when equal to `cycle`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub home_cycle: Option<String>,
    pub orient: Orientation,
    pub edge_index: usize,
    pub x: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "InstanceFile", into = "InstanceFile")]
pub struct Instance {
    pub graph: GraphSpec,
    pub cycles: Vec<DirectedCycle>,
    pub billiards: Vec<BilliardRecord>,
    pub mode: Mode,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    cycles: Vec<DirectedCycle>,
    billiards: Vec<BilliardRecord>,
    mode: Mode,
}

impl From<InstanceFile> for Instance {
    fn from(f: InstanceFile) -> Self {
        Instance {
            graph: GraphSpec {
                vertices: f.vertices,
                edges: f.edges,
            },
            cycles: f.cycles,
            billiards: f.billiards,
            mode: f.mode,
        }
    }
}

impl From<Instance> for InstanceFile {
    fn from(i: Instance) -> Self {
        InstanceFile {
            vertices: i.graph.vertices,
            edges: i.graph.edges,
            cycles: i.cycles,
            billiards: i.billiards,
            mode: i.mode,
        }
    }
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialization cannot fail")
    }

    /// Hex SHA-256 of the compact JSON form; identifies the instance in traces.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let bytes = serde_json::to_vec(self).expect("instance serialization cannot fail");
        hex::encode(Sha256::digest(bytes))
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }
}

/// Dynamic state of one billiard, with ids resolved to model indices.
///
/// `step` is the 0-based position in the current cycle. `x` is the remaining
/// distance to the next vertex in the travel direction, in `(0, len]`;
/// `x == len` means the billiard sits on the start vertex of its current edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BilliardState {
    pub cycle: usize,
    pub home: usize,
    pub orient: Orientation,
    pub step: usize,
    pub x: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeData {
    pub u: usize,
    pub v: usize,
    pub length: Rational,
}

/// One position of a resolved cycle: edge `edge` traversed `from -> to` when
/// moving forward.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Step {
    pub edge: usize,
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleData {
    pub steps: Vec<Step>,
    pub length: Rational,
}

/// A validated instance. Billiards are held in lexicographic id order.
#[derive(Clone, Debug)]
pub struct Model {
    instance: Instance,
    vertex_ids: Vec<String>,
    edge_ids: Vec<String>,
    cycle_ids: Vec<String>,
    billiard_ids: Vec<String>,
    edges: Vec<EdgeData>,
    cycles: Vec<CycleData>,
    initial: Vec<BilliardState>,
    cycle_index: HashMap<String, usize>,
    billiard_index: HashMap<String, usize>,
    hash: String,
}

impl Model {
    pub fn new(instance: Instance) -> Result<Self, ValidationError> {
        validate::validate(instance)
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn mode(&self) -> Mode {
        self.instance.mode
    }

    /// Same instance under another collision rule.
    pub fn with_mode(&self, mode: Mode) -> Model {
        let mut m = self.clone();
        m.instance.mode = mode;
        m.hash = m.instance.hash();
        m
    }

    pub fn instance_hash(&self) -> &str {
        &self.hash
    }

    pub fn edges(&self) -> &[EdgeData] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &EdgeData {
        &self.edges[e]
    }

    pub fn cycles(&self) -> &[CycleData] {
        &self.cycles
    }

    pub fn cycle(&self, c: usize) -> &CycleData {
        &self.cycles[c]
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertex_ids[v]
    }

    pub fn edge_id(&self, e: usize) -> &str {
        &self.edge_ids[e]
    }

    pub fn cycle_id(&self, c: usize) -> &str {
        &self.cycle_ids[c]
    }

    pub fn cycle_by_id(&self, id: &str) -> Option<usize> {
        self.cycle_index.get(id).copied()
    }

    pub fn billiard_id(&self, b: usize) -> &str {
        &self.billiard_ids[b]
    }

    pub fn billiard_by_id(&self, id: &str) -> Option<usize> {
        self.billiard_index.get(id).copied()
    }

    pub fn billiard_count(&self) -> usize {
        self.billiard_ids.len()
    }

    /// Initial billiard states, indexed like `billiard_id`.
    pub fn initial(&self) -> &[BilliardState] {
        &self.initial
    }

    /// Step a billiard currently occupies.
    pub fn step_of(&self, b: &BilliardState) -> Step {
        self.cycles[b.cycle].steps[b.step]
    }

    pub fn step_length(&self, b: &BilliardState) -> Rational {
        self.edges[self.step_of(b).edge].length
    }

    /// Cycle position reached after finishing the current edge.
    pub fn next_step(&self, b: &BilliardState) -> usize {
        let n = self.cycles[b.cycle].steps.len();
        match b.orient {
            Orientation::Forward => (b.step + 1) % n,
            Orientation::Backward => (b.step + n - 1) % n,
        }
    }

    /// Cycle position the billiard arrived from.
    pub fn prev_step(&self, b: &BilliardState) -> usize {
        let n = self.cycles[b.cycle].steps.len();
        match b.orient {
            Orientation::Forward => (b.step + n - 1) % n,
            Orientation::Backward => (b.step + 1) % n,
        }
    }

    /// Vertex the billiard is heading to on its current edge.
    pub fn target_vertex(&self, b: &BilliardState) -> usize {
        let s = self.step_of(b);
        match b.orient {
            Orientation::Forward => s.to,
            Orientation::Backward => s.from,
        }
    }

    /// Vertex the billiard left (or sits on) on its current edge.
    pub fn source_vertex(&self, b: &BilliardState) -> usize {
        let s = self.step_of(b);
        match b.orient {
            Orientation::Forward => s.from,
            Orientation::Backward => s.to,
        }
    }

    /// Common edge length after subdividing to equal lengths, i.e. the gcd of
    /// all edge lengths.
    pub fn unit_length(&self) -> Rational {
        Rational::gcd_set(self.edges.iter().map(|e| e.length))
            .expect("validated edges have positive length")
    }

    /// gcd of all edge lengths and all initial positions `x`. Every position
    /// at every event time lies on the half-grid of this value.
    pub fn grid(&self) -> Rational {
        Rational::gcd_set(
            self.edges
                .iter()
                .map(|e| e.length)
                .chain(self.initial.iter().map(|b| b.x)),
        )
        .expect("validated lengths and positions are positive")
    }

    /// Converts an indexed billiard state back to file form.
    pub fn record(&self, b: usize, s: &BilliardState) -> BilliardRecord {
        BilliardRecord {
            id: self.billiard_ids[b].clone(),
            cycle: self.cycle_ids[s.cycle].clone(),
            home_cycle: (s.home != s.cycle).then(|| self.cycle_ids[s.home].clone()),
            orient: s.orient,
            edge_index: s.step + 1,
            x: s.x,
        }
    }

    /// Resolves a record against this model. Checks ids and ranges only.
    pub fn state_from_record(
        &self,
        r: &BilliardRecord,
    ) -> Result<(usize, BilliardState), ValidationError> {
        let b = self
            .billiard_by_id(&r.id)
            .ok_or_else(|| ValidationError::UnknownBilliard {
                billiard: r.id.clone(),
            })?;
        let cycle = self
            .cycle_by_id(&r.cycle)
            .ok_or_else(|| ValidationError::UnknownCycle {
                billiard: r.id.clone(),
                cycle: r.cycle.clone(),
            })?;
        let home_id = r.home_cycle.as_deref().unwrap_or(&r.cycle);
        let home = self
            .cycle_by_id(home_id)
            .ok_or_else(|| ValidationError::UnknownCycle {
                billiard: r.id.clone(),
                cycle: home_id.to_string(),
            })?;
        let n = self.cycles[cycle].steps.len();
        if r.edge_index == 0 || r.edge_index > n {
            return Err(ValidationError::EdgeIndexOutOfRange {
                billiard: r.id.clone(),
                index: r.edge_index,
                len: n,
            });
        }
        let s = BilliardState {
            cycle,
            home,
            orient: r.orient,
            step: r.edge_index - 1,
            x: r.x,
        };
        let len = self.step_length(&s);
        if !r.x.is_positive() || r.x > len {
            return Err(ValidationError::PositionOutOfRange {
                billiard: r.id.clone(),
                x: r.x,
                length: len,
            });
        }
        Ok((b, s))
    }

    /// Physical position of a billiard on the graph.
    pub fn pose(&self, b: &BilliardState) -> Pose {
        pose::physical_pose(self, b)
    }

    pub fn point(&self, b: &BilliardState) -> Point {
        self.pose(b).point()
    }
}
