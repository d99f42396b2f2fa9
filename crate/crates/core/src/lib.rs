//! Exact simulation of billiards on loopless multigraphs.
//!
//! Billiards travel at unit speed along directed cycles of a graph and
//! reverse on collision. All quantities are exact rationals, so orbits can be
//! compared bit for bit and periods detected exactly.

pub mod analysis;
pub mod engine;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod suites;
pub mod trace;

pub use analysis::{
    extract_permutation, find_period, reverse_state, state_count_bound, verify_reversibility,
    BilliardPermutation, PeriodReport,
};
pub use engine::{CollisionEvent, CollisionGroup, Engine, SystemState, Until};
pub use model::{
    BilliardRecord, BilliardState, DirectedCycle, Edge, GraphSpec, Instance, Mode, Model,
    Orientation, Point, Pose,
};
pub use oracle::{oracle_run, OracleConfig};
pub use rational::Rational;
pub use trace::{compare_traces, Comparison, Trace};
