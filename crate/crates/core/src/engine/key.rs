//! Canonical byte keys for recurrence detection.
//!
//! A key covers everything that determines future motion: the mode and, per
//! billiard in id order, its current cycle, orientation, 1-based edge index
//! and reduced `x`. Time is deliberately absent.

use std::hash::{DefaultHasher, Hash, Hasher};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::SystemState;
use crate::model::{BilliardRecord, Mode, Model, Orientation, ValidationError};
use crate::rational::Rational;

#[derive(Serialize, Deserialize)]
struct KeyRepr {
    mode: Mode,
    billiards: Vec<(String, String, Orientation, usize, Rational)>,
}

#[derive(Debug, Error)]
pub enum KeyError {
    #[error("malformed key: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("key lists {found} billiards, model has {expected}")]
    Count { found: usize, expected: usize },
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}

pub fn canonical_key(model: &Model, state: &SystemState) -> Vec<u8> {
    let repr = KeyRepr {
        mode: state.mode,
        billiards: state
            .billiards
            .iter()
            .enumerate()
            .map(|(b, s)| {
                (
                    model.billiard_id(b).to_string(),
                    model.cycle_id(s.cycle).to_string(),
                    s.orient,
                    s.step + 1,
                    s.x,
                )
            })
            .collect(),
    };
    serde_json::to_vec(&repr).expect("key serialization cannot fail")
}

/// 128-bit digest of the same data as [`canonical_key`], for large
/// recurrence tables. Distinct states collide with negligible probability.
pub fn fingerprint(state: &SystemState) -> u128 {
    let half = |salt: u8| {
        let mut h = DefaultHasher::new();
        salt.hash(&mut h);
        state.mode.hash(&mut h);
        for b in &state.billiards {
            (b.cycle, b.orient, b.step, b.x).hash(&mut h);
        }
        h.finish() as u128
    };
    half(0) << 64 | half(1)
}

/// Inverse of [`canonical_key`]; the state is placed at time 0 and home
/// cycles are taken from the model.
pub fn parse_key(model: &Model, key: &[u8]) -> Result<SystemState, KeyError> {
    let repr: KeyRepr = serde_json::from_slice(key)?;
    if repr.billiards.len() != model.billiard_count() {
        return Err(KeyError::Count {
            found: repr.billiards.len(),
            expected: model.billiard_count(),
        });
    }
    let mut billiards = model.initial().to_vec();
    for (id, cycle, orient, edge_index, x) in repr.billiards {
        let rec = BilliardRecord {
            id,
            cycle,
            home_cycle: None,
            orient,
            edge_index,
            x,
        };
        let (b, mut s) = model.state_from_record(&rec)?;
        s.home = model.initial()[b].home;
        billiards[b] = s;
    }
    Ok(SystemState {
        time: Rational::ZERO,
        billiards,
        mode: repr.mode,
    })
}

/// Key of the unlabeled configuration: the sorted multiset of
/// (cycle, orientation, edge index, x) with billiard ids dropped.
pub fn unlabeled_key(
    model: &Model,
    state: &SystemState,
) -> Vec<(String, Orientation, usize, Rational)> {
    let mut v: Vec<_> = state
        .billiards
        .iter()
        .map(|s| {
            (
                model.cycle_id(s.cycle).to_string(),
                s.orient,
                s.step + 1,
                s.x,
            )
        })
        .collect();
    v.sort();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_circle;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn key_identity_and_round_trip() {
        let inst = build_circle(
            4,
            &[
                (r("0"), Orientation::Forward),
                (r("5/2"), Orientation::Backward),
            ],
        )
        .unwrap();
        let m = Model::new(inst).unwrap();
        let s = SystemState::initial(&m);
        assert_eq!(canonical_key(&m, &s), canonical_key(&m, &s.clone()));
        let mut t = s.clone();
        t.billiards[1].orient = t.billiards[1].orient.flip();
        assert_ne!(canonical_key(&m, &s), canonical_key(&m, &t));
        assert_eq!(parse_key(&m, &canonical_key(&m, &s)).unwrap(), s);
        let mut later = s.clone();
        later.time = r("7");
        assert_eq!(canonical_key(&m, &later), canonical_key(&m, &s));
    }

    #[test]
    fn unlabeled_key_ignores_ids() {
        let inst = build_circle(
            4,
            &[
                (r("0"), Orientation::Forward),
                (r("2"), Orientation::Forward),
            ],
        )
        .unwrap();
        let m = Model::new(inst).unwrap();
        let s = SystemState::initial(&m);
        let mut swapped = s.clone();
        swapped.billiards.swap(0, 1);
        assert_eq!(unlabeled_key(&m, &s), unlabeled_key(&m, &swapped));
        assert_ne!(canonical_key(&m, &s), canonical_key(&m, &swapped));
    }
}
