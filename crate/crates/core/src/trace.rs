//! Event traces and their line-delimited JSON form.
//!
//! A trace file holds one JSON object per line: a header with the instance
//! hash, mode and initial state; one record per event; and a final record
//! with the end state and a truncation flag.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{BilliardRecord, Mode, Model, PointRecord};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateRecord {
    pub time: Rational,
    pub billiards: Vec<BilliardRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupRecord {
    pub point: PointRecord,
    pub members: Vec<String>,
    pub before: Vec<BilliardRecord>,
    pub after: Vec<BilliardRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventRecord {
    pub t: Rational,
    pub groups: Vec<GroupRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceHeader {
    pub instance_hash: String,
    pub mode: Mode,
    pub initial: StateRecord,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub header: TraceHeader,
    pub events: Vec<EventRecord>,
    pub final_state: StateRecord,
    pub truncated: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HeaderLine {
    header: TraceHeader,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FinalLine {
    #[serde(rename = "final")]
    final_state: StateRecord,
    truncated: bool,
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("trace line {line}: {source}")]
    Parse {
        line: usize,
        source: serde_json::Error,
    },
    #[error("trace is missing its {0} record")]
    Missing(&'static str),
    #[error("traces belong to different instances ({0} vs {1})")]
    InstanceMismatch(String, String),
}

impl Trace {
    pub fn new(model: &Model, initial: StateRecord) -> Self {
        Trace {
            header: TraceHeader {
                instance_hash: model.instance_hash().to_string(),
                mode: model.mode(),
                initial: initial.clone(),
            },
            events: Vec::new(),
            final_state: initial,
            truncated: false,
        }
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let mut push = |v: String| {
            out.push_str(&v);
            out.push('\n');
        };
        push(
            serde_json::to_string(&HeaderLine {
                header: self.header.clone(),
            })
            .expect("serializable"),
        );
        for e in &self.events {
            push(serde_json::to_string(e).expect("serializable"));
        }
        push(
            serde_json::to_string(&FinalLine {
                final_state: self.final_state.clone(),
                truncated: self.truncated,
            })
            .expect("serializable"),
        );
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, TraceError> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| !l.trim().is_empty())
            .collect();
        let (&(hl, first), rest) = lines.split_first().ok_or(TraceError::Missing("header"))?;
        let header: HeaderLine =
            serde_json::from_str(first).map_err(|source| TraceError::Parse { line: hl, source })?;
        let (&(fl, last), middle) = rest.split_last().ok_or(TraceError::Missing("final"))?;
        let fin: FinalLine =
            serde_json::from_str(last).map_err(|source| TraceError::Parse { line: fl, source })?;
        let events = middle
            .iter()
            .map(|&(n, l)| {
                serde_json::from_str(l).map_err(|source| TraceError::Parse { line: n, source })
            })
            .collect::<Result<Vec<EventRecord>, _>>()?;
        Ok(Trace {
            header: header.header,
            events,
            final_state: fin.final_state,
            truncated: fin.truncated,
        })
    }
}

/// Where two traces first disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Divergence {
    /// Event index, or `None` for the initial/final records.
    pub event: Option<usize>,
    pub time: Option<Rational>,
    pub group: Option<usize>,
    pub field: &'static str,
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field)?;
        if let Some(e) = self.event {
            write!(f, " at event #{e}")?;
        }
        if let Some(t) = self.time {
            write!(f, " (t = {t})")?;
        }
        if let Some(g) = self.group {
            write!(f, " group {g}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Comparison {
    Equal,
    Diverged(Divergence),
}

/// Exact event-by-event comparison.
pub fn compare_traces(a: &Trace, b: &Trace) -> Result<Comparison, TraceError> {
    if a.header.instance_hash != b.header.instance_hash {
        return Err(TraceError::InstanceMismatch(
            a.header.instance_hash.clone(),
            b.header.instance_hash.clone(),
        ));
    }
    let diverged = |event, time, group, field| {
        Ok(Comparison::Diverged(Divergence {
            event,
            time,
            group,
            field,
        }))
    };
    if a.header.initial != b.header.initial {
        return diverged(None, None, None, "initial state");
    }
    for (i, (ea, eb)) in a.events.iter().zip(&b.events).enumerate() {
        let at = Some(ea.t);
        if ea.t != eb.t {
            return diverged(Some(i), at, None, "time");
        }
        if ea.groups.len() != eb.groups.len() {
            return diverged(Some(i), at, None, "group count");
        }
        for (g, (ga, gb)) in ea.groups.iter().zip(&eb.groups).enumerate() {
            let field = if ga.point != gb.point {
                "point"
            } else if ga.members != gb.members {
                "members"
            } else if ga.before != gb.before {
                "before"
            } else if ga.after != gb.after {
                "after"
            } else {
                continue;
            };
            return diverged(Some(i), at, Some(g), field);
        }
    }
    if a.events.len() != b.events.len() {
        let i = a.events.len().min(b.events.len());
        let t = a.events.get(i).or_else(|| b.events.get(i)).map(|e| e.t);
        return diverged(Some(i), t, None, "missing event");
    }
    if a.final_state != b.final_state {
        return diverged(None, Some(a.final_state.time), None, "final state");
    }
    if a.truncated != b.truncated {
        return diverged(None, None, None, "truncation");
    }
    Ok(Comparison::Equal)
}
