use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::Standpoint;

/// Propositions true at one position.
pub type Valuation = BTreeSet<String>;

pub type TraceId = String;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("a model needs at least one trace")]
    NoTraces,
    #[error("the period of a trace must be non-empty")]
    EmptyPeriod,
    #[error("trace {0} does not have the shared prefix/period shape")]
    ShapeMismatch(TraceId),
    #[error("standpoint {0} is assigned no trace")]
    EmptyStandpoint(Standpoint),
    #[error("unknown trace {0}")]
    UnknownTrace(TraceId),
    #[error("malformed witness: {0}")]
    Malformed(String),
}

/// Ultimately periodic trace `prefix · period^ω`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpTrace {
    pub prefix: Vec<Valuation>,
    pub period: Vec<Valuation>,
}

impl UpTrace {
    pub fn new(prefix: Vec<Valuation>, period: Vec<Valuation>) -> Result<Self, ModelError> {
        if period.is_empty() {
            return Err(ModelError::EmptyPeriod);
        }
        Ok(UpTrace { prefix, period })
    }

    /// Valuation at any position `i`.
    pub fn at(&self, i: usize) -> &Valuation {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    /// The `prefix_len + period_len` stored positions, in order.
    pub fn positions(&self) -> impl Iterator<Item = &Valuation> {
        self.prefix.iter().chain(self.period.iter())
    }
}

/// Shared lasso shape of all traces of a model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Shape {
    pub prefix_len: usize,
    pub period_len: usize,
}

impl Shape {
    pub fn len(self) -> usize {
        self.prefix_len + self.period_len
    }

    pub fn is_empty(self) -> bool {
        self.len() == 0
    }

    pub fn succ(self, i: usize) -> usize {
        if i + 1 < self.len() {
            i + 1
        } else {
            self.prefix_len
        }
    }

    /// Fold an arbitrary position onto the stored lasso positions.
    pub fn normalize(self, i: usize) -> usize {
        if i < self.len() {
            i
        } else {
            self.prefix_len + (i - self.prefix_len) % self.period_len
        }
    }
}

fn check_shape(shape: Shape, traces: &IndexMap<TraceId, UpTrace>) -> Result<(), ModelError> {
    if traces.is_empty() {
        return Err(ModelError::NoTraces);
    }
    if shape.period_len == 0 {
        return Err(ModelError::EmptyPeriod);
    }
    for (id, t) in traces {
        if t.prefix.len() != shape.prefix_len || t.period.len() != shape.period_len {
            return Err(ModelError::ShapeMismatch(id.clone()));
        }
    }
    Ok(())
}

/// Finitely presented SLTL model: traces plus a standpoint assignment.
/// `lambda(*)` is always the full trace set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SltlModel {
    shape: Shape,
    traces: IndexMap<TraceId, UpTrace>,
    lambda: BTreeMap<Standpoint, BTreeSet<TraceId>>,
}

impl SltlModel {
    pub fn new(
        shape: Shape,
        traces: IndexMap<TraceId, UpTrace>,
        lambda: BTreeMap<Standpoint, BTreeSet<TraceId>>,
    ) -> Result<Self, ModelError> {
        check_shape(shape, &traces)?;
        let mut lambda = lambda;
        for (s, members) in &lambda {
            if members.is_empty() {
                return Err(ModelError::EmptyStandpoint(s.clone()));
            }
            if let Some(bad) = members.iter().find(|m| !traces.contains_key(*m)) {
                return Err(ModelError::UnknownTrace(bad.clone()));
            }
        }
        lambda.insert(Standpoint::Universal, traces.keys().cloned().collect());
        Ok(SltlModel {
            shape,
            traces,
            lambda,
        })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn traces(&self) -> &IndexMap<TraceId, UpTrace> {
        &self.traces
    }

    pub fn lambda(&self) -> &BTreeMap<Standpoint, BTreeSet<TraceId>> {
        &self.lambda
    }

    pub fn trace_index(&self, id: &str) -> Option<usize> {
        self.traces.get_index_of(id)
    }

    /// Same traces with every standpoint forgotten.
    pub fn to_ptls5(&self) -> PtlS5Model {
        PtlS5Model {
            shape: self.shape,
            traces: self.traces.clone(),
        }
    }

    pub fn to_witness(&self, designated: &str) -> WitnessFile {
        WitnessFile {
            prefix_len: self.shape.prefix_len,
            period_len: self.shape.period_len,
            traces: self
                .traces
                .iter()
                .map(|(id, t)| {
                    (
                        id.clone(),
                        t.positions().map(|v| v.iter().cloned().collect()).collect(),
                    )
                })
                .collect(),
            lambda: self
                .lambda
                .iter()
                .map(|(s, m)| (s.to_string(), m.iter().cloned().collect()))
                .collect(),
            designated: designated.to_string(),
        }
    }

    pub fn from_witness(w: &WitnessFile) -> Result<(Self, TraceId), ModelError> {
        let shape = Shape {
            prefix_len: w.prefix_len,
            period_len: w.period_len,
        };
        let mut traces = IndexMap::new();
        for (id, vals) in &w.traces {
            if vals.len() != shape.len() {
                return Err(ModelError::Malformed(format!(
                    "trace {id} lists {} valuations, expected prefix_len + period_len = {}",
                    vals.len(),
                    shape.len()
                )));
            }
            let vals: Vec<Valuation> = vals.iter().map(|v| v.iter().cloned().collect()).collect();
            let (pre, per) = vals.split_at(shape.prefix_len);
            traces.insert(id.clone(), UpTrace::new(pre.to_vec(), per.to_vec())?);
        }
        let mut lambda = BTreeMap::new();
        for (name, members) in &w.lambda {
            let s = name
                .strip_prefix('@')
                .filter(|n| !n.is_empty())
                .map(Standpoint::named)
                .ok_or_else(|| ModelError::Malformed(format!("lambda key {name:?} lacks `@`")))?;
            lambda.insert(s, members.iter().cloned().collect());
        }
        let model = SltlModel::new(shape, traces, lambda)?;
        if !model.traces.contains_key(&w.designated) {
            return Err(ModelError::UnknownTrace(w.designated.clone()));
        }
        Ok((model, w.designated.clone()))
    }
}

/// Finitely presented PTL×S5 model with the total accessibility relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PtlS5Model {
    shape: Shape,
    traces: IndexMap<TraceId, UpTrace>,
}

impl PtlS5Model {
    pub fn new(shape: Shape, traces: IndexMap<TraceId, UpTrace>) -> Result<Self, ModelError> {
        check_shape(shape, &traces)?;
        Ok(PtlS5Model { shape, traces })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn traces(&self) -> &IndexMap<TraceId, UpTrace> {
        &self.traces
    }

    /// View as an SLTL model in which only `*` is interpreted.
    pub fn as_sltl(&self) -> SltlModel {
        SltlModel::new(self.shape, self.traces.clone(), BTreeMap::new())
            .expect("a well-formed PTL×S5 model is a well-formed SLTL model")
    }
}

/// On-disk witness format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessFile {
    pub prefix_len: usize,
    pub period_len: usize,
    pub traces: IndexMap<TraceId, Vec<Vec<String>>>,
    pub lambda: BTreeMap<String, Vec<TraceId>>,
    pub designated: TraceId,
}
