use std::collections::HashMap;

use thiserror::Error;

use super::model::{PtlS5Model, Shape, SltlModel, TraceId};
use crate::syntax::{Formula, Standpoint};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("unknown trace {0}")]
    UnknownTrace(TraceId),
    #[error("standpoint {0} is not interpreted by the model")]
    MissingStandpoint(Standpoint),
    #[error("not a PTL×S5 formula: {0}")]
    NotPtlS5(String),
}

/// Truth values of formulas at every (trace, lasso position) of one model.
///
/// Values are stored trace-major: index `t * len + i`. `U` is computed as
/// a least fixpoint by backward propagation along the lasso.
pub struct TruthTable<'m> {
    model: &'m SltlModel,
    shape: Shape,
    members: HashMap<Standpoint, Vec<bool>>,
    memo: HashMap<Formula, Vec<bool>>,
}

impl<'m> TruthTable<'m> {
    pub fn new(model: &'m SltlModel) -> Self {
        let members = model
            .lambda()
            .iter()
            .map(|(s, ids)| {
                let v = model.traces().keys().map(|id| ids.contains(id)).collect();
                (s.clone(), v)
            })
            .collect();
        TruthTable {
            model,
            shape: model.shape(),
            members,
            memo: HashMap::new(),
        }
    }

    fn cells(&self) -> usize {
        self.model.traces().len() * self.shape.len()
    }

    pub fn value(&mut self, f: &Formula, trace: usize, pos: usize) -> Result<bool, EvalError> {
        let pos = self.shape.normalize(pos);
        let len = self.shape.len();
        Ok(self.values(f)?[trace * len + pos])
    }

    /// Truth values of `f` at all cells.
    pub fn values(&mut self, f: &Formula) -> Result<&Vec<bool>, EvalError> {
        if !self.memo.contains_key(f) {
            let v = self.compute(f)?;
            self.memo.insert(f.clone(), v);
        }
        Ok(&self.memo[f])
    }

    fn child(&mut self, f: &Formula) -> Result<Vec<bool>, EvalError> {
        Ok(self.values(f)?.clone())
    }

    fn member(&self, s: &Standpoint) -> Result<&Vec<bool>, EvalError> {
        self.members
            .get(s)
            .ok_or_else(|| EvalError::MissingStandpoint(s.clone()))
    }

    fn compute(&mut self, f: &Formula) -> Result<Vec<bool>, EvalError> {
        let n = self.cells();
        let len = self.shape.len();
        let ntraces = self.model.traces().len();
        Ok(match f {
            Formula::Top => vec![true; n],
            Formula::Bottom => vec![false; n],
            Formula::Prop(p) => {
                let mut v = Vec::with_capacity(n);
                for t in self.model.traces().values() {
                    v.extend(t.positions().map(|val| val.contains(&**p)));
                }
                v
            }
            Formula::Sharper(s, t) => {
                let a = self.member(s)?;
                let b = self.member(t)?;
                let holds = a.iter().zip(b).all(|(x, y)| !*x || *y);
                vec![holds; n]
            }
            Formula::Not(g) => self.child(g)?.into_iter().map(|b| !b).collect(),
            Formula::And(a, b) => {
                let x = self.child(a)?;
                let y = self.child(b)?;
                x.into_iter().zip(y).map(|(p, q)| p && q).collect()
            }
            Formula::Or(a, b) => {
                let x = self.child(a)?;
                let y = self.child(b)?;
                x.into_iter().zip(y).map(|(p, q)| p || q).collect()
            }
            Formula::Diamond(s, g) | Formula::Boxed(s, g) => {
                let inner = self.child(g)?;
                let members = self.member(s)?.clone();
                let existential = matches!(f, Formula::Diamond(..));
                let mut out = vec![false; n];
                for i in 0..len {
                    let hit = (0..ntraces)
                        .filter(|t| members[*t])
                        .map(|t| inner[t * len + i]);
                    let v = if existential {
                        hit.into_iter().any(|b| b)
                    } else {
                        hit.into_iter().all(|b| b)
                    };
                    for t in 0..ntraces {
                        out[t * len + i] = v;
                    }
                }
                out
            }
            Formula::Next(g) => {
                let inner = self.child(g)?;
                let mut out = vec![false; n];
                for t in 0..ntraces {
                    for i in 0..len {
                        out[t * len + i] = inner[t * len + self.shape.succ(i)];
                    }
                }
                out
            }
            Formula::Until(a, b) => {
                let x = self.child(a)?;
                let y = self.child(b)?;
                let mut out = y.clone();
                for t in 0..ntraces {
                    let base = t * len;
                    loop {
                        let mut changed = false;
                        for i in (0..len).rev() {
                            let j = base + i;
                            if !out[j] && x[j] && out[base + self.shape.succ(i)] {
                                out[j] = true;
                                changed = true;
                            }
                        }
                        if !changed {
                            break;
                        }
                    }
                }
                out
            }
        })
    }
}

/// `m, t, i ⊨ f`.
pub fn eval_sltl(m: &SltlModel, t: &str, i: usize, f: &Formula) -> Result<bool, EvalError> {
    let idx = m
        .trace_index(t)
        .ok_or_else(|| EvalError::UnknownTrace(t.to_string()))?;
    TruthTable::new(m).value(f, idx, i)
}

/// Fails unless `f` uses only `<@*>`/`[@*]` and no sharpening atom.
pub fn check_ptls5(f: &Formula) -> Result<(), EvalError> {
    let mut bad = None;
    f.visit(&mut |g| match g {
        Formula::Sharper(..) if bad.is_none() => bad = Some(format!("sharpening atom `{g}`")),
        Formula::Diamond(s, _) | Formula::Boxed(s, _) if !s.is_universal() && bad.is_none() => {
            bad = Some(format!("standpoint modality over {s}"))
        }
        _ => {}
    });
    match bad {
        Some(reason) => Err(EvalError::NotPtlS5(reason)),
        None => Ok(()),
    }
}

/// `m, (n, w) ⊨ f` with `<>`/`[]` written as `<@*>`/`[@*]`.
pub fn eval_ptls5(m: &PtlS5Model, w: &str, n: usize, f: &Formula) -> Result<bool, EvalError> {
    check_ptls5(f)?;
    eval_sltl(&m.as_sltl(), w, n, f)
}
