//! Bounded satisfiability over ultimately periodic models.
//!
//! Shapes are tried in a fixed order: number of traces ascending, then
//! `(prefix, period)` lexicographically. Within one shape, [`oracle_sat`]
//! hands a propositional encoding of the satisfaction relation to a SAT
//! solver, while [`oracle_sat_enumerative`] walks every standpoint
//! assignment and valuation in canonical bit order. Either way the
//! returned witness is re-checked by the table evaluator.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use indexmap::IndexMap;
use thiserror::Error;
use varisat::{ExtendFormula, Lit, Solver};

use super::eval::{check_ptls5, EvalError, TruthTable};
use super::model::{PtlS5Model, Shape, SltlModel, TraceId, UpTrace, Valuation};
use crate::syntax::{vocab, Formula, Standpoint};

/// Default cap on the size of a single search instance.
pub const DEFAULT_NODE_LIMIT: u64 = 4_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_traces: usize,
    pub max_prefix: usize,
    pub max_period: usize,
    /// Propositions a witness may use; the formula's own propositions are
    /// always added.
    pub props: Vec<String>,
    /// Largest instance (SAT variables plus clauses, or enumerated
    /// candidates) the oracle accepts before reporting a resource error.
    pub node_limit: u64,
}

impl SearchBounds {
    pub fn new(max_traces: usize, max_prefix: usize, max_period: usize) -> Self {
        SearchBounds {
            max_traces: max_traces.max(1),
            max_prefix,
            max_period: max_period.max(1),
            props: Vec::new(),
            node_limit: DEFAULT_NODE_LIMIT,
        }
    }

    pub fn with_node_limit(mut self, limit: u64) -> Self {
        self.node_limit = limit;
        self
    }

    fn shapes(&self) -> impl Iterator<Item = (usize, Shape)> + '_ {
        (1..=self.max_traces).flat_map(move |k| {
            (0..=self.max_prefix).flat_map(move |prefix_len| {
                (1..=self.max_period).map(move |period_len| {
                    (
                        k,
                        Shape {
                            prefix_len,
                            period_len,
                        },
                    )
                })
            })
        })
    }

    fn vocabulary(&self, f: &Formula) -> Vec<String> {
        let mut props: BTreeSet<String> = self.props.iter().cloned().collect();
        props.extend(vocab(f).props.iter().map(|p| p.to_string()));
        props.into_iter().collect()
    }
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds::new(3, 2, 3)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("search instance of size {size} exceeds the node limit {limit}")]
    ResourceLimit { size: u64, limit: u64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn trace_name(k: usize) -> TraceId {
    format!("t{k}")
}

fn named_standpoints(f: &Formula) -> Vec<Standpoint> {
    vocab(f)
        .standpoints
        .into_iter()
        .filter(|s| !s.is_universal())
        .collect()
}

fn build_model(
    shape: Shape,
    valuations: Vec<Vec<Valuation>>,
    lambda: BTreeMap<Standpoint, BTreeSet<TraceId>>,
) -> SltlModel {
    let traces: IndexMap<TraceId, UpTrace> = valuations
        .into_iter()
        .enumerate()
        .map(|(k, vals)| {
            let (pre, per) = vals.split_at(shape.prefix_len);
            (
                trace_name(k),
                UpTrace::new(pre.to_vec(), per.to_vec()).expect("period is non-empty"),
            )
        })
        .collect();
    SltlModel::new(shape, traces, lambda).expect("oracle builds well-formed models")
}

/// Sound for satisfiability, inconclusive for unsatisfiability: `None`
/// only means no model exists within `bounds`.
pub fn oracle_sat(
    f: &Formula,
    bounds: &SearchBounds,
) -> Result<Option<(SltlModel, TraceId)>, OracleError> {
    let props = bounds.vocabulary(f);
    let standpoints = named_standpoints(f);
    for (k, shape) in bounds.shapes() {
        if let Some(m) = solve_shape(f, k, shape, &props, &standpoints, bounds.node_limit)? {
            debug_assert!(TruthTable::new(&m).value(f, 0, 0)?);
            return Ok(Some((m, trace_name(0))));
        }
    }
    Ok(None)
}

/// PTL×S5 counterpart of [`oracle_sat`], evaluated at position 0.
pub fn oracle_sat_ptls5(
    f: &Formula,
    bounds: &SearchBounds,
) -> Result<Option<(PtlS5Model, TraceId)>, OracleError> {
    check_ptls5(f)?;
    Ok(oracle_sat(f, bounds)?.map(|(m, t)| (m.to_ptls5(), t)))
}

/// Literal enumeration: standpoint assignments (each a non-empty subset of
/// the traces, in ascending bitmask order), then valuations in canonical
/// bit order. Returns the first model found.
pub fn oracle_sat_enumerative(
    f: &Formula,
    bounds: &SearchBounds,
) -> Result<Option<(SltlModel, TraceId)>, OracleError> {
    let props = bounds.vocabulary(f);
    let standpoints = named_standpoints(f);
    for (k, shape) in bounds.shapes() {
        let bits = k * shape.len() * props.len();
        let lambda_count = ((1u128 << k) - 1).pow(standpoints.len() as u32);
        let size = lambda_count.saturating_mul(1u128 << bits.min(100));
        if bits >= 64 || size > bounds.node_limit as u128 {
            return Err(OracleError::ResourceLimit {
                size: size.min(u64::MAX as u128) as u64,
                limit: bounds.node_limit,
            });
        }
        let subsets = (1u64 << k) - 1;
        let mut choice = vec![1u64; standpoints.len()];
        loop {
            let lambda: BTreeMap<Standpoint, BTreeSet<TraceId>> = standpoints
                .iter()
                .zip(&choice)
                .map(|(s, mask)| {
                    let ids = (0..k)
                        .filter(|t| mask >> t & 1 == 1)
                        .map(trace_name)
                        .collect();
                    (s.clone(), ids)
                })
                .collect();
            for word in 0..(1u64 << bits) {
                let valuations: Vec<Vec<Valuation>> = (0..k)
                    .map(|t| {
                        (0..shape.len())
                            .map(|i| {
                                props
                                    .iter()
                                    .enumerate()
                                    .filter(|(p, _)| {
                                        let bit = (t * shape.len() + i) * props.len() + p;
                                        word >> bit & 1 == 1
                                    })
                                    .map(|(_, name)| name.clone())
                                    .collect()
                            })
                            .collect()
                    })
                    .collect();
                let m = build_model(shape, valuations, lambda.clone());
                if TruthTable::new(&m).value(f, 0, 0)? {
                    return Ok(Some((m, trace_name(0))));
                }
            }
            // next standpoint assignment, odometer style
            let mut pos = 0;
            loop {
                if pos == choice.len() {
                    break;
                }
                if choice[pos] < subsets {
                    choice[pos] += 1;
                    break;
                }
                choice[pos] = 1;
                pos += 1;
            }
            if pos == choice.len() {
                break;
            }
        }
    }
    Ok(None)
}

struct Encoder {
    solver: Solver<'static>,
    vars: usize,
    clauses: u64,
    limit: u64,
    truth: Lit,
    k: usize,
    shape: Shape,
    props: HashMap<String, Vec<Lit>>,
    members: HashMap<Standpoint, Vec<Lit>>,
    memo: HashMap<Formula, Vec<Lit>>,
}

impl Encoder {
    fn fresh(&mut self) -> Lit {
        self.vars += 1;
        self.solver.new_var().positive()
    }

    fn clause(&mut self, lits: &[Lit]) -> Result<(), OracleError> {
        self.clauses += 1;
        let size = self.vars as u64 + self.clauses;
        if size > self.limit {
            return Err(OracleError::ResourceLimit {
                size,
                limit: self.limit,
            });
        }
        self.solver.add_clause(lits);
        Ok(())
    }

    fn is_true(&self, l: Lit) -> bool {
        l == self.truth
    }

    fn is_false(&self, l: Lit) -> bool {
        l == !self.truth
    }

    fn and2(&mut self, a: Lit, b: Lit) -> Result<Lit, OracleError> {
        if self.is_false(a) || self.is_false(b) {
            return Ok(!self.truth);
        }
        if self.is_true(a) {
            return Ok(b);
        }
        if self.is_true(b) || a == b {
            return Ok(a);
        }
        let v = self.fresh();
        self.clause(&[!v, a])?;
        self.clause(&[!v, b])?;
        self.clause(&[v, !a, !b])?;
        Ok(v)
    }

    fn or2(&mut self, a: Lit, b: Lit) -> Result<Lit, OracleError> {
        Ok(!self.and2(!a, !b)?)
    }

    /// `v <-> (l1 & ... & ln)`
    fn and_n(&mut self, lits: &[Lit]) -> Result<Lit, OracleError> {
        let lits: Vec<Lit> = lits.iter().copied().filter(|l| !self.is_true(*l)).collect();
        if lits.iter().any(|l| self.is_false(*l)) {
            return Ok(!self.truth);
        }
        match lits.len() {
            0 => Ok(self.truth),
            1 => Ok(lits[0]),
            _ => {
                let v = self.fresh();
                for &l in &lits {
                    self.clause(&[!v, l])?;
                }
                let mut big: Vec<Lit> = lits.iter().map(|l| !*l).collect();
                big.push(v);
                self.clause(&big)?;
                Ok(v)
            }
        }
    }

    fn member_lits(&mut self, s: &Standpoint) -> Vec<Lit> {
        if s.is_universal() {
            return vec![self.truth; self.k];
        }
        self.members[s].clone()
    }

    fn encode(&mut self, f: &Formula) -> Result<Vec<Lit>, OracleError> {
        if let Some(v) = self.memo.get(f) {
            return Ok(v.clone());
        }
        let len = self.shape.len();
        let n = self.k * len;
        let out: Vec<Lit> = match f {
            Formula::Top => vec![self.truth; n],
            Formula::Bottom => vec![!self.truth; n],
            Formula::Prop(p) => self.props[&**p].clone(),
            Formula::Not(g) => self.encode(g)?.into_iter().map(|l| !l).collect(),
            Formula::And(a, b) | Formula::Or(a, b) => {
                let x = self.encode(a)?;
                let y = self.encode(b)?;
                let conj = matches!(f, Formula::And(..));
                let mut out = Vec::with_capacity(n);
                for (l, r) in x.into_iter().zip(y) {
                    out.push(if conj {
                        self.and2(l, r)?
                    } else {
                        self.or2(l, r)?
                    });
                }
                out
            }
            Formula::Sharper(s, t) => {
                let a = self.member_lits(s);
                let b = self.member_lits(t);
                let mut parts = Vec::with_capacity(self.k);
                for (x, y) in a.into_iter().zip(b) {
                    parts.push(self.or2(!x, y)?);
                }
                let v = self.and_n(&parts)?;
                vec![v; n]
            }
            Formula::Diamond(s, g) | Formula::Boxed(s, g) => {
                let inner = self.encode(g)?;
                let members = self.member_lits(s);
                let existential = matches!(f, Formula::Diamond(..));
                let mut out = vec![self.truth; n];
                for i in 0..len {
                    let mut parts = Vec::with_capacity(self.k);
                    for (t, &m) in members.iter().enumerate() {
                        let x = inner[t * len + i];
                        parts.push(if existential {
                            !self.and2(m, x)?
                        } else {
                            self.or2(!m, x)?
                        });
                    }
                    // exists t. (m & x)  ==  !(forall t. !(m & x))
                    let all = self.and_n(&parts)?;
                    let v = if existential { !all } else { all };
                    for t in 0..self.k {
                        out[t * len + i] = v;
                    }
                }
                out
            }
            Formula::Next(g) => {
                let inner = self.encode(g)?;
                let mut out = Vec::with_capacity(n);
                for t in 0..self.k {
                    for i in 0..len {
                        out.push(inner[t * len + self.shape.succ(i)]);
                    }
                }
                out
            }
            Formula::Until(a, b) => {
                let x = self.encode(a)?;
                let y = self.encode(b)?;
                let (pre, per) = (self.shape.prefix_len, self.shape.period_len);
                let mut out = vec![self.truth; n];
                for t in 0..self.k {
                    let base = t * len;
                    // cycle positions: unroll one full period, ending in b
                    for c in 0..per {
                        let at = |d: usize| base + pre + (c + d) % per;
                        let mut acc = y[at(per - 1)];
                        for d in (0..per - 1).rev() {
                            let step = self.and2(x[at(d)], acc)?;
                            acc = self.or2(y[at(d)], step)?;
                        }
                        out[base + pre + c] = acc;
                    }
                    for i in (0..pre).rev() {
                        let step = self.and2(x[base + i], out[base + i + 1])?;
                        out[base + i] = self.or2(y[base + i], step)?;
                    }
                }
                out
            }
        };
        self.memo.insert(f.clone(), out.clone());
        Ok(out)
    }
}

fn solve_shape(
    f: &Formula,
    k: usize,
    shape: Shape,
    props: &[String],
    standpoints: &[Standpoint],
    limit: u64,
) -> Result<Option<SltlModel>, OracleError> {
    let mut enc = Encoder {
        solver: Solver::new(),
        vars: 0,
        clauses: 0,
        limit,
        truth: Lit::from_index(0, true),
        k,
        shape,
        props: HashMap::new(),
        members: HashMap::new(),
        memo: HashMap::new(),
    };
    enc.truth = enc.fresh();
    let truth = enc.truth;
    enc.clause(&[truth])?;
    for p in props {
        let lits = (0..k * shape.len()).map(|_| enc.fresh()).collect();
        enc.props.insert(p.clone(), lits);
    }
    for s in standpoints {
        let lits: Vec<Lit> = (0..k).map(|_| enc.fresh()).collect();
        enc.clause(&lits)?;
        enc.members.insert(s.clone(), lits);
    }
    let root = enc.encode(f)?;
    enc.clause(&[root[0]])?;
    let sat = enc
        .solver
        .solve()
        .expect("solving without proofs or interrupts cannot fail");
    if !sat {
        return Ok(None);
    }
    let model: BTreeSet<Lit> = enc.solver.model().expect("sat").into_iter().collect();
    let holds = |l: &Lit| model.contains(l);
    let valuations = (0..k)
        .map(|t| {
            (0..shape.len())
                .map(|i| {
                    props
                        .iter()
                        .filter(|p| holds(&enc.props[*p][t * shape.len() + i]))
                        .cloned()
                        .collect()
                })
                .collect()
        })
        .collect();
    let lambda = standpoints
        .iter()
        .map(|s| {
            let ids = (0..k)
                .filter(|t| holds(&enc.members[s][*t]))
                .map(trace_name)
                .collect();
            (s.clone(), ids)
        })
        .collect();
    Ok(Some(build_model(shape, valuations, lambda)))
}
