//! Decision pipeline: classify the input, pick the engine, and return a
//! verdict whose `Sat` witness has been re-checked by the evaluator.
//!
//! * PSL: complete grid search, lifted to period-1 traces.
//! * Pure LTL and LTL⊕PSL: one automaton per sharpening partition; the
//!   accepting lasso is turned into traces `σ_(S,j)` over a shared grid.
//! * Full SLTL: bounded oracle only, so the answer is `Sat` or `Unknown`.

use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexMap;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::automaton::{Automaton, AutomatonError, Lasso, DEFAULT_MAX_STATES};
use crate::psl::{psl_sat_general, search_grid, PslError, PslModel, SharpeningClosure};
use crate::semantics::{
    eval_sltl, oracle_sat, EvalError, ModelError, OracleError, SearchBounds, Shape, SltlModel,
    TraceId, UpTrace, Valuation, WitnessFile,
};
use crate::syntax::{classify, vocab, Formula, Fragment, Standpoint};
use crate::translate::{build_phi_d, sltl_to_ptls5, Partition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Engine {
    Psl,
    Automaton,
    Oracle,
}

impl Engine {
    pub fn as_str(self) -> &'static str {
        match self {
            Engine::Psl => "psl",
            Engine::Automaton => "automaton",
            Engine::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Sat {
        model: SltlModel,
        designated: TraceId,
        engine: Engine,
        /// The sharpening partition whose automaton produced the witness.
        partition: Option<Partition>,
    },
    Unsat(Engine),
    /// No bounded model of a full SLTL formula; `translation` is its
    /// PTL×S5 image.
    Unknown {
        bounds: SearchBounds,
        translation: Formula,
    },
    OutOfFragment(String),
}

impl Verdict {
    pub fn status(&self) -> &'static str {
        match self {
            Verdict::Sat { .. } => "sat",
            Verdict::Unsat(_) => "unsat",
            Verdict::Unknown { .. } => "unknown",
            Verdict::OutOfFragment(_) => "out_of_fragment",
        }
    }

    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat { .. })
    }

    pub fn to_json(&self) -> Value {
        match self {
            Verdict::Sat {
                model,
                designated,
                engine,
                partition,
            } => json!({
                "status": self.status(),
                "engine": engine.as_str(),
                "partition": partition.as_ref().map(partition_json),
                "witness": serde_json::to_value(model.to_witness(designated)).expect("witness serializes"),
            }),
            Verdict::Unsat(engine) => json!({
                "status": self.status(),
                "engine": engine.as_str(),
                "partition": Value::Null,
                "witness": Value::Null,
            }),
            Verdict::Unknown {
                bounds,
                translation,
            } => json!({
                "status": self.status(),
                "engine": Engine::Oracle.as_str(),
                "partition": Value::Null,
                "witness": Value::Null,
                "bounds": {
                    "traces": bounds.max_traces,
                    "prefix": bounds.max_prefix,
                    "period": bounds.max_period,
                },
                "translation": translation.to_string(),
            }),
            Verdict::OutOfFragment(details) => json!({
                "status": self.status(),
                "engine": Value::Null,
                "partition": Value::Null,
                "witness": Value::Null,
                "details": details,
            }),
        }
    }
}

fn partition_json(d: &Partition) -> Value {
    let pairs = |atoms: &[(Standpoint, Standpoint)]| -> Vec<[String; 2]> {
        atoms
            .iter()
            .map(|(s, t)| [s.to_string(), t.to_string()])
            .collect()
    };
    json!({ "i_plus": pairs(&d.i_plus), "i_minus": pairs(&d.i_minus) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    /// Bounds for the oracle on full SLTL inputs.
    pub bounds: SearchBounds,
    /// Report full SLTL inputs as out of fragment instead of searching.
    pub fragment_strict: bool,
    /// Worker threads for partition branches.
    pub jobs: usize,
    pub max_states: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            bounds: SearchBounds::default(),
            fragment_strict: false,
            jobs: 1,
            max_states: DEFAULT_MAX_STATES,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Psl(#[from] PslError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl SolveError {
    pub fn is_resource_limit(&self) -> bool {
        matches!(
            self,
            SolveError::Automaton(AutomatonError::ResourceLimit { .. })
                | SolveError::Oracle(OracleError::ResourceLimit { .. })
        )
    }
}

pub fn solve(f: &Formula, opts: &SolveOptions) -> Result<Verdict, SolveError> {
    match classify(f) {
        Fragment::Psl => solve_psl(f),
        Fragment::PureLtl | Fragment::LtlPsl => solve_automaton(f, opts),
        Fragment::FullSltl if opts.fragment_strict => Ok(Verdict::OutOfFragment(format!(
            "{} has a temporal operator under a standpoint modality",
            f
        ))),
        Fragment::FullSltl => match oracle_sat(f, &opts.bounds)? {
            Some((model, designated)) => sat(f, model, designated, Engine::Oracle, None),
            None => Ok(Verdict::Unknown {
                bounds: opts.bounds.clone(),
                translation: sltl_to_ptls5(f),
            }),
        },
    }
}

fn sat(
    f: &Formula,
    model: SltlModel,
    designated: TraceId,
    engine: Engine,
    partition: Option<Partition>,
) -> Result<Verdict, SolveError> {
    if !check_witness(f, &model, &designated)? {
        return Err(SolveError::Invariant(format!(
            "{} witness for {f} fails evaluation",
            engine.as_str()
        )));
    }
    Ok(Verdict::Sat {
        model,
        designated,
        engine,
        partition,
    })
}

fn cell_trace(row: usize, col: usize) -> TraceId {
    format!("{row},{col}")
}

/// A PSL grid as an SLTL model: one constant trace per cell.
pub fn lift_psl_model(m: &PslModel, props: &BTreeSet<String>) -> (SltlModel, TraceId) {
    let mut traces = IndexMap::new();
    for cell in m.cells() {
        let v: Valuation = m
            .valuation
            .get(&cell)
            .map(|v| v.intersection(props).cloned().collect())
            .unwrap_or_default();
        traces.insert(
            cell_trace(cell.row, cell.col),
            UpTrace::new(vec![], vec![v]).expect("non-empty period"),
        );
    }
    let lambda = lambda_of(&m.s_family.sets, m.n);
    let shape = Shape {
        prefix_len: 0,
        period_len: 1,
    };
    let model = SltlModel::new(shape, traces, lambda).expect("grid models are well-formed");
    let d = m.designated();
    (model, cell_trace(d.row, d.col))
}

fn lambda_of(sets: &[BTreeSet<Standpoint>], n: usize) -> BTreeMap<Standpoint, BTreeSet<TraceId>> {
    let mut lambda: BTreeMap<Standpoint, BTreeSet<TraceId>> = BTreeMap::new();
    for (row, set) in sets.iter().enumerate() {
        for s in set.iter().filter(|s| !s.is_universal()) {
            lambda
                .entry(s.clone())
                .or_default()
                .extend((1..=n).map(|col| cell_trace(row, col)));
        }
    }
    lambda
}

fn user_props(f: &Formula) -> BTreeSet<String> {
    vocab(f).props.iter().map(|p| p.to_string()).collect()
}

fn solve_psl(f: &Formula) -> Result<Verdict, SolveError> {
    match psl_sat_general(f)? {
        Some(m) => {
            let (model, designated) = lift_psl_model(&m, &user_props(f));
            sat(f, model, designated, Engine::Psl, None)
        }
        None => Ok(Verdict::Unsat(Engine::Psl)),
    }
}

fn solve_automaton(f: &Formula, opts: &SolveOptions) -> Result<Verdict, SolveError> {
    let partitions = Partition::all(f);
    let attempt = |d: &Partition| -> Option<Result<(SltlModel, TraceId, Partition), SolveError>> {
        let run = || -> Result<Option<(SltlModel, TraceId)>, SolveError> {
            let phi_d = build_phi_d(f, d).expect("partition built from the formula");
            let automaton = Automaton::new(&phi_d);
            match automaton.find_accepting_lasso(opts.max_states)? {
                Some(lasso) => Ok(Some(witness_from_lasso(&automaton, &lasso, d)?)),
                None => Ok(None),
            }
        };
        match run() {
            Ok(None) => None,
            Ok(Some((m, t))) => Some(Ok((m, t, d.clone()))),
            Err(e) => Some(Err(e)),
        }
    };
    let found = if opts.jobs > 1 && partitions.len() > 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| SolveError::Invariant(e.to_string()))?
            .install(|| partitions.par_iter().find_map_first(attempt))
    } else {
        partitions.iter().find_map(attempt)
    };
    match found {
        None => Ok(Verdict::Unsat(Engine::Automaton)),
        Some(Err(e)) => Err(e),
        Some(Ok((model, designated, d))) => {
            let model = strip_props(&model, &user_props(f));
            sat(f, model, designated, Engine::Automaton, Some(d))
        }
    }
}

fn strip_props(m: &SltlModel, keep: &BTreeSet<String>) -> SltlModel {
    let strip = |v: &Valuation| -> Valuation { v.intersection(keep).cloned().collect() };
    let traces = m
        .traces()
        .iter()
        .map(|(id, t)| {
            let trace = UpTrace::new(
                t.prefix.iter().map(strip).collect(),
                t.period.iter().map(strip).collect(),
            )
            .expect("non-empty period");
            (id.clone(), trace)
        })
        .collect();
    let lambda = m
        .lambda()
        .iter()
        .filter(|(s, _)| !s.is_universal())
        .map(|(s, ids)| (s.clone(), ids.clone()))
        .collect();
    SltlModel::new(m.shape(), traces, lambda).expect("same shape")
}

/// Grid width shared by every lasso position: standpoints of `φ_D` (with
/// `*`), plus the modal formulas of its closure, plus one. The PSL part of
/// any state is a set of literals over those modal formulas, so each
/// position needs at most one diamond witness per modal closure formula.
pub fn uniform_width(automaton: &Automaton) -> usize {
    let mut standpoints = vocab(automaton.formula()).standpoints;
    standpoints.insert(Standpoint::Universal);
    let modal = automaton
        .closure()
        .formulas()
        .iter()
        .filter(|g| matches!(g, Formula::Diamond(..) | Formula::Boxed(..)))
        .count();
    standpoints.len() + modal + 1
}

/// The sharpening closure behind every per-position grid: `I+` plus
/// `(s, *)` over all standpoints of `φ_D`.
pub fn shared_closure(automaton: &Automaton, d: &Partition) -> SharpeningClosure {
    SharpeningClosure::new(vocab(automaton.formula()).standpoints, &d.i_plus)
}

/// Traces `σ_(S,j)` reading cell `(S, j)` of the grid chosen for each lasso
/// position; `λ(s)` collects the rows whose label contains `s`.
pub fn witness_from_lasso(
    automaton: &Automaton,
    lasso: &Lasso,
    d: &Partition,
) -> Result<(SltlModel, TraceId), SolveError> {
    let r = shared_closure(automaton, d);
    let n = uniform_width(automaton);
    let mut grids = Vec::with_capacity(lasso.len());
    for b in lasso.states() {
        let conj = Formula::conjunction(automaton.psl_conjuncts(b));
        let grid = search_grid(&r, n, &conj)?.ok_or_else(|| {
            SolveError::Invariant(format!("no grid of width {n} for an s-elementary set"))
        })?;
        grids.push(grid);
    }
    let family = r.family();
    let mut traces = IndexMap::new();
    for row in 0..family.sets.len() {
        for col in 1..=n {
            let cell = crate::psl::Cell { row, col };
            let vals: Vec<Valuation> = grids
                .iter()
                .map(|g| g.valuation.get(&cell).cloned().unwrap_or_default())
                .collect();
            let (pre, per) = vals.split_at(lasso.stem.len());
            traces.insert(
                cell_trace(row, col),
                UpTrace::new(pre.to_vec(), per.to_vec()).expect("cycle is non-empty"),
            );
        }
    }
    let shape = Shape {
        prefix_len: lasso.stem.len(),
        period_len: lasso.cycle.len(),
    };
    let model = SltlModel::new(shape, traces, lambda_of(&family.sets, n))
        .map_err(|e| SolveError::Invariant(e.to_string()))?;
    Ok((model, cell_trace(family.s_star, 1)))
}

/// `m, t, 0 ⊨ f`.
pub fn check_witness(f: &Formula, m: &SltlModel, t: &str) -> Result<bool, EvalError> {
    eval_sltl(m, t, 0, f)
}

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error("malformed witness: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Parses a witness file and checks `f` at its designated trace.
pub fn check_witness_json(f: &Formula, text: &str) -> Result<bool, WitnessError> {
    let file: WitnessFile = serde_json::from_str(text)?;
    let (m, t) = SltlModel::from_witness(&file)?;
    Ok(check_witness(f, &m, &t)?)
}
