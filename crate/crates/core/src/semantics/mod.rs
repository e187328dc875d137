//! Evaluation over finitely presented (ultimately periodic) models and
//! bounded satisfiability search.

mod eval;
mod model;
mod oracle;

pub use eval::{check_ptls5, eval_ptls5, eval_sltl, EvalError, TruthTable};
pub use model::{
    ModelError, PtlS5Model, Shape, SltlModel, TraceId, UpTrace, Valuation, WitnessFile,
};
pub use oracle::{
    oracle_sat, oracle_sat_enumerative, oracle_sat_ptls5, OracleError, SearchBounds,
    DEFAULT_NODE_LIMIT,
};
