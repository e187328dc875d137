//! Build a two-trace model by hand and evaluate formulas on it.

use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexMap;
use sltl::semantics::{eval_sltl, Shape, SltlModel, UpTrace, Valuation};
use sltl::Standpoint;

fn val(props: &[&str]) -> Valuation {
    props.iter().map(|p| p.to_string()).collect()
}

fn main() {
    // t0: test at 0, never malf. t1: malf from position 1 on.
    let shape = Shape {
        prefix_len: 1,
        period_len: 1,
    };
    let mut traces = IndexMap::new();
    traces.insert(
        "t0".to_string(),
        UpTrace::new(vec![val(&["test"])], vec![val(&[])]).unwrap(),
    );
    traces.insert(
        "t1".to_string(),
        UpTrace::new(vec![val(&["test"])], vec![val(&["malf"])]).unwrap(),
    );
    let lambda = BTreeMap::from([(Standpoint::named("it"), BTreeSet::from(["t0".to_string()]))]);
    let m = SltlModel::new(shape, traces, lambda).unwrap();

    for text in [
        "[@*](G !malf -> test)",
        "<@it> G !malf",
        "[@it] G !malf",
        "<@*> F malf",
        "@it <= @*",
        "@* <= @it",
    ] {
        let f = sltl::parse(text).unwrap();
        println!(
            "t0, 0 |= {text:<24} {}",
            eval_sltl(&m, "t0", 0, &f).unwrap()
        );
    }
    let w = serde_json::to_string_pretty(&m.to_witness("t0")).unwrap();
    println!("{w}");
}
