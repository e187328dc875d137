//! Bounded model search over small lasso-shaped models.
//!
//! cargo run --example bounded_oracle -- '<@s> (p & X !p) & [@s] F q' 2 1 2

use sltl::semantics::{oracle_sat, SearchBounds};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let text = args
        .first()
        .map(String::as_str)
        .unwrap_or("<@s> (p & X !p) & [@s] F q & !q");
    let num = |i: usize, d: usize| args.get(i).and_then(|a| a.parse().ok()).unwrap_or(d);
    let bounds = SearchBounds::new(num(1, 3), num(2, 2), num(3, 3));
    let f = sltl::parse(text).expect("formula");
    match oracle_sat(&f, &bounds).expect("within the node limit") {
        Some((m, t)) => {
            println!("model found, designated {t}");
            println!(
                "{}",
                serde_json::to_string_pretty(&m.to_witness(&t)).unwrap()
            );
        }
        None => println!(
            "no model with at most {} traces, prefix {}, period {}",
            bounds.max_traces, bounds.max_prefix, bounds.max_period
        ),
    }
}
