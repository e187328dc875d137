//! The full decision pipeline with witness checking.
//!
//! cargo run --example solve -- 'G([@*] !m) -> [@*] t'

use sltl::solver::{check_witness, solve, SolveOptions, Verdict};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let inputs = if args.is_empty() {
        vec![
            "G([@*] !m) -> [@*] t".to_string(),
            "(p U q) & G !q".to_string(),
            "G (<@s> p & [@t] !p)".to_string(),
            "G (<@s> p & [@t] !p) & @s <= @t".to_string(),
            "<@s> p & !(@s <= @t)".to_string(),
            "<@s> (p & X !p)".to_string(),
        ]
    } else {
        args
    };
    let opts = SolveOptions::default();
    for text in inputs {
        let f = sltl::parse(&text).unwrap();
        let v = solve(&f, &opts).unwrap();
        print!("{text:<36} {}", v.status());
        if let Verdict::Sat {
            model,
            designated,
            engine,
            partition,
        } = &v
        {
            print!(
                " via {}: {} traces, prefix {}, period {}, checked {}",
                engine.as_str(),
                model.traces().len(),
                model.shape().prefix_len,
                model.shape().period_len,
                check_witness(&f, model, designated).unwrap()
            );
            if let Some(d) = partition {
                print!(", partition {d}");
            }
        }
        println!();
    }
}
