//! Parse formulas, print them back, and sort them into fragments.
//!
//! cargo run --example parse_classify -- '<@s> X p'

use sltl::syntax::{classify, closure, to_nnf, vocab};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let inputs = if args.is_empty() {
        vec![
            "[@*](G !malf -> test)".to_string(),
            "G([@*] !m) -> [@*] t".to_string(),
            "<@s> p & @s <= @t".to_string(),
            "<@eu> X p".to_string(),
            "p U q".to_string(),
        ]
    } else {
        args
    };
    for text in inputs {
        match sltl::parse(&text) {
            Ok(f) => {
                let v = vocab(&f);
                println!("{text}");
                println!("  printed   {f}");
                println!("  fragment  {}", classify(&f));
                println!("  nnf       {}", to_nnf(&f));
                println!("  size {} closure {}", f.size(), closure(&f).len());
                println!(
                    "  props {:?} standpoints {:?}",
                    v.props,
                    v.standpoints
                        .iter()
                        .map(|s| s.to_string())
                        .collect::<Vec<_>>()
                );
            }
            Err(e) => println!("{text}\n  error: {e}"),
        }
    }
}
