//! The on-the-fly Büchi automaton for an LTL⊕PSL formula: initial states,
//! acceptance sets, and an accepting lasso.

use sltl::automaton::{Automaton, DEFAULT_MAX_STATES};
use sltl::translate::{build_phi_d, Partition};
use sltl::Formula;

fn main() {
    let text = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "G F p & G (<@s> q -> X !p)".into());
    let f = sltl::parse(&text).unwrap();
    for d in Partition::all(&f) {
        let phi_d = build_phi_d(&f, &d).unwrap();
        let a = Automaton::new(&phi_d);
        let initial = a.initial_states().count();
        println!(
            "partition {d}: closure {}, initial states {initial}",
            a.closure().len()
        );
        for g in a.acceptance_formulas() {
            println!("  acceptance for {g}");
        }
        match a.find_accepting_lasso(DEFAULT_MAX_STATES).unwrap() {
            Some(lasso) => {
                println!(
                    "  lasso: stem {}, cycle {}",
                    lasso.stem.len(),
                    lasso.cycle.len()
                );
                for (i, b) in lasso.states().enumerate() {
                    let members: Vec<String> = a
                        .members(b)
                        .filter(|g| {
                            let atom = |h: &Formula| {
                                matches!(
                                    h,
                                    Formula::Prop(_) | Formula::Diamond(..) | Formula::Boxed(..)
                                )
                            };
                            match g {
                                Formula::Not(h) => atom(h),
                                h => atom(h),
                            }
                        })
                        .map(|g| g.to_string())
                        .collect();
                    println!("  {i}: {{{}}}", members.join(", "));
                }
                break;
            }
            None => println!("  empty"),
        }
    }
}
