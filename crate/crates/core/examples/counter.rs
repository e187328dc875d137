//! The binary counter formula and the formula that only has infinite
//! models.

use sltl::semantics::{eval_sltl, oracle_sat, SearchBounds};
use sltl::solver::{solve, SolveOptions};
use sltl::translate::{gen_counter, gen_phi_c};

fn main() {
    let c2 = gen_counter(2).unwrap();
    println!("C_2 = {c2}");
    let (m, t) = oracle_sat(&c2, &SearchBounds::new(1, 0, 4))
        .unwrap()
        .unwrap();
    let trace = &m.traces()[&t];
    for j in 0..=8 {
        let v = trace.at(j);
        let bits = format!("{}{}", v.contains("p1") as u8, v.contains("p2") as u8);
        println!("  position {j}: {bits}");
    }
    let full = sltl::parse("p1 & p2 -> X (!p1 & !p2)").unwrap();
    println!("  wrap at 3: {}", eval_sltl(&m, &t, 3, &full).unwrap());

    let phi = gen_phi_c(1).unwrap();
    println!("phi_C(1) = {phi}");
    let v = solve(&phi, &SolveOptions::default()).unwrap();
    println!("  verdict {}", v.to_json());
}
