//! The reductions between SLTL, PTL×S5, S5 and strict-until form, plus
//! model transport through the standpoint translation.

use sltl::semantics::{eval_ptls5, eval_sltl, oracle_sat, SearchBounds};
use sltl::syntax::standpoints_in_order;
use sltl::translate::{
    build_phi_d, psl_to_s5, sltl_to_ptls5, t1, transport_from_ptls5, transport_to_ptls5,
    until_to_strict, Partition,
};

fn main() {
    let ptl = sltl::parse("[@*] G p & <@*> F q").unwrap();
    println!("t1            {}", t1(&ptl).unwrap());

    let f = sltl::parse("<@s> (p U q) & [@t] !q & @s <= @t").unwrap();
    let g = sltl_to_ptls5(&f);
    println!("sltl          {f}");
    println!("ptls5         {g}");
    println!(
        "s5            {}",
        psl_to_s5(&sltl::parse("<@s> p & [@t] !p").unwrap()).unwrap()
    );
    println!(
        "strict until  {}",
        until_to_strict(&sltl::parse("p U q").unwrap())
    );
    for d in Partition::all(&f) {
        println!("phi_D {d}  {}", build_phi_d(&f, &d).unwrap());
    }

    let h = sltl::parse("<@s> (p & X !p) & [@t] F p").unwrap();
    let (m, t) = oracle_sat(&h, &SearchBounds::new(2, 1, 2))
        .unwrap()
        .expect("sat");
    let image = transport_to_ptls5(&m);
    let h5 = sltl_to_ptls5(&h);
    println!(
        "forward transport valid: {}",
        eval_ptls5(&image, &t, 0, &h5).unwrap()
    );
    let back = transport_from_ptls5(&image, &standpoints_in_order(&h)).unwrap();
    println!(
        "backward transport valid: {}",
        eval_sltl(&back, &t, 0, &h).unwrap()
    );
}
