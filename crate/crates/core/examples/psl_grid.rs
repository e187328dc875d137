//! Propositional standpoint logic: grid models for satisfiable formulas.

use sltl::psl::psl_sat_general;

fn main() {
    for text in [
        "<@s> p & [@t] !p",
        "<@s> p & [@t] !p & @s <= @t",
        "!(@s <= @t) & [@*] p",
        "<@a> (p & <@b> !p) & [@a] q",
    ] {
        let f = sltl::parse(text).unwrap();
        println!("{text}");
        match psl_sat_general(&f).unwrap() {
            Some(m) => {
                println!("  sat on {} rows x {} columns", m.s_family.sets.len(), m.n);
                for (row, set) in m.s_family.sets.iter().enumerate() {
                    let label: Vec<String> = set.iter().map(|s| s.to_string()).collect();
                    let cells: Vec<String> = (1..=m.n)
                        .map(|col| {
                            let v = m.valuation.get(&sltl::psl::Cell { row, col });
                            format!(
                                "{:?}",
                                v.map(|v| v.iter().cloned().collect::<Vec<_>>())
                                    .unwrap_or_default()
                            )
                        })
                        .collect();
                    println!("  {row} {{{}}}: {}", label.join(","), cells.join(" "));
                }
                println!("  designated {}", m.designated());
                println!("  {}", serde_json::to_string(&m.to_witness()).unwrap());
            }
            None => println!("  unsat"),
        }
    }
}
