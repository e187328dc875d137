//! Satisfiability-preserving reductions between SLTL, PTL×S5, PSL and S5,
//! the partition formulas `φ_D`, and the counter generators.
//!
//! PTL×S5 shares the SLTL syntax tree, with `<@*>`/`[@*]` as its modality.

use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexMap;
use thiserror::Error;

use crate::psl::witness_props;
use crate::semantics::{check_ptls5, PtlS5Model, SltlModel, TraceId, UpTrace, Valuation};
use crate::syntax::{classify, standpoints_in_order, vocab, Formula, Fragment, Standpoint};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TranslateError {
    #[error("not a PTL×S5 formula: {0}")]
    NotPtlS5(String),
    #[error("not a PSL formula: {0}")]
    NotPsl(String),
    #[error("partition does not split the sharpening atoms of the formula exactly")]
    PartitionMismatch,
    #[error("counter width must be at least 1")]
    ZeroWidth,
}

/// Proposition standing for standpoint `s` after translation to PTL×S5.
pub fn standpoint_prop(s: &Standpoint) -> String {
    format!("$sp_{}", s.name())
}

fn standpoint_formula(s: &Standpoint) -> Formula {
    if s.is_universal() {
        Formula::Top
    } else {
        Formula::prop(&standpoint_prop(s))
    }
}

/// PTL×S5 into SLTL. The S5 modality is already written `<@*>`, so this
/// checks the sublanguage and returns the formula unchanged.
pub fn t1(f: &Formula) -> Result<Formula, TranslateError> {
    check_ptls5(f).map_err(|e| TranslateError::NotPtlS5(e.to_string()))?;
    Ok(f.clone())
}

/// SLTL into PTL×S5: standpoints become propositions.
pub fn t2(f: &Formula) -> Formula {
    let star = Standpoint::Universal;
    f.map_bottom_up(&mut |g| match g {
        Formula::Diamond(s, body) if !s.is_universal() => Formula::diamond(
            star.clone(),
            Formula::and(standpoint_formula(&s), (*body).clone()),
        ),
        Formula::Boxed(s, body) if !s.is_universal() => Formula::boxed(
            star.clone(),
            Formula::implies(standpoint_formula(&s), (*body).clone()),
        ),
        Formula::Sharper(s, t) => Formula::boxed(
            star.clone(),
            Formula::implies(standpoint_formula(&s), standpoint_formula(&t)),
        ),
        g => g,
    })
}

/// Every standpoint is inhabited and rigid along each trace.
pub fn chi_n(standpoints: &[Standpoint]) -> Formula {
    let named: Vec<&Standpoint> = standpoints.iter().filter(|s| !s.is_universal()).collect();
    if named.is_empty() {
        return Formula::Top;
    }
    let star = Standpoint::Universal;
    let inhabited = named
        .iter()
        .map(|s| Formula::diamond(star.clone(), standpoint_formula(s)));
    let rigid = Formula::conjunction(named.iter().map(|s| {
        let p = standpoint_formula(s);
        Formula::or(Formula::always(p.clone()), Formula::always(Formula::not(p)))
    }));
    Formula::and(Formula::conjunction(inhabited), Formula::boxed(star, rigid))
}

pub fn sltl_to_ptls5(f: &Formula) -> Formula {
    Formula::and(chi_n(&standpoints_in_order(f)), t2(f))
}

/// PSL into S5 (written with `<@*>`/`[@*]`), guarded by every standpoint
/// being inhabited.
pub fn psl_to_s5(f: &Formula) -> Result<Formula, TranslateError> {
    if classify(f) != Fragment::Psl {
        return Err(TranslateError::NotPsl(f.to_string()));
    }
    let guard = standpoints_in_order(f)
        .into_iter()
        .filter(|s| !s.is_universal())
        .map(|s| Formula::diamond(Standpoint::Universal, standpoint_formula(&s)));
    Ok(Formula::and(Formula::conjunction(guard), t2(f)))
}

/// Renames every Until subformula to a fresh `$u<k>`, bottom-up, and adds
/// `[@*] G ($uk <-> b | (a & X (a U b)))` for each.
pub fn until_to_strict(f: &Formula) -> Formula {
    let mut taken: BTreeSet<String> = vocab(f).props.iter().map(|p| p.to_string()).collect();
    let mut definitions: Vec<Formula> = Vec::new();
    let mut names: BTreeMap<Formula, Formula> = BTreeMap::new();
    let top = f.map_bottom_up(&mut |g| match &g {
        Formula::Until(a, b) => {
            if let Some(name) = names.get(&g) {
                return name.clone();
            }
            let mut k = definitions.len();
            while taken.contains(&format!("$u{k}")) {
                k += 1;
            }
            let name = format!("$u{k}");
            taken.insert(name.clone());
            let p = Formula::prop(&name);
            let strict = Formula::next(Formula::until((**a).clone(), (**b).clone()));
            let unfolded = Formula::or((**b).clone(), Formula::and((**a).clone(), strict));
            definitions.push(Formula::boxed(
                Standpoint::Universal,
                Formula::always(Formula::iff(p.clone(), unfolded)),
            ));
            names.insert(g.clone(), p.clone());
            p
        }
        _ => g,
    });
    if definitions.is_empty() {
        return f.clone();
    }
    Formula::and(top, Formula::conjunction(definitions))
}

/// A truth assignment to the sharpening atoms: `i_plus` true, `i_minus`
/// false.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Partition {
    pub i_plus: Vec<(Standpoint, Standpoint)>,
    pub i_minus: Vec<(Standpoint, Standpoint)>,
}

impl Partition {
    /// All partitions of the atoms of `f`, fewest false atoms first.
    pub fn all(f: &Formula) -> Vec<Partition> {
        let atoms: Vec<(Standpoint, Standpoint)> = vocab(f).sharpening_atoms.into_iter().collect();
        crate::psl::partition_masks(atoms.len())
            .into_iter()
            .map(|mask| {
                let (minus, plus): (Vec<_>, Vec<_>) = atoms
                    .iter()
                    .enumerate()
                    .partition(|(i, _)| mask >> i & 1 == 1);
                Partition {
                    i_plus: plus.into_iter().map(|(_, a)| a.clone()).collect(),
                    i_minus: minus.into_iter().map(|(_, a)| a.clone()).collect(),
                }
            })
            .collect()
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let show = |atoms: &[(Standpoint, Standpoint)]| {
            atoms
                .iter()
                .map(|(s, t)| format!("{s} <= {t}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        write!(
            f,
            "+{{{}}} -{{{}}}",
            show(&self.i_plus),
            show(&self.i_minus)
        )
    }
}

/// `f[I+ ↦ ⊤, I− ↦ ⊥] ∧ G(⋀ I+ ∧ ⋀_{I−} (<@s> $sh & !<@t> $sh))`.
pub fn build_phi_d(f: &Formula, d: &Partition) -> Result<Formula, TranslateError> {
    let atoms: Vec<(Standpoint, Standpoint)> = vocab(f).sharpening_atoms.into_iter().collect();
    let covered: BTreeSet<&(Standpoint, Standpoint)> = d.i_plus.iter().chain(&d.i_minus).collect();
    let overlap = d.i_plus.iter().any(|a| d.i_minus.contains(a));
    if overlap || covered.len() != atoms.len() || atoms.iter().any(|a| !covered.contains(a)) {
        return Err(TranslateError::PartitionMismatch);
    }
    let fresh = witness_props(f, &atoms);
    let substituted = f.map_bottom_up(&mut |g| match &g {
        Formula::Sharper(s, t) => {
            if d.i_minus.contains(&(s.clone(), t.clone())) {
                Formula::Bottom
            } else {
                Formula::Top
            }
        }
        _ => g,
    });
    let mut psi = Vec::new();
    for (s, t) in &d.i_plus {
        psi.push(Formula::sharper(s.clone(), t.clone()));
    }
    for (s, t) in &d.i_minus {
        let i = atoms.iter().position(|a| a.0 == *s && a.1 == *t).unwrap();
        let p = Formula::prop(&fresh[i]);
        psi.push(Formula::and(
            Formula::diamond(s.clone(), p.clone()),
            Formula::not(Formula::diamond(t.clone(), p)),
        ));
    }
    Ok(Formula::and(
        substituted,
        Formula::always(Formula::conjunction(psi)),
    ))
}

fn bit(i: usize) -> Formula {
    Formula::prop(&format!("p{i}"))
}

/// Binary counter over `p1..pn`, `p1` most significant, counting up from
/// zero and wrapping around.
pub fn gen_counter(n: usize) -> Result<Formula, TranslateError> {
    if n == 0 {
        return Err(TranslateError::ZeroWidth);
    }
    let zero = || Formula::conjunction((1..=n).map(|i| Formula::not(bit(i))));
    let full = Formula::conjunction((1..=n).map(bit));
    let wrap = Formula::always(Formula::implies(full, Formula::next(zero())));
    let mut parts = vec![zero(), wrap];
    for i in 1..=n {
        let guard =
            Formula::conjunction(std::iter::once(Formula::not(bit(i))).chain((i + 1..=n).map(bit)));
        let effect = Formula::conjunction(
            (i + 1..=n)
                .map(|j| Formula::next(Formula::not(bit(j))))
                .chain(std::iter::once(Formula::next(bit(i))))
                .chain((1..i).map(|j| Formula::iff(bit(j), Formula::next(bit(j))))),
        );
        parts.push(Formula::always(Formula::implies(guard, effect)));
    }
    Ok(Formula::conjunction(parts))
}

/// `G(<@s>(C_n & p & X G !p))`.
pub fn gen_phi_c(n: usize) -> Result<Formula, TranslateError> {
    let body = Formula::conjunction([
        gen_counter(n)?,
        Formula::prop("p"),
        Formula::next(Formula::always(Formula::not(Formula::prop("p")))),
    ]);
    Ok(Formula::always(Formula::diamond(
        Standpoint::named("s"),
        body,
    )))
}

/// Witness transport: each trace of `m` gains `$sp_s` at every
/// position exactly when it belongs to `λ(s)`.
pub fn transport_to_ptls5(m: &SltlModel) -> PtlS5Model {
    let traces = m
        .traces()
        .iter()
        .map(|(id, t)| {
            let tag = |v: &Valuation| {
                let mut v = v.clone();
                for (s, members) in m.lambda() {
                    if !s.is_universal() && members.contains(id) {
                        v.insert(standpoint_prop(s));
                    }
                }
                v
            };
            let trace = UpTrace::new(
                t.prefix.iter().map(tag).collect(),
                t.period.iter().map(tag).collect(),
            )
            .expect("period stays non-empty");
            (id.clone(), trace)
        })
        .collect();
    PtlS5Model::new(m.shape(), traces).expect("same shape as the source model")
}

/// Reverse transport: `λ(s)` is the set of traces carrying `$sp_s` at
/// position 0, and the standpoint propositions are dropped. `None` when a
/// standpoint of `standpoints` would be empty.
pub fn transport_from_ptls5(m: &PtlS5Model, standpoints: &[Standpoint]) -> Option<SltlModel> {
    let props: BTreeSet<String> = standpoints
        .iter()
        .filter(|s| !s.is_universal())
        .map(standpoint_prop)
        .collect();
    let mut lambda: BTreeMap<Standpoint, BTreeSet<TraceId>> = BTreeMap::new();
    for s in standpoints.iter().filter(|s| !s.is_universal()) {
        let members: BTreeSet<TraceId> = m
            .traces()
            .iter()
            .filter(|(_, t)| t.at(0).contains(&standpoint_prop(s)))
            .map(|(id, _)| id.clone())
            .collect();
        if members.is_empty() {
            return None;
        }
        lambda.insert(s.clone(), members);
    }
    let strip = |v: &Valuation| -> Valuation { v.difference(&props).cloned().collect() };
    let traces: IndexMap<TraceId, UpTrace> = m
        .traces()
        .iter()
        .map(|(id, t)| {
            let trace = UpTrace::new(
                t.prefix.iter().map(strip).collect(),
                t.period.iter().map(strip).collect(),
            )
            .expect("period stays non-empty");
            (id.clone(), trace)
        })
        .collect();
    SltlModel::new(m.shape(), traces, lambda).ok()
}
