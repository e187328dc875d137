//! Propositional standpoint logic: grid models, complete satisfiability,
//! and the standpoint-consistency check used by the automaton.

mod grid;
mod model;

use std::collections::{BTreeSet, HashMap};
use std::sync::{OnceLock, RwLock};

pub use grid::search_grid;
pub use model::{Cell, PslError, PslModel, PslWitnessFile, SFamily, SharpeningClosure};

use crate::syntax::{classify, to_nnf, vocab, Formula, Fragment, Standpoint};

/// A PSL formula split into positive sharpening atoms and an NNF body free
/// of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Normalized {
    Split {
        phi1: Vec<(Standpoint, Standpoint)>,
        phi2: Formula,
    },
    /// A negated or nested sharpening atom survived normalization.
    Unrepresentable,
}

fn require_psl(f: &Formula) -> Result<(), PslError> {
    if classify(f) == Fragment::Psl {
        Ok(())
    } else {
        Err(PslError::Temporal(f.to_string()))
    }
}

fn conjuncts<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::And(a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        _ => out.push(f),
    }
}

pub fn normalize_for_theorem(f: &Formula) -> Result<Normalized, PslError> {
    require_psl(f)?;
    let mut parts = Vec::new();
    conjuncts(f, &mut parts);
    let mut phi1 = Vec::new();
    let mut rest = Vec::new();
    for g in parts {
        match g {
            Formula::Sharper(s, t) => {
                if !phi1.contains(&(s.clone(), t.clone())) {
                    phi1.push((s.clone(), t.clone()));
                }
            }
            _ => rest.push(g.clone()),
        }
    }
    let star = (Standpoint::Universal, Standpoint::Universal);
    if !phi1.contains(&star) {
        phi1.push(star);
    }
    let phi2 = to_nnf(&Formula::conjunction(rest));
    let mut nested = false;
    phi2.visit(&mut |g| nested |= matches!(g, Formula::Sharper(..)));
    Ok(if nested {
        Normalized::Unrepresentable
    } else {
        Normalized::Split { phi1, phi2 }
    })
}

/// Grid width used for `phi1 ∧ phi2`: standpoints (with `*`) plus
/// diamond occurrences plus one.
pub fn grid_width(phi1: &[(Standpoint, Standpoint)], phi2: &Formula) -> usize {
    let mut standpoints: BTreeSet<Standpoint> = vocab(phi2).standpoints;
    standpoints.insert(Standpoint::Universal);
    for (s, t) in phi1 {
        standpoints.insert(s.clone());
        standpoints.insert(t.clone());
    }
    let mut diamonds = 0;
    to_nnf(phi2).visit(&mut |g| diamonds += matches!(g, Formula::Diamond(..)) as usize);
    standpoints.len() + diamonds + 1
}

fn closure_of(phi1: &[(Standpoint, Standpoint)], phi2: &Formula) -> SharpeningClosure {
    SharpeningClosure::new(vocab(phi2).standpoints, phi1)
}

pub fn psl_sat(
    phi1: &[(Standpoint, Standpoint)],
    phi2: &Formula,
) -> Result<Option<PslModel>, PslError> {
    psl_sat_with_width(phi1, phi2, grid_width(phi1, phi2))
}

/// [`psl_sat`] on a grid of the given width instead of the least one.
pub fn psl_sat_with_width(
    phi1: &[(Standpoint, Standpoint)],
    phi2: &Formula,
    n: usize,
) -> Result<Option<PslModel>, PslError> {
    require_psl(phi2)?;
    search_grid(&closure_of(phi1, phi2), n, phi2)
}

/// `$sh_<s>_<t>`, suffixed until it avoids `taken`.
fn fresh_name(s: &Standpoint, t: &Standpoint, taken: &BTreeSet<String>) -> String {
    let base = format!("$sh_{}_{}", s.name(), t.name());
    let mut name = base.clone();
    let mut k = 1;
    while taken.contains(&name) {
        name = format!("{base}_{k}");
        k += 1;
    }
    name
}

/// Bitmasks over `k` atoms, fewest negated atoms first.
pub(crate) fn partition_masks(k: usize) -> Vec<u64> {
    let mut masks: Vec<u64> = (0..1u64 << k).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    masks
}

/// Replaces every sharpening atom by its truth value under the partition
/// given by `negative` (bit set: the atom is in `I−`).
pub(crate) fn assign_atoms(
    f: &Formula,
    atoms: &[(Standpoint, Standpoint)],
    negative: u64,
) -> Formula {
    f.map_bottom_up(&mut |g| match &g {
        Formula::Sharper(s, t) => {
            let i = atoms
                .iter()
                .position(|(a, b)| a == s && b == t)
                .expect("atom collected from the formula");
            if negative >> i & 1 == 1 {
                Formula::Bottom
            } else {
                Formula::Top
            }
        }
        _ => g,
    })
}

/// Fresh witness propositions, one per atom, in atom order.
pub(crate) fn witness_props(f: &Formula, atoms: &[(Standpoint, Standpoint)]) -> Vec<String> {
    let mut taken: BTreeSet<String> = vocab(f).props.iter().map(|p| p.to_string()).collect();
    atoms
        .iter()
        .map(|(s, t)| {
            let name = fresh_name(s, t, &taken);
            taken.insert(name.clone());
            name
        })
        .collect()
}

/// Complete PSL satisfiability: tries every split of the sharpening atoms
/// into true (`I+`) and false (`I−`), the latter witnessed by a fresh
/// proposition true somewhere in `s` and nowhere in `t`.
pub fn psl_sat_general(f: &Formula) -> Result<Option<PslModel>, PslError> {
    require_psl(f)?;
    let atoms: Vec<(Standpoint, Standpoint)> = vocab(f).sharpening_atoms.into_iter().collect();
    let fresh = witness_props(f, &atoms);
    for negative in partition_masks(atoms.len()) {
        let mut phi1 = Vec::new();
        let mut body = vec![assign_atoms(f, &atoms, negative)];
        for (i, (s, t)) in atoms.iter().enumerate() {
            if negative >> i & 1 == 1 {
                let p = Formula::prop(&fresh[i]);
                body.push(Formula::diamond(s.clone(), p.clone()));
                body.push(Formula::not(Formula::diamond(t.clone(), p)));
            } else {
                phi1.push((s.clone(), t.clone()));
            }
        }
        phi1.push((Standpoint::Universal, Standpoint::Universal));
        let phi2 = to_nnf(&Formula::conjunction(body));
        if let Some(mut m) = psl_sat(&phi1, &phi2)? {
            for props in m.valuation.values_mut() {
                props.retain(|p| !fresh.contains(p));
            }
            return Ok(Some(m));
        }
    }
    Ok(None)
}

fn entailed_negation(conj: &[Formula]) -> bool {
    let mut pairs = Vec::new();
    let mut negated = Vec::new();
    for g in conj {
        match g {
            Formula::Sharper(s, t) => pairs.push((s.clone(), t.clone())),
            Formula::Not(inner) => {
                if let Formula::Sharper(s, t) = &**inner {
                    negated.push((s.clone(), t.clone()));
                }
            }
            _ => {}
        }
    }
    if negated.is_empty() {
        return false;
    }
    let r = SharpeningClosure::new([], &pairs);
    negated.iter().any(|(s, t)| s == t || r.holds(s, t))
}

/// Is the conjunction of `conj` PSL-satisfiable? Bypasses the cache.
pub fn standpoint_consistent_uncached(conj: &[Formula]) -> Result<bool, PslError> {
    for g in conj {
        require_psl(g)?;
    }
    if entailed_negation(conj) {
        return Ok(false);
    }
    Ok(psl_sat_general(&Formula::conjunction(conj.iter().cloned()))?.is_some())
}

fn cache() -> &'static RwLock<HashMap<Vec<Formula>, bool>> {
    static CACHE: OnceLock<RwLock<HashMap<Vec<Formula>, bool>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Is the conjunction of `conj` PSL-satisfiable? Results are cached per
/// process, keyed by the sorted, deduplicated set.
pub fn standpoint_consistent(conj: &[Formula]) -> Result<bool, PslError> {
    let mut key: Vec<Formula> = conj.to_vec();
    key.sort();
    key.dedup();
    if let Some(&v) = cache().read().expect("cache lock").get(&key) {
        return Ok(v);
    }
    let v = standpoint_consistent_uncached(&key)?;
    cache().write().expect("cache lock").insert(key, v);
    Ok(v)
}
