#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sltl::syntax::{closure, to_nnf, vocab, Formula, Standpoint};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sp(name: &str) -> Standpoint {
    Standpoint::named(name)
}

/// Knobs for the random formula generator.
#[derive(Clone, Copy)]
pub struct Gen {
    pub props: &'static [&'static str],
    pub standpoints: &'static [&'static str],
    /// Allow `<@*>`/`[@*]` as well as the named standpoints.
    pub star: bool,
    /// Maximum number of sharpening atom occurrences.
    pub atoms: usize,
    pub temporal: bool,
    /// Temporal operators allowed inside modalities.
    pub temporal_under_modality: bool,
    pub modal: bool,
}

pub const LTL_PSL: Gen = Gen {
    props: &["p", "q"],
    standpoints: &["s", "t"],
    star: true,
    atoms: 1,
    temporal: true,
    temporal_under_modality: false,
    modal: true,
};

pub const PSL: Gen = Gen {
    props: &["p", "q"],
    standpoints: &["s", "t"],
    star: true,
    atoms: 2,
    temporal: false,
    temporal_under_modality: false,
    modal: true,
};

pub const PTLS5: Gen = Gen {
    props: &["p", "q"],
    standpoints: &[],
    star: true,
    atoms: 0,
    temporal: true,
    temporal_under_modality: true,
    modal: true,
};

pub const FULL: Gen = Gen {
    props: &["p", "q"],
    standpoints: &["s", "t"],
    star: true,
    atoms: 1,
    temporal: true,
    temporal_under_modality: true,
    modal: true,
};

struct Builder<'r> {
    rng: &'r mut ChaCha8Rng,
    cfg: Gen,
    atoms_left: usize,
}

impl Builder<'_> {
    fn standpoint(&mut self) -> Standpoint {
        let mut choices: Vec<Standpoint> = self.cfg.standpoints.iter().map(|s| sp(s)).collect();
        if self.cfg.star || choices.is_empty() {
            choices.push(Standpoint::Universal);
        }
        choices.choose(self.rng).unwrap().clone()
    }

    fn leaf(&mut self) -> Formula {
        if self.atoms_left > 0 && !self.cfg.standpoints.is_empty() && self.rng.gen_bool(0.15) {
            self.atoms_left -= 1;
            let a = self.standpoint();
            let b = self.standpoint();
            return Formula::sharper(a, b);
        }
        match self.rng.gen_range(0..12) {
            0 => Formula::Top,
            1 => Formula::Bottom,
            _ => Formula::prop(self.cfg.props.choose(self.rng).unwrap()),
        }
    }

    fn build(&mut self, depth: usize, under_modality: bool) -> Formula {
        if depth <= 1 || self.rng.gen_bool(0.2) {
            return self.leaf();
        }
        let temporal = self.cfg.temporal && (!under_modality || self.cfg.temporal_under_modality);
        let mut ops = vec!["not", "and", "or"];
        if temporal {
            ops.extend(["next", "until", "until"]);
        }
        if self.cfg.modal {
            ops.extend(["dia", "box"]);
        }
        let d = depth - 1;
        match *ops.choose(self.rng).unwrap() {
            "not" => Formula::not(self.build(d, under_modality)),
            "and" => Formula::and(self.build(d, under_modality), self.build(d, under_modality)),
            "or" => Formula::or(self.build(d, under_modality), self.build(d, under_modality)),
            "next" => Formula::next(self.build(d, under_modality)),
            "until" => Formula::until(self.build(d, under_modality), self.build(d, under_modality)),
            "dia" => {
                let s = self.standpoint();
                Formula::diamond(s, self.build(d, true))
            }
            _ => {
                let s = self.standpoint();
                Formula::boxed(s, self.build(d, true))
            }
        }
    }
}

pub fn depth(f: &Formula) -> usize {
    1 + f.children().into_iter().map(depth).max().unwrap_or(0)
}

pub fn random_formula(rng: &mut ChaCha8Rng, cfg: Gen, max_depth: usize) -> Formula {
    let mut b = Builder {
        rng,
        cfg,
        atoms_left: cfg.atoms,
    };
    b.build(max_depth, false)
}

/// `count` distinct formulas of AST depth at most `max_depth` that are not
/// constants.
pub fn corpus(seed: u64, cfg: Gen, max_depth: usize, count: usize) -> Vec<Formula> {
    let mut rng = rng(seed);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    while out.len() < count {
        let f = random_formula(&mut rng, cfg, max_depth);
        if matches!(f, Formula::Top | Formula::Bottom) || depth(&f) > max_depth {
            continue;
        }
        if seen.insert(f.clone()) {
            out.push(f);
        }
    }
    out
}

/// Distinct images `R(s)` of the reflexive-transitive closure of `pairs`
/// plus `(s, *)`, computed by plain reachability.
pub fn reference_family(
    universe: &BTreeSet<Standpoint>,
    pairs: &[(Standpoint, Standpoint)],
) -> (Vec<BTreeSet<Standpoint>>, BTreeSet<Standpoint>) {
    let mut universe = universe.clone();
    universe.insert(Standpoint::Universal);
    for (a, b) in pairs {
        universe.insert(a.clone());
        universe.insert(b.clone());
    }
    let image = |s: &Standpoint| -> BTreeSet<Standpoint> {
        let mut reached: BTreeSet<Standpoint> = [s.clone(), Standpoint::Universal].into();
        let mut frontier = vec![s.clone(), Standpoint::Universal];
        while let Some(x) = frontier.pop() {
            for (a, b) in pairs {
                if *a == x && reached.insert(b.clone()) {
                    frontier.push(b.clone());
                }
            }
        }
        reached
    };
    let mut family: Vec<BTreeSet<Standpoint>> = Vec::new();
    for s in &universe {
        let i = image(s);
        if !family.contains(&i) {
            family.push(i);
        }
    }
    (family, image(&Standpoint::Universal))
}

/// Number of diamonds in the negation normal form.
pub fn nnf_diamonds(f: &Formula) -> usize {
    let mut n = 0;
    to_nnf(f).visit(&mut |g| n += matches!(g, Formula::Diamond(..)) as usize);
    n
}

/// Standpoints of `f` together with `*`.
pub fn standpoints_with_star(f: &Formula) -> BTreeSet<Standpoint> {
    let mut s = vocab(f).standpoints;
    s.insert(Standpoint::Universal);
    s
}

/// Modal formulas (`<@s> _` or `[@s] _`) in the closure of `f`.
pub fn modal_closure_formulas(f: &Formula) -> usize {
    closure(f)
        .formulas()
        .iter()
        .filter(|g| matches!(g, Formula::Diamond(..) | Formula::Boxed(..)))
        .count()
}
