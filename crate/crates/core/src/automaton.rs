//! Generalised Büchi automaton over s-elementary sets of a closure, built
//! on the fly, with nested depth-first emptiness checking.
//!
//! A state is fixed by the truth values of its base members: propositions,
//! sharpening atoms, `X` formulas and standpoint modalities. Everything else
//! in the closure follows from them (`U` via `a U b ≡ b | (a & X(a U b))`).
//! States are generated by backtracking over base values in closure order,
//! false before true, with three-valued pruning against the requirements
//! imposed by the initial condition or the predecessor.

use std::cell::RefCell;
use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::psl::{standpoint_consistent_uncached, PslError};
use crate::syntax::{closure, ClosureSet, Formula};

/// Default cap on the number of distinct automaton states explored.
pub const DEFAULT_MAX_STATES: usize = 200_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("explored {states} automaton states, over the limit of {limit}")]
    ResourceLimit { states: usize, limit: usize },
    #[error(transparent)]
    Psl(#[from] PslError),
}

#[derive(Clone, Copy, Debug)]
enum Kind {
    Top,
    Bot,
    Base(usize),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Until { a: usize, b: usize, next: usize },
}

/// Members of one s-elementary set, as a bitmask over the closure.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SElementarySet {
    members: FixedBitSet,
}

impl SElementarySet {
    pub fn contains_index(&self, i: usize) -> bool {
        self.members.contains(i)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.ones()
    }
}

/// Accepting run `stem · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso {
    pub stem: Vec<SElementarySet>,
    pub cycle: Vec<SElementarySet>,
}

impl Lasso {
    pub fn states(&self) -> impl Iterator<Item = &SElementarySet> {
        self.stem.iter().chain(&self.cycle)
    }

    pub fn len(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub struct Automaton {
    phi: Formula,
    cl: ClosureSet,
    kinds: Vec<Kind>,
    /// Closure index of each base formula, in closure order.
    bases: Vec<usize>,
    /// Base positions whose literal enters the standpoint-consistency key.
    psl_bases: Vec<usize>,
    /// `(index of X ψ, index of ψ)` for every `X` formula in the closure.
    nexts: Vec<(usize, usize)>,
    /// `(index of a U b, index of b)` per acceptance set.
    acceptance: Vec<(usize, usize)>,
    consistent: RefCell<HashMap<Vec<bool>, bool>>,
}

impl Automaton {
    pub fn new(phi_d: &Formula) -> Self {
        let cl = closure(phi_d);
        let mut kinds = Vec::with_capacity(cl.len());
        let mut bases = Vec::new();
        let idx = |g: &Formula| cl.index_of(g).expect("closure is subformula-closed");
        for (i, g) in cl.iter() {
            kinds.push(match g {
                Formula::Top => Kind::Top,
                Formula::Bottom => Kind::Bot,
                Formula::Not(a) => Kind::Not(idx(a)),
                Formula::And(a, b) => Kind::And(idx(a), idx(b)),
                Formula::Or(a, b) => Kind::Or(idx(a), idx(b)),
                Formula::Until(a, b) => Kind::Until {
                    a: idx(a),
                    b: idx(b),
                    next: idx(&Formula::next(g.clone())),
                },
                _ => {
                    bases.push(i);
                    Kind::Base(bases.len() - 1)
                }
            });
        }
        let mut modal_props = std::collections::BTreeSet::new();
        for (_, g) in cl.iter() {
            if let Formula::Diamond(_, body) | Formula::Boxed(_, body) = g {
                body.visit(&mut |h| {
                    if let Formula::Prop(p) = h {
                        modal_props.insert(p.clone());
                    }
                });
            }
        }
        let psl_bases = bases
            .iter()
            .enumerate()
            .filter(|(_, &i)| match cl.get(i) {
                Formula::Sharper(..) | Formula::Diamond(..) | Formula::Boxed(..) => true,
                Formula::Prop(p) => modal_props.contains(p),
                _ => false,
            })
            .map(|(k, _)| k)
            .collect();
        let nexts = cl
            .iter()
            .filter_map(|(i, g)| match g {
                Formula::Next(a) => Some((i, idx(a))),
                _ => None,
            })
            .collect();
        let acceptance = cl
            .iter()
            .filter_map(|(i, g)| match g {
                Formula::Until(_, b) => Some((i, idx(b))),
                _ => None,
            })
            .collect();
        Automaton {
            phi: phi_d.clone(),
            cl,
            kinds,
            bases,
            psl_bases,
            nexts,
            acceptance,
            consistent: RefCell::new(HashMap::new()),
        }
    }

    pub fn closure(&self) -> &ClosureSet {
        &self.cl
    }

    pub fn formula(&self) -> &Formula {
        &self.phi
    }

    pub fn contains(&self, b: &SElementarySet, f: &Formula) -> bool {
        self.cl.index_of(f).is_some_and(|i| b.contains_index(i))
    }

    /// Members of `b`, in closure order.
    pub fn members<'a>(&'a self, b: &'a SElementarySet) -> impl Iterator<Item = &'a Formula> + 'a {
        b.indices().map(|i| self.cl.get(i))
    }

    /// Truth values of every closure member under a (partial) base
    /// assignment, in Kleene's three-valued logic.
    fn values(&self, assign: &[Option<bool>]) -> Vec<Option<bool>> {
        let mut v: Vec<Option<bool>> = Vec::with_capacity(self.kinds.len());
        for kind in &self.kinds {
            let x = match *kind {
                Kind::Top => Some(true),
                Kind::Bot => Some(false),
                Kind::Base(k) => assign[k],
                Kind::Not(a) => v[a].map(|b| !b),
                Kind::And(a, b) => and3(v[a], v[b]),
                Kind::Or(a, b) => or3(v[a], v[b]),
                Kind::Until { a, b, next } => {
                    let nb = self.base_value(next, assign);
                    or3(v[b], and3(v[a], nb))
                }
            };
            v.push(x);
        }
        v
    }

    fn base_value(&self, i: usize, assign: &[Option<bool>]) -> Option<bool> {
        match self.kinds[i] {
            Kind::Base(k) => assign[k],
            _ => unreachable!("X formulas are base members"),
        }
    }

    fn standpoint_consistent(&self, assign: &[Option<bool>]) -> Result<bool, PslError> {
        if self
            .psl_bases
            .iter()
            .all(|&k| matches!(self.cl.get(self.bases[k]), Formula::Prop(_)))
        {
            return Ok(true);
        }
        let key: Vec<bool> = self
            .psl_bases
            .iter()
            .map(|&k| assign[k].expect("complete assignment"))
            .collect();
        if let Some(&v) = self.consistent.borrow().get(&key) {
            return Ok(v);
        }
        let literals: Vec<Formula> = self.psl_literals(assign);
        let v = standpoint_consistent_uncached(&literals)?;
        self.consistent.borrow_mut().insert(key, v);
        Ok(v)
    }

    fn psl_literals(&self, assign: &[Option<bool>]) -> Vec<Formula> {
        self.psl_bases
            .iter()
            .map(|&k| {
                let g = self.cl.get(self.bases[k]).clone();
                if assign[k].expect("complete assignment") {
                    g
                } else {
                    Formula::not(g)
                }
            })
            .collect()
    }

    /// The PSL literals of `b` (every proposition, sharpening atom and
    /// modal member, with its polarity in `b`).
    pub fn psl_conjuncts(&self, b: &SElementarySet) -> Vec<Formula> {
        self.bases
            .iter()
            .filter(|&&i| !matches!(self.cl.get(i), Formula::Next(_)))
            .map(|&i| {
                let g = self.cl.get(i).clone();
                if b.contains_index(i) {
                    g
                } else {
                    Formula::not(g)
                }
            })
            .collect()
    }

    fn states_with(&self, requirements: Vec<(usize, bool)>) -> States<'_> {
        States {
            automaton: self,
            requirements,
            assign: vec![None; self.bases.len()],
            next_choice: vec![0; self.bases.len()],
            depth: 0,
            done: false,
        }
    }

    /// s-elementary sets containing the formula.
    pub fn initial_states(&self) -> States<'_> {
        let root = self
            .cl
            .index_of(&self.phi)
            .expect("formula is in its closure");
        self.states_with(vec![(root, true)])
    }

    /// s-elementary `b'` with `X ψ ∈ b ⇔ ψ ∈ b'` for every `X ψ`.
    pub fn successors(&self, b: &SElementarySet) -> States<'_> {
        let req = self
            .nexts
            .iter()
            .map(|&(x, inner)| (inner, b.contains_index(x)))
            .collect();
        self.states_with(req)
    }

    pub fn acceptance_count(&self) -> usize {
        self.acceptance.len()
    }

    /// Membership in the `k`-th acceptance set: `a U b ∉ B` or `b ∈ B`.
    pub fn accepts(&self, k: usize, b: &SElementarySet) -> bool {
        let (u, rhs) = self.acceptance[k];
        !b.contains_index(u) || b.contains_index(rhs)
    }

    /// The Until formula behind each acceptance set.
    pub fn acceptance_formulas(&self) -> Vec<&Formula> {
        self.acceptance
            .iter()
            .map(|&(u, _)| self.cl.get(u))
            .collect()
    }

    pub fn find_accepting_lasso(&self, max_states: usize) -> Result<Option<Lasso>, AutomatonError> {
        Search::new(self, max_states).run()
    }

    /// [`Automaton::find_accepting_lasso`] plus a text dump of the explored
    /// graph: `state <id> <acceptance flags> {members}` and `edge <a> <b>`
    /// lines.
    pub fn find_accepting_lasso_with_dump(
        &self,
        max_states: usize,
    ) -> Result<(Option<Lasso>, String), AutomatonError> {
        let mut search = Search::new(self, max_states);
        let found = search.run()?;
        Ok((found, search.dump()))
    }
}

fn and3(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    match (a, b) {
        (Some(false), _) | (_, Some(false)) => Some(false),
        (Some(true), Some(true)) => Some(true),
        _ => None,
    }
}

fn or3(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    and3(a.map(|x| !x), b.map(|x| !x)).map(|x| !x)
}

/// Lazy stream of s-elementary sets meeting fixed requirements.
pub struct States<'a> {
    automaton: &'a Automaton,
    requirements: Vec<(usize, bool)>,
    assign: Vec<Option<bool>>,
    next_choice: Vec<u8>,
    depth: usize,
    done: bool,
}

impl States<'_> {
    fn violated(&self, values: &[Option<bool>]) -> bool {
        self.requirements
            .iter()
            .any(|&(i, want)| values[i] == Some(!want))
    }

    fn step(&mut self) -> Result<Option<SElementarySet>, PslError> {
        let a = self.automaton;
        let nb = a.bases.len();
        while !self.done {
            if self.depth == nb {
                let values = a.values(&self.assign);
                // resume below this leaf on the next call
                if nb == 0 {
                    self.done = true;
                } else {
                    self.depth -= 1;
                }
                if self.violated(&values) || !a.standpoint_consistent(&self.assign)? {
                    continue;
                }
                let mut members = FixedBitSet::with_capacity(values.len());
                for (i, v) in values.iter().enumerate() {
                    if v.expect("every member is decided by the bases") {
                        members.insert(i);
                    }
                }
                return Ok(Some(SElementarySet { members }));
            }
            let d = self.depth;
            if self.next_choice[d] == 2 {
                self.next_choice[d] = 0;
                self.assign[d] = None;
                if d == 0 {
                    self.done = true;
                } else {
                    self.depth -= 1;
                }
                continue;
            }
            self.assign[d] = Some(self.next_choice[d] == 1);
            self.next_choice[d] += 1;
            if !self.violated(&a.values(&self.assign)) {
                self.depth += 1;
            }
        }
        Ok(None)
    }
}

impl Iterator for States<'_> {
    type Item = Result<SElementarySet, PslError>;

    fn next(&mut self) -> Option<Self::Item> {
        self.step().transpose()
    }
}

struct Search<'a> {
    automaton: &'a Automaton,
    max_states: usize,
    /// Number of counter values: acceptance sets, or 1 when there are none.
    k: usize,
    states: Vec<SElementarySet>,
    index: HashMap<SElementarySet, usize>,
    succ: Vec<Option<Vec<usize>>>,
}

impl<'a> Search<'a> {
    fn new(automaton: &'a Automaton, max_states: usize) -> Self {
        Search {
            automaton,
            max_states,
            k: automaton.acceptance_count().max(1),
            states: Vec::new(),
            index: HashMap::new(),
            succ: Vec::new(),
        }
    }

    fn intern(&mut self, b: SElementarySet) -> Result<usize, AutomatonError> {
        if let Some(&i) = self.index.get(&b) {
            return Ok(i);
        }
        if self.states.len() >= self.max_states {
            return Err(AutomatonError::ResourceLimit {
                states: self.states.len() + 1,
                limit: self.max_states,
            });
        }
        self.states.push(b.clone());
        self.index.insert(b, self.states.len() - 1);
        self.succ.push(None);
        Ok(self.states.len() - 1)
    }

    fn holds(&self, counter: usize, b: usize) -> bool {
        self.automaton.acceptance_count() == 0 || self.automaton.accepts(counter, &self.states[b])
    }

    fn accepting(&self, node: usize) -> bool {
        let (b, c) = (node / self.k, node % self.k);
        c == 0 && self.holds(0, b)
    }

    fn successors(&mut self, node: usize) -> Result<Vec<usize>, AutomatonError> {
        let (b, c) = (node / self.k, node % self.k);
        if self.succ[b].is_none() {
            let found: Vec<SElementarySet> = self
                .automaton
                .successors(&self.states[b])
                .collect::<Result<_, _>>()?;
            let mut ids = Vec::with_capacity(found.len());
            for s in found {
                ids.push(self.intern(s)?);
            }
            self.succ[b] = Some(ids);
        }
        let c2 = if self.holds(c, b) {
            (c + 1) % self.k
        } else {
            c
        };
        Ok(self.succ[b]
            .as_ref()
            .unwrap()
            .iter()
            .map(|&s| s * self.k + c2)
            .collect())
    }

    fn run(&mut self) -> Result<Option<Lasso>, AutomatonError> {
        let initial: Vec<SElementarySet> =
            self.automaton.initial_states().collect::<Result<_, _>>()?;
        let mut roots = Vec::new();
        for b in initial {
            roots.push(self.intern(b)? * self.k);
        }
        let mut outer_seen: HashSet<usize> = HashSet::new();
        let mut inner_seen: HashSet<usize> = HashSet::new();
        for &root in &roots {
            if !outer_seen.insert(root) {
                continue;
            }
            let mut stack: Vec<(usize, Vec<usize>, usize)> =
                vec![(root, self.successors(root)?, 0)];
            while let Some(top) = stack.last_mut() {
                if top.2 < top.1.len() {
                    let next = top.1[top.2];
                    top.2 += 1;
                    if outer_seen.insert(next) {
                        let succ = self.successors(next)?;
                        stack.push((next, succ, 0));
                    }
                    continue;
                }
                let (node, _, _) = stack.pop().unwrap();
                if self.accepting(node) && self.inner(node, &mut inner_seen)?.is_some() {
                    let explored: HashSet<usize> = outer_seen.union(&inner_seen).copied().collect();
                    let stem = self.shortest_path(&roots, node, &explored)?;
                    let succ = self.successors(node)?;
                    let back = self.shortest_path(&succ, node, &explored)?;
                    let mut cycle = vec![node];
                    cycle.extend(back);
                    return Ok(Some(self.lasso(&stem, &cycle)));
                }
            }
        }
        Ok(None)
    }

    /// Looks for a path from `seed` back to itself; returns the cycle
    /// starting at `seed`.
    fn inner(
        &mut self,
        seed: usize,
        seen: &mut HashSet<usize>,
    ) -> Result<Option<Vec<usize>>, AutomatonError> {
        let mut stack: Vec<(usize, Vec<usize>, usize)> = vec![(seed, self.successors(seed)?, 0)];
        while let Some(top) = stack.last_mut() {
            if top.2 < top.1.len() {
                let next = top.1[top.2];
                top.2 += 1;
                if next == seed {
                    return Ok(Some(stack.iter().map(|e| e.0).collect()));
                }
                if seen.insert(next) {
                    let succ = self.successors(next)?;
                    stack.push((next, succ, 0));
                }
                continue;
            }
            stack.pop();
        }
        Ok(None)
    }

    /// Breadth-first path inside `explored` from one of `sources` to just
    /// before `target`: the nodes visited, excluding `target`.
    fn shortest_path(
        &mut self,
        sources: &[usize],
        target: usize,
        explored: &HashSet<usize>,
    ) -> Result<Vec<usize>, AutomatonError> {
        let mut parent: HashMap<usize, Option<usize>> = HashMap::new();
        let mut queue = std::collections::VecDeque::new();
        for &s in sources {
            if parent.insert(s, None).is_none() {
                queue.push_back(s);
            }
        }
        while let Some(node) = queue.pop_front() {
            if node == target {
                let mut path = Vec::new();
                let mut at = parent[&node];
                while let Some(p) = at {
                    path.push(p);
                    at = parent[&p];
                }
                path.reverse();
                return Ok(path);
            }
            for next in self.successors(node)? {
                if explored.contains(&next) && !parent.contains_key(&next) {
                    parent.insert(next, Some(node));
                    queue.push_back(next);
                }
            }
        }
        unreachable!("target was reached by the depth-first search")
    }

    fn lasso(&self, stem: &[usize], cycle: &[usize]) -> Lasso {
        let state = |node: &usize| self.states[node / self.k].clone();
        Lasso {
            stem: stem.iter().map(state).collect(),
            cycle: cycle.iter().map(state).collect(),
        }
    }

    fn dump(&self) -> String {
        let a = self.automaton;
        let mut out = String::new();
        for (i, b) in self.states.iter().enumerate() {
            let flags: String = (0..a.acceptance_count())
                .map(|k| if a.accepts(k, b) { '1' } else { '0' })
                .collect();
            let members: Vec<String> = a
                .bases
                .iter()
                .filter(|&&j| b.contains_index(j))
                .map(|&j| a.cl.get(j).to_string())
                .collect();
            let _ = writeln!(out, "state {i} [{flags}] {{{}}}", members.join(", "));
        }
        for (i, succ) in self.succ.iter().enumerate() {
            for s in succ.iter().flatten() {
                let _ = writeln!(out, "edge {i} {s}");
            }
        }
        out
    }
}
