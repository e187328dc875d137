//! Backtracking search for a model on a fixed `𝕊 × {1..n}` grid.
//!
//! A search state records, per cell, the set of NNF subformulas the cell
//! is obliged to satisfy. Literals, conjunctions and boxes are closed off
//! eagerly; diamonds then pick a witness cell and disjunctions pick a
//! side. Cells with identical row and obligations are interchangeable, so
//! diamond candidates are deduplicated on that signature and failed states
//! are remembered up to permutation of cells within a row.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use fixedbitset::FixedBitSet;

use super::model::{Cell, PslError, PslModel, SharpeningClosure};
use crate::syntax::{to_nnf, Formula, Standpoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Node {
    Top,
    Bot,
    Lit(usize, bool),
    And(usize, usize),
    Or(usize, usize),
    Dia(usize, usize),
    Box(usize, usize),
}

struct Compiled<'r> {
    closure: &'r SharpeningClosure,
    nodes: Vec<Node>,
    interned: HashMap<Node, usize>,
    props: Vec<String>,
}

impl Compiled<'_> {
    fn intern(&mut self, node: Node) -> usize {
        if let Some(&i) = self.interned.get(&node) {
            return i;
        }
        self.nodes.push(node);
        self.interned.insert(node, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    fn prop(&mut self, p: &str) -> usize {
        match self.props.iter().position(|q| q == p) {
            Some(i) => i,
            None => {
                self.props.push(p.to_string());
                self.props.len() - 1
            }
        }
    }

    fn standpoint(&self, s: &Standpoint) -> Result<usize, PslError> {
        self.closure
            .index_of(s)
            .ok_or_else(|| PslError::UnknownStandpoint(s.clone()))
    }

    fn compile(&mut self, f: &Formula) -> Result<usize, PslError> {
        let node = match f {
            Formula::Top => Node::Top,
            Formula::Bottom => Node::Bot,
            Formula::Prop(p) => Node::Lit(self.prop(p), true),
            Formula::Sharper(s, t) => {
                self.standpoint(s)?;
                self.standpoint(t)?;
                if self.closure.holds(s, t) {
                    Node::Top
                } else {
                    Node::Bot
                }
            }
            Formula::Not(g) => match &**g {
                Formula::Prop(p) => Node::Lit(self.prop(p), false),
                Formula::Sharper(..) => {
                    let atom = self.compile(g)?;
                    match self.nodes[atom] {
                        Node::Top => Node::Bot,
                        _ => Node::Top,
                    }
                }
                _ => return Err(PslError::Temporal(f.to_string())),
            },
            Formula::And(a, b) => Node::And(self.compile(a)?, self.compile(b)?),
            Formula::Or(a, b) => Node::Or(self.compile(a)?, self.compile(b)?),
            Formula::Diamond(s, g) => Node::Dia(self.standpoint(s)?, self.compile(g)?),
            Formula::Boxed(s, g) => Node::Box(self.standpoint(s)?, self.compile(g)?),
            Formula::Next(_) | Formula::Until(..) => return Err(PslError::Temporal(f.to_string())),
        };
        Ok(self.intern(node))
    }
}

struct Grid {
    nodes: Vec<Node>,
    opposite: Vec<Option<usize>>,
    rows: usize,
    n: usize,
    /// `member[s][row]`: standpoint `s` labels cells of `row`.
    member: Vec<Vec<bool>>,
    failed: HashSet<Vec<Vec<FixedBitSet>>>,
}

type State = Vec<FixedBitSet>;

impl Grid {
    fn row(&self, cell: usize) -> usize {
        cell / self.n
    }

    fn cells_of(&self, s: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.rows * self.n).filter(move |c| self.member[s][self.row(*c)])
    }

    /// Adds an obligation and closes it under the deterministic rules.
    fn add(&self, state: &mut State, cell: usize, node: usize) -> bool {
        let mut work = vec![(cell, node)];
        while let Some((c, x)) = work.pop() {
            if state[c].contains(x) {
                continue;
            }
            state[c].insert(x);
            match self.nodes[x] {
                Node::Top | Node::Or(..) | Node::Dia(..) => {}
                Node::Bot => return false,
                Node::Lit(..) => {
                    if self.opposite[x].is_some_and(|y| state[c].contains(y)) {
                        return false;
                    }
                }
                Node::And(a, b) => {
                    work.push((c, a));
                    work.push((c, b));
                }
                Node::Box(s, a) => work.extend(self.cells_of(s).map(|d| (d, a))),
            }
        }
        true
    }

    fn canonical(&self, state: &State) -> Vec<Vec<FixedBitSet>> {
        (0..self.rows)
            .map(|r| {
                let mut row: Vec<FixedBitSet> = state[r * self.n..(r + 1) * self.n].to_vec();
                row.sort_by(|a, b| a.as_slice().cmp(b.as_slice()));
                row
            })
            .collect()
    }

    fn search(&mut self, state: State) -> Option<State> {
        let key = self.canonical(&state);
        if self.failed.contains(&key) {
            return None;
        }
        let found = self.expand(state);
        if found.is_none() {
            self.failed.insert(key);
        }
        found
    }

    fn expand(&mut self, state: State) -> Option<State> {
        let cells = self.rows * self.n;
        for c in 0..cells {
            for x in state[c].ones() {
                if let Node::Dia(s, a) = self.nodes[x] {
                    if self.cells_of(s).any(|d| state[d].contains(a)) {
                        continue;
                    }
                    let mut tried: Vec<(usize, &FixedBitSet)> = Vec::new();
                    let candidates: Vec<usize> = self
                        .cells_of(s)
                        .filter(|&d| {
                            let sig = (self.row(d), &state[d]);
                            if tried.contains(&sig) {
                                false
                            } else {
                                tried.push(sig);
                                true
                            }
                        })
                        .collect();
                    for d in candidates {
                        let mut next = state.clone();
                        if self.add(&mut next, d, a) {
                            if let Some(done) = self.search(next) {
                                return Some(done);
                            }
                        }
                    }
                    return None;
                }
            }
        }
        for c in 0..cells {
            for x in state[c].ones() {
                if let Node::Or(a, b) = self.nodes[x] {
                    if state[c].contains(a) || state[c].contains(b) {
                        continue;
                    }
                    for side in [a, b] {
                        let mut next = state.clone();
                        if self.add(&mut next, c, side) {
                            if let Some(done) = self.search(next) {
                                return Some(done);
                            }
                        }
                    }
                    return None;
                }
            }
        }
        Some(state)
    }
}

/// Searches the grid `closure.family() × {1..n}` for a valuation making
/// `f` true at the designated cell `(R(*), 1)`. Sharpening atoms are read
/// off `closure`. Propositions not forced true are false.
pub fn search_grid(
    closure: &SharpeningClosure,
    n: usize,
    f: &Formula,
) -> Result<Option<PslModel>, PslError> {
    let n = n.max(1);
    let nnf = to_nnf(f);
    let mut compiled = Compiled {
        closure,
        nodes: Vec::new(),
        interned: HashMap::new(),
        props: Vec::new(),
    };
    let root = compiled.compile(&nnf)?;
    let family = closure.family();
    let rows = family.sets.len();
    let member = closure
        .universe()
        .iter()
        .map(|s| family.sets.iter().map(|set| set.contains(s)).collect())
        .collect();
    let opposite = compiled
        .nodes
        .iter()
        .map(|node| match *node {
            Node::Lit(p, b) => compiled.interned.get(&Node::Lit(p, !b)).copied(),
            _ => None,
        })
        .collect();
    let mut grid = Grid {
        nodes: compiled.nodes,
        opposite,
        rows,
        n,
        member,
        failed: HashSet::new(),
    };
    let width = grid.nodes.len();
    let mut state: State = vec![FixedBitSet::with_capacity(width); rows * n];
    if !grid.add(&mut state, family.s_star * n, root) {
        return Ok(None);
    }
    let Some(done) = grid.search(state) else {
        return Ok(None);
    };
    let mut valuation = BTreeMap::new();
    for (c, seen) in done.iter().enumerate() {
        let props: BTreeSet<String> = seen
            .ones()
            .filter_map(|x| match grid.nodes[x] {
                Node::Lit(p, true) => Some(compiled.props[p].clone()),
                _ => None,
            })
            .collect();
        valuation.insert(
            Cell {
                row: c / n,
                col: c % n + 1,
            },
            props,
        );
    }
    Ok(Some(PslModel {
        s_family: family,
        n,
        valuation,
    }))
}
