use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{Formula, Standpoint};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PslError {
    #[error("temporal operator in a PSL position: {0}")]
    Temporal(String),
    #[error("standpoint {0} is outside the model's universe")]
    UnknownStandpoint(Standpoint),
    #[error("cell {0} is not on the grid")]
    UnknownCell(Cell),
    #[error("malformed PSL witness: {0}")]
    Malformed(String),
}

/// Reflexive-transitive closure of the sharpening pairs together with
/// `(s, *)` for every standpoint of the universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SharpeningClosure {
    universe: Vec<Standpoint>,
    reach: Vec<Vec<bool>>,
}

impl SharpeningClosure {
    pub fn new(
        standpoints: impl IntoIterator<Item = Standpoint>,
        pairs: &[(Standpoint, Standpoint)],
    ) -> Self {
        let mut universe: BTreeSet<Standpoint> = standpoints.into_iter().collect();
        universe.insert(Standpoint::Universal);
        for (s, t) in pairs {
            universe.insert(s.clone());
            universe.insert(t.clone());
        }
        let universe: Vec<Standpoint> = universe.into_iter().collect();
        let n = universe.len();
        let idx = |s: &Standpoint| universe.iter().position(|u| u == s).unwrap();
        let star = idx(&Standpoint::Universal);
        let mut reach = vec![vec![false; n]; n];
        for (i, row) in reach.iter_mut().enumerate() {
            row[i] = true;
            row[star] = true;
        }
        for (s, t) in pairs {
            reach[idx(s)][idx(t)] = true;
        }
        for k in 0..n {
            let via = reach[k].clone();
            for row in reach.iter_mut().filter(|row| row[k]) {
                for (cell, &r) in row.iter_mut().zip(&via) {
                    *cell |= r;
                }
            }
        }
        SharpeningClosure { universe, reach }
    }

    pub fn universe(&self) -> &[Standpoint] {
        &self.universe
    }

    pub fn index_of(&self, s: &Standpoint) -> Option<usize> {
        self.universe.iter().position(|u| u == s)
    }

    /// `(s, t) ∈ R`; false when either side is outside the universe.
    pub fn holds(&self, s: &Standpoint, t: &Standpoint) -> bool {
        match (self.index_of(s), self.index_of(t)) {
            (Some(i), Some(j)) => self.reach[i][j],
            _ => false,
        }
    }

    /// `R(s) = { t | (s, t) ∈ R }`.
    pub fn image(&self, s: &Standpoint) -> BTreeSet<Standpoint> {
        let Some(i) = self.index_of(s) else {
            return BTreeSet::new();
        };
        self.universe
            .iter()
            .enumerate()
            .filter(|(j, _)| self.reach[i][*j])
            .map(|(_, t)| t.clone())
            .collect()
    }

    /// The distinct images `R(s)`, sorted by size and then elementwise.
    pub fn family(&self) -> SFamily {
        let mut sets: Vec<BTreeSet<Standpoint>> = Vec::new();
        for s in &self.universe {
            let image = self.image(s);
            if !sets.contains(&image) {
                sets.push(image);
            }
        }
        sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let star = self.image(&Standpoint::Universal);
        let s_star = sets.iter().position(|s| *s == star).unwrap();
        SFamily { sets, s_star }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SFamily {
    pub sets: Vec<BTreeSet<Standpoint>>,
    /// Index of `R(*)` in `sets`.
    pub s_star: usize,
}

/// Grid cell `(S, j)`: `row` indexes the family, `col` runs over `1..=n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.row, self.col)
    }
}

impl std::str::FromStr for Cell {
    type Err = PslError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PslError::Malformed(format!("cell key {s:?}"));
        let (r, c) = s.split_once(',').ok_or_else(bad)?;
        Ok(Cell {
            row: r.trim().parse().map_err(|_| bad())?,
            col: c.trim().parse().map_err(|_| bad())?,
        })
    }
}

/// PSL model on the precisifications `𝕊 × {1..n}`; cell `(S, j)` carries
/// exactly the standpoints in `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PslModel {
    pub s_family: SFamily,
    pub n: usize,
    pub valuation: BTreeMap<Cell, BTreeSet<String>>,
}

impl PslModel {
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.s_family.sets.len())
            .flat_map(move |row| (1..=self.n).map(move |col| Cell { row, col }))
    }

    pub fn designated(&self) -> Cell {
        Cell {
            row: self.s_family.s_star,
            col: 1,
        }
    }

    pub fn label(&self, cell: Cell) -> &BTreeSet<Standpoint> {
        &self.s_family.sets[cell.row]
    }

    pub fn holds(&self, cell: Cell, prop: &str) -> bool {
        self.valuation.get(&cell).is_some_and(|v| v.contains(prop))
    }

    fn contains(&self, cell: Cell) -> bool {
        cell.row < self.s_family.sets.len() && (1..=self.n).contains(&cell.col)
    }

    fn known(&self, s: &Standpoint) -> Result<(), PslError> {
        if s.is_universal() || self.s_family.sets.iter().any(|set| set.contains(s)) {
            Ok(())
        } else {
            Err(PslError::UnknownStandpoint(s.clone()))
        }
    }

    /// Cells whose label contains `s`; every cell for `*`.
    pub fn extension(&self, s: &Standpoint) -> Vec<Cell> {
        self.cells()
            .filter(|c| s.is_universal() || self.label(*c).contains(s))
            .collect()
    }

    pub fn eval(&self, cell: Cell, f: &Formula) -> Result<bool, PslError> {
        if !self.contains(cell) {
            return Err(PslError::UnknownCell(cell));
        }
        self.eval_at(cell, f)
    }

    fn eval_at(&self, cell: Cell, f: &Formula) -> Result<bool, PslError> {
        Ok(match f {
            Formula::Top => true,
            Formula::Bottom => false,
            Formula::Prop(p) => self.holds(cell, p),
            Formula::Not(g) => !self.eval_at(cell, g)?,
            Formula::And(a, b) => self.eval_at(cell, a)? && self.eval_at(cell, b)?,
            Formula::Or(a, b) => self.eval_at(cell, a)? || self.eval_at(cell, b)?,
            Formula::Sharper(s, t) => {
                self.known(s)?;
                self.known(t)?;
                let inner = self.extension(t);
                self.extension(s).iter().all(|c| inner.contains(c))
            }
            Formula::Diamond(s, g) => {
                self.known(s)?;
                let mut any = false;
                for c in self.extension(s) {
                    if self.eval_at(c, g)? {
                        any = true;
                        break;
                    }
                }
                any
            }
            Formula::Boxed(s, g) => {
                self.known(s)?;
                let mut all = true;
                for c in self.extension(s) {
                    if !self.eval_at(c, g)? {
                        all = false;
                        break;
                    }
                }
                all
            }
            Formula::Next(_) | Formula::Until(..) => return Err(PslError::Temporal(f.to_string())),
        })
    }

    pub fn to_witness(&self) -> PslWitnessFile {
        PslWitnessFile {
            s_family: self
                .s_family
                .sets
                .iter()
                .map(|set| set.iter().map(|s| s.to_string()).collect())
                .collect(),
            n: self.n,
            valuation: self
                .valuation
                .iter()
                .filter(|(_, v)| !v.is_empty())
                .map(|(c, v)| (c.to_string(), v.iter().cloned().collect()))
                .collect(),
            designated: self.designated().to_string(),
        }
    }

    pub fn from_witness(w: &PslWitnessFile) -> Result<Self, PslError> {
        let mut sets = Vec::new();
        for names in &w.s_family {
            let mut set = BTreeSet::new();
            for name in names {
                let s = name
                    .strip_prefix('@')
                    .filter(|n| !n.is_empty())
                    .ok_or_else(|| PslError::Malformed(format!("standpoint {name:?}")))?;
                set.insert(Standpoint::named(s));
            }
            sets.push(set);
        }
        let designated: Cell = w.designated.parse()?;
        if designated.col != 1 || designated.row >= sets.len() {
            return Err(PslError::Malformed(format!(
                "designated cell {designated} is not (S*, 1)"
            )));
        }
        let mut valuation = BTreeMap::new();
        for (key, props) in &w.valuation {
            let cell: Cell = key.parse()?;
            valuation.insert(cell, props.iter().cloned().collect());
        }
        let model = PslModel {
            s_family: SFamily {
                sets,
                s_star: designated.row,
            },
            n: w.n,
            valuation,
        };
        if let Some(c) = model.valuation.keys().find(|c| !model.contains(**c)) {
            return Err(PslError::UnknownCell(*c));
        }
        Ok(model)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PslWitnessFile {
    pub s_family: Vec<Vec<String>>,
    pub n: usize,
    pub valuation: BTreeMap<String, Vec<String>>,
    pub designated: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn sp(name: &str) -> Standpoint {
        Standpoint::named(name)
    }

    #[test]
    fn closure_is_reflexive_transitive_and_reaches_star() {
        let r = SharpeningClosure::new([], &[(sp("a"), sp("b")), (sp("b"), sp("c"))]);
        assert!(r.holds(&sp("a"), &sp("c")));
        assert!(r.holds(&sp("c"), &sp("c")));
        assert!(r.holds(&sp("a"), &Standpoint::Universal));
        assert!(!r.holds(&sp("c"), &sp("a")));
        let fam = r.family();
        assert_eq!(fam.sets.len(), 4);
        assert_eq!(fam.sets[fam.s_star], [Standpoint::Universal].into());
        assert!(fam.sets.iter().all(|s| s.contains(&Standpoint::Universal)));
    }

    fn two_row_model(p_at_s: bool) -> PslModel {
        let r = SharpeningClosure::new([sp("s")], &[]);
        let mut valuation = BTreeMap::new();
        if p_at_s {
            valuation.insert(Cell { row: 1, col: 1 }, ["p".to_string()].into());
        }
        PslModel {
            s_family: r.family(),
            n: 1,
            valuation,
        }
    }

    #[test]
    fn box_over_single_s_cell() {
        // 𝕊 = {{*}, {*, s}}, N = 1: [@s] p holds iff p holds at ({*,s}, 1)
        let f = parse("[@s] p").unwrap();
        for p in [false, true] {
            let m = two_row_model(p);
            assert_eq!(m.s_family.sets[1], [Standpoint::Universal, sp("s")].into());
            for c in m.cells().collect::<Vec<_>>() {
                assert_eq!(m.eval(c, &f).unwrap(), p);
            }
        }
    }

    #[test]
    fn single_cell_diamond_star() {
        let r = SharpeningClosure::new([], &[]);
        let m = PslModel {
            s_family: r.family(),
            n: 1,
            valuation: [(Cell { row: 0, col: 1 }, ["p".to_string()].into())].into(),
        };
        assert!(m.eval(m.designated(), &parse("<> p").unwrap()).unwrap());
    }

    #[test]
    fn eval_errors() {
        let m = two_row_model(true);
        assert!(matches!(
            m.eval(m.designated(), &parse("X p").unwrap()),
            Err(PslError::Temporal(_))
        ));
        assert_eq!(
            m.eval(m.designated(), &parse("<@q> p").unwrap()),
            Err(PslError::UnknownStandpoint(sp("q")))
        );
        assert!(m.eval(Cell { row: 5, col: 1 }, &Formula::Top).is_err());
    }

    #[test]
    fn witness_json() {
        let mut m = two_row_model(false);
        m.n = 3;
        m.valuation
            .insert(Cell { row: 0, col: 1 }, ["p".to_string()].into());
        let text = serde_json::to_string(&m.to_witness()).unwrap();
        assert_eq!(
            text,
            r#"{"s_family":[["@*"],["@*","@s"]],"n":3,"valuation":{"0,1":["p"]},"designated":"0,1"}"#
        );
        let back: PslWitnessFile = serde_json::from_str(&text).unwrap();
        assert_eq!(PslModel::from_witness(&back).unwrap(), m);
    }
}
