use std::fmt;
use std::sync::Arc;

/// A standpoint symbol. `*` is the universal standpoint.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Standpoint {
    Universal,
    Named(Arc<str>),
}

impl Standpoint {
    pub fn named(name: &str) -> Self {
        if name == "*" {
            Standpoint::Universal
        } else {
            Standpoint::Named(Arc::from(name))
        }
    }

    pub fn is_universal(&self) -> bool {
        matches!(self, Standpoint::Universal)
    }

    /// Bare name without the `@` sigil (`*` for the universal standpoint).
    pub fn name(&self) -> &str {
        match self {
            Standpoint::Universal => "*",
            Standpoint::Named(n) => n,
        }
    }
}

impl fmt::Display for Standpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@{}", self.name())
    }
}

/// Formula of standpoint LTL.
///
/// Values are built through the associated constructors, which collapse
/// double negation and identify `!true` with `false`. Derived connectives
/// (`->`, `<->`, `F`, `G`) only exist as constructors.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Top,
    Bottom,
    Prop(Arc<str>),
    Sharper(Standpoint, Standpoint),
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Diamond(Standpoint, Arc<Formula>),
    Boxed(Standpoint, Arc<Formula>),
    Next(Arc<Formula>),
    Until(Arc<Formula>, Arc<Formula>),
}

impl Formula {
    pub fn prop(name: &str) -> Self {
        Formula::Prop(Arc::from(name))
    }

    pub fn sharper(s: Standpoint, t: Standpoint) -> Self {
        Formula::Sharper(s, t)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        match f {
            Formula::Not(inner) => Arc::unwrap_or_clone(inner),
            Formula::Top => Formula::Bottom,
            Formula::Bottom => Formula::Top,
            other => Formula::Not(Arc::new(other)),
        }
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Arc::new(a), Arc::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::or(Formula::not(a), b)
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::and(
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        )
    }

    pub fn diamond(s: Standpoint, f: Formula) -> Self {
        Formula::Diamond(s, Arc::new(f))
    }

    pub fn boxed(s: Standpoint, f: Formula) -> Self {
        Formula::Boxed(s, Arc::new(f))
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Arc::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Self {
        Formula::Until(Arc::new(a), Arc::new(b))
    }

    /// `F f` as `true U f`.
    pub fn eventually(f: Formula) -> Self {
        Formula::until(Formula::Top, f)
    }

    /// `G f` as `!(true U !f)`.
    pub fn always(f: Formula) -> Self {
        Formula::not(Formula::until(Formula::Top, Formula::not(f)))
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Self {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::Top)
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn disjunction(items: impl IntoIterator<Item = Formula>) -> Self {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::Bottom)
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Top | Formula::Bottom | Formula::Prop(_) | Formula::Sharper(..) => 1,
            Formula::Not(f) | Formula::Diamond(_, f) | Formula::Boxed(_, f) | Formula::Next(f) => {
                1 + f.size()
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Top | Formula::Bottom | Formula::Prop(_) | Formula::Sharper(..) => vec![],
            Formula::Not(f) | Formula::Diamond(_, f) | Formula::Boxed(_, f) | Formula::Next(f) => {
                vec![f]
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(a, b) => vec![a, b],
        }
    }

    pub fn is_temporal(&self) -> bool {
        matches!(self, Formula::Next(_) | Formula::Until(..))
    }

    pub fn is_modal(&self) -> bool {
        matches!(self, Formula::Diamond(..) | Formula::Boxed(..))
    }

    /// True when no `X` or `U` occurs anywhere in the formula.
    pub fn is_propositional_standpoint(&self) -> bool {
        !self.is_temporal()
            && self
                .children()
                .iter()
                .all(|c| c.is_propositional_standpoint())
    }

    /// Pre-order traversal over every node (with repetitions).
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Rebuild the formula bottom-up, letting `rewrite` replace any node
    /// after its children have been rebuilt.
    pub fn map_bottom_up(&self, rewrite: &mut impl FnMut(Formula) -> Formula) -> Formula {
        let rebuilt = match self {
            Formula::Top | Formula::Bottom | Formula::Prop(_) | Formula::Sharper(..) => {
                self.clone()
            }
            Formula::Not(f) => Formula::not(f.map_bottom_up(rewrite)),
            Formula::And(a, b) => Formula::and(a.map_bottom_up(rewrite), b.map_bottom_up(rewrite)),
            Formula::Or(a, b) => Formula::or(a.map_bottom_up(rewrite), b.map_bottom_up(rewrite)),
            Formula::Diamond(s, f) => Formula::diamond(s.clone(), f.map_bottom_up(rewrite)),
            Formula::Boxed(s, f) => Formula::boxed(s.clone(), f.map_bottom_up(rewrite)),
            Formula::Next(f) => Formula::next(f.map_bottom_up(rewrite)),
            Formula::Until(a, b) => {
                Formula::until(a.map_bottom_up(rewrite), b.map_bottom_up(rewrite))
            }
        };
        rewrite(rebuilt)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn operand(f: &mut fmt::Formatter<'_>, g: &Formula) -> fmt::Result {
            match g {
                Formula::And(..) | Formula::Or(..) | Formula::Until(..) | Formula::Sharper(..) => {
                    write!(f, "({g})")
                }
                _ => write!(f, "{g}"),
            }
        }
        match self {
            Formula::Top => write!(f, "true"),
            Formula::Bottom => write!(f, "false"),
            Formula::Prop(p) => write!(f, "{p}"),
            Formula::Sharper(s, t) => write!(f, "{s} <= {t}"),
            Formula::Not(g) => {
                write!(f, "!")?;
                operand(f, g)
            }
            Formula::Diamond(s, g) => {
                write!(f, "<{s}> ")?;
                operand(f, g)
            }
            Formula::Boxed(s, g) => {
                write!(f, "[{s}] ")?;
                operand(f, g)
            }
            Formula::Next(g) => {
                write!(f, "X ")?;
                operand(f, g)
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(a, b) => {
                let op = match self {
                    Formula::And(..) => "&",
                    Formula::Or(..) => "|",
                    _ => "U",
                };
                operand(f, a)?;
                write!(f, " {op} ")?;
                operand(f, b)
            }
        }
    }
}
