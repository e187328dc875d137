use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use super::formula::{Formula, Standpoint};

/// Negation normal form.
///
/// Negation is pushed through Booleans, `X` and the standpoint modalities.
/// With no release operator in the language, `!(a U b)` becomes
/// `(!b U (!a & !b)) | !(true U b)`; the only negations left on a
/// non-atom are therefore on eventualities `true U _`, i.e. `G` formulas.
pub fn to_nnf(f: &Formula) -> Formula {
    match f {
        Formula::Top | Formula::Bottom | Formula::Prop(_) | Formula::Sharper(..) => f.clone(),
        Formula::Not(g) => negated(g),
        Formula::And(a, b) => Formula::and(to_nnf(a), to_nnf(b)),
        Formula::Or(a, b) => Formula::or(to_nnf(a), to_nnf(b)),
        Formula::Diamond(s, g) => Formula::diamond(s.clone(), to_nnf(g)),
        Formula::Boxed(s, g) => Formula::boxed(s.clone(), to_nnf(g)),
        Formula::Next(g) => Formula::next(to_nnf(g)),
        Formula::Until(a, b) => Formula::until(to_nnf(a), to_nnf(b)),
    }
}

fn negated(f: &Formula) -> Formula {
    match f {
        Formula::Top => Formula::Bottom,
        Formula::Bottom => Formula::Top,
        Formula::Prop(_) | Formula::Sharper(..) => Formula::not(f.clone()),
        Formula::Not(g) => to_nnf(g),
        Formula::And(a, b) => Formula::or(negated(a), negated(b)),
        Formula::Or(a, b) => Formula::and(negated(a), negated(b)),
        Formula::Diamond(s, g) => Formula::boxed(s.clone(), negated(g)),
        Formula::Boxed(s, g) => Formula::diamond(s.clone(), negated(g)),
        Formula::Next(g) => Formula::next(negated(g)),
        Formula::Until(a, b) => {
            let never_b = Formula::not(Formula::until(Formula::Top, to_nnf(b)));
            if **a == Formula::Top {
                never_b
            } else {
                let not_b = negated(b);
                Formula::or(
                    Formula::until(not_b.clone(), Formula::and(negated(a), not_b)),
                    never_b,
                )
            }
        }
    }
}

/// True when negation only occurs on atoms or on `true U _`.
pub fn is_nnf(f: &Formula) -> bool {
    match f {
        Formula::Not(g) => match &**g {
            Formula::Prop(_) | Formula::Sharper(..) => true,
            Formula::Until(a, b) => **a == Formula::Top && is_nnf(b),
            _ => false,
        },
        _ => f.children().into_iter().all(is_nnf),
    }
}

/// Subformulas plus `true`/`false`, closed under single negation and
/// adding `X(a U b)` for every `a U b`.
#[derive(Clone, Debug)]
pub struct ClosureSet {
    formulas: Vec<Formula>,
    index: HashMap<Formula, usize>,
}

impl ClosureSet {
    pub fn formulas(&self) -> &[Formula] {
        &self.formulas
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn index_of(&self, f: &Formula) -> Option<usize> {
        self.index.get(f).copied()
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.index.contains_key(f)
    }

    pub fn get(&self, i: usize) -> &Formula {
        &self.formulas[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Formula)> {
        self.formulas.iter().enumerate()
    }
}

/// Closure set ordered by (size, printed form); every formula comes after
/// its proper subformulas.
pub fn closure(f: &Formula) -> ClosureSet {
    let mut set: BTreeSet<Formula> = BTreeSet::new();
    f.visit(&mut |g| {
        set.insert(g.clone());
    });
    set.insert(Formula::Top);
    set.insert(Formula::Bottom);
    let untils: Vec<Formula> = set
        .iter()
        .filter(|g| matches!(g, Formula::Until(..)))
        .cloned()
        .collect();
    for u in untils {
        set.insert(Formula::next(u));
    }
    let negations: Vec<Formula> = set.iter().map(|g| Formula::not(g.clone())).collect();
    set.extend(negations);

    let mut keyed: Vec<(usize, String, Formula)> = set
        .into_iter()
        .map(|g| (g.size(), g.to_string(), g))
        .collect();
    keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    let formulas: Vec<Formula> = keyed.into_iter().map(|(_, _, g)| g).collect();
    let index = formulas
        .iter()
        .enumerate()
        .map(|(i, g)| (g.clone(), i))
        .collect();
    ClosureSet { formulas, index }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fragment {
    /// No temporal connective.
    Psl,
    /// No standpoint connective.
    PureLtl,
    /// No temporal connective in the scope of a standpoint modality.
    LtlPsl,
    FullSltl,
}

impl Fragment {
    pub fn as_str(self) -> &'static str {
        match self {
            Fragment::Psl => "psl",
            Fragment::PureLtl => "pure-ltl",
            Fragment::LtlPsl => "ltl-psl",
            Fragment::FullSltl => "full-sltl",
        }
    }
}

impl std::fmt::Display for Fragment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Smallest fragment containing `f`. Purely propositional formulas are
/// classified as [`Fragment::Psl`].
pub fn classify(f: &Formula) -> Fragment {
    let mut temporal = false;
    let mut standpoint = false;
    f.visit(&mut |g| match g {
        Formula::Next(_) | Formula::Until(..) => temporal = true,
        Formula::Diamond(..) | Formula::Boxed(..) | Formula::Sharper(..) => standpoint = true,
        _ => {}
    });
    if !temporal {
        Fragment::Psl
    } else if !standpoint {
        Fragment::PureLtl
    } else if temporal_under_modality(f, false) {
        Fragment::FullSltl
    } else {
        Fragment::LtlPsl
    }
}

fn temporal_under_modality(f: &Formula, under: bool) -> bool {
    match f {
        Formula::Next(_) | Formula::Until(..) if under => true,
        Formula::Diamond(_, g) | Formula::Boxed(_, g) => temporal_under_modality(g, true),
        _ => f
            .children()
            .into_iter()
            .any(|c| temporal_under_modality(c, under)),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocab {
    pub props: BTreeSet<Arc<str>>,
    /// Includes `*` whenever any standpoint occurs.
    pub standpoints: BTreeSet<Standpoint>,
    pub sharpening_atoms: BTreeSet<(Standpoint, Standpoint)>,
}

pub fn vocab(f: &Formula) -> Vocab {
    let mut v = Vocab::default();
    f.visit(&mut |g| match g {
        Formula::Prop(p) => {
            v.props.insert(p.clone());
        }
        Formula::Sharper(s, t) => {
            v.standpoints.insert(s.clone());
            v.standpoints.insert(t.clone());
            v.sharpening_atoms.insert((s.clone(), t.clone()));
        }
        Formula::Diamond(s, _) | Formula::Boxed(s, _) => {
            v.standpoints.insert(s.clone());
        }
        _ => {}
    });
    if !v.standpoints.is_empty() {
        v.standpoints.insert(Standpoint::Universal);
    }
    v
}

/// Standpoints in order of first occurrence (pre-order), as written.
pub fn standpoints_in_order(f: &Formula) -> Vec<Standpoint> {
    let mut out: Vec<Standpoint> = Vec::new();
    let mut push = |s: &Standpoint| {
        if !out.contains(s) {
            out.push(s.clone());
        }
    };
    f.visit(&mut |g| match g {
        Formula::Sharper(s, t) => {
            push(s);
            push(t);
        }
        Formula::Diamond(s, _) | Formula::Boxed(s, _) => push(s),
        _ => {}
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;
    use proptest::prelude::*;

    fn f(text: &str) -> Formula {
        parse(text).unwrap()
    }

    #[test]
    fn de_morgan_and_modal_dual() {
        assert_eq!(to_nnf(&f("!(p & q)")), f("!p | !q"));
        assert_eq!(to_nnf(&f("!<@s> p")), f("[@s] !p"));
        assert_eq!(to_nnf(&f("!X [@s] p")), f("X <@s> !p"));
    }

    #[test]
    fn negated_until_avoids_release() {
        let g = to_nnf(&f("!(p U q)"));
        assert_eq!(g, f("(!q U (!p & !q)) | !(true U q)"));
        assert!(is_nnf(&g));
        assert_eq!(to_nnf(&f("G p")), f("!(true U !p)"));
    }

    #[test]
    fn closure_of_atom() {
        let cl = closure(&f("p"));
        assert_eq!(cl.len(), 4);
        for g in ["true", "false", "p", "!p"] {
            assert!(cl.contains(&f(g)), "{g}");
        }
    }

    #[test]
    fn closure_of_until_has_next_companion() {
        let cl = closure(&f("p U q"));
        assert!(cl.contains(&f("X (p U q)")));
        assert!(cl.contains(&f("!X (p U q)")));
    }

    #[test]
    fn closure_order_puts_subformulas_first() {
        let cl = closure(&f("[@s](p U X q) | !q"));
        for (i, g) in cl.iter() {
            for c in g.children() {
                assert!(cl.index_of(c).unwrap() < i);
            }
        }
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify(&f("[@*](G !malf -> test)")), Fragment::FullSltl);
        assert_eq!(classify(&f("G([@*]!malf) -> [@*]test")), Fragment::LtlPsl);
        assert_eq!(classify(&f("p U q")), Fragment::PureLtl);
        assert_eq!(classify(&f("<@s> p & @s <= @t")), Fragment::Psl);
        assert_eq!(classify(&f("p & !q")), Fragment::Psl);
        assert_eq!(classify(&f("G (@s <= @t)")), Fragment::LtlPsl);
    }

    #[test]
    fn vocab_examples() {
        let v = vocab(&f("p & <@s> q"));
        assert_eq!(
            v.props.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            ["p", "q"]
        );
        assert!(v.standpoints.contains(&Standpoint::named("s")));
        assert!(v.standpoints.contains(&Standpoint::Universal));
        let v = vocab(&f("@s <= @t"));
        assert_eq!(
            v.sharpening_atoms.into_iter().collect::<Vec<_>>(),
            [(Standpoint::named("s"), Standpoint::named("t"))]
        );
        assert!(vocab(&f("p U q")).standpoints.is_empty());
    }

    #[test]
    fn first_occurrence_order() {
        assert_eq!(
            standpoints_in_order(&f("<@b> p & [@a] q & @b <= @c")),
            vec![
                Standpoint::named("b"),
                Standpoint::named("a"),
                Standpoint::named("c")
            ]
        );
    }

    pub(crate) fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            Just(Formula::prop("p")),
            Just(Formula::prop("q")),
            Just(Formula::Top),
            Just(Formula::sharper(
                Standpoint::named("s"),
                Standpoint::named("t")
            )),
        ];
        leaf.prop_recursive(5, 30, 2, |inner| {
            let sp = prop_oneof![
                Just(Standpoint::Universal),
                Just(Standpoint::named("s")),
                Just(Standpoint::named("t"))
            ];
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                inner.clone().prop_map(Formula::next),
                (sp.clone(), inner.clone()).prop_map(|(s, g)| Formula::diamond(s, g)),
                (sp, inner.clone()).prop_map(|(s, g)| Formula::boxed(s, g)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| Formula::until(a, b)),
            ]
        })
    }

    proptest! {
        #[test]
        fn closure_invariants(g in arb_formula()) {
            let cl = closure(&g);
            prop_assert!(cl.len() <= 4 * g.size());
            prop_assert!(cl.contains(&Formula::Top) && cl.contains(&Formula::Bottom));
            for (_, h) in cl.iter() {
                prop_assert!(cl.contains(&Formula::not(h.clone())));
                if let Formula::Until(..) = h {
                    prop_assert!(cl.contains(&Formula::next(h.clone())));
                }
            }
            g.visit(&mut |h| assert!(cl.contains(h)));
        }

        #[test]
        fn print_parse_round_trip(g in arb_formula()) {
            prop_assert_eq!(parse(&g.to_string()).unwrap(), g);
        }

        #[test]
        fn nnf_shape(g in arb_formula()) {
            prop_assert!(is_nnf(&to_nnf(&g)));
        }

        #[test]
        fn erasing_temporal_operators_from_ltl_psl_gives_psl(g in arb_formula()) {
            if classify(&g) == Fragment::LtlPsl {
                let erased = g.map_bottom_up(&mut |h| match h {
                    Formula::Next(x) => (*x).clone(),
                    Formula::Until(_, b) => (*b).clone(),
                    other => other,
                });
                prop_assert_eq!(classify(&erased), Fragment::Psl);
            }
        }
    }
}
