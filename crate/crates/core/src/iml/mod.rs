//! IML fragment: action prefixes, Markovian delays, choice, cooperation and
//! constants.
//!
//! The FuTS has two relations: relation 1 maps each action to a boolean
//! continuation, relation 2 has the single label `delta` and maps to a
//! rational continuation of delay rates. Only actions synchronise.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::futs::{coarsest_bisimulation, refine_by_signature, Partition, RelationSchema, StateId};
use crate::process::{
    exploration_alphabet, reachable, Cursor, Document, Env, Explored, ParseError, Prefix, Process,
    SemanticsError, Token, MAX_UNFOLD_DEPTH,
};
use crate::semiring::{FiniteSupportFn, Rational, SemiringKind};

/// The only label of the delay relation.
pub const DELAY_LABEL: &str = "delta";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ImlPrefix {
    Action(String),
    Delay(Rational),
}

impl fmt::Display for ImlPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImlPrefix::Action(a) => f.write_str(a),
            ImlPrefix::Delay(rate) => write!(f, "({rate})"),
        }
    }
}

impl Prefix for ImlPrefix {
    fn action(&self) -> Option<&str> {
        match self {
            ImlPrefix::Action(a) => Some(a),
            ImlPrefix::Delay(_) => None,
        }
    }

    fn parse(c: &mut Cursor<'_>) -> Result<Option<Self>, ParseError> {
        match (c.peek().clone(), c.peek_at(1).clone()) {
            (Token::Ident(a), Token::Dot) if a != "nil" => {
                c.bump();
                Ok(Some(ImlPrefix::Action(a)))
            }
            (Token::LParen, Token::Number(_)) => {
                c.bump();
                let rate = c.expect_rate()?;
                c.expect(Token::RParen, "`)`")?;
                Ok(Some(ImlPrefix::Delay(rate)))
            }
            _ => Ok(None),
        }
    }
}

pub type ImlTerm = Process<ImlPrefix>;
pub type ImlEnv = Env<ImlPrefix>;
pub type ImlDocument = Document<ImlPrefix>;

pub fn parse_iml(text: &str) -> Result<ImlDocument, ParseError> {
    Document::parse(text)
}

/// `a.cont`
pub fn act(action: &str, cont: ImlTerm) -> ImlTerm {
    Process::prefix(ImlPrefix::Action(action.to_string()), cont)
}

/// `(rate).cont`
pub fn delay(rate: Rational, cont: ImlTerm) -> ImlTerm {
    Process::prefix(ImlPrefix::Delay(rate), cont)
}

fn unfold<'a>(env: &'a ImlEnv, name: &str, depth: usize) -> Result<&'a ImlTerm, SemanticsError> {
    if depth >= MAX_UNFOLD_DEPTH {
        return Err(SemanticsError::RecursionDepthExceeded(MAX_UNFOLD_DEPTH));
    }
    env.unfold(name)
}

fn join(l: &ImlTerm, r: &ImlTerm, set: &BTreeSet<String>) -> ImlTerm {
    Process::coop(l.clone(), r.clone(), set.iter().cloned())
}

/// The boolean continuation of `p` under action `a`.
pub fn futs_action_step(
    p: &ImlTerm,
    a: &str,
    env: &ImlEnv,
) -> Result<FiniteSupportFn<ImlTerm, bool>, SemanticsError> {
    action_step_at(p, a, env, 0)
}

fn action_step_at(
    p: &ImlTerm,
    a: &str,
    env: &ImlEnv,
    depth: usize,
) -> Result<FiniteSupportFn<ImlTerm, bool>, SemanticsError> {
    Ok(match p {
        Process::Nil => FiniteSupportFn::zero(),
        Process::Prefix(ImlPrefix::Action(b), cont) if b == a => {
            FiniteSupportFn::characteristic((**cont).clone())
        }
        Process::Prefix(..) => FiniteSupportFn::zero(),
        Process::Choice(l, r) => {
            action_step_at(l, a, env, depth)?.plus(&action_step_at(r, a, env, depth)?)
        }
        Process::Const(x) => action_step_at(unfold(env, x, depth)?, a, env, depth + 1)?,
        Process::Coop(l, r, set) => {
            let vl = action_step_at(l, a, env, depth)?;
            let vr = action_step_at(r, a, env, depth)?;
            let pair = |x: &ImlTerm, y: &ImlTerm| join(x, y, set);
            if set.contains(a) {
                vl.pair_product(&vr, pair)?
            } else {
                vl.pair_product(&FiniteSupportFn::characteristic((**r).clone()), pair)?
                    .plus(&FiniteSupportFn::characteristic((**l).clone()).pair_product(&vr, pair)?)
            }
        }
    })
}

/// The rational continuation of `p` under the delay label.
pub fn futs_delay_step(
    p: &ImlTerm,
    env: &ImlEnv,
) -> Result<FiniteSupportFn<ImlTerm, Rational>, SemanticsError> {
    delay_step_at(p, env, 0)
}

fn delay_step_at(
    p: &ImlTerm,
    env: &ImlEnv,
    depth: usize,
) -> Result<FiniteSupportFn<ImlTerm, Rational>, SemanticsError> {
    Ok(match p {
        Process::Nil => FiniteSupportFn::zero(),
        Process::Prefix(ImlPrefix::Delay(rate), cont) => {
            FiniteSupportFn::point((**cont).clone(), rate.clone())
        }
        Process::Prefix(..) => FiniteSupportFn::zero(),
        Process::Choice(l, r) => delay_step_at(l, env, depth)?.plus(&delay_step_at(r, env, depth)?),
        Process::Const(x) => delay_step_at(unfold(env, x, depth)?, env, depth + 1)?,
        Process::Coop(l, r, set) => {
            let pair = |x: &ImlTerm, y: &ImlTerm| join(x, y, set);
            delay_step_at(l, env, depth)?
                .pair_product(&FiniteSupportFn::characteristic((**r).clone()), pair)?
                .plus(
                    &FiniteSupportFn::characteristic((**l).clone())
                        .pair_product(&delay_step_at(r, env, depth)?, pair)?,
                )
        }
    })
}

/// Action transitions `(a, target)` of the standard semantics, as a set.
pub fn standard_action_transitions(
    p: &ImlTerm,
    env: &ImlEnv,
) -> Result<BTreeSet<(String, ImlTerm)>, SemanticsError> {
    action_transitions_at(p, env, 0)
}

fn action_transitions_at(
    p: &ImlTerm,
    env: &ImlEnv,
    depth: usize,
) -> Result<BTreeSet<(String, ImlTerm)>, SemanticsError> {
    let mut out = BTreeSet::new();
    match p {
        Process::Nil | Process::Prefix(ImlPrefix::Delay(_), _) => {}
        Process::Prefix(ImlPrefix::Action(a), cont) => {
            out.insert((a.clone(), (**cont).clone()));
        }
        Process::Choice(l, r) => {
            out = action_transitions_at(l, env, depth)?;
            out.extend(action_transitions_at(r, env, depth)?);
        }
        Process::Const(x) => out = action_transitions_at(unfold(env, x, depth)?, env, depth + 1)?,
        Process::Coop(l, r, set) => {
            let tl = action_transitions_at(l, env, depth)?;
            let tr = action_transitions_at(r, env, depth)?;
            for (a, t) in &tl {
                if !set.contains(a) {
                    out.insert((a.clone(), join(t, r, set)));
                }
            }
            for (a, t) in &tr {
                if !set.contains(a) {
                    out.insert((a.clone(), join(l, t, set)));
                }
            }
            for (a, t1) in tl.iter().filter(|(a, _)| set.contains(a)) {
                for (_, t2) in tr.iter().filter(|(b, _)| b == a) {
                    out.insert((a.clone(), join(t1, t2, set)));
                }
            }
        }
    }
    Ok(out)
}

/// A Markovian transition with its number of derivations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DelayTransition {
    pub rate: Rational,
    pub target: ImlTerm,
    pub multiplicity: u64,
}

/// Delay transitions of the standard semantics, counted by derivation.
pub fn standard_delay_transitions(
    p: &ImlTerm,
    env: &ImlEnv,
) -> Result<Vec<DelayTransition>, SemanticsError> {
    Ok(delay_derivations(p, env, 0)?
        .into_iter()
        .map(|((rate, target), multiplicity)| DelayTransition {
            rate,
            target,
            multiplicity,
        })
        .collect())
}

fn delay_derivations(
    p: &ImlTerm,
    env: &ImlEnv,
    depth: usize,
) -> Result<BTreeMap<(Rational, ImlTerm), u64>, SemanticsError> {
    let mut out = BTreeMap::new();
    match p {
        Process::Nil | Process::Prefix(ImlPrefix::Action(_), _) => {}
        Process::Prefix(ImlPrefix::Delay(rate), cont) => {
            out.insert((rate.clone(), (**cont).clone()), 1);
        }
        Process::Choice(l, r) => {
            out = delay_derivations(l, env, depth)?;
            for (key, m) in delay_derivations(r, env, depth)? {
                *out.entry(key).or_insert(0) += m;
            }
        }
        Process::Const(x) => out = delay_derivations(unfold(env, x, depth)?, env, depth + 1)?,
        Process::Coop(l, r, set) => {
            for ((rate, t), m) in delay_derivations(l, env, depth)? {
                *out.entry((rate, join(&t, r, set))).or_insert(0) += m;
            }
            for ((rate, t), m) in delay_derivations(r, env, depth)? {
                *out.entry((rate, join(l, &t, set))).or_insert(0) += m;
            }
        }
    }
    Ok(out)
}

/// `T(P, a, C)`: whether `p` has an `a`-transition into the class.
pub fn t_fn(
    p: &ImlTerm,
    a: &str,
    class: impl Fn(&ImlTerm) -> bool,
    env: &ImlEnv,
) -> Result<bool, SemanticsError> {
    Ok(standard_action_transitions(p, env)?
        .iter()
        .any(|(b, t)| b == a && class(t)))
}

/// `R(P, C)`: the cumulative delay rate from `p` into the class.
pub fn r_fn(
    p: &ImlTerm,
    class: impl Fn(&ImlTerm) -> bool,
    env: &ImlEnv,
) -> Result<Rational, SemanticsError> {
    Ok(standard_delay_transitions(p, env)?
        .iter()
        .filter(|t| class(&t.target))
        .fold(Rational::zero(), |acc, t| {
            acc.plus(&t.rate.times(&Rational::from_integer(t.multiplicity)))
        }))
}

/// Explores the two-relation FuTS from `roots`.
pub fn explore_iml(
    roots: &[ImlTerm],
    env: &ImlEnv,
    cap: usize,
) -> Result<Explored<ImlTerm>, SemanticsError> {
    let actions = exploration_alphabet(env, roots);
    let schemas = vec![
        RelationSchema::new(1, actions, SemiringKind::Boolean),
        RelationSchema::new(2, vec![DELAY_LABEL.to_string()], SemiringKind::Rational),
    ];
    Explored::build(roots, cap, schemas, |schema, t, label| {
        Ok(if schema.index == 1 {
            futs_action_step(t, label, env)?.into()
        } else {
            futs_delay_step(t, env)?.into()
        })
    })
}

/// The reachable part of the standard semantics.
#[derive(Debug, Clone, Serialize)]
pub struct StandardSystem {
    pub terms: Vec<ImlTerm>,
    pub actions: Vec<BTreeSet<(String, ImlTerm)>>,
    pub delays: Vec<Vec<DelayTransition>>,
    #[serde(skip)]
    pub index: HashMap<ImlTerm, StateId>,
}

pub fn explore_standard(
    roots: &[ImlTerm],
    env: &ImlEnv,
    cap: usize,
) -> Result<StandardSystem, SemanticsError> {
    let mut actions = Vec::new();
    let mut delays = Vec::new();
    let reach = reachable(roots, cap, |_, t| {
        let acts = standard_action_transitions(t, env)?;
        let dels = standard_delay_transitions(t, env)?;
        let mut targets: Vec<ImlTerm> = acts.iter().map(|(_, t)| t.clone()).collect();
        targets.extend(dels.iter().map(|d| d.target.clone()));
        actions.push(acts);
        delays.push(dels);
        Ok(targets)
    })?;
    Ok(StandardSystem {
        terms: reach.terms,
        actions,
        delays,
        index: reach.index,
    })
}

/// Coarsest strong bisimulation on the standard semantics: equivalent
/// states agree on `T(s, a, C)` for every action and class and on `R(s, C)`
/// for every class.
pub fn strong_bisimulation_partition(system: &StandardSystem) -> Partition {
    let n = system.terms.len();
    refine_by_signature(n, |s, block_of| {
        let can: BTreeSet<(&str, usize)> = system.actions[s]
            .iter()
            .map(|(a, t)| (a.as_str(), block_of[system.index[t]]))
            .collect();
        let mut rates: BTreeMap<usize, Rational> = BTreeMap::new();
        for d in &system.delays[s] {
            let entry = rates
                .entry(block_of[system.index[&d.target]])
                .or_insert_with(Rational::zero);
            *entry = entry.plus(&d.rate.times(&Rational::from_integer(d.multiplicity)));
        }
        (can, rates)
    })
    .partition
}

/// Coarsest FuTS bisimulation of the explored model, as term blocks.
pub fn futs_equivalence_blocks(
    roots: &[ImlTerm],
    env: &ImlEnv,
    cap: usize,
) -> Result<Vec<Vec<ImlTerm>>, SemanticsError> {
    let explored = explore_iml(roots, env, cap)?;
    Ok(explored.term_blocks(&coarsest_bisimulation(&explored.model)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::SemiringValue;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn parse_root(text: &str) -> (ImlEnv, ImlTerm) {
        let doc = parse_iml(text).unwrap();
        let root = doc.root().unwrap().clone();
        (doc.env, root)
    }

    #[test]
    fn parses_both_prefixes() {
        let (env, t) = parse_root("X := a.(1/1).b.X\na.(1).b.X");
        assert_eq!(env.definitions().len(), 1);
        assert_eq!(
            t,
            act("a", delay(q(1, 1), act("b", Process::constant("X"))))
        );
        assert_eq!(t.to_string(), "a.(1).b.X");
        let err = parse_iml("(0).nil").unwrap_err();
        assert_eq!((err.line, err.column), (1, 2));
    }

    #[test]
    fn prefixes_only_fire_in_their_relation() {
        let (env, t) = parse_root("a.nil");
        assert_eq!(
            futs_action_step(&t, "a", &env).unwrap(),
            FiniteSupportFn::characteristic(Process::nil())
        );
        assert!(futs_delay_step(&t, &env).unwrap().is_zero());
        let (env, t) = parse_root("(2).nil");
        assert!(futs_action_step(&t, "a", &env).unwrap().is_zero());
        assert_eq!(
            futs_delay_step(&t, &env).unwrap(),
            FiniteSupportFn::point(Process::nil(), q(2, 1))
        );
    }

    #[test]
    fn delays_never_synchronise() {
        let (env, t) = parse_root("(1).nil <a> (2).nil");
        assert_eq!(futs_delay_step(&t, &env).unwrap().len(), 2);
        let (env, t) = parse_root("a.nil <a> b.nil");
        assert!(futs_action_step(&t, "a", &env).unwrap().is_zero());
    }

    #[test]
    fn set_versus_multiset() {
        let (env, t) = parse_root("a.nil + a.nil");
        assert_eq!(standard_action_transitions(&t, &env).unwrap().len(), 1);
        let (env, t) = parse_root("(1).nil + (1).nil");
        let d = standard_delay_transitions(&t, &env).unwrap();
        assert_eq!(
            d,
            vec![DelayTransition {
                rate: q(1, 1),
                target: Process::nil(),
                multiplicity: 2
            }]
        );
        assert_eq!(r_fn(&t, |x| *x == Process::nil(), &env).unwrap(), q(2, 1));
        assert!(!t_fn(&t, "a", |_| true, &env).unwrap());
    }

    #[test]
    fn mixed_prefixes_coexist_on_one_state() {
        let (env, t) = parse_root("a.(1).nil + (2).b.nil");
        let e = explore_iml(std::slice::from_ref(&t), &env, 100).unwrap();
        let s = e.state_of(&t).unwrap();
        assert!(!e.model.row(0, s, 0).is_zero());
        assert_eq!(e.model.row(1, s, 0).total(), SemiringValue::from(q(2, 1)));
    }

    #[test]
    fn duplication_on_each_side() {
        let (env, _) = parse_root("nil");
        let one = act("a", Process::nil());
        let two = Process::choice(one.clone(), one.clone());
        let sys = explore_standard(&[one.clone(), two.clone()], &env, 100).unwrap();
        assert!(strong_bisimulation_partition(&sys).same_block(sys.index[&one], sys.index[&two]));

        let one = delay(q(1, 1), Process::nil());
        let two = Process::choice(one.clone(), one.clone());
        let sys = explore_standard(&[one.clone(), two.clone()], &env, 100).unwrap();
        let p = strong_bisimulation_partition(&sys);
        assert!(!p.same_block(sys.index[&one], sys.index[&two]));
        assert_eq!(
            futs_equivalence_blocks(&[one, two], &env, 100).unwrap(),
            crate::process::term_blocks(&sys.terms, &p)
        );
    }
}
