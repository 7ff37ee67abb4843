//! PEPA fragment: rated prefixes, choice, cooperation and constants.
//!
//! Two semantics are provided. [`futs_step`] gives the single continuation
//! reached by label `delta_a`; [`standard_transitions`] gives the classical
//! multi-transition semantics, where the number of derivations of a
//! transition is its multiplicity.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::futs::{coarsest_bisimulation, refine_by_signature, Partition, RelationSchema, StateId};
use crate::process::{
    exploration_alphabet, reachable, Cursor, Document, Env, Explored, ParseError, Prefix, Process,
    SemanticsError, Token, MAX_UNFOLD_DEPTH,
};
use crate::semiring::{FiniteSupportFn, Rational, SemiringKind};

/// `(a, rate)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct RatedAction {
    pub action: String,
    pub rate: Rational,
}

impl RatedAction {
    pub fn new(action: impl Into<String>, rate: Rational) -> Self {
        RatedAction {
            action: action.into(),
            rate,
        }
    }
}

impl fmt::Display for RatedAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.action, self.rate)
    }
}

impl Prefix for RatedAction {
    fn action(&self) -> Option<&str> {
        Some(&self.action)
    }

    fn parse(c: &mut Cursor<'_>) -> Result<Option<Self>, ParseError> {
        let starts_prefix = *c.peek() == Token::LParen
            && matches!(c.peek_at(1), Token::Ident(_))
            && *c.peek_at(2) == Token::Comma;
        if !starts_prefix {
            return Ok(None);
        }
        c.bump();
        let action = c.expect_ident("an action")?;
        c.bump();
        let rate = c.expect_rate()?;
        c.expect(Token::RParen, "`)`")?;
        Ok(Some(RatedAction { action, rate }))
    }
}

pub type PepaTerm = Process<RatedAction>;
pub type PepaEnv = Env<RatedAction>;
pub type PepaDocument = Document<RatedAction>;

pub fn parse_pepa(text: &str) -> Result<PepaDocument, ParseError> {
    Document::parse(text)
}

/// `(a,rate).cont`
pub fn rated(action: &str, rate: Rational, cont: PepaTerm) -> PepaTerm {
    Process::prefix(RatedAction::new(action, rate), cont)
}

/// Label of action `a` in the explored FuTS.
pub fn delta_label(action: &str) -> String {
    format!("delta_{action}")
}

/// Apparent rate `r_a(P)`: the total rate at which `P` offers `a`.
pub fn apparent_rate(p: &PepaTerm, a: &str, env: &PepaEnv) -> Result<Rational, SemanticsError> {
    apparent_rate_at(p, a, env, 0)
}

fn apparent_rate_at(
    p: &PepaTerm,
    a: &str,
    env: &PepaEnv,
    depth: usize,
) -> Result<Rational, SemanticsError> {
    Ok(match p {
        Process::Nil => Rational::zero(),
        Process::Prefix(pre, _) if pre.action == a => pre.rate.clone(),
        Process::Prefix(..) => Rational::zero(),
        Process::Choice(l, r) => {
            apparent_rate_at(l, a, env, depth)?.plus(&apparent_rate_at(r, a, env, depth)?)
        }
        Process::Coop(l, r, set) => {
            let rl = apparent_rate_at(l, a, env, depth)?;
            let rr = apparent_rate_at(r, a, env, depth)?;
            if set.contains(a) {
                rl.min(rr)
            } else {
                rl.plus(&rr)
            }
        }
        Process::Const(x) => apparent_rate_at(unfold(env, x, depth)?, a, env, depth + 1)?,
    })
}

fn unfold<'a>(env: &'a PepaEnv, name: &str, depth: usize) -> Result<&'a PepaTerm, SemanticsError> {
    if depth >= MAX_UNFOLD_DEPTH {
        return Err(SemanticsError::RecursionDepthExceeded(MAX_UNFOLD_DEPTH));
    }
    env.unfold(name)
}

/// `min(x, y) / (x * y)`, or zero when either is zero.
pub fn arf(x: &Rational, y: &Rational) -> Rational {
    let prod = x.times(y);
    x.min(y).checked_div(&prod).unwrap_or_else(Rational::zero)
}

/// Apparent rate factor of two continuations, computed from their totals.
pub fn arf_semantic<K: Ord + Clone>(
    phi: &FiniteSupportFn<K, Rational>,
    psi: &FiniteSupportFn<K, Rational>,
) -> Rational {
    arf(&phi.total(), &psi.total())
}

/// The continuation of `p` under label `delta_a`.
pub fn futs_step(
    p: &PepaTerm,
    a: &str,
    env: &PepaEnv,
) -> Result<FiniteSupportFn<PepaTerm, Rational>, SemanticsError> {
    futs_step_at(p, a, env, 0)
}

fn futs_step_at(
    p: &PepaTerm,
    a: &str,
    env: &PepaEnv,
    depth: usize,
) -> Result<FiniteSupportFn<PepaTerm, Rational>, SemanticsError> {
    Ok(match p {
        Process::Nil => FiniteSupportFn::zero(),
        Process::Prefix(pre, cont) if pre.action == a => {
            FiniteSupportFn::point((**cont).clone(), pre.rate.clone())
        }
        Process::Prefix(..) => FiniteSupportFn::zero(),
        Process::Choice(l, r) => {
            futs_step_at(l, a, env, depth)?.plus(&futs_step_at(r, a, env, depth)?)
        }
        Process::Const(x) => futs_step_at(unfold(env, x, depth)?, a, env, depth + 1)?,
        Process::Coop(l, r, set) => {
            let vl = futs_step_at(l, a, env, depth)?;
            let vr = futs_step_at(r, a, env, depth)?;
            let join = |x: &PepaTerm, y: &PepaTerm| {
                Process::coop(x.clone(), y.clone(), set.iter().cloned())
            };
            if set.contains(a) {
                let factor = arf_semantic(&vl, &vr);
                if factor.is_zero() {
                    FiniteSupportFn::zero()
                } else {
                    vl.pair_product(&vr, join)?.scale(&factor)
                }
            } else {
                let left_moves =
                    vl.pair_product(&FiniteSupportFn::characteristic((**r).clone()), join)?;
                let right_moves =
                    FiniteSupportFn::characteristic((**l).clone()).pair_product(&vr, join)?;
                left_moves.plus(&right_moves)
            }
        }
    })
}

/// A transition of the standard semantics with its number of derivations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct StandardTransition {
    pub action: String,
    pub rate: Rational,
    pub target: PepaTerm,
    pub multiplicity: u64,
}

type Derivations = BTreeMap<(String, Rational, PepaTerm), u64>;

/// All transitions of `p`, one entry per distinct `(action, rate, target)`,
/// with the number of derivation trees as multiplicity.
pub fn standard_transitions(
    p: &PepaTerm,
    env: &PepaEnv,
) -> Result<Vec<StandardTransition>, SemanticsError> {
    Ok(derivations(p, env, 0)?
        .into_iter()
        .map(
            |((action, rate, target), multiplicity)| StandardTransition {
                action,
                rate,
                target,
                multiplicity,
            },
        )
        .collect())
}

fn derivations(p: &PepaTerm, env: &PepaEnv, depth: usize) -> Result<Derivations, SemanticsError> {
    let mut out = Derivations::new();
    match p {
        Process::Nil => {}
        Process::Prefix(pre, cont) => {
            out.insert((pre.action.clone(), pre.rate.clone(), (**cont).clone()), 1);
        }
        Process::Choice(l, r) => {
            out = derivations(l, env, depth)?;
            for (key, m) in derivations(r, env, depth)? {
                *out.entry(key).or_insert(0) += m;
            }
        }
        Process::Const(x) => out = derivations(unfold(env, x, depth)?, env, depth + 1)?,
        Process::Coop(l, r, set) => {
            let dl = derivations(l, env, depth)?;
            let dr = derivations(r, env, depth)?;
            let join = |x: &PepaTerm, y: &PepaTerm| {
                Process::coop(x.clone(), y.clone(), set.iter().cloned())
            };
            let mut add = |key, m| *out.entry(key).or_insert(0) += m;
            for ((a, rate, t), m) in &dl {
                if !set.contains(a) {
                    add((a.clone(), rate.clone(), join(t, r)), *m);
                }
            }
            for ((a, rate, t), m) in &dr {
                if !set.contains(a) {
                    add((a.clone(), rate.clone(), join(l, t)), *m);
                }
            }
            let mut factors: HashMap<&str, Rational> = HashMap::new();
            for ((a, r1, t1), m1) in &dl {
                if !set.contains(a) {
                    continue;
                }
                for ((b, r2, t2), m2) in &dr {
                    if a != b {
                        continue;
                    }
                    let factor = match factors.get(a.as_str()) {
                        Some(f) => f.clone(),
                        None => {
                            let f = arf(
                                &apparent_rate_at(l, a, env, depth)?,
                                &apparent_rate_at(r, a, env, depth)?,
                            );
                            factors.insert(a, f.clone());
                            f
                        }
                    };
                    add(
                        (a.clone(), factor.times(r1).times(r2), join(t1, t2)),
                        m1 * m2,
                    );
                }
            }
        }
    }
    Ok(out)
}

/// Total conditional transition rate `q[P, C, a]`.
pub fn q_rate(
    p: &PepaTerm,
    class: impl Fn(&PepaTerm) -> bool,
    a: &str,
    env: &PepaEnv,
) -> Result<Rational, SemanticsError> {
    Ok(standard_transitions(p, env)?
        .iter()
        .filter(|t| t.action == a && class(&t.target))
        .fold(Rational::zero(), |acc, t| {
            acc.plus(&t.rate.times(&Rational::from_integer(t.multiplicity)))
        }))
}

/// Explores the FuTS from `roots`: one rational relation with a label
/// `delta_a` for every action.
pub fn explore_pepa(
    roots: &[PepaTerm],
    env: &PepaEnv,
    cap: usize,
) -> Result<Explored<PepaTerm>, SemanticsError> {
    let actions = exploration_alphabet(env, roots);
    let labels: HashMap<String, String> = actions
        .iter()
        .map(|a| (delta_label(a), a.clone()))
        .collect();
    let schema = RelationSchema::new(
        1,
        actions.iter().map(|a| delta_label(a)).collect(),
        SemiringKind::Rational,
    );
    Explored::build(roots, cap, vec![schema], |_, t, label| {
        Ok(futs_step(t, &labels[label], env)?.into())
    })
}

/// The reachable part of the standard semantics.
#[derive(Debug, Clone, Serialize)]
pub struct StandardSystem {
    pub terms: Vec<PepaTerm>,
    pub transitions: Vec<Vec<StandardTransition>>,
    #[serde(skip)]
    pub index: HashMap<PepaTerm, StateId>,
}

pub fn explore_standard(
    roots: &[PepaTerm],
    env: &PepaEnv,
    cap: usize,
) -> Result<StandardSystem, SemanticsError> {
    let mut transitions = Vec::new();
    let reach = reachable(roots, cap, |_, t| {
        let ts = standard_transitions(t, env)?;
        let targets = ts.iter().map(|tr| tr.target.clone()).collect();
        transitions.push(ts);
        Ok(targets)
    })?;
    Ok(StandardSystem {
        terms: reach.terms,
        transitions,
        index: reach.index,
    })
}

/// Coarsest strong equivalence on the standard semantics: states are
/// equivalent when their rates `q[s, C, a]` agree for every class and action.
pub fn strong_equivalence_partition(system: &StandardSystem) -> Partition {
    let n = system.terms.len();
    let targets: Vec<Vec<(usize, &StandardTransition)>> = system
        .transitions
        .iter()
        .map(|ts| ts.iter().map(|t| (system.index[&t.target], t)).collect())
        .collect();
    refine_by_signature(n, |s, block_of| {
        let mut sig: BTreeMap<(&str, usize), Rational> = BTreeMap::new();
        for (t, tr) in &targets[s] {
            let contribution = tr.rate.times(&Rational::from_integer(tr.multiplicity));
            let entry = sig
                .entry((tr.action.as_str(), block_of[*t]))
                .or_insert_with(Rational::zero);
            *entry = entry.plus(&contribution);
        }
        sig
    })
    .partition
}

/// Coarsest FuTS bisimulation of the explored model, as term blocks.
pub fn futs_equivalence_blocks(
    roots: &[PepaTerm],
    env: &PepaEnv,
    cap: usize,
) -> Result<Vec<Vec<PepaTerm>>, SemanticsError> {
    let explored = explore_pepa(roots, env, cap)?;
    Ok(explored.term_blocks(&coarsest_bisimulation(&explored.model)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn parse_root(text: &str) -> (PepaEnv, PepaTerm) {
        let doc = parse_pepa(text).unwrap();
        let root = doc.root().unwrap().clone();
        (doc.env, root)
    }

    #[test]
    fn parses_prefixes_and_precedence() {
        let (_, t) = parse_root("(a,1).nil + (a,1).nil");
        let p = rated("a", q(1, 1), Process::nil());
        assert_eq!(t, Process::choice(p.clone(), p));
        let (_, t) = parse_root("(a,1).nil + (b,2).nil <a> (a,3/2).nil");
        assert!(matches!(t, Process::Coop(..)));
        assert_eq!(t.to_string(), "(a,1).nil + (b,2).nil <a> (a,3/2).nil");
    }

    #[test]
    fn rejects_bad_rates_and_guards() {
        let err = parse_pepa("(a,0).nil").unwrap_err();
        assert_eq!((err.line, err.column), (1, 4));
        assert!(parse_pepa("X := X").is_err());
        assert!(parse_pepa("X := (a,1).Y").is_err());
    }

    #[test]
    fn apparent_rate_uses_min_under_cooperation() {
        let (env, t) = parse_root("(a,2).nil <a> (a,3).nil");
        assert_eq!(apparent_rate(&t, "a", &env).unwrap(), q(2, 1));
        let (env, t) = parse_root("(a,2).nil <> (a,3).nil");
        assert_eq!(apparent_rate(&t, "a", &env).unwrap(), q(5, 1));
    }

    #[test]
    fn arf_values() {
        let phi = FiniteSupportFn::from_entries([(0, q(2, 1))]);
        let psi = FiniteSupportFn::from_entries([(1, q(1, 1)), (2, q(2, 1))]);
        assert_eq!(arf_semantic(&phi, &psi), q(1, 3));
        assert_eq!(
            arf_semantic(&phi, &FiniteSupportFn::zero()),
            Rational::zero()
        );
        assert_eq!(arf(&q(3, 7), &q(3, 7)), q(7, 3));
    }

    #[test]
    fn synchronised_step_is_scaled() {
        let (env, t) = parse_root("(a,2).nil <a> (a,3).nil");
        let target = Process::coop(Process::nil(), Process::nil(), ["a"]);
        let v = futs_step(&t, "a", &env).unwrap();
        assert_eq!(v, FiniteSupportFn::point(target.clone(), q(2, 1)));
        assert_eq!(q_rate(&t, |x| *x == target, "a", &env).unwrap(), q(2, 1));
    }

    #[test]
    fn duplicate_branches_have_multiplicity_two() {
        let (env, t) = parse_root("P := nil\n(a,1).P + (a,1).P");
        let ts = standard_transitions(&t, &env).unwrap();
        assert_eq!(ts.len(), 1);
        assert_eq!(ts[0].multiplicity, 2);
        let p = Process::constant("P");
        assert_eq!(
            futs_step(&t, "a", &env).unwrap(),
            FiniteSupportFn::point(p.clone(), q(2, 1))
        );
        assert_eq!(q_rate(&t, |x| *x == p, "a", &env).unwrap(), q(2, 1));
    }

    #[test]
    fn recursive_constant_is_one_state() {
        let (env, t) = parse_root("X := (a,1).X\nX");
        let e = explore_pepa(&[t], &env, 10).unwrap();
        assert_eq!(e.model.num_states(), 1);
        assert_eq!(
            e.model.row_by_name(1, "X", "delta_a").unwrap().get(0),
            q(1, 1).into()
        );
    }

    #[test]
    fn nil_explores_to_one_idle_state() {
        let (env, t) = parse_root("nil");
        let e = explore_pepa(&[t], &env, 10).unwrap();
        assert_eq!(e.model.num_states(), 1);
        assert!(e.model.row(0, 0, 0).is_zero());
    }

    #[test]
    fn duplication_is_not_equivalence() {
        let (env, t) = parse_root("(a,1).nil + (a,1).nil");
        let single = rated("a", q(1, 1), Process::nil());
        let sys = explore_standard(&[single.clone(), t.clone()], &env, 100).unwrap();
        let p = strong_equivalence_partition(&sys);
        assert!(!p.same_block(sys.index[&single], sys.index[&t]));
        let blocks = futs_equivalence_blocks(&[single, t], &env, 100).unwrap();
        assert_eq!(blocks, crate::process::term_blocks(&sys.terms, &p));
    }
}
