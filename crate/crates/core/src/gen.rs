//! Seeded random generators for terms, raw models and semiring functions.
//!
//! Terms are closed and guarded. Operators are drawn with weights
//! choice:prefix:cooperation = 3:3:1; leaves sit at the depth bound. Up to
//! two constants are defined, with cooperation-free bodies so that state
//! spaces stay finite; the root may cooperate freely.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::futs::{Continuation, FutsError, FutsModel, RelationSchema};
use crate::iml::ImlPrefix;
use crate::pepa::RatedAction;
use crate::process::{ActionSet, Document, Env, Prefix, Process};
use crate::semiring::{FiniteSupportFn, Rational, Semiring, SemiringKind, SemiringValue};

pub const ACTIONS: [&str; 3] = ["a", "b", "c"];

/// Rates as `(numerator, denominator)`.
pub const RATE_POOL: [(i64, i64); 5] = [(1, 1), (2, 1), (3, 1), (1, 2), (3, 2)];

const CONSTANT_NAMES: [&str; 2] = ["X", "Y"];

/// The generator used everywhere a seed is accepted.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_action(rng: &mut impl Rng) -> String {
    ACTIONS[rng.gen_range(0..ACTIONS.len())].to_string()
}

fn random_rate(rng: &mut impl Rng) -> Rational {
    let (n, d) = RATE_POOL[rng.gen_range(0..RATE_POOL.len())];
    Rational::new(n, d).expect("pool rates are valid")
}

/// Prefixes that can be drawn at random.
pub trait RandomPrefix: Prefix {
    fn random(rng: &mut impl Rng) -> Self;
}

impl RandomPrefix for RatedAction {
    fn random(rng: &mut impl Rng) -> Self {
        let action = random_action(rng);
        RatedAction::new(action, random_rate(rng))
    }
}

impl RandomPrefix for ImlPrefix {
    fn random(rng: &mut impl Rng) -> Self {
        if rng.gen_bool(0.5) {
            ImlPrefix::Action(random_action(rng))
        } else {
            ImlPrefix::Delay(random_rate(rng))
        }
    }
}

fn random_coopset(rng: &mut impl Rng) -> ActionSet {
    ACTIONS
        .iter()
        .filter(|_| rng.gen_bool(0.5))
        .map(|a| a.to_string())
        .collect()
}

fn leaf<P: RandomPrefix>(rng: &mut impl Rng, constants: &[&str]) -> Process<P> {
    if !constants.is_empty() && rng.gen_bool(0.5) {
        Process::constant(*constants.choose(rng).expect("non-empty"))
    } else {
        Process::nil()
    }
}

fn term<P: RandomPrefix>(
    rng: &mut impl Rng,
    depth: usize,
    constants: &[&str],
    coop: bool,
) -> Process<P> {
    if depth <= 1 {
        return leaf(rng, constants);
    }
    let total = if coop { 7 } else { 6 };
    match rng.gen_range(0..total) {
        0..=2 => Process::choice(
            term(rng, depth - 1, constants, coop),
            term(rng, depth - 1, constants, coop),
        ),
        3..=5 => Process::prefix(P::random(rng), term(rng, depth - 1, constants, coop)),
        _ => {
            let left = term(rng, depth - 1, constants, coop);
            let right = term(rng, depth - 1, constants, coop);
            Process::coop(left, right, random_coopset(rng))
        }
    }
}

/// A body whose every constant sits under a prefix.
fn guarded_body<P: RandomPrefix>(
    rng: &mut impl Rng,
    depth: usize,
    constants: &[&str],
) -> Process<P> {
    if depth > 2 && rng.gen_bool(0.5) {
        Process::choice(
            guarded_body(rng, depth - 1, constants),
            guarded_body(rng, depth - 1, constants),
        )
    } else {
        Process::prefix(
            P::random(rng),
            term(rng, depth.saturating_sub(1), constants, false),
        )
    }
}

/// A closed, guarded document with a root expression of depth at most `depth`.
pub fn random_document<P: RandomPrefix>(rng: &mut impl Rng, depth: usize) -> Document<P> {
    let depth = depth.max(1);
    let count = rng.gen_range(0..=CONSTANT_NAMES.len());
    let constants = &CONSTANT_NAMES[..count];
    let mut env = Env::new();
    for name in constants {
        let body = guarded_body(rng, depth, constants);
        env.define(*name, body)
            .expect("generated bodies are guarded");
    }
    let root = term(rng, depth, constants, true);
    env.absorb(&root);
    Document {
        env,
        root: Some(root),
    }
}

/// `count` documents from one seeded stream.
pub fn random_corpus<P: RandomPrefix>(seed: u64, count: usize, depth: usize) -> Vec<Document<P>> {
    let mut rng = rng_from_seed(seed);
    (0..count)
        .map(|_| random_document(&mut rng, depth))
        .collect()
}

/// Renders documents separated by `---` lines.
pub fn render_corpus<P: Prefix>(docs: &[Document<P>]) -> String {
    docs.iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("---\n")
}

/// Splits a corpus file into its documents.
pub fn split_corpus(text: &str) -> Vec<String> {
    let mut docs = vec![String::new()];
    for line in text.lines() {
        if line.trim() == "---" {
            docs.push(String::new());
        } else {
            let current = docs.last_mut().expect("never empty");
            current.push_str(line);
            current.push('\n');
        }
    }
    docs.retain(|d| {
        d.lines()
            .any(|l| !l.split('%').next().unwrap_or("").trim().is_empty())
    });
    docs
}

/// Semiring values that can be drawn at random, zero included.
pub trait RandomValue: Semiring {
    fn random(rng: &mut impl Rng) -> Self;
}

impl RandomValue for bool {
    fn random(rng: &mut impl Rng) -> Self {
        rng.gen_bool(0.5)
    }
}

impl RandomValue for Rational {
    fn random(rng: &mut impl Rng) -> Self {
        let n = rng.gen_range(0..12);
        let d = rng.gen_range(1..8);
        Rational::new(n, d).expect("valid fraction")
    }
}

/// Two functions plus an injective pairing of their supports.
#[derive(Debug, Clone)]
pub struct PairingTriple<R: Semiring> {
    pub phi: FiniteSupportFn<u32, R>,
    pub psi: FiniteSupportFn<u32, R>,
    pub pairing: BTreeMap<(u32, u32), u32>,
}

pub fn random_triple<R: RandomValue>(rng: &mut impl Rng) -> PairingTriple<R> {
    let size = rng.gen_range(0..6u32);
    let phi = FiniteSupportFn::from_entries((0..size).map(|k| (k, R::random(rng))));
    let size = rng.gen_range(0..6u32);
    let psi = FiniteSupportFn::from_entries((0..size).map(|k| (k, R::random(rng))));
    let mut codes: Vec<u32> = (0..64).collect();
    codes.shuffle(rng);
    let mut codes = codes.into_iter();
    let mut pairing = BTreeMap::new();
    for &x in phi.support() {
        for &y in psi.support() {
            pairing.insert((x, y), codes.next().expect("enough codes for 5x5 pairs"));
        }
    }
    PairingTriple { phi, psi, pairing }
}

fn random_value(kind: SemiringKind, rng: &mut impl Rng) -> SemiringValue {
    match kind {
        SemiringKind::Boolean => SemiringValue::Bool(rng.gen_bool(0.3)),
        SemiringKind::Rational => {
            if rng.gen_bool(0.35) {
                let (n, d) = [(1, 2), (1, 1), (2, 1)][rng.gen_range(0..3)];
                SemiringValue::Rational(Rational::new(n, d).expect("valid"))
            } else {
                SemiringValue::Rational(Rational::zero())
            }
        }
    }
}

/// A raw model with 1..=`max_states` states and one or two relations of
/// random semiring. Some states copy the rows of an earlier state so that
/// non-trivial bisimulations are common.
pub fn random_model(rng: &mut impl Rng, max_states: usize) -> Result<FutsModel, FutsError> {
    let n = rng.gen_range(1..=max_states.max(1));
    let relations = rng.gen_range(1..=2);
    let schemas: Vec<RelationSchema> = (1..=relations)
        .map(|i| {
            let labels = ["a", "b"][..rng.gen_range(1..=2)]
                .iter()
                .map(|s| s.to_string())
                .collect();
            let kind = if rng.gen_bool(0.5) {
                SemiringKind::Boolean
            } else {
                SemiringKind::Rational
            };
            RelationSchema::new(i, labels, kind)
        })
        .collect();
    let copy_of: Vec<Option<usize>> = (0..n)
        .map(|s| (s > 0 && rng.gen_bool(0.4)).then(|| rng.gen_range(0..s)))
        .collect();
    let mut rows: BTreeMap<(usize, usize, String), Continuation> = BTreeMap::new();
    for schema in &schemas {
        for (s, copy) in copy_of.iter().enumerate() {
            for label in &schema.labels {
                let cont = match *copy {
                    Some(src) => rows[&(schema.index, src, label.clone())].clone(),
                    None => {
                        let entries: Vec<_> = (0..n)
                            .map(|t| (t, random_value(schema.semiring, rng)))
                            .collect();
                        Continuation::from_values(schema.semiring, entries)?
                    }
                };
                rows.insert((schema.index, s, label.clone()), cont);
            }
        }
    }
    let states = (0..n).map(|s| format!("s{s}")).collect();
    FutsModel::build(states, schemas, |schema, s, label| {
        Ok(rows[&(schema.index, s, label.to_string())].clone())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pepa::PepaTerm;

    #[test]
    fn corpus_is_deterministic_and_reparses() {
        let a = random_corpus::<RatedAction>(7, 20, 4);
        let b = random_corpus::<RatedAction>(7, 20, 4);
        assert_eq!(a, b);
        let text = render_corpus(&a);
        let parts = split_corpus(&text);
        assert_eq!(parts.len(), 20);
        for (doc, part) in a.iter().zip(&parts) {
            let again = Document::<RatedAction>::parse(part).unwrap();
            assert_eq!(&again.root, &doc.root);
            assert_eq!(again.env.definitions(), doc.env.definitions());
        }
    }

    #[test]
    fn depth_is_respected() {
        fn depth(t: &PepaTerm) -> usize {
            match t {
                Process::Nil | Process::Const(_) => 1,
                Process::Prefix(_, c) => 1 + depth(c),
                Process::Choice(l, r) | Process::Coop(l, r, _) => 1 + depth(l).max(depth(r)),
            }
        }
        for doc in random_corpus::<RatedAction>(3, 50, 5) {
            assert!(depth(doc.root.as_ref().unwrap()) <= 5);
        }
    }

    #[test]
    fn pairings_are_injective() {
        let mut rng = rng_from_seed(1);
        for _ in 0..50 {
            let t = random_triple::<Rational>(&mut rng);
            let mut codes: Vec<_> = t.pairing.values().collect();
            codes.sort();
            codes.dedup();
            assert_eq!(codes.len(), t.pairing.len());
        }
    }

    #[test]
    fn random_models_are_well_formed() {
        let mut rng = rng_from_seed(2);
        for _ in 0..50 {
            let m = random_model(&mut rng, 6).unwrap();
            assert!(m.num_states() <= 6);
            m.audit().unwrap();
        }
    }
}
