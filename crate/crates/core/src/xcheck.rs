//! Cross-checks between the FuTS semantics and the standard semantics.
//!
//! Every check compares two independently computed sides on one input and
//! reports [`Outcome::Pass`], [`Outcome::Fail`] with the first disagreement,
//! or [`Outcome::Skipped`] when exploration hit the state cap.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::futs::coarsest_bisimulation;
use crate::gen::{PairingTriple, RandomValue};
use crate::iml::{self, ImlDocument, ImlTerm};
use crate::pepa::{self, PepaDocument, PepaTerm};
use crate::process::{exploration_alphabet, term_blocks, Process, SemanticsError};
use crate::semiring::{FiniteSupportFn, Rational, SemiringValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    /// Totals of random functions commute with sum and pairing product.
    Totals,
    /// Continuation totals equal apparent rates.
    PepaApparentRate,
    /// Continuation values equal multiplicity-weighted standard rates.
    PepaRates,
    /// FuTS bisimilarity equals strong equivalence.
    PepaEquivalence,
    /// Boolean and delay continuations match the standard transitions.
    ImlTransitions,
    /// FuTS bisimilarity equals strong bisimilarity.
    ImlEquivalence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    Pepa,
    Iml,
}

impl Check {
    pub const ALL: [Check; 6] = [
        Check::Totals,
        Check::PepaApparentRate,
        Check::PepaRates,
        Check::PepaEquivalence,
        Check::ImlTransitions,
        Check::ImlEquivalence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Totals => "totals",
            Check::PepaApparentRate => "pepa-apparent-rate",
            Check::PepaRates => "pepa-rates",
            Check::PepaEquivalence => "pepa-equivalence",
            Check::ImlTransitions => "iml-transitions",
            Check::ImlEquivalence => "iml-equivalence",
        }
    }

    /// The term language the check runs on; `None` for [`Check::Totals`].
    pub fn language(self) -> Option<Language> {
        match self {
            Check::Totals => None,
            Check::PepaApparentRate | Check::PepaRates | Check::PepaEquivalence => {
                Some(Language::Pepa)
            }
            Check::ImlTransitions | Check::ImlEquivalence => Some(Language::Iml),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Check::ALL.iter().map(|c| c.name()).collect();
                format!("unknown check `{s}`; expected one of {}", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", content = "detail", rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail(String),
    Skipped(String),
}

impl Outcome {
    pub fn is_pass(&self) -> bool {
        matches!(self, Outcome::Pass)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Outcome::Fail(_))
    }

    fn from_error(err: SemanticsError) -> Self {
        match err {
            SemanticsError::StateCapExceeded { .. } => Outcome::Skipped(err.to_string()),
            other => Outcome::Fail(other.to_string()),
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Pass => f.write_str("pass"),
            Outcome::Fail(why) => write!(f, "FAIL: {why}"),
            Outcome::Skipped(why) => write!(f, "skipped: {why}"),
        }
    }
}

/// Pass, fail and skip counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

impl Tally {
    pub fn add(&mut self, outcome: &Outcome) {
        match outcome {
            Outcome::Pass => self.passed += 1,
            Outcome::Fail(_) => self.failed += 1,
            Outcome::Skipped(_) => self.skipped += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.passed + self.failed + self.skipped
    }
}

impl<'a> FromIterator<&'a Outcome> for Tally {
    fn from_iter<I: IntoIterator<Item = &'a Outcome>>(iter: I) -> Self {
        let mut t = Tally::default();
        for o in iter {
            t.add(o);
        }
        t
    }
}

impl fmt::Display for Tally {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{} passed, {} failed, {} skipped",
            self.passed,
            self.total(),
            self.failed,
            self.skipped
        )
    }
}

fn guard(f: impl FnOnce() -> Result<Outcome, SemanticsError>) -> Outcome {
    f().unwrap_or_else(Outcome::from_error)
}

fn rate_sums<'a, T: Ord + Clone + 'a>(
    items: impl IntoIterator<Item = (&'a T, &'a Rational, u64)>,
) -> BTreeMap<T, Rational> {
    let mut out: BTreeMap<T, Rational> = BTreeMap::new();
    for (t, rate, m) in items {
        let entry = out.entry(t.clone()).or_insert_with(Rational::zero);
        *entry = entry.plus(&rate.times(&Rational::from_integer(m)));
    }
    out
}

fn entries_of<T: Ord + Clone, R: crate::semiring::Semiring>(
    f: &FiniteSupportFn<T, R>,
) -> BTreeMap<T, R> {
    f.iter().map(|(k, v)| (k.clone(), v.clone())).collect()
}

fn show<K: fmt::Display, V: fmt::Display>(m: &BTreeMap<K, V>) -> String {
    let parts: Vec<String> = m.iter().map(|(k, v)| format!("{k} -> {v}")).collect();
    format!("[{}]", parts.join(", "))
}

/// Totals of a random triple: `sum(phi + psi) = sum phi + sum psi` and
/// `sum(phi | psi) = sum phi * sum psi`.
pub fn check_totals<R: RandomValue>(triple: &PairingTriple<R>) -> Outcome {
    let PairingTriple { phi, psi, pairing } = triple;
    let sum = phi.plus(psi).total();
    let expected = phi.total().plus(&psi.total());
    if sum != expected {
        return Outcome::Fail(format!(
            "total of sum is {sum}, sum of totals is {expected} for {phi} and {psi}"
        ));
    }
    let product = match phi.pair_product(psi, |x, y| pairing[&(*x, *y)]) {
        Ok(p) => p,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    let expected = phi.total().times(&psi.total());
    if product.total() != expected {
        return Outcome::Fail(format!(
            "total of product is {}, product of totals is {expected} for {phi} and {psi}",
            product.total()
        ));
    }
    Outcome::Pass
}

/// Per reachable state and action: the continuation total equals the
/// apparent rate, and on cooperation states the rate factor computed from
/// continuations equals the one computed from apparent rates.
pub fn check_pepa_apparent_rate(doc: &PepaDocument, cap: usize) -> Outcome {
    guard(|| {
        let root = match &doc.root {
            Some(r) => r.clone(),
            None => return Ok(Outcome::Fail("document has no root".into())),
        };
        let env = &doc.env;
        let explored = pepa::explore_pepa(std::slice::from_ref(&root), env, cap)?;
        let actions = exploration_alphabet(env, std::slice::from_ref(&root));
        for (s, term) in explored.terms.iter().enumerate() {
            for (l, a) in actions.iter().enumerate() {
                let total = explored.model.row(0, s, l).total();
                let rate = pepa::apparent_rate(term, a, env)?;
                if total != SemiringValue::from(rate.clone()) {
                    return Ok(Outcome::Fail(format!(
                        "state `{term}`, action {a}: continuation total {total}, apparent rate {rate}"
                    )));
                }
                if let Process::Coop(left, right, set) = term {
                    if set.contains(a) {
                        let semantic = pepa::arf_semantic(
                            &pepa::futs_step(left, a, env)?,
                            &pepa::futs_step(right, a, env)?,
                        );
                        let syntactic = pepa::arf(
                            &pepa::apparent_rate(left, a, env)?,
                            &pepa::apparent_rate(right, a, env)?,
                        );
                        if semantic != syntactic {
                            return Ok(Outcome::Fail(format!(
                                "state `{term}`, action {a}: rate factor {semantic} from continuations, {syntactic} from apparent rates"
                            )));
                        }
                    }
                }
            }
        }
        Ok(Outcome::Pass)
    })
}

/// Per reachable state, action and target: the continuation value equals
/// the sum of rate times multiplicity over standard transitions.
pub fn check_pepa_rates(doc: &PepaDocument, cap: usize) -> Outcome {
    guard(|| {
        let root = match &doc.root {
            Some(r) => r.clone(),
            None => return Ok(Outcome::Fail("document has no root".into())),
        };
        let env = &doc.env;
        let explored = pepa::explore_pepa(std::slice::from_ref(&root), env, cap)?;
        let actions = exploration_alphabet(env, std::slice::from_ref(&root));
        for term in &explored.terms {
            let standard = pepa::standard_transitions(term, env)?;
            for a in &actions {
                let futs = entries_of(&pepa::futs_step(term, a, env)?);
                let sums = rate_sums(
                    standard
                        .iter()
                        .filter(|t| &t.action == a)
                        .map(|t| (&t.target, &t.rate, t.multiplicity)),
                );
                if futs != sums {
                    return Ok(Outcome::Fail(format!(
                        "state `{term}`, action {a}: continuation {}, standard rates {}",
                        show(&futs),
                        show(&sums)
                    )));
                }
            }
        }
        Ok(Outcome::Pass)
    })
}

fn compare_blocks<T: Ord + Clone + fmt::Display>(
    futs: Vec<Vec<T>>,
    standard: Vec<Vec<T>>,
    what: &str,
) -> Outcome {
    if futs == standard {
        return Outcome::Pass;
    }
    let render = |blocks: &[Vec<T>]| {
        blocks
            .iter()
            .map(|b| {
                format!(
                    "{{{}}}",
                    b.iter()
                        .map(|t| t.to_string())
                        .collect::<Vec<_>>()
                        .join(", ")
                )
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    Outcome::Fail(format!(
        "FuTS bisimulation {} differs from {what} {}",
        render(&futs),
        render(&standard)
    ))
}

/// The coarsest FuTS bisimulation and the coarsest strong equivalence
/// induce the same blocks of reachable terms.
pub fn check_pepa_equivalence(doc: &PepaDocument, cap: usize) -> Outcome {
    guard(|| {
        let root: PepaTerm = match &doc.root {
            Some(r) => r.clone(),
            None => return Ok(Outcome::Fail("document has no root".into())),
        };
        let futs = pepa::futs_equivalence_blocks(std::slice::from_ref(&root), &doc.env, cap)?;
        let system = pepa::explore_standard(std::slice::from_ref(&root), &doc.env, cap)?;
        let standard = term_blocks(&system.terms, &pepa::strong_equivalence_partition(&system));
        Ok(compare_blocks(futs, standard, "strong equivalence"))
    })
}

/// Per reachable state: the boolean continuation of each action is the set
/// of standard action targets, and the delay continuation equals the
/// multiset rate sums.
pub fn check_iml_transitions(doc: &ImlDocument, cap: usize) -> Outcome {
    guard(|| {
        let root = match &doc.root {
            Some(r) => r.clone(),
            None => return Ok(Outcome::Fail("document has no root".into())),
        };
        let env = &doc.env;
        let explored = iml::explore_iml(std::slice::from_ref(&root), env, cap)?;
        let actions = exploration_alphabet(env, std::slice::from_ref(&root));
        for term in &explored.terms {
            let standard = iml::standard_action_transitions(term, env)?;
            for a in &actions {
                let futs = entries_of(&iml::futs_action_step(term, a, env)?);
                let targets: BTreeMap<ImlTerm, bool> = standard
                    .iter()
                    .filter(|(b, _)| b == a)
                    .map(|(_, t)| (t.clone(), true))
                    .collect();
                if futs != targets {
                    return Ok(Outcome::Fail(format!(
                        "state `{term}`, action {a}: continuation {}, standard targets {}",
                        show(&futs),
                        show(&targets)
                    )));
                }
            }
            let futs = entries_of(&iml::futs_delay_step(term, env)?);
            let delays = iml::standard_delay_transitions(term, env)?;
            let sums = rate_sums(delays.iter().map(|d| (&d.target, &d.rate, d.multiplicity)));
            if futs != sums {
                return Ok(Outcome::Fail(format!(
                    "state `{term}`, delay: continuation {}, standard rates {}",
                    show(&futs),
                    show(&sums)
                )));
            }
        }
        Ok(Outcome::Pass)
    })
}

/// The coarsest FuTS bisimulation and the coarsest strong bisimulation
/// induce the same blocks of reachable terms.
pub fn check_iml_equivalence(doc: &ImlDocument, cap: usize) -> Outcome {
    guard(|| {
        let root: ImlTerm = match &doc.root {
            Some(r) => r.clone(),
            None => return Ok(Outcome::Fail("document has no root".into())),
        };
        let futs = iml::futs_equivalence_blocks(std::slice::from_ref(&root), &doc.env, cap)?;
        let system = iml::explore_standard(std::slice::from_ref(&root), &doc.env, cap)?;
        let standard = term_blocks(&system.terms, &iml::strong_bisimulation_partition(&system));
        Ok(compare_blocks(futs, standard, "strong bisimulation"))
    })
}

/// Parses one corpus document in the check's language and runs the check.
///
/// Returns the printed root (or a placeholder) together with the outcome.
pub fn check_document_text(check: Check, text: &str, cap: usize) -> (String, Outcome) {
    match check.language() {
        Some(Language::Pepa) => match pepa::parse_pepa(text) {
            Ok(doc) => {
                let label = doc.root.as_ref().map(|r| r.to_string()).unwrap_or_default();
                let outcome = match check {
                    Check::PepaApparentRate => check_pepa_apparent_rate(&doc, cap),
                    Check::PepaRates => check_pepa_rates(&doc, cap),
                    _ => check_pepa_equivalence(&doc, cap),
                };
                (label, outcome)
            }
            Err(e) => (String::new(), Outcome::Fail(format!("parse error at {e}"))),
        },
        Some(Language::Iml) => match iml::parse_iml(text) {
            Ok(doc) => {
                let label = doc.root.as_ref().map(|r| r.to_string()).unwrap_or_default();
                let outcome = match check {
                    Check::ImlTransitions => check_iml_transitions(&doc, cap),
                    _ => check_iml_equivalence(&doc, cap),
                };
                (label, outcome)
            }
            Err(e) => (String::new(), Outcome::Fail(format!("parse error at {e}"))),
        },
        None => (
            String::new(),
            Outcome::Fail("this check runs on random functions, not documents".into()),
        ),
    }
}

/// Whether the quotient by the coarsest bisimulation preserves class sums
/// and admits no further merging.
pub fn quotient_is_minimal(model: &crate::futs::FutsModel) -> Result<bool, crate::futs::FutsError> {
    let p = coarsest_bisimulation(model);
    let q = crate::futs::quotient(model, &p)?;
    Ok(crate::futs::is_quotient_homomorphism(model, &p, &q)
        && coarsest_bisimulation(&q).len() == q.num_states())
}
