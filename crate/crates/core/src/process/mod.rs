//! Process terms shared by the PEPA and IML front-ends.
//!
//! Both languages have the same operators (`nil`, prefix, choice,
//! cooperation, constants) and differ only in the prefix, so the AST, the
//! environment, the parser and the printer are generic over [`Prefix`].

mod explore;
mod syntax;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::futs::FutsError;
use crate::semiring::SemiringError;

pub use explore::{
    reachable, term_blocks, Explored, Reachable, TermContinuation, DEFAULT_STATE_CAP,
};
pub use syntax::{Cursor, ParseError, ParseErrorKind, Token};

pub type Action = String;
pub type ActionSet = BTreeSet<Action>;

/// Guard against runaway constant unfolding. Guarded environments never get close.
pub const MAX_UNFOLD_DEPTH: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("state cap of {cap} exceeded ({explored} states explored)")]
    StateCapExceeded { cap: usize, explored: usize },
    #[error("constant unfolding exceeded depth {0}; is the environment guarded?")]
    RecursionDepthExceeded(usize),
    #[error("undefined constant `{0}`")]
    UndefinedConstant(String),
    #[error(transparent)]
    Semiring(#[from] SemiringError),
    #[error(transparent)]
    Futs(#[from] FutsError),
}

/// The language-specific prefix of a process term.
pub trait Prefix:
    Clone + Ord + Hash + fmt::Debug + fmt::Display + Serialize + Send + Sync + 'static
{
    /// The action this prefix performs, if it is an action prefix.
    fn action(&self) -> Option<&str>;

    /// Parses a prefix at the cursor, without the trailing `.`.
    ///
    /// Returns `Ok(None)` and consumes nothing when the input does not start
    /// with a prefix of this language.
    fn parse(cursor: &mut Cursor<'_>) -> Result<Option<Self>, ParseError>;
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Process<P> {
    Nil,
    Prefix(P, Arc<Process<P>>),
    Choice(Arc<Process<P>>, Arc<Process<P>>),
    Coop(Arc<Process<P>>, Arc<Process<P>>, ActionSet),
    Const(String),
}

impl<P: Prefix> Process<P> {
    pub fn nil() -> Self {
        Process::Nil
    }

    pub fn prefix(p: P, cont: Self) -> Self {
        Process::Prefix(p, Arc::new(cont))
    }

    pub fn choice(left: Self, right: Self) -> Self {
        Process::Choice(Arc::new(left), Arc::new(right))
    }

    pub fn coop<I, S>(left: Self, right: Self, actions: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<Action>,
    {
        Process::Coop(
            Arc::new(left),
            Arc::new(right),
            actions.into_iter().map(Into::into).collect(),
        )
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Process::Const(name.into())
    }

    /// Actions named anywhere in the term, including cooperation sets.
    pub fn collect_actions(&self, out: &mut ActionSet) {
        match self {
            Process::Nil | Process::Const(_) => {}
            Process::Prefix(p, cont) => {
                if let Some(a) = p.action() {
                    out.insert(a.to_string());
                }
                cont.collect_actions(out);
            }
            Process::Choice(l, r) => {
                l.collect_actions(out);
                r.collect_actions(out);
            }
            Process::Coop(l, r, set) => {
                out.extend(set.iter().cloned());
                l.collect_actions(out);
                r.collect_actions(out);
            }
        }
    }

    /// Constant names occurring in the term.
    pub fn collect_constants(&self, out: &mut BTreeSet<String>) {
        match self {
            Process::Nil => {}
            Process::Const(x) => {
                out.insert(x.clone());
            }
            Process::Prefix(_, cont) => cont.collect_constants(out),
            Process::Choice(l, r) | Process::Coop(l, r, _) => {
                l.collect_constants(out);
                r.collect_constants(out);
            }
        }
    }

    /// First constant that occurs outside the scope of any prefix.
    pub fn unguarded_constant(&self) -> Option<&str> {
        match self {
            Process::Nil | Process::Prefix(..) => None,
            Process::Const(x) => Some(x),
            Process::Choice(l, r) | Process::Coop(l, r, _) => {
                l.unguarded_constant().or_else(|| r.unguarded_constant())
            }
        }
    }

    /// Number of operators and leaves.
    pub fn size(&self) -> usize {
        match self {
            Process::Nil | Process::Const(_) => 1,
            Process::Prefix(_, cont) => 1 + cont.size(),
            Process::Choice(l, r) | Process::Coop(l, r, _) => 1 + l.size() + r.size(),
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, level: Level) -> fmt::Result {
        let own = match self {
            Process::Coop(..) => Level::Coop,
            Process::Choice(..) => Level::Sum,
            _ => Level::Factor,
        };
        let wrap = own < level;
        if wrap {
            f.write_str("(")?;
        }
        match self {
            Process::Nil => f.write_str("nil")?,
            Process::Const(x) => f.write_str(x)?,
            Process::Prefix(p, cont) => {
                write!(f, "{p}.")?;
                cont.fmt_at(f, Level::Factor)?;
            }
            Process::Choice(l, r) => {
                l.fmt_at(f, Level::Sum)?;
                f.write_str(" + ")?;
                r.fmt_at(f, Level::Factor)?;
            }
            Process::Coop(l, r, set) => {
                l.fmt_at(f, Level::Coop)?;
                write!(
                    f,
                    " <{}> ",
                    set.iter().cloned().collect::<Vec<_>>().join(",")
                )?;
                r.fmt_at(f, Level::Sum)?;
            }
        }
        if wrap {
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Binding strength in the concrete syntax: cooperation is loosest, then
/// choice, then prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Coop,
    Sum,
    Factor,
}

impl<P: Prefix> fmt::Display for Process<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, Level::Coop)
    }
}

/// Constant definitions plus the finite action alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Env<P> {
    definitions: BTreeMap<String, Process<P>>,
    alphabet: ActionSet,
}

impl<P: Prefix> Default for Env<P> {
    fn default() -> Self {
        Env {
            definitions: BTreeMap::new(),
            alphabet: ActionSet::new(),
        }
    }
}

impl<P: Prefix> Env<P> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `name := body`, checking that the body is prefix-guarded.
    ///
    /// Constants used by the body need not be defined yet; see [`Env::check_closed`].
    pub fn define(
        &mut self,
        name: impl Into<String>,
        body: Process<P>,
    ) -> Result<(), ParseErrorKind> {
        let name = name.into();
        if self.definitions.contains_key(&name) {
            return Err(ParseErrorKind::DuplicateDefinition(name));
        }
        if let Some(x) = body.unguarded_constant() {
            return Err(ParseErrorKind::UnguardedRecursion {
                constant: name,
                occurrence: x.to_string(),
            });
        }
        body.collect_actions(&mut self.alphabet);
        self.definitions.insert(name, body);
        Ok(())
    }

    pub fn body(&self, name: &str) -> Option<&Process<P>> {
        self.definitions.get(name)
    }

    pub fn definitions(&self) -> &BTreeMap<String, Process<P>> {
        &self.definitions
    }

    pub fn alphabet(&self) -> &ActionSet {
        &self.alphabet
    }

    pub fn declare_action(&mut self, action: impl Into<Action>) {
        self.alphabet.insert(action.into());
    }

    /// Adds every action of `term` to the alphabet.
    pub fn absorb(&mut self, term: &Process<P>) {
        term.collect_actions(&mut self.alphabet);
    }

    /// The first constant used but not defined, if any.
    pub fn undefined_constant<'a>(
        &self,
        terms: impl IntoIterator<Item = &'a Process<P>>,
    ) -> Option<String> {
        let mut used = BTreeSet::new();
        for body in self.definitions.values() {
            body.collect_constants(&mut used);
        }
        for t in terms {
            t.collect_constants(&mut used);
        }
        used.into_iter().find(|x| !self.definitions.contains_key(x))
    }

    /// Unfolds a constant, failing when it is undefined.
    pub fn unfold(&self, name: &str) -> Result<&Process<P>, SemanticsError> {
        self.body(name)
            .ok_or_else(|| SemanticsError::UndefinedConstant(name.to_string()))
    }
}

impl<P: Prefix> fmt::Display for Env<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, body) in &self.definitions {
            writeln!(f, "{name} := {body}")?;
        }
        Ok(())
    }
}

/// Placeholder label used when a system performs no actions at all.
pub const IDLE_ACTION: &str = "_";

/// The environment's alphabet together with the actions of `roots`.
///
/// Falls back to [`IDLE_ACTION`] when empty, because label sets must be non-empty.
pub fn exploration_alphabet<P: Prefix>(env: &Env<P>, roots: &[Process<P>]) -> Vec<Action> {
    let mut actions = env.alphabet().clone();
    for r in roots {
        r.collect_actions(&mut actions);
    }
    if actions.is_empty() {
        actions.insert(IDLE_ACTION.to_string());
    }
    actions.into_iter().collect()
}

/// A parsed source file: definitions and an optional root expression.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Document<P> {
    pub env: Env<P>,
    pub root: Option<Process<P>>,
}

impl<P: Prefix> Document<P> {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        syntax::parse_document(text)
    }

    pub fn root(&self) -> Result<&Process<P>, ParseError> {
        self.root
            .as_ref()
            .ok_or_else(|| ParseError::new(ParseErrorKind::MissingRoot, 0, 0))
    }

    /// Parses an extra expression against this document's definitions and
    /// widens the alphabet with its actions.
    pub fn parse_expression(&mut self, text: &str) -> Result<Process<P>, ParseError> {
        let term = syntax::parse_expression(text, &self.env)?;
        self.env.absorb(&term);
        Ok(term)
    }
}

impl<P: Prefix> fmt::Display for Document<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.env)?;
        if let Some(root) = &self.root {
            writeln!(f, "{root}")?;
        }
        Ok(())
    }
}
