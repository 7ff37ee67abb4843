use std::collections::btree_map::{self, Entry};
use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::{Semiring, SemiringError, SemiringKind};

/// A function `K -> R` that is zero almost everywhere.
///
/// Only non-zero values are stored, so the key set is exactly the support and
/// structural equality coincides with extensional equality.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiniteSupportFn<K, R> {
    entries: BTreeMap<K, R>,
}

impl<K: Ord + Clone, R: Semiring> FiniteSupportFn<K, R> {
    /// The constant zero function.
    pub fn zero() -> Self {
        FiniteSupportFn {
            entries: BTreeMap::new(),
        }
    }

    /// `[x -> r]`; the zero function when `r` is zero.
    pub fn point(x: K, r: R) -> Self {
        let mut entries = BTreeMap::new();
        if !r.is_zero() {
            entries.insert(x, r);
        }
        FiniteSupportFn { entries }
    }

    /// The characteristic function `[x -> 1]`.
    pub fn characteristic(x: K) -> Self {
        Self::point(x, R::one())
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (K, R)>) -> Self {
        let mut f = Self::zero();
        for (k, v) in entries {
            f.add_at(k, &v);
        }
        f
    }

    pub fn kind(&self) -> SemiringKind {
        R::KIND
    }

    pub fn get(&self, x: &K) -> R {
        self.entries.get(x).cloned().unwrap_or_else(R::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &K> + '_ {
        self.entries.keys()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, K, R> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `self(x) += r`, dropping the entry if the result is zero.
    pub fn add_at(&mut self, x: K, r: &R) {
        if r.is_zero() {
            return;
        }
        match self.entries.entry(x) {
            Entry::Vacant(slot) => {
                slot.insert(r.clone());
            }
            Entry::Occupied(mut slot) => {
                let sum = slot.get().plus(r);
                if sum.is_zero() {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    /// Pointwise sum.
    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.entries {
            out.add_at(k.clone(), v);
        }
        out
    }

    /// Scalar multiple `r * self`.
    pub fn scale(&self, r: &R) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|(k, v)| (k.clone(), r.times(v)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        FiniteSupportFn { entries }
    }

    /// The sum of all values; zero for the zero function.
    pub fn total(&self) -> R {
        self.entries.values().fold(R::zero(), |acc, v| acc.plus(v))
    }

    /// `(self | other)(pair(x1, x2)) = self(x1) * other(x2)`, zero elsewhere.
    ///
    /// `pair` must be injective on the product of the two supports; a
    /// collision is reported instead of silently summing.
    pub fn pair_product<F>(&self, other: &Self, mut pair: F) -> Result<Self, SemiringError>
    where
        F: FnMut(&K, &K) -> K,
        K: fmt::Debug,
    {
        let mut entries = BTreeMap::new();
        for (x1, v1) in &self.entries {
            for (x2, v2) in &other.entries {
                let v = v1.times(v2);
                if v.is_zero() {
                    continue;
                }
                let key = pair(x1, x2);
                if entries.contains_key(&key) {
                    return Err(SemiringError::PairingCollision(format!("{key:?}")));
                }
                entries.insert(key, v);
            }
        }
        Ok(FiniteSupportFn { entries })
    }

    /// Relabels the support through `f`, summing values that collide.
    pub fn map_keys<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> K2) -> FiniteSupportFn<K2, R> {
        let mut out = FiniteSupportFn::zero();
        for (k, v) in &self.entries {
            out.add_at(f(k), v);
        }
        out
    }

    /// Sum of the values over the keys satisfying `pred`.
    pub fn sum_where(&self, mut pred: impl FnMut(&K) -> bool) -> R {
        self.entries
            .iter()
            .filter(|(k, _)| pred(k))
            .fold(R::zero(), |acc, (_, v)| acc.plus(v))
    }
}

impl<K: Ord + Clone, R: Semiring> Default for FiniteSupportFn<K, R> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<K: fmt::Debug, R: fmt::Display> fmt::Debug for FiniteSupportFn<K, R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (k, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k:?} -> {v}")?;
        }
        f.write_str("]")
    }
}

impl<K: fmt::Display, R: fmt::Display> fmt::Display for FiniteSupportFn<K, R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (k, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k} -> {v}")?;
        }
        f.write_str("]")
    }
}

impl<K: fmt::Display, R: Serialize> Serialize for FiniteSupportFn<K, R> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.entries.len()))?;
        for (k, v) in &self.entries {
            map.serialize_entry(&k.to_string(), v)?;
        }
        map.end()
    }
}
