use std::cmp::Ordering;

use crate::scalar::Real;

/// Open-list entry for A*. `BinaryHeap` pops the greatest element, so the
/// ordering is reversed: smaller `f` first, then larger `g`, then smaller index.
#[derive(Debug, Clone, Copy)]
pub(crate) struct OpenEntry<T> {
    pub f: T,
    pub g: T,
    pub node: u32,
}

impl<T: Real> PartialEq for OpenEntry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Real> Eq for OpenEntry<T> {}

impl<T: Real> PartialOrd for OpenEntry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Real> Ord for OpenEntry<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .partial_cmp(&self.f)
            .unwrap_or(Ordering::Equal)
            .then_with(|| self.g.partial_cmp(&other.g).unwrap_or(Ordering::Equal))
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Two-component D*-Lite key, compared lexicographically (smaller first).
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Key<T>(pub T, pub T);

impl<T: Real> Key<T> {
    pub fn less(&self, other: &Self) -> bool {
        self.0 < other.0 || (self.0 == other.0 && self.1 < other.1)
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct KeyEntry<T> {
    pub key: Key<T>,
    pub node: u32,
}

impl<T: Real> PartialEq for KeyEntry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Real> Eq for KeyEntry<T> {}

impl<T: Real> PartialOrd for KeyEntry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Real> Ord for KeyEntry<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .0
            .partial_cmp(&self.key.0)
            .unwrap_or(Ordering::Equal)
            .then_with(|| {
                other
                    .key
                    .1
                    .partial_cmp(&self.key.1)
                    .unwrap_or(Ordering::Equal)
            })
            .then_with(|| other.node.cmp(&self.node))
    }
}
