//! Symbols and fresh-name generation.

use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::Arc;

/// An identifier.
///
/// Source names have `id == 0`. Names produced by a [`NameSupply`] reuse the
/// base of the name they were derived from and carry a positive suffix, so two
/// names are equal only if both the base and the suffix agree.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name {
    base: Arc<str>,
    id: u32,
}

impl Name {
    pub fn new(base: &str) -> Name {
        Name {
            base: Arc::from(base),
            id: 0,
        }
    }

    /// A name outside the source namespace, for canonical renamings.
    pub fn indexed(base: &str, id: u32) -> Name {
        Name {
            base: Arc::from(base),
            id,
        }
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn is_source(&self) -> bool {
        self.id == 0
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Name {
        Name::new(s)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.id == 0 {
            f.write_str(&self.base)
        } else {
            write!(f, "{}_{}", self.base, self.id)
        }
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Monotone source of fresh names, scoped to one search run.
///
/// The counter is atomic so a supply can be shared between threads.
#[derive(Debug)]
pub struct NameSupply {
    next: AtomicU32,
}

impl NameSupply {
    pub fn new() -> NameSupply {
        NameSupply {
            next: AtomicU32::new(1),
        }
    }

    /// A name that has never been handed out before, with the same base as `like`.
    pub fn fresh(&self, like: &Name) -> Name {
        self.fresh_str(&like.base)
    }

    pub fn fresh_str(&self, base: &str) -> Name {
        let id = self.next.fetch_add(1, Ordering::Relaxed);
        Name {
            base: Arc::from(base),
            id,
        }
    }
}

impl Default for NameSupply {
    fn default() -> NameSupply {
        NameSupply::new()
    }
}
