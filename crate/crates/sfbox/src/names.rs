//! Fresh-name generation for binder hygiene.
//!
//! The kernel works with names; every context extension freshens on clash. The
//! counter is confined to one checking/evaluation session, never shared.

use std::cell::Cell;

#[derive(Debug, Default)]
pub struct NameGen {
    counter: Cell<u64>,
}

impl NameGen {
    pub fn new() -> Self {
        NameGen { counter: Cell::new(0) }
    }

    /// A session-unique variant of `base`, e.g. `x'3`.
    pub fn fresh(&self, base: &str) -> String {
        let n = self.counter.get();
        self.counter.set(n + 1);
        let stem: &str = match base.find('\'') {
            Some(i) if i > 0 => &base[..i],
            _ => base,
        };
        let stem = if stem.is_empty() { "v" } else { stem };
        format!("{stem}'{n}")
    }

    /// `base` itself if it avoids everything in `taken`, else a fresh variant that does.
    pub fn fresh_avoiding(&self, base: &str, taken: &dyn Fn(&str) -> bool) -> String {
        if !taken(base) {
            return base.to_string();
        }
        loop {
            let cand = self.fresh(base);
            if !taken(&cand) {
                return cand;
            }
        }
    }
}
