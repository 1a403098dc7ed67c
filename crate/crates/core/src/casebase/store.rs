use std::sync::{Arc, Mutex, RwLock};

use super::CaseBase;

/// Single-writer, multi-reader holder for a [`CaseBase`].
///
/// Readers take an `Arc` snapshot and never block on writers for longer than
/// the pointer swap. Writers are serialized and build the next revision on a
/// private copy, so no reader ever sees a half-applied mutation.
#[derive(Debug, Default)]
pub struct CaseStore {
    current: RwLock<Arc<CaseBase>>,
    writer: Mutex<()>,
}

impl CaseStore {
    pub fn new(cb: CaseBase) -> Self {
        CaseStore {
            current: RwLock::new(Arc::new(cb)),
            writer: Mutex::new(()),
        }
    }

    pub fn snapshot(&self) -> Arc<CaseBase> {
        self.current.read().expect("case store lock poisoned").clone()
    }

    /// Apply `f` to a copy of the current base and publish it on success.
    pub fn mutate<T, E>(&self, f: impl FnOnce(&mut CaseBase) -> Result<T, E>) -> Result<T, E> {
        let _guard = self.writer.lock().expect("case store writer poisoned");
        let mut next = (*self.snapshot()).clone();
        let out = f(&mut next)?;
        *self.current.write().expect("case store lock poisoned") = Arc::new(next);
        Ok(out)
    }
}
