//! The global size cap guarding power objects, exponentials and enumeration.

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};

pub const DEFAULT_SIZE_CAP: usize = 4096;

static SIZE_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_SIZE_CAP);

/// No set at any stage, and no enumerated family, may grow beyond this.
pub fn size_cap() -> usize {
    SIZE_CAP.load(Ordering::Relaxed)
}

pub fn set_size_cap(cap: usize) {
    SIZE_CAP.store(cap.max(1), Ordering::Relaxed);
}

pub(crate) fn check_cap(what: &str, size: usize) -> Result<()> {
    let cap = size_cap();
    if size > cap {
        Err(Error::SizeCap {
            what: what.to_string(),
            size,
            cap,
        })
    } else {
        Ok(())
    }
}
