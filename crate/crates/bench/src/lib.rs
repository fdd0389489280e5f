//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use dectopos::corpus::{enumerate_presheaves, uniform_bounds, CorpusIndex};
use dectopos::fincat::catalog;
use dectopos::FinCategory;

pub fn base(name: &str) -> Arc<FinCategory> {
    Arc::new(catalog(name).expect("catalog base"))
}

pub fn corpus(name: &str, bound: usize) -> CorpusIndex {
    let b = base(name);
    enumerate_presheaves(&b, &uniform_bounds(&b, bound)).expect("corpus within cap")
}
