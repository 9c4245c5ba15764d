use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::TwoClassDataset;
use crate::bits::BitSet;
use crate::error::{Error, Result};

/// Random two-class dataset: every (item, transaction) cell is set
/// independently with probability `density`. Items are named `i1..iM`,
/// transactions get external ids `1..n`. Same seed, same dataset.
pub fn generate_synthetic(
    n_case: usize,
    n_control: usize,
    n_items: usize,
    density: f64,
    seed: u64,
) -> Result<TwoClassDataset> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidDensity(density));
    }
    let n = n_case + n_control;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = vec![BitSet::new(n); n_items];
    for tid in 0..n {
        for row in rows.iter_mut() {
            if rng.gen_bool(density) {
                row.insert(tid);
            }
        }
    }
    let items = (1..=n_items).map(|i| format!("i{i}")).collect();
    let ids = (1..=n).map(|t| t.to_string()).collect();
    TwoClassDataset::new(items, n_case, n_control, rows, ids)
}
