//! Brute-force reference for small datasets.
//!
//! Enumerates itemsets (not tidsets) with plain `u32` transaction masks, so
//! it shares no enumeration or closure code with the miner.

use crate::dataset::{ItemSet, Tid, Tidset, TwoClassDataset, VerticalData};
use crate::error::{Error, Result};
use crate::measures::{check_significance, ContingencyTable};
use crate::miner::{MinerConfig, PatternRecord};

pub const MAX_TRANSACTIONS: usize = 24;
pub const MAX_ITEMS: usize = 24;

fn check_size(data: &TwoClassDataset) -> Result<()> {
    if data.n() > MAX_TRANSACTIONS {
        return Err(Error::TooLarge(format!("{} transactions (limit {MAX_TRANSACTIONS})", data.n())));
    }
    if data.n_items() > MAX_ITEMS {
        return Err(Error::TooLarge(format!("{} items (limit {MAX_ITEMS})", data.n_items())));
    }
    Ok(())
}

struct Masks {
    items: Vec<u32>,
}

impl Masks {
    fn new(data: &TwoClassDataset) -> Self {
        let items = (0..data.n_items())
            .map(|i| (0..data.n()).filter(|&t| data.contains(i, t)).fold(0u32, |m, t| m | 1 << t))
            .collect();
        Self { items }
    }

    /// Items contained in every transaction of `tids`.
    fn common(&self, tids: u32) -> Vec<usize> {
        (0..self.items.len()).filter(|&i| self.items[i] & tids == tids).collect()
    }

    fn walk(&self, prefix: &mut Vec<usize>, tids: u32, next: usize, out: &mut Vec<(Vec<usize>, u32)>) {
        for i in next..self.items.len() {
            let t = tids & self.items[i];
            if t == 0 {
                continue;
            }
            prefix.push(i);
            if self.common(t) == *prefix {
                out.push((prefix.clone(), t));
            }
            self.walk(prefix, t, i + 1, out);
            prefix.pop();
        }
    }
}

fn split(mask: u32, n: usize, n_case: usize) -> Tidset {
    let tids: Vec<Tid> = (0..n).filter(|&t| mask >> t & 1 == 1).collect();
    Tidset {
        pos: tids.iter().copied().filter(|&t| t < n_case).collect(),
        neg: tids.into_iter().filter(|&t| t >= n_case).collect(),
    }
}

/// Every non-empty closed itemset with non-empty support, with its tidset,
/// ordered by itemset.
pub fn enumerate_closed(data: &TwoClassDataset) -> Result<Vec<(ItemSet, Tidset)>> {
    check_size(data)?;
    let masks = Masks::new(data);
    let all = (1u32 << data.n()) - 1;
    let mut found = Vec::new();
    masks.walk(&mut Vec::new(), all, 0, &mut found);
    let mut out: Vec<(ItemSet, Tidset)> =
        found.into_iter().map(|(items, mask)| (ItemSet::new(items), split(mask, data.n(), data.n_case()))).collect();
    out.sort();
    Ok(out)
}

/// Closed patterns present in at least one case and one control whose
/// actual-support table passes `cfg.thresholds`. Pruning and threading
/// settings are ignored.
pub fn mine_oracle(data: &TwoClassDataset, cfg: &MinerConfig) -> Result<Vec<PatternRecord>> {
    data.check_minable()?;
    cfg.validate()?;
    let mut out = Vec::new();
    for (itemset, tidset) in enumerate_closed(data)? {
        if tidset.pos.is_empty() || tidset.neg.is_empty() {
            continue;
        }
        let table =
            ContingencyTable::from_presence(tidset.pos.len(), data.n_case(), tidset.neg.len(), data.n_control());
        if check_significance(&table, &cfg.thresholds) {
            out.push(PatternRecord::new(itemset, tidset, table)?);
        }
    }
    Ok(out)
}
