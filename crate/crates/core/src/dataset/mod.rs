//! Two-class transaction datasets in vertical (item × transaction) bit layout.
//!
//! Internal transaction ids are 0-based with all case transactions first:
//! cases occupy `0..n_case`, controls `n_case..n`. Original identifiers are
//! kept in `external_ids` for reporting.

mod genotype;
mod synthetic;
mod transactions;

use std::collections::HashMap;
use std::ops::Range;

use crate::bits::BitSet;
use crate::error::{Error, Result};

pub use genotype::{genotype_item_name, load_genotype_matrix};
pub use synthetic::generate_synthetic;
pub use transactions::{load_transactions, write_transactions};

pub type ItemId = usize;
pub type Tid = usize;

/// A sorted, duplicate-free set of item ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ItemSet(Vec<ItemId>);

impl ItemSet {
    pub fn new(mut ids: Vec<ItemId>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        Self(ids)
    }

    pub fn as_slice(&self) -> &[ItemId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: ItemId) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    pub fn is_subset(&self, other: &ItemSet) -> bool {
        self.0.iter().all(|&i| other.contains(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = ItemId> + '_ {
        self.0.iter().copied()
    }
}

impl FromIterator<ItemId> for ItemSet {
    fn from_iter<T: IntoIterator<Item = ItemId>>(iter: T) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

/// A tidset split into its case (`pos`) and control (`neg`) parts.
///
/// Both lists hold internal tids in ascending order; `pos` lies in
/// `0..n_case` and `neg` in `n_case..n`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tidset {
    pub pos: Vec<Tid>,
    pub neg: Vec<Tid>,
}

impl Tidset {
    pub fn new(mut pos: Vec<Tid>, mut neg: Vec<Tid>) -> Self {
        pos.sort_unstable();
        pos.dedup();
        neg.sort_unstable();
        neg.dedup();
        Self { pos, neg }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: &BitSet, n_case: usize) -> Self {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for t in bits.iter_ones() {
            if t < n_case {
                pos.push(t);
            } else {
                neg.push(t);
            }
        }
        Self { pos, neg }
    }

    pub fn to_bits(&self, n: usize) -> BitSet {
        BitSet::from_indices(n, self.pos.iter().chain(&self.neg).copied())
    }

    pub fn len(&self) -> usize {
        self.pos.len() + self.neg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty() && self.neg.is_empty()
    }

    pub fn contains(&self, tid: Tid) -> bool {
        self.pos.binary_search(&tid).is_ok() || self.neg.binary_search(&tid).is_ok()
    }

    pub fn is_subset(&self, other: &Tidset) -> bool {
        self.pos.iter().chain(&self.neg).all(|&t| other.contains(t))
    }

    pub fn iter(&self) -> impl Iterator<Item = Tid> + '_ {
        self.pos.iter().chain(&self.neg).copied()
    }
}

/// Row-oriented access shared by full and reduced datasets.
pub trait VerticalData {
    fn n_case(&self) -> usize;
    fn n_control(&self) -> usize;
    fn rows(&self) -> &[BitSet];
    /// Original item id of row `row`.
    fn item_id(&self, row: usize) -> ItemId;

    fn n(&self) -> usize {
        self.n_case() + self.n_control()
    }

    fn case_tids(&self) -> Range<Tid> {
        0..self.n_case()
    }

    fn control_tids(&self) -> Range<Tid> {
        self.n_case()..self.n()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoClassDataset {
    items: Vec<String>,
    n_case: usize,
    n_control: usize,
    rows: Vec<BitSet>,
    external_ids: Vec<String>,
}

impl TwoClassDataset {
    pub fn new(
        items: Vec<String>,
        n_case: usize,
        n_control: usize,
        rows: Vec<BitSet>,
        external_ids: Vec<String>,
    ) -> Result<Self> {
        let n = n_case + n_control;
        if items.len() != rows.len() {
            return Err(Error::Malformed(format!("{} item names for {} rows", items.len(), rows.len())));
        }
        if let Some(r) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::Malformed(format!("row {r} has {} bits, expected {n}", rows[r].len())));
        }
        if external_ids.len() != n {
            return Err(Error::Malformed(format!("{} external ids for {n} transactions", external_ids.len())));
        }
        let mut seen = HashMap::with_capacity(items.len());
        for (i, name) in items.iter().enumerate() {
            if seen.insert(name.as_str(), i).is_some() {
                return Err(Error::Malformed(format!("duplicate item {name:?}")));
            }
        }
        Ok(Self { items, n_case, n_control, rows, external_ids })
    }

    /// Build from per-class transactions given as item-name lists.
    /// Items are registered in first-seen order, cases before controls.
    pub fn from_transactions<S: AsRef<str>>(cases: &[Vec<S>], controls: &[Vec<S>]) -> Self {
        let mut builder = Builder::default();
        for t in cases {
            builder.push(true, t.iter().map(|s| s.as_ref()));
        }
        for t in controls {
            builder.push(false, t.iter().map(|s| s.as_ref()));
        }
        let ids = (1..=cases.len() + controls.len()).map(|i| i.to_string()).collect();
        builder.finish(ids)
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn item_name(&self, id: ItemId) -> &str {
        &self.items[id]
    }

    pub fn item_index(&self, name: &str) -> Option<ItemId> {
        self.items.iter().position(|i| i == name)
    }

    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    pub fn external_ids(&self) -> &[String] {
        &self.external_ids
    }

    pub fn external_id(&self, tid: Tid) -> &str {
        &self.external_ids[tid]
    }

    pub fn row(&self, item: ItemId) -> &BitSet {
        &self.rows[item]
    }

    pub fn contains(&self, item: ItemId, tid: Tid) -> bool {
        self.rows[item].contains(tid)
    }

    pub fn is_case(&self, tid: Tid) -> bool {
        tid < self.n_case
    }

    /// Items of transaction `tid`, ascending.
    pub fn transaction(&self, tid: Tid) -> Vec<ItemId> {
        (0..self.items.len()).filter(|&i| self.rows[i].contains(tid)).collect()
    }

    /// Fraction of all (item, transaction) cells that are set.
    pub fn density(&self) -> f64 {
        let cells = self.items.len() * self.n();
        if cells == 0 {
            return 0.0;
        }
        self.rows.iter().map(BitSet::count).sum::<usize>() as f64 / cells as f64
    }

    /// Compare content by item name, ignoring item order and items that
    /// never occur.
    pub fn same_content(&self, other: &TwoClassDataset) -> bool {
        if self.n_case != other.n_case || self.n_control != other.n_control {
            return false;
        }
        let occurring = |d: &TwoClassDataset| -> HashMap<String, BitSet> {
            d.items.iter().zip(&d.rows).filter(|(_, r)| !r.is_empty()).map(|(n, r)| (n.clone(), r.clone())).collect()
        };
        occurring(self) == occurring(other)
    }

    pub fn check_minable(&self) -> Result<()> {
        if self.n_case == 0 {
            return Err(Error::EmptyClass("case"));
        }
        if self.n_control == 0 {
            return Err(Error::EmptyClass("control"));
        }
        Ok(())
    }
}

impl VerticalData for TwoClassDataset {
    fn n_case(&self) -> usize {
        self.n_case
    }
    fn n_control(&self) -> usize {
        self.n_control
    }
    fn rows(&self) -> &[BitSet] {
        &self.rows
    }
    fn item_id(&self, row: usize) -> ItemId {
        row
    }
}

/// A dataset restricted to a subset of its item rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedDataset {
    n_case: usize,
    n_control: usize,
    rows: Vec<BitSet>,
    item_ids: Vec<ItemId>,
}

impl ReducedDataset {
    pub fn item_ids(&self) -> &[ItemId] {
        &self.item_ids
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Keep only the rows that contain every tid of `tids`.
    pub(crate) fn reduce_bits<D: VerticalData + ?Sized>(tids: &BitSet, data: &D) -> Self {
        let mut rows = Vec::new();
        let mut item_ids = Vec::new();
        for (r, row) in data.rows().iter().enumerate() {
            if tids.is_subset(row) {
                rows.push(row.clone());
                item_ids.push(data.item_id(r));
            }
        }
        Self { n_case: data.n_case(), n_control: data.n_control(), rows, item_ids }
    }
}

impl VerticalData for ReducedDataset {
    fn n_case(&self) -> usize {
        self.n_case
    }
    fn n_control(&self) -> usize {
        self.n_control
    }
    fn rows(&self) -> &[BitSet] {
        &self.rows
    }
    fn item_id(&self, row: usize) -> ItemId {
        self.item_ids[row]
    }
}

/// Restrict `data` to the rows of the items common to every transaction of
/// `q`. Patterns found below `q` in the enumeration are subsets of that
/// itemset, so the dropped rows can never contribute.
pub fn reduced_dataset<D: VerticalData + ?Sized>(q: &Tidset, data: &D) -> ReducedDataset {
    ReducedDataset::reduce_bits(&q.to_bits(data.n()), data)
}

/// Accumulates transactions in load order and registers items as they appear.
#[derive(Default)]
pub(crate) struct Builder {
    index: HashMap<String, ItemId>,
    items: Vec<String>,
    cases: Vec<Vec<ItemId>>,
    controls: Vec<Vec<ItemId>>,
    case_ids: Vec<String>,
    control_ids: Vec<String>,
}

impl Builder {
    pub(crate) fn intern(&mut self, name: &str) -> ItemId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.items.len();
        self.items.push(name.to_owned());
        self.index.insert(name.to_owned(), id);
        id
    }

    pub(crate) fn push<'a>(&mut self, is_case: bool, items: impl Iterator<Item = &'a str>) {
        let ids: Vec<ItemId> = items.map(|n| self.intern(n)).collect();
        if is_case {
            self.cases.push(ids);
        } else {
            self.controls.push(ids);
        }
    }

    pub(crate) fn push_with_id<'a>(&mut self, is_case: bool, id: String, items: impl Iterator<Item = &'a str>) {
        if is_case {
            self.case_ids.push(id);
        } else {
            self.control_ids.push(id);
        }
        self.push(is_case, items);
    }

    pub(crate) fn len(&self) -> usize {
        self.cases.len() + self.controls.len()
    }

    /// `ids` overrides collected ids when given in internal tid order.
    pub(crate) fn finish(self, ids: Vec<String>) -> TwoClassDataset {
        let n_case = self.cases.len();
        let n = n_case + self.controls.len();
        let mut rows = vec![BitSet::new(n); self.items.len()];
        for (tid, t) in self.cases.iter().chain(&self.controls).enumerate() {
            for &i in t {
                rows[i].insert(tid);
            }
        }
        TwoClassDataset { items: self.items, n_case, n_control: n - n_case, rows, external_ids: ids }
    }

    pub(crate) fn finish_with_collected_ids(mut self) -> TwoClassDataset {
        let mut ids = std::mem::take(&mut self.case_ids);
        ids.append(&mut self.control_ids);
        self.finish(ids)
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn reduce_by_case_pair() {
        let d = table1();
        let r = reduced_dataset(&tids(&[1, 2], &[]), &d);
        let names: Vec<&str> = r.item_ids().iter().map(|&i| d.item_name(i)).collect();
        assert_eq!(names, ["a", "b", "c", "i"]);
        for (row, &id) in r.rows().iter().zip(r.item_ids()) {
            assert_eq!(row, d.row(id));
        }
    }

    #[test]
    fn reduce_by_empty_keeps_everything() {
        let d = table1();
        let r = reduced_dataset(&Tidset::empty(), &d);
        assert_eq!(r.len(), 10);
    }

    #[test]
    fn reduce_by_all_tids_is_empty() {
        let d = table1();
        let all = tids(&[1, 2, 3, 4, 5], &[6, 7, 8, 9]);
        assert!(reduced_dataset(&all, &d).is_empty());
    }

    #[test]
    fn reduce_is_idempotent() {
        let d = table1();
        let q = tids(&[2], &[9]);
        let once = reduced_dataset(&q, &d);
        let twice = reduced_dataset(&q, &once);
        assert_eq!(once, twice);
    }

    #[test]
    fn minable_needs_both_classes() {
        let d = TwoClassDataset::from_transactions(&[vec!["a"]], &[] as &[Vec<&str>]);
        assert!(matches!(d.check_minable(), Err(Error::EmptyClass("control"))));
    }

    #[test]
    fn tidset_bits_round_trip() {
        let q = tids(&[1, 3], &[7]);
        assert_eq!(Tidset::from_bits(&q.to_bits(9), 5), q);
    }
}
