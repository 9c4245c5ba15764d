//! Exhaustive search for statistically significant discriminative closed
//! patterns by tidset enumeration.
//!
//! The search tree is built over tidsets. From the empty root it first
//! grows closed tidsets made only of case tids, adding a smaller case tid
//! at each step (positive expansion). From every such node it then adds
//! control tids, again in decreasing order (negative expansion). Once a
//! node has control tids its case part is frozen, so adding a control tid
//! can only lower SD, GR, ORS and (with guards, see [`PruneRule`]) the
//! lower confidence bounds. A failing node therefore cuts its whole subtree.
//!
//! Each closed pattern is emitted at exactly one node: the one whose
//! tidset equals `g(p)`.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::dataset::{ItemSet, ReducedDataset, Tid, Tidset, TwoClassDataset, VerticalData};
use crate::error::{Error, Result};
use crate::galois::{self, intersect_rows, rows_containing};
use crate::measures::{
    check_significance, confidence_intervals, contingency_from_tidset, discriminance, ContingencyTable, ScoreSet,
    Thresholds,
};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinerConfig {
    pub thresholds: Thresholds,
    /// Anti-monotone pruning. Output is identical either way.
    pub prune: bool,
    /// Worker threads; `None` uses the rayon default, `Some(1)` runs inline.
    pub threads: Option<usize>,
}

impl Default for MinerConfig {
    fn default() -> Self {
        Self { thresholds: Thresholds::default(), prune: true, threads: None }
    }
}

impl MinerConfig {
    pub fn with_thresholds(thresholds: Thresholds) -> Self {
        Self { thresholds, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        self.thresholds.validate()?;
        if self.threads == Some(0) {
            return Err(Error::InvalidConfig("threads must be at least 1".into()));
        }
        Ok(())
    }
}

/// One output row: a closed pattern with its canonical tidset and scores.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternRecord {
    pub itemset: ItemSet,
    /// Internal tids; `g(itemset)` exactly.
    pub tidset: Tidset,
    pub table: ContingencyTable,
    pub scores: ScoreSet,
}

impl PatternRecord {
    pub fn new(itemset: ItemSet, tidset: Tidset, table: ContingencyTable) -> Result<Self> {
        let scores = ScoreSet::compute(&table)?;
        Ok(Self { itemset, tidset, table, scores })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MineStats {
    pub nodes_visited: u64,
    pub nodes_pruned: u64,
    pub patterns_emitted: u64,
    #[serde(with = "duration_secs")]
    pub wall_time: Duration,
}

mod duration_secs {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_secs_f64(f64::deserialize(d)?))
    }
}

/// Which thresholds may cut a subtree, given the control class size.
///
/// SD, GR and ORS always decrease when a control tid is added. LCI_ORS
/// decreases for `d ≥ 2`. LCI_GR decreases for `d ≥ 2` only when the
/// control class has at least 5 transactions, and even then the final step
/// to `d = 0` can raise it, so that endpoint is checked as well.
#[derive(Clone, Copy, Debug)]
pub struct PruneRule {
    thresholds: Thresholds,
    lci_gr_guard: bool,
}

pub const LCI_GR_MIN_CONTROLS: usize = 5;

impl PruneRule {
    pub fn new(thresholds: Thresholds, n_control: usize) -> Self {
        Self { thresholds, lci_gr_guard: n_control >= LCI_GR_MIN_CONTROLS }
    }

    /// Whether LCI_GR takes part in pruning at all for this dataset.
    pub fn lci_gr_enabled(&self) -> bool {
        self.lci_gr_guard
    }

    /// True when no descendant of a node with this tidset table can pass.
    pub fn cuts(&self, ct: &ContingencyTable) -> bool {
        let th = &self.thresholds;
        let Ok(disc) = discriminance(ct) else {
            return true;
        };
        let below = |v: f64, min: Option<f64>| min.is_some_and(|m| v.partial_cmp(&m).is_none_or(Ordering::is_lt));
        if below(disc.sd, th.min_sd) || below(disc.gr, th.min_gr) || below(disc.ors, th.min_ors) {
            return true;
        }
        if ct.d < 2 || !th.uses_intervals() {
            return false;
        }
        let ci = confidence_intervals(ct).expect("classes checked above");
        if th.min_lci_ors.is_some_and(|m| not_above(ci.lci_ors, m)) {
            return true;
        }
        if let (true, Some(m)) = (self.lci_gr_guard, th.min_lci_gr) {
            let end = ContingencyTable::new(ct.a, ct.b, ct.n_control(), 0);
            let end_lci = confidence_intervals(&end).expect("classes checked above").lci_gr;
            if not_above(ci.lci_gr, m) && not_above(end_lci, m) {
                return true;
            }
        }
        false
    }
}

/// `!(v > m)`, with NaN counting as not above.
fn not_above(v: f64, m: f64) -> bool {
    v.partial_cmp(&m).is_none_or(Ordering::is_le)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Positive,
    Negative,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// No item common to the augmented tidset.
    Empty,
    /// Significance check failed on the tidset table.
    Pruned,
    /// Closure adds a tid at or above the augmenting one; the closed
    /// tidset belongs to another branch.
    NonCanonical { closure: Tidset },
    /// Node accepted; `tidset` is the augmented tidset after the closure jump.
    Expanded { tidset: Tidset, emitted: bool },
}

/// One node of the search tree, recorded by [`mine_traced`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    /// Index of the parent event; `None` for root children.
    pub parent: Option<usize>,
    pub phase: Phase,
    /// The augmented tidset `t ∪ {e}`.
    pub tidset: Tidset,
    /// `f(tidset)`.
    pub itemset: ItemSet,
    pub table: ContingencyTable,
    pub outcome: Outcome,
}

#[derive(Default)]
struct Sink {
    records: Vec<PatternRecord>,
    visited: u64,
    pruned: u64,
    trace: Option<Vec<TraceEvent>>,
}

impl Sink {
    fn merge(mut self, other: Sink) -> Sink {
        self.records.extend(other.records);
        self.visited += other.visited;
        self.pruned += other.pruned;
        self
    }

    fn log(&mut self, event: impl FnOnce() -> TraceEvent) -> Option<usize> {
        let trace = self.trace.as_mut()?;
        trace.push(event());
        Some(trace.len() - 1)
    }

    fn set_outcome(&mut self, id: Option<usize>, outcome: impl FnOnce() -> Outcome) {
        if let (Some(trace), Some(id)) = (self.trace.as_mut(), id) {
            trace[id].outcome = outcome();
        }
    }
}

struct Search<'a> {
    data: &'a TwoClassDataset,
    thresholds: Thresholds,
    prune: Option<PruneRule>,
    parallel: bool,
}

impl Search<'_> {
    fn n(&self) -> usize {
        self.data.n()
    }

    fn cases(&self) -> std::ops::Range<Tid> {
        self.data.case_tids()
    }

    fn controls(&self) -> std::ops::Range<Tid> {
        self.data.control_tids()
    }

    fn table(&self, tids: &BitSet) -> ContingencyTable {
        ContingencyTable::from_presence(
            tids.count_in(self.cases()),
            self.data.n_case(),
            tids.count_in(self.controls()),
            self.data.n_control(),
        )
    }

    fn itemset(rd: &ReducedDataset, rows: &[usize]) -> ItemSet {
        rows.iter().map(|&r| rd.item_id(r)).collect()
    }

    fn restrict(rd: &ReducedDataset, tids: &BitSet) -> ReducedDataset {
        ReducedDataset::reduce_bits(tids, rd)
    }

    fn run_tasks<T: Send>(&self, tasks: Vec<T>, sink: &mut Sink, f: impl Fn(T, &mut Sink) + Sync) {
        if self.parallel && sink.trace.is_none() && tasks.len() > 1 {
            let merged = tasks
                .into_par_iter()
                .map(|task| {
                    let mut local = Sink::default();
                    f(task, &mut local);
                    local
                })
                .reduce(Sink::default, Sink::merge);
            *sink = std::mem::take(sink).merge(merged);
        } else {
            for task in tasks {
                f(task, sink);
            }
        }
    }

    fn positive_expand(&self, t: &BitSet, e: Tid, rd: &ReducedDataset, sink: &mut Sink, parent: Option<usize>) {
        debug_assert!(self.cases().contains(&e) && !t.contains(e));
        sink.visited += 1;
        let mut t_plus = t.clone();
        t_plus.insert(e);
        let rows = rows_containing(&t_plus, rd);
        let table = self.table(&t_plus);
        let n_case = self.data.n_case();
        let id = sink.log(|| TraceEvent {
            parent,
            phase: Phase::Positive,
            tidset: Tidset::from_bits(&t_plus, n_case),
            itemset: Self::itemset(rd, &rows),
            table,
            outcome: Outcome::Empty,
        });
        if rows.is_empty() {
            return;
        }

        let closure = intersect_rows(self.n(), rows.iter().map(|&r| &rd.rows()[r]));
        let mut ext = closure.clone();
        ext.difference_with(&t_plus);
        if ext.max_in(self.cases()).is_some_and(|m| m >= e) {
            sink.set_outcome(id, || Outcome::NonCanonical {
                closure: Tidset { pos: Tidset::from_bits(&closure, n_case).pos, neg: Vec::new() },
            });
            return;
        }
        let mut q = t_plus;
        for tid in ext.iter_ones_in(self.cases()) {
            q.insert(tid);
        }
        sink.set_outcome(id, || Outcome::Expanded { tidset: Tidset::from_bits(&q, n_case), emitted: false });

        let reduced = Self::restrict(rd, &q);
        let mut tasks: Vec<(Phase, Tid)> =
            (0..e).filter(|&tid| !q.contains(tid)).map(|tid| (Phase::Positive, tid)).collect();
        tasks.extend(self.controls().map(|tid| (Phase::Negative, tid)));
        self.run_tasks(tasks, sink, |(phase, tid), sink| match phase {
            Phase::Positive => self.positive_expand(&q, tid, &reduced, sink, id),
            Phase::Negative => self.negative_expand(&q, tid, &reduced, sink, id),
        });
    }

    fn negative_expand(&self, t: &BitSet, e: Tid, rd: &ReducedDataset, sink: &mut Sink, parent: Option<usize>) {
        debug_assert!(self.controls().contains(&e) && !t.contains(e));
        sink.visited += 1;
        let mut t_minus = t.clone();
        t_minus.insert(e);
        let rows = rows_containing(&t_minus, rd);
        let table = self.table(&t_minus);
        let n_case = self.data.n_case();
        let id = sink.log(|| TraceEvent {
            parent,
            phase: Phase::Negative,
            tidset: Tidset::from_bits(&t_minus, n_case),
            itemset: Self::itemset(rd, &rows),
            table,
            outcome: Outcome::Empty,
        });
        if rows.is_empty() {
            return;
        }
        if self.prune.is_some_and(|rule| rule.cuts(&table)) {
            sink.pruned += 1;
            sink.set_outcome(id, || Outcome::Pruned);
            return;
        }

        let closure = intersect_rows(self.n(), rows.iter().map(|&r| &rd.rows()[r]));
        let mut ext = closure.clone();
        ext.difference_with(&t_minus);
        if ext.max_in(self.controls()).is_some_and(|m| m >= e) {
            sink.set_outcome(id, || Outcome::NonCanonical {
                closure: Tidset {
                    pos: Tidset::from_bits(&t_minus, n_case).pos,
                    neg: Tidset::from_bits(&closure, n_case).neg,
                },
            });
            return;
        }
        let mut q = t_minus;
        for tid in ext.iter_ones_in(self.controls()) {
            q.insert(tid);
        }

        // closure ⊇ q always; equality means q = g(f(q)).
        let q_table = self.table(&q);
        let emitted = closure == q && check_significance(&q_table, &self.thresholds);
        if emitted {
            let record = PatternRecord::new(Self::itemset(rd, &rows), Tidset::from_bits(&q, n_case), q_table)
                .expect("both classes are non-empty");
            sink.records.push(record);
        }
        sink.set_outcome(id, || Outcome::Expanded { tidset: Tidset::from_bits(&q, n_case), emitted });

        let reduced = Self::restrict(rd, &q);
        for tid in self.data.n_case()..e {
            if !q.contains(tid) {
                self.negative_expand(&q, tid, &reduced, sink, id);
            }
        }
    }

    fn run(&self, sink: &mut Sink) {
        let root = ReducedDataset::reduce_bits(&BitSet::new(self.n()), self.data);
        let empty = BitSet::new(self.n());
        let tasks: Vec<Tid> = self.cases().collect();
        self.run_tasks(tasks, sink, |e, sink| self.positive_expand(&empty, e, &root, sink, None));
    }
}

fn canonical_sort(records: &mut [PatternRecord]) {
    records.sort_by(|x, y| x.itemset.cmp(&y.itemset));
}

fn mine_inner(
    data: &TwoClassDataset,
    cfg: &MinerConfig,
    trace: bool,
) -> Result<(Vec<PatternRecord>, MineStats, Option<Vec<TraceEvent>>)> {
    data.check_minable()?;
    cfg.validate()?;
    let start = Instant::now();
    let search = Search {
        data,
        thresholds: cfg.thresholds,
        prune: cfg.prune.then(|| PruneRule::new(cfg.thresholds, data.n_control())),
        parallel: !trace && cfg.threads != Some(1),
    };
    let mut sink = Sink { trace: trace.then(Vec::new), ..Sink::default() };
    match cfg.threads {
        Some(n) if n > 1 && !trace => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
            pool.install(|| search.run(&mut sink));
        }
        _ => search.run(&mut sink),
    }
    canonical_sort(&mut sink.records);
    let stats = MineStats {
        nodes_visited: sink.visited,
        nodes_pruned: sink.pruned,
        patterns_emitted: sink.records.len() as u64,
        wall_time: start.elapsed(),
    };
    Ok((sink.records, stats, sink.trace))
}

/// Mine every closed pattern with at least one case and one control
/// transaction that satisfies `cfg.thresholds`, sorted by itemset.
pub fn mine(data: &TwoClassDataset, cfg: &MinerConfig) -> Result<(Vec<PatternRecord>, MineStats)> {
    let (records, stats, _) = mine_inner(data, cfg, false)?;
    Ok((records, stats))
}

/// Sequential [`mine`] that also returns every visited node in visit order.
pub fn mine_traced(
    data: &TwoClassDataset,
    cfg: &MinerConfig,
) -> Result<(Vec<PatternRecord>, MineStats, Vec<TraceEvent>)> {
    let (records, stats, trace) = mine_inner(data, cfg, true)?;
    Ok((records, stats, trace.unwrap_or_default()))
}

/// Check the output contract of [`mine`] against the dataset.
pub fn validate_records(data: &TwoClassDataset, thresholds: &Thresholds, records: &[PatternRecord]) -> Result<()> {
    let fail = |i: usize, what: &str| Err(Error::Invariant(format!("record {i}: {what}")));
    for (i, r) in records.iter().enumerate() {
        if r.tidset.neg.is_empty() {
            return fail(i, "no control transaction");
        }
        if galois::g(&r.itemset, data) != r.tidset {
            return fail(i, "tidset is not g(itemset)");
        }
        if galois::f(&r.tidset, data) != r.itemset {
            return fail(i, "itemset is not closed");
        }
        if contingency_from_tidset(&r.tidset, data) != r.table {
            return fail(i, "table does not match tidset");
        }
        if !check_significance(&r.table, thresholds) {
            return fail(i, "fails thresholds");
        }
        if i > 0 && records[i - 1].itemset >= r.itemset {
            return fail(i, "not in canonical order or duplicated");
        }
    }
    Ok(())
}
