//! Galois connection between tidsets and itemsets, with per-class variants
//! and the tidset closure operators built from it.
//!
//! `f` maps a tidset to the items shared by all of its transactions, `g`
//! maps an itemset to the transactions containing it. By convention
//! `f(∅) = I` and `g(∅)` is every tid.

use crate::bits::BitSet;
use crate::dataset::{ItemSet, Tid, Tidset, VerticalData};

/// Row indices of `data` whose rows contain every tid in `tids`.
pub(crate) fn rows_containing<D: VerticalData + ?Sized>(tids: &BitSet, data: &D) -> Vec<usize> {
    data.rows().iter().enumerate().filter(|(_, row)| tids.is_subset(row)).map(|(r, _)| r).collect()
}

/// Intersection of the given rows; all tids when `rows` is empty.
pub(crate) fn intersect_rows<'a>(n: usize, rows: impl IntoIterator<Item = &'a BitSet>) -> BitSet {
    let mut acc = BitSet::full(n);
    for row in rows {
        acc.intersect_with(row);
    }
    acc
}

fn row_of<D: VerticalData + ?Sized>(data: &D, item: usize) -> usize {
    (0..data.rows().len())
        .find(|&r| data.item_id(r) == item)
        .unwrap_or_else(|| panic!("item {item} not present in dataset"))
}

fn g_bits<D: VerticalData + ?Sized>(p: &ItemSet, data: &D) -> BitSet {
    intersect_rows(data.n(), p.iter().map(|i| &data.rows()[row_of(data, i)]))
}

/// Items present in every transaction of `q`.
pub fn f<D: VerticalData + ?Sized>(q: &Tidset, data: &D) -> ItemSet {
    let bits = q.to_bits(data.n());
    rows_containing(&bits, data).into_iter().map(|r| data.item_id(r)).collect()
}

/// Transactions (both classes) containing every item of `p`.
pub fn g<D: VerticalData + ?Sized>(p: &ItemSet, data: &D) -> Tidset {
    Tidset::from_bits(&g_bits(p, data), data.n_case())
}

/// Case transactions containing `p`.
pub fn g_pos<D: VerticalData + ?Sized>(p: &ItemSet, data: &D) -> Vec<Tid> {
    g(p, data).pos
}

/// Control transactions containing `p`.
pub fn g_neg<D: VerticalData + ?Sized>(p: &ItemSet, data: &D) -> Vec<Tid> {
    g(p, data).neg
}

/// `g(f(q))`: the tidset of the smallest closed pattern covering `q`.
pub fn closure_full<D: VerticalData + ?Sized>(q: &Tidset, data: &D) -> Tidset {
    g(&f(q, data), data)
}

/// Closure within the case class; `q` must have no control tids.
pub fn closure_pos<D: VerticalData + ?Sized>(q: &Tidset, data: &D) -> Tidset {
    assert!(q.neg.is_empty(), "closure_pos on a tidset with control tids");
    Tidset { pos: g_pos(&f(q, data), data), neg: Vec::new() }
}

/// Closure on the control side: the itemset is taken over the whole
/// (mixed) tidset, then only the control part is replaced by its support.
pub fn closure_neg<D: VerticalData + ?Sized>(q: &Tidset, data: &D) -> Tidset {
    assert!(!q.neg.is_empty(), "closure_neg on a tidset without control tids");
    Tidset { pos: q.pos.clone(), neg: g_neg(&f(q, data), data) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::fixtures::{items, table1, tids};
    use crate::dataset::{reduced_dataset, TwoClassDataset};
    use crate::measures::{contingency_from_tidset, relational_support};
    use proptest::prelude::*;

    fn names(d: &TwoClassDataset, p: &ItemSet) -> String {
        let mut s: Vec<&str> = p.iter().map(|i| d.item_name(i)).collect();
        s.sort_unstable();
        s.concat()
    }

    #[test]
    fn f_examples() {
        let d = table1();
        assert_eq!(names(&d, &f(&tids(&[1, 2], &[8]), &d)), "bci");
        assert_eq!(f(&Tidset::empty(), &d).len(), 10);
        assert_eq!(names(&d, &f(&tids(&[2], &[9]), &d)), "aeg");
    }

    #[test]
    fn g_examples() {
        let d = table1();
        assert_eq!(g(&items(&d, "bc"), &d), tids(&[1, 2, 3], &[6, 7, 8]));
        assert_eq!(g(&ItemSet::default(), &d).len(), 9);
        assert_eq!(g(&items(&d, "abci"), &d), tids(&[1, 2], &[]));
    }

    #[test]
    fn per_class_projections() {
        let d = table1();
        let bci = items(&d, "bci");
        assert_eq!(g_pos(&bci, &d), tids(&[1, 2], &[]).pos);
        assert_eq!(g_neg(&bci, &d), tids(&[], &[8]).neg);
        assert_eq!(g_neg(&items(&d, "bcei"), &d), tids(&[], &[8]).neg);
        assert_eq!(g_pos(&ItemSet::default(), &d), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn full_closure_examples() {
        let d = table1();
        assert_eq!(closure_full(&tids(&[1, 2], &[]), &d), tids(&[1, 2], &[]));
        let bc = tids(&[1, 2, 3], &[6, 7, 8]);
        assert_eq!(closure_full(&tids(&[1, 2], &[6]), &d), bc);
        assert_eq!(closure_full(&bc, &d), bc);
    }

    #[test]
    fn positive_closure_examples() {
        let d = table1();
        assert_eq!(closure_pos(&tids(&[2, 3], &[]), &d), tids(&[1, 2, 3], &[]));
        assert_eq!(closure_pos(&tids(&[1, 2], &[]), &d), tids(&[1, 2], &[]));
        assert_eq!(closure_pos(&tids(&[5], &[]), &d), tids(&[5], &[]));
    }

    #[test]
    fn negative_closure_examples() {
        let d = table1();
        assert_eq!(closure_neg(&tids(&[1, 2], &[8]), &d), tids(&[1, 2], &[8]));
        let out = closure_neg(&tids(&[1, 2, 3], &[8]), &d);
        assert_eq!(out, tids(&[1, 2, 3], &[6, 7, 8]));
        assert_eq!(closure_neg(&out, &d), out);
    }

    #[test]
    #[should_panic]
    fn positive_closure_rejects_controls() {
        let d = table1();
        closure_pos(&tids(&[1], &[6]), &d);
    }

    #[test]
    fn works_on_reduced_data() {
        let d = table1();
        let r = reduced_dataset(&tids(&[1, 2], &[]), &d);
        let q = tids(&[1, 2], &[8]);
        assert_eq!(f(&q, &r), f(&q, &d));
        assert_eq!(closure_full(&q, &r), closure_full(&q, &d));
    }

    fn small_dataset() -> impl Strategy<Value = TwoClassDataset> {
        (1usize..6, 1usize..6, 1usize..7).prop_flat_map(|(nc, nn, m)| {
            proptest::collection::vec(proptest::collection::vec(any::<bool>(), m), nc + nn).prop_map(move |cells| {
                let rows: Vec<BitSet> =
                    (0..m).map(|i| BitSet::from_indices(nc + nn, (0..nc + nn).filter(|&t| cells[t][i]))).collect();
                let names = (0..m).map(|i| format!("x{i}")).collect();
                let ids = (0..nc + nn).map(|t| t.to_string()).collect();
                TwoClassDataset::new(names, nc, nn, rows, ids).unwrap()
            })
        })
    }

    fn subset_of<T: Clone>(xs: Vec<T>, mask: u32) -> Vec<T> {
        xs.into_iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, x)| x).collect()
    }

    proptest! {
        #[test]
        fn connection_laws(d in small_dataset(), m1 in any::<u32>(), m2 in any::<u32>()) {
            let all: Vec<Tid> = (0..d.n()).collect();
            let q1 = subset_of(all.clone(), m1);
            let q2: Vec<Tid> = q1.iter().copied().chain(subset_of(all, m2)).collect();
            let split = |ts: Vec<Tid>| Tidset::new(
                ts.iter().copied().filter(|&t| t < d.n_case()).collect(),
                ts.iter().copied().filter(|&t| t >= d.n_case()).collect(),
            );
            let (q1, q2) = (split(q1), split(q2));

            // antitone
            prop_assert!(f(&q2, &d).is_subset(&f(&q1, &d)));
            let p1 = f(&q2, &d);
            let p2 = ItemSet::new(subset_of((0..d.n_items()).collect(), m2));
            let p12: ItemSet = p1.iter().chain(p2.iter()).collect();
            prop_assert!(g(&p12, &d).is_subset(&g(&p1, &d)));

            // extensive and idempotent
            let c = closure_full(&q1, &d);
            prop_assert!(q1.is_subset(&c));
            prop_assert_eq!(closure_full(&c, &d), c.clone());
            prop_assert!(p2.is_subset(&f(&g(&p2, &d), &d)));

            // per-class consistency
            let gp = g(&p2, &d);
            prop_assert_eq!(&gp.pos, &g_pos(&p2, &d));
            prop_assert_eq!(&gp.neg, &g_neg(&p2, &d));

            // relational support agrees with the case projection
            let ct = contingency_from_tidset(&gp, &d);
            prop_assert_eq!(relational_support(ct.a, d.n_case()).unwrap(), gp.pos.len() as f64 / d.n_case() as f64);

            if q1.neg.is_empty() {
                let cp = closure_pos(&q1, &d);
                prop_assert_eq!(closure_pos(&cp, &d), cp.clone());
            } else {
                let cn = closure_neg(&q1, &d);
                prop_assert!(q1.is_subset(&cn));
                prop_assert_eq!(closure_neg(&cn, &d), cn.clone());
            }
        }
    }
}
