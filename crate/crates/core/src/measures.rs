//! Discriminance scores, their 95% confidence intervals, the significance
//! predicate used for filtering and pruning, and the univariate chi-square
//! test used to screen genotype items.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::dataset::{Tidset, VerticalData};
use crate::error::{Error, Result};

/// Normal quantile for the two-sided 95% intervals.
pub const Z_95: f64 = 1.96;

/// Counts of a pattern's presence/absence in each class.
///
/// `a`/`b`: cases with/without the pattern, `c`/`d`: controls with/without.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ContingencyTable {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
}

impl ContingencyTable {
    pub const fn new(a: usize, b: usize, c: usize, d: usize) -> Self {
        Self { a, b, c, d }
    }

    pub fn from_presence(case_present: usize, n_case: usize, control_present: usize, n_control: usize) -> Self {
        debug_assert!(case_present <= n_case && control_present <= n_control);
        Self::new(case_present, n_case - case_present, control_present, n_control - control_present)
    }

    pub fn n_case(&self) -> usize {
        self.a + self.b
    }

    pub fn n_control(&self) -> usize {
        self.c + self.d
    }

    pub fn total(&self) -> usize {
        self.n_case() + self.n_control()
    }

    fn check_classes(&self) -> Result<()> {
        if self.n_case() == 0 {
            return Err(Error::EmptyClass("case"));
        }
        if self.n_control() == 0 {
            return Err(Error::EmptyClass("control"));
        }
        Ok(())
    }
}

/// Table counted from the tidset itself: `a = |q.pos|`, `c = |q.neg|`.
pub fn contingency_from_tidset<D: VerticalData + ?Sized>(q: &Tidset, data: &D) -> ContingencyTable {
    ContingencyTable::from_presence(q.pos.len(), data.n_case(), q.neg.len(), data.n_control())
}

/// Fraction of a class containing the pattern. The negative support is
/// `1 - relational_support(..)`.
pub fn relational_support(count_present: usize, class_size: usize) -> Result<f64> {
    if class_size == 0 {
        return Err(Error::EmptyClass("support"));
    }
    Ok(count_present as f64 / class_size as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Discriminance {
    pub sd: f64,
    /// `+inf` when absent from controls; 0 when absent from cases.
    pub gr: f64,
    /// `+inf`/0 on one-sided zero products, NaN when `a·d = b·c = 0`.
    pub ors: f64,
}

pub fn discriminance(ct: &ContingencyTable) -> Result<Discriminance> {
    ct.check_classes()?;
    let sup1 = ct.a as f64 / ct.n_case() as f64;
    let sup2 = ct.c as f64 / ct.n_control() as f64;
    let sd = sup1 - sup2;
    let gr = match (ct.a, ct.c) {
        (0, _) => 0.0,
        (_, 0) => f64::INFINITY,
        _ => sup1 / sup2,
    };
    let ad = (ct.a * ct.d) as f64;
    let bc = (ct.b * ct.c) as f64;
    let ors = match (ad == 0.0, bc == 0.0) {
        (true, true) => f64::NAN,
        (false, true) => f64::INFINITY,
        (true, false) => 0.0,
        (false, false) => ad / bc,
    };
    Ok(Discriminance { sd, gr, ors })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConfidenceIntervals {
    pub lci_gr: f64,
    pub uci_gr: f64,
    pub lci_ors: f64,
    pub uci_ors: f64,
    /// Set when a zero cell forced the +0.5 (Haldane–Anscombe) correction.
    pub corrected: bool,
}

fn gr_interval(a: f64, b: f64, c: f64, d: f64) -> (f64, f64) {
    let ln = ((a / (a + b)) / (c / (c + d))).ln();
    let se = (1.0 / a - 1.0 / (a + b) + 1.0 / c - 1.0 / (c + d)).sqrt();
    ((ln - Z_95 * se).exp(), (ln + Z_95 * se).exp())
}

fn ors_interval(a: f64, b: f64, c: f64, d: f64) -> (f64, f64) {
    let ln = ((a * d) / (b * c)).ln();
    let se = (1.0 / a + 1.0 / b + 1.0 / c + 1.0 / d).sqrt();
    ((ln - Z_95 * se).exp(), (ln + Z_95 * se).exp())
}

/// 95% log-normal intervals for GR and ORS.
///
/// Each interval is evaluated on the raw counts unless one of the counts it
/// divides by is zero, in which case 0.5 is added to all four cells first.
pub fn confidence_intervals(ct: &ContingencyTable) -> Result<ConfidenceIntervals> {
    ct.check_classes()?;
    let (a, b, c, d) = (ct.a as f64, ct.b as f64, ct.c as f64, ct.d as f64);
    let gr_zero = ct.a == 0 || ct.c == 0;
    let ors_zero = gr_zero || ct.b == 0 || ct.d == 0;
    let (lci_gr, uci_gr) =
        if gr_zero { gr_interval(a + 0.5, b + 0.5, c + 0.5, d + 0.5) } else { gr_interval(a, b, c, d) };
    let (lci_ors, uci_ors) =
        if ors_zero { ors_interval(a + 0.5, b + 0.5, c + 0.5, d + 0.5) } else { ors_interval(a, b, c, d) };
    Ok(ConfidenceIntervals { lci_gr, uci_gr, lci_ors, uci_ors, corrected: ors_zero })
}

/// Every score and bound reported for a pattern.
///
/// Equality is bitwise on the floats, so an undefined (NaN) odds ratio
/// compares equal to itself.
#[derive(Clone, Copy, Debug)]
pub struct ScoreSet {
    pub sd: f64,
    pub gr: f64,
    pub ors: f64,
    pub lci_gr: f64,
    pub uci_gr: f64,
    pub lci_ors: f64,
    pub uci_ors: f64,
    pub corrected_ci: bool,
}

impl PartialEq for ScoreSet {
    fn eq(&self, other: &Self) -> bool {
        let same = |x: f64, y: f64| x.total_cmp(&y).is_eq();
        same(self.sd, other.sd)
            && same(self.gr, other.gr)
            && same(self.ors, other.ors)
            && same(self.lci_gr, other.lci_gr)
            && same(self.uci_gr, other.uci_gr)
            && same(self.lci_ors, other.lci_ors)
            && same(self.uci_ors, other.uci_ors)
            && self.corrected_ci == other.corrected_ci
    }
}

impl ScoreSet {
    pub fn compute(ct: &ContingencyTable) -> Result<Self> {
        let Discriminance { sd, gr, ors } = discriminance(ct)?;
        let ci = confidence_intervals(ct)?;
        Ok(Self {
            sd,
            gr,
            ors,
            lci_gr: ci.lci_gr,
            uci_gr: ci.uci_gr,
            lci_ors: ci.lci_ors,
            uci_ors: ci.uci_ors,
            corrected_ci: ci.corrected,
        })
    }
}

/// Optional minimums on scores (`>=`) and lower confidence bounds (`>`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub min_sd: Option<f64>,
    pub min_gr: Option<f64>,
    pub min_ors: Option<f64>,
    pub min_lci_gr: Option<f64>,
    pub min_lci_ors: Option<f64>,
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        let all = [
            ("min_sd", self.min_sd),
            ("min_gr", self.min_gr),
            ("min_ors", self.min_ors),
            ("min_lci_gr", self.min_lci_gr),
            ("min_lci_ors", self.min_lci_ors),
        ];
        for (name, v) in all {
            if let Some(v) = v {
                if !v.is_finite() {
                    return Err(Error::InvalidConfig(format!("{name} must be finite, got {v}")));
                }
            }
        }
        for (name, v) in [("min_gr", self.min_gr), ("min_ors", self.min_ors)] {
            if v.is_some_and(|v| v < 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be non-negative")));
            }
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }

    pub fn uses_intervals(&self) -> bool {
        self.min_lci_gr.is_some() || self.min_lci_ors.is_some()
    }
}

fn at_least(value: f64, min: Option<f64>) -> bool {
    min.is_none_or(|m| value >= m)
}

fn above(value: f64, min: Option<f64>) -> bool {
    min.is_none_or(|m| value > m)
}

/// Whether the scores satisfy every threshold that is set.
pub fn scores_pass(s: &ScoreSet, th: &Thresholds) -> bool {
    at_least(s.sd, th.min_sd)
        && at_least(s.gr, th.min_gr)
        && at_least(s.ors, th.min_ors)
        && above(s.lci_gr, th.min_lci_gr)
        && above(s.lci_ors, th.min_lci_ors)
}

/// Significance test on a table. Tables with an empty class never pass.
pub fn check_significance(ct: &ContingencyTable, th: &Thresholds) -> bool {
    if th.is_empty() {
        return true;
    }
    match discriminance(ct) {
        Err(_) => false,
        Ok(disc) => {
            if !(at_least(disc.sd, th.min_sd) && at_least(disc.gr, th.min_gr) && at_least(disc.ors, th.min_ors)) {
                return false;
            }
            if !th.uses_intervals() {
                return true;
            }
            let ci = confidence_intervals(ct).expect("classes checked above");
            above(ci.lci_gr, th.min_lci_gr) && above(ci.lci_ors, th.min_lci_ors)
        }
    }
}

/// Pearson chi-square statistic of the 2×2 table, optionally with Yates'
/// continuity correction. Zero when any margin is empty.
pub fn chi_square_statistic(ct: &ContingencyTable, yates: bool) -> f64 {
    let (a, b, c, d) = (ct.a as f64, ct.b as f64, ct.c as f64, ct.d as f64);
    let margins = (a + b) * (c + d) * (a + c) * (b + d);
    if margins == 0.0 {
        return 0.0;
    }
    let n = a + b + c + d;
    let mut diff = (a * d - b * c).abs();
    if yates {
        diff = (diff - n / 2.0).max(0.0);
    }
    n * diff * diff / margins
}

/// Upper-tail p-value of the 1-df chi-square test of association.
/// Returns 1 when any margin is empty.
pub fn association_pvalue(ct: &ContingencyTable) -> f64 {
    association_pvalue_with(ct, false)
}

pub fn association_pvalue_with(ct: &ContingencyTable, yates: bool) -> f64 {
    let stat = chi_square_statistic(ct, yates);
    if stat <= 0.0 {
        return 1.0;
    }
    let dist = ChiSquared::new(1.0).expect("1 degree of freedom");
    dist.sf(stat).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::fixtures::{table1, tids};
    use proptest::prelude::*;

    const T: fn(usize, usize, usize, usize) -> ContingencyTable = ContingencyTable::new;

    #[test]
    fn tables_from_tidsets() {
        let d = table1();
        assert_eq!(contingency_from_tidset(&tids(&[1, 2], &[8]), &d), T(2, 3, 1, 3));
        assert_eq!(contingency_from_tidset(&tids(&[1, 2, 3, 4, 5], &[6, 7, 8, 9]), &d), T(5, 0, 4, 0));
        assert_eq!(contingency_from_tidset(&tids(&[1, 2, 3], &[7]), &d), T(3, 2, 1, 3));
    }

    #[test]
    fn supports() {
        assert_eq!(relational_support(3, 5).unwrap(), 0.6);
        assert_eq!(relational_support(0, 7).unwrap(), 0.0);
        assert_eq!(relational_support(1, 4).unwrap(), 0.25);
        assert!(relational_support(1, 0).is_err());
    }

    #[test]
    fn worked_scores() {
        assert!((discriminance(&T(3, 2, 1, 3)).unwrap().gr - 2.4).abs() < 1e-12);
        let bci = discriminance(&T(2, 3, 1, 3)).unwrap();
        assert!((bci.sd - 0.15).abs() < 1e-12);
        assert!((bci.gr - 1.6).abs() < 1e-12);
        assert!((bci.ors - 2.0).abs() < 1e-12);
        assert!((discriminance(&T(1, 4, 1, 3)).unwrap().ors - 0.75).abs() < 1e-12);
        let sym = discriminance(&T(4, 4, 4, 4)).unwrap();
        assert_eq!((sym.sd, sym.gr, sym.ors), (0.0, 1.0, 1.0));
    }

    #[test]
    fn zero_denominators() {
        let s = discriminance(&T(2, 1, 0, 3)).unwrap();
        assert_eq!((s.gr, s.ors), (f64::INFINITY, f64::INFINITY));
        let s = discriminance(&T(0, 3, 2, 1)).unwrap();
        assert_eq!((s.gr, s.ors), (0.0, 0.0));
        let s = discriminance(&T(0, 3, 0, 3)).unwrap();
        assert_eq!(s.gr, 0.0);
        assert!(s.ors.is_nan());
        assert!(discriminance(&T(1, 1, 0, 0)).is_err());
    }

    #[test]
    fn intervals_by_hand() {
        // ln 2.4 ∓ 1.96·sqrt(1/3 − 1/5 + 1 − 1/4)
        let ci = confidence_intervals(&T(3, 2, 1, 3)).unwrap();
        assert!((ci.lci_gr - 0.3803).abs() < 1e-3);
        assert!((ci.uci_gr - 15.15).abs() < 1e-2);
        assert!(!ci.corrected);
        // ln 2 − 1.96·sqrt(1/2 + 1/3 + 1 + 1/3)
        let ci = confidence_intervals(&T(2, 3, 1, 3)).unwrap();
        assert!((ci.lci_ors - 0.1117).abs() < 1e-3);
    }

    #[test]
    fn zero_cells_are_corrected() {
        let ci = confidence_intervals(&T(3, 0, 1, 2)).unwrap();
        assert!(ci.corrected);
        assert!(ci.lci_ors.is_finite() && ci.uci_ors.is_finite());
        let expect =
            ((3.5f64 * 2.5) / (0.5 * 1.5)).ln() - Z_95 * (1.0 / 3.5 + 1.0 / 0.5 + 1.0 / 1.5 + 1.0 / 2.5f64).sqrt();
        assert!((ci.lci_ors - expect.exp()).abs() < 1e-12);
        // GR terms only divide by a and c, so its interval stays uncorrected
        let (lo, _) = gr_interval(3.0, 0.0, 1.0, 2.0);
        assert_eq!(ci.lci_gr, lo);
    }

    #[test]
    fn significance_examples() {
        let th = Thresholds { min_ors: Some(1.5), min_gr: Some(1.5), min_sd: Some(0.1), ..Default::default() };
        assert!(check_significance(&T(2, 3, 1, 3), &th));
        let th = Thresholds { min_ors: Some(2.0), ..Default::default() };
        assert!(!check_significance(&T(1, 4, 1, 3), &th));
        assert!(check_significance(&T(0, 9, 9, 0), &Thresholds::default()));
    }

    #[test]
    fn infinite_scores_pass_finite_minimums() {
        let th = Thresholds { min_gr: Some(1e9), min_ors: Some(1e9), ..Default::default() };
        assert!(check_significance(&T(3, 1, 0, 4), &th));
    }

    #[test]
    fn strict_lower_bound() {
        let lci = confidence_intervals(&T(5, 1, 1, 5)).unwrap().lci_ors;
        let th = Thresholds { min_lci_ors: Some(lci), ..Default::default() };
        assert!(!check_significance(&T(5, 1, 1, 5), &th));
        let th = Thresholds { min_ors: Some(25.0), ..Default::default() };
        assert!(check_significance(&T(5, 1, 1, 5), &th));
    }

    #[test]
    fn threshold_validation() {
        assert!(Thresholds { min_gr: Some(-1.0), ..Default::default() }.validate().is_err());
        assert!(Thresholds { min_sd: Some(f64::INFINITY), ..Default::default() }.validate().is_err());
        assert!(Thresholds { min_sd: Some(-0.5), ..Default::default() }.validate().is_ok());
    }

    #[test]
    fn pvalue_examples() {
        assert_eq!(association_pvalue(&T(6, 6, 6, 6)), 1.0);
        assert_eq!(chi_square_statistic(&T(20, 0, 0, 20), false), 40.0);
        // chi-square tail table: P(X > 40 | 1 df) ≈ 2.54e-10
        assert!(association_pvalue(&T(20, 0, 0, 20)) < 1e-8);
        assert!((chi_square_statistic(&T(3, 2, 1, 3), false) - 1.1025).abs() < 1e-12);
        // scipy.stats.chi2.sf(1.1025, 1) = 0.29372
        assert!((association_pvalue(&T(3, 2, 1, 3)) - 0.294).abs() < 0.005);
        assert_eq!(association_pvalue(&T(3, 0, 1, 0)), 1.0);
    }

    #[test]
    fn yates_shrinks_statistic() {
        let ct = T(10, 5, 3, 12);
        assert!(chi_square_statistic(&ct, true) < chi_square_statistic(&ct, false));
        assert!(association_pvalue_with(&ct, true) > association_pvalue(&ct));
    }

    fn lci_gr(a: usize, b: usize, c: usize, d: usize) -> f64 {
        confidence_intervals(&T(a, b, c, d)).unwrap().lci_gr
    }

    #[test]
    fn adding_a_control_lowers_scores() {
        for a in 1..=6 {
            for b in 0..=6 {
                for c in 1..=6 {
                    for d in 1..=6 {
                        let (x, y) = (T(a, b, c, d), T(a, b, c + 1, d - 1));
                        let (s1, s2) = (discriminance(&x).unwrap(), discriminance(&y).unwrap());
                        assert!(s2.sd < s1.sd);
                        assert!(s2.gr < s1.gr);
                        if b > 0 {
                            assert!(s2.ors < s1.ors, "{x:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn lci_ors_monotone() {
        for a in 1..=8 {
            for b in 1..=8 {
                for c in 1..=8 {
                    for d in 2..=8 {
                        let x = confidence_intervals(&T(a, b, c, d)).unwrap().lci_ors;
                        let y = confidence_intervals(&T(a, b, c + 1, d - 1)).unwrap().lci_ors;
                        assert!(y < x, "({a},{b},{c},{d})");
                    }
                }
            }
        }
    }

    #[test]
    fn lci_gr_monotone_except_small_controls() {
        let mut failing = std::collections::BTreeSet::new();
        for a in 1..=8 {
            for b in 0..=8 {
                for c in 1..=8 {
                    for d in 2..=8 {
                        if lci_gr(a, b, c + 1, d - 1) >= lci_gr(a, b, c, d) {
                            failing.insert((c, d));
                        }
                    }
                }
            }
        }
        assert_eq!(failing.into_iter().collect::<Vec<_>>(), vec![(1, 2), (1, 3), (2, 2)]);
    }

    proptest! {
        #[test]
        fn intervals_bracket_point_estimates(a in 1usize..40, b in 1usize..40, c in 1usize..40, d in 1usize..40) {
            let ct = T(a, b, c, d);
            let s = ScoreSet::compute(&ct).unwrap();
            prop_assert!(s.lci_gr <= s.gr && s.gr <= s.uci_gr);
            prop_assert!(s.lci_ors <= s.ors && s.ors <= s.uci_ors);
            prop_assert!((-1.0..=1.0).contains(&s.sd));
        }

        #[test]
        fn raising_a_threshold_never_admits(
            a in 0usize..10, b in 0usize..10, c in 0usize..10, d in 0usize..10,
            which in 0usize..5, base in -1.0f64..3.0, bump in 0.0f64..2.0,
        ) {
            prop_assume!(a + b > 0 && c + d > 0);
            let ct = T(a, b, c, d);
            let base = if which == 1 || which == 2 { base.abs() } else { base };
            let mk = |v: f64| {
                let mut th = Thresholds::default();
                match which {
                    0 => th.min_sd = Some(v),
                    1 => th.min_gr = Some(v),
                    2 => th.min_ors = Some(v),
                    3 => th.min_lci_gr = Some(v),
                    _ => th.min_lci_ors = Some(v),
                }
                th
            };
            if !check_significance(&ct, &mk(base)) {
                prop_assert!(!check_significance(&ct, &mk(base + bump)));
            }
        }

        #[test]
        fn pvalue_symmetric_under_class_swap(a in 0usize..30, b in 0usize..30, c in 0usize..30, d in 0usize..30) {
            prop_assume!(a + b + c + d > 0);
            let p = association_pvalue(&T(a, b, c, d));
            let q = association_pvalue(&T(c, d, a, b));
            prop_assert!((p - q).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }
}
