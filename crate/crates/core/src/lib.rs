//! Mining statistically significant discriminative closed patterns from
//! two-class (case/control) transaction data.
//!
//! A pattern is reported when its discriminance scores (support
//! difference, growth rate, odds ratio) and the lower bounds of their 95%
//! confidence intervals clear user thresholds. The search enumerates
//! tidsets rather than itemsets, which makes those measures anti-monotone
//! along each branch and lets failing branches be cut early.
//!
//! ```
//! use ssdps::{load_transactions, mine, MinerConfig, Thresholds};
//!
//! let text = "1 a b c\n1 a b\n1 b c\n0 b\n0 a c\n";
//! let (data, _warnings) = load_transactions(text.as_bytes()).unwrap();
//! let cfg = MinerConfig::with_thresholds(Thresholds { min_ors: Some(1.5), ..Default::default() });
//! let (patterns, stats) = mine(&data, &cfg).unwrap();
//! assert_eq!(stats.patterns_emitted as usize, patterns.len());
//! ```

pub mod bits;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod galois;
pub mod measures;
pub mod miner;
pub mod oracle;
pub mod output;

pub use dataset::{
    generate_synthetic, load_genotype_matrix, load_transactions, reduced_dataset, write_transactions, ItemSet,
    ReducedDataset, Tidset, TwoClassDataset, VerticalData,
};
pub use error::{Error, Result};
pub use measures::{check_significance, ContingencyTable, ScoreSet, Thresholds};
pub use miner::{mine, mine_traced, MineStats, MinerConfig, PatternRecord};
pub use oracle::{enumerate_closed, mine_oracle};
