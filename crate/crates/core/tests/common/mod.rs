#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssdps::{generate_synthetic, load_transactions, Thresholds, TwoClassDataset};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn table1() -> TwoClassDataset {
    let text = std::fs::read_to_string(data_path("table1.tct")).unwrap();
    load_transactions(text.as_bytes()).unwrap().0
}

/// A small random dataset and threshold subset, both fixed by `seed`.
pub fn random_instance(seed: u64) -> (TwoClassDataset, Thresholds) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_case = rng.gen_range(1..=10);
    let n_control = rng.gen_range(1..=10);
    let n_items = rng.gen_range(1..=14);
    let density = rng.gen_range(0.2..=0.6);
    let data = generate_synthetic(n_case, n_control, n_items, density, rng.gen()).unwrap();
    let mut pick = |lo: f64, hi: f64| rng.gen_bool(0.5).then(|| rng.gen_range(lo..=hi));
    let thresholds = Thresholds {
        min_sd: pick(0.0, 0.5),
        min_gr: pick(1.0, 3.0),
        min_ors: pick(1.0, 4.0),
        min_lci_gr: pick(0.2, 2.0),
        min_lci_ors: pick(0.2, 2.0),
    };
    (data, thresholds)
}
