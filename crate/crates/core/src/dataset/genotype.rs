use std::collections::{HashMap, HashSet};
use std::io::Read;

use super::TwoClassDataset;
use crate::bits::BitSet;
use crate::error::{Error, Result};

/// Item name for SNP `snp` carrying genotype code `code`.
pub fn genotype_item_name(snp: &str, code: u8) -> String {
    format!("{snp}_{code}")
}

/// Expand a genotype matrix into a two-class dataset.
///
/// `matrix` is CSV with a header row (`snp,<individual>,...`); each further
/// row is a SNP id followed by one genotype code in {0,1,2} per individual.
/// `labels` is CSV `individual_id,label` (header optional) with label 1 for
/// cases and 0 for controls. Every SNP yields the three items `<snp>_0`,
/// `<snp>_1` and `<snp>_2`, and each individual holds exactly one of them.
pub fn load_genotype_matrix<M: Read, L: Read>(matrix: M, labels: L) -> Result<TwoClassDataset> {
    let labels = read_labels(labels)?;

    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).trim(csv::Trim::All).from_reader(matrix);
    let header = rdr.headers()?.clone();
    let individuals: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    if individuals.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if individuals.len() != labels.len() {
        return Err(Error::LabelMismatch(format!(
            "{} individual columns but {} labels",
            individuals.len(),
            labels.len()
        )));
    }
    let mut is_case = Vec::with_capacity(individuals.len());
    for ind in &individuals {
        match labels.get(ind) {
            Some(&l) => is_case.push(l),
            None => return Err(Error::LabelMismatch(format!("no label for individual {ind:?}"))),
        }
    }

    // Internal tid order: cases by column order, then controls.
    let mut order: Vec<usize> = (0..individuals.len()).filter(|&j| is_case[j]).collect();
    let n_case = order.len();
    order.extend((0..individuals.len()).filter(|&j| !is_case[j]));
    let n = order.len();
    let mut tid_of_column = vec![0; n];
    for (tid, &col) in order.iter().enumerate() {
        tid_of_column[col] = tid;
    }

    let mut items = Vec::new();
    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        let line = r + 2;
        let snp = record.get(0).unwrap_or_default().to_owned();
        if record.len() != n + 1 {
            return Err(Error::LabelMismatch(format!(
                "line {line}: {} genotype cells, expected {n}",
                record.len().saturating_sub(1)
            )));
        }
        if !seen.insert(snp.clone()) {
            return Err(Error::DuplicateSnp(snp));
        }
        let mut triple = [BitSet::new(n), BitSet::new(n), BitSet::new(n)];
        for (col, cell) in record.iter().skip(1).enumerate() {
            let code = match cell {
                "0" => 0,
                "1" => 1,
                "2" => 2,
                other => return Err(Error::BadGenotype { line, value: other.to_owned() }),
            };
            triple[code].insert(tid_of_column[col]);
        }
        for (code, row) in triple.into_iter().enumerate() {
            items.push(genotype_item_name(&snp, code as u8));
            rows.push(row);
        }
    }
    if items.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let external_ids = order.iter().map(|&c| individuals[c].clone()).collect();
    TwoClassDataset::new(items, n_case, n - n_case, rows, external_ids)
}

fn read_labels<L: Read>(labels: L) -> Result<HashMap<String, bool>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(labels);
    let mut out = HashMap::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != 2 {
            return Err(Error::Malformed(format!("labels line {}: expected `individual_id,label`", r + 1)));
        }
        let is_case = match &record[1] {
            "1" => true,
            "0" => false,
            other if r == 0 && other.eq_ignore_ascii_case("label") => continue,
            other => return Err(Error::MalformedLabel { line: r + 1, label: other.to_owned() }),
        };
        if out.insert(record[0].to_owned(), is_case).is_some() {
            return Err(Error::LabelMismatch(format!("individual {:?} labelled twice", &record[0])));
        }
    }
    Ok(out)
}
