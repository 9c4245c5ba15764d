//! Serialization of mined patterns as CSV and JSON rows.

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dataset::{ItemSet, Tidset, TwoClassDataset, VerticalData};
use crate::error::{Error, Result};
use crate::measures::{ContingencyTable, ScoreSet};
use crate::miner::PatternRecord;

pub const CSV_HEADER: [&str; 15] = [
    "items",
    "n_case_tids",
    "n_control_tids",
    "sup_case",
    "sup_control",
    "sd",
    "gr",
    "ors",
    "lci_gr",
    "uci_gr",
    "lci_ors",
    "uci_ors",
    "ci_corrected",
    "case_tids",
    "control_tids",
];

/// A pattern as written to disk: item names and external transaction ids.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputRecordRow {
    pub items: String,
    pub n_case_tids: usize,
    pub n_control_tids: usize,
    #[serde(with = "float")]
    pub sup_case: f64,
    #[serde(with = "float")]
    pub sup_control: f64,
    #[serde(with = "float")]
    pub sd: f64,
    #[serde(with = "float")]
    pub gr: f64,
    #[serde(with = "float")]
    pub ors: f64,
    #[serde(with = "float")]
    pub lci_gr: f64,
    #[serde(with = "float")]
    pub uci_gr: f64,
    #[serde(with = "float")]
    pub lci_ors: f64,
    #[serde(with = "float")]
    pub uci_ors: f64,
    pub ci_corrected: bool,
    pub case_tids: String,
    pub control_tids: String,
}

/// JSON numbers for finite values, `"inf"`/`"-inf"`/`"nan"` strings otherwise.
mod float {
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(&super::format_number(*v))
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(D::Error::custom(format!("not a number: {other:?}"))),
            },
        }
    }
}

/// `%g`-style rendering with 6 significant digits; `inf`, `-inf`, `nan`
/// for non-finite values.
pub fn format_number(v: f64) -> String {
    const SIG: i32 = 6;
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    // The exponent after rounding to SIG digits decides the notation.
    let sci = format!("{:.*e}", (SIG - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..SIG).contains(&exp) {
        let decimals = (SIG - 1 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_owned()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s
    }
}

impl OutputRecordRow {
    pub fn from_record(r: &PatternRecord, data: &TwoClassDataset) -> Self {
        let join_tids = |tids: &[usize]| tids.iter().map(|&t| data.external_id(t)).collect::<Vec<_>>().join(";");
        let s = &r.scores;
        Self {
            items: r.itemset.iter().map(|i| data.item_name(i)).collect::<Vec<_>>().join(";"),
            n_case_tids: r.tidset.pos.len(),
            n_control_tids: r.tidset.neg.len(),
            sup_case: r.table.a as f64 / data.n_case() as f64,
            sup_control: r.table.c as f64 / data.n_control() as f64,
            sd: s.sd,
            gr: s.gr,
            ors: s.ors,
            lci_gr: s.lci_gr,
            uci_gr: s.uci_gr,
            lci_ors: s.lci_ors,
            uci_ors: s.uci_ors,
            ci_corrected: s.corrected_ci,
            case_tids: join_tids(&r.tidset.pos),
            control_tids: join_tids(&r.tidset.neg),
        }
    }

    fn csv_fields(&self) -> Vec<String> {
        let num = format_number;
        vec![
            self.items.clone(),
            self.n_case_tids.to_string(),
            self.n_control_tids.to_string(),
            num(self.sup_case),
            num(self.sup_control),
            num(self.sd),
            num(self.gr),
            num(self.ors),
            num(self.lci_gr),
            num(self.uci_gr),
            num(self.lci_ors),
            num(self.uci_ors),
            self.ci_corrected.to_string(),
            self.case_tids.clone(),
            self.control_tids.clone(),
        ]
    }

    /// Rebuild the internal record, resolving names and ids against `data`.
    pub fn to_record(&self, data: &TwoClassDataset) -> Result<PatternRecord> {
        let tid_of: HashMap<&str, usize> =
            data.external_ids().iter().enumerate().map(|(t, id)| (id.as_str(), t)).collect();
        let split = |s: &str| -> Vec<String> {
            if s.is_empty() {
                Vec::new()
            } else {
                s.split(';').map(str::to_owned).collect()
            }
        };
        let items = split(&self.items)
            .iter()
            .map(|n| data.item_index(n).ok_or_else(|| Error::Malformed(format!("unknown item {n:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let tids = |s: &str| -> Result<Vec<usize>> {
            split(s)
                .iter()
                .map(|id| {
                    tid_of.get(id.as_str()).copied().ok_or_else(|| Error::Malformed(format!("unknown tid {id:?}")))
                })
                .collect()
        };
        let tidset = Tidset::new(tids(&self.case_tids)?, tids(&self.control_tids)?);
        let table =
            ContingencyTable::from_presence(self.n_case_tids, data.n_case(), self.n_control_tids, data.n_control());
        Ok(PatternRecord {
            itemset: ItemSet::new(items),
            tidset,
            table,
            scores: ScoreSet {
                sd: self.sd,
                gr: self.gr,
                ors: self.ors,
                lci_gr: self.lci_gr,
                uci_gr: self.uci_gr,
                lci_ors: self.lci_ors,
                uci_ors: self.uci_ors,
                corrected_ci: self.ci_corrected,
            },
        })
    }
}

pub fn rows(records: &[PatternRecord], data: &TwoClassDataset) -> Vec<OutputRecordRow> {
    records.iter().map(|r| OutputRecordRow::from_record(r, data)).collect()
}

pub fn write_csv<W: Write>(rows: &[OutputRecordRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.csv_fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(rows: &[OutputRecordRow], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    writeln!(out)?;
    Ok(())
}

pub fn read_json(s: &str) -> Result<Vec<OutputRecordRow>> {
    Ok(serde_json::from_str(s)?)
}
