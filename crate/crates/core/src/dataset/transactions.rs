use std::io::{BufRead, Write};

use super::{Builder, TwoClassDataset, VerticalData};
use crate::error::{Error, Result};

/// Parse the whitespace-separated transaction format:
///
/// ```text
/// # comment
/// 1 a b c
/// 0 b d
/// ```
///
/// Label `1` marks a case, `0` a control. Duplicate items on a line
/// collapse. External ids are the 1-based positions of the transaction
/// lines. Returns the dataset and any warnings (e.g. empty transactions).
pub fn load_transactions<R: BufRead>(reader: R) -> Result<(TwoClassDataset, Vec<String>)> {
    let mut builder = Builder::default();
    let mut warnings = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let label = tokens.next().unwrap_or_default();
        let is_case = match label {
            "1" => true,
            "0" => false,
            other => return Err(Error::MalformedLabel { line: lineno + 1, label: other.to_owned() }),
        };
        let mut items: Vec<&str> = tokens.collect();
        if items.is_empty() {
            warnings.push(format!("line {}: empty transaction", lineno + 1));
        }
        let mut seen = std::collections::HashSet::new();
        items.retain(|i| seen.insert(*i));
        let id = (builder.len() + 1).to_string();
        builder.push_with_id(is_case, id, items.into_iter());
    }
    if builder.len() == 0 {
        return Err(Error::EmptyDataset);
    }
    Ok((builder.finish_with_collected_ids(), warnings))
}

/// Write `data` in the transaction format, cases first, items in id order.
pub fn write_transactions<W: Write>(data: &TwoClassDataset, mut out: W) -> Result<()> {
    for tid in 0..data.n() {
        let label = if data.is_case(tid) { '1' } else { '0' };
        write!(out, "{label}")?;
        for item in data.transaction(tid) {
            write!(out, " {}", data.item_name(item))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;
    use crate::bits::BitSet;
    use proptest::prelude::*;

    #[test]
    fn table1_shape() {
        let d = table1();
        assert_eq!((d.n_case(), d.n_control(), d.n_items()), (5, 4, 10));
        assert_eq!(d.items(), ["a", "b", "c", "f", "i", "j", "e", "g", "h", "d"]);
        assert_eq!(d.external_id(5), "6");
    }

    #[test]
    fn empty_stream_is_an_error() {
        assert!(matches!(load_transactions("".as_bytes()), Err(Error::EmptyDataset)));
        assert!(matches!(load_transactions("# only\n".as_bytes()), Err(Error::EmptyDataset)));
    }

    #[test]
    fn duplicate_tokens_collapse() {
        let (d, _) = load_transactions("1 a a b\n0 b\n".as_bytes()).unwrap();
        assert_eq!(d.transaction(0), vec![0, 1]);
        assert_eq!(d.row(0).count(), 1);
    }

    #[test]
    fn bad_label() {
        let err = load_transactions("1 a\n2 b\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::MalformedLabel { line: 2, .. }), "{err}");
    }

    #[test]
    fn label_only_line_warns() {
        let (d, w) = load_transactions("1 a\n0\n".as_bytes()).unwrap();
        assert_eq!(d.n_control(), 1);
        assert_eq!(w.len(), 1);
    }

    #[test]
    fn controls_first_in_file_still_get_high_tids() {
        let (d, _) = load_transactions("0 x\n1 y\n".as_bytes()).unwrap();
        assert_eq!(d.external_ids(), ["2", "1"]);
        assert!(d.row(d.item_index("y").unwrap()).contains(0));
    }

    proptest! {
        #[test]
        fn write_then_load_preserves_matrix(
            cases in proptest::collection::vec(proptest::collection::vec(0usize..8, 0..6), 1..6),
            controls in proptest::collection::vec(proptest::collection::vec(0usize..8, 0..6), 1..6),
        ) {
            let name = |t: &Vec<usize>| t.iter().map(|i| format!("it{i}")).collect::<Vec<_>>();
            let d = TwoClassDataset::from_transactions(
                &cases.iter().map(name).collect::<Vec<_>>(),
                &controls.iter().map(name).collect::<Vec<_>>(),
            );
            let mut buf = Vec::new();
            write_transactions(&d, &mut buf).unwrap();
            let (back, _) = load_transactions(buf.as_slice()).unwrap();
            prop_assert_eq!(back.items(), d.items());
            let rows: Vec<&BitSet> = (0..d.n_items()).map(|i| d.row(i)).collect();
            let back_rows: Vec<&BitSet> = (0..back.n_items()).map(|i| back.row(i)).collect();
            prop_assert_eq!(rows, back_rows);
        }
    }
}
