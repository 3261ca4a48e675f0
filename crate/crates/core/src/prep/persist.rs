//! On-disk form of a prepared course: a tab separated transaction file
//! (`target<TAB>space separated item ids`) and a JSON sidecar holding the
//! item dictionary, target totals and fitted bin edges.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use super::category::{Category, TargetCounts};
use super::dataset::{CourseDataset, Item, ItemDictionary, ItemId, Transaction};
use super::discretize::FittedBins;
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct SidecarItem {
    id: ItemId,
    attribute: String,
    value: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    course_id: String,
    rows: usize,
    target_totals: BTreeMap<Category, u64>,
    bin_edges: BTreeMap<String, FittedBins<f64>>,
    items: Vec<SidecarItem>,
}

pub fn write_dataset<W1: Write, W2: Write>(
    dataset: &CourseDataset,
    dict: &ItemDictionary,
    mut transactions: W1,
    sidecar: W2,
) -> Result<()> {
    writeln!(transactions, "target\titems")?;
    for t in &dataset.transactions {
        let ids: Vec<String> = t.items.iter().map(|i| i.to_string()).collect();
        writeln!(transactions, "{}\t{}", t.target.name(), ids.join(" "))?;
    }
    transactions.flush()?;

    let side = Sidecar {
        course_id: dataset.course_id.clone(),
        rows: dataset.len(),
        target_totals: dataset.target_totals.iter().collect(),
        bin_edges: dataset.bin_edges.clone(),
        items: dict
            .iter()
            .map(|(id, item)| SidecarItem { id, attribute: item.attribute.clone(), value: item.value.clone() })
            .collect(),
    };
    serde_json::to_writer_pretty(sidecar, &side)?;
    Ok(())
}

/// Reads a dataset back. The returned dictionary reproduces the stored ids.
pub fn read_dataset<R1: Read, R2: Read>(transactions: R1, sidecar: R2) -> Result<(CourseDataset, ItemDictionary)> {
    let side: Sidecar = serde_json::from_reader(sidecar)?;
    let mut dict = ItemDictionary::new();
    for (pos, entry) in side.items.into_iter().enumerate() {
        if entry.id.index() != pos {
            return Err(Error::Format(format!("item ids must be dense, found {} at {pos}", entry.id)));
        }
        dict.intern(Item::new(entry.attribute, entry.value));
    }

    let mut lines = BufReader::new(transactions).lines();
    match lines.next() {
        Some(Ok(h)) if h == "target\titems" => {}
        _ => return Err(Error::Format("missing transaction header".into())),
    }
    let mut out = Vec::new();
    let mut totals = TargetCounts::default();
    for (row, line) in lines.enumerate() {
        let line = line?;
        let (target, ids) = line
            .split_once('\t')
            .ok_or_else(|| Error::Format(format!("row {row}: expected two tab separated fields")))?;
        let target =
            Category::parse(target).ok_or_else(|| Error::Format(format!("row {row}: unknown target {target:?}")))?;
        let mut items = Vec::new();
        for tok in ids.split_whitespace() {
            let id: u32 = tok.parse().map_err(|_| Error::Format(format!("row {row}: bad item id {tok:?}")))?;
            if id as usize >= dict.len() {
                return Err(Error::Format(format!("row {row}: item id {id} not in dictionary")));
            }
            items.push(ItemId(id));
        }
        items.sort_unstable();
        totals[target] += 1;
        out.push(Transaction { items, target });
    }

    let stored: TargetCounts = {
        let mut t = TargetCounts::default();
        for (c, n) in &side.target_totals {
            t[*c] = *n;
        }
        t
    };
    if stored != totals || side.rows != out.len() {
        return Err(Error::Format("sidecar totals do not match the transaction file".into()));
    }
    Ok((
        CourseDataset { course_id: side.course_id, transactions: out, target_totals: totals, bin_edges: side.bin_edges },
        dict,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut dict = ItemDictionary::new();
        let rows = vec![
            (vec![Item::new("g", "H"), Item::new("d", "L")], Category::Certified),
            (vec![], Category::OnlyRegistered),
            (vec![Item::new("d", "H")], Category::OnlyViewed),
        ];
        let mut ds = CourseDataset::from_rows("course/1", rows, &mut dict).unwrap();
        ds.bin_edges.insert("nevents".into(), FittedBins { edges: vec![1.5, 2.5], degenerate: false });

        let (mut tx, mut side) = (Vec::new(), Vec::new());
        write_dataset(&ds, &dict, &mut tx, &mut side).unwrap();
        let (back, back_dict) = read_dataset(tx.as_slice(), side.as_slice()).unwrap();
        assert_eq!(back, ds);
        assert_eq!(back_dict, dict);
    }

    #[test]
    fn rejects_unknown_ids() {
        let side = r#"{"course_id":"c","rows":1,"target_totals":{"Certified":1},"bin_edges":{},"items":[]}"#;
        let tx = "target\titems\nCertified\t4\n";
        assert!(matches!(read_dataset(tx.as_bytes(), side.as_bytes()), Err(Error::Format(_))));
    }
}
