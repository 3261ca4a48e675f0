use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::category::{derive_category, Category, TargetCounts};
use super::discretize::{fit_equal_width, DiscretizerSpec, FittedBins};
use crate::error::{Error, Result};
use crate::ingest::{RawCourseTable, RawRecord};

/// Dense id of an interned `(attribute, value)` pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ItemId(pub u32);

impl ItemId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Item {
    pub attribute: String,
    pub value: String,
}

impl Item {
    pub fn new(attribute: impl Into<String>, value: impl Into<String>) -> Self {
        Item { attribute: attribute.into(), value: value.into() }
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.attribute, self.value)
    }
}

/// Bijection between items and dense ids, shared by every course of a run so
/// that rules can be joined across courses by id.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ItemDictionary {
    items: Vec<Item>,
    index: HashMap<Item, ItemId>,
}

impl ItemDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, item: Item) -> ItemId {
        if let Some(&id) = self.index.get(&item) {
            return id;
        }
        let id = ItemId(u32::try_from(self.items.len()).expect("fewer than 2^32 items"));
        self.items.push(item.clone());
        self.index.insert(item, id);
        id
    }

    pub fn lookup(&self, item: &Item) -> Option<ItemId> {
        self.index.get(item).copied()
    }

    pub fn get(&self, id: ItemId) -> &Item {
        &self.items[id.index()]
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ItemId, &Item)> {
        self.items.iter().enumerate().map(|(i, item)| (ItemId(i as u32), item))
    }
}

/// Items of one learner (sorted by id, at most one per attribute) and its category.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transaction {
    pub items: Vec<ItemId>,
    pub target: Category,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CourseDataset {
    pub course_id: String,
    pub transactions: Vec<Transaction>,
    pub target_totals: TargetCounts,
    /// Equal-width edges fitted on this course, per attribute.
    pub bin_edges: BTreeMap<String, FittedBins<f64>>,
}

impl CourseDataset {
    /// Builds a dataset from already discrete rows. Used for data that does
    /// not come from a person-course table.
    pub fn from_rows<I, R>(course_id: impl Into<String>, rows: I, dict: &mut ItemDictionary) -> Result<Self>
    where
        I: IntoIterator<Item = (R, Category)>,
        R: IntoIterator<Item = Item>,
    {
        let mut transactions = Vec::new();
        let mut totals = TargetCounts::default();
        for (row, (items, target)) in rows.into_iter().enumerate() {
            let items: Vec<Item> = items.into_iter().collect();
            let t = make_transaction(row, items, target, dict)?;
            totals[t.target] += 1;
            transactions.push(t);
        }
        Ok(CourseDataset {
            course_id: course_id.into(),
            transactions,
            target_totals: totals,
            bin_edges: BTreeMap::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }
}

fn make_transaction(row: usize, items: Vec<Item>, target: Category, dict: &mut ItemDictionary) -> Result<Transaction> {
    for (i, item) in items.iter().enumerate() {
        if Category::is_reserved_attribute(&item.attribute) {
            return Err(Error::InvalidRecord {
                row,
                reason: format!("attribute {:?} is a target name", item.attribute),
            });
        }
        if items[..i].iter().any(|o| o.attribute == item.attribute) {
            return Err(Error::InvalidRecord {
                row,
                reason: format!("attribute {:?} appears twice", item.attribute),
            });
        }
    }
    let mut ids: Vec<ItemId> = items.into_iter().map(|it| dict.intern(it)).collect();
    ids.sort_unstable();
    Ok(Transaction { items: ids, target })
}

fn count_of(record: &RawRecord, attribute: &str) -> Option<u64> {
    match attribute {
        "nevents" => record.nevents,
        "ndays_act" => record.ndays_act,
        "nplay_video" => record.nplay_video,
        "nchapters" => record.nchapters,
        "nforum_posts" => record.nforum_posts,
        _ => None,
    }
}

fn numeric_of(record: &RawRecord, attribute: &str) -> Option<f64> {
    match attribute {
        "age" | "YoB" => record.age.map(f64::from),
        "grade" => record.grade,
        other => count_of(record, other).map(|v| v as f64),
    }
}

fn flag_value(b: bool) -> &'static str {
    if b {
        "True"
    } else {
        "False"
    }
}

/// Turns a renamed course table into transactions.
///
/// Equal-width edges are fitted on this table alone, ignoring missing values,
/// and must see the whole course before any row is labelled. Missing values
/// produce no item.
pub fn build_transactions(table: &RawCourseTable, spec: &DiscretizerSpec, dict: &mut ItemDictionary) -> Result<CourseDataset> {
    spec.validate()?;

    let mut bin_edges = BTreeMap::new();
    for attribute in &spec.auto_attributes {
        let values: Vec<f64> = table.rows.iter().filter_map(|r| numeric_of(r, attribute)).collect();
        match fit_equal_width(&values, spec.bins) {
            Ok(fit) => {
                bin_edges.insert(attribute.clone(), fit);
            }
            Err(Error::EmptyFit { .. }) => {
                log::debug!("{}: no values for {attribute}, no items emitted", table.course_id);
            }
            Err(e) => return Err(e),
        }
    }

    let mut transactions = Vec::with_capacity(table.rows.len());
    let mut totals = TargetCounts::default();
    for (row, record) in table.rows.iter().enumerate() {
        let target = derive_category(record.registered, record.viewed, record.explored, record.certified)
            .map_err(|_| Error::InvalidRecord { row, reason: "registered flag is false".into() })?;

        let mut items = Vec::with_capacity(16);
        let categorical = [
            ("countryName", &record.country_name),
            ("LoE", &record.loe),
            ("gender", &record.gender),
        ];
        for (attribute, value) in categorical {
            if let Some(v) = value {
                items.push(Item::new(attribute, v.as_str()));
            }
        }
        for (attribute, cuts) in &spec.manual_cuts {
            if let Some(v) = numeric_of(record, attribute) {
                items.push(Item::new(attribute.as_str(), cuts.label(v)));
            }
        }
        for attribute in &spec.auto_attributes {
            if let (Some(fit), Some(v)) = (bin_edges.get(attribute), numeric_of(record, attribute)) {
                items.push(Item::new(attribute.as_str(), fit.label(v, &spec.bin_labels)));
            }
        }
        items.push(Item::new("viewed", flag_value(record.viewed)));
        items.push(Item::new("explored", flag_value(record.explored)));
        items.push(Item::new("certified", flag_value(record.certified)));

        let t = make_transaction(row, items, target, dict)?;
        totals[target] += 1;
        transactions.push(t);
    }

    Ok(CourseDataset {
        course_id: table.course_id.clone(),
        transactions,
        target_totals: totals,
        bin_edges,
    })
}
