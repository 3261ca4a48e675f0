//! Manual cut points and per-course equal-width binning.
//!
//! Every interval is half-open, `[lo, hi)`, except the top one which is closed
//! above so the observed maximum lands in the last bin.

use std::collections::BTreeMap;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fixed cut points with one label per interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManualCuts<T> {
    cuts: Vec<T>,
    labels: Vec<String>,
}

impl<T: Float> ManualCuts<T> {
    /// `cuts` must be strictly ascending and `labels.len() == cuts.len() + 1`.
    pub fn new(cuts: Vec<T>, labels: Vec<String>) -> Result<Self> {
        if cuts.is_empty() {
            return Err(Error::Discretizer("manual discretizer needs at least one cut".into()));
        }
        if cuts.iter().any(|c| !c.is_finite()) || cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Discretizer("cut points must be finite and strictly ascending".into()));
        }
        if labels.len() != cuts.len() + 1 {
            return Err(Error::Discretizer(format!(
                "{} cut points need {} labels, got {}",
                cuts.len(),
                cuts.len() + 1,
                labels.len()
            )));
        }
        Ok(ManualCuts { cuts, labels })
    }

    pub fn cuts(&self) -> &[T] {
        &self.cuts
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, value: T) -> &str {
        apply_equal_width(value, &self.cuts, &self.labels)
    }
}

/// Year-of-birth bands.
pub fn age_cuts() -> ManualCuts<f64> {
    let labels = [">54", "45-54", "35-44", "25-34", "18-24", "<18"];
    ManualCuts::new(
        vec![1963.0, 1973.0, 1983.0, 1993.0, 1999.0],
        labels.iter().map(|s| s.to_string()).collect(),
    )
    .expect("static cut points")
}

/// Single cut at one half.
pub fn grade_cuts() -> ManualCuts<f64> {
    ManualCuts::new(vec![0.5], vec!["low".into(), "high".into()]).expect("static cut points")
}

/// Edges fitted on one attribute of one course.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FittedBins<T> {
    pub edges: Vec<T>,
    /// All observed values were equal; everything falls in the lowest bin.
    pub degenerate: bool,
}

impl<T: Float> FittedBins<T> {
    pub fn bin(&self, value: T) -> usize {
        if self.degenerate {
            0
        } else {
            bin_index(value, &self.edges)
        }
    }

    pub fn label<'a>(&self, value: T, labels: &'a [String]) -> &'a str {
        &labels[self.bin(value).min(labels.len() - 1)]
    }
}

/// Equal-width edges at `min + k * (max - min) / bins` for `k = 1..bins`.
pub fn fit_equal_width<T: Float>(values: &[T], bins: usize) -> Result<FittedBins<T>> {
    if bins < 2 {
        return Err(Error::Discretizer(format!("equal-width needs at least 2 bins, got {bins}")));
    }
    let mut it = values.iter().copied().filter(|v| !v.is_nan());
    let first = it.next().ok_or_else(|| Error::EmptyFit { attribute: String::new() })?;
    let (min, max) = it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let n = T::from(bins).expect("bin count fits the scalar type");
    let width = (max - min) / n;
    let edges = (1..bins)
        .map(|k| min + width * T::from(k).expect("bin index fits the scalar type"))
        .collect();
    Ok(FittedBins { edges, degenerate: max == min })
}

/// Label of the interval containing `value`, given ascending `edges` and
/// `edges.len() + 1` labels.
pub fn apply_equal_width<'a, T: PartialOrd + Copy, L: AsRef<str>>(value: T, edges: &[T], labels: &'a [L]) -> &'a str {
    labels[bin_index(value, edges).min(labels.len() - 1)].as_ref()
}

fn bin_index<T: PartialOrd + Copy>(value: T, edges: &[T]) -> usize {
    edges.partition_point(|e| *e <= value)
}

/// How each numeric attribute is turned into labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretizerSpec {
    pub manual_cuts: BTreeMap<String, ManualCuts<f64>>,
    pub auto_attributes: Vec<String>,
    pub bins: usize,
    pub bin_labels: Vec<String>,
}

pub const AUTO_ATTRIBUTES: [&str; 5] = ["nevents", "ndays_act", "nplay_video", "nchapters", "nforum_posts"];

impl DiscretizerSpec {
    /// `bins` equal-width bins; the default labels are only valid for three.
    pub fn with_bins(bins: usize) -> Result<Self> {
        let labels = match bins {
            3 => vec!["low".into(), "medium".into(), "high".into()],
            n => (0..n).map(|k| format!("bin{k}")).collect(),
        };
        let spec = DiscretizerSpec { bins, bin_labels: labels, ..DiscretizerSpec::default() };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bins < 2 {
            return Err(Error::Discretizer(format!("bins must be at least 2, got {}", self.bins)));
        }
        if self.bin_labels.len() != self.bins {
            return Err(Error::Discretizer(format!(
                "{} bins need {} labels, got {}",
                self.bins,
                self.bins,
                self.bin_labels.len()
            )));
        }
        for (name, cuts) in &self.manual_cuts {
            if cuts.labels.len() != cuts.cuts.len() + 1 {
                return Err(Error::Discretizer(format!("bad label count for {name}")));
            }
        }
        Ok(())
    }
}

impl Default for DiscretizerSpec {
    fn default() -> Self {
        let mut manual_cuts = BTreeMap::new();
        manual_cuts.insert("age".to_string(), age_cuts());
        manual_cuts.insert("grade".to_string(), grade_cuts());
        DiscretizerSpec {
            manual_cuts,
            auto_attributes: AUTO_ATTRIBUTES.iter().map(|s| s.to_string()).collect(),
            bins: 3,
            bin_labels: vec!["low".into(), "medium".into(), "high".into()],
        }
    }
}
