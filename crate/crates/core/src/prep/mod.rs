//! Category derivation, discretization and transaction encoding.

mod category;
mod dataset;
pub mod discretize;
pub mod persist;

pub use category::{derive_category, Category, TargetCounts};
pub use dataset::{build_transactions, CourseDataset, Item, ItemDictionary, ItemId, Transaction};
pub use discretize::{apply_equal_width, fit_equal_width, DiscretizerSpec, FittedBins, ManualCuts};
