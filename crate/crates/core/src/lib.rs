//! Subgroup discovery over per-course learner tables.
//!
//! The pipeline has three stages:
//!
//! * [`ingest`] and [`prep`] load person-course tables, derive the learner
//!   category of every registration and encode each row as a transaction of
//!   discrete `attribute=value` items,
//! * [`mine`] runs a partition-parallel FP-Tree miner whose nodes keep one
//!   counter per category and scores every subgroup by support within the
//!   target and confidence,
//! * [`postprocess`] keeps reliable rules that hold in enough courses and
//!   removes the ones implied by a more general rule.
//!
//! [`oracle`] is an exhaustive reference implementation for small inputs.
//!
//! Measures are generic over [`Scalar`]; [`Rule`] and friends fix it to `f64`
//! and the `Exact*` aliases to reduced fractions.

pub mod error;
pub mod ingest;
pub mod mine;
pub mod num;
pub mod oracle;
pub mod postprocess;
pub mod prep;

pub use error::{Error, Result};
pub use num::{Exact, Scalar, Threshold};
pub use prep::{Category, CourseDataset, Item, ItemDictionary, ItemId};

pub type CourseRule = mine::CourseRule<f64>;
pub type CourseRules = mine::CourseRules<f64>;
pub type Rule = postprocess::Rule<f64>;
pub type RuleSet = postprocess::RuleSet<f64>;

pub type ExactCourseRule = mine::CourseRule<Exact>;
pub type ExactCourseRules = mine::CourseRules<Exact>;
pub type ExactRule = postprocess::Rule<Exact>;
pub type ExactRuleSet = postprocess::RuleSet<Exact>;
