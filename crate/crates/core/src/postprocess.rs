//! Confidence filtering, cross-course join, redundancy pruning and ranking.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mine::{CourseRule, CourseRules};
use crate::num::{mean, Scalar, Threshold};
use crate::prep::{Category, ItemId};

/// Measures of a rule on one course.
#[derive(Clone, Debug, PartialEq)]
pub struct CourseMeasure<T> {
    pub joint: u64,
    pub ant_total: u64,
    pub target_total: u64,
    pub support_target: T,
    pub confidence: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rule<T> {
    /// Sorted by item id.
    pub antecedent: Vec<ItemId>,
    pub target: Category,
    pub per_course: BTreeMap<String, CourseMeasure<T>>,
    pub mean_support_target: T,
    pub mean_confidence: T,
    pub courses_matched: usize,
}

impl<T: Scalar> Rule<T> {
    fn from_courses(antecedent: Vec<ItemId>, target: Category, per_course: BTreeMap<String, CourseMeasure<T>>) -> Self {
        Rule {
            mean_support_target: mean(per_course.values().map(|m| m.support_target)),
            mean_confidence: mean(per_course.values().map(|m| m.confidence)),
            courses_matched: per_course.len(),
            antecedent,
            target,
            per_course,
        }
    }
}

/// Rules in rank order: target, then mean confidence and mean support
/// descending, then shorter antecedents, then antecedent ids.
#[derive(Clone, Debug, PartialEq)]
pub struct RuleSet<T> {
    pub rules: Vec<Rule<T>>,
}

impl<T> RuleSet<T> {
    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn for_target(&self, target: Category) -> impl Iterator<Item = &Rule<T>> {
        self.rules.iter().filter(move |r| r.target == target)
    }
}

/// How a general rule is compared with a more specific one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RedundancyMode {
    /// Compare mean confidence over the matched courses.
    #[default]
    MeanConfidence,
    /// The general rule must be at least as confident in every course the
    /// specific rule matched.
    PerCourse,
}

/// Keeps rules whose confidence on their course is at least `tau`.
pub fn filter_confidence<T>(rules: Vec<CourseRule<T>>, tau: Threshold) -> Vec<CourseRule<T>> {
    rules.into_iter().filter(|r| tau.admits(r.joint, r.ant_total)).collect()
}

/// Joins per-course rules by `(antecedent, target)`; a pair survives when it
/// appears in at least `min_courses` courses. Means are over matched courses.
pub fn cross_course_join<T: Scalar>(per_course: &[CourseRules<T>], min_courses: usize) -> Result<Vec<Rule<T>>> {
    if min_courses == 0 || min_courses > per_course.len() {
        return Err(Error::Config(format!(
            "min_courses must be in 1..={}, got {min_courses}",
            per_course.len()
        )));
    }
    let mut joined: BTreeMap<(Category, Vec<ItemId>), BTreeMap<String, CourseMeasure<T>>> = BTreeMap::new();
    for course in per_course {
        for r in &course.rules {
            let measure = CourseMeasure {
                joint: r.joint,
                ant_total: r.ant_total,
                target_total: r.target_total,
                support_target: r.support_target,
                confidence: r.confidence,
            };
            let entry = joined.entry((r.target, r.antecedent.clone())).or_default();
            if entry.insert(course.course_id.clone(), measure).is_some() {
                return Err(Error::Config(format!("course {:?} appears twice", course.course_id)));
            }
        }
    }
    Ok(joined
        .into_iter()
        .filter(|(_, courses)| courses.len() >= min_courses)
        .map(|((target, antecedent), courses)| Rule::from_courses(antecedent, target, courses))
        .collect())
}

fn generalizes<T: Scalar>(general: &Rule<T>, specific: &Rule<T>, mode: RedundancyMode) -> bool {
    match mode {
        RedundancyMode::MeanConfidence => general.mean_confidence >= specific.mean_confidence,
        RedundancyMode::PerCourse => specific.per_course.iter().all(|(course, m)| {
            general.per_course.get(course).is_some_and(|g| g.confidence >= m.confidence)
        }),
    }
}

/// Removes every rule that has a kept, strictly more general rule (proper
/// subset antecedent, same target) with greater or equal confidence. Rules are
/// visited by ascending antecedent size.
pub fn prune_redundant<T: Scalar>(rules: Vec<Rule<T>>, mode: RedundancyMode) -> RuleSet<T> {
    let mut order: Vec<Rule<T>> = rules;
    order.sort_by(|a, b| a.antecedent.len().cmp(&b.antecedent.len()).then_with(|| a.antecedent.cmp(&b.antecedent)));

    let mut kept: Vec<Rule<T>> = Vec::new();
    let mut index: HashMap<(Category, Vec<ItemId>), usize> = HashMap::new();
    for rule in order {
        let redundant = proper_subsets(&rule.antecedent).any(|sub| {
            index.get(&(rule.target, sub)).is_some_and(|&k| generalizes(&kept[k], &rule, mode))
        });
        if !redundant {
            index.insert((rule.target, rule.antecedent.clone()), kept.len());
            kept.push(rule);
        }
    }
    rank(kept)
}

/// Non-empty proper subsets of a sorted antecedent. Antecedents are short
/// (a handful of items), so this is cheap compared with a pairwise scan.
fn proper_subsets(items: &[ItemId]) -> impl Iterator<Item = Vec<ItemId>> + '_ {
    let n = items.len().min(20);
    let full = (1u32 << n) - 1;
    (1..full).map(move |mask| (0..n).filter(|b| mask & (1 << b) != 0).map(|b| items[b]).collect())
}

fn cmp_desc<T: PartialOrd>(a: &T, b: &T) -> Ordering {
    b.partial_cmp(a).unwrap_or(Ordering::Equal)
}

pub fn rank<T: Scalar>(mut rules: Vec<Rule<T>>) -> RuleSet<T> {
    rules.sort_by(|a, b| {
        a.target
            .cmp(&b.target)
            .then_with(|| cmp_desc(&a.mean_confidence, &b.mean_confidence))
            .then_with(|| cmp_desc(&a.mean_support_target, &b.mean_support_target))
            .then_with(|| a.antecedent.len().cmp(&b.antecedent.len()))
            .then_with(|| a.antecedent.cmp(&b.antecedent))
    });
    RuleSet { rules }
}

/// Rule counts per target before and after pruning.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneSummary {
    pub before: BTreeMap<Category, usize>,
    pub after: BTreeMap<Category, usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Postprocessed<T> {
    pub rules: RuleSet<T>,
    pub summary: PruneSummary,
}

/// Confidence filter, cross-course join, pruning and ranking in one call.
pub fn postprocess<T: Scalar>(
    per_course: Vec<CourseRules<T>>,
    tau: Threshold,
    min_courses: usize,
    mode: RedundancyMode,
) -> Result<Postprocessed<T>> {
    let filtered: Vec<CourseRules<T>> = per_course
        .into_iter()
        .map(|c| CourseRules { rules: filter_confidence(c.rules, tau), ..c })
        .collect();
    let joined = cross_course_join(&filtered, min_courses)?;
    let mut summary = PruneSummary::default();
    for r in &joined {
        *summary.before.entry(r.target).or_insert(0) += 1;
    }
    let rules = prune_redundant(joined, mode);
    for r in &rules.rules {
        *summary.after.entry(r.target).or_insert(0) += 1;
    }
    Ok(Postprocessed { rules, summary })
}
