//! Rule tables and the run manifest.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use sdtree_core::postprocess::{PruneSummary, Rule, RuleSet};
use sdtree_core::prep::FittedBins;
use sdtree_core::{Category, CourseDataset, ItemDictionary, Scalar};

use crate::config::{Format, PipelineConfig};
use crate::error::{CliError, Result, Stage};

/// Name an attribute is printed under in rule text.
pub fn display_attribute(attribute: &str) -> &str {
    match attribute {
        "nevents" => "NEvents",
        "ndays_act" => "NDaysAct",
        "nplay_video" => "NPlayVideo",
        "nchapters" => "NChapter",
        "nforum_posts" => "NumberOfPosts",
        other => other,
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(first) => first.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Discretized labels are capitalized, categorical values kept verbatim.
pub fn display_value(attribute: &str, value: &str) -> String {
    match attribute {
        "grade" | "nevents" | "ndays_act" | "nplay_video" | "nchapters" | "nforum_posts" => capitalize(value),
        _ => value.to_string(),
    }
}

pub fn render_rule<T>(rule: &Rule<T>, dict: &ItemDictionary) -> String {
    let parts: Vec<String> = rule
        .antecedent
        .iter()
        .map(|&id| {
            let item = dict.get(id);
            format!("{}={}", display_attribute(&item.attribute), display_value(&item.attribute, &item.value))
        })
        .collect();
    format!("IF {} THEN {}=True", parts.join(" AND "), rule.target.attribute_name())
}

fn raw_antecedent<T>(rule: &Rule<T>, dict: &ItemDictionary) -> String {
    let parts: Vec<String> = rule.antecedent.iter().map(|&id| dict.get(id).to_string()).collect();
    parts.join(";")
}

pub const TSV_HEADER: &str = "rule\tantecedent\ttarget\tsupport_target\tconfidence\tcourses_matched";

/// Tab separated table of one target's rules, in rank order.
pub fn render_tsv<T: Scalar>(rules: &RuleSet<T>, target: Category, dict: &ItemDictionary) -> String {
    let mut out = String::from(TSV_HEADER);
    out.push('\n');
    for r in rules.for_target(target) {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{:.4}\t{:.4}\t{}",
            render_rule(r, dict),
            raw_antecedent(r, dict),
            target,
            r.mean_support_target.to_f64(),
            r.mean_confidence.to_f64(),
            r.courses_matched
        );
    }
    out
}

pub fn render_json<T: Scalar>(rules: &RuleSet<T>, target: Category, dict: &ItemDictionary) -> Value {
    let rows: Vec<Value> = rules
        .for_target(target)
        .map(|r| {
            let antecedent: Vec<Value> = r
                .antecedent
                .iter()
                .map(|&id| {
                    let item = dict.get(id);
                    json!({ "attribute": item.attribute, "value": item.value })
                })
                .collect();
            let per_course: BTreeMap<&str, Value> = r
                .per_course
                .iter()
                .map(|(course, m)| {
                    let v = json!({
                        "joint": m.joint,
                        "ant_total": m.ant_total,
                        "target_total": m.target_total,
                        "support_target": m.support_target.to_f64(),
                        "confidence": m.confidence.to_f64(),
                    });
                    (course.as_str(), v)
                })
                .collect();
            json!({
                "rule": render_rule(r, dict),
                "antecedent": antecedent,
                "mean_support_target": r.mean_support_target.to_f64(),
                "mean_confidence": r.mean_confidence.to_f64(),
                "courses_matched": r.courses_matched,
                "per_course": per_course,
            })
        })
        .collect();
    json!({ "target": target.name(), "rules": rows })
}

/// Table body in the configured format.
pub fn render_table<T: Scalar>(rules: &RuleSet<T>, target: Category, dict: &ItemDictionary, format: Format) -> String {
    match format {
        Format::Tsv => render_tsv(rules, target, dict),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&render_json(rules, target, dict)).expect("plain values");
            s.push('\n');
            s
        }
    }
}

pub fn table_file_name(target: Category, format: Format) -> String {
    let ext = match format {
        Format::Tsv => "tsv",
        Format::Json => "json",
    };
    format!("rules_{}.{ext}", target.name().to_ascii_lowercase())
}

#[derive(Debug, Serialize)]
pub struct CourseSummary {
    pub course_id: String,
    pub rows: usize,
    pub target_totals: BTreeMap<Category, u64>,
    pub bin_edges: BTreeMap<String, FittedBins<f64>>,
}

impl CourseSummary {
    pub fn of(ds: &CourseDataset) -> Self {
        CourseSummary {
            course_id: ds.course_id.clone(),
            rows: ds.len(),
            target_totals: ds.target_totals.iter().collect(),
            bin_edges: ds.bin_edges.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub config: &'a PipelineConfig,
    pub min_courses: usize,
    pub distinct_items: usize,
    pub courses: Vec<CourseSummary>,
    pub prune_summary: &'a PruneSummary,
    pub diagnostics: &'a [String],
    pub tables: Vec<String>,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(CliError::io(Stage::Report, path))
}

/// Writes one table per configured target plus `manifest.json` into `dir`.
/// Returns the written paths, manifest last.
pub fn write_reports<T: Scalar>(
    dir: &Path,
    cfg: &PipelineConfig,
    rules: &RuleSet<T>,
    dict: &ItemDictionary,
    mut manifest: Manifest<'_>,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(CliError::io(Stage::Report, dir))?;
    let mut written = Vec::new();
    let mut targets = cfg.targets.clone();
    targets.sort();
    targets.dedup();
    for target in targets {
        let name = table_file_name(target, cfg.format);
        let path = dir.join(&name);
        write_file(&path, &render_table(rules, target, dict, cfg.format))?;
        manifest.tables.push(name);
        written.push(path);
    }
    let path = dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Core {
        stage: Stage::Report,
        source: e.into(),
    })?;
    text.push('\n');
    write_file(&path, &text)?;
    written.push(path);
    Ok(written)
}
