//! Run configuration: defaults, a `key = value` file, then command line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use sdtree_core::mine::MiningConfig;
use sdtree_core::postprocess::RedundancyMode;
use sdtree_core::prep::DiscretizerSpec;
use sdtree_core::{Category, Threshold};

use crate::error::{CliError, Result, Stage};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Tsv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tsv" => Ok(Format::Tsv),
            "json" => Ok(Format::Json),
            other => Err(CliError::Config(format!("unknown format {other:?}, expected tsv or json"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub inputs: Vec<PathBuf>,
    pub min_confidence: Threshold,
    pub min_support_target: Threshold,
    /// `None` means every input course.
    pub min_courses: Option<usize>,
    pub max_antecedent: usize,
    pub bins: usize,
    pub targets: Vec<Category>,
    pub workers: usize,
    /// Counting partitions per course; `None` means one per worker.
    pub partitions: Option<usize>,
    pub format: Format,
    pub output: PathBuf,
    pub seed: u64,
    /// Restrict `OnlyRegistered` to demographic attributes.
    pub demographic_registered: bool,
    pub redundancy: RedundancyMode,
    pub dump_trees: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            inputs: Vec::new(),
            min_confidence: Threshold::new(4, 5).expect("valid"),
            min_support_target: Threshold::new(1, 100).expect("valid"),
            min_courses: None,
            max_antecedent: 3,
            bins: 3,
            targets: Category::ALL.to_vec(),
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            partitions: None,
            format: Format::Tsv,
            output: PathBuf::from("out"),
            seed: 2013,
            demographic_registered: true,
            redundancy: RedundancyMode::MeanConfidence,
            dump_trees: false,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| CliError::Config(format!("{key}: cannot parse {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(CliError::Config(format!("{key}: expected a boolean, got {value:?}"))),
    }
}

fn parse_threshold(key: &str, value: &str) -> Result<Threshold> {
    value.parse().map_err(|e: sdtree_core::Error| CliError::Config(format!("{key}: {e}")))
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

impl PipelineConfig {
    /// Sets one field from its textual form. Keys may use `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        match key.as_str() {
            "inputs" | "input" => self.inputs = list(value).map(PathBuf::from).collect(),
            "min_confidence" => self.min_confidence = parse_threshold(&key, value)?,
            "min_support_target" => self.min_support_target = parse_threshold(&key, value)?,
            "min_courses" => {
                self.min_courses = match value {
                    "" | "all" => None,
                    v => Some(parse(&key, v)?),
                }
            }
            "max_antecedent" => self.max_antecedent = parse(&key, value)?,
            "bins" => self.bins = parse(&key, value)?,
            "targets" => {
                self.targets = list(value)
                    .map(|t| Category::parse(t).ok_or_else(|| CliError::Config(format!("unknown target {t:?}"))))
                    .collect::<Result<_>>()?
            }
            "workers" => self.workers = parse(&key, value)?,
            "partitions" => {
                self.partitions = match value {
                    "" | "auto" => None,
                    v => Some(parse(&key, v)?),
                }
            }
            "format" => self.format = value.parse()?,
            "output" => self.output = PathBuf::from(value),
            "seed" => self.seed = parse(&key, value)?,
            "demographic_registered" => self.demographic_registered = parse_bool(&key, value)?,
            "redundancy" => {
                self.redundancy = match value {
                    "mean-confidence" | "mean_confidence" | "mean" => RedundancyMode::MeanConfidence,
                    "per-course" | "per_course" => RedundancyMode::PerCourse,
                    other => return Err(CliError::Config(format!("unknown redundancy mode {other:?}"))),
                }
            }
            "dump_trees" => self.dump_trees = parse_bool(&key, value)?,
            other => return Err(CliError::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Applies a `key = value` file. Blank lines and `#` comments are skipped.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(Stage::Load, path))?;
        self.apply_text(&text)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", n + 1)))?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
        if self.partitions == Some(0) {
            return Err(CliError::Config("partitions must be at least 1".into()));
        }
        if self.max_antecedent == 0 {
            return Err(CliError::Config("max_antecedent must be at least 1".into()));
        }
        if self.targets.is_empty() {
            return Err(CliError::Config("no targets selected".into()));
        }
        if self.min_courses == Some(0) {
            return Err(CliError::Config("min_courses must be at least 1".into()));
        }
        self.discretizer()?;
        Ok(())
    }

    pub fn discretizer(&self) -> Result<DiscretizerSpec> {
        DiscretizerSpec::with_bins(self.bins).map_err(CliError::core(Stage::Prep))
    }

    pub fn mining(&self) -> MiningConfig {
        let cfg = MiningConfig {
            min_support_target: self.min_support_target,
            min_confidence: self.min_confidence,
            max_antecedent: self.max_antecedent,
            targets: self.targets.clone(),
            allowlist: BTreeMap::new(),
            partitions: self.partitions.unwrap_or(self.workers).max(1),
            dump_trees: self.dump_trees,
        };
        if self.demographic_registered {
            cfg.with_demographic_registered()
        } else {
            cfg
        }
    }

    /// The course threshold for `courses` loaded courses.
    pub fn min_courses_for(&self, courses: usize) -> Result<usize> {
        let k = self.min_courses.unwrap_or(courses);
        if k == 0 || k > courses {
            return Err(CliError::Config(format!("min_courses {k} is not in 1..={courses}")));
        }
        Ok(k)
    }
}
