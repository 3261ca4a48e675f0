use std::collections::HashSet;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use sdtree_core::ingest::{load_course_table, select_and_rename, RawCourseTable, Schema};
use sdtree_core::mine::{mine_course, CourseRules, ShardDump, Workers};
use sdtree_core::postprocess::{postprocess, Postprocessed};
use sdtree_core::prep::{build_transactions, DiscretizerSpec};
use sdtree_core::{Category, CourseDataset, Error, ItemDictionary, Scalar};

use crate::config::PipelineConfig;
use crate::error::{CliError, Result, Stage};
use crate::report::{write_reports, CourseSummary, Manifest};

/// Reads every input file and returns one table per course, in input order.
pub fn load_inputs(paths: &[PathBuf]) -> Result<Vec<RawCourseTable>> {
    if paths.is_empty() {
        return Err(CliError::Config("no input files".into()));
    }
    let schema = Schema::person_course();
    let mut tables = Vec::new();
    let mut seen = HashSet::new();
    for path in paths {
        let file = File::open(path).map_err(CliError::io(Stage::Load, path))?;
        let loaded = load_course_table(BufReader::new(file), &schema).map_err(CliError::core(Stage::Load))?;
        for t in loaded {
            if !seen.insert(t.course_id.clone()) {
                return Err(CliError::Core {
                    stage: Stage::Load,
                    source: Error::Format(format!("course {} appears in more than one input", t.course_id)),
                });
            }
            tables.push(t);
        }
    }
    Ok(tables)
}

/// Courses encoded against one shared dictionary.
#[derive(Debug)]
pub struct Prepared {
    pub dict: ItemDictionary,
    pub datasets: Vec<CourseDataset>,
}

impl Prepared {
    pub fn new() -> Self {
        Prepared { dict: ItemDictionary::new(), datasets: Vec::new() }
    }

    pub fn rows(&self) -> usize {
        self.datasets.iter().map(CourseDataset::len).sum()
    }

    /// Renames, discretizes and encodes one course.
    pub fn add(&mut self, table: &RawCourseTable, spec: &DiscretizerSpec) -> Result<()> {
        let renamed = select_and_rename(table);
        let ds = build_transactions(&renamed, spec, &mut self.dict).map_err(CliError::core(Stage::Prep))?;
        if ds.target_totals.total() != table.rows.len() as u64 {
            return Err(CliError::Invariant {
                stage: Stage::Prep,
                message: format!(
                    "{}: target totals sum to {} for {} rows",
                    ds.course_id,
                    ds.target_totals.total(),
                    table.rows.len()
                ),
            });
        }
        self.datasets.push(ds);
        Ok(())
    }
}

impl Default for Prepared {
    fn default() -> Self {
        Prepared::new()
    }
}

pub fn prepare(tables: &[RawCourseTable], spec: &DiscretizerSpec) -> Result<Prepared> {
    let mut prepared = Prepared::new();
    for t in tables {
        prepared.add(t, spec)?;
    }
    Ok(prepared)
}

/// Result of counting, mining and post-processing a set of courses.
#[derive(Clone, Debug, PartialEq)]
pub struct EngineOutput<T> {
    pub post: Postprocessed<T>,
    pub min_courses: usize,
    /// `(course, target, reason)` for targets a course could not be mined for.
    pub skipped: Vec<(String, Category, String)>,
    pub trees: Vec<(String, ShardDump)>,
}

/// Everything after preparation; the part the benchmark times.
pub fn run_engine<T: Scalar>(
    datasets: &[CourseDataset],
    dict: &ItemDictionary,
    cfg: &PipelineConfig,
    workers: &Workers,
) -> Result<EngineOutput<T>> {
    let min_courses = cfg.min_courses_for(datasets.len())?;
    let mining = cfg.mining();
    let per_course: Vec<CourseRules<T>> = workers
        .map(datasets, |ds| mine_course::<T>(ds, dict, &mining, workers))
        .into_iter()
        .collect::<sdtree_core::Result<_>>()
        .map_err(CliError::core(Stage::Mine))?;

    let mut skipped = Vec::new();
    let mut trees = Vec::new();
    let per_course: Vec<CourseRules<T>> = per_course
        .into_iter()
        .map(|mut c| {
            skipped.extend(c.skipped.iter().map(|(t, why)| (c.course_id.clone(), *t, why.clone())));
            trees.extend(c.trees.drain(..).map(|d| (c.course_id.clone(), d)));
            c
        })
        .collect();

    let post = postprocess(per_course, cfg.min_confidence, min_courses, cfg.redundancy)
        .map_err(CliError::core(Stage::Postprocess))?;
    Ok(EngineOutput { post, min_courses, skipped, trees })
}

/// Human readable notes for the manifest: skipped targets and empty tables.
pub fn diagnostics<T>(out: &EngineOutput<T>, cfg: &PipelineConfig) -> Vec<String> {
    let mut notes: Vec<String> = out.skipped.iter().map(|(c, t, why)| format!("{c}: {t} skipped: {why}")).collect();
    let mut targets = cfg.targets.clone();
    targets.sort();
    targets.dedup();
    for t in targets {
        if out.post.rules.for_target(t).next().is_none() {
            let before = out.post.summary.before.get(&t).copied().unwrap_or(0);
            notes.push(format!(
                "no interesting rule for {t}: {before} rules reached min_courses {} before pruning",
                out.min_courses
            ));
        }
    }
    notes
}

#[derive(Debug)]
pub struct RunReport {
    pub courses: usize,
    pub rows: usize,
    pub rules: usize,
    pub diagnostics: Vec<String>,
    pub written: Vec<PathBuf>,
}

/// Load, prepare, mine, post-process and write every report.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<RunReport> {
    cfg.validate()?;
    let spec = cfg.discretizer()?;
    let tables = load_inputs(&cfg.inputs)?;
    let prepared = prepare(&tables, &spec)?;
    drop(tables);
    let workers = Workers::new(cfg.workers).map_err(CliError::core(Stage::Mine))?;
    let out = run_engine::<f64>(&prepared.datasets, &prepared.dict, cfg, &workers)?;
    let diagnostics = diagnostics(&out, cfg);
    for d in &diagnostics {
        log::warn!("{d}");
    }

    let manifest = Manifest {
        config: cfg,
        min_courses: out.min_courses,
        distinct_items: prepared.dict.len(),
        courses: prepared.datasets.iter().map(CourseSummary::of).collect(),
        prune_summary: &out.post.summary,
        diagnostics: &diagnostics,
        tables: Vec::new(),
    };
    let mut written = write_reports(&cfg.output, cfg, &out.post.rules, &prepared.dict, manifest)?;
    if cfg.dump_trees {
        written.push(write_trees(&cfg.output, &out.trees)?);
    }
    Ok(RunReport {
        courses: prepared.datasets.len(),
        rows: prepared.rows(),
        rules: out.post.rules.len(),
        diagnostics,
        written,
    })
}

fn write_trees(dir: &Path, trees: &[(String, ShardDump)]) -> Result<PathBuf> {
    let mut text = String::new();
    for (course, d) in trees {
        let targets: Vec<&str> = d.targets.iter().map(|t| t.name()).collect();
        text.push_str(&format!("# {course} shard {} targets {}\n", d.key, targets.join(",")));
        text.push_str(&d.text);
    }
    let path = dir.join("trees.txt");
    std::fs::write(&path, text).map_err(CliError::io(Stage::Report, &path))?;
    Ok(path)
}
