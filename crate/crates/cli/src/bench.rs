//! Single-worker against multi-worker engine timing.

use std::io::Write;
use std::time::Instant;

use sdtree_core::mine::Workers;
use sdtree_core::{CourseDataset, ItemDictionary};

use crate::config::PipelineConfig;
use crate::error::{CliError, Result, Stage};
use crate::pipeline::{run_engine, EngineOutput};

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub courses: usize,
    pub rows: usize,
    pub rules: usize,
    pub sequential_s: Vec<f64>,
    pub parallel_s: Vec<f64>,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

impl BenchRow {
    pub fn sequential_mean(&self) -> f64 {
        mean(&self.sequential_s)
    }

    pub fn parallel_mean(&self) -> f64 {
        mean(&self.parallel_s)
    }

    pub fn speedup(&self) -> f64 {
        self.sequential_mean() / self.parallel_mean()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub workers: usize,
    pub repetitions: usize,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    /// Multi-worker mean strictly below single-worker mean at the largest count.
    pub fn faster_at_largest(&self) -> bool {
        self.rows.last().is_some_and(|r| r.parallel_mean() < r.sequential_mean())
    }

    pub fn write_tsv<W: Write>(&self, mut sink: W) -> std::io::Result<()> {
        writeln!(sink, "courses\trows\trules\tsequential_mean_s\tparallel_mean_s\tspeedup")?;
        for r in &self.rows {
            writeln!(
                sink,
                "{}\t{}\t{}\t{:.6}\t{:.6}\t{:.3}",
                r.courses,
                r.rows,
                r.rules,
                r.sequential_mean(),
                r.parallel_mean(),
                r.speedup()
            )?;
        }
        let verdict = if self.faster_at_largest() { "PASS" } else { "FAIL" };
        let largest = self.rows.last().map_or(0, |r| r.courses);
        writeln!(
            sink,
            "# {verdict}: {} workers vs 1 at {largest} courses, {} repetitions, outputs identical",
            self.workers, self.repetitions
        )
    }
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed().as_secs_f64()))
}

/// For every course count `k`, runs the engine on the first `k` datasets
/// `repetitions` times with one worker and with `cfg.workers`.
/// Any difference between the two outputs is an error.
pub fn run_benchmark(
    datasets: &[CourseDataset],
    dict: &ItemDictionary,
    cfg: &PipelineConfig,
    course_counts: &[usize],
    repetitions: usize,
) -> Result<BenchReport> {
    if repetitions == 0 {
        return Err(CliError::Config("repetitions must be at least 1".into()));
    }
    if cfg.workers < 2 {
        return Err(CliError::Config("the benchmark needs at least 2 workers".into()));
    }
    let single = Workers::sequential();
    let multi = Workers::new(cfg.workers).map_err(CliError::core(Stage::Bench))?;
    // both engines count over the same partitions, only scheduling differs
    let cfg = PipelineConfig { min_courses: None, partitions: Some(cfg.partitions.unwrap_or(cfg.workers)), ..cfg.clone() };

    let mut rows = Vec::with_capacity(course_counts.len());
    for &k in course_counts {
        if k == 0 || k > datasets.len() {
            return Err(CliError::Config(format!("course count {k} is not in 1..={}", datasets.len())));
        }
        let subset = &datasets[..k];
        let mut row = BenchRow {
            courses: k,
            rows: subset.iter().map(CourseDataset::len).sum(),
            rules: 0,
            sequential_s: Vec::new(),
            parallel_s: Vec::new(),
        };
        let mut reference: Option<EngineOutput<f64>> = None;
        for rep in 0..repetitions {
            // alternate which engine goes first so warm-up favours neither
            let ((a, ta), (b, tb)) = if rep % 2 == 0 {
                let a = timed(|| run_engine::<f64>(subset, dict, &cfg, &single))?;
                (a, timed(|| run_engine::<f64>(subset, dict, &cfg, &multi))?)
            } else {
                let b = timed(|| run_engine::<f64>(subset, dict, &cfg, &multi))?;
                (timed(|| run_engine::<f64>(subset, dict, &cfg, &single))?, b)
            };
            if a != b || reference.as_ref().is_some_and(|r| *r != a) {
                return Err(CliError::Invariant {
                    stage: Stage::Bench,
                    message: format!("engine outputs differ at {k} courses, repetition {rep}"),
                });
            }
            row.sequential_s.push(ta);
            row.parallel_s.push(tb);
            row.rules = a.post.rules.len();
            reference.get_or_insert(a);
        }
        log::info!("{k} courses: {:.3}s vs {:.3}s", row.sequential_mean(), row.parallel_mean());
        rows.push(row);
    }
    Ok(BenchReport { workers: multi.count(), repetitions, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::prepare;
    use crate::synth::generate_synthetic;

    #[test]
    fn single_pair() {
        let tables = generate_synthetic(3, 2, 300);
        let cfg = PipelineConfig { workers: 2, ..Default::default() };
        let p = prepare(&tables, &cfg.discretizer().unwrap()).unwrap();
        let report = run_benchmark(&p.datasets, &p.dict, &cfg, &[1, 2], 1).unwrap();
        assert_eq!(report.rows.len(), 2);
        assert_eq!(report.rows[1].rows, 600);
        let mut tsv = Vec::new();
        report.write_tsv(&mut tsv).unwrap();
        let tsv = String::from_utf8(tsv).unwrap();
        assert_eq!(tsv.lines().count(), 4);
        assert!(tsv.lines().last().unwrap().starts_with("# "));
    }

    #[test]
    fn rejects_bad_counts() {
        let cfg = PipelineConfig { workers: 2, ..Default::default() };
        let dict = ItemDictionary::new();
        assert_eq!(run_benchmark(&[], &dict, &cfg, &[1], 1).unwrap_err().exit_code(), 2);
        assert_eq!(run_benchmark(&[], &dict, &cfg, &[], 0).unwrap_err().exit_code(), 2);
    }
}
