use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sdtree_cli::bench::run_benchmark;
use sdtree_cli::error::Result;
use sdtree_cli::pipeline::{load_inputs, prepare, run_pipeline, Prepared};
use sdtree_cli::synth::{generate_course, write_synthetic};
use sdtree_cli::{CliError, PipelineConfig, Stage};
use sdtree_core::ingest::{select_and_rename, write_course_table};
use sdtree_core::prep::persist::write_dataset;

#[derive(Parser)]
#[command(name = "sdtree", version, about = "Subgroup discovery over MOOC learner categories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode course files as transaction files plus item dictionaries
    Prep {
        #[command(flatten)]
        run: RunArgs,
        /// Also write each renamed course table as CSV
        #[arg(long)]
        dump_tables: bool,
    },
    /// Mine, post-process and write one rule table per target
    Mine {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Time the single-worker and multi-worker engines
    Bench {
        #[command(flatten)]
        run: RunArgs,
        /// Course counts to time, e.g. 1,2,4,8,16
        #[arg(long, value_delimiter = ',')]
        course_counts: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        repetitions: usize,
        /// Synthetic courses to generate when no input is given
        #[arg(long, default_value_t = 16)]
        synthetic_courses: usize,
        #[arg(long, default_value_t = 62_500)]
        rows_per_course: usize,
    },
    /// Write synthetic course files
    Synth {
        #[arg(long, default_value_t = 2013)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        courses: usize,
        #[arg(long, default_value_t = 1000)]
        rows_per_course: usize,
        #[arg(long, default_value = "synthetic")]
        output: PathBuf,
    },
}

/// Flags mirror the config file keys; a flag wins over the file.
#[derive(Args)]
struct RunArgs {
    /// Course files; each may hold several courses
    inputs: Vec<PathBuf>,
    /// `key = value` file applied before the flags
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    min_confidence: Option<String>,
    #[arg(long)]
    min_support_target: Option<String>,
    #[arg(long)]
    min_courses: Option<String>,
    #[arg(long)]
    max_antecedent: Option<String>,
    #[arg(long)]
    bins: Option<String>,
    /// Comma separated, e.g. Certified,OnlyViewed
    #[arg(long)]
    targets: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    #[arg(long)]
    partitions: Option<String>,
    /// tsv or json
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    output: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    demographic_registered: Option<String>,
    /// mean-confidence or per-course
    #[arg(long)]
    redundancy: Option<String>,
    #[arg(long)]
    dump_trees: bool,
}

impl RunArgs {
    fn config(&self) -> Result<PipelineConfig> {
        let mut cfg = PipelineConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let flags = [
            ("min_confidence", &self.min_confidence),
            ("min_support_target", &self.min_support_target),
            ("min_courses", &self.min_courses),
            ("max_antecedent", &self.max_antecedent),
            ("bins", &self.bins),
            ("targets", &self.targets),
            ("workers", &self.workers),
            ("partitions", &self.partitions),
            ("format", &self.format),
            ("output", &self.output),
            ("seed", &self.seed),
            ("demographic_registered", &self.demographic_registered),
            ("redundancy", &self.redundancy),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if self.dump_trees {
            cfg.dump_trees = true;
        }
        if !self.inputs.is_empty() {
            cfg.inputs = self.inputs.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(CliError::io(Stage::Report, path))?))
}

fn prep(run: &RunArgs, dump_tables: bool) -> Result<()> {
    let cfg = run.config()?;
    let spec = cfg.discretizer()?;
    let tables = load_inputs(&cfg.inputs)?;
    std::fs::create_dir_all(&cfg.output).map_err(CliError::io(Stage::Report, &cfg.output))?;
    let prepared = prepare(&tables, &spec)?;
    for (i, (table, ds)) in tables.iter().zip(&prepared.datasets).enumerate() {
        let stem = format!("course_{:02}", i + 1);
        let tx = cfg.output.join(format!("{stem}.transactions.tsv"));
        let sidecar = cfg.output.join(format!("{stem}.items.json"));
        write_dataset(ds, &prepared.dict, create(&tx)?, create(&sidecar)?).map_err(CliError::core(Stage::Prep))?;
        if dump_tables {
            let path = cfg.output.join(format!("{stem}.renamed.csv"));
            write_course_table(&select_and_rename(table), create(&path)?).map_err(CliError::core(Stage::Prep))?;
        }
        println!("{}\t{}\t{}", ds.course_id, ds.len(), tx.display());
    }
    Ok(())
}

fn mine(run: &RunArgs) -> Result<()> {
    let cfg = run.config()?;
    let report = run_pipeline(&cfg)?;
    println!("{} courses, {} rows, {} rules", report.courses, report.rows, report.rules);
    for d in &report.diagnostics {
        println!("note: {d}");
    }
    for p in &report.written {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn bench(run: &RunArgs, counts: &[usize], repetitions: usize, synthetic: usize, rows: usize) -> Result<()> {
    let cfg = run.config()?;
    let spec = cfg.discretizer()?;
    let prepared = if cfg.inputs.is_empty() {
        let mut p = Prepared::new();
        for c in 0..synthetic {
            p.add(&generate_course(cfg.seed, c, rows), &spec)?;
        }
        p
    } else {
        prepare(&load_inputs(&cfg.inputs)?, &spec)?
    };
    let counts: Vec<usize> = if counts.is_empty() { (1..=prepared.datasets.len()).collect() } else { counts.to_vec() };
    let report = run_benchmark(&prepared.datasets, &prepared.dict, &cfg, &counts, repetitions)?;

    std::fs::create_dir_all(&cfg.output).map_err(CliError::io(Stage::Bench, &cfg.output))?;
    let path = cfg.output.join("bench.tsv");
    report.write_tsv(create(&path)?).map_err(CliError::io(Stage::Bench, &path))?;
    report.write_tsv(std::io::stdout().lock()).map_err(CliError::io(Stage::Bench, "stdout"))?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Prep { run, dump_tables } => prep(run, *dump_tables),
        Command::Mine { run } => mine(run),
        Command::Bench { run, course_counts, repetitions, synthetic_courses, rows_per_course } => {
            bench(run, course_counts, *repetitions, *synthetic_courses, *rows_per_course)
        }
        Command::Synth { seed, courses, rows_per_course, output } => {
            write_synthetic(*seed, *courses, *rows_per_course, output).map(|paths| {
                for p in paths {
                    println!("{}", p.display());
                }
            })
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sdtree: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
