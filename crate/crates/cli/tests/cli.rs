use std::path::Path;
use std::process::Command;

use sdtree_cli::pipeline::{prepare, run_engine, run_pipeline};
use sdtree_cli::report::{render_table, render_tsv, TSV_HEADER};
use sdtree_cli::synth::{generate_synthetic, write_synthetic};
use sdtree_cli::{Format, PipelineConfig};
use sdtree_core::mine::Workers;
use sdtree_core::oracle::{enumerate_subgroups, join_reference, prune_redundant_reference, OracleConfig};
use sdtree_core::postprocess::rank;
use sdtree_core::{Category, Exact, Threshold};

fn sdtree() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sdtree"))
}

#[test]
fn tiny_course_at_zero_confidence_matches_oracle() {
    let tables = generate_synthetic(11, 1, 250);
    let cfg = PipelineConfig { min_confidence: Threshold::ZERO, workers: 1, ..Default::default() };
    let p = prepare(&tables, &cfg.discretizer().unwrap()).unwrap();
    let out = run_engine::<Exact>(&p.datasets, &p.dict, &cfg, &Workers::sequential()).unwrap();

    let mining = cfg.mining();
    let ocfg = OracleConfig {
        max_antecedent: mining.max_antecedent,
        min_support_target: mining.min_support_target,
        min_confidence: Threshold::ZERO,
        targets: mining.targets.clone(),
        allowlist: mining.allowlist.clone(),
    };
    let ds = &p.datasets[0];
    let rules = enumerate_subgroups::<Exact>(ds, &p.dict, &ocfg).unwrap();
    let joined = join_reference(&[(ds.course_id.clone(), rules)], 1);
    let expected = rank(prune_redundant_reference(&joined).unwrap());

    assert!(!expected.is_empty());
    assert_eq!(out.post.rules, expected);
    for t in Category::ALL {
        assert_eq!(render_tsv(&out.post.rules, t, &p.dict), render_tsv(&expected, t, &p.dict));
    }
}

#[test]
fn pipeline_writes_tables_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = write_synthetic(5, 3, 400, &dir.path().join("in")).unwrap();
    let out = dir.path().join("out");
    let cfg = PipelineConfig { inputs, output: out.clone(), workers: 2, ..Default::default() };
    let report = run_pipeline(&cfg).unwrap();
    assert_eq!((report.courses, report.rows), (3, 1200));
    assert_eq!(report.written.len(), 5);

    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["min_courses"], 3);
    let courses = manifest["courses"].as_array().unwrap();
    assert_eq!(courses.len(), 3);
    for c in courses {
        let totals: u64 = c["target_totals"].as_object().unwrap().values().map(|v| v.as_u64().unwrap()).sum();
        assert_eq!(totals, 400);
        assert_eq!(c["bin_edges"]["nevents"]["edges"].as_array().unwrap().len(), 2);
    }
    let certified = std::fs::read_to_string(out.join("rules_certified.tsv")).unwrap();
    assert!(certified.starts_with(TSV_HEADER));
    assert!(certified.lines().skip(1).all(|l| l.starts_with("IF ") && l.contains(" THEN certified=True\t")));
}

#[test]
fn empty_target_gives_header_only_table_and_note() {
    let tables = generate_synthetic(5, 2, 300);
    let cfg = PipelineConfig { min_confidence: Threshold::new(1, 1).unwrap(), workers: 1, ..Default::default() };
    let p = prepare(&tables, &cfg.discretizer().unwrap()).unwrap();
    let out = run_engine::<f64>(&p.datasets, &p.dict, &cfg, &Workers::sequential()).unwrap();
    assert_eq!(out.post.rules.for_target(Category::OnlyRegistered).count(), 0);
    assert_eq!(render_tsv(&out.post.rules, Category::OnlyRegistered, &p.dict), format!("{TSV_HEADER}\n"));
    let notes = sdtree_cli::pipeline::diagnostics(&out, &cfg);
    assert!(notes.iter().any(|n| n.contains("OnlyRegistered")));
}

#[test]
fn fewer_required_courses_keep_more_rules() {
    let tables = generate_synthetic(9, 4, 300);
    let base = PipelineConfig { workers: 1, ..Default::default() };
    let p = prepare(&tables, &base.discretizer().unwrap()).unwrap();
    let count = |k| {
        let cfg = PipelineConfig { min_courses: Some(k), ..base.clone() };
        run_engine::<f64>(&p.datasets, &p.dict, &cfg, &Workers::sequential()).unwrap().post.summary.before.values().sum::<usize>()
    };
    assert!(count(1) >= count(2));
    assert!(count(2) >= count(4));
    let cfg = PipelineConfig { min_courses: Some(5), ..base.clone() };
    assert_eq!(run_engine::<f64>(&p.datasets, &p.dict, &cfg, &Workers::sequential()).unwrap_err().exit_code(), 2);
}

#[test]
fn json_tables_carry_per_course_detail() {
    let tables = generate_synthetic(2, 2, 300);
    let cfg = PipelineConfig { workers: 1, format: Format::Json, ..Default::default() };
    let p = prepare(&tables, &cfg.discretizer().unwrap()).unwrap();
    let out = run_engine::<f64>(&p.datasets, &p.dict, &cfg, &Workers::sequential()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&render_table(&out.post.rules, Category::OnlyViewed, &p.dict, Format::Json)).unwrap();
    assert_eq!(v["target"], "OnlyViewed");
    let rules = v["rules"].as_array().unwrap();
    assert!(!rules.is_empty());
    for r in rules {
        assert_eq!(r["per_course"].as_object().unwrap().len(), r["courses_matched"].as_u64().unwrap() as usize);
        assert!(r["mean_confidence"].as_f64().unwrap() >= 0.8);
    }
}

fn run(cmd: &mut Command) -> (i32, String) {
    let out = cmd.output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn binary_subcommands_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    for sub in ["a", "b"] {
        let (code, err) = run(sdtree().args(["synth", "--seed", "4", "--courses", "2", "--rows-per-course", "200", "--output"]).arg(d.join(sub)));
        assert_eq!(code, 0, "{err}");
    }
    assert_eq!(read_dir_sorted(&d.join("a")), read_dir_sorted(&d.join("b")));
    let first = std::fs::read_to_string(d.join("a/course_01.csv")).unwrap();
    assert_eq!(first.lines().count(), 201);

    let inputs = [d.join("a/course_01.csv"), d.join("a/course_02.csv")];
    let (code, err) = run(sdtree().arg("mine").args(&inputs).args(["--workers", "2", "--format", "json", "--output"]).arg(d.join("out")));
    assert_eq!(code, 0, "{err}");
    assert!(d.join("out/rules_certified.json").exists());
    assert!(d.join("out/manifest.json").exists());

    std::fs::write(d.join("run.conf"), "min_confidence = 0.9\nworkers = 1\n").unwrap();
    let (code, err) = run(sdtree().arg("mine").args(&inputs).arg("--config").arg(d.join("run.conf")).arg("--output").arg(d.join("out2")));
    assert_eq!(code, 0, "{err}");
    let manifest = std::fs::read_to_string(d.join("out2/manifest.json")).unwrap();
    assert!(manifest.contains("\"min_confidence\": 0.9"));

    let (code, _) = run(sdtree().arg("mine").args(&inputs).args(["--min-confidence", "1.5"]));
    assert_eq!(code, 2);
    let (code, _) = run(sdtree().args(["mine", "--output"]).arg(d.join("x")).arg(d.join("missing.csv")));
    assert_eq!(code, 3);
    std::fs::write(d.join("bad.csv"), "course_id,registered\nX,1\n").unwrap();
    let (code, err) = run(sdtree().arg("mine").arg(d.join("bad.csv")));
    assert_eq!(code, 3);
    assert!(err.contains("load:"), "{err}");

    let (code, err) = run(sdtree().arg("prep").args(&inputs).arg("--dump-tables").arg("--output").arg(d.join("prep")));
    assert_eq!(code, 0, "{err}");
    assert!(d.join("prep/course_02.transactions.tsv").exists());
    assert!(d.join("prep/course_02.items.json").exists());
    let renamed = std::fs::read_to_string(d.join("prep/course_01.renamed.csv")).unwrap();
    assert!(renamed.lines().next().unwrap().contains("countryName"));

    let (code, err) = run(
        sdtree()
            .args(["bench", "--workers", "2", "--synthetic-courses", "2", "--rows-per-course", "200", "--repetitions", "1", "--output"])
            .arg(d.join("bench")),
    );
    assert_eq!(code, 0, "{err}");
    let timing = std::fs::read_to_string(d.join("bench/bench.tsv")).unwrap();
    assert_eq!(timing.lines().count(), 4);
}
