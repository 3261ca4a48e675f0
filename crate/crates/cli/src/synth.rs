//! Synthetic person-course tables for benchmarks and tests.
//!
//! Every row is drawn category first, then its flags are set from the
//! category and its activity counts and grade from a per-category range, so
//! rules describing the categories exist to be found. Each course gets its
//! own activity scale, which moves the fitted bin edges between courses.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sdtree_core::ingest::{write_course_table, RawCourseTable, RawRecord, SOURCE_COLUMNS};
use sdtree_core::Category;

use crate::error::{CliError, Result, Stage};

/// Category mix: viewers largest, then registrants, explorers and certified.
const CATEGORY_WEIGHTS: [(Category, u32); 4] = [
    (Category::Certified, 4),
    (Category::OnlyExplored, 6),
    (Category::OnlyViewed, 52),
    (Category::OnlyRegistered, 38),
];

const COUNTRIES: [(&str, u32); 8] = [
    ("United States", 28),
    ("India", 15),
    ("Unknown/Other", 20),
    ("United Kingdom", 5),
    ("Brazil", 4),
    ("Spain", 3),
    ("Other Europe", 14),
    ("Other Africa", 11),
];

const LEVELS: [(&str, u32); 5] = [
    ("Less than Secondary", 3),
    ("Secondary", 26),
    ("Bachelor's", 42),
    ("Master's", 25),
    ("Doctorate", 4),
];

const GENDERS: [(&str, u32); 3] = [("m", 64), ("f", 33), ("o", 3)];

struct Pickers {
    category: WeightedIndex<u32>,
    country: WeightedIndex<u32>,
    level: WeightedIndex<u32>,
    gender: WeightedIndex<u32>,
}

impl Pickers {
    fn new() -> Self {
        let w = |ws: &[u32]| WeightedIndex::new(ws.to_vec()).expect("static weights");
        Pickers {
            category: w(&CATEGORY_WEIGHTS.map(|(_, w)| w)),
            country: w(&COUNTRIES.map(|(_, w)| w)),
            level: w(&LEVELS.map(|(_, w)| w)),
            gender: w(&GENDERS.map(|(_, w)| w)),
        }
    }
}

pub fn course_id(index: usize) -> String {
    format!("SynthX/C{:02}/2013", index + 1)
}

/// Fraction of the course scale an activity count is drawn from, per
/// category, as `(low, high)`. Bands overlap so no single count separates
/// the categories.
fn activity_band(category: Category) -> (f64, f64) {
    match category {
        Category::Certified => (0.55, 1.0),
        Category::OnlyExplored => (0.25, 0.75),
        Category::OnlyViewed => (0.0, 0.40),
        Category::OnlyRegistered => (0.0, 0.0),
    }
}

fn draw_record(rng: &mut ChaCha8Rng, p: &Pickers, scale: f64, serial: usize) -> RawRecord {
    let category = CATEGORY_WEIGHTS[p.category.sample(rng)].0;
    let certified = category == Category::Certified;
    // a few certified learners never pass the exploration mark
    let explored = category == Category::OnlyExplored || (certified && rng.gen_bool(0.9));
    let viewed = category != Category::OnlyRegistered;

    let maybe = |rng: &mut ChaCha8Rng, p_present: f64| rng.gen_bool(p_present);
    let country_name = Some(COUNTRIES[p.country.sample(rng)].0.to_string());
    let loe = maybe(rng, 0.85).then(|| LEVELS[p.level.sample(rng)].0.to_string());
    let gender = maybe(rng, 0.9).then(|| GENDERS[p.gender.sample(rng)].0.to_string());
    let age = maybe(rng, 0.88).then(|| rng.gen_range(1931..=2001));

    let (lo, hi) = activity_band(category);
    let count = |rng: &mut ChaCha8Rng, max: f64| -> Option<u64> {
        if category == Category::OnlyRegistered {
            return None;
        }
        let f = rng.gen_range(lo..=hi);
        Some((1.0 + f * (max - 1.0)).round() as u64)
    };
    let nevents = count(rng, 40.0 * scale);
    let ndays_act = count(rng, 2.0 * scale);
    let nplay_video = count(rng, 15.0 * scale);
    let nchapters = count(rng, 0.3 * scale);
    let nforum_posts = if category == Category::OnlyRegistered {
        None
    } else {
        let f = rng.gen_range(lo..=hi);
        Some((f * 0.2 * scale).round() as u64)
    };
    let grade = match category {
        Category::Certified => Some(rng.gen_range(50..=100) as f64 / 100.0),
        Category::OnlyRegistered => None,
        _ => maybe(rng, 0.8).then(|| rng.gen_range(0..=45) as f64 / 100.0),
    };

    RawRecord {
        registered: true,
        viewed,
        explored,
        certified,
        country_name,
        loe,
        age,
        gender,
        grade,
        nevents,
        ndays_act,
        nplay_video,
        nchapters,
        nforum_posts,
        extras: vec![
            Some(format!("MHxPC13{serial:07}")),
            Some("2012-12-19".to_string()),
            viewed.then(|| "2013-06-30".to_string()),
            None,
        ],
    }
}

/// One course; the stream depends only on `(seed, index)`.
pub fn generate_course(seed: u64, index: usize, rows: usize) -> RawCourseTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let pickers = Pickers::new();
    let scale = rng.gen_range(60.0..140.0);
    let rows = (0..rows).map(|i| draw_record(&mut rng, &pickers, scale, i)).collect();
    RawCourseTable {
        course_id: course_id(index),
        column_names: SOURCE_COLUMNS.iter().map(|s| s.to_string()).collect(),
        rows,
    }
}

pub fn generate_synthetic(seed: u64, courses: usize, rows_per_course: usize) -> Vec<RawCourseTable> {
    (0..courses).map(|c| generate_course(seed, c, rows_per_course)).collect()
}

/// Writes one CSV per course into `dir` and returns the paths.
pub fn write_synthetic(seed: u64, courses: usize, rows_per_course: usize, dir: &Path) -> Result<Vec<PathBuf>> {
    if rows_per_course == 0 {
        return Err(CliError::Config("rows_per_course must be at least 1".into()));
    }
    std::fs::create_dir_all(dir).map_err(CliError::io(Stage::Synth, dir))?;
    let mut paths = Vec::with_capacity(courses);
    for c in 0..courses {
        let table = generate_course(seed, c, rows_per_course);
        let path = dir.join(format!("course_{:02}.csv", c + 1));
        let file = File::create(&path).map_err(CliError::io(Stage::Synth, &path))?;
        write_course_table(&table, BufWriter::new(file)).map_err(CliError::core(Stage::Synth))?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sdtree_core::prep::derive_category;

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(generate_course(7, 3, 200), generate_course(7, 3, 200));
        assert_ne!(generate_course(7, 3, 200), generate_course(8, 3, 200));
        assert_ne!(generate_course(7, 3, 200).rows, generate_course(7, 4, 200).rows);
    }

    #[test]
    fn viewers_dominate() {
        let t = generate_course(1, 0, 5000);
        let mut counts = [0usize; 4];
        for r in &t.rows {
            counts[derive_category(r.registered, r.viewed, r.explored, r.certified).unwrap().index()] += 1;
        }
        let viewed = counts[Category::OnlyViewed.index()];
        assert!(counts.iter().all(|&c| c <= viewed));
        assert!(counts[Category::Certified.index()] < counts[Category::OnlyRegistered.index()]);
        assert!(counts.iter().all(|&c| c > 0));
    }
}
