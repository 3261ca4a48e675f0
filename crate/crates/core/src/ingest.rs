//! Loading raw per-course learner tables.
//!
//! The input is a comma separated file with a header row, one learner
//! registration per line. Known columns are parsed into typed fields of
//! [`RawRecord`]; any other column is carried through verbatim so that a table
//! can be written back out unchanged.

use std::collections::HashMap;
use std::io::{Read, Write};

use crate::error::{Error, Result};

pub const COURSE_ID: &str = "course_id";

/// Columns of the public person-course file, before renaming.
pub const SOURCE_COLUMNS: [&str; 19] = [
    "course_id",
    "userid_DI",
    "registered",
    "viewed",
    "explored",
    "certified",
    "final_cc_cname_DI",
    "LoE",
    "YoB",
    "gender",
    "grade",
    "start_time_DI",
    "last_event_DI",
    "nevents",
    "ndays_act",
    "nplay_video",
    "nchapters",
    "nforum_posts",
    "roles",
];

/// Columns removed by [`select_and_rename`].
pub const DROPPED_COLUMNS: [&str; 4] = ["userid_DI", "start_time_DI", "last_event_DI", "roles"];

/// `(source name, new name)` pairs applied by [`select_and_rename`].
pub const RENAMES: [(&str, &str); 2] = [("final_cc_cname_DI", "countryName"), ("YoB", "age")];

/// Typed columns, keyed by the name used after renaming.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Field {
    CourseId,
    Registered,
    Viewed,
    Explored,
    Certified,
    CountryName,
    Loe,
    Age,
    Gender,
    Grade,
    Nevents,
    NdaysAct,
    NplayVideo,
    Nchapters,
    NforumPosts,
}

impl Field {
    fn of(column: &str) -> Option<Field> {
        Some(match column {
            "course_id" => Field::CourseId,
            "registered" => Field::Registered,
            "viewed" => Field::Viewed,
            "explored" => Field::Explored,
            "certified" => Field::Certified,
            "final_cc_cname_DI" | "countryName" => Field::CountryName,
            "LoE" | "LoE_DI" => Field::Loe,
            "YoB" | "age" => Field::Age,
            "gender" => Field::Gender,
            "grade" => Field::Grade,
            "nevents" => Field::Nevents,
            "ndays_act" => Field::NdaysAct,
            "nplay_video" => Field::NplayVideo,
            "nchapters" => Field::Nchapters,
            "nforum_posts" => Field::NforumPosts,
            _ => return None,
        })
    }
}

/// Resolves the spellings that name the same column.
fn canonical(column: &str) -> &str {
    match column {
        "final_cc_cname_DI" => "countryName",
        "YoB" => "age",
        "LoE_DI" => "LoE",
        other => other,
    }
}

/// Column dictionary used to validate a header.
#[derive(Clone, Debug)]
pub struct Schema {
    /// Columns that must be present. Renamed spellings satisfy each other.
    pub mandatory: Vec<String>,
    /// Cell contents (after trimming) that mean "missing". Blank is always missing.
    pub missing_tokens: Vec<String>,
}

impl Schema {
    /// The public person-course file as distributed.
    pub fn person_course() -> Self {
        Schema {
            mandatory: SOURCE_COLUMNS.iter().map(|s| s.to_string()).collect(),
            missing_tokens: vec!["NA".to_string()],
        }
    }

    /// A table that already went through [`select_and_rename`].
    pub fn retained() -> Self {
        let mandatory = SOURCE_COLUMNS
            .iter()
            .filter(|c| !DROPPED_COLUMNS.contains(c))
            .map(|c| canonical(c).to_string())
            .collect();
        Schema { mandatory, ..Schema::person_course() }
    }

    fn is_missing(&self, cell: &str) -> bool {
        let cell = cell.trim();
        cell.is_empty() || self.missing_tokens.iter().any(|t| t == cell)
    }
}

impl Default for Schema {
    fn default() -> Self {
        Schema::person_course()
    }
}

/// One learner registration.
#[derive(Clone, Debug, PartialEq)]
pub struct RawRecord {
    pub registered: bool,
    pub viewed: bool,
    pub explored: bool,
    pub certified: bool,
    pub country_name: Option<String>,
    pub loe: Option<String>,
    /// Year of birth.
    pub age: Option<i32>,
    pub gender: Option<String>,
    pub grade: Option<f64>,
    pub nevents: Option<u64>,
    pub ndays_act: Option<u64>,
    pub nplay_video: Option<u64>,
    pub nchapters: Option<u64>,
    pub nforum_posts: Option<u64>,
    /// Untyped columns in header order, see [`RawCourseTable::extra_columns`].
    pub extras: Vec<Option<String>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawCourseTable {
    pub course_id: String,
    pub column_names: Vec<String>,
    pub rows: Vec<RawRecord>,
}

impl RawCourseTable {
    /// Names of the columns stored in [`RawRecord::extras`], in order.
    pub fn extra_columns(&self) -> impl Iterator<Item = &str> {
        self.column_names.iter().map(String::as_str).filter(|c| Field::of(c).is_none())
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.column_names.iter().any(|c| c == name)
    }
}

/// Reads a delimited table and splits it into one table per `course_id`,
/// in order of first appearance. Rows keep their file order.
pub fn load_course_table<R: Read>(source: R, schema: &Schema) -> Result<Vec<RawCourseTable>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(source);
    let header: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_string()).collect();

    for required in &schema.mandatory {
        let want = canonical(required);
        if !header.iter().any(|h| canonical(h) == want) {
            return Err(Error::MissingColumn(required.clone()));
        }
    }
    let fields: Vec<Option<Field>> = header.iter().map(|h| Field::of(h)).collect();
    if !fields.contains(&Some(Field::CourseId)) {
        return Err(Error::MissingColumn(COURSE_ID.to_string()));
    }

    let mut tables: Vec<RawCourseTable> = Vec::new();
    let mut by_course: HashMap<String, usize> = HashMap::new();

    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let (course_id, parsed) = parse_row(row, &record, &header, &fields, schema)?;
        let slot = *by_course.entry(course_id.clone()).or_insert_with(|| {
            tables.push(RawCourseTable {
                course_id: course_id.clone(),
                column_names: header.clone(),
                rows: Vec::new(),
            });
            tables.len() - 1
        });
        tables[slot].rows.push(parsed);
    }
    Ok(tables)
}

fn parse_row(
    row: usize,
    record: &csv::StringRecord,
    header: &[String],
    fields: &[Option<Field>],
    schema: &Schema,
) -> Result<(String, RawRecord)> {
    let mut out = RawRecord {
        registered: false,
        viewed: false,
        explored: false,
        certified: false,
        country_name: None,
        loe: None,
        age: None,
        gender: None,
        grade: None,
        nevents: None,
        ndays_act: None,
        nplay_video: None,
        nchapters: None,
        nforum_posts: None,
        extras: Vec::new(),
    };
    let mut course_id = String::new();
    let mut flags_seen = 0u8;

    for ((cell, field), name) in record.iter().zip(fields).zip(header) {
        let missing = schema.is_missing(cell);
        let err = |message: String| Error::Parse { row, column: name.clone(), message };
        let text = || (!missing).then(|| cell.trim().to_string());
        match field {
            None => out.extras.push((!missing).then(|| cell.to_string())),
            Some(Field::CourseId) => course_id = cell.trim().to_string(),
            Some(flag @ (Field::Registered | Field::Viewed | Field::Explored | Field::Certified)) => {
                let value = parse_flag(cell).ok_or_else(|| err(format!("not a boolean flag: {cell:?}")))?;
                flags_seen += 1;
                match flag {
                    Field::Registered => out.registered = value,
                    Field::Viewed => out.viewed = value,
                    Field::Explored => out.explored = value,
                    _ => out.certified = value,
                }
            }
            Some(Field::CountryName) => out.country_name = text(),
            Some(Field::Loe) => out.loe = text(),
            Some(Field::Gender) => out.gender = text(),
            Some(Field::Age) => {
                out.age = match missing {
                    true => None,
                    false => Some(parse_integral(cell).ok_or_else(|| err(format!("not a year: {cell:?}")))? as i32),
                }
            }
            Some(Field::Grade) => {
                if !missing {
                    let g: f64 = cell.trim().parse().map_err(|_| err(format!("not a number: {cell:?}")))?;
                    if !(0.0..=1.0).contains(&g) {
                        return Err(err(format!("grade {g} outside [0, 1]")));
                    }
                    out.grade = Some(g);
                }
            }
            Some(count) => {
                let value = match missing {
                    true => None,
                    false => {
                        let v = parse_integral(cell).ok_or_else(|| err(format!("not a count: {cell:?}")))?;
                        if v < 0 {
                            return Err(err(format!("negative count {v}")));
                        }
                        Some(v as u64)
                    }
                };
                match count {
                    Field::Nevents => out.nevents = value,
                    Field::NdaysAct => out.ndays_act = value,
                    Field::NplayVideo => out.nplay_video = value,
                    Field::Nchapters => out.nchapters = value,
                    _ => out.nforum_posts = value,
                }
            }
        }
    }
    if flags_seen < 4 {
        return Err(Error::InvalidRecord { row, reason: "missing category flag".into() });
    }
    if course_id.is_empty() {
        return Err(Error::Parse { row, column: COURSE_ID.into(), message: "empty course id".into() });
    }
    Ok((course_id, out))
}

fn parse_flag(cell: &str) -> Option<bool> {
    match cell.trim() {
        "1" => Some(true),
        "0" => Some(false),
        s if s.eq_ignore_ascii_case("true") => Some(true),
        s if s.eq_ignore_ascii_case("false") => Some(false),
        _ => None,
    }
}

/// Integers, also written as `1985.0`.
fn parse_integral(cell: &str) -> Option<i64> {
    let cell = cell.trim();
    if let Ok(v) = cell.parse::<i64>() {
        return Some(v);
    }
    let f: f64 = cell.parse().ok()?;
    (f.is_finite() && f.fract() == 0.0 && f.abs() < 9.0e15).then_some(f as i64)
}

/// Drops identifier and date columns and applies the two renames.
/// Columns that are already absent are ignored, so applying it twice is the
/// same as applying it once.
pub fn select_and_rename(table: &RawCourseTable) -> RawCourseTable {
    let keep_extra: Vec<bool> = table.extra_columns().map(|c| !DROPPED_COLUMNS.contains(&c)).collect();
    let column_names = table
        .column_names
        .iter()
        .filter(|c| !DROPPED_COLUMNS.contains(&c.as_str()))
        .map(|c| {
            RENAMES
                .iter()
                .find(|(from, _)| from == c)
                .map_or_else(|| c.clone(), |(_, to)| to.to_string())
        })
        .collect();
    let rows = table
        .rows
        .iter()
        .map(|r| RawRecord {
            extras: r
                .extras
                .iter()
                .zip(&keep_extra)
                .filter(|(_, keep)| **keep)
                .map(|(v, _)| v.clone())
                .collect(),
            ..r.clone()
        })
        .collect();
    RawCourseTable { course_id: table.course_id.clone(), column_names, rows }
}

/// Writes a table with the same conventions [`load_course_table`] reads:
/// flags as `0`/`1`, missing values as blank cells.
pub fn write_course_table<W: Write>(table: &RawCourseTable, sink: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(&table.column_names)?;
    let fields: Vec<Option<Field>> = table.column_names.iter().map(|c| Field::of(c)).collect();
    let mut cells: Vec<String> = Vec::with_capacity(fields.len());
    for row in &table.rows {
        cells.clear();
        let mut extras = row.extras.iter();
        for field in &fields {
            let flag = |b: bool| if b { "1".to_string() } else { "0".to_string() };
            let opt = |v: Option<String>| v.unwrap_or_default();
            cells.push(match field {
                None => opt(extras.next().cloned().flatten()),
                Some(Field::CourseId) => table.course_id.clone(),
                Some(Field::Registered) => flag(row.registered),
                Some(Field::Viewed) => flag(row.viewed),
                Some(Field::Explored) => flag(row.explored),
                Some(Field::Certified) => flag(row.certified),
                Some(Field::CountryName) => opt(row.country_name.clone()),
                Some(Field::Loe) => opt(row.loe.clone()),
                Some(Field::Gender) => opt(row.gender.clone()),
                Some(Field::Age) => opt(row.age.map(|v| v.to_string())),
                Some(Field::Grade) => opt(row.grade.map(|v| v.to_string())),
                Some(Field::Nevents) => opt(row.nevents.map(|v| v.to_string())),
                Some(Field::NdaysAct) => opt(row.ndays_act.map(|v| v.to_string())),
                Some(Field::NplayVideo) => opt(row.nplay_video.map(|v| v.to_string())),
                Some(Field::Nchapters) => opt(row.nchapters.map(|v| v.to_string())),
                Some(Field::NforumPosts) => opt(row.nforum_posts.map(|v| v.to_string())),
            });
        }
        writer.write_record(&cells)?;
    }
    writer.flush()?;
    Ok(())
}
