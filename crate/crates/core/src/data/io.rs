//! CSV readers and writers.
//!
//! * features: header `id,f1,...,fD`, one item per row
//! * labels: header `id,label`, repeated ids accumulate labels
//! * counts: header `i,j,count` with item ids, symmetric duplicates summed
//! * coordinates: header `id,x,y`

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::path::Path;

use ndarray::Array2;

use super::{FeatureMatrix, LabelSet};
use crate::error::{Error, Result};
use crate::model::{CountMatrix, Pair};

fn open(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn parse_err(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn csv_err(path: &Path, err: csv::Error) -> Error {
    let line = err.position().map_or(0, |p| p.line());
    parse_err(path, line, err.to_string())
}

/// Read every data row, checking the header with `check_header`.
fn rows<F>(path: &Path, check_header: F) -> Result<Vec<(u64, csv::StringRecord)>>
where
    F: FnOnce(&csv::StringRecord) -> std::result::Result<(), String>,
{
    let mut reader = open(path)?;
    let header = reader.headers().map_err(|e| csv_err(path, e))?.clone();
    check_header(&header).map_err(|msg| parse_err(path, 1, msg))?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        out.push((line, record));
    }
    Ok(out)
}

fn expect_header(
    expected: &'static [&'static str],
) -> impl FnOnce(&csv::StringRecord) -> std::result::Result<(), String> {
    move |header| {
        if header.iter().eq(expected.iter().copied()) {
            Ok(())
        } else {
            Err(format!(
                "expected header `{}`, found `{}`",
                expected.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ))
        }
    }
}

fn parse_real(path: &Path, line: u64, field: &str, what: &str) -> Result<f64> {
    match field.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(parse_err(
            path,
            line,
            format!("{what} {field:?} is not a finite number"),
        )),
    }
}

fn id_index(ids: &[String]) -> HashMap<&str, usize> {
    ids.iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect()
}

fn lookup(path: &Path, line: u64, index: &HashMap<&str, usize>, id: &str) -> Result<usize> {
    index
        .get(id)
        .copied()
        .ok_or_else(|| parse_err(path, line, format!("unknown item id {id:?}")))
}

pub fn load_features(path: &Path) -> Result<FeatureMatrix> {
    let mut dim = 0;
    let records = rows(path, |h| {
        if h.get(0) != Some("id") || h.len() < 2 {
            return Err("expected header `id,f1,...,fD` with at least one feature".into());
        }
        dim = h.len() - 1;
        Ok(())
    })?;
    let mut ids = Vec::with_capacity(records.len());
    let mut values = Vec::with_capacity(records.len() * dim);
    let mut seen = BTreeSet::new();
    for (line, record) in &records {
        if record.len() != dim + 1 {
            return Err(parse_err(
                path,
                *line,
                format!("expected {} fields, found {}", dim + 1, record.len()),
            ));
        }
        let id = &record[0];
        if id.is_empty() {
            return Err(parse_err(path, *line, "empty item id"));
        }
        if !seen.insert(id.to_string()) {
            return Err(parse_err(path, *line, format!("duplicate item id {id:?}")));
        }
        ids.push(id.to_string());
        for field in record.iter().skip(1) {
            values.push(parse_real(path, *line, field, "feature value")?);
        }
    }
    if ids.len() < 2 {
        return Err(parse_err(
            path,
            records.last().map_or(1, |(l, _)| *l),
            format!("need at least 2 items, found {}", ids.len()),
        ));
    }
    let values = Array2::from_shape_vec((ids.len(), dim), values).expect("row-major shape");
    FeatureMatrix::new(ids, values)
}

/// Raw `(id, label)` rows of a labels file, unvalidated against any items.
pub fn read_label_records(path: &Path) -> Result<Vec<(String, String)>> {
    let records = rows(path, expect_header(&["id", "label"]))?;
    records
        .into_iter()
        .map(|(line, r)| {
            if r.len() != 2 {
                return Err(parse_err(
                    path,
                    line,
                    format!("expected 2 fields, found {}", r.len()),
                ));
            }
            if r[0].is_empty() || r[1].is_empty() {
                return Err(parse_err(path, line, "empty id or label"));
            }
            Ok((r[0].to_string(), r[1].to_string()))
        })
        .collect()
}

/// Labels for the items named by `ids`.
pub fn load_labels(path: &Path, ids: &[String]) -> Result<LabelSet> {
    let index = id_index(ids);
    let records = rows(path, expect_header(&["id", "label"]))?;
    let mut pairs = Vec::with_capacity(records.len());
    for (line, r) in &records {
        if r.len() != 2 {
            return Err(parse_err(
                path,
                *line,
                format!("expected 2 fields, found {}", r.len()),
            ));
        }
        if r[1].is_empty() {
            return Err(parse_err(path, *line, "empty label"));
        }
        pairs.push((lookup(path, *line, &index, &r[0])?, r[1].to_string()));
    }
    LabelSet::from_pairs(ids.len(), pairs)
}

/// Pair counts for the items named by `ids`.
///
/// The observed pairs are all pairs among items mentioned in at least one row.
pub fn load_counts(path: &Path, ids: &[String]) -> Result<CountMatrix> {
    let index = id_index(ids);
    let records = rows(path, expect_header(&["i", "j", "count"]))?;
    let mut entries = Vec::with_capacity(records.len());
    let mut mentioned = BTreeSet::new();
    for (line, r) in &records {
        if r.len() != 3 {
            return Err(parse_err(
                path,
                *line,
                format!("expected 3 fields, found {}", r.len()),
            ));
        }
        let i = lookup(path, *line, &index, &r[0])?;
        let j = lookup(path, *line, &index, &r[1])?;
        if i == j {
            return Err(parse_err(
                path,
                *line,
                format!("self-pair for id {:?}", &r[0]),
            ));
        }
        let count = parse_real(path, *line, &r[2], "count")?;
        if count < 0.0 {
            return Err(parse_err(path, *line, format!("negative count {count}")));
        }
        mentioned.insert(i);
        mentioned.insert(j);
        entries.push((i, j, count));
    }
    let mentioned: Vec<usize> = mentioned.into_iter().collect();
    let mut observed: Vec<Pair> = Vec::new();
    for (a, &i) in mentioned.iter().enumerate() {
        for &j in &mentioned[a + 1..] {
            observed.push((i, j));
        }
    }
    CountMatrix::with_observed(ids.len(), observed, entries).map_err(|e| match e {
        Error::ZeroTotal | Error::EmptySupport => {
            parse_err(path, 0, "counts file has zero total count")
        }
        other => other,
    })
}

/// Ids and 2-D coordinates from an `id,x,y` file.
pub fn load_coords(path: &Path) -> Result<(Vec<String>, Array2<f64>)> {
    let records = rows(path, expect_header(&["id", "x", "y"]))?;
    let mut ids = Vec::with_capacity(records.len());
    let mut values = Vec::with_capacity(records.len() * 2);
    let mut seen = BTreeSet::new();
    for (line, r) in &records {
        if r.len() != 3 {
            return Err(parse_err(
                path,
                *line,
                format!("expected 3 fields, found {}", r.len()),
            ));
        }
        if !seen.insert(r[0].to_string()) {
            return Err(parse_err(
                path,
                *line,
                format!("duplicate item id {:?}", &r[0]),
            ));
        }
        ids.push(r[0].to_string());
        values.push(parse_real(path, *line, &r[1], "x")?);
        values.push(parse_real(path, *line, &r[2], "y")?);
    }
    let coords = Array2::from_shape_vec((ids.len(), 2), values).expect("row-major shape");
    Ok((ids, coords))
}

fn to_string(write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    write(&mut w).expect("writing CSV to memory");
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("UTF-8 CSV")
}

pub fn features_csv(features: &FeatureMatrix) -> String {
    to_string(|w| {
        let mut header = vec!["id".to_string()];
        header.extend((1..=features.dim()).map(|d| format!("f{d}")));
        w.write_record(&header)?;
        for (i, id) in features.ids().iter().enumerate() {
            let mut row = vec![id.clone()];
            row.extend(features.row(i).iter().map(|x| x.to_string()));
            w.write_record(&row)?;
        }
        Ok(())
    })
}

/// One row per (item, label), items in index order and labels sorted.
pub fn labels_csv(labels: &LabelSet, ids: &[String]) -> String {
    to_string(|w| {
        w.write_record(["id", "label"])?;
        for (i, set) in labels.iter() {
            for label in set {
                w.write_record([ids[i].as_str(), label.as_str()])?;
            }
        }
        Ok(())
    })
}

/// Pairs with a strictly positive count.
pub fn counts_csv(counts: &CountMatrix, ids: &[String]) -> String {
    to_string(|w| {
        w.write_record(["i", "j", "count"])?;
        for (i, j, c) in counts.entries().filter(|&(_, _, c)| c > 0.0) {
            w.write_record([ids[i].as_str(), ids[j].as_str(), &c.to_string()])?;
        }
        Ok(())
    })
}

pub fn coords_csv(ids: &[String], coords: &Array2<f64>) -> String {
    to_string(|w| {
        w.write_record(["id", "x", "y"])?;
        for (id, row) in ids.iter().zip(coords.rows()) {
            w.write_record([id.as_str(), &row[0].to_string(), &row[1].to_string()])?;
        }
        Ok(())
    })
}
