//! CSV ingestion for series and design matrices.

use std::fs::File;
use std::io::{self, Read};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use arfima_core::{datasets, TimeSeries};

/// Where a series came from, as recorded in result documents.
#[derive(Debug, Clone)]
pub struct LoadedSeries {
    pub series: TimeSeries,
    pub source: String,
    pub column: String,
}

fn read_all(path: Option<&Path>) -> Result<(String, String)> {
    let mut text = String::new();
    match path {
        Some(p) if p.as_os_str() != "-" => {
            File::open(p)
                .with_context(|| format!("cannot open {}", p.display()))?
                .read_to_string(&mut text)
                .with_context(|| format!("cannot read {}", p.display()))?;
            Ok((text, p.display().to_string()))
        }
        _ => {
            io::stdin().read_to_string(&mut text).context("cannot read standard input")?;
            Ok((text, "<stdin>".into()))
        }
    }
}

fn parse_cell(s: &str, row: usize, col: &str) -> Result<f64> {
    let t = s.trim();
    if t.is_empty() || t.eq_ignore_ascii_case("na") || t.eq_ignore_ascii_case("nan") {
        bail!("missing value in column '{col}' at data row {row}; missing values are not imputed");
    }
    let v: f64 = t
        .parse()
        .map_err(|_| anyhow!("non-numeric value '{t}' in column '{col}' at data row {row}"))?;
    if !v.is_finite() {
        bail!("non-finite value '{t}' in column '{col}' at data row {row}");
    }
    Ok(v)
}

/// Picks the named column, else `value`, else the only column.
fn select_column(headers: &csv::StringRecord, column: Option<&str>) -> Result<usize> {
    let names: Vec<&str> = headers.iter().map(str::trim).collect();
    if let Some(c) = column {
        return names
            .iter()
            .position(|h| *h == c)
            .ok_or_else(|| anyhow!("column '{c}' not found; header has {names:?}"));
    }
    if let Some(i) = names.iter().position(|h| h.eq_ignore_ascii_case("value")) {
        return Ok(i);
    }
    if names.len() == 1 {
        return Ok(0);
    }
    bail!("input has columns {names:?}; choose one with --column")
}

/// Parses a header-first CSV and extracts one numeric column.
pub fn parse_series(text: &str, column: Option<&str>) -> Result<(Vec<f64>, String)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rdr.headers().context("input CSV needs a header row")?.clone();
    if headers.is_empty() {
        bail!("input CSV needs a header row");
    }
    let idx = select_column(&headers, column)?;
    let name = headers[idx].trim().to_string();
    let mut values = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.with_context(|| format!("malformed CSV at data row {}", row + 1))?;
        let cell = rec.get(idx).unwrap_or("");
        values.push(parse_cell(cell, row + 1, &name)?);
    }
    if values.is_empty() {
        bail!("input has no data rows");
    }
    Ok((values, name))
}

/// Loads a bundled dataset (`A`, `C`) or a CSV file / standard input.
pub fn load_series(input: Option<&Path>, dataset: Option<&str>, column: Option<&str>) -> Result<LoadedSeries> {
    if let Some(name) = dataset {
        let series = datasets::by_name(name).ok_or_else(|| anyhow!("unknown dataset '{name}' (expected A or C)"))?;
        let source = series.source.clone().unwrap_or_else(|| name.to_string());
        return Ok(LoadedSeries {
            series,
            source,
            column: "value".into(),
        });
    }
    let (text, source) = read_all(input)?;
    let (values, column) = parse_series(&text, column).with_context(|| format!("reading {source}"))?;
    Ok(LoadedSeries {
        series: TimeSeries::new(values).with_source(source.clone()),
        source,
        column,
    })
}

/// Every column of a numeric CSV with header, each of length `n`.
pub fn load_design(path: &Path, n: usize) -> Result<Vec<Vec<f64>>> {
    let mut text = String::new();
    File::open(path)
        .with_context(|| format!("cannot open {}", path.display()))?
        .read_to_string(&mut text)?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers: Vec<String> = rdr.headers()?.iter().map(|s| s.trim().to_string()).collect();
    let mut cols = vec![Vec::new(); headers.len()];
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.with_context(|| format!("{}: malformed CSV at data row {}", path.display(), row + 1))?;
        for (k, name) in headers.iter().enumerate() {
            cols[k].push(parse_cell(rec.get(k).unwrap_or(""), row + 1, name)?);
        }
    }
    if cols.iter().any(|c| c.len() != n) {
        bail!("design {} has {} rows, the series has {n}", path.display(), cols.first().map_or(0, Vec::len));
    }
    Ok(cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picks_value_column_by_default() {
        let (v, name) = parse_series("t,value\n1,2.5\n2,3\n", None).unwrap();
        assert_eq!(v, vec![2.5, 3.0]);
        assert_eq!(name, "value");
    }

    #[test]
    fn named_column() {
        let (v, _) = parse_series("a,b\n1,2\n3,4\n", Some("b")).unwrap();
        assert_eq!(v, vec![2.0, 4.0]);
    }

    #[test]
    fn rejects_missing_values() {
        let err = parse_series("x\n1\n\n", None);
        assert!(err.is_ok(), "blank lines are skipped by the reader");
        let err = parse_series("x,y\n1,\n", Some("y")).unwrap_err();
        assert!(err.to_string().contains("missing value"), "{err}");
        assert!(parse_series("x\nNA\n", None).is_err());
    }

    #[test]
    fn ambiguous_columns_need_a_choice() {
        assert!(parse_series("a,b\n1,2\n", None).is_err());
    }
}
