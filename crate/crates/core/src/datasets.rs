//! Two classic series bundled with the crate.

use crate::series::TimeSeries;

const SERIES_A: &str = include_str!("../../../data/seriesA.csv");
const SERIES_C: &str = include_str!("../../../data/seriesC.csv");

fn parse(text: &str, name: &str) -> TimeSeries {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut time = Vec::new();
    let mut values = Vec::new();
    for rec in rdr.records() {
        let rec = rec.expect("bundled csv is well formed");
        time.push(rec[0].trim().parse::<f64>().expect("numeric time"));
        values.push(rec[1].trim().parse::<f64>().expect("numeric value"));
    }
    let mut s = TimeSeries::new(values).with_source(name);
    s.time = Some(time);
    s
}

/// Chemical process concentration readings, every two hours (197 values).
pub fn series_a() -> TimeSeries {
    parse(SERIES_A, "Series A")
}

/// Chemical process temperature readings, every minute (226 values).
pub fn series_c() -> TimeSeries {
    parse(SERIES_C, "Series C")
}

/// Looks up a bundled series by name (`A`, `C`, `seriesA`, ...).
pub fn by_name(name: &str) -> Option<TimeSeries> {
    match name.trim().to_ascii_lowercase().trim_start_matches("series") {
        "a" => Some(series_a()),
        "c" => Some(series_c()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lengths() {
        assert_eq!(series_a().len(), 197);
        assert_eq!(series_c().len(), 226);
        assert!(by_name("seriesC").is_some());
        assert!(by_name("B").is_none());
    }
}
