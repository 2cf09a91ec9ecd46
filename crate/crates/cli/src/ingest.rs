//! CSV datasets: one sample per row, optional header, optional trailing
//! integer label column.

use std::path::Path;

use topoartmap::bench::Dataset;

use crate::error::{CliError, Result};

pub fn ingest(path: &Path, has_labels: bool) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, path, has_labels)
}

pub fn read_csv<R: std::io::Read>(reader: R, path: &Path, has_labels: bool) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut data = Dataset::default();
    let mut width: Option<usize> = None;
    let parse_err = |line: u64, msg: String| CliError::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(i as u64 + 1, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if i == 0 && record.iter().any(|f| f.parse::<f64>().is_err()) {
            width = Some(record.len());
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(CliError::Ragged {
                path: path.to_path_buf(),
                line,
                expected,
                found: record.len(),
            });
        }
        let n_features = expected - usize::from(has_labels);
        if n_features == 0 {
            return Err(parse_err(line, "no feature columns".into()));
        }
        let x = record
            .iter()
            .take(n_features)
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_err(line, format!("'{f}' is not a finite number")))
            })
            .collect::<Result<Vec<_>>>()?;
        if has_labels {
            let f = &record[n_features];
            let label = f.parse::<usize>().map_err(|_| {
                parse_err(line, format!("label '{f}' is not a non-negative integer"))
            })?;
            data.truth.push(label);
        }
        data.samples.push(x);
    }
    if data.is_empty() {
        return Err(CliError::EmptyDataset(path.to_path_buf()));
    }
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(s: &str, labels: bool) -> Result<Dataset> {
        read_csv(s.as_bytes(), Path::new("mem.csv"), labels)
    }

    #[test]
    fn four_columns_with_labels() {
        let d = read("x,y,z,label\n1,2,3,0\n4,5,6,1\n", true).unwrap();
        assert_eq!(d.dim(), Some(3));
        assert_eq!(d.truth, vec![0, 1]);
        assert_eq!(d.samples[1], vec![4.0, 5.0, 6.0]);
    }

    #[test]
    fn headerless_unlabelled() {
        let d = read("0.5,1e-3\n-2,3\n", false).unwrap();
        assert_eq!(d.len(), 2);
        assert!(d.truth.is_empty());
    }

    #[test]
    fn ragged_row_reports_line() {
        match read("1,2,0\n3,4,1\n5,1\n", true) {
            Err(CliError::Ragged {
                line,
                expected,
                found,
                ..
            }) => {
                assert_eq!((line, expected, found), (3, 3, 2));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_file_errors() {
        assert!(matches!(read("", false), Err(CliError::EmptyDataset(_))));
        assert!(matches!(
            read("a,b\n", false),
            Err(CliError::EmptyDataset(_))
        ));
    }

    #[test]
    fn bad_values() {
        assert!(matches!(
            read("1,2\n3,x\n", false),
            Err(CliError::Parse { line: 2, .. })
        ));
        assert!(read("1,2,-1\n", true).is_err());
        assert!(read("1,NaN\n", false).is_err());
    }
}
