//! CSV reading and writing.
//!
//! Files carry a mandatory header row, comma separators and LF line endings.
//! Floats are written in shortest round-trip form.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sample::SampleSet;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        kind => Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("{kind:?}"),
        },
    }
}

/// Column names for a sample set: `x,y` (1D scalar), `x,y,z` (2D scalar),
/// `x,y,u,v` (2D vector), otherwise numbered outputs.
pub fn header_for(dim: usize, outputs: usize) -> Vec<String> {
    let inputs: &[&str] = if dim == 1 { &["x"] } else { &["x", "y"] };
    let outs: Vec<String> = match (dim, outputs) {
        (1, 1) => vec!["y".into()],
        (2, 1) => vec!["z".into()],
        (2, 2) => vec!["u".into(), "v".into()],
        _ => (0..outputs).map(|k| format!("f{k}")).collect(),
    };
    inputs.iter().map(|s| s.to_string()).chain(outs).collect()
}

pub(crate) fn writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(io_err(path))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

pub(crate) fn flush(path: &Path, mut w: csv::Writer<File>) -> Result<()> {
    w.flush().map_err(io_err(path))
}

pub fn write_samples(path: &Path, data: &SampleSet) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(header_for(data.dim(), data.outputs()))
        .map_err(|e| csv_err(path, e))?;
    for (p, v) in data.points().zip(data.values()) {
        let row: Vec<String> = p.iter().chain(v).map(f64::to_string).collect();
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    flush(path, w)
}

/// Reads a sample CSV. `dim` defaults to 1 for two-column files and 2 otherwise.
///
/// 1D rows are sorted by `x`; a repeated `x` is a data error.
pub fn read_samples(path: &Path, dim: Option<usize>) -> Result<SampleSet> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let columns = reader.headers().map_err(|e| csv_err(path, e))?.len();
    let dim = dim.unwrap_or(if columns == 2 { 1 } else { 2 });
    if !(1..=2).contains(&dim) || columns <= dim {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: format!("{columns} columns cannot hold {dim}D inputs and at least one output"),
        });
    }
    let outputs = columns - dim;

    let mut rows: Vec<(u64, Vec<f64>)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        if record.len() != columns {
            return Err(parse_err(format!(
                "expected {columns} fields, found {}",
                record.len()
            )));
        }
        let mut row = Vec::with_capacity(columns);
        for field in record.iter() {
            let v: f64 = field
                .parse()
                .map_err(|_| parse_err(format!("cannot parse {field:?} as a number")))?;
            if !v.is_finite() {
                return Err(parse_err(format!("non-finite value {field:?}")));
            }
            row.push(v);
        }
        rows.push((line, row));
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: "no data rows".into(),
        });
    }
    if dim == 1 {
        rows.sort_by(|a, b| a.1[0].total_cmp(&b.1[0]));
        if let Some(w) = rows.windows(2).find(|w| w[0].1[0] == w[1].1[0]) {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: w[1].0,
                message: format!("repeated x = {} (also on line {})", w[1].1[0], w[0].0),
            });
        }
    }
    let mut coords = Vec::with_capacity(rows.len() * dim);
    let mut values = Vec::with_capacity(rows.len() * outputs);
    for (_, row) in &rows {
        coords.extend_from_slice(&row[..dim]);
        values.extend_from_slice(&row[dim..]);
    }
    SampleSet::new(dim, outputs, coords, values)
}

/// Writes a JSON document with a trailing newline.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut file = File::create(path).map_err(io_err(path))?;
    serde_json::to_writer_pretty(&mut file, value)?;
    file.write_all(b"\n").map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_bits() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        let data = SampleSet::from_xy(
            &[1e-300, 0.1, 0.2 + 0.1, 7.0],
            &[1.0 / 3.0, -2.5e17, 0.0, 1e-7],
        )
        .unwrap();
        write_samples(&path, &data).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("x,y\n"));
        assert!(!text.contains('\r'));
        assert_eq!(read_samples(&path, None).unwrap(), data);
    }

    #[test]
    fn reports_bad_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "x,y\n0,1\n1,oops\n").unwrap();
        match read_samples(&path, None).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("unexpected {e}"),
        }
        std::fs::write(&path, "x,y\n0,1\n1,inf\n").unwrap();
        assert!(matches!(
            read_samples(&path, None),
            Err(Error::Parse { line: 3, .. })
        ));
        std::fs::write(&path, "x,y\n0,1\n0,2\n").unwrap();
        assert!(matches!(
            read_samples(&path, None),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn sorts_1d_and_infers_dims() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.csv");
        std::fs::write(&path, "x,y\n2,20\n0,0\n1,10\n").unwrap();
        let d = read_samples(&path, None).unwrap();
        assert_eq!(d.xs().collect::<Vec<_>>(), vec![0.0, 1.0, 2.0]);
        assert_eq!(d.value(2), &[20.0]);
        std::fs::write(&path, "x,y,u,v\n0,0,1,2\n").unwrap();
        let d = read_samples(&path, None).unwrap();
        assert_eq!((d.dim(), d.outputs()), (2, 2));
    }
}
