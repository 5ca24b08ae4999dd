use super::DataMatrix;
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

/// Reads a rectangular numeric CSV file.
///
/// Rows and columns in error messages are 1-based; rows count data rows,
/// excluding any header.
pub fn read_csv(path: impl AsRef<Path>, has_header: bool) -> Result<DataMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let mut names: Option<Vec<String>> = if has_header {
        let header = reader.headers().map_err(|e| csv_error(path, e))?;
        if header.is_empty() {
            None
        } else {
            Some(header.iter().map(str::to_owned).collect())
        }
    } else {
        None
    };

    let mut flat = Vec::new();
    let mut width = names.as_ref().map(Vec::len);
    let mut n_rows = 0usize;
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let row = idx + 1;
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::Parse {
                row,
                column: String::new(),
                detail: format!("expected {expected} fields, found {}", record.len()),
            });
        }
        for (j, cell) in record.iter().enumerate() {
            let value: f64 = cell.parse().ok().filter(|v: &f64| v.is_finite()).ok_or_else(|| {
                Error::Parse {
                    row,
                    column: column_label(names.as_deref(), j),
                    detail: format!("not a finite number: {cell:?}"),
                }
            })?;
            flat.push(value);
        }
        n_rows += 1;
    }
    let Some(p) = width.filter(|_| n_rows > 0) else {
        return Err(Error::Parse {
            row: 0,
            column: String::new(),
            detail: format!("{} contains no data rows", path.display()),
        });
    };
    let names = names
        .take()
        .unwrap_or_else(|| (1..=p).map(|j| format!("V{j}")).collect());
    DataMatrix::new(DMatrix::from_row_slice(n_rows, p, &flat), names)
}

fn column_label(names: Option<&[String]>, j: usize) -> String {
    match names.and_then(|n| n.get(j)) {
        Some(name) => name.clone(),
        None => (j + 1).to_string(),
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let row = e.position().map(|p| p.record() as usize).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        other => Error::Parse {
            row,
            column: String::new(),
            detail: format!("{other:?}"),
        },
    }
}

/// Reads a single-column file of integer labels. A first line that is not
/// an integer is treated as a header.
pub fn read_labels(path: impl AsRef<Path>) -> Result<Vec<i64>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut labels = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let cell = line.trim();
        if cell.is_empty() {
            continue;
        }
        match cell.parse::<i64>() {
            Ok(v) => labels.push(v),
            Err(_) if idx == 0 => continue,
            Err(_) => {
                return Err(Error::Parse {
                    row: idx + 1,
                    column: "1".into(),
                    detail: format!("not an integer label: {cell:?}"),
                })
            }
        }
    }
    if labels.is_empty() {
        return Err(Error::Parse {
            row: 0,
            column: String::new(),
            detail: format!("{} contains no labels", path.display()),
        });
    }
    Ok(labels)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if path.as_os_str().is_empty() {
        return Err(Error::InvalidArgument("output path is empty".into()));
    }
    File::create(path).map(BufWriter::new).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes a header line and the values. Numbers use the shortest decimal
/// form that parses back to the same `f64`.
pub fn write_csv(data: &DataMatrix, path: impl AsRef<Path>) -> Result<()> {
    let rows = (0..data.n_rows())
        .map(|i| data.values().row(i).iter().map(|v| v.to_string()).collect())
        .collect::<Vec<Vec<String>>>();
    write_rows(path, data.column_names(), &rows)
}

/// Writes one label per line under a `label` header.
pub fn write_labels<L: ToString>(labels: &[L], path: impl AsRef<Path>) -> Result<()> {
    let rows: Vec<Vec<String>> = labels.iter().map(|l| vec![l.to_string()]).collect();
    write_rows(path, &["label".to_owned()], &rows)
}

/// Writes pre-formatted rows under a header.
pub fn write_rows<S: AsRef<str>>(
    path: impl AsRef<Path>,
    header: &[S],
    rows: &[Vec<String>],
) -> Result<()> {
    let path = path.as_ref();
    let mut out = create(path)?;
    let header: Vec<&str> = header.iter().map(AsRef::as_ref).collect();
    writeln!(out, "{}", header.join(",")).map_err(io_err(path))?;
    for row in rows {
        writeln!(out, "{}", row.join(",")).map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))
}
