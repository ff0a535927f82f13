use std::io::{Read, Write};

use crate::{Error, Result};

/// A `d`-dimensional series, one row per time step.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    d: usize,
    values: Vec<f64>,
}

impl Series {
    pub fn new(d: usize, values: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(Error::Precondition("series dimension must be positive".into()));
        }
        if !values.len().is_multiple_of(d) {
            return Err(Error::Format(format!("{} values do not form rows of length {d}", values.len())));
        }
        Ok(Series { d, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != d) {
            return Err(Error::dim(format!("series row {i}"), d, r.len()));
        }
        Series::new(d, rows.concat())
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.d)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Rows `range`, as a new series.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Series {
        Series { d: self.d, values: self.values[range.start * self.d..range.end * self.d].to_vec() }
    }

    /// Writes `t,x1,…,xd` rows, `t` counting from 1, after `#`-prefixed comment lines.
    pub fn write_csv<W: Write>(&self, out: W, comments: &[String]) -> Result<()> {
        let mut out = out;
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        let header: Vec<String> = std::iter::once("t".to_string()).chain((1..=self.d).map(|j| format!("x{j}"))).collect();
        w.write_record(&header).map_err(csv_err)?;
        for (t, row) in self.rows().enumerate() {
            let rec: Vec<String> = std::iter::once((t + 1).to_string()).chain(row.iter().map(|v| format!("{v:?}"))).collect();
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the format of [`Series::write_csv`]; `#` lines are skipped.
    pub fn read_csv<R: Read>(input: R) -> Result<Series> {
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(input);
        let header = r.headers().map_err(csv_err)?.clone();
        if header.len() < 2 || &header[0] != "t" {
            return Err(Error::Format("series CSV must start with a header t,x1,…,xd".into()));
        }
        for (j, name) in header.iter().skip(1).enumerate() {
            if name != format!("x{}", j + 1) {
                return Err(Error::Format(format!("series CSV column {} should be x{}, found {name:?}", j + 2, j + 1)));
            }
        }
        let d = header.len() - 1;
        let mut values = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            if rec.len() != d + 1 {
                return Err(Error::Format(format!("series CSV row {} has {} fields, expected {}", i + 1, rec.len(), d + 1)));
            }
            for (j, field) in rec.iter().enumerate().skip(1) {
                let v: f64 = field
                    .parse()
                    .map_err(|_| Error::Format(format!("series CSV row {} column {}: {field:?} is not a number", i + 1, j + 1)))?;
                if !v.is_finite() {
                    return Err(Error::Format(format!("series CSV row {} column {} is not finite", i + 1, j + 1)));
                }
                values.push(v);
            }
        }
        Series::new(d, values)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}
