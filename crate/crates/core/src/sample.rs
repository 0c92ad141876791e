//! Sampled functions in log coordinates, value tracks, and their CSV form.
//!
//! The CSV layout is a header line followed by rows sorted strictly by the
//! first column. A header starting with `x` means the data are already in log
//! coordinates; a header starting with `r` means raw data, converted on read
//! with `x = ln r` and (for growth functions) `y = ln value`.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{Grid, MIN_GRID_POINTS};

/// A function on a ray stored as `y_i = ln F(e^{x_i})`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogLogSample {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl LogLogSample {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::Sample(format!(
                "length mismatch: {} abscissae, {} values",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < MIN_GRID_POINTS {
            return Err(Error::Sample(format!(
                "need at least {MIN_GRID_POINTS} points, got {}",
                xs.len()
            )));
        }
        for (i, (&x, &y)) in xs.iter().zip(&ys).enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::Sample(format!(
                    "non-finite entry at row {i}: x = {x}, y = {y}"
                )));
            }
        }
        if let Some(i) = xs.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Sample(format!(
                "abscissae not strictly increasing at row {}",
                i + 1
            )));
        }
        Ok(LogLogSample { xs, ys })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn grid(&self) -> Grid {
        Grid::from_points(self.xs.clone()).expect("validated on construction")
    }

    /// Index of `x` in the sample, if it is one of the stored abscissae.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        self.xs.binary_search_by(|p| p.total_cmp(&x)).ok()
    }

    pub fn read_csv<R: Read>(reader: R, column: Option<&str>) -> Result<Self> {
        let table = read_table(reader, column)?;
        let ys = match table.kind {
            Abscissa::Log => table.values,
            Abscissa::Raw => table
                .values
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    if v <= 0.0 {
                        Err(Error::Csv(format!(
                            "value {v} at data row {} is not positive",
                            i + 1
                        )))
                    } else {
                        Ok(v.ln())
                    }
                })
                .collect::<Result<Vec<_>>>()?,
        };
        LogLogSample::new(table.xs, ys)
    }

    pub fn from_csv_path(path: &Path, column: Option<&str>) -> Result<Self> {
        let file =
            std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::read_csv(file, column)
    }

    /// Writes the `x,y` form.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x", "y"])?;
        for (x, y) in self.xs.iter().zip(&self.ys) {
            w.write_record([x.to_string(), y.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Plain values over an increasing abscissa; entries may be `±inf` but not NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    xs: Vec<f64>,
    values: Vec<f64>,
}

impl Track {
    pub fn new(xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xs.len() != values.len() {
            return Err(Error::Sample(format!(
                "track length mismatch: {} vs {}",
                xs.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| v.is_nan()) {
            return Err(Error::Sample(format!("NaN in track at x = {}", xs[i])));
        }
        if let Some(i) = xs.iter().position(|x| !x.is_finite()) {
            return Err(Error::Sample(format!("non-finite abscissa at row {i}")));
        }
        if let Some(i) = xs.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Sample(format!(
                "track abscissae not strictly increasing at row {}",
                i + 1
            )));
        }
        Ok(Track { xs, values })
    }

    pub fn from_fn(xs: &[f64], f: impl Fn(f64) -> f64) -> Result<Self> {
        Track::new(xs.to_vec(), xs.iter().map(|&x| f(x)).collect())
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Reads a value track: `x,<col>` as is, `r,<col>` with `x = ln r` and the
    /// values left untouched.
    pub fn read_csv<R: Read>(reader: R, column: Option<&str>) -> Result<Self> {
        let table = read_table(reader, column)?;
        Track::new(table.xs, table.values)
    }

    pub fn from_csv_path(path: &Path, column: Option<&str>) -> Result<Self> {
        let file =
            std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::read_csv(file, column)
    }
}

impl From<&LogLogSample> for Track {
    fn from(s: &LogLogSample) -> Self {
        Track {
            xs: s.xs.clone(),
            values: s.ys.clone(),
        }
    }
}

enum Abscissa {
    Log,
    Raw,
}

struct Table {
    kind: Abscissa,
    xs: Vec<f64>,
    values: Vec<f64>,
}

fn read_table<R: Read>(reader: R, column: Option<&str>) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.len() < 2 {
        return Err(Error::Csv("need at least two columns".into()));
    }
    let kind = match &headers[0] {
        "x" => Abscissa::Log,
        "r" => Abscissa::Raw,
        other => {
            return Err(Error::Csv(format!(
                "first column must be `x` or `r`, found `{other}`"
            )))
        }
    };
    let col = match column {
        None => 1,
        Some(name) => match headers.iter().position(|h| h == name) {
            Some(0) | None => match name.parse::<usize>() {
                Ok(i) if i >= 1 && i < headers.len() => i,
                _ => return Err(Error::Csv(format!("no value column `{name}`"))),
            },
            Some(i) => i,
        },
    };

    let mut xs = Vec::new();
    let mut values = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parse = |idx: usize| -> Result<f64> {
            let field = rec
                .get(idx)
                .ok_or_else(|| Error::Csv(format!("data row {} has no column {idx}", row + 1)))?;
            field
                .parse::<f64>()
                .map_err(|_| Error::Csv(format!("data row {}: `{field}` is not a number", row + 1)))
        };
        let first = parse(0)?;
        let value = parse(col)?;
        let x = match kind {
            Abscissa::Log => first,
            Abscissa::Raw => {
                if first <= 0.0 {
                    return Err(Error::Csv(format!(
                        "radius {first} at data row {} is not positive",
                        row + 1
                    )));
                }
                first.ln()
            }
        };
        if let Some(&prev) = xs.last() {
            if x <= prev {
                return Err(Error::Csv(format!(
                    "rows not strictly increasing at data row {}",
                    row + 1
                )));
            }
        }
        xs.push(x);
        values.push(value);
    }
    Ok(Table { kind, xs, values })
}
