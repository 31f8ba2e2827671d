use crate::error::{Error, Result};

/// Twelve significant digits, exponent notation, independent of locale.
pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

/// A CSV table with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Comma-separated, LF line endings.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Config(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::Config(format!("csv: {e}")))
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Config(format!("csv: {e}"))
}

/// `points` logarithmically spaced values from `min` to `max` inclusive.
pub fn log_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max.is_finite()) || points == 0 || (points > 1 && !(max > min)) {
        return Err(Error::Config(format!(
            "invalid grid: min={min} max={max} points={points}"
        )));
    }
    if points == 1 {
        return Ok(vec![min]);
    }
    let (a, b) = (min.ln(), max.ln());
    let step = (b - a) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| match i {
            0 => min,
            _ if i == points - 1 => max,
            _ => (a + step * i as f64).exp(),
        })
        .collect())
}
