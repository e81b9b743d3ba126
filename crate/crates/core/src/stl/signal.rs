use std::io::{Read, Write};

use crate::Scalar;

use super::StlError;

/// Finite discrete-time signal: `len` samples of dimension `dim`, the
/// first one at absolute time index `start`.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal<T> {
    dim: usize,
    start: usize,
    data: Vec<T>,
}

impl<T: Scalar> Signal<T> {
    pub fn empty(dim: usize) -> Self {
        Signal {
            dim,
            start: 0,
            data: Vec::new(),
        }
    }

    pub fn from_samples(samples: Vec<Vec<T>>) -> Result<Self, StlError> {
        let dim = samples.first().map_or(0, Vec::len);
        let mut s = Signal::empty(dim);
        for v in samples {
            s.push(&v)?;
        }
        Ok(s)
    }

    /// One-dimensional signal from scalar samples.
    pub fn scalar(values: &[T]) -> Self {
        Signal {
            dim: 1,
            start: 0,
            data: values.to_vec(),
        }
    }

    pub fn with_start(mut self, start: usize) -> Self {
        self.start = start;
        self
    }

    pub fn push(&mut self, sample: &[T]) -> Result<(), StlError> {
        if sample.len() != self.dim {
            return Err(StlError::SignalDimension {
                expected: self.dim,
                found: sample.len(),
            });
        }
        self.data.extend_from_slice(sample);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.data.len() / self.dim
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sample at absolute time `t`. Panics outside the signal.
    pub fn at(&self, t: usize) -> &[T] {
        let k = t - self.start;
        &self.data[k * self.dim..(k + 1) * self.dim]
    }

    pub fn get(&self, t: usize) -> Option<&[T]> {
        (t >= self.start && t - self.start < self.len()).then(|| self.at(t))
    }

    pub fn samples(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks_exact(self.dim.max(1))
    }

    /// Checks that samples `from..=to` exist.
    pub fn check_window(&self, from: usize, to: usize) -> Result<(), StlError> {
        let last = (self.start + self.len()).wrapping_sub(1);
        if self.is_empty() || from < self.start || to > last || from > to {
            return Err(StlError::WindowOutOfRange {
                from,
                to,
                first: self.start,
                last: if self.is_empty() { self.start } else { last },
            });
        }
        Ok(())
    }

    /// Copy of samples `t1..=t2`, keeping absolute time indices.
    pub fn window(&self, t1: usize, t2: usize) -> Result<Signal<T>, StlError> {
        self.check_window(t1, t2)?;
        let a = (t1 - self.start) * self.dim;
        let b = (t2 + 1 - self.start) * self.dim;
        Ok(Signal {
            dim: self.dim,
            start: t1,
            data: self.data[a..b].to_vec(),
        })
    }

    /// Parse CSV with header `t,<name>,<name>,...`; time stamps must be
    /// consecutive integers. Returns the signal and the component names.
    pub fn read_csv<R: Read>(reader: R) -> Result<(Signal<T>, Vec<String>), StlError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| StlError::Signal(e.to_string()))?
            .clone();
        if headers.get(0) != Some("t") || headers.len() < 2 {
            return Err(StlError::Signal(
                "header must be `t` followed by one column per dimension".into(),
            ));
        }
        let names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
        let mut signal = Signal::empty(names.len());
        let mut expected_t: Option<usize> = None;
        let mut row = Vec::with_capacity(names.len());
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| StlError::Signal(e.to_string()))?;
            let t: usize = rec[0]
                .parse()
                .map_err(|_| StlError::Signal(format!("row {}: bad time stamp `{}`", line + 1, &rec[0])))?;
            match expected_t {
                None => signal.start = t,
                Some(e) if e != t => {
                    return Err(StlError::Signal(format!(
                        "row {}: time stamp {t} does not follow {}",
                        line + 1,
                        e - 1
                    )))
                }
                _ => {}
            }
            expected_t = Some(t + 1);
            row.clear();
            for field in rec.iter().skip(1) {
                let v = T::parse_decimal(field).ok_or_else(|| {
                    StlError::Signal(format!("row {}: bad value `{field}`", line + 1))
                })?;
                row.push(v);
            }
            signal.push(&row)?;
        }
        Ok((signal, names))
    }

    pub fn write_csv<W: Write>(&self, writer: W, names: &[String]) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["t".to_string()];
        header.extend((0..self.dim).map(|i| {
            names
                .get(i)
                .cloned()
                .unwrap_or_else(|| super::default_var_name(i))
        }));
        w.write_record(&header)?;
        for (k, s) in self.samples().enumerate() {
            let mut rec = vec![(self.start + k).to_string()];
            rec.extend(s.iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()
    }
}
