use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::Read;

use crate::assignment::{Assignment, Probability};
use crate::error::{Error, Result};
use crate::inference::{joint, JointTable};
use crate::model::ChengModel;

/// Up to 64 binary columns; bit `i` of [`Record::bits`] is column `i`.
pub const MAX_COLUMNS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub bits: u64,
    pub weight: f64,
}

/// Weighted 0/1 records over named columns. Weights are counts or exposure
/// (e.g. person-time); every frequency is a ratio of summed weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<String>,
    records: Vec<Record>,
}

impl Dataset {
    pub fn new(columns: Vec<String>) -> Result<Self> {
        if columns.len() > MAX_COLUMNS {
            return Err(Error::Csv(format!("at most {MAX_COLUMNS} columns supported")));
        }
        let mut seen = HashSet::new();
        for c in &columns {
            if !seen.insert(c.as_str()) {
                return Err(Error::DuplicateName(c.clone()));
            }
        }
        Ok(Dataset {
            columns,
            records: Vec::new(),
        })
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.columns.iter().any(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn push(&mut self, values: &[bool], weight: f64) -> Result<()> {
        if values.len() != self.columns.len() {
            return Err(Error::Csv(format!(
                "record has {} values, expected {}",
                values.len(),
                self.columns.len()
            )));
        }
        let bits = values
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | (u64::from(b) << i));
        self.push_bits(bits, weight)
    }

    pub fn push_bits(&mut self, bits: u64, weight: f64) -> Result<()> {
        if !(weight >= 0.0 && weight.is_finite()) {
            return Err(Error::Csv(format!("weight must be finite and nonnegative, got {weight}")));
        }
        self.records.push(Record { bits, weight });
        Ok(())
    }

    pub fn total_weight(&self) -> f64 {
        self.records.iter().map(|r| r.weight).sum()
    }

    fn mask(&self, a: &Assignment) -> Result<(u64, u64)> {
        let mut mask = 0u64;
        let mut bits = 0u64;
        for (name, value) in a.iter() {
            let c = self.column(name)?;
            mask |= 1 << c;
            if value {
                bits |= 1 << c;
            }
        }
        Ok((mask, bits))
    }

    /// Total weight of records matching `a`.
    pub fn weight(&self, a: &Assignment) -> Result<f64> {
        let (mask, bits) = self.mask(a)?;
        Ok(self
            .records
            .iter()
            .filter(|r| r.bits & mask == bits)
            .map(|r| r.weight)
            .sum())
    }

    /// Weighted relative frequency of `event` among records matching `given`.
    pub fn conditional(&self, event: &Assignment, given: &Assignment) -> Result<Probability> {
        let den = self.weight(given)?;
        match event.merged(given) {
            Some(both) => Ok(Probability::ratio(self.weight(&both)?, den)),
            None => {
                self.mask(event)?;
                Ok(Probability::ratio(0.0, den))
            }
        }
    }

    pub fn scaled(&self, factor: f64) -> Dataset {
        Dataset {
            columns: self.columns.clone(),
            records: self
                .records
                .iter()
                .map(|r| Record {
                    bits: r.bits,
                    weight: r.weight * factor,
                })
                .collect(),
        }
    }

    /// Flip one column's values.
    pub fn relabeled(&self, name: &str) -> Result<Dataset> {
        let c = self.column(name)?;
        Ok(Dataset {
            columns: self.columns.clone(),
            records: self
                .records
                .iter()
                .map(|r| Record {
                    bits: r.bits ^ (1 << c),
                    weight: r.weight,
                })
                .collect(),
        })
    }

    /// Marginal of `table` on `columns`, one weighted record per cell with positive mass.
    pub fn from_joint(table: &JointTable, columns: &[&str]) -> Result<Dataset> {
        let idx: Vec<usize> = columns
            .iter()
            .map(|c| {
                table
                    .variables()
                    .iter()
                    .position(|v| v == c)
                    .ok_or_else(|| Error::UnknownVariable(c.to_string()))
            })
            .collect::<Result<_>>()?;
        let mut weights = vec![0.0; 1 << columns.len()];
        for (cell, &p) in table.probs().iter().enumerate() {
            let key = idx
                .iter()
                .enumerate()
                .fold(0usize, |acc, (i, &t)| acc | ((cell >> t & 1) << i));
            weights[key] += p;
        }
        let mut data = Dataset::new(columns.iter().map(|c| c.to_string()).collect())?;
        for (bits, w) in weights.into_iter().enumerate() {
            if w > 0.0 {
                data.push_bits(bits as u64, w)?;
            }
        }
        Ok(data)
    }

    /// Parse CSV: a header of column names, optionally ending in `weight`; 0/1 values.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Dataset> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let weighted = header.last().is_some_and(|h| h == "weight");
        let names: Vec<String> = if weighted {
            header[..header.len() - 1].to_vec()
        } else {
            header.clone()
        };
        let mut data = Dataset::new(names)?;
        let ncols = data.columns.len();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let line = row + 2;
            let mut bits = 0u64;
            for i in 0..ncols {
                match rec.get(i) {
                    Some("0") => {}
                    Some("1") => bits |= 1 << i,
                    other => {
                        return Err(Error::Parse {
                            line,
                            message: format!("column {} must be 0 or 1, got {other:?}", data.columns[i]),
                        })
                    }
                }
            }
            let weight = if weighted {
                let raw = rec.get(ncols).unwrap_or("");
                raw.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    message: format!("bad weight {raw:?}"),
                })?
            } else {
                1.0
            };
            data.push_bits(bits, weight).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
        }
        if data.total_weight() <= 0.0 {
            return Err(Error::Csv("total weight must be positive".into()));
        }
        Ok(data)
    }

    pub fn from_csv_str(text: &str) -> Result<Dataset> {
        Self::from_csv_reader(text.as_bytes())
    }

    /// CSV text; the weight column is written only when some weight differs from 1.
    pub fn to_csv(&self) -> String {
        let weighted = self.records.iter().any(|r| r.weight != 1.0);
        let mut out = self.columns.join(",");
        if weighted {
            out.push_str(",weight");
        }
        out.push('\n');
        for r in &self.records {
            let cells: Vec<String> = (0..self.columns.len())
                .map(|i| (r.bits >> i & 1).to_string())
                .collect();
            out.push_str(&cells.join(","));
            if weighted {
                let _ = write!(out, ",{}", r.weight);
            }
            out.push('\n');
        }
        out
    }
}

/// Exact observed-variable frequencies implied by a model.
pub fn exact_frequencies(model: &ChengModel) -> Result<Dataset> {
    let table = joint(model)?;
    Dataset::from_joint(&table, &model.observed_names())
}
