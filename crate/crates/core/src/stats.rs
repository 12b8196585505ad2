//! Pearson correlation across per-model metric columns.

use std::cmp::Ordering;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("zero variance")]
    ZeroVariance,
    #[error("column `{column}`: zero variance")]
    ConstantColumn { column: String },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 observations, found {0}")]
    TooFewObservations(usize),
    #[error("column `{0}` not found")]
    MissingColumn(String),
    #[error("column `{column}` has {found} values for {expected} models")]
    RaggedColumn {
        column: String,
        expected: usize,
        found: usize,
    },
    #[error("column `{column}`, model `{model}`: cannot parse `{value}` as a number")]
    BadValue {
        column: String,
        model: String,
        value: String,
    },
    #[error("column `{column}` is missing a value for model `{model}`")]
    MissingValue { column: String, model: String },
    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut compensation = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            compensation += (sum - t) + v;
        } else {
            compensation += (v - t) + sum;
        }
        sum = t;
    }
    sum + compensation
}

fn is_constant(x: &[f64]) -> bool {
    x.iter().all(|&v| v == x[0])
}

/// Product-moment correlation, computed from deviations about two-pass means.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(StatsError::TooFewObservations(x.len()));
    }
    if is_constant(x) || is_constant(y) {
        return Err(StatsError::ZeroVariance);
    }
    let n = x.len() as f64;
    let mean = |v: &[f64]| {
        let m = compensated_sum(v.iter().copied()) / n;
        // Second pass corrects the rounding of the first.
        m + compensated_sum(v.iter().map(|&a| a - m)) / n
    };
    let (mx, my) = (mean(x), mean(y));
    let sxy = compensated_sum(x.iter().zip(y).map(|(&a, &b)| (a - mx) * (b - my)));
    let sxx = compensated_sum(x.iter().map(|&a| (a - mx) * (a - mx)));
    let syy = compensated_sum(y.iter().map(|&b| (b - my) * (b - my)));
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Named numeric columns, one value per model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricTable {
    models: Vec<String>,
    columns: Vec<(String, Vec<f64>)>,
}

impl MetricTable {
    pub fn new(models: Vec<String>) -> Self {
        MetricTable {
            models,
            columns: Vec::new(),
        }
    }

    pub fn with_column(mut self, name: &str, values: Vec<f64>) -> Result<Self, StatsError> {
        self.push_column(name, values)?;
        Ok(self)
    }

    pub fn push_column(&mut self, name: &str, values: Vec<f64>) -> Result<(), StatsError> {
        if values.len() != self.models.len() {
            return Err(StatsError::RaggedColumn {
                column: name.to_string(),
                expected: self.models.len(),
                found: values.len(),
            });
        }
        if self.column(name).is_some() {
            return Err(StatsError::DuplicateColumn(name.to_string()));
        }
        self.columns.push((name.to_string(), values));
        Ok(())
    }

    pub fn models(&self) -> &[String] {
        &self.models
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    /// A table restricted to `names`, in that order.
    pub fn select(&self, names: &[&str]) -> Result<MetricTable, StatsError> {
        let mut out = MetricTable::new(self.models.clone());
        for &name in names {
            let col = self
                .column(name)
                .ok_or_else(|| StatsError::MissingColumn(name.to_string()))?;
            out.push_column(name, col.to_vec())?;
        }
        Ok(out)
    }

    /// Reads a CSV whose first column holds model names. Columns with an
    /// empty cell are skipped unless listed in `required`, in which case the
    /// gap is an error.
    pub fn from_csv<R: Read>(reader: R, required: &[&str]) -> Result<MetricTable, StatsError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let mut models = Vec::new();
        let mut cells: Vec<Vec<String>> = vec![Vec::new(); headers.len().saturating_sub(1)];
        for record in rdr.records() {
            let record = record?;
            models.push(record.get(0).unwrap_or_default().to_string());
            for (i, col) in cells.iter_mut().enumerate() {
                col.push(record.get(i + 1).unwrap_or_default().trim().to_string());
            }
        }

        for name in required {
            if !headers.iter().skip(1).any(|h| h == name) {
                return Err(StatsError::MissingColumn(name.to_string()));
            }
        }

        let mut table = MetricTable::new(models.clone());
        for (name, raw) in headers.iter().skip(1).zip(cells) {
            let is_required = required.contains(&name.as_str());
            if let Some(idx) = raw.iter().position(String::is_empty) {
                if is_required {
                    return Err(StatsError::MissingValue {
                        column: name.clone(),
                        model: models[idx].clone(),
                    });
                }
                continue;
            }
            let mut values = Vec::with_capacity(raw.len());
            for (model, value) in models.iter().zip(&raw) {
                values.push(value.parse::<f64>().map_err(|_| StatsError::BadValue {
                    column: name.clone(),
                    model: model.clone(),
                    value: value.clone(),
                })?);
            }
            table.push_column(name, values)?;
        }
        Ok(table)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    pub r: Vec<Vec<f64>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.labels.iter().position(|l| l == a)?;
        let j = self.labels.iter().position(|l| l == b)?;
        Some(self.r[i][j])
    }

    /// Upper-triangle pairs `(a, b, r)` in label order.
    pub fn pairs(&self) -> Vec<(&str, &str, f64)> {
        let mut out = Vec::new();
        for i in 0..self.labels.len() {
            for j in i + 1..self.labels.len() {
                out.push((self.labels[i].as_str(), self.labels[j].as_str(), self.r[i][j]));
            }
        }
        out
    }

    pub fn check_invariants(&self) -> Result<(), String> {
        let n = self.labels.len();
        if self.r.len() != n || self.r.iter().any(|row| row.len() != n) {
            return Err("correlation matrix is not square".to_string());
        }
        for i in 0..n {
            if self.r[i][i] != 1.0 {
                return Err(format!("diagonal entry {} is not 1", self.labels[i]));
            }
            for j in 0..n {
                if self.r[i][j] != self.r[j][i] {
                    return Err("correlation matrix is not symmetric".to_string());
                }
                if self.r[i][j].abs() > 1.0 + 1e-12 {
                    return Err(format!("|r| > 1 at ({}, {})", self.labels[i], self.labels[j]));
                }
            }
        }
        Ok(())
    }

    /// Labels header row, then one row per label with full-precision values.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), StatsError> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec![String::new()];
        header.extend(self.labels.iter().cloned());
        w.write_record(&header)?;
        for (label, row) in self.labels.iter().zip(&self.r) {
            let mut record = vec![label.clone()];
            record.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&record)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

pub fn correlation_matrix(table: &MetricTable) -> Result<CorrelationMatrix, StatsError> {
    let n_models = table.models().len();
    if n_models < 2 {
        return Err(StatsError::TooFewObservations(n_models));
    }
    for (name, values) in &table.columns {
        if is_constant(values) {
            return Err(StatsError::ConstantColumn {
                column: name.clone(),
            });
        }
    }
    let k = table.columns.len();
    let mut r = vec![vec![1.0; k]; k];
    for (i, (_, a)) in table.columns.iter().enumerate() {
        for (j, (_, b)) in table.columns.iter().enumerate().skip(i + 1) {
            let v = pearson(a, b)?;
            r[i][j] = v;
            r[j][i] = v;
        }
    }
    Ok(CorrelationMatrix {
        labels: table.columns.iter().map(|(n, _)| n.clone()).collect(),
        r,
    })
}

/// Models ordered by `key` descending, ties by name ascending.
pub fn rank_models(table: &MetricTable, key: &str) -> Result<Vec<String>, StatsError> {
    let values = table
        .column(key)
        .ok_or_else(|| StatsError::MissingColumn(key.to_string()))?;
    let mut order: Vec<(&String, f64)> = table.models().iter().zip(values.iter().copied()).collect();
    order.sort_by(|a, b| match b.1.total_cmp(&a.1) {
        Ordering::Equal => a.0.cmp(b.0),
        other => other,
    });
    Ok(order.into_iter().map(|(m, _)| m.clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Textbook single-pass formula, kept separate from the implementation.
    fn naive_pearson(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len() as f64;
        let (sx, sy) = (x.iter().sum::<f64>(), y.iter().sum::<f64>());
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        let sxx: f64 = x.iter().map(|a| a * a).sum();
        let syy: f64 = y.iter().map(|b| b * b).sum();
        (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt())
    }

    const MMLU: [f64; 4] = [72.10, 70.42, 61.68, 70.66];
    const TR: [f64; 4] = [48.63, 45.80, 40.33, 50.67];
    const VOCAB: [f64; 4] = [256000.0, 128256.0, 151665.0, 255029.0];

    #[test]
    fn exact_linear() {
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap(), 1.0);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn table_values() {
        let r = pearson(&TR, &MMLU).unwrap();
        assert!((r - 0.90).abs() <= 0.005, "{r}");
        let r = pearson(&VOCAB, &MMLU).unwrap();
        // Frozen from the single-pass formula: 0.5357.
        assert!((r - naive_pearson(&VOCAB, &MMLU)).abs() < 1e-12);
        assert!((r - 0.5357).abs() < 5e-5, "{r}");
    }

    #[test]
    fn errors() {
        assert!(matches!(pearson(&[1.0, 1.0], &[1.0, 2.0]), Err(StatsError::ZeroVariance)));
        assert!(matches!(pearson(&[1.0, 2.0], &[1.0]), Err(StatsError::LengthMismatch(2, 1))));
        assert!(matches!(pearson(&[1.0], &[1.0]), Err(StatsError::TooFewObservations(1))));
    }

    #[test]
    fn large_offset_columns_stay_accurate() {
        let x: Vec<f64> = (0..50).map(|i| 1e9 + i as f64).collect();
        let y: Vec<f64> = (0..50).map(|i| (i as f64) * 0.5 - 3.0).collect();
        assert!((pearson(&x, &y).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_column_matrix() {
        let t = MetricTable::new(vec!["a".into(), "b".into()])
            .with_column("x", vec![1.0, 2.0])
            .unwrap()
            .with_column("y", vec![10.0, 20.0])
            .unwrap();
        let m = correlation_matrix(&t).unwrap();
        assert_eq!(m.r, vec![vec![1.0, 1.0], vec![1.0, 1.0]]);
        m.check_invariants().unwrap();
    }

    #[test]
    fn constant_column_is_named() {
        let t = MetricTable::new(vec!["a".into(), "b".into()])
            .with_column("x", vec![1.0, 2.0])
            .unwrap()
            .with_column("flat", vec![3.0, 3.0])
            .unwrap();
        let err = correlation_matrix(&t).unwrap_err();
        assert_eq!(err.to_string(), "column `flat`: zero variance");
    }

    #[test]
    fn ranking() {
        let models: Vec<String> = ["gemma-2", "llama-3.1", "Qwen2.5", "aya-expanse"]
            .map(String::from)
            .to_vec();
        let t = MetricTable::new(models)
            .with_column("mmlu", MMLU.to_vec())
            .unwrap()
            .with_column("tie", vec![1.0, 1.0, 2.0, 1.0])
            .unwrap();
        assert_eq!(
            rank_models(&t, "mmlu").unwrap(),
            ["gemma-2", "aya-expanse", "llama-3.1", "Qwen2.5"]
        );
        assert_eq!(
            rank_models(&t, "tie").unwrap(),
            ["Qwen2.5", "aya-expanse", "gemma-2", "llama-3.1"]
        );
        assert!(matches!(rank_models(&t, "nope"), Err(StatsError::MissingColumn(_))));
        let single = MetricTable::new(vec!["only".into()]).with_column("k", vec![3.0]).unwrap();
        assert_eq!(rank_models(&single, "k").unwrap(), ["only"]);
    }

    #[test]
    fn csv_roundtrip_skips_incomplete_columns() {
        let csv = "model_name,a,b,c\nm1,1,,3\nm2,2,5,4\n";
        let t = MetricTable::from_csv(csv.as_bytes(), &[]).unwrap();
        assert_eq!(t.column_names(), ["a", "c"]);
        let err = MetricTable::from_csv(csv.as_bytes(), &["b"]).unwrap_err();
        assert!(matches!(err, StatsError::MissingValue { .. }));
        let err = MetricTable::from_csv(csv.as_bytes(), &["z"]).unwrap_err();
        assert!(matches!(err, StatsError::MissingColumn(_)));
    }

    #[test]
    fn matrix_csv_layout() {
        let m = CorrelationMatrix {
            labels: vec!["x".into(), "y".into()],
            r: vec![vec![1.0, 0.5], vec![0.5, 1.0]],
        };
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), ",x,y\nx,1,0.5\ny,0.5,1\n");
    }
}
