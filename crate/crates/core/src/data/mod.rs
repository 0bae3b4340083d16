//! Survival datasets: feature matrix, follow-up times, censoring flags and
//! per-feature metadata.
//!
//! Rows are always kept ordered by non-decreasing time (stable with respect
//! to input order), which the partial-likelihood code relies on.

mod aggregate;
mod io;

pub use aggregate::{aggregate_events, EventRecord, IndexAdmission, Window};
pub use io::{load_dataset, read_dataset, write_dataset, write_dataset_to};

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{CoxError, Result};

/// Identity of one feature column: which code it counts and over which window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureMeta {
    pub feature_id: usize,
    /// Column name as it appears in the feature file header.
    pub name: String,
    /// Hierarchical code such as `I50.1`.
    pub code: String,
    /// Time-window tag; 0 marks a static feature (age, gender, ...).
    pub window_id: u32,
    /// The underlying event this feature aggregates.
    pub event_key: String,
}

impl FeatureMeta {
    pub fn new(
        feature_id: usize,
        name: impl Into<String>,
        code: impl Into<String>,
        window_id: u32,
        event_key: impl Into<String>,
    ) -> Self {
        FeatureMeta {
            feature_id,
            name: name.into(),
            code: code.into(),
            window_id,
            event_key: event_key.into(),
        }
    }
}

/// Column means and (population) standard deviations recorded when a dataset
/// is standardized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalDataset {
    x: Array2<f64>,
    times: Vec<f64>,
    events: Vec<bool>,
    meta: Vec<FeatureMeta>,
    standardization: Option<Standardization>,
}

impl SurvivalDataset {
    /// Builds a dataset, validating shapes and sorting rows by time.
    ///
    /// Sorting is stable, so rows with tied times keep their input order.
    pub fn new(
        x: Array2<f64>,
        times: Vec<f64>,
        events: Vec<bool>,
        meta: Vec<FeatureMeta>,
    ) -> Result<Self> {
        let (n, p) = x.dim();
        if times.len() != n || events.len() != n {
            return Err(CoxError::contract(format!(
                "row count mismatch: matrix has {n} rows, {} times, {} event flags",
                times.len(),
                events.len()
            )));
        }
        if meta.len() != p {
            return Err(CoxError::contract(format!(
                "matrix has {p} columns but {} feature descriptions were given",
                meta.len()
            )));
        }
        validate_meta(&meta)?;
        if let Some(i) = times.iter().position(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(CoxError::contract(format!(
                "time at row {i} is {}, must be positive and finite",
                times[i]
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(CoxError::contract("feature matrix contains non-finite values"));
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
        let x = x.select(Axis(0), &order);
        let times = order.iter().map(|&i| times[i]).collect();
        let events = order.iter().map(|&i| events[i]).collect();
        Ok(SurvivalDataset {
            x,
            times,
            events,
            meta,
            standardization: None,
        })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    /// Number of uncensored observations.
    pub fn q(&self) -> usize {
        self.events.iter().filter(|&&e| e).count()
    }

    pub fn x(&self) -> ArrayView2<'_, f64> {
        self.x.view()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.x.row(i)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn events(&self) -> &[bool] {
        &self.events
    }

    pub fn meta(&self) -> &[FeatureMeta] {
        &self.meta
    }

    pub fn feature_names(&self) -> Vec<String> {
        self.meta.iter().map(|m| m.name.clone()).collect()
    }

    pub fn is_standardized(&self) -> bool {
        self.standardization.is_some()
    }

    pub fn standardization(&self) -> Option<&Standardization> {
        self.standardization.as_ref()
    }

    /// Population (divisor n) standard deviation of every column.
    pub fn column_sds(&self) -> Vec<f64> {
        column_moments(&self.x).1
    }

    /// Centers every column and scales it to unit population variance.
    ///
    /// Zero-variance columns are centered only.
    pub fn standardize(&self) -> Result<Self> {
        if self.is_standardized() {
            return Err(CoxError::contract("dataset is already standardized"));
        }
        let (means, sds) = column_moments(&self.x);
        let stats = Standardization { means, sds };
        let mut out = self.apply(&stats)?;
        out.standardization = Some(stats);
        Ok(out)
    }

    /// Applies externally recorded means/sds, e.g. those of a training set,
    /// to this (raw) dataset.
    pub fn standardize_with(&self, stats: &Standardization) -> Result<Self> {
        if self.is_standardized() {
            return Err(CoxError::contract("dataset is already standardized"));
        }
        let mut out = self.apply(stats)?;
        out.standardization = Some(stats.clone());
        Ok(out)
    }

    fn apply(&self, stats: &Standardization) -> Result<Self> {
        if stats.means.len() != self.p() || stats.sds.len() != self.p() {
            return Err(CoxError::contract(format!(
                "standardization has {} means / {} sds for {} features",
                stats.means.len(),
                stats.sds.len(),
                self.p()
            )));
        }
        let mut x = self.x.clone();
        for (j, mut col) in x.axis_iter_mut(Axis(1)).enumerate() {
            let (mean, sd) = (stats.means[j], stats.sds[j]);
            col.mapv_inplace(|v| {
                let c = v - mean;
                if sd > 0.0 {
                    c / sd
                } else {
                    c
                }
            });
        }
        Ok(SurvivalDataset {
            x,
            times: self.times.clone(),
            events: self.events.clone(),
            meta: self.meta.clone(),
            standardization: None,
        })
    }

    /// Maps a standardized matrix back to original units.
    pub fn unstandardized_x(&self) -> Array2<f64> {
        let Some(stats) = &self.standardization else {
            return self.x.clone();
        };
        let mut x = self.x.clone();
        for (j, mut col) in x.axis_iter_mut(Axis(1)).enumerate() {
            let (mean, sd) = (stats.means[j], stats.sds[j]);
            let scale = if sd > 0.0 { sd } else { 1.0 };
            col.mapv_inplace(|v| v * scale + mean);
        }
        x
    }

    /// Builds a new, unstandardized dataset from the given rows (repeats
    /// allowed), re-sorted by time. Used for bootstrap replicates.
    pub fn resample(&self, rows: &[usize]) -> Result<Self> {
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.n()) {
            return Err(CoxError::contract(format!(
                "row index {bad} out of range for {} rows",
                self.n()
            )));
        }
        let x = self.x.select(Axis(0), rows);
        let times = rows.iter().map(|&i| self.times[i]).collect();
        let events = rows.iter().map(|&i| self.events[i]).collect();
        SurvivalDataset::new(x, times, events, self.meta.clone())
    }
}

fn validate_meta(meta: &[FeatureMeta]) -> Result<()> {
    for (i, m) in meta.iter().enumerate() {
        if m.feature_id != i {
            return Err(CoxError::contract(format!(
                "feature ids must be contiguous: position {i} has id {}",
                m.feature_id
            )));
        }
        if m.code.is_empty() {
            return Err(CoxError::contract(format!(
                "feature '{}' has an empty code",
                m.name
            )));
        }
    }
    Ok(())
}

fn column_moments(x: &Array2<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = x.nrows() as f64;
    x.axis_iter(Axis(1))
        .map(|col| {
            if col.is_empty() {
                return (0.0, 0.0);
            }
            let mean = col.sum() / n;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            (mean, var.sqrt())
        })
        .unzip()
}

#[cfg(test)]
pub(crate) fn simple_meta(p: usize) -> Vec<FeatureMeta> {
    (0..p)
        .map(|j| FeatureMeta::new(j, format!("f{j}"), format!("C{j:02}.0"), 1, format!("e{j}")))
        .collect()
}
