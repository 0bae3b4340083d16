//! Turns a stream of coded events into per-window count features.
//!
//! This is a plain histogram over disjoint look-back windows: a feature is
//! one (code, window) pair and its value is the number of matching events
//! that occurred in that window before the index admission.

use std::collections::{BTreeMap, HashMap};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{FeatureMeta, SurvivalDataset};
use crate::error::{CoxError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    /// Index admission this event is measured against.
    pub admission: String,
    pub event_key: String,
    pub code: String,
    pub days_before_index: f64,
}

/// Half-open look-back range `[lo, hi)` in days before the index admission.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Self {
        Window { lo, hi }
    }

    fn contains(&self, days: f64) -> bool {
        self.lo <= days && days < self.hi
    }
}

/// One row of the resulting dataset: follow-up time and outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexAdmission {
    pub id: String,
    pub time: f64,
    pub event: bool,
}

/// Window ids in the produced metadata start at 1; 0 is reserved for static
/// features. Features are ordered by (code, window).
pub fn aggregate_events(
    events: &[EventRecord],
    windows: &[Window],
    admissions: &[IndexAdmission],
) -> Result<SurvivalDataset> {
    if events.is_empty() {
        return Err(CoxError::contract("event stream is empty"));
    }
    if admissions.is_empty() {
        return Err(CoxError::contract("no index admissions"));
    }
    validate_windows(windows)?;
    if let Some(e) = events.iter().find(|e| !(e.days_before_index >= 0.0)) {
        return Err(CoxError::contract(format!(
            "event '{}' for admission '{}' has days_before_index {}, must be >= 0",
            e.code, e.admission, e.days_before_index
        )));
    }

    let rows: HashMap<&str, usize> = admissions
        .iter()
        .enumerate()
        .map(|(i, a)| (a.id.as_str(), i))
        .collect();
    if rows.len() != admissions.len() {
        return Err(CoxError::contract("duplicate index admission id"));
    }

    // (code, window_id) -> counts per admission row
    let mut counts: BTreeMap<(&str, u32), Vec<f64>> = BTreeMap::new();
    let mut keys: HashMap<&str, &str> = HashMap::new();
    for e in events {
        let Some(&row) = rows.get(e.admission.as_str()) else {
            continue;
        };
        let Some(w) = windows.iter().position(|w| w.contains(e.days_before_index)) else {
            continue;
        };
        match keys.get(e.code.as_str()) {
            Some(&k) if k != e.event_key => {
                return Err(CoxError::contract(format!(
                    "code '{}' appears with event keys '{k}' and '{}'",
                    e.code, e.event_key
                )))
            }
            Some(_) => {}
            None => {
                keys.insert(&e.code, &e.event_key);
            }
        }
        counts
            .entry((e.code.as_str(), w as u32 + 1))
            .or_insert_with(|| vec![0.0; admissions.len()])[row] += 1.0;
    }
    if counts.is_empty() {
        return Err(CoxError::contract(
            "no events fall inside any window for the given admissions",
        ));
    }

    let n = admissions.len();
    let p = counts.len();
    let mut x = Array2::zeros((n, p));
    let mut meta = Vec::with_capacity(p);
    for (j, ((code, window_id), col)) in counts.into_iter().enumerate() {
        x.column_mut(j).assign(&ndarray::Array1::from(col));
        meta.push(FeatureMeta::new(
            j,
            format!("{code}@w{window_id}"),
            code,
            window_id,
            keys[code],
        ));
    }
    SurvivalDataset::new(
        x,
        admissions.iter().map(|a| a.time).collect(),
        admissions.iter().map(|a| a.event).collect(),
        meta,
    )
}

fn validate_windows(windows: &[Window]) -> Result<()> {
    if windows.is_empty() {
        return Err(CoxError::contract("at least one window is required"));
    }
    for w in windows {
        if !(w.lo >= 0.0 && w.hi > w.lo) {
            return Err(CoxError::contract(format!(
                "window [{}, {}) must satisfy 0 <= lo < hi",
                w.lo, w.hi
            )));
        }
    }
    let mut sorted: Vec<_> = windows.to_vec();
    sorted.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    for pair in sorted.windows(2) {
        if pair[1].lo < pair[0].hi {
            return Err(CoxError::contract(format!(
                "windows [{}, {}) and [{}, {}) overlap",
                pair[0].lo, pair[0].hi, pair[1].lo, pair[1].hi
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(adm: &str, code: &str, days: f64) -> EventRecord {
        EventRecord {
            admission: adm.into(),
            event_key: code.into(),
            code: code.into(),
            days_before_index: days,
        }
    }

    fn adm(id: &str, time: f64) -> IndexAdmission {
        IndexAdmission {
            id: id.into(),
            time,
            event: true,
        }
    }

    fn windows() -> Vec<Window> {
        vec![Window::new(0.0, 90.0), Window::new(90.0, 365.0)]
    }

    #[test]
    fn counts_per_window() {
        let ds = aggregate_events(
            &[ev("a", "I50", 10.0), ev("a", "I50", 100.0)],
            &windows(),
            &[adm("a", 30.0)],
        )
        .unwrap();
        assert_eq!(ds.p(), 2);
        assert_eq!(ds.row(0).to_vec(), vec![1.0, 1.0]);
        assert_eq!(ds.meta()[0].window_id, 1);
        assert_eq!(ds.meta()[1].window_id, 2);
        assert_eq!(ds.meta()[1].code, "I50");
        assert_eq!(ds.meta()[1].event_key, "I50");
    }

    #[test]
    fn patient_without_events_gets_zero_row() {
        let ds = aggregate_events(
            &[ev("a", "I50", 10.0)],
            &windows(),
            &[adm("a", 30.0), adm("b", 40.0)],
        )
        .unwrap();
        assert_eq!(ds.times(), &[30.0, 40.0]);
        assert_eq!(ds.row(1).to_vec(), vec![0.0]);
    }

    #[test]
    fn repeated_events_accumulate() {
        let ds = aggregate_events(
            &[ev("a", "I50", 10.0), ev("a", "I50", 10.0)],
            &windows(),
            &[adm("a", 30.0)],
        )
        .unwrap();
        assert_eq!(ds.row(0).to_vec(), vec![2.0]);
    }

    #[test]
    fn rejects_empty_stream_and_negative_days() {
        assert!(aggregate_events(&[], &windows(), &[adm("a", 1.0)]).is_err());
        assert!(aggregate_events(&[ev("a", "I50", -1.0)], &windows(), &[adm("a", 1.0)]).is_err());
    }

    #[test]
    fn rejects_overlapping_windows() {
        let w = vec![Window::new(0.0, 100.0), Window::new(90.0, 365.0)];
        assert!(aggregate_events(&[ev("a", "I50", 1.0)], &w, &[adm("a", 1.0)]).is_err());
    }
}
