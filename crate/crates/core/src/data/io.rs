use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use ndarray::Array2;

use super::{FeatureMeta, SurvivalDataset};
use crate::error::{CoxError, Result};

const META_HEADER: [&str; 4] = ["name", "code", "window_id", "event_key"];

/// Reads a feature file (`time,event,<names...>`) and its meta file
/// (`name,code,window_id,event_key`).
pub fn load_dataset(features_path: &Path, meta_path: &Path) -> Result<SurvivalDataset> {
    let features = File::open(features_path).map_err(|e| CoxError::io(features_path, e))?;
    let meta = File::open(meta_path).map_err(|e| CoxError::io(meta_path, e))?;
    read_dataset(
        features,
        &features_path.display().to_string(),
        meta,
        &meta_path.display().to_string(),
    )
}

/// Same as [`load_dataset`] over arbitrary readers; the labels are used in
/// error messages.
pub fn read_dataset<F: Read, M: Read>(
    features: F,
    features_label: &str,
    meta: M,
    meta_label: &str,
) -> Result<SurvivalDataset> {
    let (names, times, events, x) = read_features(features, features_label)?;
    let meta = read_meta(meta, meta_label, &names)?;
    SurvivalDataset::new(x, times, events, meta)
}

type FeatureTable = (Vec<String>, Vec<f64>, Vec<bool>, Array2<f64>);

fn read_features<R: Read>(reader: R, label: &str) -> Result<FeatureTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| csv_error(label, e))?.clone();
    let format_err = |message: String| CoxError::Format {
        path: label.to_string(),
        message,
    };
    if header.get(0) != Some("time") {
        return Err(format_err("missing column 'time' (must be first)".into()));
    }
    if header.get(1) != Some("event") {
        return Err(format_err("missing column 'event' (must be second)".into()));
    }
    let names: Vec<String> = header.iter().skip(2).map(str::to_string).collect();
    if names.is_empty() {
        return Err(format_err("no feature columns after time,event".into()));
    }
    let mut seen = HashMap::new();
    for name in &names {
        if seen.insert(name.as_str(), ()).is_some() {
            return Err(format_err(format!("duplicate feature column '{name}'")));
        }
    }

    let p = names.len();
    let mut times = Vec::new();
    let mut events = Vec::new();
    let mut values = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(label, e))?;
        let line = record.position().map_or(0, |pos| pos.line());
        let parse_err = |column: &str, message: String| CoxError::Parse {
            path: label.to_string(),
            line,
            column: column.to_string(),
            message,
        };
        if record.len() != p + 2 {
            return Err(parse_err(
                "*",
                format!("expected {} fields, found {}", p + 2, record.len()),
            ));
        }
        let time: f64 = record[0]
            .parse()
            .map_err(|_| parse_err("time", format!("'{}' is not a number", &record[0])))?;
        if !(time.is_finite() && time > 0.0) {
            return Err(parse_err("time", format!("time must be positive, got {time}")));
        }
        let event = match &record[1] {
            "0" => false,
            "1" => true,
            other => return Err(parse_err("event", format!("event must be 0 or 1, got '{other}'"))),
        };
        times.push(time);
        events.push(event);
        for (j, name) in names.iter().enumerate() {
            let cell = &record[j + 2];
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_err(name, format!("'{cell}' is not a number")))?;
            if !v.is_finite() {
                return Err(parse_err(name, format!("non-finite value '{cell}'")));
            }
            values.push(v);
        }
    }
    if times.is_empty() {
        return Err(format_err("no data rows".into()));
    }
    let x = Array2::from_shape_vec((times.len(), p), values)
        .expect("row lengths checked while parsing");
    Ok((names, times, events, x))
}

fn read_meta<R: Read>(reader: R, label: &str, names: &[String]) -> Result<Vec<FeatureMeta>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| csv_error(label, e))?.clone();
    let format_err = |message: String| CoxError::Format {
        path: label.to_string(),
        message,
    };
    if header.iter().ne(META_HEADER) {
        return Err(format_err(format!(
            "header must be '{}', found '{}'",
            META_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let mut slots: Vec<Option<FeatureMeta>> = vec![None; names.len()];
    let mut described = 0usize;
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(label, e))?;
        let line = record.position().map_or(0, |pos| pos.line());
        let parse_err = |column: &str, message: String| CoxError::Parse {
            path: label.to_string(),
            line,
            column: column.to_string(),
            message,
        };
        if record.len() != META_HEADER.len() {
            return Err(parse_err(
                "*",
                format!("expected 4 fields, found {}", record.len()),
            ));
        }
        described += 1;
        let name = &record[0];
        let Some(&id) = index.get(name) else {
            return Err(parse_err(
                "name",
                format!("feature '{name}' does not appear in the feature file"),
            ));
        };
        if slots[id].is_some() {
            return Err(parse_err("name", format!("feature '{name}' described twice")));
        }
        let code = &record[1];
        if code.is_empty() {
            return Err(parse_err("code", "code must be non-empty".into()));
        }
        let window_id: u32 = record[2].parse().map_err(|_| {
            parse_err(
                "window_id",
                format!("'{}' is not a non-negative integer", &record[2]),
            )
        })?;
        slots[id] = Some(FeatureMeta::new(id, name, code, window_id, &record[3]));
    }
    if described != names.len() {
        return Err(format_err(format!(
            "meta describes {described} features but the feature file has {} feature columns",
            names.len()
        )));
    }
    Ok(slots.into_iter().map(|m| m.expect("all slots filled")).collect())
}

fn csv_error(label: &str, err: csv::Error) -> CoxError {
    let line = err.position().map_or(0, |p| p.line());
    CoxError::Parse {
        path: label.to_string(),
        line,
        column: "*".into(),
        message: err.to_string(),
    }
}

/// Writes the dataset in the same two-file format [`load_dataset`] reads.
pub fn write_dataset(ds: &SurvivalDataset, features_path: &Path, meta_path: &Path) -> Result<()> {
    let features = File::create(features_path).map_err(|e| CoxError::io(features_path, e))?;
    let meta = File::create(meta_path).map_err(|e| CoxError::io(meta_path, e))?;
    write_dataset_to(ds, features, meta).map_err(|e| CoxError::io(features_path, e))
}

pub fn write_dataset_to<F: Write, M: Write>(
    ds: &SurvivalDataset,
    features: F,
    meta: M,
) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(features);
    let mut header = vec!["time".to_string(), "event".to_string()];
    header.extend(ds.feature_names());
    w.write_record(&header)?;
    for i in 0..ds.n() {
        let mut row = Vec::with_capacity(ds.p() + 2);
        // f64 Display is the shortest representation that round-trips.
        row.push(ds.times()[i].to_string());
        row.push(if ds.events()[i] { "1" } else { "0" }.to_string());
        row.extend(ds.row(i).iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_writer(meta);
    w.write_record(META_HEADER)?;
    for m in ds.meta() {
        w.write_record([
            m.name.as_str(),
            m.code.as_str(),
            &m.window_id.to_string(),
            m.event_key.as_str(),
        ])?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    const META2: &str = "name,code,window_id,event_key\nf0,I50.1,1,I50\nf1,J18.0,0,J18\n";

    fn read(features: &str, meta: &str) -> Result<SurvivalDataset> {
        read_dataset(features.as_bytes(), "features.csv", meta.as_bytes(), "meta.csv")
    }

    #[test]
    fn loads_and_sorts() {
        let ds = read(
            "time,event,f0,f1\n5,1,0.1,1\n2,1,0.2,2\n9,0,0.3,3\n",
            META2,
        )
        .unwrap();
        assert_eq!(ds.times(), &[2.0, 5.0, 9.0]);
        assert_eq!(ds.events(), &[true, true, false]);
        assert_eq!(ds.x().column(1).to_vec(), vec![2.0, 1.0, 3.0]);
        assert!(!ds.is_standardized());
        assert_eq!(ds.meta()[0].code, "I50.1");
        assert_eq!(ds.meta()[1].window_id, 0);
    }

    #[test]
    fn comment_lines_are_skipped() {
        let ds = read(
            "# coxstab 0.1.0\n# config: {}\ntime,event,f0,f1\n5,1,0.1,1\n2,1,0.2,2\n",
            &format!("# provenance\n{META2}"),
        )
        .unwrap();
        assert_eq!(ds.n(), 2);
        assert_eq!(ds.times(), &[2.0, 5.0]);
    }

    #[test]
    fn zero_time_names_line() {
        let err = read(
            "time,event,f0,f1\n5,1,0,1\n2,1,0,2\n0,0,0,3\n",
            META2,
        )
        .unwrap_err();
        match err {
            CoxError::Parse { line, ref column, .. } => {
                assert_eq!(line, 4);
                assert_eq!(column, "time");
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert!(err.to_string().contains("line 4"));
    }

    #[test]
    fn meta_with_extra_feature_is_a_mismatch() {
        let meta = "name,code,window_id,event_key\nf0,I50.1,1,I50\nf1,J18.0,0,J18\nf2,K00,0,K00\n";
        let err = read("time,event,f0,f1\n5,1,0,1\n", meta).unwrap_err();
        assert!(matches!(err, CoxError::Parse { .. } | CoxError::Format { .. }));
        assert!(err.to_string().contains("f2"), "{err}");
    }

    #[test]
    fn meta_missing_feature_is_a_mismatch() {
        let meta = "name,code,window_id,event_key\nf0,I50.1,1,I50\n";
        let err = read("time,event,f0,f1\n5,1,0,1\n", meta).unwrap_err();
        assert!(matches!(err, CoxError::Format { .. }));
        assert!(err.to_string().contains("meta describes 1"), "{err}");
    }

    #[test]
    fn non_numeric_cell_names_column() {
        let err = read("time,event,f0,f1\n5,1,abc,1\n", META2).unwrap_err();
        match err {
            CoxError::Parse { line, column, .. } => {
                assert_eq!(line, 2);
                assert_eq!(column, "f0");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn missing_event_column() {
        let err = read("time,f0,f1\n5,1,1\n", META2).unwrap_err();
        assert!(err.to_string().contains("event"));
    }

    #[test]
    fn bad_event_flag() {
        let err = read("time,event,f0,f1\n5,2,1,1\n", META2).unwrap_err();
        assert!(matches!(err, CoxError::Parse { ref column, .. } if column == "event"));
    }

    #[test]
    fn ragged_row() {
        let err = read("time,event,f0,f1\n5,1,1\n", META2).unwrap_err();
        assert!(matches!(err, CoxError::Parse { line: 2, .. }));
    }

    #[test]
    fn write_then_read_round_trips() {
        let ds = read(
            "time,event,f0,f1\n5.25,1,0.1,1e-7\n2,1,-0.2,2\n9,0,0.3333333333333333,3\n",
            META2,
        )
        .unwrap();
        let (mut f, mut m) = (Vec::new(), Vec::new());
        write_dataset_to(&ds, &mut f, &mut m).unwrap();
        let back = read_dataset(&f[..], "f", &m[..], "m").unwrap();
        assert_eq!(back, ds);
    }
}
