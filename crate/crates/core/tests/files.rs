use coxstab::{generate, load_dataset, write_dataset, CoxError, ErrorClass, SynthConfig};

#[test]
fn dataset_survives_a_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let (ds, _) = generate(&SynthConfig { n: 80, ..SynthConfig::shipped() }).unwrap();
    let (f, m) = (dir.path().join("x.csv"), dir.path().join("meta.csv"));
    write_dataset(&ds, &f, &m).unwrap();
    let back = load_dataset(&f, &m).unwrap();
    assert_eq!(back.x(), ds.x());
    assert_eq!(back.times(), ds.times());
    assert_eq!(back.events(), ds.events());
    assert_eq!(back.meta(), ds.meta());
}

#[test]
fn missing_file_is_an_io_error_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let (ds, _) = generate(&SynthConfig { n: 20, n_noise: 2, ..SynthConfig::shipped() }).unwrap();
    let f = dir.path().join("x.csv");
    write_dataset(&ds, &f, &dir.path().join("meta.csv")).unwrap();
    let err = load_dataset(&f, &dir.path().join("absent.csv")).unwrap_err();
    assert!(matches!(err, CoxError::Io { .. }));
    assert_eq!(err.class(), ErrorClass::Parse);
    assert!(err.to_string().contains("absent.csv"));
}
