mod common;

use std::fs;

use common::*;
use terrapath::dataset::{load_sample, read_manifest, write_dataset, DatasetSpec, MANIFEST_NAME};
use terrapath::io::{read_ascii_grid, read_nnpr_file, write_ascii_grid, AsciiGrid};
use terrapath::search::path_stats;
use terrapath::{Cell, Raster};

#[test]
fn dataset_bytes_are_deterministic() {
    let spec = DatasetSpec::new(3, 16, 21);
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    write_dataset(&spec, a.path()).unwrap();
    write_dataset(&spec, b.path()).unwrap();
    let mut names: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 3 * 2 + 1);
    for n in names {
        assert_eq!(
            fs::read(a.path().join(&n)).unwrap(),
            fs::read(b.path().join(&n)).unwrap()
        );
    }
}

#[test]
fn manifest_lines_have_the_agreed_fields() {
    let dir = tempfile::tempdir().unwrap();
    let entries = write_dataset(&DatasetSpec::new(2, 16, 22), dir.path()).unwrap();
    let text = fs::read_to_string(dir.path().join(MANIFEST_NAME)).unwrap();
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        keys.sort();
        assert_eq!(
            keys,
            [
                "goal",
                "label_path",
                "omega",
                "sample_path",
                "seed",
                "start"
            ]
        );
    }
    assert_eq!(
        read_manifest(dir.path().join(MANIFEST_NAME)).unwrap(),
        entries
    );
}

#[test]
fn stored_samples_reload_consistently() {
    let dir = tempfile::tempdir().unwrap();
    let entries = write_dataset(&DatasetSpec::new(2, 24, 23), dir.path()).unwrap();
    for e in &entries {
        let chans = read_nnpr_file(dir.path().join(&e.sample_path)).unwrap();
        assert_eq!(chans.len(), 4);
        let s = load_sample::<f64>(dir.path(), e).unwrap();
        assert_eq!(s.label.start(), Some(s.start));
        assert_eq!(s.label.goal(), Some(s.goal));
        s.label.validate(&s.cost, 1.0).unwrap();
        // the label is re-checked on the f32-rounded costs actually stored
        let stats = path_stats(&s.label, &s.cost, s.omega).unwrap();
        let want = dijkstra_map(&s.cost, s.start, s.goal, s.omega, None).unwrap();
        assert!((stats.weighted_cost - want).abs() < 1e-5);
        assert_eq!(chans[1].get(s.start), 1.0);
        assert_eq!(chans[2].get(s.goal), 1.0);
        let on_label = chans[3].as_slice().iter().filter(|v| **v == 1.0).count();
        assert_eq!(on_label, s.label.len());
    }
}

#[test]
fn ascii_grid_round_trip() {
    let values = Raster::from_fn(4, 3, |c: Cell| c.x as f64 * 0.25 - c.y as f64);
    let grid = AsciiGrid {
        values,
        cell_size: 0.5,
    };
    let mut buf = Vec::new();
    write_ascii_grid(&mut buf, &grid).unwrap();
    assert!(String::from_utf8(buf.clone())
        .unwrap()
        .starts_with("4 3 0.5"));
    assert_eq!(read_ascii_grid(buf.as_slice()).unwrap(), grid);
    assert!(read_ascii_grid("2 2 1\n1 2 3\n".as_bytes()).is_err());
}
