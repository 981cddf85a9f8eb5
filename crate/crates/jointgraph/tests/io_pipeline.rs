use std::fs;
use std::path::Path;

use jointgraph::io::{
    preprocess_files, read_pair_dir, write_pair_dir, write_preprocessed, A1_FILE, LABELS_FILE,
    MANIFEST_FILE,
};
use jointgraph::Error;
use jointgraph_core::synth::{sample_correlated_pair, SbmSpec};

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn preprocess_aligns_binarizes_and_drops_isolated() {
    let dir = tempfile::tempdir().unwrap();
    // a-b appears in both directions with weights, c has only a loop, d-e
    // has weight zero, f appears only in the labels.
    let a = write(
        dir.path(),
        "chem.csv",
        "source,target,weight\na,b,2\nb,a,1\nc,c,4\nd,e,0\nb,c,1\n",
    );
    let b = write(
        dir.path(),
        "gap.csv",
        "source,target,weight\r\na,b,1\r\nb,a,1\r\nb,c,1\r\n",
    );
    let l = write(
        dir.path(),
        "labels.csv",
        "vertex,label\na,motor\nb,sensory\nc,motor\nd,inter\ne,inter\nf,inter\n",
    );
    let p = preprocess_files(&a, &b, &l).unwrap();
    let r = &p.report;
    assert_eq!(r.union_vertices, 6);
    assert_eq!(p.pair.vertices().names(), &["a", "b", "c"]);
    assert_eq!(r.kept_vertices, 3);
    assert_eq!(r.g1.vertices_in_file, 5);
    assert_eq!(r.g1.arcs, 5);
    assert_eq!(r.g1.loops, 1);
    assert_eq!(r.g1.edges, 2);
    assert_eq!(r.g2.edges, 2);
    assert_eq!(r.g1.isolated, 3);
    assert_eq!(r.g2.isolated, 3);
    assert_eq!(r.g1.kept_edges, 2);
    assert!((r.g1.sparsity - 2.0 / 15.0).abs() < 1e-15);
    assert!((r.g1.kept_sparsity - 2.0 / 3.0).abs() < 1e-15);
    assert_eq!(
        r.kept_label_proportions,
        vec![
            ("motor".to_string(), 2, 200.0 / 3.0),
            ("sensory".to_string(), 1, 100.0 / 3.0)
        ]
    );
    assert_eq!(
        r.label_proportions,
        vec![
            ("inter".to_string(), 3, 50.0),
            ("motor".to_string(), 2, 200.0 / 6.0),
            ("sensory".to_string(), 1, 100.0 / 6.0)
        ]
    );
    let text = r.render();
    assert!(text.contains("kept_vertices: 3"));
    assert!(text.contains("label.inter: 3 (50.00%)"));
    assert!(text.contains("kept_label.motor: 2 (66.67%)"));

    let out = dir.path().join("pair");
    write_preprocessed(&out, &p).unwrap();
    let back = read_pair_dir(&out).unwrap();
    assert_eq!(back, p.pair);
    assert!(out.join("stats.txt").exists());
}

#[test]
fn unlabeled_vertex_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.csv", "source,target,weight\nx,y,1\n");
    let l = write(dir.path(), "l.csv", "vertex,label\nx,one\n");
    let err = preprocess_files(&a, &a, &l).unwrap_err();
    assert!(matches!(err, Error::Validation(_)), "{err}");
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn missing_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.csv");
    let err = preprocess_files(&missing, &missing, &missing).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("nope.csv"));
}

#[test]
fn pair_dir_round_trip_keeps_labels() {
    let spec = SbmSpec::planted(2, 15, 0.5, 0.1, 0.7).unwrap();
    let pair = sample_correlated_pair(&spec, 4).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_pair_dir(dir.path(), &pair).unwrap();
    assert_eq!(read_pair_dir(dir.path()).unwrap(), pair);
    // Writing twice gives the same bytes.
    let first = fs::read(dir.path().join(A1_FILE)).unwrap();
    write_pair_dir(dir.path(), &pair).unwrap();
    assert_eq!(fs::read(dir.path().join(A1_FILE)).unwrap(), first);
}

#[test]
fn pair_dir_disagreeing_with_manifest_is_refused() {
    let spec = SbmSpec::planted(1, 6, 0.5, 0.5, 0.5).unwrap();
    let pair = sample_correlated_pair(&spec, 1).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_pair_dir(dir.path(), &pair).unwrap();

    let a1 = dir.path().join(A1_FILE);
    let mut text = fs::read_to_string(&a1).unwrap();
    text.push_str("v0000,stranger,1\n");
    fs::write(&a1, text).unwrap();
    let err = read_pair_dir(dir.path()).unwrap_err();
    assert!(matches!(err, Error::Validation(_)), "{err}");
    assert!(err.to_string().contains("manifest"));

    write_pair_dir(dir.path(), &pair).unwrap();
    fs::write(
        dir.path().join(MANIFEST_FILE),
        "v0001\nv0000\nv0002\nv0003\nv0004\nv0005\n",
    )
    .unwrap();
    assert!(matches!(
        read_pair_dir(dir.path()),
        Err(Error::Validation(_))
    ));

    write_pair_dir(dir.path(), &pair).unwrap();
    fs::write(dir.path().join(LABELS_FILE), "vertex,label\nv0000,b0\n").unwrap();
    assert!(read_pair_dir(dir.path()).is_err());
}
