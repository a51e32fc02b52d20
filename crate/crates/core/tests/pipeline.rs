use std::path::Path;

use glint::annotate::{read_manifest, write_manifest};
use glint::eval::{DetectionsFile, DEFAULT_THRESHOLDS};
use glint::{evaluate, generate, inspect, write_patches, Detection, Error, GenerateOptions, Protocol, ProtocolConfig};

fn small(protocol: Protocol, frames: u64, out: &Path) -> ProtocolConfig {
    let mut c = ProtocolConfig::preset(protocol);
    c.seed = 17;
    c.frames = frames;
    c.dimensions = vec![[120, 90]];
    c.prestudy.size = 80;
    c.render.spp = 2;
    c.output = Some(out.to_path_buf());
    c
}

fn run(cfg: &ProtocolConfig) -> (glint::DatasetManifest, glint::dataset::GenerateStats) {
    generate(cfg, &GenerateOptions::from_config(cfg).unwrap()).unwrap()
}

#[test]
fn dataset_layout_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let (m, stats) = run(&small(Protocol::Dr, 6, dir.path()));
    assert_eq!(stats.rendered, 6);
    assert_eq!(m.frames.len(), 6);
    for f in &m.frames {
        assert!(dir.path().join(&f.image).is_file());
        assert!(dir.path().join(&f.id_buffer).is_file());
        assert_eq!((f.width, f.height), (f.spec.width, f.spec.height));
    }
    let back = read_manifest(dir.path()).unwrap();
    assert_eq!(back, m);
    back.check().unwrap();
}

#[test]
fn resume_reuses_finished_frames() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(Protocol::Ra, 5, dir.path());
    let (first, _) = run(&cfg);
    let image = dir.path().join(&first.frames[2].image);
    let before = std::fs::read(&image).unwrap();

    // Drop one frame's sidecar and the manifest, as after a crash.
    std::fs::remove_file(dir.path().join("records/frame_000002.json")).unwrap();
    std::fs::remove_file(dir.path().join("manifest.json")).unwrap();
    let (second, stats) = run(&cfg);
    assert_eq!(stats.reused, 4);
    assert_eq!(stats.rendered, 1);
    assert_eq!(second, first);
    assert_eq!(std::fs::read(&image).unwrap(), before);
}

#[test]
fn changed_seed_rerenders() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small(Protocol::Prestudy, 3, dir.path());
    run(&cfg);
    cfg.seed += 1;
    let (_, stats) = run(&cfg);
    assert_eq!(stats.rendered, 3);
}

#[test]
fn zero_frames_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(Protocol::Dr, 0, dir.path());
    assert!(matches!(
        generate(&cfg, &GenerateOptions::from_config(&cfg).unwrap()),
        Err(Error::Config(_))
    ));
}

#[test]
fn inspect_clean_and_corrupted() {
    let dir = tempfile::tempdir().unwrap();
    // The audit accepts only the default frame sizes.
    let mut cfg = small(Protocol::Dr, 4, dir.path());
    cfg.dimensions = vec![[300, 300]];
    let (mut m, _) = run(&cfg);
    let r = inspect(dir.path()).unwrap();
    assert!(r.violations.is_empty(), "{:?}", r.violations);
    assert_eq!(r.frames, 4);
    assert_eq!(r.class_counts.len(), 6);
    assert_eq!(r.visibility_histogram.iter().sum::<usize>(), r.annotations);

    // Pad frame 1 to 25 occluders.
    let extra = m.frames[1].spec.occluders[0];
    while m.frames[1].spec.occluders.len() < 25 {
        let mut o = extra;
        o.instance_id = 1000 + m.frames[1].spec.occluders.len() as u32;
        m.frames[1].spec.occluders.push(o);
    }
    m.frames[1].counts.occluders = 25;
    write_manifest(dir.path(), &m).unwrap();
    let r = inspect(dir.path()).unwrap();
    assert!(
        r.violations
            .iter()
            .any(|v| v.frame_id == 1 && v.field.contains("occluder")),
        "{:?}",
        r.violations
    );
}

#[test]
fn sub_class_dataset_lists_every_sub_class() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small(Protocol::Sc, 2, dir.path());
    cfg.dimensions = vec![[64, 48]];
    cfg.render.spp = 1;
    run(&cfg);
    let r = inspect(dir.path()).unwrap();
    assert_eq!(r.sub_class_counts.len(), 21);
    assert_eq!(r.class_counts.len(), 5);
}

#[test]
fn evaluate_perfect_and_empty_detections() {
    let dir = tempfile::tempdir().unwrap();
    let (m, _) = run(&small(Protocol::Dr, 8, dir.path()));
    assert!(!m.annotations.is_empty());
    let perfect = DetectionsFile {
        detections: m
            .annotations
            .iter()
            .map(|a| Detection {
                frame_id: a.frame_id,
                class: a.class.clone(),
                bbox: a.bbox,
                score: 0.9,
            })
            .collect(),
    };
    let path = dir.path().join("dets.json");
    perfect.save(&path).unwrap();
    let r = evaluate(dir.path(), &path, &DEFAULT_THRESHOLDS, None).unwrap();
    assert!(r.map.iter().all(|&v| (v - 1.0).abs() < 1e-12), "{:?}", r.map);

    DetectionsFile::default().save(&path).unwrap();
    let r = evaluate(dir.path(), &path, &DEFAULT_THRESHOLDS, None).unwrap();
    assert!(r.map.iter().all(|&v| v == 0.0));
}

#[test]
fn unknown_detection_class_is_a_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let (m, _) = run(&small(Protocol::Dr, 4, dir.path()));
    let a = &m.annotations[0];
    let f = DetectionsFile {
        detections: vec![Detection {
            frame_id: a.frame_id,
            class: "bathtub".into(),
            bbox: a.bbox,
            score: 0.5,
        }],
    };
    let path = dir.path().join("dets.json");
    f.save(&path).unwrap();
    assert!(matches!(
        evaluate(dir.path(), &path, &DEFAULT_THRESHOLDS, None),
        Err(Error::ClassMismatch(c)) if c == ["bathtub"]
    ));
}

#[test]
fn patches_are_square_and_named() {
    let dir = tempfile::tempdir().unwrap();
    let (m, _) = run(&small(Protocol::Dr, 4, dir.path()));
    let out = dir.path().join("patches");
    let written = write_patches(dir.path(), &out).unwrap();
    assert_eq!(written.len(), m.annotations.len());
    for p in &written {
        let img = image::open(p).unwrap();
        assert_eq!((img.width(), img.height()), (200, 200));
        assert!(p.file_name().unwrap().to_str().unwrap().starts_with("frame_"));
    }
}

#[test]
fn shipped_configs_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for e in std::fs::read_dir(&dir).unwrap() {
        let p = e.unwrap().path();
        if p.extension().is_some_and(|x| x == "toml") {
            let c = ProtocolConfig::load(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            assert!(c.output.as_ref().unwrap().is_absolute(), "{}", p.display());
            n += 1;
        }
    }
    assert!(n >= 5);
}
