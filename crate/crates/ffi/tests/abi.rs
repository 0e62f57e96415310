use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use consensus_hpo_ffi::*;

fn last_error() -> String {
    let p = chpo_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn labeling(v: &[u32]) -> *mut ChpoLabeling {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { chpo_labeling_new(v.as_ptr(), v.len(), &mut out) }, ChpoStatus::Ok);
    out
}

#[test]
fn metrics_through_the_abi() {
    let a = labeling(&[0, 0, 1, 1]);
    let b = labeling(&[5, 5, 9, 9]);
    let c = labeling(&[0, 1, 0, 1]);
    let mut v = f64::NAN;
    unsafe {
        assert_eq!(chpo_nmi(a, b, &mut v), ChpoStatus::Ok);
        assert!((v - 1.0).abs() < 1e-12);
        assert_eq!(chpo_nmi(a, c, &mut v), ChpoStatus::Ok);
        assert!(v.abs() < 1e-12);
        assert_eq!(chpo_ari(a, b, &mut v), ChpoStatus::Ok);
        assert!((v - 1.0).abs() < 1e-12);
        let short = labeling(&[0, 1]);
        assert_eq!(chpo_nmi(a, short, &mut v), ChpoStatus::InvalidArgument);
        assert!(last_error().contains("dimension"));
        assert_eq!(chpo_labeling_clusters(b), 2);
        let mut buf = [7u32; 4];
        assert_eq!(chpo_labeling_copy(b, buf.as_mut_ptr(), 4), ChpoStatus::Ok);
        assert_eq!(buf, [0, 0, 1, 1]);
        assert_eq!(chpo_labeling_copy(b, buf.as_mut_ptr(), 3), ChpoStatus::InvalidArgument);
        for l in [a, b, c, short] {
            chpo_labeling_free(l);
        }
    }
}

#[test]
fn null_and_invalid_arguments() {
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(chpo_labeling_new(ptr::null(), 3, &mut out), ChpoStatus::NullPointer);
        assert_eq!(chpo_nmi(ptr::null(), ptr::null(), ptr::null_mut()), ChpoStatus::NullPointer);
        let mut grid = ptr::null_mut();
        let dup = CString::new(r#"[{"algorithm": "kmeans", "k": [2, 2]}]"#).unwrap();
        assert_eq!(chpo_grid_from_json(dup.as_ptr(), &mut grid), ChpoStatus::InvalidArgument);
        assert!(last_error().contains("duplicate"));
        let mut ds = ptr::null_mut();
        let nan = [f64::NAN, 1.0];
        assert_eq!(chpo_dataset_new(nan.as_ptr(), 1, 2, &mut ds), ChpoStatus::InvalidArgument);
        let missing = CString::new("/nonexistent/points.csv").unwrap();
        assert_eq!(chpo_dataset_load_csv(missing.as_ptr(), false, &mut ds), ChpoStatus::Io);
        chpo_dataset_free(ptr::null_mut());
    }
}

#[test]
fn pipeline_through_the_abi() {
    let points: Vec<f64> = (0..20)
        .flat_map(|i| [if i < 10 { 0.0 } else { 20.0 } + 0.1 * i as f64, (i % 3) as f64 * 0.1])
        .collect();
    unsafe {
        let mut ds = ptr::null_mut();
        assert_eq!(chpo_dataset_new(points.as_ptr(), 20, 2, &mut ds), ChpoStatus::Ok);
        assert_eq!((chpo_dataset_n(ds), chpo_dataset_d(ds)), (20, 2));

        let spec = CString::new(
            r#"[{"algorithm": "kmeans", "k": [2, 4], "seed": 3},
                {"algorithm": "agglomerative", "k": 2, "linkage": "single"}]"#,
        )
        .unwrap();
        let mut grid = ptr::null_mut();
        assert_eq!(chpo_grid_from_json(spec.as_ptr(), &mut grid), ChpoStatus::Ok);
        assert_eq!(chpo_grid_len(grid), 3);

        let mut ens = ptr::null_mut();
        assert_eq!(chpo_ensemble_build(ds, grid, &mut ens), ChpoStatus::Ok);
        assert_eq!(chpo_ensemble_len(ens), 3);
        let mut member = ptr::null_mut();
        assert_eq!(chpo_ensemble_member(ens, 5, &mut member), ChpoStatus::InvalidArgument);
        assert_eq!(chpo_ensemble_member(ens, 2, &mut member), ChpoStatus::Ok);

        let mut consensus = ptr::null_mut();
        assert_eq!(chpo_consensus(ens, 2, ChpoLinkage::Average as u32, &mut consensus), ChpoStatus::Ok);
        let mut v = 0.0;
        assert_eq!(chpo_nmi(member, consensus, &mut v), ChpoStatus::Ok);
        assert!((v - 1.0).abs() < 1e-12);
        assert_eq!(chpo_consensus(ens, 2, 99, &mut consensus), ChpoStatus::InvalidArgument);

        let mut sel = ptr::null_mut();
        assert_eq!(chpo_select_best_match(ens, 2, ChpoLinkage::Average as u32, &mut sel), ChpoStatus::Ok);
        let mut index = usize::MAX;
        assert_eq!(chpo_selection_index(sel, &mut index), ChpoStatus::Ok);
        assert_eq!(index, 0);
        let mut json = ptr::null_mut();
        assert_eq!(chpo_selection_to_json(sel, &mut json), ChpoStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        chpo_string_free(json);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["strategy"], "best_match");

        let mut anmi = ptr::null_mut();
        assert_eq!(chpo_select_anmi(ens, &mut anmi), ChpoStatus::Ok);

        let params = CString::new(r#"{"algorithm": "dbscan", "eps": 1.0, "min_points": 2}"#).unwrap();
        let mut l = ptr::null_mut();
        assert_eq!(chpo_cluster(ds, params.as_ptr(), &mut l), ChpoStatus::Ok);
        assert_eq!(chpo_labeling_clusters(l), 2);
        let bad = CString::new(r#"{"algorithm": "kmeans", "k": 0}"#).unwrap();
        assert_eq!(chpo_cluster(ds, bad.as_ptr(), &mut l), ChpoStatus::InvalidArgument);

        chpo_labeling_free(l);
        chpo_selection_free(anmi);
        chpo_selection_free(sel);
        chpo_labeling_free(consensus);
        chpo_labeling_free(member);
        chpo_ensemble_free(ens);
        chpo_grid_free(grid);
        chpo_dataset_free(ds);
    }
}

#[test]
fn header_declares_every_export() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(root.join("include/consensus_hpo.h")).unwrap();
    let source = std::fs::read_to_string(root.join("src/lib.rs")).unwrap();
    let names: Vec<String> = source
        .split("extern \"C\" fn ")
        .skip(1)
        .map(|s| s.split('(').next().unwrap().to_owned())
        .collect();
    assert!(names.len() > 20);
    for name in names.iter().filter(|n| n.starts_with("chpo_")) {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}

/// Builds examples/smoke.c against the shared library when a C compiler
/// is available.
#[test]
fn c_smoke_program() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().and_then(|p| p.parent()).unwrap().to_path_buf();
    if !lib_dir.join("libconsensus_hpo_ffi.so").exists() && !lib_dir.join("libconsensus_hpo_ffi.dylib").exists() {
        eprintln!("shared library not found in {}; skipping", lib_dir.display());
        return;
    }
    let out = std::env::temp_dir().join(format!("chpo_smoke_{}", std::process::id()));
    let compiled = Command::new("cc")
        .arg(root.join("examples/smoke.c"))
        .arg("-I")
        .arg(root.join("include"))
        .arg("-L")
        .arg(&lib_dir)
        .arg("-lconsensus_hpo_ffi")
        .arg("-o")
        .arg(&out)
        .status();
    match compiled {
        Ok(s) if s.success() => {}
        Ok(s) => panic!("cc failed with {s}"),
        Err(e) => {
            eprintln!("no C compiler ({e}); skipping");
            return;
        }
    }
    let run = Command::new(&out)
        .env("LD_LIBRARY_PATH", &lib_dir)
        .env("DYLD_LIBRARY_PATH", &lib_dir)
        .output()
        .unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).contains("kmeans(k=2"));
}
