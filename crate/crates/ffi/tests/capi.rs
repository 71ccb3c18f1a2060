use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use glyphforge_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = gf_last_error();
    assert!(!p.is_null(), "expected an error message");
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

fn new_kb(w: usize, h: usize) -> *mut GfKnowledgeBase {
    let mut kb = ptr::null_mut();
    assert_eq!(unsafe { gf_kb_new(w, h, &mut kb) }, GfStatus::Ok);
    assert!(!kb.is_null());
    kb
}

// 3x2 patterns, row-major.
const ZIG: [u8; 6] = [1, 0, 1, 0, 1, 0];
const ZAG: [u8; 6] = [0, 1, 0, 1, 0, 1];

fn teach(kb: *mut GfKnowledgeBase, label: &str, cells: &[u8]) -> (GfStatus, u32) {
    let mut n = 0;
    let l = c(label);
    let st = unsafe { gf_kb_teach(kb, l.as_ptr(), cells.as_ptr(), cells.len(), &mut n) };
    (st, n)
}

#[test]
fn null_arguments_are_rejected() {
    unsafe {
        assert_eq!(gf_kb_new(3, 2, ptr::null_mut()), GfStatus::NullPointer);
        assert!(last_error().contains("out"));
        assert_eq!(gf_kb_label_count(ptr::null()), 0);
        let (mut w, mut h) = (0, 0);
        assert_eq!(
            gf_kb_dims(ptr::null(), &mut w, &mut h),
            GfStatus::NullPointer
        );
        assert_eq!(
            gf_kb_save(ptr::null(), c("x").as_ptr()),
            GfStatus::NullPointer
        );
        gf_kb_free(ptr::null_mut());
        gf_string_free(ptr::null_mut());

        let kb = new_kb(3, 2);
        assert_eq!(
            gf_kb_teach(kb, ptr::null(), ZIG.as_ptr(), 6, ptr::null_mut()),
            GfStatus::NullPointer
        );
        assert_eq!(
            gf_kb_teach(kb, c("S").as_ptr(), ptr::null(), 6, ptr::null_mut()),
            GfStatus::NullPointer
        );
        gf_kb_free(kb);
    }
}

#[test]
fn invalid_dims_are_reported() {
    let mut kb = ptr::null_mut();
    assert_eq!(unsafe { gf_kb_new(0, 4, &mut kb) }, GfStatus::InvalidDims);
    assert!(kb.is_null());
    assert_eq!(
        unsafe { gf_kb_new(4, 5000, &mut kb) },
        GfStatus::InvalidDims
    );
}

#[test]
fn teach_weights_and_forget() {
    let kb = new_kb(3, 2);
    unsafe {
        let (mut w, mut h) = (0, 0);
        assert_eq!(gf_kb_dims(kb, &mut w, &mut h), GfStatus::Ok);
        assert_eq!((w, h), (3, 2));
    }
    assert_eq!(teach(kb, "S", &ZIG), (GfStatus::Ok, 1));
    assert_eq!(teach(kb, "S", &ZIG), (GfStatus::Ok, 2));
    assert_eq!(teach(kb, "S", &ZAG), (GfStatus::Ok, 3));
    assert_eq!(unsafe { gf_kb_label_count(kb) }, 1);

    let mut weights = [0i32; 6];
    let mut n = 0;
    let s = c("S");
    unsafe {
        assert_eq!(
            gf_kb_weights(kb, s.as_ptr(), weights.as_mut_ptr(), 6, &mut n),
            GfStatus::Ok
        );
        assert_eq!(weights, [1, -1, 1, -1, 1, -1]);
        assert_eq!(n, 3);

        let mut small = [0i32; 5];
        assert_eq!(
            gf_kb_weights(kb, s.as_ptr(), small.as_mut_ptr(), 5, ptr::null_mut()),
            GfStatus::BufferTooSmall
        );
        assert_eq!(
            gf_kb_weights(
                kb,
                c("T").as_ptr(),
                weights.as_mut_ptr(),
                6,
                ptr::null_mut()
            ),
            GfStatus::UnknownLabel
        );
        assert_eq!(gf_kb_forget(kb, s.as_ptr()), GfStatus::Ok);
        assert_eq!(gf_kb_forget(kb, s.as_ptr()), GfStatus::UnknownLabel);
        assert_eq!(gf_kb_label_count(kb), 0);
        gf_kb_free(kb);
    }
}

#[test]
fn teach_rejects_bad_input() {
    let kb = new_kb(3, 2);
    assert_eq!(teach(kb, "two words", &ZIG).0, GfStatus::InvalidLabel);
    assert!(last_error().contains("two words"));
    assert_eq!(teach(kb, "S", &ZIG[..5]).0, GfStatus::DimsMismatch);
    assert_eq!(
        teach(kb, "S", &[0, 1, 2, 0, 1, 0]).0,
        GfStatus::InvalidArgument
    );
    assert_eq!(unsafe { gf_kb_label_count(kb) }, 0);
    unsafe { gf_kb_free(kb) };
}

#[test]
fn classify_reports_match_unknown_and_empty() {
    let kb = new_kb(3, 2);
    let mut d = GfDecision {
        kind: GfDecisionKind::Match,
        psi: 7,
        mu: 7,
        q_num: 7,
        q_den: 7,
        scored: 7,
    };
    let mut best: *mut std::ffi::c_char = ptr::null_mut();
    unsafe {
        assert_eq!(
            gf_kb_classify(kb, ZIG.as_ptr(), 6, 1, 2, &mut d, &mut best),
            GfStatus::Ok
        );
        assert_eq!(d.kind, GfDecisionKind::EmptyKb);
        assert_eq!((d.psi, d.mu, d.q_num, d.q_den, d.scored), (0, 0, 0, 1, 0));
        assert!(best.is_null());
    }

    teach(kb, "S", &ZIG);
    teach(kb, "Z", &ZAG);
    unsafe {
        assert_eq!(
            gf_kb_classify(kb, ZIG.as_ptr(), 6, 1, 2, &mut d, &mut best),
            GfStatus::Ok
        );
        assert_eq!(d.kind, GfDecisionKind::Match);
        assert_eq!((d.psi, d.mu, d.q_num, d.q_den, d.scored), (3, 3, 1, 1, 2));
        assert_eq!(CStr::from_ptr(best).to_str().unwrap(), "S");
        gf_string_free(best);

        // Z scores -1 + 1 + 1 = 1 of 3, S scores 1 - 1 - 1 = -1.
        let mixed = [1u8, 1, 0, 1, 0, 0];
        assert_eq!(
            gf_kb_classify(kb, mixed.as_ptr(), 6, 1, 2, &mut d, &mut best),
            GfStatus::Ok
        );
        assert_eq!(d.kind, GfDecisionKind::Unknown);
        assert_eq!((d.q_num, d.q_den), (1, 3));
        assert_eq!(CStr::from_ptr(best).to_str().unwrap(), "Z");
        gf_string_free(best);

        // Threshold is inclusive.
        assert_eq!(
            gf_kb_classify(kb, mixed.as_ptr(), 6, 1, 3, &mut d, ptr::null_mut()),
            GfStatus::Ok
        );
        assert_eq!(d.kind, GfDecisionKind::Match);

        assert_eq!(
            gf_kb_classify(kb, ZIG.as_ptr(), 6, 1, 0, &mut d, ptr::null_mut()),
            GfStatus::InvalidArgument
        );
        assert!(last_error().contains("denominator"));
        gf_kb_free(kb);
    }
}

#[test]
fn classify_json_has_service_shape() {
    let kb = new_kb(3, 2);
    teach(kb, "S", &ZIG);
    let mut json: *mut std::ffi::c_char = ptr::null_mut();
    unsafe {
        assert_eq!(
            gf_kb_classify_json(kb, ZIG.as_ptr(), 6, 1, 2, &mut json),
            GfStatus::Ok
        );
        let v: serde_json::Value =
            serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        gf_string_free(json);
        assert_eq!(v["kind"], "Match");
        assert_eq!(v["best"]["label"], "S");
        assert_eq!(v["best"]["q_num"], 1);
        assert_eq!(v["scores"].as_array().unwrap().len(), 1);
        gf_kb_free(kb);
    }
}

#[test]
fn save_and_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = c(dir.path().join("kb.vcrkb").to_str().unwrap());
    let kb = new_kb(3, 2);
    teach(kb, "S", &ZIG);
    teach(kb, "S", &ZAG);
    unsafe {
        assert_eq!(gf_kb_save(kb, path.as_ptr()), GfStatus::Ok);
        gf_kb_free(kb);

        let mut loaded = ptr::null_mut();
        assert_eq!(gf_kb_load(path.as_ptr(), &mut loaded), GfStatus::Ok);
        let mut w = [9i32; 6];
        let mut n = 0;
        assert_eq!(
            gf_kb_weights(loaded, c("S").as_ptr(), w.as_mut_ptr(), 6, &mut n),
            GfStatus::Ok
        );
        assert_eq!((w, n), ([0; 6], 2));
        gf_kb_free(loaded);

        let missing = c(dir.path().join("nope.vcrkb").to_str().unwrap());
        assert_eq!(gf_kb_load(missing.as_ptr(), &mut loaded), GfStatus::IoError);

        let bad = dir.path().join("bad.vcrkb");
        std::fs::write(&bad, "vcrkb 2\n").unwrap();
        let bad = c(bad.to_str().unwrap());
        assert_eq!(gf_kb_load(bad.as_ptr(), &mut loaded), GfStatus::ParseError);
    }
}

#[test]
fn digitize_downsamples_blocks() {
    // 4x4 raster with the left half inked. The faint mark in the corner only
    // widens the ink box; its cell stays under the coverage bar.
    let mut px = [255u8; 16];
    for row in 0..4 {
        px[row * 4] = 0;
        px[row * 4 + 1] = 0;
    }
    px[3] = 100;
    let mut out = [7u8; 4];
    unsafe {
        assert_eq!(
            gf_digitize(px.as_ptr(), 4, 4, 2, 2, 127, 0.5, out.as_mut_ptr(), 4),
            GfStatus::Ok
        );
        assert_eq!(out, [1, 0, 1, 0]);
        assert_eq!(
            gf_digitize(px.as_ptr(), 4, 4, 2, 2, 127, 0.5, out.as_mut_ptr(), 3),
            GfStatus::BufferTooSmall
        );
        let blank = [255u8; 16];
        assert_eq!(
            gf_digitize(blank.as_ptr(), 4, 4, 2, 2, 127, 0.5, out.as_mut_ptr(), 4),
            GfStatus::EmptyRaster
        );
        assert_eq!(
            gf_digitize(px.as_ptr(), 4, 4, 2, 2, 127, 1.5, out.as_mut_ptr(), 4),
            GfStatus::InvalidArgument
        );
    }
}

#[test]
fn header_declares_the_api() {
    let header =
        std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/glyphforge.h"))
            .unwrap();
    for sym in [
        "gf_last_error",
        "gf_string_free",
        "gf_kb_new",
        "gf_kb_load",
        "gf_kb_save",
        "gf_kb_free",
        "gf_kb_dims",
        "gf_kb_label_count",
        "gf_kb_teach",
        "gf_kb_forget",
        "gf_kb_weights",
        "gf_kb_classify",
        "gf_kb_classify_json",
        "gf_digitize",
        "typedef struct GfKnowledgeBase GfKnowledgeBase",
        "GF_STATUS_BUFFER_TOO_SMALL = 12",
        "GF_DECISION_KIND_EMPTY_KB",
    ] {
        assert!(header.contains(sym), "header lacks {sym}");
    }
}

/// Compiles the C smoke program against the header and static library when a
/// C compiler is on the path.
#[test]
fn c_program_links_and_runs() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let Ok(cc) = Command::new("cc").arg("--version").output() else {
        eprintln!("skipping: no C compiler");
        return;
    };
    assert!(cc.status.success());
    // The test binary lives in target/<profile>/deps; the static lib one up.
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap();
    let lib = lib_dir.join("libglyphforge_ffi.a");
    if !lib.exists() {
        eprintln!("skipping: {} not built", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("smoke");
    let out = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "cc failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let run = Command::new(&bin)
        .arg(dir.path().join("kb.vcrkb"))
        .output()
        .unwrap();
    assert!(
        run.status.success(),
        "smoke failed: {}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&run.stdout), "ok\n");
}
