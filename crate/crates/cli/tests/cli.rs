//! End-to-end tests of the binary: exit codes, witnesses, determinism of
//! emitted files, and the documented verb behavior.

use std::path::{Path, PathBuf};
use std::process::Command;

struct Run {
    code: i32,
    stdout: serde_json::Value,
}

fn tropgeo(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_tropgeo"))
        .args(args)
        .output()
        .expect("binary runs");
    let stdout: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("run report is JSON");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout,
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn line_poly(dir: &Path) -> PathBuf {
    write(
        dir,
        "line.json",
        r#"{"dim":2,"terms":[{"exp":[0,0],"val":"0"},{"exp":[1,0],"val":"0"},{"exp":[0,1],"val":"0"}]}"#,
    )
}

fn window(dir: &Path) -> PathBuf {
    write(
        dir,
        "window.json",
        r#"{"ambient_dim":2,"vertices":[["-2","-2"],["2","-2"],["-2","2"],["2","2"]]}"#,
    )
}

#[test]
fn tropicalize_emits_three_segments_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let poly = line_poly(dir.path());
    let win = window(dir.path());
    let out1 = dir.path().join("h1.json");
    let out2 = dir.path().join("h2.json");
    for out in [&out1, &out2] {
        let r = tropgeo(&[
            "tropicalize",
            "--poly",
            poly.to_str().unwrap(),
            "--window",
            win.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(r.code, 0);
        assert_eq!(r.stdout["result"]["top_cells"], 3);
    }
    // identical inputs produce byte-identical outputs
    assert_eq!(std::fs::read(&out1).unwrap(), std::fs::read(&out2).unwrap());
}

#[test]
fn malformed_rational_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let poly = write(
        dir.path(),
        "bad.json",
        r#"{"dim":1,"terms":[{"exp":[0],"val":"1/0"}]}"#,
    );
    let win = write(
        dir.path(),
        "w.json",
        r#"{"ambient_dim":1,"vertices":[["0"],["1"]]}"#,
    );
    let out = dir.path().join("h.json");
    let r = tropgeo(&[
        "tropicalize",
        "--poly",
        poly.to_str().unwrap(),
        "--window",
        win.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 3);
    assert!(!out.exists(), "no partial output on failure");
}

#[test]
fn non_transversal_check_exits_2_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    // unit grid mod Z^2 as a periodic complex
    let cx = write(
        dir.path(),
        "grid.json",
        r#"{"ambient_dim":2,"cells":[{"ambient_dim":2,"vertices":[["0","0"],["1","0"],["0","1"],["1","1"]]}],"lattice_basis":[["1","0"],["0","1"]]}"#,
    );
    // a segment ending exactly at the grid vertex (1,1)
    let s = write(
        dir.path(),
        "bad_set.json",
        r#"{"ambient_dim":2,"members":[{"ambient_dim":2,"vertices":[["1","1"],["3/2","5/4"]]}]}"#,
    );
    let r = tropgeo(&[
        "check",
        "transversal",
        "--complex",
        cx.to_str().unwrap(),
        "--set",
        s.to_str().unwrap(),
        "--dim",
        "1",
    ]);
    assert_eq!(r.code, 2);
    let msg = r.stdout["result"]["error"].as_str().unwrap();
    assert!(msg.contains("witness"), "witness missing: {msg}");

    // and a transversal configuration passes
    let good = write(
        dir.path(),
        "good_set.json",
        r#"{"ambient_dim":2,"members":[{"ambient_dim":2,"vertices":[["1/4","1/4"],["3/4","3/4"]]}]}"#,
    );
    let r = tropgeo(&[
        "check",
        "transversal",
        "--complex",
        cx.to_str().unwrap(),
        "--set",
        good.to_str().unwrap(),
        "--dim",
        "1",
    ]);
    assert_eq!(r.code, 0);
}

#[test]
fn pure_dim_and_concave_checks() {
    let dir = tempfile::tempdir().unwrap();
    // a segment and a square: not pure of dimension 1; exit 2 names the dims
    let mixed = write(
        dir.path(),
        "mixed.json",
        r#"{"ambient_dim":2,"members":[
            {"ambient_dim":2,"vertices":[["0","0"],["1","0"]]},
            {"ambient_dim":2,"vertices":[["5","5"],["6","5"],["5","6"],["6","6"]]}]}"#,
    );
    let r = tropgeo(&[
        "check",
        "pure-dim",
        "--set",
        mixed.to_str().unwrap(),
        "--dim",
        "1",
    ]);
    assert_eq!(r.code, 2);

    // a lone segment endpoint: not concave; its midpoint is
    let seg = write(
        dir.path(),
        "seg.json",
        r#"{"ambient_dim":2,"members":[{"ambient_dim":2,"vertices":[["0","0"],["1","0"]]}]}"#,
    );
    let endpoint = write(dir.path(), "p1.json", r#"[["0","0"]]"#);
    let midpoint = write(dir.path(), "p2.json", r#"[["1/2","0"]]"#);
    let r = tropgeo(&[
        "check",
        "concave",
        "--set",
        seg.to_str().unwrap(),
        "--samples",
        endpoint.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 2);
    let r = tropgeo(&[
        "check",
        "concave",
        "--set",
        seg.to_str().unwrap(),
        "--samples",
        midpoint.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0);
}

#[test]
fn supval_reports_vertex_minimum() {
    let dir = tempfile::tempdir().unwrap();
    let poly = write(
        dir.path(),
        "f.json",
        r#"{"dim":1,"terms":[{"exp":[0],"val":"0"},{"exp":[1],"val":"1"}]}"#,
    );
    let seg = write(
        dir.path(),
        "seg.json",
        r#"{"ambient_dim":1,"vertices":[["-2"],["-1"]]}"#,
    );
    let r = tropgeo(&[
        "supval",
        "--poly",
        poly.to_str().unwrap(),
        "--polytope",
        seg.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout["result"]["sup_valuation"], "-1");
    assert_eq!(r.stdout["result"]["attained_at"][0], "-2");
}

#[test]
fn mixed_volume_verb() {
    let dir = tempfile::tempdir().unwrap();
    let e1 = write(
        dir.path(),
        "e1.json",
        r#"{"ambient_dim":2,"vertices":[["0","0"],["1","0"]]}"#,
    );
    let e2 = write(
        dir.path(),
        "e2.json",
        r#"{"ambient_dim":2,"vertices":[["0","0"],["0","1"]]}"#,
    );
    let r = tropgeo(&["mixed-volume", e1.to_str().unwrap(), e2.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout["result"]["mixed_volume"], "1/2");
}

#[test]
fn voronoi_pipeline_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let lat = write(dir.path(), "z1.json", r#"{"basis":[["1"]]}"#);
    let form = write(dir.path(), "b1.json", r#"{"form":[["1"]]}"#);
    let plf = dir.path().join("g.json");
    let r = tropgeo(&[
        "voronoi-model",
        "--lattice",
        lat.to_str().unwrap(),
        "--form",
        form.to_str().unwrap(),
        "--out",
        plf.to_str().unwrap(),
        "--verify",
    ]);
    assert_eq!(r.code, 0);
    assert!(r.stdout["verified"]
        .as_array()
        .unwrap()
        .iter()
        .any(|v| v == "check_cocycle"));

    // the emitted function passes the cocycle check through files
    let r = tropgeo(&[
        "check",
        "cocycle",
        "--plf",
        plf.to_str().unwrap(),
        "--form",
        form.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0);

    // dual complex with cross-validation
    let dc = dir.path().join("dual.json");
    let r = tropgeo(&[
        "dual-complex",
        "--plf",
        plf.to_str().unwrap(),
        "--out",
        dc.to_str().unwrap(),
        "--verify",
    ]);
    assert_eq!(r.code, 0);

    // degree needs integer pegs: the half-integer pegs give exit 2 with
    // the scaling hint
    let vertex = write(dir.path(), "v.json", r#"["1/4"]"#);
    let r = tropgeo(&[
        "degree",
        "--plf",
        plf.to_str().unwrap(),
        "--vertex",
        vertex.to_str().unwrap(),
        "--d",
        "1",
    ]);
    assert_eq!(r.code, 2);
    assert!(r.stdout["result"]["error"]
        .as_str()
        .unwrap()
        .contains("scale"));
}

#[test]
fn measure_cycle_verb_with_verification() {
    let dir = tempfile::tempdir().unwrap();
    let cycle = write(
        dir.path(),
        "cycle.json",
        r#"{"n":1,"lattice":{"basis":[["1"]]},"degree":1,"simplices":[{"M":[[1]],"t":["0"],"vpi":"1"}]}"#,
    );
    let form = write(dir.path(), "b2.json", r#"{"form":[["2"]]}"#);
    let out = dir.path().join("mu.json");
    let r = tropgeo(&[
        "measure",
        "cycle",
        "--input",
        cycle.to_str().unwrap(),
        "--forms",
        form.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--verify",
    ]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout["result"]["total_mass"], "2");
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(doc["total_mass"], "2");
    assert_eq!(doc["pieces"][0]["density"], "2");

    // the covering atoms of the same cycle
    let atoms_out = dir.path().join("atoms.json");
    let r = tropgeo(&[
        "atoms",
        "--input",
        cycle.to_str().unwrap(),
        "--out",
        atoms_out.to_str().unwrap(),
        "--verify",
    ]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout["result"]["atoms"], 1);

    // the measure renders with density labels
    let svg = dir.path().join("mu.svg");
    let r = tropgeo(&[
        "plot",
        "--input",
        out.to_str().unwrap(),
        "--kind",
        "measure",
        "--out",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0);
    assert!(std::fs::read_to_string(&svg).unwrap().contains(">2<"));
}

#[test]
fn skeleton_verb_reports_dimension_bound() {
    let dir = tempfile::tempdir().unwrap();
    let skel = write(
        dir.path(),
        "skel.json",
        r#"{"strata":[{"components":[0,1],"vpi":"1","closure_of":[],"M":[[1]],"t":["0"]}]}"#,
    );
    let lat = write(dir.path(), "z1.json", r#"{"basis":[["1"]]}"#);
    let r = tropgeo(&[
        "skeleton",
        "--input",
        skel.to_str().unwrap(),
        "--lattice",
        lat.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout["result"]["dimension_bound"], 1);
    assert_eq!(r.stdout["result"]["witness_components"], 2);

    // the skeleton measure over the same data: density 2 on one segment
    let form = write(dir.path(), "b.json", r#"{"form":[["2"]]}"#);
    let out = dir.path().join("mu.json");
    let r = tropgeo(&[
        "measure",
        "skeleton",
        "--input",
        skel.to_str().unwrap(),
        "--lattice",
        lat.to_str().unwrap(),
        "--forms",
        form.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout["result"]["total_mass"], "2");
}

#[test]
fn plot_emits_svg() {
    let dir = tempfile::tempdir().unwrap();
    let poly = line_poly(dir.path());
    let win = window(dir.path());
    let hyp = dir.path().join("h.json");
    tropgeo(&[
        "tropicalize",
        "--poly",
        poly.to_str().unwrap(),
        "--window",
        win.to_str().unwrap(),
        "--out",
        hyp.to_str().unwrap(),
    ]);
    let svg = dir.path().join("h.svg");
    let r = tropgeo(&[
        "plot",
        "--input",
        hyp.to_str().unwrap(),
        "--kind",
        "hypersurface",
        "--out",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg"));
    assert!(text.trim_end().ends_with("</svg>"));

    // empty object still renders a valid canvas
    let empty = write(
        dir.path(),
        "empty.json",
        r#"{"ambient_dim":2,"members":[]}"#,
    );
    let svg2 = dir.path().join("empty.svg");
    let r = tropgeo(&[
        "plot",
        "--input",
        empty.to_str().unwrap(),
        "--kind",
        "set",
        "--out",
        svg2.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0);
    assert!(std::fs::read_to_string(&svg2).unwrap().starts_with("<svg"));
}

#[test]
fn snf_and_index_verbs() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.json", r#"{"matrix":[[2,0],[0,3]]}"#);
    let r = tropgeo(&["snf", "--matrix", m.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout["result"]["D"][0][0], "1");
    assert_eq!(r.stdout["result"]["D"][1][1], "6");
    let r = tropgeo(&["index", "--matrix", m.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout["result"]["index"], "6");
}

#[test]
fn generic_decomposition_verb() {
    let dir = tempfile::tempdir().unwrap();
    let lat = write(dir.path(), "z1.json", r#"{"basis":[["1"]]}"#);
    let form = write(dir.path(), "b1.json", r#"{"form":[["1"]]}"#);
    let sigma = write(
        dir.path(),
        "sigma.json",
        r#"{"ambient_dim":1,"members":[{"ambient_dim":1,"vertices":[["1/4"]]}]}"#,
    );
    let out1 = dir.path().join("g1.json");
    let out2 = dir.path().join("g2.json");
    for out in [&out1, &out2] {
        let r = tropgeo(&[
            "generic-decomposition",
            "--lattice",
            lat.to_str().unwrap(),
            "--form",
            form.to_str().unwrap(),
            "--sigma",
            sigma.to_str().unwrap(),
            "--mmax",
            "2",
            "--out",
            out.to_str().unwrap(),
            "--seed",
            "11",
            "--verify",
        ]);
        assert_eq!(r.code, 0);
    }
    // the seeded randomized path is reproducible byte for byte
    assert_eq!(std::fs::read(&out1).unwrap(), std::fs::read(&out2).unwrap());
}
