#![allow(dead_code)]

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

pub const BIN: &str = env!("CARGO_BIN_EXE_cnp-kit");

pub fn instances_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("instances")
}

pub fn shipped(name: &str) -> PathBuf {
    instances_dir().join(name)
}

pub fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("CNP_KIT_LOG").output().expect("binary runs")
}

pub fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(BIN)
        .args(args)
        .env_remove("CNP_KIT_LOG")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub struct Case {
    pub name: &'static str,
    /// Subcommand words preceding the file.
    pub command: &'static [&'static str],
    pub text: String,
    pub expected: i32,
}

fn case(name: &'static str, command: &'static [&'static str], text: impl Into<String>, expected: i32) -> Case {
    Case { name, command, text: text.into(), expected }
}

fn inst(kind: &str, payload: &str) -> String {
    format!(r#"{{"schema_version": 1, "kind": "{kind}", "payload": {payload}}}"#)
}

fn shipped_text(name: &str) -> String {
    std::fs::read_to_string(shipped(name)).expect("shipped instance")
}

/// Thirty instances (valid, failing and invalid) with the exit status each
/// must produce.
pub fn corpus() -> Vec<Case> {
    const PICK: &[&str] = &["pick"];
    const WH: &[&str] = &["experiment", "weak-hardy"];
    let small_wh = |sample: &str, function: &str, sizes: &str| {
        inst(
            "weak-hardy-experiment",
            &format!(
                r#"{{"kernel": {{"type": "szego"}}, "sample": {sample}, "function": {function}, "sizes": {sizes}, "tol": 0.02, "seed": 5}}"#
            ),
        )
    };
    vec![
        // computed or PASS
        case("pick_schwarz", PICK, shipped_text("pick_schwarz.json"), 0),
        case("pick_block_da", PICK, shipped_text("pick_block_da.json"), 0),
        case("extremal_embedding", &["extremal"], shipped_text("extremal_embedding.json"), 0),
        case("dk_da", &["dk"], shipped_text("dk_da.json"), 0),
        case(
            "dk_pairs",
            &["dk"],
            inst(
                "dk",
                r#"{"kernel": {"type": "szego"}, "points": [[0, 0], [0.5, 0], [0, -0.3]], "pairs": [[0, 1], [1, 2]]}"#,
            ),
            0,
        ),
        case("embed_szego", &["embed"], shipped_text("embed_szego.json"), 0),
        case("dominate_random", &["dominate"], shipped_text("dominate_random.json"), 0),
        case("blaschke_tail", &["blaschke"], shipped_text("blaschke_tail.json"), 0),
        case("capacity_disk", &["capacity"], shipped_text("capacity_disk.json"), 0),
        case("capacity_points", &["removable"], shipped_text("capacity_points.json"), 0),
        case("remove_punctures", &["experiment", "remove"], shipped_text("remove_punctures.json"), 0),
        case(
            "weak_hardy_constant",
            WH,
            small_wh(
                r#"{"type": "circle", "n": 20, "radius": 0.9}"#,
                r#"{"type": "constant", "value": [0.3, 0.4]}"#,
                "[2, 5, 10, 20]",
            ),
            0,
        ),
        // FAIL
        case(
            "weak_hardy_interior_circle",
            WH,
            small_wh(r#"{"type": "circle", "n": 20, "radius": 0.5}"#, r#"{"type": "identity"}"#, "[5, 10, 20]"),
            1,
        ),
        case(
            "weak_hardy_random_disk",
            WH,
            small_wh(
                r#"{"type": "random", "n": 30, "rmax": 0.5}"#,
                r#"{"type": "identity"}"#,
                "{\"from\": 10, \"to\": 30, \"step\": 10}",
            ),
            1,
        ),
        case(
            "weak_hardy_square",
            WH,
            small_wh(
                r#"{"type": "circle", "n": 16, "radius": 0.6}"#,
                r#"{"type": "polynomial", "coeffs": [[0, 0], [0, 0], [1, 0]]}"#,
                "[4, 8, 16]",
            ),
            1,
        ),
        case(
            "weak_hardy_mobius",
            WH,
            small_wh(
                r#"{"type": "grid", "radial": 3, "angular": 8, "outer_radius": 0.6}"#,
                r#"{"type": "mobius", "a": [0.2, 0]}"#,
                "[5, 25]",
            ),
            1,
        ),
        // input errors
        case("empty", PICK, "", 2),
        case("truncated", PICK, r#"{"schema_version": 1, "kind": "pick", "payload": {"#, 2),
        case("not_an_object", PICK, "[1, 2, 3]", 2),
        case("trailing_garbage", PICK, shipped_text("pick_schwarz.json") + "}", 2),
        case(
            "schema_version_2",
            PICK,
            shipped_text("pick_schwarz.json").replace("\"schema_version\": 1", "\"schema_version\": 2"),
            2,
        ),
        case("unknown_kind", PICK, inst("interpolate", r#"{"kernel": {"type": "szego"}}"#), 2),
        case("missing_payload", PICK, r#"{"schema_version": 1, "kind": "pick"}"#, 2),
        case(
            "three_component_complex",
            PICK,
            inst("pick", r#"{"kernel": {"type": "szego"}, "points": [[0, 0, 1]], "targets": [[0, 0]]}"#),
            2,
        ),
        case(
            "target_count_mismatch",
            PICK,
            inst("pick", r#"{"kernel": {"type": "szego"}, "points": [[0, 0], [0.5, 0]], "targets": [[0, 0]]}"#),
            2,
        ),
        case(
            "point_outside_disk",
            PICK,
            inst(
                "pick",
                r#"{"kernel": {"type": "szego"}, "points": [[0, 0], [1.5, 0]], "targets": [[0, 0], [0.1, 0]]}"#,
            ),
            2,
        ),
        case(
            "gram_not_hermitian",
            &["dk"],
            inst("dk", r#"{"kernel": {"type": "gram", "matrix": [[[1, 0], [0.5, 0]], [[0.2, 0], [1, 0]]]}}"#),
            2,
        ),
        case(
            "negative_radius",
            &["capacity"],
            inst("capacity", r#"{"components": [{"type": "disk", "center": [0, 0], "radius": -1}]}"#),
            2,
        ),
        case(
            "decreasing_sizes",
            WH,
            small_wh(r#"{"type": "circle", "n": 20, "radius": 0.9}"#, r#"{"type": "identity"}"#, "[10, 5]"),
            2,
        ),
        case("kind_mismatch", &["dk"], shipped_text("pick_schwarz.json"), 2),
    ]
}

/// Writes every corpus case into `dir`, returning `(case, path)` pairs.
pub fn write_corpus(dir: &Path) -> Vec<(Case, PathBuf)> {
    corpus()
        .into_iter()
        .map(|c| {
            let path = dir.join(format!("{}.json", c.name));
            std::fs::write(&path, &c.text).unwrap();
            (c, path)
        })
        .collect()
}

/// Runs one corpus case; returns `(exit status, stdout)`.
pub fn run_case(case: &Case, path: &Path) -> (i32, Vec<u8>) {
    let mut args: Vec<&str> = case.command.to_vec();
    args.push(path.to_str().unwrap());
    let out = run(&args);
    (code(&out), out.stdout)
}
