//! The `regmap` binary: exit codes, file outputs and stdout schemas.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use regmap::io::{emit_map, emit_map_string, parse_map};
use regmap::seed::{catalog_get, torus_map_44};
use serde_json::Value;
use tempfile::TempDir;

fn regmap(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regmap"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&o.stdout),
            String::from_utf8_lossy(&o.stderr)
        )
    })
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas")
}

const VALIDATE: &str = r#"
import json, sys, pathlib
import jsonschema, referencing
schemas = pathlib.Path(sys.argv[1])
resources = []
for p in schemas.glob("*.schema.json"):
    s = json.loads(p.read_text())
    resources.append((p.name, referencing.Resource.from_contents(s)))
registry = referencing.Registry().with_resources(resources)
schema_file, pointer, doc_file = sys.argv[2], sys.argv[3], sys.argv[4]
root = json.loads((schemas / schema_file).read_text())
schema = {"$ref": schema_file + pointer} if pointer else root
v = jsonschema.Draft202012Validator(schema, registry=registry)
errors = sorted(v.iter_errors(json.loads(pathlib.Path(doc_file).read_text())), key=str)
for e in errors[:5]:
    print(e.message[:300], list(e.path))
sys.exit(1 if errors else 0)
"#;

fn python_jsonschema_available() -> bool {
    Command::new("python3")
        .args(["-c", "import jsonschema, referencing"])
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

/// Validates `doc` against `schema_file` (optionally a `#/$defs/...` pointer).
fn check_schema(schema_file: &str, pointer: &str, doc: &Value, dir: &Path) {
    if !python_jsonschema_available() {
        eprintln!("python3 with jsonschema not found; schema check not run");
        return;
    }
    let path = dir.join(format!("doc-{}.json", pointer.replace('/', "_").replace('#', "")));
    std::fs::write(&path, serde_json::to_string(doc).unwrap()).unwrap();
    let out = Command::new("python3")
        .args(["-c", VALIDATE])
        .arg(schema_dir())
        .args([schema_file, pointer])
        .arg(&path)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{schema_file}{pointer} rejects the document: {}{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn out_schema(def: &str, doc: &Value, dir: &Path) {
    check_schema("regmap-cli-output.schema.json", &format!("#/$defs/{def}"), doc, dir);
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Fixture {
        let f = Fixture {
            dir: tempfile::tempdir().unwrap(),
        };
        let files = [
            ("t10.json", torus_map_44(1, 0).unwrap()),
            ("t20.json", torus_map_44(2, 0).unwrap()),
            ("t21.json", torus_map_44(2, 1).unwrap()),
            ("t11.json", torus_map_44(1, 1).unwrap()),
            ("tetra.json", catalog_get("tetrahedron").unwrap().map),
            ("klein.json", catalog_get("klein-quartic").unwrap().map),
            ("a46.json", catalog_get("s4xc2-46").unwrap().map),
            ("b46.json", catalog_get("s5-46").unwrap().map),
        ];
        for (name, m) in files {
            emit_map(&m, &f.path(name)).unwrap();
        }
        f
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn run(&self, args: &[&str]) -> Output {
        regmap(args, self.dir.path())
    }
}

#[test]
fn info_and_mirror_info_agree() {
    let f = Fixture::new();
    let o = f.run(&["info", "t21.json"]);
    assert_eq!(code(&o), 0);
    assert!(o.stderr.is_empty());
    let info = stdout_json(&o);
    out_schema("info", &info, f.dir.path());
    assert_eq!(info["darts"], 20);
    assert_eq!(info["census"]["genus"], 1);
    assert_eq!(info["chirality"], "chiral");
    assert_eq!(info["type"]["geometry"], "euclidean");

    assert_eq!(code(&f.run(&["mirror", "t21.json", "-o", "m21.json"])), 0);
    let mirrored = stdout_json(&f.run(&["info", "m21.json"]));
    assert_eq!(mirrored["census"], info["census"]);
    assert_eq!(mirrored["type"], info["type"]);
}

#[test]
fn dual_and_mirror_are_involutions_on_files() {
    let f = Fixture::new();
    for op in ["dual", "mirror"] {
        assert_eq!(code(&f.run(&[op, "klein.json", "-o", "once.json"])), 0);
        let twice = f.run(&[op, "once.json"]);
        assert_eq!(code(&twice), 0);
        let original = parse_map(&f.path("klein.json")).unwrap();
        let back = regmap::io::parse_map_str(std::str::from_utf8(&twice.stdout).unwrap()).unwrap();
        assert!(back.same_darts_and_generators(&original), "{op}");
    }
    let dual = parse_map(&f.path("once.json")).unwrap();
    assert_eq!(dual.label(), Some("mirror(klein-quartic)"));
}

#[test]
fn chiral_exit_codes() {
    let f = Fixture::new();
    let o = f.run(&["chiral", "t21.json"]);
    assert_eq!(code(&o), 10);
    out_schema("chiral", &stdout_json(&o), f.dir.path());
    assert_eq!(code(&f.run(&["chiral", "t10.json"])), 0);
    assert_eq!(code(&f.run(&["chiral", "klein.json"])), 0);
}

#[test]
fn cover_exit_codes() {
    let f = Fixture::new();
    let o = f.run(&["cover", "t20.json", "t10.json"]);
    assert_eq!(code(&o), 0);
    out_schema("cover", &stdout_json(&o), f.dir.path());
    assert_eq!(code(&f.run(&["cover", "t10.json", "t20.json"])), 10);
    // different types are never smooth covers
    assert_eq!(code(&f.run(&["cover", "klein.json", "tetra.json"])), 10);
}

#[test]
fn parallel_writes_product_and_report() {
    let f = Fixture::new();
    let o = f.run(&["parallel", "a46.json", "b46.json", "-o", "p.json"]);
    assert_eq!(code(&o), 0);
    let report = stdout_json(&o);
    out_schema("parallel", &report, f.dir.path());
    assert_eq!(report["index"], 2);
    assert_eq!(report["case"]["kind"], "index2_subproduct");
    assert_eq!(report["gamma_type"], "B");
    assert_eq!(parse_map(&f.path("p.json")).unwrap().darts(), 2880);
    // mismatched types are a validation failure
    assert_eq!(code(&f.run(&["parallel", "klein.json", "tetra.json"])), 2);
}

#[test]
fn exceptional_reports() {
    let f = Fixture::new();
    let o = f.run(&["exceptional", "t11.json", "--type", "A"]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    out_schema("exceptional", &r, f.dir.path());
    assert_eq!(r["index"], 2);
    assert_eq!(r["theta_found"], true);
    assert_eq!(r["theta_extends"], true);
    for t in ["B", "dualA"] {
        let o = f.run(&["exceptional", "t21.json", "--type", t]);
        assert_eq!(code(&o), 0);
        let r = stdout_json(&o);
        out_schema("exceptional", &r, f.dir.path());
        assert_ne!(r["theta_extends"], true, "chiral map, type {t}");
    }
    // type A needs n even
    assert_eq!(code(&f.run(&["exceptional", "tetra.json", "--type", "A"])), 2);
    assert_eq!(code(&f.run(&["exceptional", "tetra.json", "--type", "C"])), 1);
}

#[test]
fn seed_search_outcomes() {
    let f = Fixture::new();
    let o = f.run(&[
        "seed",
        "--type",
        "4,6",
        "--rmax",
        "7",
        "--budget",
        "100",
        "-o",
        "seed.json",
    ]);
    assert_eq!(code(&o), 0);
    let s = stdout_json(&o);
    out_schema("seed", &s, f.dir.path());
    assert_eq!(s["degree"], 7);
    assert_eq!(s["darts"], 5040);
    assert_eq!(parse_map(&f.path("seed.json")).unwrap().darts(), 5040);
    assert_eq!(
        code(&f.run(&["seed", "--type", "3,7", "--rmax", "8", "--budget", "100"])),
        3
    );
    assert_eq!(
        code(&f.run(&["seed", "--type", "4,4", "--rmax", "8", "--budget", "100"])),
        2
    );
    assert_eq!(
        code(&f.run(&["seed", "--type", "four", "--rmax", "8", "--budget", "100"])),
        1
    );
}

#[test]
fn chiral_cover_and_verify() {
    let f = Fixture::new();
    let o = f.run(&[
        "chiral-cover",
        "a46.json",
        "--rmax",
        "8",
        "--budget",
        "1000",
        "-o",
        "cert.json",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out_schema("chiral_cover", &stdout_json(&o), f.dir.path());
    let cert: Value = serde_json::from_str(&std::fs::read_to_string(f.path("cert.json")).unwrap()).unwrap();
    check_schema("regmap-cert-v1.schema.json", "", &cert, f.dir.path());
    assert_eq!(cert["product"]["chirality"], "chiral");
    assert_eq!(cert["verifications"]["product_covers_input"], true);

    let o = f.run(&["verify", "cert.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out_schema("verify", &stdout_json(&o), f.dir.path());

    // a tampered summary is caught
    let mut bad = cert.clone();
    bad["product"]["genus"] = Value::from(0);
    std::fs::write(f.path("bad.json"), serde_json::to_string(&bad).unwrap()).unwrap();
    assert_eq!(code(&f.run(&["verify", "bad.json"])), 4);
    // so is a recorded verification that does not match the re-run
    let mut bad = cert.clone();
    bad["goursat"]["index"] = Value::from(7);
    std::fs::write(f.path("bad.json"), serde_json::to_string(&bad).unwrap()).unwrap();
    assert_eq!(code(&f.run(&["verify", "bad.json"])), 4);
    // and a product that no longer validates
    let mut bad = cert;
    let y = bad["product_map"]["y"].as_array_mut().unwrap();
    y.swap(0, 1);
    std::fs::write(f.path("bad.json"), serde_json::to_string(&bad).unwrap()).unwrap();
    assert_eq!(code(&f.run(&["verify", "bad.json"])), 2);
}

#[test]
fn chiral_cover_batch() {
    let f = Fixture::new();
    let o = f.run(&[
        "chiral-cover",
        "a46.json",
        "--rmax",
        "8",
        "--budget",
        "1000",
        "-o",
        "batch.json",
        "--count",
        "2",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let batch: Value = serde_json::from_str(&std::fs::read_to_string(f.path("batch.json")).unwrap()).unwrap();
    check_schema("regmap-cert-v1.schema.json", "", &batch, f.dir.path());
    assert_eq!(batch["certificates"].as_array().unwrap().len(), 2);
    assert_eq!(batch["non_isomorphism"].as_array().unwrap().len(), 1);
    assert_eq!(code(&f.run(&["verify", "batch.json"])), 0);
}

#[test]
fn chiral_cover_failures() {
    let f = Fixture::new();
    // no {3,7} seed of small degree
    assert_eq!(
        code(&f.run(&[
            "chiral-cover",
            "klein.json",
            "--rmax",
            "8",
            "--budget",
            "100",
            "-o",
            "c.json"
        ])),
        3
    );
    assert!(!f.path("c.json").exists());
    // torus maps are not hyperbolic
    assert_eq!(
        code(&f.run(&[
            "chiral-cover",
            "t21.json",
            "--rmax",
            "8",
            "--budget",
            "100",
            "-o",
            "c.json"
        ])),
        2
    );
}

#[test]
fn catalog_and_torus_commands() {
    let f = Fixture::new();
    let o = f.run(&["catalog", "list"]);
    assert_eq!(code(&o), 0);
    let list = stdout_json(&o);
    out_schema("catalog_list", &list, f.dir.path());
    assert!(list.as_array().unwrap().len() >= 6);
    let o = f.run(&["catalog", "get", "cube"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        String::from_utf8(o.stdout).unwrap(),
        emit_map_string(&catalog_get("cube").unwrap().map)
    );
    assert_eq!(code(&f.run(&["catalog", "get", "no-such-map"])), 1);
    let o = f.run(&["torus", "--kind", "44", "2", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        String::from_utf8(o.stdout).unwrap(),
        emit_map_string(&torus_map_44(2, 1).unwrap())
    );
    assert_eq!(code(&f.run(&["torus", "--kind", "44", "0", "0"])), 1);
}

#[test]
fn map_files_validate_against_schema() {
    let f = Fixture::new();
    for name in ["t21.json", "klein.json"] {
        let v: Value = serde_json::from_str(&std::fs::read_to_string(f.path(name)).unwrap()).unwrap();
        check_schema("regmap-v1.schema.json", "", &v, f.dir.path());
    }
}

#[test]
fn parse_and_usage_errors() {
    let f = Fixture::new();
    std::fs::write(f.path("broken.json"), "{").unwrap();
    std::fs::write(
        f.path("s3.json"),
        r#"{"format":"regmap-v1","darts":3,"x":[1,2,0],"y":[1,0,2]}"#,
    )
    .unwrap();
    for file in ["broken.json", "s3.json", "missing.json"] {
        let o = f.run(&["info", file]);
        assert_eq!(code(&o), 2, "{file}");
        assert!(o.stdout.is_empty());
        assert!(!o.stderr.is_empty());
    }
    assert_eq!(code(&f.run(&["frobnicate"])), 1);
    assert_eq!(code(&f.run(&[])), 1);
    assert_eq!(code(&f.run(&["--help"])), 0);
}

#[test]
fn in_process_runner_matches_binary() {
    let f = Fixture::new();
    let path = f.path("t21.json");
    let mut out = Vec::new();
    let mut err = Vec::new();
    let c = regmap::cli::run(["regmap", "chiral", path.to_str().unwrap()], &mut out, &mut err);
    assert_eq!(c, 10);
    assert_eq!(out, f.run(&["chiral", "t21.json"]).stdout);
}
