use std::fs;
use std::path::PathBuf;

use graphcake::cli::run;

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Scratch {
        let dir = std::env::temp_dir().join(format!("graphcake-cli-{tag}-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn path(&self, name: &str) -> String {
        self.0.join(name).to_string_lossy().into_owned()
    }

    fn write(&self, name: &str, text: &str) -> String {
        let p = self.path(name);
        fs::write(&p, text).unwrap();
        p
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("graphcake").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn counterexample_partitions_verify() {
    let dir = Scratch::new("cex");
    let (code, doc, _) = call(&["gen", "cycle-counterexample", "--n", "2", "--r", "2", "--s", "1", "--eps", "0.05"]);
    assert_eq!(code, 0);
    let inst = dir.write("inst.json", &doc);
    let (code, report, _) = call(&["verify", "--instance", &inst, "--min-values", "1"]);
    assert_eq!(code, 0, "{report}");
    assert!(report.contains("\"passed\": true"));
}

#[test]
fn forest_pipeline_keeps_parts() {
    let dir = Scratch::new("forest");
    let (code, doc, _) = call(&[
        "gen", "random-forest", "--seed", "7", "--trees", "2", "--vertices", "8", "--n", "3", "--s", "0.5",
    ]);
    assert_eq!(code, 0);
    let inst = dir.write("inst.json", &doc);
    let (code, alloc, err) = call(&["allocate", "--instance", &inst, "--method", "forest"]);
    assert_eq!(code, 0, "{err}");
    let alloc_path = dir.write("alloc.json", &alloc);
    let (code, report, _) = call(&["verify", "--instance", &inst, "--allocation", &alloc_path, "--partitions"]);
    assert_eq!(code, 0, "{report}");
}

#[test]
fn fvs_of_a_tree_is_empty() {
    let dir = Scratch::new("fvs");
    let (_, doc, _) = call(&["gen", "random-forest", "--seed", "1", "--vertices", "5", "--n", "1", "--s", "0"]);
    let inst = dir.write("inst.json", &doc);
    let (code, out, _) = call(&["fvs", "--instance", &inst]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v, serde_json::json!({"fvs": [], "circuit_rank": 0}));
}

#[test]
fn output_is_deterministic() {
    let dir = Scratch::new("det");
    let gen = ["gen", "random-forest", "--seed", "3", "--vertices", "6", "--n", "2", "--s", "0.3", "--count", "4"];
    let (_, a, _) = call(&gen);
    let mut parallel = gen.to_vec();
    parallel.extend(["--jobs", "3"]);
    let (_, b, _) = call(&parallel);
    assert_eq!(a, b);
    let (_, doc, _) = call(&["gen", "random-forest", "--seed", "3", "--vertices", "6", "--n", "2", "--s", "0.3"]);
    let inst = dir.write("inst.json", &doc);
    let args = ["partition", "--instance", &inst, "--k", "2"];
    let (code, first, err) = call(&args);
    assert_eq!(code, 0, "{err}");
    let (_, second, _) = call(&args);
    assert_eq!(first, second);
}

#[test]
fn mms_on_a_path_instance() {
    let dir = Scratch::new("mms");
    let doc = r#"{
      "separation": 0.0,
      "graph": {"vertices": [0, 1], "edges": [{"id": 0, "u": 0, "v": 1, "length": 1.0}]},
      "agents": [{"name": "a", "densities": [{"edge": 0, "segments": [[0.0, 1.0, 1.0]]}]}],
      "meta": {}
    }"#;
    let inst = dir.write("inst.json", doc);
    let (code, out, err) = call(&["mms", "--instance", &inst, "--agent", "0", "--k", "4"]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["value"].as_f64().unwrap() - 0.25).abs() < 1e-6);
    assert_eq!(v["method"], "path-exact");
}

#[test]
fn malformed_json_reports_position() {
    let dir = Scratch::new("bad");
    let inst = dir.write("inst.json", "{\n  \"separation\": ,\n}");
    let (code, _, err) = call(&["fvs", "--instance", &inst]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(call(&["allocate", "--method", "forest"]).0, 2);
    assert_eq!(call(&["fvs", "--instance", "/nonexistent/instance.json"]).0, 2);
    assert_eq!(call(&["--help"]).0, 0);
}

#[test]
fn failed_verification_exits_one() {
    let dir = Scratch::new("fail");
    let (_, doc, _) = call(&["gen", "cycle-counterexample", "--n", "2", "--r", "2", "--s", "1"]);
    let inst = dir.write("inst.json", &doc);
    let (code, report, _) = call(&["verify", "--instance", &inst, "--min-values", "1.5"]);
    assert_eq!(code, 1, "{report}");
}
