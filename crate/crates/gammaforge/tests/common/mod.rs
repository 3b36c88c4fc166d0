#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gammaforge::files::SpecFile;
use gammaforge::format::to_json;
use gammaforge_core::catalog::get_manifold;
use serde_json::Value;

pub fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gammaforge"))
        .args(args)
        .current_dir(dir)
        .env_remove("GAMMAFORGE_SEED")
        .output()
        .expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

pub fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

pub fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

/// Catalog entry's spec, without its truth block, written as `<name>.json`.
pub fn catalog_spec(dir: &Path, name: &str) -> PathBuf {
    let mut file = SpecFile::from_catalog(&get_manifold(name).unwrap());
    file.truth = None;
    write(dir, &format!("{name}.json"), &to_json(&file))
}

pub fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

/// Largest absolute number anywhere inside `v`.
pub fn max_abs(v: &Value) -> f64 {
    match v {
        Value::Number(n) => n.as_f64().unwrap().abs(),
        Value::Array(a) => a.iter().map(max_abs).fold(0.0, f64::max),
        Value::Object(o) => o.values().map(max_abs).fold(0.0, f64::max),
        _ => 0.0,
    }
}

pub const CIRCLE: &str = r#"{"dim": 1, "chart": "angle", "cometric": [["1"]], "drift": ["0"],
  "weighted_form": {"metric": [["1"]], "log_density": "0"}}"#;

pub const TWO_PI_BOX: &str = "0:6.283185307179586";
