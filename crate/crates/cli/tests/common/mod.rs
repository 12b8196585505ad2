#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(name)
}

pub fn tokeval<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    let out = Command::new(env!("CARGO_BIN_EXE_tokeval"))
        .args(args)
        .output()
        .expect("spawn tokeval");
    Output {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
    }
}

/// Elements of `svg` whose opening tag contains `marker`, e.g. `class="cell"`.
pub fn elements<'a>(svg: &'a str, marker: &str) -> Vec<&'a str> {
    svg.lines().filter(|l| l.contains(marker)).collect()
}

pub fn attr<'a>(element: &'a str, name: &str) -> Option<&'a str> {
    let key = format!(" {name}=\"");
    let start = element.find(&key)? + key.len();
    let len = element[start..].find('"')?;
    Some(&element[start..start + len])
}

pub fn inner_text(element: &str) -> &str {
    let start = element.find('>').map_or(0, |i| i + 1);
    let end = element[start..].find('<').map_or(element.len(), |i| start + i);
    &element[start..end]
}

/// Square correlation CSV: header of labels, then one row per label.
pub fn parse_matrix_csv(csv: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = csv.lines();
    let labels: Vec<String> = lines
        .next()
        .unwrap()
        .split(',')
        .skip(1)
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').skip(1).map(|v| v.parse().unwrap()).collect())
        .collect();
    (labels, rows)
}
