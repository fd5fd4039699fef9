#![allow(dead_code)]

use std::io::Cursor;
use std::path::Path;

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the CLI in-process with `stdin` as standard input.
pub fn run_with_stdin(args: &[&str], stdin: &str) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("eyescore").chain(args.iter().copied());
    let code = eyescore::cli::run(argv, Cursor::new(stdin.as_bytes().to_vec()), &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).expect("utf-8 stdout"),
        stderr: String::from_utf8(err).expect("utf-8 stderr"),
    }
}

pub fn run(args: &[&str]) -> Output {
    run_with_stdin(args, "")
}

pub fn run_ok(args: &[&str]) -> String {
    let o = run(args);
    assert_eq!(o.code, 0, "{args:?} failed: {}", o.stderr);
    o.stdout
}

pub fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 path")
}

/// Parses CSV text into header-keyed rows.
pub fn csv_rows(text: &str) -> Vec<std::collections::HashMap<String, String>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    rdr.records()
        .map(|r| {
            let r = r.unwrap();
            headers.iter().map(String::from).zip(r.iter().map(String::from)).collect()
        })
        .collect()
}

/// Value of `section,metric` in an eval report.
pub fn metric(report: &str, section: &str, name: &str) -> f64 {
    csv_rows(report)
        .into_iter()
        .find(|r| r["section"] == section && r["metric"] == name)
        .unwrap_or_else(|| panic!("no {section}/{name} in report:\n{report}"))["value"]
        .parse()
        .unwrap()
}
