//! Every corpus program's comparison table, and each example program's
//! founded model under its own declarations, matches its golden file.

use std::fs;
use std::path::{Path, PathBuf};

use founded_rules::compare::{compare, CompareOptions};
use founded_rules::founded::Interpretation;
use founded_rules::parser::parse_program;
use founded_rules::pipeline::Prepared;

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn programs(sub: &str) -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = fs::read_dir(corpus_dir().join(sub))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "fl"))
        .collect();
    out.sort();
    out
}

fn check(sub: &str) {
    let mut failures = Vec::new();
    for path in programs(sub) {
        let program = parse_program(&fs::read_to_string(&path).unwrap()).unwrap();
        let actual = compare(&program, &CompareOptions::default()).unwrap().render();
        let expected = fs::read_to_string(path.with_extension("golden")).unwrap();
        if actual != expected {
            failures.push(format!("{}:\n--- expected\n{expected}--- actual\n{actual}", path.display()));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn boundary_tables() {
    assert_eq!(programs("boundary").len(), 16);
    check("boundary");
}

#[test]
fn classic_tables() {
    check("classic");
}

fn prepared(name: &str) -> Prepared {
    let text = fs::read_to_string(corpus_dir().join("classic").join(format!("{name}.fl"))).unwrap();
    Prepared::new(&parse_program(&text).unwrap()).unwrap()
}

fn render(itp: &Interpretation) -> String {
    itp.values.iter().map(|(a, v)| format!("{a}: {}\n", v.name())).collect()
}

#[test]
fn classic_as_declared() {
    let mut failures = Vec::new();
    for path in programs("classic") {
        let name = path.file_stem().unwrap().to_str().unwrap().to_string();
        let actual = render(&prepared(&name).founded().interpretation);
        let expected = fs::read_to_string(path.with_extension("founded.golden")).unwrap();
        if actual != expected {
            failures.push(format!("{name}:\n--- expected\n{expected}--- actual\n{actual}"));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}
