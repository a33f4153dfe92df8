use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn asn(args: &[&str], extra: &[&Path]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asn"))
        .args(args)
        .args(extra)
        .output()
        .expect("binary runs")
}

fn sentence(id: &str, tokens: &[(&str, &str, usize)]) -> String {
    let mut s = format!("# sent_id = {id}\n");
    for (i, (lemma, role, head)) in tokens.iter().enumerate() {
        s.push_str(&format!("{}\t{lemma}\t{lemma}\t{role}\t{head}\tNP\n", i + 1));
    }
    s.push('\n');
    s
}

fn corpus_file(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, format!("# century = 15\n# doc_id = d\n# target = a\n{body}")).unwrap();
    path
}

/// Root `a` has `b` as a direct dependent once and through `c` five times.
fn weight_sensitive(dir: &Path) -> PathBuf {
    let mut body = sentence("s0", &[("a", "N", 0), ("b", "N", 1)]);
    for i in 1..=5 {
        body.push_str(&sentence(&format!("s{i}"), &[("a", "N", 0), ("c", "N", 1), ("b", "N", 2)]));
    }
    corpus_file(dir, "weights.tb", &body)
}

fn level_of(csv: &str, lemma: &str) -> f64 {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').collect::<Vec<_>>())
        .find(|f| f[1] == lemma)
        .map(|f| f[2].parse().unwrap())
        .unwrap()
}

#[test]
fn validate_accepts_good_trees() {
    let dir = tempfile::tempdir().unwrap();
    let body = ["s1", "s2", "s3"]
        .iter()
        .map(|id| sentence(id, &[("a", "N", 0), ("b", "N", 1), ("c", "N", 2)]))
        .collect::<String>();
    let path = corpus_file(dir.path(), "ok.tb", &body);
    let out = asn(&["validate"], &[&path]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
}

#[test]
fn validate_reports_violation_location() {
    let dir = tempfile::tempdir().unwrap();
    let mut body = sentence("good", &[("a", "N", 0), ("b", "N", 1)]);
    body.push_str(&sentence("bad", &[("a", "N", 0), ("b", "N", 0)]));
    let path = corpus_file(dir.path(), "bad.tb", &body);
    let out = asn(&["validate"], &[&path]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = stdout.lines().collect();
    assert_eq!(rows.len(), 1, "{stdout}");
    assert!(rows[0].contains("bad.tb:10:"), "{}", rows[0]);
    assert!(rows[0].contains("`bad`") && rows[0].contains("multiple roots"));
}

#[test]
fn missing_input_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = asn(&["validate"], &[&dir.path().join("absent.tb")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(asn(&["analyze"], &[]).status.code(), Some(2));
    assert_eq!(asn(&["frobnicate"], &[]).status.code(), Some(2));
    assert_eq!(asn(&["--help"], &[]).status.code(), Some(0));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = weight_sensitive(dir.path());
    let config = dir.path().join("run.conf");
    fs::write(&config, "seed = 3\ncolour = red\n").unwrap();
    let out = asn(&["build", "--config", config.to_str().unwrap()], &[&path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn weights_change_levels_but_not_exports() {
    let dir = tempfile::tempdir().unwrap();
    let input = weight_sensitive(dir.path());
    let (w, u) = (dir.path().join("w"), dir.path().join("u"));
    let run = |out: &Path, extra: &[&str]| {
        let mut args = vec!["hierarchy", "--out", out.to_str().unwrap()];
        args.extend_from_slice(extra);
        let o = asn(&args, &[&input]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    };
    run(&w, &[]);
    run(&u, &["--unweighted"]);
    let weighted = fs::read_to_string(w.join("century_15/hierarchy.csv")).unwrap();
    let unweighted = fs::read_to_string(u.join("century_15/hierarchy.csv")).unwrap();
    assert!((level_of(&weighted, "b") - (1.0 + 5.0 / 6.0)).abs() < 1e-12);
    assert!((level_of(&unweighted, "b") - 1.5).abs() < 1e-12);
    for f in ["asn.dot", "asn.graphml", "asn_edges.csv"] {
        let rel = format!("century_15/{f}");
        assert_eq!(fs::read(w.join(&rel)).unwrap(), fs::read(u.join(&rel)).unwrap(), "{f}");
    }
}

#[test]
fn empty_corpus_after_filtering_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let body = sentence("s1", &[("a", "N", 0), ("!", "N", 1)]);
    let path = corpus_file(dir.path(), "gaps.tb", &body);
    let out_dir = dir.path().join("out");
    let out = asn(&["build", "--missing", "drop-any", "--out", out_dir.to_str().unwrap()], &[&path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty"));
}

#[test]
fn analyze_is_reproducible_and_writes_manifest() {
    let input = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/demo_corpus.tb");
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = asn(&["analyze", "--seed", "5", "--replicates", "100", "--out", out.to_str().unwrap()], &[&input]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 5);
    assert_eq!(manifest["command"], "analyze");
    for f in manifest["files"].as_array().unwrap() {
        let rel = f.as_str().unwrap();
        assert_eq!(fs::read(a.join(rel)).unwrap(), fs::read(b.join(rel)).unwrap(), "{rel}");
    }
    let emergent: serde_json::Value = serde_json::from_slice(&fs::read(a.join("emergent_heads.json")).unwrap()).unwrap();
    assert!(emergent.to_string().contains("können"));
}
