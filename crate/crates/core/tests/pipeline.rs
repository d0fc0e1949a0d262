use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use growthlab::config::ExperimentConfig;
use growthlab::pipeline::{run, sha256_file};

const BIN: &str = env!("CARGO_BIN_EXE_growthlab");

fn data(stem: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(format!("{stem}.json"))
}

fn cli(args: &[&str], out: &Path) -> Output {
    let o = Command::new(BIN).args(args).arg("--out").arg(out).output().unwrap();
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    o
}

fn config(dir: &Path, stem: &str, radius: usize, bend: &[&str]) -> PathBuf {
    let mut c = ExperimentConfig::new(data(stem), radius);
    c.seed = 3;
    c.bend = bend.iter().map(|q| q.to_string()).collect();
    let path = dir.join(format!("{stem}.toml"));
    std::fs::write(&path, c.to_toml_string().unwrap()).unwrap();
    path
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn files_under(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(files_under(&p));
        } else {
            out.push(p);
        }
    }
    out.sort();
    out
}

#[test]
fn runs_are_byte_identical_and_fully_manifested() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::load(&config(tmp.path(), "kleinian_amalgam", 4, &["1", "11/10"])).unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run(&cfg, &a, None).unwrap();
    run(&cfg, &b, None).unwrap();
    let fa = files_under(&a);
    assert_eq!(fa.len(), files_under(&b).len());
    for f in &fa {
        let rel = f.strip_prefix(&a).unwrap();
        assert_eq!(std::fs::read(f).unwrap(), std::fs::read(b.join(rel)).unwrap(), "{}", rel.display());
    }
    let m = manifest(&a);
    assert_eq!(m["status"], "complete");
    assert_eq!(m["seed"], 3);
    let listed: Vec<&str> = m["outputs"].as_array().unwrap().iter().map(|o| o["path"].as_str().unwrap()).collect();
    for f in &fa {
        let rel = f.strip_prefix(&a).unwrap().to_string_lossy().into_owned();
        if rel != "manifest.json" {
            assert!(listed.contains(&rel.as_str()), "{rel} missing from manifest");
        }
    }
    for o in m["outputs"].as_array().unwrap() {
        assert_eq!(o["sha256"].as_str().unwrap(), sha256_file(&a.join(o["path"].as_str().unwrap())).unwrap());
    }
    for sub in ["bend/q1.json", "bend/manifest.json", "q1/report.json", "q11_10/report.json", "summary.txt"] {
        assert!(a.join(sub).exists(), "{sub}");
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), "bianchi_gaussian", 5, &[]);
    let cfg = cfg.to_str().unwrap();
    let one = tmp.path().join("one");
    let two = tmp.path().join("two");
    cli(&["run", "--config", cfg, "--threads", "1"], &one);
    cli(&["run", "--config", cfg, "--threads", "3"], &two);
    for f in ["base/report.json", "base/cloud.csv", "base/layers.csv"] {
        assert_eq!(std::fs::read(one.join(f)).unwrap(), std::fs::read(two.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn subcommands_chain_through_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path();
    let gens = data("kleinian_hnn");
    cli(&["enumerate", gens.to_str().unwrap(), "--radius", "6"], out);
    let ball = out.join("ball.json");
    cli(&["project", ball.to_str().unwrap()], out);
    let cloud = out.join("cloud.csv");
    let first = out.join("g1");
    let second = out.join("g2");
    cli(&["growth", cloud.to_str().unwrap(), "--ball", ball.to_str().unwrap(), "--seed", "9"], &first);
    cli(&["growth", cloud.to_str().unwrap(), "--ball", ball.to_str().unwrap(), "--seed", "9"], &second);
    for f in ["report.json", "directions.csv", "exponents.csv", "anosov.csv"] {
        assert_eq!(std::fs::read(first.join(f)).unwrap(), std::fs::read(second.join(f)).unwrap(), "{f}");
    }
    let a = cli(&["anosov", cloud.to_str().unwrap()], out);
    assert!(String::from_utf8_lossy(&a.stdout).contains("gap-degenerate"));
    let z = cli(&["zariski", ball.to_str().unwrap()], out);
    assert!(String::from_utf8_lossy(&z.stdout).contains("/ 100"));
    let r = cli(&["report", first.join("report.json").to_str().unwrap()], out);
    assert!(String::from_utf8_lossy(&r.stdout).contains("== g1 =="));
    assert!(out.join("summary.txt").exists());
}

#[test]
fn trivial_bend_reproduces_the_input_file() {
    let tmp = tempfile::tempdir().unwrap();
    let gens = data("kleinian_amalgam");
    cli(&["bend", gens.to_str().unwrap(), "--q", "1", "--q", "6/5"], tmp.path());
    assert_eq!(std::fs::read(tmp.path().join("q1.json")).unwrap(), std::fs::read(&gens).unwrap());
    assert!(tmp.path().join("q6_5.json").exists());
    let bad = Command::new(BIN).args(["bend", data("modular").to_str().unwrap(), "--q", "2"]).arg("--out").arg(tmp.path()).output().unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("[bend]"));
}

#[test]
fn failures_are_stage_tagged_and_leave_an_invalid_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let broken = tmp.path().join("broken.json");
    std::fs::write(&broken, "{ not json").unwrap();
    let mut c = ExperimentConfig::new(broken, 4);
    c.seed = 1;
    let path = tmp.path().join("broken.toml");
    std::fs::write(&path, c.to_toml_string().unwrap()).unwrap();
    let out = tmp.path().join("out");
    let o = Command::new(BIN).args(["run", "--config", path.to_str().unwrap()]).arg("--out").arg(&out).output().unwrap();
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("[load]"), "{err}");
    let m = manifest(&out);
    assert_eq!(m["status"], "invalid");
    assert_eq!(m["error"]["stage"], "load");

    let unknown = tmp.path().join("unknown.toml");
    std::fs::write(&unknown, "generators = \"x.json\"\nradius = 3\ncolour = 1\n").unwrap();
    let o = Command::new(BIN).args(["run", "--config", unknown.to_str().unwrap()]).output().unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("[config]"));
}
