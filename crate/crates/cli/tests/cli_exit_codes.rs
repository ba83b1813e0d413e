use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rtrecon"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn simulate_writes_the_expected_return_set() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/examples/linear_simulate.cfg");
    let out = dir.path().join("out");
    let status = bin()
        .args(["simulate", "--no-cache", "--format", "csv", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(0));
    let rts = std::fs::read_to_string(out.join("return_set.rts")).unwrap();
    assert!(rts.starts_with("RTS v1 0 19 6\n"), "{rts}");
    assert!(out.join("density.csv").exists());
    assert!(out.join("manifest.json").exists());
}

#[test]
fn config_errors_exit_2_with_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.cfg", "experiment = spectrum\ngroup = T^1\nalpah = 1/3\n");
    let o = bin().arg("spectrum").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.cfg:3: unknown key `alpah`"), "{err}");

    let o = bin().arg("spectrum").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = bin().arg("frobnicate").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failed_expectation_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "wrong.cfg",
        "experiment = simulate\ngroup = T^1\nalpha = 3/10\nopen_set = (0.25,0.55)\nwindow = [0,19]\nexpect_members = 1,2\n",
    );
    let o = bin()
        .args(["simulate", "--no-cache", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    // Artifacts are still written for inspection.
    assert!(dir.path().join("out/return_set.rts").exists());
}

#[test]
fn subgroup_limit_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "big.cfg", "experiment = gset-search\ncatalog = S5\n");
    let o = bin()
        .args(["gset", "search", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn cache_gc_removes_corrupt_entries() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    std::fs::create_dir_all(&cache).unwrap();
    write(&cache, "deadbeef.rts", "RTS v1 0 3 1\n1,1,2\n# checksum: 00\n");
    let o = bin().args(["cache", "gc", "--cache-dir"]).arg(&cache).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(!cache.join("deadbeef.rts").exists());
}
