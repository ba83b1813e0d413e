use std::path::Path;

use rtrecon_cli::{run_args, Cache, Lookup};

const CONFIG: &str = "experiment = simulate\ngroup = T^1\nalpha = sqrt2 - 1\nopen_set = (0, 1/3)\nwindow = 5000\n";

fn simulate(cfg: &Path, out: &Path, cache: &Path) -> rtrecon_cli::Outcome {
    let args = [
        "rtrecon".to_string(),
        "simulate".into(),
        "--config".into(),
        cfg.display().to_string(),
        "--out".into(),
        out.display().to_string(),
        "--cache-dir".into(),
        cache.display().to_string(),
    ];
    run_args(args)
}

fn only_entry(cache: &Path) -> std::path::PathBuf {
    let entries: Vec<_> = std::fs::read_dir(cache).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(entries.len(), 1, "{entries:?}");
    entries[0].clone()
}

#[test]
fn second_run_hits_and_matches() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sim.cfg");
    std::fs::write(&cfg, CONFIG).unwrap();
    let cache = dir.path().join("cache");
    let a = simulate(&cfg, &dir.path().join("a"), &cache);
    assert_eq!(a.exit_code, 0, "{:?}", a.error);
    let entry = only_entry(&cache);
    let key = entry.file_stem().unwrap().to_string_lossy().to_string();
    assert_eq!(Cache::new(&cache).get(&key).0, Lookup::Hit);
    let b = simulate(&cfg, &dir.path().join("b"), &cache);
    assert_eq!(a.artifacts, b.artifacts);
    assert!(b.warnings.is_empty());
}

#[test]
fn changed_window_misses() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let cfg = dir.path().join("sim.cfg");
    std::fs::write(&cfg, CONFIG).unwrap();
    simulate(&cfg, &dir.path().join("a"), &cache);
    std::fs::write(&cfg, CONFIG.replace("5000", "5001")).unwrap();
    simulate(&cfg, &dir.path().join("b"), &cache);
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 2);
}

#[test]
fn edited_entry_is_recomputed_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sim.cfg");
    std::fs::write(&cfg, CONFIG).unwrap();
    let cache = dir.path().join("cache");
    let a = simulate(&cfg, &dir.path().join("a"), &cache);
    let entry = only_entry(&cache);
    let text = std::fs::read_to_string(&entry).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[1] = lines[1].replacen('1', "2", 1);
    std::fs::write(&entry, lines.join("\n") + "\n").unwrap();

    let b = simulate(&cfg, &dir.path().join("b"), &cache);
    assert_eq!(b.exit_code, 0);
    assert!(b.warnings.iter().any(|w| w.contains("checksum")), "{:?}", b.warnings);
    let rts = |o: &rtrecon_cli::Outcome| o.artifacts.iter().find(|r| r.file == "return_set.rts").cloned();
    assert_eq!(rts(&a), rts(&b));
    assert_eq!(std::fs::read_to_string(&entry).unwrap(), text);
}
