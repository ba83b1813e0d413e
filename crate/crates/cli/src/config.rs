//! Flat `key = value` experiment configs.
//!
//! One experiment per file; `#` starts a comment. Every key is validated
//! against the experiment kind before anything runs, and every error names
//! the line it came from.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use rtrecon_core::group::{GroupDescriptor, GroupPoint};
use rtrecon_core::literal::{parse_group, parse_integer, parse_open_set, parse_point, parse_polynomial, parse_window};
use rtrecon_core::orbit::{IntegerPolynomial, OpenSet, SkewSystem, Window};
use rtrecon_gset::{parse_catalog, parse_generators, CatalogGroup, Perm};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Clone, Debug)]
struct Entry {
    value: String,
    line: usize,
}

/// Parsed but untyped config file.
#[derive(Clone, Debug)]
pub struct RawConfig {
    path: String,
    dir: PathBuf,
    entries: BTreeMap<String, Entry>,
}

impl RawConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::ConfigFile {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &path.display().to_string(), dir)
    }

    pub fn parse(text: &str, path: &str, dir: PathBuf) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if content.is_empty() {
                continue;
            }
            let err = |message: String| CliError::Config {
                path: path.to_string(),
                line,
                message,
            };
            let (k, v) = content
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got {content:?}")))?;
            let key = k.trim().to_string();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_') {
                return Err(err(format!("invalid key {key:?}")));
            }
            if let Some(prev) = entries.get(&key) {
                let prev: &Entry = prev;
                return Err(err(format!("duplicate key `{key}` (first set on line {})", prev.line)));
            }
            entries.insert(
                key,
                Entry {
                    value: v.trim().to_string(),
                    line,
                },
            );
        }
        Ok(Self {
            path: path.to_string(),
            dir,
            entries,
        })
    }

    fn error(&self, key: &str, message: impl fmt::Display) -> CliError {
        match self.entries.get(key) {
            Some(e) => CliError::Config {
                path: self.path.clone(),
                line: e.line,
                message: format!("`{key}`: {message}"),
            },
            None => CliError::ConfigFile {
                path: self.path.clone(),
                message: format!("`{key}`: {message}"),
            },
        }
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| self.error(key, "missing required key"))
    }

    fn parsed<T, E: fmt::Display>(&self, key: &str, f: impl FnOnce(&str) -> std::result::Result<T, E>) -> Result<Option<T>> {
        match self.get(key) {
            Some(v) => f(v).map(Some).map_err(|e| self.error(key, e)),
            None => Ok(None),
        }
    }

    fn unsigned(&self, key: &str) -> Result<Option<u64>> {
        self.parsed(key, |v| {
            let n = parse_integer(v).map_err(|e| e.to_string())?;
            u64::try_from(n).map_err(|_| format!("expected a non-negative integer, got {v}"))
        })
    }

    fn float(&self, key: &str) -> Result<Option<f64>> {
        self.parsed(key, |v| {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("expected a finite number, got {v:?}"))
        })
    }

    fn boolean(&self, key: &str) -> Result<Option<bool>> {
        self.parsed(key, |v| match v {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            _ => Err(format!("expected true or false, got {v:?}")),
        })
    }

    /// Keys present in the file that `allowed` does not list.
    fn reject_unknown(&self, allowed: &BTreeSet<&str>) -> Result<()> {
        for (k, e) in &self.entries {
            if !allowed.contains(k.as_str()) {
                return Err(CliError::Config {
                    path: self.path.clone(),
                    line: e.line,
                    message: format!("unknown key `{k}` for this experiment"),
                });
            }
        }
        Ok(())
    }

    /// SHA-256 over the sorted `key=value` lines.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, e) in &self.entries {
            h.update(k.as_bytes());
            h.update(b"=");
            h.update(e.value.as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }

    pub fn normalized(&self) -> BTreeMap<String, String> {
        self.entries.iter().map(|(k, e)| (k.clone(), e.value.clone())).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Simulate,
    Spectrum,
    Reconstruct,
    Compare,
    GsetSearch,
    GsetReconstruct,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Simulate => "simulate",
            Kind::Spectrum => "spectrum",
            Kind::Reconstruct => "reconstruct",
            Kind::Compare => "compare",
            Kind::GsetSearch => "gset-search",
            Kind::GsetReconstruct => "gset-reconstruct",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [
            Kind::Simulate,
            Kind::Spectrum,
            Kind::Reconstruct,
            Kind::Compare,
            Kind::GsetSearch,
            Kind::GsetReconstruct,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum System {
    Linear,
    Polynomial,
    Skew,
}

/// An orbit whose return times are generated.
#[derive(Clone, Debug)]
pub struct Generator {
    pub system: System,
    pub group: GroupDescriptor,
    pub alpha: GroupPoint,
    pub start: Option<GroupPoint>,
    pub polynomial: Option<IntegerPolynomial>,
    pub open_set: OpenSet,
    pub window: Window,
}

impl Generator {
    /// Canonical description used as the cache key.
    pub fn cache_key(&self) -> String {
        format!(
            "v1\nsystem={:?}\ngroup={}\nalpha={}\nstart={}\npolynomial={}\nopen_set={}\nwindow={}\n",
            self.system,
            self.group,
            self.alpha,
            self.start.as_ref().map_or("-".to_string(), ToString::to_string),
            self.polynomial.as_ref().map_or("-".to_string(), ToString::to_string),
            self.open_set,
            self.window
        )
    }
}

#[derive(Clone, Debug)]
pub enum Source {
    Generated(Generator),
    /// RTS v1 or one-integer-per-line file.
    File { path: PathBuf, window: Option<Window> },
}

#[derive(Clone, Debug, Default)]
pub struct Expectations {
    pub members: Option<Vec<i64>>,
    pub rank: Option<usize>,
    pub torsion: Option<Vec<u64>>,
    pub verdict: Option<String>,
    pub spectra: Option<String>,
}

#[derive(Clone, Debug)]
pub enum GsetTarget {
    Catalog(Vec<CatalogGroup>),
    Single {
        degree: usize,
        generators: Vec<Perm>,
        subset: Vec<usize>,
        base_point: usize,
    },
}

#[derive(Clone, Debug)]
pub struct GsetSettings {
    pub target: Option<GsetTarget>,
    pub cap: usize,
    pub exhaustive_degree: usize,
    pub samples: usize,
    pub coarseness_degree: usize,
}

/// A fully validated experiment.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub source: Option<Source>,
    pub source2: Option<Source>,
    pub grid: Option<usize>,
    pub threshold: Option<f64>,
    pub height: u64,
    pub top_m: usize,
    pub tol: f64,
    pub match_tol: f64,
    pub expect: Expectations,
    pub gset: GsetSettings,
    pub config_hash: String,
    pub entries: BTreeMap<String, String>,
}

const COMMON: &[&str] = &["experiment", "seed", "out", "threads"];
const SOURCE: &[&str] = &["system", "group", "alpha", "start", "polynomial", "theorem_mode", "open_set", "window", "input"];
const SPECTRAL: &[&str] = &["grid", "threshold"];

fn list_of_ints(v: &str) -> std::result::Result<Vec<i64>, String> {
    let inner = v.trim().trim_start_matches(['[', '{']).trim_end_matches([']', '}']);
    inner
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| parse_integer(t).map_err(|e| e.to_string()))
        .collect()
}

fn bare_point(k: &GroupDescriptor, v: &str) -> rtrecon_core::Result<GroupPoint> {
    if v.trim_start().starts_with('(') {
        parse_point(k, v)
    } else {
        parse_point(k, &format!("({v})"))
    }
}

impl ExperimentConfig {
    /// Validates `raw` as an experiment of kind `kind` (the config's own
    /// `experiment` key, if present, must agree).
    pub fn from_raw(raw: &RawConfig, kind: Kind) -> Result<Self> {
        if let Some(v) = raw.get("experiment") {
            let k = Kind::parse(v).ok_or_else(|| raw.error("experiment", format!("unknown experiment {v:?}")))?;
            if k != kind {
                return Err(raw.error("experiment", format!("config is for `{k}` but `{kind}` was requested")));
            }
        }
        let mut allowed: BTreeSet<&str> = COMMON.iter().copied().collect();
        match kind {
            Kind::Simulate => {
                allowed.extend(SOURCE);
                allowed.insert("expect_members");
            }
            Kind::Spectrum => {
                allowed.extend(SOURCE);
                allowed.extend(SPECTRAL);
            }
            Kind::Reconstruct => {
                allowed.extend(SOURCE);
                allowed.extend(SPECTRAL);
                allowed.extend(["height", "top_m", "expect_rank", "expect_torsion"]);
            }
            Kind::Compare => {
                allowed.extend(SOURCE);
                allowed.extend(SPECTRAL);
                allowed.extend(["system2", "group2", "alpha2", "start2", "polynomial2", "open_set2", "input2"]);
                allowed.extend(["tol", "match_tol", "expect_verdict", "expect_spectra"]);
            }
            Kind::GsetSearch => {
                allowed.extend(["catalog", "cap", "exhaustive_degree", "samples", "coarseness_degree"]);
            }
            Kind::GsetReconstruct => {
                allowed.extend(["catalog", "generators", "degree", "subset", "base_point"]);
                allowed.extend(["cap", "exhaustive_degree", "samples"]);
            }
        }
        raw.reject_unknown(&allowed)?;

        let spectral = matches!(kind, Kind::Spectrum | Kind::Reconstruct | Kind::Compare);
        let (source, source2) = match kind {
            Kind::Simulate | Kind::Spectrum | Kind::Reconstruct => (Some(parse_source(raw, "", spectral)?), None),
            Kind::Compare => (Some(parse_source(raw, "", spectral)?), Some(parse_source(raw, "2", spectral)?)),
            _ => (None, None),
        };

        let grid = raw.unsigned("grid")?.map(|g| g as usize);
        let threshold = raw.float("threshold")?;
        if threshold.is_some_and(|t| t <= 0.0) {
            return Err(raw.error("threshold", "must be positive"));
        }
        let expect = Expectations {
            members: raw.parsed("expect_members", list_of_ints)?,
            rank: raw.unsigned("expect_rank")?.map(|r| r as usize),
            torsion: raw.parsed("expect_torsion", |v| {
                list_of_ints(v)?
                    .into_iter()
                    .map(|x| u64::try_from(x).map_err(|_| format!("negative torsion order {x}")))
                    .collect::<std::result::Result<Vec<u64>, String>>()
            })?,
            verdict: raw.parsed("expect_verdict", |v| match v {
                "consistent-isomorphic" | "distinguished" | "inconclusive" => Ok(v.to_string()),
                _ => Err(format!("expected consistent-isomorphic, distinguished or inconclusive, got {v:?}")),
            })?,
            spectra: raw.parsed("expect_spectra", |v| match v {
                "match" | "mismatch" => Ok(v.to_string()),
                _ => Err(format!("expected match or mismatch, got {v:?}")),
            })?,
        };

        let gset = GsetSettings {
            target: parse_gset_target(raw, kind)?,
            cap: raw.unsigned("cap")?.map_or(rtrecon_gset::DEFAULT_ORDER_CAP, |c| c as usize),
            exhaustive_degree: raw.unsigned("exhaustive_degree")?.map_or(
                if kind == Kind::GsetReconstruct { 12 } else { 16 },
                |d| d as usize,
            ),
            samples: raw.unsigned("samples")?.map_or(4096, |s| s as usize),
            coarseness_degree: raw.unsigned("coarseness_degree")?.map_or(0, |d| d as usize),
        };
        if gset.exhaustive_degree > 24 {
            return Err(raw.error("exhaustive_degree", "at most 24 (2^24 subsets per action)"));
        }
        if gset.coarseness_degree > 10 {
            return Err(raw.error("coarseness_degree", "brute-force partition enumeration supports degree at most 10"));
        }

        Ok(Self {
            kind,
            seed: raw.unsigned("seed")?.unwrap_or(0),
            out: raw.get("out").map(|o| raw.dir.join(o)),
            threads: raw.unsigned("threads")?.map(|t| t as usize),
            source,
            source2,
            grid,
            threshold,
            height: raw.unsigned("height")?.unwrap_or(24),
            top_m: raw.unsigned("top_m")?.map_or(25, |m| m as usize),
            tol: raw.float("tol")?.unwrap_or(1e-2),
            match_tol: raw.float("match_tol")?.unwrap_or(1e-3),
            expect,
            gset,
            config_hash: raw.hash(),
            entries: raw.normalized(),
        })
    }
}

/// Reads the source keys with the given suffix; suffixed keys fall back to
/// the unsuffixed ones.
fn parse_source(raw: &RawConfig, suffix: &str, spectral: bool) -> Result<Source> {
    let key = |k: &str| -> String {
        let s = format!("{k}{suffix}");
        if raw.get(&s).is_some() {
            s
        } else {
            k.to_string()
        }
    };
    let window_key = "window".to_string();
    let window = raw.parsed(&window_key, parse_window)?;
    if spectral {
        if let Some(w) = window {
            if w.lo > 1 || w.hi < 2 {
                return Err(raw.error(&window_key, format!("spectral experiments need a window [lo, N] with lo <= 1 < N, got {w}")));
            }
        }
    }

    let has_own_generator_keys = ["system", "group", "alpha", "open_set", "polynomial", "start"]
        .iter()
        .any(|k| raw.get(&format!("{k}{suffix}")).is_some());
    let own_input = format!("input{suffix}");
    if raw.get(&own_input).is_some() && has_own_generator_keys {
        return Err(raw.error(&own_input, "give either `input` or generator keys, not both"));
    }
    let input = raw
        .get(&own_input)
        .or_else(|| (!has_own_generator_keys).then(|| raw.get("input")).flatten());
    if let Some(p) = input {
        return Ok(Source::File {
            path: raw.dir.join(p),
            window,
        });
    }

    let system_key = key("system");
    let poly_key = key("polynomial");
    let system = match raw.get(&system_key) {
        Some("linear") => System::Linear,
        Some("polynomial") => System::Polynomial,
        Some("skew") => System::Skew,
        Some(other) => return Err(raw.error(&system_key, format!("expected linear, polynomial or skew, got {other:?}"))),
        None if raw.get(&poly_key).is_some() => System::Polynomial,
        None => System::Linear,
    };
    let group_key = key("group");
    let group = match system {
        System::Skew => {
            let g = raw.parsed(&group_key, parse_group)?.unwrap_or_else(SkewSystem::group);
            if g != SkewSystem::group() {
                return Err(raw.error(&group_key, "the skew product lives on T^2"));
            }
            g
        }
        _ => raw
            .parsed(&group_key, parse_group)?
            .ok_or_else(|| raw.error(&group_key, "missing required key"))?,
    };
    let alpha_key = key("alpha");
    let alpha_group = if system == System::Skew {
        GroupDescriptor::torus(1)
    } else {
        group.clone()
    };
    let alpha_text = raw.require(&alpha_key)?;
    let alpha = bare_point(&alpha_group, alpha_text).map_err(|e| raw.error(&alpha_key, e))?;
    let start_key = key("start");
    let start = raw.parsed(&start_key, |v| bare_point(&group, v))?;
    let polynomial = match system {
        System::Polynomial => {
            let p = raw
                .parsed(&poly_key, parse_polynomial)?
                .ok_or_else(|| raw.error(&poly_key, "missing required key for a polynomial system"))?;
            if raw.boolean("theorem_mode")?.unwrap_or(false) {
                IntegerPolynomial::theorem(p.coeffs().to_vec()).map_err(|e| raw.error(&poly_key, e))?;
            }
            Some(p)
        }
        _ => {
            if raw.get(&poly_key).is_some() {
                return Err(raw.error(&poly_key, "polynomial given but system is not polynomial"));
            }
            None
        }
    };
    if system == System::Polynomial && start.is_some() {
        return Err(raw.error(&start_key, "polynomial orbits start at the identity"));
    }
    let set_key = key("open_set");
    let open_set = raw
        .parsed(&set_key, |v| parse_open_set(&group, v))?
        .ok_or_else(|| raw.error(&set_key, "missing required key"))?;
    let window = window.ok_or_else(|| raw.error(&window_key, "missing required key"))?;
    Ok(Source::Generated(Generator {
        system,
        group,
        alpha,
        start,
        polynomial,
        open_set,
        window,
    }))
}

fn parse_gset_target(raw: &RawConfig, kind: Kind) -> Result<Option<GsetTarget>> {
    match kind {
        Kind::GsetSearch => {
            let c = raw
                .parsed("catalog", parse_catalog)?
                .ok_or_else(|| raw.error("catalog", "missing required key"))?;
            Ok(Some(GsetTarget::Catalog(c)))
        }
        Kind::GsetReconstruct => {
            if let Some(c) = raw.parsed("catalog", parse_catalog)? {
                if raw.get("generators").is_some() {
                    return Err(raw.error("generators", "give either `catalog` or `generators`, not both"));
                }
                return Ok(Some(GsetTarget::Catalog(c)));
            }
            let degree = raw.unsigned("degree")?.map(|d| d as usize);
            let gens_text = raw.require("generators")?;
            let generators = match rtrecon_gset::catalog_group(gens_text) {
                Ok(c) if degree.is_none() => (c.degree, c.generators),
                _ => parse_generators(gens_text, degree).map_err(|e| raw.error("generators", e))?,
            };
            let (degree, generators) = generators;
            let subset: Vec<usize> = raw
                .parsed("subset", list_of_ints)?
                .ok_or_else(|| raw.error("subset", "missing required key"))?
                .into_iter()
                .map(|x| {
                    usize::try_from(x)
                        .ok()
                        .filter(|&x| x < degree)
                        .ok_or_else(|| raw.error("subset", format!("point {x} out of range for degree {degree}")))
                })
                .collect::<Result<_>>()?;
            let base_point = raw.unsigned("base_point")?.unwrap_or(0) as usize;
            if base_point >= degree {
                return Err(raw.error("base_point", format!("out of range for degree {degree}")));
            }
            Ok(Some(GsetTarget::Single {
                degree,
                generators,
                subset,
                base_point,
            }))
        }
        _ => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, kind: Kind) -> Result<ExperimentConfig> {
        ExperimentConfig::from_raw(&RawConfig::parse(text, "test.cfg", PathBuf::new())?, kind)
    }

    #[test]
    fn linear_source() {
        let c = parse(
            "experiment = simulate\ngroup = T^1\nalpha = 3/10\nopen_set = (0.25,0.55)\nwindow = [0,19]\n",
            Kind::Simulate,
        )
        .unwrap();
        match c.source.unwrap() {
            Source::Generated(g) => {
                assert_eq!(g.system, System::Linear);
                assert_eq!(g.window, Window::new(0, 19).unwrap());
            }
            _ => panic!("expected generated source"),
        }
    }

    #[test]
    fn unknown_key_is_line_anchored() {
        let e = parse("group = T^1\n\ncolour = blue\n", Kind::Simulate).unwrap_err();
        assert_eq!(e.to_string(), "test.cfg:3: unknown key `colour` for this experiment");
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn bad_literal_is_line_anchored() {
        let e = parse("group = T^1\nalpha = (1/0)\nopen_set = (0,1/2)\nwindow = 100\n", Kind::Simulate).unwrap_err();
        assert!(e.to_string().starts_with("test.cfg:2: `alpha`"), "{e}");
    }

    #[test]
    fn missing_and_mismatched() {
        let e = parse("group = T^1\nalpha = 1/3\nwindow = 10\n", Kind::Simulate).unwrap_err();
        assert!(e.to_string().contains("open_set"), "{e}");
        let e = parse("experiment = spectrum\n", Kind::Simulate).unwrap_err();
        assert!(e.to_string().contains("`spectrum`"), "{e}");
        let e = parse("a = 1\na = 2\n", Kind::Simulate).unwrap_err();
        assert!(e.to_string().starts_with("test.cfg:2: duplicate"), "{e}");
    }

    #[test]
    fn spectral_window_check() {
        let e = parse("group = T^1\nalpha = 1/3\nopen_set = (0,1/2)\nwindow = [5,100]\n", Kind::Spectrum).unwrap_err();
        assert!(e.to_string().starts_with("test.cfg:4:"), "{e}");
    }

    #[test]
    fn compare_sources_fall_back() {
        let c = parse(
            "group = T^1\nalpha = sqrt2-1\nalpha2 = sqrt2-1/2\nopen_set = (0,1/2)\nwindow = 64\n",
            Kind::Compare,
        )
        .unwrap();
        let (Some(Source::Generated(a)), Some(Source::Generated(b))) = (c.source, c.source2) else {
            panic!("expected two generated sources");
        };
        assert_ne!(a.alpha, b.alpha);
        assert_eq!(a.open_set, b.open_set);
    }

    #[test]
    fn skew_defaults_to_t2() {
        let c = parse("system = skew\nalpha = sqrt2-1\nopen_set = (0,0.37) x T\nwindow = 100\n", Kind::Spectrum).unwrap();
        let Some(Source::Generated(g)) = c.source else { panic!() };
        assert_eq!(g.group, GroupDescriptor::torus(2));
    }

    #[test]
    fn gset_single_target() {
        let c = parse("generators = C4\nsubset = 0,1\n", Kind::GsetReconstruct).unwrap();
        match c.gset.target {
            Some(GsetTarget::Single { degree, subset, .. }) => {
                assert_eq!(degree, 4);
                assert_eq!(subset, vec![0, 1]);
            }
            _ => panic!(),
        }
        let e = parse("catalog = C4, X9\n", Kind::GsetSearch).unwrap_err();
        assert!(e.to_string().starts_with("test.cfg:1: `catalog`"), "{e}");
    }
}
