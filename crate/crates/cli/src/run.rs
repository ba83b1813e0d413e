//! Experiment runners. Each writes its artifacts through [`OutputDir`] and
//! records warnings and failed expectations in the [`Context`].

use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rtrecon_core::group::{Character, Coord, GroupPoint};
use rtrecon_core::orbit::{
    return_set_linear, return_set_linear_from, return_set_polynomial, return_set_skew, OpenSet, ReturnSet,
    SkewSystem, StabilizerReport,
};
use rtrecon_core::spectral::{
    compare_systems, default_grid, default_threshold, reconstruct_group, scan_spectrum, spectral_length,
    spectrum_grid, ReconstructOptions, Spectrum, SpectrumPeak, Verdict,
};
use rtrecon_gset::{
    actions_isomorphic, block_system_generated, invariant_partitions, is_simple, reconstruct_from_return_subset,
    return_subset, search_counterexamples, transitive_actions, verify_certificate, CatalogGroup, CertificateCheck,
    PermAction, PermGroup, SearchLimits,
};
use serde::Serialize;

use crate::artifacts::OutputDir;
use crate::cache::Cache;
use crate::config::{ExperimentConfig, Generator, GsetTarget, Kind, Source, System};
use crate::error::{CliError, Result};

/// Plot-data format requested with `--format`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Rows kept in `spectrum_grid.csv`; finer grids are max-pooled.
const GRID_CSV_ROWS: usize = 65_536;
/// Rows in `density.csv`.
const DENSITY_CSV_ROWS: u64 = 1_024;

pub struct Context {
    pub out: OutputDir,
    pub cache: Option<Cache>,
    pub format: Format,
    pub warnings: Vec<String>,
    /// Failed expectations and verification checks.
    pub failures: Vec<String>,
}

impl Context {
    fn warn(&mut self, w: impl Into<String>) {
        let w = w.into();
        if !self.warnings.contains(&w) {
            self.warnings.push(w);
        }
    }
}

pub fn run_experiment(cfg: &ExperimentConfig, ctx: &mut Context) -> Result<()> {
    match cfg.kind {
        Kind::Simulate => simulate(cfg, ctx),
        Kind::Spectrum => spectrum(cfg, ctx),
        Kind::Reconstruct => reconstruct(cfg, ctx),
        Kind::Compare => compare(cfg, ctx),
        Kind::GsetSearch => gset_search(cfg, ctx),
        Kind::GsetReconstruct => gset_reconstruct(cfg, ctx),
    }
}

// ---------------------------------------------------------------------------
// Return sets

fn generate(g: &Generator) -> Result<ReturnSet> {
    let r = match g.system {
        System::Linear => match &g.start {
            Some(s) => return_set_linear_from(&g.group, &g.alpha, s, &g.open_set, g.window)?,
            None => return_set_linear(&g.group, &g.alpha, &g.open_set, g.window)?,
        },
        System::Polynomial => {
            let p = g.polynomial.as_ref().expect("validated with the config");
            return_set_polynomial(&g.group, &g.alpha, p, &g.open_set, g.window)?
        }
        System::Skew => {
            let start = match &g.start {
                Some(s) => (s.torus[0].clone(), s.torus[1].clone()),
                None => (Coord::zero(), Coord::zero()),
            };
            let s = SkewSystem::new(g.alpha.torus[0].clone(), start);
            return_set_skew(&s, &g.open_set, g.window)?
        }
    };
    Ok(r)
}

fn load(source: &Source, ctx: &mut Context) -> Result<ReturnSet> {
    match source {
        Source::File { path, window } => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            if text.starts_with("RTS ") {
                let r = ReturnSet::from_rts(&text)?;
                if window.is_some_and(|w| w != r.window()) {
                    ctx.warn(format!(
                        "{}: configured window ignored; the RTS header gives {}",
                        path.display(),
                        r.window()
                    ));
                }
                Ok(r)
            } else {
                Ok(ReturnSet::from_plain_text(&text, *window)?)
            }
        }
        Source::Generated(g) => match &ctx.cache {
            Some(cache) => {
                let key = Cache::key(&g.cache_key());
                let mut warnings = Vec::new();
                let (r, _) = cache.get_or_compute(&key, &mut warnings, || generate(g))?;
                for w in warnings {
                    ctx.warn(w);
                }
                Ok(r)
            }
            None => generate(g),
        },
    }
}

fn ambiguity_warning(r: &ReturnSet, ctx: &mut Context) {
    if r.ambiguous() > 0 {
        ctx.warn(format!(
            "{} orbit points were within the membership guard of a boundary and were resolved in floating point",
            r.ambiguous()
        ));
    }
}

#[derive(Serialize)]
struct StabilizerJson {
    trivial: bool,
    full_directions: Vec<bool>,
    /// Finite part, each shift as exact coordinate strings.
    shifts: Vec<Vec<String>>,
    display: String,
}

impl From<&StabilizerReport> for StabilizerJson {
    fn from(s: &StabilizerReport) -> Self {
        Self {
            trivial: s.is_trivial,
            full_directions: s.full_directions.clone(),
            shifts: s
                .shifts
                .iter()
                .map(|x| {
                    x.torus
                        .iter()
                        .map(ToString::to_string)
                        .chain(x.torsion.iter().map(ToString::to_string))
                        .collect()
                })
                .collect(),
            display: s.to_string(),
        }
    }
}

#[derive(Serialize)]
struct OpenSetJson {
    group: String,
    open_set: String,
    measure: f64,
    measure_exact: String,
    stabilizer: StabilizerJson,
}

fn open_set_json(u: &OpenSet) -> Result<OpenSetJson> {
    Ok(OpenSetJson {
        group: u.group().to_string(),
        open_set: u.to_string(),
        measure: u.jordan_measure(),
        measure_exact: u.jordan_measure_exact().to_string(),
        stabilizer: (&u.closure_stabilizer()?).into(),
    })
}

// ---------------------------------------------------------------------------
// simulate

#[derive(Serialize)]
struct SimulationJson {
    window: [i64; 2],
    count: u64,
    ambiguous: u64,
    provenance: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    open_set: Option<OpenSetJson>,
}

fn simulate(cfg: &ExperimentConfig, ctx: &mut Context) -> Result<()> {
    let source = cfg.source.as_ref().expect("simulate has a source");
    let r = load(source, ctx)?;
    ambiguity_warning(&r, ctx);
    ctx.out.write("return_set.rts", r.to_rts().as_bytes())?;
    let open_set = match source {
        Source::Generated(g) => Some(open_set_json(&g.open_set)?),
        Source::File { .. } => None,
    };
    let w = r.window();
    ctx.out.write_json(
        "simulation.json",
        &SimulationJson {
            window: [w.lo, w.hi],
            count: r.count(),
            ambiguous: r.ambiguous(),
            provenance: r.provenance().to_string(),
            open_set,
        },
    )?;
    if ctx.format == Format::Csv {
        if w.lo <= 1 && w.hi >= 1 {
            let n_max = w.hi as u64;
            let step = n_max.div_ceil(DENSITY_CSV_ROWS).max(1);
            let mut csv = String::from("n,count,density\n");
            let mut count = 0u64;
            for n in 1..=n_max {
                count += u64::from(r.contains(n as i64));
                if n % step == 0 || n == n_max {
                    writeln!(csv, "{n},{count},{}", count as f64 / n as f64).expect("string write");
                }
            }
            ctx.out.write("density.csv", csv.as_bytes())?;
        } else {
            ctx.warn("density.csv needs a window containing 1; skipped");
        }
    }
    if let Some(expected) = &cfg.expect.members {
        let got: Vec<i64> = r.members().collect();
        if &got != expected {
            ctx.failures.push(format!("return set {got:?} differs from expected {expected:?}"));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// spectrum

#[derive(Serialize)]
struct PeakRow {
    theta: f64,
    re: f64,
    im: f64,
    abs: f64,
    gap: f64,
    #[serde(rename = "N")]
    n: u64,
    flagged: bool,
}

impl From<&SpectrumPeak> for PeakRow {
    fn from(p: &SpectrumPeak) -> Self {
        Self {
            theta: p.theta,
            re: p.amplitude.re,
            im: p.amplitude.im,
            abs: p.amplitude.norm(),
            gap: p.convergence_gap,
            n: p.n_used,
            flagged: p.flagged,
        }
    }
}

#[derive(Serialize)]
struct SpectrumSummary {
    #[serde(rename = "N")]
    n: u64,
    grid_size: usize,
    threshold: f64,
    acceptance: String,
    peaks: usize,
    density: f64,
    parseval_sum: f64,
}

fn scan(cfg: &ExperimentConfig, r: &ReturnSet, ctx: &mut Context) -> Result<Spectrum> {
    let n = spectral_length(r)?;
    let grid = cfg.grid.unwrap_or_else(|| default_grid(n));
    let threshold = cfg.threshold.unwrap_or_else(|| default_threshold(n));
    let s = scan_spectrum(r, grid, threshold)?;
    for w in &s.warnings {
        ctx.warn(w.clone());
    }
    if s.peaks.iter().any(|p| p.flagged) {
        ctx.warn("some peaks had a non-unimodal refinement bracket and are flagged");
    }
    Ok(s)
}

fn write_spectrum(r: &ReturnSet, s: &Spectrum, ctx: &mut Context) -> Result<()> {
    let rows: Vec<PeakRow> = s.peaks.iter().map(PeakRow::from).collect();
    ctx.out.write_jsonl("spectrum.jsonl", &rows)?;
    let density = r.density(s.n)?;
    let parseval_sum: f64 = s.peaks.iter().map(|p| p.amplitude.norm_sqr()).sum();
    ctx.out.write_json(
        "spectrum_summary.json",
        &SpectrumSummary {
            n: s.n,
            grid_size: s.grid_size,
            threshold: s.threshold,
            acceptance: format!("|A| >= {:e} and |A_N - A_N/2| <= {:e}", s.threshold, s.threshold / 2.0),
            peaks: s.peaks.len(),
            density,
            parseval_sum,
        },
    )?;
    if ctx.format == Format::Csv {
        let grid = spectrum_grid(r, s.n, s.grid_size)?;
        let pool = grid.len().div_ceil(GRID_CSV_ROWS).max(1);
        let mut csv = String::from("theta,abs\n");
        for (i, chunk) in grid.chunks(pool).enumerate() {
            let (j, m) = chunk
                .iter()
                .enumerate()
                .map(|(j, c)| (j, c.norm()))
                .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
            let theta = (i * pool + j) as f64 / grid.len() as f64;
            writeln!(csv, "{theta},{m}").expect("string write");
        }
        ctx.out.write("spectrum_grid.csv", csv.as_bytes())?;
    }
    Ok(())
}

fn spectrum(cfg: &ExperimentConfig, ctx: &mut Context) -> Result<()> {
    let r = load(cfg.source.as_ref().expect("spectrum has a source"), ctx)?;
    ambiguity_warning(&r, ctx);
    let s = scan(cfg, &r, ctx)?;
    write_spectrum(&r, &s, ctx)
}

// ---------------------------------------------------------------------------
// reconstruct

#[derive(Serialize)]
struct CharacterJson {
    torus: Vec<i64>,
    torsion: Vec<u64>,
}

impl From<&Character> for CharacterJson {
    fn from(c: &Character) -> Self {
        Self {
            torus: c.torus_freqs.clone(),
            torsion: c.torsion_freqs.clone(),
        }
    }
}

#[derive(Serialize)]
struct AlphaJson {
    torus: Vec<f64>,
    torsion: Vec<u64>,
}

impl From<&GroupPoint> for AlphaJson {
    fn from(p: &GroupPoint) -> Self {
        Self {
            torus: p.torus.iter().map(Coord::to_f64).collect(),
            torsion: p.torsion.clone(),
        }
    }
}

#[derive(Serialize)]
struct AssignmentJson {
    theta: f64,
    re: f64,
    im: f64,
    character: CharacterJson,
}

#[derive(Serialize)]
struct ReconstructionJson {
    group: String,
    rank: usize,
    torsion: Vec<u64>,
    alpha_image: AlphaJson,
    assignments: Vec<AssignmentJson>,
    relations: Vec<Vec<i64>>,
    warnings: Vec<String>,
    height: u64,
    top_m: usize,
    tolerance: f64,
    threshold: f64,
    grid_size: usize,
    #[serde(rename = "N")]
    n: u64,
}

fn reconstruct(cfg: &ExperimentConfig, ctx: &mut Context) -> Result<()> {
    let source = cfg.source.as_ref().expect("reconstruct has a source");
    let r = load(source, ctx)?;
    ambiguity_warning(&r, ctx);
    if let Source::Generated(g) = source {
        stabilizer_warning("U", &g.open_set, ctx)?;
    }
    let s = scan(cfg, &r, ctx)?;
    write_spectrum(&r, &s, ctx)?;
    let opts = ReconstructOptions {
        height: cfg.height,
        top_m: cfg.top_m,
        ..ReconstructOptions::for_spectrum(&s)
    };
    let res = reconstruct_group(&s.peaks, &opts)?;
    for w in &res.warnings {
        ctx.warn(w.clone());
    }
    let torsion = res.group.torsion_orders().to_vec();
    let json = ReconstructionJson {
        group: res.group.to_string(),
        rank: res.group.torus_rank(),
        torsion: torsion.clone(),
        alpha_image: (&res.alpha_image).into(),
        assignments: res
            .peak_assignment
            .iter()
            .map(|a| AssignmentJson {
                theta: a.theta,
                re: a.amplitude.re,
                im: a.amplitude.im,
                character: (&a.character).into(),
            })
            .collect(),
        relations: res.relation_basis.clone(),
        warnings: res.warnings.clone(),
        height: res.height,
        top_m: res.top_m,
        tolerance: res.tolerance,
        threshold: s.threshold,
        grid_size: s.grid_size,
        n: s.n,
    };
    ctx.out.write_json("reconstruction.json", &json)?;
    if let Some(rank) = cfg.expect.rank {
        if rank != json.rank {
            ctx.failures.push(format!("reconstructed rank {} but expected {rank}", json.rank));
        }
    }
    if let Some(t) = &cfg.expect.torsion {
        let mut want = t.clone();
        want.sort_unstable();
        if want != torsion {
            ctx.failures.push(format!("reconstructed torsion {torsion:?} but expected {want:?}"));
        }
    }
    Ok(())
}

fn stabilizer_warning(label: &str, u: &OpenSet, ctx: &mut Context) -> Result<()> {
    let st = u.closure_stabilizer()?;
    if !st.is_trivial {
        ctx.warn(format!(
            "closure of {label} has nontrivial stabilizer {st}; the reconstruction hypothesis is violated and \
             only the quotient by this stabilizer is determined"
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// compare

#[derive(Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
enum VerdictJson {
    ConsistentIsomorphic,
    Distinguished {
        theta: f64,
        amplitude_1: [f64; 2],
        amplitude_2: [f64; 2],
    },
    Inconclusive,
}

impl VerdictJson {
    fn name(&self) -> &'static str {
        match self {
            VerdictJson::ConsistentIsomorphic => "consistent-isomorphic",
            VerdictJson::Distinguished { .. } => "distinguished",
            VerdictJson::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Serialize)]
struct SpectrumMatch {
    /// Every peak of each spectrum has a partner within `theta_tol` whose
    /// modulus differs by at most `amplitude_tol`.
    matches: bool,
    theta_tol: f64,
    amplitude_tol: f64,
    peaks_1: usize,
    peaks_2: usize,
    unmatched_1: Vec<f64>,
    unmatched_2: Vec<f64>,
    max_amplitude_diff: f64,
}

/// Pairs each peak with the nearest one of the other spectrum.
fn match_spectra(a: &Spectrum, b: &Spectrum, amplitude_tol: f64) -> SpectrumMatch {
    let theta_tol = 1.0 / a.n.max(b.n) as f64;
    let circ = |x: f64, y: f64| {
        let d = (x - y).rem_euclid(1.0);
        d.min(1.0 - d)
    };
    let mut max_diff: f64 = 0.0;
    let mut unmatched = |from: &Spectrum, to: &Spectrum| -> Vec<f64> {
        let mut out = Vec::new();
        for p in &from.peaks {
            let partner = to
                .peaks
                .iter()
                .filter(|q| circ(p.theta, q.theta) <= theta_tol)
                .min_by(|x, y| circ(p.theta, x.theta).total_cmp(&circ(p.theta, y.theta)));
            match partner {
                Some(q) => max_diff = max_diff.max((p.amplitude.norm() - q.amplitude.norm()).abs()),
                None => out.push(p.theta),
            }
        }
        out
    };
    let unmatched_1 = unmatched(a, b);
    let unmatched_2 = unmatched(b, a);
    SpectrumMatch {
        matches: unmatched_1.is_empty() && unmatched_2.is_empty() && max_diff <= amplitude_tol,
        theta_tol,
        amplitude_tol,
        peaks_1: a.peaks.len(),
        peaks_2: b.peaks.len(),
        unmatched_1,
        unmatched_2,
        max_amplitude_diff: max_diff,
    }
}

#[derive(Serialize)]
struct CompareJson {
    #[serde(flatten)]
    verdict: VerdictJson,
    tol: f64,
    same_return_set: bool,
    count_1: u64,
    count_2: u64,
    spectra: SpectrumMatch,
    spectrum_1: Vec<PeakRow>,
    spectrum_2: Vec<PeakRow>,
}

fn compare(cfg: &ExperimentConfig, ctx: &mut Context) -> Result<()> {
    let (s1, s2) = (cfg.source.as_ref(), cfg.source2.as_ref());
    let (s1, s2) = (s1.expect("compare has two sources"), s2.expect("compare has two sources"));
    let r1 = load(s1, ctx)?;
    let r2 = load(s2, ctx)?;
    ambiguity_warning(&r1, ctx);
    ambiguity_warning(&r2, ctx);
    for (label, s) in [("U", s1), ("U2", s2)] {
        if let Source::Generated(g) = s {
            stabilizer_warning(label, &g.open_set, ctx)?;
        }
    }
    ctx.out.write("return_set_1.rts", r1.to_rts().as_bytes())?;
    ctx.out.write("return_set_2.rts", r2.to_rts().as_bytes())?;

    let verdict = match compare_systems(&r1, &r2, cfg.tol)? {
        Verdict::ConsistentIsomorphic => VerdictJson::ConsistentIsomorphic,
        Verdict::Distinguished {
            theta,
            amplitude_1,
            amplitude_2,
        } => VerdictJson::Distinguished {
            theta,
            amplitude_1: [amplitude_1.re, amplitude_1.im],
            amplitude_2: [amplitude_2.re, amplitude_2.im],
        },
        Verdict::Inconclusive => VerdictJson::Inconclusive,
    };
    let sp1 = scan(cfg, &r1, ctx)?;
    let sp2 = scan(cfg, &r2, ctx)?;
    let spectra = match_spectra(&sp1, &sp2, cfg.match_tol);
    let name = verdict.name();
    let spectra_matches = spectra.matches;
    ctx.out.write_json(
        "compare.json",
        &CompareJson {
            verdict,
            tol: cfg.tol,
            same_return_set: r1.same_bits(&r2),
            count_1: r1.count(),
            count_2: r2.count(),
            spectra,
            spectrum_1: sp1.peaks.iter().map(PeakRow::from).collect(),
            spectrum_2: sp2.peaks.iter().map(PeakRow::from).collect(),
        },
    )?;
    if let Some(want) = &cfg.expect.verdict {
        if want != name {
            ctx.failures.push(format!("verdict {name} but expected {want}"));
        }
    }
    if let Some(want) = &cfg.expect.spectra {
        let got = if spectra_matches { "match" } else { "mismatch" };
        if want != got {
            ctx.failures.push(format!("spectra {got} but expected {want}"));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// gset

fn limits(cfg: &ExperimentConfig) -> SearchLimits {
    SearchLimits {
        cap: cfg.gset.cap,
        exhaustive_degree: cfg.gset.exhaustive_degree,
        samples: cfg.gset.samples,
        seed: cfg.seed,
    }
}

fn catalog_of(cfg: &ExperimentConfig) -> &[CatalogGroup] {
    match &cfg.gset.target {
        Some(GsetTarget::Catalog(c)) => c,
        _ => &[],
    }
}

fn build_group(c: &CatalogGroup, cap: usize) -> Result<Arc<PermGroup>> {
    Ok(Arc::new(PermGroup::generate(c.degree, &c.generators, cap)?))
}

fn mask_to_set(mask: u64, n: usize) -> Vec<bool> {
    (0..n).map(|x| mask >> x & 1 == 1).collect()
}

/// Subsets of an `n`-point set: all of them up to `exhaustive_degree`,
/// otherwise `samples` seeded draws.
fn subsets(n: usize, cfg: &ExperimentConfig, stream: u64) -> (Vec<Vec<bool>>, bool) {
    if n <= cfg.gset.exhaustive_degree {
        ((0..1u64 << n).map(|m| mask_to_set(m, n)).collect(), true)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let v = (0..cfg.gset.samples)
            .map(|_| (0..n).map(|_| rng.random_bool(0.5)).collect())
            .collect();
        (v, false)
    }
}

#[derive(Serialize)]
struct CertificateCheckJson {
    index: usize,
    group: String,
    #[serde(flatten)]
    check: CertificateCheck,
}

#[derive(Serialize)]
struct CoarsenessAction {
    group: String,
    degree: usize,
    invariant_partitions: usize,
    subsets: usize,
    failures: Vec<String>,
}

#[derive(Serialize)]
struct CoarsenessJson {
    max_degree: usize,
    actions: Vec<CoarsenessAction>,
    subsets_checked: usize,
    all_passed: bool,
}

/// Checks the generated block system against brute-force enumeration of
/// invariant partitions: it must be the coarsest one of which `U` is a union
/// of blocks.
fn coarseness_check(catalog: &[CatalogGroup], max_degree: usize, cap: usize) -> Result<CoarsenessJson> {
    let mut actions = Vec::new();
    for c in catalog {
        let g = build_group(c, cap)?;
        for ca in transitive_actions(&g, true)? {
            let a = &ca.action;
            let n = a.degree();
            if n > max_degree {
                continue;
            }
            let parts = invariant_partitions(a)?;
            let gens = a.generator_images();
            let failures: Vec<String> = (0..1u64 << n)
                .into_par_iter()
                .map(|mask| -> Result<Option<String>> {
                    let u = mask_to_set(mask, n);
                    let b = block_system_generated(a, &u)?;
                    let ok = b.is_invariant(&gens)
                        && b.is_union_of_blocks(&u)
                        && parts.iter().filter(|p| p.is_union_of_blocks(&u)).all(|p| p.refines(&b));
                    Ok((!ok).then(|| format!("subset {:?}", rtrecon_gset::members(&u))))
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .collect();
            actions.push(CoarsenessAction {
                group: c.name.clone(),
                degree: n,
                invariant_partitions: parts.len(),
                subsets: 1 << n,
                failures,
            });
        }
    }
    Ok(CoarsenessJson {
        max_degree,
        subsets_checked: actions.iter().map(|a| a.subsets).sum(),
        all_passed: actions.iter().all(|a| a.failures.is_empty()),
        actions,
    })
}

#[derive(Serialize)]
struct SearchSummaryJson<'a> {
    banner: &'a str,
    limits: &'a SearchLimits,
    summaries: &'a [rtrecon_gset::ActionSummary],
    instances: usize,
    counterexamples: usize,
    certificate_checks: Vec<CertificateCheckJson>,
    all_certificates_valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    coarseness: Option<CoarsenessJson>,
}

fn gset_search(cfg: &ExperimentConfig, ctx: &mut Context) -> Result<()> {
    let catalog = catalog_of(cfg);
    let limits = limits(cfg);
    let report = search_counterexamples(catalog, &limits)?;
    ctx.out.write_jsonl("search.jsonl", &report.records)?;
    let checks = report
        .counterexamples
        .iter()
        .enumerate()
        .map(|(index, c)| {
            Ok(CertificateCheckJson {
                index,
                group: c.group.clone(),
                check: verify_certificate(c, cfg.gset.cap)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let all_valid = checks.iter().all(|c| c.check.valid);
    if !all_valid {
        ctx.failures.push("a counterexample certificate failed re-verification".into());
    }
    let coarseness = if cfg.gset.coarseness_degree > 0 {
        let c = coarseness_check(catalog, cfg.gset.coarseness_degree, cfg.gset.cap)?;
        if !c.all_passed {
            ctx.failures.push("generated block system is not the coarsest on some subset".into());
        }
        Some(c)
    } else {
        None
    };
    if report.summaries.iter().any(|s| s.regime != rtrecon_gset::Regime::Exhaustive) {
        ctx.warn(format!(
            "actions above degree {} were sampled ({} subsets each, seed {}), not enumerated",
            limits.exhaustive_degree, limits.samples, limits.seed
        ));
    }
    ctx.warn(rtrecon_gset::OPEN_QUESTION_BANNER);
    ctx.out.write_json(
        "search_summary.json",
        &SearchSummaryJson {
            banner: &report.banner,
            limits: &report.limits,
            summaries: &report.summaries,
            instances: report.records.len(),
            counterexamples: report.counterexamples.len(),
            certificate_checks: checks,
            all_certificates_valid: all_valid,
            coarseness,
        },
    )?;
    Ok(())
}

#[derive(Serialize)]
struct SweepAction {
    group: String,
    degree: usize,
    point_stabilizer_order: usize,
    exhaustive: bool,
    subsets: usize,
    simple: usize,
    reconstructed: usize,
    failures: Vec<Vec<usize>>,
}

#[derive(Serialize)]
struct SweepJson {
    exhaustive_degree: usize,
    samples: usize,
    seed: u64,
    actions: Vec<SweepAction>,
    total_simple: usize,
    total_reconstructed: usize,
    all_passed: bool,
}

#[derive(Serialize)]
struct SingleJson {
    degree: usize,
    group_order: usize,
    subset: Vec<usize>,
    base_point: usize,
    simple: bool,
    return_subset: Vec<usize>,
    reconstructed_degree: usize,
    base_block: usize,
    isomorphic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    bijection: Option<Vec<usize>>,
}

/// Reconstructs `(a, x0)` from the return subset of `u`; `Some(ok)` when `u`
/// is simple.
fn roundtrip(g: &Arc<PermGroup>, a: &PermAction, x0: usize, u: &[bool]) -> Result<Option<bool>> {
    if !is_simple(a, u)? {
        return Ok(None);
    }
    let s = return_subset(a, x0, u)?;
    let (rec, base) = reconstruct_from_return_subset(g, &s)?;
    Ok(Some(actions_isomorphic(a, x0, &rec, base)?.is_some()))
}

fn gset_reconstruct(cfg: &ExperimentConfig, ctx: &mut Context) -> Result<()> {
    match cfg.gset.target.as_ref().expect("validated with the config") {
        GsetTarget::Catalog(catalog) => {
            let mut actions = Vec::new();
            let mut stream = 0u64;
            for c in catalog {
                let g = build_group(c, cfg.gset.cap)?;
                for ca in transitive_actions(&g, false)? {
                    let a = &ca.action;
                    let n = a.degree();
                    let (subs, exhaustive) = subsets(n, cfg, stream);
                    stream += 1;
                    let results: Vec<(Vec<usize>, Option<bool>)> = subs
                        .par_iter()
                        .map(|u| Ok((rtrecon_gset::members(u), roundtrip(&g, a, 0, u)?)))
                        .collect::<Result<_>>()?;
                    let simple = results.iter().filter(|r| r.1.is_some()).count();
                    let failures: Vec<Vec<usize>> = results
                        .iter()
                        .filter(|r| r.1 == Some(false))
                        .map(|r| r.0.clone())
                        .collect();
                    actions.push(SweepAction {
                        group: c.name.clone(),
                        degree: n,
                        point_stabilizer_order: ca.subgroup.len(),
                        exhaustive,
                        subsets: subs.len(),
                        simple,
                        reconstructed: simple - failures.len(),
                        failures,
                    });
                }
            }
            if actions.iter().any(|a| !a.exhaustive) {
                ctx.warn(format!(
                    "actions above degree {} were sampled ({} subsets each, seed {})",
                    cfg.gset.exhaustive_degree, cfg.gset.samples, cfg.seed
                ));
            }
            let sweep = SweepJson {
                exhaustive_degree: cfg.gset.exhaustive_degree,
                samples: cfg.gset.samples,
                seed: cfg.seed,
                total_simple: actions.iter().map(|a| a.simple).sum(),
                total_reconstructed: actions.iter().map(|a| a.reconstructed).sum(),
                all_passed: actions.iter().all(|a| a.failures.is_empty()),
                actions,
            };
            if !sweep.all_passed {
                ctx.failures
                    .push("some simple subset did not reconstruct an isomorphic pointed action".into());
            }
            ctx.out.write_json("gset_reconstruction.json", &sweep)?;
        }
        GsetTarget::Single {
            degree,
            generators,
            subset,
            base_point,
        } => {
            let g = Arc::new(PermGroup::generate(*degree, generators, cfg.gset.cap)?);
            let a = PermAction::natural(Arc::clone(&g));
            a.require_transitive()?;
            let u = rtrecon_gset::point_set(*degree, subset)?;
            let simple = is_simple(&a, &u)?;
            let s = return_subset(&a, *base_point, &u)?;
            let (rec, base) = reconstruct_from_return_subset(&g, &s)?;
            let bijection = actions_isomorphic(&a, *base_point, &rec, base)?;
            let isomorphic = bijection.is_some();
            if simple && !isomorphic {
                ctx.failures
                    .push("subset is simple but the reconstructed action is not isomorphic".into());
            }
            if !simple {
                ctx.warn("subset is not simple; only a factor of the action is determined");
            }
            ctx.out.write_json(
                "gset_reconstruction.json",
                &SingleJson {
                    degree: *degree,
                    group_order: g.order(),
                    subset: subset.clone(),
                    base_point: *base_point,
                    simple,
                    return_subset: s.elements(),
                    reconstructed_degree: rec.degree(),
                    base_block: base,
                    isomorphic,
                    bijection,
                },
            )?;
        }
    }
    Ok(())
}
