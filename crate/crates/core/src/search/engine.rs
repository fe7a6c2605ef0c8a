use std::collections::HashSet;
use std::ffi::OsString;
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::index;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::profile::{census, profile, spot_check, ProfileBackend};
use crate::rational::int;
use crate::residue::{PrimeModulus, ResidueSet};
use crate::verdict::{BoundVerdict, ClaimId, Outcome};

use super::enumerate::enumerate_sets;
use super::record::SearchRecord;
use super::report::SearchReport;
use super::suites::{SuiteParams, SuiteRegistry, UnitView};
use super::{Gate, Mode, SearchConfig};

/// Per-trial seeds for modulus `p`: the first `trials` outputs of a
/// generator keyed by `(seed, p)`.
pub fn unit_seeds(seed: u64, p: PrimeModulus, trials: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(p.get());
    (0..trials).map(|_| rng.next_u64()).collect()
}

/// The uniformly random `card`-subset drawn for a unit.
pub fn sample_set(p: PrimeModulus, unit_seed: u64, card: usize) -> ResidueSet {
    let mut rng = ChaCha8Rng::seed_from_u64(unit_seed);
    rng.set_stream(card as u64);
    let picked = index::sample(&mut rng, p.get() as usize, card);
    ResidueSet::collect_residues(p, picked.into_iter().map(|i| i as u64))
}

fn sample_card(unit_seed: u64, band: &std::ops::RangeInclusive<usize>) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(unit_seed);
    rng.gen_range(band.clone())
}

enum Source {
    Listed(ResidueSet),
    Sampled { unit_seed: u64, card: usize },
}

struct WorkUnit {
    task: String,
    p: PrimeModulus,
    source: Source,
}

impl WorkUnit {
    fn set(&self) -> ResidueSet {
        match &self.source {
            Source::Listed(s) => s.clone(),
            Source::Sampled { unit_seed, card } => sample_set(self.p, *unit_seed, *card),
        }
    }
}

fn elements_key(set: &ResidueSet) -> String {
    set.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn exhaustive_units(config: &SearchConfig) -> Result<Box<dyn Iterator<Item = WorkUnit> + Send>> {
    let mut parts: Vec<Box<dyn Iterator<Item = WorkUnit> + Send>> = Vec::new();
    for p in config.prime_list() {
        for size in config.card_band(p) {
            let sets = enumerate_sets(p, size, config.up_to_affine)?;
            parts.push(Box::new(sets.map(move |s| WorkUnit {
                task: format!("p={p}/A={}", elements_key(&s)),
                p,
                source: Source::Listed(s),
            })));
        }
    }
    Ok(Box::new(parts.into_iter().flatten()))
}

fn random_units(config: &SearchConfig) -> Box<dyn Iterator<Item = WorkUnit> + Send> {
    let seed = config.seed.expect("validated");
    let mut units = Vec::new();
    for p in config.prime_list() {
        let band = config.card_band(p);
        if band.is_empty() {
            continue;
        }
        for (t, unit_seed) in unit_seeds(seed, p, config.trials).into_iter().enumerate() {
            units.push(WorkUnit {
                task: format!("p={p}/t={t}"),
                p,
                source: Source::Sampled {
                    unit_seed,
                    card: sample_card(unit_seed, &band),
                },
            });
        }
    }
    Box::new(units.into_iter())
}

/// FNV-1a, used only to derive spot-check seeds from task keys.
fn task_hash(task: &str) -> u64 {
    task.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

fn process(
    unit: &WorkUnit,
    config: &SearchConfig,
    params: &SuiteParams,
) -> Result<Vec<SearchRecord>> {
    let set = unit.set();
    let prof = profile(&set, config.backend);
    let resolved = config.backend.resolve(unit.p.get());
    if config.spot_check_fraction > 0.0 && resolved != ProfileBackend::Naive {
        let mut rng = ChaCha8Rng::seed_from_u64(task_hash(&unit.task));
        spot_check(
            &set,
            &prof,
            resolved.name(),
            config.spot_check_fraction,
            &mut rng,
        )?;
    }
    let ranked = UnitView::rank_half(&prof);
    let view = UnitView {
        set: &set,
        profile: &prof,
        ranked_half: &ranked,
        params,
        backend: config.backend,
    };
    let registry = SuiteRegistry::builtin();
    let (listed, unit_seed) = match unit.source {
        Source::Listed(_) => (true, None),
        Source::Sampled { unit_seed, .. } => (false, Some(unit_seed)),
    };
    let mut out = Vec::new();
    for &claim in &config.suites {
        let suite = registry
            .get(claim)
            .ok_or_else(|| Error::Config(format!("no search suite for claim {claim}")))?;
        for e in suite.evaluate(&view) {
            let attach = listed || e.pass == Outcome::Fail;
            out.push(SearchRecord {
                task: unit.task.clone(),
                p: unit.p.get(),
                a: attach.then(|| set.to_string()),
                unit_seed,
                card: set.len(),
                claim: e.claim,
                m: e.m,
                b: e.b.map(|b| b.to_string()),
                pass: e.pass,
                region: e.region,
                margins: e.margins,
                witnesses: e.witnesses,
            });
        }
    }
    Ok(out)
}

fn done_path(path: &Path) -> PathBuf {
    let mut s = OsString::from(path.as_os_str());
    s.push(".done");
    PathBuf::from(s)
}

/// Complete (newline-terminated) lines of a file, or none if it is absent.
fn complete_lines(path: &Path) -> Result<Vec<String>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    let mut lines: Vec<String> = text.split('\n').map(str::to_string).collect();
    lines.pop(); // text after the last newline is either empty or torn
    Ok(lines)
}

fn rewrite(path: &Path, lines: &[String]) -> Result<()> {
    let tmp = {
        let mut s = OsString::from(path.as_os_str());
        s.push(".tmp");
        PathBuf::from(s)
    };
    {
        let mut w = BufWriter::new(File::create(&tmp)?);
        for l in lines {
            writeln!(w, "{l}")?;
        }
        w.flush()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Append-only JSONL records plus a ledger of completed task keys. A unit
/// counts as done only once its key reaches the ledger, so records of a
/// torn unit are dropped on resume and recomputed.
struct Store {
    records: BufWriter<File>,
    done: BufWriter<File>,
}

impl Store {
    fn open(path: &Path, resume: bool) -> Result<(Store, Vec<SearchRecord>, HashSet<String>)> {
        let ledger = done_path(path);
        let mut kept = Vec::new();
        let mut done = HashSet::new();
        if resume {
            let keys = complete_lines(&ledger)?;
            done.extend(keys.iter().cloned());
            let mut lines = Vec::new();
            for line in complete_lines(path)? {
                let rec: SearchRecord = match serde_json::from_str(&line) {
                    Ok(r) => r,
                    Err(_) => continue,
                };
                if done.contains(&rec.task) {
                    lines.push(line);
                    kept.push(rec);
                }
            }
            rewrite(path, &lines)?;
            rewrite(&ledger, &keys)?;
        } else {
            File::create(path)?;
            File::create(&ledger)?;
        }
        let append = |p: &Path| -> Result<BufWriter<File>> {
            Ok(BufWriter::new(OpenOptions::new().append(true).open(p)?))
        };
        Ok((
            Store {
                records: append(path)?,
                done: append(&ledger)?,
            },
            kept,
            done,
        ))
    }
}

fn with_pool<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

fn run_units(
    config: &SearchConfig,
    units: Box<dyn Iterator<Item = WorkUnit> + Send>,
) -> Result<SearchReport> {
    let params = config.suite_params();
    let (mut store, mut all, done) = match &config.output {
        Some(path) => {
            let (s, kept, done) = Store::open(path, config.resume)?;
            (Some(s), kept, done)
        }
        None => (None, Vec::new(), HashSet::new()),
    };
    let mut units = units.filter(|u| !done.contains(&u.task)).peekable();
    let chunk_size = 64
        * config
            .workers
            .unwrap_or_else(rayon::current_num_threads)
            .max(1);
    let mut processed = 0u64;
    let mut budget = config.stop_after.unwrap_or(u64::MAX);
    while budget > 0 {
        let take = chunk_size.min(budget.min(usize::MAX as u64) as usize);
        let chunk: Vec<WorkUnit> = units.by_ref().take(take).collect();
        if chunk.is_empty() {
            break;
        }
        budget -= chunk.len() as u64;
        let results: Vec<Result<Vec<SearchRecord>>> = with_pool(config.workers, || {
            chunk
                .par_iter()
                .map(|u| process(u, config, &params))
                .collect()
        })?;
        let mut finished = Vec::with_capacity(chunk.len());
        let mut failure = None;
        for (unit, res) in chunk.iter().zip(results) {
            match res {
                Ok(recs) => {
                    if let Some(store) = store.as_mut() {
                        for r in &recs {
                            writeln!(store.records, "{}", r.to_json_line())?;
                        }
                    }
                    all.extend(recs);
                    finished.push(&unit.task);
                    processed += 1;
                }
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            }
        }
        if let Some(store) = store.as_mut() {
            store.records.flush()?;
            for task in &finished {
                writeln!(store.done, "{task}")?;
            }
            store.done.flush()?;
        }
        if let Some(e) = failure {
            return Err(e);
        }
    }
    let incomplete = units.peek().is_some();
    let mut report = SearchReport::new(all, done.len() as u64 + processed, config.retain_records);
    report.summary.incomplete = incomplete;
    Ok(report)
}

/// Validates `config` and runs it in its configured mode.
pub fn run(config: &SearchConfig) -> Result<SearchReport> {
    config.validate()?;
    let units = match config.mode {
        Mode::Exhaustive => exhaustive_units(config)?,
        Mode::Random => random_units(config),
    };
    run_units(config, units)
}

pub fn exhaustive_verify(config: &SearchConfig) -> Result<SearchReport> {
    if config.mode != Mode::Exhaustive {
        return Err(Error::Config(
            "exhaustive_verify needs mode = exhaustive".into(),
        ));
    }
    run(config)
}

pub fn random_verify(config: &SearchConfig) -> Result<SearchReport> {
    if config.mode != Mode::Random {
        return Err(Error::Config("random_verify needs mode = random".into()));
    }
    run(config)
}

/// Census search with the `8m^2 < p` condition dropped. Failures beyond
/// that condition are reported under `exploratory` only.
pub fn counterexample_hunt(config: &SearchConfig) -> Result<SearchReport> {
    if config.gate != Gate::Extended {
        return Err(Error::Config(
            "counterexample_hunt needs gate = extended".into(),
        ));
    }
    run(config)
}

/// [`counterexample_hunt`] on one given set.
pub fn hunt_set(
    set: &ResidueSet,
    c: crate::rational::Rational,
    m_max: Option<u64>,
) -> Result<SearchReport> {
    let config = SearchConfig {
        gate: Gate::Extended,
        c,
        m_max,
        suites: vec![ClaimId::T2Census],
        ..Default::default()
    };
    let unit = WorkUnit {
        task: format!("p={}/A={}", set.p(), elements_key(set)),
        p: set.modulus(),
        source: Source::Listed(set.clone()),
    };
    run_units(&config, Box::new(std::iter::once(unit)))
}

/// Progressions are extremal: for `A = {0, d, ..., (n-1)d}` with
/// `m < n < p/2`, exactly `2m` nonzero shifts have `Δ_A(b) <= m`.
pub fn extremal_census(p: PrimeModulus, d: u64, n: u64, m: u64) -> Result<BoundVerdict> {
    let d = d % p.get();
    if d == 0 {
        return Err(Error::HypothesisViolated(
            "difference must be nonzero".into(),
        ));
    }
    if n <= m {
        return Err(Error::HypothesisViolated(format!(
            "need m < n, got m = {m}, n = {n}"
        )));
    }
    if !p.exceeds_twice(n as usize) {
        return Err(Error::HypothesisViolated(format!(
            "need n < p/2, got n = {n}, p = {p}"
        )));
    }
    let set = ResidueSet::collect_residues(p, (0..n).map(|j| p.mul(j, d)));
    let report = census(&set, m);
    let (count, bound) = (report.count as i128, 2 * m as i128);
    Ok(BoundVerdict::new(
        ClaimId::T2Census,
        true,
        int(count),
        int(bound),
        count == bound,
    )
    .with_witnesses(report.witnesses.iter().map(|&b| b as i64))
    .with_note("progression: equality expected"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn pm(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn sampling_is_reproducible() {
        let p = pm(1009);
        let seeds = unit_seeds(42, p, 5);
        assert_eq!(seeds, unit_seeds(42, p, 5));
        assert_ne!(seeds, unit_seeds(43, p, 5));
        assert_ne!(seeds, unit_seeds(42, pm(1013), 5));
        let s = sample_set(p, seeds[0], 100);
        assert_eq!(s.len(), 100);
        assert_eq!(s, sample_set(p, seeds[0], 100));
    }

    #[test]
    fn extremal_examples() {
        assert_eq!(
            extremal_census(pm(11), 1, 4, 2).unwrap().pass,
            Outcome::Pass
        );
        let v = extremal_census(pm(23), 5, 7, 3).unwrap();
        assert_eq!((v.lhs, v.pass), (int(6), Outcome::Pass));
        assert!(matches!(
            extremal_census(pm(11), 1, 4, 4),
            Err(Error::HypothesisViolated(_))
        ));
        assert!(matches!(
            extremal_census(pm(11), 1, 6, 2),
            Err(Error::HypothesisViolated(_))
        ));
        assert!(matches!(
            extremal_census(pm(11), 11, 4, 2),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn hunt_on_an_interval() {
        let p = pm(101);
        let a = ResidueSet::reduced(p, 0..41);
        let r = hunt_set(&a, frac(1, 2), Some(5)).unwrap();
        assert_eq!(r.records.len(), 5);
        assert_eq!(r.summary.theorem_failures, 0);
        assert!(r.exploratory.is_empty());
        assert!(r.records.iter().all(|x| x.pass == Outcome::Pass));
    }

    #[test]
    fn empty_prime_list_gives_empty_report() {
        let cfg = SearchConfig {
            gate: Gate::Extended,
            ..Default::default()
        };
        let r = counterexample_hunt(&cfg).unwrap();
        assert_eq!(r.summary.units, 0);
        assert!(r.records.is_empty());
        assert!(counterexample_hunt(&SearchConfig::default()).is_err());
    }

    #[test]
    fn torn_lines_are_ignored() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x");
        fs::write(&path, "a\nb\npartial").unwrap();
        assert_eq!(complete_lines(&path).unwrap(), ["a", "b"]);
        assert!(complete_lines(&dir.path().join("missing"))
            .unwrap()
            .is_empty());
        assert_eq!(done_path(&path), dir.path().join("x.done"));
    }
}
