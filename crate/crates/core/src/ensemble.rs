//! Disorder averaging: evaluates a per-realization computation over stream
//! indices `0..n` on a worker pool and merges streaming moments.
//!
//! Streams are grouped into fixed chunks, each reduced sequentially, and
//! chunk results are merged in index order, so the output depends only on
//! the task, the seed and `n`, never on the number of workers.

use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{draw_disorder, DisorderRealization, ModelSpec};

/// Count, mean, spread and range of one observable (Welford, merged with
/// Chan's pairwise update).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunningStats {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
    pub min: f64,
    pub max: f64,
}

impl Default for RunningStats {
    fn default() -> Self {
        RunningStats {
            count: 0,
            mean: 0.0,
            m2: 0.0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }
}

impl RunningStats {
    pub fn from_slice(values: &[f64]) -> Self {
        let mut s = Self::default();
        values.iter().for_each(|&v| s.push(v));
        s
    }

    pub fn push(&mut self, value: f64) {
        self.count += 1;
        let delta = value - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (value - self.mean);
        self.min = self.min.min(value);
        self.max = self.max.max(value);
    }

    pub fn merge(&mut self, other: &RunningStats) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        self.mean = (na * self.mean + nb * other.mean) / n;
        self.m2 += other.m2 + delta * delta * na * nb / n;
        self.count += other.count;
        self.min = self.min.min(other.min);
        self.max = self.max.max(other.max);
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Standard error of the mean, `s / sqrt(n)`.
    pub fn sem(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            self.std_dev() / (self.count as f64).sqrt()
        }
    }

    /// Mean, or NaN when nothing was recorded.
    pub fn mean_or_nan(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            self.mean
        }
    }
}

/// A named per-realization computation returning one value per observable.
pub trait RealizationTask: Sync {
    fn observables(&self) -> Vec<String>;
    fn evaluate(&self, realization: &DisorderRealization) -> Result<Vec<f64>>;
}

/// Adapts a closure into a [`RealizationTask`].
pub struct FnTask<F> {
    names: Vec<String>,
    f: F,
}

impl<F> FnTask<F>
where
    F: Fn(&DisorderRealization) -> Result<Vec<f64>> + Sync,
{
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>, f: F) -> Self {
        FnTask {
            names: names.into_iter().map(Into::into).collect(),
            f,
        }
    }
}

impl<F> RealizationTask for FnTask<F>
where
    F: Fn(&DisorderRealization) -> Result<Vec<f64>> + Sync,
{
    fn observables(&self) -> Vec<String> {
        self.names.clone()
    }

    fn evaluate(&self, realization: &DisorderRealization) -> Result<Vec<f64>> {
        (self.f)(realization)
    }
}

#[derive(Clone, Debug)]
pub struct EnsembleConfig {
    pub realizations: u64,
    pub workers: usize,
    /// Streams per chunk; fixes the reduction tree.
    pub chunk_size: u64,
    pub progress: bool,
    pub label: String,
    pub checkpoint: Option<PathBuf>,
    pub max_failure_fraction: f64,
}

impl EnsembleConfig {
    pub fn new(realizations: u64) -> Self {
        EnsembleConfig {
            realizations,
            workers: 1,
            chunk_size: realizations.div_ceil(256).max(1),
            progress: false,
            label: String::new(),
            checkpoint: None,
            max_failure_fraction: 0.01,
        }
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn chunk_size(mut self, chunk: u64) -> Self {
        self.chunk_size = chunk.max(1);
        self
    }

    pub fn progress(mut self, label: impl Into<String>) -> Self {
        self.progress = true;
        self.label = label.into();
        self
    }

    pub fn checkpoint(mut self, path: impl Into<PathBuf>) -> Self {
        self.checkpoint = Some(path.into());
        self
    }
}

/// Merged statistics of one chunk, or of a whole run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Partial {
    pub stats: Vec<RunningStats>,
    pub evaluated: u64,
    pub failures: BTreeMap<String, u64>,
    /// First failing realization per failure kind.
    pub examples: BTreeMap<String, String>,
}

impl Partial {
    fn new(width: usize) -> Self {
        Partial {
            stats: vec![RunningStats::default(); width],
            ..Default::default()
        }
    }

    fn merge(&mut self, other: &Partial) {
        for (a, b) in self.stats.iter_mut().zip(&other.stats) {
            a.merge(b);
        }
        self.evaluated += other.evaluated;
        for (k, v) in &other.failures {
            *self.failures.entry(k.clone()).or_default() += v;
        }
        for (k, v) in &other.examples {
            self.examples.entry(k.clone()).or_insert_with(|| v.clone());
        }
    }

    fn failed(&self) -> u64 {
        self.failures.values().sum()
    }
}

/// Disorder-averaged observables of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub spec: ModelSpec,
    pub observables: Vec<String>,
    pub stats: Vec<RunningStats>,
    pub requested: u64,
    pub completed: u64,
    pub failures: BTreeMap<String, u64>,
}

impl EnsembleStats {
    pub fn get(&self, name: &str) -> Option<&RunningStats> {
        self.observables
            .iter()
            .position(|n| n == name)
            .map(|k| &self.stats[k])
    }

    pub fn mean(&self, name: &str) -> f64 {
        self.get(name).map_or(f64::NAN, RunningStats::mean_or_nan)
    }

    pub fn sem(&self, name: &str) -> f64 {
        self.get(name).map_or(f64::NAN, RunningStats::sem)
    }

    pub fn failed(&self) -> u64 {
        self.failures.values().sum()
    }
}

#[derive(Serialize, Deserialize)]
struct CheckpointLine {
    key: String,
    chunk: u64,
    partial: Partial,
}

fn checkpoint_key(spec: &ModelSpec, names: &[String], cfg: &EnsembleConfig) -> String {
    format!(
        "{}|{}|{}|{}",
        serde_json::to_string(spec).unwrap_or_default(),
        names.join(","),
        cfg.realizations,
        cfg.chunk_size
    )
}

fn load_checkpoint(path: &PathBuf, key: &str) -> Result<HashMap<u64, Partial>> {
    let mut done = HashMap::new();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(done),
        Err(e) => return Err(Error::Checkpoint(format!("{}: {e}", path.display()))),
    };
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::Checkpoint(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<CheckpointLine>(&line) {
            Ok(entry) if entry.key == key => {
                done.insert(entry.chunk, entry.partial);
            }
            Ok(_) => {}
            // A torn final line from an interrupted run is dropped.
            Err(e) => log::warn!("{}:{}: skipping checkpoint line: {e}", path.display(), lineno + 1),
        }
    }
    Ok(done)
}

struct Progress {
    enabled: bool,
    label: String,
    total: u64,
    done: AtomicU64,
    last_print_ms: AtomicU64,
    start: Instant,
}

impl Progress {
    fn advance(&self, by: u64) {
        let done = self.done.fetch_add(by, Ordering::Relaxed) + by;
        if !self.enabled {
            return;
        }
        let elapsed = self.start.elapsed();
        let ms = elapsed.as_millis() as u64;
        let last = self.last_print_ms.load(Ordering::Relaxed);
        if done < self.total && ms < last + 1000 {
            return;
        }
        if self
            .last_print_ms
            .compare_exchange(last, ms, Ordering::Relaxed, Ordering::Relaxed)
            .is_err()
        {
            return;
        }
        let rate = done as f64 / elapsed.as_secs_f64().max(1e-9);
        let eta = (self.total - done) as f64 / rate.max(1e-9);
        eprintln!(
            "[{}] {done}/{} realizations, {rate:.1}/s, eta {eta:.0}s",
            self.label, self.total
        );
    }
}

/// Runs `task` over streams `0..cfg.realizations` of `spec`.
///
/// Failed realizations are tallied by error kind and excluded; non-finite
/// observable values count as missing for that observable only. More than
/// `max_failure_fraction` failures is an error.
pub fn run_ensemble<T: RealizationTask + ?Sized>(
    spec: &ModelSpec,
    task: &T,
    cfg: &EnsembleConfig,
) -> Result<EnsembleStats> {
    spec.validate()?;
    let names = task.observables();
    let width = names.len();
    let n = cfg.realizations;
    let chunk = cfg.chunk_size.max(1);
    let chunks = n.div_ceil(chunk);

    let key = checkpoint_key(spec, &names, cfg);
    let mut restored = match &cfg.checkpoint {
        Some(path) => load_checkpoint(path, &key)?,
        None => HashMap::new(),
    };
    let writer = match &cfg.checkpoint {
        Some(path) => Some(Mutex::new(
            OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|e| Error::Checkpoint(format!("{}: {e}", path.display())))?,
        )),
        None => None,
    };
    let pending: Vec<u64> = (0..chunks).filter(|c| !restored.contains_key(c)).collect();
    let progress = Progress {
        enabled: cfg.progress,
        label: cfg.label.clone(),
        total: n,
        done: AtomicU64::new(n - pending.iter().map(|&c| chunk_len(c, chunk, n)).sum::<u64>()),
        last_print_ms: AtomicU64::new(0),
        start: Instant::now(),
    };
    let write_errors = AtomicUsize::new(0);

    let run_chunk = |c: u64| -> Partial {
        let mut part = Partial::new(width);
        let start = c * chunk;
        for stream in start..(start + chunk).min(n) {
            let real = draw_disorder(spec, stream);
            part.evaluated += 1;
            match task.evaluate(&real) {
                Ok(values) if values.len() == width => {
                    for (s, v) in part.stats.iter_mut().zip(values) {
                        if v.is_finite() {
                            s.push(v);
                        }
                    }
                }
                Ok(values) => {
                    let e = Error::DimensionMismatch(format!("task returned {} of {width} values", values.len()));
                    record_failure(&mut part, &e, &real);
                }
                Err(e) => record_failure(&mut part, &e, &real),
            }
        }
        if let Some(w) = &writer {
            let line = CheckpointLine {
                key: key.clone(),
                chunk: c,
                partial: part.clone(),
            };
            let ok = serde_json::to_string(&line)
                .ok()
                .and_then(|s| {
                    let mut f = w.lock().ok()?;
                    writeln!(f, "{s}").and_then(|_| f.flush()).ok()
                })
                .is_some();
            if !ok {
                write_errors.fetch_add(1, Ordering::Relaxed);
            }
        }
        progress.advance(chunk_len(c, chunk, n));
        part
    };

    let computed: Vec<(u64, Partial)> = if cfg.workers <= 1 {
        pending.iter().map(|&c| (c, run_chunk(c))).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::InvalidSpec(format!("worker pool: {e}")))?;
        pool.install(|| pending.par_iter().map(|&c| (c, run_chunk(c))).collect())
    };
    if write_errors.load(Ordering::Relaxed) > 0 {
        return Err(Error::Checkpoint("failed to append checkpoint lines".into()));
    }
    restored.extend(computed);

    let mut total = Partial::new(width);
    for c in 0..chunks {
        let part = restored
            .get(&c)
            .ok_or_else(|| Error::Checkpoint(format!("chunk {c} missing")))?;
        if part.stats.len() != width {
            return Err(Error::Checkpoint(format!("chunk {c} has the wrong width")));
        }
        total.merge(part);
    }

    let failed = total.failed();
    if failed as f64 > cfg.max_failure_fraction * n as f64 {
        let breakdown = total
            .failures
            .iter()
            .map(|(k, v)| {
                let first = total.examples.get(k).map(String::as_str).unwrap_or("");
                format!("{k}: {v} (first: {first})")
            })
            .collect::<Vec<_>>()
            .join(", ");
        return Err(Error::TooManyFailures {
            failed: failed as usize,
            total: n as usize,
            breakdown,
        });
    }
    if failed > 0 {
        log::warn!("{failed} of {n} realizations failed and were excluded: {:?}", total.failures);
    }
    Ok(EnsembleStats {
        spec: spec.clone(),
        observables: names,
        stats: total.stats,
        requested: n,
        completed: total.evaluated - failed,
        failures: total.failures,
    })
}

fn chunk_len(c: u64, chunk: u64, n: u64) -> u64 {
    (n - c * chunk).min(chunk)
}

fn record_failure(part: &mut Partial, e: &Error, real: &DisorderRealization) {
    let kind = e.kind().to_string();
    *part.failures.entry(kind.clone()).or_default() += 1;
    part.examples.entry(kind).or_insert_with(|| format!("{}: {e}", real.id));
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sum_task() -> FnTask<impl Fn(&DisorderRealization) -> Result<Vec<f64>> + Sync> {
        FnTask::new(["bond_sum", "eta0"], |r: &DisorderRealization| {
            Ok(vec![r.bonds.iter().sum(), r.eta[0]])
        })
    }

    #[test]
    fn clean_ensemble_has_zero_error() {
        let spec = ModelSpec::ising(6, 1.0).with_seed(9);
        let stats = run_ensemble(&spec, &sum_task(), &EnsembleConfig::new(10)).unwrap();
        let s = stats.get("bond_sum").unwrap();
        assert_eq!(s.count, 10);
        assert_eq!(s.mean, 5.0);
        assert_eq!(s.sem(), 0.0);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let spec = ModelSpec::ising(8, 1.0).with_disorder(0.3).with_seed(5);
        let one = run_ensemble(&spec, &sum_task(), &EnsembleConfig::new(1000).chunk_size(37)).unwrap();
        let many = run_ensemble(&spec, &sum_task(), &EnsembleConfig::new(1000).chunk_size(37).workers(4)).unwrap();
        assert_eq!(one, many);
        for (a, b) in one.stats.iter().zip(&many.stats) {
            assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        }
    }

    #[test]
    fn failures_are_counted_and_capped() {
        let spec = ModelSpec::ising(4, 1.0).with_disorder(0.1);
        let flaky = FnTask::new(["x"], |r: &DisorderRealization| {
            if r.id.stream % 50 == 3 {
                Err(Error::ZeroModeOverlap("test".into()))
            } else {
                Ok(vec![1.0])
            }
        });
        let err = run_ensemble(&spec, &flaky, &EnsembleConfig::new(100)).unwrap_err();
        assert!(matches!(err, Error::TooManyFailures { failed: 2, total: 100, .. }));
        let mut cfg = EnsembleConfig::new(100);
        cfg.max_failure_fraction = 0.05;
        let ok = run_ensemble(&spec, &flaky, &cfg).unwrap();
        assert_eq!(ok.completed, 98);
        assert_eq!(ok.failures["zero-mode overlap"], 2);
    }

    #[test]
    fn non_finite_values_are_missing() {
        let spec = ModelSpec::ising(4, 1.0).with_disorder(0.1);
        let task = FnTask::new(["a", "b"], |r: &DisorderRealization| {
            Ok(vec![1.0, if r.id.stream % 2 == 0 { f64::NAN } else { 2.0 }])
        });
        let stats = run_ensemble(&spec, &task, &EnsembleConfig::new(10)).unwrap();
        assert_eq!(stats.get("a").unwrap().count, 10);
        assert_eq!(stats.get("b").unwrap().count, 5);
        assert_eq!(stats.mean("b"), 2.0);
    }

    #[test]
    fn checkpoint_resumes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.jsonl");
        let spec = ModelSpec::ising(5, 1.0).with_disorder(0.2).with_seed(2);
        let full = run_ensemble(&spec, &sum_task(), &EnsembleConfig::new(200).chunk_size(16)).unwrap();
        let first = run_ensemble(
            &spec,
            &sum_task(),
            &EnsembleConfig::new(200).chunk_size(16).checkpoint(&path),
        )
        .unwrap();
        assert_eq!(first, full);
        // Keep only a few chunks, then resume with a task that would fail
        // on any recomputed chunk outside them.
        let text = std::fs::read_to_string(&path).unwrap();
        let kept: Vec<&str> = text.lines().take(5).collect();
        std::fs::write(&path, kept.join("\n") + "\n").unwrap();
        let resumed = run_ensemble(
            &spec,
            &sum_task(),
            &EnsembleConfig::new(200).chunk_size(16).checkpoint(&path),
        )
        .unwrap();
        assert_eq!(resumed, full);
        let all_cached = FnTask::new(["bond_sum", "eta0"], |_: &DisorderRealization| {
            Err(Error::NonFinite("should not run".into()))
        });
        let cached = run_ensemble(
            &spec,
            &all_cached,
            &EnsembleConfig::new(200).chunk_size(16).checkpoint(&path),
        )
        .unwrap();
        assert_eq!(cached, full);
    }

    proptest! {
        #[test]
        fn merge_matches_direct(values in prop::collection::vec(-1e3f64..1e3, 1..200), split in 0usize..200) {
            let split = split.min(values.len());
            let direct = RunningStats::from_slice(&values);
            let mut left = RunningStats::from_slice(&values[..split]);
            let right = RunningStats::from_slice(&values[split..]);
            left.merge(&right);
            prop_assert_eq!(left.count, direct.count);
            prop_assert!((left.mean - direct.mean).abs() <= 1e-12 * (1.0 + direct.mean.abs()));
            prop_assert!((left.variance() - direct.variance()).abs() <= 1e-9 * (1.0 + direct.variance()));
            prop_assert_eq!(left.min, direct.min);
            prop_assert_eq!(left.max, direct.max);
        }

        #[test]
        fn merge_is_associative(a in prop::collection::vec(-10f64..10.0, 0..50),
                                b in prop::collection::vec(-10f64..10.0, 0..50),
                                c in prop::collection::vec(-10f64..10.0, 0..50)) {
            let (sa, sb, sc) = (RunningStats::from_slice(&a), RunningStats::from_slice(&b), RunningStats::from_slice(&c));
            let mut left = sa;
            left.merge(&sb);
            left.merge(&sc);
            let mut bc = sb;
            bc.merge(&sc);
            let mut right = sa;
            right.merge(&bc);
            prop_assert_eq!(left.count, right.count);
            prop_assert!((left.mean - right.mean).abs() <= 1e-12 * (1.0 + left.mean.abs()));
        }
    }
}
