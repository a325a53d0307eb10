//! Timing and space benchmark with optional cross-validation against the
//! plain suffix array.
//!
//! Configuration is a plain `key = value` file (`#` starts a comment):
//!
//! ```text
//! text = corpus/dna.50MB        # or synth:markov:5000000:16 / synth:uniform:N:SIGMA
//! kinds = ssa, csa, af, fmi2, lz
//! params = s_a=64, s_psi=128
//! count_m = 20
//! count_patterns = 2000
//! locate_m = 5
//! locate_patterns = 200
//! extract_len = 512
//! extract_count = 200
//! reps = 5
//! threads = 2
//! seed = 7
//! validate = true
//! csv = report.csv
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alloc;
use crate::error::{Error, Result};
use crate::index::{AnyIndex, IndexKind, IndexParams, SelfIndex};
use crate::patterns::{default_seed, random_patterns, sample_patterns};
use crate::plain::PlainSa;
use crate::synth;
use crate::text::MappedText;

#[derive(Debug, Clone, PartialEq)]
pub enum TextSource {
    File(PathBuf),
    Synthetic { generator: String, n: usize, sigma: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub text: TextSource,
    pub kinds: Vec<IndexKind>,
    pub params: IndexParams,
    pub count_m: usize,
    pub count_patterns: usize,
    pub locate_m: usize,
    pub locate_patterns: usize,
    pub extract_len: usize,
    pub extract_count: usize,
    pub reps: usize,
    pub threads: usize,
    pub seed: u64,
    pub validate: bool,
    /// Prebuilt index file to benchmark instead of building (one kind).
    pub index: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            text: TextSource::Synthetic {
                generator: "markov".into(),
                n: 1 << 20,
                sigma: 16,
            },
            kinds: vec![IndexKind::Ssa, IndexKind::Af, IndexKind::Fmi2, IndexKind::Csa, IndexKind::Lz],
            params: IndexParams::default(),
            count_m: 20,
            count_patterns: 1000,
            locate_m: 5,
            locate_patterns: 100,
            extract_len: 512,
            extract_count: 100,
            reps: 5,
            threads: 1,
            seed: default_seed(),
            validate: false,
            index: None,
            csv: None,
        }
    }
}

impl BenchConfig {
    pub fn parse(src: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, line) in src.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Param(format!("line {}: expected key = value", lineno + 1)))?;
            cfg.set(key.trim(), value.trim())?;
        }
        if cfg.reps < 5 {
            return Err(Error::Param("reps must be at least 5".into()));
        }
        if cfg.threads == 0 {
            return Err(Error::Param("threads must be at least 1".into()));
        }
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let int = || {
            value
                .parse::<usize>()
                .map_err(|_| Error::Param(format!("bad integer for {key}: '{value}'")))
        };
        match key {
            "text" => self.text = parse_source(value)?,
            "kinds" => {
                self.kinds = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::parse)
                    .collect::<Result<_>>()?
            }
            "params" => self.params = IndexParams::parse(value)?,
            "count_m" => self.count_m = int()?,
            "count_patterns" => self.count_patterns = int()?,
            "locate_m" => self.locate_m = int()?,
            "locate_patterns" => self.locate_patterns = int()?,
            "extract_len" => self.extract_len = int()?,
            "extract_count" => self.extract_count = int()?,
            "reps" => self.reps = int()?,
            "threads" => self.threads = int()?,
            "seed" => self.seed = int()? as u64,
            "validate" => {
                self.validate = match value {
                    "true" | "yes" | "1" => true,
                    "false" | "no" | "0" => false,
                    _ => return Err(Error::Param(format!("bad boolean '{value}'"))),
                }
            }
            "index" => self.index = Some(PathBuf::from(value)),
            "csv" => self.csv = Some(PathBuf::from(value)),
            other => return Err(Error::Param(format!("unknown bench key '{other}'"))),
        }
        Ok(())
    }
}

fn parse_source(value: &str) -> Result<TextSource> {
    match value.strip_prefix("synth:") {
        None => Ok(TextSource::File(PathBuf::from(value))),
        Some(rest) => {
            let parts: Vec<&str> = rest.split(':').collect();
            let bad = || Error::Param(format!("expected synth:<generator>:<n>:<sigma>, got '{value}'"));
            if parts.len() != 3 {
                return Err(bad());
            }
            Ok(TextSource::Synthetic {
                generator: parts[0].to_string(),
                n: parts[1].parse().map_err(|_| bad())?,
                sigma: parts[2].parse().map_err(|_| bad())?,
            })
        }
    }
}

pub fn load_text(src: &TextSource, seed: u64) -> Result<(String, Vec<u8>)> {
    match src {
        TextSource::File(p) => Ok((p.display().to_string(), std::fs::read(p)?)),
        TextSource::Synthetic { generator, n, sigma } => Ok((
            format!("{generator}-{n}-s{sigma}"),
            synth::generate(generator, *n, *sigma, seed)?,
        )),
    }
}

/// One benchmarked (index, text) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub index: IndexKind,
    pub text: String,
    pub text_len: usize,
    pub build_seconds: f64,
    pub peak_build_bytes: usize,
    pub space_fraction: f64,
    pub count_microsec_per_symbol: f64,
    pub locate_microsec_per_occurrence: f64,
    pub extract_microsec_per_char: f64,
    pub pattern_count: usize,
    pub occ_total: usize,
    pub max_locate_steps: usize,
    pub mean_locate_steps: f64,
    /// Answers that differed from the plain suffix array (validation only).
    pub mismatches: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    /// Aligned text table, one line per row.
    pub fn table(&self) -> String {
        let head = [
            "index", "text", "n", "build_s", "peak_MB", "space", "count_us/sym", "locate_us/occ",
            "extract_us/ch", "patterns", "occ", "max_steps", "mismatch",
        ];
        let body: Vec<[String; 13]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.index.to_string(),
                    r.text.clone(),
                    r.text_len.to_string(),
                    format!("{:.3}", r.build_seconds),
                    format!("{:.1}", r.peak_build_bytes as f64 / (1 << 20) as f64),
                    format!("{:.3}", r.space_fraction),
                    format!("{:.4}", r.count_microsec_per_symbol),
                    format!("{:.4}", r.locate_microsec_per_occurrence),
                    format!("{:.4}", r.extract_microsec_per_char),
                    r.pattern_count.to_string(),
                    r.occ_total.to_string(),
                    r.max_locate_steps.to_string(),
                    r.mismatches.to_string(),
                ]
            })
            .collect();
        let mut width: Vec<usize> = head.iter().map(|h| h.len()).collect();
        for row in &body {
            for (w, cell) in width.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        let line = |cells: &mut dyn Iterator<Item = &str>, out: &mut String| {
            let parts: Vec<String> = cells.zip(&width).map(|(c, w)| format!("{c:>w$}")).collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        line(&mut head.iter().copied(), &mut out);
        for row in &body {
            line(&mut row.iter().map(String::as_str), &mut out);
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        w.write_record([
            "index",
            "text",
            "text_len",
            "build_seconds",
            "peak_build_bytes",
            "space_fraction",
            "count_microsec_per_symbol",
            "locate_microsec_per_occurrence",
            "extract_microsec_per_char",
            "pattern_count",
            "occ_total",
            "max_locate_steps",
            "mean_locate_steps",
            "mismatches",
        ])
        .map_err(csv_err)?;
        for r in &self.rows {
            w.write_record([
                r.index.to_string(),
                r.text.clone(),
                r.text_len.to_string(),
                r.build_seconds.to_string(),
                r.peak_build_bytes.to_string(),
                r.space_fraction.to_string(),
                r.count_microsec_per_symbol.to_string(),
                r.locate_microsec_per_occurrence.to_string(),
                r.extract_microsec_per_char.to_string(),
                r.pattern_count.to_string(),
                r.occ_total.to_string(),
                r.max_locate_steps.to_string(),
                r.mean_locate_steps.to_string(),
                r.mismatches.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

/// Median of `reps` timings of `f`.
pub fn median_time(reps: usize, mut f: impl FnMut()) -> Duration {
    let mut times: Vec<Duration> = (0..reps.max(1))
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed()
        })
        .collect();
    times.sort_unstable();
    times[times.len() / 2]
}

/// Applies `f` to every item, spread over `threads` scoped workers.
pub fn parallel_map<T: Sync, R: Send>(items: &[T], threads: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    if threads <= 1 || items.len() < 2 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| s.spawn(|| part.iter().map(&f).collect::<Vec<R>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("bench worker panicked")).collect()
    })
}

pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    let (name, raw) = load_text(&cfg.text, cfg.seed)?;
    let text = MappedText::new(&raw)?;
    let oracle = cfg.validate.then(|| PlainSa::build(&text));
    let n = raw.len();

    let count_pats = patterns_for(&raw, cfg.count_m, cfg.count_patterns, cfg.seed)?;
    let locate_pats = patterns_for(&raw, cfg.locate_m, cfg.locate_patterns, cfg.seed ^ 0x10ca7e)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xe7);
    let spans: Vec<(usize, usize)> = if n == 0 {
        Vec::new()
    } else {
        let len = cfg.extract_len.clamp(1, n);
        (0..cfg.extract_count)
            .map(|_| {
                let l = rng.gen_range(1..=n - len + 1);
                (l, l + len - 1)
            })
            .collect()
    };

    let mut report = BenchReport::default();
    let prebuilt = match &cfg.index {
        Some(path) => {
            let ix = AnyIndex::load(path)?;
            check_matches_text(&ix, &raw)?;
            Some(ix)
        }
        None => None,
    };
    let kinds: Vec<IndexKind> = match &prebuilt {
        Some(ix) => vec![ix.kind()],
        None => cfg.kinds.clone(),
    };

    let mut prebuilt = prebuilt;
    for kind in kinds {
        let (ix, build_seconds, peak) = match prebuilt.take() {
            Some(ix) => (ix, 0.0, 0),
            None => {
                let t = Instant::now();
                let (ix, peak) = alloc::measure_peak(|| AnyIndex::build_mapped(kind, &text, &cfg.params));
                (ix?, t.elapsed().as_secs_f64(), peak)
            }
        };
        let ix: &dyn SelfIndex = ix.as_dyn();

        let mut occ_total = 0;
        let count_time = median_time(cfg.reps, || {
            occ_total = parallel_map(&count_pats, cfg.threads, |p| ix.count(p)).iter().sum();
        });
        let mut located = Vec::new();
        let locate_time = median_time(cfg.reps, || {
            located = parallel_map(&locate_pats, cfg.threads, |p| ix.locate_traced(p));
        });
        let mut extracted = Vec::new();
        let extract_time = median_time(cfg.reps, || {
            extracted = parallel_map(&spans, cfg.threads, |&(l, r)| ix.extract(l, r));
        });

        let mut mismatches = 0;
        if let Some(o) = &oracle {
            for p in &count_pats {
                mismatches += usize::from(ix.count(p) != o.count(p));
            }
            for (p, (got, _)) in locate_pats.iter().zip(&located) {
                mismatches += usize::from(*got != o.locate(p));
            }
            for (&(l, r), got) in spans.iter().zip(&extracted) {
                mismatches += usize::from(got.as_ref().ok().map(Vec::as_slice) != Some(&raw[l - 1..r]));
            }
        }
        let occ_located: usize = located.iter().map(|(v, _)| v.len()).sum();
        let (max_steps, total_steps) = located
            .iter()
            .fold((0, 0), |(m, t), (_, s)| (m.max(s.max_steps), t + s.total_steps));
        let per = |d: Duration, k: usize| d.as_secs_f64() * 1e6 / k.max(1) as f64;
        report.rows.push(BenchRow {
            index: kind,
            text: name.clone(),
            text_len: n,
            build_seconds,
            peak_build_bytes: peak,
            space_fraction: ix.space().fraction_of(n),
            count_microsec_per_symbol: per(count_time, count_pats.len() * cfg.count_m),
            locate_microsec_per_occurrence: per(locate_time, occ_located),
            extract_microsec_per_char: per(extract_time, spans.iter().map(|(l, r)| r - l + 1).sum()),
            pattern_count: count_pats.len(),
            occ_total,
            max_locate_steps: max_steps,
            mean_locate_steps: total_steps as f64 / occ_located.max(1) as f64,
            mismatches,
        });
    }
    if let Some(path) = &cfg.csv {
        report.write_csv(path)?;
    }
    Ok(report)
}

fn patterns_for(raw: &[u8], m: usize, count: usize, seed: u64) -> Result<Vec<Vec<u8>>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if m > raw.len() {
        let mut sym = raw.to_vec();
        sym.sort_unstable();
        sym.dedup();
        if sym.is_empty() {
            return Ok(Vec::new());
        }
        return Ok(random_patterns(&sym, m, count, seed));
    }
    sample_patterns(raw, m, count, seed)
}

/// Fails unless the index reproduces `raw` exactly.
pub fn check_matches_text(ix: &AnyIndex, raw: &[u8]) -> Result<()> {
    let same = ix.text_len() == raw.len() && (raw.is_empty() || ix.extract(1, raw.len())? == raw);
    if same {
        Ok(())
    } else {
        Err(Error::Integrity("index does not match the benchmark text".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> BenchConfig {
        BenchConfig::parse(
            "text = synth:markov:20000:8\nkinds = plain_sa, ssa, af, fmi2, csa, lz\n\
             params = s_a=16\ncount_m = 8\ncount_patterns = 50\nlocate_m = 4\n\
             locate_patterns = 20\nextract_len = 64\nextract_count = 20\nreps = 5\n\
             threads = 3\nseed = 42\nvalidate = true\n",
        )
        .unwrap()
    }

    #[test]
    fn config_parsing() {
        let c = small_config();
        assert_eq!(c.kinds.len(), 6);
        assert_eq!(c.params.s_a, 16);
        assert!(c.validate);
        assert!(BenchConfig::parse("reps = 2").is_err());
        assert!(BenchConfig::parse("nope = 1").is_err());
        assert!(BenchConfig::parse("text = synth:markov:10").is_err());
    }

    #[test]
    fn validated_run_is_deterministic() {
        let c = small_config();
        let a = run_bench(&c).unwrap();
        let b = run_bench(&c).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert_eq!(x.mismatches, 0, "{}", x.index);
            assert_eq!(x.occ_total, y.occ_total);
            assert!(x.space_fraction > 0.0);
            if matches!(x.index, IndexKind::Ssa | IndexKind::Csa) {
                assert!(x.max_locate_steps <= 16);
            }
        }
        let table = a.table();
        assert_eq!(table.lines().count(), 7);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        a.write_csv(&path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 7);
    }

    #[test]
    fn prebuilt_index_must_match_text() {
        let raw = synth::markov2(3000, 4, 1).unwrap();
        let ix = AnyIndex::build(IndexKind::Ssa, &raw, &IndexParams::default()).unwrap();
        check_matches_text(&ix, &raw).unwrap();
        let mut other = raw.clone();
        other[10] = if other[10] == b'a' { b'b' } else { b'a' };
        assert!(check_matches_text(&ix, &other).is_err());
    }
}
