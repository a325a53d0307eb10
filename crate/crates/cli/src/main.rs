use std::io::{self, Write};
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use selfidx::bench::{run_bench, BenchConfig};
use selfidx::entropy;
use selfidx::patterns::{default_seed, random_patterns, sample_patterns};
use selfidx::{alloc, synth, AnyIndex, IndexKind, IndexParams, MappedText};

#[global_allocator]
static ALLOC: alloc::CountingAlloc = alloc::CountingAlloc;

#[derive(Parser)]
#[command(name = "selfidx", version, about = "Compressed self-index workbench")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build an index over a text file and write it to <out>.
    Build {
        #[arg(short = 'i', long = "index")]
        kind: IndexKind,
        /// Comma-separated key=value parameters (s_a, s_psi, k_max, min_block, lb, lsb, eps).
        #[arg(short = 'p', long = "params", default_value = "")]
        params: String,
        text: PathBuf,
        out: PathBuf,
    },
    /// Query a saved index.
    Query {
        #[command(subcommand)]
        q: Query,
    },
    /// Entropy statistics of a text file.
    Stats {
        text: PathBuf,
        #[arg(short = 'k', default_value_t = 4)]
        kmax: usize,
    },
    /// Run a benchmark described by a key=value config file.
    Bench { config: PathBuf },
    /// Cross-check every index kind against a plain scan on random texts.
    Selftest {
        #[arg(short = 'n', default_value_t = 50)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Subcommand)]
enum Query {
    /// Number of occurrences of each pattern, one per line.
    Count { index: PathBuf, patterns: Vec<String> },
    /// Occurrence positions, one per line, ascending.
    Locate { index: PathBuf, pattern: String },
    /// Text substring T[l..=r], 1-based.
    Extract { index: PathBuf, l: usize, r: usize },
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Build { kind, params, text, out } => build(kind, &params, &text, &out),
        Cmd::Query { q } => query(q),
        Cmd::Stats { text, kmax } => stats(&text, kmax),
        Cmd::Bench { config } => {
            let cfg = BenchConfig::from_file(&config)?;
            let report = run_bench(&cfg)?;
            print!("{}", report.table());
            Ok(())
        }
        Cmd::Selftest { trials, seed } => selftest(trials, seed.unwrap_or_else(default_seed)),
    }
}

fn build(kind: IndexKind, params: &str, text: &PathBuf, out: &PathBuf) -> Result<()> {
    let params = IndexParams::parse(params)?;
    let raw = std::fs::read(text).with_context(|| format!("reading {}", text.display()))?;
    alloc::reset_peak();
    let base = alloc::current_bytes();
    let t0 = Instant::now();
    let ix = AnyIndex::build(kind, &raw, &params)?;
    let secs = t0.elapsed().as_secs_f64();
    let peak = alloc::peak_bytes().saturating_sub(base);
    ix.save(out)?;
    let space = ix.space();
    eprintln!(
        "{kind}: n={} build={secs:.3}s peak={:.1}MiB size={} bits ({:.3} of text)",
        raw.len(),
        peak as f64 / (1 << 20) as f64,
        space.total_bits,
        space.fraction_of(raw.len())
    );
    Ok(())
}

fn query(q: Query) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match q {
        Query::Count { index, patterns } => {
            let ix = AnyIndex::load(&index)?;
            for p in patterns {
                writeln!(out, "{}", ix.count(p.as_bytes()))?;
            }
        }
        Query::Locate { index, pattern } => {
            let ix = AnyIndex::load(&index)?;
            for pos in ix.locate(pattern.as_bytes()) {
                writeln!(out, "{pos}")?;
            }
        }
        Query::Extract { index, l, r } => {
            let ix = AnyIndex::load(&index)?;
            out.write_all(&ix.extract(l, r)?)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn stats(text: &PathBuf, kmax: usize) -> Result<()> {
    let raw = std::fs::read(text).with_context(|| format!("reading {}", text.display()))?;
    let t = MappedText::new(&raw)?;
    let rep = entropy::analyze(&t, kmax);
    println!("size\t{}", rep.n);
    println!("sigma\t{}", rep.sigma);
    println!("inv_match_prob\t{:.3}", rep.inv_match_prob);
    println!("k\tH_k\tcontexts");
    for o in &rep.orders {
        println!("{}\t{:.3}\t{}", o.k, o.h, o.contexts);
    }
    Ok(())
}

fn naive(text: &[u8], p: &[u8]) -> Vec<usize> {
    if p.is_empty() || p.len() > text.len() {
        return Vec::new();
    }
    text.windows(p.len())
        .enumerate()
        .filter(|(_, w)| *w == p)
        .map(|(i, _)| i + 1)
        .collect()
}

fn selftest(trials: usize, seed: u64) -> Result<()> {
    let params = IndexParams {
        s_a: 8,
        s_psi: 16,
        k_max: 2,
        min_block: 4,
        lb: 64,
        lsb: 8,
        eps: 1.0,
    };
    let mut failures = 0usize;
    for trial in 0..trials {
        let s = seed.wrapping_add(trial as u64);
        let sigma = [2, 4, 16, 96][trial % 4];
        let gen = if trial % 2 == 0 { "uniform" } else { "markov" };
        let n = 50 + (s as usize * 7919) % 1500;
        let text = synth::generate(gen, n, sigma, s)?;
        let mut pats = Vec::new();
        for m in [1, 2, 3, 5, 8] {
            pats.extend(sample_patterns(&text, m, 3, s)?);
            pats.extend(random_patterns(&synth::alphabet(sigma)?, m, 2, s ^ 0x9e37));
        }
        for kind in IndexKind::ALL {
            let ix = AnyIndex::build(kind, &text, &params)?;
            let ix = AnyIndex::from_bytes(&ix.to_bytes())?;
            for p in &pats {
                let want = naive(&text, p);
                if ix.count(p) != want.len() || ix.locate(p) != want {
                    failures += 1;
                    eprintln!("trial {trial} {kind}: mismatch on {:?}", String::from_utf8_lossy(p));
                }
            }
            let l = 1 + (s as usize) % n;
            let r = (l + 40).min(n);
            if ix.extract(l, r)? != text[l - 1..r] {
                failures += 1;
                eprintln!("trial {trial} {kind}: extract [{l},{r}] mismatch");
            }
        }
    }
    if failures > 0 {
        bail!("selftest: {failures} mismatches over {trials} trials");
    }
    println!("selftest: {trials} trials ok (seed {seed})");
    Ok(())
}
