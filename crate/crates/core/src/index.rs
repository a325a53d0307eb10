//! The common self-index contract and the on-disk index format.
//!
//! File layout (all integers little-endian):
//!
//! ```text
//! "PCIX" | version: u32 | kind: u8 | text_len: u64 | sigma: u32
//!        | alphabet: (sigma - 1) bytes | params_len: u32 | params
//!        | payload | checksum: u64 (CRC-64/XZ of every preceding byte)
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crc::{Crc, CRC_64_XZ};

use crate::af::AfIndex;
use crate::csa::CsaIndex;
use crate::error::{Error, Result};
use crate::fmi2::Fmi2Index;
use crate::lz::LzIndex;
use crate::persist::{ByteReader, ByteWriter};
use crate::plain::PlainSa;
use crate::ssa::SsaIndex;
use crate::text::{Alphabet, MappedText};
use crate::Sym;

pub const MAGIC: &[u8; 4] = b"PCIX";
pub const FORMAT_VERSION: u32 = 1;
const CHECKSUM: Crc<u64> = Crc::<u64>::new(&CRC_64_XZ);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IndexKind {
    PlainSa,
    Ssa,
    Af,
    Fmi2,
    Csa,
    Lz,
}

impl IndexKind {
    pub const ALL: [IndexKind; 6] = [
        IndexKind::PlainSa,
        IndexKind::Ssa,
        IndexKind::Af,
        IndexKind::Fmi2,
        IndexKind::Csa,
        IndexKind::Lz,
    ];

    pub fn tag(self) -> u8 {
        match self {
            IndexKind::PlainSa => 0,
            IndexKind::Ssa => 1,
            IndexKind::Af => 2,
            IndexKind::Fmi2 => 3,
            IndexKind::Csa => 4,
            IndexKind::Lz => 5,
        }
    }

    pub fn from_tag(t: u8) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.tag() == t)
            .ok_or_else(|| Error::Integrity(format!("unknown index kind tag {t}")))
    }

    pub fn name(self) -> &'static str {
        match self {
            IndexKind::PlainSa => "plain_sa",
            IndexKind::Ssa => "ssa",
            IndexKind::Af => "af",
            IndexKind::Fmi2 => "fmi2",
            IndexKind::Csa => "csa",
            IndexKind::Lz => "lz",
        }
    }
}

impl fmt::Display for IndexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IndexKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s || (s == "plain" && *k == IndexKind::PlainSa))
            .ok_or_else(|| Error::Param(format!("unknown index kind '{s}'")))
    }
}

/// Construction parameters. Each index reads the fields it uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexParams {
    /// Suffix-array / text sampling period.
    pub s_a: usize,
    /// ψ absolute-sample period (CSA).
    pub s_psi: usize,
    /// Largest context order tried by the AF partition search.
    pub k_max: usize,
    /// AF blocks shorter than this merge into their successor.
    pub min_block: usize,
    /// FMI-2 bucket length in symbols.
    pub lb: usize,
    /// FMI-2 buckets per superbucket.
    pub lsb: usize,
    /// LZ-index permutation knob; recorded only (explicit mappings are ε = 1).
    pub eps: f64,
}

impl Default for IndexParams {
    fn default() -> Self {
        Self {
            s_a: 64,
            s_psi: 128,
            k_max: 4,
            min_block: 16,
            lb: 1024,
            lsb: 32,
            eps: 1.0,
        }
    }
}

impl IndexParams {
    /// Parses `key=value` pairs separated by commas, over the defaults.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut p = Self::default();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            p.set(item)?;
        }
        Ok(p)
    }

    pub fn set(&mut self, item: &str) -> Result<()> {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Error::Param(format!("expected key=value, got '{item}'")))?;
        let bad = || Error::Param(format!("bad value for {key}: '{value}'"));
        let int = || value.trim().parse::<usize>().map_err(|_| bad());
        match key.trim() {
            "s_a" | "sa" => self.s_a = int()?,
            "s_psi" | "psi" => self.s_psi = int()?,
            "k_max" | "k" => self.k_max = int()?,
            "min_block" => self.min_block = int()?,
            "lb" => self.lb = int()?,
            "lsb" => self.lsb = int()?,
            "eps" => self.eps = value.trim().parse().map_err(|_| bad())?,
            other => return Err(Error::Param(format!("unknown parameter '{other}'"))),
        }
        Ok(())
    }

    fn write_to(&self, w: &mut ByteWriter) {
        for v in [self.s_a, self.s_psi, self.k_max, self.min_block, self.lb, self.lsb] {
            w.put_u64(v as u64);
        }
        w.put_f64(self.eps);
    }

    fn read_from(r: &mut ByteReader<'_>) -> Result<Self> {
        Ok(Self {
            s_a: r.usize()?,
            s_psi: r.usize()?,
            k_max: r.usize()?,
            min_block: r.usize()?,
            lb: r.usize()?,
            lsb: r.usize()?,
            eps: r.f64()?,
        })
    }
}

/// Index size in bits, split by role.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SpaceReport {
    /// Bits representing the text itself (BWT, ψ, tries, ...).
    pub payload_bits: usize,
    /// Bits spent on locate/extract sampling.
    pub sampling_bits: usize,
    pub total_bits: usize,
}

impl SpaceReport {
    pub fn new(payload_bits: usize, sampling_bits: usize, other_bits: usize) -> Self {
        Self {
            payload_bits,
            sampling_bits,
            total_bits: payload_bits + sampling_bits + other_bits,
        }
    }

    /// Index size as a fraction of an 8-bit-per-symbol text of length `n`.
    pub fn fraction_of(&self, n: usize) -> f64 {
        self.total_bits as f64 / (8.0 * n.max(1) as f64)
    }
}

/// Step counters from one locate call: LF-steps, ψ-steps, or FMI-2 phases.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WalkStats {
    pub occurrences: usize,
    pub max_steps: usize,
    pub total_steps: usize,
    /// Positions emitted more than once before deduplication.
    pub duplicates: usize,
}

impl WalkStats {
    pub fn record(&mut self, steps: usize) {
        self.occurrences += 1;
        self.max_steps = self.max_steps.max(steps);
        self.total_steps += steps;
    }

    pub fn merge(&mut self, other: &WalkStats) {
        self.occurrences += other.occurrences;
        self.max_steps = self.max_steps.max(other.max_steps);
        self.total_steps += other.total_steps;
        self.duplicates += other.duplicates;
    }

    pub fn mean_steps(&self) -> f64 {
        if self.occurrences == 0 {
            0.0
        } else {
            self.total_steps as f64 / self.occurrences as f64
        }
    }
}

/// count / locate / extract over an indexed text.
///
/// Byte-level methods map the pattern through the index alphabet; a byte
/// that never occurs in the text yields zero occurrences. The empty pattern
/// is not a valid query and reports nothing.
pub trait SelfIndex: Send + Sync {
    fn kind(&self) -> IndexKind;

    fn alphabet(&self) -> &Alphabet;

    /// Length of the indexed text, terminator excluded.
    fn text_len(&self) -> usize;

    fn params(&self) -> IndexParams;

    fn count_codes(&self, p: &[Sym]) -> usize;

    /// Ascending 1-based positions, with walk statistics.
    fn locate_codes(&self, p: &[Sym]) -> (Vec<usize>, WalkStats);

    /// `T[l..=r]`; callers guarantee `1 <= l <= r <= text_len()`.
    fn extract_codes(&self, l: usize, r: usize) -> Vec<Sym>;

    fn space(&self) -> SpaceReport;

    fn write_payload(&self, w: &mut ByteWriter);

    fn count(&self, p: &[u8]) -> usize {
        match self.alphabet().map_pattern(p) {
            Some(codes) if !codes.is_empty() => self.count_codes(&codes),
            _ => 0,
        }
    }

    fn locate(&self, p: &[u8]) -> Vec<usize> {
        self.locate_traced(p).0
    }

    fn locate_traced(&self, p: &[u8]) -> (Vec<usize>, WalkStats) {
        match self.alphabet().map_pattern(p) {
            Some(codes) if !codes.is_empty() => self.locate_codes(&codes),
            _ => (Vec::new(), WalkStats::default()),
        }
    }

    /// `T[l..=r]`, 1-based; `r` is clamped to the text length.
    fn extract(&self, l: usize, r: usize) -> Result<Vec<u8>> {
        let n = self.text_len();
        let r = r.min(n);
        if l < 1 || l > r {
            return Err(Error::Range {
                what: "extract start",
                value: l,
                lo: 1,
                hi: r,
            });
        }
        Ok(self.alphabet().unmap(&self.extract_codes(l, r)))
    }
}

/// Any index kind, built or loaded at runtime.
#[derive(Debug)]
pub enum AnyIndex {
    PlainSa(PlainSa),
    Ssa(SsaIndex),
    Af(AfIndex),
    Fmi2(Fmi2Index),
    Csa(CsaIndex),
    Lz(LzIndex),
}

impl AnyIndex {
    pub fn build(kind: IndexKind, raw: &[u8], params: &IndexParams) -> Result<Self> {
        let text = MappedText::new(raw)?;
        Self::build_mapped(kind, &text, params)
    }

    pub fn build_mapped(kind: IndexKind, text: &MappedText, params: &IndexParams) -> Result<Self> {
        Ok(match kind {
            IndexKind::PlainSa => AnyIndex::PlainSa(PlainSa::build(text)),
            IndexKind::Ssa => AnyIndex::Ssa(SsaIndex::build(text, params.s_a)?),
            IndexKind::Af => AnyIndex::Af(AfIndex::build(text, params)?),
            IndexKind::Fmi2 => AnyIndex::Fmi2(Fmi2Index::build(text, params)?),
            IndexKind::Csa => AnyIndex::Csa(CsaIndex::build(text, params.s_a, params.s_psi)?),
            IndexKind::Lz => AnyIndex::Lz(LzIndex::build(text, params.eps)?),
        })
    }

    pub fn as_dyn(&self) -> &(dyn SelfIndex + 'static) {
        match self {
            AnyIndex::PlainSa(x) => x,
            AnyIndex::Ssa(x) => x,
            AnyIndex::Af(x) => x,
            AnyIndex::Fmi2(x) => x,
            AnyIndex::Csa(x) => x,
            AnyIndex::Lz(x) => x,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let ix = self.as_dyn();
        let mut w = ByteWriter::new();
        w.put_raw(MAGIC);
        w.put_u32(FORMAT_VERSION);
        w.put_u8(ix.kind().tag());
        w.put_u64(ix.text_len() as u64);
        w.put_u32(ix.alphabet().sigma() as u32);
        w.put_raw(ix.alphabet().bytes());
        let mut pw = ByteWriter::new();
        ix.params().write_to(&mut pw);
        self.write_extra_params(&mut pw);
        w.put_u32(pw.len() as u32);
        w.put_raw(pw.as_slice());
        ix.write_payload(&mut w);
        let sum = CHECKSUM.checksum(w.as_slice());
        w.put_u64(sum);
        w.into_inner()
    }

    /// Kind-specific header fields appended to the parameter block.
    fn write_extra_params(&self, w: &mut ByteWriter) {
        match self {
            AnyIndex::Fmi2(x) => w.put_u16(x.special_code()),
            AnyIndex::Csa(_) => w.put_u8(crate::csa::DELTA_CODE_VERSION),
            _ => {}
        }
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < MAGIC.len() + 8 {
            return Err(Error::Integrity("file too short".into()));
        }
        let (body, tail) = bytes.split_at(bytes.len() - 8);
        let stored = u64::from_le_bytes(tail.try_into().unwrap());
        if &body[..4] != MAGIC {
            return Err(Error::Integrity("bad magic".into()));
        }
        if CHECKSUM.checksum(body) != stored {
            return Err(Error::Integrity("checksum mismatch".into()));
        }
        let mut r = ByteReader::new(&body[4..]);
        let version = r.u32()?;
        if version != FORMAT_VERSION {
            return Err(Error::Integrity(format!("unsupported format version {version}")));
        }
        let kind = IndexKind::from_tag(r.u8()?)?;
        let text_len = r.usize()?;
        let sigma = r.u32()? as usize;
        if sigma == 0 || sigma > 256 {
            return Err(Error::Integrity(format!("alphabet size {sigma}")));
        }
        let alphabet = Alphabet::from_bytes(r.raw(sigma - 1)?.to_vec())?;
        let plen = r.u32()? as usize;
        let mut pr = ByteReader::new(r.raw(plen)?);
        let params = IndexParams::read_from(&mut pr)?;
        let ctx = LoadContext {
            alphabet,
            text_len,
            params,
        };
        let ix = match kind {
            IndexKind::PlainSa => AnyIndex::PlainSa(PlainSa::read_payload(ctx, &mut r)?),
            IndexKind::Ssa => AnyIndex::Ssa(SsaIndex::read_payload(ctx, &mut r)?),
            IndexKind::Af => AnyIndex::Af(AfIndex::read_payload(ctx, &mut r)?),
            IndexKind::Fmi2 => {
                let special = pr.u16()?;
                let ix = Fmi2Index::read_payload(ctx, &mut r)?;
                if ix.special_code() != special {
                    return Err(Error::Integrity("fmi2 special symbol mismatch".into()));
                }
                AnyIndex::Fmi2(ix)
            }
            IndexKind::Csa => {
                let v = pr.u8()?;
                if v != crate::csa::DELTA_CODE_VERSION {
                    return Err(Error::Integrity(format!("unknown psi code version {v}")));
                }
                AnyIndex::Csa(CsaIndex::read_payload(ctx, &mut r)?)
            }
            IndexKind::Lz => AnyIndex::Lz(LzIndex::read_payload(ctx, &mut r)?),
        };
        pr.expect_end()?;
        r.expect_end()?;
        Ok(ix)
    }

    /// Loads and checks that the file holds the expected kind.
    pub fn from_bytes_expect(bytes: &[u8], expected: IndexKind) -> Result<Self> {
        if bytes.len() > 8 && &bytes[..4] == MAGIC {
            if let Ok(found) = IndexKind::from_tag(bytes[8]) {
                if found != expected {
                    return Err(Error::KindMismatch { expected, found });
                }
            }
        }
        let ix = Self::from_bytes(bytes)?;
        let found = ix.as_dyn().kind();
        if found != expected {
            return Err(Error::KindMismatch { expected, found });
        }
        Ok(ix)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }

    pub fn load_expect(path: impl AsRef<Path>, expected: IndexKind) -> Result<Self> {
        Self::from_bytes_expect(&std::fs::read(path)?, expected)
    }
}

/// Header fields handed to each index's payload reader.
#[derive(Debug, Clone)]
pub struct LoadContext {
    pub alphabet: Alphabet,
    pub text_len: usize,
    pub params: IndexParams,
}

impl std::ops::Deref for AnyIndex {
    type Target = dyn SelfIndex;

    fn deref(&self) -> &Self::Target {
        self.as_dyn()
    }
}
