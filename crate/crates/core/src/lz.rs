//! LZ78 self-index: the phrase trie, the trie of reversed phrases, and the
//! phrase-id mappings between them.
//!
//! An occurrence of `P` either lies inside one phrase (case 1), spans two
//! consecutive phrases (case 2), or covers at least one whole phrase with
//! fragments of its neighbours on both sides (case 3). The three sets are
//! disjoint, so locate is their union.
//!
//! Both tries are stored in preorder: node 0 is the root, children are
//! sorted by symbol, and a subtree is the preorder range `[v, end[v]]`.

use std::collections::HashMap;

use crate::bits::{bit_width, BitBuf, IntVector};
use crate::error::{Error, Result};
use crate::index::{IndexKind, IndexParams, LoadContext, SelfIndex, SpaceReport, WalkStats};
use crate::persist::{ByteReader, ByteWriter, Persist};
use crate::text::{Alphabet, MappedText};
use crate::Sym;

/// LZ78 phrases; index 0 is the empty phrase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lz78Parse {
    pub parent: Vec<u32>,
    pub sym: Vec<Sym>,
    /// 1-based text position of each phrase (0 for the empty phrase).
    pub start: Vec<usize>,
    pub len: Vec<usize>,
}

impl Lz78Parse {
    /// Number of phrases, the empty one excluded.
    pub fn phrases(&self) -> usize {
        self.parent.len() - 1
    }

    /// Symbols of phrase `id`.
    pub fn phrase(&self, id: usize) -> Vec<Sym> {
        let mut out = Vec::with_capacity(self.len[id]);
        let mut v = id;
        while v != 0 {
            out.push(self.sym[v]);
            v = self.parent[v] as usize;
        }
        out.reverse();
        out
    }

    fn from_table(parent: Vec<u32>, sym: Vec<Sym>) -> Result<Self> {
        let n = parent.len();
        if n == 0 || sym.len() != n {
            return Err(Error::Integrity("empty LZ78 phrase table".into()));
        }
        let mut start = vec![0usize; n];
        let mut len = vec![0usize; n];
        let mut pos = 1;
        for id in 1..n {
            let p = parent[id] as usize;
            if p >= id {
                return Err(Error::Integrity("LZ78 phrase refers forward".into()));
            }
            len[id] = len[p] + 1;
            start[id] = pos;
            pos += len[id];
        }
        Ok(Self {
            parent,
            sym,
            start,
            len,
        })
    }
}

/// Greedy LZ78 parse. If the input ends inside a known phrase, the last
/// phrase repeats it.
pub fn lz78_parse(s: &[Sym]) -> Lz78Parse {
    let mut child: HashMap<(u32, Sym), u32> = HashMap::new();
    let mut parent = vec![0u32];
    let mut sym = vec![0 as Sym];
    let mut node = 0u32;
    for (i, &c) in s.iter().enumerate() {
        match child.get(&(node, c)) {
            Some(&next) if i + 1 < s.len() => node = next,
            Some(&next) => {
                // input exhausted on an existing phrase
                parent.push(parent[next as usize]);
                sym.push(c);
            }
            None => {
                let id = parent.len() as u32;
                child.insert((node, c), id);
                parent.push(node);
                sym.push(c);
                node = 0;
            }
        }
    }
    Lz78Parse::from_table(parent, sym).expect("parse table is well formed")
}

/// A trie in preorder with sorted child arrays.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Trie {
    end: Vec<u32>,
    first_child: Vec<u32>,
    child_sym: Vec<Sym>,
    child_node: Vec<u32>,
    /// Phrase id stored at each node; 0 for none (and for the root).
    id: Vec<u32>,
}

impl Trie {
    /// Builds from strings; string `k` is labelled with id `k + 1`.
    fn from_strings<'a>(strings: impl Iterator<Item = &'a [Sym]>) -> Self {
        // insertion tree: children unsorted until the preorder pass
        let mut kids: Vec<Vec<(Sym, u32)>> = vec![Vec::new()];
        let mut ids: Vec<u32> = vec![0];
        for (k, s) in strings.enumerate() {
            let mut v = 0usize;
            for &c in s {
                v = match kids[v].iter().find(|e| e.0 == c) {
                    Some(&(_, w)) => w as usize,
                    None => {
                        let w = kids.len();
                        kids.push(Vec::new());
                        ids.push(0);
                        kids[v].push((c, w as u32));
                        w
                    }
                };
            }
            ids[v] = k as u32 + 1;
        }
        let n = kids.len();
        let mut pre = vec![0u32; n];
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![0usize];
        while let Some(v) = stack.pop() {
            pre[v] = order.len() as u32;
            order.push(v);
            kids[v].sort_unstable();
            stack.extend(kids[v].iter().rev().map(|&(_, w)| w as usize));
        }
        let mut t = Trie {
            end: vec![0; n],
            first_child: Vec::with_capacity(n + 1),
            child_sym: Vec::with_capacity(n.saturating_sub(1)),
            child_node: Vec::with_capacity(n.saturating_sub(1)),
            id: order.iter().map(|&v| ids[v]).collect(),
        };
        for &v in &order {
            t.first_child.push(t.child_sym.len() as u32);
            for &(c, w) in &kids[v] {
                t.child_sym.push(c);
                t.child_node.push(pre[w as usize]);
            }
        }
        t.first_child.push(t.child_sym.len() as u32);
        t.fill_ends();
        t
    }

    fn fill_ends(&mut self) {
        let n = self.id.len();
        for v in (0..n).rev() {
            let (a, b) = (self.first_child[v] as usize, self.first_child[v + 1] as usize);
            self.end[v] = if a == b { v as u32 } else { self.end[self.child_node[b - 1] as usize] };
        }
    }

    pub fn nodes(&self) -> usize {
        self.id.len()
    }

    #[inline]
    pub fn child(&self, v: u32, c: Sym) -> Option<u32> {
        let (a, b) = (self.first_child[v as usize] as usize, self.first_child[v as usize + 1] as usize);
        let k = self.child_sym[a..b].binary_search(&c).ok()?;
        Some(self.child_node[a + k])
    }

    #[inline]
    pub fn end(&self, v: u32) -> u32 {
        self.end[v as usize]
    }

    #[inline]
    pub fn id(&self, v: u32) -> u32 {
        self.id[v as usize]
    }

    #[inline]
    fn contains(&self, v: u32, w: u32) -> bool {
        v <= w && w <= self.end[v as usize]
    }

    /// Nodes reached by reading `syms` from the root, one per symbol, until
    /// the path leaves the trie.
    fn path(&self, syms: impl Iterator<Item = Sym>) -> Vec<u32> {
        let mut out = Vec::new();
        let mut v = 0;
        for c in syms {
            match self.child(v, c) {
                Some(w) => {
                    out.push(w);
                    v = w;
                }
                None => break,
            }
        }
        out
    }

    fn size_bits(&self, sym_bits: u32, id_bits: u32) -> usize {
        // preorder parentheses, one label and one id per node
        self.nodes() * (2 + sym_bits as usize + id_bits as usize)
    }
}

impl Persist for Trie {
    /// Preorder serialization: `1` opens a node, `0` closes it; then the
    /// edge labels and ids in preorder.
    fn write_to(&self, w: &mut ByteWriter) {
        let n = self.nodes();
        let mut parens = BitBuf::with_capacity(2 * n);
        let mut labels = vec![0u64; n];
        let mut stack: Vec<(u32, bool)> = vec![(0, false)];
        while let Some((v, closing)) = stack.pop() {
            if closing {
                parens.push(false);
                continue;
            }
            parens.push(true);
            stack.push((v, true));
            let (a, b) = (self.first_child[v as usize] as usize, self.first_child[v as usize + 1] as usize);
            for k in (a..b).rev() {
                labels[self.child_node[k] as usize] = self.child_sym[k] as u64;
                stack.push((self.child_node[k], false));
            }
        }
        parens.write_to(w);
        let max_sym = labels.iter().copied().max().unwrap_or(0);
        IntVector::from_slice(&labels, max_sym).write_to(w);
        let ids: Vec<u64> = self.id.iter().map(|&x| x as u64).collect();
        IntVector::from_slice(&ids, ids.iter().copied().max().unwrap_or(0)).write_to(w);
    }

    fn read_from(r: &mut ByteReader<'_>) -> Result<Self> {
        let parens = BitBuf::read_from(r)?;
        let labels = IntVector::read_from(r)?;
        let ids = IntVector::read_from(r)?;
        let n = labels.len();
        let bad = || Error::Integrity("malformed trie serialization".into());
        if parens.len() != 2 * n || ids.len() != n || n == 0 {
            return Err(bad());
        }
        let mut kids: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut stack: Vec<u32> = Vec::new();
        let mut next = 0u32;
        for k in 0..parens.len() {
            if parens.get(k) {
                if next as usize >= n || (stack.is_empty() && next != 0) {
                    return Err(bad());
                }
                if let Some(&p) = stack.last() {
                    kids[p as usize].push(next);
                }
                stack.push(next);
                next += 1;
            } else if stack.pop().is_none() {
                return Err(bad());
            }
        }
        if !stack.is_empty() || next as usize != n {
            return Err(bad());
        }
        let mut t = Trie {
            end: vec![0; n],
            first_child: Vec::with_capacity(n + 1),
            child_sym: Vec::with_capacity(n - 1),
            child_node: Vec::with_capacity(n - 1),
            id: ids.iter().map(|x| x as u32).collect(),
        };
        for ks in &kids {
            t.first_child.push(t.child_sym.len() as u32);
            for &w in ks {
                let c = labels.get(w as usize);
                if c > Sym::MAX as u64 || t.child_sym[t.first_child.last().copied().unwrap() as usize..].last().is_some_and(|&p| p as u64 >= c) {
                    return Err(bad());
                }
                t.child_sym.push(c as Sym);
                t.child_node.push(w);
            }
        }
        t.first_child.push(t.child_sym.len() as u32);
        t.fill_ends();
        Ok(t)
    }
}

#[derive(Debug, Clone)]
pub struct LzIndex {
    alphabet: Alphabet,
    eps: f64,
    parse: Lz78Parse,
    fwd: Trie,
    rev: Trie,
    /// Phrase id to forward-trie preorder node.
    fwd_node: Vec<u32>,
    /// Phrase id to reverse-trie preorder node.
    rev_node: Vec<u32>,
}

/// Which search case produced an occurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    Within,
    Two,
    Many,
}

impl LzIndex {
    pub fn build(text: &MappedText, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::Param(format!("lz eps must be in (0, 1], got {eps}")));
        }
        let parse = lz78_parse(text.codes());
        Self::from_parse(text.alphabet().clone(), eps, parse)
    }

    fn from_parse(alphabet: Alphabet, eps: f64, parse: Lz78Parse) -> Result<Self> {
        let (fwd, rev) = Self::tries(&parse);
        let (fwd_node, rev_node) = (inverse_ids(&fwd, parse.phrases())?, inverse_ids(&rev, parse.phrases())?);
        Ok(Self {
            alphabet,
            eps,
            parse,
            fwd,
            rev,
            fwd_node,
            rev_node,
        })
    }

    fn tries(parse: &Lz78Parse) -> (Trie, Trie) {
        let phrases: Vec<Vec<Sym>> = (1..=parse.phrases()).map(|id| parse.phrase(id)).collect();
        let fwd = Trie::from_strings(phrases.iter().map(|p| p.as_slice()));
        let reversed: Vec<Vec<Sym>> = phrases
            .into_iter()
            .map(|mut p| {
                p.reverse();
                p
            })
            .collect();
        let rev = Trie::from_strings(reversed.iter().map(|p| p.as_slice()));
        (fwd, rev)
    }

    pub fn parse(&self) -> &Lz78Parse {
        &self.parse
    }

    pub fn forward_trie(&self) -> &Trie {
        &self.fwd
    }

    pub fn reverse_trie(&self) -> &Trie {
        &self.rev
    }

    pub fn fwd_node_of(&self, id: usize) -> u32 {
        self.fwd_node[id]
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    fn text_rows(&self) -> usize {
        let last = self.parse.phrases();
        self.parse.start[last] + self.parse.len[last] - 1
    }

    /// Occurrences of `p`, tagged with the case that found each, in
    /// emission order (not deduplicated).
    pub fn search(&self, p: &[Sym]) -> Vec<(usize, Case)> {
        let m = p.len();
        let mut out = Vec::new();
        if m == 0 {
            return out;
        }
        let np = self.parse.phrases();
        // fwd_path[s][d - 1]: node for P[s..s + d]
        let fwd_path: Vec<Vec<u32>> = (0..m).map(|s| self.fwd.path(p[s..].iter().copied())).collect();
        // rev_path[e][d - 1]: node for reversed P[e + 1 - d..=e]
        let rev_path: Vec<Vec<u32>> = (0..m)
            .map(|e| self.rev.path(p[..=e].iter().rev().copied()))
            .collect();
        let start = &self.parse.start;
        let len = &self.parse.len;

        // case 1: phrases ending with P, and every phrase extending them
        if let Some(&u) = rev_path[m - 1].get(m - 1) {
            for v in u..=self.rev.end(u) {
                let i = self.rev.id(v) as usize;
                if i == 0 {
                    continue;
                }
                let f = self.fwd_node[i];
                for w in f..=self.fwd.end(f) {
                    let d = self.fwd.id(w) as usize;
                    out.push((start[d] + len[i] - m, Case::Within));
                }
            }
        }

        // case 2: P[..j] ends phrase i, P[j..] starts phrase i + 1
        for j in 1..m {
            let (Some(&u), Some(&w)) = (rev_path[j - 1].get(j - 1), fwd_path[j].get(m - j - 1)) else {
                continue;
            };
            let rev_size = self.rev.end(u) - u;
            let fwd_size = self.fwd.end(w) - w;
            if rev_size <= fwd_size {
                for v in u..=self.rev.end(u) {
                    let i = self.rev.id(v) as usize;
                    if i != 0 && i < np && self.fwd.contains(w, self.fwd_node[i + 1]) {
                        out.push((start[i] + len[i] - j, Case::Two));
                    }
                }
            } else {
                for x in w..=self.fwd.end(w) {
                    let k = self.fwd.id(x) as usize;
                    if k >= 2 && self.rev.contains(u, self.rev_node[k - 1]) {
                        out.push((start[k] - j, Case::Two));
                    }
                }
            }
        }

        // case 3: phrase i = P[a..a + d] is the first whole phrase inside
        for a in 1..m.saturating_sub(1) {
            let Some(&u) = rev_path[a - 1].get(a - 1) else {
                continue;
            };
            for (d0, &v) in fwd_path[a].iter().enumerate() {
                let d = d0 + 1;
                if a + d >= m {
                    break;
                }
                let i = self.fwd.id(v) as usize;
                if i < 2 || !self.rev.contains(u, self.rev_node[i - 1]) {
                    continue;
                }
                let (mut pos, mut k) = (a + d, i + 1);
                loop {
                    if k > np {
                        break;
                    }
                    let rem = m - pos;
                    let l = len[k];
                    if l < rem {
                        match fwd_path[pos].get(l - 1) {
                            Some(&x) if self.fwd.id(x) as usize == k => {
                                pos += l;
                                k += 1;
                            }
                            _ => break,
                        }
                    } else {
                        if let Some(&x) = fwd_path[pos].get(rem - 1) {
                            if self.fwd.contains(x, self.fwd_node[k]) {
                                out.push((start[i - 1] + len[i - 1] - a, Case::Many));
                            }
                        }
                        break;
                    }
                }
            }
        }
        out
    }

    /// `T[l..=r]` by walking phrase paths upwards.
    pub fn extract_range(&self, l: usize, r: usize) -> Vec<Sym> {
        let start = &self.parse.start;
        let first = start[1..].partition_point(|&s| s <= l);
        let mut out = Vec::with_capacity(r - l + 1);
        let mut id = first;
        while id <= self.parse.phrases() && start[id] <= r {
            let ph = self.parse.phrase(id);
            let lo = l.max(start[id]) - start[id];
            let hi = r.min(start[id] + ph.len() - 1) - start[id];
            out.extend_from_slice(&ph[lo..=hi]);
            id += 1;
        }
        out
    }

    pub(crate) fn read_payload(ctx: LoadContext, r: &mut ByteReader<'_>) -> Result<Self> {
        let parent: Vec<u32> = IntVector::read_from(r)?.iter().map(|x| x as u32).collect();
        let sym: Vec<Sym> = IntVector::read_from(r)?.iter().map(|x| x as Sym).collect();
        let fwd = Trie::read_from(r)?;
        let rev = Trie::read_from(r)?;
        let fwd_node: Vec<u32> = IntVector::read_from(r)?.iter().map(|x| x as u32).collect();
        let rev_node: Vec<u32> = IntVector::read_from(r)?.iter().map(|x| x as u32).collect();
        let parse = Lz78Parse::from_table(parent, sym)?;
        let ix = Self::from_parse(ctx.alphabet, ctx.params.eps, parse)?;
        if ix.fwd != fwd || ix.rev != rev || ix.fwd_node != fwd_node || ix.rev_node != rev_node {
            return Err(Error::Integrity("LZ tries disagree with the phrase table".into()));
        }
        if ix.text_rows() != ctx.text_len + 1
            || ix.parse.sym.iter().any(|&c| c as usize >= ix.alphabet.sigma())
        {
            return Err(Error::Integrity("LZ phrases disagree with header".into()));
        }
        Ok(ix)
    }
}

/// `out[id]` = preorder node holding phrase `id`; every id must appear once.
fn inverse_ids(t: &Trie, phrases: usize) -> Result<Vec<u32>> {
    let mut out = vec![u32::MAX; phrases + 1];
    out[0] = 0;
    for v in 1..t.nodes() as u32 {
        let id = t.id(v) as usize;
        if id == 0 {
            continue;
        }
        if id > phrases || out[id] != u32::MAX {
            return Err(Error::Integrity("phrase ids in trie are not a permutation".into()));
        }
        out[id] = v;
    }
    if out.contains(&u32::MAX) {
        return Err(Error::Integrity("phrase missing from trie".into()));
    }
    Ok(out)
}

impl SelfIndex for LzIndex {
    fn kind(&self) -> IndexKind {
        IndexKind::Lz
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn text_len(&self) -> usize {
        self.text_rows() - 1
    }

    fn params(&self) -> IndexParams {
        IndexParams {
            eps: self.eps,
            ..IndexParams::default()
        }
    }

    fn count_codes(&self, p: &[Sym]) -> usize {
        self.locate_codes(p).0.len()
    }

    fn locate_codes(&self, p: &[Sym]) -> (Vec<usize>, WalkStats) {
        let mut out: Vec<usize> = self.search(p).into_iter().map(|(pos, _)| pos).collect();
        out.sort_unstable();
        let emitted = out.len();
        out.dedup();
        let stats = WalkStats {
            occurrences: out.len(),
            duplicates: emitted - out.len(),
            ..WalkStats::default()
        };
        (out, stats)
    }

    fn extract_codes(&self, l: usize, r: usize) -> Vec<Sym> {
        self.extract_range(l, r)
    }

    fn space(&self) -> SpaceReport {
        let np = self.parse.phrases();
        let id_bits = bit_width(np as u64);
        let sym_bits = bit_width(self.alphabet.sigma() as u64 - 1);
        let tries = self.fwd.size_bits(sym_bits, id_bits) + self.rev.size_bits(sym_bits, id_bits);
        let fwd_map = (np + 1) * bit_width(self.fwd.nodes() as u64) as usize;
        let rev_map = (np + 1) * bit_width(self.rev.nodes() as u64) as usize;
        SpaceReport::new(tries, 0, fwd_map + rev_map)
    }

    fn write_payload(&self, w: &mut ByteWriter) {
        let np = self.parse.phrases();
        let parent: Vec<u64> = self.parse.parent.iter().map(|&x| x as u64).collect();
        IntVector::from_slice(&parent, np as u64).write_to(w);
        let sym: Vec<u64> = self.parse.sym.iter().map(|&x| x as u64).collect();
        IntVector::from_slice(&sym, self.alphabet.sigma() as u64).write_to(w);
        self.fwd.write_to(w);
        self.rev.write_to(w);
        let f: Vec<u64> = self.fwd_node.iter().map(|&x| x as u64).collect();
        IntVector::from_slice(&f, self.fwd.nodes() as u64).write_to(w);
        let r: Vec<u64> = self.rev_node.iter().map(|&x| x as u64).collect();
        IntVector::from_slice(&r, self.rev.nodes() as u64).write_to(w);
    }
}
