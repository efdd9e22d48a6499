//! Finite relational structures on the universe `1..=n`.
//!
//! Relations are dense bitsets indexed by the mixed-radix code of a tuple.
//! Symmetric irreflexive symbols store only their strictly increasing tuple
//! and answer queries for every permutation of it.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::ControlFlow;
use std::sync::Arc;

use crate::error::{Result, ZolError};

/// Largest arity accepted by [`Vocabulary::new`].
pub const MAX_ARITY: usize = 8;

/// Canonical forms are computed by permutation search and refuse above this size.
pub const CANONICAL_MAX_N: usize = 9;

/// Default cap on the number of relation slots for plain enumeration (2^slots structures).
pub const DEFAULT_ENUMERATION_BITS: usize = 26;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
    pub symmetric_irreflexive: bool,
    pub colour_predicate: bool,
}

impl Symbol {
    pub fn new(name: &str, arity: usize) -> Self {
        Symbol {
            name: name.to_string(),
            arity,
            symmetric_irreflexive: false,
            colour_predicate: false,
        }
    }

    pub fn symirr(name: &str, arity: usize) -> Self {
        Symbol {
            symmetric_irreflexive: true,
            ..Symbol::new(name, arity)
        }
    }

    pub fn colour(name: &str) -> Self {
        Symbol {
            colour_predicate: true,
            ..Symbol::new(name, 1)
        }
    }
}

/// An ordered list of relation symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vocabulary {
    symbols: Vec<Symbol>,
}

impl Vocabulary {
    pub fn new(symbols: Vec<Symbol>) -> Result<Arc<Self>> {
        for (i, s) in symbols.iter().enumerate() {
            if s.name.is_empty() || s.name.contains(char::is_whitespace) {
                return Err(ZolError::validation(format!("bad symbol name {:?}", s.name)));
            }
            if symbols[..i].iter().any(|t| t.name == s.name) {
                return Err(ZolError::validation(format!("duplicate symbol {}", s.name)));
            }
            if s.arity == 0 || s.arity > MAX_ARITY {
                return Err(ZolError::validation(format!(
                    "symbol {} has arity {}, expected 1..={MAX_ARITY}",
                    s.name, s.arity
                )));
            }
            if s.colour_predicate && s.arity != 1 {
                return Err(ZolError::validation(format!("colour predicate {} must be unary", s.name)));
            }
            if s.symmetric_irreflexive && s.arity < 2 {
                return Err(ZolError::validation(format!(
                    "symmetric irreflexive symbol {} needs arity at least 2",
                    s.name
                )));
            }
        }
        Ok(Arc::new(Vocabulary { symbols }))
    }

    /// One symmetric irreflexive binary symbol `E`.
    pub fn graph() -> Arc<Self> {
        Vocabulary::new(vec![Symbol::symirr("E", 2)]).expect("valid")
    }

    /// One binary symbol `R` with no constraints.
    pub fn digraph() -> Arc<Self> {
        Vocabulary::new(vec![Symbol::new("R", 2)]).expect("valid")
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, i: usize) -> &Symbol {
        &self.symbols[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn relational_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.symbols.len()).filter(|&i| !self.symbols[i].colour_predicate)
    }

    pub fn colour_indices(&self) -> Vec<usize> {
        (0..self.symbols.len())
            .filter(|&i| self.symbols[i].colour_predicate)
            .collect()
    }

    pub fn max_relational_arity(&self) -> usize {
        self.relational_indices()
            .map(|i| self.symbols[i].arity)
            .max()
            .unwrap_or(0)
    }

    /// The vocabulary with colour predicates removed.
    pub fn relational(&self) -> Arc<Self> {
        let symbols = self
            .symbols
            .iter()
            .filter(|s| !s.colour_predicate)
            .cloned()
            .collect();
        Arc::new(Vocabulary { symbols })
    }

    /// The relational part followed by colour predicates `P1..Pl`.
    pub fn with_colours(&self, l: usize) -> Result<Arc<Self>> {
        let mut symbols: Vec<Symbol> = self
            .symbols
            .iter()
            .filter(|s| !s.colour_predicate)
            .cloned()
            .collect();
        for i in 1..=l {
            symbols.push(Symbol::colour(&format!("P{i}")));
        }
        Vocabulary::new(symbols)
    }

    /// Parses lines `sym <name> <arity> [symirr] [colour]`.
    pub fn parse(text: &str) -> Result<Arc<Self>> {
        let mut symbols = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| ZolError::Parse { line: no + 1, msg };
            let words: Vec<&str> = line.split_whitespace().collect();
            if words[0] != "sym" || words.len() < 3 {
                return Err(err(format!("expected `sym <name> <arity> [symirr] [colour]`, got {line:?}")));
            }
            let arity: usize = words[2]
                .parse()
                .map_err(|_| err(format!("bad arity {:?}", words[2])))?;
            let mut sym = Symbol::new(words[1], arity);
            for flag in &words[3..] {
                match *flag {
                    "symirr" => sym.symmetric_irreflexive = true,
                    "colour" => sym.colour_predicate = true,
                    other => return Err(err(format!("unknown flag {other:?}"))),
                }
            }
            symbols.push(sym);
        }
        Vocabulary::new(symbols).map_err(|e| match e {
            ZolError::Validation(msg) => ZolError::Parse { line: 0, msg },
            other => other,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.symbols {
            out.push_str(&format!("sym {} {}", s.name, s.arity));
            if s.symmetric_irreflexive {
                out.push_str(" symirr");
            }
            if s.colour_predicate {
                out.push_str(" colour");
            }
            out.push('\n');
        }
        out
    }
}

fn strip_comment(raw: &str) -> &str {
    raw.split('#').next().unwrap_or("").trim()
}

fn pow(n: usize, r: usize) -> usize {
    (0..r).fold(1usize, |acc, _| acc.saturating_mul(n))
}

/// Mixed-radix code of a 1-based tuple, first entry most significant.
fn encode(n: usize, tuple: &[usize]) -> usize {
    tuple.iter().fold(0, |acc, &e| acc * n + (e - 1))
}

fn decode(n: usize, arity: usize, mut idx: usize, out: &mut [usize]) {
    for k in (0..arity).rev() {
        out[k] = idx % n + 1;
        idx /= n;
    }
}

/// Sorts a short tuple into `buf`; `None` if entries repeat.
fn sorted_distinct(tuple: &[usize], buf: &mut [usize; MAX_ARITY]) -> Option<usize> {
    let r = tuple.len();
    buf[..r].copy_from_slice(tuple);
    let s = &mut buf[..r];
    s.sort_unstable();
    if s.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(r)
    }
}

/// A finite structure with universe `1..=n`.
#[derive(Clone)]
pub struct Structure {
    vocab: Arc<Vocabulary>,
    n: usize,
    rels: Vec<Vec<u64>>,
}

impl Structure {
    pub fn empty(vocab: Arc<Vocabulary>, n: usize) -> Self {
        let rels = vocab
            .symbols()
            .iter()
            .map(|s| vec![0u64; pow(n, s.arity).div_ceil(64)])
            .collect();
        Structure { vocab, n, rels }
    }

    /// Builds a structure from `(symbol name, tuple)` pairs.
    pub fn from_tuples(vocab: Arc<Vocabulary>, n: usize, tuples: &[(&str, &[usize])]) -> Result<Self> {
        let mut m = Structure::empty(vocab, n);
        for (name, t) in tuples {
            let sym = m
                .vocab
                .index_of(name)
                .ok_or_else(|| ZolError::validation(format!("unknown symbol {name}")))?;
            m.insert(sym, t)?;
        }
        Ok(m)
    }

    /// A graph on `n` vertices over [`Vocabulary::graph`].
    pub fn graph(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut m = Structure::empty(Vocabulary::graph(), n);
        for &(a, b) in edges {
            m.insert(0, &[a, b]).expect("valid edge");
        }
        m
    }

    pub fn complete_graph(n: usize) -> Self {
        let edges: Vec<_> = (1..=n)
            .flat_map(|a| (a + 1..=n).map(move |b| (a, b)))
            .collect();
        Structure::graph(n, &edges)
    }

    pub fn vocab(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn check_tuple(&self, sym: usize, tuple: &[usize]) -> Result<()> {
        let s = self.vocab.symbol(sym);
        if tuple.len() != s.arity {
            return Err(ZolError::validation(format!(
                "symbol {} expects {} entries, got {}",
                s.name,
                s.arity,
                tuple.len()
            )));
        }
        if let Some(&e) = tuple.iter().find(|&&e| e == 0 || e > self.n) {
            return Err(ZolError::validation(format!("element {e} outside 1..={}", self.n)));
        }
        Ok(())
    }

    fn slot_index(&self, sym: usize, tuple: &[usize]) -> Option<usize> {
        if self.vocab.symbol(sym).symmetric_irreflexive {
            let mut buf = [0usize; MAX_ARITY];
            let r = sorted_distinct(tuple, &mut buf)?;
            Some(encode(self.n, &buf[..r]))
        } else {
            Some(encode(self.n, tuple))
        }
    }

    /// Membership test. Out-of-range entries answer `false`.
    #[inline]
    pub fn holds(&self, sym: usize, tuple: &[usize]) -> bool {
        if tuple.iter().any(|&e| e == 0 || e > self.n) {
            return false;
        }
        match self.slot_index(sym, tuple) {
            Some(idx) => self.rels[sym][idx / 64] >> (idx % 64) & 1 == 1,
            None => false,
        }
    }

    pub fn insert(&mut self, sym: usize, tuple: &[usize]) -> Result<()> {
        self.check_tuple(sym, tuple)?;
        let idx = self.slot_index(sym, tuple).ok_or_else(|| {
            ZolError::validation(format!(
                "symbol {} is symmetric irreflexive but {:?} repeats an entry",
                self.vocab.symbol(sym).name,
                tuple
            ))
        })?;
        self.rels[sym][idx / 64] |= 1 << (idx % 64);
        Ok(())
    }

    /// Removes a relationship; for symmetric symbols this removes every permutation.
    pub fn remove(&mut self, sym: usize, tuple: &[usize]) {
        if let Some(idx) = self.slot_index(sym, tuple) {
            if idx / 64 < self.rels[sym].len() {
                self.rels[sym][idx / 64] &= !(1 << (idx % 64));
            }
        }
    }

    pub fn with_tuple(mut self, sym: usize, tuple: &[usize]) -> Result<Self> {
        self.insert(sym, tuple)?;
        Ok(self)
    }

    /// Stored tuples of a symbol in code order (one per relationship for symmetric symbols).
    pub fn stored_tuples(&self, sym: usize) -> Vec<Vec<usize>> {
        let arity = self.vocab.symbol(sym).arity;
        let mut out = Vec::new();
        let mut buf = vec![0; arity];
        for (w, &word) in self.rels[sym].iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                decode(self.n, arity, w * 64 + b, &mut buf);
                out.push(buf.clone());
            }
        }
        out
    }

    /// Every tuple in the interpretation, expanding symmetric relationships.
    pub fn tuples(&self, sym: usize) -> Vec<Vec<usize>> {
        let stored = self.stored_tuples(sym);
        if !self.vocab.symbol(sym).symmetric_irreflexive {
            return stored;
        }
        let mut out = Vec::new();
        for t in stored {
            for_each_permutation(&t, &mut |p| out.push(p.to_vec()));
        }
        out.sort();
        out
    }

    /// Number of relationships of a symbol (symmetric ones counted once).
    pub fn count(&self, sym: usize) -> usize {
        self.rels[sym].iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn relationship_count(&self) -> usize {
        (0..self.vocab.len()).map(|s| self.count(s)).sum()
    }

    pub fn relational_tuple_count(&self) -> usize {
        self.vocab.relational_indices().map(|s| self.count(s)).sum()
    }

    pub fn is_empty_of(&self, sym: usize) -> bool {
        self.rels[sym].iter().all(|&w| w == 0)
    }

    /// Structure over a different vocabulary, copying symbols by name and dropping the rest.
    pub fn project(&self, vocab: Arc<Vocabulary>) -> Structure {
        let mut out = Structure::empty(vocab, self.n);
        for i in 0..out.vocab.len() {
            if let Some(j) = self.vocab.index_of(&out.vocab.symbol(i).name) {
                if self.vocab.symbol(j).arity == out.vocab.symbol(i).arity
                    && self.vocab.symbol(j).symmetric_irreflexive
                        == out.vocab.symbol(i).symmetric_irreflexive
                {
                    out.rels[i] = self.rels[j].clone();
                }
            }
        }
        out
    }

    /// Drops colour predicates.
    pub fn relational_reduct(&self) -> Structure {
        self.project(self.vocab.relational())
    }

    /// Relabels by `perm`, where `perm[i-1]` is the new label of element `i`.
    pub fn relabel(&self, perm: &[usize]) -> Structure {
        debug_assert_eq!(perm.len(), self.n);
        let mut out = Structure::empty(self.vocab.clone(), self.n);
        for sym in 0..self.vocab.len() {
            for t in self.stored_tuples(sym) {
                let img: Vec<usize> = t.iter().map(|&e| perm[e - 1]).collect();
                out.insert(sym, &img).expect("relabelling preserves validity");
            }
        }
        out
    }

    /// Raw bitset words of one symbol; used for hashing and fast comparison.
    pub fn words(&self, sym: usize) -> &[u64] {
        &self.rels[sym]
    }

    /// Human-readable one-line summary.
    pub fn summary(&self) -> String {
        let mut parts = vec![format!("n={}", self.n)];
        for sym in 0..self.vocab.len() {
            let ts = self.stored_tuples(sym);
            if ts.is_empty() {
                continue;
            }
            let body: Vec<String> = ts
                .iter()
                .map(|t| t.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(","))
                .collect();
            parts.push(format!("{}{{{}}}", self.vocab.symbol(sym).name, body.join(" ")));
        }
        parts.join(" ")
    }
}

impl PartialEq for Structure {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.rels == other.rels
            && (Arc::ptr_eq(&self.vocab, &other.vocab) || self.vocab == other.vocab)
    }
}

impl Eq for Structure {}

impl Hash for Structure {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.rels.hash(state);
    }
}

impl Ord for Structure {
    /// Size first, then the integer value of the slot bitmask (later symbols are more significant).
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| {
            for sym in (0..self.rels.len().min(other.rels.len())).rev() {
                let (a, b) = (&self.rels[sym], &other.rels[sym]);
                for w in (0..a.len().min(b.len())).rev() {
                    match a[w].cmp(&b[w]) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
            }
            self.rels.len().cmp(&other.rels.len())
        })
    }
}

impl PartialOrd for Structure {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Structure({})", self.summary())
    }
}

pub(crate) fn for_each_permutation(items: &[usize], f: &mut dyn FnMut(&[usize])) {
    let mut v = items.to_vec();
    fn rec(v: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
        if k == v.len() {
            f(v);
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            rec(v, k + 1, f);
            v.swap(k, i);
        }
    }
    rec(&mut v, 0, f);
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

/// Parses every `structure ... end` block in `text`.
pub fn parse_structures(text: &str, vocab: &Arc<Vocabulary>) -> Result<Vec<(String, Structure)>> {
    let mut out = Vec::new();
    let mut current: Option<(String, Option<Structure>)> = None;
    for (no, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| ZolError::Parse { line: no + 1, msg };
        let words: Vec<&str> = line.split_whitespace().collect();
        match (words[0], current.as_mut()) {
            ("structure", None) => {
                let name = words.get(1).copied().unwrap_or("unnamed").to_string();
                current = Some((name, None));
            }
            ("n", Some((_, m @ None))) => {
                let n: usize = words
                    .get(1)
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| err("expected `n <int>`".into()))?;
                *m = Some(Structure::empty(vocab.clone(), n));
            }
            ("rel", Some((_, Some(m)))) => {
                let name = words.get(1).ok_or_else(|| err("expected `rel <symbol> ...`".into()))?;
                let sym = vocab
                    .index_of(name)
                    .ok_or_else(|| err(format!("unknown symbol {name}")))?;
                let tuple: Vec<usize> = words[2..]
                    .iter()
                    .map(|w| w.parse().map_err(|_| err(format!("bad element {w:?}"))))
                    .collect::<Result<_>>()?;
                m.insert(sym, &tuple).map_err(|e| err(e.to_string()))?;
            }
            ("end", Some((_, Some(_)))) => {
                let (name, m) = current.take().expect("checked");
                out.push((name, m.expect("checked")));
            }
            (_, _) => return Err(err(format!("unexpected line {line:?}"))),
        }
    }
    if current.is_some() {
        return Err(ZolError::Parse {
            line: text.lines().count(),
            msg: "missing `end`".into(),
        });
    }
    Ok(out)
}

/// Parses exactly one structure.
pub fn parse_structure(text: &str, vocab: &Arc<Vocabulary>) -> Result<Structure> {
    let mut all = parse_structures(text, vocab)?;
    match all.len() {
        1 => Ok(all.pop().expect("len 1").1),
        k => Err(ZolError::Parse {
            line: 0,
            msg: format!("expected one structure, found {k}"),
        }),
    }
}

/// Canonical text: stored tuples in code order.
pub fn serialize_structure(name: &str, m: &Structure) -> String {
    let mut out = format!("structure {name}\nn {}\n", m.n);
    for sym in 0..m.vocab.len() {
        for t in m.stored_tuples(sym) {
            out.push_str("rel ");
            out.push_str(&m.vocab.symbol(sym).name);
            for e in t {
                out.push_str(&format!(" {e}"));
            }
            out.push('\n');
        }
    }
    out.push_str("end\n");
    out
}

// ---------------------------------------------------------------------------
// Substructures and substitution
// ---------------------------------------------------------------------------

fn check_set(n: usize, set: &[usize]) -> Result<Vec<usize>> {
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.len() != set.len() {
        return Err(ZolError::validation("element set has repeated entries"));
    }
    if let Some(&e) = s.iter().find(|&&e| e == 0 || e > n) {
        return Err(ZolError::validation(format!("element {e} outside 1..={n}")));
    }
    Ok(s)
}

/// `M↾X`, relabelled `1..|X|` by increasing original label.
pub fn induced_substructure(m: &Structure, x: &[usize]) -> Result<Structure> {
    let x = check_set(m.n, x)?;
    let mut newlabel = vec![0usize; m.n + 1];
    for (i, &e) in x.iter().enumerate() {
        newlabel[e] = i + 1;
    }
    let mut out = Structure::empty(m.vocab.clone(), x.len());
    for sym in 0..m.vocab.len() {
        for t in m.stored_tuples(sym) {
            if t.iter().all(|&e| newlabel[e] != 0) {
                let img: Vec<usize> = t.iter().map(|&e| newlabel[e]).collect();
                out.insert(sym, &img)?;
            }
        }
    }
    Ok(out)
}

/// `M[A▷B]` where `A = M↾site` and `B`'s element `i` is identified with `site[i-1]` after sorting.
pub fn substitute(m: &Structure, b_new: &Structure, site: &[usize]) -> Result<Structure> {
    let site = check_set(m.n, site)?;
    if site.len() != b_new.n {
        return Err(ZolError::validation(format!(
            "site has {} elements but the replacement has {}",
            site.len(),
            b_new.n
        )));
    }
    substitute_via(m, b_new, &site)
}

/// Substitution with an explicit injective placement `f[i-1]` of `B`'s element `i`.
pub fn substitute_via(m: &Structure, b_new: &Structure, f: &[usize]) -> Result<Structure> {
    check_set(m.n, f)?;
    if f.len() != b_new.n {
        return Err(ZolError::validation("placement length differs from replacement size"));
    }
    let mut inside = vec![false; m.n + 1];
    for &e in f {
        inside[e] = true;
    }
    let mut out = Structure::empty(m.vocab.clone(), m.n);
    for sym in 0..m.vocab.len() {
        for t in m.stored_tuples(sym) {
            if !t.iter().all(|&e| inside[e]) {
                out.insert(sym, &t)?;
            }
        }
        for t in b_new.stored_tuples(sym) {
            let img: Vec<usize> = t.iter().map(|&e| f[e - 1]).collect();
            out.insert(sym, &img)?;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Mappings and embeddings
// ---------------------------------------------------------------------------

/// A partial injective map from source elements `1..=n` to target elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mapping {
    images: Vec<Option<usize>>,
}

impl Mapping {
    pub fn empty(source_n: usize) -> Self {
        Mapping {
            images: vec![None; source_n],
        }
    }

    pub fn total(images: Vec<usize>) -> Self {
        Mapping {
            images: images.into_iter().map(Some).collect(),
        }
    }

    pub fn from_pairs(source_n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut m = Mapping::empty(source_n);
        for &(x, y) in pairs {
            if x == 0 || x > source_n {
                return Err(ZolError::validation(format!("source element {x} out of range")));
            }
            m.images[x - 1] = Some(y);
        }
        if !m.is_injective() {
            return Err(ZolError::validation("mapping is not injective"));
        }
        Ok(m)
    }

    pub fn source_n(&self) -> usize {
        self.images.len()
    }

    pub fn get(&self, x: usize) -> Option<usize> {
        self.images.get(x.wrapping_sub(1)).copied().flatten()
    }

    pub fn set(&mut self, x: usize, y: usize) {
        self.images[x - 1] = Some(y);
    }

    pub fn is_total(&self) -> bool {
        self.images.iter().all(Option::is_some)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen: Vec<usize> = self.images.iter().flatten().copied().collect();
        let k = seen.len();
        seen.sort_unstable();
        seen.dedup();
        seen.len() == k
    }

    /// Images as a vector, if total.
    pub fn as_total(&self) -> Option<Vec<usize>> {
        self.images.iter().copied().collect()
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &Mapping) -> Mapping {
        Mapping {
            images: self.images.iter().map(|y| y.and_then(|y| g.get(y))).collect(),
        }
    }

    pub fn image_set(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.images.iter().flatten().copied().collect();
        v.sort_unstable();
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingMode {
    /// Forward preservation of tuples only.
    Weak,
    /// Tuples preserved in both directions.
    Strong,
}

fn check_total_map(f: &Mapping, a: &Structure, m: &Structure) -> Result<Vec<usize>> {
    if f.source_n() != a.n {
        return Err(ZolError::validation("mapping source size differs from structure size"));
    }
    let img = f
        .as_total()
        .ok_or_else(|| ZolError::validation("mapping is not total"))?;
    if !f.is_injective() {
        return Err(ZolError::validation("mapping is not injective"));
    }
    if img.iter().any(|&y| y == 0 || y > m.n) {
        return Err(ZolError::validation("mapping image outside target universe"));
    }
    Ok(img)
}

pub fn is_weak_embedding(f: &Mapping, a: &Structure, m: &Structure) -> Result<bool> {
    let img = check_total_map(f, a, m)?;
    for sym in 0..a.vocab.len() {
        for t in a.stored_tuples(sym) {
            let it: Vec<usize> = t.iter().map(|&e| img[e - 1]).collect();
            if !m.holds(sym, &it) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn is_embedding(f: &Mapping, a: &Structure, m: &Structure) -> Result<bool> {
    let img = check_total_map(f, a, m)?;
    for sym in 0..a.vocab.len() {
        let arity = a.vocab.symbol(sym).arity;
        let mut t = vec![1usize; arity];
        let mut it = vec![0usize; arity];
        for idx in 0..pow(a.n, arity) {
            decode(a.n, arity, idx, &mut t);
            for k in 0..arity {
                it[k] = img[t[k] - 1];
            }
            if a.holds(sym, &t) != m.holds(sym, &it) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Backtracking search for embeddings of `a` into `m` extending `partial`.
///
/// Unassigned source elements are filled in increasing order with targets tried in
/// increasing order, so visits happen in lexicographic order of assigned targets.
/// `visit` receives the full image vector (`img[i-1]` is the image of `i`).
pub fn search_embeddings<F>(a: &Structure, m: &Structure, partial: &Mapping, mode: EmbeddingMode, mut visit: F)
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    assert!(
        Arc::ptr_eq(&a.vocab, &m.vocab) || a.vocab == m.vocab,
        "embedding between different vocabularies"
    );
    if a.n > m.n || partial.source_n() != a.n || !partial.is_injective() {
        return;
    }
    let fixed: Vec<usize> = (1..=a.n).filter(|&x| partial.get(x).is_some()).collect();
    if fixed.iter().any(|&x| {
        let y = partial.get(x).expect("fixed");
        y == 0 || y > m.n
    }) {
        return;
    }
    let order: Vec<usize> = fixed
        .iter()
        .copied()
        .chain((1..=a.n).filter(|&x| partial.get(x).is_none()))
        .collect();
    let mut search = Search {
        a,
        m,
        mode,
        order,
        fixed_count: fixed.len(),
        partial,
        img: vec![0; a.n],
        used: vec![false; m.n + 1],
        buf_src: vec![0; MAX_ARITY],
        buf_img: vec![0; MAX_ARITY],
    };
    let _ = search.extend(0, &mut visit);
}

struct Search<'a> {
    a: &'a Structure,
    m: &'a Structure,
    mode: EmbeddingMode,
    order: Vec<usize>,
    fixed_count: usize,
    partial: &'a Mapping,
    img: Vec<usize>,
    used: Vec<bool>,
    buf_src: Vec<usize>,
    buf_img: Vec<usize>,
}

impl Search<'_> {
    fn extend<F>(&mut self, p: usize, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        if p == self.order.len() {
            return visit(&self.img);
        }
        let x = self.order[p];
        let candidates: Vec<usize> = if p < self.fixed_count {
            vec![self.partial.get(x).expect("fixed")]
        } else {
            (1..=self.m.n).filter(|&y| !self.used[y]).collect()
        };
        for y in candidates {
            if self.used[y] {
                continue;
            }
            self.img[x - 1] = y;
            self.used[y] = true;
            if self.consistent(p) {
                self.extend(p + 1, visit)?;
            }
            self.used[y] = false;
            self.img[x - 1] = 0;
        }
        ControlFlow::Continue(())
    }

    /// Checks every tuple over the first `p+1` assigned elements that uses `order[p]`.
    fn consistent(&mut self, p: usize) -> bool {
        let x = self.order[p];
        for sym in 0..self.a.vocab.len() {
            let s = self.a.vocab.symbol(sym);
            let r = s.arity;
            if s.symmetric_irreflexive {
                if p + 1 < r {
                    continue;
                }
                // subsets of size r containing x
                let others: Vec<usize> = self.order[..p].to_vec();
                let mut ok = true;
                for_each_combination(&others, r - 1, &mut |c| {
                    if !ok {
                        return;
                    }
                    self.buf_src[0] = x;
                    self.buf_src[1..r].copy_from_slice(c);
                    for k in 0..r {
                        self.buf_img[k] = self.img[self.buf_src[k] - 1];
                    }
                    let in_a = self.a.holds(sym, &self.buf_src[..r]);
                    let ok_here = match self.mode {
                        EmbeddingMode::Weak => !in_a || self.m.holds(sym, &self.buf_img[..r]),
                        EmbeddingMode::Strong => in_a == self.m.holds(sym, &self.buf_img[..r]),
                    };
                    ok &= ok_here;
                });
                if !ok {
                    return false;
                }
            } else {
                // all r-tuples over order[..=p] that contain x
                let base = p + 1;
                let total = pow(base, r);
                for code in 0..total {
                    let mut c = code;
                    let mut has_x = false;
                    for k in (0..r).rev() {
                        let e = self.order[c % base];
                        c /= base;
                        self.buf_src[k] = e;
                        has_x |= e == x;
                    }
                    if !has_x {
                        continue;
                    }
                    for k in 0..r {
                        self.buf_img[k] = self.img[self.buf_src[k] - 1];
                    }
                    let in_a = self.a.holds(sym, &self.buf_src[..r]);
                    let good = match self.mode {
                        EmbeddingMode::Weak => !in_a || self.m.holds(sym, &self.buf_img[..r]),
                        EmbeddingMode::Strong => in_a == self.m.holds(sym, &self.buf_img[..r]),
                    };
                    if !good {
                        return false;
                    }
                }
            }
        }
        true
    }
}

pub(crate) fn for_each_combination(items: &[usize], k: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, k, i + 1, cur, f);
            cur.pop();
        }
    }
    let mut cur = Vec::with_capacity(k);
    rec(items, k, 0, &mut cur, f);
}

/// All total extensions of `partial` that are embeddings of the given mode.
pub fn enumerate_embeddings(a: &Structure, m: &Structure, partial: &Mapping, mode: EmbeddingMode) -> Vec<Mapping> {
    let mut out = Vec::new();
    search_embeddings(a, m, partial, mode, |img| {
        out.push(Mapping::total(img.to_vec()));
        ControlFlow::Continue(())
    });
    out
}

/// Whether some embedding of the given mode exists.
pub fn embeds(a: &Structure, m: &Structure, mode: EmbeddingMode) -> bool {
    let mut found = false;
    search_embeddings(a, m, &Mapping::empty(a.n), mode, |_| {
        found = true;
        ControlFlow::Break(())
    });
    found
}

// ---------------------------------------------------------------------------
// Isomorphism
// ---------------------------------------------------------------------------

pub fn are_isomorphic(a: &Structure, b: &Structure) -> bool {
    if a.n != b.n || a.vocab != b.vocab {
        return false;
    }
    if (0..a.vocab.len()).any(|s| a.count(s) != b.count(s)) {
        return false;
    }
    embeds(a, b, EmbeddingMode::Strong)
}

/// Per-element invariant: for each symbol and position, how many tuples have the element there.
fn element_invariants(a: &Structure) -> Vec<Vec<u32>> {
    let mut inv = vec![Vec::new(); a.n + 1];
    for sym in 0..a.vocab.len() {
        let r = a.vocab.symbol(sym).arity;
        let base = inv[1..].first().map_or(0, |v: &Vec<u32>| v.len());
        for v in inv.iter_mut().skip(1) {
            v.resize(base + r, 0);
        }
        for t in a.tuples(sym) {
            for (k, &e) in t.iter().enumerate() {
                inv[e][base + k] += 1;
            }
        }
    }
    inv
}

/// Least relabelling in [`Structure`] order among relabellings that list elements
/// by decreasing invariant. Refuses above [`CANONICAL_MAX_N`] elements.
pub fn canonical_form(a: &Structure) -> Result<Structure> {
    if a.n > CANONICAL_MAX_N {
        return Err(ZolError::budget("canonical form", a.n as u128, CANONICAL_MAX_N as u128));
    }
    if a.n <= 1 {
        return Ok(a.clone());
    }
    let inv = element_invariants(a);
    let mut elems: Vec<usize> = (1..=a.n).collect();
    elems.sort_by(|&x, &y| inv[y].cmp(&inv[x]).then(x.cmp(&y)));
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for &e in &elems {
        match cells.last_mut() {
            Some(c) if inv[c[0]] == inv[e] => c.push(e),
            _ => cells.push(vec![e]),
        }
    }
    let mut best: Option<Structure> = None;
    let mut perm = vec![0usize; a.n];
    fn rec(
        a: &Structure,
        cells: &[Vec<usize>],
        ci: usize,
        next_label: usize,
        perm: &mut Vec<usize>,
        best: &mut Option<Structure>,
    ) {
        if ci == cells.len() {
            let cand = a.relabel(perm);
            if best.as_ref().is_none_or(|b| cand < *b) {
                *best = Some(cand);
            }
            return;
        }
        for_each_permutation(&cells[ci], &mut |order| {
            for (k, &e) in order.iter().enumerate() {
                perm[e - 1] = next_label + k;
            }
            rec(a, cells, ci + 1, next_label + order.len(), perm, best);
        });
    }
    rec(a, &cells, 0, 1, &mut perm, &mut best);
    Ok(best.expect("at least one relabelling"))
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

/// A relation slot: one potential relationship.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    pub sym: usize,
    pub tuple: Vec<usize>,
}

/// All slots on `[n]` in enumeration order: symbols in order, tuples by increasing code.
/// Symmetric symbols contribute one slot per strictly increasing tuple.
pub fn slots(vocab: &Vocabulary, n: usize) -> Vec<Slot> {
    let mut out = Vec::new();
    for sym in 0..vocab.len() {
        let s = vocab.symbol(sym);
        let mut t = vec![0usize; s.arity];
        for idx in 0..pow(n, s.arity) {
            decode(n, s.arity, idx, &mut t);
            if s.symmetric_irreflexive && t.windows(2).any(|w| w[0] >= w[1]) {
                continue;
            }
            out.push(Slot {
                sym,
                tuple: t.clone(),
            });
        }
    }
    out
}

/// Structure whose slot `j` is present iff bit `j` of `mask` is set.
pub fn structure_from_mask(vocab: &Arc<Vocabulary>, n: usize, slots: &[Slot], mask: u64) -> Structure {
    let mut m = Structure::empty(vocab.clone(), n);
    let mut bits = mask;
    while bits != 0 {
        let j = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        m.insert(slots[j].sym, &slots[j].tuple).expect("slot is valid");
    }
    m
}

/// Every structure on `[n]` passing `filter`, in increasing order of the slot bitmask.
pub fn enumerate_structures<'a, F>(
    vocab: &Arc<Vocabulary>,
    n: usize,
    filter: F,
) -> Result<impl Iterator<Item = Structure> + 'a>
where
    F: Fn(&Structure) -> bool + 'a,
{
    enumerate_structures_with_limit(vocab, n, DEFAULT_ENUMERATION_BITS, filter)
}

pub fn enumerate_structures_with_limit<'a, F>(
    vocab: &Arc<Vocabulary>,
    n: usize,
    max_bits: usize,
    filter: F,
) -> Result<impl Iterator<Item = Structure> + 'a>
where
    F: Fn(&Structure) -> bool + 'a,
{
    let sl = slots(vocab, n);
    if sl.len() > max_bits.min(63) {
        return Err(ZolError::budget(
            format!("enumeration of all structures on {n} elements"),
            1u128 << sl.len().min(127),
            1u128 << max_bits.min(63),
        ));
    }
    let vocab = vocab.clone();
    let end = 1u64 << sl.len();
    Ok((0..end)
        .map(move |mask| structure_from_mask(&vocab, n, &sl, mask))
        .filter(move |m| filter(m)))
}

/// A relationship `tuple ∈ symbol^structure`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub structure: Structure,
    pub tuple: Vec<usize>,
    pub symbol: String,
}

/// Groups structures by isomorphism type, keeping the first member of each class.
pub fn dedup_isomorphic(items: Vec<Structure>) -> Result<Vec<Structure>> {
    let mut seen: HashMap<Structure, ()> = HashMap::new();
    let mut out = Vec::new();
    for s in items {
        let c = canonical_form(&s)?;
        if seen.insert(c, ()).is_none() {
            out.push(s);
        }
    }
    Ok(out)
}
