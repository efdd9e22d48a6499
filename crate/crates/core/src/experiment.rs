//! Named events, experiment configurations and CSV tables of probabilities.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use num::BigRational;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::axioms::{multiplicity, satisfies_all_k_extension_axioms, satisfies_extension_axiom, all_k_extension_pairs, ExtensionPair};
use crate::classes::{colours_of, ClassRule, ClassSpec};
use crate::colouring::{
    all_colourings_rich, satisfies_colour_compatible_axiom, unique_up_to_permutation, xi_matches_partition,
    xi_matrix, ColourAssignment, Gadgets,
};
use crate::counting::to_f64;
use crate::error::{Result, ZolError};
use crate::fixtures;
use crate::measures::{exact_probability, monte_carlo, MeasureKind, ProbResult, ProbValue, Sample, Sampler};
use crate::pairwise::PairwiseModel;
use crate::pregeometry::GeometryKind;
use crate::structures::{embeds, parse_structures, EmbeddingMode, Structure, Vocabulary};

// ---------------------------------------------------------------------------
// Events
// ---------------------------------------------------------------------------

/// A named event, as written in configs and on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum EventSpec {
    True,
    AllKExt(usize),
    /// `ext(<file>)`: the file holds `A` then `B`, with `A = B↾[‖A‖]`.
    Ext { label: String, pair: ExtensionPair },
    HasCopy { label: String, f: Structure },
    /// Every copy of `A` has at least `m` disjoint extensions to `B`; vacuous without copies.
    MultAtLeast { label: String, pair: ExtensionPair, m: usize },
    AllKColourCompat(usize),
    XiDefinesColour,
    UniquelyColourable,
    AllColouringsRich(usize),
    GeneratingColouringRich(usize),
    UnaryEmpty(String),
    And(Vec<EventSpec>),
}

impl fmt::Display for EventSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventSpec::True => write!(f, "true"),
            EventSpec::AllKExt(k) => write!(f, "all-k-ext({k})"),
            EventSpec::Ext { label, .. } => write!(f, "ext({label})"),
            EventSpec::HasCopy { label, .. } => write!(f, "has-copy({label})"),
            EventSpec::MultAtLeast { label, m, .. } => write!(f, "mult-at-least({label};{m})"),
            EventSpec::AllKColourCompat(k) => write!(f, "all-k-colour-compat({k})"),
            EventSpec::XiDefinesColour => write!(f, "xi-defines-colour"),
            EventSpec::UniquelyColourable => write!(f, "uniquely-colourable"),
            EventSpec::AllColouringsRich(a) => write!(f, "all-colourings-rich({a})"),
            EventSpec::GeneratingColouringRich(a) => write!(f, "generating-colouring-rich({a})"),
            EventSpec::UnaryEmpty(s) => write!(f, "unary-empty({s})"),
            EventSpec::And(v) => {
                for (i, e) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, " & ")?;
                    }
                    write!(f, "{e}")?;
                }
                Ok(())
            }
        }
    }
}

/// One catalogue line per event form.
pub fn list_events() -> Vec<(&'static str, &'static str)> {
    vec![
        ("true", "always holds"),
        ("all-k-ext(k)", "every k-extension axiom of the class holds"),
        ("ext(file)", "the extension axiom for the pair A, B read from file"),
        ("has-copy(file)", "the structure in file embeds"),
        ("mult-at-least(file;m)", "every copy of A has at least m disjoint extensions to B"),
        ("all-k-colour-compat(k)", "every l-colour-compatible k-extension axiom holds"),
        ("xi-defines-colour", "xi holds exactly between elements of the same generating colour"),
        ("uniquely-colourable", "the relational reduct has a unique l-colouring up to permutation"),
        ("all-colourings-rich(a)", "every l-colouring has all classes of size at least n/a"),
        ("generating-colouring-rich(a)", "the generating colouring has all classes of size at least n/a"),
        ("unary-empty(sym)", "no element satisfies the unary symbol"),
        ("e1 & e2", "conjunction"),
    ]
}

fn split_top(s: &str, sep: char) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if ch == sep && depth == 0 {
            out.push(cur.trim().to_string());
            cur.clear();
        } else {
            cur.push(ch);
        }
    }
    if !cur.trim().is_empty() || !out.is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

/// Splits a comma-separated event list, ignoring commas inside parentheses.
pub fn split_event_list(s: &str) -> Vec<String> {
    split_top(s, ',').into_iter().filter(|e| !e.is_empty()).collect()
}

fn read_structures(path: &Path, vocab: &Arc<Vocabulary>) -> Result<Vec<Structure>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ZolError::validation(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_structures(&text, vocab)?.into_iter().map(|(_, m)| m).collect())
}

fn pair_from_file(path: &Path, vocab: &Arc<Vocabulary>) -> Result<ExtensionPair> {
    let ms = read_structures(path, vocab)?;
    if ms.len() != 2 {
        return Err(ZolError::validation(format!(
            "{} must hold exactly two structures (A then B), found {}",
            path.display(),
            ms.len()
        )));
    }
    let mut it = ms.into_iter();
    let a = it.next().expect("two");
    let b = it.next().expect("two");
    ExtensionPair::new(a, b)
}

impl EventSpec {
    /// Parses one event; file arguments are resolved against `base`.
    pub fn parse(text: &str, vocab: &Arc<Vocabulary>, base: &Path) -> Result<Self> {
        let text = text.trim();
        let parts = split_top(text, '&');
        if parts.len() > 1 {
            return Ok(EventSpec::And(
                parts
                    .iter()
                    .map(|p| EventSpec::parse(p, vocab, base))
                    .collect::<Result<_>>()?,
            ));
        }
        let (name, arg) = match text.find('(') {
            Some(i) if text.ends_with(')') => (&text[..i], Some(&text[i + 1..text.len() - 1])),
            _ => (text, None),
        };
        let bad = || ZolError::validation(format!("unknown or malformed event {text:?}"));
        let num = |a: Option<&str>| -> Result<usize> { a.and_then(|a| a.trim().parse().ok()).ok_or_else(bad) };
        let path = |a: &str| -> PathBuf { base.join(a.trim()) };
        Ok(match (name, arg) {
            ("true", None) => EventSpec::True,
            ("all-k-ext", a) => EventSpec::AllKExt(num(a)?),
            ("all-k-colour-compat", a) => EventSpec::AllKColourCompat(num(a)?),
            ("xi-defines-colour", None) => EventSpec::XiDefinesColour,
            ("uniquely-colourable", None) => EventSpec::UniquelyColourable,
            ("all-colourings-rich", a) => EventSpec::AllColouringsRich(num(a)?.max(1)),
            ("generating-colouring-rich", a) => EventSpec::GeneratingColouringRich(num(a)?.max(1)),
            ("unary-empty", Some(s)) => {
                let s = s.trim();
                match vocab.index_of(s) {
                    Some(i) if vocab.symbol(i).arity == 1 => EventSpec::UnaryEmpty(s.to_string()),
                    _ => return Err(ZolError::validation(format!("{s:?} is not a unary symbol"))),
                }
            }
            ("ext", Some(a)) => EventSpec::Ext {
                label: a.trim().to_string(),
                pair: pair_from_file(&path(a), vocab)?,
            },
            ("has-copy", Some(a)) => {
                let ms = read_structures(&path(a), vocab)?;
                let [f] = <[Structure; 1]>::try_from(ms)
                    .map_err(|_| ZolError::validation(format!("{a} must hold exactly one structure")))?;
                EventSpec::HasCopy {
                    label: a.trim().to_string(),
                    f,
                }
            }
            ("mult-at-least", Some(a)) => {
                let (file, m) = a.rsplit_once(';').ok_or_else(bad)?;
                EventSpec::MultAtLeast {
                    label: file.trim().to_string(),
                    pair: pair_from_file(&path(file), vocab)?,
                    m: num(Some(m))?,
                }
            }
            _ => return Err(bad()),
        })
    }

    fn needs_colours(&self) -> bool {
        match self {
            EventSpec::AllKColourCompat(_)
            | EventSpec::XiDefinesColour
            | EventSpec::UniquelyColourable
            | EventSpec::AllColouringsRich(_)
            | EventSpec::GeneratingColouringRich(_) => true,
            EventSpec::And(v) => v.iter().any(|e| e.needs_colours()),
            _ => false,
        }
    }
}

/// An event compiled against one class.
#[derive(Debug, Clone)]
pub struct PreparedEvent {
    spec: EventSpec,
    geometry: GeometryKind,
    /// Colourable classes are sampled through their cover; structural events read the reduct.
    on_reduct: bool,
    colours: Option<(usize, bool)>,
    gadgets: Option<Arc<Gadgets>>,
    pairs: Vec<ExtensionPair>,
    compat_pairs: Vec<(Structure, Structure)>,
    parts: Vec<PreparedEvent>,
}

fn colour_params(c: &ClassSpec) -> Option<(usize, bool)> {
    match c.rule() {
        ClassRule::LColoured { l, strong } | ClassRule::LColourable { l, strong } => Some((*l, *strong)),
        _ => None,
    }
}

/// Puts `A` on the first elements of `B`.
fn prefix_form(p: &ExtensionPair) -> Result<(Structure, Structure)> {
    let b = p.large();
    let mut perm = vec![0usize; b.n()];
    let mut next = 1;
    for &y in p.inclusion() {
        perm[y - 1] = next;
        next += 1;
    }
    for slot in perm.iter_mut() {
        if *slot == 0 {
            *slot = next;
            next += 1;
        }
    }
    let b2 = b.relabel(&perm);
    let a2 = crate::structures::induced_substructure(&b2, &(1..=p.small().n()).collect::<Vec<_>>())?;
    Ok((a2, b2))
}

impl PreparedEvent {
    pub fn new(spec: &EventSpec, c: &ClassSpec) -> Result<Self> {
        let colours = colour_params(c);
        if spec.needs_colours() && colours.is_none() {
            return Err(ZolError::validation(format!("event {spec} needs a coloured or colourable class, got {c}")));
        }
        let rel_vocab = c.vocab().relational();
        let gadgets = if spec.needs_colours() {
            let (l, strong) = colours.expect("checked");
            Some(Arc::new(Gadgets::build(&rel_vocab, l, strong)?))
        } else {
            None
        };
        let mut out = PreparedEvent {
            spec: spec.clone(),
            geometry: c.geometry(),
            on_reduct: c.cover().is_some(),
            colours,
            gadgets,
            pairs: Vec::new(),
            compat_pairs: Vec::new(),
            parts: Vec::new(),
        };
        match spec {
            EventSpec::AllKExt(k) => out.pairs = all_k_extension_pairs(c, *k)?,
            EventSpec::AllKColourCompat(k) => {
                let (l, strong) = colours.expect("checked");
                let colourable = ClassSpec::l_colourable(&rel_vocab, l, strong)?;
                for p in all_k_extension_pairs(&colourable, *k)? {
                    out.compat_pairs.push(prefix_form(&p)?);
                }
            }
            EventSpec::Ext { pair, .. } | EventSpec::MultAtLeast { pair, .. } => check_vocab(pair.large(), c)?,
            EventSpec::HasCopy { f, .. } => check_vocab(f, c)?,
            EventSpec::And(v) => {
                out.parts = v.iter().map(|e| PreparedEvent::new(e, c)).collect::<Result<_>>()?;
            }
            _ => {}
        }
        Ok(out)
    }

    pub fn spec(&self) -> &EventSpec {
        &self.spec
    }

    pub fn eval(&self, s: &Sample) -> Result<bool> {
        let m = if self.on_reduct { &s.rel } else { &s.full };
        let geom = || self.geometry.on(m.n());
        match &self.spec {
            EventSpec::True => Ok(true),
            EventSpec::AllKExt(_) => satisfies_all_k_extension_axioms(m, &self.pairs, &geom()?),
            EventSpec::Ext { pair, .. } => satisfies_extension_axiom(m, pair, &geom()?),
            EventSpec::HasCopy { f, .. } => Ok(embeds(f, m, EmbeddingMode::Strong)),
            EventSpec::MultAtLeast { pair, m: k, .. } => {
                Ok(multiplicity(m, pair, &geom()?)?.is_none_or(|x| x >= *k))
            }
            EventSpec::UnaryEmpty(sym) => {
                let i = m
                    .vocab()
                    .index_of(sym)
                    .ok_or_else(|| ZolError::validation(format!("unknown symbol {sym}")))?;
                Ok(m.is_empty_of(i))
            }
            EventSpec::AllKColourCompat(_) => {
                let (l, strong) = self.colours.expect("prepared");
                let g = self.gadgets.as_ref().expect("prepared");
                for (a, b) in &self.compat_pairs {
                    if !satisfies_colour_compatible_axiom(&s.rel, a, b, l, strong, g)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            EventSpec::XiDefinesColour => {
                let g = self.gadgets.as_ref().expect("prepared");
                let gamma = generating_colours(s)?;
                Ok(xi_matches_partition(&xi_matrix(&s.rel, &g.s), &gamma))
            }
            EventSpec::UniquelyColourable => {
                let (l, strong) = self.colours.expect("prepared");
                Ok(unique_up_to_permutation(&s.rel, l, strong))
            }
            EventSpec::AllColouringsRich(a) => {
                let (l, strong) = self.colours.expect("prepared");
                Ok(all_colourings_rich(&s.rel, l, strong, *a))
            }
            EventSpec::GeneratingColouringRich(a) => {
                let (l, _) = self.colours.expect("prepared");
                Ok(ColourAssignment::new(l, generating_colours(s)?)?.is_rich_fraction(*a))
            }
            EventSpec::And(_) => {
                for p in &self.parts {
                    if !p.eval(s)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}

fn check_vocab(m: &Structure, c: &ClassSpec) -> Result<()> {
    let expected = if c.cover().is_some() { c.vocab().relational() } else { c.vocab().clone() };
    if m.vocab() != &expected {
        return Err(ZolError::validation("event structure is over a different vocabulary than the class"));
    }
    Ok(())
}

fn generating_colours(s: &Sample) -> Result<Vec<usize>> {
    colours_of(&s.full).ok_or_else(|| ZolError::validation("sample carries no generating colouring"))
}

// ---------------------------------------------------------------------------
// Classes by name
// ---------------------------------------------------------------------------

/// Resolves `graph`, `digraph` or a vocabulary file.
pub fn resolve_vocab(spec: &str, base: &Path) -> Result<Arc<Vocabulary>> {
    match spec.trim() {
        "graph" => Ok(Vocabulary::graph()),
        "digraph" => Ok(Vocabulary::digraph()),
        file => {
            let p = base.join(file);
            let text = std::fs::read_to_string(&p)
                .map_err(|e| ZolError::validation(format!("cannot read vocabulary {}: {e}", p.display())))?;
            Vocabulary::parse(&text)
        }
    }
}

/// Resolves a class name: `all`, `coloured:<l>`, `strongly-coloured:<l>`, `colourable:<l>`,
/// `strongly-colourable:<l>`, `forbidden-weak:<file>`, `forbidden-induced:<file>`, or a fixture.
pub fn resolve_class(name: &str, vocab: &Arc<Vocabulary>, geometry: GeometryKind, base: &Path) -> Result<ClassSpec> {
    let name = name.trim();
    let colours = |s: &str| -> Result<usize> {
        s.parse()
            .map_err(|_| ZolError::validation(format!("bad colour count {s:?} in class {name:?}")))
    };
    let c = if name == "all" {
        ClassSpec::all(vocab.clone())
    } else if let Some(l) = name.strip_prefix("strongly-coloured:") {
        ClassSpec::l_coloured(vocab, colours(l)?, true)?
    } else if let Some(l) = name.strip_prefix("coloured:") {
        ClassSpec::l_coloured(vocab, colours(l)?, false)?
    } else if let Some(l) = name.strip_prefix("strongly-colourable:") {
        ClassSpec::l_colourable(vocab, colours(l)?, true)?
    } else if let Some(l) = name.strip_prefix("colourable:") {
        ClassSpec::l_colourable(vocab, colours(l)?, false)?
    } else if let Some(f) = name.strip_prefix("forbidden-weak:") {
        ClassSpec::forbidden_weak(vocab.clone(), read_structures(&base.join(f), vocab)?)?
    } else if let Some(f) = name.strip_prefix("forbidden-induced:") {
        ClassSpec::forbidden_induced(vocab.clone(), read_structures(&base.join(f), vocab)?)?
    } else if let Some(c) = fixtures::by_name(name) {
        c
    } else {
        return Err(ZolError::validation(format!("unknown class {name:?}")));
    };
    if geometry.is_trivial() {
        Ok(c)
    } else {
        c.with_geometry(geometry)
    }
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    MonteCarlo(u64),
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => write!(f, "exact"),
            Mode::MonteCarlo(t) => write!(f, "mc:{t}"),
        }
    }
}

impl FromStr for Mode {
    type Err = ZolError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "exact" {
            return Ok(Mode::Exact);
        }
        s.strip_prefix("mc:")
            .and_then(|t| t.parse().ok())
            .filter(|&t| t > 0)
            .map(Mode::MonteCarlo)
            .ok_or_else(|| ZolError::validation(format!("mode: expected `exact` or `mc:<trials>`, got {s:?}")))
    }
}

/// Parses `a..b`, `a..=b` or a single integer; `a..b` includes `b`.
pub fn parse_n_range(s: &str) -> Result<Vec<usize>> {
    let s = s.trim();
    let bad = || ZolError::validation(format!("n: expected `a..b` or an integer, got {s:?}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)
        }
        None => {
            let v: usize = s.parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(ZolError::validation(format!("n: empty range {s:?}")));
    }
    Ok((lo..=hi).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub class: String,
    pub vocab: String,
    pub geometry: GeometryKind,
    pub measure: MeasureKind,
    pub events: Vec<String>,
    pub n: Vec<usize>,
    pub mode: Mode,
    pub seed: u64,
    pub output: Option<PathBuf>,
    /// Directory against which file references are resolved.
    pub base: PathBuf,
}

impl ExperimentConfig {
    /// Parses flat `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut class = None;
        let mut vocab = "graph".to_string();
        let mut geometry = GeometryKind::Trivial;
        let mut measure = MeasureKind::Uniform;
        let mut events = None;
        let mut n = None;
        let mut mode = Mode::Exact;
        let mut seed = 0u64;
        let mut output = None;
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ZolError::Parse {
                line: no + 1,
                msg: format!("expected `key = value`, got {line:?}"),
            })?;
            let (k, v) = (k.trim(), v.trim());
            let field = |e: ZolError| ZolError::validation(format!("{k}: {e}"));
            match k {
                "class" => class = Some(v.to_string()),
                "vocab" => vocab = v.to_string(),
                "geometry" => geometry = v.parse().map_err(field)?,
                "measure" => measure = v.parse().map_err(field)?,
                "events" => events = Some(split_event_list(v)),
                "n" => n = Some(parse_n_range(v)?),
                "mode" => mode = v.parse()?,
                "seed" => {
                    seed = v
                        .parse()
                        .map_err(|_| ZolError::validation(format!("seed: expected an integer, got {v:?}")))?
                }
                "output" => output = Some(PathBuf::from(v)),
                other => {
                    return Err(ZolError::Parse {
                        line: no + 1,
                        msg: format!("unknown key {other:?}"),
                    })
                }
            }
        }
        let events = events.ok_or_else(|| ZolError::validation("events: missing"))?;
        if events.is_empty() {
            return Err(ZolError::validation("events: empty list"));
        }
        Ok(ExperimentConfig {
            class: class.ok_or_else(|| ZolError::validation("class: missing"))?,
            vocab,
            geometry,
            measure,
            events,
            n: n.ok_or_else(|| ZolError::validation("n: missing"))?,
            mode,
            seed,
            output,
            base: base.to_path_buf(),
        })
    }

    /// Canonical text, independent of key order, comments and the output path.
    pub fn canonical(&self) -> String {
        format!(
            "class={}\nvocab={}\ngeometry={}\nmeasure={}\nevents={}\nn={}..{}\nmode={}\nseed={}\n",
            self.class,
            self.vocab,
            self.geometry,
            self.measure,
            self.events.join(","),
            self.n.first().copied().unwrap_or(0),
            self.n.last().copied().unwrap_or(0),
            self.mode,
            self.seed
        )
    }

    /// First 16 hex digits of the SHA-256 of [`canonical`](Self::canonical).
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub n: usize,
    pub event: String,
    pub measure: MeasureKind,
    pub mode: Mode,
    pub result: ProbResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentTable {
    pub rows: Vec<Row>,
    pub config_hash: String,
}

pub const CSV_HEADER: &str = "n,event,measure,mode,value,ci_low,ci_high,trials,seed";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

impl Row {
    pub fn to_csv(&self, fractions: bool) -> String {
        let mode = match self.mode {
            Mode::Exact => "exact",
            Mode::MonteCarlo(_) => "mc",
        };
        let value = match &self.result.value {
            ProbValue::Exact(q) if fractions => render_rational(q),
            ProbValue::Exact(q) => format!("{}", to_f64(q)),
            ProbValue::Estimate(x) => format!("{x}"),
        };
        let (lo, hi) = match self.result.ci {
            Some((lo, hi)) => (format!("{lo}"), format!("{hi}")),
            None => (String::new(), String::new()),
        };
        let opt = |x: Option<u64>| x.map(|v| v.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n,
            csv_field(&self.event),
            self.measure,
            mode,
            value,
            lo,
            hi,
            opt(self.result.trials),
            opt(self.result.seed)
        )
    }
}

impl ExperimentTable {
    pub fn to_csv(&self, fractions: bool) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.to_csv(fractions));
            out.push('\n');
        }
        out.push_str(&format!(
            "#version={},config_hash={}\n",
            env!("CARGO_PKG_VERSION"),
            self.config_hash
        ));
        out
    }
}

/// Closed form for a single small extension axiom under the uniform measure, when available.
fn closed_form(c: &ClassSpec, e: &EventSpec, n: usize) -> Option<BigRational> {
    let EventSpec::Ext { pair, .. } = e else {
        return None;
    };
    if pair.large().n() > 2 {
        return None;
    }
    PairwiseModel::new(c).ok()?.axiom_probability(n, pair).ok()
}

/// Probability of one prepared event on `K_n`.
pub fn probability(c: &ClassSpec, n: usize, ev: &PreparedEvent, measure: MeasureKind, mode: Mode, seed: u64) -> Result<ProbResult> {
    match mode {
        Mode::Exact => {
            if measure == MeasureKind::Uniform {
                if let Some(q) = closed_form(c, ev.spec(), n) {
                    return Ok(ProbResult::exact(q));
                }
            }
            exact_probability(c, n, |s| ev.eval(s), measure)
        }
        Mode::MonteCarlo(trials) => {
            let sampler = Sampler::new(c, n, measure)?;
            monte_carlo(|s| ev.eval(s), &sampler, trials, seed)
        }
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentTable> {
    if cfg.n.is_empty() {
        return Err(ZolError::validation("n: empty range"));
    }
    let vocab = resolve_vocab(&cfg.vocab, &cfg.base)?;
    let c = resolve_class(&cfg.class, &vocab, cfg.geometry, &cfg.base)?;
    let event_vocab = if c.cover().is_some() { c.vocab().relational() } else { c.vocab().clone() };
    let events: Vec<PreparedEvent> = cfg
        .events
        .iter()
        .map(|e| {
            let spec = EventSpec::parse(e, &event_vocab, &cfg.base).map_err(|err| ZolError::validation(format!("events: {err}")))?;
            PreparedEvent::new(&spec, &c)
        })
        .collect::<Result<_>>()?;
    let cells: Vec<(usize, usize)> = cfg
        .n
        .iter()
        .flat_map(|&n| (0..events.len()).map(move |e| (n, e)))
        .collect();
    let results: Vec<Result<Row>> = cells
        .par_iter()
        .map(|&(n, e)| {
            let ev = &events[e];
            Ok(Row {
                n,
                event: ev.spec().to_string(),
                measure: cfg.measure,
                mode: cfg.mode,
                result: probability(&c, n, ev, cfg.measure, cfg.mode, cfg.seed)?,
            })
        })
        .collect();
    Ok(ExperimentTable {
        rows: results.into_iter().collect::<Result<_>>()?,
        config_hash: cfg.hash(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn event_lists_split_at_top_level() {
        assert_eq!(
            split_event_list("true, all-k-ext(2), mult-at-least(p.txt;2) & true"),
            vec!["true", "all-k-ext(2)", "mult-at-least(p.txt;2) & true"]
        );
    }

    #[test]
    fn config_round_trip() {
        let cfg = ExperimentConfig::parse(
            "class = triangle-free\nevents = all-k-ext(1), true\nn = 3..5\nmode = mc:10\nseed = 7\n",
            Path::new("."),
        )
        .unwrap();
        assert_eq!(cfg.n, vec![3, 4, 5]);
        assert_eq!(cfg.mode, Mode::MonteCarlo(10));
        assert_eq!(cfg.hash().len(), 16);
        assert!(ExperimentConfig::parse("class = all\nevents = true\nn = 5..3\n", Path::new(".")).is_err());
    }

    #[test]
    fn true_event_is_one() {
        let c = fixtures::triangle_free();
        let ev = PreparedEvent::new(&EventSpec::True, &c).unwrap();
        let r = probability(&c, 4, &ev, MeasureKind::Uniform, Mode::Exact, 0).unwrap();
        assert_eq!(r.exact_value().unwrap(), &BigRational::from_integer(1.into()));
    }
}
