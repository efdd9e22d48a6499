//! Classes of permitted structures and bounded checks of their closure properties.

use std::fmt;
use std::sync::Arc;

use num::{BigInt, BigRational, One};

use crate::colouring;
use crate::error::{Result, ZolError};
use crate::pregeometry::{GeometryKind, Pregeometry};
use crate::structures::{
    embeds, for_each_combination, for_each_permutation, induced_substructure, is_embedding, search_embeddings,
    slots, substitute_via, are_isomorphic, EmbeddingMode, Mapping, Structure, Vocabulary, Witness,
};

/// Cap on the number of members a single `K_n` enumeration may produce.
pub const MAX_CLASS_MEMBERS: usize = 1 << 22;

/// Cap on the number of free slots searched exhaustively by admittance and amalgamation checks.
pub const MAX_FREE_SLOTS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub enum ClassRule {
    All,
    /// No member of the list weakly embeds.
    ForbiddenWeak(Vec<Structure>),
    /// No member of the list embeds as an induced substructure.
    ForbiddenInduced(Vec<Structure>),
    /// Colour predicates `P1..Pl` partition the universe and every relationship is
    /// multichromatic (rainbow when `strong`).
    LColoured { l: usize, strong: bool },
    /// Relational structures admitting an (strong) `l`-colouring.
    LColourable { l: usize, strong: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassSpec {
    vocab: Arc<Vocabulary>,
    rule: ClassRule,
    geometry: GeometryKind,
}

impl ClassSpec {
    pub fn all(vocab: Arc<Vocabulary>) -> Self {
        ClassSpec {
            vocab,
            rule: ClassRule::All,
            geometry: GeometryKind::Trivial,
        }
    }

    fn check_forbidden(vocab: &Arc<Vocabulary>, f: &[Structure]) -> Result<()> {
        if f.is_empty() {
            return Err(ZolError::validation("forbidden list is empty"));
        }
        for (i, s) in f.iter().enumerate() {
            if s.vocab() != vocab {
                return Err(ZolError::validation(format!("forbidden structure {i} uses another vocabulary")));
            }
            if s.relationship_count() == 0 {
                return Err(ZolError::validation(format!(
                    "forbidden structure {i} has no relationship; it would empty every large K_n"
                )));
            }
        }
        Ok(())
    }

    pub fn forbidden_weak(vocab: Arc<Vocabulary>, f: Vec<Structure>) -> Result<Self> {
        Self::check_forbidden(&vocab, &f)?;
        Ok(ClassSpec {
            vocab,
            rule: ClassRule::ForbiddenWeak(f),
            geometry: GeometryKind::Trivial,
        })
    }

    pub fn forbidden_induced(vocab: Arc<Vocabulary>, f: Vec<Structure>) -> Result<Self> {
        Self::check_forbidden(&vocab, &f)?;
        Ok(ClassSpec {
            vocab,
            rule: ClassRule::ForbiddenInduced(f),
            geometry: GeometryKind::Trivial,
        })
    }

    fn check_colour_params(rel: &Vocabulary, l: usize, strong: bool) -> Result<()> {
        if l < 2 {
            return Err(ZolError::validation(format!("need at least 2 colours, got {l}")));
        }
        if strong {
            if let Some(s) = rel
                .relational_indices()
                .map(|i| rel.symbol(i))
                .find(|s| s.arity > l)
            {
                return Err(ZolError::validation(format!(
                    "strong {l}-colouring needs every arity at most {l}, but {} has arity {}",
                    s.name, s.arity
                )));
            }
        }
        Ok(())
    }

    /// `l`-coloured structures over `vocab`'s relational part plus `P1..Pl`.
    pub fn l_coloured(vocab: &Vocabulary, l: usize, strong: bool) -> Result<Self> {
        Self::check_colour_params(vocab, l, strong)?;
        Ok(ClassSpec {
            vocab: vocab.with_colours(l)?,
            rule: ClassRule::LColoured { l, strong },
            geometry: GeometryKind::Trivial,
        })
    }

    /// `l`-colourable structures over `vocab`'s relational part.
    pub fn l_colourable(vocab: &Vocabulary, l: usize, strong: bool) -> Result<Self> {
        Self::check_colour_params(vocab, l, strong)?;
        Ok(ClassSpec {
            vocab: vocab.relational(),
            rule: ClassRule::LColourable { l, strong },
            geometry: GeometryKind::Trivial,
        })
    }

    pub fn with_geometry(mut self, geometry: GeometryKind) -> Result<Self> {
        if !geometry.is_trivial() {
            match self.rule {
                ClassRule::All | ClassRule::LColoured { .. } | ClassRule::LColourable { .. } => {}
                _ => {
                    return Err(ZolError::validation(
                        "forbidden-substructure classes are only implemented over the trivial geometry",
                    ))
                }
            }
        }
        self.geometry = geometry;
        Ok(self)
    }

    pub fn vocab(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn rule(&self) -> &ClassRule {
        &self.rule
    }

    pub fn geometry(&self) -> GeometryKind {
        self.geometry
    }

    /// The class of `l`-coloured structures whose relational reducts form this colourable class.
    pub fn cover(&self) -> Option<ClassSpec> {
        match self.rule {
            ClassRule::LColourable { l, strong } => Some(ClassSpec {
                vocab: self.vocab.with_colours(l).ok()?,
                rule: ClassRule::LColoured { l, strong },
                geometry: self.geometry,
            }),
            _ => None,
        }
    }

    /// Closed under removing relationships, so searches may drop optional tuples.
    pub fn is_monotone(&self) -> bool {
        !matches!(self.rule, ClassRule::ForbiddenInduced(_))
    }

    fn geometry_on(&self, n: usize) -> Option<Pregeometry> {
        self.geometry.on(n).ok()
    }

    pub fn is_permitted(&self, m: &Structure) -> bool {
        if m.vocab() != &self.vocab {
            return false;
        }
        let Some(g) = self.geometry_on(m.n()) else {
            return false;
        };
        match &self.rule {
            ClassRule::All => true,
            ClassRule::ForbiddenWeak(f) => !f.iter().any(|s| embeds(s, m, EmbeddingMode::Weak)),
            ClassRule::ForbiddenInduced(f) => !f.iter().any(|s| embeds(s, m, EmbeddingMode::Strong)),
            ClassRule::LColoured { l, strong } => is_l_coloured(m, &g, *l, *strong),
            ClassRule::LColourable { l, strong } => {
                if g.kind().is_trivial() {
                    colouring::find_colouring(m, *l, *strong).is_some()
                } else {
                    colourable_in_geometry(m, &g, *l, *strong)
                }
            }
        }
    }

    /// Every member of `K_n`, each once, in a deterministic order.
    ///
    /// Monotone and unrestricted classes stream in increasing slot-bitmask order;
    /// coloured classes go colour assignment by colour assignment.
    pub fn enumerate(&self, n: usize) -> Result<Vec<Structure>> {
        let mut out = Vec::new();
        self.for_each_member(n, &mut |m| {
            out.push(m.clone());
        })?;
        Ok(out)
    }

    pub fn count(&self, n: usize) -> Result<usize> {
        let mut k = 0;
        self.for_each_member(n, &mut |_| k += 1)?;
        Ok(k)
    }

    pub fn for_each_member(&self, n: usize, f: &mut dyn FnMut(&Structure)) -> Result<()> {
        if self.geometry_on(n).is_none() {
            return Ok(());
        }
        match &self.rule {
            ClassRule::LColoured { l, strong } => self.for_each_coloured(n, *l, *strong, f),
            ClassRule::ForbiddenInduced(_) => {
                let mut produced = 0usize;
                let sl = slots(&self.vocab, n);
                if sl.len() > crate::structures::DEFAULT_ENUMERATION_BITS {
                    return Err(ZolError::budget(
                        format!("enumerating K_{n} of a non-monotone class"),
                        1u128 << sl.len().min(127),
                        1u128 << crate::structures::DEFAULT_ENUMERATION_BITS,
                    ));
                }
                for mask in 0u64..(1u64 << sl.len()) {
                    let m = crate::structures::structure_from_mask(&self.vocab, n, &sl, mask);
                    if self.is_permitted(&m) {
                        produced += 1;
                        if produced > MAX_CLASS_MEMBERS {
                            return Err(ZolError::budget(
                                format!("members of K_{n}"),
                                produced as u128,
                                MAX_CLASS_MEMBERS as u128,
                            ));
                        }
                        f(&m);
                    }
                }
                Ok(())
            }
            _ => self.for_each_monotone(n, f),
        }
    }

    /// Depth-first over slots from the most significant down, pruning forbidden partial structures.
    fn for_each_monotone(&self, n: usize, f: &mut dyn FnMut(&Structure)) -> Result<()> {
        let sl = slots(&self.vocab, n);
        let mut m = Structure::empty(self.vocab.clone(), n);
        let mut produced = 0usize;
        let mut budget_hit = false;
        self.dfs(&sl, sl.len(), &mut m, &mut produced, &mut budget_hit, f);
        if budget_hit {
            return Err(ZolError::budget(
                format!("members of K_{n}"),
                produced as u128,
                MAX_CLASS_MEMBERS as u128,
            ));
        }
        Ok(())
    }

    fn dfs(
        &self,
        sl: &[crate::structures::Slot],
        k: usize,
        m: &mut Structure,
        produced: &mut usize,
        budget_hit: &mut bool,
        f: &mut dyn FnMut(&Structure),
    ) {
        if *budget_hit {
            return;
        }
        if k == 0 {
            *produced += 1;
            if *produced > MAX_CLASS_MEMBERS {
                *budget_hit = true;
                return;
            }
            f(m);
            return;
        }
        let slot = &sl[k - 1];
        self.dfs(sl, k - 1, m, produced, budget_hit, f);
        m.insert(slot.sym, &slot.tuple).expect("slot is valid");
        if self.is_permitted(m) {
            self.dfs(sl, k - 1, m, produced, budget_hit, f);
        }
        m.remove(slot.sym, &slot.tuple);
    }

    fn for_each_coloured(&self, n: usize, l: usize, strong: bool, f: &mut dyn FnMut(&Structure)) -> Result<()> {
        let g = self.geometry.on(n)?;
        let colour_syms = self.vocab.colour_indices();
        let rel_slots: Vec<_> = slots(&self.vocab, n)
            .into_iter()
            .filter(|s| !self.vocab.symbol(s.sym).colour_predicate)
            .collect();
        let total = (l as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        let mut produced = 0usize;
        let mut colours = vec![1usize; n];
        for code in 0..total {
            let mut c = code;
            for x in (0..n).rev() {
                colours[x] = (c % l as u128) as usize + 1;
                c /= l as u128;
            }
            let mut base = Structure::empty(self.vocab.clone(), n);
            for (x, &col) in colours.iter().enumerate() {
                base.insert(colour_syms[col - 1], &[x + 1]).expect("colour tuple");
            }
            let allowed: Vec<&crate::structures::Slot> = rel_slots
                .iter()
                .filter(|s| tuple_allowed(&base, &g, &colours, s.sym, &s.tuple, strong))
                .collect();
            if allowed.len() >= 40 {
                return Err(ZolError::budget(
                    format!("coloured structures on {n} elements"),
                    1u128 << allowed.len(),
                    MAX_CLASS_MEMBERS as u128,
                ));
            }
            for mask in 0u64..(1u64 << allowed.len()) {
                produced += 1;
                if produced > MAX_CLASS_MEMBERS {
                    return Err(ZolError::budget(
                        format!("members of K_{n}"),
                        produced as u128,
                        MAX_CLASS_MEMBERS as u128,
                    ));
                }
                let mut m = base.clone();
                let mut bits = mask;
                while bits != 0 {
                    let j = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    m.insert(allowed[j].sym, &allowed[j].tuple).expect("slot");
                }
                f(&m);
            }
        }
        Ok(())
    }
}

impl fmt::Display for ClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rule {
            ClassRule::All => write!(f, "all")?,
            ClassRule::ForbiddenWeak(v) => write!(f, "forbidden-weak[{}]", v.len())?,
            ClassRule::ForbiddenInduced(v) => write!(f, "forbidden-induced[{}]", v.len())?,
            ClassRule::LColoured { l, strong } => {
                write!(f, "{}coloured:{l}", if *strong { "strongly-" } else { "" })?
            }
            ClassRule::LColourable { l, strong } => {
                write!(f, "{}colourable:{l}", if *strong { "strongly-" } else { "" })?
            }
        }
        if !self.geometry.is_trivial() {
            write!(f, "@{}", self.geometry)?;
        }
        Ok(())
    }
}

/// Colour of each element from the colour predicates, if every element has exactly one.
pub fn colours_of(m: &Structure) -> Option<Vec<usize>> {
    let cs = m.vocab().colour_indices();
    let mut out = vec![0usize; m.n()];
    for x in 1..=m.n() {
        let mut found = 0;
        for (i, &s) in cs.iter().enumerate() {
            if m.holds(s, &[x]) {
                if found != 0 {
                    return None;
                }
                found = i + 1;
            }
        }
        if found == 0 {
            return None;
        }
        out[x - 1] = found;
    }
    Some(out)
}

pub(crate) fn tuple_allowed(m: &Structure, g: &Pregeometry, colours: &[usize], sym: usize, t: &[usize], strong: bool) -> bool {
    if m.vocab().symbol(sym).arity < 2 {
        return true;
    }
    let col = |x: usize| colours[x - 1];
    if strong {
        // repeated entries would put one colour twice on the tuple
        let mut seen = t.to_vec();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return false;
        }
    }
    if g.kind().is_trivial() {
        if strong {
            let mut cs: Vec<usize> = t.iter().map(|&x| col(x)).collect();
            cs.sort_unstable();
            cs.windows(2).all(|w| w[0] != w[1])
        } else {
            t.iter().any(|&x| col(x) != col(t[0]))
        }
    } else {
        let cl = g.closure(t);
        if strong {
            for &b in &cl {
                for &c in &cl {
                    if b != c && !g.closure(&[c]).contains(&b) && col(b) == col(c) {
                        return false;
                    }
                }
            }
            true
        } else {
            cl.iter().any(|&x| col(x) != col(cl[0]))
        }
    }
}

fn is_l_coloured(m: &Structure, g: &Pregeometry, l: usize, strong: bool) -> bool {
    if m.vocab().colour_indices().len() != l {
        return false;
    }
    let Some(colours) = colours_of(m) else {
        return false;
    };
    let vocab = m.vocab();
    vocab.relational_indices().all(|sym| {
        m.stored_tuples(sym)
            .iter()
            .all(|t| tuple_allowed(m, g, &colours, sym, t, strong))
    })
}

fn colourable_in_geometry(m: &Structure, g: &Pregeometry, l: usize, strong: bool) -> bool {
    let n = m.n();
    let total = (l as u128).pow(n as u32);
    let mut colours = vec![1usize; n];
    'outer: for code in 0..total {
        let mut c = code;
        for x in (0..n).rev() {
            colours[x] = (c % l as u128) as usize + 1;
            c /= l as u128;
        }
        for sym in m.vocab().relational_indices() {
            for t in m.stored_tuples(sym) {
                if !tuple_allowed(m, g, &colours, sym, &t, strong) {
                    continue 'outer;
                }
            }
        }
        return true;
    }
    false
}

// ---------------------------------------------------------------------------
// Forbidden structures and the dichotomy condition
// ---------------------------------------------------------------------------

/// Members of `f` no other member weakly embeds into properly; one per isomorphism type.
pub fn minimal_forbidden(f: &[Structure]) -> Vec<Structure> {
    let mut out: Vec<Structure> = Vec::new();
    for (i, s) in f.iter().enumerate() {
        let dominated = f.iter().enumerate().any(|(j, t)| {
            j != i
                && (t.n() < s.n() || t.relationship_count() < s.relationship_count())
                && t.n() <= s.n()
                && embeds(t, s, EmbeddingMode::Weak)
        });
        if !dominated && !out.iter().any(|o| are_isomorphic(o, s)) {
            out.push(s.clone());
        }
    }
    out
}

/// Looks for a minimal forbidden structure with a relationship whose range is a proper
/// subset of the universe and whose removal leaves a permitted structure.
pub fn condition_star(f: &[Structure]) -> Option<Witness> {
    let vocab = f.first()?.vocab().clone();
    let class = ClassSpec::forbidden_weak(vocab.clone(), f.to_vec()).ok()?;
    for s in minimal_forbidden(f) {
        for sym in 0..vocab.len() {
            for t in s.stored_tuples(sym) {
                let mut rng = t.clone();
                rng.sort_unstable();
                rng.dedup();
                if rng.len() >= s.n() {
                    continue;
                }
                let mut reduced = s.clone();
                reduced.remove(sym, &t);
                if class.is_permitted(&reduced) {
                    return Some(Witness {
                        structure: s.clone(),
                        tuple: t,
                        symbol: vocab.symbol(sym).name.clone(),
                    });
                }
            }
        }
    }
    None
}

/// Re-checks a witness against the defining property, relative to `f`.
pub fn witness_is_sound(f: &[Structure], w: &Witness) -> bool {
    let Ok(class) = ClassSpec::forbidden_weak(w.structure.vocab().clone(), f.to_vec()) else {
        return false;
    };
    let Some(sym) = w.structure.vocab().index_of(&w.symbol) else {
        return false;
    };
    if !w.structure.holds(sym, &w.tuple) || class.is_permitted(&w.structure) {
        return false;
    }
    let mut rng = w.tuple.clone();
    rng.sort_unstable();
    rng.dedup();
    let mut reduced = w.structure.clone();
    reduced.remove(sym, &w.tuple);
    rng.len() < w.structure.n() && class.is_permitted(&reduced)
}

/// `α` = number of permitted labelled structures on `[k]`, and the bound `1 − 1/(1+α)`.
pub fn alpha_bound(c: &ClassSpec, k: usize) -> Result<(u128, BigRational)> {
    let alpha = c.count(k)? as u128;
    let one = BigRational::one();
    let bound = &one - &one / BigRational::from_integer(BigInt::from(alpha + 1));
    Ok((alpha, bound))
}

// ---------------------------------------------------------------------------
// Bounded admittance, acceptance and amalgamation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// No counterexample among structures of size at most `bound`.
    HoldsUpToBound { bound: usize },
    Counterexample {
        bound: usize,
        structure: Structure,
        site: Vec<usize>,
        details: String,
    },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::HoldsUpToBound { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::HoldsUpToBound { bound } => write!(f, "holds up to n = {bound}"),
            Verdict::Counterexample {
                structure,
                site,
                details,
                ..
            } => write!(f, "counterexample: {} at site {:?}; {}", structure.summary(), site, details),
        }
    }
}

fn check_pair(c: &ClassSpec, a: &Structure, b: &Structure) -> Result<()> {
    if a.n() != b.n() {
        return Err(ZolError::validation(format!(
            "substitution pair has sizes {} and {}",
            a.n(),
            b.n()
        )));
    }
    if a.vocab() != c.vocab() || b.vocab() != c.vocab() {
        return Err(ZolError::validation("substitution pair uses a different vocabulary from the class"));
    }
    if !c.is_permitted(a) || !c.is_permitted(b) {
        return Err(ZolError::precondition("both sides of the substitution must be permitted"));
    }
    Ok(())
}

/// Searches permitted `M` with `‖M‖ ≤ max_n` and copies of `A` in `M` for a
/// substitution `M[A▷B]` that is not permitted. Sites are tried in lexicographic
/// order, then structures, then placements.
pub fn check_admits_substitution(c: &ClassSpec, a: &Structure, b: &Structure, max_n: usize) -> Result<Verdict> {
    check_pair(c, a, b)?;
    let k = a.n();
    for n in k..=max_n {
        let members = c.enumerate(n)?;
        let elems: Vec<usize> = (1..=n).collect();
        let mut sites = Vec::new();
        for_each_combination(&elems, k, &mut |s| sites.push(s.to_vec()));
        for site in &sites {
            for m in &members {
                let mut found: Option<Vec<usize>> = None;
                for_each_permutation(site, &mut |f| {
                    if found.is_some() {
                        return;
                    }
                    let map = Mapping::total(f.to_vec());
                    if is_embedding(&map, a, m).unwrap_or(false) {
                        let sub = substitute_via(m, b, f).expect("valid placement");
                        if !c.is_permitted(&sub) {
                            found = Some(f.to_vec());
                        }
                    }
                });
                if let Some(f) = found {
                    return Ok(Verdict::Counterexample {
                        bound: max_n,
                        structure: m.clone(),
                        site: site.clone(),
                        details: format!("placement {f:?}; the substituted structure is forbidden"),
                    });
                }
            }
        }
    }
    Ok(Verdict::HoldsUpToBound { bound: max_n })
}

fn same_colours(a: &Structure, b: &Structure) -> bool {
    a.vocab()
        .colour_indices()
        .into_iter()
        .all(|s| a.words(s) == b.words(s))
}

/// Bounded check that the class accepts `[A▷B]` over the colour language.
///
/// For every permitted `M` with a closed copy of `A`, looks for a permitted `N`
/// that agrees with `M` on colours, equals `B` on the copy, and equals `M` on every
/// other closed set of dimension at most `dim B`. Relationships whose range has larger
/// dimension are free; monotone classes drop them, others search them exhaustively.
pub fn check_accepts_substitution(c: &ClassSpec, a: &Structure, b: &Structure, max_n: usize) -> Result<Verdict> {
    check_pair(c, a, b)?;
    if !same_colours(a, b) {
        return Err(ZolError::precondition("the pair must agree on colour predicates"));
    }
    let ga = c.geometry().on(a.n())?;
    let full: Vec<usize> = (1..=a.n()).collect();
    let db = ga.dimension(&full);
    for x in ga.closed_sets(db) {
        if x.len() == a.n() {
            continue;
        }
        if induced_substructure(a, &x)? != induced_substructure(b, &x)? {
            return Err(ZolError::precondition(format!(
                "the pair differs on the closed proper subset {x:?}"
            )));
        }
    }
    for n in c.geometry().sizes_up_to(max_n) {
        if n < a.n() {
            continue;
        }
        let g = c.geometry().on(n)?;
        let all_slots = slots(c.vocab(), n);
        let members = c.enumerate(n)?;
        for m in &members {
            let mut outcome: Result<Option<Vec<usize>>> = Ok(None);
            search_embeddings(a, m, &Mapping::empty(a.n()), EmbeddingMode::Strong, |f| {
                if !g.is_closed(f) {
                    return std::ops::ControlFlow::Continue(());
                }
                let mut site = f.to_vec();
                site.sort_unstable();
                let base = substitute_via(m, b, f).expect("valid placement");
                let free: Vec<&crate::structures::Slot> = all_slots
                    .iter()
                    .filter(|s| {
                        !c.vocab().symbol(s.sym).colour_predicate
                            && !s.tuple.iter().all(|e| site.binary_search(e).is_ok())
                            && g.dimension(&s.tuple) > db
                    })
                    .collect();
                match find_completion(c, &base, &free) {
                    Ok(true) => std::ops::ControlFlow::Continue(()),
                    Ok(false) => {
                        outcome = Ok(Some(f.to_vec()));
                        std::ops::ControlFlow::Break(())
                    }
                    Err(e) => {
                        outcome = Err(e);
                        std::ops::ControlFlow::Break(())
                    }
                }
            });
            if let Some(f) = outcome? {
                let mut site = f.clone();
                site.sort_unstable();
                return Ok(Verdict::Counterexample {
                    bound: max_n,
                    structure: m.clone(),
                    site,
                    details: format!("placement {f:?}; no permitted structure realises the substitution"),
                });
            }
        }
    }
    Ok(Verdict::HoldsUpToBound { bound: max_n })
}

/// Whether some setting of the `free` slots of `base` is permitted.
fn find_completion(c: &ClassSpec, base: &Structure, free: &[&crate::structures::Slot]) -> Result<bool> {
    let mut cleared = base.clone();
    for s in free {
        cleared.remove(s.sym, &s.tuple);
    }
    if c.is_monotone() || free.is_empty() {
        return Ok(c.is_permitted(&cleared));
    }
    if free.len() > MAX_FREE_SLOTS {
        return Err(ZolError::budget(
            "free-slot search",
            1u128 << free.len(),
            1u128 << MAX_FREE_SLOTS,
        ));
    }
    for mask in 0u64..(1u64 << free.len()) {
        let mut n = cleared.clone();
        for (j, s) in free.iter().enumerate() {
            if mask >> j & 1 == 1 {
                n.insert(s.sym, &s.tuple).expect("slot");
            }
        }
        if c.is_permitted(&n) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Some permitted amalgam of `b1` and `b2` over their common prefix `[a]`, placed on
/// the labelled union: `b1` keeps its labels and `b2`'s element `i > a` becomes `‖b1‖ + i − a`.
pub fn find_amalgam(c: &ClassSpec, a: usize, b1: &Structure, b2: &Structure) -> Result<Option<Structure>> {
    if a > b1.n() || a > b2.n() {
        return Err(ZolError::validation("common part is larger than a factor"));
    }
    let prefix: Vec<usize> = (1..=a).collect();
    if induced_substructure(b1, &prefix)? != induced_substructure(b2, &prefix)? {
        return Err(ZolError::validation("the factors disagree on the common part"));
    }
    let d = b1.n() + b2.n() - a;
    let vocab = c.vocab().clone();
    let mut free = Structure::empty(vocab.clone(), d);
    let place2 = |i: usize| if i <= a { i } else { b1.n() + i - a };
    for sym in 0..vocab.len() {
        for t in b1.stored_tuples(sym) {
            free.insert(sym, &t)?;
        }
        for t in b2.stored_tuples(sym) {
            let img: Vec<usize> = t.iter().map(|&e| place2(e)).collect();
            free.insert(sym, &img)?;
        }
    }
    if c.is_permitted(&free) {
        return Ok(Some(free));
    }
    if c.is_monotone() {
        return Ok(None);
    }
    let cross: Vec<crate::structures::Slot> = slots(&vocab, d)
        .into_iter()
        .filter(|s| {
            s.tuple.iter().any(|&e| e > a && e <= b1.n()) && s.tuple.iter().any(|&e| e > b1.n())
        })
        .collect();
    if cross.len() > MAX_FREE_SLOTS {
        return Err(ZolError::budget(
            "cross-slot amalgam search",
            1u128 << cross.len().min(127),
            1u128 << MAX_FREE_SLOTS,
        ));
    }
    for mask in 1u64..(1u64 << cross.len()) {
        let mut m = free.clone();
        for (j, s) in cross.iter().enumerate() {
            if mask >> j & 1 == 1 {
                m.insert(s.sym, &s.tuple)?;
            }
        }
        if c.is_permitted(&m) {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// Bounded disjoint amalgamation check over permitted triples with `‖B1‖ + ‖B2‖ − ‖A‖ ≤ max_n`.
///
/// Only the trivial geometry is supported, where independent amalgamation coincides
/// with disjoint amalgamation.
pub fn check_disjoint_amalgamation(c: &ClassSpec, max_n: usize, independent: bool) -> Result<Verdict> {
    if !c.geometry().is_trivial() {
        return Err(ZolError::validation(format!(
            "{} amalgamation is only implemented over the trivial geometry",
            if independent { "independent" } else { "disjoint" }
        )));
    }
    let mut by_size: Vec<Vec<Structure>> = Vec::new();
    for n in 0..=max_n {
        by_size.push(c.enumerate(n)?);
    }
    for a in 0..max_n {
        let prefix: Vec<usize> = (1..=a).collect();
        for base in &by_size[a] {
            for b1n in a + 1..=max_n {
                for b2n in b1n..=max_n {
                    if b1n + b2n - a > max_n {
                        continue;
                    }
                    let ext = |k: usize| -> Vec<&Structure> {
                        by_size[k]
                            .iter()
                            .filter(|s| induced_substructure(s, &prefix).ok().as_ref() == Some(base))
                            .collect()
                    };
                    let e1 = ext(b1n);
                    let e2 = ext(b2n);
                    for (i, b1) in e1.iter().enumerate() {
                        for (j, b2) in e2.iter().enumerate() {
                            if b1n == b2n && j < i {
                                continue;
                            }
                            if find_amalgam(c, a, b1, b2)?.is_none() {
                                return Ok(Verdict::Counterexample {
                                    bound: max_n,
                                    structure: free_amalgam(c, a, b1, b2)?,
                                    site: prefix.clone(),
                                    details: format!(
                                        "no permitted amalgam of B1 = {} and B2 = {} over their first {a} elements",
                                        b1.summary(),
                                        b2.summary()
                                    ),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(Verdict::HoldsUpToBound { bound: max_n })
}

/// The free amalgam on the labelled union, regardless of whether it is permitted.
pub fn free_amalgam(c: &ClassSpec, a: usize, b1: &Structure, b2: &Structure) -> Result<Structure> {
    let d = b1.n() + b2.n() - a;
    let mut free = Structure::empty(c.vocab().clone(), d);
    for sym in 0..c.vocab().len() {
        for t in b1.stored_tuples(sym) {
            free.insert(sym, &t)?;
        }
        for t in b2.stored_tuples(sym) {
            let img: Vec<usize> = t.iter().map(|&e| if e <= a { e } else { b1.n() + e - a }).collect();
            free.insert(sym, &img)?;
        }
    }
    Ok(free)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle_free() -> ClassSpec {
        ClassSpec::forbidden_weak(Vocabulary::graph(), vec![Structure::complete_graph(3)]).unwrap()
    }

    #[test]
    fn triangle_free_counts_match_known_sequence() {
        let c = triangle_free();
        let counts: Vec<usize> = (0..=6).map(|n| c.count(n).unwrap()).collect();
        assert_eq!(counts, vec![1, 1, 2, 7, 41, 388, 5789]);
    }

    #[test]
    fn monotone_enumeration_is_in_bitmask_order() {
        let c = triangle_free();
        let members = c.enumerate(4).unwrap();
        assert!(members.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn coloured_enumeration_matches_filter() {
        let c = ClassSpec::l_coloured(&Vocabulary::graph(), 2, false).unwrap();
        let all = crate::structures::enumerate_structures(c.vocab(), 3, |m| c.is_permitted(m))
            .unwrap()
            .count();
        assert_eq!(c.count(3).unwrap(), all);
        // 2 monochromatic assignments with no edges, 6 split ones with 2 optional edges
        assert_eq!(all, 2 + 6 * 4);
    }

    #[test]
    fn minimal_members() {
        let k3 = Structure::complete_graph(3);
        let k4 = Structure::complete_graph(4);
        assert_eq!(minimal_forbidden(&[k3.clone(), k4]), vec![k3]);
    }
}
