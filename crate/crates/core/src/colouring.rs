//! Colourings of relational structures, the gadgets `S` and `U`, the colour-equality
//! formula `ξ`, the palette formula `ζ`, and colour-compatible extension axioms.

use std::ops::ControlFlow;
use std::sync::Arc;

use crate::error::{Result, ZolError};
use crate::structures::{
    induced_substructure, search_embeddings, EmbeddingMode, Mapping, Structure, Vocabulary,
};

/// A total map `[n] → [l]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColourAssignment {
    l: usize,
    colours: Vec<usize>,
}

impl ColourAssignment {
    pub fn new(l: usize, colours: Vec<usize>) -> Result<Self> {
        if l == 0 {
            return Err(ZolError::validation("a colouring needs at least one colour"));
        }
        if let Some(&c) = colours.iter().find(|&&c| c == 0 || c > l) {
            return Err(ZolError::validation(format!("colour {c} outside 1..={l}")));
        }
        Ok(ColourAssignment { l, colours })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn n(&self) -> usize {
        self.colours.len()
    }

    pub fn colours(&self) -> &[usize] {
        &self.colours
    }

    /// Colour of element `x` (1-based).
    pub fn colour(&self, x: usize) -> usize {
        self.colours[x - 1]
    }

    /// `p_i = |γ⁻¹(i)|` for `i = 1..=l`.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut p = vec![0; self.l];
        for &c in &self.colours {
            p[c - 1] += 1;
        }
        p
    }

    /// The induced partition, relabelled by first occurrence.
    pub fn partition(&self) -> Vec<usize> {
        normalize(&self.colours)
    }

    /// Every colour class has at least `m` members.
    pub fn is_rich(&self, m: usize) -> bool {
        self.class_sizes().iter().all(|&p| p >= m)
    }

    /// Every colour class has at least `n / a` members (`a·p ≥ n`).
    pub fn is_rich_fraction(&self, a: usize) -> bool {
        let n = self.n();
        self.class_sizes().iter().all(|&p| a * p >= n)
    }
}

/// Relabels a colour vector so colours appear in order of first occurrence.
pub fn normalize(colours: &[usize]) -> Vec<usize> {
    let mut map: Vec<(usize, usize)> = Vec::new();
    colours
        .iter()
        .map(|&c| match map.iter().find(|(k, _)| *k == c) {
            Some(&(_, v)) => v,
            None => {
                let v = map.len() + 1;
                map.push((c, v));
                v
            }
        })
        .collect()
}

fn tuple_ok(colours: &[usize], t: &[usize], strong: bool) -> bool {
    if strong {
        for i in 0..t.len() {
            for j in i + 1..t.len() {
                if t[i] == t[j] || colours[t[i] - 1] == colours[t[j] - 1] {
                    return false;
                }
            }
        }
        true
    } else {
        let c0 = colours[t[0] - 1];
        t.iter().any(|&x| colours[x - 1] != c0)
    }
}

/// Relational tuples of arity at least 2, grouped by their largest entry.
fn constraints(m: &Structure) -> Vec<Vec<Vec<usize>>> {
    let mut by_max = vec![Vec::new(); m.n() + 1];
    let vocab = m.vocab();
    for sym in vocab.relational_indices() {
        if vocab.symbol(sym).arity < 2 {
            continue;
        }
        for t in m.stored_tuples(sym) {
            let mx = *t.iter().max().expect("arity >= 2");
            by_max[mx].push(t);
        }
    }
    by_max
}

/// Checks that every relational tuple of arity ≥ 2 is multichromatic (rainbow when `strong`).
pub fn is_colouring(m: &Structure, gamma: &ColourAssignment, strong: bool) -> Result<bool> {
    if gamma.n() != m.n() {
        return Err(ZolError::validation(format!(
            "colouring has {} entries for a structure of size {}",
            gamma.n(),
            m.n()
        )));
    }
    Ok(constraints(m)
        .iter()
        .flatten()
        .all(|t| tuple_ok(&gamma.colours, t, strong)))
}

/// Backtracking over colourings of `m` with at most `l` colours.
///
/// With `canonical` set, only restricted-growth vectors are visited, one per partition.
pub fn for_each_colouring(
    m: &Structure,
    l: usize,
    strong: bool,
    canonical: bool,
    visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
) {
    let cons = constraints(m);
    let mut colours = vec![0usize; m.n()];
    fn go(
        x: usize,
        used: usize,
        l: usize,
        strong: bool,
        canonical: bool,
        cons: &[Vec<Vec<usize>>],
        colours: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if x > colours.len() {
            return visit(colours);
        }
        let top = if canonical { (used + 1).min(l) } else { l };
        for c in 1..=top {
            colours[x - 1] = c;
            if cons[x].iter().all(|t| tuple_ok(colours, t, strong)) {
                go(x + 1, used.max(c), l, strong, canonical, cons, colours, visit)?;
            }
        }
        colours[x - 1] = 0;
        ControlFlow::Continue(())
    }
    let _ = go(1, 0, l, strong, canonical, &cons, &mut colours, visit);
}

pub fn enumerate_colourings(m: &Structure, l: usize, strong: bool) -> Vec<ColourAssignment> {
    let mut out = Vec::new();
    for_each_colouring(m, l, strong, false, &mut |c| {
        out.push(ColourAssignment {
            l,
            colours: c.to_vec(),
        });
        ControlFlow::Continue(())
    });
    out
}

pub fn find_colouring(m: &Structure, l: usize, strong: bool) -> Option<ColourAssignment> {
    let mut out = None;
    for_each_colouring(m, l, strong, true, &mut |c| {
        out = Some(ColourAssignment {
            l,
            colours: c.to_vec(),
        });
        ControlFlow::Break(())
    });
    out
}

/// Distinct partitions induced by colourings with at most `l` colours, up to `limit` of them.
pub fn colouring_partitions(m: &Structure, l: usize, strong: bool, limit: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_colouring(m, l, strong, true, &mut |c| {
        out.push(c.to_vec());
        if out.len() >= limit {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    out
}

/// Colourable, and all colourings induce the same partition.
pub fn unique_up_to_permutation(m: &Structure, l: usize, strong: bool) -> bool {
    colouring_partitions(m, l, strong, 2).len() == 1
}

/// Every `l`-colouring of `m` has all classes of size at least `n / a`.
/// Vacuously true for structures that are not colourable.
pub fn all_colourings_rich(m: &Structure, l: usize, strong: bool, a: usize) -> bool {
    let n = m.n();
    let mut ok = true;
    for_each_colouring(m, l, strong, true, &mut |c| {
        let mut p = vec![0usize; l];
        for &x in c {
            p[x - 1] += 1;
        }
        if p.iter().any(|&s| a * s < n) {
            ok = false;
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    ok
}

// ---------------------------------------------------------------------------
// Gadgets
// ---------------------------------------------------------------------------

/// Relational symbol the gadgets are built from.
fn gadget_symbol(vocab: &Vocabulary, l: usize, strong: bool) -> Result<usize> {
    let rel: Vec<usize> = vocab
        .relational_indices()
        .filter(|&i| vocab.symbol(i).arity >= 2)
        .collect();
    if strong {
        rel.into_iter()
            .find(|&i| vocab.symbol(i).arity <= l)
            .ok_or_else(|| ZolError::validation(format!("no relational symbol of arity between 2 and {l}")))
    } else {
        let min = rel
            .iter()
            .map(|&i| vocab.symbol(i).arity)
            .min()
            .ok_or_else(|| ZolError::validation("no relational symbol of arity at least 2"))?;
        Ok(rel.into_iter().find(|&i| vocab.symbol(i).arity == min).expect("minimum exists"))
    }
}

/// Inserts every distinct-entry `r`-tuple over `elems` into `sym`.
fn insert_all_distinct(m: &mut Structure, sym: usize, elems: &[usize]) {
    let r = m.vocab().symbol(sym).arity;
    let mut t = vec![0usize; r];
    fn go(m: &mut Structure, sym: usize, elems: &[usize], t: &mut Vec<usize>, i: usize) {
        if i == t.len() {
            m.insert(sym, t).expect("distinct entries in range");
            return;
        }
        for &e in elems {
            if !t[..i].contains(&e) {
                t[i] = e;
                go(m, sym, elems, t, i + 1);
            }
        }
    }
    go(m, sym, elems, &mut t, 0);
}

/// Calls `f` on every map `[n] → [l]`, as a colour vector.
fn for_each_assignment(n: usize, l: usize, f: &mut dyn FnMut(&[usize])) {
    let mut c = vec![1usize; n];
    loop {
        f(&c);
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if c[i] < l {
                c[i] += 1;
                break;
            }
            c[i] = 1;
        }
    }
}

/// Structure whose colourings all give `a` and `b` the same colour, every colour being possible.
#[derive(Debug, Clone, PartialEq)]
pub struct GadgetS {
    pub structure: Structure,
    pub a: usize,
    pub b: usize,
    pub s: usize,
    pub l: usize,
    pub strong: bool,
}

impl GadgetS {
    pub fn build(vocab: &Vocabulary, l: usize, strong: bool) -> Result<Self> {
        if l < 2 {
            return Err(ZolError::validation("gadgets need at least 2 colours"));
        }
        let rel = vocab.relational();
        let sym = gadget_symbol(&rel, l, strong)?;
        let r = rel.symbol(sym).arity;
        // original labels 0..s-1; 0 becomes s-1, 1 becomes s, the rest shift down by one
        let s = if strong { l + 1 } else { (r - 1) * l + 1 };
        let relabel = |x: usize| match x {
            0 => s - 1,
            1 => s,
            _ => x - 1,
        };
        let without = |skip: usize| -> Vec<usize> { (0..s).filter(|&x| x != skip).map(relabel).collect() };
        let mut m = Structure::empty(rel.clone(), s);
        insert_all_distinct(&mut m, sym, &without(0));
        insert_all_distinct(&mut m, sym, &without(1));
        let g = GadgetS {
            structure: m,
            a: s - 1,
            b: s,
            s,
            l,
            strong,
        };
        g.verify()?;
        Ok(g)
    }

    /// Exhaustive check over all `l^s` assignments.
    pub fn verify(&self) -> Result<()> {
        let mut achieved = vec![false; self.l];
        let mut bad = false;
        let cons = constraints(&self.structure);
        for_each_assignment(self.s, self.l, &mut |c| {
            if cons.iter().flatten().all(|t| tuple_ok(c, t, self.strong)) {
                if c[self.a - 1] != c[self.b - 1] {
                    bad = true;
                }
                achieved[c[self.a - 1] - 1] = true;
            }
        });
        if bad {
            return Err(ZolError::validation("gadget S has a colouring separating a and b"));
        }
        if achieved.iter().any(|&x| !x) {
            return Err(ZolError::validation("gadget S misses a colour on a and b"));
        }
        Ok(())
    }
}

/// Colourable structure that is not colourable with one colour fewer, and which every
/// balanced partition colours.
#[derive(Debug, Clone, PartialEq)]
pub struct GadgetU {
    pub structure: Structure,
    pub u: usize,
    pub canonical_colouring: ColourAssignment,
    /// Same-colour pairs `(i, j)`, `i < j`, under the canonical colouring.
    pub same_colour_pairs: Vec<(usize, usize)>,
    pub l: usize,
    pub strong: bool,
}

impl GadgetU {
    pub fn build(vocab: &Vocabulary, l: usize, strong: bool) -> Result<Self> {
        if l < 2 {
            return Err(ZolError::validation("gadgets need at least 2 colours"));
        }
        let rel = vocab.relational();
        let sym = gadget_symbol(&rel, l, strong)?;
        let r = rel.symbol(sym).arity;
        let u = if strong { l } else { l * (r - 1) };
        let mut m = Structure::empty(rel.clone(), u);
        insert_all_distinct(&mut m, sym, &(1..=u).collect::<Vec<_>>());
        let colours: Vec<usize> = (1..=u).map(|j| (j - 1) % l + 1).collect();
        let mut pairs = Vec::new();
        for i in 1..=u {
            for j in i + 1..=u {
                if colours[i - 1] == colours[j - 1] {
                    pairs.push((i, j));
                }
            }
        }
        let g = GadgetU {
            structure: m,
            u,
            canonical_colouring: ColourAssignment { l, colours },
            same_colour_pairs: pairs,
            l,
            strong,
        };
        g.verify()?;
        Ok(g)
    }

    pub fn verify(&self) -> Result<()> {
        if !is_colouring(&self.structure, &self.canonical_colouring, self.strong)? {
            return Err(ZolError::validation("canonical colouring of U is not a colouring"));
        }
        if find_colouring(&self.structure, self.l - 1, self.strong).is_some() {
            return Err(ZolError::validation("gadget U is colourable with fewer colours"));
        }
        let per = self.u / self.l;
        let cons = constraints(&self.structure);
        let mut bad = false;
        for_each_assignment(self.u, self.l, &mut |c| {
            let mut p = vec![0usize; self.l];
            for &x in c {
                p[x - 1] += 1;
            }
            if p.iter().all(|&s| s == per) && !cons.iter().flatten().all(|t| tuple_ok(c, t, self.strong)) {
                bad = true;
            }
        });
        if bad {
            return Err(ZolError::validation("a balanced partition fails to colour U"));
        }
        Ok(())
    }
}

/// Both gadgets for one vocabulary and colour count.
#[derive(Debug, Clone, PartialEq)]
pub struct Gadgets {
    pub s: GadgetS,
    pub u: GadgetU,
}

impl Gadgets {
    pub fn build(vocab: &Vocabulary, l: usize, strong: bool) -> Result<Self> {
        Ok(Gadgets {
            s: GadgetS::build(vocab, l, strong)?,
            u: GadgetU::build(vocab, l, strong)?,
        })
    }
}

// ---------------------------------------------------------------------------
// ξ and ζ
// ---------------------------------------------------------------------------

fn relational_view(m: &Structure, vocab: &Arc<Vocabulary>) -> Structure {
    if m.vocab() == vocab {
        m.clone()
    } else {
        m.project(vocab.clone())
    }
}

/// The relation `ξ` on `m` as an `n × n` matrix indexed from 0.
pub fn xi_matrix(m: &Structure, s: &GadgetS) -> Vec<Vec<bool>> {
    let view = relational_view(m, s.structure.vocab());
    let n = m.n();
    let mut out = vec![vec![false; n]; n];
    for (i, row) in out.iter_mut().enumerate() {
        row[i] = true;
    }
    search_embeddings(
        &s.structure,
        &view,
        &Mapping::empty(s.s),
        EmbeddingMode::Strong,
        |img| {
            out[img[s.a - 1] - 1][img[s.b - 1] - 1] = true;
            ControlFlow::Continue(())
        },
    );
    out
}

pub fn eval_xi(m: &Structure, x: usize, y: usize, s: &GadgetS) -> bool {
    if x == y {
        return true;
    }
    let view = relational_view(m, s.structure.vocab());
    let Ok(partial) = Mapping::from_pairs(s.s, &[(s.a, x), (s.b, y)]) else {
        return false;
    };
    let mut found = false;
    search_embeddings(&s.structure, &view, &partial, EmbeddingMode::Strong, |_| {
        found = true;
        ControlFlow::Break(())
    });
    found
}

fn zeta_with(xi: &[Vec<bool>], view: &Structure, tuple: &[usize], g: &Gadgets) -> bool {
    let map = Mapping::total(tuple.to_vec());
    if !crate::structures::is_embedding(&map, &g.u.structure, view).unwrap_or(false) {
        return false;
    }
    zeta_pairs_ok(xi, tuple, &g.u)
}

fn zeta_pairs_ok(xi: &[Vec<bool>], tuple: &[usize], u: &GadgetU) -> bool {
    for i in 1..=u.u {
        for j in i + 1..=u.u {
            let want = u.same_colour_pairs.binary_search(&(i, j)).is_ok();
            if xi[tuple[i - 1] - 1][tuple[j - 1] - 1] != want {
                return false;
            }
        }
    }
    true
}

pub fn eval_zeta(m: &Structure, tuple: &[usize], g: &Gadgets) -> Result<bool> {
    if tuple.len() != g.u.u {
        return Err(ZolError::validation(format!(
            "zeta takes {} arguments, got {}",
            g.u.u,
            tuple.len()
        )));
    }
    if tuple.iter().any(|&x| x == 0 || x > m.n()) {
        return Ok(false);
    }
    let view = relational_view(m, g.u.structure.vocab());
    let xi = xi_matrix(m, &g.s);
    Ok(zeta_with(&xi, &view, tuple, g))
}

/// Every tuple satisfying `ζ` in `m`.
pub fn zeta_witnesses(m: &Structure, xi: &[Vec<bool>], g: &Gadgets) -> Vec<Vec<usize>> {
    let view = relational_view(m, g.u.structure.vocab());
    let mut out = Vec::new();
    search_embeddings(
        &g.u.structure,
        &view,
        &Mapping::empty(g.u.u),
        EmbeddingMode::Strong,
        |img| {
            if zeta_pairs_ok(xi, img, &g.u) {
                out.push(img.to_vec());
            }
            ControlFlow::Continue(())
        },
    );
    out
}

/// `ξ` holds in `m` exactly between same-coloured elements of `partition`.
pub fn xi_matches_partition(xi: &[Vec<bool>], partition: &[usize]) -> bool {
    let n = partition.len();
    (0..n).all(|i| (0..n).all(|j| xi[i][j] == (partition[i] == partition[j])))
}

/// Evaluates the colour-compatible `B/A`-extension axiom in `m`, where `A = B↾[‖a‖]`.
///
/// Instances are indexed by the colourings `c = τ∘γ′` of `B`; distinct triples
/// `(γ, γ′, τ)` with the same composite give the same sentence.
pub fn satisfies_colour_compatible_axiom(
    m: &Structure,
    a: &Structure,
    b: &Structure,
    l: usize,
    strong: bool,
    g: &Gadgets,
) -> Result<bool> {
    let rel = g.s.structure.vocab().clone();
    if a.vocab() != &rel || b.vocab() != &rel {
        return Err(ZolError::validation("A and B must be relational structures over the gadget vocabulary"));
    }
    let alpha = a.n();
    if alpha >= b.n() {
        return Err(ZolError::validation("A must be a proper substructure of B"));
    }
    if induced_substructure(b, &(1..=alpha).collect::<Vec<_>>())? != *a {
        return Err(ZolError::validation("A is not the substructure of B on its first elements"));
    }
    let instances = enumerate_colourings(b, l, strong);
    if instances.is_empty() {
        return Err(ZolError::validation(format!("B is not {l}-colourable")));
    }
    let view = relational_view(m, &rel);
    let xi = xi_matrix(m, &g.s);
    let witnesses = zeta_witnesses(m, &xi, g);
    if witnesses.is_empty() {
        return Ok(true);
    }
    let mut copies_of_a = Vec::new();
    search_embeddings(a, &view, &Mapping::empty(alpha), EmbeddingMode::Strong, |img| {
        copies_of_a.push(img.to_vec());
        ControlFlow::Continue(())
    });
    for c in &instances {
        for x in &witnesses {
            let anchor = |j: usize| x[c.colour(j) - 1];
            for y in &copies_of_a {
                if !(1..=alpha).all(|j| xi[anchor(j) - 1][y[j - 1] - 1]) {
                    continue;
                }
                let mut partial_b = Mapping::empty(b.n());
                for j in 1..=alpha {
                    partial_b.set(j, y[j - 1]);
                }
                let mut ok = false;
                search_embeddings(b, &view, &partial_b, EmbeddingMode::Strong, |img| {
                    if (alpha + 1..=b.n()).all(|j| xi[anchor(j) - 1][img[j - 1] - 1]) {
                        ok = true;
                        ControlFlow::Break(())
                    } else {
                        ControlFlow::Continue(())
                    }
                });
                if !ok {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colourings_of_small_graphs() {
        let edge = Structure::graph(2, &[(1, 2)]);
        assert_eq!(enumerate_colourings(&edge, 2, false).len(), 2);
        assert!(unique_up_to_permutation(&edge, 2, false));
        let empty = Structure::graph(2, &[]);
        assert_eq!(enumerate_colourings(&empty, 2, false).len(), 4);
        assert!(!unique_up_to_permutation(&empty, 2, false));
        let c5 = Structure::graph(5, &[(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)]);
        assert!(enumerate_colourings(&c5, 2, false).is_empty());
    }

    #[test]
    fn is_colouring_examples() {
        let k3 = Structure::complete_graph(3);
        let g = ColourAssignment::new(2, vec![1, 2, 1]).unwrap();
        assert!(!is_colouring(&k3, &g, false).unwrap());
        let p = Structure::graph(3, &[(1, 2), (2, 3)]);
        assert!(is_colouring(&p, &g, false).unwrap());
        assert!(is_colouring(&p, &g, true).unwrap());
        let constant = ColourAssignment::new(2, vec![1, 1, 1]).unwrap();
        assert!(!is_colouring(&p, &constant, false).unwrap());
    }

    #[test]
    fn gadget_shapes() {
        let v = Vocabulary::graph();
        let s = GadgetS::build(&v, 2, false).unwrap();
        assert_eq!(s.s, 3);
        assert_eq!(s.structure, Structure::graph(3, &[(1, 2), (1, 3)]));
        assert_eq!(GadgetS::build(&v, 3, false).unwrap().s, 4);
        assert_eq!(GadgetS::build(&v, 3, true).unwrap().s, 4);
        let u = GadgetU::build(&v, 2, false).unwrap();
        assert_eq!(u.u, 2);
        assert!(u.same_colour_pairs.is_empty());
        assert_eq!(GadgetU::build(&v, 3, true).unwrap().u, 3);
    }

    #[test]
    fn xi_on_the_gadget_itself() {
        let g = Gadgets::build(&Vocabulary::graph(), 2, false).unwrap();
        assert!(eval_xi(&g.s.structure, g.s.a, g.s.b, &g.s));
        assert!(eval_xi(&g.s.structure, 1, 1, &g.s));
        assert!(!eval_xi(&g.s.structure, 1, 2, &g.s));
    }

    #[test]
    fn partitions_normalize() {
        assert_eq!(normalize(&[2, 2, 1, 3]), vec![1, 1, 2, 3]);
    }
}
