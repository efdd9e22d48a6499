//! Extension axioms, multiplicities, saturation and substitution images.

use std::collections::HashSet;
use std::ops::ControlFlow;

use crate::classes::ClassSpec;
use crate::error::{Result, ZolError};
use crate::pregeometry::{GeometryKind, Pregeometry};
use crate::structures::{
    canonical_form, for_each_combination, induced_substructure, search_embeddings, substitute_via,
    EmbeddingMode, Mapping, Structure, Symbol, Vocabulary,
};

/// A pair `A ⊂ B` with a fixed inclusion of `A` into `B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionPair {
    small: Structure,
    large: Structure,
    inclusion: Vec<usize>,
}

impl ExtensionPair {
    /// `A = B↾[‖a‖]`: the small structure sits on the first elements of the large one.
    pub fn new(small: Structure, large: Structure) -> Result<Self> {
        let inclusion: Vec<usize> = (1..=small.n()).collect();
        Self::with_inclusion(small, large, inclusion)
    }

    pub fn with_inclusion(small: Structure, large: Structure, inclusion: Vec<usize>) -> Result<Self> {
        if small.vocab() != large.vocab() {
            return Err(ZolError::validation("extension pair mixes vocabularies"));
        }
        if inclusion.len() != small.n() {
            return Err(ZolError::validation("inclusion has the wrong length"));
        }
        if small.n() >= large.n() {
            return Err(ZolError::validation(format!(
                "A must be a proper substructure of B, got sizes {} and {}",
                small.n(),
                large.n()
            )));
        }
        let map = Mapping::total(inclusion.clone());
        if !map.is_injective() || inclusion.iter().any(|&y| y == 0 || y > large.n()) {
            return Err(ZolError::validation("inclusion is not an injection into B"));
        }
        let mut sorted = inclusion.clone();
        sorted.sort_unstable();
        let restricted = induced_substructure(&large, &sorted)?;
        // compare in the inclusion's own order
        let mut rank = vec![0usize; large.n() + 1];
        for (i, &y) in sorted.iter().enumerate() {
            rank[y] = i + 1;
        }
        let perm: Vec<usize> = inclusion.iter().map(|&y| rank[y]).collect();
        if restricted != small.relabel(&perm) {
            return Err(ZolError::validation("A is not the substructure of B induced by the inclusion"));
        }
        Ok(ExtensionPair {
            small,
            large,
            inclusion,
        })
    }

    /// Pair whose small side is `B↾x`, with `x` listed in increasing order.
    pub fn from_subset(large: Structure, x: &[usize]) -> Result<Self> {
        let mut x = x.to_vec();
        x.sort_unstable();
        x.dedup();
        let small = induced_substructure(&large, &x)?;
        Self::with_inclusion(small, large, x)
    }

    pub fn small(&self) -> &Structure {
        &self.small
    }

    pub fn large(&self) -> &Structure {
        &self.large
    }

    pub fn inclusion(&self) -> &[usize] {
        &self.inclusion
    }

    /// The partial map on `B` that agrees with `σ` on the included copy of `A`.
    fn partial_for(&self, sigma: &[usize]) -> Mapping {
        let mut p = Mapping::empty(self.large.n());
        for (j, &b) in self.inclusion.iter().enumerate() {
            p.set(b, sigma[j]);
        }
        p
    }
}

/// Strong embeddings of `a` into `m`, restricted to closed images when the geometry is not trivial.
fn copies(a: &Structure, m: &Structure, g: &Pregeometry) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    search_embeddings(a, m, &Mapping::empty(a.n()), EmbeddingMode::Strong, |img| {
        if g.kind().is_trivial() || g.is_closed(img) {
            out.push(img.to_vec());
        }
        ControlFlow::Continue(())
    });
    out
}

fn for_each_extension(
    p: &ExtensionPair,
    m: &Structure,
    g: &Pregeometry,
    sigma: &[usize],
    mut visit: impl FnMut(&[usize]) -> ControlFlow<()>,
) {
    let partial = p.partial_for(sigma);
    search_embeddings(&p.large, m, &partial, EmbeddingMode::Strong, |img| {
        if g.kind().is_trivial() || g.is_closed(img) {
            visit(img)
        } else {
            ControlFlow::Continue(())
        }
    });
}

fn check_geometry(m: &Structure, g: &Pregeometry) -> Result<()> {
    if g.n() != m.n() {
        return Err(ZolError::validation(format!(
            "geometry has {} elements but the structure has {}",
            g.n(),
            m.n()
        )));
    }
    Ok(())
}

/// Every copy of `A` in `m` extends to a copy of `B`.
pub fn satisfies_extension_axiom(m: &Structure, p: &ExtensionPair, g: &Pregeometry) -> Result<bool> {
    check_geometry(m, g)?;
    for sigma in copies(&p.small, m, g) {
        let mut found = false;
        for_each_extension(p, m, g, &sigma, |_| {
            found = true;
            ControlFlow::Break(())
        });
        if !found {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Largest number of pairwise disjoint sets among `sets`, stopping once `cap` is reached.
fn max_packing(sets: &[u128], cap: usize) -> usize {
    fn go(sets: &[u128], used: u128, count: usize, best: &mut usize, cap: usize, size: u32) {
        if *best >= cap {
            return;
        }
        let rest: Vec<u128> = sets.iter().copied().filter(|&s| s & used == 0).collect();
        if rest.is_empty() {
            *best = (*best).max(count);
            return;
        }
        let union = rest.iter().fold(0u128, |a, &s| a | s);
        let bound = count + rest.len().min((union.count_ones() / size.max(1)) as usize);
        if bound <= *best {
            return;
        }
        let first = rest[0];
        go(&rest[1..], used | first, count + 1, best, cap, size);
        go(&rest[1..], used, count, best, cap, size);
    }
    if sets.is_empty() {
        return 0;
    }
    let size = sets[0].count_ones();
    // greedy lower bound
    let mut used = 0u128;
    let mut best = 0;
    for &s in sets {
        if s & used == 0 {
            used |= s;
            best += 1;
        }
    }
    go(sets, 0, 0, &mut best, cap, size);
    best.min(cap)
}

/// `B/A`-multiplicity of `m`: the minimum, over copies `σ` of `A`, of the largest number of
/// extensions of `σ` to copies of `B` that pairwise meet only in `σ(A)`.
/// `None` when `A` has no copy in `m`, so every multiplicity holds vacuously.
pub fn multiplicity(m: &Structure, p: &ExtensionPair, g: &Pregeometry) -> Result<Option<usize>> {
    check_geometry(m, g)?;
    if m.n() > 128 {
        return Err(ZolError::budget("multiplicity universe", m.n() as u128, 128));
    }
    let mut result: Option<usize> = None;
    for sigma in copies(&p.small, m, g) {
        let mut base = 0u128;
        for &y in &sigma {
            base |= 1u128 << (y - 1);
        }
        let mut sets: HashSet<u128> = HashSet::new();
        for_each_extension(p, m, g, &sigma, |img| {
            let mut s = 0u128;
            for &y in img {
                s |= 1u128 << (y - 1);
            }
            sets.insert(s & !base);
            ControlFlow::Continue(())
        });
        let mut sets: Vec<u128> = sets.into_iter().collect();
        sets.sort_unstable();
        let cap = result.unwrap_or(usize::MAX);
        let here = max_packing(&sets, cap);
        result = Some(result.map_or(here, |r| r.min(here)));
        if result == Some(0) {
            break;
        }
    }
    Ok(result)
}

fn marker_vocab(v: &Vocabulary) -> Result<std::sync::Arc<Vocabulary>> {
    let mut syms: Vec<Symbol> = v.symbols().to_vec();
    let mut name = "in_small".to_string();
    while v.index_of(&name).is_some() {
        name.push('_');
    }
    syms.push(Symbol::new(&name, 1));
    Vocabulary::new(syms)
}

/// Canonical key of `B` with the image of `A` marked.
fn pair_key(p: &ExtensionPair, mv: &std::sync::Arc<Vocabulary>) -> Result<Structure> {
    let mut marked = p.large.project(mv.clone());
    let marker = mv.len() - 1;
    for &y in &p.inclusion {
        marked.insert(marker, &[y])?;
    }
    canonical_form(&marked)
}

/// All `k`-extension pairs of the class, one per isomorphism type of the pair.
///
/// Trivial geometry: permitted `B` with `‖B‖ ≤ k + 1` and every proper subset as `A`.
/// GF(2): permitted `B` on `F_2^d` with `d ≤ k + 1` and every closed proper subset as `A`.
/// Ordered by size of `B`, then by the enumeration order of `B`, then by `A`.
pub fn all_k_extension_pairs(c: &ClassSpec, k: usize) -> Result<Vec<ExtensionPair>> {
    let mv = marker_vocab(c.vocab())?;
    let mut seen: HashSet<Structure> = HashSet::new();
    let mut out = Vec::new();
    let sizes: Vec<usize> = match c.geometry() {
        GeometryKind::Trivial => (1..=k + 1).collect(),
        GeometryKind::Gf2(_) => (0..=k + 1).map(|d| 1usize << d).collect(),
    };
    for bn in sizes {
        let g = c.geometry().on(bn)?;
        let mut seen_b: HashSet<Structure> = HashSet::new();
        for b in c.enumerate(bn)? {
            if g.kind().is_trivial() && !seen_b.insert(canonical_form(&b)?) {
                continue;
            }
            let subsets: Vec<Vec<usize>> = if g.kind().is_trivial() {
                let elems: Vec<usize> = (1..=bn).collect();
                let mut v = Vec::new();
                for size in 0..bn {
                    for_each_combination(&elems, size, &mut |x| v.push(x.to_vec()));
                }
                v
            } else {
                let full = g.dimension(&(1..=bn).collect::<Vec<_>>());
                g.closed_sets(full).into_iter().filter(|x| x.len() < bn).collect()
            };
            for x in subsets {
                let p = ExtensionPair::from_subset(b.clone(), &x)?;
                if seen.insert(pair_key(&p, &mv)?) {
                    out.push(p);
                }
            }
        }
    }
    Ok(out)
}

/// Every permitted pair with `dim A + 1 = dim B ≤ k` has multiplicity at least `m` in `model`.
pub fn is_m_k_saturated(model: &Structure, c: &ClassSpec, m: usize, k: usize) -> Result<bool> {
    if m == 0 || k == 0 {
        return Ok(true);
    }
    let g = c.geometry().on(model.n())?;
    for p in all_k_extension_pairs(c, k - 1)? {
        let gb = c.geometry().on(p.large.n())?;
        let db = gb.dimension(&(1..=p.large.n()).collect::<Vec<_>>());
        let da = gb.dimension(&p.inclusion);
        if da + 1 != db {
            continue;
        }
        if let Some(x) = multiplicity(model, &p, &g)? {
            if x < m {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `M` satisfies every `k`-extension axiom of the class.
pub fn satisfies_all_k_extension_axioms(model: &Structure, pairs: &[ExtensionPair], g: &Pregeometry) -> Result<bool> {
    for p in pairs {
        if !satisfies_extension_axiom(model, p, g)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `Σ(M; S_F ▷ S_P)`: the results of replacing a copy of `s_f` in `m` by `s_p`.
pub fn substitution_images(m: &Structure, s_p: &Structure, s_f: &Structure) -> Result<Vec<Structure>> {
    if s_p.n() != s_f.n() {
        return Err(ZolError::validation(format!(
            "substitution pair has sizes {} and {}",
            s_p.n(),
            s_f.n()
        )));
    }
    let mut out = Vec::new();
    let mut err = None;
    search_embeddings(s_f, m, &Mapping::empty(s_f.n()), EmbeddingMode::Strong, |f| {
        match substitute_via(m, s_p, f) {
            Ok(s) => out.push(s),
            Err(e) => {
                err = Some(e);
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    });
    if let Some(e) = err {
        return Err(e);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vertex_edge() -> ExtensionPair {
        ExtensionPair::new(Structure::graph(1, &[]), Structure::graph(2, &[(1, 2)])).unwrap()
    }

    #[test]
    fn multiplicity_examples() {
        let p = vertex_edge();
        let g5 = Pregeometry::trivial(5);
        assert_eq!(multiplicity(&Structure::graph(5, &[]), &p, &g5).unwrap(), Some(0));
        assert_eq!(multiplicity(&Structure::complete_graph(5), &p, &g5).unwrap(), Some(4));
        let star = Structure::graph(4, &[(1, 2), (1, 3), (1, 4)]);
        assert_eq!(multiplicity(&star, &p, &Pregeometry::trivial(4)).unwrap(), Some(1));
    }

    #[test]
    fn axiom_examples() {
        let k3 = Structure::complete_graph(3);
        assert!(satisfies_extension_axiom(&k3, &vertex_edge(), &Pregeometry::trivial(3)).unwrap());
        let star = Structure::graph(4, &[(1, 2), (1, 3), (1, 4)]);
        let p = ExtensionPair::new(Structure::graph(2, &[(1, 2)]), Structure::complete_graph(3)).unwrap();
        assert!(!satisfies_extension_axiom(&star, &p, &Pregeometry::trivial(4)).unwrap());
    }

    #[test]
    fn degenerate_pair_rejected() {
        let e = Structure::graph(2, &[(1, 2)]);
        assert!(ExtensionPair::new(e.clone(), e).is_err());
    }

    #[test]
    fn all_graph_pairs_up_to_two_elements() {
        let c = ClassSpec::all(Vocabulary::graph());
        assert_eq!(all_k_extension_pairs(&c, 1).unwrap().len(), 5);
        let k0 = all_k_extension_pairs(&c, 0).unwrap();
        assert_eq!(k0.len(), 1);
        assert_eq!(k0[0].small().n(), 0);
    }

    #[test]
    fn packing_is_exact() {
        // three pairwise overlapping sets plus one disjoint from two of them
        let sets = [0b0011, 0b0110, 0b1100, 0b1001];
        assert_eq!(max_packing(&sets, usize::MAX), 2);
    }

    #[test]
    fn substitution_image_examples() {
        let edge = Structure::graph(2, &[(1, 2)]);
        let nonedge = Structure::graph(2, &[]);
        let m = Structure::graph(3, &[(1, 2)]);
        assert_eq!(substitution_images(&m, &nonedge, &edge).unwrap(), vec![Structure::graph(3, &[])]);
        assert!(substitution_images(&Structure::graph(3, &[]), &nonedge, &edge).unwrap().is_empty());
        let two = Structure::graph(4, &[(1, 2), (3, 4)]);
        let imgs = substitution_images(&two, &nonedge, &edge).unwrap();
        assert_eq!(imgs.len(), 2);
        assert!(imgs.iter().all(|s| s.count(0) == 1));
    }
}
