//! Property tests for the structural invariants.

use std::sync::Arc;

use proptest::prelude::*;
use zol_core::axioms::{multiplicity, ExtensionPair};
use zol_core::structures::{
    are_isomorphic, is_embedding, slots, structure_from_mask, Slot,
};
use zol_core::*;

fn random_structure(vocab: Arc<Vocabulary>, max_n: usize) -> impl Strategy<Value = Structure> {
    (0..=max_n).prop_flat_map(move |n| {
        let v = vocab.clone();
        let s: Vec<Slot> = slots(&v, n);
        let bits = s.len();
        any::<u64>().prop_map(move |mask| {
            let mask = if bits >= 64 { mask } else { mask & ((1u64 << bits) - 1) };
            structure_from_mask(&v, n, &s, mask)
        })
    })
}

fn mixed_vocab() -> Arc<Vocabulary> {
    Vocabulary::new(vec![Symbol::new("P", 1), Symbol::new("R", 2), Symbol::symirr("E", 2)]).unwrap()
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((1..=n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialize_round_trip(m in random_structure(mixed_vocab(), 5)) {
        let text = serialize_structure("m", &m);
        prop_assert_eq!(parse_structure(&text, m.vocab()).unwrap(), m);
    }

    #[test]
    fn canonical_form_is_invariant(
        (m, perm) in random_structure(mixed_vocab(), 5).prop_flat_map(|m| {
            let n = m.n();
            (Just(m), permutation(n))
        })
    ) {
        let c = canonical_form(&m).unwrap();
        prop_assert!(are_isomorphic(&c, &m));
        prop_assert_eq!(canonical_form(&m.relabel(&perm)).unwrap(), c);
    }

    #[test]
    fn substitution_is_an_involution(
        (m, b, site) in random_structure(Vocabulary::graph(), 6)
            .prop_filter("needs two elements", |m| m.n() >= 2)
            .prop_flat_map(|m| {
                let n = m.n();
                (Just(m), random_structure(Vocabulary::graph(), 2).prop_filter("size 2", |b| b.n() == 2),
                 proptest::sample::subsequence((1..=n).collect::<Vec<_>>(), 2))
            })
    ) {
        let old = induced_substructure(&m, &site).unwrap();
        let once = substitute(&m, &b, &site).unwrap();
        prop_assert_eq!(induced_substructure(&once, &site).unwrap(), b.clone());
        prop_assert_eq!(substitute(&once, &old, &site).unwrap(), m);
    }

    #[test]
    fn embeddings_compose(
        c in random_structure(Vocabulary::digraph(), 5).prop_filter("nonempty", |c| c.n() >= 2),
        seed in any::<u64>(),
    ) {
        // B = C↾y and A = B↾x give embeddings A → B → C whose composite must embed.
        let n = c.n();
        let y: Vec<usize> = (1..=n).filter(|i| (seed >> i) & 1 == 1 || *i == 1).collect();
        let b = induced_substructure(&c, &y).unwrap();
        let x: Vec<usize> = (1..=b.n()).filter(|i| (seed >> (i + 8)) & 1 == 1 || *i == 1).collect();
        let a = induced_substructure(&b, &x).unwrap();
        let f = Mapping::total(x.clone());
        let g = Mapping::total(y.clone());
        prop_assert!(is_embedding(&f, &a, &b).unwrap());
        prop_assert!(is_embedding(&g, &b, &c).unwrap());
        prop_assert!(is_embedding(&f.then(&g), &a, &c).unwrap());
    }

    #[test]
    fn embedding_iff_isomorphic_onto_image(
        a in random_structure(Vocabulary::graph(), 3).prop_filter("nonempty", |a| a.n() >= 1),
        m in random_structure(Vocabulary::graph(), 5),
        seed in any::<u64>(),
    ) {
        prop_assume!(a.n() <= m.n());
        let mut pool: Vec<usize> = (1..=m.n()).collect();
        let mut s = seed;
        let mut img = Vec::new();
        for _ in 0..a.n() {
            let i = (s % pool.len() as u64) as usize;
            s /= 7;
            img.push(pool.remove(i));
        }
        let f = Mapping::total(img.clone());
        let emb = is_embedding(&f, &a, &m).unwrap();
        let mut sorted = img.clone();
        sorted.sort_unstable();
        let sub = induced_substructure(&m, &sorted).unwrap();
        let rank: Vec<usize> = img.iter().map(|y| sorted.iter().position(|z| z == y).unwrap() + 1).collect();
        prop_assert_eq!(emb, a.relabel(&rank) == sub);
    }

    #[test]
    fn reduct_chain_is_coherent(mask in any::<u64>(), d in 0usize..3) {
        let g = Pregeometry::gf2(2).unwrap();
        let v = Vocabulary::new(vec![Symbol::new("U", 1), Symbol::symirr("E", 2)]).unwrap();
        let s = slots(&v, 4);
        let m = structure_from_mask(&v, 4, &s, mask & ((1 << s.len()) - 1));
        let lower = d_reduct(&m, &g, d);
        let upper = d_reduct(&m, &g, d + 1);
        prop_assert_eq!(d_reduct(&upper, &g, d), lower.clone());
        for sym in 0..v.len() {
            for t in lower.tuples(sym) {
                prop_assert!(upper.holds(sym, &t));
            }
        }
    }

    #[test]
    fn gf2_exchange_and_bound(x in proptest::collection::vec(1usize..=16, 0..4), a in 1usize..=16, b in 1usize..=16) {
        let g = Pregeometry::gf2(4).unwrap();
        let cx = g.closure(&x);
        let mut xb = x.clone();
        xb.push(b);
        let mut xa = x.clone();
        xa.push(a);
        if g.closure(&xb).contains(&a) && !cx.contains(&a) {
            prop_assert!(g.closure(&xa).contains(&b));
        }
        prop_assert!(cx.len() <= g.bound(g.dimension(&x)));
    }

    #[test]
    fn removing_a_used_tuple_never_raises_multiplicity(
        m in random_structure(Vocabulary::graph(), 6).prop_filter("has an edge", |m| m.relational_tuple_count() > 0),
        pick in any::<usize>(),
    ) {
        // A has no relations and B is complete outside A, so every image tuple of B uses E.
        let g = Pregeometry::trivial(m.n());
        let p = ExtensionPair::new(Structure::graph(1, &[]), Structure::graph(2, &[(1, 2)])).unwrap();
        let edges = m.stored_tuples(0);
        let e = &edges[pick % edges.len()];
        let mut smaller = m.clone();
        smaller.remove(0, e);
        let before = multiplicity(&m, &p, &g).unwrap();
        let after = multiplicity(&smaller, &p, &g).unwrap();
        prop_assert!(after <= before);
    }
}

#[test]
fn forbidden_weak_classes_are_hereditary() {
    for c in [zol_core::fixtures::triangle_free(), zol_core::fixtures::oriented_graphs()] {
        for n in 0..=5 {
            for m in c.enumerate(n).unwrap() {
                for k in 0..n {
                    let x: Vec<usize> = (1..=n).filter(|&i| i != k + 1).collect();
                    assert!(c.is_permitted(&induced_substructure(&m, &x).unwrap()));
                }
            }
        }
    }
}
