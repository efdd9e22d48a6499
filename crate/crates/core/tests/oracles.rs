//! Library results against independent brute-force computations and worked examples.

use num::{BigInt, BigRational, One};
use zol_core::axioms::{all_k_extension_pairs, is_m_k_saturated, ExtensionPair};
use zol_core::classes::colours_of;
use zol_core::colouring::{
    enumerate_colourings, satisfies_colour_compatible_axiom, unique_up_to_permutation, Gadgets,
};
use zol_core::fixtures;
use zol_core::measures::{delta_structure_prob, sample_colourable, DeltaTable};
use zol_core::structures::{embeds, slots};
use zol_core::*;

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn injections(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn go(n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for y in 1..=n {
            if !cur.contains(&y) {
                cur.push(y);
                go(n, k, cur, f);
                cur.pop();
            }
        }
    }
    go(n, k, &mut Vec::new(), f);
}

fn all_tuples(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|t| {
                (1..=n).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

/// Every tuple over `a` holds in `a` exactly when its image holds in `m`.
fn brute_embeds(f: &[usize], a: &Structure, m: &Structure) -> bool {
    (0..a.vocab().len()).all(|sym| {
        let r = a.vocab().symbol(sym).arity;
        all_tuples(a.n(), r).iter().all(|t| {
            let img: Vec<usize> = t.iter().map(|&x| f[x - 1]).collect();
            a.holds(sym, t) == m.holds(sym, &img)
        })
    })
}

/// Plain extension-axiom semantics by exhaustive search over injections.
fn brute_axiom(m: &Structure, a: &Structure, b: &Structure) -> bool {
    let mut ok = true;
    injections(m.n(), a.n(), &mut |f| {
        if !ok || !brute_embeds(f, a, m) {
            return;
        }
        let mut found = false;
        injections(m.n(), b.n(), &mut |h| {
            if !found && h[..a.n()] == *f && brute_embeds(h, b, m) {
                found = true;
            }
        });
        ok = found;
    });
    ok
}

#[test]
fn trivial_geometry_axioms_match_brute_force() {
    let c = ClassSpec::all(Vocabulary::graph());
    let pairs: Vec<(Structure, Structure)> = all_k_extension_pairs(&c, 2)
        .unwrap()
        .iter()
        .map(|p| {
            // put A first so the brute-force check can use prefixes
            let b = p.large();
            let mut perm = vec![0; b.n()];
            let mut next = 1;
            for &y in p.inclusion() {
                perm[y - 1] = next;
                next += 1;
            }
            for v in perm.iter_mut().filter(|v| **v == 0) {
                *v = next;
                next += 1;
            }
            let b2 = b.relabel(&perm);
            let a2 = induced_substructure(&b2, &(1..=p.small().n()).collect::<Vec<_>>()).unwrap();
            (a2, b2)
        })
        .collect();
    assert!(pairs.iter().any(|(_, b)| b.n() == 3));
    for n in 0..=4 {
        let g = Pregeometry::trivial(n);
        for m in c.enumerate(n).unwrap() {
            for (a, b) in &pairs {
                let p = ExtensionPair::new(a.clone(), b.clone()).unwrap();
                assert_eq!(
                    satisfies_extension_axiom(&m, &p, &g).unwrap(),
                    brute_axiom(&m, a, b),
                    "{} with {} -> {}",
                    m.summary(),
                    a.summary(),
                    b.summary()
                );
            }
        }
    }
}

#[test]
fn pairwise_formulas_match_enumeration() {
    for c in [fixtures::oriented_graphs(), ClassSpec::all(Vocabulary::graph())] {
        let model = PairwiseModel::new(&c).unwrap();
        for p in all_k_extension_pairs(&c, 1).unwrap() {
            for n in 0..=5 {
                let g = Pregeometry::trivial(n);
                let exact = exact_probability(&c, n, |s| satisfies_extension_axiom(&s.full, &p, &g), MeasureKind::Uniform)
                    .unwrap();
                assert_eq!(
                    exact.exact_value().unwrap(),
                    &model.axiom_probability(n, &p).unwrap(),
                    "{} -> {} at n={n}",
                    p.small().summary(),
                    p.large().summary()
                );
            }
        }
    }
}

#[test]
fn pairwise_model_rejects_larger_forbidden_structures() {
    assert!(PairwiseModel::new(&fixtures::triangle_free()).is_err());
}

#[test]
fn restricted_unary_examples() {
    let c = fixtures::restricted_unary_graph();
    let v = fixtures::restricted_unary_vocab();
    let blank = Structure::empty(v.clone(), 2);
    assert_eq!(delta_structure_prob(&c, &blank).unwrap(), q(1, 8));
    let ev = PreparedEvent::new(&EventSpec::UnaryEmpty("Q".into()), &c).unwrap();
    let uniform = exact_probability(&c, 2, |s| ev.eval(s), MeasureKind::Uniform).unwrap();
    assert_eq!(uniform.exact_value().unwrap(), &q(2, 5));
    let delta = exact_probability(&c, 3, |s| ev.eval(s), MeasureKind::Delta).unwrap();
    assert_eq!(delta.exact_value().unwrap(), &q(1, 8));
    let always = exact_probability(&c, 3, |_| Ok(true), MeasureKind::Delta).unwrap();
    assert!(always.exact_value().unwrap().is_one());
}

#[test]
fn delta_equals_uniform_for_the_full_class() {
    for vocab in [Vocabulary::graph(), Vocabulary::digraph()] {
        let c = ClassSpec::all(vocab.clone());
        for n in 0..=3 {
            let t = DeltaTable::build(&c, n).unwrap();
            let uniform = q(1, 1i64 << slots(&vocab, n).len());
            for i in 0..t.members().len() {
                assert_eq!(t.member_prob(i), uniform);
            }
        }
    }
}

#[test]
fn level_mass_equals_expansion_mass() {
    for (name, c) in zol_core::verify::measure_classes().unwrap() {
        let gc = c.cover().unwrap_or(c);
        for n in [1, 2, 4] {
            let t = DeltaTable::build(&gc, n).unwrap();
            for r in 0..t.levels() {
                for key in t.level_keys(r) {
                    assert_eq!(
                        t.level_prob(r, key),
                        t.expansion_mass(r, key),
                        "{name} n={n} level {r}"
                    );
                }
            }
        }
    }
}

#[test]
fn colourable_samples_are_colourable() {
    let c = fixtures::two_colourable_graphs();
    let c5 = fixtures::cycle(5);
    for seed in 0..300 {
        let m = sample_colourable(&c, 5, seed).unwrap();
        assert!(!enumerate_colourings(&m, 2, false).is_empty());
        assert_ne!(m, c5);
        assert!(!embeds(&c5, &m, EmbeddingMode::Strong));
    }
}

#[test]
fn colour_class_sizes_are_binomial() {
    let c = ClassSpec::l_coloured(&Vocabulary::graph(), 2, false).unwrap();
    let sampler = Sampler::new(&c, 30, MeasureKind::Delta).unwrap();
    let draws = 10_000u64;
    let mut total = 0usize;
    let mut sq = 0f64;
    for i in 0..draws {
        let s = sampler.sample_at(99, i);
        let ones = colours_of(&s.full).unwrap().iter().filter(|&&x| x == 1).count();
        total += ones;
        sq += (ones as f64 - 15.0).powi(2);
    }
    let mean = total as f64 / draws as f64;
    let var = sq / draws as f64;
    assert!((mean - 15.0).abs() < 3.0 * (7.5f64 / draws as f64).sqrt(), "mean {mean}");
    assert!((var - 7.5).abs() < 0.5, "variance {var}");
}

#[test]
fn monte_carlo_contracts() {
    let c = ClassSpec::all(Vocabulary::graph());
    let sampler = Sampler::new(&c, 3, MeasureKind::Delta).unwrap();
    let always = monte_carlo(|_| Ok(true), &sampler, 500, 1).unwrap();
    assert_eq!(always.estimate(), 1.0);
    assert_eq!(always.ci.unwrap().1, 1.0);
    let slot = |s: &Sample| Ok(s.full.holds(0, &[1, 2]));
    let a = monte_carlo(slot, &sampler, 10_000, 5).unwrap();
    let (lo, hi) = a.ci.unwrap();
    assert!(lo <= 0.5 && 0.5 <= hi, "{lo} {hi}");
    assert_eq!(monte_carlo(slot, &sampler, 10_000, 5).unwrap(), a);
    assert!(monte_carlo(slot, &sampler, 0, 5).is_err());
}

#[test]
fn saturation_of_k5() {
    // The vertex-to-nonedge pair has multiplicity 0 in a complete graph.
    let all = ClassSpec::all(Vocabulary::graph());
    assert!(!is_m_k_saturated(&Structure::complete_graph(5), &all, 3, 2).unwrap());
    let p = ExtensionPair::new(Structure::graph(1, &[]), Structure::graph(2, &[(1, 2)])).unwrap();
    assert_eq!(
        multiplicity(&Structure::complete_graph(5), &p, &Pregeometry::trivial(5)).unwrap(),
        Some(4)
    );
}

#[test]
fn colour_compatible_examples() {
    let g = Vocabulary::graph();
    let gadgets = Gadgets::build(&g, 2, false).unwrap();
    let empty = Structure::graph(0, &[]);
    let vertex = Structure::graph(1, &[]);
    let c4 = fixtures::cycle(4);
    assert!(satisfies_colour_compatible_axiom(&c4, &empty, &vertex, 2, false, &gadgets).unwrap());
    let edge = Structure::graph(2, &[(1, 2)]);
    let pair = Structure::graph(2, &[]);
    assert!(!satisfies_colour_compatible_axiom(&edge, &vertex, &pair, 2, false, &gadgets).unwrap());
    let c5 = fixtures::cycle(5);
    assert!(satisfies_colour_compatible_axiom(&edge, &vertex, &c5, 2, false, &gadgets).is_err());
}

#[test]
fn uniquely_colourable_examples() {
    assert!(unique_up_to_permutation(&fixtures::cycle(6), 2, false));
    assert!(!unique_up_to_permutation(&Structure::graph(4, &[(1, 2), (3, 4)]), 2, false));
}

#[test]
fn three_extension_axioms_respect_the_bound() {
    let c = fixtures::triangle_free();
    let (_, bound) = zol_core::classes::alpha_bound(&c, 2).unwrap();
    let ev = PreparedEvent::new(&EventSpec::AllKExt(3), &c).unwrap();
    for n in 3..=7 {
        let r = exact_probability(&c, n, |s| ev.eval(s), MeasureKind::Uniform).unwrap();
        assert!(r.exact_value().unwrap() <= &bound, "n={n}");
    }
}
