//! Named classes used throughout the tests, the acceptance suite and the CLI.

use std::sync::Arc;

use crate::classes::ClassSpec;
use crate::structures::{Structure, Symbol, Vocabulary};

fn build(vocab: &Arc<Vocabulary>, n: usize, tuples: &[(&str, &[usize])]) -> Structure {
    Structure::from_tuples(vocab.clone(), n, tuples).expect("fixture structure is valid")
}

/// Graphs without a triangle.
pub fn triangle_free() -> ClassSpec {
    ClassSpec::forbidden_weak(Vocabulary::graph(), vec![Structure::complete_graph(3)]).expect("valid")
}

/// Forbidden list of the irreflexive antisymmetric digraphs: a loop, and a pair of opposite arcs.
pub fn oriented_forbidden() -> Vec<Structure> {
    let v = Vocabulary::digraph();
    vec![
        build(&v, 1, &[("R", &[1, 1])]),
        build(&v, 2, &[("R", &[1, 2]), ("R", &[2, 1])]),
    ]
}

/// Irreflexive antisymmetric digraphs.
pub fn oriented_graphs() -> ClassSpec {
    ClassSpec::forbidden_weak(Vocabulary::digraph(), oriented_forbidden()).expect("valid")
}

fn unary_pair_vocab() -> Arc<Vocabulary> {
    Vocabulary::new(vec![Symbol::new("P1", 1), Symbol::new("P2", 1), Symbol::symirr("R", 2)]).expect("valid")
}

/// At most one `P1` element, at most one `P2` element, and never both kinds.
pub fn bounded_unary_pair() -> ClassSpec {
    let v = unary_pair_vocab();
    let f = vec![
        build(&v, 1, &[("P1", &[1]), ("P2", &[1])]),
        build(&v, 2, &[("P1", &[1]), ("P2", &[2])]),
        build(&v, 2, &[("P1", &[1]), ("P1", &[2])]),
        build(&v, 2, &[("P2", &[1]), ("P2", &[2])]),
    ];
    ClassSpec::forbidden_weak(v, f).expect("valid")
}

pub fn restricted_unary_vocab() -> Arc<Vocabulary> {
    Vocabulary::new(vec![Symbol::new("Q", 1), Symbol::symirr("E", 2)]).expect("valid")
}

/// Graphs with a unary predicate `Q` whose elements have no edges.
pub fn restricted_unary_graph() -> ClassSpec {
    let v = restricted_unary_vocab();
    let f = vec![build(&v, 2, &[("Q", &[1]), ("E", &[1, 2])])];
    ClassSpec::forbidden_weak(v, f).expect("valid")
}

/// A symmetric relation with optional colours `P1`, `P2`: no element has both, and no
/// edge joins two elements of the same colour. Blank elements are allowed.
pub fn partially_coloured_relation() -> ClassSpec {
    let v = unary_pair_vocab();
    let f = vec![
        build(&v, 1, &[("P1", &[1]), ("P2", &[1])]),
        build(&v, 2, &[("P1", &[1]), ("P1", &[2]), ("R", &[1, 2])]),
        build(&v, 2, &[("P2", &[1]), ("P2", &[2]), ("R", &[1, 2])]),
    ];
    ClassSpec::forbidden_weak(v, f).expect("valid")
}

/// Graphs properly coloured by the colour predicates `P1`, `P2`.
pub fn coloured_relation() -> ClassSpec {
    ClassSpec::l_coloured(&Vocabulary::graph(), 2, false).expect("valid")
}

/// Complete bipartite graphs, including edgeless ones.
pub fn complete_bipartite() -> ClassSpec {
    let k1_k2 = Structure::graph(3, &[(2, 3)]);
    ClassSpec::forbidden_induced(Vocabulary::graph(), vec![Structure::complete_graph(3), k1_k2]).expect("valid")
}

/// Disjoint unions of complete graphs.
pub fn equivalence_graphs() -> ClassSpec {
    ClassSpec::forbidden_induced(Vocabulary::graph(), vec![path3()]).expect("valid")
}

/// 2-colourable graphs.
pub fn two_colourable_graphs() -> ClassSpec {
    ClassSpec::l_colourable(&Vocabulary::graph(), 2, false).expect("valid")
}

/// Path `1 – 2 – 3`.
pub fn path3() -> Structure {
    Structure::graph(3, &[(1, 2), (2, 3)])
}

/// Path `1 – 3 – 2`, the two-step extension of the nonedge `{1, 2}`.
pub fn two_path_over_nonedge() -> Structure {
    Structure::graph(3, &[(1, 3), (2, 3)])
}

pub fn cycle(n: usize) -> Structure {
    let edges: Vec<(usize, usize)> = (1..=n).map(|i| (i, i % n + 1)).collect();
    Structure::graph(n, &edges)
}

/// Every named fixture with its CLI name.
pub fn catalogue() -> Vec<(&'static str, ClassSpec)> {
    vec![
        ("triangle-free", triangle_free()),
        ("oriented", oriented_graphs()),
        ("bounded-unary", bounded_unary_pair()),
        ("restricted-unary", restricted_unary_graph()),
        ("partially-coloured", partially_coloured_relation()),
        ("coloured-relation", coloured_relation()),
        ("complete-bipartite", complete_bipartite()),
        ("equivalence", equivalence_graphs()),
    ]
}

pub fn by_name(name: &str) -> Option<ClassSpec> {
    catalogue().into_iter().find(|(n, _)| *n == name).map(|(_, c)| c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_element_counts() {
        assert_eq!(bounded_unary_pair().count(1).unwrap(), 3);
        assert_eq!(partially_coloured_relation().count(1).unwrap(), 3);
        assert_eq!(oriented_graphs().count(2).unwrap(), 3);
    }

    #[test]
    fn induced_classes() {
        let cb = complete_bipartite();
        assert!(cb.is_permitted(&cycle(4)));
        assert!(cb.is_permitted(&path3()));
        assert!(!cb.is_permitted(&Structure::graph(4, &[(1, 2), (3, 4)])));
        let eq = equivalence_graphs();
        assert!(eq.is_permitted(&Structure::complete_graph(3)));
        assert!(!eq.is_permitted(&path3()));
    }
}
