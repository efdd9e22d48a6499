//! Closure and dimension over the universe `1..=n`.
//!
//! Two geometries are supported. The trivial one has `cl(X) = X`. The GF(2)
//! one identifies element `i` with the bit-vector `i - 1` of `F_2^k`, so `n = 2^k`
//! and element 1 is the zero vector; closure is linear span.

use std::fmt;
use std::str::FromStr;

use crate::error::{Result, ZolError};
use crate::structures::Structure;

/// Largest supported GF(2) ambient dimension.
pub const MAX_GF2_DIM: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum GeometryKind {
    #[default]
    Trivial,
    /// Vector space `F_2^k`.
    Gf2(u32),
}

impl GeometryKind {
    /// Geometry of this kind on `n` elements. GF(2) requires `n` to be a power of two;
    /// the ambient dimension recorded in the kind is ignored in favour of `log2 n`.
    pub fn on(&self, n: usize) -> Result<Pregeometry> {
        match self {
            GeometryKind::Trivial => Ok(Pregeometry::trivial(n)),
            GeometryKind::Gf2(_) => {
                if n == 0 || !n.is_power_of_two() {
                    return Err(ZolError::validation(format!(
                        "GF(2) geometry needs a power-of-two universe, got {n}"
                    )));
                }
                Pregeometry::gf2(n.trailing_zeros())
            }
        }
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, GeometryKind::Trivial)
    }

    /// Universe sizes this geometry allows, up to `max_n`.
    pub fn sizes_up_to(&self, max_n: usize) -> Vec<usize> {
        match self {
            GeometryKind::Trivial => (0..=max_n).collect(),
            GeometryKind::Gf2(_) => (0..usize::BITS)
                .map(|k| 1usize << k)
                .take_while(|&n| n <= max_n)
                .collect(),
        }
    }
}

impl fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryKind::Trivial => write!(f, "trivial"),
            GeometryKind::Gf2(k) => write!(f, "gf2:{k}"),
        }
    }
}

impl FromStr for GeometryKind {
    type Err = ZolError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "trivial" {
            return Ok(GeometryKind::Trivial);
        }
        if let Some(k) = s.strip_prefix("gf2:") {
            let k: u32 = k
                .parse()
                .map_err(|_| ZolError::validation(format!("bad GF(2) dimension {k:?}")))?;
            if k > MAX_GF2_DIM {
                return Err(ZolError::validation(format!("GF(2) dimension {k} exceeds {MAX_GF2_DIM}")));
            }
            return Ok(GeometryKind::Gf2(k));
        }
        Err(ZolError::validation(format!(
            "unknown geometry {s:?}; expected `trivial` or `gf2:<k>`"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pregeometry {
    kind: GeometryKind,
    n: usize,
}

impl Pregeometry {
    pub fn trivial(n: usize) -> Self {
        Pregeometry {
            kind: GeometryKind::Trivial,
            n,
        }
    }

    pub fn gf2(k: u32) -> Result<Self> {
        if k > MAX_GF2_DIM {
            return Err(ZolError::validation(format!("GF(2) dimension {k} exceeds {MAX_GF2_DIM}")));
        }
        Ok(Pregeometry {
            kind: GeometryKind::Gf2(k),
            n: 1 << k,
        })
    }

    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Reduced row-echelon basis of the vectors of `x`, one pivot per bit.
    fn basis(x: &[usize]) -> Vec<usize> {
        let mut basis: Vec<usize> = Vec::new();
        for &e in x {
            let mut v = e - 1;
            for &b in &basis {
                v = v.min(v ^ b);
            }
            if v != 0 {
                basis.push(v);
                basis.sort_unstable_by(|a, b| b.cmp(a));
            }
        }
        basis
    }

    pub fn closure(&self, x: &[usize]) -> Vec<usize> {
        match self.kind {
            GeometryKind::Trivial => {
                let mut v = x.to_vec();
                v.sort_unstable();
                v.dedup();
                v
            }
            GeometryKind::Gf2(_) => {
                let basis = Self::basis(x);
                let mut span = vec![0usize];
                for b in basis {
                    let more: Vec<usize> = span.iter().map(|&s| s ^ b).collect();
                    span.extend(more);
                }
                let mut out: Vec<usize> = span.into_iter().map(|v| v + 1).collect();
                out.sort_unstable();
                out
            }
        }
    }

    pub fn dimension(&self, x: &[usize]) -> usize {
        match self.kind {
            GeometryKind::Trivial => {
                let mut v = x.to_vec();
                v.sort_unstable();
                v.dedup();
                v.len()
            }
            GeometryKind::Gf2(_) => Self::basis(x).len(),
        }
    }

    pub fn is_closed(&self, x: &[usize]) -> bool {
        let mut v = x.to_vec();
        v.sort_unstable();
        v.dedup();
        self.closure(&v) == v
    }

    /// `u(d)`: the largest closed set of dimension `d`.
    pub fn bound(&self, d: usize) -> usize {
        match self.kind {
            GeometryKind::Trivial => d,
            GeometryKind::Gf2(_) => 1usize << d,
        }
    }

    /// Closed sets of dimension at most `max_dim`, sorted by size then lexicographically.
    pub fn closed_sets(&self, max_dim: usize) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = match self.kind {
            GeometryKind::Trivial => {
                let mut all = Vec::new();
                let n = self.n;
                for mask in 0u64..(1u64 << n) {
                    if (mask.count_ones() as usize) <= max_dim {
                        all.push((1..=n).filter(|&e| mask >> (e - 1) & 1 == 1).collect());
                    }
                }
                all
            }
            GeometryKind::Gf2(_) => {
                let mut seen: std::collections::BTreeSet<Vec<usize>> = std::collections::BTreeSet::new();
                let mut frontier = vec![vec![1usize]];
                seen.insert(vec![1]);
                for _ in 0..max_dim {
                    let mut next = Vec::new();
                    for s in &frontier {
                        for e in 1..=self.n {
                            if s.binary_search(&e).is_err() {
                                let mut t = s.clone();
                                t.push(e);
                                let c = self.closure(&t);
                                if seen.insert(c.clone()) {
                                    next.push(c);
                                }
                            }
                        }
                    }
                    frontier = next;
                }
                seen.into_iter().collect()
            }
        };
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }
}

/// The `d`-dimensional reduct: colour predicates stay; any other relationship survives
/// only when the dimension of its range is at most `d`.
pub fn d_reduct(m: &Structure, g: &Pregeometry, d: usize) -> Structure {
    let vocab = m.vocab().clone();
    let mut out = Structure::empty(vocab.clone(), m.n());
    for sym in 0..vocab.len() {
        let keep_all = vocab.symbol(sym).colour_predicate;
        for t in m.stored_tuples(sym) {
            if keep_all || g.dimension(&t) <= d {
                out.insert(sym, &t).expect("tuple from a valid structure");
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf2_span_and_rank() {
        let g = Pregeometry::gf2(2).unwrap();
        assert_eq!(g.closure(&[2, 3]), vec![1, 2, 3, 4]);
        assert_eq!(g.closure(&[]), vec![1]);
        assert_eq!(g.dimension(&[2, 3, 4]), 2);
        assert_eq!(g.dimension(&g.closure(&[])), 0);
    }

    #[test]
    fn gf2_closed_sets_are_subspaces() {
        let g = Pregeometry::gf2(2).unwrap();
        assert_eq!(
            g.closed_sets(1),
            vec![vec![1], vec![1, 2], vec![1, 3], vec![1, 4]]
        );
        assert_eq!(g.closed_sets(2).len(), 5);
        assert_eq!(Pregeometry::trivial(3).closed_sets(3).len(), 8);
    }

    #[test]
    fn parse_kinds() {
        assert_eq!("trivial".parse::<GeometryKind>().unwrap(), GeometryKind::Trivial);
        assert_eq!("gf2:3".parse::<GeometryKind>().unwrap(), GeometryKind::Gf2(3));
        assert!("gf3:1".parse::<GeometryKind>().is_err());
    }
}
