//! Closed forms for the uniform probability of 1-extension axioms in classes determined
//! by their two-element substructures.
//!
//! When every forbidden structure has at most two elements and there is a single
//! one-element structure, a uniform member of `K_n` is an independent uniform choice
//! of labelled two-element type for each pair `x < y`. Inclusion–exclusion over the
//! set of elements lacking a witness then gives the probabilities below exactly.

use num::{BigInt, BigRational, One, Zero};

use crate::axioms::ExtensionPair;
use crate::classes::{ClassRule, ClassSpec};
use crate::counting::binomial;
use crate::error::{Result, ZolError};
use crate::structures::Structure;

#[derive(Debug, Clone)]
pub struct PairwiseModel {
    types: Vec<Structure>,
}

fn rat(a: u128, b: u128) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn pow(x: &BigRational, e: u128) -> BigRational {
    let mut r = BigRational::one();
    for _ in 0..e {
        r *= x;
    }
    r
}

impl PairwiseModel {
    pub fn new(c: &ClassSpec) -> Result<Self> {
        let small = match c.rule() {
            ClassRule::All => true,
            ClassRule::ForbiddenWeak(f) | ClassRule::ForbiddenInduced(f) => f.iter().all(|s| s.n() <= 2),
            _ => false,
        };
        if !small || !c.geometry().is_trivial() {
            return Err(ZolError::validation(format!(
                "{c} is not determined by two-element substructures"
            )));
        }
        if c.count(1)? != 1 {
            return Err(ZolError::validation("the pairwise formulas need exactly one one-element structure"));
        }
        Ok(PairwiseModel { types: c.enumerate(2)? })
    }

    pub fn type_count(&self) -> usize {
        self.types.len()
    }

    /// Uniform probability that every element extends to a copy of `b` (a two-element
    /// structure whose first element is the copy of the vertex).
    pub fn vertex_axiom(&self, n: usize, b: &Structure) -> Result<BigRational> {
        if b.n() != 2 {
            return Err(ZolError::validation("the extension must have two elements"));
        }
        let t = self.types.len() as u128;
        let swapped = b.relabel(&[2, 1]);
        let forms = if swapped == *b { 1 } else { 2 };
        if !self.types.contains(b) {
            return Ok(if n == 0 { BigRational::one() } else { BigRational::zero() });
        }
        let miss = rat(t - 1, t);
        let both_miss = rat(t - forms, t);
        let n = n as u128;
        let mut total = BigRational::zero();
        for j in 0..=n {
            let term = BigRational::from_integer(BigInt::from(binomial(n, j)))
                * pow(&both_miss, binomial(j, 2))
                * pow(&miss, j * (n - j));
            if j % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        Ok(total)
    }

    /// Uniform probability that some pair forms a copy of `b`.
    pub fn empty_axiom(&self, n: usize, b: &Structure) -> Result<BigRational> {
        if b.n() != 2 {
            return Err(ZolError::validation("the extension must have two elements"));
        }
        let t = self.types.len() as u128;
        let swapped = b.relabel(&[2, 1]);
        let hits = self.types.iter().filter(|s| **s == *b || **s == swapped).count() as u128;
        Ok(BigRational::one() - pow(&rat(t - hits, t), binomial(n as u128, 2)))
    }

    /// Exact uniform probability of a 1-extension axiom whose large side has at most two elements.
    pub fn axiom_probability(&self, n: usize, p: &ExtensionPair) -> Result<BigRational> {
        match (p.small().n(), p.large().n()) {
            (0, 1) => Ok(if n >= 1 { BigRational::one() } else { BigRational::zero() }),
            (0, 2) => self.empty_axiom(n, p.large()),
            (1, 2) => {
                let b = if p.inclusion() == [1] {
                    p.large().clone()
                } else {
                    p.large().relabel(&[2, 1])
                };
                self.vertex_axiom(n, &b)
            }
            _ => Err(ZolError::validation("only axioms with at most two elements have closed forms")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::oriented_graphs;
    use crate::structures::Vocabulary;

    #[test]
    fn no_sink_probability_small() {
        let m = PairwiseModel::new(&oriented_graphs()).unwrap();
        let v = Vocabulary::digraph();
        let out = Structure::from_tuples(v, 2, &[("R", &[1, 2])]).unwrap();
        // n = 2: exactly the two single-arc structures leave a sink; none has no sink
        assert_eq!(m.vertex_axiom(2, &out).unwrap(), BigRational::zero());
    }
}
