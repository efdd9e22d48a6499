//! Counting multichromatic tuples and sets for a colouring `γ : [n] → [l]`, and the
//! inequalities that bound those counts for colourings with a small colour class.
//!
//! Every function takes the class sizes `p = (p_1, …, p_l)`; `n` is their sum.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, ZolError};

fn n_of(p: &[usize]) -> u128 {
    p.iter().map(|&x| x as u128).sum()
}

fn check_m(m: usize) -> Result<()> {
    if m < 2 {
        return Err(ZolError::validation(format!("tuple length must be at least 2, got {m}")));
    }
    Ok(())
}

pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Ordered `m`-tuples (repetition allowed) that are not monochromatic: `n^m − Σ p_i^m`.
pub fn mult(p: &[usize], m: usize) -> Result<u128> {
    check_m(m)?;
    let n = n_of(p);
    Ok(n.pow(m as u32) - p.iter().map(|&x| (x as u128).pow(m as u32)).sum::<u128>())
}

/// Surjections from `k` positions onto `i` values.
pub fn perm(i: usize, k: usize) -> Result<u128> {
    if i < 1 || i > k {
        return Err(ZolError::validation(format!("perm({i}, {k}) needs 1 <= i <= k")));
    }
    let mut total: i128 = 0;
    for j in 0..=i {
        let term = binomial(i as u128, j as u128) as i128 * ((i - j) as i128).pow(k as u32);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    Ok(total as u128)
}

/// `k`-subsets that are not monochromatic: `C(n,k) − Σ C(p_i,k)`.
pub fn overline_mult(p: &[usize], k: usize) -> Result<u128> {
    check_m(k)?;
    let n = n_of(p);
    Ok(binomial(n, k as u128) - p.iter().map(|&x| binomial(x as u128, k as u128)).sum::<u128>())
}

/// `m`-subsets meeting `m` distinct colours: the elementary symmetric polynomial `e_m(p)`.
pub fn overline_smult(p: &[usize], m: usize) -> Result<u128> {
    check_m(m)?;
    let mut e = vec![0u128; m + 1];
    e[0] = 1;
    for &x in p {
        for j in (1..=m).rev() {
            e[j] += e[j - 1] * x as u128;
        }
    }
    Ok(e[m])
}

/// Ordered rainbow `m`-tuples: `m! · e_m(p)`.
pub fn smult(p: &[usize], m: usize) -> Result<u128> {
    Ok((1..=m as u128).product::<u128>() * overline_smult(p, m)?)
}

/// Brute-force counterparts over an explicit colour vector.
pub mod oracle {
    use crate::structures::for_each_combination;

    fn for_each_tuple(n: usize, m: usize, f: &mut dyn FnMut(&[usize])) {
        let mut t = vec![1usize; m];
        if n == 0 {
            return;
        }
        loop {
            f(&t);
            let mut i = m;
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                if t[i] < n {
                    t[i] += 1;
                    break;
                }
                t[i] = 1;
            }
        }
    }

    fn monochromatic(gamma: &[usize], t: &[usize]) -> bool {
        t.iter().all(|&x| gamma[x - 1] == gamma[t[0] - 1])
    }

    fn rainbow(gamma: &[usize], t: &[usize]) -> bool {
        (0..t.len()).all(|i| (i + 1..t.len()).all(|j| t[i] != t[j] && gamma[t[i] - 1] != gamma[t[j] - 1]))
    }

    pub fn mult(gamma: &[usize], m: usize) -> u128 {
        let mut k = 0;
        for_each_tuple(gamma.len(), m, &mut |t| {
            if !monochromatic(gamma, t) {
                k += 1;
            }
        });
        k
    }

    pub fn smult(gamma: &[usize], m: usize) -> u128 {
        let mut k = 0;
        for_each_tuple(gamma.len(), m, &mut |t| {
            if rainbow(gamma, t) {
                k += 1;
            }
        });
        k
    }

    pub fn overline_mult(gamma: &[usize], m: usize) -> u128 {
        let elems: Vec<usize> = (1..=gamma.len()).collect();
        let mut k = 0;
        for_each_combination(&elems, m, &mut |s| {
            if !monochromatic(gamma, s) {
                k += 1;
            }
        });
        k
    }

    pub fn overline_smult(gamma: &[usize], m: usize) -> u128 {
        let elems: Vec<usize> = (1..=gamma.len()).collect();
        let mut k = 0;
        for_each_combination(&elems, m, &mut |s| {
            if rainbow(gamma, s) {
                k += 1;
            }
        });
        k
    }

    /// Surjections `[k] → [i]`, counted directly.
    pub fn perm(i: usize, k: usize) -> u128 {
        let mut c = 0;
        for_each_tuple(i, k, &mut |t| {
            if (1..=i).all(|v| t.contains(&v)) {
                c += 1;
            }
        });
        c
    }
}

/// Class sizes of a colour vector over `l` colours.
pub fn class_sizes(gamma: &[usize], l: usize) -> Vec<usize> {
    let mut p = vec![0; l];
    for &c in gamma {
        p[c - 1] += 1;
    }
    p
}

fn rat(n: i128) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn frac(a: u128, b: u128) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn pow(x: &BigRational, e: usize) -> BigRational {
    let mut r = BigRational::one();
    for _ in 0..e {
        r *= x;
    }
    r
}

/// Smallest `a > l` with `((a−1)/a)^m / (l−1)^{m−1} > 1 / l^{m−1}` for all `2 ≤ m ≤ max_arity`.
pub fn richness_threshold(l: usize, max_arity: usize) -> usize {
    assert!(l >= 2, "need at least two colours");
    let ok = |a: usize| {
        (2..=max_arity).all(|m| {
            let lhs = pow(&frac(a as u128 - 1, a as u128), m) / pow(&rat(l as i128 - 1), m - 1);
            let rhs = BigRational::one() / pow(&rat(l as i128), m - 1);
            lhs > rhs
        })
    };
    (l + 1..).find(|&a| ok(a)).expect("the left side tends to 1/(l-1)^(m-1)")
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundOutcome {
    Holds { lhs: BigRational, rhs: BigRational },
    Violated { lhs: BigRational, rhs: BigRational },
    Inapplicable(String),
}

impl BoundOutcome {
    fn compare(lhs: BigRational, rhs: BigRational) -> Self {
        if lhs <= rhs {
            BoundOutcome::Holds { lhs, rhs }
        } else {
            BoundOutcome::Violated { lhs, rhs }
        }
    }

    pub fn is_violated(&self) -> bool {
        matches!(self, BoundOutcome::Violated { .. })
    }
}

/// Some class has fewer than `n / a` members.
pub fn is_not_rich(p: &[usize], a: usize) -> bool {
    let n = n_of(p);
    p.iter().any(|&x| (a as u128) * (x as u128) < n)
}

fn require_not_rich(p: &[usize], a: usize) -> Option<BoundOutcome> {
    if is_not_rich(p, a) {
        None
    } else {
        Some(BoundOutcome::Inapplicable(format!(
            "every colour class has at least n/{a} members"
        )))
    }
}

/// `mult ≤ (1 − ((a−1)/a)^m / (l−1)^{m−1}) n^m` for colourings that are not `n/a`-rich.
pub fn mult_bound(p: &[usize], a: usize, m: usize) -> Result<BoundOutcome> {
    let l = p.len();
    if l < 2 || a == 0 {
        return Err(ZolError::validation("need at least two colours and a > 0"));
    }
    if let Some(out) = require_not_rich(p, a) {
        return Ok(out);
    }
    let n = n_of(p);
    let lhs = rat(mult(p, m)? as i128);
    let factor = BigRational::one()
        - pow(&frac(a as u128 - 1, a as u128), m) / pow(&rat(l as i128 - 1), m - 1);
    let rhs = factor * rat(n.pow(m as u32) as i128);
    Ok(BoundOutcome::compare(lhs, rhs))
}

/// `e_m(p) ≤ [C(l−1,m)/(l−1)^m + C(l−1,m−1)/(a (l−1)^{m−1})] n^m` for colourings
/// that are not `n/a`-rich.
pub fn smult_bound(p: &[usize], a: usize, m: usize) -> Result<BoundOutcome> {
    let l = p.len();
    if l < 2 || a == 0 {
        return Err(ZolError::validation("need at least two colours and a > 0"));
    }
    if let Some(out) = require_not_rich(p, a) {
        return Ok(out);
    }
    let n = n_of(p);
    let lm1 = (l - 1) as u128;
    let lhs = rat(overline_smult(p, m)? as i128);
    let left = frac(binomial(lm1, m as u128), lm1.pow(m as u32));
    let right = frac(binomial(lm1, m as u128 - 1), a as u128 * lm1.pow(m as u32 - 1));
    let rhs = (left + right) * rat(n.pow(m as u32) as i128);
    Ok(BoundOutcome::compare(lhs, rhs))
}

/// `C(l,m)/l^m > C(l−1,m)/(l−1)^m`, exactly.
pub fn rainbow_gap(l: usize, m: usize) -> bool {
    let l = l as u128;
    let m = m as u128;
    frac(binomial(l, m), l.pow(m as u32)) > frac(binomial(l - 1, m), (l - 1).pow(m as u32))
}

/// Result of a sweep over random points of the simplex `{x ≥ 0, Σx = α}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    /// Largest amount by which a sampled point beat the balanced point.
    pub worst_excess: f64,
    /// Value of the target function at the balanced point.
    pub balanced: f64,
    /// Closed form claimed for the extremum.
    pub closed_form: f64,
}

impl SweepReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.worst_excess <= tol && (self.balanced - self.closed_form).abs() <= tol * self.closed_form.abs().max(1.0)
    }
}

fn simplex_point(rng: &mut ChaCha8Rng, k: usize, alpha: f64) -> Vec<f64> {
    let e: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| alpha * x / s).collect()
}

fn elementary(x: &[f64], m: usize) -> f64 {
    let mut e = vec![0.0; m + 1];
    e[0] = 1.0;
    for &v in x {
        for j in (1..=m).rev() {
            e[j] += e[j - 1] * v;
        }
    }
    e[m]
}

/// `Σ x_i^m` is minimised at the balanced point, where it equals `α^m / k^{m−1}`.
pub fn power_sum_sweep(k: usize, m: usize, alpha: f64, points: usize, seed: u64) -> SweepReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = |x: &[f64]| x.iter().map(|v| v.powi(m as i32)).sum::<f64>();
    let balanced = f(&vec![alpha / k as f64; k]);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..points {
        let x = simplex_point(&mut rng, k, alpha);
        worst = worst.max(balanced - f(&x));
    }
    SweepReport {
        worst_excess: worst,
        balanced,
        closed_form: alpha.powi(m as i32) / (k as f64).powi(m as i32 - 1),
    }
}

/// `e_m(x)` is maximised at the balanced point, where it equals `C(k,m) (α/k)^m`.
pub fn maclaurin_sweep(k: usize, m: usize, alpha: f64, points: usize, seed: u64) -> SweepReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let balanced = elementary(&vec![alpha / k as f64; k], m);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..points {
        let x = simplex_point(&mut rng, k, alpha);
        worst = worst.max(elementary(&x, m) - balanced);
    }
    SweepReport {
        worst_excess: worst,
        balanced,
        closed_form: binomial(k as u128, m as u128) as f64 * (alpha / k as f64).powi(m as i32),
    }
}

/// Random class-size vector on `n` elements with `l` colours that is not `n/a`-rich.
pub fn random_non_rich(rng: &mut ChaCha8Rng, n: usize, l: usize, a: usize) -> Vec<usize> {
    assert!(n >= 1 && l >= 2 && a >= 1);
    let small = rng.random_range(0..l);
    let mut p = vec![0usize; l];
    p[small] = rng.random_range(0..=(n - 1) / a);
    for _ in p[small]..n {
        let other = (small + 1 + rng.random_range(0..l - 1)) % l;
        p[other] += 1;
    }
    p
}

/// `x` as a float, for reporting.
pub fn to_f64(x: &BigRational) -> f64 {
    let n = x.numer().to_f64().unwrap_or(f64::NAN);
    let d = x.denom().to_f64().unwrap_or(f64::NAN);
    if x.is_zero() {
        0.0
    } else if x.is_negative() {
        -(n.abs() / d)
    } else {
        n / d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_on_examples() {
        assert_eq!(mult(&[2, 2], 2).unwrap(), 8);
        assert_eq!(mult(&[4, 0], 3).unwrap(), 0);
        assert_eq!(mult(&[2, 2, 2], 3).unwrap(), 192);
        assert_eq!(perm(1, 5).unwrap(), 1);
        assert_eq!(perm(2, 3).unwrap(), 6);
        assert_eq!(overline_mult(&[2, 2], 2).unwrap(), 4);
        assert_eq!(overline_smult(&[2, 2, 2], 2).unwrap(), 12);
        assert_eq!(smult(&[2, 2, 2], 2).unwrap(), 24);
        assert_eq!(overline_smult(&[1, 1], 2).unwrap(), 1);
        assert_eq!(overline_smult(&[3, 0, 0], 2).unwrap(), 0);
        assert!(mult(&[1, 1], 1).is_err());
        assert!(perm(3, 2).is_err());
    }

    #[test]
    fn thresholds() {
        assert_eq!(richness_threshold(2, 2), 4);
        assert_eq!(richness_threshold(3, 2), 6);
    }

    #[test]
    fn bound_examples() {
        match mult_bound(&[2, 10], 4, 2).unwrap() {
            BoundOutcome::Holds { lhs, rhs } => {
                assert_eq!(lhs, rat(40));
                assert_eq!(rhs, rat(63));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(mult_bound(&[6, 6], 4, 2).unwrap(), BoundOutcome::Inapplicable(_)));
        match smult_bound(&[1, 5, 6], 6, 2).unwrap() {
            BoundOutcome::Holds { lhs, rhs } => {
                assert_eq!(lhs, rat(41));
                assert_eq!(rhs, rat(60));
            }
            other => panic!("{other:?}"),
        }
    }
}
