//! Uniform and dimension-conditional probability measures on `K_n`.
//!
//! The dimension-conditional measure `δ_n` is built along the chain of reducts
//! `K_n↾0, K_n↾1, …, K_n↾ρ`: a level-0 reduct is drawn uniformly, and each later level
//! is drawn uniformly among the expansions of the level below. Exact values are
//! rationals; samplers are pure functions of `(seed, trial index)`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num::{BigInt, BigRational, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::classes::{tuple_allowed, ClassRule, ClassSpec};
use crate::counting::to_f64;
use crate::error::{Result, ZolError};
use crate::pregeometry::{d_reduct, Pregeometry};
use crate::structures::{slots, Slot, Structure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureKind {
    Uniform,
    /// Dimension-conditional, relative to the class geometry.
    Delta,
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeasureKind::Uniform => "uniform",
            MeasureKind::Delta => "delta",
        })
    }
}

impl FromStr for MeasureKind {
    type Err = ZolError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "uniform" => Ok(MeasureKind::Uniform),
            "delta" | "dimension-conditional" => Ok(MeasureKind::Delta),
            other => Err(ZolError::validation(format!(
                "unknown measure {other:?}; expected `uniform` or `delta`"
            ))),
        }
    }
}

/// A drawn or enumerated structure, with its relational reduct.
///
/// For colourable classes `full` carries the generating colouring and `rel` is the
/// member of the class itself; otherwise both are the same structure.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub full: Structure,
    pub rel: Structure,
}

impl Sample {
    pub fn new(full: Structure) -> Self {
        let rel = if full.vocab().colour_indices().is_empty() {
            full.clone()
        } else {
            full.relational_reduct()
        };
        Sample { full, rel }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProbValue {
    Exact(BigRational),
    Estimate(f64),
}

impl ProbValue {
    pub fn as_f64(&self) -> f64 {
        match self {
            ProbValue::Exact(q) => to_f64(q),
            ProbValue::Estimate(x) => *x,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbResult {
    pub value: ProbValue,
    pub trials: Option<u64>,
    pub ci: Option<(f64, f64)>,
    pub seed: Option<u64>,
}

impl ProbResult {
    pub fn exact(q: BigRational) -> Self {
        ProbResult {
            value: ProbValue::Exact(q),
            trials: None,
            ci: None,
            seed: None,
        }
    }

    pub fn estimate(&self) -> f64 {
        self.value.as_f64()
    }

    pub fn exact_value(&self) -> Option<&BigRational> {
        match &self.value {
            ProbValue::Exact(q) => Some(q),
            ProbValue::Estimate(_) => None,
        }
    }
}

/// The class whose members carry the measure: the coloured cover for colourable classes.
pub fn generating_class(c: &ClassSpec) -> ClassSpec {
    c.cover().unwrap_or_else(|| c.clone())
}

/// Largest dimension a relational range can have: the maximum non-colour arity.
pub fn rho(c: &ClassSpec) -> usize {
    c.vocab().max_relational_arity()
}

#[derive(Debug, Clone)]
struct Level {
    index: HashMap<Structure, usize>,
    keys: Vec<Structure>,
    parent: Vec<usize>,
    children: Vec<Vec<usize>>,
    prob: Vec<BigRational>,
}

/// The reduct chain of `K_n` with exact level probabilities.
#[derive(Debug, Clone)]
pub struct DeltaTable {
    n: usize,
    levels: Vec<Level>,
    members: Vec<Structure>,
    /// Level-ρ key index of each member.
    member_key: Vec<usize>,
}

impl DeltaTable {
    /// Builds the chain for `c` (the class itself, not its cover) on `n` elements.
    pub fn build(c: &ClassSpec, n: usize) -> Result<Self> {
        let g = c.geometry().on(n)?;
        let members = c.enumerate(n)?;
        if members.is_empty() {
            return Err(ZolError::NoExpansion { level: 0 });
        }
        let top = rho(c);
        let mut levels: Vec<Level> = Vec::with_capacity(top + 1);
        let mut member_key = vec![0usize; members.len()];
        let mut prev_idx = vec![usize::MAX; members.len()];
        for r in 0..=top {
            let mut lvl = Level {
                index: HashMap::new(),
                keys: Vec::new(),
                parent: Vec::new(),
                children: Vec::new(),
                prob: Vec::new(),
            };
            for (i, m) in members.iter().enumerate() {
                let key = d_reduct(m, &g, r);
                let next = lvl.keys.len();
                let idx = *lvl.index.entry(key.clone()).or_insert(next);
                if idx == next {
                    lvl.keys.push(key);
                    lvl.parent.push(prev_idx[i]);
                    lvl.children.push(Vec::new());
                    if r > 0 {
                        levels[r - 1].children[prev_idx[i]].push(idx);
                    }
                }
                prev_idx[i] = idx;
            }
            levels.push(lvl);
        }
        member_key.copy_from_slice(&prev_idx);
        let count0 = levels[0].keys.len();
        levels[0].prob = vec![BigRational::new(BigInt::one(), BigInt::from(count0)); count0];
        for r in 1..=top {
            let mut prob = vec![BigRational::zero(); levels[r].keys.len()];
            for (i, p) in prob.iter_mut().enumerate() {
                let par = levels[r].parent[i];
                let k = levels[r - 1].children[par].len();
                *p = &levels[r - 1].prob[par] / BigRational::from_integer(BigInt::from(k));
            }
            levels[r].prob = prob;
        }
        Ok(DeltaTable {
            n,
            levels,
            members,
            member_key,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[Structure] {
        &self.members
    }

    pub fn levels(&self) -> usize {
        self.levels.len()
    }

    /// `δ_n(M)`, or `None` if `m` is not a member.
    pub fn prob(&self, m: &Structure) -> Option<BigRational> {
        let top = self.levels.last().expect("at least one level");
        top.index.get(m).map(|&i| top.prob[i].clone())
    }

    /// `δ_n` of the `i`-th member in enumeration order.
    pub fn member_prob(&self, i: usize) -> BigRational {
        let top = self.levels.last().expect("at least one level");
        top.prob[self.member_key[i]].clone()
    }

    /// Probability of the level-`r` reduct `key`.
    pub fn level_prob(&self, r: usize, key: &Structure) -> Option<BigRational> {
        let lvl = self.levels.get(r)?;
        lvl.index.get(key).map(|&i| lvl.prob[i].clone())
    }

    /// Level-`r` reducts in first-seen order.
    pub fn level_keys(&self, r: usize) -> &[Structure] {
        &self.levels[r].keys
    }

    /// Total top-level mass of the expansions of a level-`r` reduct.
    pub fn expansion_mass(&self, r: usize, key: &Structure) -> Option<BigRational> {
        let lvl = self.levels.get(r)?;
        let mut frontier = vec![*lvl.index.get(key)?];
        for level in &self.levels[r..self.levels.len() - 1] {
            frontier = frontier
                .iter()
                .flat_map(|&i| level.children[i].iter().copied())
                .collect();
        }
        let top = self.levels.last().expect("levels");
        Some(frontier.iter().fold(BigRational::zero(), |acc, &i| acc + &top.prob[i]))
    }

    /// Draws a member by walking the chain.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Structure {
        let mut i = rng.random_range(0..self.levels[0].keys.len());
        for r in 0..self.levels.len() - 1 {
            let ch = &self.levels[r].children[i];
            i = ch[rng.random_range(0..ch.len())];
        }
        self.levels.last().expect("levels").keys[i].clone()
    }
}

/// Whether the class has an independent-slot description of `δ_n`.
pub fn has_fast_path(c: &ClassSpec) -> bool {
    matches!(c.rule(), ClassRule::All | ClassRule::LColoured { .. })
}

/// Closed-form `δ_n(M)` for classes with a fast path.
pub fn fast_path_probability(c: &ClassSpec, m: &Structure) -> Result<BigRational> {
    let n = m.n();
    let g = c.geometry().on(n)?;
    let half_pow = |k: usize| BigRational::new(BigInt::one(), BigInt::from(2u8).pow(k as u32));
    match c.rule() {
        ClassRule::All => Ok(half_pow(slots(c.vocab(), n).len())),
        ClassRule::LColoured { l, strong } => {
            let colours = crate::classes::colours_of(m)
                .ok_or_else(|| ZolError::validation("structure is not coloured"))?;
            let allowed = slots(c.vocab(), n)
                .iter()
                .filter(|s| !c.vocab().symbol(s.sym).colour_predicate)
                .filter(|s| tuple_allowed(m, &g, &colours, s.sym, &s.tuple, *strong))
                .count();
            let colour_states = BigInt::from(*l).pow(n as u32);
            Ok(half_pow(allowed) / BigRational::from_integer(colour_states))
        }
        _ => Err(ZolError::validation(format!("class {c} has no fast path"))),
    }
}

/// A reproducible source of samples from one measure on one `K_n`.
#[derive(Debug, Clone)]
pub enum Sampler {
    /// Independent slots, for the class of all structures.
    AllSlots { c: ClassSpec, n: usize, slots: Arc<Vec<Slot>> },
    /// Uniform colours, then independent allowed slots.
    Coloured {
        c: ClassSpec,
        n: usize,
        l: usize,
        strong: bool,
        g: Pregeometry,
        slots: Arc<Vec<Slot>>,
    },
    /// Walk of an exact reduct chain.
    Chain(Arc<DeltaTable>),
    /// Uniform over an enumerated `K_n`.
    Uniform(Arc<Vec<Structure>>),
}

/// Largest `n` for which the exact chain or uniform enumeration is attempted by samplers.
pub const MAX_TABLE_N: usize = 7;

impl Sampler {
    /// Sampler for `kind` on `c` at size `n`; colourable classes sample their cover.
    pub fn new(c: &ClassSpec, n: usize, kind: MeasureKind) -> Result<Self> {
        match kind {
            MeasureKind::Uniform => {
                if n > MAX_TABLE_N {
                    return Err(ZolError::budget(
                        "uniform sampling needs full enumeration",
                        n as u128,
                        MAX_TABLE_N as u128,
                    ));
                }
                let members = c.enumerate(n)?;
                if members.is_empty() {
                    return Err(ZolError::NoExpansion { level: 0 });
                }
                Ok(Sampler::Uniform(Arc::new(members)))
            }
            MeasureKind::Delta => {
                let gc = generating_class(c);
                let g = gc.geometry().on(n)?;
                let rel_slots = || -> Arc<Vec<Slot>> {
                    Arc::new(
                        slots(gc.vocab(), n)
                            .into_iter()
                            .filter(|s| !gc.vocab().symbol(s.sym).colour_predicate)
                            .collect(),
                    )
                };
                match gc.rule() {
                    ClassRule::All => Ok(Sampler::AllSlots {
                        slots: rel_slots(),
                        c: gc,
                        n,
                    }),
                    ClassRule::LColoured { l, strong } => Ok(Sampler::Coloured {
                        l: *l,
                        strong: *strong,
                        g,
                        slots: rel_slots(),
                        c: gc.clone(),
                        n,
                    }),
                    _ => {
                        if n > MAX_TABLE_N {
                            return Err(ZolError::budget(
                                format!("exact reduct chain for {gc}"),
                                n as u128,
                                MAX_TABLE_N as u128,
                            ));
                        }
                        Ok(Sampler::Chain(Arc::new(DeltaTable::build(&gc, n)?)))
                    }
                }
            }
        }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Structure {
        match self {
            Sampler::AllSlots { c, n, slots } => {
                let mut m = Structure::empty(c.vocab().clone(), *n);
                for s in slots.iter() {
                    if rng.random::<bool>() {
                        m.insert(s.sym, &s.tuple).expect("slot");
                    }
                }
                m
            }
            Sampler::Coloured {
                c,
                n,
                l,
                strong,
                g,
                slots,
            } => {
                let colour_syms = c.vocab().colour_indices();
                let colours: Vec<usize> = (0..*n).map(|_| rng.random_range(1..=*l)).collect();
                let mut m = Structure::empty(c.vocab().clone(), *n);
                for (x, &col) in colours.iter().enumerate() {
                    m.insert(colour_syms[col - 1], &[x + 1]).expect("colour");
                }
                for s in slots.iter() {
                    if tuple_allowed(&m, g, &colours, s.sym, &s.tuple, *strong) && rng.random::<bool>() {
                        m.insert(s.sym, &s.tuple).expect("slot");
                    }
                }
                m
            }
            Sampler::Chain(t) => t.sample(rng),
            Sampler::Uniform(ms) => ms[rng.random_range(0..ms.len())].clone(),
        }
    }

    pub fn sample_at(&self, seed: u64, index: u64) -> Sample {
        let mut rng = substream(seed, index);
        Sample::new(self.sample(&mut rng))
    }
}

/// Deterministic generator for trial `index` under `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws one structure from `δ_n` on `c` (the cover, for colourable classes).
pub fn sample_delta(c: &ClassSpec, n: usize, seed: u64) -> Result<Structure> {
    Ok(Sampler::new(c, n, MeasureKind::Delta)?.sample(&mut substream(seed, 0)))
}

/// Draws the relational reduct of a `δ_n` sample of the cover of a colourable class.
pub fn sample_colourable(c: &ClassSpec, n: usize, seed: u64) -> Result<Structure> {
    if c.cover().is_none() {
        return Err(ZolError::validation(format!("{c} is not a colourable class")));
    }
    Ok(sample_delta(c, n, seed)?.relational_reduct())
}

/// Wilson score interval at `z = 1.96`.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    let z = 1.96f64;
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Monte Carlo estimate of `P(event)`; trial `i` uses substream `(seed, i)`.
pub fn monte_carlo<F>(event: F, sampler: &Sampler, trials: u64, seed: u64) -> Result<ProbResult>
where
    F: Fn(&Sample) -> Result<bool> + Sync,
{
    if trials == 0 {
        return Err(ZolError::validation("Monte Carlo needs at least one trial"));
    }
    let hits: Vec<Result<bool>> = (0..trials)
        .into_par_iter()
        .map(|i| event(&sampler.sample_at(seed, i)))
        .collect();
    let mut successes = 0u64;
    for h in hits {
        if h? {
            successes += 1;
        }
    }
    let est = successes as f64 / trials as f64;
    let (lo, hi) = wilson_interval(successes, trials);
    Ok(ProbResult {
        value: ProbValue::Estimate(est),
        trials: Some(trials),
        ci: Some((lo.min(est), hi.max(est))),
        seed: Some(seed),
    })
}

/// Exact probability of `event` under `kind` on `K_n`.
///
/// For colourable classes the delta measure is inherited from the coloured cover and
/// events see the relational reduct through [`Sample::rel`].
pub fn exact_probability<F>(c: &ClassSpec, n: usize, event: F, kind: MeasureKind) -> Result<ProbResult>
where
    F: Fn(&Sample) -> Result<bool> + Sync,
{
    match kind {
        MeasureKind::Uniform => {
            let members = c.enumerate(n)?;
            if members.is_empty() {
                return Err(ZolError::NoExpansion { level: 0 });
            }
            let hits: Vec<Result<bool>> = members.par_iter().map(|m| event(&Sample::new(m.clone()))).collect();
            let mut k = 0u64;
            for h in hits {
                if h? {
                    k += 1;
                }
            }
            Ok(ProbResult::exact(BigRational::new(
                BigInt::from(k),
                BigInt::from(members.len()),
            )))
        }
        MeasureKind::Delta => {
            let gc = generating_class(c);
            let table = DeltaTable::build(&gc, n)?;
            let hits: Vec<Result<bool>> = table
                .members()
                .par_iter()
                .map(|m| event(&Sample::new(m.clone())))
                .collect();
            let mut total = BigRational::zero();
            for (i, h) in hits.into_iter().enumerate() {
                if h? {
                    total += table.member_prob(i);
                }
            }
            Ok(ProbResult::exact(total))
        }
    }
}

/// `δ_n(M)` for a member of `c` (or of its cover).
pub fn delta_structure_prob(c: &ClassSpec, m: &Structure) -> Result<BigRational> {
    let gc = generating_class(c);
    if !gc.is_permitted(m) {
        return Err(ZolError::validation("structure is not a member of the class"));
    }
    let table = DeltaTable::build(&gc, m.n())?;
    table
        .prob(m)
        .ok_or_else(|| ZolError::validation("structure is not a member of the class"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::Vocabulary;

    #[test]
    fn all_graphs_delta_is_uniform() {
        let c = ClassSpec::all(Vocabulary::graph());
        let t = DeltaTable::build(&c, 3).unwrap();
        for (i, m) in t.members().iter().enumerate() {
            assert_eq!(t.member_prob(i), BigRational::new(1.into(), 8.into()));
            assert_eq!(fast_path_probability(&c, m).unwrap(), t.member_prob(i));
        }
    }

    #[test]
    fn wilson_contains_estimate() {
        let (lo, hi) = wilson_interval(30, 100);
        assert!(lo < 0.3 && 0.3 < hi);
        let (_, hi) = wilson_interval(10, 10);
        assert_eq!(hi, 1.0);
    }

    #[test]
    fn zero_trials_rejected() {
        let c = ClassSpec::all(Vocabulary::graph());
        let s = Sampler::new(&c, 3, MeasureKind::Delta).unwrap();
        assert!(monte_carlo(|_| Ok(true), &s, 0, 1).is_err());
    }
}
