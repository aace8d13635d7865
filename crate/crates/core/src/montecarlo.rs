//! Simulation estimators and brute-force enumeration oracles.
//!
//! Trial `t` draws its samples `p'` (or its random sequence) from stream
//! `2t` and its realization `p` from stream `2t + 1` of the seed, so the
//! two are independent and every trial is reproducible on its own. Trials
//! are reduced in fixed-size chunks merged in index order, which makes the
//! estimate bit-identical between serial and parallel runs.

use itertools::Itertools;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{sequence_cost, Instance};
use crate::numerics::{NeumaierSum, RunningStats, StreamFactory};
use crate::policies::{ratio_order_into, Policy};

/// Trials per reduction chunk.
pub const CHUNK_TRIALS: u64 = 1 << 14;
/// Maximum number of atom combinations (or permutations) enumerated exactly.
pub const ENUMERATION_BUDGET: u128 = 1_000_000;
/// Largest instance for which RND is enumerated over all permutations.
pub const RND_MAX_JOBS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_trials: u64,
    pub seed: u64,
}

impl Estimate {
    /// `|mean - exact| <= z * stderr`.
    pub fn within(&self, exact: f64, z: f64) -> bool {
        (self.mean - exact).abs() <= z * self.stderr
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Serial,
    Parallel,
}

struct Simulator<'a> {
    inst: &'a Instance,
    policy: Policy,
    regret: bool,
    weights: Vec<f64>,
    wsept: Vec<usize>,
    streams: StreamFactory,
}

#[derive(Default)]
struct Scratch {
    samples: Vec<f64>,
    realization: Vec<f64>,
    order: Vec<usize>,
    optimal: Vec<usize>,
}

impl Simulator<'_> {
    fn trial(&self, t: u64, s: &mut Scratch) -> f64 {
        let jobs = self.inst.jobs();
        let mut sample_rng = self.streams.stream(2 * t);
        let mut realization_rng = self.streams.stream(2 * t + 1);

        s.realization.clear();
        s.realization
            .extend(jobs.iter().map(|j| j.dist.sample(&mut realization_rng)));

        match self.policy {
            Policy::Sam => {
                s.samples.clear();
                s.samples.extend(jobs.iter().map(|j| j.dist.sample(&mut sample_rng)));
                ratio_order_into(&self.weights, &s.samples, &mut s.order);
            }
            Policy::Rnd => {
                s.order.clear();
                s.order.extend(0..jobs.len());
                s.order.shuffle(&mut sample_rng);
            }
            Policy::Wsept => {
                s.order.clear();
                s.order.extend_from_slice(&self.wsept);
            }
            Policy::Wspt => ratio_order_into(&self.weights, &s.realization, &mut s.order),
        }

        let cost = sequence_cost(&self.weights, &s.realization, &s.order);
        if !self.regret {
            return cost;
        }
        ratio_order_into(&self.weights, &s.realization, &mut s.optimal);
        cost - sequence_cost(&self.weights, &s.realization, &s.optimal)
    }

    fn chunk(&self, index: u64, n_trials: u64) -> RunningStats {
        let start = index * CHUNK_TRIALS;
        let end = (start + CHUNK_TRIALS).min(n_trials);
        let mut scratch = Scratch::default();
        let mut stats = RunningStats::default();
        for t in start..end {
            stats.push(self.trial(t, &mut scratch));
        }
        stats
    }

    fn run(&self, n_trials: u64, execution: Execution) -> Estimate {
        let chunks = n_trials.div_ceil(CHUNK_TRIALS);
        let parts: Vec<RunningStats> = match execution {
            Execution::Serial => (0..chunks).map(|c| self.chunk(c, n_trials)).collect(),
            Execution::Parallel => (0..chunks)
                .into_par_iter()
                .map(|c| self.chunk(c, n_trials))
                .collect(),
        };
        let mut total = RunningStats::default();
        for part in &parts {
            total.merge(part);
        }
        Estimate {
            mean: total.mean(),
            stderr: total.stderr(),
            n_trials,
            seed: self.streams.seed(),
        }
    }
}

fn simulate(
    inst: &Instance,
    policy: Policy,
    n_trials: u64,
    seed: u64,
    regret: bool,
    execution: Execution,
) -> Result<Estimate> {
    if n_trials == 0 {
        return Err(Error::Config("at least one trial is required".into()));
    }
    let sim = Simulator {
        inst,
        policy,
        regret,
        weights: inst.weights(),
        wsept: inst.wsept_order().as_slice().to_vec(),
        streams: StreamFactory::new(seed),
    };
    Ok(sim.run(n_trials, execution))
}

/// Monte Carlo estimate of `E[sum_j w_j C_j]` under `policy`.
pub fn estimate_cost(inst: &Instance, policy: Policy, n_trials: u64, seed: u64) -> Result<Estimate> {
    simulate(inst, policy, n_trials, seed, false, Execution::Parallel)
}

/// Monte Carlo estimate of the expected regret against the per-realization
/// optimum, using the same realization for the policy and the optimum.
pub fn estimate_regret(inst: &Instance, policy: Policy, n_trials: u64, seed: u64) -> Result<Estimate> {
    simulate(inst, policy, n_trials, seed, true, Execution::Parallel)
}

/// [`estimate_cost`] / [`estimate_regret`] with explicit execution mode.
pub fn estimate_with(
    inst: &Instance,
    policy: Policy,
    n_trials: u64,
    seed: u64,
    regret: bool,
    execution: Execution,
) -> Result<Estimate> {
    simulate(inst, policy, n_trials, seed, regret, execution)
}

fn atom_table(inst: &Instance) -> Result<Vec<&[(f64, f64)]>> {
    inst.jobs()
        .iter()
        .map(|j| j.dist.atoms().ok_or(Error::NotDiscrete))
        .collect()
}

fn combination_count(atoms: &[&[(f64, f64)]]) -> u128 {
    atoms
        .iter()
        .fold(1u128, |acc, a| acc.saturating_mul(a.len() as u128))
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Calls `visit(values, probability)` for every joint atom vector.
fn for_each_atom_vector(atoms: &[&[(f64, f64)]], mut visit: impl FnMut(&[f64], f64)) {
    let n = atoms.len();
    let mut idx = vec![0usize; n];
    let mut values: Vec<f64> = atoms.iter().map(|a| a[0].0).collect();
    loop {
        let prob: f64 = idx.iter().zip(atoms).map(|(&i, a)| a[i].1).product();
        visit(&values, prob);
        // Odometer increment, last job fastest.
        let mut pos = n;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < atoms[pos].len() {
                values[pos] = atoms[pos][idx[pos]].0;
                break;
            }
            idx[pos] = 0;
            values[pos] = atoms[pos][0].0;
        }
    }
}

/// Exact expected cost of `policy` on an all-atomic instance by enumeration.
///
/// SAM enumerates sample vectors; given the resulting sequence, the
/// expectation over realizations is the sequence cost at the means. RND
/// averages over all `n!` sequences. WSPT (the clairvoyant optimum)
/// enumerates realization vectors.
pub fn exact_discrete_cost(inst: &Instance, policy: Policy) -> Result<f64> {
    let atoms = atom_table(inst)?;
    let weights = inst.weights();
    let means = inst.means();
    match policy {
        Policy::Wsept => Ok(sequence_cost(&weights, &means, inst.wsept_order().as_slice())),
        Policy::Rnd => {
            let n = inst.n();
            if n > RND_MAX_JOBS {
                return Err(Error::TooLarge {
                    needed: factorial(n),
                    budget: factorial(RND_MAX_JOBS),
                });
            }
            let total: NeumaierSum = (0..n)
                .permutations(n)
                .map(|order| sequence_cost(&weights, &means, &order))
                .collect();
            Ok(total.total() / factorial(n) as f64)
        }
        Policy::Sam | Policy::Wspt => {
            let needed = combination_count(&atoms);
            if needed > ENUMERATION_BUDGET {
                return Err(Error::TooLarge {
                    needed,
                    budget: ENUMERATION_BUDGET,
                });
            }
            let mut acc = NeumaierSum::default();
            let mut order = Vec::with_capacity(inst.n());
            for_each_atom_vector(&atoms, |values, prob| {
                ratio_order_into(&weights, values, &mut order);
                let cost = if policy == Policy::Sam {
                    sequence_cost(&weights, &means, &order)
                } else {
                    sequence_cost(&weights, values, &order)
                };
                acc.add(prob * cost);
            });
            Ok(acc.total())
        }
    }
}

/// Exact expected regret `cost(policy) - E[opt(p)]` by enumeration.
pub fn exact_discrete_regret(inst: &Instance, policy: Policy) -> Result<f64> {
    Ok(exact_discrete_cost(inst, policy)? - exact_discrete_cost(inst, Policy::Wspt)?)
}

/// Exact relative optimality gap by enumeration.
pub fn enumerate_rog(inst: &Instance, policy: Policy) -> Result<f64> {
    let cost = exact_discrete_cost(inst, policy)?;
    let (l, h) = (inst.l_cost(), inst.h_cost());
    if h - l <= 0.0 {
        return Err(Error::DegenerateInstance);
    }
    Ok((cost - l) / (h - l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::Distribution as D;

    fn exp_pair() -> Instance {
        Instance::from_pairs([
            (1.0, D::exponential(2.0).unwrap()),
            (1.0, D::exponential(1.0).unwrap()),
        ])
        .unwrap()
    }

    fn example1(n: usize, m: f64, eps: f64) -> Instance {
        let mut pairs: Vec<(f64, D)> = (0..n - 1).map(|_| (1.0, D::deterministic(eps).unwrap())).collect();
        pairs.push((1.0, D::finite(vec![(0.0, 1.0 - 1.0 / m), (m * m, 1.0 / m)]).unwrap()));
        Instance::from_pairs(pairs).unwrap()
    }

    #[test]
    fn wsept_on_deterministic_instance_is_exact() {
        let inst = Instance::from_pairs([
            (2.0, D::deterministic(1.5).unwrap()),
            (1.0, D::deterministic(0.5).unwrap()),
            (3.0, D::deterministic(2.0).unwrap()),
        ])
        .unwrap();
        let e = estimate_cost(&inst, Policy::Wsept, 1000, 1).unwrap();
        assert_eq!(e.mean, inst.l_cost());
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn sam_on_exponential_pair() {
        let e = estimate_cost(&exp_pair(), Policy::Sam, 1_000_000, 42).unwrap();
        assert!(e.within(2.0 + 0.5 / 3.0, 4.0), "{e:?}");
    }

    #[test]
    fn rnd_cost_is_midpoint() {
        let inst = exp_pair();
        let e = estimate_cost(&inst, Policy::Rnd, 1_000_000, 7).unwrap();
        assert!(e.within(0.5 * (inst.l_cost() + inst.h_cost()), 4.0), "{e:?}");
    }

    #[test]
    fn oracle_regret_is_zero() {
        let e = estimate_regret(&exp_pair(), Policy::Wspt, 10_000, 3).unwrap();
        assert_eq!((e.mean, e.stderr), (0.0, 0.0));
    }

    #[test]
    fn example1_regret_simulation() {
        let inst = example1(5, 100.0, 1e-6);
        let exact = exact_discrete_regret(&inst, Policy::Sam).unwrap();
        assert!((exact - 396.0).abs() <= 1e-3);
        let e = estimate_regret(&inst, Policy::Sam, 1_000_000, 42).unwrap();
        assert!(e.within(exact, 4.0), "{e:?} vs {exact}");
    }

    #[test]
    fn serial_and_parallel_are_bit_identical() {
        let inst = exp_pair();
        let n = 3 * CHUNK_TRIALS + 17;
        for regret in [false, true] {
            let a = estimate_with(&inst, Policy::Sam, n, 9, regret, Execution::Serial).unwrap();
            let b = estimate_with(&inst, Policy::Sam, n, 9, regret, Execution::Parallel).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(estimate_cost(&exp_pair(), Policy::Sam, 0, 1).is_err());
    }

    #[test]
    fn example1_enumeration() {
        let (n, m) = (5usize, 100.0);
        let inst = example1(n, m, 1e-9);
        let cost = exact_discrete_cost(&inst, Policy::Sam).unwrap();
        let limit = n as f64 * m - (n as f64 - 1.0);
        assert!((cost - limit).abs() <= 1e-6 * limit, "{cost}");
    }

    #[test]
    fn rnd_enumeration_is_midpoint() {
        let inst = example1(4, 10.0, 0.1);
        let c = exact_discrete_cost(&inst, Policy::Rnd).unwrap();
        let mid = 0.5 * (inst.l_cost() + inst.h_cost());
        assert!((c - mid).abs() <= 1e-12 * mid);
        assert!((enumerate_rog(&inst, Policy::Rnd).unwrap() - 0.5).abs() <= 1e-12);
        assert_eq!(enumerate_rog(&inst, Policy::Wsept).unwrap(), 0.0);
    }

    #[test]
    fn example1_two_jobs_rog() {
        let (n, m) = (2.0, 100.0);
        let inst = example1(2, m, 1e-6);
        let r = enumerate_rog(&inst, Policy::Sam).unwrap();
        let limit = (n * m - (n - 1.0) - m) / (n * m - m);
        assert!((r - limit).abs() <= 1e-2, "{r}");
    }

    #[test]
    fn enumeration_errors() {
        assert!(matches!(exact_discrete_cost(&exp_pair(), Policy::Sam), Err(Error::NotDiscrete)));
        let wide = D::finite(vec![(1.0, 0.25), (2.0, 0.25), (3.0, 0.25), (4.0, 0.25)]).unwrap();
        let big = Instance::from_pairs((0..11).map(|_| (1.0, wide.clone()))).unwrap();
        assert!(matches!(exact_discrete_cost(&big, Policy::Sam), Err(Error::TooLarge { .. })));
        let many = Instance::from_pairs((0..9).map(|i| (1.0, D::deterministic(1.0 + i as f64).unwrap())))
            .unwrap();
        assert!(matches!(exact_discrete_cost(&many, Policy::Rnd), Err(Error::TooLarge { .. })));
        let tied = Instance::from_pairs((0..3).map(|_| (1.0, D::deterministic(1.0).unwrap()))).unwrap();
        assert!(matches!(enumerate_rog(&tied, Policy::Sam), Err(Error::DegenerateInstance)));
    }
}
