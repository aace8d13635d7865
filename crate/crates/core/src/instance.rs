//! Weighted job collections and their expected-cost landscape.
//!
//! Job ids are 0-based indices into [`Instance::jobs`] throughout the Rust
//! API. Instance files and reports use 1-based ids (position in the `jobs`
//! array), see [`Permutation::to_one_based`].

use std::cmp::Ordering;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::numerics::NeumaierSum;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJob")]
pub struct Job {
    pub weight: f64,
    pub dist: Distribution,
}

#[derive(Deserialize)]
struct RawJob {
    weight: f64,
    dist: Distribution,
}

impl TryFrom<RawJob> for Job {
    type Error = Error;

    fn try_from(raw: RawJob) -> Result<Self> {
        Job::new(raw.weight, raw.dist)
    }
}

impl Job {
    pub fn new(weight: f64, dist: Distribution) -> Result<Self> {
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::InvalidInstance(format!(
                "job weight must be finite and > 0, got {weight}"
            )));
        }
        Ok(Self { weight, dist })
    }

    /// WSEPT priority `w / E[P]`.
    pub fn priority(&self) -> f64 {
        self.weight / self.dist.mean()
    }
}

/// A static job sequence over `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    order: Vec<usize>,
}

impl Permutation {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &j in &order {
            if j >= n || std::mem::replace(&mut seen[j], true) {
                return Err(Error::InvalidPermutation(format!(
                    "{order:?} is not a bijection on 0..{n}"
                )));
            }
        }
        Ok(Self { order })
    }

    /// Builds from 1-based job ids as they appear in files and reports.
    pub fn from_one_based(ids: &[usize]) -> Result<Self> {
        if ids.contains(&0) {
            return Err(Error::InvalidPermutation("job ids are 1-based".into()));
        }
        Self::new(ids.iter().map(|&i| i - 1).collect())
    }

    pub(crate) fn from_vec_unchecked(order: Vec<usize>) -> Self {
        debug_assert!(Self::new(order.clone()).is_ok());
        Self { order }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            order: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.order
    }

    pub fn reversed(&self) -> Self {
        Self {
            order: self.order.iter().rev().copied().collect(),
        }
    }

    /// `positions()[j]` is the slot of job `j` in the sequence.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.order.len()];
        for (slot, &j) in self.order.iter().enumerate() {
            pos[j] = slot;
        }
        pos
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.order.iter().map(|j| j + 1).collect()
    }
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_one_based().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let ids = Vec::<usize>::deserialize(d)?;
        Permutation::from_one_based(&ids).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct Instance {
    jobs: Vec<Job>,
}

#[derive(Deserialize)]
struct RawInstance {
    jobs: Vec<Job>,
}

impl TryFrom<RawInstance> for Instance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        Instance::new(raw.jobs)
    }
}

impl Instance {
    pub fn new(jobs: Vec<Job>) -> Result<Self> {
        if jobs.is_empty() {
            return Err(Error::InvalidInstance("an instance needs at least one job".into()));
        }
        Ok(Self { jobs })
    }

    /// Convenience constructor from `(weight, distribution)` pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, Distribution)>) -> Result<Self> {
        let jobs = pairs
            .into_iter()
            .map(|(w, d)| Job::new(w, d))
            .collect::<Result<Vec<_>>>()?;
        Self::new(jobs)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn n(&self) -> usize {
        self.jobs.len()
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn job(&self, j: usize) -> &Job {
        &self.jobs[j]
    }

    pub fn weights(&self) -> Vec<f64> {
        self.jobs.iter().map(|j| j.weight).collect()
    }

    pub fn means(&self) -> Vec<f64> {
        self.jobs.iter().map(|j| j.dist.mean()).collect()
    }

    pub fn distributions(&self) -> Vec<&Distribution> {
        self.jobs.iter().map(|j| &j.dist).collect()
    }

    pub fn priority(&self, j: usize) -> f64 {
        self.jobs[j].priority()
    }

    pub fn priorities(&self) -> Vec<f64> {
        self.jobs.iter().map(Job::priority).collect()
    }

    pub fn is_atomic(&self) -> bool {
        self.jobs.iter().all(|j| j.dist.is_atomic())
    }

    /// Jobs by non-increasing priority; ties by ascending id.
    pub fn wsept_order(&self) -> Permutation {
        let pri = self.priorities();
        let mut order: Vec<usize> = (0..self.n()).collect();
        order.sort_by(|&a, &b| pri[b].total_cmp(&pri[a]).then(a.cmp(&b)));
        Permutation::from_vec_unchecked(order)
    }

    /// Expected total weighted completion time of a fixed sequence.
    pub fn expected_cost(&self, perm: &Permutation) -> Result<f64> {
        self.check_perm(perm)?;
        Ok(sequence_cost(&self.weights(), &self.means(), perm.as_slice()))
    }

    /// Lowest expected cost over all static sequences (WSEPT order).
    pub fn l_cost(&self) -> f64 {
        sequence_cost(&self.weights(), &self.means(), self.wsept_order().as_slice())
    }

    /// Highest expected cost over all static sequences (reverse WSEPT order).
    pub fn h_cost(&self) -> f64 {
        sequence_cost(
            &self.weights(),
            &self.means(),
            self.wsept_order().reversed().as_slice(),
        )
    }

    /// Pairwise inversion cost `w_j E[P_k] - w_k E[P_j]` of running `k`
    /// before `j`, for `j` at least as urgent as `k`.
    pub fn delta(&self, j: usize, k: usize) -> Result<f64> {
        if self.priority(j) < self.priority(k) {
            return Err(Error::OrderViolation { j, k });
        }
        Ok(self.delta_unchecked(j, k))
    }

    pub(crate) fn delta_unchecked(&self, j: usize, k: usize) -> f64 {
        let (a, b) = (&self.jobs[j], &self.jobs[k]);
        let d = a.weight * b.dist.mean() - b.weight * a.dist.mean();
        // Equal priorities can leave a rounding residue of either sign.
        if self.priority(j).total_cmp(&self.priority(k)) == Ordering::Equal {
            0.0
        } else {
            d.max(0.0)
        }
    }

    /// `sum of delta(j, k)` over priority-ordered pairs; equals `H - L`.
    pub fn total_delta(&self) -> f64 {
        let order = self.wsept_order();
        let o = order.as_slice();
        let mut acc = NeumaierSum::default();
        for a in 0..o.len() {
            for b in a + 1..o.len() {
                acc.add(self.delta_unchecked(o[a], o[b]));
            }
        }
        acc.total()
    }

    pub(crate) fn check_perm(&self, perm: &Permutation) -> Result<()> {
        if perm.len() != self.n() {
            return Err(Error::InvalidPermutation(format!(
                "permutation of {} jobs for an instance with {}",
                perm.len(),
                self.n()
            )));
        }
        Ok(())
    }
}

/// `sum_t w[order[t]] * (times[order[0]] + ... + times[order[t]])`.
pub(crate) fn sequence_cost(weights: &[f64], times: &[f64], order: &[usize]) -> f64 {
    let mut clock = 0.0;
    let mut cost = 0.0;
    for &j in order {
        clock += times[j];
        cost += weights[j] * clock;
    }
    cost
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::Distribution as D;

    fn det(v: f64) -> D {
        D::deterministic(v).unwrap()
    }

    fn two_job() -> Instance {
        Instance::from_pairs([(1.0, det(1.0)), (1.0, det(2.0))]).unwrap()
    }

    #[test]
    fn priority_examples() {
        let inst = Instance::from_pairs([
            (2.0, D::exponential(1.0).unwrap()),
            (1.0, det(0.001)),
            (1.0, D::finite(vec![(0.0, 0.99), (1e4, 0.01)]).unwrap()),
        ])
        .unwrap();
        assert_eq!(inst.priority(0), 2.0);
        assert!((inst.priority(1) - 1000.0).abs() < 1e-9);
        assert!((inst.priority(2) - 0.01).abs() < 1e-15);
    }

    #[test]
    fn wsept_order_examples() {
        // Priorities (3, 1, 2).
        let inst = Instance::from_pairs([(3.0, det(1.0)), (1.0, det(1.0)), (2.0, det(1.0))]).unwrap();
        assert_eq!(inst.wsept_order().to_one_based(), vec![1, 3, 2]);
        let tied = Instance::from_pairs([(2.0, det(2.0)), (1.0, det(1.0)), (3.0, det(3.0))]).unwrap();
        assert_eq!(tied.wsept_order().to_one_based(), vec![1, 2, 3]);
    }

    #[test]
    fn expected_cost_examples() {
        let inst = two_job();
        let c12 = inst.expected_cost(&Permutation::identity(2)).unwrap();
        let c21 = inst.expected_cost(&Permutation::from_one_based(&[2, 1]).unwrap()).unwrap();
        assert_eq!((c12, c21), (4.0, 5.0));
    }

    #[test]
    fn expected_cost_matches_hand_formula() {
        let m = 100.0;
        let eps = 1e-3;
        let p1 = D::finite(vec![(1.0, 1.0 - 1.0 / m), (m * m, 1.0 / m)]).unwrap();
        let p2 = p1.shifted_atoms(1.0 + eps).unwrap();
        let (e1, e2) = (p1.mean(), p2.mean());
        let inst = Instance::from_pairs([(1.0, p1), (2.0, p2)]).unwrap();
        let c = inst.expected_cost(&Permutation::from_one_based(&[2, 1]).unwrap()).unwrap();
        let hand = 2.0 * e2 + 1.0 * (e2 + e1);
        assert!((c - hand).abs() <= 1e-9 * hand);
    }

    #[test]
    fn l_and_h_examples() {
        let inst = two_job();
        assert_eq!((inst.l_cost(), inst.h_cost()), (4.0, 5.0));
        let single = Instance::from_pairs([(3.0, det(2.0))]).unwrap();
        assert_eq!((single.l_cost(), single.h_cost()), (6.0, 6.0));
        let exp = Instance::from_pairs([
            (1.0, D::exponential(2.0).unwrap()),
            (1.0, D::exponential(1.0).unwrap()),
        ])
        .unwrap();
        assert_eq!((exp.l_cost(), exp.h_cost()), (2.0, 2.5));
    }

    #[test]
    fn delta_examples() {
        let inst = two_job();
        assert_eq!(inst.delta(0, 1).unwrap(), 1.0);
        assert_eq!(inst.delta(0, 1).unwrap(), inst.h_cost() - inst.l_cost());
        assert!(matches!(inst.delta(1, 0), Err(Error::OrderViolation { j: 1, k: 0 })));
        let tied = Instance::from_pairs([(2.0, det(2.0)), (1.0, det(1.0))]).unwrap();
        assert_eq!(tied.delta(0, 1).unwrap(), 0.0);
        assert_eq!(tied.delta(1, 0).unwrap(), 0.0);
        let exp = Instance::from_pairs([
            (1.0, D::exponential(2.0).unwrap()),
            (1.0, D::exponential(1.0).unwrap()),
        ])
        .unwrap();
        assert_eq!(exp.delta(0, 1).unwrap(), 0.5);
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::new(vec![0, 2, 1]).is_ok());
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
        assert!(Permutation::from_one_based(&[0, 1]).is_err());
        let p = Permutation::from_one_based(&[3, 1, 2]).unwrap();
        assert_eq!(p.positions(), vec![1, 2, 0]);
        let inst = two_job();
        assert!(inst.expected_cost(&p).is_err());
    }

    #[test]
    fn instance_json() {
        let src = r#"{"jobs":[
            {"weight":1.0,"dist":{"type":"exponential","rate":2.0}},
            {"weight":2.5,"dist":{"type":"uniform","lo":0,"hi":2}}
        ]}"#;
        let inst = Instance::from_json(src).unwrap();
        assert_eq!(inst.n(), 2);
        assert_eq!(Instance::from_json(&inst.to_json().unwrap()).unwrap(), inst);
        assert!(Instance::from_json(r#"{"jobs":[]}"#).is_err());
        let neg = r#"{"jobs":[{"weight":-1,"dist":{"type":"exponential","rate":1}}]}"#;
        assert!(Instance::from_json(neg).is_err());
    }

    #[test]
    fn permutation_json_is_one_based() {
        let p = Permutation::new(vec![2, 0, 1]).unwrap();
        assert_eq!(serde_json::to_string(&p).unwrap(), "[3,1,2]");
        let q: Permutation = serde_json::from_str("[3,1,2]").unwrap();
        assert_eq!(p, q);
    }
}
