//! Sort-and-split solver for two users with weights `(1, gamma)`.
//!
//! Bins are ordered by decreasing rate ratio `L(k) = R1[k] / R2[k]`. With
//! `A_k` the rate user 1 collects from the first `k` sorted bins and `B_k` the
//! rate user 2 collects from the rest, the first position where
//! `A_k >= gamma * B_k` is the only bin that has to be time-shared; its split
//! makes `R1 = gamma * R2` exactly. The cost is one sort.
//!
//! Bins where one user has zero rate carry an infinite or zero ratio and sort
//! to the front or back. Bins where both users have zero rate are given to
//! user 1 and left out of the ordering.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{dim_mismatch, invalid, Error, Result};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoUserInstance<T> {
    r1: Vec<T>,
    r2: Vec<T>,
    gamma: T,
}

impl<T: Scalar> TwoUserInstance<T> {
    pub fn new(r1: Vec<T>, r2: Vec<T>, gamma: T) -> Result<Self> {
        if r1.is_empty() {
            return Err(Error::NoBins);
        }
        if r1.len() != r2.len() {
            return Err(dim_mismatch("r2", r1.len(), r2.len()));
        }
        for (field, rates) in [("r1", &r1), ("r2", &r2)] {
            if let Some(k) = rates.iter().position(|x| !(x.is_finite() && *x >= T::zero())) {
                return Err(invalid(field, format!("rate in bin {k} must be finite and >= 0")));
            }
        }
        if !(gamma.is_finite() && gamma > T::zero()) {
            return Err(invalid("gamma", "must be finite and > 0"));
        }
        Ok(Self { r1, r2, gamma })
    }

    pub fn n_bins(&self) -> usize {
        self.r1.len()
    }

    pub fn r1(&self) -> &[T] {
        &self.r1
    }

    pub fn r2(&self) -> &[T] {
        &self.r2
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }
}

/// Bin order by decreasing ratio together with the sorted ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedRatios<T> {
    /// Original bin index at each sorted position.
    pub permutation: Vec<usize>,
    pub ratios: Vec<T>,
    /// Bins where both users have zero rate; not part of the ordering.
    pub idle_bins: Vec<usize>,
}

/// Running sums along the sorted order.
#[derive(Debug, Clone, PartialEq)]
pub struct MovingThresholds<T> {
    /// `A_k`: user-1 rate from sorted bins `1..=k`.
    pub a: Vec<T>,
    /// `B_k`: user-2 rate from sorted bins `k+1..`.
    pub b: Vec<T>,
    /// `A_k / (gamma B_k)`; infinite where `B_k = 0`.
    pub gamma_k: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoUserSolution<T> {
    pub permutation: Vec<usize>,
    pub ratios: Vec<T>,
    pub thresholds: MovingThresholds<T>,
    /// One-based position of the shared bin in sorted order; zero when no bin
    /// has a nonzero rate for either user.
    pub k_min: usize,
    /// Share of the split bin that goes to user 1.
    pub alpha_split: T,
    /// User-1 share of every original bin.
    pub alpha: Vec<T>,
    pub rate1: T,
    pub rate2: T,
    /// `min(rate1, gamma * rate2)`.
    pub c: T,
}

impl<T: Scalar> TwoUserSolution<T> {
    /// Original index of the split bin.
    pub fn split_bin(&self) -> Option<usize> {
        self.k_min.checked_sub(1).map(|p| self.permutation[p])
    }
}

/// Stable sort of the bins by decreasing `R1/R2`; ties keep bin order.
pub fn sorted_ratios<T: Scalar>(inst: &TwoUserInstance<T>) -> SortedRatios<T> {
    let mut idle_bins = Vec::new();
    let mut keyed = Vec::with_capacity(inst.n_bins());
    for (k, (x1, x2)) in inst.r1.iter().zip(&inst.r2).enumerate() {
        if *x1 == T::zero() && *x2 == T::zero() {
            idle_bins.push(k);
        } else {
            // x / 0 is +inf for x > 0.
            keyed.push((k, *x1 / *x2));
        }
    }
    keyed.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal));
    let (permutation, ratios) = keyed.into_iter().unzip();
    SortedRatios {
        permutation,
        ratios,
        idle_bins,
    }
}

/// Computes `A_k`, `B_k` and `Gamma_k` for the bins in `order`.
pub fn moving_thresholds<T: Scalar>(inst: &TwoUserInstance<T>, order: &[usize]) -> MovingThresholds<T> {
    let mut a = Vec::with_capacity(order.len());
    let mut acc = T::zero();
    for &k in order {
        acc += inst.r1[k];
        a.push(acc);
    }
    let mut b = vec![T::zero(); order.len()];
    let mut acc = T::zero();
    for pos in (0..order.len()).rev() {
        b[pos] = acc;
        acc += inst.r2[order[pos]];
    }
    let gamma_k = a
        .iter()
        .zip(&b)
        .map(|(ak, bk)| {
            if *bk == T::zero() {
                T::infinity()
            } else {
                *ak / (*bk * inst.gamma)
            }
        })
        .collect();
    MovingThresholds { a, b, gamma_k }
}

pub fn solve_two_user<T: Scalar>(inst: &TwoUserInstance<T>) -> Result<TwoUserSolution<T>> {
    if inst.n_bins() == 0 {
        return Err(Error::NoBins);
    }
    let gamma = inst.gamma;
    let sorted = sorted_ratios(inst);
    let order = &sorted.permutation;
    let th = moving_thresholds(inst, order);

    let mut alpha = vec![T::zero(); inst.n_bins()];
    for &k in &sorted.idle_bins {
        alpha[k] = T::one();
    }

    let (k_min, alpha_split) = if order.is_empty() {
        (0, T::zero())
    } else {
        // A_K >= gamma * B_K = 0 always holds, so a position is always found.
        let pos = (0..order.len())
            .find(|&p| th.a[p] >= gamma * th.b[p])
            .unwrap_or(order.len() - 1);
        let (a_prev, b_prev) = if pos == 0 {
            (T::zero(), th.b[0] + inst.r2[order[0]])
        } else {
            (th.a[pos - 1], th.b[pos - 1])
        };
        let k = order[pos];
        let split = (gamma * b_prev - a_prev) / (inst.r1[k] + gamma * inst.r2[k]);
        let split = split.max(T::zero()).min(T::one());
        for &bin in &order[..pos] {
            alpha[bin] = T::one();
        }
        alpha[k] = split;
        (pos + 1, split)
    };

    let rate1: T = alpha.iter().zip(&inst.r1).map(|(a, r)| *a * *r).sum();
    let rate2: T = alpha
        .iter()
        .zip(&inst.r2)
        .map(|(a, r)| (T::one() - *a) * *r)
        .sum();
    Ok(TwoUserSolution {
        permutation: sorted.permutation,
        ratios: sorted.ratios,
        thresholds: th,
        k_min,
        alpha_split,
        alpha,
        rate1,
        rate2,
        c: rate1.min(gamma * rate2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn six_bins() -> TwoUserInstance<f64> {
        TwoUserInstance::new(
            vec![14.0, 18.0, 5.0, 10.0, 9.0, 3.0],
            vec![6.0, 10.0, 5.0, 15.0, 17.0, 16.0],
            1.25,
        )
        .unwrap()
    }

    #[test]
    fn six_bins_split() {
        let s = solve_two_user(&six_bins()).unwrap();
        assert_eq!(s.k_min, 4);
        assert!((s.alpha_split - 0.8).abs() < 1e-12);
        assert!((s.rate1 - 45.0).abs() < 1e-12);
        assert!((s.rate2 - 36.0).abs() < 1e-12);
        assert_eq!(s.permutation, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(s.split_bin(), Some(3));
    }

    #[test]
    fn six_bins_thresholds() {
        let inst = six_bins();
        let th = moving_thresholds(&inst, &[0, 1, 2, 3, 4, 5]);
        assert_eq!(th.a, vec![14.0, 32.0, 37.0, 47.0, 56.0, 59.0]);
        assert_eq!(th.b, vec![63.0, 53.0, 48.0, 33.0, 16.0, 0.0]);
        assert!(th.gamma_k[5].is_infinite());
    }

    #[test]
    fn shuffled_input_sorts_back() {
        let inst = TwoUserInstance::new(
            vec![9.0_f64, 14.0, 3.0, 5.0, 18.0, 10.0],
            vec![17.0, 6.0, 16.0, 5.0, 10.0, 15.0],
            1.25,
        )
        .unwrap();
        let s = sorted_ratios(&inst);
        assert_eq!(s.permutation, vec![1, 4, 3, 5, 0, 2]);
        let shown: Vec<String> = s.ratios.iter().map(|l| format!("{l:.2}")).collect();
        assert_eq!(shown, ["2.33", "1.80", "1.00", "0.67", "0.53", "0.19"]);
        let sol = solve_two_user(&inst).unwrap();
        assert!((sol.rate1 - 45.0).abs() < 1e-12);
        assert!((sol.alpha[5] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn ties_and_reversal() {
        let inst = TwoUserInstance::new(vec![1.0_f64; 4], vec![2.0; 4], 1.0).unwrap();
        assert_eq!(sorted_ratios(&inst).permutation, vec![0, 1, 2, 3]);
        let inst = TwoUserInstance::new(vec![1.0_f64, 2.0, 3.0], vec![1.0; 3], 1.0).unwrap();
        assert_eq!(sorted_ratios(&inst).permutation, vec![2, 1, 0]);
    }

    #[test]
    fn symmetric_users() {
        let inst = TwoUserInstance::new(vec![1.0_f64; 6], vec![1.0; 6], 1.0).unwrap();
        let s = solve_two_user(&inst).unwrap();
        assert!((s.rate1 - 3.0).abs() < 1e-12);
        assert!((s.rate2 - 3.0).abs() < 1e-12);
    }

    #[test]
    fn one_bin_closed_form() {
        let inst = TwoUserInstance::new(vec![2.0_f64], vec![4.0], 1.0).unwrap();
        let s = solve_two_user(&inst).unwrap();
        assert_eq!(s.k_min, 1);
        assert!((s.alpha_split - 2.0 / 3.0).abs() < 1e-12);
        assert!((s.rate1 - 4.0 / 3.0).abs() < 1e-12);
        assert!((s.rate2 - 4.0 / 3.0).abs() < 1e-12);
        let th = &s.thresholds;
        assert_eq!((th.a.as_slice(), th.b.as_slice()), (&[2.0][..], &[0.0][..]));
        assert!(th.gamma_k[0].is_infinite());
    }

    #[test]
    fn zero_rate_bins() {
        // Bin 0 useless to user 2, bin 1 useless to user 1, bin 2 useless to both.
        let inst = TwoUserInstance::new(vec![3.0_f64, 0.0, 0.0, 2.0], vec![0.0, 5.0, 0.0, 2.0], 1.0)
            .unwrap();
        let s = solve_two_user(&inst).unwrap();
        let sorted = sorted_ratios(&inst);
        assert_eq!(sorted.permutation, vec![0, 3, 1]);
        assert_eq!(sorted.idle_bins, vec![2]);
        assert_eq!(s.alpha[0], 1.0);
        assert_eq!(s.alpha[1], 0.0);
        assert!((s.rate1 - s.rate2).abs() < 1e-12);
        // 3 + 2a = 5 + 2(1 - a)  =>  a = 1
        assert!((s.rate1 - 5.0).abs() < 1e-12);
    }

    #[test]
    fn user2_useless_everywhere() {
        let inst = TwoUserInstance::new(vec![1.0_f64, 2.0], vec![0.0, 0.0], 1.0).unwrap();
        let s = solve_two_user(&inst).unwrap();
        assert_eq!(s.c, 0.0);
        assert_eq!(s.rate1, s.rate2 * inst.gamma());
    }

    #[test]
    fn all_bins_idle() {
        let inst = TwoUserInstance::new(vec![0.0_f64, 0.0], vec![0.0, 0.0], 2.0).unwrap();
        let s = solve_two_user(&inst).unwrap();
        assert_eq!(s.k_min, 0);
        assert_eq!(s.c, 0.0);
        assert_eq!(s.split_bin(), None);
    }

    #[test]
    fn invalid_instances() {
        assert_eq!(
            TwoUserInstance::<f64>::new(vec![], vec![], 1.0),
            Err(Error::NoBins)
        );
        assert!(TwoUserInstance::new(vec![1.0], vec![1.0, 2.0], 1.0).is_err());
        assert!(TwoUserInstance::new(vec![-1.0], vec![1.0], 1.0).is_err());
        assert!(TwoUserInstance::new(vec![1.0], vec![1.0], 0.0).is_err());
    }
}
