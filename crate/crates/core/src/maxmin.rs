//! Weighted max-min allocation as a linear program.
//!
//! Variables are the time shares `alpha[n][k]` (user-major) followed by the
//! common value `c`. Each weighted user contributes the row
//! `sum_k alpha[n][k] R[n][k] - c / gamma[n] >= 0`, each bin the row
//! `sum_n alpha[n][k] = 1`, and the objective is `max c`.
//!
//! The same builder also accepts fixed-rate users with a floor
//! `sum_k alpha[n][k] R[n][k] >= r_min`, which is how the mixed voice/data
//! problem in [`crate::services`] reuses this path.

use serde::{Deserialize, Serialize};

use crate::error::{dim_mismatch, invalid, Error, Result};
use crate::lp::{self, LinearProgram, LpStatus, Relation, SolverOptions};
use crate::rates::RateMatrix;
use crate::Scalar;

/// Per-user priority weights `gamma[n] > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector<T>(Vec<T>);

impl<T: Scalar> WeightVector<T> {
    pub fn new(gamma: Vec<T>) -> Result<Self> {
        if gamma.is_empty() {
            return Err(invalid("weights", "at least one weight is required"));
        }
        if let Some(i) = gamma.iter().position(|g| !(g.is_finite() && *g > T::zero())) {
            return Err(invalid("weights", format!("weight {i} must be finite and > 0")));
        }
        Ok(Self(gamma))
    }

    /// All weights equal to one.
    pub fn uniform(n_users: usize) -> Self {
        Self(vec![T::one(); n_users])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn scaled(&self, t: T) -> Result<Self> {
        Self::new(self.0.iter().map(|g| *g * t).collect())
    }
}

impl<T> std::ops::Index<usize> for WeightVector<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

/// Time-share fractions `alpha[n][k]`; every column sums to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationMatrix<T> {
    n_users: usize,
    n_bins: usize,
    data: Vec<T>,
}

impl<T: Scalar> AllocationMatrix<T> {
    /// Validates entries in `[0, 1]` and unit column sums within the feasibility tolerance.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n_users = rows.len();
        let n_bins = rows.first().map_or(0, Vec::len);
        if n_users == 0 || n_bins == 0 {
            return Err(invalid("allocation", "matrix is empty"));
        }
        let mut data = Vec::with_capacity(n_users * n_bins);
        for (n, row) in rows.into_iter().enumerate() {
            if row.len() != n_bins {
                return Err(dim_mismatch(
                    "allocation",
                    format!("{n_bins} columns"),
                    format!("{} in row {n}", row.len()),
                ));
            }
            data.extend(row);
        }
        let a = Self {
            n_users,
            n_bins,
            data,
        };
        if let Some(i) = a.data.iter().position(|x| !(*x >= T::zero() && *x <= T::one())) {
            return Err(invalid(
                "allocation",
                format!("entry ({}, {}) outside [0, 1]", i / n_bins, i % n_bins),
            ));
        }
        for k in 0..n_bins {
            let s = a.column_sum(k);
            if (s - T::one()).abs() > T::feas_tol() {
                return Err(invalid("allocation", format!("column {k} sums to {s}")));
            }
        }
        Ok(a)
    }

    /// Snaps simplex dust to zero and renormalizes each column.
    fn from_lp_point(n_users: usize, n_bins: usize, x: &[T]) -> Self {
        let mut data: Vec<T> = x[..n_users * n_bins]
            .iter()
            .map(|v| if *v < T::dust_tol() { T::zero() } else { v.min(T::one()) })
            .collect();
        for k in 0..n_bins {
            let s: T = (0..n_users).map(|n| data[n * n_bins + k]).sum();
            if s > T::zero() {
                for n in 0..n_users {
                    data[n * n_bins + k] /= s;
                }
            } else {
                data[k] = T::one();
            }
        }
        Self {
            n_users,
            n_bins,
            data,
        }
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    #[inline]
    pub fn get(&self, user: usize, bin: usize) -> T {
        self.data[user * self.n_bins + bin]
    }

    fn get_mut(&mut self, user: usize, bin: usize) -> &mut T {
        &mut self.data[user * self.n_bins + bin]
    }

    pub fn row(&self, user: usize) -> &[T] {
        &self.data[user * self.n_bins..(user + 1) * self.n_bins]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.data.chunks(self.n_bins)
    }

    pub fn column_sum(&self, bin: usize) -> T {
        (0..self.n_users).map(|n| self.get(n, bin)).sum()
    }

    /// `R_n = sum_k alpha[n][k] R[n][k]` for every user.
    pub fn user_rates(&self, r: &RateMatrix<T>) -> Vec<T> {
        (0..self.n_users)
            .map(|n| self.row(n).iter().zip(r.row(n)).map(|(a, x)| *a * *x).sum())
            .collect()
    }
}

/// Lagrange multipliers of the max-min program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Multipliers<T> {
    /// Rate rows, one per user (`>= 0`).
    pub delta: Vec<T>,
    /// Bin rows `sum_n alpha = 1`, one per bin.
    pub lambda: Vec<T>,
    /// Nonnegativity of each `alpha[n][k]`, user-major.
    pub mu: Vec<T>,
    /// Nonnegativity of `c`.
    pub beta: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Warning {
    /// A weighted user has zero rate on every bin, which pins `c` to zero.
    ZeroRateUser(usize),
    /// Some weighted rate stayed above `c` after rebalancing.
    UnequalRates,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxMinResult<T> {
    pub status: LpStatus,
    pub c: T,
    pub allocation: AllocationMatrix<T>,
    pub user_rates: Vec<T>,
    pub duals: Multipliers<T>,
    pub warnings: Vec<Warning>,
    pub pivots: usize,
}

/// What a user's rate row asks for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Requirement<T> {
    /// `gamma * R_n >= c`.
    Weighted(T),
    /// `R_n >= floor`.
    Floor(T),
}

pub(crate) fn build_requirement_lp<T: Scalar>(
    r: &RateMatrix<T>,
    reqs: &[Requirement<T>],
) -> LinearProgram<T> {
    let (n_users, n_bins) = (r.n_users(), r.n_bins());
    let n_vars = n_users * n_bins + 1;
    let c_idx = n_vars - 1;
    let mut objective = vec![T::zero(); n_vars];
    objective[c_idx] = T::one();
    let mut lp = LinearProgram::maximize(objective);
    for (n, req) in reqs.iter().enumerate() {
        let mut coeffs = vec![T::zero(); n_vars];
        coeffs[n * n_bins..(n + 1) * n_bins].copy_from_slice(r.row(n));
        let rhs = match *req {
            Requirement::Weighted(gamma) => {
                coeffs[c_idx] = -T::one() / gamma;
                T::zero()
            }
            Requirement::Floor(floor) => floor,
        };
        lp.add_constraint(coeffs, Relation::Ge, rhs);
    }
    for k in 0..n_bins {
        let mut coeffs = vec![T::zero(); n_vars];
        for n in 0..n_users {
            coeffs[n * n_bins + k] = T::one();
        }
        lp.add_constraint(coeffs, Relation::Eq, T::one());
    }
    lp
}

/// Builds `max c` s.t. `c / gamma[n] <= sum_k alpha[n][k] R[n][k]` and unit bin columns.
pub fn build_maxmin_lp<T: Scalar>(r: &RateMatrix<T>, w: &WeightVector<T>) -> Result<LinearProgram<T>> {
    check_weights(r, w)?;
    let reqs: Vec<_> = w.as_slice().iter().map(|g| Requirement::Weighted(*g)).collect();
    Ok(build_requirement_lp(r, &reqs))
}

fn check_weights<T: Scalar>(r: &RateMatrix<T>, w: &WeightVector<T>) -> Result<()> {
    if w.len() != r.n_users() {
        return Err(dim_mismatch("weights", r.n_users(), w.len()));
    }
    Ok(())
}

pub fn solve_maxmin<T: Scalar>(r: &RateMatrix<T>, w: &WeightVector<T>) -> Result<MaxMinResult<T>> {
    solve_maxmin_with(r, w, &SolverOptions::default()).map(|(res, _)| res)
}

/// Like [`solve_maxmin`], also returning the raw LP solution (which carries
/// the final tableau when `opts.keep_tableau` is set).
pub fn solve_maxmin_with<T: Scalar>(
    r: &RateMatrix<T>,
    w: &WeightVector<T>,
    opts: &SolverOptions,
) -> Result<(MaxMinResult<T>, lp::LpSolution<T>)> {
    check_weights(r, w)?;
    let reqs: Vec<_> = w.as_slice().iter().map(|g| Requirement::Weighted(*g)).collect();
    solve_requirements(r, &reqs, opts)
}

pub(crate) fn solve_requirements<T: Scalar>(
    r: &RateMatrix<T>,
    reqs: &[Requirement<T>],
    opts: &SolverOptions,
) -> Result<(MaxMinResult<T>, lp::LpSolution<T>)> {
    let lp = build_requirement_lp(r, reqs);
    let sol = lp::solve_with(&lp, opts)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Solver(sol.status));
    }
    let (n_users, n_bins) = (r.n_users(), r.n_bins());
    let c_idx = n_users * n_bins;
    let c = sol.primal[c_idx].max(T::zero());

    let mut warnings = Vec::new();
    for (n, req) in reqs.iter().enumerate() {
        if matches!(req, Requirement::Weighted(_)) && r.is_zero_user(n) {
            log::warn!("user {n} has zero rate on every bin; max-min value is 0");
            warnings.push(Warning::ZeroRateUser(n));
        }
    }

    let mut allocation = AllocationMatrix::from_lp_point(n_users, n_bins, &sol.primal);
    if c > T::zero() && !rebalance_surplus(&mut allocation, r, reqs, c) {
        warnings.push(Warning::UnequalRates);
    }
    let user_rates = allocation.user_rates(r);

    let duals = Multipliers {
        delta: sol.dual[..n_users].iter().map(|y| -*y).collect(),
        lambda: sol.dual[n_users..].to_vec(),
        mu: sol.reduced_costs[..c_idx].iter().map(|d| -*d).collect(),
        beta: -sol.reduced_costs[c_idx],
    };

    let result = MaxMinResult {
        status: sol.status,
        c,
        allocation,
        user_rates,
        duals,
        warnings,
        pivots: sol.pivots,
    };
    Ok((result, sol))
}

/// Removes weighted rate above `c` by handing time on the surplus user's bins
/// to users that either cannot use the bin (zero rate) or only have a rate
/// floor. At an optimum with `c > 0` every bin a surplus user occupies has such
/// a receiver, so this reaches equal weighted rates without lowering anyone
/// below their requirement. Returns false if some surplus could not be placed.
fn rebalance_surplus<T: Scalar>(
    a: &mut AllocationMatrix<T>,
    r: &RateMatrix<T>,
    reqs: &[Requirement<T>],
    c: T,
) -> bool {
    let tol = T::feas_tol() * T::one().max(c);
    let mut balanced = true;
    for (n, req) in reqs.iter().enumerate() {
        let Requirement::Weighted(gamma) = *req else {
            continue;
        };
        let rate: T = a.row(n).iter().zip(r.row(n)).map(|(x, y)| *x * *y).sum();
        let mut surplus = rate - c / gamma;
        if surplus * gamma <= tol {
            continue;
        }
        for k in 0..a.n_bins() {
            let rk = r.get(n, k);
            let share = a.get(n, k);
            if rk == T::zero() || share == T::zero() {
                continue;
            }
            let receiver = (0..reqs.len())
                .filter(|&m| m != n)
                .find(|&m| r.get(m, k) == T::zero())
                .or_else(|| {
                    (0..reqs.len())
                        .filter(|&m| m != n)
                        .find(|&m| matches!(reqs[m], Requirement::Floor(_)))
                });
            let Some(m) = receiver else {
                continue;
            };
            let moved = share.min(surplus / rk);
            *a.get_mut(n, k) -= moved;
            *a.get_mut(m, k) += moved;
            surplus -= moved * rk;
            if surplus * gamma <= tol {
                break;
            }
        }
        if surplus * gamma > tol {
            balanced = false;
        }
    }
    balanced
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KktCondition {
    /// `beta = 0` when `c > 0`.
    BetaZero,
    /// `sum_n delta_n / gamma_n = 1` when `c > 0`.
    DualWeightSum,
    /// `lambda_k = delta_n R[n][k]` wherever `alpha[n][k] > tol`.
    ActiveBalance,
    /// `lambda_k >= delta_n R[n][k]` wherever `alpha[n][k] <= tol`.
    InactiveBound,
    /// `-mu[n][k] + lambda_k - delta_n R[n][k] = 0`.
    Stationarity,
    /// `delta >= 0`, `mu >= 0`, `beta >= 0`.
    DualSigns,
    /// `delta_n > 0` only for users whose weighted rate equals `c`.
    RateSlackness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckOutcome {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KktCheck<T> {
    pub condition: KktCondition,
    pub outcome: CheckOutcome,
    pub max_violation: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KktReport<T> {
    pub checks: Vec<KktCheck<T>>,
}

impl<T: Scalar> KktReport<T> {
    pub fn outcome(&self, condition: KktCondition) -> CheckOutcome {
        self.checks
            .iter()
            .find(|c| c.condition == condition)
            .map_or(CheckOutcome::NotApplicable, |c| c.outcome)
    }

    /// True when no applicable condition failed.
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.outcome != CheckOutcome::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &KktCheck<T>> {
        self.checks.iter().filter(|c| c.outcome == CheckOutcome::Fail)
    }
}

/// Checks the optimality conditions of the max-min program against the
/// multipliers in `res`. Tolerances are absolute, scaled up by the largest
/// bin price when that exceeds one.
///
/// Panics if the dimensions of `res`, `r` and `w` disagree.
pub fn verify_kkt<T: Scalar>(
    res: &MaxMinResult<T>,
    r: &RateMatrix<T>,
    w: &WeightVector<T>,
    tol: T,
) -> KktReport<T> {
    let (n_users, n_bins) = (r.n_users(), r.n_bins());
    assert_eq!(res.allocation.n_users(), n_users, "allocation user count");
    assert_eq!(res.allocation.n_bins(), n_bins, "allocation bin count");
    assert_eq!(w.len(), n_users, "weight count");
    let d = &res.duals;
    let scale = d.lambda.iter().fold(T::one(), |acc, l| acc.max(l.abs()));
    let tol_s = tol * scale;
    let positive_c = res.c > tol;

    let check = |condition, applicable: bool, violation: T, limit: T| KktCheck {
        condition,
        outcome: if !applicable {
            CheckOutcome::NotApplicable
        } else if violation <= limit {
            CheckOutcome::Pass
        } else {
            CheckOutcome::Fail
        },
        max_violation: violation,
    };

    let weight_sum: T = d.delta.iter().zip(w.as_slice()).map(|(dl, g)| *dl / *g).sum();

    let mut active = T::zero();
    let mut inactive = T::zero();
    let mut stationarity = T::zero();
    let mut signs = T::zero().max(-d.beta);
    for n in 0..n_users {
        signs = signs.max(-d.delta[n]);
        for k in 0..n_bins {
            let price = d.delta[n] * r.get(n, k);
            let lambda = d.lambda[k];
            if res.allocation.get(n, k) > tol {
                active = active.max((lambda - price).abs());
            } else {
                inactive = inactive.max(price - lambda);
            }
            let mu = d.mu[n * n_bins + k];
            signs = signs.max(-mu);
            stationarity = stationarity.max((-mu + lambda - price).abs());
        }
    }

    let mut slack = T::zero();
    for n in 0..n_users {
        let excess = w[n] * res.user_rates[n] - res.c;
        if d.delta[n] > tol {
            slack = slack.max(excess.abs() * d.delta[n]);
        }
    }

    KktReport {
        checks: vec![
            check(KktCondition::BetaZero, positive_c, d.beta.abs(), tol),
            check(
                KktCondition::DualWeightSum,
                positive_c,
                (weight_sum - T::one()).abs(),
                tol,
            ),
            check(KktCondition::ActiveBalance, true, active, tol_s),
            check(KktCondition::InactiveBound, true, inactive, tol_s),
            check(KktCondition::Stationarity, true, stationarity, tol_s),
            check(KktCondition::DualSigns, true, signs, tol_s),
            check(
                KktCondition::RateSlackness,
                true,
                slack,
                tol * T::one().max(res.c) * scale,
            ),
        ],
    }
}

/// Number of bins with at least two users holding a share strictly inside `(tol, 1 - tol)`.
pub fn count_shared_bins<T: Scalar>(a: &AllocationMatrix<T>, tol: T) -> usize {
    (0..a.n_bins())
        .filter(|&k| {
            (0..a.n_users())
                .filter(|&n| {
                    let x = a.get(n, k);
                    x > tol && x < T::one() - tol
                })
                .count()
                >= 2
        })
        .count()
}

/// Upper bound `N (N - 1) / 2` on time-shared bins at a vertex solution.
pub fn shared_bin_bound(n_users: usize) -> usize {
    n_users * n_users.saturating_sub(1) / 2
}
