//! Mixed fixed-rate (voice) and flexible-rate (data) allocation, and the
//! rate-vector feasibility test.
//!
//! A desired rate vector `R^d` is achievable exactly when the weighted max-min
//! value with weights `1 / R^d_n` is at least one; the optimum then delivers
//! `c * R^d_n` to every user. Mixed allocation first runs that test on the voice
//! users alone and, if it passes, maximizes the common weighted data rate with
//! the voice floors as extra rows.

use serde::{Deserialize, Serialize};

use crate::error::{dim_mismatch, invalid, Result};
use crate::lp::SolverOptions;
use crate::maxmin::{solve_maxmin, solve_requirements, AllocationMatrix, Requirement, WeightVector};
use crate::rates::RateMatrix;
use crate::Scalar;

/// Service class of a single user.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum ServiceClass<T> {
    /// Fixed-rate user that must receive at least `r_min`.
    Voice { r_min: T },
    /// Flexible-rate user sharing the residue with priority `weight`.
    Data { weight: T },
}

/// Partition of the users into voice and data sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceProfile<T> {
    classes: Vec<ServiceClass<T>>,
}

impl<T: Scalar> ServiceProfile<T> {
    /// Voice floors must be finite and nonnegative (a zero floor asks for
    /// nothing and the user is left out of the optimization); data weights must
    /// be finite and positive.
    pub fn new(classes: Vec<ServiceClass<T>>) -> Result<Self> {
        if classes.is_empty() {
            return Err(invalid("profile", "at least one user is required"));
        }
        for (n, c) in classes.iter().enumerate() {
            match *c {
                ServiceClass::Voice { r_min } if !(r_min.is_finite() && r_min >= T::zero()) => {
                    return Err(invalid("r_min", format!("user {n} needs a finite floor >= 0")));
                }
                ServiceClass::Data { weight } if !(weight.is_finite() && weight > T::zero()) => {
                    return Err(invalid("weights", format!("user {n} needs a finite weight > 0")));
                }
                _ => {}
            }
        }
        Ok(Self { classes })
    }

    /// Every user is a data user with the given weights.
    pub fn all_data(weights: &WeightVector<T>) -> Self {
        Self {
            classes: weights
                .as_slice()
                .iter()
                .map(|w| ServiceClass::Data { weight: *w })
                .collect(),
        }
    }

    pub fn classes(&self) -> &[ServiceClass<T>] {
        &self.classes
    }

    pub fn n_users(&self) -> usize {
        self.classes.len()
    }

    pub fn voice_users(&self) -> Vec<usize> {
        self.indices(|c| matches!(c, ServiceClass::Voice { .. }))
    }

    pub fn data_users(&self) -> Vec<usize> {
        self.indices(|c| matches!(c, ServiceClass::Data { .. }))
    }

    fn indices(&self, pred: impl Fn(&ServiceClass<T>) -> bool) -> Vec<usize> {
        (0..self.classes.len()).filter(|&n| pred(&self.classes[n])).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MixedStatus {
    Feasible,
    VoiceInfeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixedResult<T> {
    pub status: MixedStatus,
    /// Common weighted data rate; zero when there are no data users or voice is infeasible.
    pub c: T,
    /// Feasibility margin of the voice floors alone (`>= 1` means feasible);
    /// infinite when no voice user asks for a positive rate.
    pub voice_margin: T,
    pub allocation: AllocationMatrix<T>,
    pub user_rates: Vec<T>,
    pub voice_users: Vec<usize>,
    pub data_users: Vec<usize>,
}

impl<T: Scalar> MixedResult<T> {
    pub fn voice_rates(&self) -> Vec<T> {
        self.voice_users.iter().map(|&n| self.user_rates[n]).collect()
    }

    pub fn data_rates(&self) -> Vec<T> {
        self.data_users.iter().map(|&n| self.user_rates[n]).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility<T> {
    pub feasible: bool,
    /// Largest scale such that `c * R^d` is achievable.
    pub c: T,
    /// Allocation delivering `c * R^d_n` to each user.
    pub allocation: AllocationMatrix<T>,
    pub user_rates: Vec<T>,
}

/// Tests whether the rate vector `desired` is achievable on `r`.
pub fn check_feasibility<T: Scalar>(r: &RateMatrix<T>, desired: &[T]) -> Result<Feasibility<T>> {
    if desired.len() != r.n_users() {
        return Err(dim_mismatch("desired", r.n_users(), desired.len()));
    }
    if let Some(n) = desired.iter().position(|d| !(d.is_finite() && *d > T::zero())) {
        return Err(invalid("desired", format!("rate for user {n} must be finite and > 0")));
    }
    let weights = WeightVector::new(desired.iter().map(|d| T::one() / *d).collect())?;
    let res = solve_maxmin(r, &weights)?;
    Ok(Feasibility {
        feasible: res.c >= T::one() - T::feas_tol(),
        c: res.c,
        allocation: res.allocation,
        user_rates: res.user_rates,
    })
}

pub fn solve_mixed<T: Scalar>(r: &RateMatrix<T>, profile: &ServiceProfile<T>) -> Result<MixedResult<T>> {
    let n_users = r.n_users();
    if profile.n_users() != n_users {
        return Err(dim_mismatch("profile", n_users, profile.n_users()));
    }
    let voice_users = profile.voice_users();
    let data_users = profile.data_users();

    // Users taking part in the optimization, in original order.
    let mut active = Vec::new();
    let mut reqs = Vec::new();
    let mut floors = Vec::new();
    let mut floor_users = Vec::new();
    for (n, class) in profile.classes().iter().enumerate() {
        match *class {
            ServiceClass::Voice { r_min } if r_min > T::zero() => {
                active.push(n);
                reqs.push(Requirement::Floor(r_min));
                floor_users.push(n);
                floors.push(r_min);
            }
            ServiceClass::Voice { .. } => {}
            ServiceClass::Data { weight } => {
                active.push(n);
                reqs.push(Requirement::Weighted(weight));
            }
        }
    }

    let mut voice_margin = T::infinity();
    let mut stage_one = None;
    if !floor_users.is_empty() {
        let check = check_feasibility(&r.select_users(&floor_users)?, &floors)?;
        voice_margin = check.c;
        if !check.feasible {
            log::debug!("voice floors infeasible, margin {}", check.c);
            let allocation = embed(&check.allocation, &floor_users, n_users);
            return Ok(finish(
                MixedStatus::VoiceInfeasible,
                T::zero(),
                voice_margin,
                allocation,
                r,
                voice_users,
                data_users,
            ));
        }
        stage_one = Some(check);
    }

    let (c, allocation) = if data_users.is_empty() {
        let allocation = match &stage_one {
            Some(check) => embed(&check.allocation, &floor_users, n_users),
            None => embed_all_to(0, r.n_bins(), n_users),
        };
        (T::zero(), allocation)
    } else {
        let sub = r.select_users(&active)?;
        let (res, _) = solve_requirements(&sub, &reqs, &SolverOptions::default())?;
        (res.c, embed(&res.allocation, &active, n_users))
    };

    Ok(finish(
        MixedStatus::Feasible,
        c,
        voice_margin,
        allocation,
        r,
        voice_users,
        data_users,
    ))
}

fn finish<T: Scalar>(
    status: MixedStatus,
    c: T,
    voice_margin: T,
    allocation: AllocationMatrix<T>,
    r: &RateMatrix<T>,
    voice_users: Vec<usize>,
    data_users: Vec<usize>,
) -> MixedResult<T> {
    let user_rates = allocation.user_rates(r);
    MixedResult {
        status,
        c,
        voice_margin,
        allocation,
        user_rates,
        voice_users,
        data_users,
    }
}

/// Places the rows of `sub` at `users` in an `n_users`-row matrix.
fn embed<T: Scalar>(sub: &AllocationMatrix<T>, users: &[usize], n_users: usize) -> AllocationMatrix<T> {
    let mut rows = vec![vec![T::zero(); sub.n_bins()]; n_users];
    for (i, &n) in users.iter().enumerate() {
        rows[n].copy_from_slice(sub.row(i));
    }
    AllocationMatrix::from_rows(rows).expect("embedding keeps column sums")
}

fn embed_all_to<T: Scalar>(user: usize, n_bins: usize, n_users: usize) -> AllocationMatrix<T> {
    let mut rows = vec![vec![T::zero(); n_bins]; n_users];
    rows[user] = vec![T::one(); n_bins];
    AllocationMatrix::from_rows(rows).expect("one owner per bin")
}
