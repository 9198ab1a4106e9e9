//! Interference-free per-subcarrier rates from channel gains, PSD mask and noise.
//!
//! Each user transmits at the mask level on every bin it occupies, so the rate a
//! user would get on bin `k` if it owned the bin alone is
//! `log2(1 + |h|^2 p / sigma^2)` with the bin bandwidth normalized to one.

use serde::{Deserialize, Serialize};

use crate::error::{dim_mismatch, invalid, Result};
use crate::Scalar;

/// Channel state for `n_users` users over `n_bins` subcarriers.
///
/// All three arrays are stored row-major, one row per user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRealization<T> {
    n_users: usize,
    n_bins: usize,
    gain: Vec<T>,
    psd_mask: Vec<T>,
    noise: Vec<T>,
}

fn flatten<T: Scalar>(
    field: &'static str,
    rows: Vec<Vec<T>>,
    n_users: usize,
    n_bins: usize,
) -> Result<Vec<T>> {
    if rows.len() != n_users {
        return Err(dim_mismatch(field, format!("{n_users} rows"), format!("{} rows", rows.len())));
    }
    let mut out = Vec::with_capacity(n_users * n_bins);
    for (n, row) in rows.into_iter().enumerate() {
        if row.len() != n_bins {
            return Err(dim_mismatch(
                field,
                format!("{n_bins} columns"),
                format!("{} columns in row {n}", row.len()),
            ));
        }
        out.extend(row);
    }
    Ok(out)
}

impl<T: Scalar> ChannelRealization<T> {
    /// Builds a realization from per-user rows. `gain` fixes the dimensions;
    /// `psd_mask` and `noise` must match them.
    pub fn new(gain: Vec<Vec<T>>, psd_mask: Vec<Vec<T>>, noise: Vec<Vec<T>>) -> Result<Self> {
        let n_users = gain.len();
        if n_users == 0 {
            return Err(invalid("gain", "at least one user is required"));
        }
        let n_bins = gain[0].len();
        if n_bins == 0 {
            return Err(invalid("gain", "at least one bin is required"));
        }
        let gain = flatten("gain", gain, n_users, n_bins)?;
        let psd_mask = flatten("psd_mask", psd_mask, n_users, n_bins)?;
        let noise = flatten("noise", noise, n_users, n_bins)?;
        let ch = Self {
            n_users,
            n_bins,
            gain,
            psd_mask,
            noise,
        };
        ch.validate()?;
        Ok(ch)
    }

    /// Same mask level and noise power for every user and bin.
    pub fn with_common(gain: Vec<Vec<T>>, psd_mask: T, noise: T) -> Result<Self> {
        let n_users = gain.len();
        let n_bins = gain.first().map_or(0, Vec::len);
        Self::new(
            gain,
            vec![vec![psd_mask; n_bins]; n_users],
            vec![vec![noise; n_bins]; n_users],
        )
    }

    fn validate(&self) -> Result<()> {
        if let Some(i) = self.gain.iter().position(|g| !(g.is_finite() && *g >= T::zero())) {
            return Err(invalid("gain", format!("entry {i} must be finite and >= 0")));
        }
        if let Some(i) = self.psd_mask.iter().position(|p| !(p.is_finite() && *p >= T::zero())) {
            return Err(invalid("psd_mask", format!("entry {i} must be finite and >= 0")));
        }
        if let Some(i) = self.noise.iter().position(|s| !(s.is_finite() && *s > T::zero())) {
            return Err(invalid("noise", format!("entry {i} must be finite and > 0")));
        }
        Ok(())
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn gain(&self, user: usize, bin: usize) -> T {
        self.gain[user * self.n_bins + bin]
    }

    pub fn psd_mask(&self, user: usize, bin: usize) -> T {
        self.psd_mask[user * self.n_bins + bin]
    }

    pub fn noise(&self, user: usize, bin: usize) -> T {
        self.noise[user * self.n_bins + bin]
    }

    /// Received SNR `|h|^2 p / sigma^2` for one user on one bin.
    pub fn snr(&self, user: usize, bin: usize) -> T {
        let i = user * self.n_bins + bin;
        self.gain[i] * self.psd_mask[i] / self.noise[i]
    }
}

/// Achievable rate `R[n][k]` of user `n` on bin `k`, in bits per channel use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateMatrix<T> {
    n_users: usize,
    n_bins: usize,
    data: Vec<T>,
}

impl<T: Scalar> RateMatrix<T> {
    /// Ingests raw rates, one row per user.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n_users = rows.len();
        if n_users == 0 {
            return Err(invalid("rates", "at least one user is required"));
        }
        let n_bins = rows[0].len();
        if n_bins == 0 {
            return Err(invalid("rates", "at least one bin is required"));
        }
        let data = flatten("rates", rows, n_users, n_bins)?;
        if let Some(i) = data.iter().position(|r| !(r.is_finite() && *r >= T::zero())) {
            return Err(invalid(
                "rates",
                format!("entry ({}, {}) must be finite and >= 0", i / n_bins, i % n_bins),
            ));
        }
        Ok(Self {
            n_users,
            n_bins,
            data,
        })
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

    pub fn row(&self, user: usize) -> &[T] {
        &self.data[user * self.n_bins..(user + 1) * self.n_bins]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.data.chunks(self.n_bins)
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.rows().map(<[T]>::to_vec).collect()
    }

    /// Keeps only the listed users, in the given order.
    pub fn select_users(&self, users: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(users.len() * self.n_bins);
        for &u in users {
            if u >= self.n_users {
                return Err(invalid("users", format!("user index {u} out of range")));
            }
            data.extend_from_slice(self.row(u));
        }
        if users.is_empty() {
            return Err(invalid("users", "selection is empty"));
        }
        Ok(Self {
            n_users: users.len(),
            n_bins: self.n_bins,
            data,
        })
    }

    /// Returns true if user `n` has zero rate on every bin.
    pub fn is_zero_user(&self, user: usize) -> bool {
        self.row(user).iter().all(|r| *r == T::zero())
    }
}

/// Computes `R[n][k] = log2(1 + gain * mask / noise)` for every user and bin.
pub fn compute_rate_matrix<T: Scalar>(ch: &ChannelRealization<T>) -> RateMatrix<T> {
    let data = (0..ch.n_users * ch.n_bins)
        .map(|i| {
            let snr = ch.gain[i] * ch.psd_mask[i] / ch.noise[i];
            if snr == T::zero() {
                T::zero()
            } else {
                (T::one() + snr).log2()
            }
        })
        .collect();
    RateMatrix {
        n_users: ch.n_users,
        n_bins: ch.n_bins,
        data,
    }
}

/// `10^(snr_db / 10)`.
pub fn snr_db_to_linear<T: Scalar>(snr_db: T) -> T {
    T::lit(10.0).powf(snr_db / T::lit(10.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn single(gain: f64, mask: f64, noise: f64) -> f64 {
        let ch = ChannelRealization::new(vec![vec![gain]], vec![vec![mask]], vec![vec![noise]])
            .unwrap();
        compute_rate_matrix(&ch).get(0, 0)
    }

    #[test]
    fn rate_examples() {
        assert_eq!(single(1.0, 1.0, 1.0), 1.0);
        assert_eq!(single(3.0, 1.0, 1.0), 2.0);
        assert_eq!(single(0.5, 4.0, 2.0), 1.0);
        assert_eq!(single(0.0, 7.0, 0.3), 0.0);
        assert_eq!(single(5.0, 0.0, 0.3), 0.0);
    }

    #[test]
    fn db_conversion() {
        assert_eq!(snr_db_to_linear(0.0_f64), 1.0);
        assert!((snr_db_to_linear(20.0_f64) - 100.0).abs() < 1e-12);
        assert!((snr_db_to_linear(10.0_f64) - 10.0).abs() < 1e-12);
        assert!((snr_db_to_linear(10.0_f32) - 10.0).abs() < 1e-5);
    }

    #[test]
    fn mismatch_names_field() {
        let err = ChannelRealization::new(
            vec![vec![1.0, 2.0]],
            vec![vec![1.0, 2.0]],
            vec![vec![1.0]],
        )
        .unwrap_err();
        assert!(matches!(err, crate::Error::DimensionMismatch { field: "noise", .. }));

        let err = ChannelRealization::new(
            vec![vec![1.0], vec![1.0]],
            vec![vec![1.0]],
            vec![vec![1.0], vec![1.0]],
        )
        .unwrap_err();
        assert!(matches!(err, crate::Error::DimensionMismatch { field: "psd_mask", .. }));
    }

    #[test]
    fn rejects_bad_values() {
        assert!(ChannelRealization::with_common(vec![vec![-1.0]], 1.0, 1.0).is_err());
        assert!(ChannelRealization::with_common(vec![vec![1.0]], 1.0, 0.0).is_err());
        assert!(ChannelRealization::with_common(vec![vec![1.0]], f64::NAN, 1.0).is_err());
        assert!(RateMatrix::from_rows(vec![vec![1.0, -0.1]]).is_err());
        assert!(RateMatrix::<f64>::from_rows(vec![]).is_err());
        assert!(RateMatrix::from_rows(vec![vec![1.0, 2.0], vec![1.0]]).is_err());
    }

    #[test]
    fn generic_over_f32() {
        let ch = ChannelRealization::with_common(vec![vec![3.0_f32, 1.0]], 1.0, 1.0).unwrap();
        let r = compute_rate_matrix(&ch);
        assert!((r.get(0, 0) - 2.0).abs() < 1e-6);
        assert!((r.get(0, 1) - 1.0).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn monotone_in_gain(g in 0.0..1e3f64, dg in 0.0..1e3f64, p in 0.0..10.0f64, s in 1e-3..10.0f64) {
            prop_assert!(single(g + dg, p, s) >= single(g, p, s));
        }

        #[test]
        fn mask_noise_scaling(g in 0.0..1e3f64, p in 0.0..10.0f64, s in 1e-3..10.0f64) {
            let a = ChannelRealization::with_common(vec![vec![g]], p, s).unwrap();
            let b = ChannelRealization::with_common(vec![vec![g]], 2.0 * p, s / 2.0).unwrap();
            prop_assert_eq!(b.snr(0, 0), 4.0 * a.snr(0, 0));
        }
    }
}
