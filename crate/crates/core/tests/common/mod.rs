//! Test-only oracles that do not touch the simplex code.

#![allow(dead_code)]

use ofdma_maxmin::RateMatrixF64;
use rand::Rng;

/// Exact weighted max-min value by enumerating the breakpoints of the dual.
///
/// By LP duality the optimum equals the minimum over `u` in the unit simplex
/// of `f(u) = sum_k max_n gamma_n u_n R[n][k]`. `f` is convex and piecewise
/// linear, so the minimum sits where `N - 1` of the hyperplanes
/// `gamma_n u_n R[n][k] = gamma_m u_m R[m][k]` and `u_n = 0` meet the simplex.
/// Cost grows combinatorially; meant for `N <= 3`.
pub fn dual_breakpoint_value(r: &RateMatrixF64, gamma: &[f64]) -> f64 {
    let n = r.n_users();
    let k = r.n_bins();
    let mut planes: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        planes.push(e);
    }
    for bin in 0..k {
        for a in 0..n {
            for b in a + 1..n {
                let mut p = vec![0.0; n];
                p[a] = gamma[a] * r.get(a, bin);
                p[b] = -gamma[b] * r.get(b, bin);
                planes.push(p);
            }
        }
    }
    let f = |u: &[f64]| -> f64 {
        (0..k)
            .map(|bin| {
                (0..n)
                    .map(|i| gamma[i] * u[i] * r.get(i, bin))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .sum()
    };
    let mut best = f64::INFINITY;
    for combo in combinations(planes.len(), n - 1) {
        let mut rows: Vec<Vec<f64>> = combo.iter().map(|&i| planes[i].clone()).collect();
        let mut rhs = vec![0.0; n - 1];
        rows.push(vec![1.0; n]);
        rhs.push(1.0);
        if let Some(u) = gauss_solve(rows, rhs) {
            if u.iter().all(|x| *x >= -1e-12) {
                let u: Vec<f64> = u.iter().map(|x| x.max(0.0)).collect();
                best = best.min(f(&u));
            }
        }
    }
    best
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        out.push(idx.clone());
        let mut i = r;
        while i > 0 && idx[i - 1] == n - r + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in 0..n {
            if row != col {
                let f = a[row][col] / a[col][col];
                let pivot_row = a[col].clone();
                for (x, p) in a[row].iter_mut().zip(&pivot_row).skip(col) {
                    *x -= f * p;
                }
                b[row] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

pub fn random_rates<R: Rng>(rng: &mut R, n_users: usize, n_bins: usize, lo: f64, hi: f64) -> RateMatrixF64 {
    let rows = (0..n_users)
        .map(|_| (0..n_bins).map(|_| rng.random_range(lo..hi)).collect())
        .collect();
    RateMatrixF64::from_rows(rows).unwrap()
}

pub fn six_bin_rates() -> RateMatrixF64 {
    RateMatrixF64::from_rows(vec![
        vec![14.0, 18.0, 5.0, 10.0, 9.0, 3.0],
        vec![6.0, 10.0, 5.0, 15.0, 17.0, 16.0],
    ])
    .unwrap()
}
