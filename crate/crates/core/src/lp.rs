//! Dense two-phase primal simplex.
//!
//! Problems are stated as `maximize c^T x` subject to rows `a_i^T x (<=|>=|=) b_i`
//! and per-variable bounds `l_j <= x_j <= u_j` (lower bound defaults to zero,
//! upper bound optional). Internally every variable is shifted to `x - l`, upper
//! bounds become extra `<=` rows, rows are sign-normalized to a nonnegative
//! right-hand side and given a slack or an artificial column. Phase one drives
//! the artificials to zero, phase two optimizes the real objective with the
//! artificial columns barred from re-entering.
//!
//! Two entering rules are available (see [`PivotRule`]). Both are
//! deterministic and both use Bland's lowest-index tie-break on the ratio test.
//!
//! Dual values are read from the final tableau: the objective-row entry of the
//! column that started as row `i`'s basic column equals `c_B^T B^{-1} e_i`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{dim_mismatch, invalid, Error, Result};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    fn flipped(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint<T> {
    pub coeffs: Vec<T>,
    pub relation: Relation,
    pub rhs: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bound<T> {
    pub lower: T,
    pub upper: Option<T>,
}

/// A linear program in maximization form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram<T> {
    objective: Vec<T>,
    constraints: Vec<Constraint<T>>,
    bounds: Vec<Bound<T>>,
}

impl<T: Scalar> LinearProgram<T> {
    /// Starts a program maximizing `objective^T x` with `x >= 0` and no rows.
    pub fn maximize(objective: Vec<T>) -> Self {
        let bounds = vec![
            Bound {
                lower: T::zero(),
                upper: None
            };
            objective.len()
        ];
        Self {
            objective,
            constraints: Vec::new(),
            bounds,
        }
    }

    pub fn add_constraint(&mut self, coeffs: Vec<T>, relation: Relation, rhs: T) -> &mut Self {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    pub fn with_constraint(mut self, coeffs: Vec<T>, relation: Relation, rhs: T) -> Self {
        self.add_constraint(coeffs, relation, rhs);
        self
    }

    pub fn set_bounds(&mut self, var: usize, lower: T, upper: Option<T>) -> &mut Self {
        self.bounds[var] = Bound { lower, upper };
        self
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn n_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn objective(&self) -> &[T] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint<T>] {
        &self.constraints
    }

    pub fn bounds(&self) -> &[Bound<T>] {
        &self.bounds
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(invalid("objective", "coefficients must be finite"));
        }
        for (i, row) in self.constraints.iter().enumerate() {
            if row.coeffs.len() != n {
                return Err(dim_mismatch(
                    "constraints",
                    format!("{n} coefficients"),
                    format!("{} in row {i}", row.coeffs.len()),
                ));
            }
            if !row.rhs.is_finite() || row.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(invalid("constraints", format!("row {i} has a non-finite entry")));
            }
        }
        for (j, b) in self.bounds.iter().enumerate() {
            if !b.lower.is_finite() || b.upper.is_some_and(|u| u.is_nan() || u == T::neg_infinity())
            {
                return Err(invalid("bounds", format!("variable {j} has an invalid bound")));
            }
        }
        Ok(())
    }

    /// Largest amount by which `x` violates any row or bound.
    pub fn max_violation(&self, x: &[T]) -> T {
        let mut worst = T::zero();
        for row in &self.constraints {
            let lhs: T = row.coeffs.iter().zip(x).map(|(a, v)| *a * *v).sum();
            let v = match row.relation {
                Relation::Le => lhs - row.rhs,
                Relation::Ge => row.rhs - lhs,
                Relation::Eq => (lhs - row.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (b, v) in self.bounds.iter().zip(x) {
            worst = worst.max(b.lower - *v);
            if let Some(u) = b.upper {
                worst = worst.max(*v - u);
            }
        }
        worst
    }

    /// Dual objective `b^T y + u^T w + l^T d` for an optimal solution, where `d`
    /// are the reduced costs left after the row and upper-bound duals.
    pub fn dual_objective(&self, sol: &LpSolution<T>) -> T {
        let mut total: T = self
            .constraints
            .iter()
            .zip(&sol.dual)
            .map(|(row, y)| row.rhs * *y)
            .sum();
        for (j, b) in self.bounds.iter().enumerate() {
            let w = sol.upper_bound_dual[j];
            if let Some(u) = b.upper {
                total += u * w;
            }
            let ay: T = self
                .constraints
                .iter()
                .zip(&sol.dual)
                .map(|(row, y)| row.coeffs[j] * *y)
                .sum();
            total += b.lower * (self.objective[j] - ay - w);
        }
        total
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Entering-column rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PivotRule {
    /// Lowest-index improving column, lowest-index leaving row on ratio ties.
    Bland,
    /// Most negative reduced cost (lowest index on ties). After a run of
    /// degenerate pivots as long as the row count it switches to Bland's rule
    /// until the objective moves again, so it cannot cycle.
    LargestCoefficient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverOptions {
    pub rule: PivotRule,
    pub max_pivots: usize,
    /// Keep a copy of the final tableau in the solution.
    pub keep_tableau: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            rule: PivotRule::LargestCoefficient,
            max_pivots: 100_000,
            keep_tableau: false,
        }
    }
}

/// Result of a simplex solve. Primal and dual vectors are empty unless the
/// status is [`LpStatus::Optimal`].
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    pub objective_value: T,
    pub primal: Vec<T>,
    /// One multiplier per constraint row: `>= 0` for `<=` rows, `<= 0` for `>=` rows.
    pub dual: Vec<T>,
    /// Multiplier of each variable's upper bound (zero when unbounded above).
    pub upper_bound_dual: Vec<T>,
    /// `c_j - a_j^T y` for each structural variable, read from the final tableau.
    pub reduced_costs: Vec<T>,
    /// Sorted indices of the basic columns (structural columns first, then
    /// slack/surplus, then artificial).
    pub basis: Vec<usize>,
    pub pivots: usize,
    pub tableau: Option<Tableau<T>>,
}

impl<T: Scalar> LpSolution<T> {
    fn without_point(status: LpStatus, value: T, pivots: usize) -> Self {
        Self {
            status,
            objective_value: value,
            primal: Vec::new(),
            dual: Vec::new(),
            upper_bound_dual: Vec::new(),
            reduced_costs: Vec::new(),
            basis: Vec::new(),
            pivots,
            tableau: None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Snapshot of a simplex tableau, used for debugging dumps.
#[derive(Debug, Clone, PartialEq)]
pub struct Tableau<T> {
    pub column_labels: Vec<String>,
    /// Row-major, `column_labels.len() + 1` entries per row (last one is the rhs).
    pub rows: Vec<Vec<T>>,
    pub basis: Vec<usize>,
    pub objective_row: Vec<T>,
}

impl<T: Scalar> Tableau<T> {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("basis");
        for l in &self.column_labels {
            out.push(',');
            out.push_str(l);
        }
        out.push_str(",rhs\n");
        for (row, b) in self.rows.iter().zip(&self.basis) {
            out.push_str(&self.column_labels[*b]);
            for v in row {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out.push_str("objective");
        for v in &self.objective_row {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
        out
    }
}

pub fn solve<T: Scalar>(lp: &LinearProgram<T>) -> Result<LpSolution<T>> {
    solve_with(lp, &SolverOptions::default())
}

pub fn solve_with<T: Scalar>(lp: &LinearProgram<T>, opts: &SolverOptions) -> Result<LpSolution<T>> {
    lp.validate()?;
    let n = lp.n_vars();

    // Rows after lower-bound shift, with upper bounds appended as <= rows.
    let mut rows: Vec<(Vec<T>, Relation, T)> = Vec::with_capacity(lp.n_constraints() + n);
    for c in &lp.constraints {
        let shift: T = c.coeffs.iter().zip(&lp.bounds).map(|(a, b)| *a * b.lower).sum();
        rows.push((c.coeffs.clone(), c.relation, c.rhs - shift));
    }
    let mut ub_rows = Vec::new();
    for (j, b) in lp.bounds.iter().enumerate() {
        if let Some(u) = b.upper {
            if u < b.lower {
                return Ok(LpSolution::without_point(LpStatus::Infeasible, T::nan(), 0));
            }
            if u.is_finite() {
                let mut coeffs = vec![T::zero(); n];
                coeffs[j] = T::one();
                ub_rows.push(j);
                rows.push((coeffs, Relation::Le, u - b.lower));
            }
        }
    }

    let mut tab = Simplex::new(n, rows, opts.rule, opts.max_pivots);

    if tab.n_art > 0 {
        let mut cost = vec![T::zero(); tab.n_cols];
        for c in cost.iter_mut().skip(tab.first_art) {
            *c = -T::one();
        }
        tab.set_costs(&cost);
        let outcome = tab.run(tab.n_cols)?;
        debug_assert!(outcome, "phase one is bounded");
        let scale = T::one().max(tab.rhs_scale);
        if tab.objective_value() < -T::feas_tol() * scale {
            log::debug!("phase one ended at {}", tab.objective_value());
            return Ok(LpSolution::without_point(LpStatus::Infeasible, T::nan(), tab.pivots));
        }
        tab.evict_artificials()?;
    }

    let mut cost = vec![T::zero(); tab.n_cols];
    cost[..n].copy_from_slice(&lp.objective);
    tab.set_costs(&cost);
    if !tab.run(tab.first_art)? {
        return Ok(LpSolution::without_point(LpStatus::Unbounded, T::infinity(), tab.pivots));
    }

    let m = tab.n_rows;
    let width = tab.n_cols + 1;
    let mut shifted = vec![T::zero(); tab.n_cols];
    for (i, &b) in tab.basis.iter().enumerate() {
        shifted[b] = tab.data[i * width + tab.n_cols];
    }
    let primal: Vec<T> = (0..n).map(|j| lp.bounds[j].lower + shifted[j]).collect();
    let objective_value: T = primal.iter().zip(&lp.objective).map(|(x, c)| *x * *c).sum();

    let row_dual = |i: usize| tab.sign[i] * tab.obj[tab.init_col[i]];
    let m_user = lp.n_constraints();
    let dual: Vec<T> = (0..m_user).map(row_dual).collect();
    let mut upper_bound_dual = vec![T::zero(); n];
    for (r, &j) in ub_rows.iter().enumerate() {
        upper_bound_dual[j] = row_dual(m_user + r);
    }
    let reduced_costs: Vec<T> = (0..n).map(|j| -tab.obj[j]).collect();
    let mut basis = tab.basis.clone();
    basis.sort_unstable();

    let tableau = opts.keep_tableau.then(|| tab.snapshot());
    log::trace!("simplex finished after {} pivots over {m} rows", tab.pivots);

    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective_value,
        primal,
        dual,
        upper_bound_dual,
        reduced_costs,
        basis,
        pivots: tab.pivots,
        tableau,
    })
}

struct Simplex<T> {
    n_struct: usize,
    n_rows: usize,
    n_cols: usize,
    first_art: usize,
    n_art: usize,
    /// Row-major `n_rows x (n_cols + 1)`; last column is the rhs.
    data: Vec<T>,
    /// `z_j - c_j` for each column, followed by the current objective value.
    obj: Vec<T>,
    cost: Vec<T>,
    basis: Vec<usize>,
    init_col: Vec<usize>,
    sign: Vec<T>,
    rhs_scale: T,
    pivots: usize,
    max_pivots: usize,
    rule: PivotRule,
}

impl<T: Scalar> Simplex<T> {
    fn new(n: usize, rows: Vec<(Vec<T>, Relation, T)>, rule: PivotRule, max_pivots: usize) -> Self {
        let m = rows.len();
        let mut normalized = Vec::with_capacity(m);
        let mut sign = Vec::with_capacity(m);
        for (coeffs, rel, rhs) in rows {
            // Nonnegative rhs; a >= row with zero rhs becomes a <= row so it needs no artificial.
            let flip = rhs < T::zero() || (rhs == T::zero() && rel == Relation::Ge);
            if flip {
                normalized.push((coeffs.into_iter().map(|a| -a).collect::<Vec<_>>(), rel.flipped(), -rhs));
                sign.push(-T::one());
            } else {
                normalized.push((coeffs, rel, rhs));
                sign.push(T::one());
            }
        }
        let n_slack = normalized.iter().filter(|r| r.1 != Relation::Eq).count();
        let n_art = normalized.iter().filter(|r| r.1 != Relation::Le).count();
        let first_art = n + n_slack;
        let n_cols = first_art + n_art;
        let width = n_cols + 1;
        let mut data = vec![T::zero(); m * width];
        let mut basis = Vec::with_capacity(m);
        let mut init_col = Vec::with_capacity(m);
        let mut next_slack = n;
        let mut next_art = first_art;
        let mut rhs_scale = T::zero();
        for (i, (coeffs, rel, rhs)) in normalized.into_iter().enumerate() {
            let row = &mut data[i * width..(i + 1) * width];
            row[..n].copy_from_slice(&coeffs);
            row[n_cols] = rhs;
            rhs_scale = rhs_scale.max(rhs);
            match rel {
                Relation::Le => {
                    row[next_slack] = T::one();
                    basis.push(next_slack);
                    init_col.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = -T::one();
                    next_slack += 1;
                    row[next_art] = T::one();
                    basis.push(next_art);
                    init_col.push(next_art);
                    next_art += 1;
                }
                Relation::Eq => {
                    row[next_art] = T::one();
                    basis.push(next_art);
                    init_col.push(next_art);
                    next_art += 1;
                }
            }
        }
        Self {
            n_struct: n,
            n_rows: m,
            n_cols,
            first_art,
            n_art,
            data,
            obj: vec![T::zero(); width],
            cost: vec![T::zero(); n_cols],
            basis,
            init_col,
            sign,
            rhs_scale,
            pivots: 0,
            max_pivots,
            rule,
        }
    }

    fn width(&self) -> usize {
        self.n_cols + 1
    }

    fn objective_value(&self) -> T {
        self.obj[self.n_cols]
    }

    fn set_costs(&mut self, cost: &[T]) {
        self.cost.copy_from_slice(cost);
        let width = self.width();
        for (j, o) in self.obj.iter_mut().enumerate() {
            *o = if j < self.n_cols { -cost[j] } else { T::zero() };
        }
        for i in 0..self.n_rows {
            let cb = cost[self.basis[i]];
            if cb != T::zero() {
                let row = &self.data[i * width..(i + 1) * width];
                for (o, a) in self.obj.iter_mut().zip(row) {
                    *o += cb * *a;
                }
            }
        }
        for &b in &self.basis {
            self.obj[b] = T::zero();
        }
    }

    /// Iterates until optimal (`Ok(true)`) or unbounded (`Ok(false)`). Only
    /// columns below `enter_limit` may enter the basis.
    fn run(&mut self, enter_limit: usize) -> Result<bool> {
        let width = self.width();
        let mut degenerate_run = 0usize;
        loop {
            let bland = self.rule == PivotRule::Bland || degenerate_run >= self.n_rows.max(1);
            let enter = if bland {
                (0..enter_limit).find(|&j| self.obj[j] < -T::opt_tol())
            } else {
                let mut best: Option<usize> = None;
                for j in 0..enter_limit {
                    if self.obj[j] < -T::opt_tol() && best.is_none_or(|b| self.obj[j] < self.obj[b]) {
                        best = Some(j);
                    }
                }
                best
            };
            let Some(enter) = enter else {
                return Ok(true);
            };
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.n_rows {
                let a = self.data[i * width + enter];
                if a <= T::pivot_tol() {
                    continue;
                }
                let ratio = self.data[i * width + self.n_cols] / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        let tie = T::pivot_tol() * (T::one() + best.abs());
                        if ratio < best - tie
                            || ((ratio - best).abs() <= tie && self.basis[i] < self.basis[r])
                        {
                            Some((i, ratio))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
            let Some((row, step)) = leave else {
                return Ok(false);
            };
            if step > T::zero() {
                degenerate_run = 0;
            } else {
                degenerate_run += 1;
            }
            self.pivot(row, enter)?;
        }
    }

    fn pivot(&mut self, row: usize, col: usize) -> Result<()> {
        if self.pivots >= self.max_pivots {
            return Err(Error::IterationLimit(self.max_pivots));
        }
        self.pivots += 1;
        let width = self.width();
        let p = self.data[row * width + col];
        if !(p.abs() > T::pivot_tol()) {
            return Err(Error::SingularBasis(format!(
                "pivot element {p} in row {row}, column {col}"
            )));
        }
        let inv = T::one() / p;
        let (before, rest) = self.data.split_at_mut(row * width);
        let (prow, after) = rest.split_at_mut(width);
        for v in prow.iter_mut() {
            *v *= inv;
        }
        prow[col] = T::one();
        let eliminate = |target: &mut [T]| {
            let f = target[col];
            if f != T::zero() {
                for (t, s) in target.iter_mut().zip(prow.iter()) {
                    *t -= f * *s;
                }
                target[col] = T::zero();
            }
        };
        for r in before.chunks_mut(width).chain(after.chunks_mut(width)) {
            eliminate(r);
            let rhs = &mut r[width - 1];
            if *rhs < T::zero() {
                if *rhs < -T::feas_tol() * (T::one() + self.rhs_scale) {
                    return Err(Error::SingularBasis(format!(
                        "basic value {rhs} lost feasibility"
                    )));
                }
                *rhs = T::zero();
            }
        }
        eliminate(&mut self.obj);
        if self.obj.iter().any(|v| v.is_nan()) {
            return Err(Error::SingularBasis("NaN in objective row".into()));
        }
        self.basis[row] = col;
        Ok(())
    }

    /// Pivots zero-valued artificials out of the basis after phase one. Rows
    /// whose non-artificial entries are all negligible are redundant and keep
    /// their artificial at zero.
    fn evict_artificials(&mut self) -> Result<()> {
        let width = self.width();
        for i in 0..self.n_rows {
            if self.basis[i] < self.first_art {
                continue;
            }
            let value = self.data[i * width + self.n_cols];
            if value > T::feas_tol() * (T::one() + self.rhs_scale) {
                return Err(Error::SingularBasis(format!(
                    "artificial in row {i} still at {value} after phase one"
                )));
            }
            self.data[i * width + self.n_cols] = T::zero();
            let candidate =
                (0..self.first_art).find(|&j| self.data[i * width + j].abs() > T::pivot_tol());
            if let Some(j) = candidate {
                self.pivot(i, j)?;
            }
        }
        Ok(())
    }

    fn snapshot(&self) -> Tableau<T> {
        let n_slack = self.first_art - self.n_struct;
        let column_labels = (0..self.n_cols)
            .map(|j| {
                if j < self.n_struct {
                    format!("x{j}")
                } else if j < self.first_art {
                    format!("s{}", j - self.n_struct)
                } else {
                    format!("a{}", j - self.n_struct - n_slack)
                }
            })
            .collect();
        Tableau {
            column_labels,
            rows: self.data.chunks(self.width()).map(<[T]>::to_vec).collect(),
            basis: self.basis.clone(),
            objective_row: self.obj.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_variable_bound() {
        let lp = LinearProgram::maximize(vec![1.0_f64]).with_constraint(vec![1.0], Relation::Le, 1.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.objective_value, 1.0);
        assert_eq!(sol.dual, vec![1.0]);
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let lp = LinearProgram::maximize(vec![1.0_f64])
            .with_constraint(vec![1.0], Relation::Ge, 2.0)
            .with_constraint(vec![1.0], Relation::Le, 1.0);
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_direction() {
        let lp = LinearProgram::maximize(vec![1.0_f64, 1.0]).with_constraint(
            vec![1.0, -1.0],
            Relation::Le,
            1.0,
        );
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn vertex_puts_mass_on_one_variable() {
        let lp = LinearProgram::maximize(vec![1.0_f64, 1.0]).with_constraint(
            vec![1.0, 1.0],
            Relation::Le,
            1.0,
        );
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.objective_value, 1.0);
        let nonzero = sol.primal.iter().filter(|x| **x != 0.0).count();
        assert_eq!(nonzero, 1);
    }

    #[test]
    fn equality_rows_and_duals() {
        // max 3x + 2y  s.t.  x + y = 4,  x <= 3
        let lp = LinearProgram::maximize(vec![3.0_f64, 2.0])
            .with_constraint(vec![1.0, 1.0], Relation::Eq, 4.0)
            .with_constraint(vec![1.0, 0.0], Relation::Le, 3.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective_value - 11.0).abs() < 1e-12);
        assert!((sol.dual[0] - 2.0).abs() < 1e-12);
        assert!((sol.dual[1] - 1.0).abs() < 1e-12);
        assert!((lp.dual_objective(&sol) - 11.0).abs() < 1e-12);
    }

    #[test]
    fn ge_row_dual_is_nonpositive() {
        // max -x - y  s.t.  x + 2y >= 2
        let lp = LinearProgram::maximize(vec![-1.0_f64, -1.0]).with_constraint(
            vec![1.0, 2.0],
            Relation::Ge,
            2.0,
        );
        let sol = solve(&lp).unwrap();
        assert!((sol.objective_value + 1.0).abs() < 1e-12);
        assert!((sol.dual[0] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn bounds_are_honoured() {
        // max x + y with 1 <= x <= 2, y <= 0.5 (as a bound), x + y <= 10
        let mut lp = LinearProgram::maximize(vec![1.0_f64, 1.0]).with_constraint(
            vec![1.0, 1.0],
            Relation::Le,
            10.0,
        );
        lp.set_bounds(0, 1.0, Some(2.0)).set_bounds(1, 0.0, Some(0.5));
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.primal, vec![2.0, 0.5]);
        assert_eq!(sol.upper_bound_dual, vec![1.0, 1.0]);
        assert!((lp.dual_objective(&sol) - 2.5).abs() < 1e-12);

        let mut lp = LinearProgram::maximize(vec![-1.0_f64]);
        lp.set_bounds(0, 3.0, None);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.primal, vec![3.0]);
        assert!((lp.dual_objective(&sol) + 3.0).abs() < 1e-12);

        let mut lp = LinearProgram::maximize(vec![1.0_f64]);
        lp.set_bounds(0, 2.0, Some(1.0));
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn redundant_equality_rows() {
        let lp = LinearProgram::maximize(vec![1.0_f64, 2.0])
            .with_constraint(vec![1.0, 1.0], Relation::Eq, 1.0)
            .with_constraint(vec![2.0, 2.0], Relation::Eq, 2.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective_value - 2.0).abs() < 1e-12);
        assert!((lp.dual_objective(&sol) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn negative_rhs_is_normalized() {
        // max x s.t. -x >= -3
        let lp = LinearProgram::maximize(vec![1.0_f64]).with_constraint(vec![-1.0], Relation::Ge, -3.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.primal, vec![3.0]);
        assert!((sol.dual[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_ragged_rows() {
        let lp = LinearProgram::maximize(vec![1.0_f64, 1.0]).with_constraint(vec![1.0], Relation::Le, 1.0);
        assert!(matches!(solve(&lp), Err(Error::DimensionMismatch { .. })));
        let lp = LinearProgram::maximize(vec![1.0_f64]).with_constraint(vec![1.0], Relation::Le, f64::NAN);
        assert!(solve(&lp).is_err());
    }

    #[test]
    fn pivot_limit_is_an_error() {
        let lp = LinearProgram::maximize(vec![1.0_f64, 1.0])
            .with_constraint(vec![1.0, 0.0], Relation::Le, 1.0)
            .with_constraint(vec![0.0, 1.0], Relation::Le, 1.0);
        let opts = SolverOptions {
            max_pivots: 1,
            ..Default::default()
        };
        assert_eq!(solve_with(&lp, &opts), Err(Error::IterationLimit(1)));
    }

    fn both_rules() -> [SolverOptions; 2] {
        [PivotRule::Bland, PivotRule::LargestCoefficient].map(|rule| SolverOptions {
            rule,
            ..Default::default()
        })
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // Cycles under the textbook largest-coefficient rule without anti-cycling.
        let lp = LinearProgram::maximize(vec![0.75_f64, -20.0, 0.5, -6.0])
            .with_constraint(vec![0.25, -8.0, -1.0, 9.0], Relation::Le, 0.0)
            .with_constraint(vec![0.5, -12.0, -0.5, 3.0], Relation::Le, 0.0)
            .with_constraint(vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0);
        for opts in both_rules() {
            let sol = solve_with(&lp, &opts).unwrap();
            assert_eq!(sol.status, LpStatus::Optimal);
            assert!((sol.objective_value - 1.25).abs() < 1e-12, "{:?}", opts.rule);
            assert!((lp.dual_objective(&sol) - 1.25).abs() < 1e-12);
        }
    }

    #[test]
    fn rules_agree_on_value() {
        let lp = LinearProgram::maximize(vec![2.0_f64, 3.0, 1.0])
            .with_constraint(vec![1.0, 1.0, 1.0], Relation::Le, 4.0)
            .with_constraint(vec![1.0, 3.0, 0.0], Relation::Le, 6.0)
            .with_constraint(vec![1.0, 0.0, 1.0], Relation::Ge, 1.0)
            .with_constraint(vec![0.0, 1.0, 1.0], Relation::Eq, 2.0);
        let values: Vec<f64> = both_rules()
            .iter()
            .map(|o| solve_with(&lp, o).unwrap().objective_value)
            .collect();
        assert!((values[0] - values[1]).abs() < 1e-12);
        assert!((values[0] - 26.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn tableau_dump() {
        let lp = LinearProgram::maximize(vec![1.0_f64]).with_constraint(vec![1.0], Relation::Le, 1.0);
        let opts = SolverOptions {
            keep_tableau: true,
            ..Default::default()
        };
        let csv = solve_with(&lp, &opts).unwrap().tableau.unwrap().to_csv();
        assert_eq!(csv, "basis,x0,s0,rhs\nx0,1,1,1\nobjective,0,1,1\n");
    }

    #[test]
    fn f32_solve() {
        let lp = LinearProgram::maximize(vec![1.0_f32, 1.0])
            .with_constraint(vec![1.0, 2.0], Relation::Le, 4.0)
            .with_constraint(vec![3.0, 1.0], Relation::Le, 6.0);
        let sol = solve(&lp).unwrap();
        assert!((sol.objective_value - 2.8).abs() < 1e-5);
    }
}
