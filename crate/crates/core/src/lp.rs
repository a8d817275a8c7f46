//! Dense bounded-variable primal simplex.
//!
//! Solves `max c^T x` subject to `A x <= b`, `0 <= x <= u` with `b >= 0`, so
//! the all-slack basis is feasible and no phase one is needed. Upper bounds
//! are handled implicitly: a nonbasic variable sits at either bound.
//! The entering variable is the one with the largest reduced cost. After a
//! run of degenerate pivots the solver switches to Bland's smallest-index
//! rule, which cannot cycle, and returns to largest-cost pricing once the
//! objective moves again.

use crate::error::{invalid, Result};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-10;
const RATIO_TOL: f64 = 1e-12;
/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_RUN: usize = 50;

#[derive(Debug, Clone, PartialEq)]
struct Row {
    coeffs: Vec<(usize, f64)>,
    rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    upper: Vec<f64>,
    rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Bound {
    Lower,
    Upper,
}

impl LinearProgram {
    /// `n_vars` variables with zero objective and unit upper bounds.
    pub fn new(n_vars: usize) -> Self {
        Self {
            objective: vec![0.0; n_vars],
            upper: vec![1.0; n_vars],
            rows: Vec::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn set_objective(&mut self, var: usize, coeff: f64) {
        self.objective[var] = coeff;
    }

    /// `f64::INFINITY` leaves the variable unbounded above.
    pub fn set_upper(&mut self, var: usize, upper: f64) -> Result<()> {
        if upper.is_nan() || upper < 0.0 {
            return invalid(format!("upper bound of x{var} must be >= 0, got {upper}"));
        }
        self.upper[var] = upper;
        Ok(())
    }

    /// Adds `sum coeff * x_var <= rhs`. Repeated variables are summed.
    pub fn add_le(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) -> Result<()> {
        if !(rhs.is_finite() && rhs >= 0.0) {
            return invalid(format!(
                "right-hand side must be finite and >= 0, got {rhs}"
            ));
        }
        if let Some(&(v, a)) = coeffs
            .iter()
            .find(|(v, a)| *v >= self.n_vars() || !a.is_finite())
        {
            return invalid(format!("bad coefficient {a} on x{v}"));
        }
        self.rows.push(Row { coeffs, rhs });
        Ok(())
    }

    pub fn solve(&self) -> Result<LpSolution> {
        Tableau::new(self).run()
    }

    /// Largest violation of any row or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.rows.iter().map(|r| {
            let lhs: f64 = r.coeffs.iter().map(|&(v, a)| a * x[v]).sum();
            lhs - r.rhs
        });
        let bounds = x.iter().zip(&self.upper).flat_map(|(&v, &u)| [-v, v - u]);
        rows.chain(bounds).fold(0.0, f64::max)
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

struct Tableau {
    m: usize,
    n_struct: usize,
    /// Row-major `m x (n_struct + m)`, equal to `B^-1 [A I]`.
    t: Vec<f64>,
    beta: Vec<f64>,
    basis: Vec<usize>,
    /// Position in `basis` or `None` if nonbasic.
    basic_row: Vec<Option<usize>>,
    at: Vec<Bound>,
    upper: Vec<f64>,
    reduced: Vec<f64>,
    cost: Vec<f64>,
}

impl Tableau {
    fn new(lp: &LinearProgram) -> Self {
        let m = lp.rows.len();
        let n_struct = lp.n_vars();
        let n = n_struct + m;
        let mut t = vec![0.0; m * n];
        for (r, row) in lp.rows.iter().enumerate() {
            for &(v, a) in &row.coeffs {
                t[r * n + v] += a;
            }
            t[r * n + n_struct + r] = 1.0;
        }
        let mut upper = lp.upper.clone();
        upper.extend(std::iter::repeat_n(f64::INFINITY, m));
        let mut cost = lp.objective.clone();
        cost.extend(std::iter::repeat_n(0.0, m));
        let mut basic_row = vec![None; n];
        for r in 0..m {
            basic_row[n_struct + r] = Some(r);
        }
        Self {
            m,
            n_struct,
            t,
            beta: lp.rows.iter().map(|r| r.rhs).collect(),
            basis: (n_struct..n).collect(),
            basic_row,
            at: vec![Bound::Lower; n],
            upper,
            reduced: cost.clone(),
            cost,
        }
    }

    fn n(&self) -> usize {
        self.n_struct + self.m
    }

    fn improving(&self, j: usize) -> bool {
        self.basic_row[j].is_none()
            && match self.at[j] {
                Bound::Lower => self.reduced[j] > COST_TOL && self.upper[j] > 0.0,
                Bound::Upper => self.reduced[j] < -COST_TOL,
            }
    }

    fn entering(&self, bland: bool) -> Option<usize> {
        if bland {
            return (0..self.n()).find(|&j| self.improving(j));
        }
        (0..self.n())
            .filter(|&j| self.improving(j))
            .max_by(|&a, &b| {
                self.reduced[a]
                    .abs()
                    .total_cmp(&self.reduced[b].abs())
                    .then(b.cmp(&a))
            })
    }

    fn run(mut self) -> Result<LpSolution> {
        let n = self.n();
        let mut pivots = 0;
        let mut degenerate = 0;
        let limit = 100 * (n + self.m).max(100);
        while let Some(j) = self.entering(degenerate >= DEGENERATE_RUN) {
            if pivots >= limit {
                return invalid(format!("simplex did not converge within {limit} pivots"));
            }
            let bland = degenerate >= DEGENERATE_RUN;
            let dir = if self.at[j] == Bound::Lower {
                1.0
            } else {
                -1.0
            };

            // (step, leaving row, bound the leaving variable lands on)
            let mut best: Option<(f64, usize, Bound)> = None;
            for r in 0..self.m {
                let alpha = dir * self.t[r * n + j];
                if alpha.abs() <= PIVOT_TOL {
                    continue;
                }
                let k = self.basis[r];
                let candidate = if alpha > 0.0 {
                    (self.beta[r].max(0.0) / alpha, r, Bound::Lower)
                } else if self.upper[k].is_finite() {
                    (
                        (self.upper[k] - self.beta[r]).max(0.0) / -alpha,
                        r,
                        Bound::Upper,
                    )
                } else {
                    continue;
                };
                // Ties go to the smallest basic index under Bland's rule and
                // to the largest pivot element otherwise.
                let better = match best {
                    None => true,
                    Some((step, br, _)) => {
                        candidate.0 < step - RATIO_TOL
                            || (candidate.0 <= step + RATIO_TOL
                                && if bland {
                                    k < self.basis[br]
                                } else {
                                    alpha.abs() > self.t[br * n + j].abs()
                                })
                    }
                };
                if better {
                    best = Some(candidate);
                }
            }

            let flip = self.upper[j];
            match best {
                Some((step, r, leaves_at)) if step < flip - RATIO_TOL || !flip.is_finite() => {
                    degenerate = if step <= RATIO_TOL { degenerate + 1 } else { 0 };
                    self.shift(j, dir * step);
                    let entering_value = match self.at[j] {
                        Bound::Lower => step,
                        Bound::Upper => self.upper[j] - step,
                    };
                    let k = self.basis[r];
                    self.pivot(r, j);
                    self.beta[r] = entering_value;
                    self.at[k] = leaves_at;
                }
                _ if flip.is_finite() => {
                    degenerate = 0;
                    self.shift(j, dir * flip);
                    self.at[j] = match self.at[j] {
                        Bound::Lower => Bound::Upper,
                        Bound::Upper => Bound::Lower,
                    };
                }
                _ => return invalid("linear program is unbounded"),
            }
            pivots += 1;
        }

        let mut x = vec![0.0; self.n_struct];
        for (v, slot) in x.iter_mut().enumerate() {
            *slot = match (self.basic_row[v], self.at[v]) {
                (Some(r), _) => self.beta[r].clamp(0.0, self.upper[v]),
                (None, Bound::Lower) => 0.0,
                (None, Bound::Upper) => self.upper[v],
            };
        }
        let objective = x.iter().zip(&self.cost).map(|(v, c)| v * c).sum();
        Ok(LpSolution {
            x,
            objective,
            pivots,
        })
    }

    /// Moves nonbasic `j` by `delta` and updates the basic values.
    fn shift(&mut self, j: usize, delta: f64) {
        let n = self.n();
        for r in 0..self.m {
            self.beta[r] -= self.t[r * n + j] * delta;
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let n = self.n();
        let p = self.t[r * n + j];
        let pivot_row: Vec<f64> = self.t[r * n..(r + 1) * n].iter().map(|v| v / p).collect();
        self.t[r * n..(r + 1) * n].copy_from_slice(&pivot_row);
        for rr in 0..self.m {
            if rr == r {
                continue;
            }
            let f = self.t[rr * n + j];
            if f != 0.0 {
                let row = &mut self.t[rr * n..(rr + 1) * n];
                for (a, b) in row.iter_mut().zip(&pivot_row) {
                    *a -= f * b;
                }
                row[j] = 0.0;
            }
        }
        let f = self.reduced[j];
        for (d, b) in self.reduced.iter_mut().zip(&pivot_row) {
            *d -= f * b;
        }
        self.reduced[j] = 0.0;
        let leaving = self.basis[r];
        self.basic_row[leaving] = None;
        self.basic_row[j] = Some(r);
        self.basis[r] = j;
    }
}
