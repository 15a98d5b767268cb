//! Dense two-phase tableau simplex.
//!
//! Pivoting uses Dantzig's most-negative reduced cost and falls back to
//! Bland's smallest-index rule after a run of degenerate pivots, which rules
//! out cycling.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
struct Row {
    coeffs: Vec<f64>,
    relation: Relation,
    rhs: f64,
}

/// minimize c·x subject to rows, x ≥ 0.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    objective: Vec<f64>,
    rows: Vec<Row>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Dual value per constraint, such that objective = Σ dual_i·rhs_i.
    /// Signs follow the minimization convention: ≥ rows have dual ≥ 0,
    /// ≤ rows have dual ≤ 0.
    pub duals: Vec<f64>,
}

const PIVOT_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-9;
const DEGENERATE_RUN: usize = 50;

impl LinearProgram {
    pub fn minimize(objective: Vec<f64>) -> Self {
        LinearProgram {
            objective,
            rows: Vec::new(),
        }
    }

    pub fn maximize(objective: Vec<f64>) -> Self {
        Self::minimize(objective.into_iter().map(|c| -c).collect())
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        assert_eq!(coeffs.len(), self.objective.len(), "constraint width");
        self.rows.push(Row {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    pub fn solve(&self) -> Result<LpSolution> {
        Tableau::build(self).run()
    }
}

struct Tableau {
    m: usize,
    n_struct: usize,
    n_cols: usize,
    /// m rows of n_cols + 1 (last entry is rhs).
    a: Vec<Vec<f64>>,
    basis: Vec<usize>,
    /// Column holding the initial identity entry for each row.
    unit_col: Vec<usize>,
    artificial_start: usize,
    row_sign: Vec<f64>,
    cost: Vec<f64>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let m = lp.rows.len();
        let n = lp.num_vars();
        // Normalize rows so rhs ≥ 0.
        let mut rows: Vec<Row> = Vec::with_capacity(m);
        let mut row_sign = Vec::with_capacity(m);
        for r in &lp.rows {
            if r.rhs < 0.0 {
                rows.push(Row {
                    coeffs: r.coeffs.iter().map(|c| -c).collect(),
                    relation: match r.relation {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    },
                    rhs: -r.rhs,
                });
                row_sign.push(-1.0);
            } else {
                rows.push(r.clone());
                row_sign.push(1.0);
            }
        }
        let n_slack = rows.iter().filter(|r| r.relation != Relation::Eq).count();
        let n_art = rows.iter().filter(|r| r.relation != Relation::Le).count();
        let artificial_start = n + n_slack;
        let n_cols = n + n_slack + n_art;
        let mut a = vec![vec![0.0; n_cols + 1]; m];
        let mut basis = vec![0; m];
        let mut unit_col = vec![0; m];
        let mut slack = n;
        let mut art = artificial_start;
        for (i, r) in rows.iter().enumerate() {
            a[i][..n].copy_from_slice(&r.coeffs);
            a[i][n_cols] = r.rhs;
            match r.relation {
                Relation::Le => {
                    a[i][slack] = 1.0;
                    basis[i] = slack;
                    unit_col[i] = slack;
                    slack += 1;
                }
                Relation::Ge => {
                    a[i][slack] = -1.0;
                    slack += 1;
                    a[i][art] = 1.0;
                    basis[i] = art;
                    unit_col[i] = art;
                    art += 1;
                }
                Relation::Eq => {
                    a[i][art] = 1.0;
                    basis[i] = art;
                    unit_col[i] = art;
                    art += 1;
                }
            }
        }
        let mut cost = vec![0.0; n_cols];
        cost[..n].copy_from_slice(&lp.objective);
        Tableau {
            m,
            n_struct: n,
            n_cols,
            a,
            basis,
            unit_col,
            artificial_start,
            row_sign,
            cost,
        }
    }

    fn rhs(&self, i: usize) -> f64 {
        self.a[i][self.n_cols]
    }

    /// Reduced costs for the given cost vector.
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut r = cost.to_vec();
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for (j, rj) in r.iter_mut().enumerate() {
                    *rj -= cb * self.a[i][j];
                }
            }
        }
        r
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.a[row][col];
        for v in self.a[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.a[row].clone();
        for i in 0..self.m {
            if i != row {
                let f = self.a[i][col];
                if f != 0.0 {
                    for (v, &pr) in self.a[i].iter_mut().zip(&pivot_row) {
                        *v -= f * pr;
                    }
                }
            }
        }
        self.basis[row] = col;
    }

    /// Runs simplex iterations minimizing `cost` over columns < `col_limit`.
    fn optimize(&mut self, cost: &[f64], col_limit: usize) -> Result<()> {
        let max_iter = 50 * (self.m + self.n_cols) + 1000;
        let mut degenerate = 0usize;
        for _ in 0..max_iter {
            let r = self.reduced_costs(cost);
            let bland = degenerate >= DEGENERATE_RUN;
            let entering = if bland {
                (0..col_limit).find(|&j| r[j] < -PIVOT_TOL)
            } else {
                (0..col_limit)
                    .filter(|&j| r[j] < -PIVOT_TOL)
                    .min_by(|&x, &y| r[x].total_cmp(&r[y]))
            };
            let Some(col) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let aij = self.a[i][col];
                if aij > PIVOT_TOL {
                    let ratio = self.rhs(i) / aij;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - 1e-14
                                || (ratio <= br + 1e-14 && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            let Some((row, ratio)) = leave else {
                return Err(Error::Unbounded);
            };
            if ratio.abs() < 1e-14 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(row, col);
        }
        Err(Error::ConvergenceFailure {
            lo: f64::NAN,
            hi: f64::NAN,
        })
    }

    fn run(mut self) -> Result<LpSolution> {
        if self.artificial_start < self.n_cols {
            let mut phase1 = vec![0.0; self.n_cols];
            for c in phase1.iter_mut().skip(self.artificial_start) {
                *c = 1.0;
            }
            self.optimize(&phase1, self.n_cols)?;
            let infeas: f64 = (0..self.m)
                .filter(|&i| self.basis[i] >= self.artificial_start)
                .map(|i| self.rhs(i))
                .sum();
            let scale = 1.0 + (0..self.m).map(|i| self.rhs(i).abs()).fold(0.0, f64::max);
            if infeas > FEAS_TOL * scale {
                return Err(Error::Infeasible);
            }
            // Drive zero-level artificials out of the basis where possible.
            for i in 0..self.m {
                if self.basis[i] >= self.artificial_start {
                    if let Some(col) =
                        (0..self.artificial_start).find(|&j| self.a[i][j].abs() > 1e-9)
                    {
                        self.pivot(i, col);
                    }
                }
            }
        }
        let cost = self.cost.clone();
        self.optimize(&cost, self.artificial_start)?;

        let mut x = vec![0.0; self.n_struct];
        for i in 0..self.m {
            let b = self.basis[i];
            if b < self.n_struct {
                x[b] = self.rhs(i).max(0.0);
            }
        }
        let objective: f64 = x.iter().zip(&cost).map(|(a, b)| a * b).sum();
        // y = c_B B⁻¹; B⁻¹ sits in the initial unit columns.
        let duals = (0..self.m)
            .map(|j| {
                let col = self.unit_col[j];
                let y: f64 = (0..self.m).map(|i| cost[self.basis[i]] * self.a[i][col]).sum();
                y * self.row_sign[j]
            })
            .collect();
        Ok(LpSolution {
            x,
            objective,
            duals,
        })
    }
}
