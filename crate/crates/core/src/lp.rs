//! Dense phase-one simplex for small feasibility problems.
//!
//! Finds a point `x ≥ 0` with `A x ≤ b`. The problem is kept in dictionary
//! form, with one row per constraint and one column per non-basic variable,
//! so a problem with many constraints and few variables stays small. Pivots
//! follow Bland's rule, so the result is deterministic and cannot cycle.

const PIVOT_TOL: f64 = 1e-12;
const FEASIBILITY_TOL: f64 = 1e-9;

/// Dictionary: `basic[i] = rhs[i] - Σ_j coef[i][j] · nonbasic[j]`,
/// objective `z = obj_const + Σ_j obj[j] · nonbasic[j]` (maximized).
struct Dictionary {
    coef: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    obj: Vec<f64>,
    obj_const: f64,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
}

impl Dictionary {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.coef[row][col];
        let ncols = self.nonbasic.len();

        // solve the pivot row for the entering variable
        self.rhs[row] /= p;
        for j in 0..ncols {
            if j != col {
                self.coef[row][j] /= p;
            }
        }
        self.coef[row][col] = 1.0 / p;
        let pivot_row = self.coef[row].clone();
        let pivot_rhs = self.rhs[row];

        for i in 0..self.rhs.len() {
            if i == row {
                continue;
            }
            let factor = self.coef[i][col];
            if factor == 0.0 {
                continue;
            }
            self.rhs[i] -= factor * pivot_rhs;
            let r = &mut self.coef[i];
            for j in 0..ncols {
                if j == col {
                    r[j] = -factor * pivot_row[col];
                } else {
                    r[j] -= factor * pivot_row[j];
                }
            }
        }

        let factor = self.obj[col];
        if factor != 0.0 {
            self.obj_const += factor * pivot_rhs;
            for j in 0..ncols {
                if j == col {
                    self.obj[j] = -factor * pivot_row[col];
                } else {
                    self.obj[j] -= factor * pivot_row[j];
                }
            }
        }

        std::mem::swap(&mut self.basic[row], &mut self.nonbasic[col]);
    }

    /// Runs primal simplex iterations until optimal. Returns false if unbounded.
    fn optimize(&mut self) -> bool {
        loop {
            // Bland: smallest-index variable with positive reduced cost enters
            let entering = (0..self.nonbasic.len())
                .filter(|&j| self.obj[j] > PIVOT_TOL)
                .min_by_key(|&j| self.nonbasic[j]);
            let Some(col) = entering else {
                return true;
            };
            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..self.rhs.len() {
                let a = self.coef[i][col];
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs[i] / a;
                leaving = match leaving {
                    None => Some((i, ratio)),
                    Some((k, best)) => {
                        if ratio < best - PIVOT_TOL
                            || (ratio <= best + PIVOT_TOL && self.basic[i] < self.basic[k])
                        {
                            Some((i, ratio))
                        } else {
                            Some((k, best))
                        }
                    }
                };
            }
            let Some((row, _)) = leaving else {
                return false;
            };
            self.pivot(row, col);
        }
    }
}

/// Returns some `x ≥ 0` with `a · x ≤ b` (up to a small tolerance), or `None`
/// if the system is infeasible.
pub fn find_feasible_point(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    assert_eq!(a.len(), b.len(), "one right-hand side per constraint");
    let n = a.first().map_or(0, Vec::len);
    let m = b.len();

    let Some((start_row, &min_b)) = b
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1).then(x.0.cmp(&y.0)))
    else {
        return Some(vec![0.0; n]);
    };
    if min_b >= 0.0 {
        return Some(vec![0.0; n]);
    }

    // Auxiliary problem: maximize -x0 subject to A x - x0 ≤ b.
    // Variable ids: 0..n originals, n..n+m slacks, n+m the auxiliary x0.
    let aux = n + m;
    let mut coef = Vec::with_capacity(m);
    for row in a {
        assert_eq!(row.len(), n, "constraint rows must have equal length");
        let mut r = row.clone();
        r.push(-1.0);
        coef.push(r);
    }
    let mut obj = vec![0.0; n + 1];
    obj[n] = -1.0;
    let mut dict = Dictionary {
        coef,
        rhs: b.to_vec(),
        obj,
        obj_const: 0.0,
        basic: (n..n + m).collect(),
        nonbasic: (0..n).chain(std::iter::once(aux)).collect(),
    };

    // one pivot makes the auxiliary dictionary feasible
    dict.pivot(start_row, n);
    let bounded = dict.optimize();
    debug_assert!(bounded, "auxiliary problem is bounded by construction");

    if dict.obj_const < -FEASIBILITY_TOL {
        return None;
    }
    let mut x = vec![0.0; n];
    for (i, &var) in dict.basic.iter().enumerate() {
        if var < n {
            x[var] = dict.rhs[i].max(0.0);
        }
    }
    Some(x)
}
