//! Bounded-variable primal simplex specialized to two constraint rows.
//!
//! The basis is a 2×2 matrix solved in closed form, so every vertex is
//! computed to floating precision rather than accumulated. Pricing uses
//! Dantzig's rule and falls back to Bland's rule after a run of degenerate
//! pivots, which guarantees termination. Optimality is certified before a
//! solution is returned: primal feasibility plus dual feasibility /
//! complementary slackness, and any violation is an internal solver error,
//! never a silently wrong answer.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub(crate) struct Column {
    pub lower: f64,
    pub upper: f64,
    pub objective: f64,
    pub a: [f64; 2],
}

pub(crate) struct TwoRowLp {
    pub columns: Vec<Column>,
    pub rhs: [f64; 2],
}

pub(crate) struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

#[derive(Clone, Copy, PartialEq)]
enum Status {
    Basic,
    Lower,
    Upper,
}

const PRICE_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-7;
const DEGENERATE_STALL: usize = 64;

fn solve2(m: [[f64; 2]; 2], b: [f64; 2]) -> Option<[f64; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m[0][0].abs() + m[0][1].abs() + m[1][0].abs() + m[1][1].abs();
    if det.abs() <= 1e-13 * scale.max(1.0) {
        return None;
    }
    Some([
        (b[0] * m[1][1] - b[1] * m[0][1]) / det,
        (m[0][0] * b[1] - m[1][0] * b[0]) / det,
    ])
}

/// Maximize over the two-row LP starting from `initial_basis`, with every
/// other column at its lower bound. The initial point must be feasible.
pub(crate) fn maximize(lp: &TwoRowLp, initial_basis: [usize; 2]) -> Result<LpSolution> {
    let n = lp.columns.len();
    let mut status = vec![Status::Lower; n];
    let mut x: Vec<f64> = lp.columns.iter().map(|c| c.lower).collect();
    let mut basis = initial_basis;
    for b in basis {
        status[b] = Status::Basic;
    }

    // Σ A_j x_j over nonbasic columns, maintained incrementally.
    let mut nonbasic_sum = [0.0f64; 2];
    for (j, col) in lp.columns.iter().enumerate() {
        if status[j] != Status::Basic {
            nonbasic_sum[0] += col.a[0] * x[j];
            nonbasic_sum[1] += col.a[1] * x[j];
        }
    }

    let basis_matrix = |basis: [usize; 2], lp: &TwoRowLp| {
        [
            [lp.columns[basis[0]].a[0], lp.columns[basis[1]].a[0]],
            [lp.columns[basis[0]].a[1], lp.columns[basis[1]].a[1]],
        ]
    };

    let refresh_basics = |basis: [usize; 2],
                          nonbasic_sum: [f64; 2],
                          x: &mut [f64],
                          lp: &TwoRowLp|
     -> Result<()> {
        let m = basis_matrix(basis, lp);
        let rhs = [lp.rhs[0] - nonbasic_sum[0], lp.rhs[1] - nonbasic_sum[1]];
        let vals = solve2(m, rhs).ok_or_else(|| Error::Solver("singular basis".into()))?;
        x[basis[0]] = vals[0];
        x[basis[1]] = vals[1];
        Ok(())
    };

    refresh_basics(basis, nonbasic_sum, &mut x, lp)?;
    for b in basis {
        let col = &lp.columns[b];
        if x[b] < col.lower - FEAS_TOL || x[b] > col.upper + FEAS_TOL {
            return Err(Error::Solver(format!(
                "initial basis infeasible: column {b} at {}",
                x[b]
            )));
        }
    }

    let max_iterations = 40 * (n + 2) + 1000;
    let mut bland = false;
    let mut stall = 0usize;

    for _iter in 0..max_iterations {
        // duals: Bᵀ y = c_B
        let m = basis_matrix(basis, lp);
        let mt = [[m[0][0], m[1][0]], [m[0][1], m[1][1]]];
        let y = solve2(mt, [lp.columns[basis[0]].objective, lp.columns[basis[1]].objective])
            .ok_or_else(|| Error::Solver("singular basis in dual solve".into()))?;

        // pricing
        let mut entering: Option<(usize, f64)> = None;
        for (j, col) in lp.columns.iter().enumerate() {
            if status[j] == Status::Basic || col.upper == col.lower {
                continue;
            }
            let d = col.objective - (y[0] * col.a[0] + y[1] * col.a[1]);
            let violation = match status[j] {
                Status::Lower => d,
                Status::Upper => -d,
                Status::Basic => unreachable!(),
            };
            if violation > PRICE_TOL {
                let better = match entering {
                    None => true,
                    Some((_, best)) => {
                        if bland {
                            false // first eligible index wins
                        } else {
                            violation > best
                        }
                    }
                };
                if better {
                    entering = Some((j, violation));
                    if bland {
                        break;
                    }
                }
            }
        }
        let Some((e, _)) = entering else {
            // optimal; certify and return
            return certify(lp, &status, &x, basis);
        };

        let dir = match status[e] {
            Status::Lower => 1.0,
            Status::Upper => -1.0,
            Status::Basic => unreachable!(),
        };
        // basic values move by -w·dir per unit of entering movement
        let m = basis_matrix(basis, lp);
        let w = solve2(m, lp.columns[e].a).ok_or_else(|| Error::Solver("singular basis".into()))?;

        // ratio test: how far basics allow the entering variable to travel
        let span = lp.columns[e].upper - lp.columns[e].lower; // +inf for slack
        let mut basic_limit: Option<(usize, f64, f64)> = None; // (position, limit, bound hit)
        for (pos, &b) in basis.iter().enumerate() {
            let rate = -w[pos] * dir;
            let col = &lp.columns[b];
            let (limit, bound) = if rate > PIVOT_TOL {
                ((col.upper - x[b]) / rate, col.upper)
            } else if rate < -PIVOT_TOL {
                ((col.lower - x[b]) / rate, col.lower)
            } else {
                continue;
            };
            let limit = limit.max(0.0);
            let replace = match basic_limit {
                None => true,
                Some((p0, l0, _)) => {
                    limit < l0 - 1e-12 || ((limit - l0).abs() <= 1e-12 && b < basis[p0])
                }
            };
            if replace {
                basic_limit = Some((pos, limit, bound));
            }
        }

        let pivot = match basic_limit {
            Some((_, limit, _)) => limit < span - 1e-12,
            None => {
                if !span.is_finite() {
                    return Err(Error::Solver("unbounded direction in bounded LP".into()));
                }
                false
            }
        };

        if pivot {
            let (pos, delta, bound) = basic_limit.expect("pivot requires a blocking basic");
            if delta <= 1e-12 {
                stall += 1;
                if stall > DEGENERATE_STALL {
                    bland = true;
                }
            } else {
                stall = 0;
            }
            let l = basis[pos];
            nonbasic_sum[0] -= lp.columns[e].a[0] * x[e];
            nonbasic_sum[1] -= lp.columns[e].a[1] * x[e];
            x[e] += dir * delta;
            status[e] = Status::Basic;
            status[l] = if bound == lp.columns[l].lower {
                Status::Lower
            } else {
                Status::Upper
            };
            x[l] = bound;
            nonbasic_sum[0] += lp.columns[l].a[0] * x[l];
            nonbasic_sum[1] += lp.columns[l].a[1] * x[l];
            basis[pos] = e;
            refresh_basics(basis, nonbasic_sum, &mut x, lp)?;
        } else {
            // bound flip: entering crosses its whole span
            stall = 0;
            let col = &lp.columns[e];
            let target = if dir > 0.0 { col.upper } else { col.lower };
            nonbasic_sum[0] += col.a[0] * (target - x[e]);
            nonbasic_sum[1] += col.a[1] * (target - x[e]);
            x[e] = target;
            status[e] = if dir > 0.0 { Status::Upper } else { Status::Lower };
            refresh_basics(basis, nonbasic_sum, &mut x, lp)?;
        }
    }

    Err(Error::Solver("simplex iteration cap exceeded".into()))
}

/// Verify primal feasibility, dual feasibility, and complementary
/// slackness, then assemble the solution.
fn certify(lp: &TwoRowLp, status: &[Status], x: &[f64], basis: [usize; 2]) -> Result<LpSolution> {
    for (j, col) in lp.columns.iter().enumerate() {
        if x[j] < col.lower - FEAS_TOL || x[j] > col.upper + FEAS_TOL {
            return Err(Error::Solver(format!(
                "certificate failure: column {j} = {} violates bounds [{}, {}]",
                x[j], col.lower, col.upper
            )));
        }
    }
    for row in 0..2 {
        let lhs: f64 = lp.columns.iter().zip(x).map(|(c, v)| c.a[row] * v).sum();
        if (lhs - lp.rhs[row]).abs() > FEAS_TOL * (1.0 + lp.rhs[row].abs()) {
            return Err(Error::Solver(format!(
                "certificate failure: row {row} activity {lhs} ≠ rhs {}",
                lp.rhs[row]
            )));
        }
    }

    let m = [
        [lp.columns[basis[0]].a[0], lp.columns[basis[1]].a[0]],
        [lp.columns[basis[0]].a[1], lp.columns[basis[1]].a[1]],
    ];
    let mt = [[m[0][0], m[1][0]], [m[0][1], m[1][1]]];
    let y = solve2(mt, [lp.columns[basis[0]].objective, lp.columns[basis[1]].objective])
        .ok_or_else(|| Error::Solver("singular basis at certification".into()))?;
    for (j, col) in lp.columns.iter().enumerate() {
        if col.upper == col.lower {
            continue; // fixed columns carry no dual condition
        }
        let d = col.objective - (y[0] * col.a[0] + y[1] * col.a[1]);
        let scale = 1.0 + col.objective.abs();
        let ok = match status[j] {
            Status::Basic => d.abs() <= FEAS_TOL * scale,
            Status::Lower => d <= FEAS_TOL * scale,
            Status::Upper => d >= -FEAS_TOL * scale,
        };
        if !ok {
            return Err(Error::Solver(format!(
                "certificate failure: reduced cost {d} inconsistent at column {j}"
            )));
        }
    }

    let objective = lp.columns.iter().zip(x).map(|(c, v)| c.objective * v).sum();
    Ok(LpSolution {
        x: x.to_vec(),
        objective,
    })
}
