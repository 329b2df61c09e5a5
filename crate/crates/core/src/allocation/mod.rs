//! Budget-constrained voucher allocation: maximize expected additional
//! court appearances subject to a spending budget and a demographic-share
//! constraint, and trace the share-vs-appearances frontier.
//!
//! Vouchering person i guarantees their appearance, so its benefit is
//! b_i = 1 − p_i; its cost is cost-per-mile × round-trip miles. The share
//! constraint counts vouchers (Σ x_i per group), not dollars, and is an
//! equality; inequality variants are recoverable by a running max over the
//! frontier. Solutions are fractional LP vertices with at most two
//! fractional persons, reported for manual rounding.

mod simplex;

use crate::error::{Error, Result};
use crate::population::{Dataset, Group};
use simplex::{maximize, Column, TwoRowLp};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Default cost per round-trip mile, in dollars.
pub const DEFAULT_COST_PER_MILE: f64 = 5.0;
/// Default transportation budget, in dollars.
pub const DEFAULT_BUDGET: f64 = 10_000.0;

/// One voucher candidate.
#[derive(Clone, Debug, PartialEq)]
pub struct VoucherCandidate {
    pub id: u64,
    pub group: Group,
    /// Appearance probability without a voucher.
    pub appear_prob: f64,
    /// Voucher cost in dollars.
    pub cost: f64,
}

impl VoucherCandidate {
    /// Expected additional appearances from a full voucher.
    pub fn benefit(&self) -> f64 {
        1.0 - self.appear_prob
    }
}

/// A voucher-allocation problem instance.
#[derive(Clone, Debug, PartialEq)]
pub struct AllocationInstance {
    pub persons: Vec<VoucherCandidate>,
    pub cost_per_mile: f64,
    pub budget: f64,
    /// Group whose voucher share the constraint controls.
    pub target_group: Group,
}

impl AllocationInstance {
    /// Build from a dataset: cost_i = cost_per_mile × distance_miles_i.
    /// The share constraint targets the Black voucher share.
    pub fn from_dataset(data: &Dataset, cost_per_mile: f64, budget: f64) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let persons = data
            .persons
            .iter()
            .map(|p| VoucherCandidate {
                id: p.id,
                group: p.group.clone(),
                appear_prob: p.appear_prob,
                cost: cost_per_mile * p.distance_miles,
            })
            .collect();
        let inst = AllocationInstance {
            persons,
            cost_per_mile,
            budget,
            target_group: Group::new("Black"),
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.budget.is_finite() || self.budget < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "budget must be a nonnegative dollar amount, got {}",
                self.budget
            )));
        }
        if !self.cost_per_mile.is_finite() || self.cost_per_mile < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "cost per mile must be nonnegative, got {}",
                self.cost_per_mile
            )));
        }
        for p in &self.persons {
            if !(0.0..=1.0).contains(&p.appear_prob) {
                return Err(Error::InvalidArgument(format!(
                    "appear_prob for person {} must lie in [0, 1], got {}",
                    p.id, p.appear_prob
                )));
            }
            if !p.cost.is_finite() || p.cost < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "cost for person {} must be nonnegative, got {}",
                    p.id, p.cost
                )));
            }
        }
        Ok(())
    }

    /// Persons that can affect the objective or a constraint. Zero-cost,
    /// zero-benefit persons are pinned to x = 0: they move nothing and
    /// would only destabilize the share denominator.
    fn active_indices(&self) -> Vec<usize> {
        self.persons
            .iter()
            .enumerate()
            .filter(|(_, p)| !(p.cost == 0.0 && p.benefit() == 0.0))
            .map(|(i, _)| i)
            .collect()
    }

    fn check_share_attainable(&self, share: f64, active: &[usize]) -> Result<()> {
        let has_target = active
            .iter()
            .any(|&i| self.persons[i].group == self.target_group);
        let has_other = active
            .iter()
            .any(|&i| self.persons[i].group != self.target_group);
        if share > 0.0 && !has_target {
            return Err(Error::InfeasibleShare {
                share,
                reason: format!("no `{}` persons can receive vouchers", self.target_group),
            });
        }
        if share < 1.0 && !has_other {
            return Err(Error::InfeasibleShare {
                share,
                reason: format!("every voucher candidate is `{}`", self.target_group),
            });
        }
        Ok(())
    }
}

/// Fractional voucher assignment with its accounting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AllocationResult {
    /// Per-person voucher fraction, aligned with the instance's persons.
    pub x: Vec<f64>,
    /// Expected additional appearances Σ b_i x_i.
    pub objective: f64,
    /// Σ c_i x_i, dollars.
    pub spend: f64,
    /// Σ x_i per group.
    pub voucher_counts: BTreeMap<Group, f64>,
    /// Target-group voucher count over total voucher count (0 when no
    /// vouchers are assigned).
    pub share: f64,
    /// Number of strictly fractional assignments (an LP vertex has ≤ 2).
    pub fractional_count: usize,
}

fn assemble(inst: &AllocationInstance, x: Vec<f64>) -> AllocationResult {
    debug_assert_eq!(x.len(), inst.persons.len());
    let mut voucher_counts: BTreeMap<Group, f64> = BTreeMap::new();
    let mut objective = 0.0;
    let mut spend = 0.0;
    let mut fractional_count = 0;
    for (p, &v) in inst.persons.iter().zip(&x) {
        objective += p.benefit() * v;
        spend += p.cost * v;
        *voucher_counts.entry(p.group.clone()).or_insert(0.0) += v;
        if v > 1e-9 && v < 1.0 - 1e-9 {
            fractional_count += 1;
        }
    }
    let total: f64 = voucher_counts.values().sum();
    let share = if total > 1e-12 {
        voucher_counts.get(&inst.target_group).copied().unwrap_or(0.0) / total
    } else {
        0.0
    };
    AllocationResult {
        x,
        objective,
        spend,
        voucher_counts,
        share,
        fractional_count,
    }
}

/// Fractional-knapsack greedy: zero-cost beneficial persons first, then by
/// benefit/cost descending (ties by id), filling until the budget runs out.
/// Optimal for the LP without the share constraint.
pub fn unconstrained_alloc(inst: &AllocationInstance) -> Result<AllocationResult> {
    inst.validate()?;
    let mut order = inst.active_indices();
    order.sort_by(|&i, &j| {
        let (pi, pj) = (&inst.persons[i], &inst.persons[j]);
        let class = |p: &VoucherCandidate| u8::from(p.cost > 0.0);
        let ratio = |p: &VoucherCandidate| {
            if p.cost > 0.0 {
                p.benefit() / p.cost
            } else {
                f64::INFINITY
            }
        };
        class(pi)
            .cmp(&class(pj))
            .then(ratio(pj).partial_cmp(&ratio(pi)).expect("ratios are not NaN"))
            .then(pi.id.cmp(&pj.id))
    });

    let mut x = vec![0.0; inst.persons.len()];
    let mut remaining = inst.budget;
    for i in order {
        let p = &inst.persons[i];
        if p.cost <= remaining {
            x[i] = 1.0;
            remaining -= p.cost;
        } else if p.cost > 0.0 && remaining > 0.0 {
            x[i] = remaining / p.cost;
            remaining = 0.0;
        } else if remaining <= 0.0 {
            break;
        }
    }
    Ok(assemble(inst, x))
}

/// Maximize appearances subject to the budget and an exact target-group
/// voucher share, by bounded-variable simplex on the two-row LP. The
/// solution is vertex-optimal and internally certified; a certification
/// failure is an internal solver error, never a silently wrong answer.
pub fn solve_constrained(inst: &AllocationInstance, share: f64) -> Result<AllocationResult> {
    inst.validate()?;
    if !(0.0..=1.0).contains(&share) {
        return Err(Error::InvalidArgument(format!(
            "target share must lie in [0, 1], got {share}"
        )));
    }
    let active = inst.active_indices();
    inst.check_share_attainable(share, &active)?;

    // scale the budget row into [0, 1] entries for uniform tolerances
    let max_cost = active
        .iter()
        .map(|&i| inst.persons[i].cost)
        .fold(0.0f64, f64::max);
    let scale = 1.0 / max_cost.max(1.0);

    let mut columns: Vec<Column> = active
        .iter()
        .map(|&i| {
            let p = &inst.persons[i];
            Column {
                lower: 0.0,
                upper: 1.0,
                objective: p.benefit(),
                a: [
                    p.cost * scale,
                    f64::from(p.group == inst.target_group) - share,
                ],
            }
        })
        .collect();
    let slack = columns.len();
    columns.push(Column {
        lower: 0.0,
        upper: f64::INFINITY,
        objective: 0.0,
        a: [1.0, 0.0],
    });
    let artificial = columns.len();
    columns.push(Column {
        lower: 0.0,
        upper: 0.0,
        objective: 0.0,
        a: [0.0, 1.0],
    });

    let lp = TwoRowLp {
        columns,
        rhs: [inst.budget * scale, 0.0],
    };
    let solution = maximize(&lp, [slack, artificial])?;

    let mut x = vec![0.0; inst.persons.len()];
    for (k, &i) in active.iter().enumerate() {
        x[i] = solution.x[k].clamp(0.0, 1.0);
    }
    let result = assemble(inst, x);
    debug_assert!(result.fractional_count <= 2);
    debug_assert!(
        (result.objective - solution.objective).abs() <= 1e-9 * (1.0 + solution.objective.abs())
    );
    Ok(result)
}

/// One solved point of the share/appearances frontier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    /// Target share requested for this point.
    pub share: f64,
    pub objective: f64,
    pub result: AllocationResult,
}

/// A frontier sweep; shares that could not be solved are flagged rather
/// than aborting the sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frontier {
    pub points: Vec<FrontierPoint>,
    pub skipped: Vec<(f64, String)>,
}

pub fn frontier(inst: &AllocationInstance, shares: &[f64]) -> Result<Frontier> {
    inst.validate()?;
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for &s in shares {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidArgument(format!(
                "grid share must lie in [0, 1], got {s}"
            )));
        }
        match solve_constrained(inst, s) {
            Ok(result) => points.push(FrontierPoint {
                share: s,
                objective: result.objective,
                result,
            }),
            Err(e) => skipped.push((s, e.to_string())),
        }
    }
    Ok(Frontier { points, skipped })
}

/// One row of the survey-style option table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AllocationOption {
    pub label: String,
    pub share: f64,
    /// Expected additional appearances (the LP objective).
    pub additional_appearances: f64,
    /// Expected additional appearances per group.
    pub gains: BTreeMap<Group, f64>,
    /// Expected missed-court counts per group: group size minus expected
    /// appearances with the vouchers in place.
    pub expected_missed: BTreeMap<Group, f64>,
    pub spend: f64,
}

fn option_label(i: usize) -> String {
    if i < 26 {
        char::from(b'A' + i as u8).to_string()
    } else {
        format!("Z{}", i - 25)
    }
}

/// Emit the option-comparison table for the requested shares, reusing
/// frontier points where available and solving on demand otherwise.
pub fn option_table(
    inst: &AllocationInstance,
    solved: &Frontier,
    shares: &[f64],
) -> Result<Vec<AllocationOption>> {
    let mut options = Vec::with_capacity(shares.len());
    for (i, &s) in shares.iter().enumerate() {
        let result = match solved
            .points
            .iter()
            .find(|p| (p.share - s).abs() <= 1e-12)
        {
            Some(point) => point.result.clone(),
            None => solve_constrained(inst, s)?,
        };

        let mut gains: BTreeMap<Group, f64> = BTreeMap::new();
        let mut baseline: BTreeMap<Group, (f64, usize)> = BTreeMap::new(); // (Σ p_i, n)
        for (p, &v) in inst.persons.iter().zip(&result.x) {
            *gains.entry(p.group.clone()).or_insert(0.0) += p.benefit() * v;
            let b = baseline.entry(p.group.clone()).or_insert((0.0, 0));
            b.0 += p.appear_prob;
            b.1 += 1;
        }
        let expected_missed = baseline
            .iter()
            .map(|(g, (appear_sum, n))| {
                let gain = gains.get(g).copied().unwrap_or(0.0);
                (g.clone(), *n as f64 - appear_sum - gain)
            })
            .collect();
        options.push(AllocationOption {
            label: option_label(i),
            share: s,
            additional_appearances: result.objective,
            gains,
            expected_missed,
            spend: result.spend,
        });
    }
    Ok(options)
}

/// Exhaustive vertex-support enumeration, exact up to `tolerance`. A test
/// oracle: refuses instances with more than 12 active persons.
pub fn brute_force_alloc(
    inst: &AllocationInstance,
    target_share: Option<f64>,
    tolerance: f64,
) -> Result<AllocationResult> {
    inst.validate()?;
    let active = inst.active_indices();
    let n = active.len();
    if n > 12 {
        return Err(Error::InvalidArgument(format!(
            "brute force enumeration refuses {n} active persons (max 12)"
        )));
    }
    if let Some(s) = target_share {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidArgument(format!(
                "target share must lie in [0, 1], got {s}"
            )));
        }
        inst.check_share_attainable(s, &active)?;
    }

    let benefit: Vec<f64> = active.iter().map(|&i| inst.persons[i].benefit()).collect();
    let cost: Vec<f64> = active.iter().map(|&i| inst.persons[i].cost).collect();
    let share_coef: Vec<f64> = active
        .iter()
        .map(|&i| {
            f64::from(inst.persons[i].group == inst.target_group) - target_share.unwrap_or(0.0)
        })
        .collect();

    let budget_ok = |spend: f64| spend <= inst.budget + tolerance * (1.0 + inst.budget);
    let share_ok = |resid: f64| target_share.is_none() || resid.abs() <= tolerance * (1.0 + n as f64);

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut consider = |xs: &[f64]| {
        let spend: f64 = xs.iter().zip(&cost).map(|(x, c)| x * c).sum();
        let resid: f64 = xs.iter().zip(&share_coef).map(|(x, a)| x * a).sum();
        if !budget_ok(spend) || !share_ok(resid) {
            return;
        }
        let objective: f64 = xs.iter().zip(&benefit).map(|(x, b)| x * b).sum();
        if best.as_ref().is_none_or(|(b, _)| objective > *b) {
            best = Some((objective, xs.to_vec()));
        }
    };

    // fractional support F (|F| ≤ 2), all other persons at a 0/1 bound
    let fractional_sets: Vec<Vec<usize>> = {
        let mut sets = vec![vec![]];
        for j in 0..n {
            sets.push(vec![j]);
        }
        if target_share.is_some() {
            for j in 0..n {
                for k in j + 1..n {
                    sets.push(vec![j, k]);
                }
            }
        }
        sets
    };

    let mut xs = vec![0.0; n];
    for frac in &fractional_sets {
        let fixed: Vec<usize> = (0..n).filter(|j| !frac.contains(j)).collect();
        for mask in 0..(1u32 << fixed.len()) {
            for x in xs.iter_mut() {
                *x = 0.0;
            }
            for (bit, &j) in fixed.iter().enumerate() {
                xs[j] = f64::from(mask >> bit & 1);
            }
            let base_spend: f64 = fixed.iter().map(|&j| xs[j] * cost[j]).sum();
            let base_resid: f64 = fixed.iter().map(|&j| xs[j] * share_coef[j]).sum();

            match frac.as_slice() {
                [] => consider(&xs),
                [j] => {
                    let mut candidates = Vec::new();
                    if cost[*j] > 1e-12 {
                        candidates.push((inst.budget - base_spend) / cost[*j]); // budget tight
                    }
                    if target_share.is_some() && share_coef[*j].abs() > 1e-12 {
                        candidates.push(-base_resid / share_coef[*j]); // share tight
                    }
                    for lambda in candidates {
                        if (-tolerance..=1.0 + tolerance).contains(&lambda) {
                            xs[*j] = lambda.clamp(0.0, 1.0);
                            consider(&xs);
                            xs[*j] = 0.0;
                        }
                    }
                }
                [j, k] => {
                    // both rows tight: solve the 2×2 system
                    let m = [[cost[*j], cost[*k]], [share_coef[*j], share_coef[*k]]];
                    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                    if det.abs() <= 1e-12 {
                        continue;
                    }
                    let rhs = [inst.budget - base_spend, -base_resid];
                    let lj = (rhs[0] * m[1][1] - rhs[1] * m[0][1]) / det;
                    let lk = (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / det;
                    if (-tolerance..=1.0 + tolerance).contains(&lj)
                        && (-tolerance..=1.0 + tolerance).contains(&lk)
                    {
                        xs[*j] = lj.clamp(0.0, 1.0);
                        xs[*k] = lk.clamp(0.0, 1.0);
                        consider(&xs);
                        xs[*j] = 0.0;
                        xs[*k] = 0.0;
                    }
                }
                _ => unreachable!("fractional supports have at most two persons"),
            }
        }
    }

    let (_, xs) = best.ok_or_else(|| Error::Solver("enumeration found no feasible point".into()))?;
    let mut x = vec![0.0; inst.persons.len()];
    for (k, &i) in active.iter().enumerate() {
        x[i] = xs[k];
    }
    Ok(assemble(inst, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::id_stream;
    use rand::Rng;

    fn person(id: u64, group: &str, appear: f64, cost: f64) -> VoucherCandidate {
        VoucherCandidate {
            id,
            group: Group::new(group),
            appear_prob: appear,
            cost,
        }
    }

    fn instance(persons: Vec<VoucherCandidate>, budget: f64) -> AllocationInstance {
        AllocationInstance {
            persons,
            cost_per_mile: DEFAULT_COST_PER_MILE,
            budget,
            target_group: Group::new("Black"),
        }
    }

    fn random_instance(seed: u64, n: usize) -> AllocationInstance {
        let mut rng = id_stream(seed, 424_242);
        let persons = (0..n)
            .map(|i| {
                let group = if rng.random_bool(0.5) { "Black" } else { "White" };
                person(
                    i as u64,
                    group,
                    rng.random_range(0.0..1.0),
                    rng.random_range(0.0..30.0),
                )
            })
            .collect();
        let budget = rng.random_range(0.0..120.0);
        instance(persons, budget)
    }

    #[test]
    fn unconstrained_full_budget_takes_everyone() {
        let inst = instance(
            vec![
                person(0, "Black", 0.5, 10.0),
                person(1, "White", 0.2, 4.0),
                person(2, "Black", 0.9, 6.0),
            ],
            100.0,
        );
        let r = unconstrained_alloc(&inst).unwrap();
        assert_eq!(r.x, vec![1.0, 1.0, 1.0]);
        assert!((r.objective - (0.5 + 0.8 + 0.1)).abs() < 1e-12);
        assert_eq!(r.fractional_count, 0);
    }

    #[test]
    fn unconstrained_zero_budget_is_empty() {
        let inst = instance(vec![person(0, "Black", 0.5, 10.0)], 0.0);
        let r = unconstrained_alloc(&inst).unwrap();
        assert_eq!(r.objective, 0.0);
        assert_eq!(r.spend, 0.0);
        assert_eq!(r.share, 0.0);
    }

    #[test]
    fn unconstrained_handcrafted_matches_brute_force() {
        let inst = instance(
            vec![
                person(0, "Black", 0.1, 12.0), // ratio 0.075
                person(1, "White", 0.3, 5.0),  // ratio 0.14
                person(2, "Black", 0.6, 2.0),  // ratio 0.2
                person(3, "White", 0.8, 8.0),  // ratio 0.025
            ],
            10.0,
        );
        let greedy = unconstrained_alloc(&inst).unwrap();
        let oracle = brute_force_alloc(&inst, None, 1e-9).unwrap();
        assert!(
            (greedy.objective - oracle.objective).abs() <= 1e-9,
            "greedy {} vs oracle {}",
            greedy.objective,
            oracle.objective
        );
        // greedy takes person 2 (2.0) and person 1 (5.0), then 3/12 of person 0
        assert_eq!(greedy.x[2], 1.0);
        assert_eq!(greedy.x[1], 1.0);
        assert!((greedy.x[0] - 0.25).abs() < 1e-12);
        assert_eq!(greedy.fractional_count, 1);
    }

    #[test]
    fn zero_cost_beneficial_persons_taken_first() {
        let inst = instance(
            vec![person(0, "White", 0.99, 20.0), person(1, "Black", 0.1, 0.0)],
            1.0,
        );
        let r = unconstrained_alloc(&inst).unwrap();
        assert_eq!(r.x[1], 1.0);
        assert!((r.x[0] - 0.05).abs() < 1e-12);
    }

    #[test]
    fn degenerate_persons_stay_unassigned() {
        let inst = instance(
            vec![person(0, "Black", 1.0, 0.0), person(1, "White", 0.5, 3.0)],
            100.0,
        );
        let r = unconstrained_alloc(&inst).unwrap();
        assert_eq!(r.x[0], 0.0);
        assert_eq!(r.x[1], 1.0);
        let c = solve_constrained(&inst, 0.0).unwrap();
        assert_eq!(c.x[0], 0.0);
    }

    #[test]
    fn constrained_at_unconstrained_share_matches_optimum() {
        for seed in 0..20 {
            let inst = random_instance(seed, 9);
            let free = unconstrained_alloc(&inst).unwrap();
            if free.voucher_counts.values().sum::<f64>() <= 1e-9 {
                continue;
            }
            let pinned = solve_constrained(&inst, free.share).unwrap();
            assert!(
                (pinned.objective - free.objective).abs() <= 1e-9 * (1.0 + free.objective),
                "seed {seed}: pinned {} vs free {}",
                pinned.objective,
                free.objective
            );
        }
    }

    #[test]
    fn share_one_is_target_only_knapsack() {
        let inst = instance(
            vec![
                person(0, "Black", 0.4, 6.0),
                person(1, "White", 0.1, 1.0),
                person(2, "Black", 0.2, 3.0),
            ],
            6.0,
        );
        let r = solve_constrained(&inst, 1.0).unwrap();
        assert_eq!(r.x[1], 0.0);
        let black_only = instance(
            vec![person(0, "Black", 0.4, 6.0), person(2, "Black", 0.2, 3.0)],
            6.0,
        );
        let oracle = unconstrained_alloc(&black_only).unwrap();
        assert!((r.objective - oracle.objective).abs() <= 1e-9);
    }

    #[test]
    fn infeasible_shares_refused_by_both() {
        let inst = instance(vec![person(0, "White", 0.5, 2.0)], 10.0);
        assert!(matches!(
            solve_constrained(&inst, 0.5),
            Err(Error::InfeasibleShare { .. })
        ));
        assert!(matches!(
            brute_force_alloc(&inst, Some(0.5), 1e-9),
            Err(Error::InfeasibleShare { .. })
        ));

        let all_black = instance(vec![person(0, "Black", 0.5, 2.0)], 10.0);
        assert!(matches!(
            solve_constrained(&all_black, 0.25),
            Err(Error::InfeasibleShare { .. })
        ));
        assert!(matches!(
            brute_force_alloc(&all_black, Some(0.25), 1e-9),
            Err(Error::InfeasibleShare { .. })
        ));
    }

    #[test]
    fn brute_force_trivial_cases() {
        let inst = instance(vec![person(0, "Black", 0.3, 4.0)], 10.0);
        let r = brute_force_alloc(&inst, Some(1.0), 1e-9).unwrap();
        assert_eq!(r.x[0], 1.0);

        let two = instance(
            vec![person(0, "Black", 0.5, 5.0), person(1, "White", 0.1, 5.0)],
            5.0,
        );
        let r = brute_force_alloc(&two, None, 1e-9).unwrap();
        assert_eq!(r.x, vec![0.0, 1.0]); // higher benefit per dollar
    }

    #[test]
    fn brute_force_refuses_large_instances() {
        let persons = (0..13).map(|i| person(i, "Black", 0.5, 1.0)).collect();
        let inst = instance(persons, 5.0);
        assert!(matches!(
            brute_force_alloc(&inst, Some(1.0), 1e-9),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn solver_matches_oracle_on_randomized_instances() {
        let mut rng = id_stream(7_777, 0);
        let mut solved = 0;
        for seed in 0..40 {
            let n = 3 + (seed as usize % 10);
            let inst = random_instance(seed, n);
            let share = (rng.random_range(0..=10) as f64) / 10.0;
            let lp = solve_constrained(&inst, share);
            let bf = brute_force_alloc(&inst, Some(share), 1e-9);
            match (lp, bf) {
                (Ok(lp), Ok(bf)) => {
                    assert!(
                        (lp.objective - bf.objective).abs() <= 1e-9 * (1.0 + bf.objective.abs()),
                        "seed {seed} share {share}: lp {} vs oracle {}",
                        lp.objective,
                        bf.objective
                    );
                    assert!(lp.spend <= inst.budget + 1e-9 * (1.0 + inst.budget));
                    assert!(lp.fractional_count <= 2);
                    solved += 1;
                }
                (Err(Error::InfeasibleShare { .. }), Err(Error::InfeasibleShare { .. })) => {}
                (lp, bf) => panic!("seed {seed}: divergent outcomes {lp:?} vs {bf:?}"),
            }
        }
        assert!(solved >= 20, "too few solvable instances: {solved}");
    }

    #[test]
    fn frontier_sweep_flags_infeasible_points() {
        let inst = instance(
            vec![person(0, "White", 0.4, 2.0), person(1, "White", 0.6, 3.0)],
            4.0,
        );
        let f = frontier(&inst, &[0.0, 0.5]).unwrap();
        assert_eq!(f.points.len(), 1);
        assert_eq!(f.points[0].share, 0.0);
        assert_eq!(f.skipped.len(), 1);
        assert_eq!(f.skipped[0].0, 0.5);
    }

    #[test]
    fn frontier_at_unconstrained_share_equals_optimum() {
        let inst = random_instance(3, 10);
        let free = unconstrained_alloc(&inst).unwrap();
        let f = frontier(&inst, &[free.share]).unwrap();
        assert_eq!(f.points.len(), 1);
        assert!((f.points[0].objective - free.objective).abs() <= 1e-9 * (1.0 + free.objective));
    }

    #[test]
    fn option_table_matches_direct_solves() {
        let inst = random_instance(11, 12);
        let shares = [0.2, 0.5, 0.8];
        let f = frontier(&inst, &[0.5]).unwrap();
        let options = option_table(&inst, &f, &shares).unwrap();
        assert_eq!(options.len(), 3);
        assert_eq!(options[0].label, "A");
        for (opt, &s) in options.iter().zip(&shares) {
            let direct = solve_constrained(&inst, s).unwrap();
            assert!((opt.additional_appearances - direct.objective).abs() <= 1e-9);
            assert!((opt.spend - direct.spend).abs() <= 1e-9 * (1.0 + direct.spend));
        }
        // identical shares give identical rows (modulo the label)
        let dup = option_table(&inst, &f, &[0.5, 0.5]).unwrap();
        assert_eq!(dup[0].additional_appearances, dup[1].additional_appearances);
        assert_eq!(dup[0].gains, dup[1].gains);
    }

    #[test]
    fn all_black_single_option_equals_unconstrained() {
        let inst = instance(
            vec![person(0, "Black", 0.2, 2.0), person(1, "Black", 0.5, 3.0)],
            10.0,
        );
        let f = frontier(&inst, &[1.0]).unwrap();
        let options = option_table(&inst, &f, &[1.0]).unwrap();
        let free = unconstrained_alloc(&inst).unwrap();
        assert!((options[0].additional_appearances - free.objective).abs() <= 1e-12);
        assert!((options[0].spend - free.spend).abs() <= 1e-12);
    }
}
