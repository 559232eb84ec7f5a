//! Depth-first branch-and-bound on top of the rational simplex.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::simplex::{LinearProgram, LpOutcome, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerSolution {
    pub x: Vec<BigInt>,
    pub value: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntegerOutcome {
    Optimal(IntegerSolution),
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Search {
    /// Prove optimality.
    Optimal,
    /// Stop at the first integral point.
    FirstFeasible,
}

#[derive(Debug, Clone)]
enum Bound {
    Upper(usize, BigInt),
    Lower(usize, BigInt),
}

fn with_bounds(base: &LinearProgram, bounds: &[Bound]) -> LinearProgram {
    let mut lp = base.clone();
    let n = lp.num_vars();
    for b in bounds {
        let mut row = vec![Q::zero(); n];
        match b {
            Bound::Upper(j, u) => {
                row[*j] = Q::one();
                lp.add_row(row, Q::from_integer(u.clone()));
            }
            Bound::Lower(j, l) => {
                row[*j] = -Q::one();
                lp.add_row(row, -Q::from_integer(l.clone()));
            }
        }
    }
    lp
}

/// Maximizes `lp` over integer points. Branches on the fractional variable
/// with the largest denominator (lowest index on ties), exploring the
/// rounded-down side first; nodes whose relaxation cannot beat the incumbent
/// are pruned. The search must be finite, so callers bound every variable.
pub fn solve_integer(lp: &LinearProgram, search: Search) -> IntegerOutcome {
    let integral_costs = lp.c.iter().all(|c| c.is_integer());
    // best achievable integer value given a relaxation value
    let cap = |v: &Q| if integral_costs { v.floor() } else { v.clone() };
    let root_cap = match lp.solve() {
        LpOutcome::Infeasible => return IntegerOutcome::Infeasible,
        LpOutcome::Unbounded => return IntegerOutcome::Unbounded,
        LpOutcome::Optimal(s) => cap(&s.value),
    };
    let mut incumbent: Option<IntegerSolution> = None;
    let mut stack: Vec<Vec<Bound>> = vec![Vec::new()];
    while let Some(bounds) = stack.pop() {
        let sol = match with_bounds(lp, &bounds).solve() {
            LpOutcome::Optimal(s) => s,
            LpOutcome::Infeasible => continue,
            LpOutcome::Unbounded => return IntegerOutcome::Unbounded,
        };
        if incumbent.as_ref().is_some_and(|inc| cap(&sol.value) <= inc.value) {
            continue;
        }
        let branch = sol
            .x
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_integer())
            .max_by(|(i, a), (j, b)| a.denom().cmp(b.denom()).then(j.cmp(i)));
        match branch {
            None => {
                let x = sol.x.iter().map(|v| v.to_integer()).collect();
                let done = search == Search::FirstFeasible || sol.value == root_cap;
                incumbent = Some(IntegerSolution { x, value: sol.value });
                if done {
                    break;
                }
            }
            Some((j, v)) => {
                let fl = v.floor().to_integer();
                let mut up = bounds.clone();
                up.push(Bound::Lower(j, &fl + 1));
                let mut down = bounds;
                down.push(Bound::Upper(j, fl));
                stack.push(up);
                stack.push(down);
            }
        }
    }
    match incumbent {
        Some(s) => IntegerOutcome::Optimal(s),
        None => IntegerOutcome::Infeasible,
    }
}
