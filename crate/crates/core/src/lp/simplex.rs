//! Dense two-phase primal simplex over exact rationals with Bland's rule.
//!
//! Problems are in the form max c·x subject to A x ≤ b, x ≥ 0.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub c: Vec<Q>,
    pub rows: Vec<Vec<Q>>,
    pub b: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub x: Vec<Q>,
    /// Row multipliers; together with `x` they certify optimality.
    pub y: Vec<Q>,
    pub value: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

pub fn q(x: i64) -> Q {
    Q::from_integer(x.into())
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

impl LinearProgram {
    pub fn new(c: Vec<Q>) -> Self {
        LinearProgram { c, rows: Vec::new(), b: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<Q>, rhs: Q) {
        assert_eq!(coeffs.len(), self.c.len(), "row length mismatch");
        self.rows.push(coeffs);
        self.b.push(rhs);
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run()
    }

    /// Independent check of an optimality certificate: primal and dual
    /// feasibility and equal objectives. Returns a description of the first
    /// failure.
    pub fn certificate_error(&self, sol: &LpSolution) -> Option<String> {
        let n = self.c.len();
        if sol.x.len() != n || sol.y.len() != self.rows.len() {
            return Some("certificate has the wrong shape".into());
        }
        if let Some(j) = sol.x.iter().position(|v| v.is_negative()) {
            return Some(format!("x[{j}] is negative"));
        }
        if let Some(i) = sol.y.iter().position(|v| v.is_negative()) {
            return Some(format!("y[{i}] is negative"));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if dot(row, &sol.x) > self.b[i] {
                return Some(format!("row {i} violated"));
            }
        }
        for j in 0..n {
            let col = self.rows.iter().zip(&sol.y).fold(Q::zero(), |acc, (r, y)| acc + &r[j] * y);
            if col < self.c[j] {
                return Some(format!("dual constraint {j} violated"));
            }
        }
        let primal = dot(&self.c, &sol.x);
        let dual = dot(&self.b, &sol.y);
        if primal != dual || primal != sol.value {
            return Some(format!("objectives differ: {primal} vs {dual}"));
        }
        None
    }
}

struct Tableau {
    n: usize,
    m: usize,
    /// m rows of length `width + 1`; the last entry is the right-hand side.
    t: Vec<Vec<Q>>,
    /// Reduced costs; the last entry is minus the objective value.
    r: Vec<Q>,
    basis: Vec<usize>,
    width: usize,
    /// Column of the phase-one artificial variable, if any.
    art: Option<usize>,
    c: Vec<Q>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.c.len();
        let m = lp.rows.len();
        let needs_art = lp.b.iter().any(|v| v.is_negative());
        let width = n + m + usize::from(needs_art);
        let mut t = Vec::with_capacity(m);
        for (i, row) in lp.rows.iter().enumerate() {
            let mut r = vec![Q::zero(); width + 1];
            r[..n].clone_from_slice(row);
            r[n + i] = Q::one();
            if needs_art {
                r[n + m] = -Q::one();
            }
            r[width] = lp.b[i].clone();
            t.push(r);
        }
        Tableau {
            n,
            m,
            t,
            r: vec![Q::zero(); width + 1],
            basis: (n..n + m).collect(),
            width,
            art: needs_art.then_some(n + m),
            c: lp.c.clone(),
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col].clone();
        for v in self.t[row].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.t[row].clone();
        for (k, other) in self.t.iter_mut().enumerate() {
            if k == row || other[col].is_zero() {
                continue;
            }
            let f = other[col].clone();
            for (v, pr) in other.iter_mut().zip(&pivot_row) {
                if !pr.is_zero() {
                    *v -= &f * pr;
                }
            }
        }
        if !self.r[col].is_zero() {
            let f = self.r[col].clone();
            for (v, pr) in self.r.iter_mut().zip(&pivot_row) {
                if !pr.is_zero() {
                    *v -= &f * pr;
                }
            }
        }
        self.basis[row] = col;
    }

    fn set_objective(&mut self, cost: &[Q]) {
        let mut r = vec![Q::zero(); self.width + 1];
        r[..cost.len()].clone_from_slice(cost);
        for (i, &bv) in self.basis.iter().enumerate() {
            let cb = cost.get(bv).cloned().unwrap_or_else(Q::zero);
            if cb.is_zero() {
                continue;
            }
            for (v, tv) in r.iter_mut().zip(&self.t[i]) {
                *v -= &cb * tv;
            }
        }
        self.r = r;
    }

    /// Bland's rule iterations. `false` when the objective is unbounded.
    fn optimize(&mut self, allowed: impl Fn(usize) -> bool) -> bool {
        loop {
            let Some(col) = (0..self.width).find(|&j| allowed(j) && self.r[j].is_positive()) else {
                return true;
            };
            let mut best: Option<(Q, usize, usize)> = None;
            for i in 0..self.m {
                if !self.t[i][col].is_positive() {
                    continue;
                }
                let ratio = &self.t[i][self.width] / &self.t[i][col];
                let better = match &best {
                    None => true,
                    Some((r, _, bv)) => ratio < *r || (ratio == *r && self.basis[i] < *bv),
                };
                if better {
                    best = Some((ratio, i, self.basis[i]));
                }
            }
            let Some((_, row, _)) = best else {
                return false;
            };
            self.pivot(row, col);
        }
    }

    fn run(mut self) -> LpOutcome {
        if let Some(art) = self.art {
            let mut phase1 = vec![Q::zero(); self.width];
            phase1[art] = -Q::one();
            self.set_objective(&phase1);
            let w = self.width;
            let row = (0..self.m)
                .min_by(|&a, &b| self.t[a][w].cmp(&self.t[b][w]).then(a.cmp(&b)))
                .expect("artificial column implies a row");
            self.pivot(row, art);
            self.optimize(|_| true);
            if self.r[w].is_positive() {
                return LpOutcome::Infeasible;
            }
            if let Some(row) = self.basis.iter().position(|&bv| bv == art) {
                let col = (0..w).find(|&j| j != art && !self.t[row][j].is_zero()).expect("row of full-rank system");
                self.pivot(row, col);
            }
            for row in self.t.iter_mut() {
                row[art] = Q::zero();
            }
        }
        let cost = self.c.clone();
        self.set_objective(&cost);
        let art = self.art;
        if !self.optimize(|j| Some(j) != art) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![Q::zero(); self.n];
        for (i, &bv) in self.basis.iter().enumerate() {
            if bv < self.n {
                x[bv] = self.t[i][self.width].clone();
            }
        }
        let y = (0..self.m).map(|i| -self.r[self.n + i].clone()).collect();
        let value = -self.r[self.width].clone();
        LpOutcome::Optimal(LpSolution { x, y, value })
    }
}
