//! Dense two-phase simplex for the small feasibility problems in
//! [`crate::spectral`]. Bland's rule throughout, so no cycling.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Relation {
    Ge,
    Le,
    Eq,
}

#[derive(Debug, Clone)]
pub(crate) struct Constraint {
    pub coeffs: Vec<f64>,
    pub rel: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal(Vec<f64>),
    Infeasible,
    Unbounded,
}

const PIVOT_EPS: f64 = 1e-11;
const MAX_ITERATIONS: usize = 100_000;

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                let f = row[c];
                if f != 0.0 {
                    for (v, pv) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * pv;
                    }
                    row[c] = 0.0;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimizes `cost · x` over the current tableau; `allowed` masks the
    /// columns that may enter the basis. Returns false when unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool]) -> bool {
        for _ in 0..MAX_ITERATIONS {
            let entering = (0..self.ncols).find(|&j| {
                allowed[j] && !self.basis.contains(&j) && self.reduced_cost(cost, j) < -PIVOT_EPS
            });
            let Some(j) = entering else {
                return true;
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][j];
                if a > PIVOT_EPS {
                    let ratio = self.rhs(i) / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - 1e-14
                                || ((ratio - br).abs() <= 1e-14 && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = best else {
                return false;
            };
            self.pivot(r, j);
        }
        true
    }

    fn reduced_cost(&self, cost: &[f64], j: usize) -> f64 {
        let mut r = cost[j];
        for (i, &b) in self.basis.iter().enumerate() {
            r -= cost[b] * self.rows[i][j];
        }
        r
    }

    fn objective(&self, cost: &[f64]) -> f64 {
        self.basis
            .iter()
            .enumerate()
            .map(|(i, &b)| cost[b] * self.rhs(i))
            .sum()
    }
}

/// Minimizes `cost · x` subject to `constraints` and `x >= 0`.
pub(crate) fn minimize(cost: &[f64], constraints: &[Constraint]) -> LpOutcome {
    let n = cost.len();
    let m = constraints.len();

    // Normalize to rhs >= 0.
    let normalized: Vec<Constraint> = constraints
        .iter()
        .map(|c| {
            assert_eq!(c.coeffs.len(), n);
            if c.rhs < 0.0 {
                Constraint {
                    coeffs: c.coeffs.iter().map(|v| -v).collect(),
                    rel: match c.rel {
                        Relation::Ge => Relation::Le,
                        Relation::Le => Relation::Ge,
                        Relation::Eq => Relation::Eq,
                    },
                    rhs: -c.rhs,
                }
            } else {
                c.clone()
            }
        })
        .collect();

    let n_slack = normalized.iter().filter(|c| c.rel != Relation::Eq).count();
    let n_art = normalized.iter().filter(|c| c.rel != Relation::Le).count();
    let ncols = n + n_slack + n_art;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let (mut s, mut a) = (n, n + n_slack);
    for c in &normalized {
        let mut row = vec![0.0; ncols + 1];
        row[..n].copy_from_slice(&c.coeffs);
        row[ncols] = c.rhs;
        match c.rel {
            Relation::Le => {
                row[s] = 1.0;
                basis.push(s);
                s += 1;
            }
            Relation::Ge => {
                row[s] = -1.0;
                s += 1;
                row[a] = 1.0;
                basis.push(a);
                a += 1;
            }
            Relation::Eq => {
                row[a] = 1.0;
                basis.push(a);
                a += 1;
            }
        }
        rows.push(row);
    }
    let mut t = Tableau { rows, basis, ncols };
    let is_art = |j: usize| j >= n + n_slack;

    // Phase 1.
    let mut phase1 = vec![0.0; ncols];
    for v in phase1.iter_mut().skip(n + n_slack) {
        *v = 1.0;
    }
    let all = vec![true; ncols];
    t.optimize(&phase1, &all);
    let scale = 1.0 + normalized.iter().map(|c| c.rhs).fold(0.0, f64::max);
    if t.objective(&phase1) > 1e-9 * scale {
        return LpOutcome::Infeasible;
    }

    // Drive remaining artificials out of the basis, dropping redundant rows.
    let mut i = 0;
    while i < t.rows.len() {
        if is_art(t.basis[i]) {
            if let Some(j) = (0..n + n_slack).find(|&j| t.rows[i][j].abs() > PIVOT_EPS) {
                t.pivot(i, j);
                i += 1;
            } else {
                t.rows.remove(i);
                t.basis.remove(i);
            }
        } else {
            i += 1;
        }
    }

    // Phase 2.
    let mut phase2 = vec![0.0; ncols];
    phase2[..n].copy_from_slice(cost);
    let allowed: Vec<bool> = (0..ncols).map(|j| !is_art(j)).collect();
    if !t.optimize(&phase2, &allowed) {
        return LpOutcome::Unbounded;
    }

    let mut x = vec![0.0; n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rhs(i).max(0.0);
        }
    }
    LpOutcome::Optimal(x)
}
