//! Enumeration of intertwining order isomorphisms.
//!
//! With `β = 1` the measure identity fixes `h(y) = √(m₁(τy)/m₂(y))`, so only
//! the bijection `τ` is unknown. Entrywise, `U L₁ = L₂ U` reads
//!
//! ```text
//! h(y) L₁(τy, τz) = L₂(y, z) h(z)      for all y, z in X₂,
//! ```
//!
//! which is checked incrementally as `τ` is assigned one target vertex at a
//! time. Candidates are filtered up front by the spectrum and by two `h`-free
//! vertex invariants: the diagonal `L(x, x)` and the multiset of products
//! `L(x, w) L(w, x) = b(x, w)² / (m(x) m(w))`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::form::{Generator, GraphForm};
use crate::orderiso::{certify, intertwines, OrderIso};
use crate::spectral::is_irreducible;
use crate::tol::Tol;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub tol: Tol,
    pub max_solutions: usize,
    pub spectral_tol: f64,
    /// Worker threads; `0` and `1` both mean sequential.
    pub jobs: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            tol: Tol::default(),
            max_solutions: 10_000,
            spectral_tol: 1e-6,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reason {
    Size,
    Spectrum,
    Exhausted,
}

impl Reason {
    pub fn as_str(&self) -> &'static str {
        match self {
            Reason::Size => "size",
            Reason::Spectrum => "spectrum",
            Reason::Exhausted => "exhausted",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Verdict {
    Equivalent(OrderIso),
    Inequivalent(Reason),
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent(_))
    }
}

/// Sorted eigenvalue lists agree pairwise within `spectral_tol·(1+|λ|)`.
pub fn spectra_match(q1: &GraphForm, q2: &GraphForm, spectral_tol: f64) -> bool {
    if q1.len() != q2.len() {
        return false;
    }
    let g1 = q1.generator();
    let g2 = q2.generator();
    let a = &g1.spectral().eigenvalues;
    let b = &g2.spectral().eigenvalues;
    a.iter()
        .zip(b)
        .all(|(l, m)| (l - m).abs() <= spectral_tol * (1.0 + l.abs()))
}

/// All intertwiners with `β = 1`, ordered lexicographically by the source
/// index sequence `(τ(y₀), τ(y₁), …)`, truncated to `opts.max_solutions`.
pub fn find_intertwiners(
    q1: &GraphForm,
    q2: &GraphForm,
    opts: &SearchOptions,
) -> Result<Vec<OrderIso>> {
    Ok(run(q1, q2, opts)?.unwrap_or_default())
}

/// `Equivalent` with the first intertwiner, or the reason none exists.
pub fn equivalence_verdict(
    q1: &GraphForm,
    q2: &GraphForm,
    opts: &SearchOptions,
) -> Result<Verdict> {
    let one = SearchOptions {
        max_solutions: 1,
        ..*opts
    };
    Ok(match run(q1, q2, &one)? {
        Err(reason) => Verdict::Inequivalent(reason),
        Ok(mut found) if !found.is_empty() => Verdict::Equivalent(found.swap_remove(0)),
        Ok(_) => Verdict::Inequivalent(Reason::Exhausted),
    })
}

fn run(
    q1: &GraphForm,
    q2: &GraphForm,
    opts: &SearchOptions,
) -> Result<std::result::Result<Vec<OrderIso>, Reason>> {
    if !is_irreducible(q1) || !is_irreducible(q2) {
        return Err(Error::NotIrreducible);
    }
    if q1.len() != q2.len() {
        return Ok(Err(Reason::Size));
    }
    if !spectra_match(q1, q2, opts.spectral_tol) {
        return Ok(Err(Reason::Spectrum));
    }
    let problem = Problem::new(q1, q2, opts);
    let mut found = problem.enumerate(opts.jobs)?;
    found.truncate(opts.max_solutions);
    Ok(Ok(found))
}

struct Problem<'a> {
    q1: &'a GraphForm,
    q2: &'a GraphForm,
    g1: Generator,
    g2: Generator,
    tol: Tol,
    n: usize,
    l1: Vec<f64>,
    l2: Vec<f64>,
    m1: Vec<f64>,
    m2: Vec<f64>,
    /// `compat[y * n + x]`: target `y` may map to source `x`.
    compat: Vec<bool>,
    bound: f64,
    max_solutions: usize,
}

impl<'a> Problem<'a> {
    fn new(q1: &'a GraphForm, q2: &'a GraphForm, opts: &SearchOptions) -> Self {
        let n = q1.len();
        let g1 = q1.generator();
        let g2 = q2.generator();
        let flat = |g: &Generator| {
            let m = g.matrix();
            (0..n * n).map(|k| m[(k / n, k % n)]).collect::<Vec<_>>()
        };
        let l1 = flat(&g1);
        let l2 = flat(&g2);
        let m1 = q1.measure().to_vec();
        let m2 = q2.measure().to_vec();

        // Upper bound on the scale the final check measures against, so that
        // pruning never rejects an assignment the final check would accept.
        let h_max = m1
            .iter()
            .flat_map(|a| m2.iter().map(move |b| (a / b).sqrt()))
            .fold(0.0, f64::max);
        let lmax = g1.max_abs().max(g2.max_abs());
        let bound = opts.tol.bound(h_max * lmax);

        let inv1 = invariants(&l1, n);
        let inv2 = invariants(&l2, n);
        let loose = opts.spectral_tol * (1.0 + lmax);
        let loose_sq = opts.spectral_tol * (1.0 + lmax * lmax);
        let mut compat = vec![false; n * n];
        for y in 0..n {
            for x in 0..n {
                let (d1, p1) = &inv1[x];
                let (d2, p2) = &inv2[y];
                compat[y * n + x] = (d1 - d2).abs() <= loose
                    && p1.iter().zip(p2).all(|(a, b)| (a - b).abs() <= loose_sq);
            }
        }

        Self {
            q1,
            q2,
            g1,
            g2,
            tol: opts.tol,
            n,
            l1,
            l2,
            m1,
            m2,
            compat,
            bound,
            max_solutions: opts.max_solutions,
        }
    }

    fn h(&self, y: usize, x: usize) -> f64 {
        (self.m1[x] / self.m2[y]).sqrt()
    }

    /// Checks every residual entry between `y` (just assigned to `x`) and
    /// the already assigned target vertices.
    fn consistent(&self, tau: &[usize], y: usize, x: usize) -> bool {
        let n = self.n;
        let hy = self.h(y, x);
        if (hy * self.l1[x * n + x] - self.l2[y * n + y] * hy).abs() > self.bound {
            return false;
        }
        tau.iter().enumerate().all(|(z, &w)| {
            let hz = self.h(z, w);
            (hy * self.l1[x * n + w] - self.l2[y * n + z] * hz).abs() <= self.bound
                && (hz * self.l1[w * n + x] - self.l2[z * n + y] * hy).abs() <= self.bound
        })
    }

    /// The exact check every candidate must pass: intertwining at the
    /// requested tolerance and a fully green certificate.
    fn accept(&self, tau: &[usize]) -> Result<Option<OrderIso>> {
        let u = OrderIso::measure_normalized(
            self.q1.space().clone(),
            self.q2.space().clone(),
            tau.to_vec(),
        )?;
        if !intertwines(&u, &self.g1, &self.g2, self.tol)? {
            return Ok(None);
        }
        let ok = certify(&u, self.q1, self.q2, self.tol)?.report.verdict();
        Ok(ok.then_some(u))
    }

    fn dfs(&self, tau: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<OrderIso>) -> Result<()> {
        if out.len() >= self.max_solutions {
            return Ok(());
        }
        let y = tau.len();
        if y == self.n {
            if let Some(u) = self.accept(tau)? {
                out.push(u);
            }
            return Ok(());
        }
        for x in 0..self.n {
            if used[x] || !self.compat[y * self.n + x] || !self.consistent(tau, y, x) {
                continue;
            }
            used[x] = true;
            tau.push(x);
            self.dfs(tau, used, out)?;
            tau.pop();
            used[x] = false;
        }
        Ok(())
    }

    fn branch(&self, x: usize) -> Result<Vec<OrderIso>> {
        let mut out = Vec::new();
        if self.compat[x] && self.consistent(&[], 0, x) {
            let mut used = vec![false; self.n];
            used[x] = true;
            let mut tau = vec![x];
            self.dfs(&mut tau, &mut used, &mut out)?;
        }
        Ok(out)
    }

    fn enumerate(&self, jobs: usize) -> Result<Vec<OrderIso>> {
        // Each first-level branch is already in lexicographic order, and
        // branches are concatenated by their first entry.
        let branches: Vec<Vec<OrderIso>> = if jobs <= 1 {
            let mut all = Vec::new();
            let mut found = 0;
            for x in 0..self.n {
                if found >= self.max_solutions {
                    break;
                }
                let b = self.branch(x)?;
                found += b.len();
                all.push(b);
            }
            all
        } else {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| Error::InvalidSize(format!("thread pool: {e}")))?;
            pool.install(|| {
                (0..self.n)
                    .into_par_iter()
                    .map(|x| self.branch(x))
                    .collect::<Result<_>>()
            })?
        };
        Ok(branches.into_iter().flatten().collect())
    }
}

/// Per-vertex `(L(x,x), sorted products L(x,w)L(w,x))`.
fn invariants(l: &[f64], n: usize) -> Vec<(f64, Vec<f64>)> {
    (0..n)
        .map(|x| {
            let mut p: Vec<f64> = (0..n)
                .filter(|&w| w != x)
                .map(|w| l[x * n + w] * l[w * n + x])
                .collect();
            p.sort_by(f64::total_cmp);
            (l[x * n + x], p)
        })
        .collect()
}
