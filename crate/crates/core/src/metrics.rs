//! Resistance and intrinsic metrics.
//!
//! Effective resistance is measure-free:
//! `R(x, y) = sup{|f(x) - f(y)|² : E(f) <= 1}` with
//! `E(f) = ½ Σ b(f(x) - f(y))²`, computed as `(e_x - e_y)ᵀ B⁺ (e_x - e_y)`.
//!
//! A pseudo-metric `d` is intrinsic for `Q` when every vertex has
//! nonnegative slack `m(x) - Σ_y b(x, y) d(x, y)²`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::form::GraphForm;
use crate::orderiso::{require_intertwining, OrderIso};
use crate::report::VerificationReport;
use crate::spectral::is_recurrent;
use crate::tol::{max_abs, Tol};

/// Eigenvalues at or below this fraction of the largest are treated as zero
/// when forming the pseudoinverse.
pub const PINV_CUTOFF: f64 = 1e-12;

/// Symmetric, zero-diagonal, nonnegative, triangle inequality within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoMetric {
    d: DMatrix<f64>,
}

impl PseudoMetric {
    pub fn new(d: DMatrix<f64>) -> Result<Self> {
        Self::with_tol(d, Tol::default())
    }

    pub fn with_tol(d: DMatrix<f64>, tol: Tol) -> Result<Self> {
        let n = d.nrows();
        if d.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: d.ncols(),
            });
        }
        if let Some(v) = d.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidMetric(format!("non-finite distance {v}")));
        }
        let scale = max_abs(d.iter().copied());
        let bound = tol.bound(scale);
        for x in 0..n {
            if d[(x, x)] != 0.0 {
                return Err(Error::InvalidMetric(format!("d({x}, {x}) = {}", d[(x, x)])));
            }
            for y in 0..n {
                if d[(x, y)] < 0.0 {
                    return Err(Error::InvalidMetric(format!(
                        "negative distance d({x}, {y}) = {}",
                        d[(x, y)]
                    )));
                }
                if d[(x, y)] != d[(y, x)] {
                    return Err(Error::InvalidMetric(format!("not symmetric at ({x}, {y})")));
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let excess = d[(x, z)] - d[(x, y)] - d[(y, z)];
                    if excess > bound {
                        return Err(Error::InvalidMetric(format!(
                            "triangle inequality fails at ({x}, {y}, {z}) by {excess:e}"
                        )));
                    }
                }
            }
        }
        Ok(Self { d })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: r.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |x, y| rows[x][y]))
    }

    pub fn zero(n: usize) -> Self {
        Self {
            d: DMatrix::zeros(n, n),
        }
    }

    pub fn len(&self) -> usize {
        self.d.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.d[(x, y)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.d
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.len())
            .map(|x| self.d.row(x).iter().copied().collect())
            .collect()
    }

    /// `k · d` for `k >= 0`.
    pub fn scaled(&self, k: f64) -> Self {
        assert!(
            k >= 0.0 && k.is_finite(),
            "scale factor must be nonnegative"
        );
        Self { d: &self.d * k }
    }

    /// `√d`, again a pseudo-metric.
    pub fn sqrt(&self) -> Self {
        Self {
            d: self.d.map(f64::sqrt),
        }
    }
}

/// Moore–Penrose pseudoinverse of a symmetric matrix.
pub fn pseudoinverse(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let eig = SymmetricEigen::new(a.clone());
    let lmax = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let mut out = DMatrix::zeros(n, n);
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        if l > PINV_CUTOFF * lmax {
            let v = eig.eigenvectors.column(k);
            out += (v * v.transpose()) / l;
        }
    }
    out
}

fn require_resistance_form(q: &GraphForm) -> Result<()> {
    if let Some(x) = q.killing().iter().position(|&c| c != 0.0) {
        return Err(Error::HasKilling(q.space().vertex(x).to_string()));
    }
    if !q.is_connected() {
        return Err(Error::NotConnected);
    }
    Ok(())
}

pub fn effective_resistance(q: &GraphForm, x: usize, y: usize) -> Result<f64> {
    require_resistance_form(q)?;
    let n = q.len();
    for v in [x, y] {
        if v >= n {
            return Err(Error::UnknownVertex(format!("index {v}")));
        }
    }
    let p = pseudoinverse(&q.energy_matrix());
    Ok(resistance_entry(&p, x, y))
}

fn resistance_entry(p: &DMatrix<f64>, x: usize, y: usize) -> f64 {
    if x == y {
        0.0
    } else {
        (p[(x, x)] + p[(y, y)] - p[(x, y)] - p[(y, x)]).max(0.0)
    }
}

pub fn resistance_matrix(q: &GraphForm) -> Result<PseudoMetric> {
    require_resistance_form(q)?;
    let n = q.len();
    let p = pseudoinverse(&q.energy_matrix());
    let d = DMatrix::from_fn(n, n, |x, y| {
        let (a, b) = (x.min(y), x.max(y));
        resistance_entry(&p, a, b)
    });
    PseudoMetric::new(d)
}

/// `d(τy, τz)` on the target, for `τ` given as target → source indices.
pub fn pushforward_metric(d: &PseudoMetric, tau: &[usize]) -> Result<PseudoMetric> {
    let n = d.len();
    if tau.len() != n {
        return Err(Error::SpaceMismatch(format!(
            "metric has {n} points, τ has {}",
            tau.len()
        )));
    }
    let mut seen = vec![false; n];
    for &x in tau {
        if x >= n || std::mem::replace(&mut seen[x], true) {
            return Err(Error::SpaceMismatch("τ is not a bijection".into()));
        }
    }
    Ok(PseudoMetric {
        d: DMatrix::from_fn(n, n, |y, z| d.get(tau[y], tau[z])),
    })
}

fn recurrent_constant(u: &OrderIso, q1: &GraphForm, q2: &GraphForm, tol: Tol) -> Result<f64> {
    if !is_recurrent(q1) || !is_recurrent(q2) {
        return Err(Error::NotRecurrent);
    }
    require_intertwining(u, &q1.generator(), &q2.generator(), tol)?;
    let h = u.scaling();
    Ok(h.iter().sum::<f64>() / h.len().max(1) as f64)
}

/// Checks `α² R₁(τy, τz) = β R₂(y, z)` for the constant scaling `h ≡ α` and
/// `β = ‖U‖²`. When both total masses agree, also checks `α² = β` and that
/// `τ` is a plain isometry.
pub fn verify_resistance_isometry(
    u: &OrderIso,
    q1: &GraphForm,
    q2: &GraphForm,
    tol: Tol,
) -> Result<VerificationReport> {
    let alpha = recurrent_constant(u, q1, q2, tol)?;
    let beta = u.beta();
    let r1 = resistance_matrix(q1)?;
    let r2 = resistance_matrix(q2)?;
    let tau = u.tau();
    let n = u.len();

    let mut report = VerificationReport::new();
    report
        .record("scaling_constant", u.scaling_ratio() - 1.0, tol.bound(1.0))
        .with_detail(format!("α = {alpha}"));

    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for y in 0..n {
        for z in 0..n {
            let lhs = alpha * alpha * r1.get(tau[y], tau[z]);
            let rhs = beta * r2.get(y, z);
            worst = worst.max((lhs - rhs).abs());
            scale = scale.max(lhs).max(rhs);
        }
    }
    report
        .record("resistance_isometry", worst, tol.bound(scale))
        .with_detail(format!("α² R₁∘τ = β R₂ with α = {alpha}, β = {beta}"));

    let (m1, m2) = (q1.space().total_mass(), q2.space().total_mass());
    if tol.accepts(m1 - m2, m1.max(m2)) {
        report
            .record(
                "equal_mass_norm",
                (alpha * alpha - beta).abs(),
                tol.bound(beta),
            )
            .with_detail("α² = ‖U‖² when total masses agree");
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for y in 0..n {
            for z in 0..n {
                worst = worst.max((r1.get(tau[y], tau[z]) - r2.get(y, z)).abs());
                scale = scale.max(r2.get(y, z));
            }
        }
        report.record("plain_isometry", worst, tol.bound(scale));
    }
    Ok(report)
}

/// Membership in the intrinsic family plus the per-vertex slack
/// `m(x) - Σ_y b(x, y) d(x, y)²`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntrinsicCheck {
    pub intrinsic: bool,
    pub slack: Vec<f64>,
}

pub fn intrinsic_slack(q: &GraphForm, d: &PseudoMetric) -> Result<Vec<f64>> {
    if d.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: q.len(),
            found: d.len(),
        });
    }
    let mut load = vec![0.0; q.len()];
    for (x, y, b) in q.edges() {
        let e = b * d.get(x, y).powi(2);
        load[x] += e;
        load[y] += e;
    }
    Ok(q.measure().iter().zip(load).map(|(m, l)| m - l).collect())
}

/// A vertex passes when its slack is at least `-tol.bound(m(x))`.
pub fn is_intrinsic(q: &GraphForm, d: &PseudoMetric, tol: Tol) -> Result<IntrinsicCheck> {
    let slack = intrinsic_slack(q, d)?;
    let intrinsic = slack
        .iter()
        .zip(q.measure())
        .all(|(s, &m)| *s >= -tol.bound(m));
    Ok(IntrinsicCheck { intrinsic, slack })
}

/// Shortest-path metric with edge length
/// `σ(x, y) = min(√(m(x)/Deg(x)), √(m(y)/Deg(y)))`.
pub fn canonical_intrinsic_metric(q: &GraphForm) -> Result<PseudoMetric> {
    if !q.is_connected() {
        return Err(Error::NotConnected);
    }
    let n = q.len();
    let m = q.measure();
    let deg = q.degrees();
    let reach: Vec<f64> = (0..n).map(|x| (m[x] / deg[x]).sqrt()).collect();
    let mut d = DMatrix::from_element(n, n, f64::INFINITY);
    for x in 0..n {
        d[(x, x)] = 0.0;
    }
    for (x, y, b) in q.edges() {
        if b > 0.0 {
            let s = reach[x].min(reach[y]);
            d[(x, y)] = d[(x, y)].min(s);
            d[(y, x)] = d[(x, y)];
        }
    }
    for k in 0..n {
        for x in 0..n {
            for y in 0..n {
                let via = d[(x, k)] + d[(k, y)];
                if via < d[(x, y)] {
                    d[(x, y)] = via;
                }
            }
        }
    }
    // Floyd–Warshall can leave last-bit asymmetry.
    for x in 0..n {
        for y in (x + 1)..n {
            let v = d[(x, y)].min(d[(y, x)]);
            d[(x, y)] = v;
            d[(y, x)] = v;
        }
    }
    PseudoMetric::new(d)
}

/// Largest `s` with `s·d` intrinsic; the slack of `s·d` vanishes at the
/// tightest vertex. `None` when `d` puts no load on any vertex.
pub fn boundary_scale(q: &GraphForm, d: &PseudoMetric) -> Result<Option<f64>> {
    let slack = intrinsic_slack(q, d)?;
    let m = q.measure();
    Ok(slack
        .iter()
        .zip(m)
        .filter(|(s, m)| *m - *s > 0.0)
        .map(|(s, m)| (m / (m - s)).sqrt())
        .reduce(f64::min))
}

/// Named sample metrics on `X₁`: the zero metric, the canonical intrinsic
/// metric and its boundary rescaling, inflations that leave the family, and
/// (when `q` is a resistance form) the boundary rescaling of `√R`.
pub fn default_intrinsic_samples(q: &GraphForm) -> Result<Vec<(String, PseudoMetric)>> {
    let canonical = canonical_intrinsic_metric(q)?;
    let mut out = vec![
        ("zero".to_string(), PseudoMetric::zero(q.len())),
        ("canonical".to_string(), canonical.clone()),
    ];
    if let Some(s) = boundary_scale(q, &canonical)? {
        let boundary = canonical.scaled(s);
        out.push(("canonical_boundary".into(), boundary.clone()));
        out.push(("boundary_inflated".into(), boundary.scaled(1.0 + 1e-6)));
    }
    out.push(("canonical_doubled".into(), canonical.scaled(2.0)));
    if is_recurrent(q) {
        let root = resistance_matrix(q)?.sqrt();
        if let Some(s) = boundary_scale(q, &root)? {
            out.push(("resistance_root_boundary".into(), root.scaled(s)));
        }
    }
    Ok(out)
}

/// For each sample `d` on `X₁`, compares membership of `d` for `Q₁` with
/// membership of `d∘(τ×τ)` for `Q₂`, and the normalized slacks
/// `slack₁(τy)/m₁(τy)` and `slack₂(y)/m₂(y)`, which agree exactly for a
/// recurrent intertwiner.
pub fn verify_intrinsic_bijection(
    u: &OrderIso,
    q1: &GraphForm,
    q2: &GraphForm,
    samples: &[(String, PseudoMetric)],
    tol: Tol,
) -> Result<VerificationReport> {
    recurrent_constant(u, q1, q2, tol)?;
    let tau = u.tau();
    let m1 = q1.measure();
    let m2 = q2.measure();
    let mut report = VerificationReport::new();
    for (name, d) in samples {
        let d2 = pushforward_metric(d, tau)?;
        let c1 = is_intrinsic(q1, d, tol)?;
        let c2 = is_intrinsic(q2, &d2, tol)?;
        let residual = tau
            .iter()
            .enumerate()
            .map(|(y, &x)| (c2.slack[y] / m2[y] - c1.slack[x] / m1[x]).abs())
            .fold(0.0, f64::max);
        let same = c1.intrinsic == c2.intrinsic;
        let check = report.record_flag(
            format!("{name}.membership"),
            same,
            if same { 0.0 } else { 1.0 },
            0.0,
        );
        check.with_detail(format!(
            "intrinsic: {} / {}; slack₁ = {:?}; slack₂ = {:?}",
            c1.intrinsic, c2.intrinsic, c1.slack, c2.slack
        ));
        report.record(format!("{name}.normalized_slack"), residual, tol.bound(1.0));
    }
    Ok(report)
}
