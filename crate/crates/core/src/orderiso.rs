//! Order isomorphisms `Uf = h·(f∘τ)` between finite Dirichlet spaces.
//!
//! `τ` maps target vertices to source vertices and `h > 0` lives on the
//! target. Between finite spaces every order isomorphism has this form, and
//! its adjoint is
//!
//! ```text
//! (U*g)(x) = m₂(τ⁻¹x) / m₁(x) · h(τ⁻¹x) · g(τ⁻¹x)
//! ```
//!
//! If `U` intertwines two irreducible semigroups then `U*U = UU* = β` for a
//! single constant `β = ‖U‖²`, `h²m₂ = β m₁∘τ`, `Q₂(Uf, Ug) = β Q₁(f, g)` and
//! `h` is excessive for the target. When both forms are recurrent `h` is
//! constant. [`certify`] measures each of these.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::form::{basis, Generator, GraphForm, MeasureSpace};
use crate::report::VerificationReport;
use crate::spectral::{is_irreducible, is_recurrent};
use crate::tol::{max_abs, Tol};

#[derive(Debug, Clone, PartialEq)]
pub struct OrderIso {
    source: MeasureSpace,
    target: MeasureSpace,
    tau: Vec<usize>,
    scaling: Vec<f64>,
}

impl OrderIso {
    /// `tau[y]` is the source vertex assigned to target vertex `y`.
    pub fn new(
        source: MeasureSpace,
        target: MeasureSpace,
        tau: Vec<usize>,
        scaling: Vec<f64>,
    ) -> Result<Self> {
        if source.len() != target.len() {
            return Err(Error::InvalidTransformation(format!(
                "source has {} vertices, target has {}",
                source.len(),
                target.len()
            )));
        }
        target.check_len(&tau)?;
        target.check_len(&scaling)?;
        let mut hit = vec![false; source.len()];
        for (y, &x) in tau.iter().enumerate() {
            if x >= source.len() {
                return Err(Error::InvalidTransformation(format!(
                    "τ({}) is out of range",
                    target.vertex(y)
                )));
            }
            if std::mem::replace(&mut hit[x], true) {
                return Err(Error::InvalidTransformation(format!(
                    "τ is not injective: `{}` is hit twice",
                    source.vertex(x)
                )));
            }
        }
        if let Some(y) = scaling.iter().position(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidTransformation(format!(
                "h({}) = {} is not strictly positive",
                target.vertex(y),
                scaling[y]
            )));
        }
        Ok(Self {
            source,
            target,
            tau,
            scaling,
        })
    }

    /// Builds from label pairs `(y, τ(y))` and `(y, h(y))`; every target
    /// vertex must appear exactly once in each.
    pub fn from_labels<'a>(
        source: MeasureSpace,
        target: MeasureSpace,
        tau: impl IntoIterator<Item = (&'a str, &'a str)>,
        scaling: impl IntoIterator<Item = (&'a str, f64)>,
    ) -> Result<Self> {
        let n = target.len();
        let mut t = vec![None; n];
        for (y, x) in tau {
            let yi = target.require(y)?;
            let xi = source.require(x)?;
            if t[yi].replace(xi).is_some() {
                return Err(Error::InvalidTransformation(format!("τ({y}) given twice")));
            }
        }
        let mut h = vec![None; n];
        for (y, v) in scaling {
            let yi = target.require(y)?;
            if h[yi].replace(v).is_some() {
                return Err(Error::InvalidTransformation(format!("h({y}) given twice")));
            }
        }
        let missing = |what: &str, y: usize| {
            Error::InvalidTransformation(format!("{what}({}) is missing", target.vertex(y)))
        };
        let tau = t
            .iter()
            .enumerate()
            .map(|(y, v)| v.ok_or_else(|| missing("τ", y)))
            .collect::<Result<Vec<_>>>()?;
        let scaling = h
            .iter()
            .enumerate()
            .map(|(y, v)| v.ok_or_else(|| missing("h", y)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(source, target, tau, scaling)
    }

    pub fn identity(space: &MeasureSpace) -> Self {
        let n = space.len();
        Self {
            source: space.clone(),
            target: space.clone(),
            tau: (0..n).collect(),
            scaling: vec![1.0; n],
        }
    }

    /// The intertwiner with `β = 1` determined by `τ`: `h(y)² m₂(y) = m₁(τy)`.
    pub fn measure_normalized(
        source: MeasureSpace,
        target: MeasureSpace,
        tau: Vec<usize>,
    ) -> Result<Self> {
        target.check_len(&tau)?;
        let m1 = source.measure();
        let m2 = target.measure();
        let scaling = tau
            .iter()
            .enumerate()
            .map(|(y, &x)| (m1.get(x).copied().unwrap_or(f64::NAN) / m2[y]).sqrt())
            .collect();
        Self::new(source, target, tau, scaling)
    }

    pub fn source(&self) -> &MeasureSpace {
        &self.source
    }

    pub fn target(&self) -> &MeasureSpace {
        &self.target
    }

    pub fn tau(&self) -> &[usize] {
        &self.tau
    }

    pub fn scaling(&self) -> &[f64] {
        &self.scaling
    }

    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    /// `τ⁻¹` as a map source → target.
    pub fn tau_inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.len()];
        for (y, &x) in self.tau.iter().enumerate() {
            inv[x] = y;
        }
        inv
    }

    /// `(Uf)(y) = h(y) f(τ(y))`.
    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.source.check_len(f)?;
        Ok(self
            .tau
            .iter()
            .zip(&self.scaling)
            .map(|(&x, h)| h * f[x])
            .collect())
    }

    pub fn apply_adjoint(&self, g: &[f64]) -> Result<Vec<f64>> {
        self.target.check_len(g)?;
        let m1 = self.source.measure();
        let m2 = self.target.measure();
        let mut out = vec![0.0; self.len()];
        for (y, &x) in self.tau.iter().enumerate() {
            out[x] = m2[y] / m1[x] * self.scaling[y] * g[y];
        }
        Ok(out)
    }

    /// `|X₂| × |X₁|` matrix with one nonzero `h(y)` per row at column `τ(y)`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut u = DMatrix::zeros(n, n);
        for (y, &x) in self.tau.iter().enumerate() {
            u[(y, x)] = self.scaling[y];
        }
        u
    }

    pub fn adjoint_matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        let m1 = self.source.measure();
        let m2 = self.target.measure();
        let mut a = DMatrix::zeros(n, n);
        for (y, &x) in self.tau.iter().enumerate() {
            a[(x, y)] = m2[y] / m1[x] * self.scaling[y];
        }
        a
    }

    /// `β` read off the diagonal of `U*U` (its mean over the source).
    pub fn beta(&self) -> f64 {
        let m1 = self.source.measure();
        let m2 = self.target.measure();
        let n = self.len();
        if n == 0 {
            return 1.0;
        }
        self.tau
            .iter()
            .enumerate()
            .map(|(y, &x)| self.scaling[y].powi(2) * m2[y] / m1[x])
            .sum::<f64>()
            / n as f64
    }

    /// `max h / min h`.
    pub fn scaling_ratio(&self) -> f64 {
        let max = self.scaling.iter().copied().fold(0.0, f64::max);
        let min = self.scaling.iter().copied().fold(f64::INFINITY, f64::min);
        max / min
    }

    /// The composite `V∘U` where `next = V` starts where `self` ends.
    pub fn then(&self, next: &OrderIso) -> Result<OrderIso> {
        if next.source != self.target {
            return Err(Error::SpaceMismatch(
                "second isomorphism does not start at the target of the first".into(),
            ));
        }
        // V(Uf)(z) = k(z) · h(σz) · f(τ(σz))
        let tau = next.tau.iter().map(|&y| self.tau[y]).collect();
        let scaling = next
            .tau
            .iter()
            .zip(&next.scaling)
            .map(|(&y, k)| k * self.scaling[y])
            .collect();
        OrderIso::new(self.source.clone(), next.target.clone(), tau, scaling)
    }

    /// The inverse order isomorphism `U⁻¹g = (1/h∘τ⁻¹)·(g∘τ⁻¹)`.
    pub fn inverse(&self) -> OrderIso {
        let inv = self.tau_inverse();
        let scaling = inv.iter().map(|&y| 1.0 / self.scaling[y]).collect();
        OrderIso {
            source: self.target.clone(),
            target: self.source.clone(),
            tau: inv,
            scaling,
        }
    }

    pub(crate) fn check_spaces(&self, g1: &MeasureSpace, g2: &MeasureSpace) -> Result<()> {
        if &self.source != g1 {
            return Err(Error::SpaceMismatch(
                "isomorphism source differs from the first space".into(),
            ));
        }
        if &self.target != g2 {
            return Err(Error::SpaceMismatch(
                "isomorphism target differs from the second space".into(),
            ));
        }
        Ok(())
    }
}

/// Max-norm of `U L₁ - L₂ U`, together with the magnitude of the two
/// products (the scale its tolerance is measured against).
pub fn intertwining_residual_scaled(
    u: &OrderIso,
    g1: &Generator,
    g2: &Generator,
) -> Result<(f64, f64)> {
    u.check_spaces(g1.space(), g2.space())?;
    let um = u.matrix();
    let left = &um * g1.matrix();
    let right = g2.matrix() * &um;
    let residual = max_abs((&left - &right).iter().copied());
    let scale = max_abs(left.iter().copied()).max(max_abs(right.iter().copied()));
    Ok((residual, scale))
}

/// Max-norm of `U L₁ - L₂ U`.
pub fn intertwining_residual(u: &OrderIso, g1: &Generator, g2: &Generator) -> Result<f64> {
    Ok(intertwining_residual_scaled(u, g1, g2)?.0)
}

/// `U L₁ = L₂ U` within `tol`, measured against the size of the products.
pub fn intertwines(u: &OrderIso, g1: &Generator, g2: &Generator, tol: Tol) -> Result<bool> {
    let (r, scale) = intertwining_residual_scaled(u, g1, g2)?;
    Ok(tol.accepts(r, scale))
}

/// Errors with `NotIntertwining` unless `U` intertwines the generators.
pub(crate) fn require_intertwining(
    u: &OrderIso,
    g1: &Generator,
    g2: &Generator,
    tol: Tol,
) -> Result<(f64, f64)> {
    let (residual, scale) = intertwining_residual_scaled(u, g1, g2)?;
    let bound = tol.bound(scale);
    if residual > bound {
        return Err(Error::NotIntertwining { residual, bound });
    }
    Ok((residual, bound))
}

/// Outcome of [`certify`]: the report plus the derived constants.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub report: VerificationReport,
    /// `‖U‖²`, from the diagonal of `U*U`.
    pub beta: f64,
    /// `max h / min h`.
    pub scaling_ratio: f64,
    /// `α` in `τ_# m₂ = α m₁`, present when both forms are recurrent.
    pub alpha: Option<f64>,
}

/// Measures every rigidity property of an intertwining order isomorphism
/// between irreducible forms.
pub fn certify(u: &OrderIso, q1: &GraphForm, q2: &GraphForm, tol: Tol) -> Result<Certificate> {
    if !is_irreducible(q1) || !is_irreducible(q2) {
        return Err(Error::NotIrreducible);
    }
    let g1 = q1.generator();
    let g2 = q2.generator();
    let (residual, bound) = require_intertwining(u, &g1, &g2, tol)?;

    let mut report = VerificationReport::new();
    report.record("intertwining", residual, bound);

    let n = u.len();
    let m1 = q1.measure();
    let m2 = q2.measure();
    let h = u.scaling();
    let beta = u.beta();
    let id = DMatrix::<f64>::identity(n, n) * beta;

    let uu = u.adjoint_matrix() * u.matrix();
    let r = max_abs((&uu - &id).iter().copied());
    report
        .record("adjoint_times_u", r, tol.bound(beta))
        .with_detail(format!("U*U = βI with β = {beta}"));
    let uu = u.matrix() * u.adjoint_matrix();
    let r = max_abs((&uu - &id).iter().copied());
    report
        .record("u_times_adjoint", r, tol.bound(beta))
        .with_detail(format!("UU* = βI with β = {beta}"));

    // h²m₂ = β m₁∘τ, relative per vertex
    let rel = u
        .tau()
        .iter()
        .enumerate()
        .map(|(y, &x)| (h[y] * h[y] * m2[y] - beta * m1[x]).abs() / (beta * m1[x]))
        .fold(0.0, f64::max);
    report.record("measure_identity", rel, tol.bound(1.0));

    // β from total masses must match β from the operator
    let beta_mass =
        h.iter().zip(m2).map(|(hy, my)| hy * hy * my).sum::<f64>() / q1.space().total_mass();
    report
        .record("beta_coherence", (beta - beta_mass).abs(), tol.bound(beta))
        .with_detail(format!("β(operator) = {beta}, β(mass) = {beta_mass}"));

    // Q₂(Ue_i, Ue_j) = β Q₁(e_i, e_j)
    let images: Vec<Vec<f64>> = (0..n)
        .map(|i| u.apply(&basis(n, i)))
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            let lhs = q2.evaluate(&images[i], &images[j])?;
            let rhs = beta * q1.evaluate(&basis(n, i), &basis(n, j))?;
            worst = worst.max((lhs - rhs).abs());
            scale = scale.max(rhs.abs());
        }
    }
    report.record("form_scaling", worst, tol.bound(scale));

    // L₂h >= 0
    let l2h = g2.apply(h)?;
    let min = l2h.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = g2.max_abs() * max_abs(h.iter().copied());
    report
        .record("scaling_excessive", (-min).max(0.0), tol.bound(scale))
        .with_detail(format!("min (L₂h)(y) = {min}"));

    let ratio = u.scaling_ratio();
    let mut alpha = None;
    if is_recurrent(q1) && is_recurrent(q2) {
        report
            .record("recurrent_scaling_constant", ratio - 1.0, tol.bound(1.0))
            .with_detail(format!("max h / min h = {ratio}"));
        let h_mean = h.iter().sum::<f64>() / n as f64;
        let a = beta / (h_mean * h_mean);
        let rel = u
            .tau()
            .iter()
            .enumerate()
            .map(|(y, &x)| (m2[y] - a * m1[x]).abs() / (a * m1[x]))
            .fold(0.0, f64::max);
        report
            .record("recurrent_measure_pushforward", rel, tol.bound(1.0))
            .with_detail(format!("τ_# m₂ = α m₁ with α = {a}"));
        alpha = Some(a);
    }

    Ok(Certificate {
        report,
        beta,
        scaling_ratio: ratio,
        alpha,
    })
}

/// The Doob transform of `Q` by a strictly positive excessive `h`: the form
/// on `h²m` with generator `M_{1/h} L M_h`, and the intertwiner `U f = f / h`.
pub fn doob_pair(q: &GraphForm, h_ex: &[f64], tol: Tol) -> Result<(GraphForm, OrderIso)> {
    q.space().check_len(h_ex)?;
    if h_ex.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::NonPositive);
    }
    let g = q.generator();
    let lh = g.apply(h_ex)?;
    let min = lh.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -tol.bound(g.max_abs() * max_abs(h_ex.iter().copied())) {
        return Err(Error::NotExcessive(min));
    }

    let n = q.len();
    let l = g.matrix();
    let conj = DMatrix::from_fn(n, n, |x, y| l[(x, y)] * h_ex[y] / h_ex[x]);
    let weights: Vec<f64> = h_ex.iter().map(|v| v * v).collect();
    let space2 = q.space().reweighted(&weights)?;
    let g2 = Generator::from_parts(conj, space2.clone());
    let q2 = g2.to_form(tol).map_err(|_| Error::NotExcessive(min))?;

    let scaling = h_ex.iter().map(|v| 1.0 / v).collect();
    let u = OrderIso::new(q.space().clone(), space2, (0..n).collect(), scaling)?;
    Ok((q2, u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{generate, Family, FamilyParams};

    fn killed_pair() -> GraphForm {
        GraphForm::builder()
            .vertex("a", 1.0)
            .vertex("b", 1.0)
            .edge("a", "b", 1.0)
            .killing("a", 1.0)
            .build()
            .unwrap()
    }

    fn space(ids: &[&str], m: &[f64]) -> MeasureSpace {
        MeasureSpace::new(ids.iter().map(|s| s.to_string()).collect(), m.to_vec()).unwrap()
    }

    #[test]
    fn apply_examples() {
        let s = space(&["a", "b"], &[1.0, 1.0]);
        let id = OrderIso::identity(&s);
        assert_eq!(id.apply(&[3.0, 5.0]).unwrap(), vec![3.0, 5.0]);
        let swap = OrderIso::new(s.clone(), s.clone(), vec![1, 0], vec![1.0, 1.0]).unwrap();
        assert_eq!(swap.apply(&[3.0, 5.0]).unwrap(), vec![5.0, 3.0]);
        let doob = OrderIso::new(
            s.clone(),
            space(&["a", "b"], &[1.0, 4.0]),
            vec![0, 1],
            vec![1.0, 0.5],
        )
        .unwrap();
        assert_eq!(doob.apply(&[1.0, 2.0]).unwrap(), vec![1.0, 1.0]);
        assert!(matches!(
            doob.apply(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn construction_rejects_bad_tau() {
        let s = space(&["a", "b"], &[1.0, 1.0]);
        assert!(OrderIso::new(s.clone(), s.clone(), vec![0, 0], vec![1.0, 1.0]).is_err());
        assert!(OrderIso::new(s.clone(), s.clone(), vec![0, 2], vec![1.0, 1.0]).is_err());
        assert!(OrderIso::new(s.clone(), s.clone(), vec![0, 1], vec![1.0, 0.0]).is_err());
        assert!(OrderIso::from_labels(
            s.clone(),
            s.clone(),
            [("a", "b")],
            [("a", 1.0), ("b", 1.0)]
        )
        .is_err());
        let ok = OrderIso::from_labels(
            s.clone(),
            s.clone(),
            [("a", "b"), ("b", "a")],
            [("a", 1.0), ("b", 1.0)],
        )
        .unwrap();
        assert_eq!(ok.tau(), &[1, 0]);
    }

    #[test]
    fn adjoint_examples() {
        let s = space(&["a", "b"], &[1.0, 1.0]);
        let id = OrderIso::identity(&s);
        assert_eq!(id.adjoint_matrix(), DMatrix::identity(2, 2));
        let swap = OrderIso::new(s.clone(), s.clone(), vec![1, 0], vec![1.0, 1.0]).unwrap();
        assert_eq!(swap.adjoint_matrix(), swap.matrix());

        let (_, u) = doob_pair(&killed_pair(), &[1.0, 2.0], Tol::default()).unwrap();
        let uu = u.adjoint_matrix() * u.matrix();
        assert!((uu - DMatrix::identity(2, 2)).amax() < 1e-15);
        assert_eq!(u.apply_adjoint(&[1.0, 1.0]).unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn adjoint_identity_on_basis() {
        let s1 = space(&["a", "b", "c"], &[1.0, 2.0, 0.5]);
        let s2 = space(&["x", "y", "z"], &[3.0, 0.25, 1.5]);
        let u = OrderIso::new(s1.clone(), s2.clone(), vec![2, 0, 1], vec![0.3, 1.7, 2.0]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let lhs = s2
                    .inner(&u.apply(&basis(3, i)).unwrap(), &basis(3, j))
                    .unwrap();
                let rhs = s1
                    .inner(&basis(3, i), &u.apply_adjoint(&basis(3, j)).unwrap())
                    .unwrap();
                assert!((lhs - rhs).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn intertwining_examples() {
        let p3 = generate(Family::Path, 3, FamilyParams::default()).unwrap();
        let g = p3.generator();
        let id = OrderIso::identity(p3.space());
        assert_eq!(intertwining_residual(&id, &g, &g).unwrap(), 0.0);

        let q1 = killed_pair();
        let (q2, u) = doob_pair(&q1, &[1.0, 2.0], Tol::default()).unwrap();
        let r = intertwining_residual(&u, &q1.generator(), &q2.generator()).unwrap();
        assert!(r <= 1e-12, "{r}");

        let a = GraphForm::builder()
            .vertex("a", 1.0)
            .vertex("b", 1.0)
            .edge("a", "b", 1.0)
            .build()
            .unwrap();
        let b = GraphForm::builder()
            .vertex("a", 1.0)
            .vertex("b", 1.0)
            .edge("a", "b", 3.0)
            .build()
            .unwrap();
        let swap = OrderIso::new(
            a.space().clone(),
            b.space().clone(),
            vec![1, 0],
            vec![1.0, 1.0],
        )
        .unwrap();
        assert!(intertwining_residual(&swap, &a.generator(), &b.generator()).unwrap() > 0.1);
        assert!(matches!(
            intertwining_residual(&swap, &p3.generator(), &b.generator()),
            Err(Error::SpaceMismatch(_))
        ));
    }

    #[test]
    fn doob_examples() {
        let tol = Tol::default();
        let q1 = killed_pair();
        let (q2, u) = doob_pair(&q1, &[1.0, 2.0], tol).unwrap();
        assert_eq!(q2.measure(), &[1.0, 4.0]);
        assert!((q2.conductance(0, 1) - 2.0).abs() < 1e-15);
        assert!(q2.killing()[0].abs() < 1e-15);
        assert!((q2.killing()[1] - 2.0).abs() < 1e-15);
        assert_eq!(u.scaling(), &[1.0, 0.5]);
        assert_eq!(
            doob_pair(&q1, &[2.0, 1.0], tol).unwrap_err(),
            Error::NotExcessive(-1.0)
        );
        assert_eq!(
            doob_pair(&q1, &[0.0, 1.0], tol).unwrap_err(),
            Error::NonPositive
        );

        let (q3, u3) = doob_pair(&q1, &[3.0, 3.0], tol).unwrap();
        assert_eq!(q3.measure(), &[9.0, 9.0]);
        assert_eq!(u3.scaling(), &[1.0 / 3.0, 1.0 / 3.0]);
        assert!((q3.generator().matrix() - q1.generator().matrix()).amax() < 1e-15);
    }

    #[test]
    fn certify_identity_and_doob() {
        let tol = Tol::default();
        let p3 = generate(Family::Path, 3, FamilyParams::default()).unwrap();
        let c = certify(&OrderIso::identity(p3.space()), &p3, &p3, tol).unwrap();
        assert!(c.report.verdict(), "{:?}", c.report);
        assert_eq!(c.beta, 1.0);
        assert_eq!(c.alpha, Some(1.0));

        let q1 = killed_pair();
        let (q2, u) = doob_pair(&q1, &[1.0, 2.0], tol).unwrap();
        let c = certify(&u, &q1, &q2, tol).unwrap();
        assert!(c.report.verdict(), "{:?}", c.report);
        assert!((c.beta - 1.0).abs() < 1e-15);
        assert!((c.scaling_ratio - 2.0).abs() < 1e-15);
        assert!(c.report.get("recurrent_scaling_constant").is_none());
        assert_eq!(c.alpha, None);
    }

    #[test]
    fn certify_reflected_weighted_path() {
        let p3 = generate(Family::Path, 3, FamilyParams::default())
            .unwrap()
            .with_measure(vec![1.0, 2.0, 1.0])
            .unwrap();
        let refl = OrderIso::new(
            p3.space().clone(),
            p3.space().clone(),
            vec![2, 1, 0],
            vec![1.0; 3],
        )
        .unwrap();
        let c = certify(&refl, &p3, &p3, Tol::default()).unwrap();
        assert!(c.report.verdict(), "{:?}", c.report);
        assert_eq!(c.alpha, Some(1.0));
    }

    #[test]
    fn certify_preconditions() {
        let tol = Tol::default();
        let a = GraphForm::builder()
            .vertex("a", 1.0)
            .vertex("b", 1.0)
            .edge("a", "b", 1.0)
            .build()
            .unwrap();
        let b = GraphForm::builder()
            .vertex("a", 1.0)
            .vertex("b", 1.0)
            .edge("a", "b", 2.0)
            .build()
            .unwrap();
        let id = OrderIso::identity(a.space());
        assert!(matches!(
            certify(&id, &a, &b, tol),
            Err(Error::NotIntertwining { .. })
        ));
        let split = GraphForm::builder()
            .vertex("a", 1.0)
            .vertex("b", 1.0)
            .build()
            .unwrap();
        assert_eq!(
            certify(&id, &split, &split, tol).unwrap_err(),
            Error::NotIrreducible
        );
    }

    #[test]
    fn composition_and_inverse() {
        let tol = Tol::default();
        let q1 = killed_pair();
        let (q2, u) = doob_pair(&q1, &[1.0, 2.0], tol).unwrap();
        let swap = OrderIso::new(
            q2.space().clone(),
            MeasureSpace::new(vec!["a".into(), "b".into()], vec![4.0, 1.0]).unwrap(),
            vec![1, 0],
            vec![1.0, 1.0],
        )
        .unwrap();
        let both = u.then(&swap).unwrap();
        assert_eq!(both.tau(), &[1, 0]);
        assert_eq!(both.scaling(), &[0.5, 1.0]);
        let f = [2.0, 7.0];
        assert_eq!(
            both.apply(&f).unwrap(),
            swap.apply(&u.apply(&f).unwrap()).unwrap()
        );
        let back = u.inverse();
        assert_eq!(back.apply(&u.apply(&f).unwrap()).unwrap(), f.to_vec());
        assert!(swap.then(&u).is_err());
    }
}
