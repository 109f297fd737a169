//! Jump / killing decomposition of a finite form.
//!
//! On a finite space the strongly local part vanishes and
//!
//! ```text
//! Q(f) = Σ_{x≠y} J(x,y) (f(x) - f(y))² + Σ_x k(x) f(x)²
//! ```
//!
//! with `J` on **ordered** pairs. Summing over both orders means
//! `J(x,y) = b(x,y) / 2` and `k = c`; mixing up this factor of two is the
//! easiest way to get every downstream identity wrong.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::form::{basis, Generator, GraphForm, MeasureSpace};
use crate::orderiso::{require_intertwining, OrderIso};
use crate::report::VerificationReport;
use crate::tol::Tol;

#[derive(Debug, Clone, PartialEq)]
pub struct JumpKilling {
    space: MeasureSpace,
    jump: BTreeMap<(usize, usize), f64>,
    killing: Vec<f64>,
}

impl JumpKilling {
    /// Validates symmetry, nonnegativity and the absence of diagonal entries.
    pub fn new(
        space: MeasureSpace,
        jump: BTreeMap<(usize, usize), f64>,
        killing: Vec<f64>,
    ) -> Result<Self> {
        space.check_len(&killing)?;
        let n = space.len();
        for (&(x, y), &j) in &jump {
            if x >= n || y >= n {
                return Err(Error::UnknownVertex(format!("index {}", x.max(y))));
            }
            if x == y {
                return Err(Error::SelfLoop(space.vertex(x).to_string()));
            }
            if !j.is_finite() {
                return Err(Error::NonFinite(format!(
                    "J({}, {})",
                    space.vertex(x),
                    space.vertex(y)
                )));
            }
            if j < 0.0 {
                return Err(Error::NegativeWeight {
                    what: format!("J({}, {})", space.vertex(x), space.vertex(y)),
                    value: j,
                });
            }
            if jump.get(&(y, x)) != Some(&j) {
                return Err(Error::InvalidTransformation(format!(
                    "J is not symmetric at ({}, {})",
                    space.vertex(x),
                    space.vertex(y)
                )));
            }
        }
        for (x, &k) in killing.iter().enumerate() {
            if !k.is_finite() {
                return Err(Error::NonFinite(format!("k({})", space.vertex(x))));
            }
            if k < 0.0 {
                return Err(Error::NegativeWeight {
                    what: format!("k({})", space.vertex(x)),
                    value: k,
                });
            }
        }
        Ok(Self {
            space,
            jump,
            killing,
        })
    }

    pub fn space(&self) -> &MeasureSpace {
        &self.space
    }

    /// `J(x, y)`, zero off the support.
    pub fn jump(&self, x: usize, y: usize) -> f64 {
        self.jump.get(&(x, y)).copied().unwrap_or(0.0)
    }

    /// Ordered pairs `(x, y, J(x, y))` in lexicographic order.
    pub fn jumps(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.jump.iter().map(|(&(x, y), &j)| (x, y, j))
    }

    pub fn killing(&self) -> &[f64] {
        &self.killing
    }

    /// `Σ_{x≠y} φ(x)φ(y)(f(x)-f(y))² J(x,y)`.
    pub fn weighted_jump_energy(&self, phi: &[f64], f: &[f64]) -> Result<f64> {
        self.space.check_len(phi)?;
        self.space.check_len(f)?;
        Ok(self
            .jumps()
            .map(|(x, y, j)| phi[x] * phi[y] * (f[x] - f[y]).powi(2) * j)
            .sum())
    }

    pub fn jump_energy(&self, f: &[f64]) -> Result<f64> {
        self.weighted_jump_energy(&vec![1.0; self.space.len()], f)
    }

    pub fn killing_energy(&self, f: &[f64]) -> Result<f64> {
        self.space.check_len(f)?;
        Ok(self.killing.iter().zip(f).map(|(k, v)| k * v * v).sum())
    }

    /// Jump plus killing energy; equals `Q(f)`.
    pub fn energy(&self, f: &[f64]) -> Result<f64> {
        Ok(self.jump_energy(f)? + self.killing_energy(f)?)
    }

    /// Reassembles the form with `b = 2J`, `c = k`.
    pub fn to_form(&self) -> Result<GraphForm> {
        let edges = self
            .jumps()
            .filter(|&(x, y, _)| x < y)
            .map(|(x, y, j)| (x, y, 2.0 * j));
        GraphForm::from_indexed(self.space.clone(), edges, self.killing.clone())
    }
}

pub fn decompose(q: &GraphForm) -> JumpKilling {
    let mut jump = BTreeMap::new();
    for (x, y, b) in q.edges() {
        jump.insert((x, y), 0.5 * b);
        jump.insert((y, x), 0.5 * b);
    }
    JumpKilling {
        space: q.space().clone(),
        jump,
        killing: q.killing().to_vec(),
    }
}

/// `Q(φf) - Q(φf², φ)`.
pub fn truncated_form(q: &GraphForm, phi: &[f64], f: &[f64]) -> Result<f64> {
    q.space().check_len(phi)?;
    q.space().check_len(f)?;
    let pf: Vec<f64> = phi.iter().zip(f).map(|(p, v)| p * v).collect();
    let pff: Vec<f64> = phi.iter().zip(f).map(|(p, v)| p * v * v).collect();
    Ok(q.energy(&pf)? - q.evaluate(&pff, phi)?)
}

/// Compares `β J₁(τx, τy)` with `h(x) h(y) J₂(x, y)` on every ordered pair of
/// `X₂`, and confirms that both forms have no strongly local remainder.
pub fn verify_jump_transform(
    u: &OrderIso,
    q1: &GraphForm,
    q2: &GraphForm,
    tol: Tol,
) -> Result<VerificationReport> {
    require_intertwining(u, &q1.generator(), &q2.generator(), tol)?;
    let beta = u.beta();
    let tau = u.tau();
    let h = u.scaling();
    let j1 = decompose(q1);
    let j2 = decompose(q2);
    let n = u.len();

    let mut worst = (0.0, 0, 0);
    let mut scale: f64 = 0.0;
    for x in 0..n {
        for y in 0..n {
            if x == y {
                continue;
            }
            let lhs = beta * j1.jump(tau[x], tau[y]);
            let rhs = h[x] * h[y] * j2.jump(x, y);
            scale = scale.max(lhs.abs()).max(rhs.abs());
            let r = (lhs - rhs).abs();
            if r > worst.0 {
                worst = (r, x, y);
            }
        }
    }
    let mut report = VerificationReport::new();
    let space = u.target();
    report
        .record("jump_transform", worst.0, tol.bound(scale))
        .with_detail(format!(
            "β = {beta}; worst pair ({}, {})",
            space.vertex(worst.1),
            space.vertex(worst.2)
        ));

    for (name, q, jk) in [("strongly_local_1", q1, &j1), ("strongly_local_2", q2, &j2)] {
        let (r, s) = strongly_local_residual(q, jk)?;
        report.record(name, r, tol.bound(s));
    }
    Ok(report)
}

/// Max over basis pairs of `|Q(e_i + e_j) - jump - killing|` and the size of
/// the energies involved.
fn strongly_local_residual(q: &GraphForm, jk: &JumpKilling) -> Result<(f64, f64)> {
    let n = q.len();
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            let mut f = basis(n, i);
            f[j] += 1.0;
            let e = q.energy(&f)?;
            worst = worst.max((e - jk.energy(&f)?).abs());
            scale = scale.max(e);
        }
    }
    Ok((worst, scale))
}

/// Killing of the form whose generator is `(1/β) U L₁ U*`, read off the
/// row sums: `c₂(y) = m₂(y) Σ_z L₂(y, z)`.
pub fn induced_killing(u: &OrderIso, q1: &GraphForm, tol: Tol) -> Result<Vec<f64>> {
    if u.source() != q1.space() {
        return Err(Error::SpaceMismatch(
            "isomorphism source differs from the form's space".into(),
        ));
    }
    let beta = u.beta();
    let l2 = u.matrix() * q1.generator().matrix() * u.adjoint_matrix() / beta;
    let q2 = Generator::from_parts(l2, u.target().clone()).to_form(tol)?;
    Ok(q2.killing().to_vec())
}
