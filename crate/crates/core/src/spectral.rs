//! Semigroups and the structural predicates of a finite Dirichlet space:
//! irreducibility, recurrence, excessive functions, truncation bounds.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::form::{Generator, GraphForm};
use crate::simplex::{self, Constraint, LpOutcome, Relation};
use crate::tol::{max_abs, Tol};

/// Separation required between `h(x₁)` and `h(x₀) = 1` when looking for a
/// non-constant excessive function.
pub const NONCONSTANT_GAP: f64 = 1e-3;

/// Spectral resolution of a generator.
///
/// Eigenvalues ascend; the columns of `eigenvectors` are orthonormal in
/// `L²(X, m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl Generator {
    /// Memoized spectral decomposition, computed from the symmetric matrix
    /// `M^{1/2} L M^{-1/2}` and mapped back by `M^{-1/2}`.
    pub fn spectral(&self) -> &SpectralData {
        self.spectral_cell().get_or_init(|| decompose(self))
    }
}

fn decompose(g: &Generator) -> SpectralData {
    let n = g.len();
    let m = g.space().measure();
    let l = g.matrix();
    let sqrt_m: Vec<f64> = m.iter().map(|v| v.sqrt()).collect();
    let s = DMatrix::from_fn(n, n, |x, y| {
        let a = sqrt_m[x] * l[(x, y)] / sqrt_m[y];
        let b = sqrt_m[y] * l[(y, x)] / sqrt_m[x];
        0.5 * (a + b)
    });
    let eig = SymmetricEigen::new(s);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |x, k| eig.eigenvectors[(x, order[k])] / sqrt_m[x]);
    SpectralData {
        eigenvalues,
        eigenvectors,
    }
}

/// `T_t = e^{-tL}`.
pub fn semigroup(g: &Generator, t: f64) -> Result<DMatrix<f64>> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let n = g.len();
    if t == 0.0 {
        return Ok(DMatrix::identity(n, n));
    }
    let sd = g.spectral();
    let m = g.space().measure();
    let u = &sd.eigenvectors;
    let decay: Vec<f64> = sd.eigenvalues.iter().map(|l| (-t * l).exp()).collect();
    // T = U diag(e^{-tλ}) Uᵀ M
    Ok(DMatrix::from_fn(n, n, |x, y| {
        (0..n)
            .map(|k| u[(x, k)] * decay[k] * u[(y, k)])
            .sum::<f64>()
            * m[y]
    }))
}

/// Irreducible iff the graph of positive conductances is connected.
pub fn is_irreducible(q: &GraphForm) -> bool {
    q.is_connected()
}

/// On a finite space `Q(1) = Σ c`, so recurrence is `c ≡ 0`.
pub fn is_recurrent(q: &GraphForm) -> bool {
    q.killing().iter().all(|&c| c == 0.0)
}

/// Connectivity read off the off-diagonal pattern of a generator.
pub fn generator_is_irreducible(g: &Generator) -> bool {
    let n = g.len();
    if n == 0 {
        return true;
    }
    let l = g.matrix();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for y in 0..n {
            if !seen[y] && y != x && (l[(x, y)] != 0.0 || l[(y, x)] != 0.0) {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn check_nonnegative(h: &[f64]) -> Result<()> {
    match h.iter().position(|&v| v.is_nan() || v < 0.0) {
        Some(index) => Err(Error::NegativeInput {
            index,
            value: h[index],
        }),
        None => Ok(()),
    }
}

/// Smallest entry of `Lh` and the tolerance bound it is compared with.
fn excessive_margin(g: &Generator, h: &[f64], tol: Tol) -> Result<(f64, f64)> {
    let lh = g.apply(h)?;
    let min = lh.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = g.max_abs() * max_abs(h.iter().copied());
    Ok((min, tol.bound(scale)))
}

/// `h` is excessive, `T_t h <= h` for all `t >= 0`, iff `Lh >= 0`.
///
/// If `Lh >= 0` then `d/dt T_t h = -T_t L h <= 0` because `T_t` preserves
/// positivity; conversely `(h - T_t h) / t -> Lh` as `t -> 0`.
pub fn is_excessive(g: &Generator, h: &[f64], tol: Tol) -> Result<bool> {
    g.space().check_len(h)?;
    check_nonnegative(h)?;
    let (min, bound) = excessive_margin(g, h, tol)?;
    Ok(min >= -bound)
}

/// Looks for a strictly positive, non-constant `h` with `Lh >= 0`.
///
/// For each ordered vertex pair `(x₀, x₁)` the linear program
/// `min Σh  s.t.  Lh >= 0, h >= 1, h(x₀) = 1, h(x₁) >= 1 + δ` is solved; the
/// first feasible pair wins. On an irreducible space the result is `None`
/// exactly when the form is recurrent.
pub fn find_nonconstant_excessive(g: &Generator, tol: Tol) -> Result<Option<Vec<f64>>> {
    if !generator_is_irreducible(g) {
        return Err(Error::NotIrreducible);
    }
    let n = g.len();
    if n < 2 {
        return Ok(None);
    }
    let l = g.matrix();
    let m = g.space().measure();
    // Substitute h = 1 + u with u >= 0; rows scaled by m(x):
    //   Σ_y m(x) L(x,y) u(y) >= -m(x) (L1)(x)
    let base: Vec<Constraint> = (0..n)
        .map(|x| Constraint {
            coeffs: (0..n).map(|y| m[x] * l[(x, y)]).collect(),
            rel: Relation::Ge,
            rhs: -m[x] * (0..n).map(|y| l[(x, y)]).sum::<f64>(),
        })
        .collect();
    let cost = vec![1.0; n];
    for x0 in 0..n {
        for x1 in 0..n {
            if x0 == x1 {
                continue;
            }
            let mut rows = base.clone();
            let mut pin = vec![0.0; n];
            pin[x0] = 1.0;
            rows.push(Constraint {
                coeffs: pin,
                rel: Relation::Eq,
                rhs: 0.0,
            });
            let mut gap = vec![0.0; n];
            gap[x1] = 1.0;
            rows.push(Constraint {
                coeffs: gap,
                rel: Relation::Ge,
                rhs: NONCONSTANT_GAP,
            });
            if let LpOutcome::Optimal(u) = simplex::minimize(&cost, &rows) {
                let h: Vec<f64> = u.iter().map(|v| 1.0 + v).collect();
                if is_excessive(g, &h, tol)? {
                    return Ok(Some(h));
                }
            }
        }
    }
    Ok(None)
}

/// Both sides of the truncation bounds for an excessive `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationCheck {
    /// `Q(f)`
    pub energy: f64,
    /// `Q(f ∧ h)`
    pub min_energy: f64,
    /// `Q((f - h)₊)`
    pub excess_energy: f64,
    /// `Q(f ∧ h) <= Q(f)` and `Q((f - h)₊) <= 4 Q(f)`, within tolerance.
    pub pass: bool,
}

pub fn check_truncation(q: &GraphForm, f: &[f64], h: &[f64], tol: Tol) -> Result<TruncationCheck> {
    q.space().check_len(f)?;
    q.space().check_len(h)?;
    check_nonnegative(h)?;
    let g = q.generator();
    let (min, bound) = excessive_margin(&g, h, tol)?;
    if min < -bound {
        return Err(Error::NotExcessive(min));
    }
    let meet: Vec<f64> = f.iter().zip(h).map(|(a, b)| a.min(*b)).collect();
    let excess: Vec<f64> = f.iter().zip(h).map(|(a, b)| (a - b).max(0.0)).collect();
    let energy = q.energy(f)?;
    let min_energy = q.energy(&meet)?;
    let excess_energy = q.energy(&excess)?;
    let pass = min_energy <= energy + tol.bound(energy)
        && excess_energy <= 4.0 * energy + tol.bound(4.0 * energy);
    Ok(TruncationCheck {
        energy,
        min_energy,
        excess_energy,
        pass,
    })
}

/// Dimension of `{φ : [diag(φ), L] = 0}`.
pub fn commutant_dimension(g: &Generator) -> usize {
    let n = g.len();
    if n <= 1 {
        return n;
    }
    let l = g.matrix();
    // [diag φ, L](x, y) = (φ(x) - φ(y)) L(x, y)
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .filter(|&(x, y)| x != y && l[(x, y)] != 0.0)
        .collect();
    if pairs.is_empty() {
        return n;
    }
    let a = DMatrix::from_fn(pairs.len(), n, |r, k| {
        let (x, y) = pairs[r];
        if k == x {
            l[(x, y)]
        } else if k == y {
            -l[(x, y)]
        } else {
            0.0
        }
    });
    let sv = a.svd(false, false).singular_values;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let threshold = 1e-12 * smax * (pairs.len().max(n) as f64);
    let rank = sv.iter().filter(|&&s| s > threshold).count();
    n - rank
}

/// The only diagonal operators commuting with the semigroup are scalars.
pub fn commutant_is_trivial(g: &Generator) -> bool {
    commutant_dimension(g) <= 1
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

    fn partner() -> GraphForm {
        GraphForm::builder()
            .vertex("a", 1.0)
            .vertex("b", 4.0)
            .edge("a", "b", 2.0)
            .killing("b", 2.0)
            .build()
            .unwrap()
    }

    fn k2() -> GraphForm {
        generate(Family::Complete, 2, FamilyParams::default()).unwrap()
    }

    #[test]
    fn semigroup_at_zero_is_identity() {
        let g = partner().generator();
        assert_eq!(semigroup(&g, 0.0).unwrap(), DMatrix::identity(2, 2));
        assert!(matches!(semigroup(&g, -1.0), Err(Error::NegativeTime(_))));
    }

    #[test]
    fn k2_semigroup_closed_form() {
        let g = k2().generator();
        for t in [0.1, 1.0, 10.0] {
            let p = semigroup(&g, t).unwrap();
            let stay = (1.0 + (-2.0 * t).exp()) / 2.0;
            let go = (1.0 - (-2.0 * t).exp()) / 2.0;
            assert!((p[(0, 0)] - stay).abs() < 1e-12);
            assert!((p[(0, 1)] - go).abs() < 1e-12);
        }
        let p = semigroup(&g, 10.0).unwrap();
        assert!(p.iter().all(|v| (v - 0.5).abs() < 1e-8));
    }

    #[test]
    fn killing_makes_semigroup_strictly_submarkov() {
        let g = killed_pair().generator();
        let p = semigroup(&g, 1.0).unwrap();
        for x in 0..2 {
            let row: f64 = (0..2).map(|y| p[(x, y)]).sum();
            assert!(row < 1.0 - 1e-3, "row {x} sums to {row}");
        }
    }

    #[test]
    fn irreducibility_examples() {
        assert!(is_irreducible(&k2()));
        let isolated = GraphForm::builder()
            .vertex("a", 1.0)
            .vertex("b", 1.0)
            .build()
            .unwrap();
        assert!(!is_irreducible(&isolated));
        let mut b = GraphForm::builder();
        for i in 0..5 {
            b = b.vertex(format!("v{i}"), 1.0);
        }
        for i in 1..5 {
            b = b.edge(
                format!("v{}", i - 1),
                format!("v{i}"),
                if i == 3 { 0.0 } else { 1.0 },
            );
        }
        assert!(!is_irreducible(&b.build().unwrap()));
    }

    #[test]
    fn recurrence_examples() {
        assert!(is_recurrent(&k2()));
        assert!(!is_recurrent(&killed_pair()));
        assert!(!is_recurrent(&partner()));
    }

    #[test]
    fn excessive_examples() {
        let tol = Tol::default();
        let g = killed_pair().generator();
        assert!(is_excessive(&g, &[1.0, 2.0], tol).unwrap());
        assert!(!is_excessive(&g, &[2.0, 1.0], tol).unwrap());
        assert!(is_excessive(&g, &[3.0, 3.0], tol).unwrap());
        assert!(is_excessive(&k2().generator(), &[0.7, 0.7], tol).unwrap());
        assert!(matches!(
            is_excessive(&g, &[-1.0, 1.0], tol),
            Err(Error::NegativeInput { index: 0, .. })
        ));
    }

    #[test]
    fn nonconstant_excessive_examples() {
        let tol = Tol::default();
        assert_eq!(
            find_nonconstant_excessive(&k2().generator(), tol).unwrap(),
            None
        );
        let p3 = generate(Family::Path, 3, FamilyParams::default()).unwrap();
        assert_eq!(
            find_nonconstant_excessive(&p3.generator(), tol).unwrap(),
            None
        );

        let g = killed_pair().generator();
        let h = find_nonconstant_excessive(&g, tol)
            .unwrap()
            .expect("transient form");
        assert!(is_excessive(&g, &h, tol).unwrap());
        assert!((h[0] - 1.0).abs() < 1e-12);
        assert!(h[1] >= 1.0 + NONCONSTANT_GAP - 1e-12);

        let single = GraphForm::builder()
            .vertex("a", 1.0)
            .killing("a", 1.0)
            .build()
            .unwrap();
        assert_eq!(
            find_nonconstant_excessive(&single.generator(), tol).unwrap(),
            None
        );

        let split = GraphForm::builder()
            .vertex("a", 1.0)
            .vertex("b", 1.0)
            .build()
            .unwrap();
        assert_eq!(
            find_nonconstant_excessive(&split.generator(), tol),
            Err(Error::NotIrreducible)
        );
    }

    #[test]
    fn truncation_examples() {
        let tol = Tol::default();
        let q = killed_pair();
        let f = [3.0, 0.0];
        let high = check_truncation(&q, &f, &[5.0, 5.0], tol).unwrap();
        assert_eq!(high.min_energy, high.energy);
        assert_eq!(high.excess_energy, 0.0);
        assert!(high.pass);

        let p3 = generate(Family::Path, 3, FamilyParams::default()).unwrap();
        let f = [1.0, 0.5, 2.0];
        let zero = check_truncation(&p3, &f, &[0.0; 3], tol).unwrap();
        assert_eq!(zero.min_energy, 0.0);
        assert_eq!(zero.excess_energy, zero.energy);
        assert!(zero.pass);

        let mid = check_truncation(&q, &[3.0, 0.0], &[1.0, 2.0], tol).unwrap();
        assert!(mid.pass);
        assert!(mid.min_energy <= mid.energy);
        assert!(mid.excess_energy <= 4.0 * mid.energy);

        assert!(matches!(
            check_truncation(&q, &f[..2], &[2.0, 1.0], tol),
            Err(Error::NotExcessive(_))
        ));
    }

    #[test]
    fn commutant_examples() {
        assert!(commutant_is_trivial(&k2().generator()));
        let two_edges = GraphForm::builder()
            .vertex("a", 1.0)
            .vertex("b", 1.0)
            .vertex("c", 1.0)
            .vertex("d", 1.0)
            .edge("a", "b", 1.0)
            .edge("c", "d", 1.0)
            .build()
            .unwrap();
        assert!(!commutant_is_trivial(&two_edges.generator()));
        assert_eq!(commutant_dimension(&two_edges.generator()), 2);
    }

    #[test]
    fn spectral_cache_is_transparent() {
        let q = partner();
        let cached = q.generator();
        let first = cached.spectral().clone();
        let second = cached.spectral().clone();
        let fresh = q.generator().spectral().clone();
        assert_eq!(first, second);
        assert_eq!(first, fresh);
        let a = semigroup(&cached, 0.7).unwrap();
        let b = semigroup(&q.generator(), 0.7).unwrap();
        assert_eq!(a, b);
    }
}
