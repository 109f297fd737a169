//! Finite measure spaces, weighted-graph Dirichlet forms and their generators.
//!
//! The form of a graph `(b, c, m)` is
//!
//! ```text
//! Q(f, g) = ½ Σ_{x,y} b(x,y) (f(x) - f(y)) (g(x) - g(y)) + Σ_x c(x) f(x) g(x)
//! ```
//!
//! and its generator on `L²(X, m)` is
//!
//! ```text
//! L(x, y) = -b(x,y) / m(x)              (x != y)
//! L(x, x) = (Σ_y b(x,y) + c(x)) / m(x)
//! ```
//!
//! so that `⟨Lf, g⟩_m = Q(f, g)`. Conductances, killing and measure are kept
//! apart; the generator is only materialized on request.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::spectral::SpectralData;
use crate::tol::{max_abs, Tol};

/// A finite vertex set with a strictly positive measure.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpace {
    vertices: Vec<String>,
    index: HashMap<String, usize>,
    measure: Vec<f64>,
}

impl MeasureSpace {
    pub fn new(vertices: Vec<String>, measure: Vec<f64>) -> Result<Self> {
        if vertices.len() != measure.len() {
            return Err(Error::DimensionMismatch {
                expected: vertices.len(),
                found: measure.len(),
            });
        }
        let mut index = HashMap::with_capacity(vertices.len());
        for (i, (v, &mv)) in vertices.iter().zip(&measure).enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(Error::DuplicateVertex(v.clone()));
            }
            if !mv.is_finite() {
                return Err(Error::NonFinite(format!("measure of `{v}`")));
            }
            if mv <= 0.0 {
                return Err(Error::NonPositiveMeasure {
                    vertex: v.clone(),
                    value: mv,
                });
            }
        }
        Ok(Self {
            vertices,
            index,
            measure,
        })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &str {
        &self.vertices[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub(crate) fn require(&self, id: &str) -> Result<usize> {
        self.index_of(id)
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn total_mass(&self) -> f64 {
        self.measure.iter().sum()
    }

    /// Same vertices, measure multiplied pointwise by `weights`.
    pub fn reweighted(&self, weights: &[f64]) -> Result<Self> {
        self.check_len(weights)?;
        let measure = self
            .measure
            .iter()
            .zip(weights)
            .map(|(m, w)| m * w)
            .collect();
        Self::new(self.vertices.clone(), measure)
    }

    pub fn check_len<T>(&self, f: &[T]) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: f.len(),
            });
        }
        Ok(())
    }

    /// `⟨f, g⟩_m = Σ m(x) f(x) g(x)`.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> Result<f64> {
        self.check_len(f)?;
        self.check_len(g)?;
        Ok(self
            .measure
            .iter()
            .zip(f.iter().zip(g))
            .map(|(m, (a, b))| m * a * b)
            .sum())
    }

    pub fn norm_sq(&self, f: &[f64]) -> Result<f64> {
        self.inner(f, f)
    }
}

/// A regular Dirichlet form on a finite weighted graph.
///
/// Edges live on unordered pairs `(i, j)` with `i < j`, so `b` is symmetric by
/// construction and self-loops are unrepresentable.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphForm {
    space: MeasureSpace,
    edges: BTreeMap<(usize, usize), f64>,
    killing: Vec<f64>,
}

/// Label-based construction of a [`GraphForm`]; all validation happens in
/// [`FormBuilder::build`].
#[derive(Debug, Clone, Default)]
pub struct FormBuilder {
    vertices: Vec<(String, f64)>,
    edges: Vec<(String, String, f64)>,
    killing: Vec<(String, f64)>,
}

impl FormBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(mut self, id: impl Into<String>, measure: f64) -> Self {
        self.vertices.push((id.into(), measure));
        self
    }

    pub fn edge(mut self, u: impl Into<String>, v: impl Into<String>, b: f64) -> Self {
        self.edges.push((u.into(), v.into(), b));
        self
    }

    pub fn killing(mut self, id: impl Into<String>, c: f64) -> Self {
        self.killing.push((id.into(), c));
        self
    }

    pub fn build(self) -> Result<GraphForm> {
        let (ids, measure): (Vec<_>, Vec<_>) = self.vertices.into_iter().unzip();
        let space = MeasureSpace::new(ids, measure)?;

        let mut edges = Vec::with_capacity(self.edges.len());
        for (u, v, b) in &self.edges {
            let i = space.require(u)?;
            let j = space.require(v)?;
            edges.push((i, j, *b));
        }

        let mut killing = vec![0.0; space.len()];
        let mut seen = vec![false; space.len()];
        for (v, c) in &self.killing {
            let i = space.require(v)?;
            if seen[i] {
                return Err(Error::DuplicateVertex(format!("{v} (killing)")));
            }
            seen[i] = true;
            killing[i] = *c;
        }

        GraphForm::from_indexed(space, edges, killing)
    }
}

impl GraphForm {
    pub fn builder() -> FormBuilder {
        FormBuilder::new()
    }

    /// Builds a form from index-based edge triples. Rejects self-loops,
    /// duplicate edges, and negative or non-finite weights.
    pub fn from_indexed(
        space: MeasureSpace,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
        killing: Vec<f64>,
    ) -> Result<Self> {
        let n = space.len();
        space.check_len(&killing)?;
        let mut map = BTreeMap::new();
        for (i, j, b) in edges {
            for k in [i, j] {
                if k >= n {
                    return Err(Error::UnknownVertex(format!("#{k}")));
                }
            }
            if i == j {
                return Err(Error::SelfLoop(space.vertex(i).to_string()));
            }
            let what = || format!("edge `{}` -- `{}`", space.vertex(i), space.vertex(j));
            if !b.is_finite() {
                return Err(Error::NonFinite(what()));
            }
            if b < 0.0 {
                return Err(Error::NegativeWeight {
                    what: what(),
                    value: b,
                });
            }
            let key = (i.min(j), i.max(j));
            if map.insert(key, b).is_some() {
                return Err(Error::DuplicateEdge(
                    space.vertex(key.0).to_string(),
                    space.vertex(key.1).to_string(),
                ));
            }
        }
        for (i, &c) in killing.iter().enumerate() {
            let what = || format!("killing of `{}`", space.vertex(i));
            if !c.is_finite() {
                return Err(Error::NonFinite(what()));
            }
            if c < 0.0 {
                return Err(Error::NegativeWeight {
                    what: what(),
                    value: c,
                });
            }
        }
        Ok(Self {
            space,
            edges: map,
            killing,
        })
    }

    pub fn space(&self) -> &MeasureSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn measure(&self) -> &[f64] {
        self.space.measure()
    }

    pub fn killing(&self) -> &[f64] {
        &self.killing
    }

    /// Stored edges `(i, j, b)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.edges.iter().map(|(&(i, j), &b)| (i, j, b))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn conductance(&self, i: usize, j: usize) -> f64 {
        self.edges
            .get(&(i.min(j), i.max(j)))
            .copied()
            .unwrap_or(0.0)
    }

    /// Weighted degree `Σ_y b(x, y)`.
    pub fn degrees(&self) -> Vec<f64> {
        let mut deg = vec![0.0; self.len()];
        for (i, j, b) in self.edges() {
            deg[i] += b;
            deg[j] += b;
        }
        deg
    }

    /// Symmetric matrix of conductances with zero diagonal.
    pub fn conductance_matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut b = DMatrix::zeros(n, n);
        for (i, j, w) in self.edges() {
            b[(i, j)] = w;
            b[(j, i)] = w;
        }
        b
    }

    /// Measure-free matrix of `E(f) = ½ Σ b (f(x) - f(y))²`, i.e. the
    /// combinatorial Laplacian of `b` (killing excluded).
    pub fn energy_matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut e = DMatrix::zeros(n, n);
        for (i, j, w) in self.edges() {
            e[(i, j)] -= w;
            e[(j, i)] -= w;
            e[(i, i)] += w;
            e[(j, j)] += w;
        }
        e
    }

    /// Connected components of the graph of strictly positive conductances,
    /// as a component label per vertex (labels in order of first vertex).
    pub fn components(&self) -> Vec<usize> {
        let n = self.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (i, j, b) in self.edges() {
            if b > 0.0 {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
        let mut labels = vec![usize::MAX; n];
        let mut next = 0;
        for x in 0..n {
            let r = find(&mut parent, x);
            if labels[r] == usize::MAX {
                labels[r] = next;
                next += 1;
            }
            labels[x] = labels[r];
        }
        labels
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }

    /// `Q(f, g)`.
    pub fn evaluate(&self, f: &[f64], g: &[f64]) -> Result<f64> {
        self.space.check_len(f)?;
        self.space.check_len(g)?;
        let jump: f64 = self
            .edges()
            .map(|(i, j, b)| b * (f[i] - f[j]) * (g[i] - g[j]))
            .sum();
        let killing: f64 = self
            .killing
            .iter()
            .zip(f.iter().zip(g))
            .map(|(c, (a, b))| c * a * b)
            .sum();
        Ok(jump + killing)
    }

    /// `Q(f) = Q(f, f)`.
    pub fn energy(&self, f: &[f64]) -> Result<f64> {
        self.evaluate(f, f)
    }

    /// `‖f‖_Q = (Q(f) + ‖f‖²_m)^{1/2}`.
    pub fn form_norm(&self, f: &[f64]) -> Result<f64> {
        Ok((self.energy(f)? + self.space.norm_sq(f)?).sqrt())
    }

    pub fn generator(&self) -> Generator {
        let n = self.len();
        let m = self.measure();
        let mut l = DMatrix::zeros(n, n);
        for (i, j, b) in self.edges() {
            l[(i, j)] = -b / m[i];
            l[(j, i)] = -b / m[j];
        }
        let deg = self.degrees();
        for x in 0..n {
            l[(x, x)] = (deg[x] + self.killing[x]) / m[x];
        }
        Generator::from_parts(l, self.space.clone())
    }

    /// Same graph on the same vertex set, new measure.
    pub fn with_measure(&self, measure: Vec<f64>) -> Result<Self> {
        let space = MeasureSpace::new(self.space.vertices.clone(), measure)?;
        Ok(Self {
            space,
            edges: self.edges.clone(),
            killing: self.killing.clone(),
        })
    }
}

/// Self-adjoint generator `L` of a finite Dirichlet form, as a dense matrix
/// acting on functions in the vertex order of its space.
#[derive(Debug, Clone)]
pub struct Generator {
    matrix: DMatrix<f64>,
    space: MeasureSpace,
    spectral: OnceLock<SpectralData>,
}

impl Generator {
    /// Wraps a matrix without checking the Markov structure; see
    /// [`Generator::to_form`] for the checked direction.
    pub fn from_parts(matrix: DMatrix<f64>, space: MeasureSpace) -> Self {
        assert_eq!(matrix.nrows(), space.len());
        assert_eq!(matrix.ncols(), space.len());
        Self {
            matrix,
            space,
            spectral: OnceLock::new(),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn space(&self) -> &MeasureSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.space.check_len(f)?;
        let n = self.len();
        Ok((0..n)
            .map(|x| (0..n).map(|y| self.matrix[(x, y)] * f[y]).sum())
            .collect())
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(self.matrix.iter().copied())
    }

    pub(crate) fn spectral_cell(&self) -> &OnceLock<SpectralData> {
        &self.spectral
    }

    /// Reads a generator back as a graph form on its own measure:
    /// `b(x,y) = -m(x) L(x,y)` and `c(x) = m(x) Σ_y L(x,y)`.
    ///
    /// Values in `[-tol, 0)` are clamped to zero; anything more negative, or
    /// an `m`-asymmetric off-diagonal pair, is `NotMarkovian`.
    pub fn to_form(&self, tol: Tol) -> Result<GraphForm> {
        let n = self.len();
        let m = self.space.measure();
        let scale = (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .map(|(x, y)| (m[x] * self.matrix[(x, y)]).abs())
            .fold(0.0, f64::max);
        let bound = tol.bound(scale);
        let mut edges = Vec::new();
        for x in 0..n {
            for y in (x + 1)..n {
                let bxy = -m[x] * self.matrix[(x, y)];
                let byx = -m[y] * self.matrix[(y, x)];
                if (bxy - byx).abs() > bound {
                    return Err(Error::NotMarkovian(format!(
                        "not symmetric in L²(m) at ({}, {}): {bxy} vs {byx}",
                        self.space.vertex(x),
                        self.space.vertex(y)
                    )));
                }
                let b = 0.5 * (bxy + byx);
                if b < -bound {
                    return Err(Error::NotMarkovian(format!(
                        "negative conductance {b} at ({}, {})",
                        self.space.vertex(x),
                        self.space.vertex(y)
                    )));
                }
                if b > 0.0 {
                    edges.push((x, y, b));
                }
            }
        }
        let mut killing = Vec::with_capacity(n);
        for (x, &mx) in m.iter().enumerate() {
            let c = mx * self.matrix.row(x).sum();
            if c < -bound {
                return Err(Error::NotMarkovian(format!(
                    "negative killing {c} at `{}`",
                    self.space.vertex(x)
                )));
            }
            killing.push(c.max(0.0));
        }
        GraphForm::from_indexed(self.space.clone(), edges, killing)
    }
}

/// Standard basis vector `e_i` of length `n`.
pub fn basis(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}
