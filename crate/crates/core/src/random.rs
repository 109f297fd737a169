//! Seeded random forms and intertwined pairs.
//!
//! Every generator takes an explicit `ChaCha8Rng`; [`stream`] derives
//! independent generators from one seed so that unrelated consumers never
//! share a sequence.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::form::{GraphForm, MeasureSpace};
use crate::orderiso::{doob_pair, OrderIso};
use crate::tol::Tol;

/// Stream `k` of the generator seeded with `seed`.
pub fn stream(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng
}

/// Connected graph on `n` vertices: a random spanning tree plus each
/// remaining pair with probability 0.3. Conductances and measures are drawn
/// from `[0.5, 2]`; with `killing`, a nonempty random subset gets killing
/// in `[0.1, 1]`.
pub fn random_connected_form(rng: &mut ChaCha8Rng, n: usize, killing: bool) -> GraphForm {
    assert!(n >= 1, "need at least one vertex");
    let ids = (0..n).map(|i| format!("v{i}")).collect();
    let measure = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
    let space = MeasureSpace::new(ids, measure).expect("positive measure");
    let mut edges = Vec::new();
    let mut present = vec![false; n * n];
    for i in 1..n {
        let j = rng.gen_range(0..i);
        present[j * n + i] = true;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if present[i * n + j] || rng.gen_bool(0.3) {
                edges.push((i, j, rng.gen_range(0.5..2.0)));
            }
        }
    }
    let mut c = vec![0.0; n];
    if killing {
        let first = rng.gen_range(0..n);
        for (x, v) in c.iter_mut().enumerate() {
            if x == first || rng.gen_bool(0.3) {
                *v = rng.gen_range(0.1..1.0);
            }
        }
    }
    GraphForm::from_indexed(space, edges, c).expect("valid random form")
}

pub fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Two forms and an intertwiner from the first to the second.
#[derive(Debug, Clone, PartialEq)]
pub struct IntertwinedPair {
    pub q1: GraphForm,
    pub q2: GraphForm,
    pub iso: OrderIso,
}

/// The form on target vertices `w0, w1, …` with
/// `m₂ = k·m₁∘τ`, `b₂ = k·b₁∘(τ×τ)`, `c₂ = k·c₁∘τ`. Both forms share the
/// generator up to relabeling, and `U = k^{-1/2}·(f∘τ)` has `β = 1`.
pub fn relabel_pair(q1: &GraphForm, tau: &[usize], k: f64) -> Result<IntertwinedPair> {
    let n = q1.len();
    let ids = (0..n).map(|y| format!("w{y}")).collect();
    let m1 = q1.measure();
    let measure = tau.iter().map(|&x| k * m1[x]).collect();
    let target = MeasureSpace::new(ids, measure)?;
    let inv = {
        let mut inv = vec![0; n];
        for (y, &x) in tau.iter().enumerate() {
            inv[x] = y;
        }
        inv
    };
    let edges = q1
        .edges()
        .map(|(a, b, w)| (inv[a], inv[b], k * w))
        .map(|(y, z, w)| (y.min(z), y.max(z), w));
    let c = tau.iter().map(|&x| k * q1.killing()[x]).collect();
    let q2 = GraphForm::from_indexed(target.clone(), edges, c)?;
    let iso = OrderIso::new(
        q1.space().clone(),
        target,
        tau.to_vec(),
        vec![k.powf(-0.5); n],
    )?;
    Ok(IntertwinedPair {
        q1: q1.clone(),
        q2,
        iso,
    })
}

/// Random form, random permutation, random scale `k` in `[0.5, 2]`.
pub fn random_relabel_pair(rng: &mut ChaCha8Rng, n: usize, killing: bool) -> IntertwinedPair {
    let q1 = random_connected_form(rng, n, killing);
    let tau = random_permutation(rng, n);
    let k = rng.gen_range(0.5..2.0);
    relabel_pair(&q1, &tau, k).expect("relabeling preserves validity")
}

/// Random Doob pair with genuine killing. The excessive function takes
/// values in `[1, 3]` with both ends attained (so `max/min = 3`), and the
/// killing of the first form is chosen just large enough, plus a random
/// margin, to make it excessive.
pub fn random_doob_pair(rng: &mut ChaCha8Rng, n: usize) -> IntertwinedPair {
    assert!(
        n >= 2,
        "a Doob pair with nonconstant scaling needs two vertices"
    );
    let base = random_connected_form(rng, n, false);
    let mut h: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..3.0)).collect();
    let order = random_permutation(rng, n);
    h[order[0]] = 1.0;
    h[order[1]] = 3.0;

    let mut drift = vec![0.0; n];
    for (x, y, b) in base.edges() {
        drift[x] += b * (h[x] - h[y]);
        drift[y] += b * (h[y] - h[x]);
    }
    let c: Vec<f64> = (0..n)
        .map(|x| (-drift[x] / h[x]).max(0.0) + rng.gen_range(0.0..0.5))
        .collect();
    let edges: Vec<_> = base.edges().collect();
    let q1 = GraphForm::from_indexed(base.space().clone(), edges, c).expect("valid");
    let (q2, iso) = doob_pair(&q1, &h, Tol::default()).expect("h is excessive by construction");
    IntertwinedPair { q1, q2, iso }
}

/// A Doob pair followed by a random relabeling of the partner.
pub fn random_doob_relabel_pair(rng: &mut ChaCha8Rng, n: usize) -> IntertwinedPair {
    let doob = random_doob_pair(rng, n);
    let tau = random_permutation(rng, n);
    let k = rng.gen_range(0.5..2.0);
    let relabel = relabel_pair(&doob.q2, &tau, k).expect("valid");
    let iso = doob.iso.then(&relabel.iso).expect("spaces chain");
    IntertwinedPair {
        q1: doob.q1,
        q2: relabel.q2,
        iso,
    }
}
