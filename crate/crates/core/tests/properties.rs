use dirikit::beurling::{decompose, truncated_form};
use dirikit::form::basis;
use dirikit::metrics::{canonical_intrinsic_metric, is_intrinsic, resistance_matrix};
use dirikit::orderiso::{certify, doob_pair, intertwining_residual};
use dirikit::random::{
    random_connected_form, random_doob_pair, random_doob_relabel_pair, random_permutation,
    random_relabel_pair, stream,
};
use dirikit::search::{find_intertwiners, SearchOptions};
use dirikit::spectral::{commutant_is_trivial, is_excessive, is_irreducible, semigroup};
use dirikit::{GraphForm, MeasureSpace, OrderIso, Tol};
use proptest::prelude::*;
use rand::Rng;

fn form(seed: u64, n: usize, killing: bool) -> GraphForm {
    random_connected_form(&mut stream(seed, 0), n, killing)
}

/// Random graph that may be disconnected: each pair present with prob 0.35.
fn loose_form(seed: u64, n: usize) -> GraphForm {
    let mut rng = stream(seed, 1);
    let ids = (0..n).map(|i| format!("v{i}")).collect();
    let m = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
    let space = MeasureSpace::new(ids, m).unwrap();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(0.35) {
                edges.push((i, j, rng.gen_range(0.5..2.0)));
            }
        }
    }
    GraphForm::from_indexed(space, edges, vec![0.0; n]).unwrap()
}

/// Irreducibility by exhaustion: no nontrivial `A` with
/// `Q(f, g) = Q(1_A f, 1_A g) + Q(1_{Aᶜ} f, 1_{Aᶜ} g)` on all basis pairs.
fn irreducible_by_subsets(q: &GraphForm) -> bool {
    let n = q.len();
    for mask in 1u32..(1 << n) - 1 {
        let inside = |x: usize| mask & (1 << x) != 0;
        let split = (0..n).all(|i| {
            (0..n).all(|j| {
                let (ei, ej) = (basis(n, i), basis(n, j));
                let cut = |f: &[f64], keep: bool| -> Vec<f64> {
                    f.iter()
                        .enumerate()
                        .map(|(x, v)| if inside(x) == keep { *v } else { 0.0 })
                        .collect()
                };
                let whole = q.evaluate(&ei, &ej).unwrap();
                let parts = q.evaluate(&cut(&ei, true), &cut(&ej, true)).unwrap()
                    + q.evaluate(&cut(&ei, false), &cut(&ej, false)).unwrap();
                (whole - parts).abs() <= 1e-12
            })
        });
        if split {
            return false;
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generator_matches_form_on_basis(seed in any::<u64>(), n in 1usize..9, killing in any::<bool>()) {
        let q = form(seed, n, killing);
        let g = q.generator();
        for i in 0..n {
            for j in 0..n {
                let lf = g.apply(&basis(n, i)).unwrap();
                let lhs = q.space().inner(&lf, &basis(n, j)).unwrap();
                let rhs = q.evaluate(&basis(n, i), &basis(n, j)).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
            }
        }
    }

    #[test]
    fn generator_is_m_symmetric(seed in any::<u64>(), n in 1usize..9) {
        let q = form(seed, n, true);
        let g = q.generator();
        let m = q.measure();
        for x in 0..n {
            for y in 0..n {
                let a = m[x] * g.matrix()[(x, y)];
                let b = m[y] * g.matrix()[(y, x)];
                prop_assert!((a - b).abs() <= 4.0 * f64::EPSILON * a.abs().max(b.abs()));
            }
        }
    }

    #[test]
    fn markov_contraction(seed in any::<u64>(), n in 1usize..9, killing in any::<bool>()) {
        let q = form(seed, n, killing);
        let mut rng = stream(seed, 2);
        for _ in 0..100 {
            let f: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..2.0)).collect();
            let clamped: Vec<f64> = f.iter().map(|v| v.clamp(0.0, 1.0)).collect();
            prop_assert!(q.energy(&clamped).unwrap() <= q.energy(&f).unwrap() + 1e-12);
        }
    }

    #[test]
    fn semigroup_is_sub_markov(seed in any::<u64>(), n in 1usize..9, killing in any::<bool>()) {
        let g = form(seed, n, killing).generator();
        for &t in &[0.01, 0.5, 3.0] {
            let tt = semigroup(&g, t).unwrap();
            prop_assert!(tt.iter().all(|&v| v >= -1e-12));
            for x in 0..n {
                prop_assert!(tt.row(x).sum() <= 1.0 + 1e-12);
            }
            let law = semigroup(&g, t).unwrap() * semigroup(&g, 0.7).unwrap();
            let direct = semigroup(&g, t + 0.7).unwrap();
            prop_assert!((law - direct).amax() <= 1e-12);
        }
    }

    #[test]
    fn commutant_and_connectivity_agree(seed in any::<u64>(), n in 1usize..9) {
        let q = loose_form(seed, n);
        prop_assert_eq!(commutant_is_trivial(&q.generator()), is_irreducible(&q));
        prop_assert_eq!(irreducible_by_subsets(&q), is_irreducible(&q));
    }

    #[test]
    fn adjoint_identity(seed in any::<u64>(), n in 1usize..8) {
        let mut rng = stream(seed, 3);
        let s1 = MeasureSpace::new(
            (0..n).map(|i| format!("a{i}")).collect(),
            (0..n).map(|_| rng.gen_range(0.1..3.0)).collect(),
        ).unwrap();
        let s2 = MeasureSpace::new(
            (0..n).map(|i| format!("b{i}")).collect(),
            (0..n).map(|_| rng.gen_range(0.1..3.0)).collect(),
        ).unwrap();
        let h = (0..n).map(|_| rng.gen_range(0.1..3.0)).collect();
        let u = OrderIso::new(s1.clone(), s2.clone(), random_permutation(&mut rng, n), h).unwrap();
        for i in 0..n {
            for j in 0..n {
                let lhs = s2.inner(&u.apply(&basis(n, i)).unwrap(), &basis(n, j)).unwrap();
                let rhs = s1.inner(&basis(n, i), &u.apply_adjoint(&basis(n, j)).unwrap()).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
            }
        }
    }

    #[test]
    fn decomposition_reconstructs(seed in any::<u64>(), n in 1usize..9, killing in any::<bool>()) {
        let q = form(seed, n, killing);
        let jk = decompose(&q);
        let mut rng = stream(seed, 4);
        for i in 0..n {
            let e = basis(n, i);
            prop_assert!((jk.energy(&e).unwrap() - q.energy(&e).unwrap()).abs() <= 1e-12);
        }
        for _ in 0..20 {
            let f: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let a = jk.energy(&f).unwrap();
            let b = q.energy(&f).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0));
        }
        prop_assert_eq!(decompose(&jk.to_form().unwrap()), jk);
    }

    #[test]
    fn truncated_form_identity(seed in any::<u64>(), n in 1usize..9, killing in any::<bool>()) {
        let q = form(seed, n, killing);
        let jk = decompose(&q);
        let mut rng = stream(seed, 5);
        let phi: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = truncated_form(&q, &phi, &f).unwrap();
        let b = jk.weighted_jump_energy(&phi, &f).unwrap();
        prop_assert!((a - b).abs() <= 1e-10);
    }

    #[test]
    fn resistance_is_a_metric(seed in any::<u64>(), n in 1usize..9) {
        let q = form(seed, n, false);
        let r = resistance_matrix(&q).unwrap();
        for x in 0..n {
            for y in 0..n {
                if x != y {
                    prop_assert!(r.get(x, y) > 0.0);
                }
                for z in 0..n {
                    prop_assert!(r.get(x, z) <= r.get(x, y) + r.get(y, z) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn canonical_metric_is_intrinsic(seed in any::<u64>(), n in 1usize..9, killing in any::<bool>()) {
        let q = form(seed, n, killing);
        let d = canonical_intrinsic_metric(&q).unwrap();
        let c = is_intrinsic(&q, &d, Tol::default()).unwrap();
        prop_assert!(c.intrinsic);
        for (s, m) in c.slack.iter().zip(q.measure()) {
            prop_assert!(*s >= -1e-12 * m);
        }
    }

    #[test]
    fn doob_pairs_certify_with_unit_beta(seed in any::<u64>(), n in 2usize..8) {
        let p = random_doob_pair(&mut stream(seed, 6), n);
        let c = certify(&p.iso, &p.q1, &p.q2, Tol::default()).unwrap();
        prop_assert!(c.report.verdict());
        prop_assert!((c.beta - 1.0).abs() <= 1e-12);
        let g2 = p.q2.generator();
        prop_assert!(is_excessive(&g2, p.iso.scaling(), Tol::default()).unwrap());
    }

    #[test]
    fn search_results_certify(seed in any::<u64>(), n in 2usize..7, killing in any::<bool>()) {
        let p = random_relabel_pair(&mut stream(seed, 7), n, killing);
        let found = find_intertwiners(&p.q1, &p.q2, &SearchOptions::default()).unwrap();
        prop_assert!(!found.is_empty());
        for u in &found {
            prop_assert!(certify(u, &p.q1, &p.q2, Tol::default()).unwrap().report.verdict());
        }
        let again = find_intertwiners(&p.q1, &p.q2, &SearchOptions { jobs: 3, ..Default::default() }).unwrap();
        prop_assert_eq!(found, again);
    }
}

#[test]
fn search_always_finds_the_witness() {
    let mut rng = stream(99, 0);
    let opts = SearchOptions::default();
    for i in 0..200 {
        let n = rng.gen_range(2..=7);
        let p = if i % 2 == 0 {
            random_relabel_pair(&mut rng, n, i % 4 == 0)
        } else {
            random_doob_relabel_pair(&mut rng, n)
        };
        let r = intertwining_residual(&p.iso, &p.q1.generator(), &p.q2.generator()).unwrap();
        assert!(r <= 1e-12, "pair {i}: witness residual {r}");
        let found = find_intertwiners(&p.q1, &p.q2, &opts).unwrap();
        assert!(
            found.iter().any(|u| u.tau() == p.iso.tau()),
            "pair {i}: witness τ = {:?} not among {:?}",
            p.iso.tau(),
            found.iter().map(|u| u.tau().to_vec()).collect::<Vec<_>>()
        );
    }
}

#[test]
fn doob_with_constant_scaling_rescales_measure() {
    let q = form(5, 5, true);
    let (q2, u) = doob_pair(&q, &[3.0; 5], Tol::default()).unwrap();
    for (a, b) in q2.measure().iter().zip(q.measure()) {
        assert!((a - 9.0 * b).abs() <= 1e-12 * a);
    }
    assert!(u.scaling().iter().all(|&h| (h - 1.0 / 3.0).abs() < 1e-15));
    assert!((q2.generator().matrix() - q.generator().matrix()).amax() <= 1e-12);
}

#[test]
fn search_is_deterministic() {
    let p = random_doob_relabel_pair(&mut stream(11, 0), 6);
    let opts = SearchOptions::default();
    let first = find_intertwiners(&p.q1, &p.q2, &opts).unwrap();
    for _ in 0..5 {
        assert_eq!(find_intertwiners(&p.q1, &p.q2, &opts).unwrap(), first);
    }
}
