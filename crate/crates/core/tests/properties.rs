//! Randomized invariants for the disk-model machinery.

use diskdyn_core::blaschke::{power_map_preimages, BlaschkeProduct};
use diskdyn_core::hyperbolic::{kobayashi_length, mobius_to_zero, poincare_distance, CurveSamples};
use diskdyn_core::polydyn::{preimage_tree_poly, Polynomial};
use diskdyn_core::shadowing::shadow_distance_in_tree;
use diskdyn_core::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_disk_point(rng: &mut ChaCha8Rng, max_radius: f64) -> Complex64 {
    let r = max_radius * rng.gen::<f64>().sqrt();
    let angle = rng.gen::<f64>() * std::f64::consts::TAU;
    Complex64::from_polar(r, angle)
}

fn random_boundary_point(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen::<f64>() * std::f64::consts::TAU)
}

/// Random product of degree 2..=max_degree with at least one zero at the
/// origin when `pin_origin`.
fn random_product(rng: &mut ChaCha8Rng, max_degree: usize, pin_origin: bool) -> BlaschkeProduct {
    let m = rng.gen_range(2..=max_degree);
    let mut zeros = Vec::with_capacity(m);
    if pin_origin {
        zeros.push(c(0.0, 0.0));
    }
    while zeros.len() < m {
        zeros.push(random_disk_point(rng, 0.9));
    }
    BlaschkeProduct::new(rng.gen::<f64>() * std::f64::consts::TAU, zeros).unwrap()
}

#[test]
fn properness_inside_and_on_boundary() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let g = random_product(&mut rng, 6, false);
        for _ in 0..10_000 {
            let z = random_disk_point(&mut rng, 0.999);
            assert!(g.eval(z).unwrap().norm() < 1.0);
        }
        for _ in 0..1_000 {
            let zeta = random_boundary_point(&mut rng);
            assert!((g.eval(zeta).unwrap().norm() - 1.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn boundary_derivative_closed_form_agrees() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let g = random_product(&mut rng, 6, false);
        for _ in 0..20 {
            let zeta = random_boundary_point(&mut rng);
            let closed = g.boundary_derivative_modulus(zeta).unwrap();
            let direct = g.derivative(zeta).unwrap().norm();
            assert!((closed - direct).abs() <= 1e-9, "closed {closed} direct {direct}");
        }
    }
}

#[test]
fn boundary_derivative_exceeds_origin_multiplicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..50 {
        let g = random_product(&mut rng, 6, true);
        let m1 = g.origin_zero_count() as f64;
        let strict = g.zeros().iter().any(|a| a.norm() > 1e-14);
        for _ in 0..200 {
            let zeta = random_boundary_point(&mut rng);
            let v = g.boundary_derivative_modulus(zeta).unwrap();
            assert!(v > 1.0);
            if strict {
                assert!(v > m1, "v = {v} not above m1 = {m1}");
            }
        }
    }
}

#[test]
fn power_map_formula_matches_solver_tree() {
    for m in [2usize, 3] {
        let theta = 0.7;
        let p_hat = Complex64::from_polar(0.5, 0.3);
        let g = BlaschkeProduct::power_map(m, theta).unwrap();
        for k in 0..=5usize {
            let formula = power_map_preimages(m, theta, p_hat, k).unwrap();
            let tree = g.preimage_tree(p_hat, k).unwrap();
            let tree_gen: Vec<Complex64> = tree.generation_points(k).collect();
            assert_eq!(formula.len(), tree_gen.len(), "m = {m}, k = {k}");
            let hausdorff = formula
                .iter()
                .map(|f| {
                    tree_gen
                        .iter()
                        .map(|t| (f - t).norm())
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max);
            assert!(hausdorff <= 1e-8, "m = {m}, k = {k}, hausdorff {hausdorff:e}");
        }
    }
}

#[test]
fn tree_round_trip_under_iteration() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..5 {
        let g = random_product(&mut rng, 4, true);
        let base = random_disk_point(&mut rng, 0.6);
        let tree = g.preimage_tree(base, 5).unwrap();
        for node in &tree.nodes {
            let back = g.iterate(node.point, node.generation).unwrap();
            assert!((back - base).norm() <= 1e-7 * node.generation.max(1) as f64);
        }
    }
}

#[test]
fn distance_symmetry_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..10_000 {
        let z = random_disk_point(&mut rng, 0.999);
        let w = random_disk_point(&mut rng, 0.999);
        let a = poincare_distance(z, w).unwrap();
        let b = poincare_distance(w, z).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn triangle_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..10_000 {
        let x = random_disk_point(&mut rng, 0.99);
        let y = random_disk_point(&mut rng, 0.99);
        let z = random_disk_point(&mut rng, 0.99);
        let xz = poincare_distance(x, z).unwrap();
        let xy = poincare_distance(x, y).unwrap();
        let yz = poincare_distance(y, z).unwrap();
        assert!(xz <= xy + yz + 1e-12);
    }
}

#[test]
fn automorphism_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..10_000 {
        let a = random_disk_point(&mut rng, 0.95);
        let z = random_disk_point(&mut rng, 0.99);
        let w = random_disk_point(&mut rng, 0.99);
        let before = poincare_distance(z, w).unwrap();
        let after = poincare_distance(mobius_to_zero(a, z), mobius_to_zero(a, w)).unwrap();
        // the conformal factor amplifies rounding near the boundary
        assert!((before - after).abs() <= 1e-9 * (1.0 + before));
    }
}

#[test]
fn blaschke_products_contract_distances() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for _ in 0..10 {
        let g = random_product(&mut rng, 6, false);
        for _ in 0..1_000 {
            let z = random_disk_point(&mut rng, 0.99);
            let w = random_disk_point(&mut rng, 0.99);
            let before = poincare_distance(z, w).unwrap();
            let after = poincare_distance(g.eval(z).unwrap(), g.eval(w).unwrap()).unwrap();
            assert!(after <= before + 1e-12);
        }
    }
}

#[test]
fn curve_length_dominates_distance() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..50 {
        // random polyline through a handful of waypoints, finely sampled
        let waypoints: Vec<Complex64> =
            (0..4).map(|_| random_disk_point(&mut rng, 0.8)).collect();
        let mut points = Vec::new();
        for pair in waypoints.windows(2) {
            let gap = (pair[1] - pair[0]).norm();
            let steps = (gap / 5e-4).ceil().max(1.0) as usize;
            for i in 0..steps {
                points.push(pair[0] + (pair[1] - pair[0]) * (i as f64 / steps as f64));
            }
        }
        points.push(*waypoints.last().unwrap());
        let curve = CurveSamples::new(points).unwrap();
        let len = kobayashi_length(&curve);
        let d = poincare_distance(curve.first(), curve.last()).unwrap();
        assert!(len >= d - 1e-6, "length {len} below distance {d}");
    }
}

#[test]
fn shadow_argmin_matches_naive_rescan() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let g = BlaschkeProduct::power_map(2, 0.0).unwrap();
    let tree = g.preimage_tree(c(0.5, 0.0), 8).unwrap();
    for _ in 0..200 {
        let z0 = random_disk_point(&mut rng, 0.99);
        let (q, generation, d) = shadow_distance_in_tree(&tree, z0).unwrap();
        // independent re-scan with naive selection
        let mut best: Option<(f64, usize, Complex64)> = None;
        for node in &tree.nodes {
            let dist = poincare_distance(z0, node.point).unwrap();
            let candidate = (dist, node.generation, node.point);
            let better = match best {
                None => true,
                Some((bd, bg, bq)) => {
                    dist < bd || (dist == bd && (node.generation, node.point.re, node.point.im) < (bg, bq.re, bq.im))
                }
            };
            if better {
                best = Some(candidate);
            }
        }
        let (bd, bg, bq) = best.unwrap();
        assert_eq!(d, bd);
        assert_eq!(generation, bg);
        assert_eq!(q, bq);
    }
}

#[test]
fn disk_model_matches_polynomial_side_for_square() {
    // f = z^2 on its immediate basin (the disk) is its own disk model, so
    // the two tree builders must produce identical shadow distances.
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let g = BlaschkeProduct::power_map(2, 0.0).unwrap();
    let f = Polynomial::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
    let base = c(0.5, 0.0);
    let disk_tree = g.preimage_tree(base, 6).unwrap();
    let poly_tree = preimage_tree_poly(&f, base, 6).unwrap();
    assert_eq!(disk_tree.len(), poly_tree.len());
    for _ in 0..200 {
        let z0 = random_disk_point(&mut rng, 0.98);
        let (_, _, d_disk) = shadow_distance_in_tree(&disk_tree, z0).unwrap();
        let (_, _, d_poly) = shadow_distance_in_tree(&poly_tree, z0).unwrap();
        assert!((d_disk - d_poly).abs() <= 1e-9);
    }
}

proptest! {
    #[test]
    fn mobius_preserves_the_disk(ar in -0.9f64..0.9, ai in -0.9f64..0.9,
                                 zr in -0.9f64..0.9, zi in -0.9f64..0.9) {
        let a = c(ar, ai);
        let z = c(zr, zi);
        prop_assume!(a.norm() < 0.95 && z.norm() < 0.95);
        let w = mobius_to_zero(a, z);
        prop_assert!(w.norm() < 1.0);
        // inverse transport brings it back
        let back = mobius_to_zero(-a, w);
        prop_assert!((back - z).norm() < 1e-12);
    }

    #[test]
    fn preimages_invert_eval(zr in -0.6f64..0.6, zi in -0.6f64..0.6) {
        let w = c(zr, zi);
        let g = BlaschkeProduct::new(0.3, vec![c(0.0, 0.0), c(0.5, 0.0), c(-0.2, 0.3)]).unwrap();
        let set = g.preimages(w).unwrap();
        prop_assert_eq!(set.roots.len(), 3);
        for q in &set.roots {
            prop_assert!(q.norm() < 1.0);
            prop_assert!((g.eval(*q).unwrap() - w).norm() <= 1e-10);
        }
    }
}
