//! Finite Blaschke products: evaluation, derivatives, boundary derivative
//! modulus, preimage solving, and generation-labelled preimage trees.
//!
//! A finite Blaschke product
//! `g(z) = e^{i theta} Π_j (z - a_j) / (1 - conj(a_j) z)`, all `|a_j| < 1`,
//! is a proper holomorphic self-map of the unit disk. With at least one
//! zero at the origin it fixes 0 and 0 is attracting.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::roots::{aberth_roots, poly_mul};

/// Slack allowed past the closed disk for evaluation (derivative stencils).
pub const DOMAIN_EPS: f64 = 1e-6;
/// A zero this close to the origin counts as a zero at the origin.
pub const ORIGIN_TOL: f64 = 1e-14;
/// Preimage points closer than this are identified in trees.
pub const DEDUP_RADIUS: f64 = 1e-10;
/// Hard cap on preimage tree size; growth is m^depth so fail loudly.
pub const NODE_CAP: usize = 1_000_000;
/// Residual required of every solved preimage.
pub const PREIMAGE_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeProduct {
    theta: f64,
    zeros: Vec<Complex64>,
}

impl BlaschkeProduct {
    /// `theta` is reduced mod 2 pi; every zero must lie strictly inside the
    /// unit disk and the degree must be at least 2.
    pub fn new(theta: f64, zeros: Vec<Complex64>) -> Result<Self> {
        if zeros.len() < 2 {
            return Err(Error::Precondition(format!(
                "degree must be >= 2, got {}",
                zeros.len()
            )));
        }
        for a in &zeros {
            if !a.re.is_finite() || !a.im.is_finite() || a.norm() >= 1.0 {
                return Err(Error::Precondition(format!(
                    "zero {a} is not strictly inside the unit disk"
                )));
            }
        }
        let theta = theta.rem_euclid(2.0 * std::f64::consts::PI);
        Ok(Self { theta, zeros })
    }

    /// The rotation `e^{i theta} z^m`.
    pub fn power_map(m: usize, theta: f64) -> Result<Self> {
        Self::new(theta, vec![Complex64::new(0.0, 0.0); m])
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    /// Number of zeros at the origin (m1).
    pub fn origin_zero_count(&self) -> usize {
        self.zeros.iter().filter(|a| a.norm() <= ORIGIN_TOL).count()
    }

    pub fn is_power_map(&self) -> bool {
        self.origin_zero_count() == self.degree()
    }

    pub fn rotation(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }

    fn check_domain(&self, z: Complex64) -> Result<()> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::Domain(format!("non-finite point {z}")));
        }
        if z.norm() > 1.0 + DOMAIN_EPS {
            return Err(Error::Domain(format!(
                "point {z} outside the closed disk (|z| = {})",
                z.norm()
            )));
        }
        for a in &self.zeros {
            if (Complex64::new(1.0, 0.0) - a.conj() * z).norm() < 1e-14 {
                return Err(Error::Domain(format!("pole proximity at z = {z}")));
            }
        }
        Ok(())
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.check_domain(z)?;
        let mut out = self.rotation();
        for a in &self.zeros {
            out *= (z - a) / (Complex64::new(1.0, 0.0) - a.conj() * z);
        }
        Ok(out)
    }

    /// k-fold forward iteration.
    pub fn iterate(&self, z: Complex64, k: usize) -> Result<Complex64> {
        let mut z = z;
        for _ in 0..k {
            z = self.eval(z)?;
        }
        Ok(z)
    }

    /// Analytic derivative by the product rule,
    /// `g' = e^{i theta} Σ_j f_j' Π_{k != j} f_k`,
    /// which stays valid when z coincides with a zero.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        self.check_domain(z)?;
        let one = Complex64::new(1.0, 0.0);
        let m = self.zeros.len();
        let mut factors = Vec::with_capacity(m);
        let mut dfactors = Vec::with_capacity(m);
        for a in &self.zeros {
            let den = one - a.conj() * z;
            factors.push((z - a) / den);
            dfactors.push((one - a * a.conj()) / (den * den));
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for j in 0..m {
            let mut term = dfactors[j];
            for k in 0..m {
                if k != j {
                    term *= factors[k];
                }
            }
            sum += term;
        }
        Ok(self.rotation() * sum)
    }

    /// `|g'(zeta)|` on the unit circle in closed form:
    /// `m1 + Σ_{a_l != 0} (1 - |a_l|^2) / |zeta - a_l|^2`.
    pub fn boundary_derivative_modulus(&self, zeta: Complex64) -> Result<f64> {
        if (zeta.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Precondition(format!(
                "zeta must lie on the unit circle, |zeta| = {}",
                zeta.norm()
            )));
        }
        let mut total = 0.0;
        for a in &self.zeros {
            if a.norm() <= ORIGIN_TOL {
                total += 1.0;
            } else {
                total += (1.0 - a.norm_sqr()) / (zeta - a).norm_sqr();
            }
        }
        Ok(total)
    }

    /// All m solutions of g(z) = w (with multiplicity) for |w| < 1.
    pub fn preimages(&self, w: Complex64) -> Result<PreimageSet> {
        if w.norm() >= 1.0 {
            return Err(Error::Precondition(format!(
                "target must be strictly inside the disk, |w| = {}",
                w.norm()
            )));
        }
        if w.norm() == 0.0 {
            // g vanishes exactly at its zero list.
            let residuals = vec![0.0; self.zeros.len()];
            return Ok(PreimageSet {
                target: w,
                roots: self.zeros.clone(),
                residuals,
                degree_deficit: 0,
            });
        }
        // e^{i theta} Π (z - a_j)  -  w Π (1 - conj(a_j) z)  =  0
        let one = Complex64::new(1.0, 0.0);
        let mut num = vec![self.rotation()];
        let mut den = vec![one];
        for a in &self.zeros {
            num = poly_mul(&num, &[-a, one]);
            den = poly_mul(&den, &[one, -a.conj()]);
        }
        let coeffs: Vec<Complex64> = num
            .iter()
            .zip(den.iter())
            .map(|(n, d)| n - w * d)
            .collect();
        let found = aberth_roots(&coeffs, Some(0.95))?;
        let mut roots = found.roots;
        roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let mut residuals = Vec::with_capacity(roots.len());
        let mut worst = 0.0_f64;
        for r in &roots {
            let res = (self.eval(*r)? - w).norm();
            worst = worst.max(res);
            residuals.push(res);
        }
        if worst > PREIMAGE_RESIDUAL_TOL {
            return Err(Error::NonConvergence { residual: worst });
        }
        Ok(PreimageSet {
            target: w,
            roots,
            residuals,
            degree_deficit: found.degree_deficit,
        })
    }

    /// Full preimage tree `∪_{k <= depth} g^{-k}(p_hat)`, generation
    /// labelled, deduplicated within [`DEDUP_RADIUS`] keeping the smallest
    /// generation, ordered deterministically.
    pub fn preimage_tree(&self, p_hat: Complex64, depth: usize) -> Result<PreimageTree> {
        if p_hat.norm() >= 1.0 {
            return Err(Error::Precondition(format!(
                "base point must be inside the disk, |p| = {}",
                p_hat.norm()
            )));
        }
        let mut tree = PreimageTree {
            base: p_hat,
            depth,
            nodes: vec![TreeNode {
                point: p_hat,
                generation: 0,
                parent: None,
            }],
        };
        let mut dedup = DedupGrid::new();
        dedup.insert(p_hat, 0);
        let mut frontier: Vec<usize> = vec![0];
        for gen in 1..=depth {
            let mut candidates: Vec<(Complex64, usize)> = Vec::new();
            for &idx in &frontier {
                let set = self.preimages(tree.nodes[idx].point)?;
                for r in set.roots {
                    candidates.push((r, idx));
                }
            }
            candidates.sort_by(|a, b| {
                a.0.re
                    .total_cmp(&b.0.re)
                    .then(a.0.im.total_cmp(&b.0.im))
                    .then(a.1.cmp(&b.1))
            });
            let mut next_frontier = Vec::new();
            for (point, parent) in candidates {
                if dedup.contains(point) {
                    continue;
                }
                if tree.nodes.len() >= NODE_CAP {
                    return Err(Error::Capacity {
                        what: "preimage tree nodes".into(),
                        reached: gen - 1,
                    });
                }
                dedup.insert(point, tree.nodes.len());
                tree.nodes.push(TreeNode {
                    point,
                    generation: gen,
                    parent: Some(parent),
                });
                next_frontier.push(tree.nodes.len() - 1);
            }
            frontier = next_frontier;
        }
        Ok(tree)
    }
}

/// All m^k points of `g^{-k}(p_hat)` for the power map
/// `g = e^{i theta} z^m`, by the explicit closed form: every preimage has
/// modulus `r^{1/m^k}` and the arguments are equispaced after unwinding
/// the accumulated rotation.
pub fn power_map_preimages(
    m: usize,
    theta: f64,
    p_hat: Complex64,
    k: usize,
) -> Result<Vec<Complex64>> {
    if m < 2 {
        return Err(Error::Precondition(format!("m must be >= 2, got {m}")));
    }
    let r = p_hat.norm();
    if r == 0.0 || r >= 1.0 {
        return Err(Error::Precondition(format!(
            "base point must satisfy 0 < |p| < 1, got |p| = {r}"
        )));
    }
    let k_stable = (40.0 / (m as f64).log2()).floor() as usize;
    if k > k_stable {
        return Err(Error::Capacity {
            what: format!("preimage generation (stability cap {k_stable})"),
            reached: k,
        });
    }
    let count = (m as u64).checked_pow(k as u32).filter(|&c| c <= NODE_CAP as u64);
    let count = match count {
        Some(c) => c as usize,
        None => {
            return Err(Error::Capacity {
                what: "power map preimage count".into(),
                reached: k,
            })
        }
    };
    let theta0 = p_hat.arg();
    let mk = (m as f64).powi(k as i32);
    // accumulated rotation of the k-fold iterate: (1 - m^k)/(1 - m) * theta
    let accum = (1.0 - mk) / (1.0 - m as f64) * theta;
    let s = r.powf(1.0 / mk);
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        let phi = (2.0 * std::f64::consts::PI * j as f64 + theta0 - accum) / mk;
        out.push(Complex64::from_polar(s, phi));
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct PreimageSet {
    pub target: Complex64,
    /// Roots with multiplicity, sorted by (re, im).
    pub roots: Vec<Complex64>,
    /// `|g(root) - target|` per root.
    pub residuals: Vec<f64>,
    /// Roots lost to leading-coefficient cancellation ("at infinity").
    pub degree_deficit: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeNode {
    pub point: Complex64,
    pub generation: usize,
    /// Index of the node this point maps to under one application of g.
    pub parent: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct PreimageTree {
    pub base: Complex64,
    pub depth: usize,
    pub nodes: Vec<TreeNode>,
}

impl PreimageTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn max_modulus(&self) -> f64 {
        self.nodes.iter().map(|n| n.point.norm()).fold(0.0, f64::max)
    }

    pub fn generation_points(&self, generation: usize) -> impl Iterator<Item = Complex64> + '_ {
        self.nodes
            .iter()
            .filter(move |n| n.generation == generation)
            .map(|n| n.point)
    }
}

/// Spatial hash over cells of size [`DEDUP_RADIUS`]; a candidate is a
/// duplicate if any stored point in the 3x3 neighborhood is closer than
/// the dedup radius.
struct DedupGrid {
    cells: std::collections::HashMap<(i64, i64), Vec<Complex64>>,
}

impl DedupGrid {
    fn new() -> Self {
        Self {
            cells: std::collections::HashMap::new(),
        }
    }

    fn key(p: Complex64) -> (i64, i64) {
        (
            (p.re / DEDUP_RADIUS).floor() as i64,
            (p.im / DEDUP_RADIUS).floor() as i64,
        )
    }

    fn contains(&self, p: Complex64) -> bool {
        let (kx, ky) = Self::key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(points) = self.cells.get(&(kx + dx, ky + dy)) {
                    if points.iter().any(|q| (p - q).norm() < DEDUP_RADIUS) {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn insert(&mut self, p: Complex64, _idx: usize) {
        self.cells.entry(Self::key(p)).or_default().push(p);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn z_squared() -> BlaschkeProduct {
        BlaschkeProduct::power_map(2, 0.0).unwrap()
    }

    fn half_product() -> BlaschkeProduct {
        BlaschkeProduct::new(0.0, vec![c(0.0, 0.0), c(0.5, 0.0)]).unwrap()
    }

    #[test]
    fn eval_monomial() {
        assert!((z_squared().eval(c(0.5, 0.0)).unwrap() - c(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn eval_at_a_zero_vanishes() {
        assert!(half_product().eval(c(0.5, 0.0)).unwrap().norm() < 1e-15);
    }

    #[test]
    fn eval_is_proper() {
        let g = half_product();
        let v = g.eval(c(0.8, 0.0)).unwrap();
        assert!(v.norm() < 1.0);
    }

    #[test]
    fn degree_below_two_rejected() {
        assert!(BlaschkeProduct::new(0.0, vec![c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn zero_outside_disk_rejected() {
        assert!(BlaschkeProduct::new(0.0, vec![c(0.0, 0.0), c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn derivative_of_square() {
        let d = z_squared().derivative(c(0.5, 0.0)).unwrap();
        assert!((d - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn derivative_modulus_on_circle_is_degree() {
        let g = BlaschkeProduct::power_map(3, 0.0).unwrap();
        let zeta = Complex64::from_polar(1.0, 1.234);
        assert!((g.derivative(zeta).unwrap().norm() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let g = half_product();
        for &z in &[c(0.3, 0.2), c(-0.7, 0.1), c(0.0, 0.0), c(0.5, 0.0)] {
            let h = 1e-6;
            let fd = (g.eval(z + c(h, 0.0)).unwrap() - g.eval(z - c(h, 0.0)).unwrap()) / (2.0 * h);
            let an = g.derivative(z).unwrap();
            let denom = an.norm().max(1.0);
            assert!((fd - an).norm() / denom < 1e-6, "at {z}");
        }
    }

    #[test]
    fn boundary_modulus_closed_form() {
        let g = half_product();
        assert!((g.boundary_derivative_modulus(c(1.0, 0.0)).unwrap() - 4.0).abs() < 1e-12);
        let at_minus_one = g.boundary_derivative_modulus(c(-1.0, 0.0)).unwrap();
        assert!((at_minus_one - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_modulus_matches_derivative() {
        let g = half_product();
        let zeta = Complex64::from_polar(1.0, 2.5);
        let closed = g.boundary_derivative_modulus(zeta).unwrap();
        let direct = g.derivative(zeta).unwrap().norm();
        assert!((closed - direct).abs() < 1e-9);
    }

    #[test]
    fn preimages_of_quarter() {
        let set = z_squared().preimages(c(0.25, 0.0)).unwrap();
        assert_eq!(set.roots.len(), 2);
        assert!((set.roots[0] - c(-0.5, 0.0)).norm() < 1e-11);
        assert!((set.roots[1] - c(0.5, 0.0)).norm() < 1e-11);
    }

    #[test]
    fn preimages_of_zero_are_the_zeros() {
        let set = z_squared().preimages(c(0.0, 0.0)).unwrap();
        assert_eq!(set.roots.len(), 2);
        assert!(set.roots.iter().all(|r| r.norm() < 1e-12));

        let set = half_product().preimages(c(0.0, 0.0)).unwrap();
        let mut mods: Vec<f64> = set.roots.iter().map(|r| r.norm()).collect();
        mods.sort_by(f64::total_cmp);
        assert!(mods[0] < 1e-12 && (mods[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn preimages_stay_inside_disk() {
        let g = half_product();
        for &w in &[c(0.9, 0.0), c(0.0, -0.8), c(0.3, 0.6)] {
            let set = g.preimages(w).unwrap();
            assert!(set.roots.iter().all(|r| r.norm() < 1.0));
        }
    }

    #[test]
    fn power_preimages_first_generation() {
        let pts = power_map_preimages(2, 0.0, c(0.5, 0.0), 1).unwrap();
        assert_eq!(pts.len(), 2);
        let root_half = 0.5_f64.sqrt();
        assert!((pts[0] - c(root_half, 0.0)).norm() < 1e-12);
        assert!((pts[1] + c(root_half, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn power_preimages_depth_zero_is_base() {
        let pts = power_map_preimages(2, 0.0, c(0.5, 0.0), 0).unwrap();
        assert_eq!(pts.len(), 1);
        assert!((pts[0] - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn power_preimages_second_generation() {
        let pts = power_map_preimages(2, 0.0, c(0.5, 0.0), 2).unwrap();
        assert_eq!(pts.len(), 4);
        let s = 0.5_f64.powf(0.25);
        for (j, p) in pts.iter().enumerate() {
            assert!((p.norm() - s).abs() < 1e-12);
            let expect = std::f64::consts::FRAC_PI_2 * j as f64;
            let diff = (p.arg().rem_euclid(2.0 * std::f64::consts::PI) - expect).abs();
            assert!(diff < 1e-12 || (diff - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        }
    }

    #[test]
    fn tree_counts_binary() {
        let tree = z_squared().preimage_tree(c(0.5, 0.0), 2).unwrap();
        assert_eq!(tree.len(), 7);
    }

    #[test]
    fn tree_dedups_fixed_point() {
        let tree = half_product().preimage_tree(c(0.0, 0.0), 1).unwrap();
        assert_eq!(tree.len(), 2);
        assert_eq!(tree.nodes[0].generation, 0);
        assert!(tree.nodes[0].point.norm() < 1e-15);
        assert!((tree.nodes[1].point - c(0.5, 0.0)).norm() < 1e-11);
    }

    #[test]
    fn deep_tree_count_and_modulus() {
        let tree = z_squared().preimage_tree(c(0.5, 0.0), 12).unwrap();
        assert_eq!(tree.len(), (1 << 13) - 1);
        let expect = 0.5_f64.powf(1.0 / 4096.0);
        assert!((tree.max_modulus() - expect).abs() < 1e-9);
    }

    #[test]
    fn tree_nodes_return_to_base() {
        let g = half_product();
        let tree = g.preimage_tree(c(0.1, 0.2), 4).unwrap();
        for node in &tree.nodes {
            let back = g.iterate(node.point, node.generation).unwrap();
            assert!(
                (back - tree.base).norm() <= 1e-7 * node.generation.max(1) as f64,
                "generation {} node {} returned to {back}",
                node.generation,
                node.point
            );
        }
    }

    #[test]
    fn node_cap_trips() {
        // depth 21 of the binary tree would need 2^22 - 1 > 1e6 nodes;
        // power_map_preimages hits its count cap first.
        let err = power_map_preimages(2, 0.0, c(0.5, 0.0), 21).unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
    }
}
