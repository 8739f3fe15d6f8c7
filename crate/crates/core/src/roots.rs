//! Simultaneous root finding for complex polynomials (Aberth–Ehrlich).
//!
//! All roots are iterated together from initial guesses on a circle, which
//! avoids the error accumulation of deflation-based solvers. Root clusters
//! (multiple roots) are averaged after convergence so that multiplicities
//! come out at full accuracy.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 200;
pub const STEP_TOL: f64 = 1e-13;
/// Relative residual at which a root is accepted even if steps stall
/// (multiple roots stall near the sqrt of machine epsilon).
pub const RESIDUAL_TOL: f64 = 1e-14;
/// Roots closer than this are treated as one cluster and averaged.
const CLUSTER_RADIUS: f64 = 1e-6;

/// Coefficients are ascending: `c[0] + c[1] z + ... + c[n] z^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCoeffs(pub Vec<Complex64>);

impl PolyCoeffs {
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    /// Horner evaluation of p and p' at z.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.0.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_with_derivative(z).0
    }

    /// Largest coefficient magnitude, used to scale residual tolerances.
    pub fn scale(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Cauchy bound: every root has modulus below `1 + max |c_j / c_n|`.
    pub fn cauchy_root_bound(&self) -> f64 {
        let lead = self.0.last().map(|c| c.norm()).unwrap_or(0.0);
        if lead == 0.0 {
            return 1.0;
        }
        let max_ratio = self.0[..self.0.len() - 1]
            .iter()
            .map(|c| c.norm() / lead)
            .fold(0.0, f64::max);
        1.0 + max_ratio
    }
}

/// Product of two coefficient vectors.
pub fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Monic product `Π (z - r_j)` as ascending coefficients.
pub fn poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        coeffs = poly_mul(&coeffs, &[-r, Complex64::new(1.0, 0.0)]);
    }
    coeffs
}

#[derive(Debug, Clone)]
pub struct RootFind {
    pub roots: Vec<Complex64>,
    /// Number of leading coefficients stripped as numerically zero; the
    /// corresponding roots are "at infinity" and not returned.
    pub degree_deficit: usize,
}

/// Threshold below which a leading coefficient counts as cancelled.
pub const LEADING_CANCEL_TOL: f64 = 1e-14;

/// All roots of `coeffs` (ascending), counted with multiplicity.
///
/// `initial_radius`: the starting circle for the simultaneous iteration;
/// pass `None` to derive it from the Cauchy bound.
pub fn aberth_roots(coeffs: &[Complex64], initial_radius: Option<f64>) -> Result<RootFind> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::Domain("zero polynomial has no root set".into()));
    }

    // Strip cancelled leading coefficients, tracking the deficit.
    let mut hi = coeffs.len();
    while hi > 1 && coeffs[hi - 1].norm() < LEADING_CANCEL_TOL * scale {
        hi -= 1;
    }
    let degree_deficit = coeffs.len() - hi;
    let coeffs = &coeffs[..hi];
    let n = coeffs.len() - 1;
    if n == 0 {
        return Ok(RootFind {
            roots: vec![],
            degree_deficit,
        });
    }

    let poly = PolyCoeffs(coeffs.to_vec());
    let radius = initial_radius.unwrap_or_else(|| 0.5 + 0.5 * poly.cauchy_root_bound());
    // Asymmetric phase offset so guesses never sit on a symmetry axis.
    let mut z: Vec<Complex64> = (0..n)
        .map(|i| {
            let angle = 0.4 + 2.0 * std::f64::consts::PI * (i as f64) / (n as f64);
            Complex64::from_polar(radius, angle)
        })
        .collect();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut max_step = 0.0_f64;
        let mut worst_residual = 0.0_f64;
        for i in 0..n {
            let (p, dp) = poly.eval_with_derivative(z[i]);
            worst_residual = worst_residual.max(p.norm());
            if p.norm() == 0.0 {
                continue;
            }
            let newton = if dp.norm() == 0.0 {
                // perturb off a critical point
                Complex64::new(STEP_TOL, STEP_TOL)
            } else {
                p / dp
            };
            let mut repel = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() > 0.0 {
                        repel += Complex64::new(1.0, 0.0) / d;
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * repel;
            let step = if denom.norm() < 1e-300 { newton } else { newton / denom };
            z[i] -= step;
            max_step = max_step.max(step.norm());
        }
        let grown = z.iter().map(|zi| zi.norm().powi(n as i32)).fold(1.0, f64::max);
        if max_step < STEP_TOL || worst_residual <= RESIDUAL_TOL * scale * grown {
            converged = true;
            break;
        }
    }
    if !converged {
        // Multiple roots stall with tiny residuals; accept those.
        let residual_cap = 1e-10 * scale.max(1.0);
        let worst = z
            .iter()
            .map(|&zi| poly.eval(zi).norm())
            .fold(0.0, f64::max);
        if worst > residual_cap {
            return Err(Error::NonConvergence { residual: worst });
        }
    }

    average_clusters(&mut z, coeffs);
    Ok(RootFind {
        roots: z,
        degree_deficit,
    })
}

/// Ascending-coefficient derivative.
fn poly_derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| c * i as f64)
        .collect()
}

/// A mu-fold root of p is a simple root of the (mu-1)th derivative, where
/// Newton recovers full accuracy; plain averaging is limited to about the
/// square root of machine epsilon.
fn refine_multiple_root(coeffs: &[Complex64], start: Complex64, multiplicity: usize) -> Complex64 {
    let mut d = coeffs.to_vec();
    for _ in 1..multiplicity {
        d = poly_derivative(&d);
    }
    let poly = PolyCoeffs(d);
    let mut z = start;
    for _ in 0..30 {
        let (p, dp) = poly.eval_with_derivative(z);
        if p.norm() == 0.0 || dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        z -= step;
        if step.norm() < 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

/// Replace every cluster of nearby roots by its centroid. First-order
/// errors of a multiplicity-k cluster cancel in the mean, so the centroid
/// is far more accurate than any member.
fn average_clusters(roots: &mut [Complex64], coeffs: &[Complex64]) {
    let n = roots.len();
    let mut assigned = vec![usize::MAX; n];
    let mut next_cluster = 0;
    for i in 0..n {
        if assigned[i] != usize::MAX {
            continue;
        }
        assigned[i] = next_cluster;
        // Grow the cluster transitively.
        let mut changed = true;
        while changed {
            changed = false;
            for j in 0..n {
                if assigned[j] != usize::MAX {
                    continue;
                }
                let near = (0..n).any(|k| {
                    assigned[k] == next_cluster && (roots[j] - roots[k]).norm() < CLUSTER_RADIUS
                });
                if near {
                    assigned[j] = next_cluster;
                    changed = true;
                }
            }
        }
        next_cluster += 1;
    }
    for c in 0..next_cluster {
        let members: Vec<usize> = (0..n).filter(|&i| assigned[i] == c).collect();
        if members.len() < 2 {
            continue;
        }
        let sum: Complex64 = members.iter().map(|&i| roots[i]).sum();
        let centroid = sum / members.len() as f64;
        let poly = PolyCoeffs(coeffs.to_vec());
        let refined = refine_multiple_root(coeffs, centroid, members.len());
        // Keep the refinement only if it is a root at least as good as the
        // cluster members; distinct-but-close roots must not be collapsed
        // onto a critical point.
        let worst_member = members
            .iter()
            .map(|&i| poly.eval(roots[i]).norm())
            .fold(0.0, f64::max);
        let chosen = if (refined - centroid).norm() < CLUSTER_RADIUS
            && poly.eval(refined).norm() <= worst_member.max(1e-300)
        {
            refined
        } else {
            centroid
        };
        for &i in &members {
            roots[i] = chosen;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn quadratic_roots() {
        // z^2 - 0.25: roots +-0.5
        let r = aberth_roots(&[c(-0.25, 0.0), c(0.0, 0.0), c(1.0, 0.0)], None).unwrap();
        let mut mods: Vec<f64> = r.roots.iter().map(|z| z.re).collect();
        mods.sort_by(f64::total_cmp);
        assert!((mods[0] + 0.5).abs() < 1e-12);
        assert!((mods[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn double_root_averages_to_center() {
        // (z - 0.5)^2 = z^2 - z + 0.25
        let r = aberth_roots(&[c(0.25, 0.0), c(-1.0, 0.0), c(1.0, 0.0)], None).unwrap();
        assert_eq!(r.roots.len(), 2);
        for z in &r.roots {
            assert!((z - c(0.5, 0.0)).norm() < 1e-12, "got {z}");
        }
    }

    #[test]
    fn leading_cancellation_is_flagged() {
        // degree drops by one: 1e-20 z^2 + z - 1
        let r = aberth_roots(&[c(-1.0, 0.0), c(1.0, 0.0), c(1e-20, 0.0)], None).unwrap();
        assert_eq!(r.degree_deficit, 1);
        assert_eq!(r.roots.len(), 1);
        assert!((r.roots[0] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn degree_six_random_reconstructs() {
        let true_roots = [
            c(0.3, 0.1),
            c(-0.2, 0.7),
            c(0.9, -0.4),
            c(-1.5, 0.0),
            c(0.0, -1.1),
            c(2.0, 2.0),
        ];
        let coeffs = poly_from_roots(&true_roots);
        let found = aberth_roots(&coeffs, None).unwrap();
        for t in &true_roots {
            let nearest = found
                .roots
                .iter()
                .map(|z| (z - t).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-9, "root {t} missed by {nearest:e}");
        }
    }
}
