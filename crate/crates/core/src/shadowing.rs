//! Quantitative shadowing checks: nearest-preimage distances over
//! boundary-approaching sample grids, the explicit power-map constants,
//! expanding annuli, and boundary density profiles of preimage trees.

use num_complex::Complex64;

use crate::blaschke::{BlaschkeProduct, PreimageTree};
use crate::error::{Error, Result};
use crate::hyperbolic::{mobius_to_zero, poincare_distance};

/// Sample lattice `r_i e^{2 pi i j / N}` with dyadic shells
/// `r_i = 1 - 2^{-i}`; shells are hyperbolically equispaced, so the grid
/// probes the boundary approach geometrically.
#[derive(Debug, Clone)]
pub struct SampleGrid {
    radii: Vec<f64>,
    angles_per_circle: usize,
}

impl SampleGrid {
    pub fn dyadic(i_max: usize, angles_per_circle: usize) -> Result<Self> {
        if i_max < 1 {
            return Err(Error::Precondition("grid needs i_max >= 1".into()));
        }
        if angles_per_circle < 8 {
            return Err(Error::Precondition(format!(
                "grid needs at least 8 angles per circle, got {angles_per_circle}"
            )));
        }
        let radii = (1..=i_max).map(|i| 1.0 - 0.5_f64.powi(i as i32)).collect();
        Ok(Self {
            radii,
            angles_per_circle,
        })
    }

    pub fn max_radius(&self) -> f64 {
        self.radii.iter().copied().fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.radii.len() * self.angles_per_circle
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Deterministic order: shells inside out, angles counterclockwise.
    pub fn points(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.len());
        for &r in &self.radii {
            for j in 0..self.angles_per_circle {
                let angle =
                    2.0 * std::f64::consts::PI * (j as f64) / (self.angles_per_circle as f64);
                out.push(Complex64::from_polar(r, angle));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ShadowRecord {
    pub z0: Complex64,
    pub best_q: Complex64,
    pub generation: usize,
    pub distance: f64,
    /// The sample sat numerically on the boundary for every candidate.
    pub overflow: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct C0Constants {
    pub sigma: f64,
    pub c_prime: f64,
    pub c_doubleprime: f64,
    pub c0: f64,
}

#[derive(Debug, Clone)]
pub struct ShadowReport {
    pub records: Vec<ShadowRecord>,
    pub empirical_sup: f64,
    pub theoretical: Option<C0Constants>,
    pub depth: usize,
    /// Tree does not reach past the outermost grid shell.
    pub shallow_tree_warning: bool,
}

/// Nearest tree point to z0 in Poincare distance; ties break to the
/// smallest generation, then lexicographic (re, im).
pub fn shadow_distance_in_tree(
    tree: &PreimageTree,
    z0: Complex64,
) -> Result<(Complex64, usize, f64)> {
    let mut best: Option<(f64, usize, Complex64)> = None;
    let mut last_err = None;
    for node in &tree.nodes {
        match poincare_distance(z0, node.point) {
            Ok(d) => {
                let better = match &best {
                    None => true,
                    Some((bd, bg, bq)) => {
                        d < *bd
                            || (d == *bd
                                && (node.generation, node.point.re, node.point.im)
                                    < (*bg, bq.re, bq.im))
                    }
                };
                if better {
                    best = Some((d, node.generation, node.point));
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    match best {
        Some((d, generation, q)) => Ok((q, generation, d)),
        None => Err(last_err.unwrap_or(Error::Domain("empty preimage tree".into()))),
    }
}

pub fn shadow_distance(
    g: &BlaschkeProduct,
    p_hat: Complex64,
    depth: usize,
    z0: Complex64,
) -> Result<(Complex64, usize, f64)> {
    let tree = g.preimage_tree(p_hat, depth)?;
    shadow_distance_in_tree(&tree, z0)
}

/// Shadowing report over explicit sample points.
pub fn empirical_constant_over_points(
    g: &BlaschkeProduct,
    p_hat: Complex64,
    depth: usize,
    samples: &[Complex64],
) -> Result<ShadowReport> {
    let tree = g.preimage_tree(p_hat, depth)?;
    let max_sample = samples.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let shallow_tree_warning = tree.max_modulus() < max_sample;
    let mut records = Vec::with_capacity(samples.len());
    let mut sup = 0.0_f64;
    for &z0 in samples {
        match shadow_distance_in_tree(&tree, z0) {
            Ok((q, generation, d)) => {
                sup = sup.max(d);
                records.push(ShadowRecord {
                    z0,
                    best_q: q,
                    generation,
                    distance: d,
                    overflow: false,
                });
            }
            Err(Error::Overflow { .. }) => records.push(ShadowRecord {
                z0,
                best_q: Complex64::new(f64::NAN, f64::NAN),
                generation: 0,
                distance: f64::NAN,
                overflow: true,
            }),
            Err(e) => return Err(e),
        }
    }
    let theoretical = if g.is_power_map() && p_hat.norm() > 0.0 {
        Some(theoretical_c0_power(g.degree(), p_hat)?)
    } else {
        None
    };
    Ok(ShadowReport {
        records,
        empirical_sup: sup,
        theoretical,
        depth,
        shallow_tree_warning,
    })
}

pub fn empirical_constant(
    g: &BlaschkeProduct,
    p_hat: Complex64,
    depth: usize,
    grid: &SampleGrid,
) -> Result<ShadowReport> {
    empirical_constant_over_points(g, p_hat, depth, &grid.points())
}

/// Number of circle samples used for the sigma supremum. The integrand is
/// smooth with bounded derivative, so this puts the sampling error well
/// below 1e-6 for |p| <= 0.9.
const SIGMA_SAMPLES: usize = 100_000;

/// Explicit constants for `g = e^{i theta} z^m` with base point p_hat:
/// sigma is the largest Mobius quotient over the circle `|z| = |p_hat|`
/// (maximum principle puts the sup on the boundary circle),
/// C' = ln((1+sigma)/(1-sigma)), and C'' is the radial-plus-arc curve
/// bound; C0 is their max.
pub fn theoretical_c0_power(m: usize, p_hat: Complex64) -> Result<C0Constants> {
    let r = p_hat.norm();
    if m < 2 || r == 0.0 || r >= 1.0 {
        return Err(Error::Precondition(format!(
            "need m >= 2 and 0 < |p| < 1 (m = {m}, |p| = {r})"
        )));
    }
    let mut sigma = 0.0_f64;
    for j in 0..SIGMA_SAMPLES {
        let angle = 2.0 * std::f64::consts::PI * (j as f64) / (SIGMA_SAMPLES as f64);
        let z = Complex64::from_polar(r, angle);
        sigma = sigma.max(mobius_to_zero(p_hat, z).norm());
    }
    let c_prime = ((1.0 + sigma) / (1.0 - sigma)).ln();
    let ln_r = r.ln();
    let m_f = m as f64;
    let c_doubleprime = -(1.0 / (r.powf(1.0 / m_f) * ln_r))
        * (ln_r * ln_r + 4.0 * m_f * m_f * std::f64::consts::PI * std::f64::consts::PI).sqrt();
    Ok(C0Constants {
        sigma,
        c_prime,
        c_doubleprime,
        c0: c_prime.max(c_doubleprime),
    })
}

/// The generation-k preimage of p_hat that brackets z0 for the power map:
/// modulus `s = r^{1/m^k} <= |z0| < r^{1/m^{k+1}}` and argument
/// `phi <= arg z0 <= phi + 2 pi / m^k`. For `|z0| <= |p_hat|` the base
/// point itself is the bracket (k = 0).
pub fn power_bracket_point(
    m: usize,
    theta: f64,
    p_hat: Complex64,
    z0: Complex64,
) -> Result<(Complex64, usize)> {
    let r = p_hat.norm();
    if m < 2 || r == 0.0 || r >= 1.0 {
        return Err(Error::Precondition("need m >= 2 and 0 < |p| < 1".into()));
    }
    let rho = z0.norm();
    if rho >= 1.0 {
        return Err(Error::Domain("sample outside the disk".into()));
    }
    if rho <= r {
        return Ok((p_hat, 0));
    }
    // largest k with r^(1/m^k) <= rho, i.e. m^k <= ln r / ln rho
    let ratio = r.ln() / rho.ln();
    let mut k = (ratio.ln() / (m as f64).ln()).floor().max(0.0) as usize;
    while r.powf(1.0 / (m as f64).powi(k as i32 + 1)) <= rho {
        k += 1;
    }
    while k > 0 && r.powf(1.0 / (m as f64).powi(k as i32)) > rho {
        k -= 1;
    }
    let mk = (m as f64).powi(k as i32);
    let s = r.powf(1.0 / mk);
    let theta0 = p_hat.arg();
    let accum = (1.0 - mk) / (1.0 - m as f64) * theta;
    let psi = z0.arg();
    let offset = (psi * mk - theta0 + accum).rem_euclid(2.0 * std::f64::consts::PI) / mk;
    let phi = psi - offset;
    Ok((Complex64::from_polar(s, phi), k))
}

/// Annulus `r0 < |z| < 1` on which `|g'| > 1 + epsilon`.
#[derive(Debug, Clone, Copy)]
pub struct AnnulusSpec {
    pub r0: f64,
    pub epsilon: f64,
}

const ANNULUS_ANGLES: usize = 512;
const ANNULUS_FLOOR: f64 = 0.5;
const ANNULUS_STEP: f64 = 1e-3;
const ANNULUS_REFINE: f64 = 1e-6;

fn circle_min_derivative(g: &BlaschkeProduct, t: f64) -> Result<f64> {
    let mut min = f64::INFINITY;
    for j in 0..ANNULUS_ANGLES {
        let angle = 2.0 * std::f64::consts::PI * (j as f64) / (ANNULUS_ANGLES as f64);
        let z = Complex64::from_polar(t, angle);
        min = min.min(g.derivative(z)?.norm());
    }
    Ok(min)
}

/// Largest annulus (smallest r0, floored at 0.5) on a 1e-3 lattice with
/// the threshold refined by bisection to 1e-6.
pub fn find_expanding_annulus(g: &BlaschkeProduct, epsilon: f64) -> Result<AnnulusSpec> {
    if g.origin_zero_count() < 1 {
        return Err(Error::Precondition(
            "annulus search needs a zero at the origin (m1 >= 1)".into(),
        ));
    }
    let threshold = 1.0 + epsilon;
    let mut t = 1.0 - ANNULUS_STEP;
    let mut last_pass: Option<f64> = None;
    let mut achieved = f64::NEG_INFINITY;
    while t >= ANNULUS_FLOOR - 1e-12 {
        let min = circle_min_derivative(g, t)?;
        achieved = achieved.max(min - 1.0);
        if min > threshold {
            last_pass = Some(t);
        } else {
            break;
        }
        t -= ANNULUS_STEP;
    }
    let Some(pass) = last_pass else {
        return Err(Error::NotFound {
            what: format!("annulus with |g'| > {threshold}"),
            margin: achieved,
        });
    };
    if t < ANNULUS_FLOOR - 1e-12 {
        // everything down to the floor expands
        return Ok(AnnulusSpec {
            r0: ANNULUS_FLOOR,
            epsilon,
        });
    }
    // bisect the crossing between the failing t and the last passing radius
    let mut lo = t;
    let mut hi = pass;
    while hi - lo > ANNULUS_REFINE {
        let mid = 0.5 * (lo + hi);
        if circle_min_derivative(g, mid)? > threshold {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(AnnulusSpec { r0: hi, epsilon })
}

#[derive(Debug, Clone, Copy)]
pub struct ExpansionViolation {
    pub z: Complex64,
    pub preimage: Complex64,
    pub deficit: f64,
}

/// Checks `|q| > |z| - 1e-12` for every preimage q of every sampled z that
/// lands back inside the annulus. Violations are returned, not asserted:
/// the all-preimages reading of the inverse-branch statement is the one
/// tested here.
pub fn verify_annulus_expansion(
    g: &BlaschkeProduct,
    annulus: &AnnulusSpec,
    samples: usize,
    seed: u64,
) -> Result<Vec<ExpansionViolation>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    for _ in 0..samples {
        let u: f64 = rng.gen::<f64>();
        let radius = annulus.r0 + (1.0 - annulus.r0) * u;
        if radius <= annulus.r0 || radius >= 1.0 {
            continue; // open annulus
        }
        let angle: f64 = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
        let z = Complex64::from_polar(radius, angle);
        let set = g.preimages(z)?;
        for q in &set.roots {
            let qn = q.norm();
            if qn > annulus.r0 && qn < 1.0 && qn <= z.norm() - 1e-12 {
                violations.push(ExpansionViolation {
                    z,
                    preimage: *q,
                    deficit: z.norm() - qn,
                });
            }
        }
    }
    Ok(violations)
}

/// Per-generation maximal angular gap of the preimage tree restricted to
/// the outer shell (modulus at least the median of that generation).
/// Preimages of the base densify on the circle, so gaps shrink with k.
pub fn boundary_density_profile(
    g: &BlaschkeProduct,
    p_hat: Complex64,
    depth: usize,
) -> Result<Vec<(usize, f64)>> {
    if g.origin_zero_count() < 1 {
        return Err(Error::Precondition(
            "density profile needs a zero at the origin (m1 >= 1)".into(),
        ));
    }
    let tree = g.preimage_tree(p_hat, depth)?;
    let tau = 2.0 * std::f64::consts::PI;
    let mut out = Vec::with_capacity(depth + 1);
    for k in 0..=depth {
        let mut gen_mods: Vec<f64> = tree.generation_points(k).map(|p| p.norm()).collect();
        if gen_mods.is_empty() {
            out.push((k, tau));
            continue;
        }
        gen_mods.sort_by(f64::total_cmp);
        let median = gen_mods[(gen_mods.len() - 1) / 2];
        let mut angles: Vec<f64> = tree
            .nodes
            .iter()
            .filter(|n| n.generation <= k && n.point.norm() >= median - 1e-12)
            .map(|n| n.point.arg().rem_euclid(tau))
            .collect();
        angles.sort_by(f64::total_cmp);
        let gap = if angles.len() < 2 {
            tau
        } else {
            let mut max_gap = tau - angles[angles.len() - 1] + angles[0];
            for pair in angles.windows(2) {
                max_gap = max_gap.max(pair[1] - pair[0]);
            }
            max_gap
        };
        out.push((k, gap));
    }
    Ok(out)
}
