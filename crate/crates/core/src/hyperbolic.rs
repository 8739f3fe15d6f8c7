//! Poincare geometry of the unit disk: the distance formula
//! `d(z, w) = ln((1 + t)/(1 - t))` with `t = |(z - w)/(1 - z conj(w))|`,
//! curve lengths for the density `2 |dz| / (1 - |z|^2)`, and the
//! radial-plus-arc curve used to bound distances to bracketing preimages.
//!
//! The factor 2 in the length density makes lengths and distances agree:
//! the unnormalized density `|dz|/(1 - |z|^2)` integrates to only half of
//! the distance formula along geodesics.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Distances with the Mobius quotient at or past this are reported as
/// overflow instead of saturating.
pub const BOUNDARY_GUARD: f64 = 1e-15;
/// Hard cap on polyline segment length for curve integration.
pub const MAX_SEGMENT: f64 = 1e-3;

/// Disk automorphism sending a to 0: `z -> (z - a)/(1 - conj(a) z)`.
pub fn mobius_to_zero(a: Complex64, z: Complex64) -> Complex64 {
    (z - a) / (Complex64::new(1.0, 0.0) - a.conj() * z)
}

/// Poincare distance between interior points.
pub fn poincare_distance(z: Complex64, w: Complex64) -> Result<f64> {
    if z.norm() >= 1.0 || w.norm() >= 1.0 {
        return Err(Error::Domain(format!(
            "distance endpoints must be inside the disk (|z| = {}, |w| = {})",
            z.norm(),
            w.norm()
        )));
    }
    // Quotient of norms rather than norm of the quotient: |z - w| and
    // |1 - z conj(w)| are both bit-exact symmetric in (z, w), so the
    // distance is too.
    let t = (z - w).norm() / (Complex64::new(1.0, 0.0) - z * w.conj()).norm();
    if t >= 1.0 - BOUNDARY_GUARD {
        return Err(Error::Overflow { t });
    }
    Ok(((1.0 + t) / (1.0 - t)).ln())
}

/// Piecewise-linear curve strictly inside the disk.
#[derive(Debug, Clone)]
pub struct CurveSamples {
    points: Vec<Complex64>,
}

impl CurveSamples {
    /// At least two points, all strictly inside the disk, consecutive gaps
    /// at most [`MAX_SEGMENT`].
    pub fn new(points: Vec<Complex64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Domain(format!(
                "curve needs at least 2 samples, got {}",
                points.len()
            )));
        }
        for p in &points {
            if !p.re.is_finite() || !p.im.is_finite() || p.norm() >= 1.0 {
                return Err(Error::Domain(format!("curve sample {p} not inside the disk")));
            }
        }
        for pair in points.windows(2) {
            let gap = (pair[1] - pair[0]).norm();
            if gap > MAX_SEGMENT + 1e-12 {
                return Err(Error::Domain(format!(
                    "curve gap {gap} exceeds {MAX_SEGMENT}"
                )));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn first(&self) -> Complex64 {
        self.points[0]
    }

    pub fn last(&self) -> Complex64 {
        *self.points.last().unwrap()
    }
}

/// Kobayashi length of the polyline: midpoint rule per segment with the
/// density `2 / (1 - |z|^2)`.
pub fn kobayashi_length(curve: &CurveSamples) -> f64 {
    let mut total = 0.0;
    for pair in curve.points.windows(2) {
        let mid = (pair[0] + pair[1]) / 2.0;
        let density = 2.0 / (1.0 - mid.norm_sqr());
        total += density * (pair[1] - pair[0]).norm();
    }
    total
}

/// Target segment length near modulus `t`; refined toward the boundary so
/// the midpoint rule keeps its accuracy where the density blows up.
fn local_gap(t: f64) -> f64 {
    MAX_SEGMENT.min((1.0 - t) * 5e-4).max(1e-12)
}

/// The bound curve for the power-map bracketing: from `z0 = rho e^{i psi}`
/// follow the radius in to `s e^{i psi}` (s = |q|), then the circular arc
/// to `q = s e^{i phi}`. Returns its Kobayashi length, an upper bound for
/// the distance from z0 to q.
pub fn radial_arc_bound(_m: usize, _r: f64, z0: Complex64, q: Complex64) -> Result<f64> {
    let rho = z0.norm();
    let s = q.norm();
    if rho >= 1.0 || s >= 1.0 {
        return Err(Error::Domain("curve endpoints must be inside the disk".into()));
    }
    if (z0 - q).norm() == 0.0 {
        return Ok(0.0);
    }
    if s > rho + 1e-12 {
        return Err(Error::Precondition(format!(
            "bracket point must not be outside the sample circle (s = {s}, rho = {rho})"
        )));
    }
    let psi = z0.arg();
    let phi = q.arg();

    let mut points = Vec::new();
    // radial leg: rho e^{i psi} -> s e^{i psi}
    let dir = Complex64::from_polar(1.0, psi);
    let mut t = rho;
    points.push(dir * rho);
    while t > s {
        let step = local_gap(t);
        t = (t - step).max(s);
        points.push(dir * t);
    }
    // arc leg at radius s, from psi down/up to phi along the shorter sweep
    let mut dtheta = psi - phi;
    while dtheta > std::f64::consts::PI {
        dtheta -= 2.0 * std::f64::consts::PI;
    }
    while dtheta < -std::f64::consts::PI {
        dtheta += 2.0 * std::f64::consts::PI;
    }
    let arc_len = (dtheta * s).abs();
    if arc_len > 0.0 {
        let gap = local_gap(s);
        let steps = (arc_len / gap).ceil() as usize;
        for i in 1..=steps {
            let angle = psi - dtheta * (i as f64) / (steps as f64);
            points.push(Complex64::from_polar(s, angle));
        }
    }
    if points.len() < 2 {
        points.push(q);
    }
    let curve = CurveSamples::new(points)?;
    Ok(kobayashi_length(&curve))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mobius_sends_a_to_zero() {
        assert!(mobius_to_zero(c(0.5, 0.0), c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn mobius_identity_at_origin() {
        let z = c(0.3, 0.4);
        assert!((mobius_to_zero(c(0.0, 0.0), z) - z).norm() < 1e-15);
    }

    #[test]
    fn mobius_substitution() {
        let out = mobius_to_zero(c(0.5, 0.0), c(-0.5, 0.0));
        assert!((out - c(-0.8, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn distance_zero_at_identity() {
        assert_eq!(poincare_distance(c(0.0, 0.0), c(0.0, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn distance_origin_to_half() {
        let d = poincare_distance(c(0.0, 0.0), c(0.5, 0.0)).unwrap();
        assert!((d - 3.0_f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn diameter_distance_adds() {
        let d = poincare_distance(c(0.5, 0.0), c(-0.5, 0.0)).unwrap();
        assert!((d - 9.0_f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn boundary_guard_errors() {
        let near_one = 0.999_999_999_999_999_5;
        let err = poincare_distance(c(near_one, 0.0), c(-near_one, 0.0)).unwrap_err();
        assert!(matches!(err, Error::Overflow { .. }));
    }

    #[test]
    fn straight_segment_length_is_distance() {
        let n = 1000;
        let points: Vec<Complex64> = (0..=n).map(|i| c(0.5 * i as f64 / n as f64, 0.0)).collect();
        let curve = CurveSamples::new(points).unwrap();
        let len = kobayashi_length(&curve);
        assert!((len - 3.0_f64.ln()).abs() < 1e-5);
    }

    #[test]
    fn repeated_point_curve_has_zero_length() {
        let curve = CurveSamples::new(vec![c(0.2, 0.1), c(0.2, 0.1)]).unwrap();
        assert_eq!(kobayashi_length(&curve), 0.0);
    }

    #[test]
    fn coarse_curve_rejected() {
        assert!(CurveSamples::new(vec![c(0.0, 0.0), c(0.5, 0.0)]).is_err());
    }

    #[test]
    fn radial_arc_degenerate_is_zero() {
        let z = c(0.3, 0.4);
        assert_eq!(radial_arc_bound(2, 0.5, z, z).unwrap(), 0.0);
    }

    #[test]
    fn radial_arc_pure_arc() {
        // rho == s: only the arc contributes
        let z0 = Complex64::from_polar(0.6, 1.0);
        let q = Complex64::from_polar(0.6, 0.4);
        let bound = radial_arc_bound(2, 0.5, z0, q).unwrap();
        let exact = 2.0 * 0.6 * 0.6 / (1.0 - 0.36);
        assert!((bound - exact).abs() < 1e-6, "bound {bound} exact {exact}");
        assert!(bound >= poincare_distance(z0, q).unwrap() - 1e-9);
    }

    #[test]
    fn radial_arc_dominates_distance() {
        let z0 = Complex64::from_polar(0.9, 0.1);
        let q = Complex64::from_polar(0.5_f64.sqrt(), 0.0);
        let bound = radial_arc_bound(2, 0.5, z0, q).unwrap();
        let d = poincare_distance(z0, q).unwrap();
        assert!(bound >= d - 1e-9, "bound {bound} < distance {d}");
    }
}
