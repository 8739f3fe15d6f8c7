//! Polynomial dynamics in the plane: fixed points and multipliers, orbit
//! classification against the attracting fixed points, inverse-orbit
//! trees of a base point, and deterministic basin rasters.

use num_complex::Complex64;

use crate::blaschke::{PreimageTree, TreeNode, DEDUP_RADIUS, NODE_CAP};
use crate::error::{Error, Result};
use crate::roots::{aberth_roots, PolyCoeffs};

pub const ATTRACTOR_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 10_000;
const SUPER_TOL: f64 = 1e-9;

/// Ascending coefficients, degree >= 2, nonzero leading coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() < 3 {
            return Err(Error::Precondition(format!(
                "polynomial degree must be >= 2, got {}",
                coeffs.len().saturating_sub(1)
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Precondition("non-finite coefficient".into()));
        }
        if coeffs.last().unwrap().norm() <= 1e-14 {
            return Err(Error::Precondition("leading coefficient is numerically zero".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        PolyCoeffs(self.coeffs.clone()).eval(z)
    }

    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        PolyCoeffs(self.coeffs.clone()).eval_with_derivative(z)
    }

    pub fn iterate(&self, z: Complex64, k: usize) -> Complex64 {
        let mut z = z;
        for _ in 0..k {
            z = self.eval(z);
        }
        z
    }

    /// Cauchy bound `1 + max |c_j / c_N|`, floored at 2: beyond this the
    /// modulus grows under iteration.
    pub fn escape_radius(&self) -> f64 {
        PolyCoeffs(self.coeffs.clone()).cauchy_root_bound().max(2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedPointClass {
    Superattracting,
    Attracting,
    Indifferent,
    Repelling,
}

impl std::fmt::Display for FixedPointClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FixedPointClass::Superattracting => "superattracting",
            FixedPointClass::Attracting => "attracting",
            FixedPointClass::Indifferent => "indifferent",
            FixedPointClass::Repelling => "repelling",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FixedPointInfo {
    pub location: Complex64,
    pub multiplier: Complex64,
    pub class: FixedPointClass,
}

/// All N fixed points (roots of f(z) - z, with multiplicity), classified
/// by multiplier modulus.
pub fn fixed_points(f: &Polynomial) -> Result<Vec<FixedPointInfo>> {
    let mut coeffs = f.coeffs().to_vec();
    coeffs[1] -= Complex64::new(1.0, 0.0);
    let found = aberth_roots(&coeffs, None)?;
    let mut out: Vec<FixedPointInfo> = found
        .roots
        .iter()
        .map(|&location| {
            let (_, multiplier) = f.eval_with_derivative(location);
            let lambda = multiplier.norm();
            let class = if lambda <= SUPER_TOL {
                FixedPointClass::Superattracting
            } else if (lambda - 1.0).abs() <= SUPER_TOL {
                FixedPointClass::Indifferent
            } else if lambda < 1.0 {
                FixedPointClass::Attracting
            } else {
                FixedPointClass::Repelling
            };
            FixedPointInfo {
                location,
                multiplier,
                class,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        a.location
            .re
            .total_cmp(&b.location.re)
            .then(a.location.im.total_cmp(&b.location.im))
    });
    Ok(out)
}

/// Attracting and superattracting fixed points only.
pub fn attractors(f: &Polynomial) -> Result<Vec<FixedPointInfo>> {
    Ok(fixed_points(f)?
        .into_iter()
        .filter(|fp| {
            matches!(
                fp.class,
                FixedPointClass::Attracting | FixedPointClass::Superattracting
            )
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitClass {
    Attractor(usize),
    Escaped,
    Undecided,
}

/// Iterates z0 until it comes within [`ATTRACTOR_TOL`] of an attractor,
/// leaves the escape radius, or exhausts the budget.
pub fn classify_orbit(
    f: &Polynomial,
    z0: Complex64,
    attractors: &[FixedPointInfo],
    max_iter: usize,
) -> (OrbitClass, usize) {
    let escape = f.escape_radius();
    let mut z = z0;
    for n in 0..=max_iter {
        for (i, fp) in attractors.iter().enumerate() {
            if (z - fp.location).norm() <= ATTRACTOR_TOL {
                return (OrbitClass::Attractor(i), n);
            }
        }
        if z.norm() > escape {
            return (OrbitClass::Escaped, n);
        }
        if n == max_iter {
            break;
        }
        z = f.eval(z);
    }
    (OrbitClass::Undecided, max_iter)
}

/// Generation-labelled inverse orbit `∪_{k <= depth} f^{-k}(base)`, built
/// by the same simultaneous root solving and dedup rules as the disk-model
/// trees. No fixed-point hypothesis; see [`inverse_orbit_tree_poly`].
pub fn preimage_tree_poly(f: &Polynomial, base: Complex64, depth: usize) -> Result<PreimageTree> {
    let mut tree = PreimageTree {
        base,
        depth,
        nodes: vec![TreeNode {
            point: base,
            generation: 0,
            parent: None,
        }],
    };
    let mut frontier: Vec<usize> = vec![0];
    for gen in 1..=depth {
        let mut candidates: Vec<(Complex64, usize)> = Vec::new();
        for &idx in &frontier {
            let w = tree.nodes[idx].point;
            let mut coeffs = f.coeffs().to_vec();
            coeffs[0] -= w;
            let found = aberth_roots(&coeffs, None)?;
            for r in found.roots {
                candidates.push((r, idx));
            }
        }
        candidates.sort_by(|a, b| {
            a.0.re
                .total_cmp(&b.0.re)
                .then(a.0.im.total_cmp(&b.0.im))
                .then(a.1.cmp(&b.1))
        });
        let mut next = Vec::new();
        for (point, parent) in candidates {
            let duplicate = tree
                .nodes
                .iter()
                .any(|n| (n.point - point).norm() < DEDUP_RADIUS);
            if duplicate {
                continue;
            }
            if tree.nodes.len() >= NODE_CAP {
                return Err(Error::Capacity {
                    what: "inverse orbit tree nodes".into(),
                    reached: gen - 1,
                });
            }
            tree.nodes.push(TreeNode {
                point,
                generation: gen,
                parent: Some(parent),
            });
            next.push(tree.nodes.len() - 1);
        }
        frontier = next;
    }
    Ok(tree)
}

/// Inverse orbit of an attracting fixed point. Requires p to actually be
/// an attracting (or superattracting) fixed point and to have at least
/// one preimage besides itself, otherwise the tree is the single point p.
pub fn inverse_orbit_tree_poly(
    f: &Polynomial,
    p: Complex64,
    depth: usize,
) -> Result<PreimageTree> {
    if (f.eval(p) - p).norm() > 1e-9 {
        return Err(Error::Precondition(format!("{p} is not a fixed point")));
    }
    let (_, multiplier) = f.eval_with_derivative(p);
    if multiplier.norm() >= 1.0 - SUPER_TOL {
        return Err(Error::Precondition(format!(
            "{p} is not attracting (multiplier modulus {})",
            multiplier.norm()
        )));
    }
    let mut coeffs = f.coeffs().to_vec();
    coeffs[0] -= p;
    let first = aberth_roots(&coeffs, None)?;
    let nontrivial = first.roots.iter().any(|r| (r - p).norm() >= DEDUP_RADIUS);
    if !nontrivial {
        return Err(Error::Precondition(
            "every preimage of the fixed point is the fixed point itself".into(),
        ));
    }
    preimage_tree_poly(f, p, depth)
}

/// Viewport in complex-plane units.
#[derive(Debug, Clone, Copy)]
pub struct Viewport {
    pub center: Complex64,
    pub width: f64,
    pub height: f64,
}

impl Viewport {
    pub fn new(center: Complex64, width: f64, height: f64) -> Result<Self> {
        if !(width > 0.0) || !(height > 0.0) {
            return Err(Error::Precondition(format!(
                "viewport must have positive extent ({width} x {height})"
            )));
        }
        Ok(Self {
            center,
            width,
            height,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelRecord {
    pub class: OrbitClass,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct BasinRaster {
    pub width_px: usize,
    pub height_px: usize,
    pub viewport: Viewport,
    /// Row-major, top row first.
    pub pixels: Vec<PixelRecord>,
}

pub const MAX_RESOLUTION: usize = 8192;

impl BasinRaster {
    pub fn pixel_center(&self, x: usize, y: usize) -> Complex64 {
        let vx = (x as f64 + 0.5) / self.width_px as f64 - 0.5;
        let vy = 0.5 - (y as f64 + 0.5) / self.height_px as f64;
        self.viewport.center + Complex64::new(vx * self.viewport.width, vy * self.viewport.height)
    }
}

/// Per-pixel orbit classification over the viewport. Deterministic: pixels
/// are scanned row-major and the palette is fixed.
pub fn render_basin(
    f: &Polynomial,
    viewport: Viewport,
    width_px: usize,
    height_px: usize,
    max_iter: usize,
    attractor_list: &[FixedPointInfo],
) -> Result<BasinRaster> {
    if width_px == 0 || height_px == 0 {
        return Err(Error::Precondition("resolution must be positive".into()));
    }
    if width_px > MAX_RESOLUTION || height_px > MAX_RESOLUTION {
        return Err(Error::Capacity {
            what: format!("raster resolution (cap {MAX_RESOLUTION})"),
            reached: width_px.max(height_px),
        });
    }
    let mut raster = BasinRaster {
        width_px,
        height_px,
        viewport,
        pixels: Vec::with_capacity(width_px * height_px),
    };
    for y in 0..height_px {
        for x in 0..width_px {
            let z = raster.pixel_center(x, y);
            let (class, iterations) = classify_orbit(f, z, attractor_list, max_iter);
            raster.pixels.push(PixelRecord { class, iterations });
        }
    }
    Ok(raster)
}

/// Base colors per attractor index; iteration count darkens toward the
/// basin boundary. Undecided pixels use a reserved mid gray.
fn pixel_color(record: PixelRecord, max_iter: usize) -> [u8; 3] {
    const ATTRACTOR_BASE: [[u8; 3]; 6] = [
        [66, 135, 245],
        [235, 110, 68],
        [60, 179, 113],
        [186, 85, 211],
        [240, 200, 60],
        [70, 200, 200],
    ];
    match record.class {
        OrbitClass::Undecided => [128, 128, 128],
        OrbitClass::Escaped => {
            let shade = shade_factor(record.iterations, max_iter);
            let v = (240.0 * shade) as u8;
            [v, v, v.saturating_add(10)]
        }
        OrbitClass::Attractor(i) => {
            let base = ATTRACTOR_BASE[i % ATTRACTOR_BASE.len()];
            let shade = shade_factor(record.iterations, max_iter);
            [
                (base[0] as f64 * shade) as u8,
                (base[1] as f64 * shade) as u8,
                (base[2] as f64 * shade) as u8,
            ]
        }
    }
}

fn shade_factor(iterations: usize, max_iter: usize) -> f64 {
    let t = (iterations as f64 / (max_iter.max(1) as f64)).min(1.0);
    1.0 - 0.7 * t.sqrt()
}

/// Generation-indexed overlay palette, fixed for reproducible figures.
fn generation_color(generation: usize) -> [u8; 3] {
    const PALETTE: [[u8; 3]; 8] = [
        [255, 255, 255],
        [255, 80, 80],
        [255, 170, 40],
        [255, 255, 60],
        [120, 255, 80],
        [60, 220, 255],
        [140, 110, 255],
        [255, 100, 230],
    ];
    PALETTE[generation % PALETTE.len()]
}

/// RGB image of the raster with an optional inverse-orbit overlay drawn
/// after the basin fill. Returns binary PPM (P6) bytes.
pub fn raster_to_ppm(
    raster: &BasinRaster,
    max_iter: usize,
    overlay: Option<&PreimageTree>,
) -> Vec<u8> {
    let mut rgb: Vec<[u8; 3]> = raster
        .pixels
        .iter()
        .map(|&p| pixel_color(p, max_iter))
        .collect();
    if let Some(tree) = overlay {
        let dot_radius = (raster.width_px.min(raster.height_px) as f64 * 0.004).max(1.0);
        for node in &tree.nodes {
            draw_dot(raster, &mut rgb, node.point, dot_radius, generation_color(node.generation));
        }
    }
    let mut out = format!("P6\n{} {}\n255\n", raster.width_px, raster.height_px).into_bytes();
    for px in rgb {
        out.extend_from_slice(&px);
    }
    out
}

fn draw_dot(
    raster: &BasinRaster,
    rgb: &mut [[u8; 3]],
    point: Complex64,
    radius_px: f64,
    color: [u8; 3],
) {
    let vp = raster.viewport;
    let fx = ((point.re - vp.center.re) / vp.width + 0.5) * raster.width_px as f64;
    let fy = (0.5 - (point.im - vp.center.im) / vp.height) * raster.height_px as f64;
    let r = radius_px.ceil() as i64;
    let cx = fx.floor() as i64;
    let cy = fy.floor() as i64;
    for dy in -r..=r {
        for dx in -r..=r {
            let x = cx + dx;
            let y = cy + dy;
            if x < 0 || y < 0 || x >= raster.width_px as i64 || y >= raster.height_px as i64 {
                continue;
            }
            let ddx = x as f64 + 0.5 - fx;
            let ddy = y as f64 + 0.5 - fy;
            if ddx * ddx + ddy * ddy <= radius_px * radius_px {
                rgb[y as usize * raster.width_px + x as usize] = color;
            }
        }
    }
}
