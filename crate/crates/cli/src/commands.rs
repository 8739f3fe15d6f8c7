//! Command implementations. Each returns the process exit code through
//! `CliError`: 0 ok, 2 config, 3 numeric/capacity, 4 property violation,
//! 5 I/O.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use diskdyn_core::blaschke::{BlaschkeProduct, PreimageTree};
use diskdyn_core::polydyn::{
    attractors, inverse_orbit_tree_poly, preimage_tree_poly, raster_to_ppm, render_basin,
    OrbitClass, Polynomial, DEFAULT_MAX_ITER,
};
use diskdyn_core::shadowing::{
    boundary_density_profile, empirical_constant, find_expanding_annulus, verify_annulus_expansion,
    SampleGrid,
};
use diskdyn_core::{Complex64, Error};

use crate::config::{fmt_f64, RunConfig};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;
pub const EXIT_IO: i32 = 5;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_IO,
            message: message.into(),
        }
    }

    pub fn violation(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_VIOLATION,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Precondition(_) => EXIT_CONFIG,
            _ => EXIT_NUMERIC,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

pub type CliResult = Result<(), CliError>;

/// Write-temp-then-rename so output files appear atomically.
fn write_output(path: &Path, bytes: &[u8]) -> CliResult {
    let tmp = path.with_extension("tmp-write");
    std::fs::write(&tmp, bytes).map_err(|e| CliError::io(format!("{}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn emit(out: Option<&PathBuf>, text: String) -> CliResult {
    match out {
        Some(path) => write_output(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn output_path<'a>(config: &'a RunConfig, cli_out: Option<&'a PathBuf>) -> Option<PathBuf> {
    cli_out
        .cloned()
        .or_else(|| config.output.as_ref().map(PathBuf::from))
}

enum TreeSource {
    Blaschke(BlaschkeProduct),
    Poly(Polynomial),
}

impl TreeSource {
    fn forward(&self, z: Complex64, k: usize) -> Result<Complex64, Error> {
        match self {
            TreeSource::Blaschke(g) => g.iterate(z, k),
            TreeSource::Poly(f) => Ok(f.iterate(z, k)),
        }
    }
}

pub fn cmd_preimages(config: &RunConfig, out: Option<&PathBuf>) -> CliResult {
    let base = config.base_point().map_err(CliError::config)?;
    let depth = config.depth.ok_or_else(|| CliError::config("config is missing depth"))?;
    let (source, tree): (TreeSource, PreimageTree) = if config.map.blaschke.is_some() {
        let g = config.blaschke().map_err(CliError::config)?;
        let tree = g.preimage_tree(base, depth)?;
        (TreeSource::Blaschke(g), tree)
    } else {
        let f = config.polynomial().map_err(CliError::config)?;
        let tree = preimage_tree_poly(&f, base, depth)?;
        (TreeSource::Poly(f), tree)
    };
    let mut csv = String::from("generation,re,im,modulus,residual\n");
    for node in &tree.nodes {
        let back = source.forward(node.point, node.generation)?;
        let residual = (back - tree.base).norm();
        writeln!(
            csv,
            "{},{},{},{},{}",
            node.generation,
            fmt_f64(node.point.re),
            fmt_f64(node.point.im),
            fmt_f64(node.point.norm()),
            fmt_f64(residual)
        )
        .unwrap();
    }
    emit(output_path(config, out).as_ref(), csv)
}

pub fn cmd_shadow(config: &RunConfig, out: Option<&PathBuf>) -> CliResult {
    let g = config.blaschke().map_err(CliError::config)?;
    let base = config.base_point().map_err(CliError::config)?;
    let depth = config.depth.ok_or_else(|| CliError::config("config is missing depth"))?;
    let grid_spec = config
        .grid
        .ok_or_else(|| CliError::config("config is missing grid"))?;
    let grid = SampleGrid::dyadic(grid_spec.i_max, grid_spec.angles_per_circle)?;
    let report = empirical_constant(&g, base, depth, &grid)?;
    let mut csv = String::from("z0_re,z0_im,q_re,q_im,generation,distance,overflow\n");
    for r in &report.records {
        writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            fmt_f64(r.z0.re),
            fmt_f64(r.z0.im),
            fmt_f64(r.best_q.re),
            fmt_f64(r.best_q.im),
            r.generation,
            fmt_f64(r.distance),
            r.overflow
        )
        .unwrap();
    }
    writeln!(csv, "# empirical_sup={}", fmt_f64(report.empirical_sup)).unwrap();
    writeln!(csv, "# depth={}", report.depth).unwrap();
    writeln!(
        csv,
        "# grid_i_max={} grid_angles={}",
        grid_spec.i_max, grid_spec.angles_per_circle
    )
    .unwrap();
    match &report.theoretical {
        Some(t) => {
            writeln!(csv, "# sigma={}", fmt_f64(t.sigma)).unwrap();
            writeln!(csv, "# c_prime={}", fmt_f64(t.c_prime)).unwrap();
            writeln!(csv, "# c_doubleprime={}", fmt_f64(t.c_doubleprime)).unwrap();
            writeln!(csv, "# c0={}", fmt_f64(t.c0)).unwrap();
        }
        None => writeln!(csv, "# theoretical=absent").unwrap(),
    }
    writeln!(csv, "# shallow_tree_warning={}", report.shallow_tree_warning).unwrap();
    emit(output_path(config, out).as_ref(), csv)
}

const VERIFY_BOUNDARY_SAMPLES: usize = 10_000;

pub fn cmd_verify(config: &RunConfig, out: Option<&PathBuf>) -> CliResult {
    let g = config.blaschke().map_err(CliError::config)?;
    let epsilon = config.epsilon.unwrap_or(0.01);
    let samples = config.samples.unwrap_or(10_000);
    let seed = config.seed.unwrap_or(0);
    let depth = config.depth.unwrap_or(10);
    let m1 = g.origin_zero_count();
    let has_offcenter_zero = g.zeros().iter().any(|a| a.norm() > 1e-14);
    let mut report = String::new();

    // boundary derivative sweep
    let mut min_modulus = f64::INFINITY;
    let mut worst_zeta = Complex64::new(1.0, 0.0);
    for j in 0..VERIFY_BOUNDARY_SAMPLES {
        let angle = 2.0 * std::f64::consts::PI * (j as f64) / (VERIFY_BOUNDARY_SAMPLES as f64);
        let zeta = Complex64::from_polar(1.0, angle);
        let v = g.boundary_derivative_modulus(zeta)?;
        if v < min_modulus {
            min_modulus = v;
            worst_zeta = zeta;
        }
    }
    writeln!(
        report,
        "boundary_derivative: min |g'| = {} over {} boundary points (m1 = {m1})",
        fmt_f64(min_modulus),
        VERIFY_BOUNDARY_SAMPLES
    )
    .unwrap();
    if min_modulus <= 1.0 {
        writeln!(
            report,
            "boundary_derivative: FAIL at zeta = ({}, {})",
            fmt_f64(worst_zeta.re),
            fmt_f64(worst_zeta.im)
        )
        .unwrap();
        emit(output_path(config, out).as_ref(), report.clone())?;
        return Err(CliError::violation(format!(
            "boundary derivative modulus {} <= 1 at zeta = ({}, {})",
            fmt_f64(min_modulus),
            fmt_f64(worst_zeta.re),
            fmt_f64(worst_zeta.im)
        )));
    }
    let strict_floor = if has_offcenter_zero { m1 as f64 } else { (m1 as f64) - 1.0 };
    writeln!(
        report,
        "boundary_derivative: PASS (margin over {} = {})",
        strict_floor.max(1.0),
        fmt_f64(min_modulus - strict_floor.max(1.0))
    )
    .unwrap();

    // expanding annulus and inverse-branch expansion
    let annulus = find_expanding_annulus(&g, epsilon)?;
    writeln!(
        report,
        "annulus: r0 = {} with |g'| > {} inside",
        fmt_f64(annulus.r0),
        fmt_f64(1.0 + epsilon)
    )
    .unwrap();
    let violations = verify_annulus_expansion(&g, &annulus, samples, seed)?;
    if violations.is_empty() {
        writeln!(report, "expansion: PASS over {samples} samples (seed {seed})").unwrap();
    } else {
        for v in &violations {
            writeln!(
                report,
                "expansion: FAIL z = ({}, {}) preimage = ({}, {}) deficit = {}",
                fmt_f64(v.z.re),
                fmt_f64(v.z.im),
                fmt_f64(v.preimage.re),
                fmt_f64(v.preimage.im),
                fmt_f64(v.deficit)
            )
            .unwrap();
        }
        emit(output_path(config, out).as_ref(), report.clone())?;
        return Err(CliError::violation(format!(
            "{} inverse-branch expansion violations",
            violations.len()
        )));
    }

    // density profile of the preimage tree of the origin
    let profile = boundary_density_profile(&g, Complex64::new(0.0, 0.0), depth)?;
    for (k, gap) in &profile {
        writeln!(report, "density: generation {k} max_angular_gap {}", fmt_f64(*gap)).unwrap();
    }
    let monotone = profile.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12);
    if monotone {
        writeln!(report, "density: PASS (non-increasing gaps)").unwrap();
    } else {
        emit(output_path(config, out).as_ref(), report.clone())?;
        return Err(CliError::violation("density profile gaps increased".to_string()));
    }

    writeln!(report, "verify: PASS").unwrap();
    emit(output_path(config, out).as_ref(), report)
}

pub fn cmd_render(config: &RunConfig, out: Option<&PathBuf>) -> CliResult {
    let f = config.polynomial().map_err(CliError::config)?;
    let viewport = config.viewport().map_err(CliError::config)?;
    let [width_px, height_px] = config
        .resolution
        .ok_or_else(|| CliError::config("config is missing resolution"))?;
    let max_iter = config.max_iter.unwrap_or(DEFAULT_MAX_ITER);
    let attractor_list = attractors(&f)?;
    let raster = render_basin(&f, viewport, width_px, height_px, max_iter, &attractor_list)?;
    let overlay = match config.overlay_depth {
        Some(depth) => {
            let p = attractor_list
                .first()
                .ok_or_else(|| {
                    CliError::config("overlay requested but the map has no attracting fixed point")
                })?
                .location;
            Some(inverse_orbit_tree_poly(&f, p, depth)?)
        }
        None => None,
    };
    let ppm = raster_to_ppm(&raster, max_iter, overlay.as_ref());
    let path = output_path(config, out)
        .ok_or_else(|| CliError::config("render needs an output path (binary image)"))?;
    write_output(&path, &ppm)?;
    if let Some(csv_path) = &config.output_csv {
        let mut csv = String::from("x,y,attractor,iterations\n");
        for (i, px) in raster.pixels.iter().enumerate() {
            let x = i % raster.width_px;
            let y = i / raster.width_px;
            let label = match px.class {
                OrbitClass::Attractor(idx) => idx.to_string(),
                OrbitClass::Escaped => "escaped".to_string(),
                OrbitClass::Undecided => "undecided".to_string(),
            };
            writeln!(csv, "{x},{y},{label},{}", px.iterations).unwrap();
        }
        write_output(&PathBuf::from(csv_path), csv.as_bytes())?;
    }
    Ok(())
}
