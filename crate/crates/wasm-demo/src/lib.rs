//! wasm-bindgen surface for the browser demo: basin rendering to RGBA,
//! preimage tree points, and a shadowing summary.
//!
//! Build with `wasm-pack build crates/wasm-demo --target web` and serve
//! `www/` next to the generated `pkg/`.

use diskdyn_core::blaschke::BlaschkeProduct;
use diskdyn_core::polydyn::{attractors, raster_to_ppm, render_basin, Polynomial, Viewport};
use diskdyn_core::shadowing::{empirical_constant, SampleGrid};
use diskdyn_core::Complex64;
use wasm_bindgen::prelude::*;

fn complex_pairs(flat: &[f64]) -> Result<Vec<Complex64>, JsError> {
    if flat.len() % 2 != 0 {
        return Err(JsError::new("expected interleaved re,im pairs"));
    }
    Ok(flat
        .chunks_exact(2)
        .map(|p| Complex64::new(p[0], p[1]))
        .collect())
}

fn js<E: std::fmt::Display>(e: E) -> JsError {
    JsError::new(&e.to_string())
}

/// Escape-time basin raster for a polynomial, returned as RGBA bytes in
/// row-major order (top row first), ready for `ImageData`.
#[wasm_bindgen]
pub fn basin_rgba(
    coefficients: &[f64],
    center_re: f64,
    center_im: f64,
    extent: f64,
    pixels: usize,
    max_iter: usize,
) -> Result<Vec<u8>, JsError> {
    let f = Polynomial::new(complex_pairs(coefficients)?).map_err(js)?;
    let att = attractors(&f).map_err(js)?;
    let viewport =
        Viewport::new(Complex64::new(center_re, center_im), extent, extent).map_err(js)?;
    let raster = render_basin(&f, viewport, pixels, pixels, max_iter, &att).map_err(js)?;
    let ppm = raster_to_ppm(&raster, max_iter, None);
    // strip the P6 header (third newline ends it) and widen RGB to RGBA
    let body_start = ppm
        .iter()
        .enumerate()
        .filter(|(_, &b)| b == b'\n')
        .map(|(i, _)| i + 1)
        .nth(2)
        .ok_or_else(|| JsError::new("malformed PPM"))?;
    let mut rgba = Vec::with_capacity(pixels * pixels * 4);
    for px in ppm[body_start..].chunks_exact(3) {
        rgba.extend_from_slice(&[px[0], px[1], px[2], 255]);
    }
    Ok(rgba)
}

/// Preimage tree of `base` under a Blaschke product, as a JSON array of
/// `[generation, re, im]` triples.
#[wasm_bindgen]
pub fn preimage_tree_json(
    theta: f64,
    zeros: &[f64],
    base_re: f64,
    base_im: f64,
    depth: usize,
) -> Result<String, JsError> {
    let g = BlaschkeProduct::new(theta, complex_pairs(zeros)?).map_err(js)?;
    let tree = g
        .preimage_tree(Complex64::new(base_re, base_im), depth)
        .map_err(js)?;
    let rows: Vec<serde_json::Value> = tree
        .nodes
        .iter()
        .map(|n| serde_json::json!([n.generation, n.point.re, n.point.im]))
        .collect();
    Ok(serde_json::Value::Array(rows).to_string())
}

/// Empirical shadowing constant over a dyadic grid, as a JSON object with
/// the sup, grid/depth parameters and the theoretical constants when the
/// map is a power map.
#[wasm_bindgen]
pub fn shadow_summary_json(
    theta: f64,
    zeros: &[f64],
    p_re: f64,
    p_im: f64,
    depth: usize,
    i_max: usize,
    angles_per_circle: usize,
) -> Result<String, JsError> {
    let g = BlaschkeProduct::new(theta, complex_pairs(zeros)?).map_err(js)?;
    let grid = SampleGrid::dyadic(i_max, angles_per_circle).map_err(js)?;
    let report =
        empirical_constant(&g, Complex64::new(p_re, p_im), depth, &grid).map_err(js)?;
    let theoretical = report.theoretical.map(|t| {
        serde_json::json!({
            "sigma": t.sigma,
            "c_prime": t.c_prime,
            "c_doubleprime": t.c_doubleprime,
            "c0": t.c0,
        })
    });
    Ok(serde_json::json!({
        "empirical_sup": report.empirical_sup,
        "depth": report.depth,
        "samples": report.records.len(),
        "shallow_tree_warning": report.shallow_tree_warning,
        "theoretical": theoretical,
    })
    .to_string())
}
