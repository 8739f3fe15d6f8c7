//! Run configuration: a single JSON document per run. Complex numbers are
//! two-element arrays `[re, im]`; exactly one map specification must be
//! present.

use diskdyn_core::blaschke::BlaschkeProduct;
use diskdyn_core::polydyn::{Polynomial, Viewport};
use diskdyn_core::Complex64;
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Optional; must match the invoked subcommand when present.
    pub command: Option<String>,
    pub map: MapSpec,
    pub base_point: Option<[f64; 2]>,
    pub depth: Option<usize>,
    pub grid: Option<GridSpec>,
    pub epsilon: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub viewport: Option<ViewportSpec>,
    pub resolution: Option<[usize; 2]>,
    pub max_iter: Option<usize>,
    /// Depth of the inverse-orbit overlay for render; absent means none.
    pub overlay_depth: Option<usize>,
    pub output: Option<String>,
    /// Optional per-pixel CSV path for render.
    pub output_csv: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub blaschke: Option<BlaschkeSpec>,
    pub polynomial: Option<PolynomialSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlaschkeSpec {
    pub theta: f64,
    pub zeros: Vec<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialSpec {
    pub coefficients: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub i_max: usize,
    pub angles_per_circle: usize,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViewportSpec {
    pub center: [f64; 2],
    pub width: f64,
    pub height: f64,
}

pub fn complex(pair: [f64; 2]) -> Result<Complex64, String> {
    if !pair[0].is_finite() || !pair[1].is_finite() {
        return Err(format!("non-finite complex entry [{}, {}]", pair[0], pair[1]));
    }
    Ok(Complex64::new(pair[0], pair[1]))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        let config: RunConfig =
            serde_json::from_str(text).map_err(|e| format!("config parse error: {e}"))?;
        let has_blaschke = config.map.blaschke.is_some();
        let has_poly = config.map.polynomial.is_some();
        if has_blaschke == has_poly {
            return Err("config must contain exactly one map specification".into());
        }
        Ok(config)
    }

    pub fn blaschke(&self) -> Result<BlaschkeProduct, String> {
        let spec = self
            .map
            .blaschke
            .as_ref()
            .ok_or("this command needs a blaschke map specification")?;
        let zeros = spec
            .zeros
            .iter()
            .map(|&z| complex(z))
            .collect::<Result<Vec<_>, _>>()?;
        BlaschkeProduct::new(spec.theta, zeros).map_err(|e| e.to_string())
    }

    pub fn polynomial(&self) -> Result<Polynomial, String> {
        let spec = self
            .map
            .polynomial
            .as_ref()
            .ok_or("this command needs a polynomial map specification")?;
        let coeffs = spec
            .coefficients
            .iter()
            .map(|&c| complex(c))
            .collect::<Result<Vec<_>, _>>()?;
        Polynomial::new(coeffs).map_err(|e| e.to_string())
    }

    pub fn base_point(&self) -> Result<Complex64, String> {
        complex(self.base_point.ok_or("config is missing base_point")?)
    }

    pub fn viewport(&self) -> Result<Viewport, String> {
        let spec = self.viewport.ok_or("config is missing viewport")?;
        Viewport::new(complex(spec.center)?, spec.width, spec.height).map_err(|e| e.to_string())
    }
}

/// 17 significant digits: lossless round trip for f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
