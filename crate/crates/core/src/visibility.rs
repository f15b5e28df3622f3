//! Fringe visibility under Gaussian phase noise proportional to the
//! diffraction order: `V(p) = V_max·exp(−⟨Φ₁²⟩·p²/2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VisibilityModel {
    pub v_max: f64,
    /// Mean square phase noise at first order, rad².
    pub phi1_sq: f64,
    pub v_max_sigma: Option<f64>,
    pub phi1_sq_sigma: Option<f64>,
}

impl VisibilityModel {
    pub fn new(v_max: f64, phi1_sq: f64) -> Result<Self> {
        if !(v_max > 0.0 && v_max <= 1.0) {
            return Err(Error::Domain(format!("v_max must be in (0, 1], got {v_max}")));
        }
        if !(phi1_sq.is_finite() && phi1_sq >= 0.0) {
            return Err(Error::Domain(format!("phi1_sq must be >= 0, got {phi1_sq}")));
        }
        Ok(Self {
            v_max,
            phi1_sq,
            v_max_sigma: None,
            phi1_sq_sigma: None,
        })
    }
}

pub fn visibility(model: &VisibilityModel, order: u32) -> f64 {
    let p = order as f64;
    model.v_max * (-model.phi1_sq * p * p / 2.0).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VisibilityPoint {
    pub order: u32,
    pub visibility: f64,
    pub sigma: Option<f64>,
}

/// Fits the model by weighted linear regression of `ln V` on `p²`.
///
/// With per-point `sigma` the weights are `(V/σ)²` and the parameter errors
/// come straight from the regression covariance. Without them the fit is
/// unweighted and the covariance is scaled by the residual variance, which
/// needs at least three points; with two points the uncertainties are left
/// empty.
pub fn fit_visibility(data: &[VisibilityPoint]) -> Result<VisibilityModel> {
    let mut orders: Vec<u32> = data.iter().map(|d| d.order).collect();
    orders.sort_unstable();
    orders.dedup();
    if orders.len() < 2 {
        return Err(Error::Fit("need at least two distinct diffraction orders".into()));
    }
    let weighted = data.iter().all(|d| d.sigma.is_some());
    let mut rows = Vec::with_capacity(data.len());
    for d in data {
        if !(d.visibility > 0.0 && d.visibility <= 1.0) {
            return Err(Error::Fit(format!(
                "visibility {} at order {} outside (0, 1]",
                d.visibility, d.order
            )));
        }
        let w = match (weighted, d.sigma) {
            (true, Some(s)) if s > 0.0 && s.is_finite() => (d.visibility / s).powi(2),
            (true, _) => return Err(Error::Fit(format!("invalid sigma at order {}", d.order))),
            (false, _) => 1.0,
        };
        let p = d.order as f64;
        rows.push((p * p, d.visibility.ln(), w));
    }

    let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x, y, w) in &rows {
        sw += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
    }
    let det = sw * sxx - sx * sx;
    if !(det > 1e-12 * sw * sxx) {
        return Err(Error::Fit("degenerate design matrix".into()));
    }
    let intercept = (sxx * sy - sx * sxy) / det;
    let slope = (sw * sxy - sx * sy) / det;

    let mut var_intercept = sxx / det;
    let mut var_slope = sw / det;
    let mut have_errors = true;
    if !weighted {
        let dof = rows.len() as f64 - 2.0;
        if dof > 0.0 {
            let rss: f64 = rows
                .iter()
                .map(|&(x, y, _)| (y - intercept - slope * x).powi(2))
                .sum();
            var_intercept *= rss / dof;
            var_slope *= rss / dof;
        } else {
            have_errors = false;
        }
    }

    let v_max = intercept.exp();
    let phi1_sq = -2.0 * slope;
    if phi1_sq < 0.0 {
        return Err(Error::Fit(format!(
            "visibility grows with order (fitted phi1_sq = {phi1_sq:.4})"
        )));
    }
    Ok(VisibilityModel {
        v_max,
        phi1_sq,
        v_max_sigma: have_errors.then(|| v_max * var_intercept.sqrt()),
        phi1_sq_sigma: have_errors.then(|| 2.0 * var_slope.sqrt()),
    })
}
