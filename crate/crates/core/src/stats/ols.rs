//! Ordinary least squares with t-based inference.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// One fitted coefficient with its confidence interval and p-values.
/// `p_adj` is filled in later by the multiple-comparison step.
#[derive(Debug, Clone, Serialize)]
pub struct CoefficientEstimate {
    pub name: String,
    pub beta: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub p_raw: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_adj: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OlsFit {
    pub coefficients: Vec<CoefficientEstimate>,
    pub sigma2: f64,
    pub r_squared: f64,
    pub df_resid: usize,
    pub n: usize,
}

impl OlsFit {
    pub fn coefficient(&self, name: &str) -> Option<&CoefficientEstimate> {
        self.coefficients.iter().find(|c| c.name == name)
    }
}

/// Least-squares fit of `y` on a design matrix that already contains its
/// intercept column. Standard errors come from σ̂²(XᵀX)⁻¹ and p-values from a
/// two-sided t-test on n − p degrees of freedom. A rank-deficient design is
/// an error listing the collinear columns.
pub fn ols_fit(y: &[f64], x: &DMatrix<f64>, names: &[String]) -> Result<OlsFit> {
    let n = x.nrows();
    let p = x.ncols();
    assert_eq!(names.len(), p, "one name per design column");
    if y.len() != n {
        return Err(Error::TooFewObservations {
            context: "ols response length",
            needed: n,
            got: y.len(),
        });
    }
    if n <= p {
        return Err(Error::TooFewObservations {
            context: "ols",
            needed: p + 1,
            got: n,
        });
    }

    let qr = x.clone().qr();
    let r = qr.r();
    let max_diag = (0..p).map(|j| r[(j, j)].abs()).fold(0.0f64, f64::max);
    let collinear: Vec<String> = (0..p)
        .filter(|&j| r[(j, j)].abs() <= 1e-10 * max_diag.max(1e-300))
        .map(|j| names[j].clone())
        .collect();
    if !collinear.is_empty() || max_diag == 0.0 {
        return Err(Error::RankDeficient { columns: collinear });
    }

    let y_vec = DVector::from_column_slice(y);
    let qty = qr.q().transpose() * &y_vec;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or(Error::RankDeficient { columns: vec![] })?;

    let residuals = &y_vec - x * &beta;
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let df_resid = n - p;
    let sigma2 = rss / df_resid as f64;

    // (XᵀX)⁻¹ = R⁻¹R⁻ᵀ from the triangular factor.
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .ok_or(Error::RankDeficient { columns: vec![] })?;
    let xtx_inv = &r_inv * r_inv.transpose();

    let mean_y = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean_y) * (v - mean_y)).sum();
    let r_squared = if tss > 0.0 { 1.0 - rss / tss } else { 1.0 };

    let t_dist = StudentsT::new(0.0, 1.0, df_resid as f64).expect("valid dof");
    let t_crit = t_dist.inverse_cdf(0.975);

    let coefficients = (0..p)
        .map(|j| {
            let se = (sigma2 * xtx_inv[(j, j)]).max(0.0).sqrt();
            let b = beta[j];
            let p_raw = if se > 0.0 {
                2.0 * (1.0 - t_dist.cdf((b / se).abs()))
            } else if b == 0.0 {
                1.0
            } else {
                0.0
            };
            CoefficientEstimate {
                name: names[j].clone(),
                beta: b,
                se,
                ci_low: b - t_crit * se,
                ci_high: b + t_crit * se,
                p_raw,
                p_adj: None,
            }
        })
        .collect();

    Ok(OlsFit {
        coefficients,
        sigma2,
        r_squared,
        df_resid,
        n,
    })
}

/// Stacks an intercept column with the given predictor columns.
pub fn design_with_intercept(columns: &[&[f64]]) -> DMatrix<f64> {
    let n = columns.first().map(|c| c.len()).unwrap_or(0);
    let mut x = DMatrix::zeros(n, columns.len() + 1);
    for i in 0..n {
        x[(i, 0)] = 1.0;
    }
    for (j, col) in columns.iter().enumerate() {
        assert_eq!(col.len(), n, "ragged design column");
        for i in 0..n {
            x[(i, j + 1)] = col[i];
        }
    }
    x
}
