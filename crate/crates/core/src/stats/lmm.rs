//! Cross-language linear mixed-effects regression, fitted by REML.
//!
//! Fixed effects and the residual variance are profiled out analytically;
//! the per-group relative covariance factor Λ (lower triangular, with
//! log-parameterized diagonal) is optimized by a derivative-free simplex
//! search. With V = σ²(I + ZΛΛᵀZᵀ) block-diagonal over groups, every
//! deviance evaluation reduces to q×q solves via the per-group sufficient
//! statistics ZᵀZ, ZᵀX and Zᵀy.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

use super::describe::standardize;
use super::ols::CoefficientEstimate;
use super::simplex::{nelder_mead, SimplexResult};
use super::DataTable;

const MAX_EVALUATIONS: usize = 5000;
const RELATIVE_TOLERANCE: f64 = 1e-8;
/// Initial relative covariance factor: identity scaled by 0.5.
const INITIAL_LAMBDA_SCALE: f64 = 0.5;
const SIMPLEX_STEP: f64 = 0.25;
/// Wald 95% interval half-width multiplier.
const WALD_Z: f64 = 1.96;

/// One regression of the battery: response, fixed effects (key predictor
/// first), per-language random slopes, and the control subset used by the
/// per-language OLS models.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegressionSpec {
    pub response: String,
    pub fixed: Vec<String>,
    pub random_slopes: Vec<String>,
    pub grouping: String,
    pub per_language_controls: Vec<String>,
}

impl RegressionSpec {
    /// The key predictor whose coefficient the analysis reports.
    pub fn predictor(&self) -> &str {
        &self.fixed[0]
    }

    /// Stable file-name stem, e.g. `mi_pc`.
    pub fn pair_name(&self) -> String {
        format!(
            "{}_{}",
            self.response.to_lowercase(),
            self.predictor().to_lowercase()
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.fixed.is_empty() && !self.random_slopes.is_empty() {
            return Err(Error::Config(
                "random slopes require fixed predictors".to_string(),
            ));
        }
        for slope in &self.random_slopes {
            if !self.fixed.contains(slope) {
                return Err(Error::Config(format!(
                    "random slope {slope:?} is not a fixed predictor"
                )));
            }
        }
        for control in &self.per_language_controls {
            if !self.fixed.contains(control) {
                return Err(Error::Config(format!(
                    "per-language control {control:?} is not a fixed predictor"
                )));
            }
        }
        Ok(())
    }
}

/// A fitted mixed model.
#[derive(Debug, Clone, Serialize)]
pub struct MixedModelFit {
    pub fixed: Vec<CoefficientEstimate>,
    /// Random-effect terms in Λ order: intercept first, then slopes.
    pub random_names: Vec<String>,
    /// Random-effect standard deviations plus the residual under "residual".
    pub random_sd: BTreeMap<String, f64>,
    /// Correlation matrix of the random effects (unit diagonal).
    pub random_corr: Vec<Vec<f64>>,
    pub reml_deviance: f64,
    pub converged: bool,
    pub n_obs: usize,
    pub n_groups: usize,
    pub evaluations: usize,
}

struct GroupStats {
    ztz: DMatrix<f64>,
    ztx: DMatrix<f64>,
    zty: DVector<f64>,
}

struct RemlProblem {
    xtx: DMatrix<f64>,
    xty: DVector<f64>,
    yty: f64,
    groups: Vec<GroupStats>,
    n: usize,
    p: usize,
    q: usize,
}

struct ProfiledFit {
    deviance: f64,
    beta: DVector<f64>,
    cov_beta: DMatrix<f64>,
    sigma2: f64,
}

impl RemlProblem {
    fn from_design(
        y: &[f64],
        x: &DMatrix<f64>,
        z: &DMatrix<f64>,
        group_of: &[usize],
        n_groups: usize,
    ) -> Self {
        let n = y.len();
        let p = x.ncols();
        let q = z.ncols();
        let y_vec = DVector::from_column_slice(y);
        let xtx = x.transpose() * x;
        let xty = x.transpose() * &y_vec;
        let yty = y_vec.dot(&y_vec);

        let mut groups: Vec<GroupStats> = (0..n_groups)
            .map(|_| GroupStats {
                ztz: DMatrix::zeros(q, q),
                ztx: DMatrix::zeros(q, p),
                zty: DVector::zeros(q),
            })
            .collect();
        for row in 0..n {
            let g = &mut groups[group_of[row]];
            for a in 0..q {
                let za = z[(row, a)];
                for b in 0..q {
                    g.ztz[(a, b)] += za * z[(row, b)];
                }
                for j in 0..p {
                    g.ztx[(a, j)] += za * x[(row, j)];
                }
                g.zty[a] += za * y[row];
            }
        }
        RemlProblem {
            xtx,
            xty,
            yty,
            groups,
            n,
            p,
            q,
        }
    }

    /// Profiled REML deviance and GLS quantities at a fixed Λ. Returns None
    /// when a factorization fails (treated as an infeasible point).
    fn profile(&self, lambda: &DMatrix<f64>) -> Option<ProfiledFit> {
        let q = self.q;
        let lambda_t = lambda.transpose();
        let mut a = self.xtx.clone();
        let mut b = self.xty.clone();
        let mut yvy = self.yty;
        let mut ldet_v = 0.0;

        for g in &self.groups {
            let m = DMatrix::identity(q, q) + &lambda_t * &g.ztz * lambda;
            let chol = Cholesky::new(m)?;
            ldet_v += 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
            let ax = &lambda_t * &g.ztx;
            let ay = &lambda_t * &g.zty;
            let m_inv_ax = chol.solve(&ax);
            let m_inv_ay = chol.solve(&ay);
            a -= ax.transpose() * &m_inv_ax;
            b -= ax.transpose() * &m_inv_ay;
            yvy -= ay.dot(&m_inv_ay);
        }

        let chol_a = Cholesky::new(a)?;
        let ldet_a = 2.0 * chol_a.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        let beta = chol_a.solve(&b);
        let df = (self.n - self.p) as f64;
        // Guard against a numerically negative residual quadratic form on
        // perfectly fitting toy data.
        let rvr = (yvy - b.dot(&beta)).max(1e-12 * self.yty.abs().max(1.0));
        let sigma2 = rvr / df;
        let deviance = df * (1.0 + (2.0 * PI * sigma2).ln()) + ldet_v + ldet_a;
        let cov_beta = chol_a.inverse() * sigma2;
        Some(ProfiledFit {
            deviance,
            beta,
            cov_beta,
            sigma2,
        })
    }
}

fn theta_len(q: usize) -> usize {
    q * (q + 1) / 2
}

/// Lower-triangular Λ from the packed parameter vector; diagonal entries are
/// exponentiated so they stay positive.
fn lambda_from_theta(theta: &[f64], q: usize) -> DMatrix<f64> {
    let mut lambda = DMatrix::zeros(q, q);
    let mut idx = 0;
    for i in 0..q {
        for j in 0..=i {
            lambda[(i, j)] = if i == j {
                theta[idx].clamp(-40.0, 40.0).exp()
            } else {
                theta[idx]
            };
            idx += 1;
        }
    }
    lambda
}

fn initial_theta(q: usize) -> Vec<f64> {
    let mut theta = vec![0.0; theta_len(q)];
    let mut idx = 0;
    for i in 0..q {
        for j in 0..=i {
            if i == j {
                theta[idx] = INITIAL_LAMBDA_SCALE.ln();
            }
            idx += 1;
        }
    }
    theta
}

fn optimize(problem: &RemlProblem, theta0: &[f64]) -> SimplexResult {
    nelder_mead(
        |theta| {
            problem
                .profile(&lambda_from_theta(theta, problem.q))
                .map(|fit| fit.deviance)
                .unwrap_or(f64::INFINITY)
        },
        theta0,
        SIMPLEX_STEP,
        MAX_EVALUATIONS,
        RELATIVE_TOLERANCE,
    )
}

struct BuiltDesign {
    y: Vec<f64>,
    x: DMatrix<f64>,
    z: DMatrix<f64>,
    fixed_names: Vec<String>,
    random_names: Vec<String>,
    group_of: Vec<usize>,
    n_groups: usize,
}

fn build_design(spec: &RegressionSpec, table: &DataTable) -> Result<BuiltDesign> {
    spec.validate()?;
    let n = table.n_rows();
    let p = spec.fixed.len() + 1;
    if n <= p + 1 {
        return Err(Error::TooFewObservations {
            context: "lmm",
            needed: p + 2,
            got: n,
        });
    }
    let groups = table.distinct_languages();
    if groups.len() < 2 {
        return Err(Error::TooFewGroups(groups.len()));
    }
    let group_index: BTreeMap<&str, usize> = groups
        .iter()
        .enumerate()
        .map(|(i, g)| (g.as_str(), i))
        .collect();
    let group_of: Vec<usize> = table
        .languages()
        .iter()
        .map(|l| group_index[l.as_str()])
        .collect();

    let y = table.column(&spec.response)?.to_vec();

    let mut std_cols: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for name in &spec.fixed {
        let col = table.column(name)?;
        std_cols.insert(name.as_str(), standardize(name, col)?);
    }

    let mut x = DMatrix::zeros(n, p);
    let mut fixed_names = vec!["(Intercept)".to_string()];
    for i in 0..n {
        x[(i, 0)] = 1.0;
    }
    for (j, name) in spec.fixed.iter().enumerate() {
        let col = &std_cols[name.as_str()];
        for i in 0..n {
            x[(i, j + 1)] = col[i];
        }
        fixed_names.push(name.clone());
    }

    let q = spec.random_slopes.len() + 1;
    let mut z = DMatrix::zeros(n, q);
    let mut random_names = vec!["(Intercept)".to_string()];
    for i in 0..n {
        z[(i, 0)] = 1.0;
    }
    for (j, name) in spec.random_slopes.iter().enumerate() {
        let col = &std_cols[name.as_str()];
        for i in 0..n {
            z[(i, j + 1)] = col[i];
        }
        random_names.push(name.clone());
    }

    check_full_rank(&x, &fixed_names)?;

    Ok(BuiltDesign {
        y,
        x,
        z,
        fixed_names,
        random_names,
        group_of,
        n_groups: groups.len(),
    })
}

fn check_full_rank(x: &DMatrix<f64>, names: &[String]) -> Result<()> {
    let p = x.ncols();
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
    Ok(())
}

/// Fits the spec on a long-format table. Predictors are standardized across
/// the whole table, the response is left on its original scale, and
/// fixed-effect inference is Wald-z. Boundary fits (σ → 0) are permitted;
/// `converged` is false when the simplex exhausts its evaluation budget.
pub fn lmm_fit(spec: &RegressionSpec, table: &DataTable) -> Result<MixedModelFit> {
    let design = build_design(spec, table)?;
    let problem = RemlProblem::from_design(
        &design.y,
        &design.x,
        &design.z,
        &design.group_of,
        design.n_groups,
    );

    let result = optimize(&problem, &initial_theta(problem.q));
    let lambda = lambda_from_theta(&result.x, problem.q);
    let fit = problem
        .profile(&lambda)
        .expect("optimum must be evaluable: the optimizer only returns visited points");

    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let fixed = design
        .fixed_names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let beta = fit.beta[j];
            let se = fit.cov_beta[(j, j)].max(0.0).sqrt();
            let p_raw = if se > 0.0 {
                2.0 * (1.0 - normal.cdf((beta / se).abs()))
            } else if beta == 0.0 {
                1.0
            } else {
                0.0
            };
            CoefficientEstimate {
                name: name.clone(),
                beta,
                se,
                ci_low: beta - WALD_Z * se,
                ci_high: beta + WALD_Z * se,
                p_raw,
                p_adj: None,
            }
        })
        .collect();

    // Random-effect covariance Σ = σ̂² Λ Λᵀ.
    let sigma = fit.sigma2.max(0.0).sqrt();
    let relative = &lambda * lambda.transpose();
    let q = problem.q;
    let sds: Vec<f64> = (0..q)
        .map(|i| (fit.sigma2 * relative[(i, i)]).max(0.0).sqrt())
        .collect();
    let mut random_corr = vec![vec![0.0; q]; q];
    for i in 0..q {
        for j in 0..q {
            if i == j {
                random_corr[i][j] = 1.0;
            } else {
                let denom = (relative[(i, i)] * relative[(j, j)]).sqrt();
                random_corr[i][j] = if denom > 0.0 {
                    (relative[(i, j)] / denom).clamp(-1.0, 1.0)
                } else {
                    0.0
                };
            }
        }
    }
    let mut random_sd: BTreeMap<String, f64> = design
        .random_names
        .iter()
        .cloned()
        .zip(sds)
        .collect();
    random_sd.insert("residual".to_string(), sigma);

    Ok(MixedModelFit {
        fixed,
        random_names: design.random_names,
        random_sd,
        random_corr,
        reml_deviance: fit.deviance,
        converged: result.converged,
        n_obs: problem.n,
        n_groups: design.n_groups,
        evaluations: result.evaluations,
    })
}
