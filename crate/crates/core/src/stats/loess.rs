//! LOESS: local linear regression with tricube weights.

use crate::error::{Error, Result};

/// Fits local linear regressions over the ⌈span·n⌉ nearest neighbors of each
/// query point, weighted by the tricube kernel. Neighborhoods with no x
/// spread fall back to the local (weighted) mean.
pub fn loess(x: &[f64], y: &[f64], span: f64, query: &[f64]) -> Result<Vec<f64>> {
    if !(span > 0.0 && span <= 1.0) {
        return Err(Error::BadSpan(span));
    }
    if x.len() != y.len() || x.len() < 5 {
        return Err(Error::TooFewObservations {
            context: "loess",
            needed: 5,
            got: x.len().min(y.len()),
        });
    }
    if x.iter().chain(y).chain(query).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput("loess"));
    }
    let n = x.len();
    let q = ((span * n as f64).ceil() as usize).clamp(2, n);

    let mut fitted = Vec::with_capacity(query.len());
    for &x0 in query {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            let da = (x[a] - x0).abs();
            let db = (x[b] - x0).abs();
            da.partial_cmp(&db).unwrap().then(a.cmp(&b))
        });
        let neighbors = &order[..q];
        let d_max = (x[neighbors[q - 1]] - x0).abs();

        let mut sw = 0.0;
        let mut swx = 0.0;
        let mut swy = 0.0;
        let mut swxx = 0.0;
        let mut swxy = 0.0;
        for &i in neighbors {
            let w = if d_max > 0.0 {
                let u = ((x[i] - x0).abs() / d_max).min(1.0);
                let t = 1.0 - u * u * u;
                t * t * t
            } else {
                1.0
            };
            sw += w;
            swx += w * x[i];
            swy += w * y[i];
            swxx += w * x[i] * x[i];
            swxy += w * x[i] * y[i];
        }
        if sw <= 0.0 {
            // All neighbors sat exactly on the kernel boundary; average them.
            let m = neighbors.iter().map(|&i| y[i]).sum::<f64>() / q as f64;
            fitted.push(m);
            continue;
        }
        // Weighted variance of x in the window decides whether a slope is
        // identifiable.
        let det = sw * swxx - swx * swx;
        let scale = sw * swxx.abs().max(1.0);
        if det.abs() <= 1e-12 * scale {
            fitted.push(swy / sw);
        } else {
            let slope = (sw * swxy - swx * swy) / det;
            let intercept = (swy - slope * swx) / sw;
            fitted.push(intercept + slope * x0);
        }
    }
    Ok(fitted)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_a_global_line() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
        let fit = loess(&x, &y, 0.75, &x).unwrap();
        for (f, expected) in fit.iter().zip(&y) {
            assert!((f - expected).abs() < 1e-8);
        }
    }

    #[test]
    fn constant_y_gives_constant_fit() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y = vec![3.5; 10];
        let fit = loess(&x, &y, 0.5, &[0.0, 4.5, 9.0]).unwrap();
        for f in fit {
            assert!((f - 3.5).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_direct_weighted_least_squares() {
        // Independent oracle: build the tricube-weighted normal equations on
        // centered coordinates and solve by Cramer's rule.
        let x = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let y = [0.0, 0.8, 1.8, 3.2, 3.9, 4.4, 6.5];
        let span = 0.75;
        let q = (span * x.len() as f64).ceil() as usize;

        let oracle = |x0: f64| -> f64 {
            let mut d: Vec<(f64, usize)> = x
                .iter()
                .enumerate()
                .map(|(i, &xi)| ((xi - x0).abs(), i))
                .collect();
            d.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let neighbors = &d[..q];
            let dmax = neighbors[q - 1].0;
            let mut s0 = 0.0;
            let mut s1 = 0.0;
            let mut s2 = 0.0;
            let mut t0 = 0.0;
            let mut t1 = 0.0;
            for &(dist, i) in neighbors {
                let u = (dist / dmax).min(1.0);
                let w = (1.0 - u.powi(3)).powi(3);
                let c = x[i] - x0;
                s0 += w;
                s1 += w * c;
                s2 += w * c * c;
                t0 += w * y[i];
                t1 += w * c * y[i];
            }
            // Solve [s0 s1; s1 s2] [a; b] = [t0; t1]; prediction is a.
            let det = s0 * s2 - s1 * s1;
            if det.abs() < 1e-300 {
                t0 / s0
            } else {
                (t0 * s2 - t1 * s1) / det
            }
        };

        let queries = [0.5, 2.0, 3.3, 5.5];
        let fit = loess(&x, &y, span, &queries).unwrap();
        for (f, &x0) in fit.iter().zip(&queries) {
            assert!((f - oracle(x0)).abs() < 1e-8, "at {x0}: {f} vs {}", oracle(x0));
        }
    }

    #[test]
    fn degenerate_x_spread_falls_back_to_mean() {
        let x = [2.0, 2.0, 2.0, 2.0, 2.0];
        let y = [1.0, 2.0, 3.0, 4.0, 5.0];
        let fit = loess(&x, &y, 1.0, &[2.0]).unwrap();
        assert!((fit[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_span_and_short_input() {
        assert!(loess(&[1.0; 5], &[1.0; 5], 0.0, &[1.0]).is_err());
        assert!(loess(&[1.0, 2.0], &[1.0, 2.0], 0.5, &[1.0]).is_err());
    }
}
