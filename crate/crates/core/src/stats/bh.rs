//! Benjamini-Hochberg step-up adjustment.

use crate::error::{Error, Result};

/// Adjusts p-values for false discovery rate: sort ascending, scale by
/// m/rank, take the running minimum from the largest rank down, cap at 1 and
/// restore the input order.
pub fn benjamini_hochberg(p: &[f64]) -> Result<Vec<f64>> {
    for &v in p {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidPValue(v));
        }
    }
    let m = p.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].partial_cmp(&p[b]).unwrap().then(a.cmp(&b)));

    let mut adjusted = vec![0.0; m];
    let mut running = 1.0f64;
    for rank in (1..=m).rev() {
        let idx = order[rank - 1];
        let scaled = (p[idx] * m as f64 / rank as f64).min(1.0);
        running = running.min(scaled);
        adjusted[idx] = running;
    }
    Ok(adjusted)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_computed_example() {
        let adj = benjamini_hochberg(&[0.01, 0.02, 0.03, 0.04]).unwrap();
        for v in adj {
            assert!((v - 0.04).abs() < 1e-15);
        }
    }

    #[test]
    fn single_p_is_unchanged() {
        assert_eq!(benjamini_hochberg(&[0.3]).unwrap(), vec![0.3]);
    }

    #[test]
    fn equal_ps_stay_equal() {
        let adj = benjamini_hochberg(&[0.2, 0.2, 0.2]).unwrap();
        for v in adj {
            assert!((v - 0.2).abs() < 1e-15);
        }
    }

    #[test]
    fn adjusted_is_at_least_raw_and_capped() {
        let p = [0.001, 0.9, 0.04, 0.5, 1.0, 0.0];
        let adj = benjamini_hochberg(&p).unwrap();
        for (raw, a) in p.iter().zip(&adj) {
            assert!(a >= raw);
            assert!(*a <= 1.0);
        }
    }

    #[test]
    fn out_of_range_is_an_error() {
        assert!(benjamini_hochberg(&[0.5, 1.2]).is_err());
        assert!(benjamini_hochberg(&[-0.1]).is_err());
    }
}
