//! The fixed battery of six regressions: one per variable pair, each with
//! its controls, per-language random effects, and the control subset used by
//! the per-language models. Languages do not differ in mean word frequency,
//! so mean(FR) never appears as a predictor.

use super::lmm::RegressionSpec;

fn spec(
    response: &str,
    fixed: &[&str],
    random_slopes: &[&str],
    per_language_controls: &[&str],
) -> RegressionSpec {
    RegressionSpec {
        response: response.to_string(),
        fixed: fixed.iter().map(|s| s.to_string()).collect(),
        random_slopes: random_slopes.iter().map(|s| s.to_string()).collect(),
        grouping: "language".to_string(),
        per_language_controls: per_language_controls.iter().map(|s| s.to_string()).collect(),
    }
}

/// The six cross-language models. The key predictor comes first in `fixed`;
/// the per-language OLS models use the key predictor plus
/// `per_language_controls` only.
pub fn build_spec_battery() -> Vec<RegressionSpec> {
    vec![
        spec(
            "MI",
            &["PC", "FR", "mean(PC)", "WL", "mean(WL)"],
            &["PC", "FR", "WL"],
            &["FR", "WL"],
        ),
        spec("PC", &["WL", "mean(WL)"], &["WL"], &[]),
        spec("MI", &["FR"], &["FR"], &[]),
        spec("PC", &["FR", "WL", "mean(WL)"], &["FR", "WL"], &["WL"]),
        spec("MI", &["WL", "FR", "mean(WL)"], &["WL", "FR"], &["FR"]),
        spec("WL", &["FR"], &["FR"], &[]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_specs_with_expected_shape() {
        let battery = build_spec_battery();
        assert_eq!(battery.len(), 6);
        for spec in &battery {
            spec.validate().unwrap();
            assert_eq!(spec.grouping, "language");
            assert!(!spec.fixed.contains(&"mean(FR)".to_string()));
        }
    }

    #[test]
    fn first_spec_is_mi_on_pc_with_full_controls() {
        let battery = build_spec_battery();
        assert_eq!(battery[0].response, "MI");
        assert_eq!(battery[0].predictor(), "PC");
        for name in ["PC", "FR", "WL", "mean(PC)", "mean(WL)"] {
            assert!(battery[0].fixed.contains(&name.to_string()));
        }
        assert_eq!(battery[0].random_slopes, vec!["PC", "FR", "WL"]);
    }

    #[test]
    fn last_spec_is_wl_on_fr_with_fr_slope_only() {
        let battery = build_spec_battery();
        let spec = &battery[5];
        assert_eq!(spec.response, "WL");
        assert_eq!(spec.fixed, vec!["FR"]);
        assert_eq!(spec.random_slopes, vec!["FR"]);
        assert!(spec.per_language_controls.is_empty());
    }

    #[test]
    fn pair_names_are_stable() {
        let names: Vec<String> = build_spec_battery().iter().map(|s| s.pair_name()).collect();
        assert_eq!(
            names,
            vec!["mi_pc", "pc_wl", "mi_fr", "pc_fr", "mi_wl", "wl_fr"]
        );
    }
}
