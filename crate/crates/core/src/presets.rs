//! Hand-tuned parameter sets for the benchmark families.
//!
//! The values were tuned on instances that cannot be regenerated, so they are
//! opaque constants: nothing here is derived from an instance's μ or L, except
//! the `√σ` entries of the quadratic extra-point row.

use crate::error::{Error, Result};
use crate::solvers::{Method, OptParams, ViParams};

/// Method names accepted by the preset tables.
pub const VI_TABLE_METHODS: [&str; 6] = ["vanilla", "heavy-ball", "extragradient", "nesterov", "ogda", "extra-point"];
pub const OPT_TABLE_METHODS: [&str; 6] = [
    "gradient-descent",
    "heavy-ball",
    "extragradient",
    "nesterov",
    "ogda",
    "extra-point",
];

/// Tuned parameters for the linear VI family (`n = 20`, `σ ≈ 1e-2`). On the
/// orthant the extra-gradient and extra-point rows use the projected half-step.
pub fn vi_table(method: &str, constrained: bool) -> Option<(Method, ViParams)> {
    let pick = |u: f64, c: f64| if constrained { c } else { u };
    let p = |a, b, g, e, t| ViParams::new(a, b, g, e, t).expect("table values are nonnegative");
    Some(match method {
        "vanilla" => (Method::Vanilla, p(pick(0.0095, 0.0235), 0.0, 0.0, 0.0, 0.0)),
        "heavy-ball" => (
            Method::HeavyBall,
            p(pick(0.0119, 0.0188), 0.0, pick(0.0365, 0.0146), 0.0, 0.0),
        ),
        "extragradient" => (
            Method::ExtraGradient {
                restricted: constrained,
            },
            p(pick(0.021, 0.034), 0.0, 0.0, pick(0.021, 0.034), 0.0),
        ),
        "nesterov" => (Method::Nesterov, p(pick(0.0084, 0.0146), 0.175, 0.175, 0.0, 0.0)),
        "ogda" => (Method::Ogda, p(pick(0.019, 0.024), 0.0, 0.0, 0.0, pick(0.0117, 0.0234))),
        "extra-point" => (
            Method::ExtraPoint {
                restricted: constrained,
            },
            p(
                pick(0.021, 0.034),
                pick(0.3276, 0.34),
                pick(0.3276, 0.34),
                pick(0.0202, 0.0323),
                pick(0.0021, 0.0068),
            ),
        ),
        _ => return None,
    })
}

/// Tuned VI-method parameters for the quadratic (`quadratic = true`) and
/// logistic families; `gradient-descent` is the projection method on `∇f`.
pub fn opt_table_vi(method: &str, quadratic: bool) -> Option<(Method, ViParams)> {
    let pick = |q: f64, l: f64| if quadratic { q } else { l };
    let p = |a, b, g, e, t| ViParams::new(a, b, g, e, t).expect("table values are nonnegative");
    Some(match method {
        "gradient-descent" => (Method::Vanilla, p(pick(0.0407, 38.4615), 0.0, 0.0, 0.0, 0.0)),
        "heavy-ball" => (
            Method::HeavyBall,
            p(pick(0.0717, 9.8765), 0.0, pick(0.8349, 0.7778), 0.0, 0.0),
        ),
        "extragradient" => (
            Method::ExtraGradient { restricted: false },
            p(pick(0.021, 19.7), 0.0, 0.0, pick(0.021, 19.7), 0.0),
        ),
        "nesterov" => (
            Method::Nesterov,
            p(pick(0.0214, 28.5714), pick(0.9075, 0.455), pick(0.9075, 0.455), 0.0, 0.0),
        ),
        "ogda" => (Method::Ogda, p(pick(0.0387, 39.2), 0.0, 0.0, 0.0, pick(0.002, 0.2))),
        _ => return None,
    })
}

/// Tuned t₁…t₉ for the optimization extra-point scheme. The quadratic row
/// uses `t₇ = 1 − √σ`, `t₈ = √σ` of the instance. θ and C are filled in so
/// that `θ = 2t₉C` with `θ = 1 − t₇`; they only label the recorded potential.
pub fn opt_table_extra_point(quadratic: bool, sigma: f64) -> Result<OptParams> {
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(Error::invalid(format!("sigma must lie in (0, 1], got {sigma}")));
    }
    let t = if quadratic {
        let s = sigma.sqrt();
        [0.9538, 1.0 - 0.9538, 0.9, 0.0277, 6.3712, 6.9252, 1.0 - s, s, 0.0485]
    } else {
        [0.7363, 1.0 - 0.7363, 0.9, 0.0277, 5.5402, 6.6482, 0.6419, 1.0 - 0.6419, 71.6115]
    };
    let theta = 1.0 - t[6];
    OptParams::new(t, theta, theta / (2.0 * t[8]), t[2])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_listed_method_has_a_row() {
        for m in VI_TABLE_METHODS {
            assert!(vi_table(m, false).is_some() && vi_table(m, true).is_some());
        }
        for m in OPT_TABLE_METHODS.iter().filter(|m| **m != "extra-point") {
            assert!(opt_table_vi(m, true).is_some());
        }
        assert!(vi_table("gradient-descent", false).is_none());
    }

    #[test]
    fn extra_point_rows_satisfy_invariants() {
        opt_table_extra_point(true, 0.0024).unwrap().check_invariants().unwrap();
        opt_table_extra_point(false, 0.01).unwrap().check_invariants().unwrap();
    }

    #[test]
    fn constrained_rows_use_projected_half_step() {
        assert_eq!(vi_table("extra-point", true).unwrap().0, Method::ExtraPoint { restricted: true });
        assert_eq!(vi_table("extra-point", false).unwrap().1.tau, 0.0021);
    }
}
