use serde::ser::{Serialize, SerializeStruct, Serializer};

use super::check_dim;
use crate::data::Sample;
use crate::error::{Error, Result};
use crate::estimator::{spatial_median, SolverConfig, SpatialMedianFit};
use crate::scalar::Scalar;
use crate::special::two_sided_p;

/// Result of the Benjamini–Hochberg step-up rule.
#[derive(Debug, Clone, PartialEq)]
pub struct BhOutcome {
    pub k_hat: usize,
    /// Rejected hypotheses, ascending indices.
    pub rejected: Vec<usize>,
    /// `P_(k̂)`, or 0 when nothing is rejected.
    pub threshold_p: f64,
}

/// Coordinate-wise screening of `H₀j: θ_j = θ₀j` with B-H control.
#[derive(Debug, Clone, PartialEq)]
pub struct FdrResult<T> {
    pub t_stats: Vec<T>,
    pub p_values: Vec<f64>,
    pub k_hat: usize,
    pub rejected: Vec<usize>,
    pub threshold_p: f64,
    pub alpha: f64,
}

impl<T: Scalar> Serialize for FdrResult<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("FdrResult", 5)?;
        st.serialize_field("alpha", &self.alpha)?;
        st.serialize_field("k_hat", &self.k_hat)?;
        st.serialize_field("threshold_p", &self.threshold_p)?;
        st.serialize_field("rejected", &self.rejected)?;
        st.serialize_field("p_values", &self.p_values)?;
        st.end()
    }
}

/// Benjamini–Hochberg: `k̂ = max{j : P_(j) ≤ αj/p}` (0 if none) and reject
/// every hypothesis with `P_j ≤ P_(k̂)`.
pub fn bh_fdr(p_values: &[f64], alpha: f64) -> Result<BhOutcome> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    if let Some((index, &value)) =
        p_values.iter().enumerate().find(|(_, v)| !(**v >= 0.0 && **v <= 1.0))
    {
        return Err(Error::InvalidPValue { index, value });
    }
    let m = p_values.len();
    let mut sorted = p_values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("validated p-values"));
    let k_hat = (1..=m)
        .rev()
        .find(|&j| sorted[j - 1] <= alpha * j as f64 / m as f64)
        .unwrap_or(0);
    if k_hat == 0 {
        return Ok(BhOutcome { k_hat, rejected: Vec::new(), threshold_p: 0.0 });
    }
    let threshold_p = sorted[k_hat - 1];
    let rejected = (0..m).filter(|&j| p_values[j] <= threshold_p).collect();
    Ok(BhOutcome { k_hat, rejected, threshold_p })
}

/// `T_j = √n(θ̂_j − θ₀j)/s_j` with `s_j² = ζ̂₁⁻²·B̂_jj`.
pub fn marginal_stats<T: Scalar>(
    sample: &Sample<T>,
    fit: &SpatialMedianFit<T>,
    theta0: &[T],
) -> Result<Vec<T>> {
    check_dim(sample.p(), theta0.len())?;
    check_dim(sample.p(), fit.theta_hat.len())?;
    let zeta = fit.zeta1_hat.ok_or(Error::ZeroScale(0))?;
    let sqrt_n = T::of_usize(sample.n()).sqrt();
    fit.theta_hat
        .iter()
        .zip(theta0)
        .zip(&fit.b_diag_hat)
        .enumerate()
        .map(|(j, ((&th, &t0), &b))| {
            if b <= T::zero() {
                return Err(Error::ZeroScale(j));
            }
            Ok(sqrt_n * (th - t0) * zeta / b.sqrt())
        })
        .collect()
}

/// Spatial median → marginal statistics → `P_j = 2Φ(−|T_j|)` → B-H.
pub fn fdr_screen<T: Scalar>(sample: &Sample<T>, theta0: &[T], alpha: f64) -> Result<FdrResult<T>> {
    let fit = spatial_median(sample, &SolverConfig::default())?;
    fdr_screen_with_fit(sample, &fit, theta0, alpha)
}

pub fn fdr_screen_with_fit<T: Scalar>(
    sample: &Sample<T>,
    fit: &SpatialMedianFit<T>,
    theta0: &[T],
    alpha: f64,
) -> Result<FdrResult<T>> {
    let t_stats = marginal_stats(sample, fit, theta0)?;
    let p_values: Vec<f64> = t_stats.iter().map(|t| two_sided_p(t.as_f64())).collect();
    let bh = bh_fdr(&p_values, alpha)?;
    Ok(FdrResult {
        t_stats,
        p_values,
        k_hat: bh.k_hat,
        rejected: bh.rejected,
        threshold_p: bh.threshold_p,
        alpha,
    })
}

#[cfg(test)]
mod unit {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bh_examples() {
        let r = bh_fdr(&[1.0; 5], 0.1).unwrap();
        assert_eq!((r.k_hat, r.rejected.len(), r.threshold_p), (0, 0, 0.0));
        let r = bh_fdr(&[0.01, 0.04, 0.10, 0.90], 0.2).unwrap();
        assert_eq!(r.k_hat, 3);
        assert_eq!(r.rejected, vec![0, 1, 2]);
        assert_eq!(r.threshold_p, 0.10);
        // order of input is irrelevant; ties share a fate
        let r = bh_fdr(&[0.9, 0.02, 0.02, 0.5], 0.1).unwrap();
        assert_eq!(r.rejected, vec![1, 2]);
        assert!(matches!(bh_fdr(&[0.5], 1.0), Err(Error::InvalidAlpha(_))));
        assert!(matches!(bh_fdr(&[1.5], 0.1), Err(Error::InvalidPValue { index: 0, .. })));
    }

    #[test]
    fn marginal_stats_zero_at_estimate() {
        let s = Sample::from_rows(&[[0.0, 1.0], [2.0, -1.0], [1.0, 3.0], [-1.0, 0.5]]).unwrap();
        let fit = spatial_median(&s, &SolverConfig::default()).unwrap();
        let t = marginal_stats(&s, &fit, &fit.theta_hat).unwrap();
        assert!(t.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn marginal_stats_univariate() {
        let s = Sample::from_rows(&[[1.0], [2.0], [4.0], [7.0], [11.0]]).unwrap();
        let fit = spatial_median(&s, &SolverConfig::default()).unwrap();
        let t = marginal_stats(&s, &fit, &[0.0]).unwrap();
        let expect = 5f64.sqrt() * fit.theta_hat[0] * fit.zeta1_hat.unwrap();
        assert!((t[0] - expect).abs() < 1e-14);
    }

    #[test]
    fn zero_scale_is_reported() {
        let s = Sample::from_rows(&[[1.0, 0.0], [2.0, 0.0], [4.0, 0.0]]).unwrap();
        let fit = spatial_median(&s, &SolverConfig::default()).unwrap();
        assert!(matches!(marginal_stats(&s, &fit, &[0.0, 0.0]), Err(Error::ZeroScale(1))));
    }

    #[test]
    fn wire_format() {
        let r = FdrResult::<f64> {
            t_stats: vec![3.0, 0.1],
            p_values: vec![0.001, 0.9],
            k_hat: 1,
            rejected: vec![0],
            threshold_p: 0.001,
            alpha: 0.1,
        };
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"alpha":0.1,"k_hat":1,"threshold_p":0.001,"rejected":[0],"p_values":[0.001,0.9]}"#
        );
    }

    proptest! {
        #[test]
        fn bh_threshold_is_the_largest_qualifying_index(
            ps in proptest::collection::vec(0.0f64..=1.0, 1..60),
            alpha in 0.01f64..0.5,
        ) {
            let r = bh_fdr(&ps, alpha).unwrap();
            let m = ps.len();
            let mut sorted = ps.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for j in (r.k_hat + 1)..=m {
                prop_assert!(sorted[j - 1] > alpha * j as f64 / m as f64);
            }
            if r.k_hat >= 1 {
                prop_assert!(r.threshold_p <= alpha * r.k_hat as f64 / m as f64);
                prop_assert_eq!(r.rejected.len(), ps.iter().filter(|&&v| v <= r.threshold_p).count());
            } else {
                prop_assert!(r.rejected.is_empty());
            }
        }

        #[test]
        fn p_values_decrease_in_abs_t(a in 0.0f64..8.0, b in 0.0f64..8.0) {
            prop_assume!((a - b).abs() > 1e-9);
            let (pa, pb) = (two_sided_p(a), two_sided_p(b));
            prop_assert!((0.0..=1.0).contains(&pa));
            if a < b { prop_assert!(pa > pb) } else { prop_assert!(pa < pb) }
        }
    }
}
