//! The positive cone `M = (0, ∞)ⁿ` with its group-invariant metric.
//!
//! The scalar product at `x` is `(ξ, η)_x = (x⁻¹ξ, x⁻¹η)`, which makes `ln`
//! an isometry onto Euclidean `ℝⁿ`. Geodesics are `x₂ᵗ x₁¹⁻ᵗ`, the exponential
//! map is `x e^{tξ}`, and `τ_g(x) = x / g²` acts by isometries.
//!
//! Every operation here is a pure function of its inputs.

use std::ops::Index;

use crate::error::{check_dim, Error, Result};

/// Smallest component accepted by [`PositiveVector`].
pub const MIN_COMPONENT: f64 = 1e-300;
/// Largest component accepted by [`PositiveVector`].
pub const MAX_COMPONENT: f64 = 1e300;
/// Default finite-difference step of [`geodesic_residual`].
pub const DEFAULT_RESIDUAL_STEP: f64 = 1e-4;
/// Componentwise relative tolerance used by [`PositiveVector::approx_eq`]
/// when callers need "equal to rounding".
pub const EQUALITY_RTOL: f64 = 1e-12;

/// A point of the positive cone.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveVector(Vec<f64>);

impl PositiveVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("positive vector"));
        }
        for (index, &value) in values.iter().enumerate() {
            if !(MIN_COMPONENT..=MAX_COMPONENT).contains(&value) {
                return Err(Error::NotPositive { index, value });
            }
        }
        Ok(Self(values))
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec())
    }

    /// Maps log-coordinates back onto the cone.
    pub fn from_logs(logs: &[f64]) -> Result<Self> {
        Self::new(logs.iter().map(|l| l.exp()).collect())
    }

    /// The identity element `e = (1, …, 1)`.
    pub fn ones(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Componentwise natural logarithm.
    pub fn logs(&self) -> Vec<f64> {
        self.0.iter().map(|v| v.ln()).collect()
    }

    /// Componentwise equality up to relative tolerance `rtol`.
    pub fn approx_eq(&self, other: &Self, rtol: f64) -> bool {
        self.dim() == other.dim()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|(a, b)| (a - b).abs() <= rtol * a.abs().max(b.abs()))
    }
}

impl Index<usize> for PositiveVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for PositiveVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

/// An element of the tangent space `TM_x ≅ ℝⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector(Vec<f64>);

impl TangentVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("tangent vector"));
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self(values))
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Euclidean norm, i.e. the length at the identity `e`.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Geodesic distance `sqrt(Σ (ln x1(i) − ln x2(i))²)`.
pub fn log_distance(x1: &PositiveVector, x2: &PositiveVector) -> Result<f64> {
    Ok(log_distance_sq(x1, x2)?.sqrt())
}

/// Squared geodesic distance.
pub fn log_distance_sq(x1: &PositiveVector, x2: &PositiveVector) -> Result<f64> {
    check_dim(x1.dim(), x2.dim())?;
    Ok(x1
        .0
        .iter()
        .zip(&x2.0)
        .map(|(a, b)| {
            let d = a.ln() - b.ln();
            d * d
        })
        .sum())
}

/// Point at parameter `t` on the geodesic through `x1` (t = 0) and `x2` (t = 1),
/// evaluated as `x2ᵗ · x1¹⁻ᵗ`. Values of `t` outside `[0, 1]` extrapolate.
pub fn geodesic(x1: &PositiveVector, x2: &PositiveVector, t: f64) -> Result<PositiveVector> {
    check_dim(x1.dim(), x2.dim())?;
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("geodesic parameter t = {t}")));
    }
    let s = 1.0 - t;
    PositiveVector::new(
        x1.0.iter()
            .zip(&x2.0)
            .map(|(a, b)| b.powf(t) * a.powf(s))
            .collect(),
    )
}

/// Central-difference estimate of `ẍ − x⁻¹ẋ²` along [`geodesic`] at `t`.
///
/// The increments `x(t ± h) − x(t)` are evaluated as `x(t)·expm1(±h ln(x2/x1))`,
/// which equals the difference of the closed-form curve without the cancellation
/// of subtracting two nearly equal samples. The residual is then dominated by
/// the `O(h²)` truncation error of the stencil.
pub fn geodesic_residual(x1: &PositiveVector, x2: &PositiveVector, t: f64, h: f64) -> Result<Vec<f64>> {
    check_dim(x1.dim(), x2.dim())?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("step h = {h} must be positive")));
    }
    if !(t - h > 0.0 && t + h < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "t = {t} is too close to the endpoints for step h = {h}"
        )));
    }
    let mid = geodesic(x1, x2, t)?;
    Ok(x1
        .0
        .iter()
        .zip(&x2.0)
        .zip(&mid.0)
        .map(|((a, b), &x)| {
            let rate = (b / a).ln();
            let up = x * (h * rate).exp_m1();
            let down = x * (-h * rate).exp_m1();
            let second = (up + down) / (h * h);
            let first = (up - down) / (2.0 * h);
            second - first * first / x
        })
        .collect())
}

/// Exponential map `x · e^{tξ}` (componentwise).
pub fn exp_map(x: &PositiveVector, xi: &TangentVector, t: f64) -> Result<PositiveVector> {
    check_dim(x.dim(), xi.dim())?;
    PositiveVector::new(
        x.0.iter()
            .zip(&xi.0)
            .map(|(v, d)| v * (t * d).exp())
            .collect(),
    )
}

/// Group action `τ_g(x) = g⁻¹ x g⁻¹ = x / g²`.
///
/// Group elements are stored as positive vectors: the action only depends
/// on `g²`, so the sign of a component never matters.
pub fn group_action(g: &PositiveVector, x: &PositiveVector) -> Result<PositiveVector> {
    check_dim(g.dim(), x.dim())?;
    PositiveVector::new(x.0.iter().zip(&g.0).map(|(v, gi)| v / gi / gi).collect())
}

/// Componentwise geometric mean `(∏ⱼ xⱼ)^{1/K}`, the minimizer of
/// `Σⱼ d(·, xⱼ)²` over the cone.
pub fn geometric_mean(points: &[PositiveVector]) -> Result<PositiveVector> {
    let first = points.first().ok_or(Error::Empty("point list"))?;
    let n = first.dim();
    let mut sums = vec![0.0; n];
    for p in points {
        check_dim(n, p.dim())?;
        for (s, v) in sums.iter_mut().zip(&p.0) {
            *s += v.ln();
        }
    }
    let k = points.len() as f64;
    PositiveVector::new(sums.into_iter().map(|s| (s / k).exp()).collect())
}

/// Result of [`semi_parallelogram_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct SemiParallelogram {
    /// `z = sqrt(x1·x2)`, the geodesic midpoint.
    pub midpoint: PositiveVector,
    /// `2d(y,x1)² + 2d(y,x2)² − d(x1,x2)² − 4d(z,y)²`; never negative.
    /// The metric is flat, so it vanishes up to rounding.
    pub slack: f64,
}

pub fn semi_parallelogram_check(
    x1: &PositiveVector,
    x2: &PositiveVector,
    y: &PositiveVector,
) -> Result<SemiParallelogram> {
    check_dim(x1.dim(), x2.dim())?;
    check_dim(x1.dim(), y.dim())?;
    let midpoint = PositiveVector::new(
        x1.0.iter()
            .zip(&x2.0)
            .map(|(a, b)| a.sqrt() * b.sqrt())
            .collect(),
    )?;
    let slack = 2.0 * log_distance_sq(y, x1)? + 2.0 * log_distance_sq(y, x2)?
        - log_distance_sq(x1, x2)?
        - 4.0 * log_distance_sq(&midpoint, y)?;
    Ok(SemiParallelogram { midpoint, slack })
}

/// Transported scalar product `(a, b)_x = (x⁻¹a, x⁻¹b)` on `TM_x`.
pub fn tangent_inner(x: &PositiveVector, a: &TangentVector, b: &TangentVector) -> Result<f64> {
    check_dim(x.dim(), a.dim())?;
    check_dim(x.dim(), b.dim())?;
    Ok(x.0
        .iter()
        .zip(a.0.iter().zip(&b.0))
        .map(|(xi, (ai, bi))| (ai / xi) * (bi / xi))
        .sum())
}

/// Compares `(ν, ν)` at the identity with `(ν e^ξ, ν e^ξ)` at `e^ξ`, i.e. the
/// derivative of the exponential map pushing `ν` forward. Returns `(lhs, rhs)`.
pub fn metric_preservation_check(xi: &TangentVector, nu: &TangentVector) -> Result<(f64, f64)> {
    check_dim(xi.dim(), nu.dim())?;
    let identity = PositiveVector::ones(xi.dim())?;
    let lhs = tangent_inner(&identity, nu, nu)?;
    let base = exp_map(&identity, xi, 1.0)?;
    let pushed = TangentVector::new(nu.0.iter().zip(&base.0).map(|(v, b)| v * b).collect())?;
    let rhs = tangent_inner(&base, &pushed, &pushed)?;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn pv(v: &[f64]) -> PositiveVector {
        PositiveVector::from_slice(v).unwrap()
    }

    fn tv(v: &[f64]) -> TangentVector {
        TangentVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn construction_rejects_out_of_range() {
        assert!(matches!(
            PositiveVector::new(vec![1.0, 0.0]),
            Err(Error::NotPositive { index: 1, .. })
        ));
        assert!(PositiveVector::new(vec![-1.0]).is_err());
        assert!(PositiveVector::new(vec![f64::NAN]).is_err());
        assert!(PositiveVector::new(vec![1e-301]).is_err());
        assert!(PositiveVector::new(vec![2e300]).is_err());
        assert!(PositiveVector::new(vec![]).is_err());
        assert!(TangentVector::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn distance_examples() {
        assert_eq!(log_distance(&pv(&[1.0, 1.0]), &pv(&[1.0, 1.0])).unwrap(), 0.0);
        let e2 = 2f64.exp();
        assert_relative_eq!(log_distance(&pv(&[1.0]), &pv(&[e2])).unwrap(), 2.0, max_relative = 1e-15);
        // sqrt(2)·ln 4, evaluated at 30 digits
        assert_relative_eq!(
            log_distance(&pv(&[2.0, 8.0]), &pv(&[8.0, 2.0])).unwrap(),
            1.960_516_286_937_094_4,
            max_relative = 1e-15
        );
        assert_eq!(
            log_distance(&pv(&[1.0]), &pv(&[1.0, 2.0])),
            Err(Error::DimensionMismatch { expected: 1, found: 2 })
        );
    }

    #[test]
    fn geodesic_examples() {
        let x1 = pv(&[1.0, 4.0]);
        let x2 = pv(&[4.0, 1.0]);
        assert_eq!(geodesic(&x1, &x2, 0.0).unwrap(), x1);
        assert_eq!(geodesic(&x1, &x2, 1.0).unwrap(), x2);
        assert!(geodesic(&x1, &x2, 0.5).unwrap().approx_eq(&pv(&[2.0, 2.0]), 1e-15));
        let g = geodesic(&pv(&[1.0]), &pv(&[std::f64::consts::E]), 0.3).unwrap();
        assert_relative_eq!(g[0], 1.349_858_807_576_003_1, max_relative = 1e-15);
        assert!(geodesic(&x1, &pv(&[1.0]), 0.5).is_err());
    }

    #[test]
    fn geodesic_residual_examples() {
        let x = pv(&[3.0, 0.2]);
        assert!(geodesic_residual(&x, &x, 0.5, DEFAULT_RESIDUAL_STEP)
            .unwrap()
            .iter()
            .all(|r| *r == 0.0));

        let r = geodesic_residual(&pv(&[1.0]), &pv(&[std::f64::consts::E]), 0.5, 1e-4).unwrap();
        assert!(r[0].abs() <= 1e-6, "{r:?}");

        let (x1, x2) = (pv(&[0.5, 7.0]), pv(&[9.0, 0.1]));
        let coarse = max_abs(&geodesic_residual(&x1, &x2, 0.4, 1e-2).unwrap());
        let fine = max_abs(&geodesic_residual(&x1, &x2, 0.4, 5e-3).unwrap());
        let ratio = coarse / fine;
        assert!((3.9..4.1).contains(&ratio), "ratio {ratio}");

        assert!(geodesic_residual(&x1, &x2, 0.5e-4, 1e-4).is_err());
        assert!(geodesic_residual(&x1, &x2, 1.0 - 1e-5, 1e-4).is_err());
        assert!(geodesic_residual(&x1, &x2, 0.5, 0.0).is_err());
    }

    fn max_abs(v: &[f64]) -> f64 {
        v.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    #[test]
    fn exp_map_examples() {
        let x = pv(&[2.0, 0.5]);
        assert_eq!(exp_map(&x, &TangentVector::zeros(2).unwrap(), 1.0).unwrap(), x);
        let e = std::f64::consts::E;
        assert_eq!(exp_map(&pv(&[1.0, 1.0]), &tv(&[1.0, 1.0]), 1.0).unwrap(), pv(&[e, e]));
        assert!(exp_map(&x, &tv(&[1.0]), 1.0).is_err());
    }

    #[test]
    fn group_action_examples() {
        let x = pv(&[2.0, 0.3, 7.0]);
        assert_eq!(group_action(&PositiveVector::ones(3).unwrap(), &x).unwrap(), x);
        let root = pv(&x.values().iter().map(|v| v.sqrt()).collect::<Vec<_>>());
        assert!(group_action(&root, &x)
            .unwrap()
            .approx_eq(&PositiveVector::ones(3).unwrap(), 1e-15));
    }

    #[test]
    fn geometric_mean_examples() {
        let x = pv(&[3.0, 5.0]);
        assert!(geometric_mean(std::slice::from_ref(&x)).unwrap().approx_eq(&x, 1e-15));
        assert!(geometric_mean(&[pv(&[2.0]), pv(&[8.0])]).unwrap().approx_eq(&pv(&[4.0]), 1e-15));
        let g = geometric_mean(&[pv(&[1.0]), pv(&[2.0]), pv(&[4.0])]).unwrap();
        assert_relative_eq!(g[0], 2.0, max_relative = 1e-15);
        assert_eq!(geometric_mean(&[]), Err(Error::Empty("point list")));
        assert!(geometric_mean(&[pv(&[1.0]), pv(&[1.0, 2.0])]).is_err());
    }

    #[test]
    fn geometric_mean_beats_log_grid() {
        // brute force over a log-grid around the candidate
        let pts = [pv(&[1.0]), pv(&[2.0]), pv(&[4.0])];
        let cost = |c: f64| -> f64 { pts.iter().map(|p| (p[0] / c).ln().powi(2)).sum() };
        let best = (0..=4000)
            .map(|i| (-2.0 + i as f64 * 1e-3).exp())
            .min_by(|a, b| cost(*a).total_cmp(&cost(*b)))
            .unwrap();
        assert_relative_eq!(best, 2.0, max_relative = 1e-3);
        assert!(cost(geometric_mean(&pts).unwrap()[0]) <= cost(best));
    }

    #[test]
    fn semi_parallelogram_examples() {
        let x1 = pv(&[1.0, 9.0]);
        let x2 = pv(&[4.0, 0.25]);
        let z = semi_parallelogram_check(&x1, &x2, &x1).unwrap().midpoint;
        assert!(z.approx_eq(&pv(&[2.0, 1.5]), 1e-15));
        let at_mid = semi_parallelogram_check(&x1, &x2, &z).unwrap();
        assert!(at_mid.slack.abs() <= 1e-12);
        assert_eq!(semi_parallelogram_check(&x1, &x1, &x1).unwrap().slack, 0.0);
    }

    #[test]
    fn metric_preservation_examples() {
        let nu = tv(&[1.0, -2.0, 0.5]);
        let (lhs, rhs) = metric_preservation_check(&TangentVector::zeros(3).unwrap(), &nu).unwrap();
        assert_eq!(lhs, 5.25);
        assert_eq!(rhs, 5.25);
        let (lhs, rhs) = metric_preservation_check(&nu, &TangentVector::zeros(3).unwrap()).unwrap();
        assert_eq!((lhs, rhs), (0.0, 0.0));
    }

    fn point(n: usize) -> impl Strategy<Value = PositiveVector> {
        prop::collection::vec(-8.0f64..8.0, n).prop_map(|l| PositiveVector::from_logs(&l).unwrap())
    }

    fn triple() -> impl Strategy<Value = (PositiveVector, PositiveVector, PositiveVector)> {
        (1usize..6).prop_flat_map(|n| (point(n), point(n), point(n)))
    }

    proptest! {
        #[test]
        fn metric_axioms((x, y, z) in triple()) {
            let dxy = log_distance(&x, &y).unwrap();
            prop_assert!(dxy >= 0.0);
            prop_assert_eq!(dxy, log_distance(&y, &x).unwrap());
            prop_assert_eq!(log_distance(&x, &x).unwrap(), 0.0);
            let slack = log_distance(&x, &z).unwrap() + log_distance(&z, &y).unwrap() - dxy;
            prop_assert!(slack >= -1e-12);
        }

        #[test]
        fn geodesic_is_additive((x1, x2, _) in triple(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            let d = log_distance(&x1, &x2).unwrap();
            let pa = geodesic(&x1, &x2, a).unwrap();
            let pb = geodesic(&x1, &x2, b).unwrap();
            let seg = log_distance(&pa, &pb).unwrap();
            prop_assert!((seg - (b - a) * d).abs() <= 1e-12 * (1.0 + d));
        }

        #[test]
        fn group_action_is_isometry((g, x, y) in triple()) {
            let before = log_distance(&x, &y).unwrap();
            let after = log_distance(&group_action(&g, &x).unwrap(), &group_action(&g, &y).unwrap()).unwrap();
            prop_assert!((before - after).abs() <= 1e-12 * (1.0 + before));
        }

        #[test]
        fn exp_map_moves_at_unit_speed(
            (x, logs) in (1usize..6).prop_flat_map(|n| (point(n), prop::collection::vec(-2.0f64..2.0, n))),
            t in -3.0f64..3.0,
        ) {
            let xi = TangentVector::new(logs).unwrap();
            let moved = exp_map(&x, &xi, t).unwrap();
            let d = log_distance(&x, &moved).unwrap();
            prop_assert!((d - t.abs() * xi.norm()).abs() <= 1e-12 * (1.0 + d));
        }
    }
}
