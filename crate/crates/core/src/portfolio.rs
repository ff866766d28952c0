//! Mean-variance portfolio selection in the logarithmic metric.
//!
//! A portfolio `w` (with `Σ wᵢ = 1`, shorts allowed) has weighted geometric
//! return `∏ Rᵢ^{wᵢ}`, log growth rate `wᵀμ` with `μ = E[ln R]`, and squared
//! l-distance to its l-mean `Var(Σ wᵢ ln Rᵢ) = wᵀΣw`. Minimizing that distance
//! at a fixed growth rate is the classical Markowitz problem on log-returns.

use nalgebra::{DMatrix, DVector, SVD};
use serde::Serialize;

use crate::cone::{PositiveVector, MAX_COMPONENT, MIN_COMPONENT};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{well_conditioned_eigen, SINGULAR_RATIO};
use crate::lmoments::LogMoments;

/// Tolerance on `Σ wᵢ = 1` for user-supplied weights.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Gross returns: `T` periods (rows) of `k` assets (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnsPanel {
    returns: DMatrix<f64>,
    labels: Vec<String>,
}

impl ReturnsPanel {
    pub fn new(returns: DMatrix<f64>, labels: Vec<String>) -> Result<Self> {
        let (t, k) = returns.shape();
        if t < 2 || k < 2 {
            return Err(Error::InvalidArgument(format!(
                "a returns panel needs at least 2 periods and 2 assets, got {t}×{k}"
            )));
        }
        check_dim(k, labels.len())?;
        for r in 0..t {
            for c in 0..k {
                let value = returns[(r, c)];
                if !(MIN_COMPONENT..=MAX_COMPONENT).contains(&value) {
                    return Err(Error::NotPositive { index: r * k + c, value });
                }
            }
        }
        Ok(Self { returns, labels })
    }

    /// Panel with labels `asset_1 … asset_k`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.first().map_or(0, Vec::len);
        for row in rows {
            check_dim(k, row.len())?;
        }
        let labels = (1..=k).map(|i| format!("asset_{i}")).collect();
        Self::new(DMatrix::from_fn(rows.len(), k, |r, c| rows[r][c]), labels)
    }

    pub fn returns(&self) -> &DMatrix<f64> {
        &self.returns
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn periods(&self) -> usize {
        self.returns.nrows()
    }

    pub fn assets(&self) -> usize {
        self.returns.ncols()
    }

    pub fn row(&self, t: usize) -> PositiveVector {
        PositiveVector::new(self.returns.row(t).iter().copied().collect()).expect("panel entries are positive")
    }

    /// Log-returns centered by column means and scaled by `1/√(T−1)`, so that
    /// `‖Z w‖² = Var(Σ wᵢ ln Rᵢ)` with the `T−1` divisor.
    fn scaled_centered_logs(&self) -> (DMatrix<f64>, DVector<f64>) {
        let mut logs = self.returns.map(f64::ln);
        let t = logs.nrows() as f64;
        let means = DVector::from_iterator(logs.ncols(), logs.column_iter().map(|c| c.sum() / t));
        for (j, m) in means.iter().enumerate() {
            logs.column_mut(j).add_scalar_mut(-m);
        }
        (logs / (t - 1.0).sqrt(), means)
    }
}

/// Portfolio weights summing to one; short positions allowed.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PortfolioWeights(Vec<f64>);

impl PortfolioWeights {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::Empty("portfolio weights"));
        }
        if let Some((index, &value)) = w.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        let total: f64 = w.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidWeights(format!("portfolio weights sum to {total}, not 1")));
        }
        Ok(Self(w))
    }

    /// All weight on asset `j`.
    pub fn single(k: usize, j: usize) -> Result<Self> {
        if j >= k {
            return Err(Error::InvalidArgument(format!("asset {j} out of range for {k} assets")));
        }
        let mut w = vec![0.0; k];
        w[j] = 1.0;
        Self::new(w)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn as_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontierPoint {
    pub target_mu: f64,
    pub weights: PortfolioWeights,
    pub log_variance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PortfolioStats {
    /// `wᵀμ`, the log rate of growth.
    pub log_growth: f64,
    /// `wᵀΣw`, the squared l-distance to the portfolio l-mean.
    pub log_variance: f64,
}

/// Column means of the log-returns and their sample covariance (divisor `T−1`).
pub fn estimate_log_moments(panel: &ReturnsPanel) -> LogMoments {
    let (z, means) = panel.scaled_centered_logs();
    let cov = z.transpose() * &z;
    let cov = (&cov + cov.transpose()) * 0.5;
    LogMoments::new(means, cov).expect("sample covariance is symmetric PSD")
}

pub fn portfolio_stats(moments: &LogMoments, w: &PortfolioWeights) -> Result<PortfolioStats> {
    check_dim(moments.dim(), w.len())?;
    let w = w.as_dvector();
    Ok(PortfolioStats {
        log_growth: w.dot(&moments.mean_log),
        log_variance: w.dot(&(&moments.cov_log * &w)),
    })
}

/// `∏ᵢ r(i)^{wᵢ}`, evaluated as `exp(Σ wᵢ ln r(i))`.
pub fn weighted_geometric_return(r: &PositiveVector, w: &PortfolioWeights) -> Result<f64> {
    check_dim(r.dim(), w.len())?;
    Ok(r.values()
        .iter()
        .zip(w.values())
        .map(|(ri, wi)| wi * ri.ln())
        .sum::<f64>()
        .exp())
}

fn check_nonconstant(mu: &DVector<f64>) -> Result<()> {
    let spread = mu.max() - mu.min();
    if spread <= 1e-12 * mu.amax().max(1.0) {
        Err(Error::DependentConstraints)
    } else {
        Ok(())
    }
}

/// `a = 1ᵀΣ⁻¹1`, `b = 1ᵀΣ⁻¹μ`, `c = μᵀΣ⁻¹μ`: the frontier in closed form is
/// `v(t) = (a t² − 2 b t + c) / (a c − b²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontierScalars {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl FrontierScalars {
    pub fn determinant(&self) -> f64 {
        self.a * self.c - self.b * self.b
    }

    /// Growth rate of the global minimum-variance portfolio.
    pub fn gmv_mu(&self) -> f64 {
        self.b / self.a
    }

    pub fn gmv_variance(&self) -> f64 {
        1.0 / self.a
    }

    pub fn variance_at(&self, target_mu: f64) -> f64 {
        (self.a * target_mu * target_mu - 2.0 * self.b * target_mu + self.c) / self.determinant()
    }
}

/// Minimizer together with the multipliers `λ` of `Σw = λ₁·1 + λ₂·μ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinLVarSolution {
    pub weights: PortfolioWeights,
    pub multipliers: [f64; 2],
    pub scalars: FrontierScalars,
}

impl MinLVarSolution {
    /// Max-norm of the stationarity residual `Σw − Aᵀλ`.
    pub fn kkt_residual(&self, moments: &LogMoments) -> f64 {
        let w = self.weights.as_dvector();
        let [l1, l2] = self.multipliers;
        let r = &moments.cov_log * w - (DVector::from_element(moments.dim(), l1) + &moments.mean_log * l2);
        r.amax()
    }
}

/// Solves `min wᵀΣw` subject to `Σ wᵢ = 1` and `wᵀμ = target_mu` through a
/// Cholesky factorization of `Σ`: `w = Σ⁻¹Aᵀ(AΣ⁻¹Aᵀ)⁻¹(1, target_mu)`.
pub fn solve_min_lvar(moments: &LogMoments, target_mu: f64) -> Result<MinLVarSolution> {
    if !target_mu.is_finite() {
        return Err(Error::InvalidArgument(format!("target {target_mu} is not finite")));
    }
    well_conditioned_eigen(&moments.cov_log)?;
    check_nonconstant(&moments.mean_log)?;
    let chol = moments.cov_log.clone().cholesky().ok_or(Error::SingularCovariance {
        min_eigenvalue: moments.cov_log.clone().symmetric_eigenvalues().min(),
        max_eigenvalue: moments.cov_log.clone().symmetric_eigenvalues().max(),
    })?;
    let ones = DVector::from_element(moments.dim(), 1.0);
    let inv_ones = chol.solve(&ones);
    let inv_mu = chol.solve(&moments.mean_log);
    let scalars = FrontierScalars {
        a: ones.dot(&inv_ones),
        b: ones.dot(&inv_mu),
        c: moments.mean_log.dot(&inv_mu),
    };
    let det = scalars.determinant();
    if det <= 1e-12 * scalars.a * scalars.c {
        return Err(Error::DependentConstraints);
    }
    let l1 = (scalars.c - scalars.b * target_mu) / det;
    let l2 = (scalars.a * target_mu - scalars.b) / det;
    let w = inv_ones * l1 + inv_mu * l2;
    Ok(MinLVarSolution {
        weights: PortfolioWeights(w.iter().copied().collect()),
        multipliers: [l1, l2],
        scalars,
    })
}

pub fn min_lvar_portfolio(moments: &LogMoments, target_mu: f64) -> Result<PortfolioWeights> {
    Ok(solve_min_lvar(moments, target_mu)?.weights)
}

pub fn frontier_scalars(moments: &LogMoments) -> Result<FrontierScalars> {
    Ok(solve_min_lvar(moments, moments.mean_log[0])?.scalars)
}

/// One frontier point per target, ordered by target.
pub fn efficient_frontier(moments: &LogMoments, targets: &[f64]) -> Result<Vec<FrontierPoint>> {
    let mut sorted = targets.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted
        .into_iter()
        .map(|target_mu| {
            let weights = min_lvar_portfolio(moments, target_mu)?;
            let log_variance = portfolio_stats(moments, &weights)?.log_variance;
            Ok(FrontierPoint {
                target_mu,
                weights,
                log_variance,
            })
        })
        .collect()
}

/// Orthonormal basis of `{v : 1ᵀv = 0, μᵀv = 0}` by Gram–Schmidt against the
/// constraint rows, completed with coordinate vectors.
fn constraint_null_space(mu: &DVector<f64>) -> DMatrix<f64> {
    let k = mu.len();
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(k);
    let candidates = [DVector::from_element(k, 1.0), mu.clone()]
        .into_iter()
        .chain((0..k).map(|j| DVector::from_fn(k, |i, _| if i == j { 1.0 } else { 0.0 })));
    for mut v in candidates {
        // two passes keep the basis orthogonal to working precision
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dot(&v);
                v -= b * proj;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            basis.push(v / norm);
        }
        if basis.len() == k {
            break;
        }
    }
    DMatrix::from_columns(&basis[2..])
}

/// Minimizes the squared geodesic distance `d(∏ Rᵢ^{wᵢ}, m_ℓ)²` computed on the
/// panel itself (no covariance matrix is formed) over the affine set
/// `Σ wᵢ = 1`, `wᵀμ = target_mu`, by a null-space least-squares solve.
pub fn min_geodesic_distance_portfolio(panel: &ReturnsPanel, target_mu: f64) -> Result<PortfolioWeights> {
    if !target_mu.is_finite() {
        return Err(Error::InvalidArgument(format!("target {target_mu} is not finite")));
    }
    let (z, mu) = panel.scaled_centered_logs();
    let singular = z.singular_values();
    let (s_min, s_max) = (singular.min(), singular.max());
    if !(s_max > 0.0) || s_min * s_min <= SINGULAR_RATIO * s_max * s_max || panel.periods() <= panel.assets() {
        return Err(Error::SingularCovariance {
            min_eigenvalue: s_min * s_min,
            max_eigenvalue: s_max * s_max,
        });
    }
    check_nonconstant(&mu)?;
    let k = mu.len() as f64;
    let (s1, s2) = (mu.sum(), mu.dot(&mu));
    let gram_det = k * s2 - s1 * s1;
    if gram_det <= 1e-12 * k * s2.max(f64::MIN_POSITIVE) {
        return Err(Error::DependentConstraints);
    }
    // minimum-norm feasible point Aᵀ(AAᵀ)⁻¹(1, target)
    let c1 = (s2 - s1 * target_mu) / gram_det;
    let c2 = (k * target_mu - s1) / gram_det;
    let w0 = DVector::from_element(mu.len(), c1) + &mu * c2;
    if mu.len() == 2 {
        // the two constraints pin the only feasible point
        return Ok(PortfolioWeights(w0.iter().copied().collect()));
    }
    let null = constraint_null_space(&mu);
    let reduced = &z * &null;
    let rhs = -(&z * &w0);
    let v = SVD::new(reduced, true, true)
        .solve(&rhs, 0.0)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let w = w0 + null * v;
    Ok(PortfolioWeights(w.iter().copied().collect()))
}

/// Solves the target-growth problem twice: as the geodesic-distance problem on
/// the panel and as the Markowitz QP on `(μ, Σ)`. Returns the largest
/// componentwise weight difference.
pub fn markowitz_equivalence_check(panel: &ReturnsPanel, target_mu: f64) -> Result<f64> {
    let markowitz = min_lvar_portfolio(&estimate_log_moments(panel), target_mu)?;
    let geodesic = min_geodesic_distance_portfolio(panel, target_mu)?;
    Ok(markowitz
        .values()
        .iter()
        .zip(geodesic.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}
