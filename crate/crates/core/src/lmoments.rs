//! l-statistics of samples and discrete laws: geometric means, covariances of
//! logs, whitening in log-space and the power-law best predictor `aXᵇ`.

use nalgebra::{DMatrix, DVector};

use crate::cone::{PositiveVector, MAX_COMPONENT, MIN_COMPONENT};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, compensated_sum};

/// Tolerance on `Σ wₖ = 1` and on weight equality checks.
pub const WEIGHT_TOL: f64 = 1e-12;
/// Smallest log-variance of the regressor accepted by [`fit_power_law`].
pub const MIN_REGRESSOR_VARIANCE: f64 = 1e-12;

/// `K` weighted observations of an `n`-dimensional positive variable.
///
/// Rows are outcomes, columns are components. With non-uniform weights a
/// sample is simply a discrete law.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    data: DMatrix<f64>,
    weights: Vec<f64>,
}

impl Sample {
    pub fn new(data: DMatrix<f64>, weights: Vec<f64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::Empty("sample"));
        }
        // column-major flat index; report it as row-major for readability
        for r in 0..data.nrows() {
            for c in 0..data.ncols() {
                let value = data[(r, c)];
                if !(MIN_COMPONENT..=MAX_COMPONENT).contains(&value) {
                    return Err(Error::NotPositive {
                        index: r * data.ncols() + c,
                        value,
                    });
                }
            }
        }
        check_dim(data.nrows(), weights.len())?;
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidWeights(format!("weight {w} is not a nonnegative number")));
        }
        let total = compensated_sum(weights.iter().copied());
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidWeights(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { data, weights })
    }

    /// Equally weighted sample.
    pub fn uniform(data: DMatrix<f64>) -> Result<Self> {
        let k = data.nrows().max(1);
        Self::new(data, vec![1.0 / k as f64; k])
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let first = rows.first().ok_or(Error::Empty("sample"))?;
        let n = first.len();
        for row in rows {
            check_dim(n, row.len())?;
        }
        Self::uniform(DMatrix::from_fn(rows.len(), n, |r, c| rows[r][c]))
    }

    /// One-dimensional equally weighted sample.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        Self::uniform(DMatrix::from_column_slice(values.len(), 1, values))
    }

    pub fn from_points(points: &[PositiveVector]) -> Result<Self> {
        let rows: Vec<Vec<f64>> = points.iter().map(|p| p.values().to_vec()).collect();
        Self::from_rows(&rows)
    }

    /// Number of observations `K`.
    pub fn len(&self) -> usize {
        self.data.nrows()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Dimension `n` of each observation.
    pub fn dim(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn row(&self, k: usize) -> PositiveVector {
        PositiveVector::new(self.data.row(k).iter().copied().collect())
            .expect("rows of a valid sample are positive")
    }

    /// Component `j` as a one-dimensional sample with the same weights.
    pub fn column(&self, j: usize) -> Result<Sample> {
        if j >= self.dim() {
            return Err(Error::InvalidArgument(format!(
                "column {j} out of range for dimension {}",
                self.dim()
            )));
        }
        Ok(Self {
            data: self.data.columns(j, 1).into_owned(),
            weights: self.weights.clone(),
        })
    }

    pub fn is_uniform(&self) -> bool {
        let w = 1.0 / self.len() as f64;
        self.weights.iter().all(|x| (x - w).abs() <= WEIGHT_TOL)
    }

    fn log_data(&self) -> DMatrix<f64> {
        self.data.map(f64::ln)
    }

    fn same_law(&self, other: &Sample) -> Result<()> {
        check_dim(self.len(), other.len())?;
        let same = self
            .weights
            .iter()
            .zip(&other.weights)
            .all(|(a, b)| (a - b).abs() <= WEIGHT_TOL);
        if same {
            Ok(())
        } else {
            Err(Error::InvalidWeights("samples carry different weights".into()))
        }
    }
}

/// The pair `(E[ln X], Cov(ln X))`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogMoments {
    pub mean_log: DVector<f64>,
    pub cov_log: DMatrix<f64>,
}

impl LogMoments {
    pub fn new(mean_log: DVector<f64>, cov_log: DMatrix<f64>) -> Result<Self> {
        let n = mean_log.len();
        if n == 0 {
            return Err(Error::Empty("log moments"));
        }
        check_dim(n, cov_log.nrows())?;
        check_dim(n, cov_log.ncols())?;
        if let Some((index, &value)) = mean_log
            .iter()
            .chain(cov_log.iter())
            .enumerate()
            .find(|(_, v)| !v.is_finite())
        {
            return Err(Error::NonFinite { index, value });
        }
        let scale = cov_log.amax().max(1.0);
        let asym = (&cov_log - cov_log.transpose()).amax();
        if asym > 1e-12 * scale {
            return Err(Error::InvalidArgument(format!(
                "log-covariance is not symmetric (max asymmetry {asym:e})"
            )));
        }
        let min_eig = cov_log.clone().symmetric_eigenvalues().min();
        if min_eig < -1e-10 * scale {
            return Err(Error::InvalidArgument(format!(
                "log-covariance is not positive semidefinite (eigenvalue {min_eig:e})"
            )));
        }
        Ok(Self { mean_log, cov_log })
    }

    pub fn dim(&self) -> usize {
        self.mean_log.len()
    }

    /// `exp(E[ln X])`.
    pub fn l_mean(&self) -> Result<PositiveVector> {
        PositiveVector::from_logs(self.mean_log.as_slice())
    }
}

/// Weighted mean of the logs, componentwise. Deviations are summed around
/// the first observation, so a constant column returns its log exactly.
pub fn mean_log(s: &Sample) -> Vec<f64> {
    let logs = s.log_data();
    (0..s.dim())
        .map(|j| {
            let column = logs.column(j);
            let shift = column[0];
            shift + compensated_sum(s.weights.iter().zip(column.iter()).map(|(w, l)| w * (l - shift)))
        })
        .collect()
}

/// l-mean `exp(Σₖ wₖ ln Xₖ)`; the geometric mean for uniform weights.
pub fn l_mean(s: &Sample) -> PositiveVector {
    PositiveVector::from_logs(&mean_log(s)).expect("weighted log-mean stays inside the sample range")
}

/// Ordinary weighted mean `E[X]`.
pub fn arithmetic_mean(s: &Sample) -> Vec<f64> {
    (0..s.dim())
        .map(|j| compensated_sum(s.weights.iter().zip(s.data.column(j).iter()).map(|(w, x)| w * x)))
        .collect()
}

/// `E[X] − m_ℓ(X)` componentwise; nonnegative by Jensen's inequality.
pub fn l_mean_jensen_gap(s: &Sample) -> Vec<f64> {
    arithmetic_mean(s)
        .into_iter()
        .zip(l_mean(s).values())
        .map(|(a, m)| a - m)
        .collect()
}

/// Population log-covariance `Cov(ln X, ln Y)` under the shared discrete law.
/// Entry `(i, j)` pairs component `i` of `X` with component `j` of `Y`.
pub fn l_covariance(sx: &Sample, sy: &Sample) -> Result<DMatrix<f64>> {
    sx.same_law(sy)?;
    let cx = centered_logs(sx);
    let cy = centered_logs(sy);
    let weighted = DMatrix::from_fn(cx.nrows(), cx.ncols(), |r, c| sx.weights[r] * cx[(r, c)]);
    Ok(weighted.transpose() * cy)
}

fn centered_logs(s: &Sample) -> DMatrix<f64> {
    let mut logs = s.log_data();
    for (j, m) in mean_log(s).into_iter().enumerate() {
        logs.column_mut(j).add_scalar_mut(-m);
    }
    logs
}

/// Population `(E[ln X], Cov(ln X))` of a sample.
pub fn log_moments(s: &Sample) -> LogMoments {
    let cov = l_covariance(s, s).expect("a sample shares its own law");
    let cov = (&cov + cov.transpose()) * 0.5;
    LogMoments::new(DVector::from_vec(mean_log(s)), cov).expect("sample log-covariance is symmetric PSD")
}

/// Unbiased estimator `(1/(K−1)) Σₖ (ln Xₖ − ln m̂_ℓ)²` for i.i.d. draws.
pub fn empirical_l_variance(s: &Sample) -> Result<Vec<f64>> {
    if s.len() < 2 {
        return Err(Error::InvalidArgument("empirical variance needs at least 2 observations".into()));
    }
    if !s.is_uniform() {
        return Err(Error::InvalidWeights(
            "empirical estimators are defined for equally weighted i.i.d. draws".into(),
        ));
    }
    let centered = centered_logs(s);
    let denom = (s.len() - 1) as f64;
    Ok(centered
        .column_iter()
        .map(|c| c.iter().map(|d| d * d).sum::<f64>() / denom)
        .collect())
}

/// Log-space whitening `exp(Σ^{-1/2}(ln X − ln m_ℓ(X)))`, with `Σ^{-1/2}` the
/// symmetric inverse square root. The result has l-mean `1` and l-covariance `I`.
pub fn center(s: &Sample) -> Result<Sample> {
    let moments = log_moments(s);
    let whitening = linalg::inverse_sqrt(&moments.cov_log)?;
    let white = centered_logs(s) * whitening;
    Sample::new(white.map(f64::exp), s.weights.clone())
}

/// Parameters of the best predictor `Y# = aXᵇ` in the log metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    /// Scale `a = exp(E[ln Y] − b E[ln X])`.
    pub a: f64,
    /// Exponent `b = Cov(ln X, ln Y) / D`.
    pub b: f64,
    /// `D = Var(ln X)`.
    pub d_denominator: f64,
    /// `Var(ln Y − ln Y#)`, the squared l-distance between `Y` and its predictor.
    pub residual_lvar: f64,
    /// `m_ℓ(Y#) = exp(E[ln Y])`.
    pub m_ell_predictor: f64,
    /// Log-variance of the predictor, `b² Var(ln X)`.
    pub predictor_log_variance: f64,
}

pub fn fit_power_law(x: &Sample, y: &Sample) -> Result<PowerLawFit> {
    check_dim(1, x.dim())?;
    check_dim(1, y.dim())?;
    x.same_law(y)?;
    let mx = mean_log(x)[0];
    let my = mean_log(y)[0];
    let cx = centered_logs(x);
    let cy = centered_logs(y);
    let w = &x.weights;
    let d: f64 = (0..x.len()).map(|k| w[k] * cx[k] * cx[k]).sum();
    if !(d > MIN_REGRESSOR_VARIANCE) {
        return Err(Error::DegenerateRegressor { variance: d });
    }
    let cov: f64 = (0..x.len()).map(|k| w[k] * cx[k] * cy[k]).sum();
    let b = cov / d;
    let ln_a = my - b * mx;
    let residual_lvar = (0..x.len())
        .map(|k| {
            let r = cy[k] - b * cx[k];
            w[k] * r * r
        })
        .sum();
    Ok(PowerLawFit {
        a: ln_a.exp(),
        b,
        d_denominator: d,
        residual_lvar,
        m_ell_predictor: my.exp(),
        predictor_log_variance: b * b * d,
    })
}

/// Applies `a·xᵇ` componentwise.
pub fn predict_power_law(fit: &PowerLawFit, x: &PositiveVector) -> Result<PositiveVector> {
    PositiveVector::new(x.values().iter().map(|v| fit.a * v.powf(fit.b)).collect())
}
