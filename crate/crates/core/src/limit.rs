//! Seeded Monte Carlo checks of the log-scale law of large numbers and
//! central limit theorem.
//!
//! Random streams: every draw comes from `ChaCha8Rng::seed_from_u64(seed)`
//! with the stream number set to the trial index (for ladder experiments, rung
//! `r` and trial `i` use stream `(r << 32) | i`). A trial therefore owns its
//! generator and results do not depend on execution order.
//! Normals use Box–Muller on uniforms in `(0, 1]`.

use std::f64::consts::{PI, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lmoments::{empirical_l_variance, l_mean, Sample};

/// Relative tolerance of the quadrature behind [`true_log_moments`].
pub const QUAD_RTOL: f64 = 1e-10;
/// Asymptotic one-sample KS coefficient at the 1% level.
pub const KS_COEFF_1PCT: f64 = 1.628;
/// Asymptotic one-sample KS coefficient at the 5% level.
pub const KS_COEFF_5PCT: f64 = 1.358;
/// Fewest trials accepted by [`clt_experiment`].
pub const MIN_CLT_TRIALS: usize = 100;

/// A law on `(0, ∞)` with finite log-variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PositiveDistribution {
    /// `ln X ~ N(mu, sigma²)`.
    #[serde(rename = "lognormal")]
    LogNormal { mu: f64, sigma: f64 },
    Uniform { lo: f64, hi: f64 },
    /// `P(X > x) = (x_min / x)^alpha` for `x ≥ x_min`.
    Pareto { x_min: f64, alpha: f64 },
    PointMass { c: f64 },
}

impl PositiveDistribution {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::LogNormal { mu, sigma } => mu.is_finite() && sigma.is_finite() && sigma > 0.0,
            Self::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi,
            Self::Pareto { x_min, alpha } => x_min.is_finite() && x_min > 0.0 && alpha.is_finite() && alpha > 2.0,
            Self::PointMass { c } => c.is_finite() && c > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid distribution parameters: {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub sample_size: usize,
    pub num_trials: usize,
    pub seed: u64,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sample_size == 0 || self.num_trials == 0 {
            return Err(Error::InvalidArgument(
                "sample_size and num_trials must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Private generator of one trial.
#[derive(Debug, Clone)]
pub struct TrialRng {
    rng: ChaCha8Rng,
    spare_normal: Option<f64>,
}

impl TrialRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng, spare_normal: None }
    }

    /// Uniform on `(0, 1]`.
    pub fn uniform_open_closed(&mut self) -> f64 {
        1.0 - self.rng.gen::<f64>()
    }

    /// Standard normal by Box–Muller; each pair of uniforms yields two draws.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let radius = (-2.0 * self.uniform_open_closed().ln()).sqrt();
        let angle = 2.0 * PI * self.rng.gen::<f64>();
        self.spare_normal = Some(radius * angle.sin());
        radius * angle.cos()
    }

    pub fn draw(&mut self, dist: &PositiveDistribution) -> f64 {
        match *dist {
            PositiveDistribution::LogNormal { mu, sigma } => (mu + sigma * self.standard_normal()).exp(),
            PositiveDistribution::Uniform { lo, hi } => lo + (hi - lo) * self.uniform_open_closed(),
            PositiveDistribution::Pareto { x_min, alpha } => x_min * self.uniform_open_closed().powf(-1.0 / alpha),
            PositiveDistribution::PointMass { c } => c,
        }
    }
}

/// `K` i.i.d. draws from stream 0 of `seed`.
pub fn sample(dist: &PositiveDistribution, k: usize, seed: u64) -> Result<Sample> {
    sample_stream(dist, k, seed, 0)
}

/// `K` i.i.d. draws from the given stream of `seed`.
pub fn sample_stream(dist: &PositiveDistribution, k: usize, seed: u64, stream: u64) -> Result<Sample> {
    dist.validate()?;
    if k == 0 {
        return Err(Error::InvalidArgument("sample size must be at least 1".into()));
    }
    let mut rng = TrialRng::new(seed, stream);
    let values: Vec<f64> = (0..k).map(|_| rng.draw(dist)).collect();
    Sample::from_values(&values)
}

/// `(m_ℓ, σ_ℓ²) = (exp(E[ln X]), Var(ln X))`; closed form for lognormal and
/// point mass, adaptive Gauss–Kronrod quadrature otherwise.
pub fn true_log_moments(dist: &PositiveDistribution) -> Result<(f64, f64)> {
    dist.validate()?;
    match *dist {
        PositiveDistribution::LogNormal { mu, sigma } => Ok((mu.exp(), sigma * sigma)),
        PositiveDistribution::PointMass { c } => Ok((c, 0.0)),
        PositiveDistribution::Uniform { lo, hi } => {
            let width = hi - lo;
            let mean = integrate(|x| x.ln(), lo, hi, QUAD_RTOL)? / width;
            let var = integrate(|x| (x.ln() - mean).powi(2), lo, hi, QUAD_RTOL)? / width;
            Ok((mean.exp(), var))
        }
        PositiveDistribution::Pareto { x_min, alpha } => {
            // x = x_min / s maps the tail onto s ∈ (0, 1] with density α s^{α−1}
            let ln_x = |s: f64| x_min.ln() - s.ln();
            let density = |s: f64| alpha * s.powf(alpha - 1.0);
            let mean = integrate(|s| ln_x(s) * density(s), 0.0, 1.0, QUAD_RTOL)?;
            let var = integrate(|s| (ln_x(s) - mean).powi(2) * density(s), 0.0, 1.0, QUAD_RTOL)?;
            Ok((mean.exp(), var))
        }
    }
}

// 15-point Kronrod nodes (nonnegative half) with the embedded 7-point Gauss rule.
const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// weights of the Gauss rule at KRONROD_NODES[1], [3], [5], [7]
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];
const MAX_INTERVALS: usize = 4000;

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = KRONROD_WEIGHTS[7] * fc;
    let mut gauss = GAUSS_WEIGHTS[3] * fc;
    for i in 0..7 {
        let dx = half * KRONROD_NODES[i];
        let pair = f(center - dx) + f(center + dx);
        kronrod += KRONROD_WEIGHTS[i] * pair;
        if i % 2 == 1 {
            gauss += GAUSS_WEIGHTS[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive Gauss–Kronrod (7/15) quadrature on a finite interval.
/// Endpoints are never evaluated, so integrable endpoint singularities are fine.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidArgument(format!("invalid integration interval [{a}, {b}]")));
    }
    let (value, error) = gauss_kronrod(&f, a, b);
    let mut intervals = vec![(a, b, value, error)];
    loop {
        let total: f64 = intervals.iter().map(|iv| iv.2).sum();
        let total_err: f64 = intervals.iter().map(|iv| iv.3).sum();
        if !total.is_finite() {
            return Err(Error::QuadratureNonConvergence {
                tolerance: rel_tol,
                estimate: total,
                error_estimate: total_err,
            });
        }
        if total_err <= rel_tol * total.abs() || total_err <= f64::MIN_POSITIVE {
            return Ok(total);
        }
        if intervals.len() >= MAX_INTERVALS {
            return Err(Error::QuadratureNonConvergence {
                tolerance: rel_tol,
                estimate: total,
                error_estimate: total_err,
            });
        }
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("at least one interval");
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (left, left_err) = gauss_kronrod(&f, lo, mid);
        let (right, right_err) = gauss_kronrod(&f, mid, hi);
        intervals.push((lo, mid, left, left_err));
        intervals.push((mid, hi, right, right_err));
    }
}

/// `N(0, variance)` cumulative distribution function.
pub fn normal_cdf(x: f64, variance: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / (variance.sqrt() * SQRT_2))
}

/// One-sample Kolmogorov–Smirnov statistic
/// `D_n = max_i max(i/n − F(x₍ᵢ₎), F(x₍ᵢ₎) − (i−1)/n)`.
pub fn ks_statistic<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Empty("KS sample"));
    }
    if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| v.is_nan()) {
        return Err(Error::NonFinite { index, value });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(sorted.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        d.max(above).max(below)
    }))
}

/// Asymptotic critical value `c / √n` for `n ≥ 100`.
pub fn ks_critical(n: usize, coefficient: f64) -> f64 {
    coefficient / (n as f64).sqrt()
}

/// Median and mean absolute error at one sample size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LadderRung {
    pub sample_size: usize,
    pub median_error: f64,
    pub mean_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Lln,
    Clt,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitReport {
    pub experiment: Experiment,
    pub distribution: PositiveDistribution,
    pub config: TrialConfig,
    /// Target `m_ℓ`.
    pub m_ell: f64,
    /// Target `σ_ℓ²`.
    pub sigma_ell_sq: f64,
    /// Per trial: `ln m̂_ℓ` (LLN) or the log CLT statistic (CLT).
    pub statistics: Vec<f64>,
    /// LLN only: `|ln m̂_ℓ − ln m_ℓ|` per trial.
    pub errors: Vec<f64>,
    /// LLN only: error decay over sample sizes `K, 4K, 16K`.
    pub ladder: Vec<LadderRung>,
    /// CLT only: KS distance to `N(0, σ_ℓ²)`.
    pub ks_statistic: Option<f64>,
    /// CLT only: asymptotic 1% critical value for `num_trials`.
    pub ks_critical_1pct: Option<f64>,
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn rung<F>(sample_size: usize, trials: usize, mut error: F) -> Result<LadderRung>
where
    F: FnMut(u64) -> Result<f64>,
{
    let errors: Vec<f64> = (0..trials as u64).map(&mut error).collect::<Result<_>>()?;
    Ok(LadderRung {
        sample_size,
        median_error: median(&errors),
        mean_error: errors.iter().sum::<f64>() / trials as f64,
    })
}

fn ladder_stream(rung: usize, trial: u64) -> u64 {
    ((rung as u64) << 32) | trial
}

/// Error of the empirical log-mean `|ln m̂_ℓ − ln m_ℓ|` over a ladder of sample sizes.
pub fn lln_ladder(
    dist: &PositiveDistribution,
    sizes: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<LadderRung>> {
    let ln_target = true_log_moments(dist)?.0.ln();
    sizes
        .iter()
        .enumerate()
        .map(|(r, &k)| {
            rung(k, trials, |i| {
                let s = sample_stream(dist, k, seed, ladder_stream(r, i))?;
                Ok((l_mean(&s)[0].ln() - ln_target).abs())
            })
        })
        .collect()
}

/// Error of the empirical log-variance `|σ̂²_ℓ − σ_ℓ²|` over a ladder of sample sizes.
pub fn variance_ladder(
    dist: &PositiveDistribution,
    sizes: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<LadderRung>> {
    let target = true_log_moments(dist)?.1;
    sizes
        .iter()
        .enumerate()
        .map(|(r, &k)| {
            rung(k, trials, |i| {
                let s = sample_stream(dist, k, seed, ladder_stream(r, i))?;
                Ok((empirical_l_variance(&s)?[0] - target).abs())
            })
        })
        .collect()
}

/// Empirical log-mean per trial at size `K`, plus the error ladder `K, 4K, 16K`.
pub fn lln_experiment(dist: &PositiveDistribution, cfg: &TrialConfig) -> Result<LimitReport> {
    cfg.validate()?;
    let (m_ell, sigma_ell_sq) = true_log_moments(dist)?;
    let statistics: Vec<f64> = (0..cfg.num_trials as u64)
        .map(|i| Ok(l_mean(&sample_stream(dist, cfg.sample_size, cfg.seed, ladder_stream(0, i))?)[0].ln()))
        .collect::<Result<_>>()?;
    let errors = statistics.iter().map(|s| (s - m_ell.ln()).abs()).collect();
    let k = cfg.sample_size;
    let ladder = lln_ladder(dist, &[k, 4 * k, 16 * k], cfg.num_trials, cfg.seed)?;
    Ok(LimitReport {
        experiment: Experiment::Lln,
        distribution: *dist,
        config: *cfg,
        m_ell,
        sigma_ell_sq,
        statistics,
        errors,
        ladder,
        ks_statistic: None,
        ks_critical_1pct: None,
    })
}

/// `(1/√K) Σⱼ (ln Xⱼ − ln m_ℓ)`, the log of `(∏ Xⱼ / m_ℓ)^{1/√K}`.
pub fn clt_statistic(s: &Sample, m_ell: f64) -> Result<f64> {
    if s.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: s.dim(),
        });
    }
    if !(m_ell.is_finite() && m_ell > 0.0) {
        return Err(Error::NotPositive { index: 0, value: m_ell });
    }
    let ln_m = m_ell.ln();
    let sum: f64 = s.data().iter().map(|x| x.ln() - ln_m).sum();
    Ok(sum / (s.len() as f64).sqrt())
}

/// KS distance between the per-trial CLT statistics and `N(0, σ_ℓ²)`.
pub fn clt_experiment(dist: &PositiveDistribution, cfg: &TrialConfig) -> Result<LimitReport> {
    cfg.validate()?;
    if cfg.num_trials < MIN_CLT_TRIALS {
        return Err(Error::InvalidArgument(format!(
            "CLT experiment needs at least {MIN_CLT_TRIALS} trials"
        )));
    }
    let (m_ell, sigma_ell_sq) = true_log_moments(dist)?;
    if !(sigma_ell_sq > 0.0) {
        return Err(Error::Degenerate("log-variance is zero; the CLT limit is a point mass".into()));
    }
    let statistics: Vec<f64> = (0..cfg.num_trials as u64)
        .map(|i| clt_statistic(&sample_stream(dist, cfg.sample_size, cfg.seed, i)?, m_ell))
        .collect::<Result<_>>()?;
    let ks = ks_statistic(&statistics, |x| normal_cdf(x, sigma_ell_sq))?;
    Ok(LimitReport {
        experiment: Experiment::Clt,
        distribution: *dist,
        config: *cfg,
        m_ell,
        sigma_ell_sq,
        statistics,
        errors: Vec::new(),
        ladder: Vec::new(),
        ks_statistic: Some(ks),
        ks_critical_1pct: Some(ks_critical(cfg.num_trials, KS_COEFF_1PCT)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    const LOGNORMAL: PositiveDistribution = PositiveDistribution::LogNormal { mu: 0.0, sigma: 1.0 };

    #[test]
    fn distribution_validation() {
        assert!(PositiveDistribution::LogNormal { mu: 0.0, sigma: 0.0 }.validate().is_err());
        assert!(PositiveDistribution::Uniform { lo: 0.0, hi: 1.0 }.validate().is_err());
        assert!(PositiveDistribution::Uniform { lo: 2.0, hi: 1.0 }.validate().is_err());
        assert!(PositiveDistribution::Pareto { x_min: 1.0, alpha: 2.0 }.validate().is_err());
        assert!(PositiveDistribution::PointMass { c: -1.0 }.validate().is_err());
        assert!(PositiveDistribution::Pareto { x_min: 1.0, alpha: 2.5 }.validate().is_ok());
    }

    #[test]
    fn quadrature_matches_antiderivatives() {
        let v = integrate(|x| x.powi(5) - 3.0 * x, -1.0, 2.0, 1e-12).unwrap();
        assert!((v - (64.0 / 6.0 - 1.0 / 6.0 - 1.5 * 3.0)).abs() <= 1e-12);
        // x ln x − x
        let v = integrate(|x| x.ln(), 1.0, E, 1e-12).unwrap();
        assert!((v - 1.0).abs() <= 1e-12);
        // log singularity at 0: ∫₀¹ ln x dx = −1
        let v = integrate(|x| x.ln(), 0.0, 1.0, 1e-10).unwrap();
        assert!((v + 1.0).abs() <= 1e-10);
        assert!(integrate(|x| x, 1.0, 1.0, 1e-10).is_err());
        assert!(integrate(|x| 1.0 / x, 0.0, 1.0, 1e-10).is_err());
    }

    #[test]
    fn true_moments_closed_forms() {
        let (m, v) = true_log_moments(&PositiveDistribution::LogNormal { mu: 0.5, sigma: 1.0 }).unwrap();
        assert_eq!((m, v), (0.5f64.exp(), 1.0));
        assert_eq!(true_log_moments(&PositiveDistribution::PointMass { c: 3.0 }).unwrap(), (3.0, 0.0));
    }

    #[test]
    fn true_moments_by_quadrature() {
        // antiderivatives of ln x and ln² x on [1, e]
        let (m, v) = true_log_moments(&PositiveDistribution::Uniform { lo: 1.0, hi: E }).unwrap();
        let mean = 1.0 / (E - 1.0);
        let second = (E - 2.0) / (E - 1.0);
        assert!((m - mean.exp()).abs() <= 1e-10 * m);
        assert!((v - (second - mean * mean)).abs() <= 1e-10 * v);

        // ln X − ln x_min ~ Exp(α)
        let (m, v) = true_log_moments(&PositiveDistribution::Pareto { x_min: 2.0, alpha: 3.0 }).unwrap();
        assert!((m.ln() - (2f64.ln() + 1.0 / 3.0)).abs() <= 1e-10);
        assert!((v - 1.0 / 9.0).abs() <= 1e-10 / 9.0);
    }

    #[test]
    fn sampling_is_deterministic_and_positive() {
        let a = sample(&LOGNORMAL, 1000, 42).unwrap();
        let b = sample(&LOGNORMAL, 1000, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample(&LOGNORMAL, 1000, 43).unwrap());
        assert_ne!(a, sample_stream(&LOGNORMAL, 1000, 42, 1).unwrap());
        let p = sample(&PositiveDistribution::PointMass { c: 2.0 }, 17, 1).unwrap();
        assert!(p.data().iter().all(|x| *x == 2.0));
        let u = sample(&PositiveDistribution::Uniform { lo: 1.0, hi: 3.0 }, 5000, 9).unwrap();
        assert!(u.data().iter().all(|x| (1.0..=3.0).contains(x)));
        let pareto = sample(&PositiveDistribution::Pareto { x_min: 0.5, alpha: 3.0 }, 5000, 9).unwrap();
        assert!(pareto.data().iter().all(|x| *x >= 0.5));
    }

    #[test]
    fn lognormal_log_mean_self_check() {
        let s = sample(&LOGNORMAL, 100_000, 2024).unwrap();
        let mean_ln: f64 = s.data().iter().map(|x| x.ln()).sum::<f64>() / 1e5;
        assert!(mean_ln.abs() <= 0.02, "{mean_ln}");
    }

    #[test]
    fn empirical_variance_converges() {
        let dist = PositiveDistribution::LogNormal { mu: 0.0, sigma: 0.7 };
        let v = empirical_l_variance(&sample(&dist, 100_000, 11).unwrap()).unwrap()[0];
        assert!((v - 0.49).abs() <= 0.02, "{v}");
    }

    #[test]
    fn ks_examples() {
        let cdf = |x: f64| normal_cdf(x, 1.0);
        assert_eq!(ks_statistic(&[0.0], cdf).unwrap(), 0.5);
        assert!(ks_statistic(&[], cdf).is_err());
        // uniform quantiles at (i − ½)/n
        let n = 50;
        let values: Vec<f64> = (1..=n).map(|i| (i as f64 - 0.5) / n as f64).collect();
        let d = ks_statistic(&values, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!((d - 0.5 / n as f64).abs() <= 1e-15);
    }

    #[test]
    fn ks_matches_brute_force() {
        let s = sample(&LOGNORMAL, 300, 5).unwrap();
        let values: Vec<f64> = s.data().iter().map(|x| x.ln()).collect();
        let cdf = |x: f64| normal_cdf(x, 1.0);
        // sup over each data point of |F_n(x) − F(x)| and |F_n(x⁻) − F(x)|, O(n²)
        let n = values.len() as f64;
        let mut brute: f64 = 0.0;
        for &x in &values {
            let at = values.iter().filter(|&&v| v <= x).count() as f64 / n;
            let before = values.iter().filter(|&&v| v < x).count() as f64 / n;
            brute = brute.max((at - cdf(x)).abs()).max((before - cdf(x)).abs());
        }
        assert!((ks_statistic(&values, cdf).unwrap() - brute).abs() <= 1e-14);
    }

    #[test]
    fn clt_statistic_examples() {
        let s = Sample::from_values(&[2.5; 9]).unwrap();
        assert_eq!(clt_statistic(&s, 2.5).unwrap(), 0.0);
        let one = Sample::from_values(&[3.0 * E]).unwrap();
        assert!((clt_statistic(&one, 3.0).unwrap() - 1.0).abs() <= 1e-15);
        assert!(clt_statistic(&Sample::from_rows(&[vec![1.0, 2.0]]).unwrap(), 1.0).is_err());
    }

    #[test]
    fn lln_point_mass_has_zero_error() {
        let cfg = TrialConfig { sample_size: 10, num_trials: 5, seed: 1 };
        let r = lln_experiment(&PositiveDistribution::PointMass { c: 4.0 }, &cfg).unwrap();
        assert!(r.errors.iter().all(|e| *e == 0.0));
        assert!(r.ladder.iter().all(|l| l.median_error == 0.0), "{:?}", r.ladder);
        assert_eq!(r.ladder.iter().map(|l| l.sample_size).collect::<Vec<_>>(), vec![10, 40, 160]);
    }

    #[test]
    fn lln_is_scale_equivariant() {
        let cfg = TrialConfig { sample_size: 200, num_trials: 10, seed: 3 };
        let c: f64 = 7.5;
        let base = lln_experiment(&PositiveDistribution::LogNormal { mu: 0.2, sigma: 0.8 }, &cfg).unwrap();
        let shifted =
            lln_experiment(&PositiveDistribution::LogNormal { mu: 0.2 + c.ln(), sigma: 0.8 }, &cfg).unwrap();
        for (a, b) in base.statistics.iter().zip(&shifted.statistics) {
            assert!((b - a - c.ln()).abs() <= 1e-12);
        }
        assert_eq!(base, lln_experiment(&PositiveDistribution::LogNormal { mu: 0.2, sigma: 0.8 }, &cfg).unwrap());
    }

    #[test]
    fn clt_rejects_degenerate_and_small_runs() {
        let cfg = TrialConfig { sample_size: 5, num_trials: 200, seed: 1 };
        assert!(matches!(
            clt_experiment(&PositiveDistribution::PointMass { c: 1.0 }, &cfg),
            Err(Error::Degenerate(_))
        ));
        let few = TrialConfig { num_trials: 50, ..cfg };
        assert!(clt_experiment(&LOGNORMAL, &few).is_err());
    }

    #[test]
    fn clt_lognormal_passes_ks() {
        let cfg = TrialConfig { sample_size: 5, num_trials: 2000, seed: 77 };
        let r = clt_experiment(&LOGNORMAL, &cfg).unwrap();
        assert!(r.ks_statistic.unwrap() < 0.0364, "{:?}", r.ks_statistic);
    }
}
