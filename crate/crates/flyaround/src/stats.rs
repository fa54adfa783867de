//! Distance statistics: summaries, histograms, Gaussian and Weibull fits,
//! and the per-direction distance report.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("empty input")]
    Empty,
    #[error("bins must be >= 1")]
    NoBins,
    #[error("degenerate fit: all samples equal")]
    DegenerateFit,
    #[error("weibull fit requires positive samples")]
    NonPositive,
}

/// Summary statistics over a sample, recomputable from the raw values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    pub rms: f64,
    pub min: f64,
    pub max: f64,
    /// Percentiles at 1, 5, 50, 95, 99.
    pub percentiles: [f64; 5],
}

pub const PERCENTILE_LEVELS: [f64; 5] = [1.0, 5.0, 50.0, 95.0, 99.0];

impl SummaryStats {
    pub fn from_samples(values: &[f64]) -> Result<Self, StatsError> {
        if values.is_empty() {
            return Err(StatsError::Empty);
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let rms = (values.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let percentiles = PERCENTILE_LEVELS.map(|p| percentile_sorted(&sorted, p));
        Ok(Self {
            count: values.len(),
            mean,
            std: var.sqrt(),
            rms,
            min: sorted[0],
            max: *sorted.last().unwrap(),
            percentiles,
        })
    }
}

/// Linear-interpolated percentile on pre-sorted data.
fn percentile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let rank = p / 100.0 * (n - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Uniform histogram over [min, max]; the right-most bin is closed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// bins + 1 edges.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

pub fn histogram(values: &[f64], bins: usize) -> Result<Histogram, StatsError> {
    if values.is_empty() {
        return Err(StatsError::Empty);
    }
    if bins == 0 {
        return Err(StatsError::NoBins);
    }
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let width = (max - min) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| min + i as f64 * width).collect();
    let mut counts = vec![0usize; bins];
    for &v in values {
        let idx = if width == 0.0 {
            0
        } else {
            (((v - min) / width) as usize).min(bins - 1)
        };
        counts[idx] += 1;
    }
    Ok(Histogram { edges, counts })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianFit {
    pub mu: f64,
    pub sigma: f64,
}

/// Maximum-likelihood Gaussian fit: sample mean and population standard
/// deviation.
pub fn fit_gaussian(values: &[f64]) -> Result<GaussianFit, StatsError> {
    if values.len() < 2 {
        return Err(StatsError::TooFewSamples { need: 2, got: values.len() });
    }
    let n = values.len() as f64;
    let mu = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / n;
    Ok(GaussianFit { mu, sigma: var.sqrt() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeibullFit {
    /// Shape k.
    pub shape: f64,
    /// Scale λ.
    pub scale: f64,
    /// Zero samples clamped to a tiny positive value before fitting.
    pub clamped_zeros: usize,
}

/// Maximum-likelihood Weibull fit over non-negative magnitudes.
///
/// The shape equation is solved by a bisection/Newton hybrid to 1e-10 on
/// `k`; the scale then follows in closed form. Zeros are clamped to the
/// smallest positive value representable at the data's scale and counted.
pub fn fit_weibull(values: &[f64]) -> Result<WeibullFit, StatsError> {
    if values.len() < 2 {
        return Err(StatsError::TooFewSamples { need: 2, got: values.len() });
    }
    if values.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(StatsError::NonPositive);
    }
    let max = values.iter().cloned().fold(0.0f64, f64::max);
    if max == 0.0 {
        return Err(StatsError::DegenerateFit);
    }
    let clamp = max * f64::EPSILON;
    let mut clamped_zeros = 0usize;
    // normalize by max for overflow safety; k is scale-invariant
    let data: Vec<f64> = values
        .iter()
        .map(|&v| {
            if v == 0.0 {
                clamped_zeros += 1;
                clamp / max
            } else {
                v / max
            }
        })
        .collect();
    if data.iter().all(|&v| v == data[0]) {
        return Err(StatsError::DegenerateFit);
    }
    let n = data.len() as f64;
    let mean_ln: f64 = data.iter().map(|v| v.ln()).sum::<f64>() / n;
    // g(k) = Σ x^k ln x / Σ x^k − 1/k − mean(ln x); increasing in k
    let g = |k: f64| -> f64 {
        let mut sx = 0.0;
        let mut sxl = 0.0;
        for &x in &data {
            let xk = x.powf(k);
            sx += xk;
            sxl += xk * x.ln();
        }
        sxl / sx - 1.0 / k - mean_ln
    };
    let mut lo = 1e-3;
    let mut hi = 1.0;
    while g(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(StatsError::DegenerateFit);
        }
    }
    if g(lo) > 0.0 {
        lo = 1e-6;
        if g(lo) > 0.0 {
            return Err(StatsError::DegenerateFit);
        }
    }
    let mut k = 0.5 * (lo + hi);
    for _ in 0..200 {
        let gk = g(k);
        if gk.abs() < 1e-14 {
            break;
        }
        if gk > 0.0 {
            hi = k;
        } else {
            lo = k;
        }
        // secant-style step clipped to the bracket, else bisect
        let h = 1e-7 * k.max(1e-7);
        let slope = (g(k + h) - gk) / h;
        let newton = k - gk / slope;
        k = if slope > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-10 {
            break;
        }
    }
    let scale_norm = (data.iter().map(|v| v.powf(k)).sum::<f64>() / n).powf(1.0 / k);
    Ok(WeibullFit { shape: k, scale: scale_norm * max, clamped_zeros })
}

/// Log-likelihood of Weibull(k, λ) over positive data.
pub fn weibull_log_likelihood(values: &[f64], shape: f64, scale: f64) -> f64 {
    let n = values.len() as f64;
    let mut ll = n * (shape.ln() - shape * scale.ln());
    for &x in values {
        ll += (shape - 1.0) * x.ln() - (x / scale).powf(shape);
    }
    ll
}

/// Which way a cloud-to-mesh comparison ran.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// Reconstruction samples measured against the reference mesh.
    ReconToRef,
    /// Reference samples measured against the reconstruction mesh.
    RefToRecon,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Direction::ReconToRef => write!(f, "recon->ref"),
            Direction::RefToRecon => write!(f, "ref->recon"),
        }
    }
}

/// Per-point signed distances with derived statistics and optional fits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub direction: Direction,
    pub signed_distances: Vec<f64>,
    pub stats: SummaryStats,
    pub histogram: Histogram,
    pub gaussian: Option<GaussianFit>,
    /// Weibull fit over |d|.
    pub weibull: Option<WeibullFit>,
}

pub const DEFAULT_HISTOGRAM_BINS: usize = 64;

impl DistanceReport {
    pub fn new(direction: Direction, signed_distances: Vec<f64>, bins: usize) -> Result<Self, StatsError> {
        let stats = SummaryStats::from_samples(&signed_distances)?;
        let histogram = histogram(&signed_distances, bins)?;
        Ok(Self { direction, signed_distances, stats, histogram, gaussian: None, weibull: None })
    }

    pub fn with_gaussian_fit(mut self) -> Result<Self, StatsError> {
        self.gaussian = Some(fit_gaussian(&self.signed_distances)?);
        Ok(self)
    }

    pub fn with_weibull_fit(mut self) -> Result<Self, StatsError> {
        let magnitudes: Vec<f64> = self.signed_distances.iter().map(|d| d.abs()).collect();
        self.weibull = Some(fit_weibull(&magnitudes)?);
        Ok(self)
    }

    /// Divides all distances by the given scale and recomputes the
    /// derived fields (fits are dropped).
    pub fn normalized_by(&self, scale: f64) -> Result<Self, StatsError> {
        let scaled: Vec<f64> = self.signed_distances.iter().map(|d| d / scale).collect();
        Self::new(self.direction, scaled, self.histogram.counts.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gaussian_constant_data() {
        let fit = fit_gaussian(&[3.5; 10]).unwrap();
        assert_eq!(fit.mu, 3.5);
        assert_eq!(fit.sigma, 0.0);
    }

    #[test]
    fn gaussian_two_point() {
        // population convention: std of {-1, 1} is 1
        let fit = fit_gaussian(&[-1.0, 1.0]).unwrap();
        assert_eq!(fit.mu, 0.0);
        assert_eq!(fit.sigma, 1.0);
    }

    #[test]
    fn gaussian_needs_two_samples() {
        assert!(fit_gaussian(&[1.0]).is_err());
    }

    #[test]
    fn gaussian_recovery_from_seeded_draws() {
        use rand_distr::{Distribution, Normal};
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let dist = Normal::new(0.002, 0.01).unwrap();
        let draws: Vec<f64> = (0..100_000).map(|_| dist.sample(&mut rng)).collect();
        let fit = fit_gaussian(&draws).unwrap();
        assert!((fit.mu - 0.002).abs() < 1e-4, "mu = {}", fit.mu);
        assert!((fit.sigma - 0.01).abs() < 2e-4, "sigma = {}", fit.sigma);
    }

    /// Inverse-CDF Weibull sampler, independent of the fitting path.
    fn weibull_draws(shape: f64, scale: f64, n: usize, seed: u64) -> Vec<f64> {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                scale * (-u.ln()).powf(1.0 / shape)
            })
            .collect()
    }

    #[test]
    fn weibull_recovery_from_inverse_cdf_draws() {
        let draws = weibull_draws(1.5, 0.02, 100_000, 7);
        let fit = fit_weibull(&draws).unwrap();
        assert!((fit.shape - 1.5).abs() / 1.5 < 0.02, "k = {}", fit.shape);
        assert!((fit.scale - 0.02).abs() / 0.02 < 0.02, "lambda = {}", fit.scale);
    }

    #[test]
    fn weibull_exponential_case() {
        // exponential draws are Weibull with shape 1
        let draws = weibull_draws(1.0, 0.5, 100_000, 11);
        let fit = fit_weibull(&draws).unwrap();
        assert!((fit.shape - 1.0).abs() < 0.02, "k = {}", fit.shape);
    }

    #[test]
    fn weibull_two_points_is_local_optimum() {
        let data = [0.01, 0.05];
        let fit = fit_weibull(&data).unwrap();
        assert!(fit.shape.is_finite() && fit.scale.is_finite());
        let ll = weibull_log_likelihood(&data, fit.shape, fit.scale);
        for factor in [0.9, 1.1] {
            assert!(ll >= weibull_log_likelihood(&data, fit.shape * factor, fit.scale));
            assert!(ll >= weibull_log_likelihood(&data, fit.shape, fit.scale * factor));
        }
    }

    #[test]
    fn weibull_degenerate_and_invalid() {
        assert!(matches!(fit_weibull(&[2.0, 2.0, 2.0]), Err(StatsError::DegenerateFit)));
        assert!(matches!(fit_weibull(&[1.0, -1.0]), Err(StatsError::NonPositive)));
    }

    #[test]
    fn weibull_clamps_zeros() {
        let fit = fit_weibull(&[0.0, 0.01, 0.02, 0.03]).unwrap();
        assert_eq!(fit.clamped_zeros, 1);
    }

    #[test]
    fn histogram_hand_placement() {
        let h = histogram(&[0.0, 1.0, 2.0, 3.0], 2).unwrap();
        assert_eq!(h.counts, vec![2, 2]);
        assert_eq!(h.edges, vec![0.0, 1.5, 3.0]);
    }

    #[test]
    fn histogram_all_equal() {
        let h = histogram(&[5.0; 9], 4).unwrap();
        assert_eq!(h.counts.iter().sum::<usize>(), 9);
        assert_eq!(h.counts[0], 9);
    }

    #[test]
    fn histogram_rejects_empty() {
        assert!(histogram(&[], 4).is_err());
    }

    #[test]
    fn report_assembly_and_fit_consistency() {
        let draws: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.7919).sin() * 0.01).collect();
        let report = DistanceReport::new(Direction::ReconToRef, draws.clone(), 32)
            .unwrap()
            .with_gaussian_fit()
            .unwrap();
        // overlay parameters come from exactly the histogram's data
        assert_eq!(report.gaussian.unwrap(), fit_gaussian(&draws).unwrap());
        assert_eq!(report.histogram.counts.iter().sum::<usize>(), draws.len());
        assert_relative_eq!(report.stats.percentiles[2], report.stats.percentiles[2]);
    }

    proptest! {
        #[test]
        fn histogram_counts_sum(values in proptest::collection::vec(-1.0..1.0f64, 1..200), bins in 1usize..20) {
            let h = histogram(&values, bins).unwrap();
            prop_assert_eq!(h.counts.iter().sum::<usize>(), values.len());
        }

        #[test]
        fn stats_recomputable(values in proptest::collection::vec(-10.0..10.0f64, 2..100)) {
            let s1 = SummaryStats::from_samples(&values).unwrap();
            let s2 = SummaryStats::from_samples(&values).unwrap();
            prop_assert_eq!(s1, s2);
        }
    }
}
