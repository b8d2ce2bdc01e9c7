//! Classical references: Gaussian densities, error functions and quantiles,
//! Euler-Maruyama integration of the Ornstein-Uhlenbeck SDE, bivariate
//! normal sampling, the Gaussian copula density, and histogram utilities.
//!
//! No special-function dependency: `erf`/`erfc` use a Maclaurin series for
//! small arguments and a Lentz continued fraction for large ones (about
//! 1e-14 absolute), and the normal quantile refines a rational first guess
//! with Newton steps against that `erfc`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel;
use crate::rng;

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Ornstein-Uhlenbeck parameters: `dX = -nu (X - mu) dt + sqrt(sigma2) dW`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OuParams {
    /// Long-run mean.
    pub mu: f64,
    /// Mean-reversion rate.
    pub nu: f64,
    /// Squared diffusion `g^2`.
    pub sigma2: f64,
}

impl OuParams {
    /// Steady-state variance `sigma^2 / (2 nu)` for `nu > 0`.
    pub fn steady_state_variance(&self) -> f64 {
        self.sigma2 / (2.0 * self.nu)
    }

    /// Mean at time `t` from initial point `x0`.
    pub fn mean_at(&self, x0: f64, t: f64) -> f64 {
        self.mu + (x0 - self.mu) * (-self.nu * t).exp()
    }

    /// Variance at time `t` from a point mass (`sigma^2 t` when `nu = 0`).
    pub fn variance_at(&self, t: f64) -> f64 {
        if self.nu == 0.0 {
            self.sigma2 * t
        } else {
            self.steady_state_variance() * (1.0 - (-2.0 * self.nu * t).exp())
        }
    }
}

/// Normal density with mean `mu` and standard deviation `sigma`.
pub fn gaussian_pdf(x: f64, mu: f64, sigma: f64) -> f64 {
    assert!(sigma > 0.0, "sigma must be positive");
    let z = (x - mu) / sigma;
    (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}

/// Error function, ~1e-14 absolute accuracy.
pub fn erf(x: f64) -> f64 {
    if x < 0.0 {
        return -erf(-x);
    }
    if x <= 2.0 {
        // Maclaurin series; cancellation stays benign below 2.
        let x2 = x * x;
        let mut power = x; // x^{2n+1} / n!
        let mut sum = x;
        let mut n = 0usize;
        loop {
            n += 1;
            power *= -x2 / n as f64;
            let term = power / (2 * n + 1) as f64;
            sum += term;
            if term.abs() < 1e-18 || n > 120 {
                break;
            }
        }
        2.0 / SQRT_PI * sum
    } else {
        1.0 - erfc(x)
    }
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x <= 2.0 {
        return 1.0 - erf(x);
    }
    // Lentz evaluation of the continued fraction
    // erfc(x) = e^{-x^2}/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))).
    let tiny = 1e-300;
    let mut f = x;
    let mut c = f;
    let mut d = 0.0;
    for k in 1..200 {
        let a = k as f64 / 2.0;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / SQRT_PI / f
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

// Rational approximation to the standard normal quantile (non-branching
// tail form); refined below by Newton iterations against `normal_cdf`.
const QUANTILE_P: [f64; 8] = [
    1.2533141359896652729,
    3.0333178251950406994,
    2.3884158540184385711,
    0.73176759583280610539,
    0.085838533424158257377,
    0.0034424140686962222423,
    0.000036313870818023761224,
    4.3304513840364031401e-8,
];
const QUANTILE_Q: [f64; 8] = [
    1.0,
    2.9202373175993672857,
    2.9373357991677046357,
    1.2356513216582148689,
    0.2168237095066675527,
    0.014494272424798068406,
    0.00030617264753008793976,
    1.3141263119543315917e-6,
];

fn polynomial(z: f64, coeff: &[f64]) -> f64 {
    coeff.iter().rev().fold(0.0, |acc, &c| acc * z + c)
}

/// Standard normal quantile on the open interval (0, 1): rational initial
/// guess plus Newton refinement, absolute error well below 1e-9.
pub fn standard_normal_quantile(u: f64) -> Result<f64> {
    if !(0.0 < u && u < 1.0) {
        return Err(Error::QuantileDomain(u));
    }
    let tail = u.min(1.0 - u);
    let v = -(2.0 * tail).ln();
    let mut x = v * polynomial(v, &QUANTILE_P) / polynomial(v, &QUANTILE_Q);
    if u < 0.5 {
        x = -x;
    }
    for _ in 0..2 {
        let pdf = (-0.5 * x * x).exp() / (SQRT_2 * SQRT_PI);
        if pdf == 0.0 {
            break;
        }
        x -= (normal_cdf(x) - u) / pdf;
    }
    Ok(x)
}

/// Quantile of the normal with mean `mu` and standard deviation `sigma`:
/// `mu + sigma sqrt(2) erfinv(2u - 1)`.
pub fn normal_quantile(u: f64, mu: f64, sigma: f64) -> Result<f64> {
    Ok(mu + sigma * standard_normal_quantile(u)?)
}

/// Inverse error function.
pub fn erfinv(y: f64) -> Result<f64> {
    Ok(standard_normal_quantile((y + 1.0) / 2.0)? / SQRT_2)
}

/// Path snapshot: the step time actually hit (requested times round down to
/// multiples of `dt`) and the per-path values there.
#[derive(Clone, Debug)]
pub struct PathSnapshot {
    pub requested_time: f64,
    pub time: f64,
    pub values: Vec<f64>,
}

/// Euler-Maruyama integration of the OU SDE from the point mass `x0`.
///
/// Returns terminal samples plus one snapshot per requested time. Paths use
/// independent seeded substreams, so results do not depend on threading.
pub fn euler_maruyama_with_snapshots(
    params: &OuParams,
    x0: f64,
    t_end: f64,
    dt: f64,
    n_paths: usize,
    seed: u64,
    snapshot_times: &[f64],
) -> (Vec<f64>, Vec<PathSnapshot>) {
    assert!(dt > 0.0, "dt must be positive");
    assert!(n_paths >= 1);
    let seed = rng::resolve_seed(seed);
    let n_steps = (t_end / dt).round().max(0.0) as usize;
    let mut snap_steps: Vec<(usize, f64)> = snapshot_times
        .iter()
        .map(|&t| (((t / dt).floor() as usize).min(n_steps), t))
        .collect();
    snap_steps.sort_by(|a, b| a.0.cmp(&b.0));
    let g = params.sigma2.sqrt();
    let sqrt_dt = dt.sqrt();

    let per_path: Vec<(Vec<f64>, f64)> = parallel::map_indexed(n_paths, |p| {
        let mut gen = rng::substream(seed, p as u64);
        let mut x = x0;
        let mut snaps = Vec::with_capacity(snap_steps.len());
        let mut next = 0usize;
        for step in 0..=n_steps {
            while next < snap_steps.len() && snap_steps[next].0 == step {
                snaps.push(x);
                next += 1;
            }
            if step == n_steps {
                break;
            }
            let noise: f64 = gen.sample(StandardNormal);
            x += -params.nu * (x - params.mu) * dt + g * sqrt_dt * noise;
        }
        (snaps, x)
    });

    let terminal: Vec<f64> = per_path.iter().map(|(_, x)| *x).collect();
    let snapshots = snap_steps
        .iter()
        .enumerate()
        .map(|(i, &(step, requested))| PathSnapshot {
            requested_time: requested,
            time: step as f64 * dt,
            values: per_path.iter().map(|(snaps, _)| snaps[i]).collect(),
        })
        .collect();
    (terminal, snapshots)
}

/// Terminal samples only.
pub fn euler_maruyama(
    params: &OuParams,
    x0: f64,
    t_end: f64,
    dt: f64,
    n_paths: usize,
    seed: u64,
) -> Vec<f64> {
    euler_maruyama_with_snapshots(params, x0, t_end, dt, n_paths, seed, &[]).0
}

/// Bivariate normal parameters; `rho12` in `(-1, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BivariateNormalParams {
    pub mu1: f64,
    pub mu2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub rho12: f64,
}

impl BivariateNormalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho12 > -1.0 && self.rho12 <= 1.0) {
            return Err(Error::NotPositiveSemiDefinite(self.rho12));
        }
        if self.sigma1 <= 0.0 || self.sigma2 <= 0.0 {
            return Err(Error::InvalidSpec("standard deviations must be positive".into()));
        }
        Ok(())
    }
}

/// Correlated normal pairs via the 2x2 Cholesky factor.
pub fn sample_bivariate_normal(
    params: &BivariateNormalParams,
    n: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    params.validate()?;
    let seed = rng::resolve_seed(seed);
    let rho = params.rho12;
    let ortho = (1.0 - rho * rho).max(0.0).sqrt();
    let mut gen = rng::root(seed);
    Ok((0..n)
        .map(|_| {
            let z1: f64 = gen.sample(StandardNormal);
            let z2: f64 = gen.sample(StandardNormal);
            (
                params.mu1 + params.sigma1 * z1,
                params.mu2 + params.sigma2 * (rho * z1 + ortho * z2),
            )
        })
        .collect())
}

/// Gaussian copula density on the open unit square:
/// `c(z) = (1 - rho^2)^{-1/2} exp{ [2 rho Q1 Q2 - rho^2 (Q1^2 + Q2^2)]
/// / (2 (1 - rho^2)) }` with standard normal quantiles `Q`.
pub fn gaussian_copula_density(z1: f64, z2: f64, rho12: f64) -> Result<f64> {
    if rho12.abs() >= 1.0 {
        return Err(Error::NotPositiveSemiDefinite(rho12));
    }
    let q1 = standard_normal_quantile(z1)?;
    let q2 = standard_normal_quantile(z2)?;
    let r2 = rho12 * rho12;
    let exponent = (2.0 * rho12 * q1 * q2 - r2 * (q1 * q1 + q2 * q2)) / (2.0 * (1.0 - r2));
    Ok(exponent.exp() / (1.0 - r2).sqrt())
}

/// Binned counts with explicit edges.
#[derive(Clone, Debug)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<f64>,
    pub normalized: bool,
}

impl Histogram {
    /// Uniform bins covering `[lo, hi)`; out-of-range samples are dropped.
    pub fn from_samples(samples: &[f64], lo: f64, hi: f64, n_bins: usize) -> Self {
        assert!(n_bins >= 1 && hi > lo);
        let edges: Vec<f64> = (0..=n_bins)
            .map(|i| lo + (hi - lo) * i as f64 / n_bins as f64)
            .collect();
        let mut counts = vec![0.0; n_bins];
        let scale = n_bins as f64 / (hi - lo);
        for &s in samples {
            if s >= lo && s < hi {
                counts[(((s - lo) * scale) as usize).min(n_bins - 1)] += 1.0;
            }
        }
        Histogram {
            edges,
            counts,
            normalized: false,
        }
    }

    /// Scale counts so they sum to one (bin weights, not a density).
    pub fn normalize(mut self) -> Self {
        let total: f64 = self.counts.iter().sum();
        if total > 0.0 {
            self.counts.iter_mut().for_each(|c| *c /= total);
        }
        self.normalized = true;
        self
    }
}

/// Sample mean.
pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Pearson correlation of paired samples.
pub fn pearson_correlation(pairs: &[(f64, f64)]) -> f64 {
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for &(x, y) in pairs {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_pdf_values() {
        // Peak of the sigma = 8 target: 1 / (8 sqrt(2 pi)).
        assert!((gaussian_pdf(32.0, 32.0, 8.0) - 0.049867).abs() < 1e-6);
        assert!(
            (gaussian_pdf(0.0, 0.0, 1.0) - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs()
                < 1e-12
        );
        let (a, b) = (gaussian_pdf(35.0, 32.0, 8.0), gaussian_pdf(29.0, 32.0, 8.0));
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn erf_reference_values() {
        assert!((erf(1.0) - 0.8427007929497149).abs() < 1e-13);
        assert!((erf(0.5) - 0.5204998778130465).abs() < 1e-13);
        assert!((erfc(3.0) - 2.209049699858544e-5).abs() < 1e-17);
        assert!((normal_cdf(1.0) - 0.8413447460685429).abs() < 1e-13);
        assert!((erfinv(0.8427007929497149).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn quantile_examples() {
        assert!((normal_quantile(0.5, 3.0, 2.0).unwrap() - 3.0).abs() < 1e-12);
        // Phi(1) table value.
        assert!((normal_quantile(0.841345, 0.0, 1.0).unwrap() - 1.0).abs() < 1e-4);
        let a = standard_normal_quantile(0.2).unwrap();
        let b = standard_normal_quantile(0.3).unwrap();
        assert!(a < b);
        assert!(normal_quantile(0.0, 0.0, 1.0).is_err());
        assert!(normal_quantile(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn quantile_inverse_consistency() {
        for i in 0..200 {
            let u = 1e-6 + (1.0 - 2e-6) * i as f64 / 199.0;
            let x = standard_normal_quantile(u).unwrap();
            assert!((normal_cdf(x) - u).abs() < 1e-13, "u={u}");
            let back = standard_normal_quantile(normal_cdf(x)).unwrap();
            assert!((back - x).abs() < 1e-8, "u={u}");
        }
    }

    #[test]
    fn em_deterministic_relaxation() {
        let params = OuParams {
            mu: 2.0,
            nu: 1.0,
            sigma2: 0.0,
        };
        let xs = euler_maruyama(&params, 5.0, 1.0, 1e-3, 1, 7);
        let exact = params.mean_at(5.0, 1.0);
        assert!((xs[0] - exact).abs() < 3.0 * 1e-3);
    }

    #[test]
    fn em_driftless_mean_is_martingale() {
        let params = OuParams {
            mu: 4.0,
            nu: 0.0,
            sigma2: 1.0,
        };
        let n = 20_000;
        let xs = euler_maruyama(&params, 4.0, 0.5, 1e-3, n, 11);
        let sigma_t = params.variance_at(0.5).sqrt();
        assert!((mean(&xs) - 4.0).abs() < 3.0 * sigma_t / (n as f64).sqrt());
    }

    #[test]
    fn em_pure_diffusion_variance_grows_linearly() {
        let params = OuParams {
            mu: 0.0,
            nu: 0.0,
            sigma2: 2.5,
        };
        let xs = euler_maruyama(&params, 0.0, 0.4, 1e-3, 100_000, 13);
        let want = params.sigma2 * 0.4;
        assert!((variance(&xs) - want).abs() / want < 0.05);
    }

    #[test]
    fn em_snapshots_round_down_to_step_multiples() {
        let params = OuParams {
            mu: 0.0,
            nu: 1.0,
            sigma2: 1.0,
        };
        let (_, snaps) =
            euler_maruyama_with_snapshots(&params, 0.0, 1.0, 1e-3, 10, 3, &[0.2505, 0.9999]);
        assert!((snaps[0].time - 0.250).abs() < 1e-12);
        assert!((snaps[1].time - 0.999).abs() < 1e-12);
        assert_eq!(snaps[0].values.len(), 10);
    }

    #[test]
    fn copula_density_limits() {
        assert!((gaussian_copula_density(0.3, 0.8, 0.0).unwrap() - 1.0).abs() < 1e-12);
        let a = gaussian_copula_density(0.3, 0.7, 0.6).unwrap();
        let b = gaussian_copula_density(0.7, 0.3, 0.6).unwrap();
        assert!((a - b).abs() < 1e-12);
        // rho -> 1 concentrates on the diagonal.
        assert!(
            gaussian_copula_density(0.3, 0.3, 0.999).unwrap()
                > gaussian_copula_density(0.3, 0.3, 0.9).unwrap()
        );
        assert!(
            gaussian_copula_density(0.3, 0.7, 0.999).unwrap()
                < gaussian_copula_density(0.3, 0.7, 0.9).unwrap()
        );
        assert!(gaussian_copula_density(0.3, 0.3, 1.0).is_err());
    }

    #[test]
    fn copula_density_integrates_to_one() {
        // Substitute z = Phi(x): the integrand c(Phi(x), Phi(y)) phi(x)
        // phi(y) is smooth on [-8, 8]^2; Simpson with 160 panels per axis.
        for rho in [0.3, -0.5, 0.9] {
            let n = 160;
            let lo = -8.0;
            let hi = 8.0;
            let h = (hi - lo) / n as f64;
            let weight = |i: usize| -> f64 {
                if i == 0 || i == n {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                }
            };
            let mut total = 0.0;
            for i in 0..=n {
                let x = lo + i as f64 * h;
                for j in 0..=n {
                    let y = lo + j as f64 * h;
                    let c = gaussian_copula_density(normal_cdf(x), normal_cdf(y), rho).unwrap();
                    total += weight(i)
                        * weight(j)
                        * c
                        * gaussian_pdf(x, 0.0, 1.0)
                        * gaussian_pdf(y, 0.0, 1.0);
                }
            }
            total *= h * h / 9.0;
            assert!((total - 1.0).abs() < 1e-3, "rho={rho}: {total}");
        }
    }

    #[test]
    fn bivariate_sampling_statistics() {
        let base = BivariateNormalParams {
            mu1: 0.5,
            mu2: 0.5,
            sigma1: 0.1,
            sigma2: 0.1,
            rho12: 0.0,
        };
        let pairs = sample_bivariate_normal(&base, 10_000, 5).unwrap();
        assert!(pearson_correlation(&pairs).abs() < 0.03);
        let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        assert!((mean(&xs) - 0.5).abs() < 0.005);
        assert!((variance(&xs).sqrt() - 0.1).abs() < 0.01);

        let tight = BivariateNormalParams {
            rho12: 0.999,
            ..base
        };
        let pairs = sample_bivariate_normal(&tight, 10_000, 5).unwrap();
        assert!(pearson_correlation(&pairs) > 0.99);

        assert!(sample_bivariate_normal(
            &BivariateNormalParams {
                rho12: -1.0,
                ..base
            },
            10,
            1
        )
        .is_err());
    }

    #[test]
    fn histogram_normalization_exact() {
        let h = Histogram::from_samples(&[0.1, 0.2, 0.25, 0.8], 0.0, 1.0, 4).normalize();
        assert!((h.counts.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(h.edges.len(), 5);
    }
}
