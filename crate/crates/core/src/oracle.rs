//! Independent ground-truth machinery: dense closed-form posteriors and
//! brute-force chain conditionals.
//!
//! Nothing in here touches the sampler modules; agreement between the
//! two routes is evidence, not tautology. Everything is desk-scale dense
//! linear algebra.

use crate::error::{Error, Result};
use crate::schedule::Schedule;
use nalgebra::{Cholesky, DMatrix, DVector};

/// Multivariate normal given by explicit moments.
#[derive(Debug, Clone)]
pub struct DenseGaussian {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
}

impl DenseGaussian {
    /// Validates symmetry and positive definiteness.
    pub fn new(mean: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        let n = mean.len();
        if covariance.nrows() != n || covariance.ncols() != n {
            return Err(Error::Dimension(format!(
                "covariance is {}x{}, mean has {n} entries",
                covariance.nrows(),
                covariance.ncols()
            )));
        }
        for i in 0..n {
            for j in 0..i {
                if (covariance[(i, j)] - covariance[(j, i)]).abs() > 1e-12 {
                    return Err(Error::Numerical("covariance is not symmetric".into()));
                }
            }
        }
        if Cholesky::new(covariance.clone()).is_none() {
            return Err(Error::Numerical("covariance is not positive definite".into()));
        }
        Ok(Self { mean, covariance })
    }

    pub fn isotropic(mean: DVector<f64>, variance: f64) -> Result<Self> {
        let n = mean.len();
        Self::new(mean, DMatrix::identity(n, n) * variance)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Exact Gaussian posterior for `y = H x + e`, `e ~ N(0, v_e I)`, under
/// the given Gaussian prior: precision `H^T H / v_e + C^-1`, mean
/// `precision^-1 (H^T y / v_e + C^-1 m)`.
pub fn exact_posterior(
    h: &DMatrix<f64>,
    v_e: f64,
    prior: &DenseGaussian,
    y: &DVector<f64>,
) -> Result<DenseGaussian> {
    let p = prior.dim();
    if h.ncols() != p {
        return Err(Error::Dimension(format!(
            "operator has {} columns, prior dimension is {p}",
            h.ncols()
        )));
    }
    if h.nrows() != y.len() {
        return Err(Error::Dimension(format!(
            "operator has {} rows, measurement has {} entries",
            h.nrows(),
            y.len()
        )));
    }
    if v_e <= 0.0 {
        return Err(Error::Parameter("noise variance must be positive".into()));
    }
    let prior_chol = Cholesky::new(prior.covariance.clone())
        .ok_or_else(|| Error::Numerical("prior covariance is singular".into()))?;
    let prior_precision = prior_chol.inverse();

    let precision = h.transpose() * h / v_e + &prior_precision;
    let chol = Cholesky::new(precision)
        .ok_or_else(|| Error::Numerical("posterior precision is singular".into()))?;
    let covariance = chol.inverse();
    let b = h.transpose() * y / v_e + &prior_precision * &prior.mean;
    let mean = &covariance * b;
    // Symmetrize away the rounding skew from the explicit inverse.
    let covariance = (&covariance + covariance.transpose()) * 0.5;
    Ok(DenseGaussian { mean, covariance })
}

/// Conditional law of one level of the forward chain at a single pixel,
/// given values at an arbitrary subset of the other levels.
///
/// Builds the explicit `(T+1) x (T+1)` joint Gaussian of `x_0..x_T`
/// under `x_0 ~ N(prior_mean, prior_var)` and the schedule's raw
/// transition coefficients, then conditions. Brute force by design; the
/// closed-form block conditionals are validated against this.
pub fn dense_chain_conditional(
    schedule: &Schedule,
    prior_mean: f64,
    prior_var: f64,
    target: usize,
    given: &[(usize, f64)],
) -> Result<(f64, f64)> {
    let t_max = schedule.steps();
    if target > t_max {
        return Err(Error::Parameter(format!("target level {target} > T={t_max}")));
    }
    if given.iter().any(|&(l, _)| l > t_max) {
        return Err(Error::Parameter("conditioning level out of range".into()));
    }
    if given.iter().any(|&(l, _)| l == target) {
        return Err(Error::Parameter("cannot condition the target on itself".into()));
    }
    if prior_var <= 0.0 {
        return Err(Error::Parameter("prior variance must be positive".into()));
    }

    // Joint moments of the chain at one pixel.
    let n = t_max + 1;
    let mut mean = vec![0.0; n];
    let mut var = vec![0.0; n];
    mean[0] = prior_mean;
    var[0] = prior_var;
    for t in 1..n {
        mean[t] = schedule.k(t) * mean[t - 1];
        var[t] = schedule.k(t).powi(2) * var[t - 1] + schedule.beta(t);
    }
    let mut cov = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut c = var[i];
            for s in (i + 1)..=j {
                c *= schedule.k(s);
            }
            cov[(i, j)] = c;
            cov[(j, i)] = c;
        }
    }

    if given.is_empty() {
        return Ok((mean[target], var[target]));
    }

    let g = given.len();
    let mut cov_gg = DMatrix::zeros(g, g);
    let mut cov_tg = DVector::zeros(g);
    let mut resid = DVector::zeros(g);
    for (a, &(la, va)) in given.iter().enumerate() {
        for (b, &(lb, _)) in given.iter().enumerate() {
            cov_gg[(a, b)] = cov[(la, lb)];
        }
        cov_tg[a] = cov[(target, la)];
        resid[a] = va - mean[la];
    }
    let chol = Cholesky::new(cov_gg)
        .ok_or_else(|| Error::Numerical("conditioning covariance is singular".into()))?;
    let weights = chol.solve(&cov_tg);
    let cond_mean = mean[target] + weights.dot(&resid);
    let cond_var = var[target] - weights.dot(&cov_tg);
    Ok((cond_mean, cond_var))
}

/// Scalar Gaussian mixture, used as the exact posterior of 1-D
/// mixture-prior problems.
#[derive(Debug, Clone)]
pub struct ScalarMixture {
    /// `(weight, mean, variance)` triples; weights sum to one.
    pub components: Vec<(f64, f64, f64)>,
}

impl ScalarMixture {
    pub fn mean(&self) -> f64 {
        self.components.iter().map(|&(w, m, _)| w * m).sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.components
            .iter()
            .map(|&(w, m, v)| w * (v + m * m))
            .sum::<f64>()
            - mean * mean
    }
}

/// Exact posterior of a scalar problem `y = h x + e` with a Gaussian
/// mixture prior: component-wise conjugate updates with evidence-weighted
/// mixture weights.
pub fn gmm_posterior_1d(
    prior: &[(f64, f64, f64)],
    h: f64,
    v_e: f64,
    y: f64,
) -> Result<ScalarMixture> {
    if prior.is_empty() {
        return Err(Error::Parameter("mixture prior has no components".into()));
    }
    if v_e <= 0.0 {
        return Err(Error::Parameter("noise variance must be positive".into()));
    }
    if prior.iter().any(|&(w, _, v)| w <= 0.0 || v <= 0.0) {
        return Err(Error::Parameter("mixture weights and variances must be positive".into()));
    }
    let mut log_ev = Vec::with_capacity(prior.len());
    let mut moments = Vec::with_capacity(prior.len());
    for &(w, m, s2) in prior {
        let ev_var = h * h * s2 + v_e;
        let log_n = -0.5 * ((y - h * m).powi(2) / ev_var
            + (2.0 * std::f64::consts::PI * ev_var).ln());
        log_ev.push(w.ln() + log_n);
        let post_var = 1.0 / (h * h / v_e + 1.0 / s2);
        let post_mean = post_var * (h * y / v_e + m / s2);
        moments.push((post_mean, post_var));
    }
    let max = log_ev.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let norm: f64 = log_ev.iter().map(|l| (l - max).exp()).sum();
    let components = log_ev
        .iter()
        .zip(moments)
        .map(|(&l, (m, v))| ((l - max).exp() / norm, m, v))
        .collect();
    Ok(ScalarMixture { components })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn equal_precision_average() {
        let h = DMatrix::identity(3, 3);
        let prior = DenseGaussian::isotropic(DVector::zeros(3), 1.0).unwrap();
        let y = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let post = exact_posterior(&h, 1.0, &prior, &y).unwrap();
        for i in 0..3 {
            assert!((post.mean[i] - y[i] / 2.0).abs() < 1e-12);
            assert!((post.covariance[(i, i)] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn infinite_noise_returns_prior() {
        let h = DMatrix::identity(2, 2);
        let mean = DVector::from_vec(vec![0.3, -0.1]);
        let mut cov = DMatrix::identity(2, 2) * 0.5;
        cov[(0, 1)] = 0.1;
        cov[(1, 0)] = 0.1;
        let prior = DenseGaussian::new(mean.clone(), cov.clone()).unwrap();
        let y = DVector::from_vec(vec![5.0, 5.0]);
        let post = exact_posterior(&h, 1e12, &prior, &y).unwrap();
        assert!((post.mean - mean).norm() < 1e-9);
        assert!((post.covariance - cov).norm() < 1e-9);
    }

    /// Second, independent route: condition the joint Gaussian of (x, y)
    /// directly.
    #[test]
    fn two_route_consistency_on_random_instance() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 4;
        let h = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let cov = &a * a.transpose() + DMatrix::identity(n, n) * 0.5;
        let mean = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let prior = DenseGaussian::new(mean.clone(), cov.clone()).unwrap();
        let y = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let v_e = 0.2;

        let post = exact_posterior(&h, v_e, &prior, &y).unwrap();

        let cross = &cov * h.transpose();
        let marg = &h * &cov * h.transpose() + DMatrix::identity(n, n) * v_e;
        let marg_inv = marg.try_inverse().unwrap();
        let mean2 = &mean + &cross * &marg_inv * (&y - &h * &mean);
        let cov2 = &cov - &cross * &marg_inv * cross.transpose();

        assert!((post.mean - mean2).norm() < 1e-10);
        assert!((post.covariance - cov2).norm() < 1e-10);
    }

    #[test]
    fn posterior_mean_minimizes_tikhonov_objective() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let n = 5;
        let h = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-0.5..0.5));
        let cov = &a * a.transpose() + DMatrix::identity(n, n);
        let mean = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let prior = DenseGaussian::new(mean.clone(), cov.clone()).unwrap();
        let y = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let v_e = 0.4;
        let post = exact_posterior(&h, v_e, &prior, &y).unwrap();

        let grad = 2.0 * h.transpose() * (&h * &post.mean - &y) / v_e
            + 2.0 * cov.try_inverse().unwrap() * (&post.mean - &mean);
        assert!(grad.norm() <= 1e-8, "gradient norm {}", grad.norm());
    }

    #[test]
    fn terminal_conditional_variance_is_beta() {
        let s = Schedule::linear_vp(7, 0.05, 0.3).unwrap();
        let (mean, var) =
            dense_chain_conditional(&s, 0.2, 0.8, 7, &[(6, 0.4)]).unwrap();
        assert!((var - s.beta(7)).abs() < 1e-12);
        assert!((mean - s.k(7) * 0.4).abs() < 1e-12);
    }

    #[test]
    fn symmetric_interior_conditional_is_midpoint() {
        // Raw non-VP chain with unit coefficients: conditioning an
        // interior level on both neighbors averages them.
        let s = Schedule::raw(vec![1.0, 1.0, 1.0], vec![1.0, 1.0, 1.0], vec![1.0, 1.0, 1.0]);
        let (mean, var) =
            dense_chain_conditional(&s, 0.0, 1.0, 1, &[(0, 0.3), (2, 0.9)]).unwrap();
        assert!((mean - 0.6).abs() < 1e-12);
        assert!((var - 0.5).abs() < 1e-12);
    }

    #[test]
    fn markov_property_conditioning_on_more_levels_changes_nothing() {
        let s = Schedule::linear_vp(9, 0.02, 0.3).unwrap();
        let values: Vec<f64> = (0..=9).map(|i| (i as f64 * 0.71).sin()).collect();
        let neighbors = [(3usize, values[3]), (5usize, values[5])];
        let all: Vec<(usize, f64)> =
            (0..=9).filter(|&l| l != 4).map(|l| (l, values[l])).collect();
        let a = dense_chain_conditional(&s, 0.1, 0.7, 4, &neighbors).unwrap();
        let b = dense_chain_conditional(&s, 0.1, 0.7, 4, &all).unwrap();
        assert!((a.0 - b.0).abs() < 1e-10 && (a.1 - b.1).abs() < 1e-10);
    }

    #[test]
    fn single_component_mixture_reduces_to_conjugate_update() {
        let post = gmm_posterior_1d(&[(1.0, 0.4, 0.9)], 1.3, 0.2, 0.7).unwrap();
        let h = DMatrix::from_element(1, 1, 1.3);
        let prior = DenseGaussian::isotropic(DVector::from_element(1, 0.4), 0.9).unwrap();
        let dense = exact_posterior(&h, 0.2, &prior, &DVector::from_element(1, 0.7)).unwrap();
        assert_eq!(post.components.len(), 1);
        let (w, m, v) = post.components[0];
        assert!((w - 1.0).abs() < 1e-15);
        assert!((m - dense.mean[0]).abs() < 1e-12);
        assert!((v - dense.covariance[(0, 0)]).abs() < 1e-12);
    }

    #[test]
    fn symmetric_mixture_posterior_is_centered() {
        let prior = [(0.5, -0.8, 0.3), (0.5, 0.8, 0.3)];
        let post = gmm_posterior_1d(&prior, 1.0, 0.5, 0.0).unwrap();
        assert!(post.mean().abs() < 1e-12);
        assert!((post.components[0].0 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn mixture_posterior_matches_quadrature() {
        let prior = [(0.3, -1.0, 0.4), (0.7, 0.9, 0.2)];
        let (h, v_e, y) = (0.8, 0.3, 0.5);
        let post = gmm_posterior_1d(&prior, h, v_e, y).unwrap();

        // Composite Simpson over the unnormalized posterior density.
        let density = |x: f64| -> f64 {
            let prior_pdf: f64 = prior
                .iter()
                .map(|&(w, m, s2)| {
                    w * (-0.5 * (x - m) * (x - m) / s2).exp()
                        / (2.0 * std::f64::consts::PI * s2).sqrt()
                })
                .sum();
            let lik = (-0.5 * (y - h * x) * (y - h * x) / v_e).exp();
            prior_pdf * lik
        };
        let (lo, hi, n) = (-12.0, 12.0, 48_000usize);
        let step = (hi - lo) / n as f64;
        let mut z = 0.0;
        let mut first = 0.0;
        for i in 0..=n {
            let x = lo + i as f64 * step;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            z += w * density(x);
            first += w * x * density(x);
        }
        let quad_mean = first / z;
        assert!(
            (post.mean() - quad_mean).abs() < 1e-8,
            "closed form {} vs quadrature {}",
            post.mean(),
            quad_mean
        );
    }
}
