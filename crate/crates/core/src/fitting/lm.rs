//! Damped Gauss-Newton (Levenberg-Marquardt) for small dense problems.

use nalgebra::{DMatrix, DVector};

/// A scalar model `y = f(x; p)` with an analytic gradient in `p`.
pub trait Model {
    fn n_params(&self) -> usize;

    fn eval(&self, x: f64, p: &[f64]) -> f64;

    /// Writes `df/dp_j` into `out[j]`.
    fn gradient(&self, x: f64, p: &[f64], out: &mut [f64]);

    /// Parameter vectors outside the model domain are never accepted.
    fn is_valid(&self, _p: &[f64]) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// Scaled relative parameter change that ends the iteration.
    pub xtol: f64,
    /// Largest accepted cosine between the residual and any Jacobian column.
    pub gtol: f64,
    pub initial_lambda: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions {
            max_iterations: 200,
            xtol: 1e-8,
            gtol: 1e-6,
            initial_lambda: 1e-3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LmOutcome {
    pub params: Vec<f64>,
    pub chi2: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Largest cosine between the weighted residual and a Jacobian column.
    pub gradient_cosine: f64,
    /// `(J^T W J)^-1` at the solution, if positive definite.
    pub covariance: Option<DMatrix<f64>>,
}

/// Weighted sum of squared residuals. `weights` are inverse variances.
pub fn objective<M: Model + ?Sized>(model: &M, x: &[f64], y: &[f64], w: &[f64], p: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .zip(w)
        .map(|((&xi, &yi), &wi)| {
            let r = yi - model.eval(xi, p);
            wi * r * r
        })
        .sum()
}

/// Analytic gradient of [`objective`] with respect to the parameters.
pub fn objective_gradient<M: Model + ?Sized>(
    model: &M,
    x: &[f64],
    y: &[f64],
    w: &[f64],
    p: &[f64],
) -> Vec<f64> {
    let mut g = vec![0.0; p.len()];
    let mut d = vec![0.0; p.len()];
    for ((&xi, &yi), &wi) in x.iter().zip(y).zip(w) {
        let r = yi - model.eval(xi, p);
        model.gradient(xi, p, &mut d);
        for (gj, dj) in g.iter_mut().zip(&d) {
            *gj -= 2.0 * wi * r * dj;
        }
    }
    g
}

struct Linearization {
    /// `J^T W J`
    alpha: DMatrix<f64>,
    /// `J^T W r`
    beta: DVector<f64>,
    chi2: f64,
    /// Squared weighted norm of each Jacobian column.
    column_norms: Vec<f64>,
}

fn linearize<M: Model + ?Sized>(model: &M, x: &[f64], y: &[f64], w: &[f64], p: &[f64]) -> Linearization {
    let n = p.len();
    let mut alpha = DMatrix::zeros(n, n);
    let mut beta = DVector::zeros(n);
    let mut chi2 = 0.0;
    let mut d = vec![0.0; n];
    for ((&xi, &yi), &wi) in x.iter().zip(y).zip(w) {
        let r = yi - model.eval(xi, p);
        chi2 += wi * r * r;
        model.gradient(xi, p, &mut d);
        for j in 0..n {
            beta[j] += wi * r * d[j];
            for k in 0..=j {
                alpha[(j, k)] += wi * d[j] * d[k];
            }
        }
    }
    for j in 0..n {
        for k in 0..j {
            alpha[(k, j)] = alpha[(j, k)];
        }
    }
    let column_norms = (0..n).map(|j| alpha[(j, j)]).collect();
    Linearization {
        alpha,
        beta,
        chi2,
        column_norms,
    }
}

fn gradient_cosine(lin: &Linearization, data_scale: f64) -> f64 {
    // residuals below this fraction of the data norm count as an exact fit
    let rnorm = lin.chi2.sqrt().max(1e-8 * data_scale.sqrt());
    lin.beta
        .iter()
        .zip(&lin.column_norms)
        .map(|(b, c)| if *c > 0.0 { b.abs() / (rnorm * c.sqrt()) } else { 0.0 })
        .fold(0.0, f64::max)
}

/// Minimises the weighted sum of squares starting from `p0`.
pub fn levenberg_marquardt<M: Model + ?Sized>(
    model: &M,
    x: &[f64],
    y: &[f64],
    w: &[f64],
    p0: &[f64],
    opts: &LmOptions,
) -> LmOutcome {
    assert_eq!(p0.len(), model.n_params());
    let n = p0.len();
    let data_scale: f64 = y.iter().zip(w).map(|(yi, wi)| wi * yi * yi).sum::<f64>().max(1e-300);
    let mut p = p0.to_vec();
    let mut lin = linearize(model, x, y, w, &p);
    let mut lambda = opts.initial_lambda;
    let mut iterations = 0;
    let mut small_step = false;

    while iterations < opts.max_iterations {
        iterations += 1;
        let mut accepted = false;
        while lambda < 1e16 {
            let mut a = lin.alpha.clone();
            for j in 0..n {
                let dj = lin.alpha[(j, j)].max(1e-300);
                a[(j, j)] += lambda * dj;
            }
            let Some(chol) = a.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let step = chol.solve(&lin.beta);
            let trial: Vec<f64> = p.iter().zip(step.iter()).map(|(pj, sj)| pj + sj).collect();
            if !model.is_valid(&trial) || trial.iter().any(|v| !v.is_finite()) {
                lambda *= 10.0;
                continue;
            }
            let chi2 = objective(model, x, y, w, &trial);
            if chi2.is_finite() && chi2 <= lin.chi2 {
                let scaled = |v: &[f64]| -> f64 {
                    v.iter()
                        .zip(&lin.column_norms)
                        .map(|(vj, cj)| vj * vj * cj)
                        .sum::<f64>()
                        .sqrt()
                };
                let step_norm = scaled(step.as_slice());
                let p_norm = scaled(&trial);
                small_step = step_norm <= opts.xtol * p_norm.max(1e-300)
                    || lin.chi2 - chi2 <= 1e-15 * lin.chi2;
                p = trial;
                lin = linearize(model, x, y, w, &p);
                lambda = (lambda / 10.0).max(1e-12);
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            // no downhill step at any damping: p is a minimum to working precision
            small_step = true;
            break;
        }
        if small_step {
            break;
        }
    }

    let cosine = gradient_cosine(&lin, data_scale);
    let covariance = lin.alpha.clone().cholesky().map(|c| c.inverse());
    LmOutcome {
        params: p,
        chi2: lin.chi2,
        iterations,
        converged: small_step && cosine <= opts.gtol,
        gradient_cosine: cosine,
        covariance,
    }
}

/// Weighted linear least squares `y ~ sum_j c_j basis_j(x)`.
pub(crate) fn linear_lstsq(basis: &[Vec<f64>], y: &[f64], w: &[f64]) -> Option<(Vec<f64>, f64)> {
    let m = basis.len();
    let mut a = DMatrix::zeros(m, m);
    let mut b = DVector::zeros(m);
    for i in 0..y.len() {
        for j in 0..m {
            b[j] += w[i] * basis[j][i] * y[i];
            for k in 0..m {
                a[(j, k)] += w[i] * basis[j][i] * basis[k][i];
            }
        }
    }
    let c = a.cholesky()?.solve(&b);
    let chi2 = (0..y.len())
        .map(|i| {
            let f: f64 = (0..m).map(|j| c[j] * basis[j][i]).sum();
            w[i] * (y[i] - f) * (y[i] - f)
        })
        .sum();
    Some((c.iter().copied().collect(), chi2))
}
