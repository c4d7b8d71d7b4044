//! Levenberg–Marquardt on nine parameters with a central-difference Jacobian.

use nalgebra::{DMatrix, SMatrix, SVector};

pub type Params = SVector<f64, 9>;
pub type Normal = SMatrix<f64, 9, 9>;

const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy)]
pub struct LmSettings {
    pub max_iters: usize,
    /// Stop once the residual norm drops below this.
    pub target: f64,
}

#[derive(Debug, Clone)]
pub struct LmOutcome {
    pub params: Params,
    /// Euclidean norm of the final residual vector.
    pub residual: f64,
    pub iterations: usize,
}

/// Central-difference Jacobian; `None` if a probe point leaves the admissible region.
pub fn jacobian<F>(params: &Params, residual: &F) -> Option<DMatrix<f64>>
where
    F: Fn(&Params) -> Option<Vec<f64>>,
{
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(9);
    for k in 0..9 {
        let mut plus = *params;
        let mut minus = *params;
        plus[k] += FD_STEP;
        minus[k] -= FD_STEP;
        let rp = residual(&plus)?;
        let rm = residual(&minus)?;
        cols.push(
            rp.iter()
                .zip(&rm)
                .map(|(a, b)| (a - b) / (2.0 * FD_STEP))
                .collect(),
        );
    }
    let m = cols[0].len();
    Some(DMatrix::from_fn(m, 9, |i, k| cols[k][i]))
}

fn normal_equations(j: &DMatrix<f64>, r: &[f64]) -> (Normal, Params) {
    let mut a = Normal::zeros();
    let mut g = Params::zeros();
    for p in 0..9 {
        for q in p..9 {
            let v = j.column(p).dot(&j.column(q));
            a[(p, q)] = v;
            a[(q, p)] = v;
        }
        g[p] = j.column(p).iter().zip(r).map(|(x, y)| x * y).sum();
    }
    (a, g)
}

fn norm(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Minimise `‖r(θ)‖²` from `start`. `residual` returns `None` where the parameters are not
/// admissible; such trial steps are rejected like cost increases. Returns `None` if the
/// start itself is inadmissible.
pub fn minimize<F>(start: Params, residual: F, settings: LmSettings) -> Option<LmOutcome>
where
    F: Fn(&Params) -> Option<Vec<f64>>,
{
    let mut x = start;
    let mut r = residual(&x)?;
    let mut cost = norm(&r);
    let mut lambda: Option<f64> = None;
    let mut nu = 2.0;
    let mut iterations = 0;

    while iterations < settings.max_iters && cost > settings.target {
        iterations += 1;
        let Some(j) = jacobian(&x, &residual) else { break };
        let (a, g) = normal_equations(&j, &r);
        if g.amax() < 1e-300 {
            break;
        }
        let scale = (0..9).map(|k| a[(k, k)]).fold(0.0_f64, f64::max).max(1e-300);
        let mut mu = *lambda.get_or_insert(1e-3 * scale);
        let mut accepted = false;
        for _ in 0..60 {
            let mut damped = a;
            for k in 0..9 {
                damped[(k, k)] += mu * (a[(k, k)] + 1e-9 * scale);
            }
            let step = match damped.cholesky() {
                Some(ch) => ch.solve(&(-g)),
                None => {
                    mu *= nu;
                    nu *= 2.0;
                    continue;
                }
            };
            if step.norm() <= 1e-15 * (x.norm() + 1e-15) {
                break;
            }
            let trial = x + step;
            if let Some(rt) = residual(&trial) {
                let cost_t = norm(&rt);
                // predicted decrease of ½‖r‖² under the damped model
                let mut diag_step = step;
                for k in 0..9 {
                    diag_step[k] *= mu * (a[(k, k)] + 1e-9 * scale);
                }
                let predicted = 0.5 * step.dot(&(diag_step - g));
                let actual = 0.5 * (cost * cost - cost_t * cost_t);
                if actual > 0.0 && predicted > 0.0 {
                    let rho = actual / predicted;
                    x = trial;
                    r = rt;
                    let rel = (cost - cost_t) / cost.max(1e-300);
                    cost = cost_t;
                    mu *= (1.0 / 3.0_f64).max(1.0 - (2.0 * rho - 1.0).powi(3));
                    nu = 2.0;
                    accepted = true;
                    lambda = Some(mu);
                    if rel < 1e-12 && cost > settings.target {
                        // stagnated at a non-zero local minimum
                        return Some(LmOutcome {
                            params: x,
                            residual: cost,
                            iterations,
                        });
                    }
                    break;
                }
            }
            mu *= nu;
            nu *= 2.0;
        }
        if !accepted {
            break;
        }
    }
    Some(LmOutcome {
        params: x,
        residual: cost,
        iterations,
    })
}

/// Normal matrix `JᵀJ` of a residual at `params`.
pub fn normal_matrix<F>(params: &Params, residual: &F) -> Option<Normal>
where
    F: Fn(&Params) -> Option<Vec<f64>>,
{
    let j = jacobian(params, residual)?;
    let r = residual(params)?;
    Some(normal_equations(&j, &r).0)
}
