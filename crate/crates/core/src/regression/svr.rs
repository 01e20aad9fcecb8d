//! Epsilon-insensitive support vector regression with an RBF kernel,
//! solved by sequential minimal optimization.
//!
//! The dual is written over `2n` variables `a = [alpha; alpha*]` with signs
//! `s = [+1; -1]`:
//!
//! ```text
//! min 1/2 a^T Q a + p^T a   s.t.  s^T a = 0,  0 <= a <= C
//! Q_ij = s_i s_j K(x_i, x_j),  p = [eps - y; eps + y]
//! ```
//!
//! Working pairs are chosen by maximal violation with second-order gain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvrParams {
    /// Box constraint; `None` uses `10 * std(y)`.
    pub c: Option<f64>,
    /// Tube half-width; `None` uses `0.05 * std(y)`.
    pub epsilon: Option<f64>,
    /// RBF width; `None` uses `1 / d`.
    pub gamma: Option<f64>,
    /// KKT violation tolerance.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SvrParams {
    fn default() -> Self {
        Self {
            c: None,
            epsilon: None,
            gamma: None,
            tolerance: 1e-3,
            max_iterations: 10_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvrModel {
    pub support: Vec<Vec<f64>>,
    /// `alpha_i - alpha*_i` for each stored support vector.
    pub coef: Vec<f64>,
    pub bias: f64,
    pub gamma: f64,
    pub c: f64,
    pub epsilon: f64,
    pub iterations: usize,
}

impl SvrModel {
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.bias
            + self
                .support
                .iter()
                .zip(&self.coef)
                .map(|(sv, c)| c * rbf(self.gamma, sv, x))
                .sum::<f64>()
    }
}

fn rbf(gamma: f64, a: &[f64], b: &[f64]) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

fn sample_std(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    if v.len() < 2 {
        return 0.0;
    }
    let mean = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Full dual solution, kept for inspection.
#[derive(Clone, Debug)]
pub struct SvrSolution {
    pub alpha: Vec<f64>,
    pub alpha_star: Vec<f64>,
    pub model: SvrModel,
}

const TAU: f64 = 1e-12;

pub fn solve(rows: &[Vec<f64>], targets: &[f64], params: &SvrParams) -> Result<SvrSolution> {
    let l = rows.len();
    if l < 2 {
        return Err(Error::EmptyInput("SVR needs at least 2 rows"));
    }
    let d = rows[0].len();
    let sy = sample_std(targets);
    let c = params.c.unwrap_or(10.0 * sy);
    let eps = params.epsilon.unwrap_or(0.05 * sy);
    let gamma = params.gamma.unwrap_or(1.0 / d.max(1) as f64);
    if !(c >= 0.0 && eps >= 0.0 && gamma > 0.0) || !(c.is_finite() && eps.is_finite()) {
        return Err(Error::BadHyperparameter(format!(
            "SVR needs C >= 0, epsilon >= 0, gamma > 0 (got {c}, {eps}, {gamma})"
        )));
    }

    let kernel: Vec<f64> = {
        let mut k = vec![0.0; l * l];
        for i in 0..l {
            for j in i..l {
                let v = rbf(gamma, &rows[i], &rows[j]);
                k[i * l + j] = v;
                k[j * l + i] = v;
            }
        }
        k
    };
    let kij = |i: usize, j: usize| kernel[(i % l) * l + (j % l)];
    let sign = |t: usize| if t < l { 1.0 } else { -1.0 };

    let n = 2 * l;
    let mut a = vec![0.0; n];
    let mut grad: Vec<f64> = (0..n)
        .map(|t| if t < l { eps - targets[t] } else { eps + targets[t - l] })
        .collect();
    let is_upper = |v: f64| v >= c;
    let is_lower = |v: f64| v <= 0.0;

    let mut iterations = 0;
    loop {
        // i: maximal violator in the "up" direction
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            if sign(t) > 0.0 {
                if !is_upper(a[t]) && -grad[t] >= gmax {
                    gmax = -grad[t];
                    i_sel = Some(t);
                }
            } else if !is_lower(a[t]) && grad[t] >= gmax {
                gmax = grad[t];
                i_sel = Some(t);
            }
        }
        let Some(i) = i_sel else { break };
        let si = sign(i);
        let qii = kij(i, i);

        // j: best second-order gain among "down" violators
        let mut gmax2 = f64::NEG_INFINITY;
        let mut best_obj = f64::INFINITY;
        let mut j_sel = None;
        for t in 0..n {
            let st = sign(t);
            let q_it = si * st * kij(i, t);
            if st > 0.0 {
                if !is_lower(a[t]) {
                    let diff = gmax + grad[t];
                    gmax2 = gmax2.max(grad[t]);
                    if diff > 0.0 {
                        let quad = qii + kij(t, t) - 2.0 * si * q_it;
                        let obj = -diff * diff / quad.max(TAU);
                        if obj <= best_obj {
                            best_obj = obj;
                            j_sel = Some(t);
                        }
                    }
                }
            } else if !is_upper(a[t]) {
                let diff = gmax - grad[t];
                gmax2 = gmax2.max(-grad[t]);
                if diff > 0.0 {
                    let quad = qii + kij(t, t) + 2.0 * si * q_it;
                    let obj = -diff * diff / quad.max(TAU);
                    if obj <= best_obj {
                        best_obj = obj;
                        j_sel = Some(t);
                    }
                }
            }
        }
        if gmax + gmax2 < params.tolerance {
            break;
        }
        let Some(j) = j_sel else { break };
        iterations += 1;
        if iterations > params.max_iterations {
            return Err(Error::TrainingDiverged(format!(
                "SMO did not converge within {} iterations",
                params.max_iterations
            )));
        }

        let sj = sign(j);
        let q_ij = si * sj * kij(i, j);
        let qjj = kij(j, j);
        let (old_i, old_j) = (a[i], a[j]);
        if si != sj {
            let quad = (qii + qjj + 2.0 * q_ij).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = a[i] - a[j];
            a[i] += delta;
            a[j] += delta;
            if diff > 0.0 {
                if a[j] < 0.0 {
                    a[j] = 0.0;
                    a[i] = diff;
                }
            } else if a[i] < 0.0 {
                a[i] = 0.0;
                a[j] = -diff;
            }
            if diff > 0.0 {
                if a[i] > c {
                    a[i] = c;
                    a[j] = c - diff;
                }
            } else if a[j] > c {
                a[j] = c;
                a[i] = c + diff;
            }
        } else {
            let quad = (qii + qjj - 2.0 * q_ij).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = a[i] + a[j];
            a[i] -= delta;
            a[j] += delta;
            if sum > c {
                if a[i] > c {
                    a[i] = c;
                    a[j] = sum - c;
                }
            } else if a[j] < 0.0 {
                a[j] = 0.0;
                a[i] = sum;
            }
            if sum > c {
                if a[j] > c {
                    a[j] = c;
                    a[i] = sum - c;
                }
            } else if a[i] < 0.0 {
                a[i] = 0.0;
                a[j] = sum;
            }
        }
        let (di, dj) = (a[i] - old_i, a[j] - old_j);
        for t in 0..n {
            let st = sign(t);
            grad[t] += si * st * kij(i, t) * di + sj * st * kij(j, t) * dj;
        }
    }

    // bias from free variables, or the midpoint of the feasible interval
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free_sum, mut free_count) = (0.0, 0usize);
    for t in 0..n {
        let st = sign(t);
        let yg = st * grad[t];
        if is_upper(a[t]) {
            if st < 0.0 { ub = ub.min(yg) } else { lb = lb.max(yg) }
        } else if is_lower(a[t]) {
            if st > 0.0 { ub = ub.min(yg) } else { lb = lb.max(yg) }
        } else {
            free_sum += yg;
            free_count += 1;
        }
    }
    let rho = if free_count > 0 {
        free_sum / free_count as f64
    } else {
        (ub + lb) / 2.0
    };

    let alpha = a[..l].to_vec();
    let alpha_star = a[l..].to_vec();
    let mut support = Vec::new();
    let mut coef = Vec::new();
    for k in 0..l {
        let cf = alpha[k] - alpha_star[k];
        if cf != 0.0 {
            support.push(rows[k].clone());
            coef.push(cf);
        }
    }
    Ok(SvrSolution {
        alpha,
        alpha_star,
        model: SvrModel {
            support,
            coef,
            bias: -rho,
            gamma,
            c,
            epsilon: eps,
            iterations,
        },
    })
}
