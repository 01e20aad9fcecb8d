//! Fully connected feedforward regressor: ReLU hidden layers, linear output,
//! mean squared error, mini-batch Adam.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub hidden_layers: usize,
    pub width: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Relative improvement of the epoch loss below which an epoch counts as stalled.
    pub plateau_tolerance: f64,
    /// Consecutive stalled epochs that stop training.
    pub patience: usize,
}

impl Default for MlpParams {
    fn default() -> Self {
        Self {
            hidden_layers: 10,
            width: 16,
            learning_rate: 1e-3,
            batch_size: 32,
            max_epochs: 2000,
            plateau_tolerance: 1e-6,
            patience: 20,
        }
    }
}

impl MlpParams {
    pub(crate) fn validate(&self) -> Result<()> {
        if self.width == 0 || self.batch_size == 0 || self.max_epochs == 0 {
            return Err(Error::BadHyperparameter(
                "MLP width, batch size and epochs must be >= 1".into(),
            ));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::BadHyperparameter("MLP learning rate must be > 0".into()));
        }
        Ok(())
    }
}

/// Layer sizes plus all weights and biases in one flat vector. Layer `l`
/// stores its `out x in` weight matrix row-major, then its `out` biases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Network {
    sizes: Vec<usize>,
    params: Vec<f64>,
}

fn layer_len(inp: usize, out: usize) -> usize {
    out * inp + out
}

impl Network {
    /// He-initialized network with zero biases.
    pub fn new(input: usize, hidden_layers: usize, width: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut sizes = vec![input];
        sizes.extend(std::iter::repeat_n(width, hidden_layers));
        sizes.push(1);
        let mut params = Vec::new();
        for w in sizes.windows(2) {
            let (inp, out) = (w[0], w[1]);
            let std = (2.0 / inp.max(1) as f64).sqrt();
            let normal = Normal::new(0.0, std).expect("positive std");
            params.extend((0..out * inp).map(|_| normal.sample(rng)));
            params.extend(std::iter::repeat_n(0.0, out));
        }
        Self { sizes, params }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn layers(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut cur = x.to_vec();
        let mut next = Vec::new();
        let mut offset = 0;
        for l in 0..self.layers() {
            let (inp, out) = (self.sizes[l], self.sizes[l + 1]);
            let w = &self.params[offset..offset + out * inp];
            let b = &self.params[offset + out * inp..offset + layer_len(inp, out)];
            next.clear();
            for o in 0..out {
                let row = &w[o * inp..(o + 1) * inp];
                let z = b[o] + row.iter().zip(&cur).map(|(a, c)| a * c).sum::<f64>();
                next.push(if l + 1 < self.layers() { z.max(0.0) } else { z });
            }
            std::mem::swap(&mut cur, &mut next);
            offset += layer_len(inp, out);
        }
        cur[0]
    }

    /// Loss `sum (y_hat - y)^2 / (2 m)` over the batch.
    pub fn loss(&self, xs: &[Vec<f64>], ys: &[f64]) -> f64 {
        let m = xs.len() as f64;
        xs.iter()
            .zip(ys)
            .map(|(x, y)| {
                let e = self.predict(x) - y;
                e * e
            })
            .sum::<f64>()
            / (2.0 * m)
    }

    /// Loss and its gradient with respect to `params`, by backpropagation.
    pub fn loss_and_gradient(&self, xs: &[Vec<f64>], ys: &[f64]) -> (f64, Vec<f64>) {
        let mut grad = vec![0.0; self.params.len()];
        let mut work = Workspace::new(&self.sizes);
        let refs: Vec<&[f64]> = xs.iter().map(Vec::as_slice).collect();
        let loss = self.accumulate(&refs, ys, &mut grad, &mut work);
        (loss, grad)
    }

    /// Adds the batch gradient into `grad` and returns the batch loss.
    fn accumulate(&self, xs: &[&[f64]], ys: &[f64], grad: &mut [f64], work: &mut Workspace) -> f64 {
        let m = xs.len() as f64;
        let layers = self.layers();
        let mut loss = 0.0;
        for (x, &y) in xs.iter().zip(ys) {
            // forward, keeping every activation
            work.acts[0].copy_from_slice(x);
            let mut offset = 0;
            for l in 0..layers {
                let (inp, out) = (self.sizes[l], self.sizes[l + 1]);
                let w = &self.params[offset..offset + out * inp];
                let b = &self.params[offset + out * inp..offset + layer_len(inp, out)];
                let (prev, rest) = work.acts.split_at_mut(l + 1);
                let a_in = &prev[l];
                let a_out = &mut rest[0];
                for o in 0..out {
                    let row = &w[o * inp..(o + 1) * inp];
                    let z = b[o] + row.iter().zip(a_in.iter()).map(|(a, c)| a * c).sum::<f64>();
                    a_out[o] = if l + 1 < layers { z.max(0.0) } else { z };
                }
                offset += layer_len(inp, out);
            }
            let err = work.acts[layers][0] - y;
            loss += err * err / (2.0 * m);

            // backward
            work.delta[layers][0] = err / m;
            for l in (0..layers).rev() {
                let (inp, out) = (self.sizes[l], self.sizes[l + 1]);
                offset -= layer_len(inp, out);
                let (d_lo, d_hi) = work.delta.split_at_mut(l + 1);
                let d_out = &d_hi[0];
                let a_in = &work.acts[l];
                let g = &mut grad[offset..offset + layer_len(inp, out)];
                for o in 0..out {
                    let d = d_out[o];
                    if d == 0.0 {
                        continue;
                    }
                    let grow = &mut g[o * inp..(o + 1) * inp];
                    for (gw, a) in grow.iter_mut().zip(a_in.iter()) {
                        *gw += d * a;
                    }
                    g[out * inp + o] += d;
                }
                if l > 0 {
                    let w = &self.params[offset..offset + out * inp];
                    let d_in = &mut d_lo[l];
                    d_in.iter_mut().for_each(|v| *v = 0.0);
                    for o in 0..out {
                        let d = d_out[o];
                        if d == 0.0 {
                            continue;
                        }
                        for (di, wv) in d_in.iter_mut().zip(&w[o * inp..(o + 1) * inp]) {
                            *di += d * wv;
                        }
                    }
                    // ReLU derivative on the hidden activation
                    for (di, a) in d_in.iter_mut().zip(a_in.iter()) {
                        if *a <= 0.0 {
                            *di = 0.0;
                        }
                    }
                }
            }
        }
        loss
    }
}

struct Workspace {
    acts: Vec<Vec<f64>>,
    delta: Vec<Vec<f64>>,
}

impl Workspace {
    fn new(sizes: &[usize]) -> Self {
        Self {
            acts: sizes.iter().map(|&s| vec![0.0; s]).collect(),
            delta: sizes.iter().map(|&s| vec![0.0; s]).collect(),
        }
    }
}

/// Trained network with the target scaling it was fit under.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub network: Network,
    pub target_mean: f64,
    pub target_scale: f64,
    pub epochs_run: usize,
}

impl MlpModel {
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.target_mean + self.target_scale * self.network.predict(x)
    }
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
    lr: f64,
}

impl Adam {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(n: usize, lr: f64) -> Self {
        Self {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
            lr,
        }
    }

    fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - Self::BETA1.powi(self.t);
        let c2 = 1.0 - Self::BETA2.powi(self.t);
        for (((p, g), m), v) in params.iter_mut().zip(grad).zip(&mut self.m).zip(&mut self.v) {
            *m = Self::BETA1 * *m + (1.0 - Self::BETA1) * g;
            *v = Self::BETA2 * *v + (1.0 - Self::BETA2) * g * g;
            *p -= self.lr * (*m / c1) / ((*v / c2).sqrt() + Self::EPS);
        }
    }
}

/// Fits on already standardized rows. Targets are centered and scaled
/// internally; predictions come back on the original scale.
pub fn fit(rows: &[Vec<f64>], targets: &[f64], params: &MlpParams, seed: u64) -> Result<MlpModel> {
    params.validate()?;
    let n = rows.len();
    let mean = targets.iter().sum::<f64>() / n as f64;
    let var = targets.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / n as f64;
    let scale = if var.sqrt() > 0.0 { var.sqrt() } else { 1.0 };
    let ys: Vec<f64> = targets.iter().map(|t| (t - mean) / scale).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = rows.first().map_or(0, Vec::len);
    let mut net = Network::new(d, params.hidden_layers, params.width, &mut rng);
    let mut adam = Adam::new(net.params.len(), params.learning_rate);
    let mut grad = vec![0.0; net.params.len()];
    let mut work = Workspace::new(&net.sizes);
    let mut order: Vec<usize> = (0..n).collect();
    let mut best = f64::INFINITY;
    let mut stalled = 0;
    let mut epochs_run = 0;
    let mut xs: Vec<&[f64]> = Vec::with_capacity(params.batch_size);
    let mut yb: Vec<f64> = Vec::with_capacity(params.batch_size);

    for _ in 0..params.max_epochs {
        epochs_run += 1;
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(params.batch_size) {
            xs.clear();
            yb.clear();
            xs.extend(batch.iter().map(|&i| rows[i].as_slice()));
            yb.extend(batch.iter().map(|&i| ys[i]));
            grad.iter_mut().for_each(|g| *g = 0.0);
            let loss = net.accumulate(&xs, &yb, &mut grad, &mut work);
            epoch_loss += loss * batch.len() as f64 / n as f64;
            adam.step(&mut net.params, &grad);
        }
        if !epoch_loss.is_finite() || net.params.iter().any(|p| !p.is_finite()) {
            return Err(Error::TrainingDiverged(format!(
                "MLP loss became non-finite at epoch {epochs_run}"
            )));
        }
        if epoch_loss < best * (1.0 - params.plateau_tolerance) {
            best = epoch_loss;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled >= params.patience {
                break;
            }
        }
    }
    Ok(MlpModel {
        network: net,
        target_mean: mean,
        target_scale: scale,
        epochs_run,
    })
}
