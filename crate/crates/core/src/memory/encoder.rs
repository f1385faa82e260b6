//! Dense feed-forward encoder from binary occupancy grids to unit-norm
//! embeddings, trained with a triplet loss.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncoderConfig {
    pub hidden: [usize; 2],
    pub dim: usize,
    pub margin: f64,
    pub epochs: usize,
    pub lr: f64,
    pub batch: usize,
    /// Triplets drawn per epoch; 0 means one per training sample.
    pub epoch_triplets: usize,
    pub seed: u64,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        Self {
            hidden: [128, 64],
            dim: 16,
            margin: 0.5,
            epochs: 30,
            lr: 1e-3,
            batch: 32,
            epoch_triplets: 0,
            seed: 0,
        }
    }
}

/// Fully connected layer, weights stored input-major: `w[i * out + o]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

impl Dense {
    fn init(inputs: usize, outputs: usize, fan_in: f64, rng: &mut ChaCha8Rng) -> Self {
        let bound = (6.0 / fan_in).sqrt();
        Self {
            inputs,
            outputs,
            w: (0..inputs * outputs)
                .map(|_| rng.gen_range(-bound..bound))
                .collect(),
            b: vec![0.0; outputs],
        }
    }

    fn forward(&self, x: &[f64]) -> Vec<f64> {
        let mut out = self.b.clone();
        for (i, &xi) in x.iter().enumerate() {
            if xi != 0.0 {
                let row = &self.w[i * self.outputs..(i + 1) * self.outputs];
                for (o, &wv) in out.iter_mut().zip(row) {
                    *o += xi * wv;
                }
            }
        }
        out
    }

    /// Binary input given by its active indices.
    fn forward_sparse(&self, active: &[u32]) -> Vec<f64> {
        let mut out = self.b.clone();
        for &i in active {
            let i = i as usize;
            let row = &self.w[i * self.outputs..(i + 1) * self.outputs];
            for (o, &wv) in out.iter_mut().zip(row) {
                *o += wv;
            }
        }
        out
    }

    fn param_count(&self) -> usize {
        self.w.len() + self.b.len()
    }
}

/// Grid (as active cell indices) -> 128 -> 64 -> d, ReLU between layers,
/// output scaled to unit norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Encoder {
    pub layers: [Dense; 3],
}

/// Activations kept for backpropagation.
#[derive(Debug, Clone)]
pub struct ForwardPass {
    active: Vec<u32>,
    h1: Vec<f64>,
    h2: Vec<f64>,
    norm: f64,
    pub embedding: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Gradients {
    pub w: [Vec<f64>; 3],
    pub b: [Vec<f64>; 3],
}

impl Gradients {
    fn zeros(enc: &Encoder) -> Self {
        Self {
            w: enc.layers.clone().map(|l| vec![0.0; l.w.len()]),
            b: enc.layers.clone().map(|l| vec![0.0; l.b.len()]),
        }
    }

    fn clear(&mut self) {
        for v in self.w.iter_mut().chain(self.b.iter_mut()) {
            v.iter_mut().for_each(|x| *x = 0.0);
        }
    }
}

impl Encoder {
    /// `expected_active` is the typical number of occupied cells; it scales
    /// the first-layer initialization so hidden activations start near unit size.
    pub fn new(
        input: usize,
        cfg: &EncoderConfig,
        expected_active: f64,
        rng: &mut ChaCha8Rng,
    ) -> Self {
        let [h1, h2] = cfg.hidden;
        Self {
            layers: [
                Dense::init(input, h1, expected_active.max(1.0), rng),
                Dense::init(h1, h2, h1 as f64, rng),
                Dense::init(h2, cfg.dim, h2 as f64, rng),
            ],
        }
    }

    pub fn input_size(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn dim(&self) -> usize {
        self.layers[2].outputs
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Dense::param_count).sum()
    }

    pub fn forward(&self, active: &[u32]) -> ForwardPass {
        let relu = |v: Vec<f64>| v.into_iter().map(|x| x.max(0.0)).collect::<Vec<_>>();
        let h1 = relu(self.layers[0].forward_sparse(active));
        let h2 = relu(self.layers[1].forward(&h1));
        let z = self.layers[2].forward(&h2);
        let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
        let embedding = z.iter().map(|x| x / norm).collect();
        ForwardPass {
            active: active.to_vec(),
            h1,
            h2,
            norm,
            embedding,
        }
    }

    pub fn embed(&self, active: &[u32]) -> Vec<f64> {
        self.forward(active).embedding
    }

    /// Accumulates `d loss / d params` given `d loss / d embedding`.
    pub fn backward(&self, pass: &ForwardPass, grad_e: &[f64], grads: &mut Gradients) {
        // Through the normalization: (I - e e^T) g / |z|.
        let e = &pass.embedding;
        let dot: f64 = e.iter().zip(grad_e).map(|(a, b)| a * b).sum();
        let dz: Vec<f64> = e
            .iter()
            .zip(grad_e)
            .map(|(ei, gi)| (gi - dot * ei) / pass.norm)
            .collect();

        let dh2 = dense_backward(
            &self.layers[2],
            &pass.h2,
            &dz,
            &mut grads.w[2],
            &mut grads.b[2],
        );
        let dh2: Vec<f64> = dh2
            .iter()
            .zip(&pass.h2)
            .map(|(g, h)| if *h > 0.0 { *g } else { 0.0 })
            .collect();
        let dh1 = dense_backward(
            &self.layers[1],
            &pass.h1,
            &dh2,
            &mut grads.w[1],
            &mut grads.b[1],
        );
        let dh1: Vec<f64> = dh1
            .iter()
            .zip(&pass.h1)
            .map(|(g, h)| if *h > 0.0 { *g } else { 0.0 })
            .collect();

        let l0 = &self.layers[0];
        for (gb, d) in grads.b[0].iter_mut().zip(&dh1) {
            *gb += d;
        }
        for &i in &pass.active {
            let i = i as usize;
            let row = &mut grads.w[0][i * l0.outputs..(i + 1) * l0.outputs];
            for (g, d) in row.iter_mut().zip(&dh1) {
                *g += d;
            }
        }
    }

    fn params_mut(&mut self) -> [(&mut Vec<f64>, &mut Vec<f64>); 3] {
        let [a, b, c] = &mut self.layers;
        [
            (&mut a.w, &mut a.b),
            (&mut b.w, &mut b.b),
            (&mut c.w, &mut c.b),
        ]
    }
}

fn dense_backward(
    layer: &Dense,
    x: &[f64],
    dout: &[f64],
    gw: &mut [f64],
    gb: &mut [f64],
) -> Vec<f64> {
    let n = layer.outputs;
    for (g, d) in gb.iter_mut().zip(dout) {
        *g += d;
    }
    let mut dx = vec![0.0; layer.inputs];
    for (i, &xi) in x.iter().enumerate() {
        let row = &layer.w[i * n..(i + 1) * n];
        dx[i] = row.iter().zip(dout).map(|(w, d)| w * d).sum();
        if xi != 0.0 {
            for (g, d) in gw[i * n..(i + 1) * n].iter_mut().zip(dout) {
                *g += xi * d;
            }
        }
    }
    dx
}

/// Triplet loss and its gradients with respect to the three embeddings.
#[derive(Debug, Clone, PartialEq)]
pub struct TripletLoss {
    pub loss: f64,
    pub grad_anchor: Vec<f64>,
    pub grad_similar: Vec<f64>,
    pub grad_dissimilar: Vec<f64>,
}

pub fn triplet_loss(
    anchor: &[f64],
    similar: &[f64],
    dissimilar: &[f64],
    margin: f64,
) -> TripletLoss {
    let diff_s: Vec<f64> = anchor.iter().zip(similar).map(|(a, s)| a - s).collect();
    let diff_d: Vec<f64> = anchor.iter().zip(dissimilar).map(|(a, d)| a - d).collect();
    let ns = diff_s.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nd = diff_d.iter().map(|x| x * x).sum::<f64>().sqrt();
    let raw = ns - nd + margin;
    let dim = anchor.len();
    if raw <= 0.0 {
        return TripletLoss {
            loss: 0.0,
            grad_anchor: vec![0.0; dim],
            grad_similar: vec![0.0; dim],
            grad_dissimilar: vec![0.0; dim],
        };
    }
    // The norm is not differentiable at zero; use the zero subgradient there.
    let us: Vec<f64> = diff_s
        .iter()
        .map(|x| if ns > 0.0 { x / ns } else { 0.0 })
        .collect();
    let ud: Vec<f64> = diff_d
        .iter()
        .map(|x| if nd > 0.0 { x / nd } else { 0.0 })
        .collect();
    TripletLoss {
        loss: raw,
        grad_anchor: us.iter().zip(&ud).map(|(a, b)| a - b).collect(),
        grad_similar: us.iter().map(|x| -x).collect(),
        grad_dissimilar: ud,
    }
}

struct Adam {
    m: Gradients,
    v: Gradients,
    t: i32,
    lr: f64,
}

impl Adam {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(enc: &Encoder, lr: f64) -> Self {
        Self {
            m: Gradients::zeros(enc),
            v: Gradients::zeros(enc),
            t: 0,
            lr,
        }
    }

    fn step(&mut self, enc: &mut Encoder, g: &Gradients, scale: f64) {
        self.t += 1;
        let c1 = 1.0 - Self::BETA1.powi(self.t);
        let c2 = 1.0 - Self::BETA2.powi(self.t);
        let lr = self.lr;
        let update = |p: &mut [f64], g: &[f64], m: &mut [f64], v: &mut [f64]| {
            for i in 0..p.len() {
                let gi = g[i] * scale;
                if gi == 0.0 && m[i] == 0.0 {
                    continue;
                }
                m[i] = Self::BETA1 * m[i] + (1.0 - Self::BETA1) * gi;
                v[i] = Self::BETA2 * v[i] + (1.0 - Self::BETA2) * gi * gi;
                p[i] -= lr * (m[i] / c1) / ((v[i] / c2).sqrt() + Self::EPS);
            }
        };
        for (l, (w, b)) in enc.params_mut().into_iter().enumerate() {
            update(w, &g.w[l], &mut self.m.w[l], &mut self.v.w[l]);
            update(b, &g.b[l], &mut self.m.b[l], &mut self.v.b[l]);
        }
    }
}

/// Training samples: binary grids as active index lists, grouped by cluster.
#[derive(Debug, Clone, Default)]
pub struct TripletSet {
    pub input_size: usize,
    pub clusters: Vec<Vec<Vec<u32>>>,
}

impl TripletSet {
    pub fn sample_count(&self) -> usize {
        self.clusters.iter().map(Vec::len).sum()
    }

    fn check(&self) -> Result<()> {
        let usable = self.clusters.iter().filter(|c| c.len() >= 2).count();
        if self.clusters.len() < 2 || usable < 2 {
            return Err(Error::DegenerateDataset(format!(
                "need at least 2 clusters with 2 members, got {} clusters ({usable} usable)",
                self.clusters.len()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TrainedEncoder {
    pub encoder: Encoder,
    /// Mean triplet loss per epoch, plus the loss before the first update at index 0.
    pub loss_curve: Vec<f64>,
}

/// Draws `count` (anchor, similar, dissimilar) index triples. Anchor and
/// similar come from one cluster, dissimilar from another.
fn sample_triplets(
    set: &TripletSet,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<[(usize, usize); 3]> {
    let usable: Vec<usize> = (0..set.clusters.len())
        .filter(|&c| set.clusters[c].len() >= 2)
        .collect();
    (0..count)
        .map(|_| {
            let c = *usable.choose(rng).unwrap();
            let n = set.clusters[c].len();
            let a = rng.gen_range(0..n);
            let mut s = rng.gen_range(0..n - 1);
            if s >= a {
                s += 1;
            }
            let mut o = rng.gen_range(0..set.clusters.len() - 1);
            if o >= c {
                o += 1;
            }
            let d = rng.gen_range(0..set.clusters[o].len());
            [(c, a), (c, s), (o, d)]
        })
        .collect()
}

pub fn mean_triplet_loss(
    enc: &Encoder,
    set: &TripletSet,
    triplets: &[[(usize, usize); 3]],
    margin: f64,
) -> f64 {
    let total: f64 = triplets
        .iter()
        .map(|t| {
            let e = t.map(|(c, i)| enc.embed(&set.clusters[c][i]));
            triplet_loss(&e[0], &e[1], &e[2], margin).loss
        })
        .sum();
    total / triplets.len().max(1) as f64
}

/// Minibatch Adam on the triplet loss. One epoch draws as many triplets as
/// there are samples. Deterministic for a given seed.
pub fn train_encoder(set: &TripletSet, cfg: &EncoderConfig) -> Result<TrainedEncoder> {
    set.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = set.sample_count();
    let mean_active = set
        .clusters
        .iter()
        .flatten()
        .map(|g| g.len() as f64)
        .sum::<f64>()
        / n as f64;
    let mut enc = Encoder::new(set.input_size, cfg, mean_active, &mut rng);
    let mut adam = Adam::new(&enc, cfg.lr);
    let mut grads = Gradients::zeros(&enc);
    let per_epoch = if cfg.epoch_triplets > 0 {
        cfg.epoch_triplets
    } else {
        n.max(cfg.batch)
    };

    let probe = sample_triplets(set, per_epoch.min(256), &mut rng);
    let mut loss_curve = vec![mean_triplet_loss(&enc, set, &probe, cfg.margin)];

    for _ in 0..cfg.epochs {
        let triplets = sample_triplets(set, per_epoch, &mut rng);
        let mut epoch_loss = 0.0;
        for batch in triplets.chunks(cfg.batch) {
            grads.clear();
            for t in batch {
                let passes = t.map(|(c, i)| enc.forward(&set.clusters[c][i]));
                let l = triplet_loss(
                    &passes[0].embedding,
                    &passes[1].embedding,
                    &passes[2].embedding,
                    cfg.margin,
                );
                epoch_loss += l.loss;
                if l.loss > 0.0 {
                    enc.backward(&passes[0], &l.grad_anchor, &mut grads);
                    enc.backward(&passes[1], &l.grad_similar, &mut grads);
                    enc.backward(&passes[2], &l.grad_dissimilar, &mut grads);
                }
            }
            adam.step(&mut enc, &grads, 1.0 / batch.len() as f64);
        }
        loss_curve.push(epoch_loss / triplets.len() as f64);
    }
    Ok(TrainedEncoder {
        encoder: enc,
        loss_curve,
    })
}

/// Squared Euclidean distance.
pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Index of the nearest centroid; ties go to the lowest index.
pub fn nearest_centroid(centroids: &[Vec<f64>], e: &[f64]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, c) in centroids.iter().enumerate() {
        let d = dist_sq(c, e);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// Component-wise mean of equal-length vectors.
pub fn mean_vector(vs: &[Vec<f64>]) -> Vec<f64> {
    let dim = vs.first().map_or(0, Vec::len);
    let mut out = vec![0.0; dim];
    for v in vs {
        for (o, x) in out.iter_mut().zip(v) {
            *o += x;
        }
    }
    let n = vs.len().max(1) as f64;
    out.iter_mut().for_each(|o| *o /= n);
    out
}
