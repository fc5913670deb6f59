//! Many-to-many gated recurrent classifier: an LSTM cell with a dense
//! softmax head over fixed-length windows, trained by backpropagation
//! through time with momentum SGD and weight decay. Double precision
//! throughout so the finite-difference gradient check is meaningful.

mod io;

pub use io::{load_recurrent, read_recurrent, recurrent_to_json, save_recurrent, write_recurrent};

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domain::{ActivityCategory, NUM_CATEGORIES};
use crate::error::{Error, Result};

const LOG_CLAMP: f64 = 1e-12;

/// Gate order used for parameter blocks: input, forget, output, candidate.
const GATES: usize = 4;

/// LSTM with a softmax head. All parameters live in one flat vector in a
/// fixed block order (W_i, W_f, W_o, W_g, U_i, U_f, U_o, U_g, b_i, b_f,
/// b_o, b_g, W_out, b_out), which serialization, the optimizer, and the
/// gradient check all share.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrentModel {
    input_dim: usize,
    hidden_units: usize,
    dropout_rate: f64,
    theta: Vec<f64>,
}

/// Offsets into the flat parameter vector.
#[derive(Debug, Clone, Copy)]
struct Layout {
    input_dim: usize,
    hidden: usize,
    out: usize,
}

impl Layout {
    fn w(&self, gate: usize) -> usize {
        gate * self.input_dim * self.hidden
    }

    fn u(&self, gate: usize) -> usize {
        GATES * self.input_dim * self.hidden + gate * self.hidden * self.hidden
    }

    fn b(&self, gate: usize) -> usize {
        GATES * self.hidden * (self.input_dim + self.hidden) + gate * self.hidden
    }

    fn w_out(&self) -> usize {
        GATES * self.hidden * (self.input_dim + self.hidden + 1)
    }

    fn b_out(&self) -> usize {
        self.w_out() + self.hidden * self.out
    }

    fn total(&self) -> usize {
        self.b_out() + self.out
    }
}

/// Dropout mode for a forward pass.
pub enum Mode<'a> {
    /// No dropout; deterministic.
    Eval,
    /// Inverted dropout on the cell's input and output streams, masks drawn
    /// from the given generator.
    Train(&'a mut ChaCha8Rng),
}

/// Per-window inverted-dropout masks (entries are 0 or 1/(1 - rate)).
struct Masks {
    input: Vec<Vec<f64>>,
    output: Vec<Vec<f64>>,
}

/// Everything the backward pass needs from a forward pass.
struct Cache {
    inputs: Vec<Vec<f64>>,  // post-dropout inputs, T x I
    gates: Vec<[Vec<f64>; GATES]>, // activated i, f, o, g per step
    cells: Vec<Vec<f64>>,   // c_t
    tanh_cells: Vec<Vec<f64>>,
    hidden: Vec<Vec<f64>>,  // h_t (pre output-dropout)
    head_in: Vec<Vec<f64>>, // post-dropout h_t fed to the head
    probs: Vec<[f64; NUM_CATEGORIES]>,
}

/// One supervised window: T input vectors and T target labels.
#[derive(Debug, Clone)]
pub struct TrainWindow {
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<ActivityCategory>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    pub weight_decay: f64,
    pub epochs: usize,
    pub batch_windows: usize,
    pub rng_seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1e-3,
            momentum: 0.9,
            weight_decay: 5e-6,
            epochs: 50,
            batch_windows: 16,
            rng_seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::Config(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::Config(format!(
                "momentum must be in [0, 1), got {}",
                self.momentum
            )));
        }
        if self.weight_decay < 0.0 {
            return Err(Error::Config(format!(
                "weight_decay must be non-negative, got {}",
                self.weight_decay
            )));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be positive".into()));
        }
        if self.batch_windows == 0 {
            return Err(Error::Config("batch_windows must be positive".into()));
        }
        Ok(())
    }
}

/// Loss and train-mode accuracy of one epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub mean_loss: f64,
    pub train_accuracy: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainLog {
    pub epochs: Vec<EpochStats>,
}

/// Writes the log as tab-separated `epoch mean_loss train_acc` lines.
pub fn write_train_log(mut w: impl std::io::Write, log: &TrainLog) -> std::io::Result<()> {
    writeln!(w, "epoch\tmean_loss\ttrain_acc")?;
    for e in &log.epochs {
        writeln!(w, "{}\t{}\t{}", e.epoch, e.mean_loss, e.train_accuracy)?;
    }
    Ok(())
}

impl RecurrentModel {
    fn layout(&self) -> Layout {
        Layout {
            input_dim: self.input_dim,
            hidden: self.hidden_units,
            out: NUM_CATEGORIES,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden_units(&self) -> usize {
        self.hidden_units
    }

    pub fn dropout_rate(&self) -> f64 {
        self.dropout_rate
    }

    pub fn parameter_count(&self) -> usize {
        self.theta.len()
    }

    fn validate_shape(input_dim: usize, hidden_units: usize, dropout_rate: f64) -> Result<()> {
        if input_dim == 0 || hidden_units == 0 {
            return Err(Error::Config(
                "input_dim and hidden_units must be positive".into(),
            ));
        }
        if !(0.0..1.0).contains(&dropout_rate) {
            return Err(Error::Config(format!(
                "dropout_rate must be in [0, 1), got {dropout_rate}"
            )));
        }
        Ok(())
    }

    /// All-zero parameters (softmax of zeros is the uniform distribution).
    pub fn zeros(input_dim: usize, hidden_units: usize, dropout_rate: f64) -> Result<Self> {
        Self::validate_shape(input_dim, hidden_units, dropout_rate)?;
        let layout = Layout {
            input_dim,
            hidden: hidden_units,
            out: NUM_CATEGORIES,
        };
        Ok(RecurrentModel {
            input_dim,
            hidden_units,
            dropout_rate,
            theta: vec![0.0; layout.total()],
        })
    }

    /// Uniform init in [-k, k], k = 1/sqrt(hidden_units).
    pub fn random(
        input_dim: usize,
        hidden_units: usize,
        dropout_rate: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<Self> {
        let mut model = Self::zeros(input_dim, hidden_units, dropout_rate)?;
        let k = 1.0 / (hidden_units as f64).sqrt();
        for w in model.theta.iter_mut() {
            *w = rng.gen_range(-k..=k);
        }
        Ok(model)
    }

    fn from_theta(
        input_dim: usize,
        hidden_units: usize,
        dropout_rate: f64,
        theta: Vec<f64>,
    ) -> Result<Self> {
        Self::validate_shape(input_dim, hidden_units, dropout_rate)?;
        let layout = Layout {
            input_dim,
            hidden: hidden_units,
            out: NUM_CATEGORIES,
        };
        if theta.len() != layout.total() {
            return Err(Error::LengthMismatch {
                left: theta.len(),
                right: layout.total(),
            });
        }
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("model parameters must be finite".into()));
        }
        Ok(RecurrentModel {
            input_dim,
            hidden_units,
            dropout_rate,
            theta,
        })
    }

    pub(crate) fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Runs the window through the recurrence from zero initial state and
    /// returns one probability vector per step.
    pub fn forward(
        &self,
        window: &[Vec<f64>],
        mode: Mode<'_>,
    ) -> Result<Vec<[f64; NUM_CATEGORIES]>> {
        let masks = match mode {
            Mode::Eval => None,
            Mode::Train(rng) => self.sample_masks(window.len(), rng),
        };
        Ok(self.forward_cached(window, masks.as_ref())?.probs)
    }

    fn sample_masks(&self, steps: usize, rng: &mut ChaCha8Rng) -> Option<Masks> {
        if self.dropout_rate == 0.0 {
            return None;
        }
        let keep = 1.0 - self.dropout_rate;
        let mut draw = |len: usize| -> Vec<f64> {
            (0..len)
                .map(|_| {
                    if rng.gen::<f64>() < self.dropout_rate {
                        0.0
                    } else {
                        1.0 / keep
                    }
                })
                .collect()
        };
        let input = (0..steps).map(|_| draw(self.input_dim)).collect();
        let output = (0..steps).map(|_| draw(self.hidden_units)).collect();
        Some(Masks { input, output })
    }

    fn forward_cached(&self, window: &[Vec<f64>], masks: Option<&Masks>) -> Result<Cache> {
        if window.is_empty() {
            return Err(Error::EmptyInput);
        }
        for x in window {
            if x.len() != self.input_dim {
                return Err(Error::Dimension {
                    context: "recurrent input vector".to_string(),
                    expected: self.input_dim,
                    got: x.len(),
                });
            }
        }
        let layout = self.layout();
        let (input_dim, hidden) = (layout.input_dim, layout.hidden);
        let steps = window.len();

        let mut cache = Cache {
            inputs: Vec::with_capacity(steps),
            gates: Vec::with_capacity(steps),
            cells: Vec::with_capacity(steps),
            tanh_cells: Vec::with_capacity(steps),
            hidden: Vec::with_capacity(steps),
            head_in: Vec::with_capacity(steps),
            probs: Vec::with_capacity(steps),
        };

        let mut h_prev = vec![0.0; hidden];
        let mut c_prev = vec![0.0; hidden];

        for (t, x) in window.iter().enumerate() {
            let x_in: Vec<f64> = match masks {
                Some(m) => x.iter().zip(m.input[t].iter()).map(|(a, b)| a * b).collect(),
                None => x.clone(),
            };

            // Pre-activations for all four gates.
            let mut pre = [vec![0.0; hidden], vec![0.0; hidden], vec![0.0; hidden], vec![0.0; hidden]];
            for (gate, pre_gate) in pre.iter_mut().enumerate() {
                let w = &self.theta[layout.w(gate)..layout.w(gate) + input_dim * hidden];
                let u = &self.theta[layout.u(gate)..layout.u(gate) + hidden * hidden];
                let b = &self.theta[layout.b(gate)..layout.b(gate) + hidden];
                pre_gate.copy_from_slice(b);
                for (i, &xi) in x_in.iter().enumerate() {
                    if xi != 0.0 {
                        let row = &w[i * hidden..(i + 1) * hidden];
                        for (p, &wv) in pre_gate.iter_mut().zip(row.iter()) {
                            *p += xi * wv;
                        }
                    }
                }
                for (j, &hj) in h_prev.iter().enumerate() {
                    if hj != 0.0 {
                        let row = &u[j * hidden..(j + 1) * hidden];
                        for (p, &uv) in pre_gate.iter_mut().zip(row.iter()) {
                            *p += hj * uv;
                        }
                    }
                }
            }

            let gate_i: Vec<f64> = pre[0].iter().map(|&a| sigmoid(a)).collect();
            let gate_f: Vec<f64> = pre[1].iter().map(|&a| sigmoid(a)).collect();
            let gate_o: Vec<f64> = pre[2].iter().map(|&a| sigmoid(a)).collect();
            let gate_g: Vec<f64> = pre[3].iter().map(|&a| a.tanh()).collect();

            let mut c = vec![0.0; hidden];
            for j in 0..hidden {
                c[j] = gate_f[j] * c_prev[j] + gate_i[j] * gate_g[j];
            }
            let tc: Vec<f64> = c.iter().map(|&v| v.tanh()).collect();
            let h: Vec<f64> = (0..hidden).map(|j| gate_o[j] * tc[j]).collect();

            let head_in: Vec<f64> = match masks {
                Some(m) => h.iter().zip(m.output[t].iter()).map(|(a, b)| a * b).collect(),
                None => h.clone(),
            };

            let w_out = &self.theta[layout.w_out()..layout.w_out() + hidden * layout.out];
            let b_out = &self.theta[layout.b_out()..layout.b_out() + layout.out];
            let mut logits = [0.0; NUM_CATEGORIES];
            logits.copy_from_slice(b_out);
            for (j, &hj) in head_in.iter().enumerate() {
                if hj != 0.0 {
                    let row = &w_out[j * layout.out..(j + 1) * layout.out];
                    for (z, &wv) in logits.iter_mut().zip(row.iter()) {
                        *z += hj * wv;
                    }
                }
            }
            let probs = softmax(&logits);

            cache.inputs.push(x_in);
            cache.gates.push([gate_i, gate_f, gate_o, gate_g]);
            cache.cells.push(c.clone());
            cache.tanh_cells.push(tc);
            cache.hidden.push(h.clone());
            cache.head_in.push(head_in);
            cache.probs.push(probs);

            h_prev = h;
            c_prev = c;
        }

        Ok(cache)
    }

    /// Full BPTT over one window. Returns the (weighted, step-averaged)
    /// cross-entropy loss and the gradient in flat layout.
    fn backward(
        &self,
        window: &[Vec<f64>],
        targets: &[ActivityCategory],
        class_weights: Option<&[f64; NUM_CATEGORIES]>,
        masks: Option<&Masks>,
    ) -> Result<(f64, Vec<f64>, Vec<[f64; NUM_CATEGORIES]>)> {
        if window.len() != targets.len() {
            return Err(Error::LengthMismatch {
                left: window.len(),
                right: targets.len(),
            });
        }
        let cache = self.forward_cached(window, masks)?;
        let layout = self.layout();
        let (hidden, out) = (layout.hidden, layout.out);
        let steps = window.len();
        let mut grad = vec![0.0; layout.total()];

        let loss_value = loss(&cache.probs, targets, class_weights)?;

        let mut dh_next = vec![0.0; hidden];
        let mut dc_next = vec![0.0; hidden];

        for t in (0..steps).rev() {
            let target = targets[t].index();
            let scale = class_weights.map_or(1.0, |w| w[target]) / steps as f64;
            let mut dz = [0.0; NUM_CATEGORIES];
            for k in 0..out {
                dz[k] = (cache.probs[t][k] - if k == target { 1.0 } else { 0.0 }) * scale;
            }

            // Head: b_out, W_out, and the gradient into the (dropped) h.
            let mut dhead = vec![0.0; hidden];
            {
                let gw_out = layout.w_out();
                let gb_out = layout.b_out();
                let w_out = &self.theta[gw_out..gw_out + hidden * out];
                for k in 0..out {
                    grad[gb_out + k] += dz[k];
                }
                for j in 0..hidden {
                    let hj = cache.head_in[t][j];
                    let row = &w_out[j * out..(j + 1) * out];
                    let mut acc = 0.0;
                    for k in 0..out {
                        grad[gw_out + j * out + k] += hj * dz[k];
                        acc += row[k] * dz[k];
                    }
                    dhead[j] = acc;
                }
            }

            let mut dh = vec![0.0; hidden];
            for j in 0..hidden {
                let mask = masks.map_or(1.0, |m| m.output[t][j]);
                dh[j] = dhead[j] * mask + dh_next[j];
            }

            let [gate_i, gate_f, gate_o, gate_g] = &cache.gates[t];
            let tc = &cache.tanh_cells[t];
            let c_prev: &[f64] = if t == 0 { &[] } else { &cache.cells[t - 1] };

            let mut dc = vec![0.0; hidden];
            for j in 0..hidden {
                dc[j] = dh[j] * gate_o[j] * (1.0 - tc[j] * tc[j]) + dc_next[j];
            }

            // Pre-activation gradients per gate.
            let mut da = [vec![0.0; hidden], vec![0.0; hidden], vec![0.0; hidden], vec![0.0; hidden]];
            for j in 0..hidden {
                let d_o = dh[j] * tc[j];
                da[2][j] = d_o * gate_o[j] * (1.0 - gate_o[j]);
                let d_i = dc[j] * gate_g[j];
                da[0][j] = d_i * gate_i[j] * (1.0 - gate_i[j]);
                let prev_c = if t == 0 { 0.0 } else { c_prev[j] };
                let d_f = dc[j] * prev_c;
                da[1][j] = d_f * gate_f[j] * (1.0 - gate_f[j]);
                let d_g = dc[j] * gate_i[j];
                da[3][j] = d_g * (1.0 - gate_g[j] * gate_g[j]);
            }

            let h_prev: &[f64] = if t == 0 { &[] } else { &cache.hidden[t - 1] };
            let mut dh_prev = vec![0.0; hidden];
            for (gate, da_gate) in da.iter().enumerate() {
                let gw = layout.w(gate);
                let gu = layout.u(gate);
                let gb = layout.b(gate);
                for j in 0..hidden {
                    grad[gb + j] += da_gate[j];
                }
                for (i, &xi) in cache.inputs[t].iter().enumerate() {
                    if xi != 0.0 {
                        for j in 0..hidden {
                            grad[gw + i * hidden + j] += xi * da_gate[j];
                        }
                    }
                }
                if t > 0 {
                    let u = &self.theta[gu..gu + hidden * hidden];
                    for (jp, &hp) in h_prev.iter().enumerate() {
                        if hp != 0.0 {
                            for j in 0..hidden {
                                grad[gu + jp * hidden + j] += hp * da_gate[j];
                            }
                        }
                        let row = &u[jp * hidden..(jp + 1) * hidden];
                        let mut acc = 0.0;
                        for j in 0..hidden {
                            acc += row[j] * da_gate[j];
                        }
                        dh_prev[jp] += acc;
                    }
                }
            }

            for j in 0..hidden {
                dc_next[j] = dc[j] * gate_f[j];
            }
            dh_next = dh_prev;
        }

        Ok((loss_value, grad, cache.probs))
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn softmax(logits: &[f64; NUM_CATEGORIES]) -> [f64; NUM_CATEGORIES] {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out = [0.0; NUM_CATEGORIES];
    let mut sum = 0.0;
    for (o, &z) in out.iter_mut().zip(logits.iter()) {
        *o = (z - max).exp();
        sum += *o;
    }
    for o in out.iter_mut() {
        *o /= sum;
    }
    out
}

/// Timestep-averaged (optionally class-weighted) categorical cross-entropy:
/// -(1/T) sum_t w(y_t) ln p_t[y_t], with the log argument clamped at 1e-12.
pub fn loss(
    predictions: &[[f64; NUM_CATEGORIES]],
    targets: &[ActivityCategory],
    class_weights: Option<&[f64; NUM_CATEGORIES]>,
) -> Result<f64> {
    if predictions.len() != targets.len() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: targets.len(),
        });
    }
    if predictions.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut total = 0.0;
    for (p, &y) in predictions.iter().zip(targets.iter()) {
        let weight = class_weights.map_or(1.0, |w| w[y.index()]);
        total -= weight * p[y.index()].max(LOG_CLAMP).ln();
    }
    Ok(total / predictions.len() as f64)
}

/// Pairwise tree reduction in window-index order: the canonical summation
/// order for batch gradients, identical whether windows are processed
/// serially or in parallel.
fn pairwise_sum(mut terms: Vec<Vec<f64>>) -> Vec<f64> {
    assert!(!terms.is_empty());
    while terms.len() > 1 {
        let mut next = Vec::with_capacity(terms.len().div_ceil(2));
        let mut iter = terms.into_iter();
        while let Some(mut a) = iter.next() {
            if let Some(b) = iter.next() {
                for (x, y) in a.iter_mut().zip(b.iter()) {
                    *x += y;
                }
            }
            next.push(a);
        }
        terms = next;
    }
    terms.pop().unwrap()
}

/// Trains a freshly initialized model on fixed-length windows with
/// mini-batch momentum SGD (v <- mu v - alpha (grad + lambda theta);
/// theta <- theta + v). Fully deterministic given the seed: weight init,
/// epoch shuffles, and dropout masks all come from one seeded generator.
pub fn train(
    windows: &[TrainWindow],
    hidden_units: usize,
    dropout_rate: f64,
    config: &TrainConfig,
) -> Result<(RecurrentModel, TrainLog)> {
    config.validate()?;
    if windows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let steps = windows[0].inputs.len();
    let input_dim = windows[0]
        .inputs
        .first()
        .map(Vec::len)
        .ok_or(Error::EmptyInput)?;
    for w in windows {
        if w.inputs.len() != steps || w.targets.len() != steps {
            return Err(Error::Config(
                "all training windows must share one timestep length".into(),
            ));
        }
        if w.inputs.iter().any(|x| x.len() != input_dim) {
            return Err(Error::Dimension {
                context: "training window input".to_string(),
                expected: input_dim,
                got: w.inputs.iter().find(|x| x.len() != input_dim).unwrap().len(),
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut model = RecurrentModel::random(input_dim, hidden_units, dropout_rate, &mut rng)?;
    let mut velocity = vec![0.0; model.theta.len()];
    let mut log = TrainLog::default();
    let mut order: Vec<usize> = (0..windows.len()).collect();

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        let mut correct = 0usize;

        for batch in order.chunks(config.batch_windows) {
            let mut grads = Vec::with_capacity(batch.len());
            for &wi in batch {
                let window = &windows[wi];
                let masks = model.sample_masks(steps, &mut rng);
                let (loss_value, grad, probs) =
                    model.backward(&window.inputs, &window.targets, None, masks.as_ref())?;
                epoch_loss += loss_value;
                for (p, &y) in probs.iter().zip(window.targets.iter()) {
                    if crate::forest::argmax_category(p) == y {
                        correct += 1;
                    }
                }
                grads.push(grad);
            }
            let batch_len = grads.len() as f64;
            let mut grad = pairwise_sum(grads);
            for g in grad.iter_mut() {
                *g /= batch_len;
            }
            for ((v, g), w) in velocity.iter_mut().zip(grad.iter()).zip(model.theta.iter_mut()) {
                *v = config.momentum * *v
                    - config.learning_rate * (g + config.weight_decay * *w);
                *w += *v;
            }
        }

        log.epochs.push(EpochStats {
            epoch,
            mean_loss: epoch_loss / windows.len() as f64,
            train_accuracy: correct as f64 / (windows.len() * steps) as f64,
        });
    }

    Ok((model, log))
}

/// Compares the analytic BPTT gradient of every parameter against central
/// finite differences of the eval-mode loss (dropout off), returning the
/// maximum relative error |g_a - g_n| / max(1e-8, |g_a| + |g_n|).
pub fn gradient_check(
    model: &RecurrentModel,
    window: &[Vec<f64>],
    targets: &[ActivityCategory],
    epsilon: f64,
) -> Result<f64> {
    if !(1e-7..=1e-3).contains(&epsilon) {
        return Err(Error::Config(format!(
            "epsilon must be in [1e-7, 1e-3], got {epsilon}"
        )));
    }
    let (_, analytic, _) = model.backward(window, targets, None, None)?;
    let mut probe = model.clone();
    let mut max_rel = 0.0_f64;
    for p in 0..probe.theta.len() {
        let original = probe.theta[p];
        probe.theta[p] = original + epsilon;
        let plus = loss(&probe.forward_cached(window, None)?.probs, targets, None)?;
        probe.theta[p] = original - epsilon;
        let minus = loss(&probe.forward_cached(window, None)?.probs, targets, None)?;
        probe.theta[p] = original;
        let numeric = (plus - minus) / (2.0 * epsilon);
        let denom = (analytic[p].abs() + numeric.abs()).max(1e-8);
        max_rel = max_rel.max((analytic[p] - numeric).abs() / denom);
    }
    Ok(max_rel)
}
