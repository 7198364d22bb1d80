//! Minimal MLP training with per-batch norm-constraint projection.
//!
//! The conversion to a polynomial is only accurate when synaptic potentials
//! stay near zero, so after every batch update each hidden-layer weight
//! vector (a column of the weight matrix, bias included) is rescaled to norm
//! at most 1; the output layer is never projected. Training is single-threaded
//! and bit-deterministic for a fixed seed.

use std::str::FromStr;

use ndarray::{Array2, ArrayViewMut1, Axis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::activation::ActivationKind;
use crate::data::{DatasetSpec, Response};
use crate::error::{Error, Result};
use crate::network::{Layer, NetworkSpec};

/// Norm used by the constraint projection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    L1,
    L2,
}

/// Weight constraint applied to hidden layers during training.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Constraint {
    #[default]
    None,
    L1Norm,
    L2Norm,
}

impl Constraint {
    pub fn norm(self) -> Option<NormKind> {
        match self {
            Constraint::None => None,
            Constraint::L1Norm => Some(NormKind::L1),
            Constraint::L2Norm => Some(NormKind::L2),
        }
    }
}

impl FromStr for Constraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Constraint::None),
            "l1_norm" => Ok(Constraint::L1Norm),
            "l2_norm" => Ok(Constraint::L2Norm),
            other => Err(Error::InvalidValue {
                field: "constraint",
                reason: format!("'{other}' is not one of none, l1_norm, l2_norm"),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Optimizer {
    Sgd,
    Adam { beta1: f64, beta2: f64, epsilon: f64 },
}

impl Optimizer {
    /// Adam with its canonical constants.
    pub fn adam() -> Self {
        Optimizer::Adam {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl FromStr for Optimizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sgd" => Ok(Optimizer::Sgd),
            "adam" => Ok(Optimizer::adam()),
            other => Err(Error::InvalidValue {
                field: "optimizer",
                reason: format!("'{other}' is not one of sgd, adam"),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Loss {
    Mse,
    SoftmaxCrossEntropy,
}

impl FromStr for Loss {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mse" => Ok(Loss::Mse),
            "softmax_cross_entropy" => Ok(Loss::SoftmaxCrossEntropy),
            other => Err(Error::InvalidValue {
                field: "loss",
                reason: format!("'{other}' is not one of mse, softmax_cross_entropy"),
            }),
        }
    }
}

/// Training settings. `validation_split` carves the last fraction of the
/// seeded-shuffled data out of the updates, reporting its loss per epoch.
#[derive(Clone, Debug)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub optimizer: Optimizer,
    pub loss: Loss,
    pub constraint: Constraint,
    pub seed: u64,
    pub validation_split: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 100,
            batch_size: 32,
            learning_rate: 1e-3,
            optimizer: Optimizer::adam(),
            loss: Loss::Mse,
            constraint: Constraint::None,
            seed: 0,
            validation_split: 0.0,
        }
    }
}

/// Layer sizes and activations, input width excluded (it comes from the data).
#[derive(Clone, Debug, PartialEq)]
pub struct Architecture {
    pub layers: Vec<(usize, ActivationKind)>,
}

impl FromStr for Architecture {
    type Err = Error;

    /// Parse `"50:tanh,100:tanh,1:linear"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: String| Error::InvalidArchitecture {
            spec: s.to_string(),
            reason,
        };
        let mut layers = Vec::new();
        for part in s.split(',') {
            let (units, activation) = part
                .split_once(':')
                .ok_or_else(|| bad(format!("'{part}' is not units:activation")))?;
            let units: usize = units
                .trim()
                .parse()
                .map_err(|_| bad(format!("'{units}' is not a unit count")))?;
            if units == 0 {
                return Err(bad("layer width must be positive".into()));
            }
            let activation = activation.trim().parse::<ActivationKind>()?;
            layers.push((units, activation));
        }
        if layers.is_empty() {
            return Err(bad("no layers".into()));
        }
        Ok(Architecture { layers })
    }
}

/// Per-epoch loss record.
#[derive(Clone, Debug, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: Option<f64>,
}

/// Rescale a weight vector to norm at most 1: w · c(‖w‖)/(‖w‖ + ε) with
/// c(x) = min(x, 1). Vectors already inside the unit ball shrink only by the
/// ε-induced factor; larger ones land on the sphere. Direction is preserved.
pub fn constraint_project(w: &[f64], norm: NormKind, epsilon: f64) -> Vec<f64> {
    let mut out = w.to_vec();
    project_in_place(
        ArrayViewMut1::from_shape(out.len(), &mut out).unwrap(),
        norm,
        epsilon,
    );
    out
}

fn project_in_place(mut w: ArrayViewMut1<'_, f64>, norm: NormKind, epsilon: f64) {
    let value = match norm {
        NormKind::L1 => w.iter().map(|v| v.abs()).sum::<f64>(),
        NormKind::L2 => w.iter().map(|v| v * v).sum::<f64>().sqrt(),
    };
    let clamped = value.min(1.0);
    let factor = clamped / (value + epsilon);
    w.mapv_inplace(|v| v * factor);
}

const PROJECTION_EPSILON: f64 = 1e-7;

/// Column norms of each layer's weight matrix (bias row included).
pub fn column_norms(net: &NetworkSpec, norm: NormKind) -> Vec<Vec<f64>> {
    net.layers()
        .iter()
        .map(|layer| {
            layer
                .weights()
                .columns()
                .into_iter()
                .map(|col| match norm {
                    NormKind::L1 => col.iter().map(|v| v.abs()).sum(),
                    NormKind::L2 => col.iter().map(|v| v * v).sum::<f64>().sqrt(),
                })
                .collect()
        })
        .collect()
}

struct AdamState {
    m: Vec<Array2<f64>>,
    v: Vec<Array2<f64>>,
    step: u64,
}

/// Train an MLP on `data`. Deterministic given the seed; returns the trained
/// network and per-epoch losses. Hidden-layer columns are projected after
/// every batch when a constraint is set.
pub fn train(
    data: &DatasetSpec,
    arch: &Architecture,
    config: &TrainConfig,
) -> Result<(NetworkSpec, Vec<EpochStats>)> {
    let p = data.p();
    let (label_targets, n_classes) = match (config.loss, data.response()) {
        (Loss::Mse, Response::Regression(y)) => {
            let (last_units, _) = *arch.layers.last().unwrap();
            if y.ncols() != last_units {
                return Err(Error::InvalidDataset(format!(
                    "response has {} columns but the last layer has {} units",
                    y.ncols(),
                    last_units
                )));
            }
            (None, 0)
        }
        (Loss::SoftmaxCrossEntropy, Response::Labels { classes, n_classes }) => {
            let (last_units, last_act) = *arch.layers.last().unwrap();
            if last_units != *n_classes {
                return Err(Error::InvalidDataset(format!(
                    "{n_classes} classes but the last layer has {last_units} units"
                )));
            }
            if !last_act.is_linear() {
                return Err(Error::InvalidDataset(
                    "softmax_cross_entropy expects a linear output layer (logits)".into(),
                ));
            }
            (Some(classes.clone()), *n_classes)
        }
        (Loss::Mse, Response::Labels { .. }) => {
            return Err(Error::InvalidDataset(
                "mse loss needs a numeric response, not class labels".into(),
            ))
        }
        (Loss::SoftmaxCrossEntropy, Response::Regression(_)) => {
            return Err(Error::InvalidDataset(
                "softmax_cross_entropy needs integer class labels".into(),
            ))
        }
    };
    let _ = n_classes;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut net = init_network(p, arch, &mut rng)?;

    // validation carve-out: last fraction of a seeded shuffle
    let mut order: Vec<usize> = (0..data.n()).collect();
    order.shuffle(&mut rng);
    let val_count = (config.validation_split * data.n() as f64).round() as usize;
    if val_count >= data.n() && config.epochs > 0 {
        return Err(Error::InvalidDataset(
            "validation split leaves no training rows".into(),
        ));
    }
    let train_count = data.n() - val_count;
    let mut train_rows = order[..train_count].to_vec();
    let val_rows = &order[train_count..];
    if config.epochs > 0 {
        if train_count == 0 {
            return Err(Error::InvalidDataset("empty training split".into()));
        }
        if config.batch_size == 0 || config.batch_size > train_count {
            return Err(Error::InvalidDataset(format!(
                "batch_size {} must be in 1..={train_count}",
                config.batch_size
            )));
        }
    }

    let mut adam = AdamState {
        m: net
            .layers()
            .iter()
            .map(|l| Array2::zeros(l.weights().dim()))
            .collect(),
        v: net
            .layers()
            .iter()
            .map(|l| Array2::zeros(l.weights().dim()))
            .collect(),
        step: 0,
    };

    let mut history = Vec::with_capacity(config.epochs);
    for epoch in 1..=config.epochs {
        train_rows.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for (batch_index, batch_rows) in train_rows.chunks(config.batch_size).enumerate() {
            let x = data.x().select(Axis(0), batch_rows);
            let (loss, grads) = match (config.loss, data.response()) {
                (Loss::Mse, Response::Regression(y)) => {
                    let targets = y.select(Axis(0), batch_rows);
                    backprop_mse(&net, &x, &targets)
                }
                (Loss::SoftmaxCrossEntropy, _) => {
                    let classes = label_targets.as_ref().unwrap();
                    let targets: Vec<usize> =
                        batch_rows.iter().map(|&r| classes[r]).collect();
                    backprop_cross_entropy(&net, &x, &targets)
                }
                _ => unreachable!("validated above"),
            };
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss {
                    epoch,
                    batch: batch_index + 1,
                });
            }
            epoch_loss += loss * batch_rows.len() as f64;

            apply_update(&mut net, &grads, config, &mut adam);

            // constraint callback: end of every batch, hidden layers only
            if let Some(norm) = config.constraint.norm() {
                let depth = net.depth();
                for layer in net.layers_mut()[..depth - 1].iter_mut() {
                    for col in layer.weights_mut().columns_mut() {
                        project_in_place(col, norm, PROJECTION_EPSILON);
                    }
                }
            }
        }
        let train_loss = epoch_loss / train_count as f64;
        let val_loss = if val_rows.is_empty() {
            None
        } else {
            let x = data.x().select(Axis(0), val_rows);
            let loss = match (config.loss, data.response()) {
                (Loss::Mse, Response::Regression(y)) => {
                    let targets = y.select(Axis(0), val_rows);
                    let pred = net.forward(x.view())?;
                    mse(&pred, &targets)
                }
                (Loss::SoftmaxCrossEntropy, _) => {
                    let classes = label_targets.as_ref().unwrap();
                    let targets: Vec<usize> = val_rows.iter().map(|&r| classes[r]).collect();
                    let logits = net.forward(x.view())?;
                    cross_entropy(&logits, &targets)
                }
                _ => unreachable!(),
            };
            Some(loss)
        };
        history.push(EpochStats {
            epoch,
            train_loss,
            val_loss,
        });
    }
    Ok((net, history))
}

/// Seeded uniform init in ±sqrt(6 / (fan_in + fan_out)), bias row included.
fn init_network(p: usize, arch: &Architecture, rng: &mut ChaCha8Rng) -> Result<NetworkSpec> {
    let mut layers = Vec::with_capacity(arch.layers.len());
    let mut fan_in = p;
    for &(units, activation) in &arch.layers {
        let limit = (6.0 / (fan_in + units) as f64).sqrt();
        let weights =
            Array2::from_shape_fn((1 + fan_in, units), |_| rng.random_range(-limit..limit));
        layers.push(Layer::new(activation, weights)?);
        fan_in = units;
    }
    NetworkSpec::new(layers)
}

struct ForwardTrace {
    /// Post-activation per layer; index 0 is the input batch.
    activations: Vec<Array2<f64>>,
    /// Pre-activation per layer.
    potentials: Vec<Array2<f64>>,
}

fn forward_trace(net: &NetworkSpec, x: &Array2<f64>) -> ForwardTrace {
    let mut activations = vec![x.clone()];
    let mut potentials = Vec::with_capacity(net.depth());
    for layer in net.layers() {
        let mut z = activations.last().unwrap().dot(&layer.kernel());
        z += &layer.bias().insert_axis(Axis(0));
        let a = z.mapv(|v| layer.activation.apply(v));
        potentials.push(z);
        activations.push(a);
    }
    ForwardTrace {
        activations,
        potentials,
    }
}

fn mse(pred: &Array2<f64>, target: &Array2<f64>) -> f64 {
    let diff = pred - target;
    diff.iter().map(|d| d * d).sum::<f64>() / diff.len() as f64
}

fn cross_entropy(logits: &Array2<f64>, classes: &[usize]) -> f64 {
    let mut total = 0.0;
    for (row, &class) in logits.rows().into_iter().zip(classes) {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_sum = row.iter().map(|v| (v - max).exp()).sum::<f64>().ln() + max;
        total += log_sum - row[class];
    }
    total / classes.len() as f64
}

fn softmax_rows(logits: &Array2<f64>) -> Array2<f64> {
    let mut out = logits.clone();
    for mut row in out.rows_mut() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
    out
}

/// Backprop from an output-gradient seed dL/dz_L already divided by the batch
/// size. Returns per-layer gradients of the full weight matrices (bias row
/// first).
fn backprop_from(
    net: &NetworkSpec,
    trace: &ForwardTrace,
    mut delta: Array2<f64>,
) -> Vec<Array2<f64>> {
    let depth = net.depth();
    let mut grads: Vec<Array2<f64>> = Vec::with_capacity(depth);
    for l in (0..depth).rev() {
        let layer = &net.layers()[l];
        let input = &trace.activations[l];
        let grad_kernel = input.t().dot(&delta);
        let grad_bias = delta.sum_axis(Axis(0));
        let mut grad = Array2::zeros(layer.weights().dim());
        grad.row_mut(0).assign(&grad_bias);
        grad.slice_mut(ndarray::s![1.., ..]).assign(&grad_kernel);
        grads.push(grad);
        if l > 0 {
            // trace.activations[l] is layer l-1's post-activation
            let prev_act = net.layers()[l - 1].activation;
            let mut upstream = delta.dot(&layer.kernel().t());
            ndarray::Zip::from(&mut upstream)
                .and(&trace.potentials[l - 1])
                .and(&trace.activations[l])
                .for_each(|u, &z, &a| *u *= prev_act.derivative(z, a));
            delta = upstream;
        }
    }
    grads.reverse();
    grads
}

fn backprop_mse(
    net: &NetworkSpec,
    x: &Array2<f64>,
    target: &Array2<f64>,
) -> (f64, Vec<Array2<f64>>) {
    let trace = forward_trace(net, x);
    let pred = trace.activations.last().unwrap();
    let loss = mse(pred, target);
    // dL/da = 2 (a - y) / (n · c), then through the output activation
    let scale = 2.0 / (pred.len() as f64);
    let mut delta = (pred - target) * scale;
    let last = net.layers().last().unwrap();
    if !last.activation.is_linear() {
        let z = trace.potentials.last().unwrap();
        ndarray::Zip::from(&mut delta).and(z).and(pred).for_each(|d, &zv, &av| {
            *d *= last.activation.derivative(zv, av);
        });
    }
    (loss, backprop_from(net, &trace, delta))
}

fn backprop_cross_entropy(
    net: &NetworkSpec,
    x: &Array2<f64>,
    classes: &[usize],
) -> (f64, Vec<Array2<f64>>) {
    let trace = forward_trace(net, x);
    let logits = trace.activations.last().unwrap();
    let loss = cross_entropy(logits, classes);
    let mut delta = softmax_rows(logits);
    for (i, &class) in classes.iter().enumerate() {
        delta[(i, class)] -= 1.0;
    }
    delta /= classes.len() as f64;
    (loss, backprop_from(net, &trace, delta))
}

fn apply_update(
    net: &mut NetworkSpec,
    grads: &[Array2<f64>],
    config: &TrainConfig,
    adam: &mut AdamState,
) {
    match config.optimizer {
        Optimizer::Sgd => {
            for (layer, grad) in net.layers_mut().iter_mut().zip(grads) {
                layer.weights_mut().scaled_add(-config.learning_rate, grad);
            }
        }
        Optimizer::Adam {
            beta1,
            beta2,
            epsilon,
        } => {
            adam.step += 1;
            let t = adam.step as i32;
            let correction1 = 1.0 - beta1.powi(t);
            let correction2 = 1.0 - beta2.powi(t);
            for (l, (layer, grad)) in net.layers_mut().iter_mut().zip(grads).enumerate() {
                let m = &mut adam.m[l];
                let v = &mut adam.v[l];
                ndarray::Zip::from(&mut *m).and(grad).for_each(|m, &g| {
                    *m = beta1 * *m + (1.0 - beta1) * g;
                });
                ndarray::Zip::from(&mut *v).and(grad).for_each(|v, &g| {
                    *v = beta2 * *v + (1.0 - beta2) * g * g;
                });
                ndarray::Zip::from(layer.weights_mut())
                    .and(&*m)
                    .and(&*v)
                    .for_each(|w, &m, &v| {
                        let m_hat = m / correction1;
                        let v_hat = v / correction2;
                        *w -= config.learning_rate * m_hat / (v_hat.sqrt() + epsilon);
                    });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::gen_poly_data;
    use crate::poly::{Monomial, Polynomial};

    fn interaction_poly() -> Polynomial {
        Polynomial::single_output(
            5,
            2,
            vec![
                Monomial::intercept(),
                Monomial::new(vec![1]),
                Monomial::new(vec![2, 3]),
                Monomial::new(vec![4]),
            ],
            vec![2.0, -2.0, 5.0, 3.0],
        )
        .unwrap()
    }

    #[test]
    fn projection_keeps_small_vectors() {
        let w = constraint_project(&[0.3, 0.4], NormKind::L2, 1e-7);
        // ‖w‖ = 0.5 ≤ 1: shrunk only by 0.5/(0.5 + ε)
        let factor = 0.5 / (0.5 + 1e-7);
        assert!((w[0] - 0.3 * factor).abs() < 1e-15);
        assert!((w[1] - 0.4 * factor).abs() < 1e-15);
    }

    #[test]
    fn projection_rescales_large_vectors_l2() {
        let w = constraint_project(&[3.0, 4.0], NormKind::L2, 1e-7);
        assert!((w[0] - 0.6).abs() < 1e-7);
        assert!((w[1] - 0.8).abs() < 1e-7);
        let norm = (w[0] * w[0] + w[1] * w[1]).sqrt();
        assert!(norm <= 1.0 + 1e-9);
    }

    #[test]
    fn projection_rescales_large_vectors_l1() {
        let w = constraint_project(&[1.0, 1.0], NormKind::L1, 1e-7);
        assert!((w[0] - 0.5).abs() < 1e-7);
        assert!((w[1] - 0.5).abs() < 1e-7);
    }

    #[test]
    fn architecture_parse_round_trip() {
        let arch: Architecture = "50:tanh,100:tanh,1:linear".parse().unwrap();
        assert_eq!(
            arch.layers,
            vec![
                (50, ActivationKind::Tanh),
                (100, ActivationKind::Tanh),
                (1, ActivationKind::Linear),
            ]
        );
        assert!("50".parse::<Architecture>().is_err());
        assert!("0:tanh".parse::<Architecture>().is_err());
        assert!("8:relu".parse::<Architecture>().is_err());
    }

    fn tiny_config() -> TrainConfig {
        TrainConfig {
            epochs: 5,
            batch_size: 8,
            learning_rate: 1e-2,
            optimizer: Optimizer::adam(),
            loss: Loss::Mse,
            constraint: Constraint::L1Norm,
            seed: 11,
            validation_split: 0.25,
        }
    }

    #[test]
    fn zero_epochs_returns_initialization() {
        let data = gen_poly_data(&interaction_poly(), 40, 0.05, 1).unwrap();
        let arch: Architecture = "8:tanh,1:linear".parse().unwrap();
        let config = TrainConfig {
            epochs: 0,
            constraint: Constraint::None,
            ..tiny_config()
        };
        let (net, history) = train(&data, &arch, &config).unwrap();
        assert!(history.is_empty());

        // same seed, independent init must match exactly
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let reference = init_network(5, &arch, &mut rng).unwrap();
        assert_eq!(net, reference);
    }

    #[test]
    fn zero_learning_rate_only_projects() {
        let data = gen_poly_data(&interaction_poly(), 40, 0.05, 2).unwrap();
        let arch: Architecture = "8:tanh,1:linear".parse().unwrap();
        let config = TrainConfig {
            learning_rate: 0.0,
            epochs: 2,
            optimizer: Optimizer::Sgd,
            ..tiny_config()
        };
        let (net, _) = train(&data, &arch, &config).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let reference = init_network(5, &arch, &mut rng).unwrap();
        // hidden layer: every column equals the projection of its init
        let initial = reference.layers()[0].weights();
        let trained = net.layers()[0].weights();
        for col in 0..initial.ncols() {
            let projected = constraint_project(
                &initial.column(col).to_vec(),
                NormKind::L1,
                PROJECTION_EPSILON,
            );
            // idempotent after the first batch, so compare directions
            let got = trained.column(col);
            let cos: f64 = projected
                .iter()
                .zip(got.iter())
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / (projected.iter().map(|v| v * v).sum::<f64>().sqrt()
                    * got.iter().map(|v| v * v).sum::<f64>().sqrt());
            assert!((cos - 1.0).abs() < 1e-12);
        }
        // output layer untouched by projection and lr = 0
        assert_eq!(
            net.layers()[1].weights(),
            reference.layers()[1].weights()
        );
    }

    #[test]
    fn training_is_bit_deterministic() {
        let data = gen_poly_data(&interaction_poly(), 60, 0.05, 3).unwrap();
        let arch: Architecture = "6:tanh,1:linear".parse().unwrap();
        let config = tiny_config();
        let (a, ha) = train(&data, &arch, &config).unwrap();
        let (b, hb) = train(&data, &arch, &config).unwrap();
        assert_eq!(a, b);
        assert_eq!(ha, hb);
    }

    #[test]
    fn hidden_norms_bounded_after_training() {
        let data = gen_poly_data(&interaction_poly(), 60, 0.05, 4).unwrap();
        let arch: Architecture = "10:tanh,6:tanh,1:linear".parse().unwrap();
        for constraint in [Constraint::L1Norm, Constraint::L2Norm] {
            let config = TrainConfig {
                constraint,
                epochs: 3,
                ..tiny_config()
            };
            let (net, _) = train(&data, &arch, &config).unwrap();
            let norms = column_norms(&net, constraint.norm().unwrap());
            for layer_norms in &norms[..net.depth() - 1] {
                for &n in layer_norms {
                    assert!(n <= 1.0 + 1e-9, "hidden norm {n}");
                }
            }
        }
    }

    #[test]
    fn loss_decreases_on_regression_task() {
        let data = gen_poly_data(&interaction_poly(), 200, 0.05, 5).unwrap();
        let scaled = crate::data::scale_to_unit(&data).unwrap();
        let arch: Architecture = "16:tanh,1:linear".parse().unwrap();
        let config = TrainConfig {
            epochs: 60,
            batch_size: 25,
            validation_split: 0.0,
            constraint: Constraint::L1Norm,
            ..tiny_config()
        };
        let (_, history) = train(&scaled, &arch, &config).unwrap();
        assert!(history.last().unwrap().train_loss < history[0].train_loss);
    }

    #[test]
    fn batch_larger_than_training_set_is_rejected() {
        let data = gen_poly_data(&interaction_poly(), 10, 0.0, 6).unwrap();
        let arch: Architecture = "4:tanh,1:linear".parse().unwrap();
        let config = TrainConfig {
            batch_size: 11,
            validation_split: 0.0,
            ..tiny_config()
        };
        assert!(train(&data, &arch, &config).is_err());
    }

    #[test]
    fn cross_entropy_needs_labels() {
        let data = gen_poly_data(&interaction_poly(), 10, 0.0, 7).unwrap();
        let arch: Architecture = "4:tanh,3:linear".parse().unwrap();
        let config = TrainConfig {
            loss: Loss::SoftmaxCrossEntropy,
            ..tiny_config()
        };
        assert!(train(&data, &arch, &config).is_err());
    }

    #[test]
    fn exploding_loss_reports_position() {
        let data = gen_poly_data(&interaction_poly(), 40, 0.0, 8).unwrap();
        let arch: Architecture = "8:tanh,1:linear".parse().unwrap();
        let config = TrainConfig {
            learning_rate: 1e155,
            optimizer: Optimizer::Sgd,
            epochs: 10,
            batch_size: 8,
            constraint: Constraint::None,
            validation_split: 0.0,
            ..tiny_config()
        };
        match train(&data, &arch, &config) {
            Err(Error::NonFiniteLoss { epoch, batch }) => {
                assert!(epoch >= 1 && batch >= 1);
            }
            other => panic!("expected NonFiniteLoss, got {other:?}"),
        }
    }

    /// Central finite differences over every weight of a tiny network.
    fn numeric_gradients(
        net: &NetworkSpec,
        x: &Array2<f64>,
        loss_of: &dyn Fn(&NetworkSpec) -> f64,
    ) -> Vec<Array2<f64>> {
        let h = 1e-5;
        let mut grads = Vec::new();
        for l in 0..net.depth() {
            let shape = net.layers()[l].weights().dim();
            let mut grad = Array2::zeros(shape);
            for r in 0..shape.0 {
                for c in 0..shape.1 {
                    let mut plus = net.clone();
                    plus.layers_mut()[l].weights_mut()[(r, c)] += h;
                    let mut minus = net.clone();
                    minus.layers_mut()[l].weights_mut()[(r, c)] -= h;
                    grad[(r, c)] = (loss_of(&plus) - loss_of(&minus)) / (2.0 * h);
                }
            }
            grads.push(grad);
        }
        let _ = x;
        grads
    }

    #[test]
    fn analytic_gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let x = Array2::from_shape_fn((4, 3), |_| rng.random_range(-1.0..1.0));
        let y = Array2::from_shape_fn((4, 2), |_| rng.random_range(-1.0..1.0));
        let classes = vec![0usize, 1, 0, 1];

        for act in [
            ActivationKind::Tanh,
            ActivationKind::Sigmoid,
            ActivationKind::Softplus,
        ] {
            let arch = Architecture {
                layers: vec![(3, act), (2, ActivationKind::Linear)],
            };
            let net = init_network(3, &arch, &mut rng).unwrap();

            // mse
            let (_, analytic) = backprop_mse(&net, &x, &y);
            let numeric = numeric_gradients(&net, &x, &|n| {
                mse(&n.forward(x.view()).unwrap(), &y)
            });
            for (a, n) in analytic.iter().zip(&numeric) {
                for (&av, &nv) in a.iter().zip(n.iter()) {
                    assert!(
                        (av - nv).abs() <= 1e-5 * av.abs().max(nv.abs()).max(1e-3),
                        "{act} mse: {av} vs {nv}"
                    );
                }
            }

            // softmax cross-entropy
            let (_, analytic) = backprop_cross_entropy(&net, &x, &classes);
            let numeric = numeric_gradients(&net, &x, &|n| {
                cross_entropy(&n.forward(x.view()).unwrap(), &classes)
            });
            for (a, n) in analytic.iter().zip(&numeric) {
                for (&av, &nv) in a.iter().zip(n.iter()) {
                    assert!(
                        (av - nv).abs() <= 1e-5 * av.abs().max(nv.abs()).max(1e-3),
                        "{act} ce: {av} vs {nv}"
                    );
                }
            }
        }
    }

    #[test]
    fn mse_gradient_through_nonlinear_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let x = Array2::from_shape_fn((3, 2), |_| rng.random_range(-1.0..1.0));
        let y = Array2::from_shape_fn((3, 2), |_| rng.random_range(-1.0..1.0));
        let arch = Architecture {
            layers: vec![(3, ActivationKind::Tanh), (2, ActivationKind::Sigmoid)],
        };
        let net = init_network(2, &arch, &mut rng).unwrap();
        let (_, analytic) = backprop_mse(&net, &x, &y);
        let numeric =
            numeric_gradients(&net, &x, &|n| mse(&n.forward(x.view()).unwrap(), &y));
        for (a, n) in analytic.iter().zip(&numeric) {
            for (&av, &nv) in a.iter().zip(n.iter()) {
                assert!((av - nv).abs() <= 1e-5 * av.abs().max(nv.abs()).max(1e-3));
            }
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn projection_preserves_direction(
                w in prop::collection::vec(-5.0f64..5.0, 1..6),
                l1 in any::<bool>(),
            ) {
                prop_assume!(w.iter().any(|&v| v != 0.0));
                let norm = if l1 { NormKind::L1 } else { NormKind::L2 };
                let out = constraint_project(&w, norm, 1e-7);
                let dot: f64 = w.iter().zip(&out).map(|(a, b)| a * b).sum();
                let nw: f64 = w.iter().map(|v| v * v).sum::<f64>().sqrt();
                let no: f64 = out.iter().map(|v| v * v).sum::<f64>().sqrt();
                prop_assume!(no > 0.0);
                let cos = dot / (nw * no);
                prop_assert!((cos - 1.0).abs() < 1e-12);
            }

            #[test]
            fn projection_caps_norm(
                w in prop::collection::vec(-5.0f64..5.0, 1..6),
                l1 in any::<bool>(),
            ) {
                let norm = if l1 { NormKind::L1 } else { NormKind::L2 };
                let out = constraint_project(&w, norm, 1e-7);
                let value = match norm {
                    NormKind::L1 => out.iter().map(|v| v.abs()).sum::<f64>(),
                    NormKind::L2 => out.iter().map(|v| v * v).sum::<f64>().sqrt(),
                };
                prop_assert!(value <= 1.0 + 1e-9);
            }
        }
    }
}
