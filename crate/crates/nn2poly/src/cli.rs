//! Command-line pipeline: generate → train → extract → predict/compare/report.
//!
//! Every randomized subcommand takes an explicit `--seed`; given the same
//! flags, every subcommand is deterministic. Output files are written
//! atomically (temp file + rename). Exit codes: 0 success, 2 validation
//! error, 3 numeric failure, 4 resource ceiling.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::data::{self, DatasetSpec};
use crate::error::{Error, Result};
use crate::network::NetworkSpec;
use crate::poly::Polynomial;
use crate::train::{self, Architecture, Constraint, Loss, NormKind, Optimizer, TrainConfig};
use crate::transform::{LayerPolynomials, TaylorOrders, TransformConfig, TransformOutput};

#[derive(Parser, Debug)]
#[command(
    name = "nn2poly",
    about = "Convert trained multilayer perceptrons into interpretable polynomials",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample a dataset from a polynomial file
    Generate(GenerateArgs),
    /// Train an MLP with optional norm constraints
    Train(TrainArgs),
    /// Convert a network file into a polynomial file
    Extract(ExtractArgs),
    /// Evaluate a polynomial on a dataset
    Predict(PredictArgs),
    /// Compare network predictions against polynomial predictions
    Compare(CompareArgs),
    /// Rank a polynomial's coefficients
    Report(ReportArgs),
    /// Print layer shapes and per-column weight norms
    Inspect(InspectArgs),
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Polynomial file defining the response surface
    #[arg(long)]
    pub poly: PathBuf,
    /// Number of rows to sample
    #[arg(long)]
    pub n: usize,
    /// Standard deviation of the additive response noise
    #[arg(long, default_value_t = 0.0)]
    pub noise_sd: f64,
    #[arg(long)]
    pub seed: u64,
    /// Output CSV path
    #[arg(long)]
    pub out: PathBuf,
    /// Scale every column to [-1, 1]
    #[arg(long)]
    pub scale: bool,
    /// Also write seeded 0.75/0.25 train/test CSVs next to --out
    #[arg(long)]
    pub split: bool,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Training CSV (features first, response last)
    #[arg(long)]
    pub data: PathBuf,
    /// Layer spec like "50:tanh,100:tanh,50:tanh,1:linear"
    #[arg(long)]
    pub arch: String,
    #[arg(long, default_value_t = 100)]
    pub epochs: usize,
    #[arg(long, default_value_t = 32)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub learning_rate: f64,
    /// "adam" or "sgd"
    #[arg(long, default_value = "adam")]
    pub optimizer: String,
    /// "mse" or "softmax_cross_entropy"
    #[arg(long, default_value = "mse")]
    pub loss: String,
    /// "none", "l1_norm" or "l2_norm"
    #[arg(long, default_value = "none")]
    pub constraint: String,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.0)]
    pub validation_split: f64,
    /// Output network file
    #[arg(long)]
    pub out: PathBuf,
    /// Optional per-epoch loss CSV
    #[arg(long)]
    pub history: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    /// Network file to convert
    #[arg(long)]
    pub network: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub max_order: usize,
    /// Taylor order for nonlinear layers: one value or a comma list
    #[arg(long)]
    pub taylor_order: Option<String>,
    /// Write every layer's polynomial pair instead of just the final one
    #[arg(long)]
    pub keep_layers: bool,
    #[arg(long, default_value_t = crate::combinatorics::DEFAULT_PARTITION_CEILING)]
    pub partition_ceiling: usize,
    /// Output polynomial file
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    /// Polynomial file
    #[arg(long)]
    pub poly: PathBuf,
    /// Input CSV; only the first p columns are read
    #[arg(long)]
    pub data: PathBuf,
    /// "none" for raw values, "softmax_argmax" for class indices
    #[arg(long, default_value = "none")]
    pub postprocess: String,
    /// Output CSV
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[arg(long)]
    pub network: PathBuf,
    #[arg(long)]
    pub poly: PathBuf,
    /// CSV whose first p columns are evaluated by both models
    #[arg(long)]
    pub data: PathBuf,
    /// Also report argmax agreement and a confusion matrix
    #[arg(long)]
    pub classification: bool,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    #[arg(long)]
    pub poly: PathBuf,
    /// How many coefficients per output channel
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// Optional CSV copy of the table
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct InspectArgs {
    #[arg(long)]
    pub network: PathBuf,
}

/// Per-channel comparison of network and polynomial predictions.
#[derive(Debug, Clone)]
pub struct CompareReport {
    pub n_test: usize,
    pub r_squared: Vec<f64>,
    pub mae: Vec<f64>,
    pub max_abs_diff: Vec<f64>,
    /// Argmax agreement and confusion matrix (rows = network class,
    /// columns = polynomial class), when requested.
    pub classification: Option<(f64, Vec<Vec<usize>>)>,
}

impl CompareReport {
    /// Structured text with one fixed field name per line; vector fields are
    /// space-separated per channel.
    pub fn render(&self) -> String {
        let join = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x:.6}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut out = String::new();
        let _ = writeln!(out, "n_test: {}", self.n_test);
        let _ = writeln!(out, "r_squared: {}", join(&self.r_squared));
        let _ = writeln!(out, "mae: {}", join(&self.mae));
        let _ = writeln!(out, "max_abs_diff: {}", join(&self.max_abs_diff));
        if let Some((agreement, confusion)) = &self.classification {
            let _ = writeln!(out, "agreement: {agreement:.6}");
            let _ = writeln!(out, "confusion:");
            for row in confusion {
                let line = row
                    .iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join(" ");
                let _ = writeln!(out, "{line}");
            }
        }
        out
    }
}

/// Compute the comparison metrics on already-evaluated prediction matrices.
pub fn compare_predictions(
    nn: ArrayView2<'_, f64>,
    poly: ArrayView2<'_, f64>,
    classification: bool,
) -> CompareReport {
    let n = nn.nrows();
    let c = nn.ncols();
    let mut r_squared = Vec::with_capacity(c);
    let mut mae = Vec::with_capacity(c);
    let mut max_abs_diff = Vec::with_capacity(c);
    for j in 0..c {
        let a = nn.column(j);
        let b = poly.column(j);
        let mean = a.mean().unwrap_or(0.0);
        let ss_res: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum();
        let ss_tot: f64 = a.iter().map(|x| (x - mean) * (x - mean)).sum();
        r_squared.push(1.0 - ss_res / ss_tot);
        mae.push(a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).sum::<f64>() / n as f64);
        max_abs_diff.push(
            a.iter()
                .zip(b.iter())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0f64, f64::max),
        );
    }
    let classification = classification.then(|| {
        let nn_class = argmax_rows(nn);
        let poly_class = argmax_rows(poly);
        let agree = nn_class
            .iter()
            .zip(&poly_class)
            .filter(|(a, b)| a == b)
            .count();
        let mut confusion = vec![vec![0usize; c]; c];
        for (&a, &b) in nn_class.iter().zip(&poly_class) {
            confusion[a][b] += 1;
        }
        (agree as f64 / n as f64, confusion)
    });
    CompareReport {
        n_test: n,
        r_squared,
        mae,
        max_abs_diff,
        classification,
    }
}

fn argmax_rows(values: ArrayView2<'_, f64>) -> Vec<usize> {
    values
        .rows()
        .into_iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))
                .map(|(i, _)| i)
                .unwrap_or(0)
        })
        .collect()
}

/// Softmax per row, mostly for prediction post-processing.
pub fn softmax_rows(values: ArrayView2<'_, f64>) -> Array2<f64> {
    let mut out = values.to_owned();
    for mut row in out.rows_mut() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
    out
}

#[derive(Serialize, Deserialize)]
struct LayeredFile {
    layers: Vec<LayerPolynomials>,
    #[serde(rename = "final")]
    final_poly: Polynomial,
}

fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
    let mut name = path
        .file_name()
        .ok_or_else(|| Error::InvalidValue {
            field: "path",
            reason: format!("'{}' has no file name", path.display()),
        })?
        .to_os_string();
    name.push(".tmp");
    let tmp = dir.unwrap_or(Path::new(".")).join(name);
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Train(args) => cmd_train(args),
        Command::Extract(args) => cmd_extract(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Report(args) => cmd_report(args),
        Command::Inspect(args) => cmd_inspect(args),
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let poly = Polynomial::load(&args.poly)?;
    let mut dataset = data::gen_poly_data(&poly, args.n, args.noise_sd, args.seed)?;
    if args.scale {
        dataset = data::scale_to_unit(&dataset)?;
    }
    write_csv_atomic(&dataset, &args.out)?;
    println!("wrote {} rows to {}", dataset.n(), args.out.display());
    if args.split {
        let (train_set, test_set) = data::split_train_test(&dataset, 0.75, args.seed)?;
        let train_path = sibling(&args.out, "_train");
        let test_path = sibling(&args.out, "_test");
        write_csv_atomic(&train_set, &train_path)?;
        write_csv_atomic(&test_set, &test_path)?;
        println!(
            "split {} train / {} test into {} and {}",
            train_set.n(),
            test_set.n(),
            train_path.display(),
            test_path.display()
        );
    }
    Ok(())
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    let ext = path
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}{ext}"))
}

fn write_csv_atomic(dataset: &DatasetSpec, path: &Path) -> Result<()> {
    // csv::Writer wants a path; write to a sibling temp then rename
    let tmp = sibling(path, ".tmp");
    dataset.write_csv(&tmp)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let arch: Architecture = args.arch.parse()?;
    let loss: Loss = args.loss.parse()?;
    let optimizer: Optimizer = args.optimizer.parse()?;
    let constraint: Constraint = args.constraint.parse()?;
    let response_cols = arch.layers.last().map(|&(units, _)| units).unwrap_or(1);
    let dataset = DatasetSpec::read_csv(&args.data, response_cols, loss == Loss::SoftmaxCrossEntropy)?;
    let config = TrainConfig {
        epochs: args.epochs,
        batch_size: args.batch_size,
        learning_rate: args.learning_rate,
        optimizer,
        loss,
        constraint,
        seed: args.seed,
        validation_split: args.validation_split,
    };
    let (net, history) = train::train(&dataset, &arch, &config)?;
    write_atomic(&args.out, &{
        let mut s = serde_json::to_string_pretty(&net)?;
        s.push('\n');
        s
    })?;
    println!(
        "trained {} epochs; final train loss {:.6}; network in {}",
        history.len(),
        history.last().map_or(f64::NAN, |h| h.train_loss),
        args.out.display()
    );
    if let Some(history_path) = args.history {
        let mut text = String::from("epoch,train_loss,val_loss\n");
        for entry in &history {
            let val = entry
                .val_loss
                .map(|v| format!("{v}"))
                .unwrap_or_default();
            let _ = writeln!(text, "{},{},{}", entry.epoch, entry.train_loss, val);
        }
        write_atomic(&history_path, &text)?;
        println!("history in {}", history_path.display());
    }
    Ok(())
}

fn parse_taylor_orders(raw: Option<&str>) -> Result<TaylorOrders> {
    let Some(raw) = raw else {
        return Ok(TaylorOrders::Uniform(8));
    };
    let values: Vec<usize> = raw
        .split(',')
        .map(|part| {
            part.trim().parse::<usize>().map_err(|_| Error::InvalidValue {
                field: "taylor-order",
                reason: format!("'{part}' is not a positive integer"),
            })
        })
        .collect::<Result<_>>()?;
    match values.as_slice() {
        [] => Err(Error::InvalidValue {
            field: "taylor-order",
            reason: "empty list".into(),
        }),
        [one] => Ok(TaylorOrders::Uniform(*one)),
        many => Ok(TaylorOrders::PerLayer(many.to_vec())),
    }
}

fn cmd_extract(args: ExtractArgs) -> Result<()> {
    let net = NetworkSpec::load(&args.network)?;
    let config = TransformConfig {
        max_order: args.max_order,
        taylor_orders: parse_taylor_orders(args.taylor_order.as_deref())?,
        keep_layers: args.keep_layers,
        partition_ceiling: args.partition_ceiling,
    };
    let output = crate::transform::transform(&net, &config)?;
    let final_poly = output.final_polynomial();

    // term counts grouped by order, intercept bundled with order 1
    let mut counts = vec![0usize; config.max_order + 1];
    for label in final_poly.labels() {
        counts[label.order().max(1)] += 1;
    }
    println!("labels: {}", final_poly.len());
    for (order, count) in counts.iter().enumerate().skip(1) {
        if order == 1 {
            println!("order {order}: {count} (intercept included)");
        } else {
            println!("order {order}: {count}");
        }
    }

    let text = match output {
        TransformOutput::Final(poly) => {
            let mut s = serde_json::to_string_pretty(&poly)?;
            s.push('\n');
            s
        }
        TransformOutput::Layered(layers) => {
            let final_poly = layers.last().expect("non-empty").output.clone();
            let mut s = serde_json::to_string_pretty(&LayeredFile {
                layers,
                final_poly,
            })?;
            s.push('\n');
            s
        }
    };
    write_atomic(&args.out, &text)?;
    println!("polynomial in {}", args.out.display());
    Ok(())
}

/// Load the final polynomial from either file layout.
pub fn load_polynomial(path: &Path) -> Result<Polynomial> {
    let text = std::fs::read_to_string(path)?;
    if let Ok(poly) = serde_json::from_str::<Polynomial>(&text) {
        return Ok(poly);
    }
    let layered: LayeredFile = serde_json::from_str(&text)?;
    Ok(layered.final_poly)
}

fn load_features(path: &Path, p: usize) -> Result<Array2<f64>> {
    let (_, matrix) = data::read_csv_matrix(path)?;
    if matrix.ncols() < p {
        return Err(Error::DimensionMismatch {
            context: "data columns",
            expected: p,
            found: matrix.ncols(),
        });
    }
    Ok(matrix.slice(ndarray::s![.., ..p]).to_owned())
}

fn cmd_predict(args: PredictArgs) -> Result<()> {
    let poly = load_polynomial(&args.poly)?;
    let x = load_features(&args.data, poly.p())?;
    let raw = poly.eval(x.view())?;
    let mut text = String::new();
    match args.postprocess.as_str() {
        "none" => {
            let header: Vec<String> = (1..=raw.ncols()).map(|j| format!("y{j}")).collect();
            let _ = writeln!(text, "{}", header.join(","));
            for row in raw.rows() {
                let line = row
                    .iter()
                    .map(|v| format!("{v}"))
                    .collect::<Vec<_>>()
                    .join(",");
                let _ = writeln!(text, "{line}");
            }
        }
        "softmax_argmax" => {
            let probs = softmax_rows(raw.view());
            let classes = argmax_rows(probs.view());
            let _ = writeln!(text, "class");
            for class in classes {
                let _ = writeln!(text, "{class}");
            }
        }
        other => {
            return Err(Error::InvalidValue {
                field: "postprocess",
                reason: format!("'{other}' is not one of none, softmax_argmax"),
            })
        }
    }
    write_atomic(&args.out, &text)?;
    println!("predictions in {}", args.out.display());
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    let net = NetworkSpec::load(&args.network)?;
    let poly = load_polynomial(&args.poly)?;
    if net.input_dim() != poly.p() {
        return Err(Error::DimensionMismatch {
            context: "network vs polynomial inputs",
            expected: net.input_dim(),
            found: poly.p(),
        });
    }
    let x = load_features(&args.data, poly.p())?;
    let nn_pred = net.forward(x.view())?;
    let poly_pred = poly.eval(x.view())?;
    if nn_pred.dim() != poly_pred.dim() {
        return Err(Error::DimensionMismatch {
            context: "prediction channels",
            expected: nn_pred.ncols(),
            found: poly_pred.ncols(),
        });
    }
    let report = compare_predictions(nn_pred.view(), poly_pred.view(), args.classification);
    print!("{}", report.render());
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let poly = load_polynomial(&args.poly)?;
    let ranked = poly.top_coefficients(args.n);
    let mut csv_text = String::from("channel,rank,label,value\n");
    for (channel, entries) in ranked.iter().enumerate() {
        println!("channel {} top {} coefficients:", channel + 1, args.n);
        println!("{:>4}  {:>16}  {:>12}  sign", "rank", "label", "value");
        for (rank, (label, value)) in entries.iter().enumerate() {
            let sign = if *value >= 0.0 { "+" } else { "-" };
            println!(
                "{:>4}  {:>16}  {:>12.6}  {}",
                rank + 1,
                label.to_string(),
                value,
                sign
            );
            let _ = writeln!(
                csv_text,
                "{},{},{},{}",
                channel + 1,
                rank + 1,
                label,
                value
            );
        }
    }
    if let Some(path) = args.out {
        write_atomic(&path, &csv_text)?;
        println!("table in {}", path.display());
    }
    Ok(())
}

fn cmd_inspect(args: InspectArgs) -> Result<()> {
    let net = NetworkSpec::load(&args.network)?;
    let l1 = train::column_norms(&net, NormKind::L1);
    let l2 = train::column_norms(&net, NormKind::L2);
    println!(
        "network: {} inputs, {} layers, {} outputs",
        net.input_dim(),
        net.depth(),
        net.output_dim()
    );
    for (i, layer) in net.layers().iter().enumerate() {
        let (rows, cols) = (layer.weights().nrows(), layer.weights().ncols());
        println!(
            "layer {}: {} weights {}x{} ({} inputs + bias, {} units)",
            i + 1,
            layer.activation,
            rows,
            cols,
            rows - 1,
            cols
        );
        let fmt = |values: &[f64]| {
            values
                .iter()
                .map(|v| format!("{v:.4}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        println!("  l1 norms: {}", fmt(&l1[i]));
        println!("  l2 norms: {}", fmt(&l2[i]));
        let max_l1 = l1[i].iter().copied().fold(0.0f64, f64::max);
        println!(
            "  max l1 norm: {:.6} ({})",
            max_l1,
            if max_l1 <= 1.0 + 1e-9 { "<= 1" } else { "> 1" }
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn compare_report_on_identical_predictions() {
        let a = array![[1.0], [2.0], [3.0]];
        let report = compare_predictions(a.view(), a.view(), false);
        assert_eq!(report.n_test, 3);
        assert_eq!(report.r_squared, vec![1.0]);
        assert_eq!(report.max_abs_diff, vec![0.0]);
        assert!(report.classification.is_none());
    }

    #[test]
    fn confusion_rows_sum_to_class_counts() {
        let nn = array![[2.0, 0.0], [0.0, 2.0], [2.0, 1.0], [1.0, 2.0]];
        let poly = array![[2.0, 0.1], [0.1, 2.0], [0.0, 2.0], [0.0, 2.0]];
        let report = compare_predictions(nn.view(), poly.view(), true);
        let (agreement, confusion) = report.classification.unwrap();
        // network classes: 0, 1, 0, 1
        assert_eq!(confusion[0].iter().sum::<usize>(), 2);
        assert_eq!(confusion[1].iter().sum::<usize>(), 2);
        assert!((agreement - 0.75).abs() < 1e-12);
    }

    #[test]
    fn taylor_order_parsing() {
        assert_eq!(parse_taylor_orders(None).unwrap(), TaylorOrders::Uniform(8));
        assert_eq!(
            parse_taylor_orders(Some("5")).unwrap(),
            TaylorOrders::Uniform(5)
        );
        assert_eq!(
            parse_taylor_orders(Some("2, 3,4")).unwrap(),
            TaylorOrders::PerLayer(vec![2, 3, 4])
        );
        assert!(parse_taylor_orders(Some("x")).is_err());
    }

    #[test]
    fn sibling_paths() {
        assert_eq!(
            sibling(Path::new("/tmp/data.csv"), "_train"),
            PathBuf::from("/tmp/data_train.csv")
        );
        assert_eq!(sibling(Path::new("data"), "_test"), PathBuf::from("data_test"));
    }
}
