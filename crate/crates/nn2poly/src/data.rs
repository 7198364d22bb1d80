//! Datasets: synthetic generation, [-1, 1] scaling, train/test splits, and
//! CSV I/O. Feature columns come first, response column(s) last;
//! classification labels are integers 0..c-1.

use std::path::Path;

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Per-column affine record of a [-1, 1] scaling, kept so predictions can be
/// mapped back if needed. Covers every scaled column in dataset order
/// (features, then regression responses).
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRecord {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

/// Response part of a dataset.
#[derive(Clone, Debug, PartialEq)]
pub enum Response {
    /// n × c matrix of real targets.
    Regression(Array2<f64>),
    /// Class index per row, in 0..n_classes.
    Labels { classes: Vec<usize>, n_classes: usize },
}

/// A feature matrix with its response and an optional scaling record.
#[derive(Clone, Debug, PartialEq)]
pub struct DatasetSpec {
    x: Array2<f64>,
    response: Response,
    scaling: Option<ScalingRecord>,
}

impl DatasetSpec {
    pub fn regression(x: Array2<f64>, y: Array2<f64>) -> Result<Self> {
        if x.nrows() != y.nrows() {
            return Err(Error::InvalidDataset(format!(
                "{} feature rows but {} response rows",
                x.nrows(),
                y.nrows()
            )));
        }
        Ok(DatasetSpec {
            x,
            response: Response::Regression(y),
            scaling: None,
        })
    }

    pub fn classification(x: Array2<f64>, classes: Vec<usize>, n_classes: usize) -> Result<Self> {
        if x.nrows() != classes.len() {
            return Err(Error::InvalidDataset(format!(
                "{} feature rows but {} labels",
                x.nrows(),
                classes.len()
            )));
        }
        if let Some(&bad) = classes.iter().find(|&&c| c >= n_classes) {
            return Err(Error::InvalidDataset(format!(
                "label {bad} out of range for {n_classes} classes"
            )));
        }
        Ok(DatasetSpec {
            x,
            response: Response::Labels { classes, n_classes },
            scaling: None,
        })
    }

    pub fn x(&self) -> ArrayView2<'_, f64> {
        self.x.view()
    }

    pub fn response(&self) -> &Response {
        &self.response
    }

    pub fn scaling(&self) -> Option<&ScalingRecord> {
        self.scaling.as_ref()
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    /// Output width: response columns, or the class count.
    pub fn n_outputs(&self) -> usize {
        match &self.response {
            Response::Regression(y) => y.ncols(),
            Response::Labels { n_classes, .. } => *n_classes,
        }
    }

    pub fn is_classification(&self) -> bool {
        matches!(self.response, Response::Labels { .. })
    }

    /// Select rows by index (clones the selected data).
    pub fn select(&self, rows: &[usize]) -> DatasetSpec {
        let x = self.x.select(Axis(0), rows);
        let response = match &self.response {
            Response::Regression(y) => Response::Regression(y.select(Axis(0), rows)),
            Response::Labels { classes, n_classes } => Response::Labels {
                classes: rows.iter().map(|&r| classes[r]).collect(),
                n_classes: *n_classes,
            },
        };
        DatasetSpec {
            x,
            response,
            scaling: self.scaling.clone(),
        }
    }

    /// Write as CSV with header `x1..xp` then `y` (or `y1..yc`).
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut writer = csv::Writer::from_path(path)?;
        let mut header: Vec<String> = (1..=self.p()).map(|i| format!("x{i}")).collect();
        match &self.response {
            Response::Regression(y) if y.ncols() > 1 => {
                header.extend((1..=y.ncols()).map(|j| format!("y{j}")));
            }
            _ => header.push("y".to_string()),
        }
        writer.write_record(&header)?;
        for i in 0..self.n() {
            let mut record: Vec<String> =
                self.x.row(i).iter().map(|v| format!("{v}")).collect();
            match &self.response {
                Response::Regression(y) => {
                    record.extend(y.row(i).iter().map(|v| format!("{v}")));
                }
                Response::Labels { classes, .. } => record.push(classes[i].to_string()),
            }
            writer.write_record(&record)?;
        }
        writer.flush()?;
        Ok(())
    }

    /// Read a CSV written in the layout above. `response_cols` says how many
    /// trailing columns are responses; `classification` reads a single label
    /// column of integers instead.
    pub fn read_csv(
        path: impl AsRef<Path>,
        response_cols: usize,
        classification: bool,
    ) -> Result<Self> {
        let (_, matrix) = read_csv_matrix(path)?;
        let total = matrix.ncols();
        let response_cols = if classification { 1 } else { response_cols };
        if total <= response_cols {
            return Err(Error::InvalidDataset(format!(
                "{total} columns cannot hold {response_cols} response column(s) plus features"
            )));
        }
        let p = total - response_cols;
        let x = matrix.slice(ndarray::s![.., ..p]).to_owned();
        if classification {
            let raw = matrix.column(p);
            let mut classes = Vec::with_capacity(raw.len());
            for &v in raw.iter() {
                if v.fract() != 0.0 || v < 0.0 {
                    return Err(Error::InvalidDataset(format!(
                        "classification label {v} is not a non-negative integer"
                    )));
                }
                classes.push(v as usize);
            }
            let n_classes = classes.iter().max().map_or(0, |&m| m + 1);
            DatasetSpec::classification(x, classes, n_classes)
        } else {
            let y = matrix.slice(ndarray::s![.., p..]).to_owned();
            DatasetSpec::regression(x, y)
        }
    }
}

/// Read any headered numeric CSV into a matrix.
pub fn read_csv_matrix(path: impl AsRef<Path>) -> Result<(Vec<String>, Array2<f64>)> {
    let mut reader = csv::Reader::from_path(path)?;
    let header: Vec<String> = reader
        .headers()?
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let row: Vec<f64> = record
            .iter()
            .map(|field| {
                field.trim().parse::<f64>().map_err(|_| {
                    Error::InvalidDataset(format!("non-numeric field '{field}'"))
                })
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    let cols = header.len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidDataset("ragged CSV rows".into()));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    let matrix = Array2::from_shape_vec((rows.len(), cols), flat)
        .map_err(|e| Error::InvalidDataset(e.to_string()))?;
    Ok((header, matrix))
}

/// Draw X ~ iid standard normal and set Y = poly(X) + noise_sd · ε.
pub fn gen_poly_data(poly: &Polynomial, n: usize, noise_sd: f64, seed: u64) -> Result<DatasetSpec> {
    if n == 0 {
        return Err(Error::InvalidDataset("need at least one row".into()));
    }
    if noise_sd < 0.0 {
        return Err(Error::InvalidValue {
            field: "noise_sd",
            reason: "must be non-negative".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let x = Array2::from_shape_fn((n, poly.p()), |_| normal.sample(&mut rng));
    let mut y = poly.eval(x.view())?;
    if noise_sd > 0.0 {
        y.mapv_inplace(|v| {
            let noise: f64 = normal.sample(&mut rng);
            v + noise_sd * noise
        });
    }
    DatasetSpec::regression(x, y)
}

/// Gaussian blobs for synthetic classification: one center per class (rows of
/// `centers`), points assigned to classes in balanced contiguous runs.
pub fn gen_blob_data(
    centers: ArrayView2<'_, f64>,
    n: usize,
    sd: f64,
    seed: u64,
) -> Result<DatasetSpec> {
    let n_classes = centers.nrows();
    if n_classes < 2 {
        return Err(Error::InvalidDataset("need at least two classes".into()));
    }
    if n < n_classes {
        return Err(Error::InvalidDataset(
            "need at least one point per class".into(),
        ));
    }
    let p = centers.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let mut x = Array2::zeros((n, p));
    let mut classes = Vec::with_capacity(n);
    for i in 0..n {
        let class = i * n_classes / n;
        classes.push(class);
        for j in 0..p {
            let noise: f64 = normal.sample(&mut rng);
            x[(i, j)] = centers[(class, j)] + sd * noise;
        }
    }
    DatasetSpec::classification(x, classes, n_classes)
}

/// Affinely map each column to [-1, 1]: center = min + (max - min)/2,
/// scale = (max - min)/2. Features always; regression responses too (class
/// labels stay untouched). Errors on constant columns.
pub fn scale_to_unit(data: &DatasetSpec) -> Result<DatasetSpec> {
    let mut mins = Vec::new();
    let mut maxs = Vec::new();
    let mut scale_columns = |matrix: &mut Array2<f64>, offset: usize| -> Result<()> {
        for (j, mut column) in matrix.columns_mut().into_iter().enumerate() {
            let min = column.iter().copied().fold(f64::INFINITY, f64::min);
            let max = column.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if max <= min {
                return Err(Error::ConstantColumn { column: offset + j });
            }
            let center = min + (max - min) / 2.0;
            let scale = (max - min) / 2.0;
            column.mapv_inplace(|v| (v - center) / scale);
            mins.push(min);
            maxs.push(max);
        }
        Ok(())
    };

    let mut x = data.x.clone();
    scale_columns(&mut x, 0)?;
    let response = match &data.response {
        Response::Regression(y) => {
            let mut y = y.clone();
            scale_columns(&mut y, data.p())?;
            Response::Regression(y)
        }
        labels @ Response::Labels { .. } => labels.clone(),
    };
    Ok(DatasetSpec {
        x,
        response,
        scaling: Some(ScalingRecord { mins, maxs }),
    })
}

/// Seeded shuffle, then the first `round(train_fraction · n)` rows train and
/// the rest test.
pub fn split_train_test(
    data: &DatasetSpec,
    train_fraction: f64,
    seed: u64,
) -> Result<(DatasetSpec, DatasetSpec)> {
    if !(0.0..1.0).contains(&train_fraction) && train_fraction != 1.0 {
        return Err(Error::InvalidValue {
            field: "train_fraction",
            reason: "must lie in (0, 1)".into(),
        });
    }
    let n = data.n();
    let mut rows: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rows.shuffle(&mut rng);
    let train_count = (train_fraction * n as f64).round() as usize;
    let (train_rows, test_rows) = rows.split_at(train_count.min(n));
    Ok((data.select(train_rows), data.select(test_rows)))
}

/// Column means, used by a few diagnostics.
pub fn column_means(matrix: ArrayView2<'_, f64>) -> Array1<f64> {
    matrix
        .mean_axis(Axis(0))
        .unwrap_or_else(|| Array1::zeros(matrix.ncols()))
}
