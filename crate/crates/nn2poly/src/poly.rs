//! Sparse multi-output polynomials: monomial labels plus a coefficient matrix.
//!
//! A monomial is encoded as the sorted list of variable indices it contains,
//! one entry per occurrence: `[1, 1, 2]` is x₁²x₂ and the empty list is the
//! intercept. Coefficients live in a `|labels| × c` matrix, one column per
//! output channel, so a family of polynomials over the same terms (one per
//! network output, or one per neuron) shares a single label list.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;

use ndarray::{Array2, ArrayView2};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A product of variables, stored as non-decreasing 1-based indices with
/// repetition. The empty list is the intercept term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    indices: Vec<u32>,
}

impl Monomial {
    /// The intercept (order-0) monomial.
    pub fn intercept() -> Self {
        Monomial {
            indices: Vec::new(),
        }
    }

    /// Build from raw indices, sorting them. Callers are expected to pass
    /// indices ≥ 1; use [`canonicalize_label`] for untrusted input.
    pub fn new(mut indices: Vec<u32>) -> Self {
        debug_assert!(indices.iter().all(|&i| i >= 1));
        indices.sort_unstable();
        Monomial { indices }
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    /// Number of variable occurrences (T in the multiplicity notation).
    pub fn order(&self) -> usize {
        self.indices.len()
    }

    pub fn is_intercept(&self) -> bool {
        self.indices.is_empty()
    }

    /// Graded-lexicographic comparison: by order first, then lexicographic.
    fn graded_lex_cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| self.indices.cmp(&other.indices))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.graded_lex_cmp(other)
    }
}

impl fmt::Display for Monomial {
    /// Human-readable form: `1` for the intercept, else `x1^2*x2` style.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_intercept() {
            return f.write_str("1");
        }
        let mut first = true;
        let mut i = 0;
        while i < self.indices.len() {
            let var = self.indices[i];
            let mut count = 1;
            while i + count < self.indices.len() && self.indices[i + count] == var {
                count += 1;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if count == 1 {
                write!(f, "x{var}")?;
            } else {
                write!(f, "x{var}^{count}")?;
            }
            i += count;
        }
        Ok(())
    }
}

/// Normalize a raw label against `p` variables. `[0]` and the empty list both
/// mean the intercept; 0 is only legal on its own.
pub fn canonicalize_label(raw: &[u32], p: usize) -> Result<Monomial> {
    if raw == [0] || raw.is_empty() {
        return Ok(Monomial::intercept());
    }
    if raw.contains(&0) {
        return Err(Error::MixedInterceptLabel {
            label: raw.to_vec(),
        });
    }
    for &index in raw {
        if index as usize > p {
            return Err(Error::LabelIndexOutOfRange { index, p });
        }
    }
    Ok(Monomial::new(raw.to_vec()))
}

/// A polynomial in `p` variables with up to `c` output channels.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    p: usize,
    max_order: usize,
    labels: Vec<Monomial>,
    values: Array2<f64>,
}

impl Polynomial {
    /// Validating constructor: labels must be unique, within `1..=p`, and of
    /// order at most `max_order`; `values` must have one row per label.
    pub fn new(
        p: usize,
        max_order: usize,
        labels: Vec<Monomial>,
        values: Array2<f64>,
    ) -> Result<Self> {
        if values.nrows() != labels.len() {
            return Err(Error::ValueRowMismatch {
                rows: values.nrows(),
                labels: labels.len(),
            });
        }
        let mut seen = HashSet::with_capacity(labels.len());
        for label in &labels {
            if label.order() > max_order {
                return Err(Error::LabelOrderTooHigh {
                    label: label.to_string(),
                    order: label.order(),
                    max_order,
                });
            }
            if let Some(&index) = label.indices().iter().find(|&&i| i as usize > p || i == 0) {
                return Err(Error::LabelIndexOutOfRange { index, p });
            }
            if !seen.insert(label.clone()) {
                return Err(Error::DuplicateLabel {
                    label: label.to_string(),
                });
            }
        }
        Ok(Polynomial {
            p,
            max_order,
            labels,
            values,
        })
    }

    /// Single-output convenience constructor.
    pub fn single_output(
        p: usize,
        max_order: usize,
        labels: Vec<Monomial>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let n = values.len();
        let values = Array2::from_shape_vec((n, 1), values).expect("shape follows from length");
        Polynomial::new(p, max_order, labels, values)
    }

    /// Every monomial of order 0..=max_order over `p` variables, in graded
    /// lexicographic order (intercept first).
    pub fn full_label_set(p: usize, max_order: usize) -> Vec<Monomial> {
        let mut labels = vec![Monomial::intercept()];
        let mut current: Vec<Vec<u32>> = vec![vec![]];
        for _ in 1..=max_order {
            let mut next = Vec::new();
            for prefix in &current {
                let start = prefix.last().copied().unwrap_or(1);
                for var in start..=p as u32 {
                    let mut indices = prefix.clone();
                    indices.push(var);
                    next.push(indices);
                }
            }
            labels.extend(next.iter().cloned().map(Monomial::new));
            current = next;
        }
        labels
    }

    /// Zero polynomial over the full label set.
    pub fn zero_full(p: usize, max_order: usize, channels: usize) -> Self {
        let labels = Self::full_label_set(p, max_order);
        let values = Array2::zeros((labels.len(), channels));
        Polynomial {
            p,
            max_order,
            labels,
            values,
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn labels(&self) -> &[Monomial] {
        &self.labels
    }

    pub fn values(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    pub fn channels(&self) -> usize {
        self.values.ncols()
    }

    /// Number of labels (= value rows).
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Map from label to row index.
    pub fn label_index(&self) -> HashMap<Monomial, usize> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect()
    }

    /// Coefficient of a raw label (canonicalized first), if present.
    pub fn coefficient(&self, raw: &[u32], channel: usize) -> Option<f64> {
        let label = canonicalize_label(raw, self.p).ok()?;
        self.labels
            .iter()
            .position(|l| *l == label)
            .map(|row| self.values[(row, channel)])
    }

    /// Evaluate at every row of `x` (one observation per row): entry (i, j) is
    /// the channel-j polynomial at observation i.
    pub fn eval(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.p {
            return Err(Error::DimensionMismatch {
                context: "eval_poly input",
                expected: self.p,
                found: x.ncols(),
            });
        }
        let n = x.nrows();
        let c = self.channels();
        let mut out = Array2::zeros((n, c));
        for i in 0..n {
            let row = x.row(i);
            for (li, label) in self.labels.iter().enumerate() {
                let mut term = 1.0;
                for &var in label.indices() {
                    term *= row[var as usize - 1];
                }
                for j in 0..c {
                    out[(i, j)] += self.values[(li, j)] * term;
                }
            }
        }
        Ok(out)
    }

    /// Per-channel top-`n` coefficients by absolute value, descending, with
    /// ties broken by graded-lexicographic label order. The intercept never
    /// participates in the ranking.
    pub fn top_coefficients(&self, n: usize) -> Vec<Vec<(Monomial, f64)>> {
        (0..self.channels())
            .map(|channel| {
                let mut ranked: Vec<(Monomial, f64)> = self
                    .labels
                    .iter()
                    .enumerate()
                    .filter(|(_, label)| !label.is_intercept())
                    .map(|(row, label)| (label.clone(), self.values[(row, channel)]))
                    .collect();
                ranked.sort_by(|a, b| {
                    b.1.abs()
                        .partial_cmp(&a.1.abs())
                        .unwrap_or(Ordering::Equal)
                        .then_with(|| a.0.cmp(&b.0))
                });
                ranked.truncate(n);
                ranked
            })
            .collect()
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }
}

/// Weighted sum of single-output polynomials over one shared label list:
/// `weights[0]` is a bias added to the intercept, `weights[i + 1]` scales
/// `polys[i]`. The result always carries an intercept row so the bias has
/// somewhere to land.
pub fn linear_combine(polys: &[Polynomial], weights: &[f64]) -> Result<Polynomial> {
    if weights.len() != polys.len() + 1 {
        return Err(Error::WeightLengthMismatch {
            expected: polys.len() + 1,
            found: weights.len(),
        });
    }
    let first = polys.first().ok_or(Error::LabelSpaceMismatch)?;
    for poly in polys {
        if poly.labels != first.labels || poly.p != first.p || poly.channels() != 1 {
            return Err(Error::LabelSpaceMismatch);
        }
    }

    let mut labels = first.labels.clone();
    let intercept_row = match labels.iter().position(Monomial::is_intercept) {
        Some(row) => row,
        None => {
            labels.insert(0, Monomial::intercept());
            0
        }
    };
    let mut values = Array2::zeros((labels.len(), 1));
    let offset = labels.len() - first.labels.len();
    for (i, poly) in polys.iter().enumerate() {
        let w = weights[i + 1];
        for row in 0..poly.labels.len() {
            values[(row + offset, 0)] += w * poly.values[(row, 0)];
        }
    }
    values[(intercept_row, 0)] += weights[0];
    Polynomial::new(first.p, first.max_order, labels, values)
}

#[derive(Serialize, Deserialize)]
struct PolynomialRepr {
    p: usize,
    max_order: usize,
    labels: Vec<Vec<u32>>,
    values: Vec<Vec<f64>>,
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let labels = self
            .labels
            .iter()
            .map(|label| {
                if label.is_intercept() {
                    // serialized intercept convention
                    vec![0]
                } else {
                    label.indices().to_vec()
                }
            })
            .collect();
        let values = self
            .values
            .rows()
            .into_iter()
            .map(|row| row.to_vec())
            .collect();
        PolynomialRepr {
            p: self.p,
            max_order: self.max_order,
            labels,
            values,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = PolynomialRepr::deserialize(deserializer)?;
        if repr.labels.len() != repr.values.len() {
            return Err(D::Error::custom(format!(
                "{} labels but {} value rows",
                repr.labels.len(),
                repr.values.len()
            )));
        }
        let channels = repr.values.first().map_or(1, Vec::len);
        for (i, row) in repr.values.iter().enumerate() {
            if row.len() != channels {
                return Err(D::Error::custom(format!(
                    "ragged values: row {i} has {} entries, expected {channels}",
                    row.len()
                )));
            }
        }
        let labels = repr
            .labels
            .iter()
            .map(|raw| canonicalize_label(raw, repr.p))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        let flat: Vec<f64> = repr.values.into_iter().flatten().collect();
        let values = Array2::from_shape_vec((labels.len(), channels), flat)
            .map_err(D::Error::custom)?;
        Polynomial::new(repr.p, repr.max_order, labels, values).map_err(D::Error::custom)
    }
}
